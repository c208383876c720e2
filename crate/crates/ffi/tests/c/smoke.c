#include <stdio.h>
#include <string.h>
#include "ftpg.h"

#define CHECK(x)                                                        \
    do {                                                                \
        FtpgStatus s_ = (x);                                            \
        if (s_ != FTPG_STATUS_OK) {                                     \
            fprintf(stderr, "%s failed: %d %s\n", #x, (int)s_,          \
                    ftpg_last_error() ? ftpg_last_error() : "");        \
            return 1;                                                   \
        }                                                               \
    } while (0)

int main(void) {
    FtpgField *f = NULL;
    FtpgSpace *s = NULL;
    FtpgSemilinear *lambda = NULL, *decoded = NULL;
    FtpgPartial *pc = NULL;
    FtpgExtension *ext = NULL;
    CHECK(ftpg_field_new(5, 1, &f));
    CHECK(ftpg_space_new(f, 3, &s));
    size_t n = ftpg_space_point_count(s);
    CHECK(ftpg_semilinear_random(s, 42, -1, &lambda));

    /* Everything off the line x = 0, i.e. the n - 6 points (1:y:z). */
    uint32_t pts[64];
    size_t len = 0;
    for (uint32_t p = 0; p + 6 < n; p++) pts[len++] = p;
    CHECK(ftpg_partial_restrict(lambda, pts, len, &pc));
    CHECK(ftpg_extend(pc, 1, &ext));
    CHECK(ftpg_extension_decoded(ext, &decoded));
    bool equal = false;
    uint32_t scalar = 0;
    CHECK(ftpg_semilinear_equal_up_to_scalar(lambda, decoded, &equal, &scalar));
    if (!equal) return 2;

    char *order = NULL;
    CHECK(ftpg_gl_order(2, 3, &order));
    if (strcmp(order, "48") != 0) return 3;
    ftpg_string_free(order);

    if (ftpg_field_new(6, 1, &f) != FTPG_STATUS_INVALID_ARGUMENT) return 4;

    ftpg_semilinear_free(decoded);
    ftpg_extension_free(ext);
    ftpg_partial_free(pc);
    ftpg_semilinear_free(lambda);
    ftpg_space_free(s);
    ftpg_field_free(f);
    printf("ok %s\n", ftpg_version());
    return 0;
}
