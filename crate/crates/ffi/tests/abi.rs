use std::ffi::CStr;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use ftpg_ffi::*;

fn ok(s: FtpgStatus) {
    assert_eq!(s, FtpgStatus::Ok, "{:?}", last_error_message());
}

/// Points of P²(F₅) off the line x = 0; the canonical order lists the 25
/// points (1:y:z) first.
fn off_line() -> Vec<u32> {
    (0..25).collect()
}

#[test]
fn extend_round_trip() {
    unsafe {
        let mut f = ptr::null_mut();
        ok(ftpg_field_new(5, 1, &mut f));
        assert_eq!(ftpg_field_order(f), 5);
        let mut s = ptr::null_mut();
        ok(ftpg_space_new(f, 3, &mut s));
        assert_eq!(ftpg_space_point_count(s), 31);
        assert_eq!(ftpg_space_line_count(s), 31);

        let mut lambda = ptr::null_mut();
        ok(ftpg_semilinear_random(s, 7, -1, &mut lambda));
        let pts = off_line();
        let mut pc = ptr::null_mut();
        ok(ftpg_partial_restrict(lambda, pts.as_ptr(), pts.len(), &mut pc));

        let mut count = 0u64;
        ok(ftpg_brute_force_count(pc, &mut count));
        assert_eq!(count, 1);

        let mut ext = ptr::null_mut();
        ok(ftpg_extend(pc, 1, &mut ext));
        for p in 0..31 {
            let (mut a, mut b) = (0u32, 0u32);
            ok(ftpg_extension_point_image(ext, p, &mut a));
            ok(ftpg_semilinear_point_image(lambda, p, &mut b));
            assert_eq!(a, b);
        }
        let mut dec = ptr::null_mut();
        ok(ftpg_extension_decoded(ext, &mut dec));
        let (mut eq, mut c) = (false, 0u32);
        ok(ftpg_semilinear_equal_up_to_scalar(lambda, dec, &mut eq, &mut c));
        assert!(eq && c != 0);

        let sigma: Vec<u32> = (0..31)
            .map(|p| {
                let mut v = 0;
                ok(ftpg_extension_point_image(ext, p, &mut v));
                v
            })
            .collect();
        let mut dec2 = ptr::null_mut();
        ok(ftpg_decode(s, sigma.as_ptr(), sigma.len(), &mut dec2));
        ok(ftpg_semilinear_equal_up_to_scalar(dec, dec2, &mut eq, &mut c));
        assert!(eq);

        ftpg_semilinear_free(dec2);
        ftpg_semilinear_free(dec);
        ftpg_extension_free(ext);
        ftpg_partial_free(pc);
        ftpg_semilinear_free(lambda);
        ftpg_space_free(s);
        ftpg_field_free(f);
    }
}

#[test]
fn error_codes() {
    unsafe {
        let mut f = ptr::null_mut();
        assert_eq!(ftpg_field_new(4, 1, &mut f), FtpgStatus::InvalidArgument);
        assert!(last_error_message().is_some());
        assert_eq!(ftpg_field_new(5, 1, ptr::null_mut()), FtpgStatus::NullPointer);
        assert_eq!(ftpg_space_new(ptr::null(), 3, &mut ptr::null_mut()), FtpgStatus::NullPointer);

        ok(ftpg_field_new(5, 1, &mut f));
        let mut s = ptr::null_mut();
        ok(ftpg_space_new(f, 3, &mut s));
        let mut id = ptr::null_mut();
        let eye = [1u32, 0, 0, 0, 1, 0, 0, 0, 1];
        ok(ftpg_semilinear_new(s, 0, eye.as_ptr(), eye.len(), &mut id));
        assert_eq!(ftpg_semilinear_frob_exp(id), 0);
        let singular = [1u32, 0, 0, 0, 1, 0, 0, 0, 0];
        let mut bad = ptr::null_mut();
        assert_eq!(ftpg_semilinear_new(s, 0, singular.as_ptr(), 9, &mut bad), FtpgStatus::InvalidArgument);

        // Two points removed: the line joining them misses two points.
        let pts: Vec<u32> = (2..31).collect();
        let mut pc = ptr::null_mut();
        ok(ftpg_partial_restrict(id, pts.as_ptr(), pts.len(), &mut pc));
        let mut ext = ptr::null_mut();
        assert_eq!(ftpg_extend(pc, 1, &mut ext), FtpgStatus::NotAmple);
        assert_eq!(ftpg_extend(pc, 2, &mut ext), FtpgStatus::NotAdmissible);
        assert!(ext.is_null());

        ftpg_partial_free(pc);
        ftpg_semilinear_free(id);
        ftpg_space_free(s);
        ftpg_field_free(f);
        ftpg_field_free(ptr::null_mut());
    }
}

#[test]
fn prime_sets_and_orders() {
    unsafe {
        let (mut r, mut cert) = (0u64, false);
        ok(ftpg_prime_set_construct(1, 2, 3, 10, 10_000, &mut r, &mut cert));
        assert_eq!(r, 13);
        assert!(cert);
        let (mut num, mut den) = (0u64, 0u64);
        ok(ftpg_prime_set_density(13, 1, 2, 100_000, &mut num, &mut den));
        assert!(num * 20 <= den * 6);
        assert_eq!(ftpg_prime_set_construct(0, 2, 3, 10, 100, &mut r, &mut cert), FtpgStatus::PrimeSet);

        let mut s = ptr::null_mut();
        ok(ftpg_gl_order(2, 2, &mut s));
        assert_eq!(CStr::from_ptr(s).to_str().unwrap(), "6");
        ftpg_string_free(s);
        ok(ftpg_gl_order(4, 101, &mut s));
        assert!(CStr::from_ptr(s).to_bytes().len() > 20);
        ftpg_string_free(s);
        assert!(!CStr::from_ptr(ftpg_version()).to_bytes().is_empty());
    }
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/ftpg.h")).unwrap();
    let src = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/src/lib.rs")).unwrap();
    let exports: Vec<&str> = src
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() > 20);
    for name in exports {
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
}

/// Compiles and runs a C program against the header and static library.
#[test]
fn c_smoke_program() {
    let Some(cc) = ["cc", "gcc", "clang"].into_iter().find(|c| Command::new(c).arg("--version").output().is_ok()) else {
        eprintln!("no C compiler found; C smoke program not run");
        return;
    };
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // Test binaries live in target/<profile>/deps; the static library is
    // one level up.
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let lib = profile_dir.join("libftpg_ffi.a");
    assert!(lib.exists(), "static library not found at {}", lib.display());
    let out = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("ftpg_smoke");
    let status = Command::new(cc)
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let run = Command::new(&out).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok "));
}
