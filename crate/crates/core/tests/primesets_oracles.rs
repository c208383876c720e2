use ftpg::numth::{is_prime, pow_mod, primes_up_to};
use ftpg::primesets::{
    gl_order, natural_density_estimate, recover_m0_and_p, sigma_part, w_sequence, PrimeSet,
};
use num_bigint::BigUint;
use num_rational::Ratio;

fn trial_division(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        while n.is_multiple_of(d) {
            out.push(d);
            n /= d;
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

#[test]
fn sigma_part_matches_trial_division() {
    let sets = [
        PrimeSet::finite(&[2, 3]).unwrap(),
        PrimeSet::cofinite(&[3, 5]).unwrap(),
        PrimeSet::all(),
        PrimeSet::small_order(13, 1, 2).unwrap(),
    ];
    for set in &sets {
        for n in 1..=10_000u64 {
            let expected: u64 = trial_division(n).into_iter().filter(|&l| set.contains(l)).product();
            let got = sigma_part(&BigUint::from(n), set).unwrap();
            assert_eq!(got.n_sigma, BigUint::from(expected), "n = {n}, set = {set:?}");
            assert_eq!(&got.n_sigma * &got.n_sigma_prime, BigUint::from(n));
        }
    }
}

#[test]
fn gl_order_matches_matrix_count() {
    for (n, l) in [(1u32, 2u64), (1, 3), (2, 2), (2, 3)] {
        let size = n * n;
        let mut count = 0u64;
        for code in 0..l.pow(size) {
            let mut m = vec![0i64; size as usize];
            let mut c = code;
            for x in m.iter_mut() {
                *x = (c % l) as i64;
                c /= l;
            }
            let det = if n == 1 { m[0] } else { m[0] * m[3] - m[1] * m[2] };
            if det.rem_euclid(l as i64) != 0 {
                count += 1;
            }
        }
        assert_eq!(gl_order(n, l).unwrap(), BigUint::from(count), "GL_{n}(F_{l})");
    }
}

#[test]
fn growth_recovery_closed_loop() {
    for q in [2u64, 3, 4, 5, 9] {
        for a in 1..=3u32 {
            for excluded in [&[][..], &[3][..], &[3, 5][..]] {
                let sigma = PrimeSet::cofinite(excluded).unwrap();
                let l0 = (2..).find(|&l| is_prime(l) && !excluded.contains(&l)).unwrap();
                let schedule: Vec<u64> = (1..=8).map(|j| l0.pow(j)).take_while(|&n| 2 * a as u64 * n <= 1 << 14).collect();
                let w = w_sequence(q, a, &sigma, &schedule).unwrap();
                let r = recover_m0_and_p(&sigma, &w.schedule, &w.values).unwrap();
                let p = ftpg::numth::prime_power(q).unwrap().0;
                assert_eq!((r.m0, r.p), (q.pow(2 * a), p), "q={q} a={a} excluded={excluded:?}");
            }
        }
    }
}

/// Membership by brute-force search for the least k with l^k = 1 mod r.
#[test]
fn small_order_membership_matches_modular_powers() {
    for (r, g, p) in [(13u64, 1u32, 2u64), (17, 1, 3), (7, 2, 5), (211, 2, 2)] {
        let set = PrimeSet::small_order(r, g, p).unwrap();
        for l in primes_up_to(10_000) {
            let small_order = (1..=2 * g as u64).any(|k| pow_mod(l, k, r) == 1);
            let expected = l == r || l == p || small_order;
            assert_eq!(set.contains(l), expected, "l = {l}, r = {r}");
        }
    }
}

#[test]
fn small_order_density_at_one_million() {
    for (g, r) in [(1u32, 13u64), (1, 17), (2, 211)] {
        let set = PrimeSet::small_order(r, g, 2).unwrap();
        let density = natural_density_estimate(&set, 1_000_000).unwrap();
        let bound = Ratio::new(2 * g as u64 * (2 * g as u64 + 1), 2 * (r - 1)) + Ratio::new(1, 50);
        assert!(density <= bound, "g={g} r={r}: {density} > {bound}");
    }
}
