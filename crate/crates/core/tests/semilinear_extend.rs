use ftpg::ample::{is_ample, sample_ample_subset, AmpleFamily, AmpleSubset};
use ftpg::extend::{
    extend, restrict, restrict_semilinear, validate_partial, ConcurrencyCheck, ExtendError, ExtendOptions,
    SearchOrder, ValidationFailure,
};
use ftpg::gf::{Fe, Gf};
use ftpg::projgeom::ProjSpace;
use ftpg::semilinear::{decode_ftpg, equal_up_to_scalar, SemilinearIso};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CONFIGS: [(u32, u32, usize); 5] = [(5, 1, 3), (7, 1, 3), (2, 3, 3), (3, 2, 3), (5, 1, 4)];

fn space(p: u32, n: u32, d: usize) -> ProjSpace {
    ProjSpace::new(&Gf::new(p, n).unwrap(), d).unwrap()
}

fn random_vec(f: &Gf, d: usize, rng: &mut impl Rng) -> Vec<Fe> {
    (0..d).map(|_| f.element(rng.gen_range(0..f.q())).unwrap()).collect()
}

fn add(f: &Gf, a: &[Fe], b: &[Fe]) -> Vec<Fe> {
    a.iter().zip(b).map(|(&x, &y)| f.add(x, y)).collect()
}

fn scale(f: &Gf, c: Fe, a: &[Fe]) -> Vec<Fe> {
    a.iter().map(|&x| f.mul(c, x)).collect()
}

#[test]
fn decode_round_trip_200() {
    for (p, n, d) in CONFIGS {
        let s = space(p, n, d);
        let f = s.field().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(p as u64 * 100 + n as u64 * 10 + d as u64);
        for _ in 0..200 {
            let lambda = SemilinearIso::random(&s, &s, None, &mut rng).unwrap();
            let dec = decode_ftpg(&lambda.induce()).unwrap();
            assert!(equal_up_to_scalar(&lambda, &dec).is_some());
            assert_eq!(dec.frob_exp(), lambda.frob_exp());
            // Semilinearity on random probes.
            for _ in 0..5 {
                let (x, y) = (random_vec(&f, d, &mut rng), random_vec(&f, d, &mut rng));
                let a = f.element(rng.gen_range(0..f.q())).unwrap();
                let lhs = dec.apply(&add(&f, &scale(&f, a, &x), &y)).unwrap();
                let rhs = add(&f, &scale(&f, dec.mu().apply(a), &dec.apply(&x).unwrap()), &dec.apply(&y).unwrap());
                assert_eq!(lhs, rhs);
            }
        }
    }
}

#[test]
fn induced_maps_preserve_lines_exhaustively() {
    for (p, n) in [(2, 1), (3, 1), (2, 2), (5, 1)] {
        let s = space(p, n, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(p as u64);
        for _ in 0..10 {
            let c = SemilinearIso::random(&s, &s, None, &mut rng).unwrap().induce();
            c.check_lines().unwrap();
            for l in 0..s.line_count() as u32 {
                let img: Vec<u32> = s.points_on(l).iter().map(|&x| c.point_image(x)).collect();
                assert!(img.iter().all(|&x| s.on_line(x, c.line_image(l))));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn composition_commutes_with_induce(seed in any::<u64>()) {
        let s = space(3, 2, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = SemilinearIso::random(&s, &s, None, &mut rng).unwrap();
        let b = SemilinearIso::random(&s, &s, None, &mut rng).unwrap();
        let ab = a.then(&b).unwrap();
        let composed = a.induce().then(&b.induce()).unwrap();
        let direct = ab.induce();
        prop_assert_eq!(direct.sigma(), composed.sigma());
        prop_assert_eq!(ab.frob_exp(), (a.frob_exp() + b.frob_exp()) % 2);
    }

    #[test]
    fn scalar_precomposition_is_invisible(seed in any::<u64>(), c in 1u32..9) {
        let s = space(3, 2, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = SemilinearIso::random(&s, &s, None, &mut rng).unwrap();
        let scalar = s.field().element(c).unwrap();
        let b = a.precompose_scalar(scalar).unwrap();
        let (ia, ib) = (a.induce(), b.induce());
        prop_assert_eq!(ia.sigma(), ib.sigma());
        prop_assert_eq!(equal_up_to_scalar(&a, &b), Some(scalar));
    }

    #[test]
    fn extend_recovers_and_ignores_order(seed in any::<u64>(), cfg in 0usize..5) {
        let (p, n, d) = CONFIGS[cfg];
        let s = space(p, n, d);
        let fam = AmpleFamily::size_at_most(s.field(), 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lambda = SemilinearIso::random(&s, &s, None, &mut rng).unwrap();
        let u = sample_ample_subset(&s, &fam, 100, &mut rng).unwrap();
        prop_assert!(is_ample(&u, &fam).unwrap().ample);
        let pc = restrict_semilinear(&lambda, &u).unwrap();
        let base = extend(&pc, &fam, &fam, &ExtendOptions::default()).unwrap();
        prop_assert!(equal_up_to_scalar(&lambda, &base.decoded).is_some());
        let induced = lambda.induce();
        prop_assert_eq!(base.collineation.sigma(), induced.sigma());
        for order in [SearchOrder::Reversed, SearchOrder::Shuffled { seed }] {
            let opts = ExtendOptions { order, extra_checks: 2, ..ExtendOptions::default() };
            let other = extend(&pc, &fam, &fam, &opts).unwrap();
            prop_assert_eq!(other.collineation.sigma(), base.collineation.sigma());
        }
    }
}

#[test]
fn concurrency_preserved_exhaustively() {
    let s = space(5, 1, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let lambda = SemilinearIso::random(&s, &s, None, &mut rng).unwrap();
    let line = s.join_idx(s.basis_point(0), s.basis_point(1)).unwrap();
    let u = AmpleSubset::complement_of(&s, s.points_on(line)).unwrap();
    let pc = restrict(&lambda.induce(), &u).unwrap();
    let rep = validate_partial(&pc, ConcurrencyCheck::Exhaustive);
    assert!(rep.passed(), "{rep:?}");
    assert!(rep.checks > 0);
}

#[test]
fn mutations_are_caught() {
    let s = space(5, 1, 3);
    let fam = AmpleFamily::size_at_most(s.field(), 1);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let lambda = SemilinearIso::random(&s, &s, None, &mut rng).unwrap();
    let line = s.join_idx(s.basis_point(0), s.basis_point(1)).unwrap();
    let u = AmpleSubset::complement_of(&s, s.points_on(line)).unwrap();
    let pc = restrict_semilinear(&lambda, &u).unwrap();

    let mut swapped = pc.clone();
    let (a, b) = (u.points()[0], u.points()[1]);
    swapped.swap_sigma(a, b);
    let rep = validate_partial(&swapped, ConcurrencyCheck::Skip);
    assert!(rep.compatibility.is_some());
    assert!(matches!(
        extend(&swapped, &fam, &fam, &ExtendOptions::default()),
        Err(ExtendError::InvalidPartial(_))
    ));

    let mut redirected = pc.clone();
    let l = u.lines_meeting()[0];
    let other = (0..s.line_count() as u32).find(|&m| Some(m) != pc.tau(l)).unwrap();
    redirected.redirect_tau(l, other);
    let rep = validate_partial(&redirected, ConcurrencyCheck::Skip);
    assert!(matches!(rep.incidence, Some(ValidationFailure::LinesThroughPoint { .. })), "{rep:?}");
    assert!(!rep.passed());
}

#[test]
fn non_ample_input_is_rejected() {
    let s = space(5, 1, 3);
    let fam = AmpleFamily::size_at_most(s.field(), 1);
    let (a, b) = (s.basis_point(0), s.basis_point(1));
    let u = AmpleSubset::complement_of(&s, &[a, b]).unwrap();
    let pc = restrict_semilinear(&SemilinearIso::identity(&s), &u).unwrap();
    assert!(matches!(
        extend(&pc, &fam, &fam, &ExtendOptions::default()),
        Err(ExtendError::NotAmple { .. })
    ));
    let big = AmpleFamily::size_at_most(s.field(), 2);
    assert!(matches!(
        extend(&pc, &big, &big, &ExtendOptions::default()),
        Err(ExtendError::NotAdmissible(_))
    ));
}
