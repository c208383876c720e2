use ftpg::extend::{validate_partial, ConcurrencyCheck};
use ftpg::funcfield::{
    divisor_of, run_demo, scramble, unit_subset, ClosedPointP1, DemoInstance, DivisorP1, RationalFunction,
};
use ftpg::gf::{Fe, Gf};
use ftpg::poly::Poly;
use proptest::prelude::*;

fn field() -> Gf {
    Gf::new(7, 1).unwrap()
}

fn poly_strategy(max_deg: usize) -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0u32..7, 1..=max_deg + 1)
}

fn rational(num: Vec<u32>, den: Vec<u32>, f: &Gf) -> Option<RationalFunction> {
    let num = Poly::new(num.into_iter().map(|c| f.element(c).unwrap()).collect());
    let den = Poly::new(den.into_iter().map(|c| f.element(c).unwrap()).collect());
    if num.is_zero() || den.is_zero() {
        return None;
    }
    RationalFunction::new(num, den, f).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn principal_divisors_have_degree_zero(n in poly_strategy(5), d in poly_strategy(5)) {
        let f = field();
        if let Some(func) = rational(n, d, &f) {
            prop_assert_eq!(divisor_of(&func, &f).unwrap().degree(), 0);
        }
    }

    #[test]
    fn divisor_is_a_homomorphism(a in poly_strategy(3), b in poly_strategy(3), c in poly_strategy(3), d in poly_strategy(3)) {
        let f = field();
        if let (Some(x), Some(y)) = (rational(a, b, &f), rational(c, d, &f)) {
            let lhs = divisor_of(&x.mul(&y, &f), &f).unwrap();
            let rhs = divisor_of(&x, &f).unwrap().add(&divisor_of(&y, &f).unwrap());
            prop_assert_eq!(lhs, rhs);
        }
    }
}

/// Membership checked by evaluating at each avoided rational point.
#[test]
fn unit_membership_by_evaluation() {
    let f = Gf::new(11, 1).unwrap();
    let d = DivisorP1::from_points(&[(ClosedPointP1::rational(f.from_int(1), &f), 2)]);
    let e = vec![
        ClosedPointP1::rational(Fe::ZERO, &f),
        ClosedPointP1::rational(f.from_int(5), &f),
        ClosedPointP1::Infinity,
    ];
    let u = unit_subset(&d, &e, &f).unwrap();
    for class in 0..u.space().point_count() as u32 {
        let func = u.representative(class);
        let finite_ok = [0, 5].iter().all(|&a| func.eval(f.from_int(a), &f).is_some_and(|v| !v.is_zero()));
        let inf_ok = func.eval_infinity().is_some_and(|v| !v.is_zero());
        assert_eq!(u.subset().contains(class), finite_ok && inf_ok, "{func}");
    }
}

#[test]
fn scrambles_validate() {
    for inst in [DemoInstance::q13(), DemoInstance::q9_frobenius()] {
        let s = scramble(&inst.mobius, inst.frob, &inst.d, &inst.e, &inst.field).unwrap();
        assert!(validate_partial(&s.partial, ConcurrencyCheck::Exhaustive).passed());
    }
}

#[test]
fn demo_certificates() {
    let r13 = run_demo(&DemoInstance::q13(), 0).unwrap();
    assert_eq!(r13.certificate.max_complement, 2);
    assert!(r13.certificate.ample && r13.certificate.certifiable);
    assert_eq!(r13.dim, 3);
    assert!(r13.recovered);

    let r9 = run_demo(&DemoInstance::q9_frobenius(), 0).unwrap();
    assert_eq!(r9.certificate.max_complement, 1);
    assert_eq!(r9.ring.frob_exp, 1);
    assert!(r9.recovered);
}
