use proptest::prelude::*;

use crystalline::fgl::{elliptic_fgl, ga, gm, BaseRing, HeightResult, TruncatedSeries, Weierstrass};
use crystalline::{FiniteField, Ring};

fn fp(p: u64) -> BaseRing {
    BaseRing::finite(&FiniteField::prime(p).unwrap())
}

fn strict_change(ring: &BaseRing, order: u32, coeffs: &[i64]) -> TruncatedSeries {
    let mut c = vec![ring.zero(), ring.one()];
    c.extend(coeffs.iter().map(|&v| ring.from_i64(v)));
    TruncatedSeries::univariate(ring, order, &c).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn height_is_invariant_under_coordinate_change(coeffs in prop::collection::vec(0i64..3, 1..4)) {
        let r = fp(3);
        let phi = strict_change(&r, 28, &coeffs);
        let f = gm(&r, 28).unwrap();
        let g = f.conjugate(&phi).unwrap();
        prop_assert!(g.check_axioms().unwrap().passed());
        prop_assert_eq!(g.height(3).unwrap(), f.height(3).unwrap());
    }

    #[test]
    fn reversion_inverts(coeffs in prop::collection::vec(-5i64..5, 1..6)) {
        let q = BaseRing::Rationals;
        let phi = strict_change(&q, 9, &coeffs);
        let psi = phi.reversion().unwrap();
        let x = TruncatedSeries::variable(&q, 1, 9, 0).unwrap();
        prop_assert_eq!(phi.substitute(std::slice::from_ref(&psi)).unwrap(), x.clone());
        prop_assert_eq!(psi.substitute(&[phi]).unwrap(), x);
    }

    #[test]
    fn multiplication_by_n_composes(m in 1u64..6, n in 1u64..6) {
        let r = fp(5);
        let f = gm(&r, 12).unwrap();
        let mn = f.mul_by_n(m * n).unwrap();
        let composed = f.mul_by_n(m).unwrap().substitute(&[f.mul_by_n(n).unwrap()]).unwrap();
        prop_assert_eq!(mn, composed);
    }
}

#[test]
fn logarithm_linearises_the_law() {
    let q = BaseRing::Rationals;
    let log = gm(&q, 10).unwrap().logarithm().unwrap();
    let exp = log.reversion().unwrap();
    for k in 1..10u32 {
        // exp(t) − 1 has coefficients 1/k!.
        let fact: i64 = (1..=k as i64).product();
        assert_eq!(exp.coeff1(k), q.rational(1, fact).unwrap());
    }
    assert!(ga(&q, 10).unwrap().logarithm().unwrap().coeff1(2) == q.zero());
}

#[test]
fn elliptic_laws_satisfy_axioms() {
    let q = BaseRing::Rationals;
    for curve in [[0, 0, 0, -1, 0], [1, 0, 1, 0, 0], [1, -1, 1, -3, 3]] {
        let e = Weierstrass::new(curve);
        let f = elliptic_fgl(&e, &q, 10).unwrap();
        assert!(f.check_axioms().unwrap().passed(), "{curve:?}");
        assert!(f.logarithm().is_ok(), "{curve:?}");
    }
}

#[test]
fn elliptic_heights_agree_with_point_counts() {
    for p in [3u64, 7] {
        let k = FiniteField::prime(p).unwrap();
        let r = BaseRing::finite(&k);
        for (a, b) in [(1, 0), (0, 1), (1, 1), (2, 1)] {
            let e = Weierstrass::short(a, b);
            if !e.is_smooth_over(&r) {
                continue;
            }
            let h = elliptic_fgl(&e, &r, (p * p) as u32).unwrap().height(2).unwrap();
            let expected = if e.is_supersingular_by_count(&k) { 2 } else { 1 };
            assert!(matches!(h, HeightResult::Finite(s, _) if s == expected), "p = {p}, ({a}, {b}): {h:?}");
        }
    }
}
