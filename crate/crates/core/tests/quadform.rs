use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crystalline::quadform::{
    build_nonneutral, disc_class, hilbert_symbol, hilbert_symbol_bruteforce, is_neutral, random_unimodular, witt_split,
    ZpLattice,
};

fn odd_prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![3u64, 5, 7, 11])
}

fn strip_squares(mut a: i64, p: u64) -> i64 {
    let p2 = (p * p) as i64;
    while a % p2 == 0 {
        a /= p2;
    }
    a
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn invariants_survive_unimodular_base_change(
        p in odd_prime(),
        diag in prop::collection::vec(1i64..50, 2..=5),
        seed in any::<u64>(),
    ) {
        let n = 6;
        let gram: Vec<Vec<i64>> = (0..diag.len())
            .map(|i| (0..diag.len()).map(|j| if i == j { diag[i] } else { 0 }).collect())
            .collect();
        prop_assume!(diag.iter().all(|d| d % p as i64 != 0));
        let l = ZpLattice::from_ints(p, n, &gram).unwrap();
        let u = random_unimodular(p, n, diag.len(), &mut ChaCha8Rng::seed_from_u64(seed));
        let m = l.base_change(&u);
        prop_assert_eq!(l.disc_valuation(), m.disc_valuation());
        prop_assert_eq!(l.hasse_invariant().unwrap(), m.hasse_invariant().unwrap());
        let (fl, fm) = (l.reduce(), m.reduce());
        prop_assert_eq!(disc_class(&fl), disc_class(&fm));
        prop_assert_eq!(witt_split(&fl, 0).unwrap().0, witt_split(&fm, 0).unwrap().0);
    }

    #[test]
    fn hilbert_symbol_matches_brute_force(a in 1i64..200, b in 1i64..200, p in odd_prime()) {
        let q = |v: i64| BigRational::from_integer(BigInt::from(v));
        // Search depth p^3 is exact only for valuations ≤ 1; (a·p², b) = (a, b) via x ↦ px.
        let oracle = hilbert_symbol_bruteforce(strip_squares(a, p), strip_squares(b, p), p, 3);
        prop_assert_eq!(hilbert_symbol(&q(a), &q(b), p).unwrap(), oracle);
    }
}

#[test]
fn nonneutral_forms_are_not_neutral() {
    for p in [3u64, 5, 7] {
        for sigma0 in 1..=3u32 {
            let f = build_nonneutral(sigma0, p).unwrap();
            assert_eq!(f.dim(), 2 * sigma0 as usize);
            assert!(!f.is_degenerate());
            assert!(!is_neutral(&f, 0).unwrap());
            assert_eq!(witt_split(&f, 0).unwrap().0, sigma0 as usize - 1);
        }
    }
}

#[test]
fn hilbert_symbol_exhaustive_at_three() {
    let q = |v: i64| BigRational::from_integer(BigInt::from(v));
    for a in (-120i64..=120).filter(|&a| a != 0) {
        for b in (-120i64..=120).filter(|&b| b != 0) {
            let oracle = hilbert_symbol_bruteforce(strip_squares(a, 3), strip_squares(b, 3), 3, 3);
            assert_eq!(hilbert_symbol(&q(a), &q(b), 3).unwrap(), oracle, "({a}, {b})_3");
        }
    }
}
