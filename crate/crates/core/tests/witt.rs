use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crystalline::witt::WittVector;
use crystalline::{FiniteField, Rationals, Ring};

fn config() -> impl Strategy<Value = (u64, usize, usize, u64)> {
    (prop::sample::select(vec![2u64, 3, 5]), 1usize..=3, 1usize..=2, any::<u64>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_laws((p, n, a, seed) in config()) {
        let k = FiniteField::new(p, a).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let [x, y, z] = [0, 1, 2].map(|_| WittVector::random(&k, n, &mut rng));
        prop_assert_eq!(x.add(&y).unwrap().add(&z).unwrap(), x.add(&y.add(&z).unwrap()).unwrap());
        prop_assert_eq!(x.mul(&y).unwrap(), y.mul(&x).unwrap());
        prop_assert_eq!(x.mul(&y.add(&z).unwrap()).unwrap(), x.mul(&y).unwrap().add(&x.mul(&z).unwrap()).unwrap());
        prop_assert!(x.sub(&x).unwrap().is_zero());
        let one = WittVector::one(k.clone(), p, n).unwrap();
        prop_assert_eq!(x.mul(&one).unwrap(), x);
    }

    #[test]
    fn frobenius_and_verschiebung((p, n, a, seed) in config()) {
        let k = FiniteField::new(p, a).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = WittVector::random(&k, n, &mut rng);
        let y = WittVector::random(&k, n, &mut rng);
        let f = |w: &WittVector<FiniteField>| w.frobenius().unwrap();
        prop_assert_eq!(f(&x.mul(&y).unwrap()), f(&x).mul(&f(&y)).unwrap());
        prop_assert_eq!(f(&x.add(&y).unwrap()), f(&x).add(&f(&y)).unwrap());
        let p_w = WittVector::from_int(k.clone(), p, n, &BigInt::from(p)).unwrap();
        prop_assert_eq!(x.verschiebung().unwrap().frobenius().unwrap(), p_w.mul(&x).unwrap());
    }

    #[test]
    fn integers_embed(m1 in 0i64..10_000, m2 in 0i64..10_000, p in prop::sample::select(vec![2u64, 3, 5, 7])) {
        let k = FiniteField::prime(p).unwrap();
        let w = |m: i64| WittVector::from_int(k.clone(), p, 3, &BigInt::from(m)).unwrap();
        prop_assert_eq!(w(m1).add(&w(m2)).unwrap(), w(m1 + m2));
        prop_assert_eq!(w(m1).mul(&w(m2)).unwrap(), w(m1 * m2));
        let modulus = BigInt::from(p).pow(3);
        prop_assert_eq!(w(m1).to_residue().unwrap(), BigInt::from(m1) % modulus);
    }

    #[test]
    fn ghost_map_is_a_homomorphism(xs in prop::collection::vec(-20i64..20, 6), p in prop::sample::select(vec![2u64, 3])) {
        let q = |v: i64| BigRational::from_integer(BigInt::from(v));
        let x = WittVector::new(Rationals, p, xs[..3].iter().map(|&v| q(v)).collect()).unwrap();
        let y = WittVector::new(Rationals, p, xs[3..].iter().map(|&v| q(v)).collect()).unwrap();
        let (gx, gy) = (x.ghost().unwrap(), y.ghost().unwrap());
        let sum: Vec<_> = gx.iter().zip(&gy).map(|(a, b)| Rationals.add(a, b)).collect();
        let prod: Vec<_> = gx.iter().zip(&gy).map(|(a, b)| Rationals.mul(a, b)).collect();
        prop_assert_eq!(x.add(&y).unwrap().ghost().unwrap(), sum);
        prop_assert_eq!(x.mul(&y).unwrap().ghost().unwrap(), prod);
    }
}

#[test]
fn w2_of_f2_is_z_mod_4() {
    let k = FiniteField::prime(2).unwrap();
    let two = WittVector::from_int(k.clone(), 2, 2, &BigInt::from(2)).unwrap();
    let four = two.add(&two).unwrap();
    assert!(four.is_zero());
    assert!(!two.is_zero());
}
