use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crystalline::fcrystal::{k3_shape_crystal, FCrystal};
use crystalline::polygon::rat;
use crystalline::FiniteField;

fn reduced() -> impl Strategy<Value = (u32, u32)> {
    prop::sample::select(vec![(1u32, 2u32), (1, 3), (2, 3), (1, 4), (3, 4), (2, 5), (3, 5)])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn newton_lies_above_hodge(seed in any::<u64>(), rank in 1usize..=5, max_exp in 1u32..=3, p in prop::sample::select(vec![2u64, 3, 5])) {
        let k = FiniteField::prime(p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = FCrystal::random(&k, rank as u32 * max_exp + 4, rank, max_exp, &mut rng).unwrap();
        let report = c.verify_mazur().unwrap();
        prop_assert!(report.holds());
        prop_assert!(report.dominance.endpoints_equal);
    }

    #[test]
    fn hodge_numbers_add_under_direct_sum((r1, s1) in reduced(), (r2, s2) in reduced()) {
        let k = FiniteField::prime(3).unwrap();
        let a = FCrystal::standard_m(r1, s1, &k, 8).unwrap();
        let b = FCrystal::standard_n(r2, s2, &k, 8).unwrap();
        let (ha, hb) = (a.hodge_numbers().unwrap(), b.hodge_numbers().unwrap());
        let mut expected = vec![0u64; ha.len().max(hb.len())];
        for (i, h) in ha.iter().chain(hb.iter()).enumerate() {
            let idx = if i < ha.len() { i } else { i - ha.len() };
            expected[idx] += h;
        }
        prop_assert_eq!(a.direct_sum(&b).unwrap().hodge_numbers().unwrap(), expected);
    }
}

#[test]
fn standard_slopes() {
    let k = FiniteField::new(3, 2).unwrap();
    for (r, s) in [(1u32, 2u32), (2, 3), (1, 4), (3, 5)] {
        let m = FCrystal::standard_m(r, s, &k, 10).unwrap();
        let slopes = m.newton_slopes().unwrap();
        assert!(slopes.certified);
        assert_eq!(slopes.slopes(), [(rat(r as i64, s as i64), s as u64)]);
    }
}

#[test]
fn k3_shapes_are_realised() {
    let k = FiniteField::prime(3).unwrap();
    for h in [Some(1), Some(2), Some(5), None] {
        let c = k3_shape_crystal(h, &k, 30).unwrap();
        assert_eq!(c.rank(), 22);
        assert!(c.verify_mazur().unwrap().holds());
    }
}
