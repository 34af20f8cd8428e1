use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crystalline::k3crystal::{
    crystal_from_periods, enumerate_generatrices, mu_act, mu_in_field, periods_from_crystal, recommended_precision,
    same_mu_orbit, sample_strict_subspace, subspace_from_coordinates,
};
use crystalline::quadform::build_nonneutral;
use crystalline::FiniteField;

#[test]
fn sigma0_one_round_trip_at_several_primes() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for p in [3u64, 5, 7] {
        let ambient = build_nonneutral(1, p).unwrap();
        let k = FiniteField::new(p, 2).unwrap();
        let sub = sample_strict_subspace(&ambient, 1, &k, 10_000, &mut rng).unwrap();
        let c = crystal_from_periods(1, &sub, recommended_precision(22, 2)).unwrap();
        assert!(c.check_axioms().unwrap().all_passed());
        assert_eq!(c.artin_invariant().unwrap(), 1);
        let back = periods_from_crystal(&c).unwrap();
        assert!(same_mu_orbit(&sub.period_coordinates().unwrap(), &back.subspace.period_coordinates().unwrap()));
    }
}

#[test]
fn period_coordinates_rebuild_the_subspace() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let ambient = build_nonneutral(2, 3).unwrap();
    let k = FiniteField::new(3, 4).unwrap();
    let sub = sample_strict_subspace(&ambient, 2, &k, 100_000, &mut rng).unwrap();
    let pc = sub.period_coordinates().unwrap();
    let rebuilt = subspace_from_coordinates(&pc).unwrap();
    assert!(same_mu_orbit(&pc, &rebuilt.period_coordinates().unwrap()));
    for zeta in mu_in_field(&k, 2) {
        assert!(same_mu_orbit(&pc, &mu_act(&pc, &zeta)));
    }
}

#[test]
fn generatrix_counts() {
    assert_eq!(enumerate_generatrices(1, 3, 2).unwrap().count_characteristic, 2);
    assert_eq!(enumerate_generatrices(2, 3, 2).unwrap().count_characteristic, 20);
}
