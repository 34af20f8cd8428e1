//! Passage between supersingular K3 crystals and characteristic subspaces.
//!
//! Given K ⊂ T_0 ⊗ k, where T_0 = pΓ^∨/pΓ, the crystal is
//! H = Γ ⊗ W + p⁻¹·{x ∈ Γ ⊗ W : x mod p ∈ K} with φ = p·(1 ⊗ σ) on Γ ⊗ W.
//! With K in reduced row echelon form (pivots J), H has basis
//! {p⁻¹·k̃_i} ∪ {ε_j : j ∉ J}, where k̃_i lifts the i-th row of K.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::fcrystal::FCrystal;
use crate::field::Fq;
use crate::galois::{GaloisRing, Gr};
use crate::linalg;
use crate::matrix::Matrix;
use crate::quadform::{build_nonneutral, FpForm, ZpLattice};
use crate::ring::Ring;

use super::charsub::{same_mu_orbit, CharSubspace};
use super::crystal::K3Crystal;

/// Output of `periods_from_crystal`.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodData {
    pub tate: ZpLattice,
    pub subspace: CharSubspace,
}

/// Working precision that certifies slope-1 purity for a rank-r crystal over F_{p^a}.
pub fn recommended_precision(rank: usize, degree: usize) -> u32 {
    (rank * degree) as u32 + 4
}

fn centered(x: u64, p: u64) -> i64 {
    if x > p / 2 {
        x as i64 - p as i64
    } else {
        x as i64
    }
}

/// Γ = p·(lift of the ambient form) ⊥ (non-neutral unimodular complement), of the given rank.
pub fn ss_lattice_for(ambient: &FpForm, rank: usize, n: u32) -> Result<ZpLattice> {
    let p = ambient.p();
    let d0 = ambient.dim();
    if rank < d0 + 2 || (rank - d0) % 2 == 1 {
        return Err(Error::InvalidArgument(format!("rank {rank} incompatible with a {d0}-dimensional p-modular part")));
    }
    let comp = build_nonneutral(((rank - d0) / 2) as u32, p)?;
    let mut g = vec![vec![0i64; rank]; rank];
    for i in 0..d0 {
        for j in 0..d0 {
            g[i][j] = p as i64 * centered(ambient.gram()[i][j], p);
        }
    }
    for i in 0..rank - d0 {
        for j in 0..rank - d0 {
            g[d0 + i][d0 + j] = centered(comp.gram()[i][j], p);
        }
    }
    ZpLattice::from_ints(p, n, &g)
}

/// Builds the rank-22 K3 crystal of K and self-validates it.
pub fn crystal_from_periods(sigma0: u32, k: &CharSubspace, n: u32) -> Result<K3Crystal> {
    crystal_from_periods_rank(sigma0, k, n, 22)
}

/// Rank-r variant; ranks other than 22 are experimental on the period side.
pub fn crystal_from_periods_rank(sigma0: u32, k: &CharSubspace, n: u32, rank: usize) -> Result<K3Crystal> {
    if k.sigma0 != sigma0 {
        return Err(Error::InvalidArgument(format!("subspace has σ0 = {}, expected {sigma0}", k.sigma0)));
    }
    if n < 4 {
        return Err(Error::InsufficientPrecision("crystal_from_periods needs n ≥ 4".into()));
    }
    if !k.is_strictly_characteristic()? {
        return Err(Error::InvalidArgument("K is not strictly characteristic".into()));
    }
    let field = &k.field;
    let s0 = sigma0 as usize;
    let hi = GaloisRing::new(field, n + 2)?;
    let ring = GaloisRing::new(field, n)?;
    let gamma = ss_lattice_for(&k.ambient, rank, n + 2)?;

    let rows = linalg::row_space(field, &k.basis);
    let pivots: Vec<usize> = rows.iter().map(|r| r.iter().position(|x| !field.is_zero(x)).expect("nonzero row")).collect();
    let mut cols: Vec<Vec<Gr>> = rows
        .iter()
        .map(|r| (0..rank).map(|j| if j < r.len() { hi.from_fq(&r[j]) } else { hi.zero() }).collect())
        .collect();
    for j in (0..rank).filter(|j| !pivots.contains(j)) {
        cols.push((0..rank).map(|i| if i == j { hi.one() } else { hi.zero() }).collect());
    }
    let q0_hi = Matrix::from_columns(&cols)?;
    let q0 = q0_hi.convert(&hi, &ring);
    let q0_inv = q0.inverse(&ring).ok_or_else(|| Error::SelfValidation("lifted basis is not unimodular".into()))?;
    let c = q0_inv.mul(&ring, &q0.sigma(&ring));
    // A_H = D⁻¹·(p·C)·D with D = diag(p⁻¹ on the first σ0 slots, 1 elsewhere).
    let mut a = Matrix::zero(&ring, rank, rank);
    for i in 0..rank {
        for j in 0..rank {
            let shift = 1 + i32::from(i < s0) - i32::from(j < s0);
            a.set(i, j, ring.mul_p_pow(c.get(i, j), shift as u32));
        }
    }
    let g_gamma = Matrix::from_rows(gamma.gram().iter().map(|r| r.iter().map(|x| hi.from_coeffs(std::slice::from_ref(x))).collect()).collect())?;
    let g_prime = q0_hi.transpose().mul(&hi, &g_gamma).mul(&hi, &q0_hi);
    let mut g = Matrix::zero(&ring, rank, rank);
    for i in 0..rank {
        for j in 0..rank {
            let down = u32::from(i < s0) + u32::from(j < s0);
            let v = hi
                .div_p_pow(g_prime.get(i, j), down)
                .ok_or_else(|| Error::SelfValidation("pairing on H is not integral".into()))?;
            g.set(i, j, ring.from_coeffs(&v));
        }
    }
    let crystal = K3Crystal::new(FCrystal::new(&ring, a)?, g)?;
    validate(&crystal, sigma0, k)?;
    Ok(crystal)
}

fn validate(c: &K3Crystal, sigma0: u32, k: &CharSubspace) -> Result<()> {
    let axioms = c.check_axioms()?;
    if !axioms.all_passed() {
        return Err(Error::SelfValidation(format!("axioms {:?} fail", axioms.failed())));
    }
    if !c.is_supersingular()? {
        return Err(Error::SelfValidation("constructed crystal is not supersingular".into()));
    }
    let s = c.artin_invariant()?;
    if s != sigma0 {
        return Err(Error::SelfValidation(format!("Artin invariant {s} ≠ {sigma0}")));
    }
    if c.rank() == 22 {
        let back = periods_from_crystal(c)?;
        let (a, b) = (k.period_coordinates()?, back.subspace.period_coordinates()?);
        if !same_mu_orbit(&a, &b) {
            return Err(Error::SelfValidation("period coordinates change under the round trip".into()));
        }
    }
    Ok(())
}

/// T_H, and the kernel of T_H ⊗ k → H ⊗ k inside T_0 ⊗ k.
pub fn periods_from_crystal(c: &K3Crystal) -> Result<PeriodData> {
    let ring = c.ring();
    let field = ring.field();
    let t = c.tate_lattice()?;
    if t.report.rank != c.rank() {
        return Err(Error::InsufficientPrecision(format!("Tate module has rank {} < {}", t.report.rank, c.rank())));
    }
    let jordan = t.lattice.jordan_decompose()?;
    let d0 = jordan.g0.rank();
    if d0 == 0 || d0 % 2 == 1 {
        return Err(Error::InvalidArgument(format!("p-modular part of T_H has rank {d0}")));
    }
    let sigma0 = (d0 / 2) as u32;
    // u_i = Σ_l P[l][i]·t_l for the p-modular Jordan block.
    let basis = &t.report.basis;
    let r = c.rank();
    let us: Vec<Vec<Fq>> = (0..d0)
        .map(|i| {
            (0..r)
                .map(|coord| {
                    let mut acc = ring.zero();
                    for (l, tl) in basis.iter().enumerate() {
                        let coef: Gr = ring.from_coeffs(&[jordan.base_change[l][i].clone()]);
                        acc = ring.add(&acc, &ring.mul(&coef, &tl[coord]));
                    }
                    ring.residue(&acc)
                })
                .collect()
        })
        .collect();
    // Kernel of the r × 2σ0 matrix with columns ū_i.
    let m = linalg::transpose(&us);
    let ker = linalg::kernel(field, &m, d0);
    if ker.len() != sigma0 as usize {
        return Err(Error::SelfValidation(format!("γ-kernel has dimension {} instead of {sigma0}", ker.len())));
    }
    let subspace = CharSubspace::new(sigma0, jordan.g0.reduce(), field.clone(), ker)?;
    Ok(PeriodData { tate: t.lattice, subspace })
}

/// Integer matrix with entries in the prime field, for tests and examples.
pub fn int_gram(ring: &GaloisRing, rows: &[Vec<i64>]) -> Result<Matrix> {
    Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| ring.from_coeffs(&[BigInt::from(x)])).collect()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FiniteField;
    use crate::k3crystal::{enumerate_generatrices, isometric_subspaces, sample_strict_subspace};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pipeline(s0: u32, p: u64, m: usize, seed: u64) -> (CharSubspace, K3Crystal) {
        let k = FiniteField::new(p, m).unwrap();
        let amb = build_nonneutral(s0, p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sub = sample_strict_subspace(&amb, s0, &k, 1_000_000, &mut rng).unwrap();
        let c = crystal_from_periods(s0, &sub, recommended_precision(22, m)).unwrap();
        (sub, c)
    }

    #[test]
    fn sigma0_one_pipeline() {
        for p in [3, 5] {
            let (sub, c) = pipeline(1, p, 2, 1);
            assert!(c.check_axioms().unwrap().all_passed());
            assert_eq!(c.artin_invariant().unwrap(), 1);
            let back = periods_from_crystal(&c).unwrap();
            assert!(isometric_subspaces(&sub, &back.subspace).unwrap());
        }
    }

    #[test]
    fn sigma0_two_round_trip() {
        let (sub, c) = pipeline(2, 3, 4, 7);
        assert_eq!(c.artin_invariant().unwrap(), 2);
        assert_eq!(c.tate_lattice().unwrap().report.rank, 22);
        let back = periods_from_crystal(&c).unwrap();
        assert!(same_mu_orbit(&sub.period_coordinates().unwrap(), &back.subspace.period_coordinates().unwrap()));
        assert!(isometric_subspaces(&sub, &back.subspace).unwrap());
    }

    #[test]
    fn non_strict_subspace_rejected() {
        let reps = enumerate_generatrices(2, 3, 2).unwrap().representatives;
        let k = reps.into_iter().next().unwrap();
        assert!(!k.is_strictly_characteristic().unwrap());
        assert!(crystal_from_periods(2, &k, 30).is_err());
    }

    #[test]
    fn isometry_oracle_separates() {
        let (sub, _) = pipeline(2, 3, 4, 3);
        let k = sub.field.clone();
        // A line-type subspace that is not characteristic.
        let e1 = vec![k.from_u64(1), k.from_u64(0), k.from_u64(0), k.from_u64(0)];
        let e2 = vec![k.from_u64(0), k.from_u64(1), k.from_u64(0), k.from_u64(0)];
        let other = CharSubspace::new(2, sub.ambient.clone(), k, vec![e1, e2]).unwrap();
        assert!(!isometric_subspaces(&sub, &other).unwrap());
        assert!(isometric_subspaces(&sub, &sub).unwrap());
    }

    #[test]
    fn scalar_p_is_not_k3() {
        let ring = GaloisRing::new(&FiniteField::prime(3).unwrap(), 30).unwrap();
        let c = K3Crystal::scalar_p(&ring, 22).unwrap();
        let r = c.check_axioms().unwrap();
        assert_eq!(r.failed(), vec![2]);
        assert!(c.is_supersingular().unwrap());
    }

    #[test]
    fn transport_keeps_axioms() {
        let (_, c) = pipeline(1, 3, 2, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let u = crate::fcrystal::random_invertible(c.ring(), 22, &mut rng);
        let t = c.transport(&u).unwrap();
        assert!(t.check_axioms().unwrap().all_passed());
        assert_eq!(t.artin_invariant().unwrap(), 1);
    }
}
