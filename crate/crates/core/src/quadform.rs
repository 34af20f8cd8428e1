//! Symmetric bilinear forms over F_p (odd p) and Z_p-lattices at finite precision.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::FiniteField;
use crate::linalg;
use crate::ring::{is_prime, legendre, rational_valuation, smallest_nonsquare, Ring};

/// Exhaustive isotropic search is used while p^dim stays below this bound.
pub const BRUTE_FORCE_LIMIT: u64 = 10_000_000;
const RANDOM_TRIES: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DiscClass {
    Zero,
    Square,
    Nonsquare,
}

/// A symmetric form on F_p^dim given by its gram matrix (entries in 0..p).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpForm {
    p: u64,
    gram: Vec<Vec<u64>>,
}

fn check_odd_prime(p: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p == 2 {
        return Err(Error::InvalidArgument("forms are only supported for odd p".into()));
    }
    Ok(())
}

impl FpForm {
    pub fn new(p: u64, gram: Vec<Vec<i64>>) -> Result<Self> {
        check_odd_prime(p)?;
        let dim = gram.len();
        if gram.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidArgument("gram matrix must be square".into()));
        }
        let gram: Vec<Vec<u64>> = gram.iter().map(|r| r.iter().map(|&x| x.rem_euclid(p as i64) as u64).collect()).collect();
        for i in 0..dim {
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::InvalidArgument("gram matrix is not symmetric".into()));
                }
            }
        }
        Ok(FpForm { p, gram })
    }

    pub fn hyperbolic(p: u64) -> Result<Self> {
        Self::new(p, vec![vec![0, 1], vec![1, 0]])
    }

    /// x² − d·y² with d the smallest nonsquare: the norm form of F_{p²}.
    pub fn norm_form(p: u64) -> Result<Self> {
        check_odd_prime(p)?;
        Self::new(p, vec![vec![1, 0], vec![0, -(smallest_nonsquare(p) as i64)]])
    }

    pub fn diagonal(p: u64, entries: &[i64]) -> Result<Self> {
        let n = entries.len();
        Self::new(p, (0..n).map(|i| (0..n).map(|j| if i == j { entries[i] } else { 0 }).collect()).collect())
    }

    pub fn empty(p: u64) -> Result<Self> {
        Self::new(p, vec![])
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &[Vec<u64>] {
        &self.gram
    }

    fn field(&self) -> FiniteField {
        FiniteField::prime(self.p).expect("p checked prime")
    }

    fn gram_fq(&self) -> Vec<Vec<Vec<u64>>> {
        self.gram.iter().map(|r| r.iter().map(|&x| vec![x]).collect()).collect()
    }

    pub fn orthogonal_sum(&self, other: &FpForm) -> Result<FpForm> {
        if self.p != other.p {
            return Err(Error::Mismatch("forms over different primes".into()));
        }
        let n = self.dim() + other.dim();
        let mut g = vec![vec![0u64; n]; n];
        for (i, r) in self.gram.iter().enumerate() {
            g[i][..self.dim()].copy_from_slice(r);
        }
        for (i, r) in other.gram.iter().enumerate() {
            g[self.dim() + i][self.dim()..].copy_from_slice(r);
        }
        Ok(FpForm { p: self.p, gram: g })
    }

    /// Pᵀ·G·P for P given by its columns' entries (rows of `p_mat` are rows of P).
    pub fn base_change(&self, p_mat: &[Vec<u64>]) -> FpForm {
        let f = self.field();
        let pm: Vec<Vec<Vec<u64>>> = p_mat.iter().map(|r| r.iter().map(|&x| vec![x % self.p]).collect()).collect();
        let g = linalg::mat_mul(&f, &linalg::mat_mul(&f, &linalg::transpose(&pm), &self.gram_fq()), &pm);
        FpForm { p: self.p, gram: g.iter().map(|r| r.iter().map(|x| x[0]).collect()).collect() }
    }

    pub fn det(&self) -> u64 {
        let f = self.field();
        if self.dim() == 0 {
            return 1;
        }
        linalg::det(&f, &self.gram_fq())[0]
    }

    pub fn is_degenerate(&self) -> bool {
        self.det() == 0
    }

    pub fn b(&self, x: &[u64], y: &[u64]) -> u64 {
        let p = self.p as u128;
        let mut acc: u128 = 0;
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for (j, &yj) in y.iter().enumerate() {
                acc = (acc + xi as u128 * self.gram[i][j] as u128 % p * yj as u128) % p;
            }
        }
        acc as u64
    }

    pub fn q(&self, x: &[u64]) -> u64 {
        self.b(x, x)
    }

    /// Restriction of the form to the span of the given vectors.
    pub fn restrict(&self, basis: &[Vec<u64>]) -> FpForm {
        let gram = basis.iter().map(|x| basis.iter().map(|y| self.b(x, y)).collect()).collect();
        FpForm { p: self.p, gram }
    }
}

pub fn disc_class(f: &FpForm) -> DiscClass {
    match legendre(f.det() as i64, f.p) {
        0 => DiscClass::Zero,
        1 => DiscClass::Square,
        _ => DiscClass::Nonsquare,
    }
}

fn sqrt_mod(a: u64, p: u64) -> Option<u64> {
    FiniteField::prime(p).ok()?.sqrt(&vec![a % p]).map(|r| r[0])
}

/// Roots t of α + β·t + γ·t² over F_p.
fn solve_quadratic(alpha: u64, beta: u64, gamma: u64, p: u64) -> Option<u64> {
    let pm = p as u128;
    if gamma == 0 {
        if beta == 0 {
            return (alpha == 0).then_some(0);
        }
        let inv = crate::ring::inv_mod(beta, p)?;
        return Some(((p - alpha) as u128 * inv as u128 % pm) as u64);
    }
    let disc = ((beta as u128 * beta as u128 + 4 * (pm - alpha as u128) % pm * gamma as u128) % pm) as u64;
    let s = sqrt_mod(disc, p)?;
    let inv2g = crate::ring::inv_mod((2 * gamma as u128 % pm) as u64, p)?;
    Some((((s as u128 + pm - beta as u128) % pm) * inv2g as u128 % pm) as u64)
}

/// A nonzero isotropic vector, or None when the form is anisotropic.
pub fn find_isotropic(f: &FpForm, seed: u64) -> Result<Option<Vec<u64>>> {
    let dim = f.dim();
    let p = f.p;
    if dim == 0 {
        return Ok(None);
    }
    let unit = |i: usize| -> Vec<u64> { (0..dim).map(|j| u64::from(i == j)).collect() };
    if dim <= 2 {
        for i in 0..dim {
            if f.q(&unit(i)) == 0 {
                return Ok(Some(unit(i)));
            }
        }
        if dim == 1 {
            return Ok(None);
        }
        // Q(e0 + t·e1) = Q(e0) + 2t·B(e0,e1) + t²·Q(e1)
        let (e0, e1) = (unit(0), unit(1));
        return Ok(solve_quadratic(f.q(&e0), 2 * f.b(&e0, &e1) % p, f.q(&e1), p).map(|t| vec![1, t]));
    }
    let total = (p as u128).checked_pow(dim as u32).filter(|&t| t <= BRUTE_FORCE_LIMIT as u128);
    if let Some(total) = total {
        let mut v = vec![0u64; dim];
        for _ in 1..total as u64 {
            for c in v.iter_mut() {
                *c += 1;
                if *c < p {
                    break;
                }
                *c = 0;
            }
            if f.q(&v) == 0 {
                return Ok(Some(v));
            }
        }
        return Ok(None);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RANDOM_TRIES {
        let u: Vec<u64> = (0..dim).map(|_| rng.gen_range(0..p)).collect();
        let w: Vec<u64> = (0..dim).map(|_| rng.gen_range(0..p)).collect();
        if let Some(t) = solve_quadratic(f.q(&u), 2 * f.b(&u, &w) % p, f.q(&w), p) {
            let v: Vec<u64> = u.iter().zip(&w).map(|(a, b)| ((*a as u128 + t as u128 * *b as u128) % p as u128) as u64).collect();
            if v.iter().any(|&c| c != 0) {
                return Ok(Some(v));
            }
        }
    }
    Err(Error::BudgetExceeded(format!("no isotropic vector found in dimension {dim} after {RANDOM_TRIES} tries")))
}

/// Splits off hyperbolic planes: f ≅ k·U ⊥ kernel with kernel anisotropic.
pub fn witt_split(f: &FpForm, seed: u64) -> Result<(usize, FpForm)> {
    if f.is_degenerate() {
        return Err(Error::Degenerate("witt_split needs a non-degenerate form".into()));
    }
    let p = f.p;
    let field = f.field();
    let mut cur = f.clone();
    let mut planes = 0;
    loop {
        let Some(v) = find_isotropic(&cur, seed.wrapping_add(planes as u64))? else { return Ok((planes, cur)) };
        let dim = cur.dim();
        let gv: Vec<u64> = (0..dim).map(|j| cur.b(&v, &(0..dim).map(|k| u64::from(k == j)).collect::<Vec<_>>())).collect();
        let j = gv.iter().position(|&c| c != 0).expect("non-degenerate form pairs v nontrivially");
        // w with B(v, w) = 1, then make it isotropic: w ← w − Q(w)/2 · v.
        let mut w = vec![0u64; dim];
        w[j] = crate::ring::inv_mod(gv[j], p).expect("nonzero");
        let half_q = (cur.q(&w) as u128 * crate::ring::inv_mod(2, p).expect("odd p") as u128 % p as u128) as u64;
        for (wi, vi) in w.iter_mut().zip(&v) {
            *wi = ((*wi as u128 + (p - half_q) as u128 * *vi as u128) % p as u128) as u64;
        }
        let gw: Vec<u64> = (0..dim).map(|j| cur.b(&w, &(0..dim).map(|k| u64::from(k == j)).collect::<Vec<_>>())).collect();
        let constraints = vec![gv.iter().map(|&c| vec![c]).collect(), gw.iter().map(|&c| vec![c]).collect()];
        let comp = linalg::kernel(&field, &constraints, dim);
        let basis: Vec<Vec<u64>> = comp.iter().map(|x| x.iter().map(|c| c[0]).collect()).collect();
        cur = cur.restrict(&basis);
        planes += 1;
    }
}

pub fn is_neutral(f: &FpForm, seed: u64) -> Result<bool> {
    if f.dim() % 2 == 1 {
        return Err(Error::InvalidArgument("neutrality needs even dimension".into()));
    }
    Ok(witt_split(f, seed)?.1.dim() == 0)
}

/// (σ0 − 1)·U ⊥ ⟨1, −d⟩ with d the smallest nonsquare.
pub fn build_nonneutral(sigma0: u32, p: u64) -> Result<FpForm> {
    if !(1..=10).contains(&sigma0) {
        return Err(Error::InvalidArgument(format!("σ0 = {sigma0} outside 1..=10")));
    }
    let mut f = FpForm::empty(p)?;
    for _ in 1..sigma0 {
        f = f.orthogonal_sum(&FpForm::hyperbolic(p)?)?;
    }
    f.orthogonal_sum(&FpForm::norm_form(p)?)
}

/// (a, b)_p for odd p and nonzero rationals.
pub fn hilbert_symbol(a: &BigRational, b: &BigRational, p: u64) -> Result<i32> {
    check_odd_prime(p)?;
    let (Some(alpha), Some(beta)) = (rational_valuation(a, p), rational_valuation(b, p)) else {
        return Err(Error::InvalidArgument("Hilbert symbol needs nonzero arguments".into()));
    };
    let u = unit_residue(a, alpha, p);
    let v = unit_residue(b, beta, p);
    Ok(hilbert_from_parts(alpha, u, beta, v, p))
}

/// Residue mod p of x / p^v.
fn unit_residue(x: &BigRational, v: i64, p: u64) -> u64 {
    let pb = BigInt::from(p);
    let (mut num, mut den) = (x.numer().clone(), x.denom().clone());
    if v > 0 {
        num /= pb.pow(v as u32);
    } else if v < 0 {
        den /= pb.pow((-v) as u32);
    }
    let n = num.mod_floor(&pb);
    let d = den.mod_floor(&pb);
    let di = d.modinv(&pb).expect("unit denominator");
    ((n * di) % &pb).try_into().expect("fits")
}

/// (p^α u, p^β v)_p = (−1)^{αβ(p−1)/2} (u/p)^β (v/p)^α.
fn hilbert_from_parts(alpha: i64, u: u64, beta: i64, v: u64, p: u64) -> i32 {
    let eps = if (p - 1) / 2 % 2 == 1 { -1 } else { 1 };
    let mut s = 1;
    if (alpha * beta).rem_euclid(2) == 1 {
        s *= eps;
    }
    if beta.rem_euclid(2) == 1 {
        s *= legendre(u as i64, p);
    }
    if alpha.rem_euclid(2) == 1 {
        s *= legendre(v as i64, p);
    }
    s
}

/// Oracle: +1 iff z² ≡ a·x² + b·y² has a primitive solution modulo p^k.
pub fn hilbert_symbol_bruteforce(a: i64, b: i64, p: u64, k: u32) -> i32 {
    let m = (p as i128).pow(k);
    let a = (a as i128).rem_euclid(m);
    let b = (b as i128).rem_euclid(m);
    let p = p as i128;
    let mut squares: std::collections::HashSet<i128> = std::collections::HashSet::new();
    let mut unit_squares: std::collections::HashSet<i128> = std::collections::HashSet::new();
    for z in 0..m {
        let s = z * z % m;
        squares.insert(s);
        if z % p != 0 {
            unit_squares.insert(s);
        }
    }
    for x in 0..m {
        for y in 0..m {
            let rhs = (a * x % m * x + b * y % m * y) % m;
            let primitive_xy = x % p != 0 || y % p != 0;
            if (primitive_xy && squares.contains(&rhs)) || unit_squares.contains(&rhs) {
                return 1;
            }
        }
    }
    -1
}

/// A symmetric form on (Z/p^n)^rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZpLattice {
    p: u64,
    n: u32,
    gram: Vec<Vec<BigInt>>,
}

/// Pᵀ·G·P = p·G0 ⊥ G1 with G0, G1 unimodular; G0 is only known modulo p^{n−1}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JordanDecomposition {
    pub g0: ZpLattice,
    pub g1: ZpLattice,
    /// Columns are the new basis; the first rank(G0) columns span the p-modular part.
    pub base_change: Vec<Vec<BigInt>>,
}

impl ZpLattice {
    pub fn new(p: u64, n: u32, gram: Vec<Vec<BigInt>>) -> Result<Self> {
        check_odd_prime(p)?;
        if n == 0 {
            return Err(Error::InvalidArgument("precision must be positive".into()));
        }
        let dim = gram.len();
        if gram.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidArgument("gram matrix must be square".into()));
        }
        let m = BigInt::from(p).pow(n);
        let gram: Vec<Vec<BigInt>> = gram.iter().map(|r| r.iter().map(|x| x.mod_floor(&m)).collect()).collect();
        for i in 0..dim {
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::InvalidArgument("gram matrix is not symmetric".into()));
                }
            }
        }
        Ok(ZpLattice { p, n, gram })
    }

    pub fn from_ints(p: u64, n: u32, gram: &[Vec<i64>]) -> Result<Self> {
        Self::new(p, n, gram.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect())
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &[Vec<BigInt>] {
        &self.gram
    }

    fn modulus(&self) -> BigInt {
        BigInt::from(self.p).pow(self.n)
    }

    fn val(&self, x: &BigInt) -> Option<u32> {
        crate::ring::valuation(&x.mod_floor(&self.modulus()), self.p).filter(|&v| v < self.n)
    }

    /// Determinant modulo p^n.
    pub fn disc(&self) -> BigInt {
        let m = self.modulus();
        let ring = crate::galois::GaloisRing::new(&FiniteField::prime(self.p).expect("prime"), self.n).expect("ring");
        let rows: Vec<Vec<Vec<BigInt>>> = self.gram.iter().map(|r| r.iter().map(|x| vec![x.clone()]).collect()).collect();
        if rows.is_empty() {
            return BigInt::one();
        }
        let mat = crate::matrix::Matrix::from_rows(rows).expect("square");
        mat.det(&ring)[0].mod_floor(&m)
    }

    /// ord_p of the discriminant, None if it vanishes modulo p^n.
    pub fn disc_valuation(&self) -> Option<u32> {
        self.val(&self.disc())
    }

    pub fn base_change(&self, pm: &[Vec<BigInt>]) -> ZpLattice {
        let m = self.modulus();
        let r = self.rank();
        let k = pm.first().map_or(0, |row| row.len());
        let gp: Vec<Vec<BigInt>> = (0..r)
            .map(|i| (0..k).map(|j| (0..r).map(|l| &self.gram[i][l] * &pm[l][j]).sum::<BigInt>().mod_floor(&m)).collect())
            .collect();
        let out = (0..k)
            .map(|i| (0..k).map(|j| (0..r).map(|l| &pm[l][i] * &gp[l][j]).sum::<BigInt>().mod_floor(&m)).collect())
            .collect();
        ZpLattice { p: self.p, n: self.n, gram: out }
    }

    /// Orthogonal diagonalisation P with Pᵀ·G·P = diag(d_i); fails when some remaining block vanishes mod p^n.
    pub fn diagonalize(&self) -> Result<(Vec<BigInt>, Vec<Vec<BigInt>>)> {
        let m = self.modulus();
        let r = self.rank();
        let mut g = self.gram.clone();
        let mut basis: Vec<Vec<BigInt>> =
            (0..r).map(|i| (0..r).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect();
        let mut diag = Vec::with_capacity(r);
        let mut active: Vec<usize> = (0..r).collect();
        // Work on the Gram matrix of `basis` vectors (columns tracked as rows of `basis`).
        while !active.is_empty() {
            let min_diag = active.iter().filter_map(|&i| self.val(&g[i][i]).map(|v| (v, i))).min();
            let min_off = active
                .iter()
                .flat_map(|&i| active.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
                .filter_map(|(i, j)| self.val(&g[i][j]).map(|v| (v, i, j)))
                .min();
            let pivot = match (min_diag, min_off) {
                (Some((dv, i)), Some((ov, _, _))) if dv <= ov => i,
                (Some((_, i)), None) => i,
                (_, Some((_, i, j))) => {
                    // e_i + e_j has Q = g_ii + 2g_ij + g_jj of the off-diagonal valuation (p odd).
                    let new_row: Vec<BigInt> = (0..r).map(|k| (&basis[i][k] + &basis[j][k]).mod_floor(&m)).collect();
                    basis[i] = new_row;
                    let row_i: Vec<BigInt> = (0..r).map(|k| (&g[i][k] + &g[j][k]).mod_floor(&m)).collect();
                    for k in 0..r {
                        g[i][k] = row_i[k].clone();
                        g[k][i] = row_i[k].clone();
                    }
                    g[i][i] = (&row_i[i] + &row_i[j]).mod_floor(&m);
                    if self.val(&g[i][i]) != Some(min_off.expect("some").0) {
                        return Err(Error::SelfValidation("diagonalisation pivot lost valuation".into()));
                    }
                    i
                }
                (None, None) => {
                    return Err(Error::InsufficientPrecision(format!(
                        "a rank-{} block vanishes modulo p^{}",
                        active.len(),
                        self.n
                    )))
                }
            };
            let pv = self.val(&g[pivot][pivot]).expect("pivot nonzero");
            let pb = BigInt::from(self.p).pow(pv);
            let unit = &g[pivot][pivot] / &pb;
            let unit_inv = unit.modinv(&m).expect("unit part invertible");
            for &j in &active {
                if j == pivot || g[pivot][j].is_zero() {
                    continue;
                }
                // c = g_pj / g_pp, exact since v(g_pj) ≥ v(g_pp).
                let c = ((&g[pivot][j] / &pb) * &unit_inv).mod_floor(&m);
                let new_row: Vec<BigInt> = (0..r).map(|k| (&basis[j][k] - &c * &basis[pivot][k]).mod_floor(&m)).collect();
                basis[j] = new_row;
                let row_j: Vec<BigInt> = (0..r).map(|k| (&g[j][k] - &c * &g[pivot][k]).mod_floor(&m)).collect();
                for k in 0..r {
                    g[j][k] = row_j[k].clone();
                    g[k][j] = row_j[k].clone();
                }
                g[j][j] = (&row_j[j] - &c * &row_j[pivot]).mod_floor(&m);
            }
            diag.push((pivot, g[pivot][pivot].clone()));
            active.retain(|&i| i != pivot);
        }
        let pm: Vec<Vec<BigInt>> = (0..r).map(|row| diag.iter().map(|(i, _)| basis[*i][row].clone()).collect()).collect();
        Ok((diag.into_iter().map(|(_, d)| d).collect(), pm))
    }

    pub fn hasse_invariant(&self) -> Result<i32> {
        let (diag, _) = self.diagonalize()?;
        let parts: Vec<(i64, u64)> = diag
            .iter()
            .map(|d| {
                let v = self.val(d).expect("diagonal entries are nonzero");
                let u = (d / BigInt::from(self.p).pow(v)).mod_floor(&BigInt::from(self.p));
                (v as i64, u.try_into().expect("residue fits"))
            })
            .collect();
        let mut s = 1;
        for i in 0..parts.len() {
            for j in i + 1..parts.len() {
                s *= hilbert_from_parts(parts[i].0, parts[i].1, parts[j].0, parts[j].1, self.p);
            }
        }
        Ok(s)
    }

    pub fn jordan_decompose(&self) -> Result<JordanDecomposition> {
        let (diag, pm) = self.diagonalize()?;
        let mut zero_idx = Vec::new();
        let mut one_idx = Vec::new();
        for (k, d) in diag.iter().enumerate() {
            match self.val(d) {
                Some(0) => one_idx.push(k),
                Some(1) => zero_idx.push(k),
                Some(v) => {
                    return Err(Error::InvalidArgument(format!(
                        "an elementary divisor has valuation {v} ≥ 2; not a supersingular K3 shape"
                    )))
                }
                None => unreachable!("diagonalize rejects vanishing entries"),
            }
        }
        let pb = BigInt::from(self.p);
        let diag_lat = |idx: &[usize], n: u32, scale_down: bool| -> Result<ZpLattice> {
            let g = (0..idx.len())
                .map(|i| {
                    (0..idx.len())
                        .map(|j| {
                            if i != j {
                                BigInt::zero()
                            } else if scale_down {
                                &diag[idx[i]] / &pb
                            } else {
                                diag[idx[i]].clone()
                            }
                        })
                        .collect()
                })
                .collect();
            ZpLattice::new(self.p, n, g)
        };
        let g0 = diag_lat(&zero_idx, self.n.saturating_sub(1).max(1), true)?;
        let g1 = diag_lat(&one_idx, self.n, false)?;
        let order: Vec<usize> = zero_idx.iter().chain(&one_idx).copied().collect();
        let base_change = pm.iter().map(|row| order.iter().map(|&k| row[k].clone()).collect()).collect();
        Ok(JordanDecomposition { g0, g1, base_change })
    }

    /// Reduction modulo p as an F_p-form.
    pub fn reduce(&self) -> FpForm {
        let p = BigInt::from(self.p);
        let g = self
            .gram
            .iter()
            .map(|r| r.iter().map(|x| i64::try_from(x.mod_floor(&p)).expect("residue fits")).collect())
            .collect();
        FpForm::new(self.p, g).expect("valid reduction")
    }

    /// The F_p-form N_0 = pΓ^∨/pΓ carried by the p-modular Jordan block.
    pub fn n0(&self) -> Result<FpForm> {
        Ok(self.jordan_decompose()?.g0.reduce())
    }

    pub fn orthogonal_sum(&self, other: &ZpLattice) -> Result<ZpLattice> {
        if self.p != other.p || self.n != other.n {
            return Err(Error::Mismatch("lattices over different p or precision".into()));
        }
        let (a, b) = (self.rank(), other.rank());
        let mut g = vec![vec![BigInt::zero(); a + b]; a + b];
        for i in 0..a {
            for j in 0..a {
                g[i][j] = self.gram[i][j].clone();
            }
        }
        for i in 0..b {
            for j in 0..b {
                g[a + i][a + j] = other.gram[i][j].clone();
            }
        }
        ZpLattice::new(self.p, self.n, g)
    }

    pub fn scale(&self, c: &BigInt) -> ZpLattice {
        let m = self.modulus();
        let g = self.gram.iter().map(|r| r.iter().map(|x| (x * c).mod_floor(&m)).collect()).collect();
        ZpLattice { p: self.p, n: self.n, gram: g }
    }
}

fn lift_form(f: &FpForm, n: u32) -> Result<ZpLattice> {
    let p = f.p as i64;
    // Centered lifts keep −d as −d.
    let g: Vec<Vec<i64>> =
        f.gram.iter().map(|r| r.iter().map(|&x| if x as i64 > p / 2 { x as i64 - p } else { x as i64 }).collect()).collect();
    ZpLattice::from_ints(f.p, n, &g)
}

/// Γ = p·G_0 ⊥ G_1 of rank 22 with G_0 the non-neutral form of dimension 2σ0 and
/// G_1 the non-neutral form of dimension 22 − 2σ0, so that disc(Γ) = −p^{2σ0} up to unit squares.
pub fn ss_lattice_local(sigma0: u32, p: u64, n: u32) -> Result<ZpLattice> {
    if n < 3 {
        return Err(Error::InsufficientPrecision("ss_lattice_local needs n ≥ 3".into()));
    }
    let g0 = lift_form(&build_nonneutral(sigma0, p)?, n)?.scale(&BigInt::from(p));
    let g1 = lift_form(&build_nonneutral(11 - sigma0, p)?, n)?;
    g0.orthogonal_sum(&g1)
}

/// Random matrix over Z/p^n whose reduction mod p is invertible.
pub fn random_unimodular<G: Rng + ?Sized>(p: u64, n: u32, dim: usize, rng: &mut G) -> Vec<Vec<BigInt>> {
    let f = FiniteField::prime(p).expect("prime");
    let m = BigInt::from(p).pow(n);
    let bound: u64 = if n <= 20 { p.pow(n).min(u64::MAX / 2) } else { u64::MAX / 2 };
    loop {
        let mat: Vec<Vec<BigInt>> = (0..dim).map(|_| (0..dim).map(|_| BigInt::from(rng.gen_range(0..bound)).mod_floor(&m)).collect()).collect();
        let red: Vec<Vec<Vec<u64>>> =
            mat.iter().map(|r| r.iter().map(|x| vec![crate::ring::big_to_u64_mod(x, p)]).collect()).collect();
        if dim == 0 || !f.is_zero(&linalg::det(&f, &red)) {
            return mat;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn discriminants() {
        assert_eq!(disc_class(&FpForm::hyperbolic(3).unwrap()), DiscClass::Nonsquare);
        assert_eq!(disc_class(&FpForm::diagonal(3, &[1]).unwrap()), DiscClass::Square);
        assert_eq!(disc_class(&FpForm::diagonal(3, &[0]).unwrap()), DiscClass::Zero);
    }

    #[test]
    fn splitting() {
        let uu = FpForm::hyperbolic(5).unwrap().orthogonal_sum(&FpForm::hyperbolic(5).unwrap()).unwrap();
        let (k, ker) = witt_split(&uu, 0).unwrap();
        assert_eq!((k, ker.dim()), (2, 0));
        let nf = FpForm::norm_form(3).unwrap();
        assert_eq!(witt_split(&nf, 0).unwrap(), (0, nf.clone()));
        let nn = build_nonneutral(2, 3).unwrap();
        let (k, ker) = witt_split(&nn, 0).unwrap();
        assert_eq!((k, ker.dim()), (1, 2));
        assert!(!is_neutral(&nn, 0).unwrap());
        assert!(is_neutral(&uu, 0).unwrap());
        assert!(witt_split(&FpForm::diagonal(3, &[1, 0]).unwrap(), 0).is_err());
    }

    #[test]
    fn random_search_path() {
        // p^dim above the brute-force limit.
        let f = build_nonneutral(3, 1_000_003).unwrap();
        let (k, ker) = witt_split(&f, 7).unwrap();
        assert_eq!((k, ker.dim()), (2, 2));
    }

    #[test]
    fn hilbert_symbols() {
        assert_eq!(hilbert_symbol(&r(1), &r(1), 3).unwrap(), 1);
        assert_eq!(hilbert_symbol(&r(3), &r(2), 3).unwrap(), -1);
        assert_eq!(hilbert_symbol_bruteforce(3, 2, 3, 3), -1);
        assert_eq!(hilbert_symbol_bruteforce(1, 1, 3, 3), 1);
    }

    #[test]
    fn jordan_and_sslattice() {
        let l = ZpLattice::from_ints(3, 5, &[vec![3, 0, 0, 0], vec![0, 3, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1]]).unwrap();
        let j = l.jordan_decompose().unwrap();
        assert_eq!((j.g0.rank(), j.g1.rank()), (2, 2));
        let g = ss_lattice_local(1, 3, 6).unwrap();
        assert_eq!(g.disc_valuation(), Some(2));
        let j = g.jordan_decompose().unwrap();
        assert_eq!((j.g0.rank(), j.g1.rank()), (2, 20));
        assert!(!is_neutral(&ss_lattice_local(2, 3, 6).unwrap().n0().unwrap(), 0).unwrap());
        let bad = ZpLattice::from_ints(3, 5, &[vec![9]]).unwrap();
        assert!(bad.jordan_decompose().is_err());
    }
}
