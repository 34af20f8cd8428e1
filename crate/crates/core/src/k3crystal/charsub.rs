//! Characteristic subspaces K ⊂ V ⊗ k of a non-neutral F_p-form V, their period
//! coordinates, and exhaustive enumeration of generatrices.

use num_bigint::BigInt;
use num_integer::Integer;

use crate::error::{Error, Result};
use crate::field::{FiniteField, Fq};
use crate::linalg::{self, Mat};
use crate::quadform::{build_nonneutral, is_neutral, FpForm};
use crate::ring::{Field, Ring};

/// K ⊂ V ⊗ k, with V = (F_p^{2σ0}, ambient) and K spanned by the rows of `basis`.
#[derive(Clone, Debug, PartialEq)]
pub struct CharSubspace {
    pub sigma0: u32,
    pub ambient: FpForm,
    pub field: FiniteField,
    pub basis: Vec<Vec<Fq>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PeriodCoordinates {
    pub sigma0: u32,
    pub field: FiniteField,
    /// a_1, …, a_{σ0−1}.
    pub a: Vec<Fq>,
    /// The normalised generator e of ℓ_K in ambient coordinates.
    pub line_generator: Vec<Fq>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratrixCount {
    pub count_total: u64,
    pub count_characteristic: u64,
    pub representatives: Vec<CharSubspace>,
}

/// Largest number of candidate subspaces `enumerate_generatrices` will visit.
pub const ENUMERATION_BUDGET: u64 = 100_000_000;

fn frob_vec(k: &FiniteField, v: &[Fq], times: i64) -> Vec<Fq> {
    v.iter().map(|x| k.frobenius_pow(x, times)).collect()
}

fn embed(k: &FiniteField, form: &FpForm) -> Mat<Fq> {
    form.gram().iter().map(|r| r.iter().map(|&x| k.from_u64(x)).collect()).collect()
}

fn pair(k: &FiniteField, g: &Mat<Fq>, x: &[Fq], y: &[Fq]) -> Fq {
    linalg::bilinear(k, g, x, y)
}

/// Vectors n with s·n = 0 for every row s.
fn annihilator(k: &FiniteField, rows: &Mat<Fq>, dim: usize) -> Mat<Fq> {
    if rows.is_empty() {
        return linalg::identity(k, dim);
    }
    linalg::kernel(k, rows, dim)
}

/// Intersection of row spaces.
fn intersect(k: &FiniteField, spaces: &[Mat<Fq>], dim: usize) -> Mat<Fq> {
    let mut eqs: Mat<Fq> = Vec::new();
    for s in spaces {
        eqs.extend(annihilator(k, s, dim));
    }
    if eqs.is_empty() {
        return linalg::identity(k, dim);
    }
    linalg::kernel(k, &eqs, dim)
}

impl CharSubspace {
    pub fn new(sigma0: u32, ambient: FpForm, field: FiniteField, basis: Vec<Vec<Fq>>) -> Result<Self> {
        if field.p() != ambient.p() {
            return Err(Error::Mismatch("field and ambient form have different characteristic".into()));
        }
        if ambient.dim() != 2 * sigma0 as usize {
            return Err(Error::InvalidArgument(format!("ambient form must have dimension {}", 2 * sigma0)));
        }
        if basis.len() != sigma0 as usize || basis.iter().any(|r| r.len() != ambient.dim()) {
            return Err(Error::InvalidArgument(format!("basis must be {sigma0} rows of length {}", 2 * sigma0)));
        }
        if linalg::rank(&field, &basis) != sigma0 as usize {
            return Err(Error::InvalidArgument("basis rows are dependent".into()));
        }
        let basis = linalg::row_space(&field, &basis);
        Ok(CharSubspace { sigma0, ambient, field, basis })
    }

    pub fn dim(&self) -> usize {
        2 * self.sigma0 as usize
    }

    fn gram(&self) -> Mat<Fq> {
        embed(&self.field, &self.ambient)
    }

    /// φ^i(K) for i ∈ Z (the Frobenius is a bijection on V ⊗ k).
    pub fn phi_pow(&self, i: i64) -> Mat<Fq> {
        self.basis.iter().map(|r| frob_vec(&self.field, r, i)).collect()
    }

    pub fn is_totally_isotropic(&self) -> bool {
        let g = self.gram();
        let k = &self.field;
        self.basis.iter().all(|x| self.basis.iter().all(|y| k.is_zero(&pair(k, &g, x, y))))
    }

    /// dim(K + φK).
    pub fn dim_k_plus_phik(&self) -> usize {
        let mut rows = self.basis.clone();
        rows.extend(self.phi_pow(1));
        linalg::rank(&self.field, &rows)
    }

    fn ambient_ok(&self) -> Result<()> {
        if self.ambient.is_degenerate() {
            return Err(Error::Degenerate("ambient form is degenerate".into()));
        }
        if is_neutral(&self.ambient, 0)? {
            return Err(Error::InvalidArgument("ambient form is neutral".into()));
        }
        Ok(())
    }

    pub fn is_characteristic(&self) -> Result<bool> {
        self.ambient_ok()?;
        Ok(self.is_totally_isotropic() && self.dim_k_plus_phik() == self.sigma0 as usize + 1)
    }

    /// Characteristic and Σ_{i ≤ 2σ0} φ^i(K) = V ⊗ k.
    pub fn is_strictly_characteristic(&self) -> Result<bool> {
        if !self.is_characteristic()? {
            return Ok(false);
        }
        let mut rows = Vec::new();
        for i in 0..=self.dim() as i64 {
            rows.extend(self.phi_pow(i));
        }
        Ok(linalg::rank(&self.field, &rows) == self.dim())
    }

    /// ℓ_K = K ∩ φK ∩ … ∩ φ^{σ0−1}K.
    pub fn line(&self) -> Mat<Fq> {
        let spaces: Vec<Mat<Fq>> = (0..self.sigma0 as i64).map(|i| self.phi_pow(i)).collect();
        intersect(&self.field, &spaces, self.dim())
    }

    pub fn period_coordinates(&self) -> Result<PeriodCoordinates> {
        if !self.is_strictly_characteristic()? {
            return Err(Error::InvalidArgument("period coordinates need a strictly characteristic subspace".into()));
        }
        let k = &self.field;
        let g = self.gram();
        let s0 = self.sigma0 as i64;
        let line = self.line();
        if line.len() != 1 {
            return Err(Error::SelfValidation(format!("ℓ_K has dimension {} instead of 1", line.len())));
        }
        let mut e = line[0].clone();
        let lead = e.iter().find(|x| !k.is_zero(x)).cloned().expect("nonzero generator");
        let li = k.inv(&lead).expect("nonzero");
        e = e.iter().map(|x| k.mul(&li, x)).collect();
        let es: Mat<Fq> = (0..self.dim() as i64).map(|i| frob_vec(k, &e, i)).collect();
        if linalg::rank(k, &es) != self.dim() {
            return Err(Error::SelfValidation("φ^i(e) do not span V ⊗ k".into()));
        }
        let c = pair(k, &g, &e, &es[s0 as usize]);
        let target = k.inv(&c).ok_or_else(|| Error::SelfValidation("⟨e, e_{σ0+1}⟩ vanishes".into()))?;
        let m = (self.field.p()).pow(self.sigma0) + 1;
        let lambda = k.nth_root(&target, m).ok_or_else(|| Error::ExtendField {
            required: minimal_root_degree(k, &target, m),
            have: k.degree() as u32,
        })?;
        e = e.iter().map(|x| k.mul(&lambda, x)).collect();
        let a = (1..s0).map(|i| pair(k, &g, &e, &frob_vec(k, &e, s0 + i))).collect();
        Ok(PeriodCoordinates { sigma0: self.sigma0, field: k.clone(), a, line_generator: e })
    }
}

/// Smallest multiple d of deg(k) such that y^m = c is solvable in F_{p^d}.
fn minimal_root_degree(k: &FiniteField, c: &Fq, m: u64) -> u32 {
    let base = k.degree() as u32;
    let q1 = BigInt::from(k.order() - 1);
    for mult in 1..=64u32 {
        let d = base * mult;
        let pd1: BigInt = BigInt::from(k.p()).pow(d) - BigInt::from(1);
        let g = pd1.gcd(&BigInt::from(m));
        // Solvable iff c^{(p^d − 1)/g} = 1; the exponent only matters modulo q − 1.
        let e = (&pd1 / &g).mod_floor(&q1);
        let e: u64 = e.try_into().expect("fits");
        if k.pow(c, e) == k.one() {
            return d;
        }
    }
    base * 64
}

/// ζ^{1−p^i} acting on a_i.
pub fn mu_act(pc: &PeriodCoordinates, zeta: &Fq) -> PeriodCoordinates {
    let k = &pc.field;
    let zi = k.inv(zeta).expect("root of unity");
    let a = pc
        .a
        .iter()
        .enumerate()
        .map(|(idx, ai): (usize, &Fq)| {
            let pi: u64 = k.p().pow(idx as u32 + 1);
            let z_pi = k.pow(&zi, pi % (k.order() - 1));
            k.mul(&k.mul(zeta, &z_pi), ai)
        })
        .collect();
    let e = pc.line_generator.iter().map(|x| k.mul(zeta, x)).collect();
    PeriodCoordinates { sigma0: pc.sigma0, field: k.clone(), a, line_generator: e }
}

/// The (p^{σ0}+1)-th roots of unity lying in k.
pub fn mu_in_field(k: &FiniteField, sigma0: u32) -> Vec<Fq> {
    let m = k.p().pow(sigma0) + 1;
    let q1 = k.order() - 1;
    let g = num_integer::gcd(m, q1);
    let gen = k.pow(&k.primitive_element(), q1 / g);
    let mut out = Vec::with_capacity(g as usize);
    let mut z = k.one();
    for _ in 0..g {
        out.push(z.clone());
        z = k.mul(&z, &gen);
    }
    out
}

/// a ~ b under the action of μ_{p^{σ0}+1}(k).
pub fn same_mu_orbit(a: &PeriodCoordinates, b: &PeriodCoordinates) -> bool {
    a.sigma0 == b.sigma0
        && a.field == b.field
        && mu_in_field(&a.field, a.sigma0).iter().any(|z| mu_act(a, z).a == b.a)
}

/// Rebuilds V ⊗ k with its F_p-structure from the pairings of e_i = φ^{i−1}(e) and returns
/// K = φ^{1−σ0}⟨e_1, …, e_{σ0}⟩ in coordinates of an F_p-basis of V.
pub fn subspace_from_coordinates(pc: &PeriodCoordinates) -> Result<CharSubspace> {
    let k = &pc.field;
    let s0 = pc.sigma0 as usize;
    let n = 2 * s0;
    let m = k.degree();
    if pc.a.len() != s0.saturating_sub(1) {
        return Err(Error::InvalidArgument(format!("expected {} coordinates", s0.saturating_sub(1))));
    }
    if !m.is_multiple_of(n) {
        return Err(Error::ExtendField { required: (m.lcm(&n)) as u32, have: m as u32 });
    }
    // c_j = ⟨e, e_j⟩ for j = 1..2σ0.
    let mut c = vec![k.zero(); n + 1];
    c[s0 + 1] = k.one();
    for (i, ai) in pc.a.iter().enumerate() {
        c[s0 + 2 + i] = ai.clone();
    }
    let mut g: Mat<Fq> = vec![vec![k.zero(); n]; n];
    for i in 0..n {
        for j in i..n {
            let v = k.frobenius_pow(&c[j - i + 1], i as i64);
            g[i][j] = v.clone();
            g[j][i] = v;
        }
    }
    let g_inv = linalg::inverse(k, &g).ok_or_else(|| Error::Degenerate("reconstructed gram is singular".into()))?;
    // r_l = ⟨e_{2σ0+1}, e_l⟩: r_1 = t is unknown, r_l = σ⟨e_{2σ0}, e_{l−1}⟩ otherwise.
    let r0: Vec<Fq> = (0..n).map(|l| if l == 0 { k.zero() } else { k.frobenius(&g[n - 1][l - 1]) }).collect();
    // Isotropy of e_{2σ0+1}: r(t)ᵀ G⁻¹ r(t) = 0 is quadratic in t.
    let gr0 = linalg::mat_vec(k, &g_inv, &r0);
    let c0: Fq = r0.iter().zip(&gr0).fold(k.zero(), |acc, (x, y)| k.add(&acc, &k.mul(x, y)));
    let c1 = k.add(&gr0[0], &gr0[0]);
    let c2 = g_inv[0][0].clone();
    let candidates: Vec<Fq> = if k.is_zero(&c2) && k.is_zero(&c1) {
        if !k.is_zero(&c0) {
            Vec::new()
        } else {
            k.elements().collect()
        }
    } else if k.is_zero(&c2) {
        vec![k.neg(&k.div(&c0, &c1).expect("nonzero"))]
    } else {
        let disc = k.sub(&k.mul(&c1, &c1), &k.mul(&k.from_u64(4), &k.mul(&c2, &c0)));
        match k.sqrt(&disc) {
            None => Vec::new(),
            Some(s) => {
                let inv = k.inv(&k.add(&c2, &c2)).expect("odd p");
                let t1 = k.mul(&k.sub(&s, &c1), &inv);
                let t2 = k.mul(&k.sub(&k.neg(&s), &c1), &inv);
                if t1 == t2 {
                    vec![t1]
                } else {
                    vec![t1, t2]
                }
            }
        }
    };
    for t in candidates {
        let mut r = r0.clone();
        r[0] = t;
        let b = linalg::mat_vec(k, &g_inv, &r);
        // φ(x) = F·σ(x) in the e-basis: F e_j = e_{j+1}, F e_{2σ0} = Σ b_l e_l.
        let mut f: Mat<Fq> = vec![vec![k.zero(); n]; n];
        for j in 0..n - 1 {
            f[j + 1][j] = k.one();
        }
        for l in 0..n {
            f[l][n - 1] = b[l].clone();
        }
        let Some(fixed) = fixed_basis(k, &f) else { continue };
        let p_cols = linalg::transpose(&fixed);
        let gram_f = linalg::mat_mul(k, &linalg::mat_mul(k, &fixed, &g), &p_cols);
        let Some(gram_p) = gram_f.iter().map(|row| row.iter().map(|x| k.to_prime(x).map(|v| v as i64)).collect()).collect::<Option<Vec<Vec<i64>>>>() else {
            continue;
        };
        let ambient = FpForm::new(k.p(), gram_p)?;
        if ambient.is_degenerate() || is_neutral(&ambient, 0)? {
            return Err(Error::InvalidArgument("coordinates give a degenerate or neutral F_p-structure".into()));
        }
        // K in e-coordinates, then moved to F_p-coordinates.
        let f_inv = linalg::inverse(k, &f).expect("φ is bijective");
        let p_inv = linalg::inverse(k, &p_cols).expect("fixed basis");
        let basis: Mat<Fq> = (0..s0)
            .map(|i| {
                let mut v: Vec<Fq> = (0..n).map(|j| if i == j { k.one() } else { k.zero() }).collect();
                for _ in 0..s0 - 1 {
                    v = frob_vec(k, &linalg::mat_vec(k, &f_inv, &v), -1);
                }
                linalg::mat_vec(k, &p_inv, &v)
            })
            .collect();
        let out = CharSubspace::new(pc.sigma0, ambient, k.clone(), basis)?;
        if !out.is_strictly_characteristic()? {
            return Err(Error::SelfValidation("rebuilt subspace is not strictly characteristic".into()));
        }
        return Ok(out);
    }
    Err(Error::InvalidArgument("the coordinates admit no F_p-structure over this field".into()))
}

/// Rows form an F_p-basis of {x ∈ k^n : F·σ(x) = x}, if that space has full dimension n.
fn fixed_basis(k: &FiniteField, f: &Mat<Fq>) -> Option<Mat<Fq>> {
    let n = f.len();
    let m = k.degree();
    let fp = FiniteField::prime(k.p()).expect("prime");
    let big = n * m;
    // Column (j, l) of the F_p-matrix of x ↦ F σ(x) − x, applied to x = x^l · ε_j.
    let mut cols: Vec<Vec<Fq>> = Vec::with_capacity(big);
    for j in 0..n {
        for l in 0..m {
            let mut x = vec![k.zero(); n];
            let mut unit = vec![0u64; m];
            unit[l] = 1;
            x[j] = k.elem(&unit);
            let img = linalg::mat_vec(k, f, &frob_vec(k, &x, 1));
            let d: Vec<Fq> = img.iter().zip(&x).map(|(a, b)| k.sub(a, b)).collect();
            cols.push(d.iter().flat_map(|e| e.iter().map(|&c| vec![c])).collect());
        }
    }
    let mat = linalg::transpose(&cols);
    let ker = linalg::kernel(&fp, &mat, big);
    if ker.len() != n {
        return None;
    }
    Some(
        ker.iter()
            .map(|v| (0..n).map(|j| (0..m).map(|l| v[j * m + l][0]).collect()).collect())
            .collect(),
    )
}

/// Exhaustive count of σ0-dimensional totally isotropic subspaces of V ⊗ F_{p^m} for
/// V = build_nonneutral(σ0, p), and of those that are characteristic.
pub fn enumerate_generatrices(sigma0: u32, p: u64, m: usize) -> Result<GeneratrixCount> {
    let ambient = build_nonneutral(sigma0, p)?;
    enumerate_generatrices_in(&ambient, sigma0, &FiniteField::new(p, m)?)
}

pub fn enumerate_generatrices_in(ambient: &FpForm, sigma0: u32, k: &FiniteField) -> Result<GeneratrixCount> {
    let s0 = sigma0 as usize;
    let n = ambient.dim();
    if n != 2 * s0 {
        return Err(Error::InvalidArgument("ambient dimension must be 2σ0".into()));
    }
    let q = k.order();
    // Pivot sets in increasing order; RREF matrices have q^{free} completions each.
    let pivot_sets = combinations(n, s0);
    let mut total_candidates: u64 = 0;
    for piv in &pivot_sets {
        let free = free_positions(piv, n).len() as u32;
        total_candidates = total_candidates.saturating_add(q.saturating_pow(free));
    }
    if total_candidates > ENUMERATION_BUDGET {
        return Err(Error::BudgetExceeded(format!("{total_candidates} candidate subspaces exceed {ENUMERATION_BUDGET}")));
    }
    let g = embed(k, ambient);
    let mut count_total = 0;
    let mut count_char = 0;
    let mut reps = Vec::new();
    for piv in &pivot_sets {
        let free = free_positions(piv, n);
        let slots = free.len() as u32;
        for idx in 0..q.pow(slots) {
            let mut rows: Mat<Fq> = vec![vec![k.zero(); n]; s0];
            for (r, &pc) in piv.iter().enumerate() {
                rows[r][pc] = k.one();
            }
            let mut rem = idx;
            for &(r, c) in &free {
                rows[r][c] = k.from_index(rem % q);
                rem /= q;
            }
            let isotropic = rows.iter().all(|x| rows.iter().all(|y| k.is_zero(&pair(k, &g, x, y))));
            if !isotropic {
                continue;
            }
            count_total += 1;
            let mut both = rows.clone();
            both.extend(rows.iter().map(|r| frob_vec(k, r, 1)));
            if linalg::rank(k, &both) == s0 + 1 {
                count_char += 1;
                reps.push(CharSubspace { sigma0, ambient: ambient.clone(), field: k.clone(), basis: rows });
            }
        }
    }
    Ok(GeneratrixCount { count_total, count_characteristic: count_char, representatives: reps })
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Entries (row, col) of an RREF matrix with the given pivots that are free to vary.
fn free_positions(piv: &[usize], n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (r, &pc) in piv.iter().enumerate() {
        for c in pc + 1..n {
            if !piv.contains(&c) {
                out.push((r, c));
            }
        }
    }
    out
}

/// Draws a strictly characteristic K = span(e, φ⁻¹e, …, φ^{1−σ0}e) by rejection on e.
pub fn sample_strict_subspace<R: rand::Rng + ?Sized>(
    ambient: &FpForm,
    sigma0: u32,
    k: &FiniteField,
    max_tries: u64,
    rng: &mut R,
) -> Result<CharSubspace> {
    let dim = 2 * sigma0 as usize;
    let g = embed(k, ambient);
    for _ in 0..max_tries {
        let e: Vec<Fq> = (0..dim).map(|_| k.random(rng)).collect();
        let isotropic = (0..sigma0 as i64).all(|i| k.is_zero(&pair(k, &g, &e, &frob_vec(k, &e, i))));
        if !isotropic || e.iter().all(|x| k.is_zero(x)) {
            continue;
        }
        let rows: Mat<Fq> = (0..sigma0 as i64).map(|i| frob_vec(k, &e, -i)).collect();
        if linalg::rank(k, &rows) != sigma0 as usize {
            continue;
        }
        let sub = CharSubspace::new(sigma0, ambient.clone(), k.clone(), rows)?;
        if sub.is_strictly_characteristic()? {
            return Ok(sub);
        }
    }
    Err(Error::BudgetExceeded(format!("no strictly characteristic subspace in {max_tries} draws over F_{}", k.order())))
}

/// Whether some F_p-isometry between the ambient forms carries K_a onto K_b.
/// Exhaustive over the orthogonal group, so only for small 2σ0 and p.
pub fn isometric_subspaces(a: &CharSubspace, b: &CharSubspace) -> Result<bool> {
    if a.field != b.field || a.sigma0 != b.sigma0 {
        return Ok(false);
    }
    let p = a.ambient.p();
    let dim = a.dim();
    let vectors = p.checked_pow(dim as u32).filter(|&v| v.saturating_pow(2) <= ENUMERATION_BUDGET).ok_or_else(|| {
        Error::BudgetExceeded(format!("isometry search over F_{p}^{dim} is too large"))
    })?;
    let all: Vec<Vec<u64>> = (0..vectors)
        .map(|mut i| {
            (0..dim)
                .map(|_| {
                    let d = i % p;
                    i /= p;
                    d
                })
                .collect()
        })
        .collect();
    let target = linalg::row_space(&b.field, &b.basis);
    let mut images: Vec<usize> = Vec::with_capacity(dim);
    Ok(search_isometry(a, b, &all, &target, &mut images))
}

fn search_isometry(a: &CharSubspace, b: &CharSubspace, all: &[Vec<u64>], target: &Mat<Fq>, images: &mut Vec<usize>) -> bool {
    let dim = a.dim();
    let i = images.len();
    if i == dim {
        let k = &a.field;
        // Row vector x ↦ Σ_j x_j·g(ε_j).
        let mapped: Mat<Fq> = a
            .basis
            .iter()
            .map(|x| {
                (0..dim)
                    .map(|c| {
                        let mut acc = k.zero();
                        for (j, xj) in x.iter().enumerate() {
                            acc = k.add(&acc, &k.mul(xj, &k.from_u64(all[images[j]][c])));
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        return linalg::row_space(k, &mapped) == *target;
    }
    let ga = a.ambient.gram();
    for (idx, v) in all.iter().enumerate() {
        if (0..=i).all(|j| {
            let w = if j == i { v } else { &all[images[j]] };
            b.ambient.b(v, w) == ga[i][j]
        }) {
            images.push(idx);
            if search_isometry(a, b, all, target, images) {
                return true;
            }
            images.pop();
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_generatrices(1, 3, 2).unwrap().count_characteristic, 2);
        assert_eq!(enumerate_generatrices(1, 3, 1).unwrap().count_characteristic, 0);
    }

    #[test]
    fn sigma0_one_round_trip() {
        let gens = enumerate_generatrices(1, 3, 2).unwrap();
        for k in &gens.representatives {
            assert!(k.is_strictly_characteristic().unwrap());
            let pc = k.period_coordinates().unwrap();
            assert!(pc.a.is_empty());
            let back = subspace_from_coordinates(&pc).unwrap();
            assert!(back.is_strictly_characteristic().unwrap());
        }
    }

    #[test]
    fn sigma0_two_over_f81() {
        let k = FiniteField::new(3, 4).unwrap();
        let pc = PeriodCoordinates { sigma0: 2, field: k.clone(), a: vec![k.zero()], line_generator: vec![] };
        let sub = subspace_from_coordinates(&pc).unwrap();
        assert!(same_mu_orbit(&pc, &sub.period_coordinates().unwrap()));
        // φ^4 = id over F_81 forces a_1 = 0.
        let pc = PeriodCoordinates { sigma0: 2, field: k.clone(), a: vec![k.one()], line_generator: vec![] };
        assert!(subspace_from_coordinates(&pc).is_err());
    }
}
