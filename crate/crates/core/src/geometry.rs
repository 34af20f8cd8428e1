//! Numerology around K3 surfaces and elliptic curves: cohomological invariants,
//! ordinariness of quartics, the supersingular census, stratum classes and F-zip types.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{FiniteField, Fq};
use crate::linalg::{self, Mat};
use crate::ring::{binomial, is_prime, Field, Ring};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct K3Invariants {
    pub betti: [i64; 5],
    /// `hodge[i][j]` = h^{i,j}.
    pub hodge: [[i64; 3]; 3],
    pub c2: i64,
    pub chi_o: i64,
    pub c1_squared: i64,
}

impl K3Invariants {
    pub fn euler_matches_c2(&self) -> bool {
        self.betti.iter().enumerate().map(|(i, b)| if i % 2 == 0 { *b } else { -b }).sum::<i64>() == self.c2
    }

    /// Σ_{i+j=n} h^{i,j} = b_n for every n.
    pub fn hodge_sums_match_betti(&self) -> bool {
        (0..5).all(|n| {
            let s: i64 = (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).filter(|(i, j)| i + j == n).map(|(i, j)| self.hodge[i][j]).sum();
            s == self.betti[n]
        })
    }

    pub fn noether_holds(&self) -> bool {
        12 * self.chi_o == self.c1_squared + self.c2
    }
}

pub fn k3_invariants() -> K3Invariants {
    K3Invariants {
        betti: [1, 0, 22, 0, 1],
        hodge: [[1, 0, 1], [0, 20, 0], [1, 0, 1]],
        c2: 24,
        chi_o: 2,
        c1_squared: 0,
    }
}

/// Homogeneous polynomial over F_p in x0..x3, as exponent → coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quartic {
    p: u64,
    terms: BTreeMap<[u32; 4], u64>,
}

impl Quartic {
    pub fn new(p: u64, terms: &[([u32; 4], i64)]) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let mut map = BTreeMap::new();
        for (e, c) in terms {
            if e.iter().sum::<u32>() != 4 {
                return Err(Error::InvalidArgument(format!("monomial {e:?} is not of degree 4")));
            }
            let entry: &mut u64 = map.entry(*e).or_insert(0);
            *entry = (*entry + c.rem_euclid(p as i64) as u64) % p;
        }
        map.retain(|_, c| *c != 0);
        if map.is_empty() {
            return Err(Error::InvalidArgument("the zero polynomial is not a quartic".into()));
        }
        Ok(Quartic { p, terms: map })
    }

    pub fn fermat(p: u64) -> Result<Self> {
        Self::new(p, &[([4, 0, 0, 0], 1), ([0, 4, 0, 0], 1), ([0, 0, 4, 0], 1), ([0, 0, 0, 4], 1)])
    }

    /// Uniformly random coefficients on all 35 quartic monomials.
    pub fn random<R: rand::Rng + ?Sized>(p: u64, rng: &mut R) -> Result<Self> {
        let mut terms = Vec::new();
        for a in 0..=4u32 {
            for b in 0..=4 - a {
                for c in 0..=4 - a - b {
                    terms.push(([a, b, c, 4 - a - b - c], rng.gen_range(0..p) as i64));
                }
            }
        }
        Self::new(p, &terms)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn terms(&self) -> &BTreeMap<[u32; 4], u64> {
        &self.terms
    }
}

/// Coefficient of (x0·x1·x2·x3)^{p−1} in f^{p−1}: Frobenius on H²(X, O_X).
/// Smoothness of f is the caller's responsibility.
pub fn quartic_frobenius_h2(f: &Quartic) -> u64 {
    let p = f.p;
    let cap = (p - 1) as u32;
    let mut acc: HashMap<[u32; 4], u64> = HashMap::from([([0; 4], 1)]);
    for _ in 0..p - 1 {
        let mut next: HashMap<[u32; 4], u64> = HashMap::with_capacity(acc.len() * 4);
        for (ea, ca) in &acc {
            for (eb, cb) in &f.terms {
                let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2], ea[3] + eb[3]];
                // Exponents only grow, so anything above p−1 cannot reach the target.
                if e.iter().any(|&x| x > cap) {
                    continue;
                }
                let v = next.entry(e).or_insert(0);
                *v = (*v + ca * cb) % p;
            }
        }
        next.retain(|_, c| *c != 0);
        acc = next;
    }
    acc.get(&[cap; 4]).copied().unwrap_or(0)
}

/// Σ_{i ≤ m} C(m, i)²·λ^i mod p with m = (p−1)/2, low-to-high.
pub fn hasse_polynomial(p: u64) -> Result<Vec<u64>> {
    census_prime(p)?;
    let m = (p - 1) / 2;
    Ok((0..=m)
        .map(|i| {
            let c = binomial(m, i);
            (&c * &c).mod_floor(&BigInt::from(p)).to_u64().expect("residue")
        })
        .collect())
}

fn census_prime(p: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p < 5 {
        return Err(Error::InvalidArgument(format!("the census needs p ≥ 5, got {p}")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct CensusReport {
    pub p: u64,
    /// Supersingular j-invariants in F_{p²}, sorted by field index.
    pub j_invariants: Vec<Fq>,
    pub automorphism_orders: Vec<u64>,
    pub mass: BigRational,
    pub classical_count: u64,
    pub epsilon_p: u64,
    pub field: FiniteField,
}

/// ε_p with [p/12] + ε_p supersingular classes.
pub fn epsilon_p(p: u64) -> u64 {
    match p % 12 {
        1 => 0,
        5 | 7 => 1,
        11 => 2,
        _ => 0,
    }
}

fn j_of_lambda(k: &FiniteField, l: &Fq) -> Option<Fq> {
    let one = k.one();
    let l2 = k.mul(l, l);
    let num = k.add(&k.sub(&l2, l), &one);
    let num3 = k.mul(&k.mul(&num, &num), &num);
    let lm1 = k.sub(l, &one);
    let den = k.mul(&l2, &k.mul(&lm1, &lm1));
    k.div(&k.mul(&k.from_u64(256), &num3), &den)
}

/// j-invariants with H_p(λ) = 0 for some λ ∈ F_{p²}.
pub fn supersingular_j_by_hasse(p: u64) -> Result<(FiniteField, BTreeSet<u64>)> {
    let h = hasse_polynomial(p)?;
    let k = FiniteField::new(p, 2)?;
    let mut js = BTreeSet::new();
    for l in k.elements() {
        let mut acc = k.zero();
        for c in h.iter().rev() {
            acc = k.add(&k.mul(&acc, &l), &k.from_u64(*c));
        }
        if k.is_zero(&acc) {
            let j = j_of_lambda(&k, &l).ok_or_else(|| Error::SelfValidation("Hasse root at λ ∈ {0, 1}".into()))?;
            js.insert(k.index(&j));
        }
    }
    Ok((k, js))
}

/// Short Weierstrass (A, B) with the given j-invariant, for p ≥ 5.
pub fn model_with_j(k: &FiniteField, j: &Fq) -> (Fq, Fq) {
    let j1728 = k.from_u64(1728);
    if k.is_zero(j) {
        return (k.zero(), k.one());
    }
    if *j == j1728 {
        return (k.one(), k.zero());
    }
    let c = k.sub(&j1728, j);
    let a = k.mul(&k.from_u64(3), &k.mul(j, &c));
    let b = k.mul(&k.from_u64(2), &k.mul(j, &k.mul(&c, &c)));
    (a, b)
}

/// #E(k) for y² = x³ + Ax + B via the quadratic character.
pub fn short_point_count(k: &FiniteField, squares: &[bool], a: &Fq, b: &Fq) -> u64 {
    let mut count = 1u64;
    for x in k.elements() {
        let rhs = k.add(&k.mul(&k.add(&k.mul(&x, &x), a), &x), b);
        count += if k.is_zero(&rhs) {
            1
        } else if squares[k.index(&rhs) as usize] {
            2
        } else {
            0
        };
    }
    count
}

/// j-invariants in F_{p²} whose curves have trace ≡ 0 mod p, by point counting.
pub fn supersingular_j_by_counting(p: u64) -> Result<BTreeSet<u64>> {
    census_prime(p)?;
    let k = FiniteField::new(p, 2)?;
    let q = k.order();
    let mut squares = vec![false; q as usize];
    for x in k.elements() {
        squares[k.index(&k.mul(&x, &x)) as usize] = true;
    }
    let js: BTreeSet<u64> = (0..q)
        .into_par_iter()
        .filter(|&idx| {
            let j = k.from_index(idx);
            let (a, b) = model_with_j(&k, &j);
            let n = short_point_count(&k, &squares, &a, &b);
            (q as i64 + 1 - n as i64).rem_euclid(p as i64) == 0
        })
        .collect();
    Ok(js)
}

/// Supersingular classes with their automorphism groups, cross-checked against point counts.
pub fn supersingular_census(p: u64) -> Result<CensusReport> {
    let (k, js) = supersingular_j_by_hasse(p)?;
    let counted = supersingular_j_by_counting(p)?;
    if js != counted {
        return Err(Error::SelfValidation(format!(
            "Hasse route gives {} j-invariants, point counting gives {}",
            js.len(),
            counted.len()
        )));
    }
    let j0 = k.index(&k.zero());
    let j1728 = k.index(&k.from_u64(1728));
    let mut mass = BigRational::zero();
    let mut autos = Vec::new();
    let mut jlist = Vec::new();
    for &j in &js {
        let aut = if j == j0 {
            6
        } else if j == j1728 {
            4
        } else {
            2
        };
        mass += BigRational::new(BigInt::one(), BigInt::from(aut));
        autos.push(aut);
        jlist.push(k.from_index(j));
    }
    let eps = epsilon_p(p);
    Ok(CensusReport { p, j_invariants: jlist, automorphism_orders: autos, mass, classical_count: p / 12 + eps, epsilon_p: eps, field: k })
}

/// Height of the formal Brauer group: 1..=10, the impossible 11, or ∞.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BrauerHeight {
    Finite(u32),
    Infinite,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IamVerdict {
    pub consistent: bool,
    pub flags: Vec<String>,
}

/// ρ ≤ 22 − 2h for finite h; h = ∞ goes with ρ = 22.
pub fn igusa_artin_mazur_check(rho: u32, h: BrauerHeight) -> Result<IamVerdict> {
    if !(1..=22).contains(&rho) {
        return Err(Error::InvalidArgument(format!("Picard rank {rho} outside 1..22")));
    }
    let mut flags = Vec::new();
    match h {
        BrauerHeight::Finite(h) if !(1..=11).contains(&h) => {
            return Err(Error::InvalidArgument(format!("height {h} outside 1..10 and ∞")));
        }
        BrauerHeight::Finite(11) => flags.push("height 11 is impossible".to_string()),
        BrauerHeight::Finite(h) => {
            if rho > 22 - 2 * h {
                flags.push(format!("ρ = {rho} exceeds 22 − 2h = {}", 22 - 2 * h));
            }
        }
        BrauerHeight::Infinite => {
            if rho != 22 {
                flags.push(format!("infinite height forces ρ = 22, got {rho}"));
            }
        }
    }
    if rho == 21 {
        flags.push("no K3 surface has ρ = 21".to_string());
    }
    Ok(IamVerdict { consistent: flags.is_empty(), flags })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stratum {
    /// M_i, height ≥ i, for 1 ≤ i ≤ 10.
    Height(u32),
    /// The supersingular locus M_∞.
    Supersingular,
    /// M_{∞,i}: Artin invariant ≤ i, for 1 ≤ i ≤ 10.
    Artin(u32),
}

#[derive(Clone, Debug, PartialEq)]
pub struct StratumClass {
    pub stratum: Stratum,
    pub p: u64,
    pub coefficient: BigRational,
    /// Exponent of λ_1.
    pub lambda_power: u32,
}

fn pow_big(p: u64, e: u32) -> BigInt {
    BigInt::from(p).pow(e)
}

/// Cycle class of a stratum as a multiple of a power of λ_1.
pub fn evdg_class(stratum: Stratum, p: u64) -> Result<StratumClass> {
    if !is_prime(p) || p == 2 {
        return Err(Error::InvalidArgument(format!("need an odd prime, got {p}")));
    }
    let prod_minus = |n: u32| -> BigInt { (1..=n).map(|j| pow_big(p, j) - 1).product() };
    let (coefficient, lambda_power) = match stratum {
        Stratum::Height(i) if (1..=10).contains(&i) => (BigRational::from_integer(prod_minus(i - 1)), i - 1),
        Stratum::Supersingular => (BigRational::new(prod_minus(10), BigInt::from(2)), 10),
        Stratum::Artin(i) if (1..=10).contains(&i) => {
            let num: BigInt = (11 - i..=10).map(|j| pow_big(p, 2 * j) - 1).product();
            let den: BigInt = (1..=i).map(|j| pow_big(p, j) + 1).product::<BigInt>() * 2;
            let (q, r) = num.div_rem(&den);
            if !r.is_zero() {
                return Err(Error::SelfValidation(format!("class of M_∞,{i} is not integral at p = {p}")));
            }
            (BigRational::from_integer(q), 20 - i)
        }
        other => return Err(Error::InvalidArgument(format!("no stratum {other:?}"))),
    };
    Ok(StratumClass { stratum, p, coefficient, lambda_power })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetReport {
    pub order_w: BigInt,
    pub num_cosets: usize,
    /// One element of each coset, as images of 1..21 (1-based).
    pub representatives: Vec<Vec<u32>>,
    /// ρ⁻¹(1) for each representative.
    pub invariants: Vec<u32>,
}

/// Order of the hyperoctahedral group on m letters: 2^m·m!.
pub fn hyperoctahedral_order(m: u32) -> BigInt {
    BigInt::from(2).pow(m) * (1..=m).map(BigInt::from).product::<BigInt>()
}

/// Permutations ρ of 1..n (n odd) with ρ(j) + ρ(n+1−j) = n+1, by brute force.
pub fn count_symmetric_permutations(n: u32) -> u64 {
    fn rec(n: u32, pos: u32, used: &mut Vec<bool>, img: &mut Vec<u32>) -> u64 {
        if pos > n {
            return 1;
        }
        let mut total = 0;
        for v in 1..=n {
            if used[v as usize] {
                continue;
            }
            let mirror = n + 1 - pos;
            if mirror < pos && img[mirror as usize] + v != n + 1 {
                continue;
            }
            used[v as usize] = true;
            img[pos as usize] = v;
            total += rec(n, pos + 1, used, img);
            used[v as usize] = false;
        }
        total
    }
    rec(n, 1, &mut vec![false; n as usize + 1], &mut vec![0; n as usize + 1])
}

fn in_w(rho: &[u32]) -> bool {
    let n = rho.len() as u32;
    let mut seen = vec![false; n as usize + 1];
    rho.iter().all(|&v| v >= 1 && v <= n && !std::mem::replace(&mut seen[v as usize], true))
        && (1..=n).all(|j| rho[(j - 1) as usize] + rho[(n - j) as usize] == n + 1)
}

/// Right cosets W_J\W for W ⊂ 𝔖_21 the symmetric permutations and W_J = {ρ(1) = 1}.
pub fn weyl_coset_count() -> Result<CosetReport> {
    let n = 21u32;
    let mut representatives = Vec::new();
    let mut invariants = Vec::new();
    for v in (1..=n).filter(|&v| v != 11) {
        let mut rho: Vec<u32> = (1..=n).collect();
        // ρ = (1 v)(21 22−v); for v = 21 both transpositions coincide.
        rho.swap(0, (v - 1) as usize);
        if v != 1 && v != n {
            rho.swap((n - 1) as usize, (n - v) as usize);
        }
        if !in_w(&rho) {
            return Err(Error::SelfValidation(format!("coset representative for {v} is not in W")));
        }
        let inv1 = rho.iter().position(|&x| x == 1).expect("permutation") as u32 + 1;
        if inv1 != v {
            return Err(Error::SelfValidation(format!("representative has ρ⁻¹(1) = {inv1}, expected {v}")));
        }
        representatives.push(rho);
        invariants.push(inv1);
    }
    Ok(CosetReport { order_w: hyperoctahedral_order(10), num_cosets: representatives.len(), representatives, invariants })
}

/// Dimension data of an F-zip: C^0 ⊇ C^1 ⊇ …, D_0 ⊆ D_1 ⊆ …, and dim(C^i ∩ D_j).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FZip {
    pub dim: usize,
    /// dim C^i for i = 0..=w+1, ending at 0.
    pub c: Vec<usize>,
    /// dim D_j for j = 0..=w, ending at dim.
    pub d: Vec<usize>,
    /// τ(i) = dim C^i − dim C^{i+1}.
    pub tau: Vec<usize>,
    /// `intersections[i][j]` = dim(C^i ∩ D_j).
    pub intersections: Vec<Vec<usize>>,
}

impl FZip {
    pub fn new(dim: usize, c: Vec<usize>, d: Vec<usize>, intersections: Vec<Vec<usize>>) -> Result<Self> {
        let w = d.len();
        if c.len() != w + 1 || c[0] != dim || c[w] != 0 || d[w - 1] != dim {
            return Err(Error::InvalidArgument("filtration lengths or endpoints are inconsistent".into()));
        }
        if c.windows(2).any(|x| x[0] < x[1]) || d.windows(2).any(|x| x[0] > x[1]) {
            return Err(Error::InvalidArgument("filtrations are not monotone".into()));
        }
        let tau: Vec<usize> = c.windows(2).map(|x| x[0] - x[1]).collect();
        for j in 0..w {
            let gr = d[j] - if j == 0 { 0 } else { d[j - 1] };
            if gr != tau[j] {
                return Err(Error::InvalidArgument(format!("dim gr_D^{j} = {gr} but τ({j}) = {}", tau[j])));
            }
        }
        if intersections.len() != w + 1 || intersections.iter().any(|r| r.len() != w) {
            return Err(Error::InvalidArgument("intersection table has the wrong shape".into()));
        }
        for i in 0..=w {
            for j in 0..w {
                let x = intersections[i][j];
                if x > c[i].min(d[j]) || x + dim < c[i] + d[j] {
                    return Err(Error::InvalidArgument(format!("dim(C^{i} ∩ D_{j}) = {x} is impossible")));
                }
            }
        }
        Ok(FZip { dim, c, d, tau, intersections })
    }

    /// Builds the table from explicit flags given by row bases.
    pub fn from_subspaces(k: &FiniteField, dim: usize, c: &[Mat<Fq>], d: &[Mat<Fq>]) -> Result<Self> {
        let rank = |m: &Mat<Fq>| if m.is_empty() { 0 } else { linalg::rank(k, m) };
        let cd: Vec<usize> = c.iter().map(rank).collect();
        let dd: Vec<usize> = d.iter().map(rank).collect();
        let table = c
            .iter()
            .map(|ci| {
                d.iter()
                    .map(|dj| {
                        let mut both = ci.clone();
                        both.extend(dj.iter().cloned());
                        rank(ci) + rank(dj) - rank(&both)
                    })
                    .collect()
            })
            .collect();
        Self::new(dim, cd, dd, table)
    }

    /// Every C^i ∩ D_j has the smallest dimension the two dimensions allow.
    pub fn is_ordinary(&self) -> bool {
        self.intersections
            .iter()
            .enumerate()
            .all(|(i, row)| row.iter().enumerate().all(|(j, &x)| x + self.dim == (self.c[i] + self.d[j]).max(self.dim)))
    }
}

/// Filtration dimensions of a K3-type F-zip, τ = (1, 19, 1), with opposite filtrations.
pub fn fzip_k3_type() -> FZip {
    let (dim, c, d) = (21, vec![21, 20, 1, 0], vec![1, 20, 21]);
    let table = c.iter().map(|&ci: &usize| d.iter().map(|&dj: &usize| (ci + dj).saturating_sub(dim)).collect()).collect();
    FZip::new(dim, c, d, table).expect("template is consistent")
}

pub fn fzip_is_ordinary(z: &FZip) -> bool {
    z.is_ordinary()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k3_numbers() {
        let inv = k3_invariants();
        assert!(inv.euler_matches_c2() && inv.hodge_sums_match_betti() && inv.noether_holds());
        assert_eq!(inv.hodge[1][1], 20);
    }

    #[test]
    fn fermat_quartic_small() {
        assert_ne!(quartic_frobenius_h2(&Quartic::fermat(5).unwrap()), 0);
        assert_eq!(quartic_frobenius_h2(&Quartic::fermat(7).unwrap()), 0);
    }

    #[test]
    fn census_p5_and_p13() {
        let c = supersingular_census(5).unwrap();
        assert_eq!(c.automorphism_orders, vec![6]);
        assert_eq!(c.mass, BigRational::new(1.into(), 6.into()));
        let c = supersingular_census(13).unwrap();
        assert_eq!(c.mass, BigRational::new(1.into(), 2.into()));
        assert_eq!(c.classical_count as usize, c.j_invariants.len());
    }

    #[test]
    fn iam_examples() {
        assert!(igusa_artin_mazur_check(22, BrauerHeight::Infinite).unwrap().consistent);
        assert!(!igusa_artin_mazur_check(21, BrauerHeight::Finite(1)).unwrap().consistent);
        assert!(igusa_artin_mazur_check(2, BrauerHeight::Finite(10)).unwrap().consistent);
        assert!(!igusa_artin_mazur_check(3, BrauerHeight::Finite(10)).unwrap().consistent);
        assert!(!igusa_artin_mazur_check(1, BrauerHeight::Finite(11)).unwrap().consistent);
        assert!(igusa_artin_mazur_check(0, BrauerHeight::Finite(1)).is_err());
    }

    #[test]
    fn strata() {
        assert_eq!(evdg_class(Stratum::Height(1), 7).unwrap().coefficient, BigRational::one());
        assert_eq!(evdg_class(Stratum::Height(2), 3).unwrap().coefficient, BigRational::from_integer(2.into()));
        for p in [3, 5] {
            let a = evdg_class(Stratum::Supersingular, p).unwrap();
            let b = evdg_class(Stratum::Artin(10), p).unwrap();
            assert_eq!((a.coefficient, a.lambda_power), (b.coefficient, b.lambda_power));
        }
    }

    #[test]
    fn cosets_and_small_weyl_groups() {
        let r = weyl_coset_count().unwrap();
        assert_eq!(r.num_cosets, 20);
        assert_eq!(r.order_w, BigInt::from(3_715_891_200u64));
        assert_eq!(count_symmetric_permutations(5), 8);
        assert_eq!(count_symmetric_permutations(7), 48);
    }

    #[test]
    fn fzip_ordinariness() {
        let t = fzip_k3_type();
        assert_eq!(t.tau, vec![1, 19, 1]);
        assert!(t.is_ordinary());
        let aligned: Vec<Vec<usize>> = t.c.iter().map(|&ci| t.d.iter().map(|&dj| ci.min(dj)).collect()).collect();
        let z = FZip::new(21, t.c.clone(), t.d.clone(), aligned).unwrap();
        assert!(!z.is_ordinary());
    }
}
