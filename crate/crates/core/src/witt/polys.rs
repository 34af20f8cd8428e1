//! Witt polynomials and the addition/multiplication structure polynomials S_m, P_m.
//!
//! Variables are interleaved: x_i has index 2i and y_i has index 2i+1, so polynomials
//! of different levels share one variable layout.

use std::collections::HashMap;
use std::fmt;
use std::hash::{BuildHasherDefault, Hasher};
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::ring::{is_prime, Ring};

/// Levels above this need [`structure_polys_opt`] with `allow_large`.
pub const DEFAULT_MAX_LEVEL: usize = 6;

/// Hard limit from the monomial layout: 2 variables per level.
pub const MAX_LEVEL: usize = MAX_VARS / 2;

const MAX_VARS: usize = 16;

/// Exponent vector over the interleaved variables.
pub type Monomial = [u16; MAX_VARS];

/// Multiply-xorshift hasher for fixed-size exponent vectors.
#[derive(Default)]
struct MonoHasher(u64);

impl Hasher for MonoHasher {
    fn finish(&self) -> u64 {
        self.0
    }
    fn write(&mut self, bytes: &[u8]) {
        for chunk in bytes.chunks(8) {
            let mut buf = [0u8; 8];
            buf[..chunk.len()].copy_from_slice(chunk);
            self.0 = (self.0.rotate_left(5) ^ u64::from_le_bytes(buf)).wrapping_mul(0x51_7c_c1_b7_27_22_0a_95);
        }
    }
}

type MonoMap<V> = HashMap<Monomial, V, BuildHasherDefault<MonoHasher>>;

/// Sparse multivariate polynomial with integer coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IntPoly {
    terms: MonoMap<BigInt>,
}

fn mono_mul(a: &Monomial, b: &Monomial) -> Monomial {
    let mut out = *a;
    for (o, s) in out.iter_mut().zip(b) {
        *o = o.checked_add(*s).expect("Witt monomial exponent overflow");
    }
    out
}

impl IntPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: BigInt) -> Self {
        let mut p = Self::zero();
        p.add_term([0; MAX_VARS], c);
        p
    }

    /// The single variable with the given interleaved index.
    pub fn var(index: usize) -> Self {
        let mut m = [0; MAX_VARS];
        m[index] = 1;
        let mut p = Self::zero();
        p.add_term(m, BigInt::one());
        p
    }

    pub fn x(i: usize) -> Self {
        Self::var(2 * i)
    }

    pub fn y(i: usize) -> Self {
        Self::var(2 * i + 1)
    }

    pub fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(m).or_insert_with(BigInt::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    /// Coefficient of the monomial given by sparse (variable, exponent) pairs.
    pub fn coeff(&self, pairs: &[(usize, u16)]) -> BigInt {
        let mut m = [0; MAX_VARS];
        for &(i, e) in pairs {
            m[i] = e;
        }
        self.terms.get(&m).cloned().unwrap_or_default()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in a deterministic order: by total degree, then exponent vector.
    pub fn sorted_terms(&self) -> Vec<(Monomial, BigInt)> {
        let mut v: Vec<_> = self.terms.iter().map(|(m, c)| (*m, c.clone())).collect();
        v.sort_by(|(a, _), (b, _)| {
            let da: u32 = a.iter().map(|&e| e as u32).sum();
            let db: u32 = b.iter().map(|&e| e as u32).sum();
            da.cmp(&db).then_with(|| b.cmp(a))
        });
        v
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, -c);
        }
        out
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(m, v)| (*m, v * c)).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut acc: MonoMap<BigInt> = MonoMap::default();
        acc.reserve(self.terms.len() * other.terms.len() / 2 + 1);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = mono_mul(ma, mb);
                match acc.get_mut(&m) {
                    Some(v) => *v += ca * cb,
                    None => {
                        acc.insert(m, ca * cb);
                    }
                }
            }
        }
        acc.retain(|_, v| !v.is_zero());
        Self { terms: acc }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::constant(BigInt::one());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Exact division of every coefficient by d; None if some coefficient is not divisible.
    pub fn exact_div(&self, d: &BigInt) -> Option<Self> {
        let mut terms = MonoMap::default();
        for (m, c) in &self.terms {
            let (q, r) = c.div_rem(d);
            if !r.is_zero() {
                return None;
            }
            terms.insert(*m, q);
        }
        Some(Self { terms })
    }

    /// Substitutes ring elements for the variables (interleaved index order).
    pub fn eval<R: Ring>(&self, ring: &R, vars: &[R::Elem]) -> R::Elem {
        let compiled = CompiledPoly::new(self, ring.characteristic(), None);
        compiled.eval(ring, vars)
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.sorted_terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let vars: Vec<String> = m
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    let name = format!("{}{}", if i % 2 == 0 { 'x' } else { 'y' }, i / 2);
                    if e == 1 {
                        name
                    } else {
                        format!("{name}^{e}")
                    }
                })
                .collect();
            if vars.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{abs}*{}", vars.join("*"))?;
            }
        }
        Ok(())
    }
}

/// W_m(z_0, ..., z_m) = Σ_{i≤m} p^i z_i^{p^{m-i}} where z_i is the variable `var(i)`.
pub fn witt_polynomial(p: u64, m: usize, var: impl Fn(usize) -> IntPoly) -> IntPoly {
    let pb = BigInt::from(p);
    let mut out = IntPoly::zero();
    for i in 0..=m {
        let term = var(i).pow(p.pow((m - i) as u32)).scale(&pb.pow(i as u32));
        out = out.add(&term);
    }
    out
}

/// The structure polynomials S_0..S_{n-1}, P_0..P_{n-1} for one prime.
#[derive(Clone, Debug)]
pub struct StructurePolys {
    pub p: u64,
    pub n: usize,
    pub s: Vec<IntPoly>,
    pub prod: Vec<IntPoly>,
    /// S_i^{p^{n-1-i}} and P_i^{p^{n-1-i}} for i < n-1, reused by the next level.
    powers: (Vec<IntPoly>, Vec<IntPoly>),
    /// Built by the recursion rather than assembled by hand; only these are memoized when compiled.
    derived: bool,
}

impl PartialEq for StructurePolys {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.n == other.n && self.s == other.s && self.prod == other.prod
    }
}

impl StructurePolys {
    /// Assembles a polynomial set directly; used to exercise the law checks on altered input.
    pub fn from_parts(p: u64, s: Vec<IntPoly>, prod: Vec<IntPoly>) -> Self {
        assert_eq!(s.len(), prod.len(), "S and P lists must have equal length");
        StructurePolys { p, n: s.len(), s, prod, powers: (Vec::new(), Vec::new()), derived: false }
    }

    fn extend(&self) -> Self {
        let p = self.p;
        let m = self.n;
        let pb = BigInt::from(p);
        let pm = pb.pow(m as u32);
        let wx = witt_polynomial(p, m, IntPoly::x);
        let wy = witt_polynomial(p, m, IntPoly::y);
        // Q_i^{p^{m-i}} for i < m, from the cached Q_i^{p^{m-1-i}}.
        let raise = |qs: &[IntPoly], cached: &[IntPoly]| -> Vec<IntPoly> {
            (0..m)
                .map(|i| if i + 1 < m && cached.len() == m - 1 { cached[i].pow(p) } else { qs[i].pow(p.pow((m - i) as u32)) })
                .collect()
        };
        let s_pows = raise(&self.s, &self.powers.0);
        let p_pows = raise(&self.prod, &self.powers.1);
        let lower = |pows: &[IntPoly]| {
            let mut acc = IntPoly::zero();
            for (i, q) in pows.iter().enumerate() {
                acc = acc.add(&q.scale(&pb.pow(i as u32)));
            }
            acc
        };
        let s_num = wx.add(&wy).sub(&lower(&s_pows));
        let p_num = wx.mul(&wy).sub(&lower(&p_pows));
        let s_m = s_num
            .exact_div(&pm)
            .unwrap_or_else(|| panic!("S_{m} for p = {p} has a non-integral coefficient"));
        let p_m = p_num
            .exact_div(&pm)
            .unwrap_or_else(|| panic!("P_{m} for p = {p} has a non-integral coefficient"));
        let mut s = self.s.clone();
        let mut prod = self.prod.clone();
        s.push(s_m);
        prod.push(p_m);
        StructurePolys { p, n: m + 1, s, prod, powers: (s_pows, p_pows), derived: true }
    }

    fn level_zero(p: u64) -> Self {
        StructurePolys { p, n: 0, s: Vec::new(), prod: Vec::new(), powers: (Vec::new(), Vec::new()), derived: true }
    }

    /// Checks W_m(x)+W_m(y) = W_m(S) and W_m(x)W_m(y) = W_m(P) as polynomial identities.
    pub fn verify_ghost_identities(&self) -> Result<()> {
        for m in 0..self.n {
            let wx = witt_polynomial(self.p, m, IntPoly::x);
            let wy = witt_polynomial(self.p, m, IntPoly::y);
            let ws = witt_polynomial(self.p, m, |i| self.s[i].clone());
            let wp = witt_polynomial(self.p, m, |i| self.prod[i].clone());
            if ws != wx.add(&wy) {
                return Err(Error::SelfValidation(format!("additive ghost identity fails at level {m}")));
            }
            if wp != wx.mul(&wy) {
                return Err(Error::SelfValidation(format!("multiplicative ghost identity fails at level {m}")));
            }
        }
        Ok(())
    }

    /// Truncation to the first `n` levels.
    pub fn truncate(&self, n: usize) -> Self {
        let mut t = Self::from_parts(self.p, self.s[..n].to_vec(), self.prod[..n].to_vec());
        t.derived = self.derived;
        t
    }

    /// Polynomials prepared for evaluation in a ring of the given characteristic,
    /// optionally exploiting z^q = z.
    pub fn compile(&self, characteristic: u64, field_order: Option<u64>) -> CompiledStructure {
        CompiledStructure {
            s: self.s.iter().map(|q| CompiledPoly::new(q, characteristic, field_order)).collect(),
            prod: self.prod.iter().map(|q| CompiledPoly::new(q, characteristic, field_order)).collect(),
        }
    }
}

type Cache = RwLock<HashMap<(u64, usize), Arc<StructurePolys>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Structure polynomials up to level n (n ≤ [`DEFAULT_MAX_LEVEL`]), memoized.
pub fn structure_polys(p: u64, n: usize) -> Result<Arc<StructurePolys>> {
    structure_polys_opt(p, n, false)
}

/// As [`structure_polys`]; `allow_large` lifts the level cap.
pub fn structure_polys_opt(p: u64, n: usize, allow_large: bool) -> Result<Arc<StructurePolys>> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("Witt level must be at least 1".into()));
    }
    if n > DEFAULT_MAX_LEVEL && !allow_large {
        return Err(Error::InvalidArgument(format!(
            "level {n} exceeds the default cap {DEFAULT_MAX_LEVEL}; pass the large-level opt-in"
        )));
    }
    let fits = n <= MAX_LEVEL && p.checked_pow(n as u32 - 1).is_some_and(|e| e <= u16::MAX as u64);
    if !fits {
        return Err(Error::InvalidArgument(format!("level {n} for p = {p} exceeds the supported exponent range")));
    }
    if let Some(hit) = cache().read().expect("cache lock").get(&(p, n)) {
        return Ok(hit.clone());
    }
    // Start from the deepest cached level below n.
    let mut current = {
        let guard = cache().read().expect("cache lock");
        (1..n).rev().find_map(|k| guard.get(&(p, k)).map(|a| (**a).clone()))
    }
    .unwrap_or_else(|| StructurePolys::level_zero(p));
    while current.n < n {
        current = current.extend();
        let snapshot = Arc::new(current.clone());
        cache().write().expect("cache lock").entry((p, current.n)).or_insert(snapshot);
    }
    Ok(cache().read().expect("cache lock")[&(p, n)].clone())
}

/// A polynomial with coefficients reduced for a fixed characteristic, stored as a term list.
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    terms: Vec<(BigInt, Vec<(usize, u32)>)>,
    /// Coefficients as u64 residues; filled only in positive characteristic.
    small: Vec<u64>,
    /// Largest exponent per variable.
    max_exp: Vec<u32>,
}

impl CompiledPoly {
    pub fn new(poly: &IntPoly, characteristic: u64, field_order: Option<u64>) -> Self {
        let mut acc: HashMap<Vec<(usize, u32)>, BigInt> = HashMap::new();
        for (m, c) in poly.terms() {
            let c = if characteristic > 0 { c.mod_floor(&BigInt::from(characteristic)) } else { c.clone() };
            if c.is_zero() {
                continue;
            }
            let sparse: Vec<(usize, u32)> = m
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    let e = e as u32;
                    let e = match field_order {
                        Some(q) => ((e as u64 - 1) % (q - 1) + 1) as u32,
                        None => e,
                    };
                    (i, e)
                })
                .collect();
            *acc.entry(sparse).or_insert_with(BigInt::zero) += c;
        }
        let mut terms: Vec<_> = acc
            .into_iter()
            .filter_map(|(m, c)| {
                let c = if characteristic > 0 { c.mod_floor(&BigInt::from(characteristic)) } else { c };
                (!c.is_zero()).then_some((c, m))
            })
            .collect();
        terms.sort_by(|a, b| a.1.cmp(&b.1));
        let mut max_exp = Vec::new();
        for (_, m) in &terms {
            for &(i, e) in m {
                if max_exp.len() <= i {
                    max_exp.resize(i + 1, 0);
                }
                max_exp[i] = max_exp[i].max(e);
            }
        }
        let small = if characteristic > 0 { terms.iter().map(|(c, _)| c.to_u64().unwrap_or(0)).collect() } else { Vec::new() };
        CompiledPoly { terms, small, max_exp }
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn eval<R: Ring>(&self, ring: &R, vars: &[R::Elem]) -> R::Elem {
        let tables = power_tables(ring, vars, &self.max_exp);
        self.eval_with_tables(ring, &tables)
    }

    fn eval_with_tables<R: Ring>(&self, ring: &R, tables: &[Vec<R::Elem>]) -> R::Elem {
        let mut acc = ring.zero();
        for (c, m) in &self.terms {
            let mut t = ring.from_int(c);
            for &(i, e) in m {
                t = ring.mul(&t, &tables[i][e as usize]);
            }
            acc = ring.add(&acc, &t);
        }
        acc
    }
}

fn power_tables<R: Ring>(ring: &R, vars: &[R::Elem], max_exp: &[u32]) -> Vec<Vec<R::Elem>> {
    max_exp
        .iter()
        .enumerate()
        .map(|(i, &top)| {
            let mut row = Vec::with_capacity(top as usize + 1);
            row.push(ring.one());
            for k in 1..=top as usize {
                let next = ring.mul(&row[k - 1], &vars[i]);
                row.push(next);
            }
            row
        })
        .collect()
}

/// Structure polynomials prepared for one characteristic.
#[derive(Clone, Debug)]
pub struct CompiledStructure {
    pub s: Vec<CompiledPoly>,
    pub prod: Vec<CompiledPoly>,
}

impl CompiledStructure {
    fn eval_all<R: Ring>(ring: &R, polys: &[CompiledPoly], vars: &[R::Elem]) -> Vec<R::Elem> {
        let mut max_exp: Vec<u32> = Vec::new();
        for q in polys {
            if max_exp.len() < q.max_exp.len() {
                max_exp.resize(q.max_exp.len(), 0);
            }
            for (i, &e) in q.max_exp.iter().enumerate() {
                max_exp[i] = max_exp[i].max(e);
            }
        }
        if let Some(out) = Self::eval_by_logs(ring, polys, vars) {
            return out;
        }
        let tables = power_tables(ring, vars, &max_exp);
        polys.iter().map(|q| q.eval_with_tables(ring, &tables)).collect()
    }

    /// Small finite fields: each monomial becomes a sum of discrete logs, and
    /// coefficients are bucketed by the resulting power of the primitive element.
    fn eval_by_logs<R: Ring>(ring: &R, polys: &[CompiledPoly], vars: &[R::Elem]) -> Option<Vec<R::Elem>> {
        let p = ring.characteristic();
        let q1 = ring.field_order()? - 1;
        let logs: Vec<Option<u64>> =
            vars.iter().map(|v| ring.discrete_log(v).map(|l| l.map(u64::from))).collect::<Option<_>>()?;
        let mut out = Vec::with_capacity(polys.len());
        for poly in polys {
            let mut buckets = vec![0u64; q1 as usize];
            'term: for (c, m) in poly.small.iter().zip(&poly.terms) {
                let mut l = 0u64;
                for &(i, e) in &m.1 {
                    match logs.get(i).copied().flatten() {
                        Some(li) => l = (l + li * e as u64) % q1,
                        None => continue 'term,
                    }
                }
                let b = &mut buckets[l as usize];
                *b = (*b + c) % p;
            }
            let mut acc = ring.zero();
            for (l, &c) in buckets.iter().enumerate() {
                if c != 0 {
                    let t = ring.mul(&ring.from_int(&BigInt::from(c)), &ring.exp_log(l as u32)?);
                    acc = ring.add(&acc, &t);
                }
            }
            out.push(acc);
        }
        Some(out)
    }

    /// (S_0, ..., S_{n-1}) evaluated at interleaved variables.
    pub fn eval_sum<R: Ring>(&self, ring: &R, vars: &[R::Elem]) -> Vec<R::Elem> {
        Self::eval_all(ring, &self.s, vars)
    }

    pub fn eval_prod<R: Ring>(&self, ring: &R, vars: &[R::Elem]) -> Vec<R::Elem> {
        Self::eval_all(ring, &self.prod, vars)
    }
}

type CompiledCache = RwLock<HashMap<(u64, usize, u64, Option<u64>), Arc<CompiledStructure>>>;

/// Compiled structure polynomials, memoized per (p, n, characteristic, field order).
pub fn compiled_structure(
    polys: &StructurePolys,
    characteristic: u64,
    field_order: Option<u64>,
) -> Arc<CompiledStructure> {
    if !polys.derived {
        return Arc::new(polys.compile(characteristic, field_order));
    }
    static CACHE: OnceLock<CompiledCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    let key = (polys.p, polys.n, characteristic, field_order);
    if let Some(hit) = cache.read().expect("cache lock").get(&key) {
        return hit.clone();
    }
    let compiled = Arc::new(polys.compile(characteristic, field_order));
    cache.write().expect("cache lock").entry(key).or_insert(compiled).clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::Rationals;
    use num_rational::BigRational;

    #[test]
    fn level_zero_is_plain_sum_and_product() {
        let sp = structure_polys(3, 1).unwrap();
        assert_eq!(sp.s[0], IntPoly::x(0).add(&IntPoly::y(0)));
        assert_eq!(sp.prod[0], IntPoly::x(0).mul(&IntPoly::y(0)));
    }

    #[test]
    fn p2_level_one_frozen() {
        let sp = structure_polys(2, 2).unwrap();
        let s1 = IntPoly::x(1).add(&IntPoly::y(1)).sub(&IntPoly::x(0).mul(&IntPoly::y(0)));
        assert_eq!(sp.s[1], s1);
        assert_eq!(sp.s[1].to_string(), "x1 + y1 - x0*y0");
        let x0 = IntPoly::x(0);
        let y0 = IntPoly::y(0);
        let x1 = IntPoly::x(1);
        let y1 = IntPoly::y(1);
        let p1 = x0.pow(2).mul(&y1).add(&y0.pow(2).mul(&x1)).add(&x1.mul(&y1).scale(&BigInt::from(2)));
        assert_eq!(sp.prod[1], p1);
        assert_eq!(sp.prod[1].coeff(&[(2, 1), (3, 1)]), BigInt::from(2));
    }

    /// Independent route: solve the ghost identity for S_1 over the rationals by
    /// evaluating at rational points and comparing with the cached polynomial.
    #[test]
    fn ghost_identity_over_rationals() {
        for p in [2u64, 3, 5] {
            let sp = structure_polys(p, 3).unwrap();
            sp.verify_ghost_identities().unwrap();
            let q = Rationals;
            let pts: Vec<BigRational> =
                (0..6).map(|i| BigRational::new(BigInt::from(2 * i + 1), BigInt::from(i + 2))).collect();
            let ghost = |z: &[BigRational], m: usize| {
                let mut acc = BigRational::zero();
                for i in 0..=m {
                    acc += q.pow(&z[i], p.pow((m - i) as u32)) * BigRational::from_integer(BigInt::from(p).pow(i as u32));
                }
                acc
            };
            let xs: Vec<_> = (0..3).map(|i| pts[2 * i].clone()).collect();
            let ys: Vec<_> = (0..3).map(|i| pts[2 * i + 1].clone()).collect();
            let s: Vec<_> = sp.s.iter().map(|poly| poly.eval(&q, &pts)).collect();
            let pr: Vec<_> = sp.prod.iter().map(|poly| poly.eval(&q, &pts)).collect();
            for m in 0..3 {
                assert_eq!(ghost(&s, m), ghost(&xs, m) + ghost(&ys, m));
                assert_eq!(ghost(&pr, m), ghost(&xs, m) * ghost(&ys, m));
            }
        }
    }

    #[test]
    fn level_cap() {
        assert!(structure_polys(2, 7).is_err());
        assert_eq!(structure_polys(4, 2).unwrap_err(), Error::NotPrime(4));
    }
}
