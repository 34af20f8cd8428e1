//! One-dimensional commutative formal group laws as truncated power series.
//!
//! Series are sparse maps from exponent vectors to coefficients, truncated by total
//! degree. Coefficients live in a finite field or in Q.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::fcrystal::FCrystal;
use crate::field::{FiniteField, Fq};
use crate::ring::{Field, Rationals, Ring};

/// Coefficient ring of a series.
#[derive(Clone, Debug, PartialEq)]
pub enum BaseRing {
    Finite(FiniteField),
    Rationals,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Scalar {
    F(Fq),
    Q(BigRational),
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Q(q) => write!(f, "{q}"),
            Scalar::F(v) if v.len() == 1 => write!(f, "{}", v[0]),
            Scalar::F(v) => write!(f, "{v:?}"),
        }
    }
}

impl BaseRing {
    pub fn finite(field: &FiniteField) -> Self {
        BaseRing::Finite(field.clone())
    }

    pub fn field(&self) -> Option<&FiniteField> {
        match self {
            BaseRing::Finite(k) => Some(k),
            BaseRing::Rationals => None,
        }
    }

    pub fn scalar_fq(&self, e: Fq) -> Scalar {
        Scalar::F(e)
    }

    pub fn rational(&self, num: i64, den: i64) -> Result<Scalar> {
        match self {
            BaseRing::Rationals if den != 0 => Ok(Scalar::Q(BigRational::new(num.into(), den.into()))),
            BaseRing::Rationals => Err(Error::InvalidArgument("zero denominator".into())),
            BaseRing::Finite(k) => {
                let d = k.from_int(&BigInt::from(den));
                let inv = k.inv(&d).ok_or_else(|| Error::InvalidArgument(format!("{den} is not invertible in F_{}", k.order())))?;
                Ok(Scalar::F(k.mul(&k.from_int(&BigInt::from(num)), &inv)))
            }
        }
    }

    fn wrong(&self) -> ! {
        panic!("scalar does not belong to {self:?}")
    }
}

impl Ring for BaseRing {
    type Elem = Scalar;

    fn zero(&self) -> Scalar {
        match self {
            BaseRing::Finite(k) => Scalar::F(k.zero()),
            BaseRing::Rationals => Scalar::Q(BigRational::zero()),
        }
    }

    fn one(&self) -> Scalar {
        match self {
            BaseRing::Finite(k) => Scalar::F(k.one()),
            BaseRing::Rationals => Scalar::Q(BigRational::one()),
        }
    }

    fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (BaseRing::Finite(k), Scalar::F(x), Scalar::F(y)) => Scalar::F(k.add(x, y)),
            (BaseRing::Rationals, Scalar::Q(x), Scalar::Q(y)) => Scalar::Q(x + y),
            _ => self.wrong(),
        }
    }

    fn neg(&self, a: &Scalar) -> Scalar {
        match (self, a) {
            (BaseRing::Finite(k), Scalar::F(x)) => Scalar::F(k.neg(x)),
            (BaseRing::Rationals, Scalar::Q(x)) => Scalar::Q(-x),
            _ => self.wrong(),
        }
    }

    fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (BaseRing::Finite(k), Scalar::F(x), Scalar::F(y)) => Scalar::F(k.mul(x, y)),
            (BaseRing::Rationals, Scalar::Q(x), Scalar::Q(y)) => Scalar::Q(x * y),
            _ => self.wrong(),
        }
    }

    fn from_int(&self, n: &BigInt) -> Scalar {
        match self {
            BaseRing::Finite(k) => Scalar::F(k.from_int(n)),
            BaseRing::Rationals => Scalar::Q(Rationals.from_int(n)),
        }
    }

    fn characteristic(&self) -> u64 {
        match self {
            BaseRing::Finite(k) => k.p(),
            BaseRing::Rationals => 0,
        }
    }
}

impl Field for BaseRing {
    fn inv(&self, a: &Scalar) -> Option<Scalar> {
        match (self, a) {
            (BaseRing::Finite(k), Scalar::F(x)) => k.inv(x).map(Scalar::F),
            (BaseRing::Rationals, Scalar::Q(x)) => Rationals.inv(x).map(Scalar::Q),
            _ => self.wrong(),
        }
    }
}

/// Exponent vector; unused variables carry exponent 0.
pub type Exponent = [u32; 3];

fn total(e: &Exponent) -> u32 {
    e[0] + e[1] + e[2]
}

/// Power series in 1, 2 or 3 variables modulo terms of total degree > `order`.
/// Three variables only arise inside the associativity check.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries {
    ring: BaseRing,
    vars: u8,
    order: u32,
    terms: BTreeMap<Exponent, Scalar>,
}

impl TruncatedSeries {
    pub fn zero(ring: &BaseRing, vars: u8, order: u32) -> Result<Self> {
        if !(1..=3).contains(&vars) {
            return Err(Error::InvalidArgument(format!("series have 1 to 3 variables, got {vars}")));
        }
        Ok(TruncatedSeries { ring: ring.clone(), vars, order, terms: BTreeMap::new() })
    }

    /// The i-th coordinate variable.
    pub fn variable(ring: &BaseRing, vars: u8, order: u32, i: usize) -> Result<Self> {
        let mut s = Self::zero(ring, vars, order)?;
        if i >= vars as usize {
            return Err(Error::InvalidArgument(format!("variable {i} out of range")));
        }
        let mut e = [0; 3];
        e[i] = 1;
        s.set(e, ring.one());
        Ok(s)
    }

    pub fn constant(ring: &BaseRing, vars: u8, order: u32, c: Scalar) -> Result<Self> {
        let mut s = Self::zero(ring, vars, order)?;
        s.set([0; 3], c);
        Ok(s)
    }

    /// Univariate series from its coefficient list c_0, c_1, ….
    pub fn univariate(ring: &BaseRing, order: u32, coeffs: &[Scalar]) -> Result<Self> {
        let mut s = Self::zero(ring, 1, order)?;
        for (i, c) in coeffs.iter().enumerate() {
            s.set([i as u32, 0, 0], c.clone());
        }
        Ok(s)
    }

    /// Builds a series from (exponent, coefficient) pairs; terms above the order are dropped.
    pub fn from_terms(ring: &BaseRing, vars: u8, order: u32, terms: Vec<(Exponent, Scalar)>) -> Result<Self> {
        let mut s = Self::zero(ring, vars, order)?;
        for (e, c) in terms {
            if e.iter().skip(vars as usize).any(|&x| x != 0) {
                return Err(Error::InvalidArgument(format!("exponent {e:?} uses a variable beyond {vars}")));
            }
            let cur = s.coeff(&e);
            s.set(e, ring.add(&cur, &c));
        }
        Ok(s)
    }

    pub fn ring(&self) -> &BaseRing {
        &self.ring
    }

    pub fn vars(&self) -> u8 {
        self.vars
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &Exponent) -> Scalar {
        self.terms.get(e).cloned().unwrap_or_else(|| self.ring.zero())
    }

    /// Coefficient of x^i in a univariate series.
    pub fn coeff1(&self, i: u32) -> Scalar {
        self.coeff(&[i, 0, 0])
    }

    fn set(&mut self, e: Exponent, c: Scalar) {
        if total(&e) > self.order || self.ring.is_zero(&c) {
            self.terms.remove(&e);
        } else {
            self.terms.insert(e, c);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Lowest total degree carrying a nonzero term.
    pub fn valuation(&self) -> Option<u32> {
        self.terms.keys().map(total).min()
    }

    fn compatible(&self, other: &Self) {
        assert!(self.ring == other.ring && self.vars == other.vars, "series over different rings or variable counts");
    }

    pub fn truncate(&self, order: u32) -> Self {
        let mut s = self.clone();
        s.order = order.min(self.order);
        s.terms.retain(|e, _| total(e) <= s.order);
        s
    }

    pub fn add(&self, other: &Self) -> Self {
        self.compatible(other);
        let order = self.order.min(other.order);
        let mut s = self.truncate(order);
        for (e, c) in &other.terms {
            let cur = s.coeff(e);
            s.set(*e, self.ring.add(&cur, c));
        }
        s
    }

    pub fn neg(&self) -> Self {
        let mut s = self.clone();
        for c in s.terms.values_mut() {
            *c = self.ring.neg(c);
        }
        s
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        let mut s = Self { terms: BTreeMap::new(), ..self.clone() };
        for (e, x) in &self.terms {
            s.set(*e, self.ring.mul(c, x));
        }
        s
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.compatible(other);
        let order = self.order.min(other.order);
        let mut acc: BTreeMap<Exponent, Scalar> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            let da = total(ea);
            for (eb, cb) in &other.terms {
                if da + total(eb) > order {
                    continue;
                }
                let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]];
                let prod = self.ring.mul(ca, cb);
                let entry = acc.entry(e).or_insert_with(|| self.ring.zero());
                *entry = self.ring.add(entry, &prod);
            }
        }
        acc.retain(|_, c| !self.ring.is_zero(c));
        TruncatedSeries { ring: self.ring.clone(), vars: self.vars, order, terms: acc }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::constant(&self.ring, self.vars, self.order, self.ring.one()).expect("valid shape");
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// 1/f for f with invertible constant term.
    pub fn reciprocal(&self) -> Result<Self> {
        let c0 = self.coeff(&[0; 3]);
        let inv = self.ring.inv(&c0).ok_or_else(|| Error::InvalidArgument("constant term is not invertible".into()))?;
        // 1/f = c⁻¹·Σ (1 − c⁻¹f)^k, and 1 − c⁻¹f has no constant term.
        let one = Self::constant(&self.ring, self.vars, self.order, self.ring.one())?;
        let u = one.sub(&self.scale(&inv));
        let mut acc = one.clone();
        let mut term = one;
        for _ in 0..self.order {
            term = term.mul(&u);
            if term.is_zero() {
                break;
            }
            acc = acc.add(&term);
        }
        Ok(acc.scale(&inv))
    }

    /// self(s_1, …, s_v), each s_i without constant term and all in the same target variables.
    pub fn substitute(&self, subs: &[TruncatedSeries]) -> Result<Self> {
        if subs.len() != self.vars as usize {
            return Err(Error::InvalidArgument(format!("need {} substitutions, got {}", self.vars, subs.len())));
        }
        let target = &subs[0];
        for s in subs {
            s.compatible(target);
            if !self.ring.is_zero(&s.coeff(&[0; 3])) {
                return Err(Error::InvalidArgument("substituted series must have zero constant term".into()));
            }
        }
        let order = subs.iter().map(|s| s.order).min().unwrap_or(self.order).min(self.order);
        let one = Self::constant(&self.ring, target.vars, order, self.ring.one())?;
        let mut powers: Vec<Vec<Self>> = subs.iter().map(|_| vec![one.clone()]).collect();
        let mut acc = Self::zero(&self.ring, target.vars, order)?;
        for (e, c) in &self.terms {
            let mut term = one.scale(c);
            for (i, s) in subs.iter().enumerate() {
                let k = e[i] as usize;
                while powers[i].len() <= k {
                    let next = powers[i].last().expect("nonempty").mul(&s.truncate(order));
                    powers[i].push(next);
                }
                if k > 0 {
                    term = term.mul(&powers[i][k]);
                }
            }
            acc = acc.add(&term);
        }
        Ok(acc)
    }

    /// Compositional inverse of a univariate f = u·x + O(x²) with u invertible.
    pub fn reversion(&self) -> Result<Self> {
        if self.vars != 1 {
            return Err(Error::InvalidArgument("reversion needs a univariate series".into()));
        }
        let u = self.coeff1(1);
        if !self.ring.is_zero(&self.coeff1(0)) {
            return Err(Error::InvalidArgument("series has a constant term".into()));
        }
        let ui = self.ring.inv(&u).ok_or_else(|| Error::InvalidArgument("linear coefficient is not invertible".into()))?;
        let x = Self::variable(&self.ring, 1, self.order, 0)?;
        // g ← g − (f(g) − x)/u converges one degree per step.
        let mut g = x.scale(&ui);
        for _ in 1..self.order {
            let err = self.substitute(&[g.clone()])?.sub(&x);
            if err.is_zero() {
                break;
            }
            g = g.sub(&err.scale(&ui));
        }
        Ok(g)
    }
}

/// Which standard construction produced a law; the additive law is exactly unipotent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LawKind {
    Additive,
    Multiplicative,
    Elliptic([i64; 5]),
    Custom,
}

/// A one-dimensional commutative formal group law F(x, y).
#[derive(Clone, Debug, PartialEq)]
pub struct FGL1 {
    law: TruncatedSeries,
    kind: LawKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FglAxiomReport {
    /// Lowest degree where F(x, 0) ≠ x, if any.
    pub unit_failure: Option<u32>,
    pub associativity_failure: Option<u32>,
    pub commutativity_failure: Option<u32>,
}

impl FglAxiomReport {
    pub fn passed(&self) -> bool {
        self.unit_failure.is_none() && self.associativity_failure.is_none() && self.commutativity_failure.is_none()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum HeightResult {
    /// `[p](x) = a·x^{p^s}` + higher terms.
    Finite(u32, Scalar),
    /// `[p](x)` vanishes through degree p^bound.
    ExceedsBound(u32),
}

pub const DEFAULT_MAX_HEIGHT: u32 = 4;

fn diff_degree(a: &TruncatedSeries, b: &TruncatedSeries) -> Option<u32> {
    a.sub(b).valuation()
}

impl FGL1 {
    /// Validates F ≡ x + y mod degree 2 and the axioms through the truncation order.
    pub fn new(law: TruncatedSeries, kind: LawKind) -> Result<Self> {
        if law.vars != 2 {
            return Err(Error::InvalidArgument("a formal group law is bivariate".into()));
        }
        if law.order < 2 {
            return Err(Error::InsufficientPrecision("truncation order must be at least 2".into()));
        }
        let f = FGL1 { law, kind };
        let report = f.check_axioms()?;
        if !report.passed() {
            return Err(Error::InvalidArgument(format!("formal group law axioms fail: {report:?}")));
        }
        Ok(f)
    }

    pub fn law(&self) -> &TruncatedSeries {
        &self.law
    }

    pub fn ring(&self) -> &BaseRing {
        &self.law.ring
    }

    pub fn order(&self) -> u32 {
        self.law.order
    }

    pub fn kind(&self) -> &LawKind {
        &self.kind
    }

    pub fn check_axioms(&self) -> Result<FglAxiomReport> {
        let (ring, n) = (&self.law.ring, self.law.order);
        let x1 = TruncatedSeries::variable(ring, 1, n, 0)?;
        let zero1 = TruncatedSeries::zero(ring, 1, n)?;
        let unit_x = self.law.substitute(&[x1.clone(), zero1.clone()])?;
        let unit_y = self.law.substitute(&[zero1, x1.clone()])?;
        let unit_failure = match (diff_degree(&unit_x, &x1), diff_degree(&unit_y, &x1)) {
            (None, None) => None,
            (a, b) => Some(a.into_iter().chain(b).min().expect("some failure")),
        };
        let x2 = TruncatedSeries::variable(ring, 2, n, 0)?;
        let y2 = TruncatedSeries::variable(ring, 2, n, 1)?;
        let swapped = self.law.substitute(&[y2, x2])?;
        let commutativity_failure = diff_degree(&self.law, &swapped);
        let [x, y, z] = [0, 1, 2].map(|i| TruncatedSeries::variable(ring, 3, n, i).expect("valid variable"));
        let fxy = self.law.substitute(&[x.clone(), y.clone()])?;
        let fyz = self.law.substitute(&[y, z.clone()])?;
        let left = self.law.substitute(&[x, fyz])?;
        let right = self.law.substitute(&[fxy, z])?;
        let associativity_failure = diff_degree(&left, &right);
        Ok(FglAxiomReport { unit_failure, associativity_failure, commutativity_failure })
    }

    /// F(u, v) for univariate u, v without constant term.
    pub fn apply(&self, u: &TruncatedSeries, v: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.law.substitute(&[u.clone(), v.clone()])
    }

    /// `[n](x)`, with `[n] = F([n−1](x), x)`.
    pub fn mul_by_n(&self, n: u64) -> Result<TruncatedSeries> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be positive".into()));
        }
        let x = TruncatedSeries::variable(&self.law.ring, 1, self.law.order, 0)?;
        // Double-and-add, valid because F is associative.
        let mut acc: Option<TruncatedSeries> = None;
        let mut base = x;
        let mut m = n;
        while m > 0 {
            if m & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => self.apply(&a, &base)?,
                });
            }
            m >>= 1;
            if m > 0 {
                base = self.apply(&base, &base)?;
            }
        }
        Ok(acc.expect("n > 0"))
    }

    pub fn height(&self, max_h: u32) -> Result<HeightResult> {
        let k = self
            .law
            .ring
            .field()
            .ok_or_else(|| Error::InvalidArgument("height needs a finite base field".into()))?;
        let p = k.p();
        let bound = p.checked_pow(max_h).filter(|&b| b <= u32::MAX as u64).ok_or_else(|| {
            Error::InvalidArgument(format!("p^{max_h} is too large"))
        })?;
        if (self.law.order as u64) < bound {
            return Err(Error::InsufficientPrecision(format!(
                "height bound {max_h} needs truncation order ≥ {bound}, have {}",
                self.law.order
            )));
        }
        let f = self.truncate(bound as u32)?;
        let series = f.mul_by_n(p)?;
        let Some(d) = series.valuation() else {
            return Ok(HeightResult::ExceedsBound(max_h));
        };
        let mut s = 0;
        let mut q = 1u64;
        while q < d as u64 {
            q *= p;
            s += 1;
        }
        if q != d as u64 || s == 0 {
            return Err(Error::SelfValidation(format!("[p](x) starts in degree {d}, which is not a power of p")));
        }
        Ok(HeightResult::Finite(s, series.coeff1(d)))
    }

    /// The same law modulo degree > order.
    pub fn truncate(&self, order: u32) -> Result<FGL1> {
        if order < 2 || order > self.law.order {
            return Err(Error::InvalidArgument(format!("cannot truncate order {} to {order}", self.law.order)));
        }
        Ok(FGL1 { law: self.law.truncate(order), kind: self.kind.clone() })
    }

    /// The strict isomorphism log_F: F → Ĝa over Q.
    pub fn logarithm(&self) -> Result<TruncatedSeries> {
        let ring = &self.law.ring;
        if *ring != BaseRing::Rationals {
            return Err(Error::InvalidArgument("the logarithm needs the rationals as base ring".into()));
        }
        let n = self.law.order;
        // Coefficient of x^{n−1}·y in L(F(x, y)) must vanish for n ≥ 2; it only sees
        // g(x) = ∂F/∂y(x, 0): Σ_{m ≤ n} m·b_m·g_{n−m} = 0.
        let g: Vec<Scalar> = (0..=n).map(|i| self.law.coeff(&[i, 1, 0])).collect();
        let mut b = vec![ring.zero(); n as usize + 1];
        b[1] = ring.one();
        for deg in 2..=n as usize {
            let mut acc = ring.zero();
            for m in 1..deg {
                let t = ring.mul(&ring.from_i64(m as i64), &ring.mul(&b[m], &g[deg - m]));
                acc = ring.add(&acc, &t);
            }
            let nd = ring.inv(&ring.from_i64(deg as i64)).expect("Q is a field");
            b[deg] = ring.neg(&ring.mul(&acc, &nd));
        }
        let log = TruncatedSeries::univariate(ring, n, &b)?;
        let x2 = TruncatedSeries::variable(ring, 2, n, 0)?;
        let y2 = TruncatedSeries::variable(ring, 2, n, 1)?;
        let lhs = log.substitute(std::slice::from_ref(&self.law))?;
        let rhs = log.substitute(&[x2])?.add(&log.substitute(&[y2])?);
        if let Some(d) = diff_degree(&lhs, &rhs) {
            return Err(Error::SelfValidation(format!("log(F(x, y)) ≠ log x + log y in degree {d}")));
        }
        Ok(log)
    }

    /// φ⁻¹(F(φ(x), φ(y))) for a univariate φ = x + O(x²).
    pub fn conjugate(&self, phi: &TruncatedSeries) -> Result<FGL1> {
        let ring = &self.law.ring;
        if phi.coeff1(1) != ring.one() {
            return Err(Error::InvalidArgument("coordinate change must be strict".into()));
        }
        let n = self.law.order;
        let x2 = TruncatedSeries::variable(ring, 2, n, 0)?;
        let y2 = TruncatedSeries::variable(ring, 2, n, 1)?;
        let inner = self.law.substitute(&[phi.substitute(&[x2])?, phi.substitute(&[y2])?])?;
        let law = phi.reversion()?.substitute(&[inner])?;
        FGL1::new(law, LawKind::Custom)
    }
}

fn need_order(n: u32) -> Result<()> {
    if n < 2 {
        return Err(Error::InsufficientPrecision("truncation order must be at least 2".into()));
    }
    Ok(())
}

/// Ĝa: F(x, y) = x + y.
pub fn ga(ring: &BaseRing, n: u32) -> Result<FGL1> {
    need_order(n)?;
    let one = ring.one();
    let law = TruncatedSeries::from_terms(ring, 2, n, vec![([1, 0, 0], one.clone()), ([0, 1, 0], one)])?;
    FGL1::new(law, LawKind::Additive)
}

/// Ĝm: F(x, y) = x + y + xy.
pub fn gm(ring: &BaseRing, n: u32) -> Result<FGL1> {
    need_order(n)?;
    let one = ring.one();
    let law = TruncatedSeries::from_terms(
        ring,
        2,
        n,
        vec![([1, 0, 0], one.clone()), ([0, 1, 0], one.clone()), ([1, 1, 0], one)],
    )?;
    FGL1::new(law, LawKind::Multiplicative)
}

/// Weierstrass coefficients a1, a2, a3, a4, a6.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Weierstrass {
    pub a1: i64,
    pub a2: i64,
    pub a3: i64,
    pub a4: i64,
    pub a6: i64,
}

impl Weierstrass {
    pub fn new(a: [i64; 5]) -> Self {
        Weierstrass { a1: a[0], a2: a[1], a3: a[2], a4: a[3], a6: a[4] }
    }

    /// y² = x³ + A·x + B.
    pub fn short(a: i64, b: i64) -> Self {
        Self::new([0, 0, 0, a, b])
    }

    pub fn coeffs(&self) -> [i64; 5] {
        [self.a1, self.a2, self.a3, self.a4, self.a6]
    }

    pub fn discriminant(&self) -> BigInt {
        let [a1, a2, a3, a4, a6] = self.coeffs().map(BigInt::from);
        let b2 = &a1 * &a1 + 4 * &a2;
        let b4 = 2 * &a4 + &a1 * &a3;
        let b6 = &a3 * &a3 + 4 * &a6;
        let b8 = &a1 * &a1 * &a6 + 4 * &a2 * &a6 - &a1 * &a3 * &a4 + &a2 * &a3 * &a3 - &a4 * &a4;
        let lead: BigInt = &b2 * &b2 * &b8;
        -lead - 8 * &b4 * &b4 * &b4 - 27 * &b6 * &b6 + 9 * &b2 * &b4 * &b6
    }

    pub fn is_smooth_over(&self, ring: &BaseRing) -> bool {
        !ring.is_zero(&ring.from_int(&self.discriminant()))
    }

    /// #E(k), including the point at infinity, by exhaustive search.
    pub fn point_count(&self, k: &FiniteField) -> u64 {
        let [a1, a2, a3, a4, a6] = self.coeffs().map(|c| k.from_int(&BigInt::from(c)));
        let elems: Vec<Fq> = k.elements().collect();
        let mut count = 1;
        for x in &elems {
            let x2 = k.mul(x, x);
            let rhs = k.add(&k.add(&k.mul(&x2, x), &k.mul(&a2, &x2)), &k.add(&k.mul(&a4, x), &a6));
            for y in &elems {
                let lhs = k.add(&k.mul(y, y), &k.add(&k.mul(&k.mul(&a1, x), y), &k.mul(&a3, y)));
                if lhs == rhs {
                    count += 1;
                }
            }
        }
        count
    }

    /// Trace of Frobenius q + 1 − #E(F_q) divisible by p.
    pub fn is_supersingular_by_count(&self, k: &FiniteField) -> bool {
        let trace = k.order() as i64 + 1 - self.point_count(k) as i64;
        trace.rem_euclid(k.p() as i64) == 0
    }
}

/// Formal group of E at t = −x/y, truncated at total degree n.
pub fn elliptic_fgl(curve: &Weierstrass, ring: &BaseRing, n: u32) -> Result<FGL1> {
    need_order(n)?;
    if !curve.is_smooth_over(ring) {
        return Err(Error::Degenerate(format!("Weierstrass curve {:?} is singular", curve.coeffs())));
    }
    let c = curve.coeffs().map(|v| ring.from_i64(v));
    let [a1, a2, a3, a4, a6] = &c;
    // One extra degree absorbs the 1/z-type divisions in λ.
    let m = n + 1;
    let z = TruncatedSeries::variable(ring, 1, m, 0)?;
    // w = z³ + a1·z·w + a2·z²·w + a3·w² + a4·z·w² + a6·w³, one degree gained per pass.
    let z2 = z.mul(&z);
    let z3 = z2.mul(&z);
    let mut w = z3.clone();
    for _ in 0..m {
        let w2 = w.mul(&w);
        let next = z3
            .add(&z.mul(&w).scale(a1))
            .add(&z2.mul(&w).scale(a2))
            .add(&w2.scale(a3))
            .add(&z.mul(&w2).scale(a4))
            .add(&w2.mul(&w).scale(a6));
        if next == w {
            break;
        }
        w = next;
    }
    let x1 = TruncatedSeries::variable(ring, 2, m, 0)?;
    let x2 = TruncatedSeries::variable(ring, 2, m, 1)?;
    // λ = (w(z2) − w(z1))/(z2 − z1) = Σ_k w_k·Σ_{i<k} z1^i z2^{k−1−i}.
    let mut lambda = TruncatedSeries::zero(ring, 2, m)?;
    for (e, wk) in w.terms() {
        let k = e[0];
        let terms = (0..k).map(|i| ([i, k - 1 - i, 0], wk.clone())).collect();
        lambda = lambda.add(&TruncatedSeries::from_terms(ring, 2, m, terms)?);
    }
    let w1 = w.substitute(std::slice::from_ref(&x1))?;
    let nu = w1.sub(&lambda.mul(&x1));
    let l2 = lambda.mul(&lambda);
    let two = ring.from_i64(2);
    let three = ring.from_i64(3);
    // Minus the z²-coefficient of the cubic obtained by putting w = λz + ν into the curve.
    let num = lambda
        .scale(a1)
        .add(&l2.scale(a3))
        .add(&nu.scale(a2))
        .add(&lambda.mul(&nu).scale(&ring.mul(&two, a4)))
        .add(&l2.mul(&nu).scale(&ring.mul(&three, a6)))
        .neg();
    let one2 = TruncatedSeries::constant(ring, 2, m, ring.one())?;
    let den = one2.add(&lambda.scale(a2)).add(&l2.scale(a4)).add(&l2.mul(&lambda).scale(a6));
    let z3s = x1.neg().sub(&x2).add(&num.mul(&den.reciprocal()?));
    // Inverse: i(z) = z/(a1·z + a3·w(z) − 1).
    let one1 = TruncatedSeries::constant(ring, 1, m, ring.one())?;
    let inv_den = z.scale(a1).add(&w.scale(a3)).sub(&one1);
    let inverse = z.mul(&inv_den.reciprocal()?);
    let law = inverse.substitute(&[z3s])?.truncate(n);
    FGL1::new(law, LawKind::Elliptic(curve.coeffs()))
}

/// The Cartier–Dieudonné crystal of a height-h law: N_{(h−1)/h}, or the unit-root crystal for h = 1.
pub fn cartier_crystal(h: u32, field: &FiniteField, n: u32) -> Result<FCrystal> {
    if h == 0 {
        return Err(Error::InvalidArgument("height must be positive".into()));
    }
    if n < 2 {
        return Err(Error::InsufficientPrecision("cartier_crystal needs n ≥ 2".into()));
    }
    if h == 1 {
        FCrystal::identity(field, n, 1)
    } else {
        FCrystal::standard_n(h - 1, h, field, n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(p: u64) -> BaseRing {
        BaseRing::finite(&FiniteField::prime(p).unwrap())
    }

    #[test]
    fn gm_multiplication_by_p() {
        let r = fp(3);
        let g = gm(&r, 10).unwrap();
        let m3 = g.mul_by_n(3).unwrap();
        assert_eq!(m3.terms().count(), 1);
        assert_eq!(m3.coeff1(3), r.one());
        let q = gm(&BaseRing::Rationals, 6).unwrap().mul_by_n(2).unwrap();
        assert_eq!(q.coeff1(1), BaseRing::Rationals.from_i64(2));
        assert_eq!(q.coeff1(2), BaseRing::Rationals.one());
        assert_eq!(q.terms().count(), 2);
    }

    #[test]
    fn heights_of_standard_laws() {
        let r = fp(3);
        let g = gm(&r, 81).unwrap();
        assert_eq!(g.height(4).unwrap(), HeightResult::Finite(1, r.one()));
        assert_eq!(ga(&r, 81).unwrap().height(4).unwrap(), HeightResult::ExceedsBound(4));
        assert!(matches!(g.height(5), Err(Error::InsufficientPrecision(_))));
    }

    #[test]
    fn bad_unit_law_detected() {
        let r = BaseRing::Rationals;
        let one = r.one();
        let law = TruncatedSeries::from_terms(&r, 2, 6, vec![([1, 0, 0], one.clone()), ([0, 1, 0], one.clone()), ([2, 0, 0], one)]).unwrap();
        let report = FGL1 { law, kind: LawKind::Custom }.check_axioms().unwrap();
        assert_eq!(report.unit_failure, Some(2));
    }

    #[test]
    fn gm_logarithm() {
        let r = BaseRing::Rationals;
        let log = gm(&r, 12).unwrap().logarithm().unwrap();
        for n in 1..=12i64 {
            let sign = if n % 2 == 1 { 1 } else { -1 };
            assert_eq!(log.coeff1(n as u32), r.rational(sign, n).unwrap());
        }
        let x = TruncatedSeries::variable(&r, 1, 12, 0).unwrap();
        assert_eq!(log.reversion().unwrap().substitute(std::slice::from_ref(&log)).unwrap(), x);
    }

    #[test]
    fn elliptic_low_degree_terms() {
        let r = BaseRing::Rationals;
        let e = Weierstrass::new([2, 1, 3, -1, 5]);
        let f = elliptic_fgl(&e, &r, 6).unwrap();
        assert_eq!(f.law().coeff(&[1, 1, 0]), r.from_i64(-2));
        assert_eq!(f.law().coeff(&[2, 0, 0]), r.zero());
        let log = elliptic_fgl(&Weierstrass::short(0, 1), &r, 10).unwrap().logarithm().unwrap();
        let x = TruncatedSeries::variable(&r, 1, 10, 0).unwrap();
        assert_eq!(log.reversion().unwrap().substitute(&[log]).unwrap(), x);
    }

    #[test]
    fn elliptic_heights_match_point_counts() {
        let k = FiniteField::prime(3).unwrap();
        let r = BaseRing::finite(&k);
        let e = Weierstrass::short(-1, 0);
        assert_eq!(e.point_count(&k), 4);
        let f = elliptic_fgl(&e, &r, 9).unwrap();
        assert!(matches!(f.height(2).unwrap(), HeightResult::Finite(2, _)));
        let k5 = FiniteField::prime(5).unwrap();
        let e = Weierstrass::short(1, 0);
        let f = elliptic_fgl(&e, &BaseRing::finite(&k5), 25).unwrap();
        let h = if e.is_supersingular_by_count(&k5) { 2 } else { 1 };
        assert!(matches!(f.height(2).unwrap(), HeightResult::Finite(s, _) if s == h));
    }

    #[test]
    fn cartier_crystals() {
        let k = FiniteField::prime(3).unwrap();
        for h in 1..=5u32 {
            let c = cartier_crystal(h, &k, 2 * h + 4).unwrap();
            let hodge = c.hodge_numbers().unwrap();
            assert_eq!(hodge[0], 1);
            assert_eq!(hodge.get(1).copied().unwrap_or(0), (h - 1) as u64);
            let s = c.newton_slopes().unwrap();
            assert_eq!(s.slopes().len(), 1);
            assert_eq!(s.slopes()[0].0, BigRational::new((h - 1).into(), h.into()));
        }
    }
}
