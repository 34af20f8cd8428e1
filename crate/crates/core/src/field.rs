//! Finite fields F_{p^a} as `F_p[x]/(f)` with an explicit monic irreducible f.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::ring::{big_to_u64_mod, inv_mod, is_prime, Field, Ring};

struct Inner {
    p: u64,
    degree: usize,
    /// Low-to-high coefficients, length degree + 1, leading coefficient 1.
    modulus: Vec<u64>,
    logs: OnceLock<Option<LogTable>>,
}

impl PartialEq for Inner {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.modulus == other.modulus
    }
}

impl Eq for Inner {}

impl Hash for Inner {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.p.hash(state);
        self.modulus.hash(state);
    }
}

/// Fields up to this order get discrete-log tables.
const LOG_TABLE_MAX: u64 = 1 << 16;

struct LogTable {
    /// Indexed by `FiniteField::index`; entry 0 (the zero element) is unused.
    log: Vec<u32>,
    exp: Vec<Fq>,
}

/// The field F_{p^a}. Cloning is cheap; equality compares p and the modulus.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FiniteField(Arc<Inner>);

/// Element of F_{p^a}: `degree` residues in [0, p), low-to-high in the power basis.
pub type Fq = Vec<u64>;

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{}{:?}", self.0.p, self.0.degree, self.0.modulus)
    }
}

impl FiniteField {
    /// The prime field F_p.
    pub fn prime(p: u64) -> Result<Self> {
        Self::new(p, 1)
    }

    /// F_{p^a} with the default modulus: the smallest monic irreducible of degree
    /// a when the lower coefficients (c_{a-1}, ..., c_0) are read lexicographically.
    pub fn new(p: u64, degree: usize) -> Result<Self> {
        check_prime(p)?;
        if degree == 0 {
            return Err(Error::InvalidArgument("field degree must be positive".into()));
        }
        if degree == 1 {
            return Self::with_modulus(p, vec![0, 1]);
        }
        let total = (p as u128).checked_pow(degree as u32).ok_or_else(|| {
            Error::InvalidArgument(format!("F_{p}^{degree} is too large to enumerate moduli"))
        })?;
        for idx in 0..total {
            // idx written in base p gives (c_0, ..., c_{a-1}); c_{a-1} is the most significant digit.
            let mut m = idx;
            let mut coeffs = vec![0u64; degree + 1];
            for c in coeffs.iter_mut().take(degree) {
                *c = (m % p as u128) as u64;
                m /= p as u128;
            }
            coeffs[degree] = 1;
            if poly_is_irreducible(&coeffs, p) {
                return Self::with_modulus(p, coeffs);
            }
        }
        unreachable!("irreducible polynomials exist in every degree")
    }

    /// `F_p[x]/(modulus)`. `modulus` is low-to-high and must be monic and irreducible.
    pub fn with_modulus(p: u64, modulus: Vec<u64>) -> Result<Self> {
        check_prime(p)?;
        let mut modulus: Vec<u64> = modulus.into_iter().map(|c| c % p).collect();
        while modulus.len() > 1 && *modulus.last().unwrap() == 0 {
            modulus.pop();
        }
        if modulus.len() < 2 || *modulus.last().unwrap() != 1 {
            return Err(Error::InvalidArgument(format!(
                "modulus must be monic of positive degree, got {modulus:?}"
            )));
        }
        if !poly_is_irreducible(&modulus, p) {
            return Err(Error::Reducible { p, modulus });
        }
        let degree = modulus.len() - 1;
        Ok(FiniteField(Arc::new(Inner { p, degree, modulus, logs: OnceLock::new() })))
    }

    pub fn p(&self) -> u64 {
        self.0.p
    }

    pub fn degree(&self) -> usize {
        self.0.degree
    }

    pub fn modulus(&self) -> &[u64] {
        &self.0.modulus
    }

    /// Number of elements q = p^a. Panics if it does not fit in u64.
    pub fn order(&self) -> u64 {
        self.0.p.checked_pow(self.0.degree as u32).expect("field order fits in u64")
    }

    /// Reduces an arbitrary coefficient list (any length) into the field.
    pub fn elem(&self, coeffs: &[u64]) -> Fq {
        let p = self.0.p;
        let v: Vec<u64> = coeffs.iter().map(|c| c % p).collect();
        self.reduce(v)
    }

    pub fn from_u64(&self, n: u64) -> Fq {
        let mut v = vec![0; self.0.degree];
        v[0] = n % self.0.p;
        v
    }

    /// The class of x.
    pub fn generator(&self) -> Fq {
        self.elem(&[0, 1])
    }

    /// Bijection onto [0, q): Σ c_i p^i.
    pub fn index(&self, e: &Fq) -> u64 {
        e.iter().rev().fold(0u64, |acc, &c| acc * self.0.p + c)
    }

    pub fn from_index(&self, mut idx: u64) -> Fq {
        let p = self.0.p;
        (0..self.0.degree)
            .map(|_| {
                let c = idx % p;
                idx /= p;
                c
            })
            .collect()
    }

    pub fn elements(&self) -> impl Iterator<Item = Fq> + '_ {
        (0..self.order()).map(move |i| self.from_index(i))
    }

    pub fn random<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Fq {
        (0..self.0.degree).map(|_| rng.gen_range(0..self.0.p)).collect()
    }

    /// x ↦ x^p.
    pub fn frobenius(&self, e: &Fq) -> Fq {
        self.pow(e, self.0.p)
    }

    /// x ↦ x^{p^k}; k may be negative (interpreted modulo the degree).
    pub fn frobenius_pow(&self, e: &Fq, k: i64) -> Fq {
        let a = self.0.degree as i64;
        let k = k.rem_euclid(a);
        let mut out = e.clone();
        for _ in 0..k {
            out = self.frobenius(&out);
        }
        out
    }

    /// True iff e lies in the subfield F_{p^d}.
    pub fn in_subfield(&self, e: &Fq, d: usize) -> bool {
        self.frobenius_pow(e, d as i64) == *e
    }

    fn log_table(&self) -> Option<&LogTable> {
        self.0
            .logs
            .get_or_init(|| {
                let q = self.order();
                (q <= LOG_TABLE_MAX).then(|| {
                    let g = self.primitive_element();
                    let mut log = vec![0u32; q as usize];
                    let mut exp = Vec::with_capacity(q as usize - 1);
                    let mut x = self.one();
                    for l in 0..q - 1 {
                        log[self.index(&x) as usize] = l as u32;
                        let next = self.mul(&x, &g);
                        exp.push(x);
                        x = next;
                    }
                    LogTable { log, exp }
                })
            })
            .as_ref()
    }

    /// A generator of the multiplicative group.
    pub fn primitive_element(&self) -> Fq {
        let q1 = self.order() - 1;
        let primes = prime_factors(q1);
        for i in 1..self.order() {
            let g = self.from_index(i);
            if primes.iter().all(|&r| self.pow(&g, q1 / r) != self.one()) {
                return g;
            }
        }
        unreachable!("multiplicative group of a finite field is cyclic")
    }

    /// Some y with y^m = c, if one exists. Uses a discrete logarithm, so q must be small.
    pub fn nth_root(&self, c: &Fq, m: u64) -> Option<Fq> {
        if self.is_zero(c) {
            return Some(self.zero());
        }
        let q1 = self.order() - 1;
        let g = self.primitive_element();
        let mut acc = self.one();
        let mut log = None;
        for k in 0..q1 {
            if acc == *c {
                log = Some(k);
                break;
            }
            acc = self.mul(&acc, &g);
        }
        let k = log?;
        // Need m·t ≡ k (mod q-1).
        let d = gcd(m % q1, q1);
        let d = if d == 0 { q1 } else { d };
        if k % d != 0 {
            return None;
        }
        let (mm, kk, qq) = ((m % q1) / d, k / d, q1 / d);
        let t = if qq == 1 { 0 } else { (kk as u128 * modinv_u64(mm % qq, qq) as u128 % qq as u128) as u64 };
        Some(self.pow(&g, t))
    }

    /// Square root, if one exists.
    pub fn sqrt(&self, c: &Fq) -> Option<Fq> {
        if self.is_zero(c) {
            return Some(self.zero());
        }
        if self.0.p == 2 {
            // Squaring is bijective in characteristic 2.
            return Some(self.pow(c, self.order() / 2));
        }
        let q = self.order();
        if self.pow(c, (q - 1) / 2) != self.one() {
            return None;
        }
        // Tonelli–Shanks.
        let mut s = 0;
        let mut t = q - 1;
        while t.is_multiple_of(2) {
            t /= 2;
            s += 1;
        }
        let z = self
            .elements()
            .find(|z| !self.is_zero(z) && self.pow(z, (q - 1) / 2) != self.one())
            .expect("odd field has a non-square");
        let mut m = s;
        let mut cc = self.pow(&z, t);
        let mut tt = self.pow(c, t);
        let mut r = self.pow(c, t.div_ceil(2));
        while tt != self.one() {
            let mut i = 0;
            let mut t2 = tt.clone();
            while t2 != self.one() {
                t2 = self.mul(&t2, &t2);
                i += 1;
            }
            let mut b = cc.clone();
            for _ in 0..(m - i - 1) {
                b = self.mul(&b, &b);
            }
            m = i;
            cc = self.mul(&b, &b);
            tt = self.mul(&tt, &cc);
            r = self.mul(&r, &b);
        }
        Some(r)
    }

    /// Coordinates of a prime-field element; None if e is not in F_p.
    pub fn to_prime(&self, e: &Fq) -> Option<u64> {
        if e[1..].iter().all(|&c| c == 0) {
            Some(e[0])
        } else {
            None
        }
    }

    fn reduce(&self, mut v: Vec<u64>) -> Fq {
        let p = self.0.p;
        let a = self.0.degree;
        let m = &self.0.modulus;
        while v.len() > a {
            let lead = v.pop().unwrap();
            if lead != 0 {
                let off = v.len() - a;
                for i in 0..a {
                    v[off + i] = (v[off + i] + (p - lead) * m[i] % p) % p;
                }
            }
        }
        v.resize(a, 0);
        v
    }
}

impl Ring for FiniteField {
    type Elem = Fq;

    fn zero(&self) -> Fq {
        vec![0; self.0.degree]
    }
    fn one(&self) -> Fq {
        self.from_u64(1)
    }
    fn add(&self, a: &Fq, b: &Fq) -> Fq {
        let p = self.0.p;
        a.iter().zip(b).map(|(x, y)| (x + y) % p).collect()
    }
    fn neg(&self, a: &Fq) -> Fq {
        let p = self.0.p;
        a.iter().map(|&x| (p - x) % p).collect()
    }
    fn sub(&self, a: &Fq, b: &Fq) -> Fq {
        let p = self.0.p;
        a.iter().zip(b).map(|(x, y)| (x + p - y) % p).collect()
    }
    fn mul(&self, a: &Fq, b: &Fq) -> Fq {
        let p = self.0.p;
        let d = self.0.degree;
        if d == 1 {
            return vec![a[0] * b[0] % p];
        }
        let mut prod = vec![0u64; 2 * d - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        self.reduce(prod)
    }
    fn from_int(&self, n: &BigInt) -> Fq {
        self.from_u64(big_to_u64_mod(n, self.0.p))
    }
    fn characteristic(&self) -> u64 {
        self.0.p
    }
    fn discrete_log(&self, a: &Fq) -> Option<Option<u32>> {
        let t = self.log_table()?;
        let i = self.index(a) as usize;
        Some((i != 0).then(|| t.log[i]))
    }
    fn exp_log(&self, l: u32) -> Option<Fq> {
        let t = self.log_table()?;
        Some(t.exp[l as usize % t.exp.len()].clone())
    }
    fn field_order(&self) -> Option<u64> {
        self.0.p.checked_pow(self.0.degree as u32)
    }
    fn is_zero(&self, a: &Fq) -> bool {
        a.iter().all(|&c| c == 0)
    }
}

impl Field for FiniteField {
    fn inv(&self, a: &Fq) -> Option<Fq> {
        if self.is_zero(a) {
            return None;
        }
        if self.0.degree == 1 {
            return Some(vec![inv_mod(a[0], self.0.p)?]);
        }
        Some(self.pow(a, self.order() - 2))
    }
}

fn check_prime(p: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p >= 1 << 31 {
        return Err(Error::InvalidArgument(format!("prime {p} exceeds the supported range")));
    }
    Ok(())
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn modinv_u64(a: u64, m: u64) -> u64 {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    old_s.rem_euclid(m as i128) as u64
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// Dense polynomials over F_p, low-to-high, used only for irreducibility testing.

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    trim(&mut r);
    let dm = m.len() - 1;
    let lead_inv = inv_mod(m[dm], p).expect("nonzero leading coefficient");
    while r.len() > dm {
        let c = r.last().unwrap() * lead_inv % p;
        let off = r.len() - 1 - dm;
        for i in 0..=dm {
            r[off + i] = (r[off + i] + (p - c) * m[i] % p) % p;
        }
        trim(&mut r);
    }
    r
}

fn poly_mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    poly_rem(&prod, m, p)
}

fn poly_powmod(base: &[u64], mut e: u128, m: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = poly_rem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mulmod(&acc, &b, m, p);
        }
        b = poly_mulmod(&b, &b, m, p);
        e >>= 1;
    }
    poly_rem(&acc, m, p)
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

fn poly_sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut out: Vec<u64> = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    trim(&mut out);
    out
}

/// Rabin's test: f of degree a is irreducible iff f | x^{p^a} - x and
/// gcd(x^{p^{a/r}} - x, f) = 1 for each prime r | a.
fn poly_is_irreducible(f: &[u64], p: u64) -> bool {
    let a = f.len() - 1;
    if a == 1 {
        return true;
    }
    if f[0] == 0 {
        return false;
    }
    let x = vec![0u64, 1];
    let frob_iter = |k: usize| {
        let mut acc = x.clone();
        for _ in 0..k {
            acc = poly_powmod(&acc, p as u128, f, p);
        }
        acc
    };
    if !poly_sub(&frob_iter(a), &x, p).is_empty() {
        return false;
    }
    for r in prime_factors(a as u64) {
        let g = poly_gcd(f, &poly_sub(&frob_iter(a / r as usize), &x, p), p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn default_moduli() {
        assert_eq!(FiniteField::new(3, 2).unwrap().modulus(), &[1, 0, 1]);
        assert_eq!(FiniteField::new(2, 2).unwrap().modulus(), &[1, 1, 1]);
        assert_eq!(FiniteField::new(2, 3).unwrap().modulus(), &[1, 1, 0, 1]);
        assert_eq!(FiniteField::new(3, 4).unwrap().modulus(), &[2, 1, 0, 0, 1]);
    }

    #[test]
    fn rejects_reducible_and_nonprime() {
        assert!(matches!(FiniteField::with_modulus(3, vec![2, 0, 1]), Err(Error::Reducible { .. })));
        assert_eq!(FiniteField::new(9, 1).unwrap_err(), Error::NotPrime(9));
    }

    #[test]
    fn field_axioms_small() {
        let f = FiniteField::new(5, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let (a, b, c) = (f.random(&mut rng), f.random(&mut rng), f.random(&mut rng));
            assert_eq!(f.mul(&a, &f.add(&b, &c)), f.add(&f.mul(&a, &b), &f.mul(&a, &c)));
            if !f.is_zero(&a) {
                assert_eq!(f.mul(&a, &f.inv(&a).unwrap()), f.one());
            }
            assert_eq!(f.pow(&a, 25), a);
        }
    }

    #[test]
    fn roots_and_primitive() {
        let f = FiniteField::new(3, 4).unwrap();
        let g = f.primitive_element();
        let mut seen = std::collections::HashSet::new();
        let mut acc = f.one();
        for _ in 0..80 {
            seen.insert(f.index(&acc));
            acc = f.mul(&acc, &g);
        }
        assert_eq!(seen.len(), 80);
        for e in f.elements() {
            let sq = f.mul(&e, &e);
            let r = f.sqrt(&sq).unwrap();
            assert_eq!(f.mul(&r, &r), sq);
            let c = f.pow(&e, 10);
            let y = f.nth_root(&c, 10).unwrap();
            assert_eq!(f.pow(&y, 10), c);
        }
        let index_round_trip = f.elements().all(|e| f.from_index(f.index(&e)) == e);
        assert!(index_round_trip);
    }

    #[test]
    fn characteristic_two_sqrt() {
        let f = FiniteField::new(2, 3).unwrap();
        for e in f.elements() {
            let r = f.sqrt(&e).unwrap();
            assert_eq!(f.mul(&r, &r), e);
        }
    }
}
