//! Galois rings `GR(p^n, a) = (Z/p^n)[x]/(f̃)`, with f̃ the lift of the residue field's
//! modulus. GR(p^n, a) is isomorphic to W_n(F_{p^a}) and is the working coefficient ring
//! for crystals: elements are a residues modulo p^n, which keeps high-precision arithmetic
//! cheap compared to evaluating structure polynomials.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::field::{FiniteField, Fq};
use crate::ring::{big_to_u64_mod, Field, Ring};
use crate::witt::WittVector;

struct Inner {
    field: FiniteField,
    n: u32,
    pn: BigInt,
    /// Low-to-high lifted modulus, monic of degree a.
    modulus: Vec<BigInt>,
    /// σ(x^i) for i < a, where σ(x) is the root of f̃ congruent to x^p.
    sigma_powers: Vec<Vec<BigInt>>,
    /// Teichmüller lifts by field index; each costs about n·log q multiplications.
    teich: Mutex<HashMap<u64, Gr>>,
}

const TEICH_CACHE_MAX: usize = 4096;

/// W_n(F_{p^a}) realized as a Galois ring.
#[derive(Clone)]
pub struct GaloisRing(Arc<Inner>);

/// Element of a Galois ring: a coefficients in [0, p^n).
pub type Gr = Vec<BigInt>;

impl PartialEq for GaloisRing {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.field == other.0.field && self.0.n == other.0.n)
    }
}

impl fmt::Debug for GaloisRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GR({}^{}, {})", self.p(), self.0.n, self.degree())
    }
}

impl GaloisRing {
    pub fn new(field: &FiniteField, n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("precision must be at least 1".into()));
        }
        let p = field.p();
        let pn = BigInt::from(p).pow(n);
        let modulus: Vec<BigInt> = field.modulus().iter().map(|&c| BigInt::from(c)).collect();
        let a = field.degree();
        let mut ring = GaloisRing(Arc::new(Inner {
            field: field.clone(),
            n,
            pn,
            modulus,
            sigma_powers: Vec::new(),
            teich: Mutex::new(HashMap::new()),
        }));
        // Hensel-lift the root x^p of the modulus.
        let mut rho = ring.from_fq(&field.frobenius(&field.generator()));
        let deriv: Vec<BigInt> =
            ring.0.modulus.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i as u64)).collect();
        let mut prec = 1u32;
        while prec < n {
            let f_val = ring.eval_poly(&ring.0.modulus, &rho);
            let d_val = ring.eval_poly(&deriv, &rho);
            let d_inv = ring.unit_inv(&d_val).expect("separable modulus has a unit derivative at its root");
            rho = ring.sub(&rho, &ring.mul(&f_val, &d_inv));
            prec *= 2;
        }
        debug_assert!(ring.is_zero(&ring.eval_poly(&ring.0.modulus, &rho)));
        let mut powers = Vec::with_capacity(a);
        let mut acc = ring.one();
        for _ in 0..a {
            powers.push(acc.clone());
            acc = ring.mul(&acc, &rho);
        }
        Arc::get_mut(&mut ring.0).expect("fresh ring").sigma_powers = powers;
        Ok(ring)
    }

    pub fn field(&self) -> &FiniteField {
        &self.0.field
    }

    pub fn p(&self) -> u64 {
        self.0.field.p()
    }

    pub fn precision(&self) -> u32 {
        self.0.n
    }

    pub fn degree(&self) -> usize {
        self.0.field.degree()
    }

    /// p^n.
    pub fn modulus_pn(&self) -> &BigInt {
        &self.0.pn
    }

    /// The same residue field at another precision.
    pub fn with_precision(&self, n: u32) -> Result<GaloisRing> {
        GaloisRing::new(&self.0.field, n)
    }

    /// Reinterprets an element at another precision of the same residue field (lifting
    /// by the canonical representative, or reducing).
    pub fn convert(&self, target: &GaloisRing, x: &Gr) -> Gr {
        x.iter().map(|c| c.mod_floor(&target.0.pn)).collect()
    }

    fn eval_poly(&self, coeffs: &[BigInt], x: &Gr) -> Gr {
        let mut acc = self.zero();
        for c in coeffs.iter().rev() {
            acc = self.mul(&acc, x);
            acc = self.add(&acc, &self.from_int(c));
        }
        acc
    }

    fn norm(&self, v: Vec<BigInt>) -> Gr {
        v.into_iter().map(|c| c.mod_floor(&self.0.pn)).collect()
    }

    /// The coefficientwise lift of a residue-field element.
    pub fn from_fq(&self, e: &Fq) -> Gr {
        e.iter().map(|&c| BigInt::from(c)).collect()
    }

    /// Reduction modulo p.
    pub fn residue(&self, x: &Gr) -> Fq {
        let p = self.p();
        x.iter().map(|c| big_to_u64_mod(c, p)).collect()
    }

    /// Element with the given coefficients (reduced modulo p^n).
    pub fn from_coeffs(&self, coeffs: &[BigInt]) -> Gr {
        let mut v: Vec<BigInt> = coeffs.to_vec();
        v.resize(self.degree(), BigInt::zero());
        self.norm(v)
    }

    pub fn random<G: rand::Rng + ?Sized>(&self, rng: &mut G) -> Gr {
        let bytes = (self.0.pn.bits() / 8 + 9) as usize;
        (0..self.degree())
            .map(|_| {
                let mut buf = vec![0u8; bytes];
                rng.fill_bytes(&mut buf);
                BigInt::from_bytes_le(num_bigint::Sign::Plus, &buf).mod_floor(&self.0.pn)
            })
            .collect()
    }

    /// p-adic valuation; None for zero (valuation ≥ n).
    pub fn valuation(&self, x: &Gr) -> Option<u32> {
        let p = BigInt::from(self.p());
        x.iter()
            .filter(|c| !c.is_zero())
            .map(|c| {
                let mut v = 0;
                let mut m = c.clone();
                while m.is_multiple_of(&p) {
                    m /= &p;
                    v += 1;
                }
                v
            })
            .min()
    }

    pub fn is_unit(&self, x: &Gr) -> bool {
        self.valuation(x) == Some(0)
    }

    /// Inverse of a unit by Newton iteration from the residue-field inverse.
    pub fn unit_inv(&self, x: &Gr) -> Option<Gr> {
        let r = self.residue(x);
        let inv0 = self.0.field.inv(&r)?;
        let mut y = self.from_fq(&inv0);
        let two = self.from_int(&BigInt::from(2));
        let mut prec = 1u32;
        while prec < self.0.n {
            y = self.mul(&y, &self.sub(&two, &self.mul(x, &y)));
            prec *= 2;
        }
        Some(y)
    }

    /// p^k · x.
    pub fn mul_p_pow(&self, x: &Gr, k: u32) -> Gr {
        let f = BigInt::from(self.p()).pow(k);
        self.norm(x.iter().map(|c| c * &f).collect())
    }

    /// x / p^k, defined when every coefficient is divisible; the result is known modulo p^{n-k}.
    pub fn div_p_pow(&self, x: &Gr, k: u32) -> Option<Gr> {
        let f = BigInt::from(self.p()).pow(k);
        let mut out = Vec::with_capacity(x.len());
        for c in x {
            let (q, r) = c.div_rem(&f);
            if !r.is_zero() {
                return None;
            }
            out.push(q);
        }
        Some(out)
    }

    /// The Witt-vector Frobenius σ.
    pub fn sigma(&self, x: &Gr) -> Gr {
        let mut acc = vec![BigInt::zero(); self.degree()];
        for (c, basis) in x.iter().zip(&self.0.sigma_powers) {
            if c.is_zero() {
                continue;
            }
            for (a, b) in acc.iter_mut().zip(basis) {
                *a += c * b;
            }
        }
        self.norm(acc)
    }

    /// σ^k, with k taken modulo the degree (so negative k gives powers of σ^{-1}).
    pub fn sigma_pow(&self, x: &Gr, k: i64) -> Gr {
        let k = k.rem_euclid(self.degree() as i64);
        let mut out = x.clone();
        for _ in 0..k {
            out = self.sigma(&out);
        }
        out
    }

    /// Matrix of σ as a Z/p^n-linear map in the basis 1, x, ..., x^{a-1}; column i is σ(x^i).
    pub fn sigma_matrix(&self) -> Vec<Vec<BigInt>> {
        let a = self.degree();
        (0..a).map(|r| (0..a).map(|c| self.0.sigma_powers[c][r].clone()).collect()).collect()
    }

    /// Teichmüller lift: the unique (q-1)-th root of unity (or 0) reducing to e.
    pub fn teichmuller(&self, e: &Fq) -> Gr {
        let key = self.0.field.index(e);
        if let Some(t) = self.0.teich.lock().expect("teichmüller cache").get(&key) {
            return t.clone();
        }
        let t = self.teichmuller_uncached(e);
        let mut cache = self.0.teich.lock().expect("teichmüller cache");
        if cache.len() < TEICH_CACHE_MAX {
            cache.insert(key, t.clone());
        }
        t
    }

    fn teichmuller_uncached(&self, e: &Fq) -> Gr {
        let q = BigInt::from(self.0.field.order());
        let exp = q.pow(self.0.n - 1);
        let mut acc = self.one();
        let mut base = self.from_fq(e);
        let bits = exp.bits();
        for i in 0..bits {
            if exp.bit(i) {
                acc = self.mul(&acc, &base);
            }
            if i + 1 < bits {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// (x_0, ..., x_{n-1}) ↦ Σ p^i T(x_i^{p^{-i}}).
    pub fn from_witt(&self, w: &WittVector<FiniteField>) -> Result<Gr> {
        if w.ring() != &self.0.field || w.len() != self.0.n as usize {
            return Err(Error::Mismatch("Witt vector and Galois ring disagree on field or length".into()));
        }
        let mut acc = self.zero();
        for (i, x) in w.coords().iter().enumerate() {
            let root = self.0.field.frobenius_pow(x, -(i as i64));
            acc = self.add(&acc, &self.mul_p_pow(&self.teichmuller(&root), i as u32));
        }
        Ok(acc)
    }

    /// Inverse of [`GaloisRing::from_witt`], digit by digit.
    pub fn to_witt(&self, z: &Gr) -> WittVector<FiniteField> {
        let f = &self.0.field;
        let mut rest = z.clone();
        let mut coords = Vec::with_capacity(self.0.n as usize);
        for i in 0..self.0.n {
            let d = self.residue(&rest);
            coords.push(f.frobenius_pow(&d, i as i64));
            let t = self.teichmuller(&d);
            rest = self.div_p_pow(&self.sub(&rest, &t), 1).expect("digit removal leaves a multiple of p");
        }
        WittVector::new(f.clone(), f.p(), coords).expect("valid Witt vector")
    }

    /// Smallest nonnegative integer representative when x lies in Z/p^n (a constant).
    pub fn as_integer(&self, x: &Gr) -> Option<BigInt> {
        if x[1..].iter().all(|c| c.is_zero()) {
            Some(x[0].clone())
        } else {
            None
        }
    }

    /// Signed display of a coefficient for compact output.
    pub fn coeff_to_i64(&self, c: &BigInt) -> Option<i64> {
        let half = &self.0.pn >> 1;
        let v = if c > &half { c - &self.0.pn } else { c.clone() };
        if v.abs() < BigInt::from(i64::MAX) {
            v.to_i64()
        } else {
            None
        }
    }
}

impl Ring for GaloisRing {
    type Elem = Gr;

    fn zero(&self) -> Gr {
        vec![BigInt::zero(); self.degree()]
    }
    fn one(&self) -> Gr {
        let mut v = self.zero();
        v[0] = BigInt::one();
        v
    }
    fn add(&self, a: &Gr, b: &Gr) -> Gr {
        a.iter()
            .zip(b)
            .map(|(x, y)| {
                let s = x + y;
                if s >= self.0.pn {
                    s - &self.0.pn
                } else {
                    s
                }
            })
            .collect()
    }
    fn neg(&self, a: &Gr) -> Gr {
        a.iter().map(|x| if x.is_zero() { BigInt::zero() } else { &self.0.pn - x }).collect()
    }
    fn sub(&self, a: &Gr, b: &Gr) -> Gr {
        a.iter()
            .zip(b)
            .map(|(x, y)| {
                let s = x - y;
                if s.is_negative() {
                    s + &self.0.pn
                } else {
                    s
                }
            })
            .collect()
    }
    fn mul(&self, a: &Gr, b: &Gr) -> Gr {
        let d = self.degree();
        if d == 1 {
            return vec![(&a[0] * &b[0]) % &self.0.pn];
        }
        let mut prod = vec![BigInt::zero(); 2 * d - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] += x * y;
                }
            }
        }
        // Reduce by the monic modulus from the top.
        let m = &self.0.modulus;
        for k in (d..2 * d - 1).rev() {
            let lead = std::mem::take(&mut prod[k]);
            if lead.is_zero() {
                continue;
            }
            for i in 0..d {
                if !m[i].is_zero() {
                    prod[k - d + i] -= &lead * &m[i];
                }
            }
        }
        prod.truncate(d);
        self.norm(prod)
    }
    fn from_int(&self, n: &BigInt) -> Gr {
        let mut v = self.zero();
        v[0] = n.mod_floor(&self.0.pn);
        v
    }
    /// p^n, saturating at u64::MAX.
    fn characteristic(&self) -> u64 {
        self.0.pn.to_u64().unwrap_or(u64::MAX)
    }
    fn is_zero(&self, a: &Gr) -> bool {
        a.iter().all(|c| c.is_zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sigma_is_ring_automorphism_of_order_a() {
        let f = FiniteField::new(3, 3).unwrap();
        let r = GaloisRing::new(&f, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let (x, y) = (r.random(&mut rng), r.random(&mut rng));
            assert_eq!(r.sigma(&r.mul(&x, &y)), r.mul(&r.sigma(&x), &r.sigma(&y)));
            assert_eq!(r.sigma(&r.add(&x, &y)), r.add(&r.sigma(&x), &r.sigma(&y)));
            assert_eq!(r.sigma_pow(&x, 3), x);
            assert_eq!(r.residue(&r.sigma(&x)), f.frobenius(&r.residue(&x)));
        }
    }

    #[test]
    fn units_and_valuations() {
        let f = FiniteField::new(5, 2).unwrap();
        let r = GaloisRing::new(&f, 6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let x = r.random(&mut rng);
            if let Some(inv) = r.unit_inv(&x) {
                assert_eq!(r.mul(&x, &inv), r.one());
            }
            let y = r.mul_p_pow(&r.one(), 2);
            assert_eq!(r.valuation(&y), Some(2));
        }
    }

    /// Dual route: Witt arithmetic through structure polynomials agrees with the Galois ring.
    #[test]
    fn witt_and_galois_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (p, a, n) in [(2u64, 2usize, 3u32), (3, 2, 3), (5, 1, 3), (3, 1, 4)] {
            let f = FiniteField::new(p, a).unwrap();
            let r = GaloisRing::new(&f, n).unwrap();
            for _ in 0..25 {
                let x = WittVector::random(&f, n as usize, &mut rng);
                let y = WittVector::random(&f, n as usize, &mut rng);
                let gx = r.from_witt(&x).unwrap();
                let gy = r.from_witt(&y).unwrap();
                assert_eq!(r.to_witt(&gx), x);
                assert_eq!(r.from_witt(&x.add(&y).unwrap()).unwrap(), r.add(&gx, &gy));
                assert_eq!(r.from_witt(&x.mul(&y).unwrap()).unwrap(), r.mul(&gx, &gy));
                assert_eq!(r.from_witt(&x.frobenius().unwrap()).unwrap(), r.sigma(&gx));
            }
        }
    }
}
