use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::polys::{compiled_structure, structure_polys, StructurePolys};
use crate::error::{Error, Result};
use crate::field::FiniteField;
use crate::ring::{big_to_u64_mod, is_prime, Ring};

/// A truncated Witt vector (x_0, ..., x_{n-1}) over `ring`.
#[derive(Clone, Debug, PartialEq)]
pub struct WittVector<R: Ring> {
    ring: R,
    p: u64,
    coords: Vec<R::Elem>,
}

impl<R: Ring> WittVector<R> {
    pub fn new(ring: R, p: u64, coords: Vec<R::Elem>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if coords.is_empty() {
            return Err(Error::InvalidArgument("Witt vectors need at least one coordinate".into()));
        }
        let c = ring.characteristic();
        if c != 0 && c != p {
            return Err(Error::Mismatch(format!("ring of characteristic {c} cannot carry W_n for p = {p}")));
        }
        Ok(WittVector { ring, p, coords })
    }

    pub fn zero(ring: R, p: u64, n: usize) -> Result<Self> {
        let coords = vec![ring.zero(); n];
        Self::new(ring, p, coords)
    }

    pub fn one(ring: R, p: u64, n: usize) -> Result<Self> {
        Self::teichmuller(ring.clone(), p, n, ring.one())
    }

    /// `[a] = (a, 0, ..., 0)`.
    pub fn teichmuller(ring: R, p: u64, n: usize, a: R::Elem) -> Result<Self> {
        let mut coords = vec![ring.zero(); n];
        if n > 0 {
            coords[0] = a;
        }
        Self::new(ring, p, coords)
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[R::Elem] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| self.ring.is_zero(c))
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.ring != other.ring || self.p != other.p {
            return Err(Error::Mismatch("Witt vectors over different rings".into()));
        }
        if self.len() != other.len() {
            return Err(Error::Mismatch(format!("lengths {} and {}", self.len(), other.len())));
        }
        Ok(())
    }

    fn interleave(&self, other: &Self) -> Vec<R::Elem> {
        self.coords.iter().zip(&other.coords).flat_map(|(a, b)| [a.clone(), b.clone()]).collect()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let polys = structure_polys(self.p, self.len())?;
        self.add_using(other, &polys)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let polys = structure_polys(self.p, self.len())?;
        self.mul_using(other, &polys)
    }

    /// Addition through an explicitly supplied set of structure polynomials.
    pub fn add_using(&self, other: &Self, polys: &StructurePolys) -> Result<Self> {
        self.check_compatible(other)?;
        self.check_polys(polys)?;
        let compiled = compiled_structure(polys, self.ring.characteristic(), self.ring.field_order());
        let coords = compiled.eval_sum(&self.ring, &self.interleave(other));
        Ok(WittVector { ring: self.ring.clone(), p: self.p, coords: coords[..self.len()].to_vec() })
    }

    pub fn mul_using(&self, other: &Self, polys: &StructurePolys) -> Result<Self> {
        self.check_compatible(other)?;
        self.check_polys(polys)?;
        let compiled = compiled_structure(polys, self.ring.characteristic(), self.ring.field_order());
        let coords = compiled.eval_prod(&self.ring, &self.interleave(other));
        Ok(WittVector { ring: self.ring.clone(), p: self.p, coords: coords[..self.len()].to_vec() })
    }

    fn check_polys(&self, polys: &StructurePolys) -> Result<()> {
        if polys.p != self.p || polys.n < self.len() {
            return Err(Error::Mismatch(format!(
                "structure polynomials for (p={}, n={}) cannot act on W_{} with p={}",
                polys.p,
                polys.n,
                self.len(),
                self.p
            )));
        }
        Ok(())
    }

    /// Additive inverse. For odd p it is coordinatewise negation; for p = 2 it is (-1)·x.
    pub fn neg(&self) -> Result<Self> {
        if self.p != 2 {
            let coords = self.coords.iter().map(|c| self.ring.neg(c)).collect();
            return Ok(WittVector { ring: self.ring.clone(), p: self.p, coords });
        }
        let minus_one = Self::from_int(self.ring.clone(), self.p, self.len(), &BigInt::from(-1))?;
        minus_one.mul(self)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg()?)
    }

    fn require_char_p(&self, what: &'static str) -> Result<()> {
        if self.ring.characteristic() != self.p {
            return Err(Error::WrongCharacteristic(self.ring.characteristic(), what));
        }
        Ok(())
    }

    /// σ: coordinatewise p-th power. Requires characteristic p.
    pub fn frobenius(&self) -> Result<Self> {
        self.require_char_p("characteristic p for the Witt Frobenius")?;
        let coords = self.coords.iter().map(|c| self.ring.pow(c, self.p)).collect();
        Ok(WittVector { ring: self.ring.clone(), p: self.p, coords })
    }

    /// V: (x_0, ..., x_{n-1}) ↦ (0, x_0, ..., x_{n-2}). Requires characteristic p.
    pub fn verschiebung(&self) -> Result<Self> {
        self.require_char_p("characteristic p for the Verschiebung")?;
        let mut coords = Vec::with_capacity(self.len());
        coords.push(self.ring.zero());
        coords.extend(self.coords[..self.len() - 1].iter().cloned());
        Ok(WittVector { ring: self.ring.clone(), p: self.p, coords })
    }

    /// Ghost components W_0, ..., W_{n-1}. Requires characteristic 0.
    pub fn ghost(&self) -> Result<Vec<R::Elem>> {
        if self.ring.characteristic() != 0 {
            return Err(Error::WrongCharacteristic(
                self.ring.characteristic(),
                "characteristic 0 (the ghost map is not injective in characteristic p)",
            ));
        }
        let r = &self.ring;
        let out = (0..self.len())
            .map(|m| {
                let mut acc = r.zero();
                for i in 0..=m {
                    let t = r.pow(&self.coords[i], self.p.pow((m - i) as u32));
                    let scale = r.from_int(&BigInt::from(self.p).pow(i as u32));
                    acc = r.add(&acc, &r.mul(&scale, &t));
                }
                acc
            })
            .collect();
        Ok(out)
    }

    /// The image of the integer m. In characteristic p this is the Teichmüller digit
    /// expansion m = Σ p^i ω(d_i), giving coordinates (d_0, d_1, ...); in characteristic 0
    /// it is computed by double-and-add.
    pub fn from_int(ring: R, p: u64, n: usize, m: &BigInt) -> Result<Self> {
        if ring.characteristic() == p {
            let digits = teichmuller_digits(m, p, n);
            let coords = digits.iter().map(|&d| ring.from_int(&BigInt::from(d))).collect();
            return Self::new(ring, p, coords);
        }
        let base = Self::one(ring.clone(), p, n)?;
        let mut acc = Self::zero(ring.clone(), p, n)?;
        let mag = m.abs();
        for bit in (0..mag.bits()).rev() {
            acc = acc.add(&acc)?;
            if mag.bit(bit) {
                acc = acc.add(&base)?;
            }
        }
        if m.is_negative() {
            // Characteristic 0 with any p: negate through the ghost-compatible route.
            if p != 2 {
                acc = acc.neg()?;
            } else {
                // (-1) for p = 2 solves W_k(z) = -1 for every k.
                let minus = minus_one_char0(&ring, n)?;
                acc = minus.mul(&acc)?;
            }
        }
        Ok(acc)
    }

    /// m-fold sum of the unit; the slow reference for [`WittVector::from_int`].
    pub fn from_int_slow(ring: R, p: u64, n: usize, m: u64) -> Result<Self> {
        let one = Self::one(ring.clone(), p, n)?;
        let mut acc = Self::zero(ring, p, n)?;
        for _ in 0..m {
            acc = acc.add(&one)?;
        }
        Ok(acc)
    }
}

fn minus_one_char0<R: Ring>(ring: &R, n: usize) -> Result<WittVector<R>> {
    // Coordinates of -1 in W(Z) for p = 2 are (-1, -1, -1, ...).
    let coords = vec![ring.neg(&ring.one()); n];
    WittVector::new(ring.clone(), 2, coords)
}

/// Teichmüller representative of d ∈ [0, p) modulo p^n: d^{p^{n-1}}.
pub fn teichmuller_mod(d: u64, p: u64, n: usize) -> BigInt {
    let pn = BigInt::from(p).pow(n as u32);
    let e = BigInt::from(p).pow(n.saturating_sub(1) as u32);
    BigInt::from(d).modpow(&e, &pn)
}

/// Digits d_i with m ≡ Σ p^i ω(d_i) (mod p^n).
pub fn teichmuller_digits(m: &BigInt, p: u64, n: usize) -> Vec<u64> {
    let pb = BigInt::from(p);
    let pn = pb.pow(n as u32);
    let mut r = m.mod_floor(&pn);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let d = big_to_u64_mod(&r, p);
        out.push(d);
        r = (r - teichmuller_mod(d, p, n)).mod_floor(&pn);
        debug_assert!(r.is_multiple_of(&pb));
        r /= &pb;
    }
    out
}

impl WittVector<FiniteField> {
    pub fn random<G: rand::Rng + ?Sized>(field: &FiniteField, n: usize, rng: &mut G) -> Self {
        let coords = (0..n).map(|_| field.random(rng)).collect();
        WittVector { ring: field.clone(), p: field.p(), coords }
    }

    /// The isomorphism W_n(F_p) → Z/p^n, x ↦ Σ p^i ω(x_i).
    pub fn to_residue(&self) -> Result<BigInt> {
        if self.ring.degree() != 1 {
            return Err(Error::InvalidArgument(format!(
                "to_residue needs the prime field, got degree {}",
                self.ring.degree()
            )));
        }
        let n = self.len();
        let pn = BigInt::from(self.p).pow(n as u32);
        let mut acc = BigInt::zero();
        let mut scale = BigInt::one();
        for c in &self.coords {
            acc += &scale * teichmuller_mod(c[0], self.p, n);
            scale *= self.p;
        }
        Ok(acc.mod_floor(&pn))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::Integers;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fp(p: u64) -> FiniteField {
        FiniteField::prime(p).unwrap()
    }

    fn wv(f: &FiniteField, c: &[u64]) -> WittVector<FiniteField> {
        WittVector::new(f.clone(), f.p(), c.iter().map(|&x| f.from_u64(x)).collect()).unwrap()
    }

    #[test]
    fn small_examples() {
        let f2 = fp(2);
        assert_eq!(wv(&f2, &[1, 0]).add(&wv(&f2, &[1, 0])).unwrap(), wv(&f2, &[0, 1]));
        let f3 = fp(3);
        assert_eq!(wv(&f3, &[1, 0]).mul(&wv(&f3, &[1, 0])).unwrap(), wv(&f3, &[1, 0]));
        assert_eq!(wv(&f2, &[0, 1]).to_residue().unwrap(), BigInt::from(2));
    }

    #[test]
    fn residue_round_trip_exhaustive() {
        let f = fp(3);
        for m in 0..27u64 {
            let w = WittVector::from_int(f.clone(), 3, 3, &BigInt::from(m)).unwrap();
            assert_eq!(w.to_residue().unwrap(), BigInt::from(m));
            assert_eq!(w, WittVector::from_int_slow(f.clone(), 3, 3, m).unwrap());
        }
    }

    #[test]
    fn negation() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for p in [2u64, 3] {
            let f = FiniteField::new(p, 2).unwrap();
            for _ in 0..20 {
                let x = WittVector::random(&f, 3, &mut rng);
                assert!(x.add(&x.neg().unwrap()).unwrap().is_zero());
            }
        }
        let z = WittVector::from_int(Integers, 2, 3, &BigInt::from(-5)).unwrap();
        assert_eq!(z.ghost().unwrap(), vec![BigInt::from(-5); 3]);
    }

    #[test]
    fn ghost_of_integer_vectors() {
        let x = WittVector::new(Integers, 2, vec![BigInt::from(1), BigInt::from(1)]).unwrap();
        assert_eq!(x.ghost().unwrap(), vec![BigInt::from(1), BigInt::from(3)]);
        assert!(WittVector::zero(fp(3), 3, 2).unwrap().ghost().is_err());
        assert!(x.frobenius().is_err());
    }
}
