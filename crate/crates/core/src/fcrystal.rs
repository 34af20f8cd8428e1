//! F-crystals at finite precision: φ(v) = A·σ(v) on W_n(F_q)^r.
//!
//! Newton slopes come from the linear a-fold composite B = A·σ(A)···σ^{a-1}(A).
//! Since σ^a is the identity on W_n(F_{p^a}), φ^a(v) = B·v, so the slopes of φ are
//! the p-adic valuations of the eigenvalues of B divided by a. Those are read off
//! the lower convex hull of the points (i, v(c_i)) of det(t − B).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;

use crate::error::{Error, Result};
use crate::field::FiniteField;
use crate::galois::{GaloisRing, Gr};
use crate::matrix::{p_power, Matrix};
use crate::polygon::{lies_on_or_above, Dominance, IntegralPolygon};
use crate::ring::Ring;

#[derive(Clone, Debug, PartialEq)]
pub struct FCrystal {
    ring: GaloisRing,
    matrix: Matrix,
}

/// Newton slopes with their multiplicities.
#[derive(Clone, Debug, PartialEq)]
pub struct SlopeDecomposition {
    pub polygon: IntegralPolygon,
    /// Recomputing from the canonical lift at precision 2n gave the same slopes.
    pub certified: bool,
}

impl SlopeDecomposition {
    pub fn slopes(&self) -> &[(BigRational, u64)] {
        self.polygon.segments()
    }
}

/// Solutions of φ(x) ≡ p·x mod p^n.
#[derive(Clone, Debug, PartialEq)]
pub struct TateModuleReport {
    pub rank: usize,
    pub basis: Vec<Vec<Gr>>,
    /// Same rank when the computation is truncated to precision n − 1.
    pub stable: bool,
    /// Precision to which the basis approximates the Tate module of any lift.
    pub reliable_precision: u32,
    pub gram: Option<Vec<Vec<BigInt>>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MazurReport {
    pub newton: SlopeDecomposition,
    pub hodge: Vec<u64>,
    pub dominance: Dominance,
}

impl MazurReport {
    pub fn holds(&self) -> bool {
        self.dominance.holds && self.dominance.endpoints_equal
    }
}

impl FCrystal {
    pub fn new(ring: &GaloisRing, matrix: Matrix) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() == 0 {
            return Err(Error::InvalidArgument("crystal matrix must be square of rank ≥ 1".into()));
        }
        if ring.valuation(&matrix.det(ring)).is_none() {
            return Err(Error::InsufficientPrecision(format!(
                "det(A) vanishes modulo p^{}; φ is not certified injective",
                ring.precision()
            )));
        }
        Ok(FCrystal { ring: ring.clone(), matrix })
    }

    pub fn ring(&self) -> &GaloisRing {
        &self.ring
    }

    pub fn field(&self) -> &FiniteField {
        self.ring.field()
    }

    pub fn precision(&self) -> u32 {
        self.ring.precision()
    }

    pub fn rank(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    /// W_σ⟨T⟩/(T^s − p^r): companion matrix of φ = T· in the basis 1, T, …, T^{s−1}.
    pub fn standard_m(r: u32, s: u32, field: &FiniteField, n: u32) -> Result<Self> {
        if s == 0 || num_integer::gcd(r, s) != 1 {
            return Err(Error::InvalidArgument(format!("need s > 0 and gcd(r, s) = 1, got ({r}, {s})")));
        }
        if n <= r {
            return Err(Error::InsufficientPrecision(format!("precision {n} must exceed r = {r}")));
        }
        let ring = GaloisRing::new(field, n)?;
        let s = s as usize;
        let mut a = Matrix::zero(&ring, s, s);
        for i in 0..s - 1 {
            a.set(i + 1, i, ring.one());
        }
        a.set(0, s - 1, p_power(&ring, r));
        Self::new(&ring, a)
    }

    /// `W[T,U]/(TU − p, T^{s−r} − U^r)` with basis T^0, …, T^{s−r−1}, U, …, U^r and φ = T·.
    pub fn standard_n(r: u32, s: u32, field: &FiniteField, n: u32) -> Result<Self> {
        if r == 0 || r >= s || num_integer::gcd(r, s) != 1 {
            return Err(Error::InvalidArgument(format!("need 0 < r < s with gcd(r, s) = 1, got ({r}, {s})")));
        }
        if n < 2 {
            return Err(Error::InsufficientPrecision("standard N crystals need n ≥ 2".into()));
        }
        let ring = GaloisRing::new(field, n)?;
        let (r, s) = (r as usize, s as usize);
        let t_top = s - r - 1;
        let p = p_power(&ring, 1);
        let mut a = Matrix::zero(&ring, s, s);
        for i in 0..t_top {
            a.set(i + 1, i, ring.one());
        }
        // T·T^{s−r−1} = U^r.
        a.set(s - 1, t_top, ring.one());
        // T·U = p, T·U^j = p·U^{j−1}.
        a.set(0, t_top + 1, p.clone());
        for j in 2..=r {
            a.set(t_top + j - 1, t_top + j, p.clone());
        }
        Self::new(&ring, a)
    }

    pub fn identity(field: &FiniteField, n: u32, rank: usize) -> Result<Self> {
        let ring = GaloisRing::new(field, n)?;
        Self::new(&ring, Matrix::identity(&ring, rank))
    }

    pub fn direct_sum(&self, other: &FCrystal) -> Result<FCrystal> {
        if self.ring != other.ring {
            return Err(Error::Mismatch("direct sum needs the same field and precision".into()));
        }
        Ok(FCrystal { ring: self.ring.clone(), matrix: Matrix::block_diag(&self.ring, &self.matrix, &other.matrix) })
    }

    pub fn twist_by_p(&self, e: u32) -> Result<FCrystal> {
        let m = self.matrix.mul_p_pow(&self.ring, e);
        Self::new(&self.ring, m).map_err(|_| {
            Error::InsufficientPrecision(format!("twisting by p^{e} leaves no valuation room at precision {}", self.precision()))
        })
    }

    /// The same crystal in the basis given by the columns of U: A ↦ U⁻¹·A·σ(U).
    pub fn change_basis(&self, u: &Matrix) -> Result<FCrystal> {
        let inv = u
            .inverse(&self.ring)
            .ok_or_else(|| Error::InvalidArgument("base change matrix is not invertible".into()))?;
        let m = inv.mul(&self.ring, &self.matrix).mul(&self.ring, &u.sigma(&self.ring));
        Self::new(&self.ring, m)
    }

    /// Same matrix entries read in a Galois ring of another precision.
    pub fn with_precision(&self, n: u32) -> Result<FCrystal> {
        let ring = self.ring.with_precision(n)?;
        Self::new(&ring, self.matrix.convert(&self.ring, &ring))
    }

    pub fn apply(&self, v: &[Gr]) -> Vec<Gr> {
        let sv: Vec<Gr> = v.iter().map(|x| self.ring.sigma(x)).collect();
        self.matrix.mul_vec(&self.ring, &sv)
    }

    /// h_i = number of elementary divisors of A of valuation exactly i.
    pub fn hodge_numbers(&self) -> Result<Vec<u64>> {
        let smith = self.matrix.smith(&self.ring, false, false);
        let mut h: Vec<u64> = Vec::new();
        for d in smith.diag {
            let d = d.ok_or_else(|| {
                Error::InsufficientPrecision(format!("an elementary divisor has valuation ≥ {}", self.precision()))
            })? as usize;
            if h.len() <= d {
                h.resize(d + 1, 0);
            }
            h[d] += 1;
        }
        Ok(h)
    }

    pub fn hodge_polygon(&self) -> Result<IntegralPolygon> {
        IntegralPolygon::from_hodge_numbers(&self.hodge_numbers()?)
    }

    /// B = A·σ(A)···σ^{a−1}(A).
    pub fn linearization(&self) -> Matrix {
        let mut b = self.matrix.clone();
        let mut s = self.matrix.clone();
        for _ in 1..self.ring.degree() {
            s = s.sigma(&self.ring);
            b = b.mul(&self.ring, &s);
        }
        b
    }

    /// Newton slopes at the working precision, without the doubling check.
    pub fn newton_polygon_uncertified(&self) -> Result<IntegralPolygon> {
        let b = self.linearization();
        let cp = b.charpoly(&self.ring);
        let vals: Vec<Option<u32>> = cp.iter().map(|c| self.ring.valuation(c)).collect();
        newton_from_valuations(&vals, self.precision(), self.ring.degree() as u64)
    }

    pub fn newton_slopes(&self) -> Result<SlopeDecomposition> {
        let polygon = self.newton_polygon_uncertified()?;
        let certified = match self.with_precision(2 * self.precision()) {
            Ok(lifted) => lifted.newton_polygon_uncertified().is_ok_and(|q| q == polygon),
            Err(_) => false,
        };
        Ok(SlopeDecomposition { polygon, certified })
    }

    /// Solves A·σ(x) ≡ p·x over Z/p^n by writing φ − p as a Z_p-linear map on Z_p^{ra}
    /// and reading the kernel off its Smith form.
    pub fn tate_module(&self) -> Result<TateModuleReport> {
        let ring = &self.ring;
        let a = ring.degree();
        let r = self.rank();
        let n = self.precision();
        let zp = GaloisRing::new(&FiniteField::prime(ring.p())?, n)?;
        let dim = r * a;
        // σ(x^k) for the power basis of W_n(F_q) over Z/p^n.
        let sigma_basis: Vec<Gr> = (0..a)
            .map(|k| {
                let mut e = vec![BigInt::zero(); a];
                e[k] = BigInt::from(1);
                ring.sigma(&e)
            })
            .collect();
        let mut m = Matrix::zero(&zp, dim, dim);
        for j in 0..r {
            for (k, sk) in sigma_basis.iter().enumerate() {
                let col = j * a + k;
                for i in 0..r {
                    let entry = ring.mul(self.matrix.get(i, j), sk);
                    for (l, c) in entry.into_iter().enumerate() {
                        m.set(i * a + l, col, vec![c]);
                    }
                }
                // − p·x^k e_j
                let diag = zp.sub(m.get(col, col), &p_power(&zp, 1));
                m.set(col, col, diag);
            }
        }
        let smith = m.smith(&zp, false, true);
        let v = smith.v.expect("transform requested");
        let kernel: Vec<usize> = (0..dim).filter(|&i| smith.diag[i].is_none()).collect();
        let rank_below = smith.diag.iter().filter(|d| d.is_none_or(|d| d + 1 >= n)).count();
        let max_finite = smith.diag.iter().flatten().copied().max().unwrap_or(0);
        let basis: Vec<Vec<Gr>> = kernel
            .iter()
            .map(|&c| {
                (0..r)
                    .map(|i| ring.from_coeffs(&(0..a).map(|l| v.get(i * a + l, c)[0].clone()).collect::<Vec<_>>()))
                    .collect()
            })
            .collect();
        for x in &basis {
            let lhs = self.apply(x);
            let rhs: Vec<Gr> = x.iter().map(|c| ring.mul_p_pow(c, 1)).collect();
            if lhs != rhs {
                return Err(Error::SelfValidation("Tate basis vector fails φx = px".into()));
            }
        }
        Ok(TateModuleReport {
            rank: basis.len(),
            basis,
            stable: rank_below == kernel.len(),
            reliable_precision: n.saturating_sub(max_finite),
            gram: None,
        })
    }

    pub fn verify_mazur(&self) -> Result<MazurReport> {
        let newton = self.newton_slopes()?;
        let hodge = self.hodge_numbers()?;
        let dominance = lies_on_or_above(&newton.polygon, &IntegralPolygon::from_hodge_numbers(&hodge)?)?;
        let report = MazurReport { newton, hodge, dominance };
        if !report.holds() {
            return Err(Error::InsufficientPrecision(format!(
                "Newton polygon {} fails to dominate Hodge numbers {:?}; precision {} is too small",
                report.newton.polygon,
                report.hodge,
                self.precision()
            )));
        }
        Ok(report)
    }

    /// v_p(det A), equal to the common endpoint height of the Newton and Hodge polygons.
    pub fn det_valuation(&self) -> u32 {
        self.ring.valuation(&self.matrix.det(&self.ring)).expect("det is nonzero by construction")
    }

    /// U·diag(p^{d_i})·V with U, V random invertible and d_i ≤ max_exp.
    pub fn random<G: Rng + ?Sized>(field: &FiniteField, n: u32, rank: usize, max_exp: u32, rng: &mut G) -> Result<Self> {
        let ring = GaloisRing::new(field, n)?;
        let u = random_invertible(&ring, rank, rng);
        let v = random_invertible(&ring, rank, rng);
        let mut d = Matrix::zero(&ring, rank, rank);
        for i in 0..rank {
            d.set(i, i, p_power(&ring, rng.gen_range(0..=max_exp)));
        }
        Self::new(&ring, u.mul(&ring, &d).mul(&ring, &v))
    }
}

pub fn random_invertible<G: Rng + ?Sized>(ring: &GaloisRing, rank: usize, rng: &mut G) -> Matrix {
    loop {
        let rows: Vec<Vec<Gr>> = (0..rank).map(|_| (0..rank).map(|_| ring.random(rng)).collect()).collect();
        let m = Matrix::from_rows(rows).expect("square");
        if ring.is_unit(&m.det(ring)) {
            return m;
        }
    }
}

/// Lower convex hull of (i, v_i) for the coefficients [c_0 = 1, …, c_r] of a characteristic
/// polynomial; `None` marks a coefficient that vanishes modulo p^ceiling. Slopes are divided by a.
pub fn newton_from_valuations(vals: &[Option<u32>], ceiling: u32, a: u64) -> Result<IntegralPolygon> {
    let r = vals.len() - 1;
    if vals[r].is_none() {
        return Err(Error::InsufficientPrecision("the constant coefficient vanishes at this precision".into()));
    }
    let pts: Vec<(i64, i64)> = vals.iter().enumerate().filter_map(|(i, v)| v.map(|v| (i as i64, v as i64))).collect();
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for &pt in &pts {
        while hull.len() >= 2 {
            let (o, q) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (q.0 - o.0) * (pt.1 - o.1) - (q.1 - o.1) * (pt.0 - o.0);
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    // A vanishing coefficient has true valuation ≥ ceiling; it cannot lower the hull only if
    // the hull already sits at or below the ceiling there.
    for (i, v) in vals.iter().enumerate() {
        if v.is_some() {
            continue;
        }
        let i = i as i64;
        let w = hull.windows(2).find(|w| w[0].0 <= i && i <= w[1].0).expect("hull spans [0, r]");
        let (x0, y0, x1, y1) = (w[0].0, w[0].1, w[1].0, w[1].1);
        // hull(i) ≤ ceiling  ⇔  y0·(x1−x0) + (y1−y0)(i−x0) ≤ ceiling·(x1−x0)
        if y0 * (x1 - x0) + (y1 - y0) * (i - x0) > ceiling as i64 * (x1 - x0) {
            return Err(Error::InsufficientPrecision(format!(
                "coefficient {i} of the characteristic polynomial vanishes at precision {ceiling} below the hull"
            )));
        }
    }
    let segs: Vec<(BigRational, u64)> = hull
        .windows(2)
        .map(|w| {
            let run = (w[1].0 - w[0].0) as u64;
            let slope = BigRational::new(BigInt::from(w[1].1 - w[0].1), BigInt::from(run * a));
            (slope, run)
        })
        .collect();
    IntegralPolygon::from_slopes(&segs)
        .map_err(|e| Error::InsufficientPrecision(format!("computed Newton polygon is not a crystal polygon: {e}")))
}

/// A rank-22 crystal with Newton slopes (1 − 1/h, 1, 1 + 1/h) of multiplicities (h, 22 − 2h, h),
/// or slope 1 only for `None`.
pub fn k3_shape_crystal(h: Option<u32>, field: &FiniteField, n: u32) -> Result<FCrystal> {
    let ring = GaloisRing::new(field, n)?;
    let Some(h) = h else {
        return FCrystal::new(&ring, Matrix::scalar(&ring, 22, &p_power(&ring, 1)));
    };
    if !(1..=11).contains(&h) {
        return Err(Error::InvalidArgument(format!("height {h} outside 1..=11")));
    }
    let (low, high) = if h == 1 {
        (FCrystal::standard_m(0, 1, field, n)?, FCrystal::standard_m(2, 1, field, n)?)
    } else {
        (FCrystal::standard_n(h - 1, h, field, n)?, FCrystal::standard_n(1, h, field, n)?.twist_by_p(1)?)
    };
    let mut c = low;
    let middle = 22 - 2 * h as usize;
    if middle > 0 {
        c = c.direct_sum(&FCrystal::new(&ring, Matrix::scalar(&ring, middle, &p_power(&ring, 1)))?)?;
    }
    c.direct_sum(&high)
}

/// Slope data for h = 1, …, 11 followed by the supersingular line.
pub fn k3_newton_shapes() -> Vec<IntegralPolygon> {
    let mut out: Vec<IntegralPolygon> = (1..=11i64)
        .map(|h| {
            let mut segs = vec![
                (BigRational::new((h - 1).into(), h.into()), h as u64),
                (BigRational::new((h + 1).into(), h.into()), h as u64),
            ];
            if h < 11 {
                segs.push((BigRational::from_integer(1.into()), 22 - 2 * h as u64));
            }
            IntegralPolygon::from_slopes(&segs).expect("K3 shapes have integral breakpoints")
        })
        .collect();
    out.push(IntegralPolygon::from_slopes(&[(BigRational::from_integer(1.into()), 22)]).expect("slope 1"));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polygon::rat;

    fn fp(p: u64) -> FiniteField {
        FiniteField::prime(p).unwrap()
    }

    #[test]
    fn standard_objects() {
        let f = fp(3);
        let m = FCrystal::standard_m(2, 3, &f, 8).unwrap();
        assert_eq!(m.hodge_numbers().unwrap(), vec![2, 0, 1]);
        let s = m.newton_slopes().unwrap();
        assert_eq!(s.slopes(), &[(rat(2, 3), 3)]);
        assert!(s.certified);
        let n = FCrystal::standard_n(2, 3, &f, 8).unwrap();
        assert_eq!(n.hodge_numbers().unwrap(), vec![1, 2]);
        assert_eq!(n.newton_slopes().unwrap().slopes(), &[(rat(2, 3), 3)]);
        assert!(FCrystal::standard_n(0, 1, &f, 8).is_err());
        assert!(FCrystal::standard_m(3, 2, &f, 3).is_err());
    }

    #[test]
    fn newton_over_extension() {
        let f = FiniteField::new(3, 2).unwrap();
        let c = FCrystal::standard_m(1, 2, &f, 6).unwrap();
        assert_eq!(c.newton_slopes().unwrap().slopes(), &[(rat(1, 2), 2)]);
    }

    #[test]
    fn tate_small_cases() {
        let f = fp(5);
        let ring = GaloisRing::new(&f, 6).unwrap();
        let c = FCrystal::new(&ring, Matrix::scalar(&ring, 3, &p_power(&ring, 1))).unwrap();
        let t = c.tate_module().unwrap();
        assert_eq!(t.rank, 3);
        assert!(t.stable);
        let u = FCrystal::standard_m(0, 1, &f, 6).unwrap();
        assert_eq!(u.tate_module().unwrap().rank, 0);
    }

    #[test]
    fn k3_shape_slopes() {
        let f = fp(3);
        let c = k3_shape_crystal(Some(2), &f, 30).unwrap();
        let s = c.newton_slopes().unwrap();
        assert_eq!(s.slopes(), &[(rat(1, 2), 2), (rat(1, 1), 18), (rat(3, 2), 2)]);
        assert_eq!(k3_newton_shapes().len(), 12);
    }

    #[test]
    fn hull_flags_unknown_coefficient() {
        // c_1 unknown at ceiling 1 while the hull through (0,0),(2,4) passes 2 at i = 1.
        assert!(newton_from_valuations(&[Some(0), None, Some(4)], 1, 1).is_err());
        assert!(newton_from_valuations(&[Some(0), None, Some(4)], 2, 1).is_ok());
    }
}
