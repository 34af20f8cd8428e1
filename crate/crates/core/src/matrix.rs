//! Dense matrices over a Galois ring W_n(F_q): Smith form by valuation pivoting,
//! division-free characteristic polynomials, and inverses.

use crate::error::{Error, Result};
use crate::field::Fq;
use crate::galois::{GaloisRing, Gr};
use crate::ring::Ring;

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Gr>,
}

/// U·A·V = D with D diagonal, `D[i][i] = p^{d_i}`; `diag` holds d_i (None for a zero pivot).
#[derive(Clone, Debug)]
pub struct Smith {
    pub diag: Vec<Option<u32>>,
    pub u: Option<Matrix>,
    pub v: Option<Matrix>,
}

impl Matrix {
    pub fn zero(ring: &GaloisRing, rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![ring.zero(); rows * cols] }
    }

    pub fn identity(ring: &GaloisRing, n: usize) -> Self {
        let mut m = Self::zero(ring, n, n);
        for i in 0..n {
            m.set(i, i, ring.one());
        }
        m
    }

    pub fn scalar(ring: &GaloisRing, n: usize, c: &Gr) -> Self {
        let mut m = Self::zero(ring, n, n);
        for i in 0..n {
            m.set(i, i, c.clone());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Gr>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidArgument("ragged matrix rows".into()));
        }
        Ok(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    /// Matrix whose entries are the integers `entries` (row-major).
    pub fn from_ints(ring: &GaloisRing, rows: usize, cols: usize, entries: &[i64]) -> Self {
        assert_eq!(entries.len(), rows * cols);
        Matrix { rows, cols, data: entries.iter().map(|&e| ring.from_i64(e)).collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Gr {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Gr) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Gr] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Gr> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Gr>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn from_columns(cols: &[Vec<Gr>]) -> Result<Self> {
        let c = cols.len();
        let r = cols.first().map_or(0, |v| v.len());
        let rows = (0..r).map(|i| (0..c).map(|j| cols[j][i].clone()).collect()).collect();
        Self::from_rows(rows)
    }

    pub fn map(&self, f: impl Fn(&Gr) -> Gr) -> Self {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        Matrix { rows: self.cols, cols: self.rows, data }
    }

    pub fn add(&self, ring: &GaloisRing, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| ring.add(a, b)).collect(),
        }
    }

    pub fn sub(&self, ring: &GaloisRing, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| ring.sub(a, b)).collect(),
        }
    }

    pub fn scale(&self, ring: &GaloisRing, c: &Gr) -> Self {
        self.map(|x| ring.mul(c, x))
    }

    pub fn mul_p_pow(&self, ring: &GaloisRing, k: u32) -> Self {
        self.map(|x| ring.mul_p_pow(x, k))
    }

    pub fn mul(&self, ring: &GaloisRing, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = Self::zero(ring, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if ring.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if ring.is_zero(b) {
                        continue;
                    }
                    let cur = out.get(i, j);
                    let v = ring.add(cur, &ring.mul(a, b));
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, ring: &GaloisRing, v: &[Gr]) -> Vec<Gr> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = ring.zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !ring.is_zero(a) && !ring.is_zero(b) {
                        acc = ring.add(&acc, &ring.mul(a, b));
                    }
                }
                acc
            })
            .collect()
    }

    /// Entrywise σ^k.
    pub fn sigma_pow(&self, ring: &GaloisRing, k: i64) -> Self {
        self.map(|x| ring.sigma_pow(x, k))
    }

    pub fn sigma(&self, ring: &GaloisRing) -> Self {
        self.map(|x| ring.sigma(x))
    }

    pub fn block_diag(ring: &GaloisRing, a: &Self, b: &Self) -> Self {
        let mut out = Self::zero(ring, a.rows + b.rows, a.cols + b.cols);
        for i in 0..a.rows {
            for j in 0..a.cols {
                out.set(i, j, a.get(i, j).clone());
            }
        }
        for i in 0..b.rows {
            for j in 0..b.cols {
                out.set(a.rows + i, a.cols + j, b.get(i, j).clone());
            }
        }
        out
    }

    /// Entries reinterpreted at another precision.
    pub fn convert(&self, from: &GaloisRing, to: &GaloisRing) -> Self {
        self.map(|x| from.convert(to, x))
    }

    pub fn residue(&self, ring: &GaloisRing) -> Vec<Vec<Fq>> {
        (0..self.rows).map(|i| self.row(i).iter().map(|x| ring.residue(x)).collect()).collect()
    }

    pub fn from_residue(ring: &GaloisRing, m: &[Vec<Fq>]) -> Self {
        let rows = m.iter().map(|row| row.iter().map(|x| ring.from_fq(x)).collect()).collect();
        Self::from_rows(rows).expect("rectangular")
    }

    pub fn is_zero(&self, ring: &GaloisRing) -> bool {
        self.data.iter().all(|x| ring.is_zero(x))
    }

    /// Minimal valuation over all entries (None for the zero matrix).
    pub fn min_valuation(&self, ring: &GaloisRing) -> Option<u32> {
        self.data.iter().filter_map(|x| ring.valuation(x)).min()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] -= c · row[src].
    fn row_axpy(&mut self, ring: &GaloisRing, dst: usize, src: usize, c: &Gr) {
        for j in 0..self.cols {
            let s = self.get(src, j);
            if ring.is_zero(s) {
                continue;
            }
            let v = ring.sub(self.get(dst, j), &ring.mul(c, s));
            self.set(dst, j, v);
        }
    }

    /// col[dst] -= c · col[src].
    fn col_axpy(&mut self, ring: &GaloisRing, dst: usize, src: usize, c: &Gr) {
        for i in 0..self.rows {
            let s = self.get(i, src);
            if ring.is_zero(s) {
                continue;
            }
            let v = ring.sub(self.get(i, dst), &ring.mul(c, s));
            self.set(i, dst, v);
        }
    }

    fn scale_row(&mut self, ring: &GaloisRing, i: usize, c: &Gr) {
        for j in 0..self.cols {
            let v = ring.mul(c, self.get(i, j));
            self.set(i, j, v);
        }
    }

    /// Smith form by valuation pivoting. Pivot choice: minimal valuation, then minimal
    /// row, then minimal column.
    pub fn smith(&self, ring: &GaloisRing, want_u: bool, want_v: bool) -> Smith {
        let mut w = self.clone();
        let mut u = want_u.then(|| Matrix::identity(ring, self.rows));
        let mut v = want_v.then(|| Matrix::identity(ring, self.cols));
        let steps = self.rows.min(self.cols);
        let mut diag = vec![None; steps];
        for (k, slot) in diag.iter_mut().enumerate() {
            let mut best: Option<(u32, usize, usize)> = None;
            for i in k..w.rows {
                for j in k..w.cols {
                    if let Some(val) = ring.valuation(w.get(i, j)) {
                        if best.is_none_or(|(bv, _, _)| val < bv) {
                            best = Some((val, i, j));
                        }
                    }
                }
                if best.is_some_and(|(bv, _, _)| bv == 0) {
                    break;
                }
            }
            let Some((val, pi, pj)) = best else { break };
            w.swap_rows(k, pi);
            w.swap_cols(k, pj);
            if let Some(u) = u.as_mut() {
                u.swap_rows(k, pi);
            }
            if let Some(v) = v.as_mut() {
                v.swap_cols(k, pj);
            }
            let unit = ring.div_p_pow(w.get(k, k), val).expect("pivot divisible by its valuation");
            let unit_inv = ring.unit_inv(&unit).expect("pivot unit part is invertible");
            w.scale_row(ring, k, &unit_inv);
            if let Some(u) = u.as_mut() {
                u.scale_row(ring, k, &unit_inv);
            }
            for i in k + 1..w.rows {
                if ring.is_zero(w.get(i, k)) {
                    continue;
                }
                let c = ring.div_p_pow(w.get(i, k), val).expect("pivot has minimal valuation");
                w.row_axpy(ring, i, k, &c);
                if let Some(u) = u.as_mut() {
                    u.row_axpy(ring, i, k, &c);
                }
            }
            for j in k + 1..w.cols {
                if ring.is_zero(w.get(k, j)) {
                    continue;
                }
                let c = ring.div_p_pow(w.get(k, j), val).expect("pivot has minimal valuation");
                w.col_axpy(ring, j, k, &c);
                if let Some(v) = v.as_mut() {
                    v.col_axpy(ring, j, k, &c);
                }
            }
            *slot = Some(val);
        }
        Smith { diag, u, v }
    }

    /// Inverse, if the determinant is a unit.
    pub fn inverse(&self, ring: &GaloisRing) -> Option<Self> {
        assert!(self.is_square());
        let n = self.rows;
        let mut w = self.clone();
        let mut inv = Matrix::identity(ring, n);
        for k in 0..n {
            let pivot = (k..n).find(|&i| ring.is_unit(w.get(i, k)))?;
            w.swap_rows(k, pivot);
            inv.swap_rows(k, pivot);
            let c = ring.unit_inv(w.get(k, k)).expect("unit pivot");
            w.scale_row(ring, k, &c);
            inv.scale_row(ring, k, &c);
            for i in 0..n {
                if i == k || ring.is_zero(w.get(i, k)) {
                    continue;
                }
                let f = w.get(i, k).clone();
                w.row_axpy(ring, i, k, &f);
                inv.row_axpy(ring, i, k, &f);
            }
        }
        Some(inv)
    }

    /// Coefficients [1, c_1, ..., c_r] of det(tI - A) = t^r + c_1 t^{r-1} + ... + c_r,
    /// by Berkowitz's division-free algorithm.
    pub fn charpoly(&self, ring: &GaloisRing) -> Vec<Gr> {
        assert!(self.is_square());
        let n = self.rows;
        let mut poly = vec![ring.one()];
        for k in 0..n {
            // Leading (k+1)×(k+1) block: A_k (k×k), column C, row R, corner a.
            let a = self.get(k, k).clone();
            let col: Vec<Gr> = (0..k).map(|i| self.get(i, k).clone()).collect();
            let row: Vec<Gr> = (0..k).map(|j| self.get(k, j).clone()).collect();
            // t_0 = 1, t_1 = -a, t_{m} = -R A_k^{m-2} C.
            let mut t = Vec::with_capacity(k + 2);
            t.push(ring.one());
            t.push(ring.neg(&a));
            let mut v = col;
            for _ in 0..k {
                let mut dot = ring.zero();
                for (r, x) in row.iter().zip(&v) {
                    dot = ring.add(&dot, &ring.mul(r, x));
                }
                t.push(ring.neg(&dot));
                v = (0..k)
                    .map(|i| {
                        let mut acc = ring.zero();
                        for (j, x) in v.iter().enumerate() {
                            let e = self.get(i, j);
                            if !ring.is_zero(e) && !ring.is_zero(x) {
                                acc = ring.add(&acc, &ring.mul(e, x));
                            }
                        }
                        acc
                    })
                    .collect();
            }
            // new = T · poly with T Toeplitz lower-triangular (k+2)×(k+1).
            let mut next = vec![ring.zero(); k + 2];
            for (i, slot) in next.iter_mut().enumerate() {
                for (j, c) in poly.iter().enumerate() {
                    if i >= j {
                        *slot = ring.add(slot, &ring.mul(&t[i - j], c));
                    }
                }
            }
            poly = next;
        }
        poly
    }

    pub fn det(&self, ring: &GaloisRing) -> Gr {
        let cp = self.charpoly(ring);
        let n = self.rows;
        let last = cp[n].clone();
        if n.is_multiple_of(2) {
            last
        } else {
            ring.neg(&last)
        }
    }
}

/// Integer entries from rows of i64 (convenience for tests and fixtures).
pub fn int_matrix(ring: &GaloisRing, rows: &[&[i64]]) -> Matrix {
    let r = rows.len();
    let c = rows.first().map_or(0, |x| x.len());
    let flat: Vec<i64> = rows.iter().flat_map(|x| x.iter().copied()).collect();
    Matrix::from_ints(ring, r, c, &flat)
}

/// A scalar matrix entry for the constant p^k.
pub fn p_power(ring: &GaloisRing, k: u32) -> Gr {
    ring.mul_p_pow(&ring.one(), k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FiniteField;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gr(p: u64, a: usize, n: u32) -> GaloisRing {
        GaloisRing::new(&FiniteField::new(p, a).unwrap(), n).unwrap()
    }

    fn random_matrix(ring: &GaloisRing, r: usize, c: usize, rng: &mut ChaCha8Rng) -> Matrix {
        let rows = (0..r).map(|_| (0..c).map(|_| ring.random(rng)).collect()).collect();
        Matrix::from_rows(rows).unwrap()
    }

    #[test]
    fn smith_transforms_reproduce_diagonal() {
        let ring = gr(3, 2, 6);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let a = random_matrix(&ring, 4, 5, &mut rng).mul_p_pow(&ring, 1);
            let s = a.smith(&ring, true, true);
            let d = s.u.as_ref().unwrap().mul(&ring, &a).mul(&ring, s.v.as_ref().unwrap());
            for i in 0..4 {
                for j in 0..5 {
                    let expect = if i == j {
                        s.diag[i].map_or(ring.zero(), |k| p_power(&ring, k))
                    } else {
                        ring.zero()
                    };
                    assert_eq!(d.get(i, j), &expect);
                }
            }
            assert!(s.diag.iter().all(|d| d.is_none_or(|k| k >= 1)));
        }
    }

    #[test]
    fn charpoly_matches_cayley_hamilton() {
        let ring = gr(5, 2, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for n in 1..6 {
            let a = random_matrix(&ring, n, n, &mut rng);
            let cp = a.charpoly(&ring);
            let mut acc = Matrix::zero(&ring, n, n);
            for c in &cp {
                acc = acc.mul(&ring, &a).add(&ring, &Matrix::scalar(&ring, n, c));
            }
            assert!(acc.is_zero(&ring));
        }
    }

    #[test]
    fn inverse_and_det() {
        let ring = gr(3, 1, 8);
        let a = int_matrix(&ring, &[&[2, 1], &[1, 1]]);
        let inv = a.inverse(&ring).unwrap();
        assert_eq!(a.mul(&ring, &inv), Matrix::identity(&ring, 2));
        assert_eq!(a.det(&ring), ring.one());
        let b = int_matrix(&ring, &[&[3, 0], &[0, 1]]);
        assert!(b.inverse(&ring).is_none());
        assert_eq!(b.det(&ring), ring.from_i64(3));
    }
}
