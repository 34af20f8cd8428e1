//! Linear algebra over a field: row reduction, rank, kernels, inverses.

use crate::ring::Field;

pub type Mat<E> = Vec<Vec<E>>;

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref<F: Field>(field: &F, m: &mut Mat<F::Elem>) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !field.is_zero(&m[i][c])) else { continue };
        m.swap(r, pr);
        let inv = field.inv(&m[r][c]).expect("nonzero pivot");
        for x in m[r].iter_mut() {
            *x = field.mul(&inv, x);
        }
        for i in 0..rows {
            if i != r && !field.is_zero(&m[i][c]) {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let v = field.sub(&m[i][j], &field.mul(&f, &m[r][j]));
                    m[i][j] = v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(rows);
    pivots
}

pub fn rank<F: Field>(field: &F, m: &Mat<F::Elem>) -> usize {
    let mut w = m.clone();
    rref(field, &mut w).len()
}

/// Nonzero rows of the RREF: a canonical basis of the row space.
pub fn row_space<F: Field>(field: &F, m: &Mat<F::Elem>) -> Mat<F::Elem> {
    let mut w = m.clone();
    let k = rref(field, &mut w).len();
    w.truncate(k);
    w
}

/// Basis of {x : m·x = 0}.
pub fn kernel<F: Field>(field: &F, m: &Mat<F::Elem>, cols: usize) -> Mat<F::Elem> {
    let mut w = m.clone();
    let pivots = rref(field, &mut w);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![field.zero(); cols];
            v[f] = field.one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = field.neg(&w[r][f]);
            }
            v
        })
        .collect()
}

pub fn mat_mul<F: Field>(field: &F, a: &Mat<F::Elem>, b: &Mat<F::Elem>) -> Mat<F::Elem> {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut acc = field.zero();
                    for k in 0..inner {
                        if !field.is_zero(&row[k]) && !field.is_zero(&b[k][j]) {
                            acc = field.add(&acc, &field.mul(&row[k], &b[k][j]));
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub fn mat_vec<F: Field>(field: &F, a: &Mat<F::Elem>, v: &[F::Elem]) -> Vec<F::Elem> {
    a.iter()
        .map(|row| {
            let mut acc = field.zero();
            for (x, y) in row.iter().zip(v) {
                acc = field.add(&acc, &field.mul(x, y));
            }
            acc
        })
        .collect()
}

pub fn transpose<E: Clone>(a: &Mat<E>) -> Mat<E> {
    let cols = a.first().map_or(0, |r| r.len());
    (0..cols).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn identity<F: Field>(field: &F, n: usize) -> Mat<F::Elem> {
    (0..n).map(|i| (0..n).map(|j| if i == j { field.one() } else { field.zero() }).collect()).collect()
}

pub fn inverse<F: Field>(field: &F, a: &Mat<F::Elem>) -> Option<Mat<F::Elem>> {
    let n = a.len();
    let mut aug: Mat<F::Elem> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { field.one() } else { field.zero() }));
            r
        })
        .collect();
    let pivots = rref(field, &mut aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn det<F: Field>(field: &F, a: &Mat<F::Elem>) -> F::Elem {
    let n = a.len();
    let mut w = a.clone();
    let mut acc = field.one();
    for c in 0..n {
        let Some(pr) = (c..n).find(|&i| !field.is_zero(&w[i][c])) else { return field.zero() };
        if pr != c {
            w.swap(pr, c);
            acc = field.neg(&acc);
        }
        acc = field.mul(&acc, &w[c][c]);
        let inv = field.inv(&w[c][c]).expect("nonzero pivot");
        for i in c + 1..n {
            if field.is_zero(&w[i][c]) {
                continue;
            }
            let f = field.mul(&w[i][c], &inv);
            for j in c..n {
                let v = field.sub(&w[i][j], &field.mul(&f, &w[c][j]));
                w[i][j] = v;
            }
        }
    }
    acc
}

/// Some x with a·x = b.
pub fn solve<F: Field>(field: &F, a: &Mat<F::Elem>, b: &[F::Elem]) -> Option<Vec<F::Elem>> {
    let cols = a.first().map_or(0, |r| r.len());
    let mut aug: Mat<F::Elem> = a
        .iter()
        .zip(b)
        .map(|(row, x)| {
            let mut r = row.clone();
            r.push(x.clone());
            r
        })
        .collect();
    let pivots = rref(field, &mut aug);
    if pivots.last() == Some(&cols) {
        return None;
    }
    let mut x = vec![field.zero(); cols];
    for (r, &pc) in pivots.iter().enumerate() {
        x[pc] = aug[r][cols].clone();
    }
    Some(x)
}

/// Bilinear form value xᵀ G y.
pub fn bilinear<F: Field>(field: &F, g: &Mat<F::Elem>, x: &[F::Elem], y: &[F::Elem]) -> F::Elem {
    let gy = mat_vec(field, g, y);
    let mut acc = field.zero();
    for (a, b) in x.iter().zip(&gy) {
        acc = field.add(&acc, &field.mul(a, b));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FiniteField;
    use crate::ring::Ring;

    #[test]
    fn kernel_and_inverse() {
        let f = FiniteField::prime(7).unwrap();
        let e = |v: u64| f.from_u64(v);
        let a = vec![vec![e(1), e(2), e(3)], vec![e(2), e(4), e(6)]];
        let k = kernel(&f, &a, 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(mat_vec(&f, &a, v).iter().all(|x| f.is_zero(x)));
        }
        let b = vec![vec![e(1), e(2)], vec![e(3), e(4)]];
        let bi = inverse(&f, &b).unwrap();
        assert_eq!(mat_mul(&f, &b, &bi), identity(&f, 2));
        assert_eq!(det(&f, &b), e(5));
        let x = solve(&f, &b, &[e(1), e(1)]).unwrap();
        assert_eq!(mat_vec(&f, &b, &x), vec![e(1), e(1)]);
    }
}
