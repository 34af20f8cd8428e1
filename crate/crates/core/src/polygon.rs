//! Convex piecewise-linear polygons with rational slopes and integral breakpoints.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

/// Segments in strictly increasing slope order, each (slope, multiplicity).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntegralPolygon {
    segments: Vec<(BigRational, u64)>,
}

/// Outcome of a dominance test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dominance {
    pub holds: bool,
    /// First breakpoint abscissa where the upper polygon dips below the lower one.
    pub witness: Option<u64>,
    pub endpoints_equal: bool,
}

pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

impl IntegralPolygon {
    /// Sorts, merges equal slopes, and checks that every breakpoint is integral.
    pub fn from_slopes(pairs: &[(BigRational, u64)]) -> Result<Self> {
        if pairs.iter().any(|(_, m)| *m == 0) {
            return Err(Error::InvalidArgument("segment multiplicities must be positive".into()));
        }
        let mut sorted: Vec<(BigRational, u64)> = pairs.to_vec();
        sorted.sort_by(|a, b| a.0.cmp(&b.0));
        let mut segments: Vec<(BigRational, u64)> = Vec::new();
        for (s, m) in sorted {
            match segments.last_mut() {
                Some((last, mult)) if *last == s => *mult += m,
                _ => segments.push((s, m)),
            }
        }
        let poly = IntegralPolygon { segments };
        let mut y = BigRational::zero();
        let mut x = 0u64;
        for (s, m) in &poly.segments {
            y += s * BigRational::from_integer(BigInt::from(*m));
            x += m;
            if !y.is_integer() {
                return Err(Error::InvalidArgument(format!("breakpoint ({x}, {y}) is not integral")));
            }
        }
        Ok(poly)
    }

    /// Slope i with multiplicity h_i, zero entries skipped.
    pub fn from_hodge_numbers(h: &[u64]) -> Result<Self> {
        if h.iter().sum::<u64>() == 0 {
            return Err(Error::InvalidArgument("Hodge numbers must have positive sum".into()));
        }
        let pairs: Vec<_> = h
            .iter()
            .enumerate()
            .filter(|(_, &m)| m > 0)
            .map(|(i, &m)| (BigRational::from_integer(BigInt::from(i)), m))
            .collect();
        Self::from_slopes(&pairs)
    }

    pub fn segments(&self) -> &[(BigRational, u64)] {
        &self.segments
    }

    pub fn width(&self) -> u64 {
        self.segments.iter().map(|(_, m)| m).sum()
    }

    /// Total rise (an integer by construction).
    pub fn height(&self) -> BigInt {
        self.breakpoints().last().map_or_else(BigInt::zero, |(_, y)| y.clone())
    }

    /// Vertices including the origin.
    pub fn breakpoints(&self) -> Vec<(u64, BigInt)> {
        let mut out = vec![(0, BigInt::zero())];
        let mut x = 0;
        let mut y = BigRational::zero();
        for (s, m) in &self.segments {
            x += m;
            y += s * BigRational::from_integer(BigInt::from(*m));
            out.push((x, y.to_integer()));
        }
        out
    }

    /// Value of the piecewise-linear function at t ∈ [0, width].
    pub fn value_at(&self, t: &BigRational) -> BigRational {
        let mut x = BigRational::zero();
        let mut y = BigRational::zero();
        for (s, m) in &self.segments {
            let w = BigRational::from_integer(BigInt::from(*m));
            if *t <= &x + &w {
                return y + s * (t - x);
            }
            x += &w;
            y += s * w;
        }
        y
    }

    /// True iff every slope is an integer.
    pub fn is_integral_slope(&self) -> bool {
        self.segments.iter().all(|(s, _)| s.is_integer())
    }

    /// Multiset of slopes, one entry per unit of width.
    pub fn slope_list(&self) -> Vec<BigRational> {
        self.segments.iter().flat_map(|(s, m)| std::iter::repeat_n(s.clone(), *m as usize)).collect()
    }
}

/// Tests upper(t) ≥ lower(t) on [0, width], exactly at the union of breakpoints.
pub fn lies_on_or_above(upper: &IntegralPolygon, lower: &IntegralPolygon) -> Result<Dominance> {
    if upper.width() != lower.width() {
        return Err(Error::InvalidArgument(format!(
            "polygon widths differ: {} and {}",
            upper.width(),
            lower.width()
        )));
    }
    let mut xs: Vec<u64> = upper.breakpoints().iter().chain(lower.breakpoints().iter()).map(|(x, _)| *x).collect();
    xs.sort_unstable();
    xs.dedup();
    let witness = xs.into_iter().find(|&x| {
        let t = BigRational::from_integer(BigInt::from(x));
        upper.value_at(&t) < lower.value_at(&t)
    });
    Ok(Dominance { holds: witness.is_none(), witness, endpoints_equal: upper.height() == lower.height() })
}

impl fmt::Display for IntegralPolygon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.segments.iter().map(|(s, m)| format!("({s}, {m})")).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// Rational with a positive denominator from a (numerator, denominator) pair.
pub fn parse_slope(num: &BigInt, den: &BigInt) -> Result<BigRational> {
    if den.is_zero() {
        return Err(Error::Parse("zero denominator in slope".into()));
    }
    let r = BigRational::new(num.clone(), den.clone());
    Ok(if r.denom().is_negative() { BigRational::new(-r.numer(), -r.denom()) } else { r })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(k: i64) -> BigInt {
        BigInt::from(k)
    }

    #[test]
    fn k3_hodge_polygon() {
        let p = IntegralPolygon::from_slopes(&[(rat(0, 1), 1), (rat(1, 1), 20), (rat(2, 1), 1)]).unwrap();
        let bp: Vec<_> = p.breakpoints();
        assert_eq!(bp, vec![(0, int(0)), (1, int(0)), (21, int(20)), (22, int(22))]);
        assert_eq!(p, IntegralPolygon::from_hodge_numbers(&[1, 20, 1]).unwrap());
    }

    #[test]
    fn rejects_half_integral_breakpoint() {
        assert!(IntegralPolygon::from_slopes(&[(rat(1, 2), 1)]).is_err());
        assert!(IntegralPolygon::from_hodge_numbers(&[]).is_err());
    }

    #[test]
    fn merging_and_order() {
        let a = IntegralPolygon::from_slopes(&[(rat(1, 1), 2), (rat(0, 1), 1), (rat(1, 1), 3)]).unwrap();
        assert_eq!(a.segments(), &[(rat(0, 1), 1), (rat(1, 1), 5)]);
    }

    #[test]
    fn dominance_examples() {
        let newton = IntegralPolygon::from_slopes(&[(rat(2, 3), 3)]).unwrap();
        let hodge_n = IntegralPolygon::from_hodge_numbers(&[1, 2]).unwrap();
        let hodge_m = IntegralPolygon::from_hodge_numbers(&[2, 0, 1]).unwrap();
        let d = lies_on_or_above(&newton, &hodge_n).unwrap();
        assert!(d.holds && d.endpoints_equal);
        let d = lies_on_or_above(&hodge_m, &hodge_n).unwrap();
        assert!(!d.holds);
        assert_eq!(d.witness, Some(2));
        assert!(lies_on_or_above(&newton, &IntegralPolygon::from_hodge_numbers(&[2]).unwrap()).is_err());
    }
}
