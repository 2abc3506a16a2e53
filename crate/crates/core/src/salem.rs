//! Palindromic quartics `X^4 + q1 X^3 + q2 X^2 + q1 X + 1` with
//! `2(q1 - 1) < q2 < -2(q1 + 1)`, whose roots are one real root above 1,
//! its inverse, and a conjugate pair on the unit circle.

use num_complex::Complex64;
use num_integer::Roots;
use serde::Serialize;

use crate::poly::IntPoly;
use crate::roots::durand_kerner;
use crate::tol;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Salem4 {
    pub q1: i64,
    pub q2: i64,
    /// Coefficients, constant term first.
    pub coeffs: [i64; 5],
    /// The root above 1.
    pub large_root: f64,
    /// Whether the polynomial is irreducible over `Q`, i.e. the large root
    /// is a Salem number of degree 4 rather than a quadratic unit.
    pub irreducible: bool,
}

impl Salem4 {
    pub fn poly(&self) -> IntPoly {
        IntPoly::from_i64(&self.coeffs)
    }
}

/// Root-pattern check: roots `tau > 1`, `1/tau`, and two non-real roots
/// with `||z| - 1| < 1e-9`.
pub fn has_salem_pattern(coeffs: &[i64; 5]) -> Option<f64> {
    let f: Vec<f64> = coeffs.iter().map(|&c| c as f64).collect();
    let roots = durand_kerner(&f)?.roots;
    let real = |z: &Complex64| z.im.abs() / (1.0 + z.norm()) < tol::REAL_SPLIT;
    let mut reals: Vec<f64> = roots.iter().filter(|z| real(z)).map(|z| z.re).collect();
    let circle: Vec<&Complex64> = roots.iter().filter(|z| !real(z)).collect();
    if reals.len() != 2 || circle.len() != 2 {
        return None;
    }
    reals.sort_by(f64::total_cmp);
    let (small, large) = (reals[0], reals[1]);
    let on_circle = circle.iter().all(|z| (z.norm() - 1.0).abs() < tol::UNIT_CIRCLE);
    (large > 1.0 && small > 0.0 && small < 1.0 && on_circle).then_some(large)
}

/// A palindromic quartic in the band never vanishes at `±1`, so it factors
/// over `Z` only as `(X^2 + aX + 1)(X^2 + cX + 1)`, i.e. when
/// `q1^2 - 4(q2 - 2)` is a perfect square.
fn irreducible(q1: i64, q2: i64) -> bool {
    let d = q1 * q1 - 4 * (q2 - 2);
    d < 0 || d.sqrt() * d.sqrt() != d
}

/// Every `(q1, q2)` with `q1` in the range and `q2` in the band whose
/// polynomial passes the root-pattern check, ordered by `q1` then `q2`.
pub fn enum_salem4(q1_min: i64, q1_max: i64) -> Vec<Salem4> {
    let mut out = Vec::new();
    for q1 in q1_min..=q1_max {
        for q2 in (2 * (q1 - 1) + 1)..(-2 * (q1 + 1)) {
            let coeffs = [1, q1, q2, q1, 1];
            if let Some(large_root) = has_salem_pattern(&coeffs) {
                out.push(Salem4 {
                    q1,
                    q2,
                    coeffs,
                    large_root,
                    irreducible: irreducible(q1, q2),
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bands() {
        assert!(enum_salem4(0, 0).is_empty());
        let m1: Vec<i64> = enum_salem4(-1, -1).iter().map(|s| s.q2).collect();
        assert_eq!(m1, vec![-3, -2, -1]);
        let m2: Vec<i64> = enum_salem4(-2, -2).iter().map(|s| s.q2).collect();
        assert_eq!(m2, vec![-5, -4, -3, -2, -1, 0, 1]);
    }

    #[test]
    fn smallest_degree_four() {
        let s = enum_salem4(-1, -1).into_iter().find(|s| s.q2 == -1).unwrap();
        assert!((s.large_root - 1.722_083_81).abs() < 1e-8);
        assert!(s.irreducible);
    }

    #[test]
    fn reducible_member_flagged() {
        // (X^2 - 3X + 1)(X^2 + X + 1)
        let s = enum_salem4(-2, -2).into_iter().find(|s| s.q2 == -1).unwrap();
        assert!(!s.irreducible);
    }
}
