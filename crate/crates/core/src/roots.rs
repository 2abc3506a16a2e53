//! Simultaneous (Weierstrass / Durand–Kerner) iteration for all complex
//! roots of a monic real polynomial.

use num_complex::Complex64;

use crate::poly::horner;

pub const MAX_ITERATIONS: usize = 1000;
pub const STEP_TOLERANCE: f64 = 1e-13;

#[derive(Clone, Debug, PartialEq)]
pub struct RootsOutcome {
    pub roots: Vec<Complex64>,
    pub iterations: usize,
}

/// All roots of the monic polynomial with coefficients `coeffs` (constant
/// term first). Initial points sit on the circle of radius
/// `1 + max |coeff|`, rotated off the real axis so conjugate pairs are not
/// started symmetric. Returns `None` when the largest step has not dropped
/// below [`STEP_TOLERANCE`] after [`MAX_ITERATIONS`] sweeps.
pub fn durand_kerner(coeffs: &[f64]) -> Option<RootsOutcome> {
    let n = coeffs.len().checked_sub(1)?;
    if n == 0 {
        return Some(RootsOutcome {
            roots: Vec::new(),
            iterations: 0,
        });
    }
    let lead = coeffs[n];
    let monic: Vec<f64> = coeffs.iter().map(|c| c / lead).collect();
    let radius = 1.0 + monic[..n].iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let offset = std::f64::consts::PI / (2.0 * n as f64) + 0.25;
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + offset;
            Complex64::from_polar(radius, theta)
        })
        .collect();

    for iter in 1..=MAX_ITERATIONS {
        let mut max_step = 0.0f64;
        for k in 0..n {
            let num = horner(&monic, z[k]);
            let den = (0..n)
                .filter(|&j| j != k)
                .fold(Complex64::new(1.0, 0.0), |acc, j| acc * (z[k] - z[j]));
            let step = if den.norm() == 0.0 {
                Complex64::new(1e-8, 1e-8)
            } else {
                num / den
            };
            z[k] -= step;
            max_step = max_step.max(step.norm());
        }
        if max_step < STEP_TOLERANCE {
            return Some(RootsOutcome {
                roots: z,
                iterations: iter,
            });
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_roots() {
        let out = durand_kerner(&[-2.0, 0.0, 1.0]).unwrap();
        let mut re: Vec<f64> = out.roots.iter().map(|z| z.re).collect();
        re.sort_by(f64::total_cmp);
        assert!((re[0] + 2f64.sqrt()).abs() < 1e-12);
        assert!((re[1] - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn salem_quartic_residuals() {
        let c = [1.0, -1.0, -1.0, -1.0, 1.0];
        let out = durand_kerner(&c).unwrap();
        for z in out.roots {
            assert!(horner(&c, z).norm() < 1e-12);
        }
    }
}
