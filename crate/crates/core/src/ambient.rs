//! The complex frame `B_K` of the lattice `sigma_K(O_K)`, the subspaces
//! `H` and `H~`, and numeric checks of the linear algebra they rely on.
//!
//! Coordinates in `C^n` are taken with respect to `B_K` (the integral
//! basis), so `O_K` is `Z^n` and `W` acts by integer matrices.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::field::NumberField;
use crate::poly::q_to_f64;
use crate::tol;
use crate::units::UnitElt;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AmbientError {
    #[error("field has no complex embeddings, so H is trivial")]
    NoComplexEmbeddings,
    #[error("embedded integral basis has condition number {0:e}")]
    IllConditioned(f64),
    #[error("coordinate {0} is zero")]
    ZeroCoordinate(usize),
    #[error("lattice points {0:?} and {1:?} project within {2:e} of each other")]
    InjectivityViolation(Vec<i64>, Vec<i64>, f64),
    #[error("conjugation check failed for generator {generator}: residual {residual:e}")]
    ConjugationCheckFailed { generator: usize, residual: f64 },
}

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Debug)]
pub struct AmbientFrame {
    s: usize,
    t: usize,
    bk: DMatrix<Complex64>,
    bprime: DMatrix<Complex64>,
    p: DMatrix<Complex64>,
    h: DMatrix<Complex64>,
    condition: f64,
}

/// Builds `B_K`, `B'`, `P = B_K^{-1} B'` and `h_1..h_t` with
/// `B_K h_i = e_{s+t+i}`.
pub fn build_frame(field: &NumberField) -> Result<AmbientFrame, AmbientError> {
    let (s, t) = field.signature();
    if t == 0 {
        return Err(AmbientError::NoComplexEmbeddings);
    }
    let n = s + 2 * t;
    let basis = field.basis();
    let cols: Vec<Vec<Complex64>> = (0..n)
        .map(|j| {
            let p: Vec<f64> = basis.column(j).iter().map(q_to_f64).collect();
            field
                .embedding_table()
                .values()
                .iter()
                .map(|&z| crate::poly::horner(&p, z))
                .collect()
        })
        .collect();
    let bk = DMatrix::from_fn(n, n, |i, j| cols[j][i]);

    let sv = bk.clone().svd(false, false).singular_values;
    let smax = sv.iter().fold(0.0f64, |m, &v| m.max(v));
    let smin = sv.iter().fold(f64::INFINITY, |m, &v| m.min(v));
    let condition = smax / smin;
    if !condition.is_finite() || condition > tol::MAX_CONDITION {
        return Err(AmbientError::IllConditioned(condition));
    }
    let bk_inv = bk
        .clone()
        .try_inverse()
        .ok_or(AmbientError::IllConditioned(f64::INFINITY))?;

    let mut bprime = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..s {
        bprime[(i, i)] = ONE;
    }
    for k in 0..t {
        let (a, b) = (s + k, s + t + k);
        let (c1, c2) = (s + 2 * k, s + 2 * k + 1);
        bprime[(a, c1)] = ONE;
        bprime[(b, c1)] = ONE;
        bprime[(a, c2)] = -I;
        bprime[(b, c2)] = I;
    }
    let p = &bk_inv * &bprime;
    let h = bk_inv.columns(s + t, t).into_owned();
    Ok(AmbientFrame {
        s,
        t,
        bk,
        bprime,
        p,
        h,
        condition,
    })
}

impl AmbientFrame {
    pub fn n(&self) -> usize {
        self.s + 2 * self.t
    }

    pub fn signature(&self) -> (usize, usize) {
        (self.s, self.t)
    }

    pub fn bk(&self) -> &DMatrix<Complex64> {
        &self.bk
    }

    pub fn bprime(&self) -> &DMatrix<Complex64> {
        &self.bprime
    }

    pub fn change_of_basis(&self) -> &DMatrix<Complex64> {
        &self.p
    }

    pub fn condition_number(&self) -> f64 {
        self.condition
    }

    /// `h_k` in `B_K` coordinates.
    pub fn h(&self, k: usize) -> Vec<Complex64> {
        self.h.column(k).iter().copied().collect()
    }

    /// Real spanning vectors `Re h_k, Im h_k` of `H~`.
    pub fn htilde_basis(&self) -> Vec<Vec<f64>> {
        (0..self.t)
            .flat_map(|k| {
                let col = self.h.column(k);
                [
                    col.iter().map(|z| z.re).collect(),
                    col.iter().map(|z| z.im).collect(),
                ]
            })
            .collect()
    }

    /// Largest `|Im|` over the entries of `P_{B_K, B'}`.
    pub fn realness_residual(&self) -> f64 {
        self.p.iter().fold(0.0, |m, z| m.max(z.im.abs()))
    }

    /// Largest `|Im|` among the first `s` columns of `P_{B_K, B'}`.
    pub fn real_columns_residual(&self) -> f64 {
        self.p
            .columns(0, self.s)
            .iter()
            .fold(0.0, |m, z| m.max(z.im.abs()))
    }

    /// `max |B_K h_k - e_{s+t+k}|`.
    pub fn h_residual(&self) -> f64 {
        let r = &self.bk * &self.h;
        let mut worst = 0.0f64;
        for k in 0..self.t {
            for i in 0..self.n() {
                let target = if i == self.s + self.t + k { ONE } else { Complex64::new(0.0, 0.0) };
                worst = worst.max((r[(i, k)] - target).norm());
            }
        }
        worst
    }

    /// `sigma_K` of the element with `B_K` coordinates `x`.
    pub fn embed(&self, x: &[f64]) -> Vec<Complex64> {
        let v = DVector::from_iterator(x.len(), x.iter().map(|&r| Complex64::new(r, 0.0)));
        (&self.bk * v).iter().copied().collect()
    }

    /// Projection along `H`: the first `s + t` embedding values.
    pub fn pi_h(&self, x: &[f64]) -> Vec<Complex64> {
        let e = self.embed(x);
        e[..self.s + self.t].to_vec()
    }

    /// Projection `E -> E/H~ = R^s`: the real embedding values.
    pub fn pi_htilde(&self, x: &[f64]) -> Vec<f64> {
        let e = self.embed(x);
        e[..self.s].iter().map(|z| z.re).collect()
    }

    /// The `t x n` exponent matrix of `iota`: row `k` is `h_k`.
    pub fn iota_params(&self) -> DMatrix<Complex64> {
        self.h.transpose()
    }

    /// `iota(z)_j = exp(2 pi i sum_k h_{k,j} z_k)`.
    pub fn iota(&self, z: &[Complex64]) -> Vec<Complex64> {
        (0..self.n())
            .map(|j| {
                let e: Complex64 = (0..self.t).map(|k| self.h[(j, k)] * z[k]).sum();
                (2.0 * PI * I * e).exp()
            })
            .collect()
    }

    /// Matrix of multiplication by `eta` in `B_K` coordinates, in floats.
    fn action_matrix(field: &NumberField, eta: &UnitElt) -> DMatrix<Complex64> {
        let m = field.mult_matrix(eta.elt());
        let n = m.rows();
        DMatrix::from_fn(n, n, |i, j| Complex64::new(q_to_f64(&m[(i, j)]), 0.0))
    }

    /// Checks `A h_k = sigma_{s+t+k}(eta) h_k` for every generator and the
    /// resulting identity `eta(iota(z)) = iota(sigma(eta) z)` at a sample
    /// point. Returns the worst relative residual.
    pub fn check_conjugation(
        &self,
        field: &NumberField,
        gens: &[UnitElt],
    ) -> Result<f64, AmbientError> {
        let mut worst = 0.0f64;
        for (g, eta) in gens.iter().enumerate() {
            let a = Self::action_matrix(field, eta);
            let mut residual = 0.0f64;
            for k in 0..self.t {
                let h = self.h.column(k).into_owned();
                let lam = eta.sigma()[self.s + self.t + k];
                let r = (&a * &h - &h * lam).norm() / h.norm();
                residual = residual.max(r);
            }
            // multiplicative action on (C^*)^n: x_i -> prod_j x_j^{a_ij}
            let z: Vec<Complex64> = (0..self.t)
                .map(|k| Complex64::new(0.013 * (k + 1) as f64, 0.007))
                .collect();
            let x = self.iota(&z);
            let lhs: Vec<Complex64> = (0..self.n())
                .map(|i| {
                    (0..self.n())
                        .map(|j| x[j].powi(a[(i, j)].re.round() as i32))
                        .product()
                })
                .collect();
            let scaled: Vec<Complex64> = (0..self.t)
                .map(|k| eta.sigma()[self.s + self.t + k] * z[k])
                .collect();
            let rhs = self.iota(&scaled);
            for (l, r) in lhs.iter().zip(&rhs) {
                residual = residual.max((l - r).norm() / r.norm());
            }
            if residual > tol::LINEAR * 1e2 {
                return Err(AmbientError::ConjugationCheckFailed {
                    generator: g,
                    residual,
                });
            }
            worst = worst.max(residual);
        }
        Ok(worst)
    }

    /// Largest off-block entry (relative to the matrix norm) of the action
    /// of `eta` written in `B'`: `s` real scalars then `t` 2x2 blocks.
    pub fn block_structure_residual(&self, field: &NumberField, eta: &UnitElt) -> f64 {
        let a = Self::action_matrix(field, eta);
        let p_inv = self.bprime.clone().try_inverse().expect("B' is invertible") * &self.bk;
        let m = &p_inv * a * &self.p;
        let scale = m.norm().max(1.0);
        let block = |i: usize| if i < self.s { i } else { self.s + (i - self.s) / 2 * 2 };
        let mut worst = 0.0f64;
        for i in 0..self.n() {
            for j in 0..self.n() {
                let z = m[(i, j)];
                worst = worst.max(z.im.abs() / scale);
                if block(i) != block(j) {
                    worst = worst.max(z.norm() / scale);
                }
            }
        }
        worst
    }

    /// `|pi_H~(A x) - diag(sigma_1..sigma_s) pi_H~(x)|` over a few points.
    pub fn quotient_action_residual(&self, field: &NumberField, eta: &UnitElt, seed: u64) -> f64 {
        let a = Self::action_matrix(field, eta);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst = 0.0f64;
        for _ in 0..16 {
            let x: Vec<f64> = (0..self.n()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let xv = DVector::from_iterator(self.n(), x.iter().map(|&r| Complex64::new(r, 0.0)));
            let ax: Vec<f64> = (&a * xv).iter().map(|z| z.re).collect();
            let lhs = self.pi_htilde(&ax);
            let rhs = self.pi_htilde(&x);
            let scale = rhs.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            for i in 0..self.s {
                let r = (lhs[i] - eta.sigma()[i].re * rhs[i]).abs() / (scale * eta.sigma()[i].norm().max(1.0));
                worst = worst.max(r);
            }
        }
        worst
    }

    /// Dimension of the space of real `x` lying in `H`. Zero means `H`
    /// meets the real points trivially.
    pub fn real_points_in_h_dim(&self) -> usize {
        let m = DMatrix::from_fn(self.n(), 2 * self.t, |i, c| {
            let z = self.h[(i, c / 2)];
            if c % 2 == 0 {
                z.im
            } else {
                z.re
            }
        });
        2 * self.t - crate::units::numeric_rank(&m)
    }

    /// Distance of `v` from `span(H~)`, relative to `|v|`.
    pub fn distance_to_htilde(&self, v: &[f64]) -> f64 {
        let basis = self.htilde_basis();
        let a = DMatrix::from_fn(self.n(), basis.len(), |i, j| basis[j][i]);
        let b = DVector::from_column_slice(v);
        let sol = a.clone().svd(true, true).solve(&b, 1e-14).expect("svd solve");
        let r = a * sol - &b;
        r.norm() / b.norm().max(1.0)
    }

    /// Compares a candidate tuple for `h_k` with the computed one. Returns
    /// the best complex scalar `c` with `candidate ~ c h_k` and the relative
    /// residual of that fit.
    pub fn compare_h(&self, k: usize, candidate: &[Complex64]) -> (Complex64, f64) {
        let h = self.h(k);
        let num: Complex64 = h.iter().zip(candidate).map(|(a, b)| a.conj() * b).sum();
        let den: f64 = h.iter().map(|a| a.norm_sqr()).sum();
        let c = num / den;
        let res: f64 = h
            .iter()
            .zip(candidate)
            .map(|(a, b)| (b - c * a).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let scale: f64 = candidate.iter().map(|b| b.norm_sqr()).sum::<f64>().sqrt();
        (c, res / scale)
    }
}

/// `ord(z) = -(1/2 pi) (ln|z_1|, ..., ln|z_n|)`.
pub fn ord_map(z: &[Complex64]) -> Result<Vec<f64>, AmbientError> {
    z.iter()
        .enumerate()
        .map(|(i, w)| {
            if w.norm() == 0.0 {
                Err(AmbientError::ZeroCoordinate(i))
            } else {
                Ok(-w.norm().ln() / (2.0 * PI))
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InjectivityReport {
    pub samples: usize,
    pub min_separation_h: f64,
    pub min_separation_htilde: f64,
}

/// Samples `n` distinct lattice points with coordinates in
/// `[-height, height]` and reports the minimum pairwise distance of their
/// images under `pi_H` and `pi_H~`. Fails if either falls to
/// [`tol::SEPARATION`].
pub fn check_pi_h_injective(
    frame: &AmbientFrame,
    n: usize,
    height: i64,
    seed: u64,
) -> Result<InjectivityReport, AmbientError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = frame.n();
    let mut pts: Vec<Vec<i64>> = Vec::with_capacity(n);
    let mut seen = std::collections::HashSet::new();
    let total = (2 * height + 1).saturating_pow(dim as u32) as usize;
    while pts.len() < n.min(total) {
        let p: Vec<i64> = (0..dim).map(|_| rng.gen_range(-height..=height)).collect();
        if seen.insert(p.clone()) {
            pts.push(p);
        }
    }
    let imgs: Vec<(Vec<Complex64>, Vec<f64>)> = pts
        .iter()
        .map(|p| {
            let x: Vec<f64> = p.iter().map(|&v| v as f64).collect();
            (frame.pi_h(&x), frame.pi_htilde(&x))
        })
        .collect();
    let mut min_h = f64::INFINITY;
    let mut min_ht = f64::INFINITY;
    let mut worst = (0, 0);
    for i in 0..imgs.len() {
        for j in i + 1..imgs.len() {
            let dh: f64 = imgs[i]
                .0
                .iter()
                .zip(&imgs[j].0)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            let dt: f64 = imgs[i]
                .1
                .iter()
                .zip(&imgs[j].1)
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt();
            min_h = min_h.min(dh);
            if dt < min_ht {
                min_ht = dt;
                worst = (i, j);
            }
        }
    }
    let min = min_h.min(min_ht);
    if min <= tol::SEPARATION {
        return Err(AmbientError::InjectivityViolation(
            pts[worst.0].clone(),
            pts[worst.1].clone(),
            min,
        ));
    }
    Ok(InjectivityReport {
        samples: pts.len(),
        min_separation_h: min_h,
        min_separation_htilde: min_ht,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::validate_field;
    use crate::poly::IntPoly;

    fn salem() -> (NumberField, AmbientFrame) {
        let f = validate_field(&IntPoly::from_i64(&[1, -1, -1, -1, 1]), None).unwrap();
        let fr = build_frame(&f).unwrap();
        (f, fr)
    }

    #[test]
    fn frame_invariants() {
        let (f, fr) = salem();
        assert!(fr.h_residual() < 1e-9);
        assert!(fr.realness_residual() < 1e-9);
        assert_eq!(fr.real_points_in_h_dim(), 0);
        let a = UnitElt::new(&f, f.generator()).unwrap();
        assert!(fr.block_structure_residual(&f, &a) < 1e-9);
        assert!(fr.quotient_action_residual(&f, &a, 1) < 1e-9);
        assert!(fr.check_conjugation(&f, &[a]).unwrap() < 1e-9);
    }

    #[test]
    fn h_is_the_known_line() {
        // H is spanned by (-b, b(1 - b), conj(b) - 1, 1) in the power basis,
        // with b the root of P in the upper half plane; the solution of
        // B_K h = e_4 is that tuple divided by P'(conj b)
        let (f, fr) = salem();
        let b = f.sigma(&f.generator())[2];
        let one = Complex64::new(1.0, 0.0);
        let tuple = [-b, b * (one - b), b.conj() - one, one];
        let (c, res) = fr.compare_h(0, &tuple);
        let p = IntPoly::from_i64(&[1, -1, -1, -1, 1]).to_qpoly().derivative();
        assert!(res < 1e-9);
        assert!((c - p.eval_complex(b.conj())).norm() < 1e-9);
    }

    #[test]
    fn totally_real_field_rejected() {
        let f = validate_field(&IntPoly::from_i64(&[-2, 0, 1]), None).unwrap();
        assert_eq!(build_frame(&f).unwrap_err(), AmbientError::NoComplexEmbeddings);
    }

    #[test]
    fn ord_and_iota() {
        let (_, fr) = salem();
        let z0 = fr.iota(&[Complex64::new(0.0, 0.0)]);
        assert!(z0.iter().all(|w| (w - ONE).norm() < 1e-15));
        assert_eq!(ord_map(&z0).unwrap(), vec![0.0; 4]);
        let z = fr.iota(&[ONE]);
        let o = ord_map(&z).unwrap();
        assert!(fr.distance_to_htilde(&o) < 1e-9);
        assert_eq!(
            ord_map(&[ONE, Complex64::new(0.0, 0.0)]).unwrap_err(),
            AmbientError::ZeroCoordinate(1)
        );
    }

    #[test]
    fn injectivity_sample() {
        let (_, fr) = salem();
        let r = check_pi_h_injective(&fr, 200, 20, 7).unwrap();
        assert_eq!(r.samples, 200);
        assert!(r.min_separation_htilde > 1e-6);
    }
}
