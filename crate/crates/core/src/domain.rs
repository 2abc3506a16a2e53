//! The strip `B`, the subsets `W_{>1}` and `W^+` of `W`, the candidate
//! fundamental domain `D = D_1 ∪ D_2`, and sampled tiling checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::fan::{norm, QuotientFan};
use crate::tol;
use crate::units::PhiMatrix;
use crate::words::words;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DomainError {
    #[error("simplex vertices are affinely dependent")]
    DegenerateSimplex,
    #[error("simplex vertex {0:?} has a non-positive coordinate")]
    NonPositiveVertex(Vec<f64>),
    #[error("rank b = 0 has no simplex")]
    RankZero,
}

/// The simplex `conv{c_0, ..., c_b}` in `R^b` with `c_0 = (1, ..., 1)` and
/// `c_i` the `L` profile of the i-th generator, plus the group data needed
/// to move points around.
#[derive(Clone, Debug)]
pub struct DomainSpec {
    s: usize,
    b: usize,
    /// Labeled real profiles of the generators (length `s`).
    gen_profiles: Vec<Vec<f64>>,
    /// Labeled full `eta` profiles (length `s + t`).
    gen_eta: Vec<Vec<f64>>,
    vertices: Vec<Vec<f64>>,
    /// Inverse of the matrix with columns `c_i - c_0`.
    edge_inv: Vec<Vec<f64>>,
    fan: Option<QuotientFan>,
    window: u32,
}

impl DomainSpec {
    pub fn from_fan(fan: &QuotientFan) -> Result<Self, DomainError> {
        let b = fan.b();
        let w = fan.w();
        let gen_profiles: Vec<Vec<f64>> = (0..b).map(|i| w.generator_profile(i)).collect();
        let gen_eta = (0..b)
            .map(|i| {
                let mut e = vec![0; b];
                e[i] = 1;
                w.labeled_eta_profile(&e)
            })
            .collect();
        let mut spec = Self::new(fan.s(), gen_profiles, gen_eta, fan.window())?;
        spec.fan = Some(fan.clone());
        Ok(spec)
    }

    /// A spec from generator profiles alone; `gen_eta` may repeat the real
    /// profiles when there are no complex places to track.
    pub fn new(
        s: usize,
        gen_profiles: Vec<Vec<f64>>,
        gen_eta: Vec<Vec<f64>>,
        window: u32,
    ) -> Result<Self, DomainError> {
        let b = gen_profiles.len();
        if b == 0 {
            return Err(DomainError::RankZero);
        }
        let mut vertices = vec![vec![1.0; b]];
        vertices.extend(gen_profiles.iter().map(|p| p[..b].to_vec()));
        for v in &vertices {
            if v.iter().any(|&x| x <= 0.0) {
                return Err(DomainError::NonPositiveVertex(v.clone()));
            }
        }
        let edges: Vec<Vec<f64>> = (0..b)
            .map(|r| (0..b).map(|c| vertices[c + 1][r] - vertices[0][r]).collect())
            .collect();
        let edge_inv = invert(&edges).ok_or(DomainError::DegenerateSimplex)?;
        Ok(Self {
            s,
            b,
            gen_profiles,
            gen_eta,
            vertices,
            edge_inv,
            fan: None,
            window,
        })
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn fan(&self) -> Option<&QuotientFan> {
        self.fan.as_ref()
    }

    pub fn window(&self) -> u32 {
        self.window
    }

    /// Labeled real profile of a word.
    pub fn profile(&self, exps: &[i64]) -> Vec<f64> {
        (0..self.s)
            .map(|i| {
                self.gen_profiles
                    .iter()
                    .zip(exps)
                    .map(|(p, &e)| p[i].powi(e as i32))
                    .product()
            })
            .collect()
    }

    fn eta_profile(&self, exps: &[i64]) -> Vec<f64> {
        let len = self.gen_eta[0].len();
        (0..len)
            .map(|i| {
                self.gen_eta
                    .iter()
                    .zip(exps)
                    .map(|(p, &e)| p[i].powi(e as i32))
                    .product()
            })
            .collect()
    }

    /// `exps . x` under the diagonal action.
    pub fn act(&self, exps: &[i64], x: &[f64]) -> Vec<f64> {
        x.iter().zip(self.profile(exps)).map(|(a, e)| a * e).collect()
    }

    /// Barycentric coordinates of the `L` part of `x` in the simplex.
    pub fn barycentric(&self, x: &[f64]) -> Vec<f64> {
        let d: Vec<f64> = (0..self.b).map(|i| x[i] - self.vertices[0][i]).collect();
        let mu: Vec<f64> = self
            .edge_inv
            .iter()
            .map(|row| row.iter().zip(&d).map(|(a, b)| a * b).sum())
            .collect();
        let mu0 = 1.0 - mu.iter().sum::<f64>();
        std::iter::once(mu0).chain(mu).collect()
    }

    pub fn in_b_slack(&self, x: &[f64], slack: f64) -> bool {
        self.barycentric(x).iter().all(|&m| m >= -slack)
    }

    /// `B = simplex x R^{s-b}`.
    pub fn in_b(&self, x: &[f64]) -> bool {
        self.in_b_slack(x, tol::MEMBERSHIP)
    }

    /// Membership of the word in `W_{>1}` and `W^+`.
    pub fn classify_w(&self, exps: &[i64]) -> WClass {
        if exps.iter().all(|&e| e == 0) {
            return WClass {
                in_w_gt1: true,
                in_w_plus: true,
            };
        }
        let p = self.profile(exps);
        let in_w_gt1 = p[..self.b].iter().any(|&v| v >= 1.0);
        let logs: Vec<f64> = self.eta_profile(exps).iter().map(|v| v.ln()).collect();
        let in_w_plus = PhiMatrix::from_log_profile(&logs, self.b).has_positive_row();
        WClass {
            in_w_gt1,
            in_w_plus,
        }
    }

    fn in_sigma(&self, x: &[f64], slack: f64) -> bool {
        self.fan
            .as_ref()
            .is_some_and(|f| f.in_support_sigma(x, slack))
    }

    /// Windowed membership in `D`, trying `D_1` first. The witness is the
    /// word `eta` with `eta^{-1} x ∈ |Sigma|` (for `D_1`) or
    /// `eta^{-1} x ∈ B` (for `D_2`).
    pub fn in_d_slack(&self, x: &[f64], slack: f64) -> Option<DMembership> {
        if norm(x) == 0.0 {
            return None;
        }
        let ws = words(self.b, self.window, true);
        if self.in_b_slack(x, slack) {
            for w in &ws {
                if !self.classify_w(w).in_w_plus {
                    continue;
                }
                let inv: Vec<i64> = w.iter().map(|e| -e).collect();
                if self.in_sigma(&self.act(&inv, x), slack) {
                    return Some(DMembership {
                        part: DPart::D1,
                        word: w.clone(),
                    });
                }
            }
        }
        if self.in_sigma(x, slack) {
            for w in &ws {
                if !self.classify_w(w).in_w_gt1 {
                    continue;
                }
                let inv: Vec<i64> = w.iter().map(|e| -e).collect();
                if self.in_b_slack(&self.act(&inv, x), slack) {
                    return Some(DMembership {
                        part: DPart::D2,
                        word: w.clone(),
                    });
                }
            }
        }
        None
    }

    pub fn in_d(&self, x: &[f64]) -> Option<DMembership> {
        self.in_d_slack(x, tol::MEMBERSHIP)
    }

    /// Smallest `L` coordinate over the simplex vertices.
    pub fn lower_bound_c(&self) -> f64 {
        self.vertices
            .iter()
            .flatten()
            .fold(f64::INFINITY, |m, &v| m.min(v))
    }

    /// `max_rays |r|_2 / |r_L|_1` over the cones `eta Sigma`, `eta ∈ W^+`
    /// in the window, times the largest vertex 1-norm. Every point of
    /// `D_1` has norm at most this.
    pub fn r_fit(&self) -> Option<f64> {
        let fan = self.fan.as_ref()?;
        let mut ratio = 0.0f64;
        for w in words(self.b, self.window, true) {
            if !self.classify_w(&w).in_w_plus {
                continue;
            }
            let p = self.profile(&w);
            for c in fan.sigma() {
                for r in c.rays() {
                    let v: Vec<f64> = r.v.iter().zip(&p).map(|(a, e)| a * e).collect();
                    let l1: f64 = v[..self.b].iter().map(|x| x.abs()).sum();
                    ratio = ratio.max(norm(&v) / l1);
                }
            }
        }
        let vmax = self
            .vertices
            .iter()
            .map(|v| v.iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0f64, f64::max);
        Some(ratio * vmax)
    }

    /// Real solution `u` of `sum_i u_i ln(eta_i)_L = ln x_L`.
    fn log_coords(&self, x: &[f64]) -> Option<Vec<f64>> {
        let m: Vec<Vec<f64>> = (0..self.b)
            .map(|r| (0..self.b).map(|c| self.gen_profiles[c][r].ln()).collect())
            .collect();
        let inv = invert(&m)?;
        let lx: Vec<f64> = x[..self.b].iter().map(|v| v.ln()).collect();
        Some(
            inv.iter()
                .map(|row| row.iter().zip(&lx).map(|(a, b)| a * b).sum())
                .collect(),
        )
    }

    /// A word `w` with `w^{-1} x ∈ B`, searched near the real log
    /// coordinates of `x` and then over the window.
    pub fn locate_b(&self, x: &[f64], slack: f64) -> Option<Vec<i64>> {
        let test = |w: &Vec<i64>| {
            let inv: Vec<i64> = w.iter().map(|e| -e).collect();
            self.in_b_slack(&self.act(&inv, x), slack)
        };
        if let Some(u) = self.log_coords(x) {
            let base: Vec<i64> = u.iter().map(|v| v.floor() as i64).collect();
            let span = self.b as u32 + 1;
            for d in words(self.b, span, true) {
                let w: Vec<i64> = base.iter().zip(&d).map(|(a, b)| a + b).collect();
                if test(&w) {
                    return Some(w);
                }
            }
        }
        words(self.b, self.window, true).into_iter().find(test)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct WClass {
    pub in_w_gt1: bool,
    pub in_w_plus: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DPart {
    D1,
    D2,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DMembership {
    pub part: DPart,
    pub word: Vec<i64>,
}

fn invert(m: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let k = m.len();
    let a = nalgebra::DMatrix::from_fn(k, k, |i, j| m[i][j]);
    let inv = a.try_inverse()?;
    if inv.iter().any(|v| !v.is_finite()) {
        return None;
    }
    Some((0..k).map(|i| (0..k).map(|j| inv[(i, j)]).collect()).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TilingReport {
    pub samples: usize,
    pub tiled: usize,
    pub d1: usize,
    pub d2: usize,
    /// Sample points with no witness (first few).
    pub gaps: Vec<Vec<f64>>,
    pub gap_count: usize,
    pub c_lower: f64,
    pub r_fit: f64,
    /// `min |eta(x)|` over sampled `eta ∈ W_{>1}`, `x ∈ B`.
    pub norm_lower_min: f64,
    pub norm_lower_ok: bool,
    /// `D_1` witnesses exceeding `r_fit`.
    pub d1_bound_violations: usize,
    pub window: u32,
    pub seed: u64,
}

impl TilingReport {
    pub fn passed(&self) -> bool {
        self.gap_count == 0 && self.norm_lower_ok && self.d1_bound_violations == 0
    }
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo.ln()..hi.ln()).exp()
}

/// For `n` seeded points of `Omega \ L_+` finds `xi` in the window with
/// `xi(x) ∈ closure(D)`, using the dichotomy between a cone witness and a
/// strip witness and falling back to a window search. Also samples the
/// norm lower bound on `W_{>1} B` and the `D_1` bound.
pub fn tiling_check(spec: &DomainSpec, n: usize, seed: u64) -> Option<TilingReport> {
    let fan = spec.fan.as_ref()?;
    let b = spec.b;
    let c = spec.lower_bound_c();
    let r_fit = spec.r_fit()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let slack = tol::CLOSURE;
    let mut rep = TilingReport {
        samples: n,
        tiled: 0,
        d1: 0,
        d2: 0,
        gaps: Vec::new(),
        gap_count: 0,
        c_lower: c,
        r_fit,
        norm_lower_min: f64::INFINITY,
        norm_lower_ok: true,
        d1_bound_violations: 0,
        window: spec.window,
        seed,
    };
    let orbit = fan.orbit(spec.window);
    let all_words = words(b, spec.window, true);

    for _ in 0..n {
        let x: Vec<f64> = (0..spec.s)
            .map(|i| {
                if i < b {
                    log_uniform(&mut rng, c / 10.0, 10.0 * r_fit)
                } else {
                    let v = log_uniform(&mut rng, 1e-6, 10.0 * r_fit);
                    if rng.gen_bool(0.5) {
                        v
                    } else {
                        -v
                    }
                }
            })
            .collect();

        let mut candidates: Vec<Vec<i64>> = Vec::new();
        let g = orbit
            .iter()
            .find(|(_, _, cone)| cone.contains(&x, slack))
            .map(|(w, _, _)| w.clone());
        let g2 = spec.locate_b(&x, slack);
        if let (Some(g), Some(g2)) = (&g, &g2) {
            let diff: Vec<i64> = g2.iter().zip(g).map(|(a, b)| a - b).collect();
            if spec.classify_w(&diff).in_w_plus {
                candidates.push(g.iter().map(|e| -e).collect());
            }
            let rdiff: Vec<i64> = diff.iter().map(|e| -e).collect();
            if spec.classify_w(&rdiff).in_w_plus {
                candidates.push(g2.iter().map(|e| -e).collect());
            }
        }
        let mut hit = None;
        for xi in candidates.iter().chain(all_words.iter()) {
            let y = spec.act(xi, &x);
            if let Some(m) = spec.in_d_slack(&y, slack) {
                hit = Some((y, m));
                break;
            }
        }
        match hit {
            Some((y, m)) => {
                rep.tiled += 1;
                match m.part {
                    DPart::D1 => {
                        rep.d1 += 1;
                        if norm(&y) > r_fit * (1.0 + 1e-9) {
                            rep.d1_bound_violations += 1;
                        }
                    }
                    DPart::D2 => rep.d2 += 1,
                }
            }
            None => {
                rep.gap_count += 1;
                if rep.gaps.len() < 8 {
                    rep.gaps.push(x);
                }
            }
        }
    }

    let gt1: Vec<&Vec<i64>> = all_words
        .iter()
        .filter(|w| spec.classify_w(w).in_w_gt1)
        .collect();
    for _ in 0..n {
        let mut bary: Vec<f64> = (0..=b).map(|_| rng.gen_range(0.0..1.0)).collect();
        let total: f64 = bary.iter().sum();
        bary.iter_mut().for_each(|v| *v /= total);
        let mut x: Vec<f64> = (0..b)
            .map(|i| (0..=b).map(|k| bary[k] * spec.vertices[k][i]).sum())
            .collect();
        x.extend((b..spec.s).map(|_| rng.gen_range(-10.0..10.0)));
        let w = gt1[rng.gen_range(0..gt1.len())];
        let v = norm(&spec.act(w, &x));
        rep.norm_lower_min = rep.norm_lower_min.min(v);
    }
    rep.norm_lower_ok = rep.norm_lower_min >= c - 1e-9;
    Some(rep)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverageReport {
    pub samples: usize,
    pub covered: usize,
}

impl CoverageReport {
    pub fn passed(&self) -> bool {
        self.covered == self.samples
    }
}

/// Checks that translates of the simplex `B_b` cover `(R_{>0})^b` by
/// sampling the fundamental parallelepiped of the log lattice.
pub fn tiling_of_bb(spec: &DomainSpec, n: usize, seed: u64) -> CoverageReport {
    let b = spec.b;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut covered = 0;
    for _ in 0..n {
        let u: Vec<f64> = (0..b).map(|_| rng.gen_range(0.0..1.0)).collect();
        let x: Vec<f64> = (0..spec.s)
            .map(|i| {
                if i < b {
                    (0..b)
                        .map(|k| u[k] * spec.gen_profiles[k][i].ln())
                        .sum::<f64>()
                        .exp()
                } else {
                    0.0
                }
            })
            .collect();
        if spec.locate_b(&x, tol::MEMBERSHIP).is_some() {
            covered += 1;
        }
    }
    CoverageReport { samples: n, covered }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::build_fan_s2;
    use crate::field::validate_field;
    use crate::poly::IntPoly;
    use crate::units::{check_assumption_c, SubgroupW, UnitElt};

    fn salem_spec(window: u32) -> DomainSpec {
        let f = validate_field(&IntPoly::from_i64(&[1, -1, -1, -1, 1]), None).unwrap();
        let a = UnitElt::new(&f, f.generator()).unwrap();
        let mut w = SubgroupW::new(vec![a], 2);
        check_assumption_c(&mut w, 10).unwrap();
        DomainSpec::from_fan(&build_fan_s2(&f, w, window).unwrap()).unwrap()
    }

    #[test]
    fn strip_membership() {
        let d = salem_spec(16);
        assert!(d.in_b(&[1.2, 7.0]));
        assert!(d.in_b(&[1.0, 0.0]));
        assert!(!d.in_b(&[0.5, 0.0]));
        assert!((d.lower_bound_c() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn w_classes() {
        let d = salem_spec(16);
        let c = d.classify_w(&[1]);
        assert!(c.in_w_gt1 && c.in_w_plus);
        let c = d.classify_w(&[-1]);
        assert!(!c.in_w_gt1 && !c.in_w_plus);
        let c = d.classify_w(&[0]);
        assert!(c.in_w_gt1 && c.in_w_plus);
    }

    #[test]
    fn domain_membership() {
        let d = salem_spec(16);
        let m = d.in_d(&[1.2, 1.2]).unwrap();
        assert_eq!(m, DMembership { part: DPart::D1, word: vec![0] });
        assert!(d.in_d(&[0.5, 0.1]).is_none());
        assert!(d.in_d(&[0.0, 0.0]).is_none());
        assert_eq!(d.locate_b(&[5.0, 0.1], 1e-9), Some(vec![2]));
    }

    #[test]
    fn salem_tiles() {
        let d = salem_spec(64);
        let r = tiling_check(&d, 200, 42).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!((r.r_fit - 2f64.sqrt() * 1.722_083_8).abs() < 1e-6);
        assert!(tiling_of_bb(&d, 200, 1).passed());
    }

    #[test]
    fn degenerate_simplex_rejected() {
        let e = DomainSpec::new(3, vec![vec![2.0, 2.0, 0.25], vec![4.0, 4.0, 1.0 / 16.0]], vec![vec![2.0, 2.0, 0.25], vec![4.0, 4.0, 1.0 / 16.0]], 4);
        assert_eq!(e.unwrap_err(), DomainError::DegenerateSimplex);
    }
}
