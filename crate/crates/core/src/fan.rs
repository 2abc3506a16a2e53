//! Cones in `R^s = E/H~`, quotient fans `Sigma + W`, and the checks that
//! `W . Sigma` is a free, properly discontinuous fan with the right support.
//!
//! All vectors here are in *labeled* coordinates: positions `0..b` span `L`
//! and the remaining `s - b` positions span `N`, so `Omega = N x L_+` is
//! `{x : x_i > 0 for i < b}`.

use minilp::{ComparisonOp, OptimizationDirection, Problem, Variable};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::field::{FieldElement, NumberField};
use crate::tol;
use crate::units::{SubgroupW, UnitElt};
use crate::words::words;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FanError {
    #[error("expected s = 2 and b = 1, got s = {s}, b = {b}")]
    WrongSignature { s: usize, b: usize },
    #[error("generator profile {0:?} does not expand the L coordinate")]
    GeneratorNotExpanding(Vec<f64>),
    #[error("cone has a zero or non-finite ray")]
    DegenerateRay,
    #[error("ray dimension {got} does not match s = {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("ray {0:?} is not a ray of any cone in the enumerated orbit")]
    RayNotInFan(Vec<f64>),
    #[error("cone collapse failed: fitted growth factor {0} is not above 1")]
    CollapseFailed(f64),
}

/// A ray with an optional exact preimage in `O_K`.
#[derive(Clone, Debug, PartialEq)]
pub struct Ray {
    pub v: Vec<f64>,
    pub tag: Option<FieldElement>,
}

impl Ray {
    pub fn new(v: Vec<f64>) -> Self {
        Self { v, tag: None }
    }

    pub fn tagged(v: Vec<f64>, tag: FieldElement) -> Self {
        Self { v, tag: Some(tag) }
    }

    pub fn unit(&self) -> Vec<f64> {
        normalize(&self.v)
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn normalize(v: &[f64]) -> Vec<f64> {
    let n = norm(v);
    v.iter().map(|x| x / n).collect()
}

/// A polyhedral cone given by generating rays.
#[derive(Clone, Debug, PartialEq)]
pub struct Cone {
    rays: Vec<Ray>,
    units: Vec<Vec<f64>>,
}

impl Cone {
    pub fn new(rays: Vec<Ray>) -> Result<Self, FanError> {
        if rays
            .iter()
            .any(|r| norm(&r.v) == 0.0 || r.v.iter().any(|x| !x.is_finite()))
        {
            return Err(FanError::DegenerateRay);
        }
        if let Some(first) = rays.first() {
            if let Some(bad) = rays.iter().find(|r| r.v.len() != first.v.len()) {
                return Err(FanError::Dimension {
                    expected: first.v.len(),
                    got: bad.v.len(),
                });
            }
        }
        let units = rays.iter().map(Ray::unit).collect();
        Ok(Self { rays, units })
    }

    pub fn rays(&self) -> &[Ray] {
        &self.rays
    }

    pub fn unit_rays(&self) -> &[Vec<f64>] {
        &self.units
    }

    pub fn dim(&self) -> usize {
        self.rays.len()
    }

    /// Unit rays sorted lexicographically: the cone's identity.
    pub fn key(&self) -> Vec<Vec<f64>> {
        let mut k = self.units.clone();
        k.sort_by(|a, b| {
            a.iter()
                .zip(b)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        k
    }

    pub fn same_as(&self, other: &Cone) -> bool {
        let (a, b) = (self.key(), other.key());
        a.len() == b.len()
            && a.iter().zip(&b).all(|(x, y)| {
                x.iter().zip(y).all(|(p, q)| (p - q).abs() < tol::MEMBERSHIP)
            })
    }

    /// Coefficients `lambda` with `x = sum lambda_i u_i` over the unit rays,
    /// if `x` lies in the cone up to `slack` (relative to `|x|`). Solved by
    /// least squares; meant for cones with independent rays.
    pub fn coefficients(&self, x: &[f64], slack: f64) -> Option<Vec<f64>> {
        let g: Vec<Vec<f64>> = self
            .units
            .iter()
            .map(|ui| {
                let mut row: Vec<f64> = self.units.iter().map(|uj| dot(ui, uj)).collect();
                row.push(dot(ui, x));
                row
            })
            .collect();
        let lam = solve_dense(g)?;
        let scale = norm(x).max(f64::MIN_POSITIVE);
        let mut r = x.to_vec();
        for (l, u) in lam.iter().zip(&self.units) {
            for (ri, ui) in r.iter_mut().zip(u) {
                *ri -= l * ui;
            }
        }
        if norm(&r) > slack * scale || lam.iter().any(|&l| l < -slack * scale) {
            return None;
        }
        Some(lam)
    }

    pub fn contains(&self, x: &[f64], slack: f64) -> bool {
        self.coefficients(x, slack).is_some()
    }

    /// Whether `x` lies in the relative interior (all coefficients clear
    /// of zero).
    pub fn contains_relint(&self, x: &[f64], slack: f64) -> bool {
        let scale = norm(x);
        self.coefficients(x, slack)
            .is_some_and(|lam| lam.iter().all(|&l| l > slack * scale))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gaussian elimination with partial pivoting on an augmented `k x (k+1)`
/// system.
fn solve_dense(mut a: Vec<Vec<f64>>) -> Option<Vec<f64>> {
    let k = a.len();
    for c in 0..k {
        let p = (c..k).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c].abs() < 1e-14 {
            return None;
        }
        a.swap(c, p);
        for r in 0..k {
            if r != c {
                let f = a[r][c] / a[c][c];
                let pivot = a[c].clone();
                for (v, pv) in a[r].iter_mut().zip(&pivot).skip(c) {
                    *v -= f * pv;
                }
            }
        }
    }
    Some((0..k).map(|i| a[i][k] / a[i][i]).collect())
}

/// Diagonal action of a labeled real profile on a cone. Tags are dropped.
pub fn act_profile(profile: &[f64], c: &Cone) -> Cone {
    let rays = c
        .rays
        .iter()
        .map(|r| Ray::new(r.v.iter().zip(profile).map(|(x, e)| x * e).collect()))
        .collect();
    Cone::new(rays).expect("diagonal action by nonzero scalars keeps rays nonzero")
}

/// `eta . c`: rays scaled by the labeled real profile of `eta`, tags
/// multiplied exactly in the field.
pub fn act(field: &NumberField, eta: &UnitElt, labeled_profile: &[f64], c: &Cone) -> Cone {
    let rays = c
        .rays
        .iter()
        .map(|r| Ray {
            v: r.v.iter().zip(labeled_profile).map(|(x, e)| x * e).collect(),
            tag: r.tag.as_ref().map(|t| field.mul(eta.elt(), t)),
        })
        .collect();
    Cone::new(rays).expect("diagonal action by nonzero scalars keeps rays nonzero")
}

/// `Omega = N x L_+` in labeled coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OmegaCone {
    pub s: usize,
    /// Dimension of `L`; `N` has dimension `h = s - b`.
    pub b: usize,
}

impl OmegaCone {
    pub fn h(&self) -> usize {
        self.s - self.b
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x[..self.b].iter().all(|&v| v > 0.0)
    }

    /// Points of `L_+`: positive `L` part and `N` part within `slack`
    /// relative to `|x|`.
    pub fn in_l_plus(&self, x: &[f64], slack: f64) -> bool {
        let n = norm(x);
        self.contains(x) && x[self.b..].iter().all(|v| v.abs() <= slack * n)
    }
}

/// A finite cone set `Sigma` whose `W`-orbit presents an infinite fan.
#[derive(Clone, Debug)]
pub struct QuotientFan {
    sigma: Vec<Cone>,
    w: SubgroupW,
    omega: OmegaCone,
    window: u32,
}

impl QuotientFan {
    pub fn new(sigma: Vec<Cone>, w: SubgroupW, s: usize, window: u32) -> Result<Self, FanError> {
        for c in &sigma {
            for r in c.rays() {
                if r.v.len() != s {
                    return Err(FanError::Dimension {
                        expected: s,
                        got: r.v.len(),
                    });
                }
            }
        }
        let b = w.b();
        Ok(Self {
            sigma,
            w,
            omega: OmegaCone { s, b },
            window,
        })
    }

    pub fn sigma(&self) -> &[Cone] {
        &self.sigma
    }

    pub fn w(&self) -> &SubgroupW {
        &self.w
    }

    pub fn omega(&self) -> OmegaCone {
        self.omega
    }

    pub fn window(&self) -> u32 {
        self.window
    }

    pub fn with_window(mut self, window: u32) -> Self {
        self.window = window;
        self
    }

    pub fn s(&self) -> usize {
        self.omega.s
    }

    pub fn b(&self) -> usize {
        self.omega.b
    }

    /// Labeled real profile of the word `exps`.
    pub fn profile(&self, exps: &[i64]) -> Vec<f64> {
        self.w.labeled_profile(exps)
    }

    /// All `(word, index into Sigma, cone)` with exponents in
    /// `[-window, window]^b`, identity first.
    pub fn orbit(&self, window: u32) -> Vec<(Vec<i64>, usize, Cone)> {
        let mut out = Vec::new();
        for wd in words(self.b(), window, true) {
            let p = self.profile(&wd);
            for (i, c) in self.sigma.iter().enumerate() {
                out.push((wd.clone(), i, act_profile(&p, c)));
            }
        }
        out
    }

    /// Orbit cones containing `x`.
    pub fn locate(&self, x: &[f64], slack: f64) -> Vec<(Vec<i64>, usize)> {
        self.orbit(self.window)
            .into_iter()
            .filter(|(_, _, c)| c.contains(x, slack))
            .map(|(w, i, _)| (w, i))
            .collect()
    }

    /// Whether `x` lies in `|Sigma|`.
    pub fn in_support_sigma(&self, x: &[f64], slack: f64) -> bool {
        self.sigma.iter().any(|c| c.contains(x, slack))
    }
}

/// `Sigma = {cone{(1,1), eta}, cone{(1,-1), (eta_L, -eta_N)}}` for a rank
/// one `W` in a field with two real embeddings. The generator is inverted
/// if needed so that `eta_L > eta_N`.
pub fn build_fan_s2(
    field: &NumberField,
    mut w: SubgroupW,
    window: u32,
) -> Result<QuotientFan, FanError> {
    let (s, _) = field.signature();
    if s != 2 || w.b() != 1 {
        return Err(FanError::WrongSignature { s, b: w.b() });
    }
    let mut p = w.generator_profile(0);
    if p[0] < p[1] {
        w.invert_generator(0, field);
        p = w.generator_profile(0);
    }
    if p[0] <= 1.0 {
        return Err(FanError::GeneratorNotExpanding(p));
    }
    let eta = w.generators()[0].clone();
    let one = field.one();
    let anti = antidiagonal_tag(field, w.labeling().perm());
    let r11 = Ray::tagged(vec![1.0, 1.0], one);
    let reta = Ray::tagged(p.clone(), eta.elt().clone());
    let r1m = Ray {
        v: vec![1.0, -1.0],
        tag: anti.clone(),
    };
    let retam = Ray {
        v: vec![p[0], -p[1]],
        tag: anti.map(|t| field.mul(eta.elt(), &t)),
    };
    let sigma = vec![Cone::new(vec![r11, reta])?, Cone::new(vec![r1m, retam])?];
    QuotientFan::new(sigma, w, 2, window)
}

/// A small element `x` of `O_K` whose labeled real embeddings are
/// proportional to `(1, -1)` with a positive factor, if one exists with
/// coordinates in `[-2, 2]`.
pub fn antidiagonal_tag(field: &NumberField, perm: &[usize]) -> Option<FieldElement> {
    let n = field.degree();
    for wd in words(n, 2, false) {
        let x = FieldElement::from_i64(&wd);
        let sig = field.sigma(&x);
        let (a, b) = (sig[perm[0]].re, sig[perm[1]].re);
        if a > 0.0 && (a + b).abs() < tol::LINEAR * a.abs().max(1.0) {
            return Some(x);
        }
    }
    None
}

fn lp_var_sum(vars: &[Variable]) -> Vec<(Variable, f64)> {
    vars.iter().map(|&v| (v, 1.0)).collect()
}

/// Largest value of `sum_{i in free} lambda_i` over points
/// `sum lambda_i a_i = sum mu_j b_j` with `sum lambda <= 1`, `sum mu <= 1`,
/// `lambda, mu >= 0`.
fn intersection_lp(a: &[Vec<f64>], b: &[Vec<f64>], free: &[usize]) -> f64 {
    let mut pb = Problem::new(OptimizationDirection::Maximize);
    let lam: Vec<Variable> = (0..a.len())
        .map(|i| pb.add_var(if free.contains(&i) { 1.0 } else { 0.0 }, (0.0, f64::INFINITY)))
        .collect();
    let mu: Vec<Variable> = (0..b.len()).map(|_| pb.add_var(0.0, (0.0, f64::INFINITY))).collect();
    let dim = a.first().or(b.first()).map_or(0, Vec::len);
    for d in 0..dim {
        let mut row: Vec<(Variable, f64)> = lam.iter().zip(a).map(|(&v, r)| (v, r[d])).collect();
        row.extend(mu.iter().zip(b).map(|(&v, r)| (v, -r[d])));
        pb.add_constraint(row.as_slice(), ComparisonOp::Eq, 0.0);
    }
    pb.add_constraint(lp_var_sum(&lam).as_slice(), ComparisonOp::Le, 1.0);
    pb.add_constraint(lp_var_sum(&mu).as_slice(), ComparisonOp::Le, 1.0);
    pb.solve().map_or(0.0, |sol| sol.objective())
}

const LP_EPS: f64 = 1e-7;

/// Whether two cones meet outside the origin.
pub fn intersects(c1: &Cone, c2: &Cone) -> bool {
    let all: Vec<usize> = (0..c1.dim()).collect();
    intersection_lp(c1.unit_rays(), c2.unit_rays(), &all) > LP_EPS
}

/// Whether `c1 ∩ c2` is a face of both (simplicial cones).
pub fn meets_in_common_face(c1: &Cone, c2: &Cone) -> bool {
    let outside = |a: &Cone, b: &Cone| -> Vec<usize> {
        (0..a.dim())
            .filter(|&i| !b.contains(&a.unit_rays()[i], tol::MEMBERSHIP * 10.0))
            .collect()
    };
    let f1 = outside(c1, c2);
    let f2 = outside(c2, c1);
    intersection_lp(c1.unit_rays(), c2.unit_rays(), &f1) <= LP_EPS
        && intersection_lp(c2.unit_rays(), c1.unit_rays(), &f2) <= LP_EPS
}

/// Whether `c` meets `L` outside the origin.
fn meets_l(c: &Cone, omega: OmegaCone) -> bool {
    let mut l_rays: Vec<Vec<f64>> = Vec::new();
    for i in 0..omega.b {
        for sign in [1.0, -1.0] {
            let mut e = vec![0.0; omega.s];
            e[i] = sign;
            l_rays.push(e);
        }
    }
    let all: Vec<usize> = (0..c.dim()).collect();
    intersection_lp(c.unit_rays(), &l_rays, &all) > LP_EPS
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ActionReport {
    pub free: bool,
    pub properly_discontinuous: bool,
    pub invariant: bool,
    /// Pairwise intersections in the window are common faces.
    pub fan_property: bool,
    /// Distinct cones of Sigma lie in distinct orbits.
    pub representatives_distinct: bool,
    /// Words `g` with `g sigma ∩ sigma'` nonzero for some `sigma, sigma'`.
    pub overlap_words: Vec<Vec<i64>>,
    pub orbit_consistency: f64,
    pub window: u32,
    pub witnesses: Vec<String>,
}

/// Freeness, proper discontinuity and invariance of the action over the
/// fan's window. Pairs of orbit cones are reduced to pairs
/// `(sigma, g sigma')` by equivariance.
pub fn check_action(fan: &QuotientFan) -> ActionReport {
    let b = fan.b();
    let window = fan.window();
    let omega = fan.omega();
    let mut witnesses = Vec::new();
    let mut free = true;
    let mut distinct = true;
    let mut fan_property = true;
    let mut overlap_words: Vec<Vec<i64>> = Vec::new();
    let mut support_ok = true;

    for (i, c) in fan.sigma().iter().enumerate() {
        for r in c.unit_rays() {
            if !omega.contains(r) && r[..b].iter().any(|&v| v < -tol::MEMBERSHIP) {
                support_ok = false;
                witnesses.push(format!("ray {r:?} of cone {i} leaves Omega"));
            }
        }
        if b > 0 && meets_l(c, omega) {
            support_ok = false;
            witnesses.push(format!("cone {i} meets L_+"));
        }
    }

    let trivial = fan.w().generators().iter().all(UnitElt::is_one);
    for wd in words(b, window, true) {
        let p = fan.profile(&wd);
        let nontrivial = wd.iter().any(|&e| e != 0) && !trivial;
        for (j, c2) in fan.sigma().iter().enumerate() {
            let g = act_profile(&p, c2);
            for (i, c1) in fan.sigma().iter().enumerate() {
                if nontrivial && c1.same_as(&g) {
                    if i == j {
                        free = false;
                        witnesses.push(format!("word {wd:?} fixes cone {i}"));
                    } else {
                        distinct = false;
                        witnesses.push(format!("cones {i} and {j} share an orbit"));
                    }
                }
                if (nontrivial || i != j) && intersects(c1, &g) {
                    if !overlap_words.contains(&wd) {
                        overlap_words.push(wd.clone());
                    }
                    if !meets_in_common_face(c1, &g) {
                        fan_property = false;
                        witnesses.push(format!(
                            "cone {i} and {wd:?}.cone {j} overlap outside a common face"
                        ));
                    }
                }
            }
        }
    }
    let reach = overlap_words
        .iter()
        .flat_map(|w| w.iter().map(|e| e.unsigned_abs()))
        .max()
        .unwrap_or(0);
    let properly_discontinuous = fan_property && reach < u64::from(window);
    if reach >= u64::from(window) && window > 0 {
        witnesses.push(format!("overlaps reach the window boundary {window}"));
    }

    let consistency = orbit_consistency(fan, window.min(8));
    let invariant = support_ok && consistency < tol::LINEAR;

    ActionReport {
        free,
        properly_discontinuous,
        invariant,
        fan_property,
        representatives_distinct: distinct,
        overlap_words,
        orbit_consistency: consistency,
        window,
        witnesses,
    }
}

/// `max |act(g, act(g', c)) - act(g g', c)|` on unit rays.
fn orbit_consistency(fan: &QuotientFan, window: u32) -> f64 {
    let ws = words(fan.b(), window, true);
    let mut worst = 0.0f64;
    for g in &ws {
        for h in ws.iter().step_by(3) {
            let gh: Vec<i64> = g.iter().zip(h).map(|(a, b)| a + b).collect();
            for c in fan.sigma() {
                let lhs = act_profile(&fan.profile(g), &act_profile(&fan.profile(h), c));
                let rhs = act_profile(&fan.profile(&gh), c);
                for (a, b) in lhs.unit_rays().iter().zip(rhs.unit_rays()) {
                    for (x, y) in a.iter().zip(b) {
                        worst = worst.max((x - y).abs());
                    }
                }
            }
        }
    }
    worst
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SupportReport {
    pub samples: usize,
    pub covered: usize,
    /// Points found in more than one cone, all on shared faces.
    pub on_shared_faces: usize,
    /// Points in two cones without being on a face of each.
    pub overlaps: usize,
}

/// Samples `n` points uniformly from a box in `Omega \ L_+` and checks each
/// lies in exactly one orbit cone's relative interior or on a shared face.
pub fn sample_support(fan: &QuotientFan, n: usize, seed: u64) -> SupportReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let omega = fan.omega();
    let orbit = fan.orbit(fan.window());
    let mut rep = SupportReport {
        samples: n,
        covered: 0,
        on_shared_faces: 0,
        overlaps: 0,
    };
    let slack = tol::MEMBERSHIP;
    for _ in 0..n {
        let x: Vec<f64> = (0..omega.s)
            .map(|i| {
                if i < omega.b {
                    rng.gen_range(1e-3..10.0)
                } else {
                    let v: f64 = rng.gen_range(1e-6..10.0);
                    if rng.gen_bool(0.5) {
                        v
                    } else {
                        -v
                    }
                }
            })
            .collect();
        let hits: Vec<&Cone> = orbit
            .iter()
            .filter(|(_, _, c)| c.contains(&x, slack))
            .map(|(_, _, c)| c)
            .collect();
        match hits.len() {
            0 => {}
            1 => rep.covered += 1,
            _ => {
                rep.covered += 1;
                if hits.iter().all(|c| !c.contains_relint(&x, slack)) {
                    rep.on_shared_faces += 1;
                } else {
                    rep.overlaps += 1;
                }
            }
        }
    }
    rep
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TagReport {
    /// All acted tags have integer coordinates.
    pub integral: bool,
    /// Largest angle-free mismatch between a ray and the embedding of its
    /// tag (unit vectors).
    pub direction_residual: f64,
    pub checked: usize,
    pub untagged_rays: usize,
}

/// Acts on the tags of `Sigma` exactly for words in `[-window, window]^b`
/// and checks they stay integral and still embed onto their rays.
pub fn check_tags(field: &NumberField, fan: &QuotientFan, window: u32) -> TagReport {
    let perm = fan.w().labeling().perm().to_vec();
    let gens = fan.w().generators().to_vec();
    let mut rep = TagReport {
        integral: true,
        direction_residual: 0.0,
        checked: 0,
        untagged_rays: 0,
    };
    for c in fan.sigma() {
        rep.untagged_rays += c.rays().iter().filter(|r| r.tag.is_none()).count();
    }
    for wd in words(fan.b(), window, true) {
        let eta = crate::units::word(field, &gens, &wd);
        let p = fan.profile(&wd);
        for c in fan.sigma() {
            let acted = act(field, &eta, &p, c);
            for r in acted.rays() {
                let Some(t) = &r.tag else { continue };
                rep.checked += 1;
                rep.integral &= t.is_integral();
                let sig = field.sigma(t);
                let img: Vec<f64> = perm.iter().map(|&k| sig[k].re).collect();
                let (u, v) = (normalize(&img), r.unit());
                let d = u.iter().zip(&v).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
                rep.direction_residual = rep.direction_residual.max(d);
            }
        }
    }
    rep
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CollapseReport {
    pub delta: f64,
    pub k_max: u32,
    /// Largest `N` with `eta^k C_delta ⊆ C_{N^k delta}` on every sample.
    pub fitted_n: Option<f64>,
    /// Smallest one-step ratio `r(eta v) / delta` over boundary samples.
    pub min_margin: f64,
}

/// Sum of squares of the `L` coordinates over that of the `N` coordinates.
fn cone_ratio(v: &[f64], b: usize) -> f64 {
    let l: f64 = v[..b].iter().map(|x| x * x).sum();
    let n: f64 = v[b..].iter().map(|x| x * x).sum();
    l / n
}

/// Samples boundary points of `C_delta = {sum_L v^2 >= delta sum_N v^2}`
/// and fits the growth of the ratio under `eta^k`, `k <= k_max`.
pub fn cone_collapse_check(
    delta: f64,
    profile: &[f64],
    b: usize,
    k_max: u32,
    seed: u64,
) -> Result<CollapseReport, FanError> {
    let s = profile.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fitted = f64::INFINITY;
    let mut margin = f64::INFINITY;
    for _ in 0..64 {
        let mut l: Vec<f64> = (0..b).map(|_| rng.gen_range(0.1..1.0)).collect();
        let nn: Vec<f64> = (0..s - b).map(|_| rng.gen_range(-1.0..1.0)).collect();
        // rescale the L part onto the boundary of C_delta
        let target = (delta * nn.iter().map(|x| x * x).sum::<f64>()).sqrt();
        let cur = norm(&l);
        l.iter_mut().for_each(|x| *x *= target / cur);
        let v: Vec<f64> = l.into_iter().chain(nn).collect();
        for k in 1..=k_max {
            let moved: Vec<f64> = v
                .iter()
                .zip(profile)
                .map(|(x, e)| x * e.powi(k as i32))
                .collect();
            let r = cone_ratio(&moved, b);
            fitted = fitted.min((r / delta).powf(1.0 / f64::from(k)));
            if k == 1 {
                margin = margin.min(r / delta);
            }
        }
    }
    if k_max == 0 {
        return Ok(CollapseReport {
            delta,
            k_max,
            fitted_n: None,
            min_margin: 1.0,
        });
    }
    if fitted.is_nan() || fitted <= 1.0 {
        return Err(FanError::CollapseFailed(fitted));
    }
    Ok(CollapseReport {
        delta,
        k_max,
        fitted_n: Some(fitted),
        min_margin: margin,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DivisorReport {
    pub ray: Vec<f64>,
    /// Number of maximal cones of the window orbit containing the ray.
    pub star_cones: usize,
    /// Rays of the quotient fan in `R^s / span(ray)`.
    pub quotient_rays: Vec<Vec<f64>>,
    pub quotient_dim: usize,
    pub complete: bool,
    pub classification: String,
    /// `|(1 - conj b) - (b - 1)/b|` for `b` the first complex embedding of
    /// the field generator.
    pub elliptic_residual: Option<f64>,
}

/// Star-quotient fan of `ray`: images of the orbit cones containing it in
/// `R^s / span(ray)`, with a completeness check by direction sampling.
pub fn divisor_certificate(
    field: &NumberField,
    fan: &QuotientFan,
    ray: &[f64],
) -> Result<DivisorReport, FanError> {
    let s = fan.s();
    if ray.len() != s {
        return Err(FanError::Dimension {
            expected: s,
            got: ray.len(),
        });
    }
    let u = normalize(ray);
    let star: Vec<Cone> = fan
        .orbit(fan.window())
        .into_iter()
        .map(|(_, _, c)| c)
        .filter(|c| {
            c.unit_rays()
                .iter()
                .any(|r| r.iter().zip(&u).all(|(a, b)| (a - b).abs() < tol::MEMBERSHIP))
        })
        .collect();
    if star.is_empty() {
        return Err(FanError::RayNotInFan(ray.to_vec()));
    }
    // orthonormal basis of span(ray)^perp by Gram-Schmidt on e_1..e_s
    let mut perp: Vec<Vec<f64>> = Vec::new();
    for i in 0..s {
        let mut e = vec![0.0; s];
        e[i] = 1.0;
        for q in std::iter::once(&u).chain(perp.iter()) {
            let d = dot(&e, q);
            e.iter_mut().zip(q).for_each(|(x, y)| *x -= d * y);
        }
        if norm(&e) > 1e-8 {
            perp.push(normalize(&e));
        }
    }
    let project = |v: &[f64]| -> Vec<f64> { perp.iter().map(|q| dot(v, q)).collect() };
    let mut qrays: Vec<Vec<f64>> = Vec::new();
    let mut qcones: Vec<Cone> = Vec::new();
    for c in &star {
        let rays: Vec<Ray> = c
            .unit_rays()
            .iter()
            .map(|r| project(r))
            .filter(|p| norm(p) > 1e-8)
            .map(Ray::new)
            .collect();
        for r in &rays {
            let n = r.unit();
            if !qrays
                .iter()
                .any(|q| q.iter().zip(&n).all(|(a, b)| (a - b).abs() < 1e-6))
            {
                qrays.push(n);
            }
        }
        if !rays.is_empty() {
            qcones.push(Cone::new(rays)?);
        }
    }
    let qdim = s - 1;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    for i in 0..qdim {
        for sign in [1.0, -1.0] {
            let mut e = vec![0.0; qdim];
            e[i] = sign;
            dirs.push(e);
        }
    }
    if qdim > 1 {
        for _ in 0..256 {
            dirs.push((0..qdim).map(|_| rng.gen_range(-1.0..1.0)).collect());
        }
    }
    let complete = qdim > 0 && dirs.iter().all(|d| qcones.iter().any(|c| c.contains(d, 1e-7)));

    let (_, t) = field.signature();
    let classification = if qdim == 1 && t == 1 && complete && qrays.len() == 2 {
        "Hopf surface"
    } else {
        "generalized LVMB"
    };
    let elliptic_residual = (t >= 1).then(|| {
        let beta = field.sigma(&field.generator())[s];
        let one = Complex64::new(1.0, 0.0);
        ((one - beta.conj()) - (beta - one) / beta).norm()
    });
    Ok(DivisorReport {
        ray: ray.to_vec(),
        star_cones: star.len(),
        quotient_rays: qrays,
        quotient_dim: qdim,
        complete,
        classification: classification.into(),
        elliptic_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::validate_field;
    use crate::poly::IntPoly;
    use crate::units::check_assumption_c;

    fn salem_fan(window: u32) -> (NumberField, QuotientFan) {
        let f = validate_field(&IntPoly::from_i64(&[1, -1, -1, -1, 1]), None).unwrap();
        let a = UnitElt::new(&f, f.generator()).unwrap();
        let mut w = SubgroupW::new(vec![a], 2);
        check_assumption_c(&mut w, 10).unwrap();
        let fan = build_fan_s2(&f, w, window).unwrap();
        (f, fan)
    }

    #[test]
    fn sigma_matches_construction() {
        let (f, fan) = salem_fan(8);
        let alpha = f.sigma(&f.generator())[0].re;
        let c = &fan.sigma()[0];
        assert_eq!(c.rays()[0].v, vec![1.0, 1.0]);
        assert!((c.rays()[1].v[0] - alpha).abs() < 1e-12);
        assert!((c.rays()[1].v[1] - 1.0 / alpha).abs() < 1e-12);
        assert!(fan.sigma()[1].rays()[0].tag.is_some());
        assert!(c.contains(&[1.0, 0.5], 1e-9));
        assert!(fan.locate(&[1.0, 0.0], 1e-9).is_empty());
    }

    #[test]
    fn action_on_cones() {
        let (f, fan) = salem_fan(8);
        let eta = fan.w().generators()[0].clone();
        let p = fan.profile(&[1]);
        let c = act(&f, &eta, &p, &fan.sigma()[0]);
        let alpha = p[0];
        assert!((c.rays()[1].v[0] - alpha * alpha).abs() < 1e-9);
        assert_eq!(c.rays()[0].tag.as_ref().unwrap(), eta.elt());
        let back = act_profile(&fan.profile(&[-1]), &c);
        assert!(back.same_as(&fan.sigma()[0]));
    }

    #[test]
    fn salem_action_is_free_and_discontinuous() {
        let (_, fan) = salem_fan(16);
        let r = check_action(&fan);
        assert!(r.free && r.properly_discontinuous && r.invariant, "{r:?}");
        assert!(r.fan_property && r.representatives_distinct);
    }

    #[test]
    fn ray_on_l_axis_breaks_invariance() {
        let (_, fan) = salem_fan(4);
        let bad = QuotientFan::new(
            vec![Cone::new(vec![Ray::new(vec![1.0, 0.0])]).unwrap()],
            fan.w().clone(),
            2,
            4,
        )
        .unwrap();
        assert!(!check_action(&bad).invariant);
    }

    #[test]
    fn collapse_fit() {
        let (_, fan) = salem_fan(4);
        let p = fan.profile(&[1]);
        let r = cone_collapse_check(1.0, &p, 1, 8, 3).unwrap();
        assert!(r.fitted_n.unwrap() >= 0.95 * p[0] * p[0]);
        let inv = fan.profile(&[-1]);
        assert!(matches!(
            cone_collapse_check(1.0, &inv, 1, 8, 3),
            Err(FanError::CollapseFailed(_))
        ));
        assert_eq!(cone_collapse_check(1.0, &p, 1, 0, 3).unwrap().fitted_n, None);
    }

    #[test]
    fn divisor_is_hopf() {
        let (f, fan) = salem_fan(4);
        let ray = fan.sigma()[0].rays()[1].v.clone();
        let d = divisor_certificate(&f, &fan, &ray).unwrap();
        assert!(d.complete);
        assert_eq!(d.quotient_rays.len(), 2);
        assert_eq!(d.classification, "Hopf surface");
        assert!(d.elliptic_residual.unwrap() < 1e-9);
        assert!(matches!(
            divisor_certificate(&f, &fan, &[1.0, 0.3]),
            Err(FanError::RayNotInFan(_))
        ));
    }

    #[test]
    fn tags_stay_integral() {
        let (f, fan) = salem_fan(4);
        let r = check_tags(&f, &fan, 3);
        assert!(r.integral);
        assert_eq!(r.untagged_rays, 0);
        assert!(r.direction_residual < 1e-9);
    }
}
