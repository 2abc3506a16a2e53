//! Units of O_K, their logarithmic embedding, the phi-matrices behind
//! Assumption C, and the detectors the certificate relies on.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{One, Signed};
use serde::Serialize;
use thiserror::Error;

use crate::field::{FieldElement, FieldError, NumberField};
use crate::poly::{QPoly, Q};
use crate::tol;
use crate::words::{l1, words};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum UnitError {
    #[error("element is not a unit of O_K (norm {0})")]
    NotAUnit(String),
    #[error("unit is negative at a real embedding: profile {0:?}")]
    NonPositiveProfile(Vec<f64>),
    #[error("rank {b} is not below the number of real embeddings {s}")]
    RankTooLarge { b: usize, s: usize },
    #[error("subgroup has rank {got}, expected {expected}")]
    WrongRank { expected: usize, got: usize },
    #[error("no subgroup satisfying Assumption C found within the search window")]
    NotFound,
    #[error("labeling {0:?} is not a permutation of the real embeddings")]
    BadLabeling(Vec<usize>),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// A unit together with its embedding values.
///
/// Embedding values of products and powers are propagated multiplicatively
/// rather than re-evaluated, so large words keep full relative precision.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitElt {
    elt: FieldElement,
    sigma: Vec<Complex64>,
    s: usize,
    t: usize,
}

impl UnitElt {
    /// Checks integrality and `|N(x)| = 1` exactly.
    pub fn new(field: &NumberField, elt: FieldElement) -> Result<Self, UnitError> {
        let elt = field.check_dim(&elt)?;
        let norm = field.norm(&elt);
        if !elt.is_integral() || norm.abs() != Q::one() {
            return Err(UnitError::NotAUnit(norm.to_string()));
        }
        let (s, t) = field.signature();
        Ok(Self {
            sigma: field.sigma(&elt),
            elt,
            s,
            t,
        })
    }

    pub fn one(field: &NumberField) -> Self {
        let (s, t) = field.signature();
        Self {
            elt: field.one(),
            sigma: vec![Complex64::new(1.0, 0.0); s + 2 * t],
            s,
            t,
        }
    }

    pub fn elt(&self) -> &FieldElement {
        &self.elt
    }

    pub fn sigma(&self) -> &[Complex64] {
        &self.sigma
    }

    pub fn signature(&self) -> (usize, usize) {
        (self.s, self.t)
    }

    /// `eta_i = sigma_i` at real places, `|sigma_i|` at complex ones.
    pub fn eta_profile(&self) -> Vec<f64> {
        (0..self.s + self.t)
            .map(|i| {
                if i < self.s {
                    self.sigma[i].re
                } else {
                    self.sigma[i].norm()
                }
            })
            .collect()
    }

    /// The first `s` coordinates of the profile: the diagonal action on the
    /// real quotient space.
    pub fn real_profile(&self) -> Vec<f64> {
        self.sigma[..self.s].iter().map(|z| z.re).collect()
    }

    pub fn is_totally_positive(&self) -> bool {
        self.sigma[..self.s].iter().all(|z| z.re > 0.0)
    }

    /// `N(x - 1)` is an integer, so `|sigma_i(x) - 1| < 1` everywhere
    /// already forces `x = 1`.
    pub fn is_one(&self) -> bool {
        self.sigma
            .iter()
            .all(|z| (z - Complex64::new(1.0, 0.0)).norm() < tol::LINEAR)
    }

    pub fn mul(&self, other: &UnitElt, field: &NumberField) -> UnitElt {
        UnitElt {
            elt: field.mul(&self.elt, &other.elt),
            sigma: self
                .sigma
                .iter()
                .zip(&other.sigma)
                .map(|(a, b)| a * b)
                .collect(),
            s: self.s,
            t: self.t,
        }
    }

    pub fn inverse(&self, field: &NumberField) -> UnitElt {
        UnitElt {
            elt: field.inverse(&self.elt).expect("units are invertible"),
            sigma: self.sigma.iter().map(|z| z.inv()).collect(),
            s: self.s,
            t: self.t,
        }
    }

    pub fn pow(&self, field: &NumberField, k: i64) -> UnitElt {
        UnitElt {
            elt: field.pow(&self.elt, k).expect("units are invertible"),
            sigma: self.sigma.iter().map(|z| z.powi(k as i32)).collect(),
            s: self.s,
            t: self.t,
        }
    }

    /// Embedding values of `self^k` without the exact field element.
    pub fn sigma_pow(&self, k: i64) -> Vec<Complex64> {
        self.sigma.iter().map(|z| z.powi(k as i32)).collect()
    }
}

/// Product of generator powers `prod g_i^{e_i}`.
pub fn word(field: &NumberField, gens: &[UnitElt], exps: &[i64]) -> UnitElt {
    gens.iter()
        .zip(exps)
        .fold(UnitElt::one(field), |acc, (g, &e)| {
            if e == 0 {
                acc
            } else {
                acc.mul(&g.pow(field, e), field)
            }
        })
}

/// Real profile of a word, computed from the generators' profiles.
pub fn word_real_profile(gens: &[UnitElt], exps: &[i64], s: usize) -> Vec<f64> {
    (0..s)
        .map(|i| {
            gens.iter()
                .zip(exps)
                .map(|(g, &e)| g.sigma[i].re.powi(e as i32))
                .product()
        })
        .collect()
}

/// `(ln|s_1|, ..., ln|s_s|, 2 ln|s_{s+1}|, ..., 2 ln|s_{s+t}|)`.
pub fn log_embedding(u: &UnitElt) -> Vec<f64> {
    (0..u.s + u.t)
        .map(|i| {
            let l = u.sigma[i].norm().ln();
            if i < u.s {
                l
            } else {
                2.0 * l
            }
        })
        .collect()
}

/// A permutation of the real embeddings; positions `0..b` are the
/// coordinates of `L`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Labeling(Vec<usize>);

impl Labeling {
    pub fn identity(s: usize) -> Self {
        Self((0..s).collect())
    }

    pub fn new(perm: Vec<usize>) -> Result<Self, UnitError> {
        let mut sorted = perm.clone();
        sorted.sort_unstable();
        if sorted != (0..perm.len()).collect::<Vec<_>>() {
            return Err(UnitError::BadLabeling(perm));
        }
        Ok(Self(perm))
    }

    pub fn perm(&self) -> &[usize] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &p)| i == p)
    }

    /// Reorders the real part of a profile; complex entries stay put.
    pub fn apply(&self, profile: &[f64]) -> Vec<f64> {
        let s = self.0.len();
        self.0
            .iter()
            .map(|&p| profile[p])
            .chain(profile[s..].iter().copied())
            .collect()
    }

    /// Labelings whose first `b` entries run over ordered `b`-tuples of
    /// distinct real embeddings in lexicographic order, the rest ascending.
    /// The identity comes first.
    pub fn enumerate(s: usize, b: usize) -> Vec<Labeling> {
        fn rec(s: usize, b: usize, prefix: &mut Vec<usize>, out: &mut Vec<Labeling>) {
            if prefix.len() == b {
                let mut perm = prefix.clone();
                perm.extend((0..s).filter(|i| !prefix.contains(i)));
                out.push(Labeling(perm));
                return;
            }
            for i in 0..s {
                if !prefix.contains(&i) {
                    prefix.push(i);
                    rec(s, b, prefix, out);
                    prefix.pop();
                }
            }
        }
        let mut out = Vec::new();
        rec(s, b.min(s), &mut Vec::new(), &mut out);
        out
    }
}

/// `b x g` matrix with entries `ln(eta_i / eta_{b+j})`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhiMatrix {
    entries: Vec<Vec<f64>>,
}

impl PhiMatrix {
    pub fn from_log_profile(logs: &[f64], b: usize) -> Self {
        Self {
            entries: (0..b)
                .map(|i| logs[b..].iter().map(|lj| logs[i] - lj).collect())
                .collect(),
        }
    }

    pub fn zeros(b: usize, g: usize) -> Self {
        Self {
            entries: vec![vec![0.0; g]; b],
        }
    }

    pub fn entries(&self) -> &[Vec<f64>] {
        &self.entries
    }

    pub fn b(&self) -> usize {
        self.entries.len()
    }

    pub fn add_scaled(&self, other: &PhiMatrix, k: f64) -> PhiMatrix {
        PhiMatrix {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(r, o)| r.iter().zip(o).map(|(a, b)| a + k * b).collect())
                .collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &PhiMatrix) -> f64 {
        self.entries
            .iter()
            .flatten()
            .zip(other.entries.iter().flatten())
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Sign of row `i` if it lies in Q_b (all entries beyond the zero band
    /// with the same sign).
    pub fn row_sign(&self, i: usize) -> Option<i8> {
        let row = &self.entries[i];
        if row.iter().all(|&v| v > tol::SIGN_ZERO) {
            Some(1)
        } else if row.iter().all(|&v| v < -tol::SIGN_ZERO) {
            Some(-1)
        } else {
            None
        }
    }

    pub fn row_in_q(&self, i: usize) -> bool {
        self.row_sign(i).is_some()
    }

    pub fn has_row_in_q(&self) -> bool {
        (0..self.b()).any(|i| self.row_in_q(i))
    }

    /// Largest `min |entry|` over rows in Q_b.
    pub fn margin(&self) -> Option<f64> {
        (0..self.b())
            .filter(|&i| self.row_in_q(i))
            .map(|i| self.entries[i].iter().fold(f64::INFINITY, |m, v| m.min(v.abs())))
            .reduce(f64::max)
    }

    /// Whether some row is strictly positive: the generator pushes cones
    /// towards `L_+` under forward iteration.
    pub fn has_positive_row(&self) -> bool {
        (0..self.b()).any(|i| self.row_sign(i) == Some(1))
    }
}

/// `phi_b(u)` under `labeling`. Needs a totally positive unit.
pub fn phi_b(u: &UnitElt, b: usize, labeling: &Labeling) -> Result<PhiMatrix, UnitError> {
    if !u.is_totally_positive() {
        return Err(UnitError::NonPositiveProfile(u.eta_profile()));
    }
    let logs: Vec<f64> = labeling.apply(&u.eta_profile()).iter().map(|v| v.ln()).collect();
    Ok(PhiMatrix::from_log_profile(&logs, b))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum AssumptionC {
    /// Decided for every element of W (rank one, or trivial W).
    Exact,
    /// Every nontrivial word with exponents in `[-window, window]^b` passes.
    WindowVerified { window: u32 },
    /// A word violating the condition under every labeling tried; the
    /// witness is reported for the identity labeling.
    Refuted { word: Vec<i64> },
}

impl AssumptionC {
    pub fn holds(&self) -> bool {
        !matches!(self, AssumptionC::Refuted { .. })
    }
}

/// A subgroup of totally positive units given by `b` generators.
#[derive(Clone, Debug)]
pub struct SubgroupW {
    generators: Vec<UnitElt>,
    labeling: Labeling,
    assumption_c: Option<AssumptionC>,
}

impl SubgroupW {
    pub fn new(generators: Vec<UnitElt>, s: usize) -> Self {
        Self {
            generators,
            labeling: Labeling::identity(s),
            assumption_c: None,
        }
    }

    pub fn with_labeling(mut self, labeling: Labeling) -> Self {
        self.labeling = labeling;
        self
    }

    pub fn generators(&self) -> &[UnitElt] {
        &self.generators
    }

    pub fn b(&self) -> usize {
        self.generators.len()
    }

    pub fn labeling(&self) -> &Labeling {
        &self.labeling
    }

    pub fn assumption_c(&self) -> Option<&AssumptionC> {
        self.assumption_c.as_ref()
    }

    /// Numeric rank of the generators' log vectors.
    pub fn log_rank(&self) -> usize {
        let b = self.b();
        if b == 0 {
            return 0;
        }
        let rows: Vec<Vec<f64>> = self.generators.iter().map(log_embedding).collect();
        let m = DMatrix::from_fn(b, rows[0].len(), |i, j| rows[i][j]);
        numeric_rank(&m)
    }

    pub fn is_independent(&self) -> bool {
        self.log_rank() == self.b()
    }

    pub fn is_totally_positive(&self) -> bool {
        self.generators.iter().all(UnitElt::is_totally_positive)
    }

    /// Generator phi-matrices under the current labeling.
    pub fn phis(&self) -> Result<Vec<PhiMatrix>, UnitError> {
        let b = self.b();
        self.generators
            .iter()
            .map(|g| phi_b(g, b, &self.labeling))
            .collect()
    }

    /// Labeled real profile of the word `exps`.
    pub fn labeled_profile(&self, exps: &[i64]) -> Vec<f64> {
        let s = self.labeling.perm().len();
        let raw = word_real_profile(&self.generators, exps, s);
        self.labeling.perm().iter().map(|&p| raw[p]).collect()
    }

    /// Labeled `eta` profile (reals then complex moduli) of the word `exps`.
    pub fn labeled_eta_profile(&self, exps: &[i64]) -> Vec<f64> {
        let len = self.labeling.perm().len() + self.generators.first().map_or(0, |g| g.t);
        let raw: Vec<f64> = (0..len)
            .map(|i| {
                self.generators
                    .iter()
                    .zip(exps)
                    .map(|(g, &e)| g.eta_profile()[i].powi(e as i32))
                    .product()
            })
            .collect();
        self.labeling.apply(&raw)
    }

    /// Labeled real profile of the i-th generator.
    pub fn generator_profile(&self, i: usize) -> Vec<f64> {
        let mut e = vec![0; self.b()];
        e[i] = 1;
        self.labeled_profile(&e)
    }

    /// Replaces generator `i` by its inverse.
    pub fn invert_generator(&mut self, i: usize, field: &NumberField) {
        self.generators[i] = self.generators[i].inverse(field);
    }
}

pub(crate) fn numeric_rank(m: &DMatrix<f64>) -> usize {
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().fold(0.0f64, |a, &v| a.max(v));
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&v| v > tol::LINEAR * max.max(1.0)).count()
}

fn first_failing_word(phis: &[PhiMatrix], window: u32) -> Option<Vec<i64>> {
    let b = phis.len();
    words(b, window, false).into_iter().find(|w| {
        let g = phis[0].entries[0].len();
        let phi = w
            .iter()
            .zip(phis)
            .fold(PhiMatrix::zeros(b, g), |acc, (&k, p)| acc.add_scaled(p, k as f64));
        !phi.has_row_in_q()
    })
}

/// Decides (b = 1) or window-verifies (b >= 2) Assumption C, trying every
/// labeling in [`Labeling::enumerate`] order and storing the first that
/// works in `w`.
pub fn check_assumption_c(w: &mut SubgroupW, window: u32) -> Result<AssumptionC, UnitError> {
    let b = w.b();
    let s = w.labeling.perm().len();
    let trivial = w.generators.iter().all(UnitElt::is_one);
    if b == 0 || trivial {
        w.assumption_c = Some(AssumptionC::Exact);
        return Ok(AssumptionC::Exact);
    }
    let mut identity_witness = None;
    for labeling in Labeling::enumerate(s, b) {
        let phis: Vec<PhiMatrix> = w
            .generators
            .iter()
            .map(|g| phi_b(g, b, &labeling))
            .collect::<Result<_, _>>()?;
        let outcome = if b == 1 {
            // phi_1(eta^k) = k phi_1(eta) and Q_1 is closed under nonzero scaling
            phis[0].has_row_in_q().then_some(AssumptionC::Exact)
        } else {
            match first_failing_word(&phis, window) {
                None => Some(AssumptionC::WindowVerified { window }),
                Some(word) => {
                    identity_witness.get_or_insert(word);
                    None
                }
            }
        };
        if let Some(status) = outcome {
            w.labeling = labeling;
            w.assumption_c = Some(status.clone());
            return Ok(status);
        }
    }
    let word = identity_witness.unwrap_or_else(|| vec![1]);
    let status = AssumptionC::Refuted { word };
    w.assumption_c = Some(status.clone());
    Ok(status)
}

/// One generator chosen by [`search_w`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchPick {
    /// Exponents over the fundamental units.
    pub word: Vec<i64>,
    /// Whether the word was squared to make it totally positive.
    pub squared: bool,
    /// Whether the pick was inverted so that it has a positive phi row.
    pub inverted: bool,
    pub margin: f64,
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub w: SubgroupW,
    pub picks: Vec<SearchPick>,
}

/// Greedy inductive search for a rank-`b` subgroup satisfying Assumption C,
/// one generator at a time. Candidates are words in the fundamental units
/// with exponents in `[-window, window]`; words that are not totally
/// positive are squared. Among passing candidates, shorter effective words
/// win (squaring doubles the length), then larger margin, then the
/// enumeration order. Chosen generators are oriented to have a positive
/// phi row.
pub fn search_w(
    field: &NumberField,
    fundamental_units: &[UnitElt],
    b: usize,
    window: u32,
    c_window: u32,
) -> Result<SearchOutcome, UnitError> {
    let (s, _) = field.signature();
    if b >= s {
        return Err(UnitError::RankTooLarge { b, s });
    }
    let mut w = SubgroupW::new(Vec::new(), s);
    let mut picks = Vec::new();
    let candidates = words(fundamental_units.len(), window, false);
    for _ in 0..b {
        let mut best: Option<(u64, f64, SubgroupW, SearchPick)> = None;
        for exps in &candidates {
            let mut g = word(field, fundamental_units, exps);
            let squared = !g.is_totally_positive();
            if squared {
                g = g.mul(&g, field);
            }
            let len = l1(exps) * if squared { 2 } else { 1 };
            if best.as_ref().is_some_and(|(bl, ..)| len > *bl) {
                break;
            }
            let mut gens = w.generators.clone();
            gens.push(g);
            let mut trial = SubgroupW::new(gens, s);
            if !trial.is_independent() {
                continue;
            }
            if !check_assumption_c(&mut trial, c_window)?.holds() {
                continue;
            }
            let phi = phi_b(trial.generators.last().unwrap(), trial.b(), &trial.labeling)?;
            let margin = phi.margin().unwrap_or(0.0);
            let better = match &best {
                None => true,
                Some((bl, bm, ..)) => len < *bl || (len == *bl && margin > *bm + tol::LINEAR),
            };
            if better {
                let pick = SearchPick {
                    word: exps.clone(),
                    squared,
                    inverted: false,
                    margin,
                };
                best = Some((len, margin, trial, pick));
            }
        }
        let (_, _, mut trial, mut pick) = best.ok_or(UnitError::NotFound)?;
        let last = trial.b() - 1;
        let phi = phi_b(&trial.generators[last], trial.b(), &trial.labeling)?;
        if !phi.has_positive_row() {
            trial.invert_generator(last, field);
            pick.inverted = true;
        }
        w = trial;
        picks.push(pick);
    }
    if b == 0 {
        w.assumption_c = Some(AssumptionC::Exact);
    }
    Ok(SearchOutcome { w, picks })
}

/// `c m(X) = X^d m(1/X)` for the minimal polynomial `m` of `u` with
/// constant term `c`.
pub fn is_reciprocal(field: &NumberField, u: &FieldElement) -> Result<bool, UnitError> {
    let m = field.min_poly_elt(u)?;
    let c = m.coeff(0);
    if !m.coeffs().iter().all(|q| q.is_integer()) || c.abs() != Q::one() {
        return Err(UnitError::NotAUnit(c.to_string()));
    }
    let rev = QPoly::new(m.coeffs().iter().rev().cloned().collect());
    Ok(m.scale(&c) == rev)
}

/// Pairs `(i, j)`, 1-based with `i < j`, such that
/// `|sigma_i(g) sigma_j(g) - 1| < tol` for every generator.
pub fn invariant_pair_detector(w: &SubgroupW, n: usize, tol: f64) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let fixed = w.generators.iter().all(|g| {
                (g.sigma[i] * g.sigma[j] - Complex64::new(1.0, 0.0)).norm() < tol
            });
            if fixed {
                out.push((i + 1, j + 1));
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OtReport {
    pub admissible: bool,
    pub det: f64,
}

/// Whether the projected log vectors of the `s` generators span `R^s`.
pub fn check_ot_admissible(a: &SubgroupW, s: usize) -> Result<OtReport, UnitError> {
    if a.b() != s {
        return Err(UnitError::WrongRank {
            expected: s,
            got: a.b(),
        });
    }
    let rows: Vec<Vec<f64>> = a.generators.iter().map(log_embedding).collect();
    let m = DMatrix::from_fn(s, s, |i, j| rows[i][j]);
    let det = m.determinant();
    Ok(OtReport {
        admissible: det.abs() > tol::OT_DET,
        det,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::validate_field;
    use crate::poly::IntPoly;

    fn setup() -> (NumberField, UnitElt, UnitElt) {
        let f = validate_field(&IntPoly::from_i64(&[1, -1, -1, -1, 1]), None).unwrap();
        let a = UnitElt::new(&f, f.generator()).unwrap();
        let one_minus = f.one().sub(&f.generator());
        let b = UnitElt::new(&f, one_minus).unwrap();
        (f, a, b)
    }

    #[test]
    fn non_unit_rejected() {
        let (f, ..) = setup();
        let two = f.from_int(2);
        assert!(matches!(UnitElt::new(&f, two), Err(UnitError::NotAUnit(_))));
    }

    #[test]
    fn log_embedding_of_alpha() {
        let (_, a, _) = setup();
        let l = log_embedding(&a);
        let la = 1.722_083_81f64.ln();
        assert!((l[0] - la).abs() < 1e-8);
        assert!((l[1] + la).abs() < 1e-8);
        assert!(l[2].abs() < 1e-9);
    }

    #[test]
    fn phi_rows() {
        let (f, a, b) = setup();
        let id = Labeling::identity(2);
        let p = phi_b(&a, 1, &id).unwrap();
        let la = a.sigma()[0].re.ln();
        assert!((p.entries()[0][0] - 2.0 * la).abs() < 1e-12);
        assert!((p.entries()[0][1] - la).abs() < 1e-12);
        assert!(p.has_positive_row());

        assert!(matches!(phi_b(&b, 1, &id), Err(UnitError::NonPositiveProfile(_))));
        let b2 = b.mul(&b, &f);
        assert!(!phi_b(&b2, 1, &id).unwrap().has_row_in_q());
        let swap = Labeling::new(vec![1, 0]).unwrap();
        let p = phi_b(&b2, 1, &swap).unwrap();
        assert!((p.entries()[0][0] + 1.087).abs() < 1e-3);
        assert!((p.entries()[0][1] + 2.933).abs() < 1e-3);
    }

    #[test]
    fn assumption_c_rank_one() {
        let (f, a, b) = setup();
        let mut w = SubgroupW::new(vec![a], 2);
        assert_eq!(check_assumption_c(&mut w, 10).unwrap(), AssumptionC::Exact);
        assert!(w.labeling().is_identity());
        let mut w = SubgroupW::new(vec![b.mul(&b, &f)], 2);
        assert_eq!(check_assumption_c(&mut w, 10).unwrap(), AssumptionC::Exact);
        assert_eq!(w.labeling().perm(), &[1, 0]);
        let mut w = SubgroupW::new(vec![UnitElt::one(&f)], 2);
        assert_eq!(check_assumption_c(&mut w, 10).unwrap(), AssumptionC::Exact);
    }

    #[test]
    fn search_finds_alpha() {
        let (f, a, b) = setup();
        let out = search_w(&f, &[a.clone(), b.clone()], 1, 2, 10).unwrap();
        assert_eq!(out.w.generators()[0].elt(), a.elt());
        assert!(!out.picks[0].squared);
        let empty = search_w(&f, &[a.clone(), b.clone()], 0, 2, 10).unwrap();
        assert_eq!(empty.w.b(), 0);
        assert_eq!(
            search_w(&f, &[a, b], 2, 2, 10).unwrap_err(),
            UnitError::RankTooLarge { b: 2, s: 2 }
        );
    }

    #[test]
    fn reciprocity() {
        let (f, a, b) = setup();
        assert!(is_reciprocal(&f, a.elt()).unwrap());
        assert!(!is_reciprocal(&f, b.elt()).unwrap());
        assert!(is_reciprocal(&f, &f.one()).unwrap());
        assert!(matches!(
            is_reciprocal(&f, &f.from_int(2)),
            Err(UnitError::NotAUnit(_))
        ));
    }

    #[test]
    fn pair_detector() {
        let (f, a, b) = setup();
        let w = SubgroupW::new(vec![a], 2);
        assert_eq!(invariant_pair_detector(&w, 4, 1e-9), vec![(1, 2), (3, 4)]);
        let w = SubgroupW::new(vec![b.mul(&b, &f)], 2);
        assert!(invariant_pair_detector(&w, 4, 1e-9).is_empty());
        let w = SubgroupW::new(vec![], 2);
        assert_eq!(invariant_pair_detector(&w, 4, 1e-9).len(), 6);
    }

    #[test]
    fn ot_admissibility() {
        let (f, a, b) = setup();
        let b2 = b.mul(&b, &f);
        let r = check_ot_admissible(&SubgroupW::new(vec![a.clone(), b2], 2), 2).unwrap();
        assert!(r.admissible);
        assert!((r.det.abs() - 1.29879).abs() < 1e-4);
        let a2 = a.mul(&a, &f);
        let r = check_ot_admissible(&SubgroupW::new(vec![a.clone(), a2], 2), 2).unwrap();
        assert!(!r.admissible);
        assert!(matches!(
            check_ot_admissible(&SubgroupW::new(vec![a], 2), 2),
            Err(UnitError::WrongRank { .. })
        ));
    }

    #[test]
    fn labeling_enumeration() {
        let l = Labeling::enumerate(3, 2);
        assert_eq!(l.len(), 6);
        assert!(l[0].is_identity());
        assert_eq!(l[1].perm(), &[0, 2, 1]);
    }
}
