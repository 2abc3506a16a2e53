//! Machine-readable summary of every check and the invariant claims they
//! support.
//!
//! Claims about the manifold are only as good as their hypotheses: numbers
//! that need a detector to pass are replaced by the strings `"uncertified"`
//! or `"unknown"` when it does not, and theorem-level claims are labelled
//! `"by-theorem"` rather than `"computed"`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CertificateError {
    #[error("pipeline did not produce: {0:?}")]
    IncompletePipeline(Vec<String>),
    #[error("subgroup is not admissible (|det| = {0:e})")]
    NotAdmissible(f64),
    #[error("rank {got} differs from s = {s}")]
    WrongRank { s: usize, got: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Construction,
    Ot,
    Lvmb,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Construction => "construction",
            Mode::Ot => "ot",
            Mode::Lvmb => "lvmb",
        }
    }
}

/// Outcome of one check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub passed: bool,
    /// Advisory checks only produce warnings.
    pub mandatory: bool,
    pub tolerance: Option<f64>,
    pub detail: Value,
}

impl Check {
    pub fn mandatory(passed: bool, tolerance: Option<f64>, detail: Value) -> Self {
        Self {
            passed,
            mandatory: true,
            tolerance,
            detail,
        }
    }

    pub fn advisory(passed: bool, tolerance: Option<f64>, detail: Value) -> Self {
        Self {
            passed,
            mandatory: false,
            tolerance,
            detail,
        }
    }

    /// `value < tol`, recording the value.
    pub fn below(value: f64, tol: f64) -> Self {
        Self::mandatory(value < tol, Some(tol), json!({ "value": value }))
    }
}

/// Hypothesis detectors for the cohomological claims.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Detectors {
    /// Reciprocity of each generator.
    pub reciprocal: Vec<bool>,
    pub non_reciprocal_generator: bool,
    /// 1-based pairs `(i, j)` with `sigma_i sigma_j = 1` on all of W.
    pub invariant_pairs: Vec<(usize, usize)>,
}

impl Detectors {
    /// The hypotheses behind `h2 = C(b,2)` and algebraic dimension zero.
    pub fn certify_h2(&self) -> bool {
        self.non_reciprocal_generator && self.invariant_pairs.is_empty()
    }
}

/// Everything the pipeline produced, before assembly.
#[derive(Clone, Debug, Default)]
pub struct Reports {
    pub mode: Mode,
    pub s: usize,
    pub t: usize,
    pub b: usize,
    pub field: Option<Value>,
    pub subgroup: Option<Value>,
    pub checks: BTreeMap<String, Check>,
    pub detectors: Option<Detectors>,
    pub divisors: Vec<Value>,
    pub warnings: Vec<String>,
    pub errors: Vec<String>,
}

impl Reports {
    pub fn add(&mut self, name: &str, check: Check) {
        self.checks.insert(name.to_string(), check);
    }

    pub fn mandatory_failures(&self) -> Vec<String> {
        self.checks
            .iter()
            .filter(|(_, c)| c.mandatory && !c.passed)
            .map(|(k, _)| k.clone())
            .collect()
    }
}

/// Checks every construction-mode run must contain.
pub const CONSTRUCTION_CHECKS: &[&str] = &[
    "field.ring_closure",
    "units.assumption_c",
    "ambient.realness",
    "fan.action",
    "domain.tiling",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema_version: String,
    /// `"pass"`, `"fail"`, `"incomplete"` or `"config_error"`.
    pub status: String,
    pub mode: String,
    pub field: Value,
    pub subgroup: Value,
    pub checks: BTreeMap<String, Check>,
    pub detectors: Value,
    pub invariants: BTreeMap<String, Value>,
    pub claim_basis: BTreeMap<String, String>,
    pub divisors: Vec<Value>,
    pub warnings: Vec<String>,
    pub errors: Vec<String>,
}

pub fn binomial2(b: usize) -> usize {
    b * b.saturating_sub(1) / 2
}

fn warnings_for(r: &Reports) -> Vec<String> {
    let mut w = r.warnings.clone();
    for (k, c) in &r.checks {
        if !c.mandatory && !c.passed {
            w.push(format!("advisory check {k} did not pass"));
        }
    }
    w
}

/// Builds the certificate for a construction or LVMB run.
pub fn assemble(r: &Reports) -> Result<Certificate, CertificateError> {
    let mut missing: Vec<String> = Vec::new();
    if r.field.is_none() {
        missing.push("field".into());
    }
    if r.mode == Mode::Construction {
        if r.subgroup.is_none() {
            missing.push("subgroup".into());
        }
        if r.detectors.is_none() {
            missing.push("detectors".into());
        }
        for name in CONSTRUCTION_CHECKS {
            if !r.checks.contains_key(*name) {
                missing.push((*name).into());
            }
        }
    }
    if !missing.is_empty() {
        return Err(CertificateError::IncompletePipeline(missing));
    }
    let failures = r.mandatory_failures();
    let passed = failures.is_empty() && r.errors.is_empty();
    let mut errors = r.errors.clone();
    errors.extend(failures.iter().map(|f| format!("mandatory check {f} failed")));

    let certified = r.detectors.as_ref().is_some_and(Detectors::certify_h2);
    let mut inv = BTreeMap::new();
    let mut basis = BTreeMap::new();
    inv.insert("dim_y".into(), json!(r.s + r.t));
    basis.insert("dim_y".into(), "by-theorem".into());
    inv.insert("b1".into(), json!(r.b));
    basis.insert("b1".into(), "by-theorem".into());
    inv.insert("h1_lower_bound".into(), json!(r.b));
    basis.insert("h1_lower_bound".into(), "by-theorem".into());
    if passed && r.mode == Mode::Construction {
        inv.insert("kodaira".into(), json!("-infinity"));
        basis.insert("kodaira".into(), "by-theorem".into());
    } else {
        inv.insert("kodaira".into(), json!("uncertified"));
        basis.insert("kodaira".into(), "uncertified".into());
    }
    let non_kahler = passed && r.mode == Mode::Construction && r.b >= 1;
    inv.insert(
        "non_kahler".into(),
        if non_kahler { json!(true) } else { json!("uncertified") },
    );
    basis.insert(
        "non_kahler".into(),
        if non_kahler { "by-theorem" } else { "uncertified" }.into(),
    );
    if passed && certified {
        inv.insert("h2_u0_mod_w".into(), json!(binomial2(r.b)));
        inv.insert("algebraic_dimension".into(), json!(0));
        basis.insert("h2_u0_mod_w".into(), "by-theorem".into());
        basis.insert("algebraic_dimension".into(), "by-theorem".into());
    } else {
        inv.insert("h2_u0_mod_w".into(), json!("uncertified"));
        inv.insert("algebraic_dimension".into(), json!("unknown"));
        basis.insert("h2_u0_mod_w".into(), "uncertified".into());
        basis.insert("algebraic_dimension".into(), "uncertified".into());
    }

    Ok(Certificate {
        schema_version: SCHEMA_VERSION.into(),
        status: if passed { "pass" } else { "fail" }.into(),
        mode: r.mode.as_str().into(),
        field: r.field.clone().unwrap_or(Value::Null),
        subgroup: r.subgroup.clone().unwrap_or(Value::Null),
        checks: r.checks.clone(),
        detectors: r
            .detectors
            .as_ref()
            .map_or(Value::Null, |d| serde_json::to_value(d).expect("serializable")),
        invariants: inv,
        claim_basis: basis,
        divisors: r.divisors.clone(),
        warnings: warnings_for(r),
        errors,
    })
}

/// Certificate for an OT-mode run (`b = s`). `reports` must already hold
/// the admissibility determinant under `ot.admissible`.
pub fn ot_certificate(r: &Reports, det: f64) -> Result<Certificate, CertificateError> {
    if r.b != r.s {
        return Err(CertificateError::WrongRank { s: r.s, got: r.b });
    }
    if det.abs() <= crate::tol::OT_DET {
        return Err(CertificateError::NotAdmissible(det));
    }
    if r.field.is_none() {
        return Err(CertificateError::IncompletePipeline(vec!["field".into()]));
    }
    let failures = r.mandatory_failures();
    let passed = failures.is_empty() && r.errors.is_empty();
    let mut errors = r.errors.clone();
    errors.extend(failures.iter().map(|f| format!("mandatory check {f} failed")));

    let mut inv = BTreeMap::new();
    let mut basis = BTreeMap::new();
    inv.insert("dim_x".into(), json!(r.s + r.t));
    basis.insert("dim_x".into(), "by-theorem".into());
    let odd = r.s % 2 == 1;
    let gated = r.detectors.as_ref().is_some_and(Detectors::certify_h2);
    if passed && (odd || gated) {
        inv.insert("b2".into(), json!(binomial2(r.s)));
        basis.insert("b2".into(), "by-theorem".into());
    } else {
        inv.insert("b2".into(), json!("uncertified"));
        basis.insert("b2".into(), "uncertified".into());
    }
    Ok(Certificate {
        schema_version: SCHEMA_VERSION.into(),
        status: if passed { "pass" } else { "fail" }.into(),
        mode: Mode::Ot.as_str().into(),
        field: r.field.clone().unwrap_or(Value::Null),
        subgroup: r.subgroup.clone().unwrap_or(Value::Null),
        checks: r.checks.clone(),
        detectors: r
            .detectors
            .as_ref()
            .map_or(Value::Null, |d| serde_json::to_value(d).expect("serializable")),
        invariants: inv,
        claim_basis: basis,
        divisors: Vec::new(),
        warnings: warnings_for(r),
        errors,
    })
}

impl Certificate {
    /// A certificate for a run that stopped early; carries whatever was
    /// computed and no invariant claims.
    pub fn stopped(r: &Reports, status: &str, error: String) -> Self {
        let mut errors = r.errors.clone();
        errors.push(error);
        let mut inv = BTreeMap::new();
        let mut basis = BTreeMap::new();
        for k in ["h2_u0_mod_w", "kodaira", "non_kahler"] {
            inv.insert(k.to_string(), json!("uncertified"));
            basis.insert(k.to_string(), "uncertified".to_string());
        }
        inv.insert("algebraic_dimension".into(), json!("unknown"));
        basis.insert("algebraic_dimension".into(), "uncertified".into());
        Self {
            schema_version: SCHEMA_VERSION.into(),
            status: status.into(),
            mode: r.mode.as_str().into(),
            field: r.field.clone().unwrap_or(Value::Null),
            subgroup: r.subgroup.clone().unwrap_or(Value::Null),
            checks: r.checks.clone(),
            detectors: r
                .detectors
                .as_ref()
                .map_or(Value::Null, |d| serde_json::to_value(d).expect("serializable")),
            invariants: inv,
            claim_basis: basis,
            divisors: r.divisors.clone(),
            warnings: warnings_for(r),
            errors,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == "pass"
    }

    /// Pretty JSON with lexicographically sorted keys and a trailing
    /// newline.
    pub fn to_json(&self) -> String {
        let v = serde_json::to_value(self).expect("certificate is serializable");
        let mut s = serde_json::to_string_pretty(&v).expect("value is serializable");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    /// No numeric `h2`/`b2`/algebraic dimension unless the detectors that
    /// gate them passed (odd `s` needs none in OT mode).
    pub fn gating_sound(&self) -> bool {
        let certified = serde_json::from_value::<Detectors>(self.detectors.clone())
            .is_ok_and(|d| d.certify_h2())
            && self.passed();
        let numeric = |k: &str| self.invariants.get(k).is_some_and(Value::is_number);
        match self.mode.as_str() {
            "ot" => {
                let odd_s = self
                    .field
                    .get("signature")
                    .and_then(|s| s.get(0))
                    .and_then(Value::as_u64)
                    .is_some_and(|s| s % 2 == 1);
                !numeric("b2") || (self.passed() && (odd_s || certified))
            }
            _ => (!numeric("h2_u0_mod_w") && !numeric("algebraic_dimension")) || certified,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base(b: usize, det: Detectors) -> Reports {
        let mut r = Reports {
            mode: Mode::Construction,
            s: 2,
            t: 1,
            b,
            field: Some(json!({"signature": [2, 1]})),
            subgroup: Some(json!({"b": b})),
            detectors: Some(det),
            ..Default::default()
        };
        for name in CONSTRUCTION_CHECKS {
            r.add(name, Check::mandatory(true, None, Value::Null));
        }
        r
    }

    #[test]
    fn reciprocal_w_leaves_h2_open() {
        let d = Detectors {
            reciprocal: vec![true],
            non_reciprocal_generator: false,
            invariant_pairs: vec![(1, 2), (3, 4)],
        };
        let c = assemble(&base(1, d)).unwrap();
        assert_eq!(c.invariants["b1"], json!(1));
        assert_eq!(c.invariants["dim_y"], json!(3));
        assert_eq!(c.invariants["kodaira"], json!("-infinity"));
        assert_eq!(c.invariants["h2_u0_mod_w"], json!("uncertified"));
        assert_eq!(c.invariants["algebraic_dimension"], json!("unknown"));
        assert!(c.gating_sound());
    }

    #[test]
    fn certified_detector_gives_binomial() {
        let d = Detectors {
            reciprocal: vec![false, false, false],
            non_reciprocal_generator: true,
            invariant_pairs: vec![],
        };
        let c = assemble(&base(3, d)).unwrap();
        assert_eq!(c.invariants["h2_u0_mod_w"], json!(3));
        assert_eq!(c.invariants["algebraic_dimension"], json!(0));
        assert!(c.gating_sound());
    }

    #[test]
    fn failed_check_withdraws_claims() {
        let d = Detectors {
            reciprocal: vec![false],
            non_reciprocal_generator: true,
            invariant_pairs: vec![],
        };
        let mut r = base(1, d);
        r.add("domain.tiling", Check::mandatory(false, None, Value::Null));
        let c = assemble(&r).unwrap();
        assert_eq!(c.status, "fail");
        assert_eq!(c.invariants["algebraic_dimension"], json!("unknown"));
        assert!(c.gating_sound());
    }

    #[test]
    fn incomplete_pipeline() {
        let r = Reports::default();
        assert!(matches!(assemble(&r), Err(CertificateError::IncompletePipeline(_))));
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let d = Detectors {
            reciprocal: vec![true],
            non_reciprocal_generator: false,
            invariant_pairs: vec![(1, 2)],
        };
        let mut r = base(1, d);
        r.add("x.float", Check::below(1.234_567_890_123e-12, 1e-9));
        let c = assemble(&r).unwrap();
        let s1 = c.to_json();
        let s2 = Certificate::from_json(&s1).unwrap().to_json();
        assert_eq!(s1, s2);
        let keys: Vec<&String> = c.checks.keys().collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }

    #[test]
    fn ot_odd_and_even() {
        let mut r = Reports {
            mode: Mode::Ot,
            s: 3,
            t: 1,
            b: 3,
            field: Some(json!({"signature": [3, 1]})),
            ..Default::default()
        };
        let c = ot_certificate(&r, 2.0).unwrap();
        assert_eq!(c.invariants["b2"], json!(3));
        assert!(c.gating_sound());
        assert!(matches!(ot_certificate(&r, 0.0), Err(CertificateError::NotAdmissible(_))));
        r.s = 2;
        r.b = 2;
        let c = ot_certificate(&r, 2.0).unwrap();
        assert_eq!(c.invariants["b2"], json!("uncertified"));
        r.s = 1;
        r.b = 1;
        assert_eq!(ot_certificate(&r, 2.0).unwrap().invariants["b2"], json!(0));
    }
}
