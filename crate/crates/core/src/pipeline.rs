//! Runs every stage for a [`RunConfig`] and assembles the certificate.

use serde_json::{json, Value};

use crate::ambient::{build_frame, check_pi_h_injective, AmbientFrame};
use crate::certificate::{assemble, ot_certificate, Certificate, Check, Detectors, Mode, Reports};
use crate::config::{ConfigError, RayConfig, RunConfig};
use crate::domain::{tiling_check, tiling_of_bb, DomainSpec};
use crate::fan::{
    build_fan_s2, check_action, check_tags, cone_collapse_check, divisor_certificate, sample_support,
    Cone, QuotientFan, Ray,
};
use crate::field::{validate_field, FieldElement, Irreducibility, NumberField};
use crate::units::{
    check_assumption_c, check_ot_admissible, invariant_pair_detector, is_reciprocal, phi_b,
    search_w, word, SubgroupW, UnitElt,
};
use crate::words::words;

/// How a run ended; maps onto the process exit code.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunStatus {
    Pass,
    CheckFailure,
    ConfigError,
}

impl RunStatus {
    pub fn exit_code(self) -> i32 {
        match self {
            RunStatus::Pass => 0,
            RunStatus::CheckFailure => 1,
            RunStatus::ConfigError => 2,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub status: RunStatus,
    pub certificate: Certificate,
}

/// Everything needed downstream of the unit stage (plotting, demos).
pub struct Prepared {
    pub field: NumberField,
    pub fan: QuotientFan,
}

enum Stop {
    Config(String),
    Check(String),
}

impl From<ConfigError> for Stop {
    fn from(e: ConfigError) -> Self {
        Stop::Config(e.to_string())
    }
}

/// Certificate for a config that did not parse.
pub fn config_error_outcome(message: String) -> RunOutcome {
    let reports = Reports::default();
    RunOutcome {
        status: RunStatus::ConfigError,
        certificate: Certificate::stopped(&reports, "config_error", message),
    }
}

pub fn run(cfg: &RunConfig) -> RunOutcome {
    let mut r = Reports {
        mode: cfg.run.mode,
        ..Default::default()
    };
    match run_stages(cfg, &mut r) {
        Ok(cert) => {
            let status = if cert.passed() {
                RunStatus::Pass
            } else {
                RunStatus::CheckFailure
            };
            RunOutcome {
                status,
                certificate: cert,
            }
        }
        Err(Stop::Config(m)) => RunOutcome {
            status: RunStatus::ConfigError,
            certificate: Certificate::stopped(&r, "config_error", m),
        },
        Err(Stop::Check(m)) => RunOutcome {
            status: RunStatus::CheckFailure,
            certificate: Certificate::stopped(&r, "fail", m),
        },
    }
}

fn field_stage(cfg: &RunConfig, r: &mut Reports) -> Result<NumberField, Stop> {
    let basis = cfg.basis()?;
    let user_basis = basis.is_some();
    let field = validate_field(&cfg.min_poly(), basis).map_err(|e| Stop::Check(format!("field: {e:?}")))?;
    let (s, t) = field.signature();
    r.s = s;
    r.t = t;
    let table = field.embedding_table();
    let embeddings: Vec<[f64; 2]> = table.values().iter().map(|z| [z.re, z.im]).collect();
    r.field = Some(json!({
        "min_poly": cfg.field.min_poly,
        "degree": field.degree(),
        "signature": [s, t],
        "basis": if user_basis { "user" } else { "power" },
        "maximal_order": "not certified",
        "irreducibility": field.irreducibility(),
        "embeddings": embeddings,
    }));
    r.add("field.ring_closure", Check::mandatory(true, None, json!({ "basis": if user_basis { "user" } else { "power" } })));
    let sep = table.min_separation();
    r.add(
        "field.separation",
        Check::mandatory(sep > cfg.tolerances.separation, Some(cfg.tolerances.separation), json!({ "value": sep })),
    );
    let certified = matches!(field.irreducibility(), Irreducibility::Certified { .. });
    if !certified {
        r.warnings
            .push("no prime up to the witness bound certifies irreducibility".into());
    }
    r.add("field.irreducibility", Check::advisory(certified, None, json!(field.irreducibility())));
    Ok(field)
}

fn ambient_stage(cfg: &RunConfig, field: &NumberField, r: &mut Reports) -> Result<AmbientFrame, Stop> {
    let frame = build_frame(field).map_err(|e| Stop::Check(format!("ambient: {e:?}")))?;
    let tol = cfg.tolerances.check;
    r.add("ambient.realness", Check::below(frame.realness_residual(), tol));
    r.add("ambient.h_residual", Check::below(frame.h_residual(), tol));
    let cond = frame.condition_number();
    let cond_ok = cond < cfg.tolerances.max_condition;
    if !cond_ok {
        r.warnings.push(format!("B_K is ill-conditioned (condition number {cond:e})"));
    }
    r.add(
        "ambient.condition",
        Check::advisory(cond_ok, Some(cfg.tolerances.max_condition), json!({ "value": cond })),
    );
    let inj = check_pi_h_injective(&frame, cfg.run.injectivity_samples, cfg.run.height, cfg.run.seed);
    let check = match inj {
        Ok(rep) => Check::mandatory(
            rep.min_separation_h > cfg.tolerances.separation
                && rep.min_separation_htilde > cfg.tolerances.separation,
            Some(cfg.tolerances.separation),
            json!(rep),
        ),
        Err(e) => Check::mandatory(false, Some(cfg.tolerances.separation), json!(format!("{e:?}"))),
    };
    r.add("ambient.injectivity", check);
    Ok(frame)
}

fn unit_candidates(cfg: &RunConfig, field: &NumberField) -> Result<Vec<UnitElt>, Stop> {
    cfg.units
        .candidates
        .iter()
        .map(|c| {
            let x = FieldElement::from_i64(c);
            UnitElt::new(field, x).map_err(|e| Stop::Check(format!("units: {e:?}")))
        })
        .collect()
}

struct Built {
    w: SubgroupW,
    words: Vec<Vec<i64>>,
    squared: Vec<bool>,
    inverted: Vec<bool>,
    source: &'static str,
}

fn explicit_w(field: &NumberField, cands: &[UnitElt], words: &[Vec<i64>], s: usize) -> Built {
    let gens: Vec<UnitElt> = words.iter().map(|wd| word(field, cands, wd)).collect();
    let b = gens.len();
    Built {
        w: SubgroupW::new(gens, s),
        words: words.to_vec(),
        squared: vec![false; b],
        inverted: vec![false; b],
        source: "config",
    }
}

fn subgroup_summary(built: &Built) -> Value {
    let w = &built.w;
    let gens: Vec<Value> = w
        .generators()
        .iter()
        .enumerate()
        .map(|(i, g)| {
            json!({
                "coords": g.elt().to_json(),
                "word": built.words[i],
                "squared": built.squared[i],
                "inverted": built.inverted[i],
                "real_profile": g.real_profile(),
            })
        })
        .collect();
    json!({
        "b": w.b(),
        "source": built.source,
        "generators": gens,
        "labeling": w.labeling().perm().iter().map(|k| k + 1).collect::<Vec<_>>(),
        "assumption_c": w.assumption_c(),
    })
}

fn detectors(field: &NumberField, w: &SubgroupW, tol: f64) -> Result<Detectors, Stop> {
    let reciprocal = w
        .generators()
        .iter()
        .map(|g| is_reciprocal(field, g.elt()))
        .collect::<Result<Vec<bool>, _>>()
        .map_err(|e| Stop::Check(format!("detectors: {e:?}")))?;
    Ok(Detectors {
        non_reciprocal_generator: reciprocal.iter().any(|r| !r),
        reciprocal,
        invariant_pairs: invariant_pair_detector(w, field.degree(), tol),
    })
}

fn unit_checks(w: &SubgroupW, r: &mut Reports) {
    r.add(
        "units.independent",
        Check::mandatory(w.is_independent(), Some(crate::tol::LINEAR), json!({ "log_rank": w.log_rank() })),
    );
    r.add(
        "units.totally_positive",
        Check::mandatory(w.is_totally_positive(), None, Value::Null),
    );
}

fn run_stages(cfg: &RunConfig, r: &mut Reports) -> Result<Certificate, Stop> {
    let field = field_stage(cfg, r)?;
    let (s, t) = field.signature();
    let b = match cfg.run.mode {
        Mode::Ot => cfg.units.b.or(cfg.units.generators.as_ref().map(Vec::len)).unwrap_or(s),
        _ => cfg.requested_b().unwrap_or(1),
    };
    r.b = b;
    match cfg.run.mode {
        Mode::Construction if b == 0 || b >= s => {
            return Err(Stop::Config(format!("construction mode needs 1 <= b < s, got b = {b}, s = {s}")));
        }
        Mode::Ot if b != s => return Err(Stop::Config(format!("OT mode needs b = s = {s}, got {b}"))),
        Mode::Lvmb if b != 0 => return Err(Stop::Config(format!("LVMB mode needs b = 0, got {b}"))),
        _ => {}
    }
    if cfg.run.mode == Mode::Construction && s > 2 && cfg.fan.is_none() {
        return Err(Stop::Config(format!("s = {s} needs an explicit [fan] section")));
    }
    if t == 0 && cfg.run.mode != Mode::Ot {
        return Err(Stop::Check("ambient: NoComplexEmbeddings".into()));
    }
    let frame = if t > 0 { Some(ambient_stage(cfg, &field, r)?) } else { None };
    let cands = unit_candidates(cfg, &field)?;

    match cfg.run.mode {
        Mode::Lvmb => {
            r.subgroup = Some(json!({ "b": 0, "generators": [] }));
            r.detectors = Some(Detectors {
                reciprocal: Vec::new(),
                non_reciprocal_generator: false,
                invariant_pairs: Vec::new(),
            });
            assemble(r).map_err(|e| Stop::Check(e.to_string()))
        }
        Mode::Ot => {
            let Some(words) = &cfg.units.generators else {
                return Err(Stop::Config("OT mode needs explicit [units] generators".into()));
            };
            let built = explicit_w(&field, &cands, words, s);
            unit_checks(&built.w, r);
            if let Some(fr) = &frame {
                let res = fr
                    .check_conjugation(&field, built.w.generators())
                    .map_err(|e| Stop::Check(format!("ambient: {e:?}")))?;
                r.add("ambient.conjugation", Check::below(res, cfg.tolerances.check));
            }
            r.subgroup = Some(subgroup_summary(&built));
            r.detectors = Some(detectors(&field, &built.w, cfg.tolerances.check)?);
            let ot = check_ot_admissible(&built.w, s).map_err(|e| Stop::Check(format!("units: {e:?}")))?;
            r.add(
                "ot.admissible",
                Check::mandatory(ot.admissible, Some(crate::tol::OT_DET), json!(ot)),
            );
            ot_certificate(r, ot.det).map_err(|e| Stop::Check(format!("certificate: {e:?}")))
        }
        Mode::Construction => {
            let frame = frame.expect("t > 0 checked above");
            let mut built = match &cfg.units.generators {
                Some(words) => explicit_w(&field, &cands, words, s),
                None => {
                    let out = search_w(&field, &cands, b, cfg.units.search_window, cfg.run.c_window)
                        .map_err(|e| Stop::Check(format!("units: {e:?}")))?;
                    Built {
                        words: out.picks.iter().map(|p| p.word.clone()).collect(),
                        squared: out.picks.iter().map(|p| p.squared).collect(),
                        inverted: out.picks.iter().map(|p| p.inverted).collect(),
                        w: out.w,
                        source: "search",
                    }
                }
            };
            let c = check_assumption_c(&mut built.w, cfg.run.c_window)
                .map_err(|e| Stop::Check(format!("units: {e:?}")))?;
            r.add("units.assumption_c", Check::mandatory(c.holds(), Some(crate::tol::SIGN_ZERO), json!(c)));
            for i in 0..built.w.b() {
                let phi = phi_b(&built.w.generators()[i], built.w.b(), built.w.labeling())
                    .map_err(|e| Stop::Check(format!("units: {e:?}")))?;
                if !phi.has_positive_row() {
                    built.w.invert_generator(i, &field);
                    built.inverted[i] = !built.inverted[i];
                }
            }
            unit_checks(&built.w, r);
            let res = frame
                .check_conjugation(&field, built.w.generators())
                .map_err(|e| Stop::Check(format!("ambient: {e:?}")))?;
            r.add("ambient.conjugation", Check::below(res, cfg.tolerances.check));
            let quotient = built
                .w
                .generators()
                .iter()
                .map(|g| frame.quotient_action_residual(&field, g, cfg.run.seed))
                .fold(0.0f64, f64::max);
            r.add("ambient.quotient_action", Check::below(quotient, cfg.tolerances.check));
            r.subgroup = Some(subgroup_summary(&built));
            r.detectors = Some(detectors(&field, &built.w, cfg.tolerances.check)?);

            let fan = build_fan(cfg, &field, built.w.clone())?;
            // the fan may have re-oriented the generators
            for (i, g) in fan.w().generators().iter().enumerate() {
                if g.elt() != built.w.generators()[i].elt() {
                    built.inverted[i] = !built.inverted[i];
                }
            }
            built.w = fan.w().clone();
            r.subgroup = Some(subgroup_summary(&built));
            fan_checks(cfg, &field, &fan, r);
            domain_checks(cfg, &fan, r);
            assemble(r).map_err(|e| Stop::Check(e.to_string()))
        }
    }
}

fn build_fan(cfg: &RunConfig, field: &NumberField, w: SubgroupW) -> Result<QuotientFan, Stop> {
    let (s, _) = field.signature();
    let window = cfg.run.window;
    let Some(fc) = &cfg.fan else {
        return build_fan_s2(field, w, window).map_err(|e| Stop::Check(format!("fan: {e:?}")));
    };
    let perm = w.labeling().perm().to_vec();
    let mut cones = Vec::new();
    for c in &fc.cones {
        let mut rays = Vec::new();
        for rc in &c.rays {
            let ray = match rc {
                RayConfig::Vector(v) => {
                    if v.len() != s {
                        return Err(Stop::Config(format!("ray {v:?} must have {s} coordinates")));
                    }
                    Ray::new(v.clone())
                }
                RayConfig::Tag { tag } => {
                    let x = FieldElement::from_i64(tag);
                    let sig = field.sigma(&x);
                    Ray::tagged(perm.iter().map(|&k| sig[k].re).collect(), x)
                }
            };
            rays.push(ray);
        }
        cones.push(Cone::new(rays).map_err(|e| Stop::Config(format!("fan: {e:?}")))?);
    }
    QuotientFan::new(cones, w, s, window).map_err(|e| Stop::Config(format!("fan: {e:?}")))
}

fn fan_checks(cfg: &RunConfig, field: &NumberField, fan: &QuotientFan, r: &mut Reports) {
    let action = check_action(fan);
    let ok = action.free
        && action.properly_discontinuous
        && action.invariant
        && action.fan_property
        && action.representatives_distinct;
    r.add("fan.action", Check::mandatory(ok, Some(crate::tol::MEMBERSHIP), json!(action)));
    let support = sample_support(fan, cfg.run.samples, cfg.run.seed);
    r.add(
        "fan.support",
        Check::mandatory(
            support.overlaps == 0 && support.covered == support.samples,
            Some(crate::tol::MEMBERSHIP),
            json!(support),
        ),
    );
    let tags = check_tags(field, fan, cfg.run.window.min(8));
    r.add(
        "fan.tags",
        Check::mandatory(
            tags.integral && tags.direction_residual < cfg.tolerances.check,
            Some(cfg.tolerances.check),
            json!(tags),
        ),
    );
    // collapse of the cones C_delta towards L under the generators
    let mut collapse_ok = true;
    let mut details = Vec::new();
    for i in 0..fan.b() {
        let mut e = vec![0; fan.b()];
        e[i] = 1;
        match cone_collapse_check(1.0, &fan.profile(&e), fan.b(), cfg.run.collapse_k_max, cfg.run.seed) {
            Ok(rep) => details.push(json!(rep)),
            Err(err) => {
                collapse_ok = false;
                details.push(json!(format!("{err:?}")));
            }
        }
    }
    r.add("fan.collapse", Check::advisory(collapse_ok, None, json!(details)));

    // one divisor per orbit of rays
    let same = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| (x - y).abs() < crate::tol::MEMBERSHIP);
    let translates: Vec<Vec<f64>> = words(fan.b(), fan.window(), true).iter().map(|wd| fan.profile(wd)).collect();
    let mut reps: Vec<Vec<f64>> = Vec::new();
    for c in fan.sigma() {
        for u in c.unit_rays() {
            let seen = reps.iter().any(|v| {
                translates.iter().any(|p| {
                    let moved: Vec<f64> = v.iter().zip(p).map(|(a, e)| a * e).collect();
                    let n = moved.iter().map(|x| x * x).sum::<f64>().sqrt();
                    let moved: Vec<f64> = moved.iter().map(|x| x / n).collect();
                    same(&moved, u)
                })
            });
            if !seen {
                reps.push(u.clone());
            }
        }
    }
    let mut all_complete = true;
    for ray in &reps {
        match divisor_certificate(field, fan, ray) {
            Ok(d) => {
                all_complete &= d.complete;
                r.divisors.push(json!(d));
            }
            Err(e) => {
                all_complete = false;
                r.divisors.push(json!({ "ray": ray, "error": format!("{e:?}") }));
            }
        }
    }
    r.add("fan.divisors", Check::advisory(all_complete, None, json!({ "rays": reps.len() })));
}

fn domain_checks(cfg: &RunConfig, fan: &QuotientFan, r: &mut Reports) {
    let spec = match DomainSpec::from_fan(fan) {
        Ok(s) => s,
        Err(e) => {
            r.add("domain.tiling", Check::mandatory(false, None, json!(format!("{e:?}"))));
            return;
        }
    };
    match tiling_check(&spec, cfg.run.samples, cfg.run.seed) {
        Some(rep) => r.add(
            "domain.tiling",
            Check::mandatory(rep.passed(), Some(crate::tol::CLOSURE), json!(rep)),
        ),
        None => r.add(
            "domain.tiling",
            Check::mandatory(false, None, json!("no finite R_fit")),
        ),
    }
    let cov = tiling_of_bb(&spec, cfg.run.samples, cfg.run.seed);
    r.add("domain.coverage", Check::mandatory(cov.passed(), None, json!(cov)));
}

/// Field and fan for plotting. `None` means the config does not describe
/// a construction-mode run with a fan.
pub fn prepare(cfg: &RunConfig) -> Result<Prepared, String> {
    let field = validate_field(&cfg.min_poly(), cfg.basis().map_err(|e| e.to_string())?)
        .map_err(|e| format!("field: {e}"))?;
    let (s, _) = field.signature();
    let cands = cfg
        .units
        .candidates
        .iter()
        .map(|c| UnitElt::new(&field, FieldElement::from_i64(c)))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| format!("units: {e}"))?;
    let b = cfg.requested_b().unwrap_or(1);
    let mut w = match &cfg.units.generators {
        Some(words) => explicit_w(&field, &cands, words, s).w,
        None => {
            if b >= s {
                return Err(format!("need 1 <= b < s, got b = {b}, s = {s}"));
            }
            search_w(&field, &cands, b, cfg.units.search_window, cfg.run.c_window)
                .map_err(|e| format!("units: {e}"))?
                .w
        }
    };
    check_assumption_c(&mut w, cfg.run.c_window).map_err(|e| format!("units: {e}"))?;
    let fan = build_fan(cfg, &field, w).map_err(|e| match e {
        Stop::Config(m) | Stop::Check(m) => m,
    })?;
    Ok(Prepared { field, fan })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(extra: &str) -> RunConfig {
        let text = format!(
            "[field]\nmin_poly = [1, -1, -1, -1, 1]\n\n[units]\ncandidates = [[0, 1, 0, 0], [1, -1, 0, 0]]\n{extra}\n[run]\nwindow = 16\nsamples = 200\ninjectivity_samples = 200\n"
        );
        RunConfig::from_toml(&text).unwrap()
    }

    #[test]
    fn salem_alpha_passes() {
        let out = run(&cfg("generators = [[1, 0]]"));
        assert_eq!(out.status, RunStatus::Pass, "{}", out.certificate.to_json());
        let c = &out.certificate;
        assert_eq!(c.invariants["b1"], json!(1));
        assert_eq!(c.invariants["algebraic_dimension"], json!("unknown"));
        assert_eq!(c.detectors["invariant_pairs"], json!([[1, 2], [3, 4]]));
        assert_eq!(c.divisors.len(), 2);
        assert!(c.gating_sound());
    }

    #[test]
    fn salem_conjugate_square_certifies() {
        let out = run(&cfg("generators = [[0, 2]]"));
        assert_eq!(out.status, RunStatus::Pass, "{}", out.certificate.to_json());
        assert_eq!(out.certificate.invariants["algebraic_dimension"], json!(0));
        assert_eq!(out.certificate.invariants["h2_u0_mod_w"], json!(0));
    }

    #[test]
    fn search_finds_alpha() {
        let out = run(&cfg("b = 1"));
        assert_eq!(out.status, RunStatus::Pass);
        assert_eq!(out.certificate.subgroup["source"], json!("search"));
    }

    #[test]
    fn b_equal_s_is_config_error() {
        let out = run(&cfg("b = 2"));
        assert_eq!(out.status, RunStatus::ConfigError);
        assert_eq!(out.certificate.status, "config_error");
    }

    #[test]
    fn non_unit_fails() {
        let text = "[field]\nmin_poly = [1, -1, -1, -1, 1]\n[units]\ncandidates = [[2, 0, 0, 0]]\ngenerators = [[1]]\n";
        let out = run(&RunConfig::from_toml(text).unwrap());
        assert_eq!(out.status, RunStatus::CheckFailure);
        assert!(out.certificate.errors.iter().any(|e| e.contains("NotAUnit")));
    }

    #[test]
    fn ot_salem() {
        let text = "[field]\nmin_poly = [1, -1, -1, -1, 1]\n[units]\ncandidates = [[0, 1, 0, 0], [1, -1, 0, 0]]\ngenerators = [[1, 0], [0, 2]]\n[run]\nmode = \"ot\"\ninjectivity_samples = 100\n";
        let out = run(&RunConfig::from_toml(text).unwrap());
        assert_eq!(out.status, RunStatus::Pass, "{}", out.certificate.to_json());
        let det = out.certificate.checks["ot.admissible"].detail["det"].as_f64().unwrap();
        assert!(det.abs() > 1.29);
        assert_eq!(out.certificate.invariants["b2"], json!(1));
    }
}
