//! Acceptance criteria, one line each. Runs without the libtest harness so
//! the report is always printed.

use std::cell::Cell;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::Instant;

use nkcert::ambient::{build_frame, check_pi_h_injective};
use nkcert::certificate::{binomial2, Mode};
use nkcert::config::RunConfig;
use nkcert::domain::{tiling_check, DomainSpec};
use nkcert::fan::{build_fan_s2, check_action, divisor_certificate};
use nkcert::field::{validate_field, FieldElement, Irreducibility, NumberField};
use nkcert::pipeline::{run, RunStatus};
use nkcert::poly::{IntPoly, QPoly, Q};
use nkcert::qmat::QMatrix;
use nkcert::salem::enum_salem4;
use nkcert::units::{
    check_assumption_c, check_ot_admissible, invariant_pair_detector, is_reciprocal, log_embedding,
    phi_b, word, AssumptionC, Labeling, SubgroupW, UnitElt,
};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn salem_field() -> NumberField {
    validate_field(&IntPoly::from_i64(&[1, -1, -1, -1, 1]), None).unwrap()
}

fn load(name: &str) -> RunConfig {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name);
    RunConfig::from_toml(&std::fs::read_to_string(p).unwrap()).unwrap()
}

/// Largest real root of the Salem quartic by bisection on `[1, 2]`.
fn alpha_by_bisection() -> f64 {
    let p = |x: f64| x.powi(4) - x.powi(3) - x * x - x + 1.0;
    let (mut lo, mut hi) = (1.5, 2.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if p(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let f = salem_field();
    ensure(f.signature() == (2, 1), format!("signature {:?}", f.signature()))?;
    let sig = f.sigma(&f.generator());
    ensure((1.722..1.723).contains(&sig[0].re), format!("sigma_1 = {}", sig[0].re))?;
    ensure((sig[2].norm() - 1.0).abs() < 1e-9, "|sigma_3| != 1")?;
    let companion = QMatrix::from_i64_rows(&[&[0, 0, 0, -1], &[1, 0, 0, 1], &[0, 1, 0, 1], &[0, 0, 1, 1]]);
    ensure(f.mult_matrix(&f.generator()) == companion, "multiplication by alpha is not the companion matrix")?;

    let alpha = UnitElt::new(&f, f.generator()).unwrap();
    let one_minus = f.one().sub(&f.generator());
    let mut w = SubgroupW::new(vec![alpha.clone()], 2);
    let c = check_assumption_c(&mut w, 10).unwrap();
    ensure(c == AssumptionC::Exact, format!("Assumption C for <alpha>: {c:?}"))?;
    ensure(is_reciprocal(&f, &f.generator()).unwrap(), "alpha not reciprocal")?;
    ensure(!is_reciprocal(&f, &one_minus).unwrap(), "1 - alpha reciprocal")?;
    let m = f.min_poly_elt(&one_minus).unwrap();
    ensure(m == QPoly::from_i64(&[-1, 2, 2, -3, 1]), format!("min_poly(1 - alpha) = {m}"))?;

    let pairs = invariant_pair_detector(&w, 4, 1e-9);
    ensure(pairs == vec![(1, 2), (3, 4)], format!("pairs for <alpha>: {pairs:?}"))?;
    let u = UnitElt::new(&f, one_minus).unwrap();
    let sq = u.mul(&u, &f);
    let wbar = SubgroupW::new(vec![sq], 2);
    let pairs = invariant_pair_detector(&wbar, 4, 1e-9);
    ensure(pairs.is_empty(), format!("pairs for <(1 - alpha)^2>: {pairs:?}"))?;

    let out = run(&load("salem4_alpha.toml"));
    ensure(out.status == RunStatus::Pass, format!("W run: {:?}", out.certificate.errors))?;
    let inv = &out.certificate.invariants;
    ensure(inv["b1"] == json!(1) && inv["dim_y"] == json!(3), "b1/dim")?;
    ensure(inv["kodaira"] == json!("-infinity"), "kodaira")?;
    ensure(inv["algebraic_dimension"] == json!("unknown"), "algebraic dimension for W")?;
    let out = run(&load("salem4_conjugate.toml"));
    ensure(out.status == RunStatus::Pass, format!("W-bar run: {:?}", out.certificate.errors))?;
    ensure(
        out.certificate.invariants["algebraic_dimension"] == json!(0),
        "algebraic dimension for W-bar",
    )?;
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 10.0, format!("runtime {secs:.2} s"))?;
    Ok(format!("alpha = {:.8}, runtime {secs:.2} s", sig[0].re))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let f = salem_field();
    let mut w = SubgroupW::new(vec![UnitElt::new(&f, f.generator()).unwrap()], 2);
    check_assumption_c(&mut w, 10).unwrap();
    let fan = build_fan_s2(&f, w, 64).map_err(|e| format!("{e:?}"))?;
    let a = check_action(&fan);
    ensure(a.free && a.properly_discontinuous && a.invariant, format!("{a:?}"))?;
    let spec = DomainSpec::from_fan(&fan).map_err(|e| format!("{e:?}"))?;
    let rep = tiling_check(&spec, 1000, 42).ok_or("no R_fit")?;
    ensure(rep.tiled == 1000 && rep.gap_count == 0, format!("tiled {}/1000", rep.tiled))?;
    ensure((rep.c_lower - 1.0).abs() < 1e-9, format!("C = {}", rep.c_lower))?;
    ensure(rep.passed(), format!("{rep:?}"))?;
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 10.0, format!("runtime {secs:.2} s"))?;
    Ok(format!("1000/1000 tiled, C = {}, runtime {secs:.2} s", rep.c_lower))
}

fn criterion_3() -> Outcome {
    let f = salem_field();
    let mut w = SubgroupW::new(vec![UnitElt::new(&f, f.generator()).unwrap()], 2);
    check_assumption_c(&mut w, 10).unwrap();
    let fan = build_fan_s2(&f, w, 8).unwrap();
    let ray = fan.sigma()[0].rays()[1].v.clone();
    let d = divisor_certificate(&f, &fan, &ray).map_err(|e| format!("{e:?}"))?;
    ensure(d.complete && d.quotient_dim == 1 && d.quotient_rays.len() == 2, format!("{d:?}"))?;
    let res = d.elliptic_residual.ok_or("no elliptic residual")?;
    ensure(res < 1e-9, format!("residual {res:e}"))?;
    Ok(format!("{} quotient, residual {res:e}", d.classification))
}

fn runner() -> TestRunner {
    TestRunner::new_with_rng(Config::with_cases(64), TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn criterion_4() -> Outcome {
    let f = salem_field();
    let gens = vec![
        UnitElt::new(&f, f.generator()).unwrap(),
        UnitElt::new(&f, f.one().sub(&f.generator())).unwrap(),
    ];
    let gens_sq: Vec<UnitElt> = gens.iter().map(|g| g.mul(g, &f)).collect();
    let words2 = (-5i64..=5, -5i64..=5);
    let mut notes = Vec::new();

    // phi additivity
    let worst = Cell::new(0.0f64);
    runner()
        .run(&(words2.clone(), words2.clone()), |((a1, a2), (b1, b2))| {
            let u = word(&f, &gens_sq, &[a1, a2]);
            let v = word(&f, &gens_sq, &[b1, b2]);
            let uv = u.mul(&v, &f);
            let id = Labeling::identity(2);
            let lhs = phi_b(&uv, 1, &id).unwrap();
            let rhs = phi_b(&u, 1, &id).unwrap().add_scaled(&phi_b(&v, 1, &id).unwrap(), 1.0);
            worst.set(worst.get().max(lhs.max_abs_diff(&rhs)));
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    ensure(worst.get() < 1e-9, format!("phi additivity {:e}", worst.get()))?;
    notes.push(format!("phi {:.1e}", worst.get()));

    // log embedding sums to ln |N| = 0
    let worst = Cell::new(0.0f64);
    runner()
        .run(&words2, |(a1, a2)| {
            let u = word(&f, &gens, &[a1, a2]);
            let s: f64 = log_embedding(&u).iter().sum();
            worst.set(worst.get().max(s.abs()));
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    ensure(worst.get() < 1e-9, format!("log sum {:e}", worst.get()))?;
    notes.push(format!("ell {:.1e}", worst.get()));

    // sigma multiplicativity and min-poly agreement on random elements
    let elt = prop::collection::vec(-6i64..=6, 4);
    let worst = Cell::new(0.0f64);
    runner()
        .run(&(elt.clone(), elt.clone()), |(x, y)| {
            let (x, y) = (FieldElement::from_i64(&x), FieldElement::from_i64(&y));
            let xy = f.mul(&x, &y);
            let (sx, sy, sxy) = (f.sigma(&x), f.sigma(&y), f.sigma(&xy));
            for i in 0..4 {
                let p = sx[i] * sy[i];
                worst.set(worst.get().max((sxy[i] - p).norm() / (1.0 + p.norm())));
            }
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    ensure(worst.get() < 1e-9, format!("sigma multiplicativity {:e}", worst.get()))?;
    notes.push(format!("sigma {:.1e}", worst.get()));

    let mismatches = Cell::new(0usize);
    runner()
        .run(&elt, |x| {
            let x = FieldElement::from_i64(&x);
            if f.min_poly_elt(&x).ok() != Some(f.min_poly_by_dependency(&x)) {
                mismatches.set(mismatches.get() + 1);
            }
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    ensure(mismatches.get() == 0, format!("{} min-poly mismatches", mismatches.get()))?;

    // injectivity on 10^3 lattice points, and realness of P under random
    // unimodular changes of integral basis
    let frame = build_frame(&f).map_err(|e| format!("{e:?}"))?;
    let inj = check_pi_h_injective(&frame, 1000, 20, 7).map_err(|e| format!("{e:?}"))?;
    ensure(
        inj.min_separation_h > 1e-6 && inj.min_separation_htilde > 1e-6,
        format!("{inj:?}"),
    )?;
    notes.push(format!("sep {:.3}/{:.3}", inj.min_separation_h, inj.min_separation_htilde));

    let worst = Cell::new(0.0f64);
    let upper = prop::collection::vec(-3i64..=3, 6);
    runner()
        .run(&upper, |u| {
            let mut rows = vec![vec![0i64; 4]; 4];
            let mut k = 0;
            for (i, row) in rows.iter_mut().enumerate() {
                row[i] = 1;
                for cell in row.iter_mut().skip(i + 1) {
                    *cell = u[k];
                    k += 1;
                }
            }
            let refs: Vec<&[i64]> = rows.iter().map(Vec::as_slice).collect();
            let basis = QMatrix::from_i64_rows(&refs);
            let g = validate_field(&IntPoly::from_i64(&[1, -1, -1, -1, 1]), Some(basis)).unwrap();
            let fr = build_frame(&g).unwrap();
            worst.set(worst.get().max(fr.realness_residual()));
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    ensure(worst.get() < 1e-9, format!("max Im P = {:e}", worst.get()))?;
    notes.push(format!("Im P {:.1e}", worst.get()));
    Ok(format!("64 cases each: {}", notes.join(", ")))
}

fn trim(mut p: Vec<Q>) -> Vec<Q> {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn rem(a: &[Q], b: &[Q]) -> Vec<Q> {
    let mut r = a.to_vec();
    let lb = b.last().unwrap().clone();
    while r.len() >= b.len() && !r.is_empty() {
        let k = r.last().unwrap().clone() / &lb;
        let shift = r.len() - b.len();
        for (i, c) in b.iter().enumerate() {
            r[shift + i] = &r[shift + i] - &k * c;
        }
        r.pop();
        r = trim(r);
    }
    r
}

/// Number of distinct real roots by Sturm's theorem.
fn sturm_real_roots(coeffs: &[i64]) -> usize {
    let p: Vec<Q> = coeffs.iter().map(|&c| Q::from_integer(BigInt::from(c))).collect();
    let dp: Vec<Q> = p
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * Q::from_integer(BigInt::from(i as i64)))
        .collect();
    let mut seq = vec![p, dp];
    loop {
        let n = seq.len();
        let r: Vec<Q> = rem(&seq[n - 2], &seq[n - 1]).into_iter().map(|c| -c).collect();
        if r.is_empty() {
            break;
        }
        seq.push(r);
    }
    let changes = |signs: Vec<i32>| {
        let s: Vec<i32> = signs.into_iter().filter(|&v| v != 0).collect();
        s.windows(2).filter(|w| w[0] != w[1]).count()
    };
    let sgn = |q: &Q| if q.is_positive() { 1 } else if q.is_negative() { -1 } else { 0 };
    let at_pos: Vec<i32> = seq.iter().map(|q| sgn(q.last().unwrap())).collect();
    let at_neg: Vec<i32> = seq
        .iter()
        .map(|q| {
            let d = q.len() - 1;
            sgn(q.last().unwrap()) * if d % 2 == 0 { 1 } else { -1 }
        })
        .collect();
    changes(at_neg) - changes(at_pos)
}

/// First monic quintic (coefficients in `[-2, 2]`, constant term first)
/// with three real roots, certified irreducible, and `theta`, `theta - 1`,
/// `theta + 1` all units.
fn odd_s_field() -> Option<(Vec<i64>, NumberField)> {
    let r = -2i64..=2;
    for a1 in r.clone() {
        for a2 in r.clone() {
            for a3 in r.clone() {
                for a4 in r.clone() {
                    for a0 in [1i64, -1] {
                        let c = vec![a0, a1, a2, a3, a4, 1];
                        let at = |x: i64| c.iter().rev().fold(0i64, |acc, &k| acc * x + k);
                        if at(1).abs() != 1 || at(-1).abs() != 1 || sturm_real_roots(&c) != 3 {
                            continue;
                        }
                        let Ok(f) = validate_field(&IntPoly::from_i64(&c), None) else { continue };
                        if matches!(f.irreducibility(), Irreducibility::Certified { .. }) {
                            return Some((c, f));
                        }
                    }
                }
            }
        }
    }
    None
}

fn odd_units(f: &NumberField) -> Vec<UnitElt> {
    let th = f.generator();
    [th.clone(), th.sub(&f.one()), th.add(&f.one())]
        .into_iter()
        .map(|x| UnitElt::new(f, x).unwrap())
        .collect()
}

fn criterion_5() -> Outcome {
    let (c, f) = odd_s_field().ok_or("no quintic found")?;
    ensure(f.signature() == (3, 1), format!("signature {:?}", f.signature()))?;
    let units = odd_units(&f);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut tested = 0;
    while tested < 100 {
        let e: Vec<i64> = (0..3).map(|_| rng.gen_range(-3..=3)).collect();
        if e.iter().all(|&v| v == 0) {
            continue;
        }
        let u = word(&f, &units, &e);
        ensure(!is_reciprocal(&f, u.elt()).unwrap(), format!("word {e:?} reciprocal"))?;
        tested += 1;
    }
    Ok(format!("P = {c:?} (constant first), 100/100 words non-reciprocal"))
}

fn criterion_6() -> Outcome {
    let f = salem_field();
    let a = UnitElt::new(&f, f.generator()).unwrap();
    let u = UnitElt::new(&f, f.one().sub(&f.generator())).unwrap();
    let w = SubgroupW::new(vec![a, u.mul(&u, &f)], 2);
    let rep = check_ot_admissible(&w, 2).map_err(|e| format!("{e:?}"))?;
    // oracle: real roots alpha and 1/alpha by bisection
    let al = alpha_by_bisection();
    let ai = 1.0 / al;
    let oracle = al.ln() * (2.0 * (1.0 - ai).abs().ln()) - ai.ln() * (2.0 * (1.0 - al).abs().ln());
    ensure(rep.admissible && rep.det.abs() > 1.29, format!("{rep:?}"))?;
    ensure((rep.det - oracle).abs() < 1e-9, format!("det {} vs oracle {oracle}", rep.det))?;

    let (c, g) = odd_s_field().ok_or("no quintic found")?;
    let (s, _) = g.signature();
    let text = format!(
        "[field]\nmin_poly = {c:?}\n[units]\ncandidates = [[0, 1, 0, 0, 0], [-1, 1, 0, 0, 0], [1, 1, 0, 0, 0]]\n\
         generators = [[2, 0, 0], [0, 2, 0], [0, 0, 2]]\n[run]\nmode = \"ot\"\n"
    );
    let cfg = RunConfig::from_toml(&text).map_err(|e| e.to_string())?;
    ensure(cfg.run.mode == Mode::Ot, "mode")?;
    let out = run(&cfg);
    ensure(out.status == RunStatus::Pass, format!("{:?}", out.certificate.errors))?;
    let b2 = &out.certificate.invariants["b2"];
    ensure(*b2 == json!(binomial2(s)), format!("b2 = {b2}"))?;
    Ok(format!("|det| = {:.5}, odd-s b2 = {b2}", rep.det.abs()))
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let list = enum_salem4(-10, 10);
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 5.0, format!("runtime {secs:.2} s"))?;
    for p in &list {
        // y = X + 1/X turns P into X^2 (y^2 + q1 y + q2 - 2); the pattern
        // is one y above 2 and one in (-2, 2)
        let (q1, q2) = (p.q1 as f64, p.q2 as f64);
        let d = q1 * q1 - 4.0 * (q2 - 2.0);
        ensure(d > 0.0, format!("{p:?}: no real y"))?;
        let (y1, y2) = ((-q1 - d.sqrt()) / 2.0, (-q1 + d.sqrt()) / 2.0);
        ensure(y2 > 2.0 && y1.abs() < 2.0, format!("{p:?}: y = {y1}, {y2}"))?;
        let tau = (y2 + (y2 * y2 - 4.0).sqrt()) / 2.0;
        ensure((tau - p.large_root).abs() < 1e-9 * tau, format!("{p:?}: tau {tau}"))?;
        let c = p.coeffs;
        ensure(c.iter().eq(c.iter().rev()), "not palindromic")?;
        let f = validate_field(&p.poly(), None).map_err(|e| format!("{p:?}: {e:?}"))?;
        ensure(is_reciprocal(&f, &f.generator()).unwrap(), format!("{p:?} not reciprocal"))?;
    }
    // every band member of the range is present
    let band: usize = (-10i64..=10).map(|q1| (-2 * (q1 + 1) - 2 * (q1 - 1) - 1).max(0) as usize).sum();
    ensure(list.len() == band, format!("{} of {band} band members", list.len()))?;
    ensure(list.iter().any(|p| p.q1 == -1 && p.q2 == -1), "(-1, -1) missing")?;
    Ok(format!("{} quartics in {secs:.3} s", list.len()))
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("Salem quartic golden run", criterion_1),
        ("fan action and tiling", criterion_2),
        ("divisor quotient fan", criterion_3),
        ("property suites", criterion_4),
        ("odd-s reciprocity barrier", criterion_5),
        ("OT admissibility and odd-s b2", criterion_6),
        ("salem4 enumeration", criterion_7),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panic: {msg}"))
        });
        match res {
            Ok(d) => println!("criterion {}: PASS  {name}: {d}", i + 1),
            Err(d) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {d}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
