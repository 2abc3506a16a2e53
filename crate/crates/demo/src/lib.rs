//! WebAssembly bindings for the static page in `www/`. Every export
//! returns a string (SVG or JSON) so the page needs no glue beyond the
//! generated module.

use nkcert::config::RunConfig;
use nkcert::domain::{DPart, DomainSpec};
use nkcert::pipeline::prepare;
use nkcert::plot::plot_config;
use nkcert::salem::enum_salem4;
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Config for `W = <alpha>` with `alpha` the root of
/// `X^4 + q1 X^3 + q2 X^2 + q1 X + 1`; the root is a unit since the
/// constant term is 1.
fn salem_config(q1: i32, q2: i32, window: u32) -> Result<RunConfig, String> {
    let text = format!(
        "[field]\nmin_poly = [1, {q1}, {q2}, {q1}, 1]\n[units]\ncandidates = [[0, 1, 0, 0]]\ngenerators = [[1]]\n[run]\nwindow = {window}\n"
    );
    RunConfig::from_toml(&text).map_err(|e| e.to_string())
}

fn error_json(msg: impl std::fmt::Display) -> String {
    json!({ "error": msg.to_string() }).to_string()
}

/// Salem quartics with `q1` in the range, as a JSON array.
#[wasm_bindgen]
pub fn salem_quartics(q1_min: i32, q1_max: i32) -> String {
    if q1_max - q1_min > 40 {
        return error_json("range too large");
    }
    serde_json::to_string(&enum_salem4(q1_min.into(), q1_max.into())).expect("serializable")
}

/// Fan orbit and fundamental domain of the quartic `(q1, q2)` as SVG. On
/// failure returns an SVG with the message.
#[wasm_bindgen]
pub fn fan_svg(q1: i32, q2: i32, window: u32) -> String {
    let res = salem_config(q1, q2, window.min(24)).and_then(|c| plot_config(&c).map_err(|e| e.to_string()));
    match res {
        Ok(svg) => svg,
        Err(e) => format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"60\"><text x=\"10\" y=\"30\">{}</text></svg>\n",
            e.replace('<', "&lt;")
        ),
    }
}

/// Which part of the fundamental domain `(x, y)` lies in, with the
/// witness word, plus the word bringing `x` into the strip `B`.
#[wasm_bindgen]
pub fn locate_point(q1: i32, q2: i32, x: f64, y: f64) -> String {
    let prepared = match salem_config(q1, q2, 64).and_then(|c| prepare(&c)) {
        Ok(p) => p,
        Err(e) => return error_json(e),
    };
    let spec = match DomainSpec::from_fan(&prepared.fan) {
        Ok(s) => s,
        Err(e) => return error_json(format!("{e:?}")),
    };
    let p = [x, y];
    let d = spec.in_d(&p).map(|m| {
        json!({
            "part": match m.part { DPart::D1 => "D1", DPart::D2 => "D2" },
            "word": m.word,
        })
    });
    json!({
        "point": p,
        "in_b": spec.in_b(&p),
        "domain": d,
        "strip_word": if x > 0.0 { spec.locate_b(&p, 0.0) } else { None },
    })
    .to_string()
}
