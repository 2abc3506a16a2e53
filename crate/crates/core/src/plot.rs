//! SVG drawing of the fan orbit, the strip `B` and the two parts of the
//! fundamental domain, for two real embeddings and `b = 1`.

use std::fmt::Write;

use thiserror::Error;

use crate::config::RunConfig;
use crate::domain::DomainSpec;
use crate::fan::QuotientFan;
use crate::field::validate_field;
use crate::pipeline::prepare;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlotError {
    #[error("plotting needs s = 2 and b = 1, got s = {s}, b = {b}")]
    UnsupportedDimension { s: usize, b: usize },
    #[error("{0}")]
    Pipeline(String),
}

const SIZE: f64 = 600.0;
const MARGIN: f64 = 40.0;

struct View {
    xmax: f64,
    ymax: f64,
}

impl View {
    fn px(&self, x: f64, y: f64) -> (f64, f64) {
        let w = SIZE - 2.0 * MARGIN;
        (MARGIN + x / self.xmax * w, SIZE / 2.0 - y / self.ymax * (w / 2.0))
    }

    fn point(&self, x: f64, y: f64) -> String {
        let (a, b) = self.px(x, y);
        format!("{a:.3},{b:.3}")
    }

    /// End of the segment from the origin along `d`, clipped to the view.
    fn clip(&self, d: &[f64]) -> (f64, f64) {
        let tx = self.xmax / d[0];
        let ty = if d[1] == 0.0 { f64::INFINITY } else { self.ymax / d[1].abs() };
        let t = tx.min(ty);
        (d[0] * t, d[1] * t)
    }
}

/// Quadrilateral cut from the planar cone spanned by `r1, r2` by the
/// vertical lines `x = a` and `x = b`.
fn slab(r1: &[f64], r2: &[f64], a: f64, b: f64) -> [(f64, f64); 4] {
    let m1 = r1[1] / r1[0];
    let m2 = r2[1] / r2[0];
    [(a, a * m1), (b, b * m1), (b, b * m2), (a, a * m2)]
}

fn polygon(out: &mut String, view: &View, pts: &[(f64, f64)]) {
    let ps: Vec<String> = pts.iter().map(|&(x, y)| view.point(x, y)).collect();
    let _ = writeln!(out, "    <polygon points=\"{}\"/>", ps.join(" "));
}

/// Draws `eta^k (1, ±1)` for `|k| <= window`, the strip `B` and, for a
/// positive window, the regions `D_1` and `D_2` truncated to the window.
pub fn render_svg(fan: &QuotientFan, window: u32) -> Result<String, PlotError> {
    if fan.s() != 2 || fan.b() != 1 {
        return Err(PlotError::UnsupportedDimension { s: fan.s(), b: fan.b() });
    }
    let fan = fan.clone().with_window(window);
    let spec = DomainSpec::from_fan(&fan).map_err(|e| PlotError::Pipeline(format!("{e:?}")))?;
    let c0 = spec.vertices()[0][0];
    let c1 = spec.vertices()[1][0];
    let (lo, hi) = (c0.min(c1), c0.max(c1));
    let xmax = 2.0 * hi * hi / lo;
    let view = View { xmax, ymax: xmax };
    let w = i64::from(window);

    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">"
    );
    let _ = writeln!(
        out,
        "  <style>.ray{{stroke:#333;stroke-width:0.8}} .axis{{stroke:#999;stroke-dasharray:4 3}} \
         .strip{{fill:#f3d9a4;fill-opacity:0.5;stroke:#b8860b}} .d1 polygon{{fill:#4a7fc1;fill-opacity:0.55}} \
         .d2 polygon{{fill:#c1504a;fill-opacity:0.55}}</style>"
    );
    let (x0, y0) = view.px(0.0, 0.0);
    let (x1, _) = view.px(xmax, 0.0);
    let _ = writeln!(out, "  <line class=\"axis\" x1=\"{x0:.3}\" y1=\"{y0:.3}\" x2=\"{x1:.3}\" y2=\"{y0:.3}\"/>");

    let (sa, top) = view.px(lo, view.ymax);
    let (sb, bottom) = view.px(hi, -view.ymax);
    let _ = writeln!(
        out,
        "  <rect class=\"strip\" x=\"{sa:.3}\" y=\"{top:.3}\" width=\"{:.3}\" height=\"{:.3}\"/>",
        sb - sa,
        bottom - top
    );

    if window > 0 {
        let orbit = fan.orbit(window);
        out.push_str("  <g class=\"d1\">\n");
        for (wd, _, cone) in &orbit {
            if !spec.classify_w(wd).in_w_plus {
                continue;
            }
            let r = cone.unit_rays();
            polygon(&mut out, &view, &slab(&r[0], &r[1], lo, hi));
        }
        out.push_str("  </g>\n  <g class=\"d2\">\n");
        for k in -w..=w {
            if !spec.classify_w(&[k]).in_w_gt1 {
                continue;
            }
            let p = fan.profile(&[k]);
            let (a, b) = (lo * p[0], hi * p[0]);
            if a > xmax {
                continue;
            }
            for cone in fan.sigma() {
                let r = cone.unit_rays();
                polygon(&mut out, &view, &slab(&r[0], &r[1], a, b.min(xmax)));
            }
        }
        out.push_str("  </g>\n");
    }

    for k in -w..=w {
        let p = fan.profile(&[k]);
        for sign in [1.0, -1.0] {
            let d = [p[0], sign * p[1]];
            let (ex, ey) = view.clip(&d);
            let (px, py) = view.px(ex, ey);
            let _ = writeln!(
                out,
                "  <line class=\"ray\" data-k=\"{k}\" x1=\"{x0:.3}\" y1=\"{y0:.3}\" x2=\"{px:.3}\" y2=\"{py:.3}\"/>"
            );
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Validates the field and builds the fan described by `cfg`, then
/// renders it.
pub fn plot_config(cfg: &RunConfig) -> Result<String, PlotError> {
    let basis = cfg.basis().map_err(|e| PlotError::Pipeline(e.to_string()))?;
    let field = validate_field(&cfg.min_poly(), basis).map_err(|e| PlotError::Pipeline(format!("field: {e}")))?;
    let (s, _) = field.signature();
    let b = cfg.requested_b().unwrap_or(s);
    if s != 2 || b != 1 {
        return Err(PlotError::UnsupportedDimension { s, b });
    }
    let prepared = prepare(cfg).map_err(PlotError::Pipeline)?;
    render_svg(&prepared.fan, cfg.run.window)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(window: u32, poly: &str) -> RunConfig {
        RunConfig::from_toml(&format!(
            "[field]\nmin_poly = {poly}\n[units]\ncandidates = [[0, 1, 0, 0]]\ngenerators = [[1]]\n[run]\nwindow = {window}\n"
        ))
        .unwrap()
    }

    #[test]
    fn ray_count_and_regions() {
        let svg = plot_config(&cfg(5, "[1, -1, -1, -1, 1]")).unwrap();
        assert_eq!(svg.matches("class=\"ray\"").count(), 2 * (2 * 5 + 1));
        assert!(svg.contains("class=\"d1\"") && svg.contains("class=\"d2\""));
        assert_eq!(svg.matches("class=\"strip\"").count(), 1);
        assert_eq!(svg, plot_config(&cfg(5, "[1, -1, -1, -1, 1]")).unwrap());
    }

    #[test]
    fn window_zero() {
        let svg = plot_config(&cfg(0, "[1, -1, -1, -1, 1]")).unwrap();
        assert_eq!(svg.matches("class=\"ray\"").count(), 2);
        assert!(!svg.contains("<polygon"));
        assert!(svg.contains("class=\"strip\""));
    }

    #[test]
    fn three_real_embeddings_unsupported() {
        // x^3 - 3x - 1 is totally real
        let c = RunConfig::from_toml(
            "[field]\nmin_poly = [-1, -3, 0, 1]\n[units]\ncandidates = [[0, 1, 0]]\ngenerators = [[1]]\n",
        )
        .unwrap();
        assert!(matches!(plot_config(&c), Err(PlotError::UnsupportedDimension { s: 3, .. })));
    }
}
