//! WebAssembly bindings for the demo page: run a strategy on a corridor or a
//! funnel and draw it, or plot the ratio curve over a range of offsets.

use std::fmt::Write as _;

use wasm_bindgen::prelude::*;

use streetwalker::families::{gen_corridor, gen_funnel};
use streetwalker::harness::{render_svg, CORRIDOR_WIDTH, FUNNEL_DEPTH};
use streetwalker::navigator::{run, StrategyConfig};
use streetwalker::street::{shortest_path, Street};

/// One rendered run.
#[wasm_bindgen]
pub struct RunView {
    svg: String,
    ratio: f64,
    path_len: f64,
    geo_len: f64,
    funnels: u32,
}

#[wasm_bindgen]
impl RunView {
    #[wasm_bindgen(getter)]
    pub fn svg(&self) -> String {
        self.svg.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    #[wasm_bindgen(getter)]
    pub fn path_len(&self) -> f64 {
        self.path_len
    }

    #[wasm_bindgen(getter)]
    pub fn geo_len(&self) -> f64 {
        self.geo_len
    }

    #[wasm_bindgen(getter)]
    pub fn funnels(&self) -> u32 {
        self.funnels
    }
}

fn config(randomized: bool, seed: u64) -> StrategyConfig {
    if randomized {
        StrategyConfig::randomized(seed)
    } else {
        StrategyConfig::deterministic()
    }
}

fn view(street: &Street, cfg: &StrategyConfig) -> Result<RunView, String> {
    let traj = run(street, cfg).map_err(|e| e.to_string())?;
    let geo = shortest_path(street);
    Ok(RunView {
        svg: render_svg(street, Some(&traj), &geo),
        ratio: traj.total_length / geo.length,
        path_len: traj.total_length,
        geo_len: geo.length,
        funnels: traj.funnels,
    })
}

pub fn corridor_view(offset: f64, randomized: bool, seed: u64) -> Result<RunView, String> {
    let st = gen_corridor(offset, CORRIDOR_WIDTH).map_err(|e| e.to_string())?;
    view(&st, &config(randomized, seed).with_base_step(1.0))
}

pub fn funnel_view(angle_deg: f64, randomized: bool, seed: u64) -> Result<RunView, String> {
    let st = gen_funnel(angle_deg.to_radians(), FUNNEL_DEPTH).map_err(|e| e.to_string())?;
    view(&st, &config(randomized, seed))
}

/// Deterministic ratio and randomized mean over `trials` seeds, for `points`
/// target offsets spread geometrically over [1.1, max_offset].
pub fn ratio_curve(max_offset: f64, points: usize, trials: u32) -> Result<Vec<(f64, f64, f64)>, String> {
    if max_offset.is_nan() || max_offset <= 1.1 || points < 2 || trials == 0 {
        return Err("need max offset > 1.1, at least 2 points and 1 trial".into());
    }
    let ratio = |st: &Street, cfg: StrategyConfig| -> Result<f64, String> {
        let tr = run(st, &cfg.with_base_step(1.0)).map_err(|e| e.to_string())?;
        Ok(tr.total_length / shortest_path(st).length)
    };
    let mut out = Vec::with_capacity(points);
    for i in 0..points {
        let o = 1.1 * (max_offset / 1.1).powf(i as f64 / (points - 1) as f64);
        let st = gen_corridor(o, CORRIDOR_WIDTH).map_err(|e| e.to_string())?;
        let det = ratio(&st, StrategyConfig::deterministic())?;
        let mut sum = 0.0;
        for k in 0..trials {
            sum += ratio(&st, StrategyConfig::randomized(k as u64))?;
        }
        out.push((o, det, sum / trials as f64));
    }
    Ok(out)
}

/// Line plot of [`ratio_curve`] with a log-scaled offset axis.
pub fn ratio_curve_plot(curve: &[(f64, f64, f64)]) -> String {
    const W: f64 = 800.0;
    const H: f64 = 360.0;
    const M: f64 = 40.0;
    let lx0 = curve.first().map_or(0.0, |c| c.0.ln());
    let lx1 = curve.last().map_or(1.0, |c| c.0.ln()).max(lx0 + 1e-9);
    let ymax = 10.0;
    let x = |o: f64| M + (o.ln() - lx0) / (lx1 - lx0) * (W - 2.0 * M);
    let y = |r: f64| H - M - r.min(ymax) / ymax * (H - 2.0 * M);
    let line = |pick: fn(&(f64, f64, f64)) -> f64| {
        let mut d = String::new();
        for (i, c) in curve.iter().enumerate() {
            let _ = write!(d, "{}{:.2},{:.2}", if i == 0 { "M" } else { " L" }, x(c.0), y(pick(c)));
        }
        d
    };
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);
    for r in [1.0, 5.33, 9.0] {
        let _ = writeln!(
            svg,
            r##"<line x1="{M}" x2="{}" y1="{:.2}" y2="{:.2}" stroke="#bbbbbb" stroke-dasharray="4,4"/><text x="4" y="{:.2}">{r}</text>"##,
            W - M,
            y(r),
            y(r),
            y(r) + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r##"<path d="{}" fill="none" stroke="#c0392b" stroke-width="2"/>"##,
        line(|c| c.1)
    );
    let _ = writeln!(
        svg,
        r##"<path d="{}" fill="none" stroke="#1f5fbf" stroke-width="2"/>"##,
        line(|c| c.2)
    );
    let _ = writeln!(
        svg,
        r##"<text x="{M}" y="{}">target offset (log scale) {:.1} to {:.1}; red deterministic, blue randomized mean</text>"##,
        H - 10.0,
        lx0.exp(),
        lx1.exp()
    );
    svg.push_str("</svg>\n");
    svg
}

#[wasm_bindgen]
pub fn corridor_run(offset: f64, randomized: bool, seed: u64) -> Result<RunView, JsError> {
    corridor_view(offset, randomized, seed).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn funnel_run(angle_deg: f64, randomized: bool, seed: u64) -> Result<RunView, JsError> {
    funnel_view(angle_deg, randomized, seed).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn ratio_curve_svg(max_offset: f64, points: usize, trials: u32) -> Result<String, JsError> {
    ratio_curve(max_offset, points, trials)
        .map(|c| ratio_curve_plot(&c))
        .map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corridor_view_renders() {
        let v = corridor_view(17.0, false, 0).unwrap();
        assert!(v.svg.starts_with("<svg"));
        assert!(v.ratio > 1.0 && v.ratio < 9.0);
        assert!(corridor_view(0.0, false, 0).is_err());
    }

    #[test]
    fn funnel_view_renders() {
        let v = funnel_view(60.0, true, 5).unwrap();
        assert_eq!(v.funnels, 1);
        assert!(funnel_view(200.0, false, 0).is_err());
    }

    #[test]
    fn curve_has_requested_points() {
        let c = ratio_curve(40.0, 8, 20).unwrap();
        assert_eq!(c.len(), 8);
        assert!(c.iter().all(|&(_, d, r)| d >= 1.0 && r >= 1.0));
        assert!(ratio_curve_plot(&c).ends_with("</svg>\n"));
        assert!(ratio_curve(1.0, 8, 1).is_err());
    }
}
