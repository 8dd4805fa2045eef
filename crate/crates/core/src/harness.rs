//! Experiment orchestration: instance families, batch runs, ratio
//! statistics, CSV reports and SVG rendering.

use std::fmt::Write as _;
use std::io;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::families::{gen_convex, gen_corridor, gen_funnel, GenError};
use crate::geom::Point2;
use crate::navigator::{run, NavError, StrategyConfig, StrategyKind, Trajectory};
use crate::sensor::EventCounts;
use crate::street::{shortest_path, GeodesicPath, Street};

/// Seed used when neither the caller nor `STREETWALKER_SEED` supplies one.
pub const DEFAULT_FAMILY_SEED: u64 = 2024;
pub const SEED_ENV: &str = "STREETWALKER_SEED";
pub const CORRIDOR_WIDTH: f64 = 0.05;
pub const FUNNEL_DEPTH: f64 = 10.0;

/// The family seed, overridden by `STREETWALKER_SEED` when that is set to an
/// integer.
pub fn family_seed(default: u64) -> u64 {
    std::env::var(SEED_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(default)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FamilyKind {
    Corridor,
    Funnel,
    TwoPocket,
    Convex,
}

impl std::str::FromStr for FamilyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "corridor" => Ok(FamilyKind::Corridor),
            "funnel" => Ok(FamilyKind::Funnel),
            "two-pocket" => Ok(FamilyKind::TwoPocket),
            "convex" => Ok(FamilyKind::Convex),
            _ => Err(format!("unknown family '{s}'")),
        }
    }
}

/// A parameterised set of streets. Unset parameters select the family's
/// standard sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct InstanceFamily {
    pub kind: FamilyKind,
    pub opening_angle: Option<f64>,
    pub depth: f64,
    pub target_offset: Option<f64>,
    pub count: usize,
    pub seed: u64,
}

impl InstanceFamily {
    pub fn new(kind: FamilyKind) -> Self {
        InstanceFamily {
            kind,
            opening_angle: None,
            depth: FUNNEL_DEPTH,
            target_offset: None,
            count: 20,
            seed: family_seed(DEFAULT_FAMILY_SEED),
        }
    }

    /// Generates the family's streets; every one passes street validation.
    pub fn instances(&self) -> Result<Vec<Instance>, GenError> {
        let mut out = Vec::new();
        match self.kind {
            FamilyKind::Corridor => {
                let offsets = match self.target_offset {
                    Some(o) => vec![o],
                    None => corridor_sweep(1.0),
                };
                for o in offsets {
                    out.push(Instance {
                        id: format!("corridor:{o}"),
                        street: gen_corridor(o, CORRIDOR_WIDTH)?,
                        base_step: Some(1.0),
                    });
                }
            }
            FamilyKind::Funnel => {
                let angles = match self.opening_angle {
                    Some(a) => vec![a],
                    None => funnel_angles().to_vec(),
                };
                for a in angles {
                    out.push(Instance {
                        id: format!("funnel:{:.4}:{}", a, self.depth),
                        street: gen_funnel(a, self.depth)?,
                        base_step: None,
                    });
                }
            }
            FamilyKind::TwoPocket => {
                use rand::Rng;
                use rand_chacha::rand_core::SeedableRng;
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(self.seed);
                for _ in 0..self.count {
                    let mag: f64 = rng.gen_range(1.5..64.0);
                    let o = if rng.gen_bool(0.5) { mag } else { -mag };
                    let o = (o * 1000.0).round() / 1000.0;
                    out.push(Instance {
                        id: format!("two-pocket:{o}"),
                        street: gen_corridor(o, CORRIDOR_WIDTH)?,
                        base_step: Some(1.0),
                    });
                }
            }
            FamilyKind::Convex => {
                let mut k = self.seed;
                while out.len() < self.count {
                    if let Ok(st) = gen_convex(k) {
                        out.push(Instance {
                            id: format!("convex:{k}"),
                            street: st,
                            base_step: None,
                        });
                    }
                    k += 1;
                }
            }
        }
        Ok(out)
    }
}

/// Offsets just past each turn-around 2^k (k = 0..=8) on both sides.
pub fn corridor_sweep(base_step: f64) -> Vec<f64> {
    let mut v = Vec::new();
    for k in 0..=8 {
        let o = 2f64.powi(k) + base_step;
        v.push(o);
        v.push(-o);
    }
    v
}

/// Whether the deterministic walk turns around at 2^k on the side of
/// `offset` (odd stages go right, so even k turn on the right).
pub fn is_adversarial(offset: f64, base_step: f64) -> bool {
    let k = ((offset.abs() - base_step) / base_step).log2().round() as i32;
    (k % 2 == 0) == (offset > 0.0)
}

pub fn funnel_angles() -> [f64; 6] {
    use std::f64::consts::PI;
    [PI / 12.0, PI / 6.0, PI / 3.0, PI / 2.0, 2.0 * PI / 3.0, 5.0 * PI / 6.0]
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub id: String,
    pub street: Street,
    /// Preferred step length; `None` defers to the strategy default.
    pub base_step: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub instance: String,
    pub strategy: StrategyKind,
    pub seed: u64,
    pub path_len: f64,
    pub geo_len: f64,
    pub ratio: f64,
    pub events: EventCounts,
    #[serde(skip)]
    pub wall_time: Duration,
}

#[derive(Debug, Error)]
#[error("instance {instance}: {source}")]
pub struct RunError {
    pub instance: String,
    #[source]
    pub source: NavError,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Aggregate {
    pub runs: usize,
    pub mean: f64,
    pub max: f64,
    pub stddev: f64,
}

impl Aggregate {
    pub fn of(ratios: impl IntoIterator<Item = f64>) -> Self {
        let v: Vec<f64> = ratios.into_iter().collect();
        let n = v.len();
        if n == 0 {
            return Aggregate::default();
        }
        let mean = v.iter().sum::<f64>() / n as f64;
        let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let var = if n > 1 {
            v.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        Aggregate {
            runs: n,
            mean,
            max,
            stddev: var.sqrt(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Batch {
    pub reports: Vec<RunReport>,
    pub aggregate: Aggregate,
}

/// Seed of trial `trial` on instance `index`, derived from the family seed.
pub fn trial_seed(family_seed: u64, index: usize, trial: usize) -> u64 {
    // splitmix64 over the packed triple
    let mut z = family_seed
        .wrapping_add((index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add((trial as u64).wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Runs one strategy on one instance.
pub fn run_instance(inst: &Instance, config: &StrategyConfig) -> Result<(RunReport, Trajectory), RunError> {
    let started = Instant::now();
    let mut cfg = *config;
    if cfg.base_step.is_none() {
        cfg.base_step = inst.base_step;
    }
    let traj = run(&inst.street, &cfg).map_err(|source| RunError {
        instance: inst.id.clone(),
        source,
    })?;
    let geo = shortest_path(&inst.street).length;
    let report = RunReport {
        instance: inst.id.clone(),
        strategy: cfg.kind,
        seed: cfg.seed,
        path_len: traj.total_length,
        geo_len: geo,
        ratio: traj.total_length / geo,
        events: traj.event_counts(),
        wall_time: started.elapsed(),
    };
    Ok((report, traj))
}

/// Runs every instance once (deterministic) or `trials` times with derived
/// seeds (randomized). Reports come back in instance-then-trial order.
pub fn run_batch(
    instances: &[Instance],
    strategy: &StrategyConfig,
    trials: usize,
    family_seed: u64,
) -> Result<Batch, RunError> {
    let per = match strategy.kind {
        StrategyKind::Deterministic => 1,
        StrategyKind::Randomized => trials.max(1),
    };
    let jobs: Vec<(usize, usize)> = (0..instances.len())
        .flat_map(|i| (0..per).map(move |k| (i, k)))
        .collect();
    let one = |&(i, k): &(usize, usize)| {
        let mut cfg = *strategy;
        if cfg.kind == StrategyKind::Randomized {
            cfg.seed = trial_seed(family_seed, i, k);
        }
        run_instance(&instances[i], &cfg).map(|(r, _)| r)
    };
    #[cfg(feature = "parallel")]
    let results: Vec<Result<RunReport, RunError>> = {
        use rayon::prelude::*;
        jobs.par_iter().map(one).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<Result<RunReport, RunError>> = jobs.iter().map(one).collect();
    let reports = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let aggregate = Aggregate::of(reports.iter().map(|r| r.ratio));
    Ok(Batch { reports, aggregate })
}

pub const CSV_HEADER: [&str; 10] = [
    "instance",
    "strategy",
    "seed",
    "path_len",
    "geo_len",
    "ratio",
    "events_appear",
    "events_disappear",
    "events_split",
    "events_merge",
];

pub fn write_csv<W: io::Write>(out: W, reports: &[RunReport]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in reports {
        w.write_record([
            r.instance.clone(),
            r.strategy.name().to_string(),
            r.seed.to_string(),
            r.path_len.to_string(),
            r.geo_len.to_string(),
            r.ratio.to_string(),
            r.events.appear.to_string(),
            r.events.disappear.to_string(),
            r.events.split.to_string(),
            r.events.merge.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Error)]
pub enum CsvError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("unexpected header {0:?}")]
    Header(Vec<String>),
    #[error("row {row}: {msg}")]
    Field { row: usize, msg: String },
}

pub fn read_csv<R: io::Read>(input: R) -> Result<Vec<RunReport>, CsvError> {
    let mut rd = csv::Reader::from_reader(input);
    let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(CsvError::Header(header));
    }
    let mut out = Vec::new();
    for (row, rec) in rd.records().enumerate() {
        let rec = rec?;
        let field = |i: usize| rec.get(i).unwrap_or("");
        let bad = |msg: String| CsvError::Field { row: row + 1, msg };
        let num = |i: usize| field(i).parse::<f64>().map_err(|e| bad(format!("{}: {e}", CSV_HEADER[i])));
        let int = |i: usize| field(i).parse::<u32>().map_err(|e| bad(format!("{}: {e}", CSV_HEADER[i])));
        out.push(RunReport {
            instance: field(0).to_string(),
            strategy: field(1).parse().map_err(bad)?,
            seed: field(2).parse().map_err(|e| bad(format!("seed: {e}")))?,
            path_len: num(3)?,
            geo_len: num(4)?,
            ratio: num(5)?,
            events: EventCounts {
                appear: int(6)?,
                disappear: int(7)?,
                split: int(8)?,
                merge: int(9)?,
            },
            wall_time: Duration::ZERO,
        });
    }
    Ok(out)
}

/// Renders the street outline, the walked path (bold), the geodesic
/// (dotted) and markers at s, t and event locations.
pub fn render_svg(street: &Street, trajectory: Option<&Trajectory>, geodesic: &GeodesicPath) -> String {
    const W: f64 = 800.0;
    const MARGIN: f64 = 20.0;
    let pts = street.polygon().vertices();
    let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for p in pts {
        x0 = x0.min(p.x);
        y0 = y0.min(p.y);
        x1 = x1.max(p.x);
        y1 = y1.max(p.y);
    }
    let (dx, dy) = ((x1 - x0).max(1e-12), (y1 - y0).max(1e-12));
    let sx = (W - 2.0 * MARGIN) / dx;
    // Thin streets get stretched vertically so the zig-zag stays readable.
    let sy = sx.max((W / 4.0 - 2.0 * MARGIN) / dy);
    let h = dy * sy + 2.0 * MARGIN;
    let map = |p: Point2| (MARGIN + (p.x - x0) * sx, MARGIN + (y1 - p.y) * sy);
    let path = |it: &mut dyn Iterator<Item = Point2>| {
        let mut s = String::new();
        for (i, p) in it.enumerate() {
            let (x, y) = map(p);
            let _ = write!(s, "{}{:.2},{:.2}", if i == 0 { "M" } else { " L" }, x, y);
        }
        s
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{:.0}" height="{:.0}" viewBox="0 0 {:.0} {:.0}">"#,
        W, h, W, h
    );
    let _ = writeln!(svg, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);
    let _ = writeln!(
        svg,
        r##"<path d="{} Z" fill="#f2f2f2" stroke="#000000" stroke-width="1.5"/>"##,
        path(&mut pts.iter().copied())
    );
    let _ = writeln!(
        svg,
        r##"<path d="{}" fill="none" stroke="#1f5fbf" stroke-width="1.5" stroke-dasharray="2,4"/>"##,
        path(&mut geodesic.waypoints.iter().copied())
    );
    if let Some(tr) = trajectory {
        let _ = writeln!(
            svg,
            r##"<path d="{}" fill="none" stroke="#c0392b" stroke-width="3"/>"##,
            path(&mut tr.points())
        );
        for e in tr.events() {
            let (x, y) = map(e.location);
            let _ = writeln!(
                svg,
                r##"<circle cx="{:.2}" cy="{:.2}" r="3" fill="#ffffff" stroke="#555555" stroke-width="1"><title>{}</title></circle>"##,
                x,
                y,
                e.kind.name()
            );
        }
    }
    for (p, label) in [(street.start_point(), "s"), (street.target_point(), "t")] {
        let (x, y) = map(p);
        let _ = writeln!(svg, r##"<circle cx="{:.2}" cy="{:.2}" r="5" fill="#000000"/>"##, x, y);
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="14">{}</text>"#,
            x + 7.0,
            y - 7.0,
            label
        );
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_and_adversarial_sides() {
        let sweep = corridor_sweep(1.0);
        assert_eq!(sweep.len(), 18);
        let adv: Vec<f64> = sweep.iter().copied().filter(|&o| is_adversarial(o, 1.0)).collect();
        assert_eq!(adv, vec![2.0, -3.0, 5.0, -9.0, 17.0, -33.0, 65.0, -129.0, 257.0]);
    }

    #[test]
    fn aggregate_statistics() {
        let a = Aggregate::of([1.0, 2.0, 3.0]);
        assert_eq!(a.mean, 2.0);
        assert_eq!(a.max, 3.0);
        assert!((a.stddev - 1.0).abs() < 1e-15);
        assert_eq!(Aggregate::of([]).runs, 0);
    }

    #[test]
    fn trial_seeds_differ() {
        let mut s: Vec<u64> = (0..100).map(|k| trial_seed(7, 0, k)).collect();
        s.extend((0..100).map(|k| trial_seed(7, 1, k)));
        let n = s.len();
        s.sort();
        s.dedup();
        assert_eq!(s.len(), n);
    }

    #[test]
    fn csv_round_trip() {
        let mut fam = InstanceFamily::new(FamilyKind::Corridor);
        fam.target_offset = Some(5.0);
        let inst = fam.instances().unwrap();
        let b = run_batch(&inst, &StrategyConfig::randomized(0), 5, 11).unwrap();
        let mut buf = Vec::new();
        write_csv(&mut buf, &b.reports).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(&CSV_HEADER.join(",")));
        let back = read_csv(&buf[..]).unwrap();
        let strip = |v: &[RunReport]| -> Vec<RunReport> {
            v.iter()
                .map(|r| RunReport {
                    wall_time: Duration::ZERO,
                    ..r.clone()
                })
                .collect()
        };
        assert_eq!(strip(&back), strip(&b.reports));
    }

    #[test]
    fn csv_rejects_wrong_header() {
        assert!(matches!(read_csv(&b"a,b\n1,2\n"[..]), Err(CsvError::Header(_))));
    }

    #[test]
    fn convex_family_is_optimal() {
        let mut fam = InstanceFamily::new(FamilyKind::Convex);
        fam.count = 5;
        let b = run_batch(&fam.instances().unwrap(), &StrategyConfig::deterministic(), 1, 0).unwrap();
        for r in &b.reports {
            assert!((r.ratio - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn svg_is_deterministic() {
        let st = gen_corridor(5.0, CORRIDOR_WIDTH).unwrap();
        let tr = run(&st, &StrategyConfig::deterministic().with_base_step(1.0)).unwrap();
        let g = shortest_path(&st);
        let a = render_svg(&st, Some(&tr), &g);
        assert_eq!(a, render_svg(&st, Some(&tr), &g));
        assert!(a.contains("stroke-dasharray"));
        assert!(a.starts_with("<svg"));
    }
}
