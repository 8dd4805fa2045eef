//! Parameterised street generators used by the experiments.
//!
//! Corridor and funnel streets share one template: a stem below the line
//! y = 0 whose top corners are the two anchors, capped by a room that
//! overhangs both corners by a short flat shelf. The target sits at the far
//! end of one shelf, so it shows up exactly when the robot reaches the anchor
//! on that side; the other shelf is the decoy.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::geom::{GeomError, Point2, SimplePolygon};
use crate::street::{Street, StreetError};

#[derive(Debug, Error)]
pub enum GenError {
    #[error("invalid generator parameter: {0}")]
    Parameter(String),
    #[error(transparent)]
    Street(#[from] StreetError),
}

impl From<GeomError> for GenError {
    fn from(e: GeomError) -> Self {
        GenError::Street(e.into())
    }
}

fn p(x: f64, y: f64) -> Point2 {
    Point2::new(x, y)
}

/// Stem `[-left, right] x [-depth, 0]` with s at `(s_x, -depth)`, shelves of
/// length `shelf` and a cap of height `cap`. The target is the outer end of
/// the right shelf; `mirror` reflects everything through x = 0.
fn shelf_street(
    left: f64,
    right: f64,
    s_x: f64,
    depth: f64,
    shelf: f64,
    cap: f64,
    mirror: bool,
) -> Result<Street, GenError> {
    let mut v = vec![
        p(s_x, -depth),
        p(right, -depth),
        p(right, 0.0),
        p(right + shelf, 0.0),
        p(right + shelf, cap),
        p(-left - shelf, cap),
        p(-left - shelf, 0.0),
        p(-left, 0.0),
        p(-left, -depth),
    ];
    let (mut s, mut t) = (0, 3);
    if mirror {
        for q in &mut v {
            q.x = -q.x;
        }
        v.reverse();
        let n = v.len();
        s = n - 1 - s;
        t = n - 1 - t;
    }
    Ok(Street::new(SimplePolygon::new(v)?, s, t)?)
}

/// Line-search corridor. The anchor on the target side is at walking
/// distance `|target_offset|` from s (positive offsets put the target on the
/// right); the decoy anchor is eight times further away on the other side.
pub fn gen_corridor(target_offset: f64, width: f64) -> Result<Street, GenError> {
    if !(target_offset.is_finite() && target_offset != 0.0) {
        return Err(GenError::Parameter(format!("target offset {target_offset}")));
    }
    if !(width.is_finite() && width > 0.0) {
        return Err(GenError::Parameter(format!("width {width}")));
    }
    let r = target_offset.abs();
    if r <= width {
        return Err(GenError::Parameter(format!(
            "target offset {r} must exceed the width {width}"
        )));
    }
    let near = (r * r - width * width).sqrt();
    let far = 8.0 * r + 8.0;
    shelf_street(far, near, 0.0, width, width, width, target_offset < 0.0)
}

/// Funnel with the given opening angle at s: both anchors at distance
/// `depth` from s, target behind the right one.
pub fn gen_funnel(opening_angle: f64, depth: f64) -> Result<Street, GenError> {
    if !(opening_angle > 0.0 && opening_angle < std::f64::consts::PI) {
        return Err(GenError::Parameter(format!("opening angle {opening_angle}")));
    }
    if !(depth.is_finite() && depth > 0.0) {
        return Err(GenError::Parameter(format!("depth {depth}")));
    }
    let half = opening_angle / 2.0;
    let (x, h) = (depth * half.sin(), depth * half.cos());
    let shelf = depth / 20.0;
    shelf_street(x, x, 0.0, h, shelf, shelf, false)
}

/// A corridor that only ever bends one way, with pointed ends at s and t.
/// All its reflex vertices lie on the inner wall, so the robot never faces
/// a gap on the other side.
pub fn gen_single_gap(seed: u64) -> Result<Street, GenError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let turns = rng.gen_range(2..=4);
    let width = rng.gen_range(0.8..1.5);
    let mut heading: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let mut spine = vec![p(0.0, 0.0)];
    let mut budget = 2.6;
    for i in 0..=turns {
        let len = rng.gen_range(3.0..8.0);
        let last = *spine.last().unwrap();
        spine.push(last + p(heading.cos(), heading.sin()) * len);
        if i < turns {
            let turn: f64 = rng.gen_range(0.25..0.9f64).min(budget);
            budget -= turn;
            heading -= turn;
        }
    }
    let (right, left) = offset_walls(&spine, width / 2.0);
    let d0 = (spine[1] - spine[0]).normalized();
    let d1 = (spine[spine.len() - 1] - spine[spine.len() - 2]).normalized();
    let s_tip = spine[0] - d0 * width;
    let t_tip = spine[spine.len() - 1] + d1 * width;
    let mut v = vec![s_tip];
    v.extend(right);
    v.push(t_tip);
    let t = v.len() - 1;
    v.extend(left.into_iter().rev());
    let mirror = rng.gen_bool(0.5);
    let (mut s, mut t) = (0usize, t);
    if mirror {
        for q in &mut v {
            q.x = -q.x;
        }
        v.reverse();
        let n = v.len();
        s = n - 1 - s;
        t = n - 1 - t;
    }
    Ok(Street::new(SimplePolygon::new(v)?, s, t)?)
}

/// Right and left walls of a polyline thickened by `half` on each side,
/// joined with miters.
fn offset_walls(spine: &[Point2], half: f64) -> (Vec<Point2>, Vec<Point2>) {
    let n = spine.len();
    let normal = |i: usize| (spine[i + 1] - spine[i]).normalized().perp();
    let mut right = Vec::with_capacity(n);
    let mut left = Vec::with_capacity(n);
    for (i, &c) in spine.iter().enumerate() {
        let m = if i == 0 {
            normal(0)
        } else if i == n - 1 {
            normal(n - 2)
        } else {
            let a = normal(i - 1);
            let b = normal(i);
            let bis = (a + b).normalized();
            bis * (1.0 / bis.dot(a))
        };
        right.push(c - m * half);
        left.push(c + m * half);
    }
    (right, left)
}

/// A convex street: t is visible from s.
pub fn gen_convex(seed: u64) -> Result<Street, GenError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(4..=9);
    let mut angles: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect();
    angles.sort_by(f64::total_cmp);
    angles.dedup_by(|a, b| (*a - *b).abs() < 0.05);
    let v: Vec<Point2> = angles
        .iter()
        .map(|a| {
            let r = rng.gen_range(4.0..6.0);
            p(r * a.cos(), r * a.sin())
        })
        .collect();
    let poly = SimplePolygon::new(v)?;
    if poly.reflex_vertices().next().is_some() {
        return Err(GenError::Parameter("sampled polygon is not convex".into()));
    }
    let t = poly.len() / 2;
    Ok(Street::new(poly, 0, t)?)
}
