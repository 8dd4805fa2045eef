//! Search strategies driving the robot from s to t.
//!
//! Outside funnels the robot walks toward the single relevant gap. Inside a
//! funnel it alternates between the anchors of g_r and g_l with stage
//! budgets 1, 3, 6, 12, ... steps, so its turn-around points sit at
//! distances 1, 2, 4, 8, ... steps from where the funnel began.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{Containment, Point2, Segment, Side};
use crate::sensor::{
    update_rules, Assignment, CriticalEvent, EventCounts, GapSensor, SenseError, SensorFrame,
};
use crate::street::{shortest_path, Street};

/// Distance the robot is pushed past a critical line after stopping on it.
pub const LINE_NUDGE: f64 = 1e-7;
pub const DEFAULT_MAX_STEPS: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StrategyKind {
    Deterministic,
    Randomized,
}

impl StrategyKind {
    pub fn name(self) -> &'static str {
        match self {
            StrategyKind::Deterministic => "det",
            StrategyKind::Randomized => "rand",
        }
    }
}

impl std::str::FromStr for StrategyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "det" | "deterministic" => Ok(StrategyKind::Deterministic),
            "rand" | "randomized" => Ok(StrategyKind::Randomized),
            _ => Err(format!("unknown strategy '{s}' (expected det or rand)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StrategyConfig {
    pub kind: StrategyKind,
    /// Only used by the randomized strategy.
    pub seed: u64,
    /// Length of one step; `None` means a thousandth of the geodesic.
    pub base_step: Option<f64>,
    pub max_steps: usize,
}

impl StrategyConfig {
    pub fn deterministic() -> Self {
        StrategyConfig {
            kind: StrategyKind::Deterministic,
            seed: 0,
            base_step: None,
            max_steps: DEFAULT_MAX_STEPS,
        }
    }

    pub fn randomized(seed: u64) -> Self {
        StrategyConfig {
            kind: StrategyKind::Randomized,
            seed,
            ..Self::deterministic()
        }
    }

    pub fn with_base_step(mut self, step: f64) -> Self {
        self.base_step = Some(step);
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FunnelState {
    pub stage_index: u32,
    pub steps_remaining_in_stage: f64,
    pub current_direction: Side,
    pub step_length: f64,
    /// Where the funnel began.
    pub origin: Point2,
    /// Side walked toward in odd stages.
    odd_side: Side,
}

impl FunnelState {
    fn new(origin: Point2, step_length: f64, odd_side: Side) -> Self {
        FunnelState {
            stage_index: 1,
            steps_remaining_in_stage: stage_budget(1),
            current_direction: odd_side,
            step_length,
            origin,
            odd_side,
        }
    }

    fn advance_stage(&mut self) {
        self.stage_index += 1;
        self.steps_remaining_in_stage = stage_budget(self.stage_index);
        self.current_direction = if self.stage_index % 2 == 1 {
            self.odd_side
        } else {
            self.odd_side.opposite()
        };
    }
}

/// Number of steps walked in stage `i` (1-based): 1, 3, 6, 12, ...
pub fn stage_budget(i: u32) -> f64 {
    match i {
        0 => 0.0,
        1 => 1.0,
        _ => 3.0 * 2f64.powi(i as i32 - 2),
    }
}

/// Funnel entry for the deterministic strategy: unit steps, g_r first.
pub fn deterministic_entry(origin: Point2, base_step: f64) -> FunnelState {
    FunnelState::new(origin, base_step, Side::Right)
}

/// Funnel entry for the randomized strategy: step length `base_step * 2^e`
/// with e uniform in [0, 1), first side decided by a fair coin.
pub fn randomize_entry<R: Rng>(rng: &mut R, origin: Point2, base_step: f64) -> FunnelState {
    let e: f64 = rng.gen();
    let side = if rng.gen_bool(0.5) { Side::Left } else { Side::Right };
    FunnelState::new(origin, base_step * 2f64.powf(e), side)
}

/// Whether both anchors lie on one ray from `p`.
pub fn collinear_check(p: Point2, a: Point2, b: Point2) -> bool {
    let (da, db) = (a - p, b - p);
    let (la, lb) = (da.norm(), db.norm());
    if la == 0.0 || lb == 0.0 {
        return false;
    }
    let sin = da.cross(db) / (la * lb);
    // Tolerance covers the nudge past the line through both anchors.
    sin.abs() * la.min(lb) <= 4.0 * LINE_NUDGE && da.dot(db) > 0.0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Straight,
    Pursue(Side),
    Funnel(Side),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub position: Point2,
    pub frame: SensorFrame,
    pub mode: Mode,
    pub funnel: Option<FunnelState>,
    /// g_l and g_r after this sample's events were applied.
    pub assignment: Assignment,
    pub events: Vec<CriticalEvent>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub total_length: f64,
    pub base_step: f64,
    pub funnels: u32,
    /// (funnel number, funnel origin, turn-around point)
    pub turns: Vec<(u32, Point2, Point2)>,
}

impl Trajectory {
    pub fn points(&self) -> impl Iterator<Item = Point2> + '_ {
        self.samples.iter().map(|s| s.position)
    }

    pub fn events(&self) -> impl Iterator<Item = &CriticalEvent> + '_ {
        self.samples.iter().flat_map(|s| s.events.iter())
    }

    pub fn event_counts(&self) -> EventCounts {
        crate::sensor::count_events(self.events())
    }

    pub fn end(&self) -> Point2 {
        self.samples.last().map(|s| s.position).unwrap_or_default()
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NavError {
    #[error(transparent)]
    Sense(SenseError),
    #[error("target hidden behind neither g_l nor g_r at {0}")]
    TargetNotBehindGaps(Point2),
    #[error("merge involving the pursued gap at {0}")]
    PursuedMerge(Point2),
    #[error("no motion possible at {0}")]
    Stuck(Point2),
    #[error("step limit {0} exceeded")]
    StepLimit(usize),
    #[error("invalid base step {0}")]
    BadStep(f64),
}

impl NavError {
    /// Errors signalling a broken invariant rather than bad input.
    pub fn is_invariant_violation(&self) -> bool {
        matches!(
            self,
            NavError::TargetNotBehindGaps(_) | NavError::PursuedMerge(_) | NavError::Sense(SenseError::MergeOfPursued(_))
        )
    }
}

/// Runs a strategy on a street and returns the walked trajectory.
pub fn run(street: &Street, config: &StrategyConfig) -> Result<Trajectory, NavError> {
    let base_step = match config.base_step {
        Some(b) => b,
        None => shortest_path(street).length / 1000.0,
    };
    if !(base_step.is_finite() && base_step > 0.0) {
        return Err(NavError::BadStep(base_step));
    }
    let sensor = GapSensor::new(street);
    let target = street.target_point();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut pos = street.start_point();
    let mut frame = sensor.sense(pos, None).map_err(NavError::Sense)?;
    let mut assign = Assignment::from_frame(&sensor, &frame);
    check_hidden(&sensor, &frame, assign)?;
    let mut funnel: Option<FunnelState> = None;
    let mut traj = Trajectory {
        samples: vec![Sample {
            position: pos,
            frame: frame.clone(),
            mode: Mode::Straight,
            funnel: None,
            assignment: assign,
            events: Vec::new(),
        }],
        total_length: 0.0,
        base_step,
        funnels: 0,
        turns: Vec::new(),
    };

    for _ in 0..config.max_steps {
        if pos == target {
            return Ok(traj);
        }
        let gl = assign.left.and_then(|id| frame.gap(id));
        let gr = assign.right.and_then(|id| frame.gap(id));
        let (mode, dest) = if frame.target_visible {
            funnel = None;
            (Mode::Straight, target)
        } else {
            match (gl, gr) {
                (Some(l), Some(r)) if !collinear_check(pos, l.anchor, r.anchor) => {
                    let f = funnel.get_or_insert_with(|| {
                        traj.funnels += 1;
                        match config.kind {
                            StrategyKind::Deterministic => deterministic_entry(pos, base_step),
                            StrategyKind::Randomized => randomize_entry(&mut rng, pos, base_step),
                        }
                    });
                    let side = f.current_direction;
                    let anchor = if side == Side::Left { l.anchor } else { r.anchor };
                    let budget = f.steps_remaining_in_stage * f.step_length;
                    let d = anchor - pos;
                    let dest = if d.norm() <= budget { anchor } else { pos + d * (budget / d.norm()) };
                    (Mode::Funnel(side), dest)
                }
                (Some(l), Some(r)) => {
                    funnel = None;
                    let near = if l.depth_near <= r.depth_near { l } else { r };
                    (Mode::Pursue(near.side), near.anchor)
                }
                (Some(g), None) | (None, Some(g)) => {
                    funnel = None;
                    (Mode::Pursue(g.side), g.anchor)
                }
                (None, None) => return Err(NavError::TargetNotBehindGaps(pos)),
            }
        };

        let next_pos = advance(&sensor, pos, dest);
        let walked = next_pos.dist(pos);
        if walked == 0.0 {
            return Err(NavError::Stuck(pos));
        }
        traj.total_length += walked;

        let (next_frame, events) = sense_step(&sensor, &frame, next_pos)?;
        let pursued = match mode {
            Mode::Funnel(s) | Mode::Pursue(s) => Some(s),
            Mode::Straight => None,
        };
        let outcome = match update_rules(&sensor, assign, &events, &next_frame, pursued) {
            Ok(o) => o,
            Err(SenseError::MergeOfPursued(_)) => return Err(NavError::PursuedMerge(next_pos)),
            Err(e) => return Err(NavError::Sense(e)),
        };
        assign = outcome.assignment;

        if let (Some(f), Mode::Funnel(_)) = (funnel.as_mut(), mode) {
            f.steps_remaining_in_stage -= walked / f.step_length;
            if f.steps_remaining_in_stage <= 1e-9 {
                traj.turns.push((traj.funnels, f.origin, next_pos));
                f.advance_stage();
            }
        }
        if outcome.funnel_end {
            funnel = None;
        }

        pos = next_pos;
        frame = next_frame;
        check_hidden(&sensor, &frame, assign)?;
        traj.samples.push(Sample {
            position: pos,
            frame: frame.clone(),
            mode,
            funnel,
            assignment: assign,
            events,
        });
    }
    Err(NavError::StepLimit(config.max_steps))
}

/// Walks straight from `from` to `to`, sensing after every critical line.
/// The mode of every sample is [`Mode::Straight`].
pub fn walk_straight(street: &Street, from: Point2, to: Point2) -> Result<Vec<Sample>, NavError> {
    let sensor = GapSensor::new(street);
    let mut frame = sensor.sense(from, None).map_err(NavError::Sense)?;
    let mut pos = from;
    let mut out = vec![Sample {
        position: pos,
        frame: frame.clone(),
        mode: Mode::Straight,
        funnel: None,
        assignment: Assignment::from_frame(&sensor, &frame),
        events: Vec::new(),
    }];
    while pos != to {
        if out.len() > DEFAULT_MAX_STEPS {
            return Err(NavError::StepLimit(DEFAULT_MAX_STEPS));
        }
        let next = advance(&sensor, pos, to);
        if next == pos {
            return Err(NavError::Stuck(pos));
        }
        let (f, events) = sense_step(&sensor, &frame, next)?;
        pos = next;
        frame = f;
        out.push(Sample {
            position: pos,
            frame: frame.clone(),
            mode: Mode::Straight,
            funnel: None,
            assignment: Assignment::from_frame(&sensor, &frame),
            events,
        });
    }
    Ok(out)
}

/// Senses at `to` and returns the events explaining the change from `prev`.
fn sense_step(
    sensor: &GapSensor<'_>,
    prev: &SensorFrame,
    to: Point2,
) -> Result<(SensorFrame, Vec<CriticalEvent>), NavError> {
    let next = sensor.sense(to, Some(prev)).map_err(NavError::Sense)?;
    let events = sensor
        .diff_events(prev, &next, Segment::new(prev.position, to))
        .map_err(NavError::Sense)?;
    Ok((next, events))
}

/// Moves from `a` toward `b`, stopping just past the first critical line.
fn advance(sensor: &GapSensor<'_>, a: Point2, b: Point2) -> Point2 {
    let Some((t, x)) = sensor.first_crossing(a, b) else {
        return b;
    };
    let len = a.dist(b);
    if (1.0 - t) * len <= LINE_NUDGE {
        return b;
    }
    let dir = (b - a).normalized();
    let past = x + dir * LINE_NUDGE;
    if sensor.street().polygon().classify(past) == Containment::Outside {
        x
    } else {
        past
    }
}

fn check_hidden(sensor: &GapSensor<'_>, frame: &SensorFrame, assign: Assignment) -> Result<(), NavError> {
    if frame.target_visible {
        return Ok(());
    }
    let hidden = [assign.left, assign.right]
        .into_iter()
        .flatten()
        .filter_map(|id| frame.gap(id))
        .any(|g| sensor.hides_target(frame, g));
    if hidden {
        Ok(())
    } else {
        Err(NavError::TargetNotBehindGaps(frame.position))
    }
}
