//! The minimal gap sensor.
//!
//! A frame lists the depth discontinuities seen from the robot in angular
//! order, each labelled with the side its hidden region lies on. Gaps keep
//! their identity across frames through their anchor (the reflex vertex that
//! causes the discontinuity); critical events are recovered by comparing
//! consecutive frames.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{orient, Containment, GeomError, PocketRange, Point2, Segment, Side, SimplePolygon};
use crate::street::Street;

/// Distance by which sensing positions on the boundary are pushed inside.
pub const BOUNDARY_NUDGE: f64 = 1e-7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SenseError {
    #[error(transparent)]
    Geometry(#[from] GeomError),
    #[error("frames at {from} and {to} are not explained by any event sequence; subdivide the motion")]
    Inconsistent { from: Point2, to: Point2 },
    #[error("gap {0:?} merged with another gap while being pursued")]
    MergeOfPursued(GapId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GapId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gap {
    pub id: GapId,
    pub side: Side,
    pub primitive: bool,
    /// The reflex vertex causing the discontinuity.
    pub anchor: Point2,
    pub anchor_index: usize,
    /// Unit vector from the robot toward the anchor.
    pub direction: Point2,
    pub depth_near: f64,
    /// Where the sight line past the anchor meets the boundary again.
    pub far: Point2,
    pub far_edge: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SensorFrame {
    pub position: Point2,
    /// Point actually sensed from; differs from `position` only when the
    /// robot stands on the boundary.
    pub viewpoint: Point2,
    pub gaps: Vec<Gap>,
    pub target_visible: bool,
    next_id: u32,
}

impl SensorFrame {
    pub fn gap(&self, id: GapId) -> Option<&Gap> {
        self.gaps.iter().find(|g| g.id == id)
    }

    fn gap_at(&self, anchor: usize) -> Option<&Gap> {
        self.gaps.iter().find(|g| g.anchor_index == anchor)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EventKind {
    Disappearance,
    Merge,
    Split,
    Appearance,
}

impl EventKind {
    pub fn name(self) -> &'static str {
        match self {
            EventKind::Appearance => "appearance",
            EventKind::Disappearance => "disappearance",
            EventKind::Merge => "merge",
            EventKind::Split => "split",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CriticalEvent {
    pub kind: EventKind,
    /// Appearance/disappearance: the gap. Split: parent then child.
    /// Merge: surviving gap then absorbed gap.
    pub gaps: Vec<GapId>,
    pub location: Point2,
}

/// Which segments of the plane fire events when crossed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LineKind {
    /// Extension of a boundary edge past a reflex vertex.
    Inflection,
    /// Extension of the line through two mutually visible reflex vertices.
    Bitangent,
    /// Extension of the sight line from the target past a reflex vertex.
    TargetSight,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CriticalLine {
    pub kind: LineKind,
    pub segment: Segment,
}

/// Sensor bound to one street, with its critical lines precomputed.
#[derive(Clone, Debug)]
pub struct GapSensor<'a> {
    street: &'a Street,
    reflex: Vec<usize>,
    lines: Vec<CriticalLine>,
}

impl<'a> GapSensor<'a> {
    pub fn new(street: &'a Street) -> Self {
        let poly = street.polygon();
        let reflex: Vec<usize> = poly.reflex_vertices().collect();
        let mut lines = Vec::new();
        let mut push = |kind, from: Point2, dir: Point2| {
            if let Some((_, end, _)) = poly.ray_exit(from, dir, 0.0) {
                if end.dist(from) > 0.0 {
                    lines.push(CriticalLine {
                        kind,
                        segment: Segment::new(from, end),
                    });
                }
            }
        };
        for &v in &reflex {
            let pv = poly.vertex(v);
            for w in [poly.prev_index(v), poly.next_index(v)] {
                push(LineKind::Inflection, pv, pv - poly.vertex(w));
            }
            for &u in &reflex {
                if u != v && poly.segment_inside_unchecked(pv, poly.vertex(u)) {
                    push(LineKind::Bitangent, pv, pv - poly.vertex(u));
                }
            }
            let t = street.target_point();
            if poly.segment_inside_unchecked(pv, t) {
                push(LineKind::TargetSight, pv, pv - t);
            }
        }
        GapSensor {
            street,
            reflex,
            lines,
        }
    }

    pub fn street(&self) -> &'a Street {
        self.street
    }

    pub fn critical_lines(&self) -> &[CriticalLine] {
        &self.lines
    }

    fn poly(&self) -> &'a SimplePolygon {
        self.street.polygon()
    }

    /// The point sensed from when the robot stands at `p`.
    pub fn viewpoint(&self, p: Point2) -> Result<Point2, SenseError> {
        let poly = self.poly();
        match poly.classify(p) {
            Containment::Inside => Ok(p),
            Containment::Outside => Err(GeomError::OutsideQuery(p).into()),
            Containment::Boundary => {
                let (dir, scale) = inward_direction(poly, p);
                let mut d = BOUNDARY_NUDGE * scale;
                for _ in 0..8 {
                    let q = p + dir * d;
                    if poly.classify(q) == Containment::Inside {
                        return Ok(q);
                    }
                    d *= 4.0;
                }
                Err(GeomError::NotStrictlyInside(p).into())
            }
        }
    }

    /// Senses at `p`. With a prior frame, gap ids and primitive flags are
    /// carried over through the events explaining the change.
    pub fn sense(&self, p: Point2, prior: Option<&SensorFrame>) -> Result<SensorFrame, SenseError> {
        let poly = self.poly();
        let q = self.viewpoint(p)?;
        let mut next_id = prior.map_or(0, |f| f.next_id);
        let mut gaps: Vec<(f64, Gap)> = Vec::new();
        for &i in &self.reflex {
            let Some(w) = poly.sight_window(q, i) else {
                continue;
            };
            let anchor = poly.vertex(i);
            let (id, primitive) = match prior.and_then(|f| f.gap_at(i)) {
                Some(g) => (g.id, g.primitive),
                None => {
                    next_id += 1;
                    (GapId(next_id - 1), false)
                }
            };
            let d = anchor - q;
            gaps.push((
                d.y.atan2(d.x),
                Gap {
                    id,
                    side: w.hidden_side,
                    primitive,
                    anchor,
                    anchor_index: i,
                    direction: d.normalized(),
                    depth_near: d.norm(),
                    far: w.far,
                    far_edge: w.far_edge,
                },
            ));
        }
        gaps.sort_by(|a, b| a.0.total_cmp(&b.0));
        let t = self.street.target_point();
        let mut frame = SensorFrame {
            position: p,
            viewpoint: q,
            gaps: gaps.into_iter().map(|(_, g)| g).collect(),
            target_visible: p == t || poly.segment_inside_unchecked(q, t),
            next_id,
        };
        if let Some(prev) = prior {
            let events = self.diff_events(prev, &frame, Segment::new(prev.position, p))?;
            for e in &events {
                mark_primitive(e, prev, &mut frame);
            }
        }
        Ok(frame)
    }

    /// Hidden boundary vertices behind a gap of `frame`.
    pub fn pocket(&self, frame: &SensorFrame, gap: &Gap) -> PocketRange {
        self.poly()
            .pocket_vertices(frame.viewpoint, gap.anchor_index, gap.far_edge)
    }

    /// Whether the target lies in the region hidden behind `gap`.
    pub fn hides_target(&self, frame: &SensorFrame, gap: &Gap) -> bool {
        self.pocket(frame, gap).contains(self.street.target())
    }

    /// Events explaining how `prev` became `next` along `motion`. Gaps
    /// present in both frames are matched by id.
    pub fn diff_events(
        &self,
        prev: &SensorFrame,
        next: &SensorFrame,
        motion: Segment,
    ) -> Result<Vec<CriticalEvent>, SenseError> {
        let poly = self.poly();
        let inconsistent = || SenseError::Inconsistent {
            from: prev.position,
            to: next.position,
        };
        let mut events: Vec<(f64, CriticalEvent)> = Vec::new();

        for g in &next.gaps {
            if prev.gap(g.id).is_some() {
                continue;
            }
            if poly.segment_inside_unchecked(prev.viewpoint, g.anchor) {
                let (t, at) = inflection_crossing(poly, prev.viewpoint, next.viewpoint, g.anchor_index, motion);
                events.push((
                    t,
                    CriticalEvent {
                        kind: EventKind::Appearance,
                        gaps: vec![g.id],
                        location: at,
                    },
                ));
            } else {
                let parent = prev
                    .gaps
                    .iter()
                    .find(|h| self.pocket(prev, h).contains(g.anchor_index))
                    .ok_or_else(inconsistent)?;
                let (t, at) = line_crossing(motion, parent.anchor, g.anchor);
                events.push((
                    t,
                    CriticalEvent {
                        kind: EventKind::Split,
                        gaps: vec![parent.id, g.id],
                        location: at,
                    },
                ));
            }
        }

        for g in &prev.gaps {
            if next.gap(g.id).is_some() {
                continue;
            }
            if poly.segment_inside_unchecked(next.viewpoint, g.anchor) {
                let (t, at) = inflection_crossing(poly, prev.viewpoint, next.viewpoint, g.anchor_index, motion);
                events.push((
                    t,
                    CriticalEvent {
                        kind: EventKind::Disappearance,
                        gaps: vec![g.id],
                        location: at,
                    },
                ));
            } else {
                let into = next
                    .gaps
                    .iter()
                    .find(|h| self.pocket(next, h).contains(g.anchor_index))
                    .ok_or_else(inconsistent)?;
                let (t, at) = line_crossing(motion, into.anchor, g.anchor);
                events.push((
                    t,
                    CriticalEvent {
                        kind: EventKind::Merge,
                        gaps: vec![into.id, g.id],
                        location: at,
                    },
                ));
            }
        }
        events.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.kind.cmp(&b.1.kind)));
        Ok(events.into_iter().map(|(_, e)| e).collect())
    }

    /// The most advanced non-primitive left and right gaps: furthest along
    /// the boundary from the start in the respective chain direction.
    pub fn advanced_gaps<'f>(&self, frame: &'f SensorFrame) -> (Option<&'f Gap>, Option<&'f Gap>) {
        let pick = |side: Side| {
            frame
                .gaps
                .iter()
                .filter(|g| g.side == side && !g.primitive)
                .max_by_key(|g| match side {
                    Side::Left => self.street.left_rank(g.anchor_index),
                    Side::Right => self.street.right_rank(g.anchor_index),
                })
        };
        (pick(Side::Left), pick(Side::Right))
    }

    /// Splits `a → b` at the first critical line it crosses (excluding lines
    /// through `a` itself). Returns the crossing parameter and point.
    pub fn first_crossing(&self, a: Point2, b: Point2) -> Option<(f64, Point2)> {
        let m = b - a;
        let len = m.norm();
        if len == 0.0 {
            return None;
        }
        let mut best: Option<(f64, Point2)> = None;
        for line in &self.lines {
            let o = line.segment.a;
            let d = line.segment.b - o;
            let dl = d.norm();
            let da = d.cross(a - o) / dl;
            let db = d.cross(b - o) / dl;
            if da.abs() <= 1e-10 || da.signum() == db.signum() {
                continue;
            }
            let t = da / (da - db);
            let x = a + m * t;
            let s = (x - o).dot(d) / (dl * dl);
            if !(-1e-12..=1.0 + 1e-12).contains(&s) {
                continue;
            }
            if best.is_none_or(|(bt, _)| t < bt) {
                best = Some((t, x));
            }
        }
        best
    }
}

/// Unit direction pointing into the polygon from a boundary point, and how
/// far along it to go per unit of clearance from the boundary.
fn inward_direction(poly: &SimplePolygon, p: Point2) -> (Point2, f64) {
    let n = poly.len();
    if let Some(i) = (0..n).find(|&i| poly.vertex(i).dist(p) <= 1e-9) {
        let v = poly.vertex(i);
        let e1 = (poly.vertex(poly.prev_index(i)) - v).normalized();
        let e2 = (poly.vertex(poly.next_index(i)) - v).normalized();
        let mut c = e1 + e2;
        if c.norm() < 1e-9 {
            c = (e2 - e1).perp();
        }
        let c = c.normalized();
        // The bisector points outward at reflex vertices.
        if poly.is_reflex(i) {
            return (-c, 1.0);
        }
        let sin_half = ((e2 - e1).norm() / 2.0).max(1e-4);
        return (c, 1.0 / sin_half);
    }
    let (i, _) = poly
        .edges()
        .enumerate()
        .map(|(i, e)| (i, e.distance_to(p)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("polygon has edges");
    let e = poly.edge(i);
    ((e.b - e.a).normalized().perp(), 1.0)
}

/// Parameter and point where `motion` crosses the line through `a` and `b`.
fn line_crossing(motion: Segment, a: Point2, b: Point2) -> (f64, Point2) {
    let d = b - a;
    let m = motion.b - motion.a;
    let denom = m.cross(d);
    if denom.abs() < 1e-300 {
        return (0.5, motion.a.lerp(motion.b, 0.5));
    }
    let t = ((a - motion.a).cross(d) / denom).clamp(0.0, 1.0);
    (t, motion.a.lerp(motion.b, t))
}

/// Where the motion crosses the inflection line of `anchor` whose neighbor
/// changed sides between the two viewpoints.
fn inflection_crossing(
    poly: &SimplePolygon,
    from: Point2,
    to: Point2,
    anchor: usize,
    motion: Segment,
) -> (f64, Point2) {
    let v = poly.vertex(anchor);
    for w in [poly.prev_index(anchor), poly.next_index(anchor)] {
        let pw = poly.vertex(w);
        if orient(from, v, pw) != orient(to, v, pw) {
            return line_crossing(motion, v, pw);
        }
    }
    line_crossing(motion, v, poly.vertex(poly.next_index(anchor)))
}

/// Updates the primitive flags of `next` for one event: appeared gaps are
/// primitive, split children inherit from their parent, a merge is primitive
/// only if both parents were.
pub fn mark_primitive(event: &CriticalEvent, prev: &SensorFrame, next: &mut SensorFrame) {
    let flag = |frame: &SensorFrame, id: GapId| frame.gap(id).map(|g| g.primitive);
    let (target, value) = match event.kind {
        EventKind::Appearance => (event.gaps[0], Some(true)),
        EventKind::Split => (event.gaps[1], flag(prev, event.gaps[0])),
        EventKind::Merge => {
            let survivor = flag(next, event.gaps[0]);
            let absorbed = flag(prev, event.gaps[1]);
            (event.gaps[0], survivor.zip(absorbed).map(|(a, b)| a && b))
        }
        EventKind::Disappearance => return,
    };
    if let (Some(v), Some(g)) = (value, next.gaps.iter_mut().find(|g| g.id == target)) {
        g.primitive = v;
    }
}

/// The gap pair the strategy maintains.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Assignment {
    pub left: Option<GapId>,
    pub right: Option<GapId>,
}

impl Assignment {
    pub fn get(&self, side: Side) -> Option<GapId> {
        match side {
            Side::Left => self.left,
            Side::Right => self.right,
        }
    }

    pub fn set(&mut self, side: Side, id: Option<GapId>) {
        match side {
            Side::Left => self.left = id,
            Side::Right => self.right = id,
        }
    }

    pub fn from_frame(sensor: &GapSensor<'_>, frame: &SensorFrame) -> Self {
        let (l, r) = sensor.advanced_gaps(frame);
        Assignment {
            left: l.map(|g| g.id),
            right: r.map(|g| g.id),
        }
    }
}

/// Which update rule fired, and for which side's gap.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    /// The gap split off a same-side gap, which takes over.
    SameSideSplit(Side),
    /// The gap split off an opposite-side gap, which becomes the other gap;
    /// the funnel ends.
    OppositeSideSplit(Side),
    /// The gap disappeared; the funnel ends.
    Disappearance(Side),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RuleOutcome {
    pub assignment: Assignment,
    pub funnel_end: bool,
    pub fired: Vec<Rule>,
}

/// Applies the g_l/g_r update rules for one motion step toward `pursued`.
/// Disappearances are handled before splits, so a gap that splits and
/// vanishes at the same point hands over to its same-side child.
pub fn update_rules(
    sensor: &GapSensor<'_>,
    prev: Assignment,
    events: &[CriticalEvent],
    next: &SensorFrame,
    pursued: Option<Side>,
) -> Result<RuleOutcome, SenseError> {
    let mut out = RuleOutcome {
        assignment: prev,
        funnel_end: false,
        fired: Vec::new(),
    };
    let side_of = |id: GapId| [Side::Left, Side::Right].into_iter().find(|&s| prev.get(s) == Some(id));

    for e in events.iter().filter(|e| e.kind == EventKind::Merge) {
        for &id in &e.gaps {
            if let Some(side) = side_of(id) {
                if pursued == Some(side) {
                    return Err(SenseError::MergeOfPursued(id));
                }
            }
        }
        // The other gap absorbed into something: re-derive it below.
        if let Some(side) = side_of(e.gaps[1]) {
            out.assignment.set(side, None);
        }
    }
    for e in events.iter().filter(|e| e.kind == EventKind::Disappearance) {
        if let Some(side) = side_of(e.gaps[0]) {
            out.assignment.set(side, None);
            out.funnel_end = true;
            out.fired.push(Rule::Disappearance(side));
        }
    }
    for e in events.iter().filter(|e| e.kind == EventKind::Split) {
        let Some(side) = side_of(e.gaps[0]) else {
            continue;
        };
        let Some(child) = next.gap(e.gaps[1]) else {
            continue;
        };
        if child.primitive {
            continue;
        }
        if child.side == side {
            out.assignment.set(side, Some(child.id));
            out.fired.push(Rule::SameSideSplit(side));
        } else {
            out.assignment.set(child.side, Some(child.id));
            out.funnel_end = true;
            out.fired.push(Rule::OppositeSideSplit(side));
        }
    }
    // Anything no longer present, or left empty, falls back to the frame's
    // most advanced gaps.
    let fallback = Assignment::from_frame(sensor, next);
    for side in [Side::Left, Side::Right] {
        let keep = out
            .assignment
            .get(side)
            .and_then(|id| next.gap(id))
            .is_some_and(|g| g.side == side && !g.primitive);
        if !keep {
            out.assignment.set(side, fallback.get(side));
        }
    }
    Ok(out)
}

/// Senses at `p` in `street`. Convenience wrapper over [`GapSensor`].
pub fn sense(street: &Street, p: Point2, prior: Option<&SensorFrame>) -> Result<SensorFrame, SenseError> {
    GapSensor::new(street).sense(p, prior)
}

/// Per-kind event counters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventCounts {
    pub appear: u32,
    pub disappear: u32,
    pub split: u32,
    pub merge: u32,
}

impl EventCounts {
    pub fn add(&mut self, kind: EventKind) {
        match kind {
            EventKind::Appearance => self.appear += 1,
            EventKind::Disappearance => self.disappear += 1,
            EventKind::Split => self.split += 1,
            EventKind::Merge => self.merge += 1,
        }
    }

    pub fn total(&self) -> u32 {
        self.appear + self.disappear + self.split + self.merge
    }
}

impl std::ops::AddAssign for EventCounts {
    fn add_assign(&mut self, o: EventCounts) {
        self.appear += o.appear;
        self.disappear += o.disappear;
        self.split += o.split;
        self.merge += o.merge;
    }
}

/// Histogram of event kinds over a list of events.
pub fn count_events<'e>(events: impl IntoIterator<Item = &'e CriticalEvent>) -> EventCounts {
    let mut c = EventCounts::default();
    for e in events {
        c.add(e.kind);
    }
    c
}
