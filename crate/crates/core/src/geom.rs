//! Planar geometry for street navigation: points, orientation, segment
//! intersection, containment, ray casting and visibility regions.
//!
//! Every collinearity and incidence decision goes through [`EPS`], measured
//! as a distance in model units.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance for collinearity and incidence tests, in model units.
pub const EPS: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("vertex {0} has a non-finite coordinate")]
    NonFinite(usize),
    #[error("vertices {0} and {1} coincide")]
    RepeatedVertex(usize, usize),
    #[error("edges {0} and {1} intersect")]
    SelfIntersecting(usize, usize),
    #[error("polygon is not counterclockwise (signed area {0})")]
    NotCounterClockwise(f64),
    #[error("query point ({}, {}) is outside the polygon", .0.x, .0.y)]
    OutsideQuery(Point2),
    #[error("query point ({}, {}) must be strictly inside the polygon", .0.x, .0.y)]
    NotStrictlyInside(Point2),
}

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    #[inline]
    pub fn dot(self, o: Point2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    #[inline]
    pub fn cross(self, o: Point2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn dist(self, o: Point2) -> f64 {
        (self - o).norm()
    }

    /// Unit vector in the same direction; the zero vector maps to itself.
    #[inline]
    pub fn normalized(self) -> Point2 {
        let n = self.norm();
        if n == 0.0 {
            self
        } else {
            Point2::new(self.x / n, self.y / n)
        }
    }

    /// Counterclockwise perpendicular.
    #[inline]
    pub fn perp(self) -> Point2 {
        Point2::new(-self.y, self.x)
    }

    #[inline]
    pub fn lerp(self, o: Point2, t: f64) -> Point2 {
        self + (o - self) * t
    }
}

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Add for Point2 {
    type Output = Point2;
    #[inline]
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    #[inline]
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    #[inline]
    fn mul(self, s: f64) -> Point2 {
        Point2::new(self.x * s, self.y * s)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    #[inline]
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub a: Point2,
    pub b: Point2,
}

impl Segment {
    pub const fn new(a: Point2, b: Point2) -> Self {
        Segment { a, b }
    }

    pub fn length(&self) -> f64 {
        self.a.dist(self.b)
    }

    /// Parameter of the orthogonal projection of `p` onto the supporting line.
    pub fn param_of(&self, p: Point2) -> f64 {
        let d = self.b - self.a;
        let l2 = d.dot(d);
        if l2 == 0.0 {
            0.0
        } else {
            (p - self.a).dot(d) / l2
        }
    }

    pub fn distance_to(&self, p: Point2) -> f64 {
        let t = self.param_of(p).clamp(0.0, 1.0);
        self.a.lerp(self.b, t).dist(p)
    }
}

/// Which side of a directed line something lies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }

    pub fn from_sign(sign: i8) -> Option<Side> {
        match sign {
            1 => Some(Side::Left),
            -1 => Some(Side::Right),
            _ => None,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Side::Left => 'L',
            Side::Right => 'R',
        }
    }
}

/// Sign of the turn p→q→r: `+1` if r lies strictly left of the directed line
/// p→q, `-1` if strictly right, `0` if within [`EPS`] of the line.
pub fn orient(p: Point2, q: Point2, r: Point2) -> i8 {
    let d = q - p;
    let c = d.cross(r - p);
    let scale = d.norm().max(1.0);
    if c.abs() <= EPS * scale {
        0
    } else if c > 0.0 {
        1
    } else {
        -1
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Intersection {
    None,
    Point(Point2),
    Overlap(Point2, Point2),
}

/// Classifies the intersection of two closed segments.
pub fn segment_intersect(s: Segment, t: Segment) -> Intersection {
    let d1 = orient(t.a, t.b, s.a);
    let d2 = orient(t.a, t.b, s.b);
    let d3 = orient(s.a, s.b, t.a);
    let d4 = orient(s.a, s.b, t.b);

    if d1 == 0 && d2 == 0 && d3 == 0 && d4 == 0 {
        return collinear_overlap(s, t);
    }
    if d1 * d2 > 0 || d3 * d4 > 0 {
        return Intersection::None;
    }
    // Prefer an endpoint when one lies on the other segment's line.
    if d1 == 0 && t.distance_to(s.a) <= EPS {
        return Intersection::Point(s.a);
    }
    if d2 == 0 && t.distance_to(s.b) <= EPS {
        return Intersection::Point(s.b);
    }
    if d3 == 0 && s.distance_to(t.a) <= EPS {
        return Intersection::Point(t.a);
    }
    if d4 == 0 && s.distance_to(t.b) <= EPS {
        return Intersection::Point(t.b);
    }
    if d1 == 0 || d2 == 0 || d3 == 0 || d4 == 0 {
        // Touching the supporting line outside the other segment.
        return Intersection::None;
    }
    let r = s.b - s.a;
    let q = t.b - t.a;
    let denom = r.cross(q);
    let u = (t.a - s.a).cross(q) / denom;
    Intersection::Point(s.a + r * u)
}

fn collinear_overlap(s: Segment, t: Segment) -> Intersection {
    let (lo_t, hi_t) = {
        let p0 = s.param_of(t.a);
        let p1 = s.param_of(t.b);
        (p0.min(p1), p0.max(p1))
    };
    let lo = lo_t.max(0.0);
    let hi = hi_t.min(1.0);
    let len = s.length().max(EPS);
    if (hi - lo) * len < -EPS {
        return Intersection::None;
    }
    let a = s.a.lerp(s.b, lo);
    let b = s.a.lerp(s.b, hi);
    if a.dist(b) <= EPS {
        Intersection::Point(a)
    } else {
        Intersection::Overlap(a, b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Containment {
    Inside,
    Boundary,
    Outside,
}

/// A window of a visibility region: the boundary edge from `anchor` (a reflex
/// vertex grazed by the sight line) to `far`, the point where the sight line
/// leaves the polygon.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    /// Index of the region boundary edge `boundary[edge]..boundary[edge + 1]`.
    pub edge: usize,
    pub anchor: usize,
    pub anchor_point: Point2,
    pub far: Point2,
    /// Polygon edge index containing `far`.
    pub far_edge: usize,
    /// Side of the ray apex→anchor on which the hidden region lies.
    pub hidden_side: Side,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VisibilityRegion {
    pub apex: Point2,
    pub boundary: Vec<Point2>,
    pub windows: Vec<Window>,
}

impl VisibilityRegion {
    pub fn area(&self) -> f64 {
        shoelace(&self.boundary)
    }

    /// The region as a polygon. Fails only for degenerate regions.
    pub fn to_polygon(&self) -> Result<SimplePolygon, GeomError> {
        SimplePolygon::new(self.boundary.clone())
    }
}

fn shoelace(pts: &[Point2]) -> f64 {
    let n = pts.len();
    (0..n).map(|i| pts[i].cross(pts[(i + 1) % n])).sum::<f64>() * 0.5
}

/// Geometric data for one reflex vertex seen from a point with its sight line
/// continuing past it into the interior.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SightWindow {
    pub anchor: usize,
    pub hidden_side: Side,
    pub far: Point2,
    pub far_edge: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimplePolygon {
    vertices: Vec<Point2>,
    reflex: Vec<bool>,
}

impl SimplePolygon {
    /// Validates and builds a counterclockwise simple polygon.
    pub fn new(vertices: Vec<Point2>) -> Result<Self, GeomError> {
        let n = vertices.len();
        if n < 3 {
            return Err(GeomError::TooFewVertices(n));
        }
        if let Some(i) = vertices.iter().position(|p| !p.is_finite()) {
            return Err(GeomError::NonFinite(i));
        }
        for i in 0..n {
            let j = (i + 1) % n;
            if vertices[i].dist(vertices[j]) <= EPS {
                return Err(GeomError::RepeatedVertex(i, j));
            }
        }
        let edge = |i: usize| Segment::new(vertices[i], vertices[(i + 1) % n]);
        for i in 0..n {
            for j in i + 1..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                let hit = segment_intersect(edge(i), edge(j));
                let bad = if adjacent {
                    // Adjacent edges may only share their common vertex.
                    matches!(hit, Intersection::Overlap(..))
                } else {
                    !matches!(hit, Intersection::None)
                };
                if bad {
                    return Err(GeomError::SelfIntersecting(i, j));
                }
            }
        }
        let area = shoelace(&vertices);
        if area <= 0.0 {
            return Err(GeomError::NotCounterClockwise(area));
        }
        let reflex = (0..n)
            .map(|i| orient(vertices[(i + n - 1) % n], vertices[i], vertices[(i + 1) % n]) < 0)
            .collect();
        Ok(SimplePolygon { vertices, reflex })
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    #[inline]
    pub fn vertex(&self, i: usize) -> Point2 {
        self.vertices[i % self.vertices.len()]
    }

    #[inline]
    pub fn prev_index(&self, i: usize) -> usize {
        (i + self.len() - 1) % self.len()
    }

    #[inline]
    pub fn next_index(&self, i: usize) -> usize {
        (i + 1) % self.len()
    }

    /// Edge `i` runs from vertex `i` to vertex `i + 1`.
    #[inline]
    pub fn edge(&self, i: usize) -> Segment {
        Segment::new(self.vertex(i), self.vertex(i + 1))
    }

    pub fn edges(&self) -> impl Iterator<Item = Segment> + '_ {
        (0..self.len()).map(move |i| self.edge(i))
    }

    pub fn area(&self) -> f64 {
        shoelace(&self.vertices)
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().map(|e| e.length()).sum()
    }

    #[inline]
    pub fn is_reflex(&self, i: usize) -> bool {
        self.reflex[i % self.len()]
    }

    pub fn reflex_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&i| self.reflex[i])
    }

    /// Largest coordinate magnitude; used to scale nudges.
    pub fn extent(&self) -> f64 {
        self.vertices
            .iter()
            .fold(0.0f64, |m, p| m.max(p.x.abs()).max(p.y.abs()))
    }

    pub fn classify(&self, p: Point2) -> Containment {
        if self.edges().any(|e| e.distance_to(p) <= EPS) {
            return Containment::Boundary;
        }
        let mut inside = false;
        let n = self.len();
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            if (a.y > p.y) != (b.y > p.y) {
                let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
                if x > p.x {
                    inside = !inside;
                }
            }
        }
        if inside {
            Containment::Inside
        } else {
            Containment::Outside
        }
    }

    pub fn contains(&self, p: Point2) -> bool {
        self.classify(p) != Containment::Outside
    }

    /// Whether the closed segment `ab` stays inside the closed polygon.
    /// Grazing a vertex or running along an edge counts as inside.
    pub fn segment_inside(&self, a: Point2, b: Point2) -> Result<bool, GeomError> {
        for p in [a, b] {
            if self.classify(p) == Containment::Outside {
                return Err(GeomError::OutsideQuery(p));
            }
        }
        Ok(self.segment_inside_unchecked(a, b))
    }

    /// [`segment_inside`](Self::segment_inside) without the endpoint check.
    pub fn segment_inside_unchecked(&self, a: Point2, b: Point2) -> bool {
        if a.dist(b) <= EPS {
            return true;
        }
        let seg = Segment::new(a, b);
        let mut cuts: Vec<f64> = vec![0.0, 1.0];
        for e in self.edges() {
            match segment_intersect(seg, e) {
                Intersection::None => {}
                Intersection::Point(x) => {
                    let o1 = orient(a, b, e.a);
                    let o2 = orient(a, b, e.b);
                    let o3 = orient(e.a, e.b, a);
                    let o4 = orient(e.a, e.b, b);
                    if o1 * o2 < 0 && o3 * o4 < 0 {
                        return false;
                    }
                    cuts.push(seg.param_of(x));
                }
                Intersection::Overlap(x, y) => {
                    cuts.push(seg.param_of(x));
                    cuts.push(seg.param_of(y));
                }
            }
        }
        cuts.sort_by(f64::total_cmp);
        let min_piece = EPS / seg.length();
        cuts.windows(2)
            .filter(|w| w[1] - w[0] > min_piece)
            .all(|w| self.classify(a.lerp(b, 0.5 * (w[0] + w[1]))) != Containment::Outside)
    }

    /// First parameter `t > t_min` at which the ray `origin + t·dir` leaves
    /// the polygon, with the exit point and the polygon edge it lies on.
    /// Grazing contacts that do not leave the polygon are passed through.
    pub fn ray_exit(&self, origin: Point2, dir: Point2, t_min: f64) -> Option<(f64, Point2, usize)> {
        let dl = dir.norm();
        if dl == 0.0 {
            return None;
        }
        let tol = EPS / dl;
        let mut cands: Vec<(f64, usize)> = Vec::new();
        for (i, e) in self.edges().enumerate() {
            let q = e.b - e.a;
            let denom = dir.cross(q);
            let w = e.a - origin;
            if denom.abs() <= 1e-15 * dl * q.norm() {
                // Parallel; only a collinear edge contributes.
                if orient(origin, origin + dir, e.a) == 0 && orient(origin, origin + dir, e.b) == 0 {
                    for p in [e.a, e.b] {
                        let t = (p - origin).dot(dir) / (dl * dl);
                        if t > t_min + tol {
                            cands.push((t, i));
                        }
                    }
                }
                continue;
            }
            let t = w.cross(q) / denom;
            let s = w.cross(dir) / denom;
            let s_tol = EPS / q.norm();
            if t > t_min + tol && s >= -s_tol && s <= 1.0 + s_tol {
                cands.push((t, i));
            }
        }
        cands.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (k, &(t, edge)) in cands.iter().enumerate() {
            let next = cands[k + 1..].iter().map(|c| c.0).find(|&u| u > t + tol);
            let Some(u) = next else {
                return Some((t, origin + dir * t, edge));
            };
            let probe = origin + dir * (0.5 * (t + u));
            if self.classify(probe) == Containment::Outside {
                return Some((t, origin + dir * t, edge));
            }
        }
        None
    }

    /// Nearest point where the ray from `origin` along `direction` leaves the
    /// polygon. Returns `origin` itself if the ray leaves immediately.
    pub fn first_boundary_hit(&self, origin: Point2, direction: Point2) -> Point2 {
        self.ray_exit(origin, direction, 0.0)
            .map(|(_, p, _)| p)
            .unwrap_or(origin)
    }

    /// Window data for vertex `i` seen from `p`, or `None` if `i` is hidden or
    /// the sight line does not continue past it into the interior.
    pub fn sight_window(&self, p: Point2, i: usize) -> Option<SightWindow> {
        if !self.reflex[i] {
            return None;
        }
        let v = self.vertex(i);
        let sp = orient(p, v, self.vertex(self.prev_index(i)));
        let sn = orient(p, v, self.vertex(self.next_index(i)));
        if sp == 0 || sp != sn {
            return None;
        }
        if !self.segment_inside_unchecked(p, v) {
            return None;
        }
        let (_, far, far_edge) = self.ray_exit(p, v - p, 1.0)?;
        Some(SightWindow {
            anchor: i,
            hidden_side: Side::from_sign(sp)?,
            far,
            far_edge,
        })
    }

    /// Visibility region of an interior point, assembled by sorting the
    /// visible vertices by angle and casting a ray past every window anchor.
    pub fn visibility_region(&self, p: Point2) -> Result<VisibilityRegion, GeomError> {
        match self.classify(p) {
            Containment::Inside => {}
            Containment::Boundary => return Err(GeomError::NotStrictlyInside(p)),
            Containment::Outside => return Err(GeomError::OutsideQuery(p)),
        }
        let mut visible: Vec<(f64, f64, usize)> = (0..self.len())
            .filter(|&i| self.segment_inside_unchecked(p, self.vertex(i)))
            .map(|i| {
                let d = self.vertex(i) - p;
                (d.y.atan2(d.x), d.norm(), i)
            })
            .collect();
        visible.sort_by(|a, b| match a.0.total_cmp(&b.0) {
            Ordering::Equal => a.1.total_cmp(&b.1),
            o => o,
        });
        // atan2 can misorder vertices lying on one ray from p; nearer first.
        let same_ray = |i: usize, j: usize| {
            let (a, b) = (self.vertex(i), self.vertex(j));
            orient(p, a, b) == 0 && (a - p).dot(b - p) > 0.0
        };
        for k in 1..visible.len() {
            let mut m = k;
            while m > 0 && same_ray(visible[m - 1].2, visible[m].2) && visible[m - 1].1 > visible[m].1 {
                visible.swap(m - 1, m);
                m -= 1;
            }
        }

        let mut boundary = Vec::with_capacity(visible.len() * 2);
        let mut windows: Vec<Window> = Vec::new();
        for &(_, dist, i) in &visible {
            let v = self.vertex(i);
            // Vertices grazed by the previous window lie on its edge already.
            if let Some(w) = windows.last() {
                if same_ray(w.anchor, i) && dist <= w.far.dist(p) + EPS {
                    continue;
                }
            }
            match self.sight_window(p, i) {
                Some(w) if w.hidden_side == Side::Left => {
                    // Occluding edges sweep in after v: far boundary first.
                    windows.push(Window {
                        edge: boundary.len(),
                        anchor: i,
                        anchor_point: v,
                        far: w.far,
                        far_edge: w.far_edge,
                        hidden_side: w.hidden_side,
                    });
                    boundary.push(w.far);
                    boundary.push(v);
                }
                Some(w) => {
                    windows.push(Window {
                        edge: boundary.len(),
                        anchor: i,
                        anchor_point: v,
                        far: w.far,
                        far_edge: w.far_edge,
                        hidden_side: w.hidden_side,
                    });
                    boundary.push(v);
                    boundary.push(w.far);
                }
                None => boundary.push(v),
            }
        }
        Ok(VisibilityRegion {
            apex: p,
            boundary,
            windows,
        })
    }

    /// Indices of the vertices strictly behind the window anchored at
    /// `anchor` whose far end lies on polygon edge `far_edge`, walking along
    /// the boundary from the anchor into the hidden pocket.
    pub fn pocket_vertices(&self, from: Point2, anchor: usize, far_edge: usize) -> PocketRange {
        let n = self.len();
        // The pocket follows the anchor edge that faces away from the viewer.
        let prev = self.prev_index(anchor);
        let incoming = Segment::new(self.vertex(prev), self.vertex(anchor));
        let backward = orient(incoming.a, incoming.b, from) <= 0;
        if backward {
            // anchor-1, anchor-2, ..., down to far_edge + 1
            let start = prev;
            let end = (far_edge + 1) % n;
            let len = (start + n - end) % n + 1;
            PocketRange {
                n,
                start,
                len,
                forward: false,
            }
        } else {
            // anchor+1, ..., far_edge
            let start = self.next_index(anchor);
            let len = (far_edge + n - start) % n + 1;
            PocketRange {
                n,
                start,
                len,
                forward: true,
            }
        }
    }
}

/// A contiguous run of polygon vertex indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PocketRange {
    n: usize,
    start: usize,
    len: usize,
    forward: bool,
}

impl PocketRange {
    pub fn contains(&self, i: usize) -> bool {
        let off = if self.forward {
            (i + self.n - self.start) % self.n
        } else {
            (self.start + self.n - i) % self.n
        };
        off < self.len
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).map(move |k| {
            if self.forward {
                (self.start + k) % self.n
            } else {
                (self.start + self.n - k) % self.n
            }
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point2 {
        Point2::new(x, y)
    }

    pub(crate) fn unit_square() -> SimplePolygon {
        SimplePolygon::new(vec![p(0., 0.), p(1., 0.), p(1., 1.), p(0., 1.)]).unwrap()
    }

    pub(crate) fn l_shape() -> SimplePolygon {
        SimplePolygon::new(vec![
            p(0., 0.),
            p(2., 0.),
            p(2., 1.),
            p(1., 1.),
            p(1., 2.),
            p(0., 2.),
        ])
        .unwrap()
    }

    #[test]
    fn orient_examples() {
        assert_eq!(orient(p(0., 0.), p(1., 0.), p(0., 1.)), 1);
        assert_eq!(orient(p(0., 0.), p(1., 0.), p(2., 0.)), 0);
        assert_eq!(orient(p(0., 0.), p(0., 1.), p(1., 1.)), -1);
    }

    #[test]
    fn segment_intersect_examples() {
        let s = |a: Point2, b: Point2| Segment::new(a, b);
        assert_eq!(
            segment_intersect(s(p(0., 0.), p(2., 0.)), s(p(1., -1.), p(1., 1.))),
            Intersection::Point(p(1., 0.))
        );
        assert_eq!(
            segment_intersect(s(p(0., 0.), p(1., 0.)), s(p(2., 0.), p(3., 0.))),
            Intersection::None
        );
        assert!(matches!(
            segment_intersect(s(p(0., 0.), p(2., 0.)), s(p(1., 0.), p(3., 0.))),
            Intersection::Overlap(a, b) if a == p(1., 0.) && b == p(2., 0.)
        ));
        // touching at an endpoint
        assert_eq!(
            segment_intersect(s(p(0., 0.), p(1., 1.)), s(p(1., 1.), p(2., 0.))),
            Intersection::Point(p(1., 1.))
        );
    }

    #[test]
    fn rejects_bad_polygons() {
        assert_eq!(
            SimplePolygon::new(vec![p(0., 0.), p(1., 0.)]),
            Err(GeomError::TooFewVertices(2))
        );
        let bowtie = vec![p(0., 0.), p(1., 1.), p(1., 0.), p(0., 1.)];
        assert!(matches!(
            SimplePolygon::new(bowtie),
            Err(GeomError::SelfIntersecting(..))
        ));
        let cw = vec![p(0., 0.), p(0., 1.), p(1., 1.), p(1., 0.)];
        assert!(matches!(
            SimplePolygon::new(cw),
            Err(GeomError::NotCounterClockwise(_))
        ));
        let nan = vec![p(0., 0.), p(f64::NAN, 0.), p(1., 1.)];
        assert_eq!(SimplePolygon::new(nan), Err(GeomError::NonFinite(1)));
    }

    #[test]
    fn reflex_flags() {
        let l = l_shape();
        assert_eq!(l.reflex_vertices().collect::<Vec<_>>(), vec![3]);
        assert_eq!(unit_square().reflex_vertices().count(), 0);
    }

    #[test]
    fn segment_inside_examples() {
        let sq = unit_square();
        assert!(sq.segment_inside(p(0.2, 0.2), p(0.8, 0.8)).unwrap());
        let l = l_shape();
        // Passes exactly through the reflex vertex (1,1): grazing is visible.
        assert!(l.segment_inside(p(0.5, 1.5), p(1.5, 0.5)).unwrap());
        // Slightly steeper: crosses the edge y = 1 at x = 1.05.
        assert!(!l.segment_inside(p(0.5, 1.5), p(1.6, 0.5)).unwrap());
        assert!(l.segment_inside(p(0.3, 0.3), p(0.3, 0.3)).unwrap());
        // Along the boundary.
        assert!(l.segment_inside(p(0., 0.), p(2., 0.)).unwrap());
        // Outside the polygon through a convex corner region.
        assert!(!l.segment_inside(p(1., 2.), p(2., 1.)).unwrap());
        assert_eq!(
            l.segment_inside(p(1.5, 1.5), p(0.5, 0.5)),
            Err(GeomError::OutsideQuery(p(1.5, 1.5)))
        );
    }

    /// Brute-force crossing count: sample the segment densely and test
    /// every sample for containment.
    fn sampled_inside(poly: &SimplePolygon, a: Point2, b: Point2) -> bool {
        (0..=2000).all(|k| poly.contains(a.lerp(b, k as f64 / 2000.0)))
    }

    #[test]
    fn segment_inside_matches_sampling_on_l_shape() {
        let l = l_shape();
        let pts = [
            p(0.5, 1.5),
            p(1.6, 0.5),
            p(0.2, 0.2),
            p(1.9, 0.9),
            p(0.9, 1.9),
            p(0.1, 1.1),
            p(1.2, 0.1),
        ];
        for &a in &pts {
            for &b in &pts {
                assert_eq!(
                    l.segment_inside(a, b).unwrap(),
                    sampled_inside(&l, a, b),
                    "{a} -> {b}"
                );
            }
        }
    }

    #[test]
    fn first_boundary_hit_examples() {
        let sq = unit_square();
        assert_eq!(sq.first_boundary_hit(p(0.5, 0.5), p(1., 0.)), p(1., 0.5));
        assert_eq!(sq.first_boundary_hit(p(0.5, 0.5), p(0., -1.)), p(0.5, 0.));
        let l = l_shape();
        // Passing the reflex vertex (1,1) the ray continues up the left arm
        // and leaves through the top edge at x = 1 - 0.5/0.6.
        let hit = l.first_boundary_hit(p(1.5, 0.4), p(-0.5, 0.6));
        assert!(hit.dist(p(1.0 - 0.5 / 0.6, 2.0)) < 1e-12, "{hit}");
        // Heading into the notch above (1,1) the ray leaves at the vertex.
        let hit = l.first_boundary_hit(p(0.5, 0.5), p(1., 1.));
        assert!(hit.dist(p(1., 1.)) < 1e-12, "{hit}");
    }

    #[test]
    fn visibility_convex_has_no_windows() {
        let sq = unit_square();
        let vr = sq.visibility_region(p(0.5, 0.5)).unwrap();
        assert!(vr.windows.is_empty());
        assert!((vr.area() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn visibility_l_shape_windows() {
        let l = l_shape();
        // The corner square sees both arms completely.
        let vr = l.visibility_region(p(0.5, 0.5)).unwrap();
        assert!(vr.windows.is_empty());
        assert!((vr.area() - 3.0).abs() < 1e-9);

        for q in [p(0.5, 1.5), p(0.5, 1.6), p(1.5, 0.5)] {
            let vr = l.visibility_region(q).unwrap();
            assert_eq!(vr.windows.len(), 1, "at {q}");
            let w = vr.windows[0];
            assert_eq!(w.anchor, 3);
            assert_eq!(orient(q, w.anchor_point, w.far), 0);
            assert!(vr.area() < l.area());
        }
        // From (0.5, 1.5) the window runs from (1,1) to (2,0): the hidden
        // triangle (1,1),(2,1),(2,0) has area 1/2.
        let vr = l.visibility_region(p(0.5, 1.5)).unwrap();
        assert!((vr.area() - 2.5).abs() < 1e-9);
        assert!(matches!(
            l.visibility_region(p(1., 1.5)),
            Err(GeomError::NotStrictlyInside(_))
        ));
    }

    #[test]
    fn pocket_of_l_shape_window() {
        let l = l_shape();
        let q = p(0.5, 1.6);
        let w = l.sight_window(q, 3).unwrap();
        let pocket = l.pocket_vertices(q, 3, w.far_edge);
        // Hidden part of the right arm: (2,1) and possibly (2,0).
        assert!(pocket.contains(2));
        assert!(!pocket.contains(4));
        assert!(!pocket.contains(5));
    }
}
