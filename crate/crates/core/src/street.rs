//! Streets: simple polygons with a start and a target vertex whose two
//! boundary chains are mutually weakly visible.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::geom::{GeomError, Point2, SimplePolygon};

/// Points sampled per chain edge during weak-visibility validation.
pub const SAMPLES_PER_EDGE: usize = 32;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StreetError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Geometry(#[from] GeomError),
    #[error("vertex index {index} out of range for {len} vertices")]
    BadIndex { index: usize, len: usize },
    #[error("start and target must be distinct vertices")]
    SameStartTarget,
    #[error("chains are not mutually weakly visible: {witness} sees nothing of the opposite chain")]
    NotAStreet { witness: Point2 },
}

impl StreetError {
    fn parse(line: usize, msg: impl Into<String>) -> Self {
        StreetError::Parse {
            line,
            msg: msg.into(),
        }
    }
}

/// Outcome of [`validate_street`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Validation {
    Street,
    /// A sample point on one chain that sees no sample of the other chain.
    Violation { witness: Point2 },
}

impl Validation {
    pub fn is_street(&self) -> bool {
        matches!(self, Validation::Street)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Street {
    polygon: SimplePolygon,
    start: usize,
    target: usize,
}

impl Street {
    /// Builds a street after checking indices and the weak-visibility
    /// property.
    pub fn new(polygon: SimplePolygon, start: usize, target: usize) -> Result<Self, StreetError> {
        match validate_street(&polygon, start, target)? {
            Validation::Street => Ok(Street {
                polygon,
                start,
                target,
            }),
            Validation::Violation { witness } => Err(StreetError::NotAStreet { witness }),
        }
    }

    /// Builds a street without the weak-visibility check (indices are still
    /// checked). For fixtures that are streets by construction.
    pub fn new_unvalidated(polygon: SimplePolygon, start: usize, target: usize) -> Result<Self, StreetError> {
        check_indices(&polygon, start, target)?;
        Ok(Street {
            polygon,
            start,
            target,
        })
    }

    pub fn polygon(&self) -> &SimplePolygon {
        &self.polygon
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn start_point(&self) -> Point2 {
        self.polygon.vertex(self.start)
    }

    pub fn target_point(&self) -> Point2 {
        self.polygon.vertex(self.target)
    }

    /// Vertices on the walker's left going from start to target: the
    /// clockwise boundary walk from `start` to `target`.
    pub fn left_chain(&self) -> Vec<usize> {
        chain(self.polygon.len(), self.start, self.target, false)
    }

    /// Vertices on the walker's right: the counterclockwise walk.
    pub fn right_chain(&self) -> Vec<usize> {
        chain(self.polygon.len(), self.start, self.target, true)
    }

    /// Boundary steps from `start` to vertex `i` walking along the left
    /// chain direction (past the target if need be).
    pub fn left_rank(&self, i: usize) -> usize {
        let n = self.polygon.len();
        (self.start + n - i) % n
    }

    /// Boundary steps from `start` to vertex `i` along the right chain
    /// direction.
    pub fn right_rank(&self, i: usize) -> usize {
        let n = self.polygon.len();
        (i + n - self.start) % n
    }
}

fn chain(n: usize, from: usize, to: usize, ccw: bool) -> Vec<usize> {
    let mut out = vec![from];
    let mut i = from;
    while i != to {
        i = if ccw { (i + 1) % n } else { (i + n - 1) % n };
        out.push(i);
    }
    out
}

fn check_indices(poly: &SimplePolygon, s: usize, t: usize) -> Result<(), StreetError> {
    for index in [s, t] {
        if index >= poly.len() {
            return Err(StreetError::BadIndex {
                index,
                len: poly.len(),
            });
        }
    }
    if s == t {
        return Err(StreetError::SameStartTarget);
    }
    Ok(())
}

fn chain_samples(poly: &SimplePolygon, chain: &[usize]) -> Vec<Point2> {
    let mut out = Vec::with_capacity(chain.len() * SAMPLES_PER_EDGE + 1);
    for w in chain.windows(2) {
        let (a, b) = (poly.vertex(w[0]), poly.vertex(w[1]));
        for k in 0..SAMPLES_PER_EDGE {
            out.push(a.lerp(b, k as f64 / SAMPLES_PER_EDGE as f64));
        }
    }
    if let Some(&last) = chain.last() {
        out.push(poly.vertex(last));
    }
    out
}

/// Checks that the two boundary chains between `s` and `t` are mutually
/// weakly visible, on a sampling of every chain edge plus all vertices.
pub fn validate_street(poly: &SimplePolygon, s: usize, t: usize) -> Result<Validation, StreetError> {
    check_indices(poly, s, t)?;
    let n = poly.len();
    let left = chain_samples(poly, &chain(n, s, t, false));
    let right = chain_samples(poly, &chain(n, s, t, true));
    for (from, to) in [(&left, &right), (&right, &left)] {
        for &p in from.iter() {
            // Nearest candidates first: they are the likeliest to be visible.
            let mut order: Vec<&Point2> = to.iter().collect();
            order.sort_by(|a, b| a.dist(p).total_cmp(&b.dist(p)));
            if !order.into_iter().any(|&q| poly.segment_inside_unchecked(p, q)) {
                return Ok(Validation::Violation { witness: p });
            }
        }
    }
    Ok(Validation::Street)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeodesicPath {
    pub waypoints: Vec<Point2>,
    /// Polygon vertex index of every waypoint.
    pub vertices: Vec<usize>,
    pub length: f64,
}

#[derive(PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

/// Shortest path from start to target inside the street: Dijkstra over the
/// visibility graph of the polygon vertices.
pub fn shortest_path(street: &Street) -> GeodesicPath {
    let poly = street.polygon();
    let n = poly.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut prev = vec![usize::MAX; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[street.start()] = 0.0;
    heap.push(Entry(0.0, street.start()));
    while let Some(Entry(d, u)) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        if u == street.target() {
            break;
        }
        for v in 0..n {
            if done[v] || !poly.segment_inside_unchecked(poly.vertex(u), poly.vertex(v)) {
                continue;
            }
            let nd = d + poly.vertex(u).dist(poly.vertex(v));
            if nd < dist[v] {
                dist[v] = nd;
                prev[v] = u;
                heap.push(Entry(nd, v));
            }
        }
    }
    let mut vertices = vec![street.target()];
    while let Some(&last) = vertices.last() {
        if last == street.start() {
            break;
        }
        vertices.push(prev[last]);
    }
    vertices.reverse();
    GeodesicPath {
        waypoints: vertices.iter().map(|&i| poly.vertex(i)).collect(),
        vertices,
        length: dist[street.target()],
    }
}

/// Shortest path between two points of the polygon (inside or on the
/// boundary), as the list of points it visits. `None` if either point lies
/// outside.
pub fn geodesic_between(poly: &SimplePolygon, a: Point2, b: Point2) -> Option<(Vec<Point2>, f64)> {
    if !poly.contains(a) || !poly.contains(b) {
        return None;
    }
    let mut pts: Vec<Point2> = poly.vertices().to_vec();
    pts.push(a);
    pts.push(b);
    let n = pts.len();
    let (src, dst) = (n - 2, n - 1);
    let mut dist = vec![f64::INFINITY; n];
    let mut prev = vec![usize::MAX; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[src] = 0.0;
    heap.push(Entry(0.0, src));
    while let Some(Entry(d, u)) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        if u == dst {
            break;
        }
        for v in 0..n {
            if done[v] || !poly.segment_inside_unchecked(pts[u], pts[v]) {
                continue;
            }
            let nd = d + pts[u].dist(pts[v]);
            if nd < dist[v] {
                dist[v] = nd;
                prev[v] = u;
                heap.push(Entry(nd, v));
            }
        }
    }
    if !done[dst] {
        return None;
    }
    let mut order = vec![dst];
    while let Some(&last) = order.last() {
        if last == src {
            break;
        }
        order.push(prev[last]);
    }
    order.reverse();
    Some((order.into_iter().map(|i| pts[i]).collect(), dist[dst]))
}

/// Parses the line-oriented street format:
///
/// ```text
/// street v=<n>
/// <x> <y>        (n lines, counterclockwise)
/// s=<index> t=<index>
/// ```
///
/// Lines starting with `#` are comments. The street is validated.
pub fn load_street(text: &str) -> Result<Street, StreetError> {
    let (poly, s, t) = parse_street(text)?;
    Street::new(poly, s, t)
}

/// Parses without the weak-visibility check.
pub fn parse_street(text: &str) -> Result<(SimplePolygon, usize, usize), StreetError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (ln, header) = lines
        .next()
        .ok_or_else(|| StreetError::parse(1, "empty input"))?;
    let n: usize = header
        .strip_prefix("street v=")
        .ok_or_else(|| StreetError::parse(ln, "expected `street v=<n>`"))?
        .parse()
        .map_err(|_| StreetError::parse(ln, "bad vertex count"))?;

    let mut vertices = Vec::with_capacity(n);
    for _ in 0..n {
        let (ln, l) = lines
            .next()
            .ok_or_else(|| StreetError::parse(ln, format!("expected {n} vertices")))?;
        let mut it = l.split_whitespace();
        let mut coord = || -> Result<f64, StreetError> {
            let v: f64 = it
                .next()
                .ok_or_else(|| StreetError::parse(ln, "expected `<x> <y>`"))?
                .parse()
                .map_err(|_| StreetError::parse(ln, "bad coordinate"))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(StreetError::parse(ln, "non-finite coordinate"))
            }
        };
        let x = coord()?;
        let y = coord()?;
        if it.next().is_some() {
            return Err(StreetError::parse(ln, "trailing tokens after coordinates"));
        }
        vertices.push(Point2::new(x, y));
    }

    let (ln, st) = lines
        .next()
        .ok_or_else(|| StreetError::parse(ln, "expected `s=<index> t=<index>`"))?;
    let mut it = st.split_whitespace();
    let mut index = |key: &str| -> Result<usize, StreetError> {
        it.next()
            .and_then(|tok| tok.strip_prefix(key))
            .ok_or_else(|| StreetError::parse(ln, format!("expected `{key}<index>`")))?
            .parse()
            .map_err(|_| StreetError::parse(ln, "bad index"))
    };
    let s = index("s=")?;
    let t = index("t=")?;
    if it.next().is_some() {
        return Err(StreetError::parse(ln, "trailing tokens after indices"));
    }
    if let Some((ln, _)) = lines.next() {
        return Err(StreetError::parse(ln, "trailing content"));
    }
    let poly = SimplePolygon::new(vertices)?;
    check_indices(&poly, s, t)?;
    Ok((poly, s, t))
}

pub fn save_street(street: &Street) -> String {
    let poly = street.polygon();
    let mut out = format!("street v={}\n", poly.len());
    for p in poly.vertices() {
        // `{}` on f64 prints the shortest string that parses back exactly.
        let _ = writeln!(out, "{} {}", p.x, p.y);
    }
    let _ = writeln!(out, "s={} t={}", street.start(), street.target());
    out
}
