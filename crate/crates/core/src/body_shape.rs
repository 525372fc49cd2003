//! Good pairs of directions for convex polygons in the canonical frame.
//!
//! A good pair is two chord lines, each joining the touch points of a pair of
//! parallel tangents, that cross at an angle of at least `pi/15` in a point `x`
//! whose `1/50`-ball lies in the body.

use crate::error::{Error, Result};
use crate::geom::{canonical_triangle, line_angle, orient, Orientation, Support};
use crate::{AffineFrame, ConvexPolygon, NormalizedBody, Point};
use std::f64::consts::PI;

pub const MIN_ANGLE: f64 = PI / 15.0;
pub const MIN_CLEARANCE: f64 = 1.0 / 50.0;
const CENTRAL: f64 = 2.0 * PI / 15.0;
const SLIVER: f64 = PI / 30.0;
const CHECK_TOL: f64 = 1e-9;
const REALIZE_TOL: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum ChordType {
    Central,
    Left,
    Right,
}

/// The three chords `p_i q_i` with their types and the small triangles that
/// bound the possible positions of `q_i`.
#[derive(Clone, Debug)]
pub struct ChordConfig {
    pub p: [Point; 3],
    pub q: [Point; 3],
    /// Signed angle from `o - p_i` to `q_i - p_i`; positive turns toward `p_{i-1}`.
    pub angles: [f64; 3],
    pub types: [ChordType; 3],
    pub s_minus: [Point; 3],
    pub s_plus: [Point; 3],
    /// `T_i^- = (p_i, p_{i+1}, s_i^-)`.
    pub t_minus: [[Point; 3]; 3],
    /// `T_i^+ = (p_i, p_{i-1}, s_i^+)`.
    pub t_plus: [[Point; 3]; 3],
    pub t_left: [Point; 3],
    pub t_right: [Point; 3],
}

/// A line through `point` with unit direction `dir`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Line {
    pub point: Point,
    pub dir: Point,
}

impl Line {
    pub fn through(a: Point, b: Point) -> Option<Line> {
        let d = b - a;
        if !(d.norm() > 0.0) {
            return None;
        }
        Some(Line { point: a, dir: d.unit() })
    }

    pub fn distance(&self, p: Point) -> f64 {
        self.dir.cross(p - self.point).abs()
    }

    pub fn intersect(&self, o: &Line) -> Option<Point> {
        let den = self.dir.cross(o.dir);
        if den.abs() < 1e-14 {
            return None;
        }
        let s = (o.point - self.point).cross(o.dir) / den;
        Some(self.point + self.dir * s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairCase {
    CenterCenter,
    Case1,
    Case2a,
    Case2b,
    Case2c,
    Case2d,
    SearchFallback,
}

impl PairCase {
    pub fn as_str(&self) -> &'static str {
        match self {
            PairCase::CenterCenter => "center-center",
            PairCase::Case1 => "case1",
            PairCase::Case2a => "case2a",
            PairCase::Case2b => "case2b",
            PairCase::Case2c => "case2c",
            PairCase::Case2d => "case2d",
            PairCase::SearchFallback => "search-fallback",
        }
    }
}

/// A chord between two boundary points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Chord {
    pub p: Point,
    pub q: Point,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GoodPair {
    pub chords: [Chord; 2],
    pub lines: [Line; 2],
    pub x: Point,
    pub angle: f64,
    pub clearance: f64,
    pub case: PairCase,
}

impl GoodPair {
    fn from_chords(poly: &ConvexPolygon, a: Chord, b: Chord, case: PairCase) -> Option<GoodPair> {
        let l1 = Line::through(a.p, a.q)?;
        let l2 = Line::through(b.p, b.q)?;
        let x = l1.intersect(&l2)?;
        let clearance = if poly.contains(x) { poly.clearance(x) } else { -poly.clearance(x).abs() };
        Some(GoodPair {
            chords: [a, b],
            lines: [l1, l2],
            x,
            angle: line_angle(l1.dir, l2.dir),
            clearance,
            case,
        })
    }

    fn margin(&self) -> f64 {
        (self.angle - MIN_ANGLE).min(self.clearance - MIN_CLEARANCE)
    }

    fn mapped(&self, f: &AffineFrame, poly: &ConvexPolygon) -> Option<GoodPair> {
        let m = |c: Chord| Chord { p: f.apply(c.p), q: f.apply(c.q) };
        GoodPair::from_chords(poly, m(self.chords[0]), m(self.chords[1]), self.case)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairCheck {
    pub ok: bool,
    pub angle_ok: bool,
    pub clearance_ok: bool,
    pub realizable: [bool; 2],
    pub diagnostics: Vec<&'static str>,
}

fn rotated_toward(from: Point, to: Point, interior: Point, angle: f64) -> Point {
    let d = (to - from).unit();
    let s = if d.cross(interior - from) > 0.0 { angle } else { -angle };
    d.rotate(s)
}

fn line_meet(a: Point, da: Point, b: Point, db: Point) -> Point {
    Line { point: a, dir: da.unit() }
        .intersect(&Line { point: b, dir: db.unit() })
        .expect("canonical construction lines are not parallel")
}

/// `(s^-, s^+)` for the canonical triangle.
pub fn side_points() -> ([Point; 3], [Point; 3]) {
    let p = canonical_triangle::<f64>();
    let o = Point::origin();
    let nx = |i: usize| (i + 1) % 3;
    let pv = |i: usize| (i + 2) % 3;
    let minus = [0, 1, 2].map(|i| {
        let k = nx(i);
        let d = rotated_toward(p[k], p[i], o, SLIVER);
        line_meet(p[i], p[i].perp(), p[k], d)
    });
    let plus = [0, 1, 2].map(|i| {
        let k = pv(i);
        let d = rotated_toward(p[k], p[i], o, SLIVER);
        line_meet(p[i], p[i].perp(), p[k], d)
    });
    (minus, plus)
}

fn classify_in(poly: &ConvexPolygon) -> ChordConfig {
    let p = canonical_triangle::<f64>();
    let q = p.map(|u| poly.support_point(poly.support(-u).1));
    let angles = [0, 1, 2].map(|i| {
        let a = -p[i];
        let b = q[i] - p[i];
        a.cross(b).atan2(a.dot(b))
    });
    let types = angles.map(|t| {
        if t.abs() <= CENTRAL {
            ChordType::Central
        } else if t > 0.0 {
            ChordType::Left
        } else {
            ChordType::Right
        }
    });
    let (s_minus, s_plus) = side_points();
    let t_minus = [0, 1, 2].map(|i| [p[i], p[(i + 1) % 3], s_minus[i]]);
    let t_plus = [0, 1, 2].map(|i| [p[i], p[(i + 2) % 3], s_plus[i]]);
    let up = Point::new(0.0, 1.0);
    let l_corner = line_meet(s_minus[0], s_plus[2] - s_minus[0], p[2], up);
    let r_corner = line_meet(s_plus[0], s_minus[1] - s_plus[0], p[1], up);
    ChordConfig {
        p,
        q,
        angles,
        types,
        s_minus,
        s_plus,
        t_minus,
        t_plus,
        t_left: [p[2], s_plus[2], l_corner],
        t_right: [p[1], s_minus[1], r_corner],
    }
}

pub fn classify_chords(body: &NormalizedBody) -> ChordConfig {
    classify_in(&body.polygon)
}

pub fn triangle_contains(t: &[Point; 3], x: Point, tol: f64) -> bool {
    let s = (t[1] - t[0]).cross(t[2] - t[0]).signum();
    (0..3).all(|i| {
        let a = t[i];
        let b = t[(i + 1) % 3];
        s * (b - a).cross(x - a) >= -tol * (b - a).norm()
    })
}

fn edge_normal_angle(poly: &ConvexPolygon, i: usize) -> f64 {
    let (a, b) = poly.edge(i);
    let e = b - a;
    e.y.atan2(e.x) - PI / 2.0
}

/// Chords swept by a tangent pair whose first line has outward normal angle
/// `psi0` and touches at `p0`, rotated by `delta` (positive is
/// counterclockwise). Consecutive states differ by one endpoint sliding along
/// an edge.
fn sweep(poly: &ConvexPolygon, p0: Point, q0: Point, psi0: f64, delta: f64) -> Vec<Chord> {
    let n = poly.len();
    let mut events: Vec<(f64, bool, Point)> = Vec::new();
    for i in 0..n {
        let nrm = edge_normal_angle(poly, i);
        for (is_p, base) in [(true, psi0), (false, psi0 + PI)] {
            let raw = if delta >= 0.0 { nrm - base } else { base - nrm };
            let mut off = raw.rem_euclid(2.0 * PI);
            if off > 2.0 * PI - 1e-9 {
                off = 0.0;
            }
            if off <= delta.abs() + 1e-12 {
                let target = if delta >= 0.0 { poly.vertex(i + 1) } else { poly.vertex(i) };
                events.push((off, is_p, target));
            }
        }
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut states = vec![Chord { p: p0, q: q0 }];
    let mut cur = states[0];
    for (_, is_p, target) in events {
        if is_p {
            cur.p = target;
        } else {
            cur.q = target;
        }
        if *states.last().unwrap() != cur {
            states.push(cur);
        }
    }
    states
}

/// First chord along a sweep that passes through the origin.
fn first_through_origin(states: &[Chord]) -> Option<Chord> {
    let o = Point::origin();
    let sign = |c: &Chord| orient(c.p, c.q, o);
    let start = sign(&states[0]);
    if start == Orientation::Collinear {
        return Some(states[0]);
    }
    for w in states.windows(2) {
        let s = sign(&w[1]);
        if s == Orientation::Collinear {
            return Some(w[1]);
        }
        if s != start {
            let fa = w[0].p.cross(w[0].q);
            let fb = w[1].p.cross(w[1].q);
            let t = (fa / (fa - fb)).clamp(0.0, 1.0);
            return Some(Chord {
                p: w[0].p.lerp(w[1].p, t),
                q: w[0].q.lerp(w[1].q, t),
            });
        }
    }
    None
}

fn segment_near_line(line: &Line, a: Point, b: Point, tol: f64) -> bool {
    let sa = line.dir.cross(a - line.point);
    let sb = line.dir.cross(b - line.point);
    sa.abs() <= tol || sb.abs() <= tol || (sa > 0.0) != (sb > 0.0)
}

fn support_segment(poly: &ConvexPolygon, s: Support) -> (Point, Point) {
    match s {
        Support::Vertex(i) => (poly.vertex(i), poly.vertex(i)),
        Support::Edge(i) => poly.edge(i),
    }
}

/// Whether `line` carries the chord of some pair of parallel tangents.
pub fn chord_realizable(poly: &ConvexPolygon, line: &Line, tol: f64) -> bool {
    let n = poly.len();
    let normals: Vec<f64> = (0..n).map(|i| edge_normal_angle(poly, i)).collect();
    for i in 0..n {
        let nv = Point::new(normals[i].cos(), normals[i].sin());
        let (a0, a1) = poly.edge(i);
        let (b0, b1) = support_segment(poly, poly.support(-nv).1);
        if segment_near_line(line, a0, a1, tol) && segment_near_line(line, b0, b1, tol) {
            return true;
        }
    }
    // vertex v_i is touched for normals in (normals[i-1], normals[i])
    let arc = |i: usize| {
        let lo = normals[(i + n - 1) % n];
        let w = (normals[i] - lo).rem_euclid(2.0 * PI);
        (lo, w)
    };
    for i in 0..n {
        if line.distance(poly.vertex(i)) > tol {
            continue;
        }
        let (lo_i, w_i) = arc(i);
        for j in 0..n {
            if j == i || line.distance(poly.vertex(j)) > tol {
                continue;
            }
            let (lo_j, w_j) = arc(j);
            let start = (lo_j + PI - lo_i).rem_euclid(2.0 * PI);
            if start < w_i || start + w_j > 2.0 * PI {
                return true;
            }
        }
    }
    false
}

pub fn verify_good_pair(body: &NormalizedBody, pair: &GoodPair) -> PairCheck {
    verify_in(&body.polygon, pair)
}

fn verify_in(poly: &ConvexPolygon, pair: &GoodPair) -> PairCheck {
    let angle_ok = pair.angle >= MIN_ANGLE - CHECK_TOL;
    let clearance_ok = poly.ball_in_body(pair.x, MIN_CLEARANCE - CHECK_TOL);
    let realizable = pair.lines.map(|l| chord_realizable(poly, &l, REALIZE_TOL));
    let mut diagnostics = Vec::new();
    if !angle_ok {
        diagnostics.push("angle");
    }
    if !clearance_ok {
        diagnostics.push("clearance");
    }
    if !realizable.iter().all(|r| *r) {
        diagnostics.push("realizability");
    }
    PairCheck {
        ok: diagnostics.is_empty(),
        angle_ok,
        clearance_ok,
        realizable,
        diagnostics,
    }
}

fn map_polygon(poly: &ConvexPolygon, f: &AffineFrame) -> ConvexPolygon {
    let mut vs: Vec<Point> = poly.vertices().iter().map(|v| f.apply(*v)).collect();
    if f.det() < 0.0 {
        vs.reverse();
    }
    ConvexPolygon::from_trusted(vs)
}

/// The six symmetries of the canonical triangle.
fn labelings() -> Vec<AffineFrame> {
    let mut out = Vec::new();
    for mirror in [false, true] {
        for k in 0..3 {
            let a = -2.0 * PI / 3.0 * k as f64;
            let (s, c) = a.sin_cos();
            let mx = if mirror { -1.0 } else { 1.0 };
            out.push(AffineFrame::new([[c * mx, -s], [s * mx, c]], Point::origin()));
        }
    }
    out
}

fn chord(cfg: &ChordConfig, i: usize) -> Chord {
    Chord { p: cfg.p[i], q: cfg.q[i] }
}

fn normal_of(i: usize) -> f64 {
    [1.5 * PI, PI / 6.0, 5.0 * PI / 6.0][i]
}

fn p_sweep(poly: &ConvexPolygon, cfg: &ChordConfig, i: usize, delta: f64) -> Option<Chord> {
    first_through_origin(&sweep(poly, cfg.p[i], cfg.q[i], normal_of(i), delta))
}

/// Width of `poly` beyond the triangle side opposite `p_i`.
fn far_offset(poly: &ConvexPolygon, i: usize) -> f64 {
    let p = canonical_triangle::<f64>();
    poly.support(-p[i]).0
}

/// Candidate pairs for a labeling in which chord 1 is left.
fn branch(poly: &ConvexPolygon, cfg: &ChordConfig) -> Vec<(Chord, Chord, PairCase)> {
    use ChordType::*;
    let p = cfg.p;
    let mut out = Vec::new();
    let case1 = far_offset(poly, 1) > (-p[1]).dot(cfg.s_plus[2]);
    if case1 {
        out.push((chord(cfg, 0), chord(cfg, 1), PairCase::Case1));
        return out;
    }
    let p4 = || p_sweep(poly, cfg, 0, PI / 2.0);
    let p5 = || p_sweep(poly, cfg, 2, -PI / 2.0);
    match (cfg.types[1], cfg.types[2]) {
        (Central, Left) => {
            if let Some(c4) = p4() {
                out.push((chord(cfg, 1), c4, PairCase::Case2a));
            }
        }
        (Central, _) => {
            if let (Some(c4), Some(c5)) = (p4(), p5()) {
                out.push((c4, c5, PairCase::Case2b));
            }
        }
        (Right, _) => {
            if let Some(c6) = p_sweep(poly, cfg, 1, PI / 3.0) {
                if let Some(c5) = p5() {
                    out.push((c5, c6, PairCase::Case2c));
                }
                if let Some(c4) = p4() {
                    out.push((c4, c6, PairCase::Case2c));
                }
            }
        }
        (Left, Left) => {
            let case1_next = far_offset(poly, 2) > (-p[2]).dot(cfg.s_plus[0]);
            if !case1_next {
                let c7 = p_sweep(poly, cfg, 0, -PI / 3.0);
                let c8 = p_sweep(poly, cfg, 1, -PI / 3.0);
                if let (Some(c7), Some(c8)) = (c7, c8) {
                    out.push((c7, c8, PairCase::Case2d));
                }
            }
        }
        (Left, _) => {}
    }
    out
}

/// Finds and certifies a good pair in the canonical frame of `body`.
pub fn good_pair(body: &NormalizedBody) -> Result<GoodPair> {
    let poly = &body.polygon;
    let cfg = classify_in(poly);
    let central: Vec<usize> = (0..3).filter(|i| cfg.types[*i] == ChordType::Central).collect();
    if central.len() >= 2 {
        if let Some(pair) =
            GoodPair::from_chords(poly, chord(&cfg, central[0]), chord(&cfg, central[1]), PairCase::CenterCenter)
        {
            if verify_in(poly, &pair).ok {
                return Ok(pair);
            }
        }
    } else {
        for g in labelings() {
            let local = map_polygon(poly, &g);
            let lc = classify_in(&local);
            if lc.types[0] != ChordType::Left {
                continue;
            }
            let back = g.inverse()?;
            for (a, b, case) in branch(&local, &lc) {
                let Some(pair) = GoodPair::from_chords(&local, a, b, case) else { continue };
                let Some(pair) = pair.mapped(&back, poly) else { continue };
                if verify_in(poly, &pair).ok {
                    return Ok(pair);
                }
            }
        }
    }
    search_pair(poly)
}

/// Every realizable chord, parametrized by position along a half-turn sweep.
fn chord_cycle(poly: &ConvexPolygon) -> Vec<Chord> {
    let d = Point::new(1.0, 0.0);
    let p0 = poly.support_point(poly.support(d).1);
    let q0 = poly.support_point(poly.support(-d).1);
    sweep(poly, p0, q0, 0.0, PI)
}

fn cycle_at(cycle: &[Chord], u: f64) -> Chord {
    let k = cycle.len() - 1;
    let u = u.clamp(0.0, k as f64);
    let i = (u.floor() as usize).min(k.saturating_sub(1));
    let t = u - i as f64;
    if k == 0 {
        return cycle[0];
    }
    Chord {
        p: cycle[i].p.lerp(cycle[i + 1].p, t),
        q: cycle[i].q.lerp(cycle[i + 1].q, t),
    }
}

fn search_pair(poly: &ConvexPolygon) -> Result<GoodPair> {
    const GRID: usize = 720;
    let cycle = chord_cycle(poly);
    let span = (cycle.len() - 1) as f64;
    let step = span / GRID as f64;
    let samples: Vec<Chord> = (0..=GRID).map(|k| cycle_at(&cycle, k as f64 * step)).collect();
    let eval = |a: f64, b: f64| -> Option<GoodPair> {
        GoodPair::from_chords(poly, cycle_at(&cycle, a), cycle_at(&cycle, b), PairCase::SearchFallback)
    };
    let mut best: Option<(f64, f64, GoodPair)> = None;
    for i in 0..=GRID {
        for j in i + 1..=GRID {
            let (a, b) = (samples[i], samples[j]);
            let (Some(la), Some(lb)) = (Line::through(a.p, a.q), Line::through(b.p, b.q)) else { continue };
            let ang = line_angle(la.dir, lb.dir) - MIN_ANGLE;
            if best.as_ref().is_some_and(|(_, _, g)| ang <= g.margin()) {
                continue;
            }
            if let Some(pair) = GoodPair::from_chords(poly, a, b, PairCase::SearchFallback) {
                if best.as_ref().map_or(true, |(_, _, g)| pair.margin() > g.margin()) {
                    best = Some((i as f64 * step, j as f64 * step, pair));
                }
            }
        }
    }
    let Some((mut a, mut b, mut pair)) = best else {
        return Err(Error::NoGoodPair("no intersecting chord pair".into()));
    };
    let inv = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..4 {
        for coord in 0..2 {
            let centre = if coord == 0 { a } else { b };
            let (mut lo, mut hi) = ((centre - step).max(0.0), (centre + step).min(span));
            let f = |u: f64| {
                let g = if coord == 0 { eval(u, b) } else { eval(a, u) };
                g.map_or(f64::NEG_INFINITY, |g| g.margin())
            };
            for _ in 0..40 {
                let m1 = hi - inv * (hi - lo);
                let m2 = lo + inv * (hi - lo);
                if f(m1) < f(m2) {
                    lo = m1;
                } else {
                    hi = m2;
                }
            }
            let u = (lo + hi) / 2.0;
            if let Some(g) = if coord == 0 { eval(u, b) } else { eval(a, u) } {
                if g.margin() > pair.margin() {
                    pair = g;
                    if coord == 0 {
                        a = u;
                    } else {
                        b = u;
                    }
                }
            }
        }
    }
    if verify_in(poly, &pair).ok {
        Ok(pair)
    } else {
        Err(Error::NoGoodPair(format!(
            "best margin {:.3e} (angle {:.4}, clearance {:.4})",
            pair.margin(),
            pair.angle,
            pair.clearance
        )))
    }
}

/// Boundary split by one line of a pair, with a monotonicity report per arc.
#[derive(Clone, Debug, PartialEq)]
pub struct MonotoneSplit {
    pub ends: [Point; 2],
    pub arcs: [Vec<Point>; 2],
    pub monotone: [bool; 2],
    /// Largest reversal of the projection along each arc, relative to the
    /// projected length of the arc.
    pub backtrack: [f64; 2],
}

pub fn monotone_split(body: &NormalizedBody, pair: &GoodPair, which: usize) -> Result<MonotoneSplit> {
    let line = pair.lines.get(which).copied().ok_or_else(|| Error::InvalidInput("line index must be 0 or 1".into()))?;
    let poly = &body.polygon;
    let n = poly.len();
    let side = |v: Point| line.dir.cross(v - line.point);
    let mut cuts: Vec<(usize, Point)> = Vec::new();
    for i in 0..n {
        let (a, b) = poly.edge(i);
        let (sa, sb) = (side(a), side(b));
        if sa == 0.0 {
            cuts.push((i, a));
        } else if (sa > 0.0) != (sb > 0.0) && sb != 0.0 {
            cuts.push((i, a.lerp(b, sa / (sa - sb))));
        }
    }
    if cuts.len() != 2 {
        return Err(Error::Degenerate("line does not cross the boundary twice".into()));
    }
    let arc = |from: (usize, Point), to: (usize, Point)| {
        let mut pts = vec![from.1];
        let mut i = from.0;
        loop {
            i = (i + 1) % n;
            let v = poly.vertex(i);
            if i == (to.0 + 1) % n || (i == to.0 && v == to.1) {
                break;
            }
            if v != from.1 {
                pts.push(v);
            }
            if i == to.0 {
                break;
            }
        }
        pts.push(to.1);
        pts
    };
    let arcs = [arc(cuts[0], cuts[1]), arc(cuts[1], cuts[0])];
    let reversal = |pts: &Vec<Point>| {
        let proj: Vec<f64> = pts.iter().map(|p| line.dir.dot(*p)).collect();
        let sign = (proj[proj.len() - 1] - proj[0]).signum();
        let (mut peak, mut worst) = (proj[0] * sign, 0.0f64);
        for v in &proj {
            peak = peak.max(v * sign);
            worst = worst.max(peak - v * sign);
        }
        let far = proj.iter().map(|v| v * sign).fold(f64::NEG_INFINITY, f64::max);
        worst.max(far - proj[proj.len() - 1] * sign) / (proj[proj.len() - 1] - proj[0]).abs().max(1e-300)
    };
    let backtrack = [reversal(&arcs[0]), reversal(&arcs[1])];
    Ok(MonotoneSplit {
        ends: [cuts[0].1, cuts[1].1],
        arcs,
        monotone: backtrack.map(|b| b <= 1e-12),
        backtrack,
    })
}
