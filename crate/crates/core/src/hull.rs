//! Reduction of line-separated disks and homothets to the lattice problem.
//!
//! In the local frame of the separating line (points above the x-axis,
//! object references on or below it) every point `q` gets the largest scale
//! `t(q)` at which some empty object of that scale has `q` on its boundary.
//! Points are then placed on the lattice at `(rank by x, rank by decreasing
//! t)`, and an object maps to the lattice images of the points it contains
//! whose scale is at least the object's.

use crate::error::{invalid, Result};
use crate::geom::orient;
use crate::lattice::{LatticePoint, LowestPointObject};
use crate::{AffineFrame, ConvexPolygon, Point};
use std::cmp::Ordering;
use std::collections::HashMap;

/// Relative slack for feasibility comparisons.
pub const FEAS_EPS: f64 = 1e-9;

/// A directed line with the points on its left (`L-`) and object references
/// on its right (`L+`). Local coordinates put the line on the x-axis with
/// `L-` above.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeparatedFrame {
    pub anchor: Point,
    pub direction: Point,
    to_local: AffineFrame,
    to_world: AffineFrame,
}

impl SeparatedFrame {
    pub fn new(anchor: Point, direction: Point) -> Result<Self> {
        let len = direction.norm();
        if !(len > 0.0) || !len.is_finite() || !anchor.is_finite() {
            return invalid("separating line needs a finite anchor and non-zero direction");
        }
        let d = direction / len;
        let to_local = AffineFrame::aligning(anchor, d);
        let to_world = to_local.inverse()?;
        Ok(SeparatedFrame { anchor, direction: d, to_local, to_world })
    }

    pub fn to_local(&self, p: Point) -> Point {
        self.to_local.apply(p)
    }

    pub fn to_world(&self, p: Point) -> Point {
        self.to_world.apply(p)
    }

    pub fn vec_to_local(&self, v: Point) -> Point {
        self.to_local.apply_vec(v)
    }

    pub fn local_frame(&self) -> &AffineFrame {
        &self.to_local
    }
}

/// A positive scale or `+inf`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtendedScale {
    Finite(f64),
    Infinite,
}

impl ExtendedScale {
    pub fn value(self) -> f64 {
        match self {
            ExtendedScale::Finite(v) => v,
            ExtendedScale::Infinite => f64::INFINITY,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, ExtendedScale::Infinite)
    }

    pub fn total_cmp(&self, o: &Self) -> Ordering {
        self.value().total_cmp(&o.value())
    }

    /// Whether an object of scale `s` may use a point of this scale.
    pub fn admits(self, s: f64) -> bool {
        match self {
            ExtendedScale::Infinite => true,
            ExtendedScale::Finite(v) => v >= s * (1.0 - FEAS_EPS),
        }
    }
}

/// Whether a disk of radius `t`, centred on or below the x-axis, can have `q`
/// on its boundary and no point of `pts` in its interior.
///
/// Local coordinates; `q` must lie strictly above the axis.
pub fn disk_feasible(q: Point, t: f64, pts: &[Point]) -> Result<bool> {
    if !(q.y > 0.0) {
        return invalid("query point must lie strictly above the line");
    }
    if !(t > 0.0) {
        return invalid("radius must be positive");
    }
    let h = q.y / t;
    if h > 1.0 + FEAS_EPS {
        return Ok(false);
    }
    // Centre q + t (cos th, sin th); below the axis iff sin th <= -h.
    let asin_h = h.min(1.0).asin();
    let lo = std::f64::consts::PI + asin_h;
    let hi = 2.0 * std::f64::consts::PI - asin_h;
    let slack = FEAS_EPS;
    let mut blocked: Vec<(f64, f64)> = Vec::new();
    for &p in pts {
        let w = p - q;
        let d = w.norm();
        if d == 0.0 || d >= 2.0 * t {
            continue;
        }
        let beta = (d / (2.0 * t)).acos() - slack;
        if beta <= 0.0 {
            continue;
        }
        let phi = w.angle();
        for k in -1..=2 {
            let c = phi + k as f64 * 2.0 * std::f64::consts::PI;
            let (a, b) = (c - beta, c + beta);
            if b > lo && a < hi {
                blocked.push((a, b));
            }
        }
    }
    // Arcs are open, so the first uncovered angle is where coverage stops.
    blocked.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut reach = lo;
    for (a, b) in blocked {
        if a >= reach {
            return Ok(true);
        }
        reach = reach.max(b);
        if reach > hi {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Cons {
    Site(usize),
    Axis,
    Box,
}

#[derive(Clone, Copy, Debug)]
struct CellVertex {
    p: Point,
    // Constraint of the edge leaving this vertex.
    out: Cons,
}

/// Half-plane `a . x <= b` in coordinates centred at the query point.
#[derive(Clone, Copy, Debug)]
struct HalfPlane {
    a: Point,
    b: f64,
    id: Cons,
}

fn clip(poly: &[CellVertex], h: &HalfPlane) -> Vec<CellVertex> {
    let n = poly.len();
    if n == 0 {
        return Vec::new();
    }
    let scale = h.a.norm() * poly.iter().map(|v| v.p.norm()).fold(0.0, f64::max) + h.b.abs();
    let tol = 1e-12 * scale;
    let f: Vec<f64> = poly.iter().map(|v| h.a.dot(v.p) - h.b).collect();
    let mut out = Vec::with_capacity(n + 1);
    for k in 0..n {
        let cur = poly[k];
        let nxt = poly[(k + 1) % n];
        let (fc, fn_) = (f[k], f[(k + 1) % n]);
        let cin = fc <= tol;
        let nin = fn_ <= tol;
        if cin {
            out.push(cur);
        }
        if cin != nin {
            let s = fc / (fc - fn_);
            let p = cur.p.lerp(nxt.p, s.clamp(0.0, 1.0));
            if cin {
                out.push(CellVertex { p, out: h.id });
            } else {
                out.push(CellVertex { p, out: cur.out });
            }
        }
    }
    out
}

/// Sorted-triple circumradius, so equal triples give bit-equal radii.
fn circumradius(a: Point, b: Point, c: Point) -> f64 {
    let mut t = [a, b, c];
    t.sort_by(|u, v| u.lex_cmp(v));
    let [a, b, c] = t;
    let cr = (b - a).cross(c - a).abs();
    if cr == 0.0 {
        return f64::INFINITY;
    }
    a.dist(b) * b.dist(c) * c.dist(a) / (2.0 * cr)
}

/// Radius of the circle through `a` and `b` centred on the x-axis.
fn axis_radius(a: Point, b: Point) -> f64 {
    let (a, b) = if a.lex_cmp(&b) == Ordering::Greater { (b, a) } else { (a, b) };
    let dx = b.x - a.x;
    if dx == 0.0 {
        return f64::INFINITY;
    }
    let x0 = ((b.x - a.x) * (b.x + a.x) + (b.y - a.y) * (b.y + a.y)) / (2.0 * dx);
    (x0 - a.x).hypot(a.y)
}

/// Direction used in the exact recession test: either a site offset
/// `p - q` or the upward unit vector.
#[derive(Clone, Copy)]
enum Dir {
    Up,
    Site(Point),
}

/// Exact signs of `(dx, dy)` for a direction.
fn dir_signs(q: Point, d: Dir) -> (i32, i32) {
    match d {
        Dir::Up => (0, 1),
        Dir::Site(p) => (cmp_sign(p.x, q.x), cmp_sign(p.y, q.y)),
    }
}

fn cmp_sign(a: f64, b: f64) -> i32 {
    match a.partial_cmp(&b) {
        Some(Ordering::Greater) => 1,
        Some(Ordering::Less) => -1,
        _ => 0,
    }
}

fn half(q: Point, d: Dir) -> u8 {
    let (sx, sy) = dir_signs(q, d);
    if sy > 0 || (sy == 0 && sx > 0) {
        0
    } else {
        1
    }
}

/// Exact sign of `cross(u, v)`.
fn cross_sign(q: Point, u: Dir, v: Dir) -> i32 {
    match (u, v) {
        (Dir::Up, Dir::Up) => 0,
        (Dir::Up, Dir::Site(p)) => -cmp_sign(p.x, q.x),
        (Dir::Site(p), Dir::Up) => cmp_sign(p.x, q.x),
        (Dir::Site(a), Dir::Site(b)) => orient(q, a, b).sign(),
    }
}

/// Whether some non-zero `d` with `d_y <= 0` has `d . (p - q) <= 0` for all
/// sites, i.e. the part of the Voronoi cell of `q` below the axis is unbounded.
fn cell_unbounded(q: Point, sites: &[Point]) -> bool {
    let mut dirs: Vec<Dir> = Vec::with_capacity(sites.len() + 1);
    dirs.push(Dir::Up);
    dirs.extend(sites.iter().map(|&p| Dir::Site(p)));
    dirs.sort_by(|&u, &v| {
        let (hu, hv) = (half(q, u), half(q, v));
        if hu != hv {
            return hu.cmp(&hv);
        }
        match cross_sign(q, u, v) {
            1 => Ordering::Less,
            -1 => Ordering::Greater,
            _ => Ordering::Equal,
        }
    });
    let n = dirs.len();
    let mut all_same = true;
    for k in 0..n {
        let u = dirs[k];
        let v = dirs[(k + 1) % n];
        let c = cross_sign(q, u, v);
        let same = c == 0 && half(q, u) == half(q, v);
        all_same &= same;
        if c < 0 || (c == 0 && !same) {
            return true;
        }
    }
    all_same
}

/// `t(q)` for disks: `None` when no empty disk centred on or below the axis
/// has `q` on its boundary; otherwise the largest such radius.
///
/// The admissible centres form the Voronoi cell of `q` clipped to the lower
/// half-plane, so the answer is the distance to its farthest vertex.
pub fn t_max(q: Point, pts: &[Point]) -> Result<Option<ExtendedScale>> {
    if !(q.y > 0.0) {
        return invalid("query point must lie strictly above the line");
    }
    if !pts.contains(&q) {
        return invalid("query point must belong to the point set");
    }
    if let Some(p) = pts.iter().find(|p| !(p.y > 0.0)) {
        return invalid(format!("point ({}, {}) is not strictly above the line", p.x, p.y));
    }
    let mut sites: Vec<Point> = pts.iter().copied().filter(|p| *p != q).collect();
    let unbounded = cell_unbounded(q, &sites);
    sites.sort_by(|a, b| (*a - q).norm2().total_cmp(&(*b - q).norm2()));
    let reach = sites.iter().map(|p| (*p - q).norm()).fold(q.y, f64::max);
    let mut size = 4.0 * reach;
    let mut cell = clipped_cell(q, &sites, size);
    if cell.is_empty() {
        // Every vertex of a non-empty region, and its point nearest to q, lies
        // within the largest candidate circle; one clip at that size decides.
        let mut far = 0.0f64;
        for (i, a) in sites.iter().enumerate() {
            far = far.max(axis_radius(q, *a).min(f64::MAX));
            for b in &sites[i + 1..] {
                let r = circumradius(q, *a, *b);
                if r.is_finite() {
                    far = far.max(r);
                }
            }
        }
        let wide = 2.0 * (far + reach);
        if wide <= size {
            return Ok(None);
        }
        size = wide;
        cell = clipped_cell(q, &sites, size);
        if cell.is_empty() {
            return Ok(None);
        }
    }
    if unbounded {
        return Ok(Some(ExtendedScale::Infinite));
    }
    for _ in 0..48 {
        if !cell.iter().any(|v| v.out == Cons::Box) {
            return Ok(Some(cell_radius(q, &sites, &cell)));
        }
        size *= 16.0;
        cell = clipped_cell(q, &sites, size);
        if cell.is_empty() {
            return Ok(None);
        }
    }
    Ok(Some(ExtendedScale::Infinite))
}

fn clipped_cell(q: Point, sites: &[Point], size: f64) -> Vec<CellVertex> {
    let top = -q.y;
    let mut poly = vec![
        CellVertex { p: Point::new(-size, -size), out: Cons::Box },
        CellVertex { p: Point::new(size, -size), out: Cons::Box },
        CellVertex { p: Point::new(size, top), out: Cons::Axis },
        CellVertex { p: Point::new(-size, top), out: Cons::Box },
    ];
    if top <= -size {
        return Vec::new();
    }
    for (i, &p) in sites.iter().enumerate() {
        let w = p - q;
        let r = poly.iter().map(|v| v.p.norm()).fold(0.0, f64::max);
        if w.norm() > 2.0 * r * (1.0 + 1e-9) {
            break;
        }
        poly = clip(&poly, &HalfPlane { a: w, b: w.norm2() / 2.0, id: Cons::Site(i) });
        if poly.is_empty() {
            break;
        }
    }
    poly
}

fn cell_radius(q: Point, sites: &[Point], cell: &[CellVertex]) -> ExtendedScale {
    let n = cell.len();
    let mut best = 0.0f64;
    for k in 0..n {
        let a = cell[(k + n - 1) % n].out;
        let b = cell[k].out;
        let r = match (a, b) {
            (Cons::Site(i), Cons::Site(j)) if i != j => circumradius(q, sites[i], sites[j]),
            (Cons::Site(i), Cons::Axis) | (Cons::Axis, Cons::Site(i)) => axis_radius(q, sites[i]),
            _ => cell[k].p.norm(),
        };
        let direct = cell[k].p.norm();
        // Mislabelled slivers fall back to the clipped vertex itself.
        let agree = r.is_finite() && (r - direct).abs() <= 1e-6 * r.max(direct);
        best = best.max(if agree { r } else { direct });
    }
    ExtendedScale::Finite(best)
}

/// A convex polygon with its reference point at the origin, used as the
/// shape of homothets `t C + b`.
#[derive(Clone, Debug)]
pub struct HomothetBody {
    pub polygon: ConvexPolygon,
    pub samples: usize,
}

impl HomothetBody {
    /// `reference` must lie in the interior; the stored polygon is translated
    /// so that it sits at the origin.
    pub fn new(polygon: &ConvexPolygon, reference: Point, samples: usize) -> Result<Self> {
        if !(polygon.clearance(reference) > 0.0) {
            return invalid("reference point must lie in the interior of the body");
        }
        Ok(HomothetBody { polygon: polygon.translate(-reference), samples })
    }

    /// Containment in `scale * C + b`, closed.
    pub fn contains(&self, scale: f64, b: Point, p: Point) -> bool {
        self.polygon.contains((p - b) / scale)
    }
}

#[derive(Clone, Debug)]
struct Contact {
    c: Point,
    // Distance from c to each edge line, inside positive.
    h: Vec<f64>,
    through: [Option<usize>; 2],
    reach: f64,
}

#[derive(Clone, Copy, Debug)]
struct Probe {
    pos: f64,
    gauge: f64,
    need: f64,
}

impl Probe {
    fn valid(&self) -> bool {
        self.gauge >= self.need * (1.0 - FEAS_EPS)
    }

    fn ratio(&self) -> f64 {
        self.gauge / self.need
    }
}

/// The body rotated into the local frame of a separating line.
///
/// A homothet `t C + b` touching `q` at the boundary point `c` of `C` has
/// `b = q - t c`; it lies on `L+` iff `t >= q_y / c_y` and is empty iff `t`
/// is at most the smallest interior gauge of the offsets `p - q` with
/// respect to `C - c`. The largest admissible `t` over contacts is found by
/// a uniform pass over the boundary followed by local refinement.
#[derive(Clone, Debug)]
pub struct ContactModel {
    verts: Vec<Point>,
    normals: Vec<Point>,
    offsets: Vec<f64>,
    cum: Vec<f64>,
    perimeter: f64,
    samples: usize,
    /// Largest local height of the body above its reference point.
    pub height: f64,
}

const REFINE_ROUNDS: usize = 24;
const REFINE_SEEDS: usize = 3;

impl ContactModel {
    pub fn new(body: &HomothetBody, frame: &SeparatedFrame) -> Self {
        let verts: Vec<Point> = body.polygon.vertices().iter().map(|v| frame.vec_to_local(*v)).collect();
        let k = verts.len();
        let normals: Vec<Point> = (0..k)
            .map(|i| {
                let e = verts[(i + 1) % k] - verts[i];
                Point::new(e.y, -e.x).unit()
            })
            .collect();
        let offsets: Vec<f64> = (0..k).map(|i| normals[i].dot(verts[i])).collect();
        let mut cum = Vec::with_capacity(k + 1);
        let mut acc = 0.0;
        cum.push(0.0);
        for i in 0..k {
            acc += verts[i].dist(verts[(i + 1) % k]);
            cum.push(acc);
        }
        let height = verts.iter().map(|v| v.y).fold(0.0, f64::max);
        ContactModel { verts, normals, offsets, cum, perimeter: acc, samples: body.samples.max(1), height }
    }

    /// Contact at arc-length position `pos`; exact vertex positions give
    /// vertex contacts.
    fn contact(&self, pos: f64) -> Contact {
        let k = self.verts.len();
        let pos = pos.rem_euclid(self.perimeter);
        let e = match self.cum.binary_search_by(|v| v.total_cmp(&pos)) {
            Ok(i) => {
                let i = i % k;
                return self.make_contact(self.verts[i], [Some((i + k - 1) % k), Some(i)]);
            }
            Err(i) => (i - 1).min(k - 1),
        };
        let len = self.cum[e + 1] - self.cum[e];
        let u = (pos - self.cum[e]) / len;
        self.make_contact(self.verts[e].lerp(self.verts[(e + 1) % k], u), [Some(e), None])
    }

    fn make_contact(&self, c: Point, through: [Option<usize>; 2]) -> Contact {
        let h = (0..self.verts.len())
            .map(|e| {
                if through.contains(&Some(e)) {
                    0.0
                } else {
                    (self.offsets[e] - self.normals[e].dot(c)).max(0.0)
                }
            })
            .collect();
        let reach = self.verts.iter().map(|v| v.dist(c)).fold(0.0, f64::max);
        Contact { c, h, through, reach }
    }

    /// Smallest `lambda` with `w` in `lambda * int(C - c)`, or infinity.
    fn gauge(&self, ct: &Contact, w: Point) -> f64 {
        let wn = w.norm();
        for e in ct.through.iter().flatten() {
            if self.normals[*e].dot(w) >= -FEAS_EPS * wn {
                return f64::INFINITY;
            }
        }
        let mut lam = 0.0f64;
        for (e, n) in self.normals.iter().enumerate() {
            let he = ct.h[e];
            if he > 0.0 {
                lam = lam.max(n.dot(w) / he);
            }
        }
        lam
    }

    fn probe(&self, q: Point, order: &[(f64, Point)], pos: f64) -> Probe {
        let ct = self.contact(pos);
        if !(ct.c.y > 0.0) {
            return Probe { pos, gauge: 0.0, need: f64::INFINITY };
        }
        let need = q.y / ct.c.y;
        let mut g = f64::INFINITY;
        for &(d, w) in order {
            if d / ct.reach >= g {
                break;
            }
            g = g.min(self.gauge(&ct, w));
        }
        Probe { pos, gauge: g, need }
    }

    /// `t(q)` for homothets in local coordinates; `sites` excludes `q`.
    pub fn scale_max(&self, q: Point, sites: &[Point]) -> Option<ExtendedScale> {
        let mut order: Vec<(f64, Point)> = sites.iter().map(|p| ((*p - q).norm(), *p - q)).collect();
        order.sort_by(|a, b| a.0.total_cmp(&b.0));
        let step = self.perimeter / self.samples as f64;
        let mut probes: Vec<Probe> = self.cum[..self.verts.len()]
            .iter()
            .map(|&v| self.probe(q, &order, v))
            .chain((0..self.samples).map(|s| self.probe(q, &order, (s as f64 + 0.5) * step)))
            .collect();
        if probes.iter().any(|p| p.valid() && p.gauge.is_infinite()) {
            return Some(ExtendedScale::Infinite);
        }
        let mut by_gauge: Vec<Probe> = probes.iter().copied().filter(|p| p.valid()).collect();
        by_gauge.sort_by(|a, b| b.gauge.total_cmp(&a.gauge));
        let mut seeds: Vec<Probe> = by_gauge.into_iter().take(REFINE_SEEDS).collect();
        let mut by_ratio: Vec<Probe> = probes.iter().copied().filter(|p| p.need.is_finite()).collect();
        by_ratio.sort_by(|a, b| b.ratio().total_cmp(&a.ratio()));
        seeds.extend(by_ratio.into_iter().take(REFINE_SEEDS));
        for seed in seeds {
            let mut cur = seed;
            let mut delta = step / 2.0;
            for _ in 0..REFINE_ROUNDS {
                for pos in [cur.pos - delta, cur.pos + delta] {
                    let cand = self.probe(q, &order, pos);
                    probes.push(cand);
                    if better(&cand, &cur) {
                        cur = cand;
                    }
                }
                delta /= 2.0;
            }
        }
        let best = probes.iter().filter(|p| p.valid()).map(|p| p.gauge).fold(None, |acc: Option<f64>, g| {
            Some(acc.map_or(g, |a| a.max(g)))
        })?;
        Some(if best.is_infinite() { ExtendedScale::Infinite } else { ExtendedScale::Finite(best) })
    }
}

fn better(a: &Probe, b: &Probe) -> bool {
    match (a.valid(), b.valid()) {
        (true, false) => true,
        (false, true) => false,
        (true, true) => a.gauge > b.gauge,
        (false, false) => a.ratio() > b.ratio(),
    }
}

/// `t(q)` for homothets of `body`; `q` and `pts` in world coordinates.
pub fn homothet_scale_max(
    q: Point,
    pts: &[Point],
    body: &HomothetBody,
    frame: &SeparatedFrame,
) -> Result<Option<ExtendedScale>> {
    let model = ContactModel::new(body, frame);
    let ql = frame.to_local(q);
    if !(ql.y > 0.0) {
        return invalid("query point must lie strictly on the point side of the line");
    }
    let sites: Vec<Point> = pts.iter().filter(|p| **p != q).map(|p| frame.to_local(*p)).collect();
    Ok(model.scale_max(ql, &sites))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReducedPoint {
    pub source: usize,
    pub world: Point,
    pub local: Point,
    pub scale: Option<ExtendedScale>,
    pub lattice: LatticePoint,
}

/// Lattice image of a separated point set.
#[derive(Clone, Debug)]
pub struct HullReduction {
    pub frame: SeparatedFrame,
    /// Retained points sorted by local x.
    pub points: Vec<ReducedPoint>,
    /// Sources dropped because a point with the same local x lies lower,
    /// paired with that point's source.
    pub merged: Vec<(usize, usize)>,
    /// Distinct scales, decreasing, infinity first.
    pub scales: Vec<ExtendedScale>,
    /// Lattice side; a power of two exceeding the number of points.
    pub extent: u64,
    by_source: HashMap<usize, usize>,
    by_lattice: HashMap<LatticePoint, usize>,
}

impl HullReduction {
    pub fn pi(&self, source: usize) -> Option<LatticePoint> {
        self.by_source.get(&source).map(|&k| self.points[k].lattice)
    }

    pub fn pi_inverse(&self, p: LatticePoint) -> Option<usize> {
        self.by_lattice.get(&p).map(|&k| self.points[k].source)
    }

    pub fn point(&self, source: usize) -> Option<&ReducedPoint> {
        self.by_source.get(&source).map(|&k| &self.points[k])
    }

    pub fn lattice_points(&self) -> impl Iterator<Item = LatticePoint> + '_ {
        self.points.iter().map(|p| p.lattice)
    }

    /// Image of an object of the given scale, restricted to the points it
    /// contains whose own scale admits it. `None` when that set is empty.
    pub fn map_trace(&self, scale: f64, contains: impl Fn(usize) -> bool) -> Option<LowestPointObject> {
        let members: Vec<LatticePoint> = self
            .points
            .iter()
            .filter(|p| p.scale.is_some_and(|s| s.admits(scale)) && contains(p.source))
            .map(|p| p.lattice)
            .collect();
        LowestPointObject::new(members).ok()
    }
}

fn build_reduction(
    pts: &[(usize, Point)],
    frame: SeparatedFrame,
    scale_of: impl Fn(usize, &[Point]) -> Option<ExtendedScale>,
) -> Result<HullReduction> {
    let mut locals: Vec<(usize, Point, Point)> = Vec::with_capacity(pts.len());
    for &(src, p) in pts {
        let l = frame.to_local(p);
        if !(l.y > 0.0) {
            return invalid(format!("point {src} does not lie strictly on the point side of the line"));
        }
        locals.push((src, p, l));
    }
    locals.sort_by(|a, b| a.2.x.total_cmp(&b.2.x).then(a.2.y.total_cmp(&b.2.y)).then(a.0.cmp(&b.0)));
    let mut kept: Vec<(usize, Point, Point)> = Vec::new();
    let mut merged = Vec::new();
    for item in locals {
        match kept.last() {
            Some(last) if last.2.x == item.2.x => merged.push((item.0, last.0)),
            _ => kept.push(item),
        }
    }
    let local_pts: Vec<Point> = kept.iter().map(|k| k.2).collect();
    let scales: Vec<Option<ExtendedScale>> = (0..kept.len()).map(|i| scale_of(i, &local_pts)).collect();
    let mut distinct: Vec<ExtendedScale> = scales.iter().flatten().copied().collect();
    distinct.sort_by(|a, b| b.total_cmp(a));
    distinct.dedup_by(|a, b| a.total_cmp(b) == Ordering::Equal);
    let top = distinct.len() as u64;
    let mut points = Vec::with_capacity(kept.len());
    let mut by_source = HashMap::new();
    let mut by_lattice = HashMap::new();
    for (i, ((src, w, l), s)) in kept.into_iter().zip(scales).enumerate() {
        let y = match s {
            Some(v) => distinct.binary_search_by(|d| v.total_cmp(d)).expect("ranked") as u64,
            None => top,
        };
        let lattice = LatticePoint::new(i as u64, y);
        by_source.insert(src, i);
        by_lattice.insert(lattice, i);
        points.push(ReducedPoint { source: src, world: w, local: l, scale: s, lattice });
    }
    let extent = (points.len() as u64 + 1).next_power_of_two();
    Ok(HullReduction { frame, points, merged, scales: distinct, extent, by_source, by_lattice })
}

/// Builds the disk reduction for `(source id, world point)` pairs.
pub fn build_disk_reduction(pts: &[(usize, Point)], frame: SeparatedFrame) -> Result<HullReduction> {
    build_reduction(pts, frame, |i, all| t_max(all[i], all).ok().flatten())
}

/// Builds the homothet reduction; `body` is expressed in world orientation.
pub fn build_homothet_reduction(
    pts: &[(usize, Point)],
    body: &HomothetBody,
    frame: SeparatedFrame,
) -> Result<HullReduction> {
    let model = ContactModel::new(body, &frame);
    build_reduction(pts, frame, |i, all| {
        let sites: Vec<Point> = all.iter().enumerate().filter(|(k, _)| *k != i).map(|(_, p)| *p).collect();
        model.scale_max(all[i], &sites)
    })
}

/// Closed disk membership used throughout.
pub fn disk_contains(center: Point, radius: f64, p: Point) -> bool {
    let d = p - center;
    d.x * d.x + d.y * d.y <= radius * radius
}

/// Maps a disk whose centre lies on `L+` to its lattice object.
pub fn map_disk(red: &HullReduction, center: Point, radius: f64) -> Result<Option<LowestPointObject>> {
    if !(radius > 0.0) {
        return invalid("radius must be positive");
    }
    if red.frame.to_local(center).y > 0.0 {
        return invalid("disk centre lies on the point side of the line");
    }
    Ok(red.map_trace(radius, |src| {
        red.point(src).is_some_and(|p| disk_contains(center, radius, p.world))
    }))
}

/// Maps a homothet `scale * C + b` whose reference `b` lies on `L+`.
pub fn map_homothet(
    red: &HullReduction,
    body: &HomothetBody,
    scale: f64,
    b: Point,
) -> Result<Option<LowestPointObject>> {
    if !(scale > 0.0) {
        return invalid("scale must be positive");
    }
    if red.frame.to_local(b).y > 0.0 {
        return invalid("reference point lies on the point side of the line");
    }
    Ok(red.map_trace(scale, |src| red.point(src).is_some_and(|p| body.contains(scale, b, p.world))))
}
