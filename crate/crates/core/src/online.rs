//! Online hitting sets for disks and homothets with scales in `[1, M]`.
//!
//! Objects are grouped into layers by scale. Each layer has a lattice tiling
//! fine enough that a tile containing the reference point lies inside the
//! object; otherwise the object is forwarded to separated hitters for the
//! tiling lines it crosses.

use crate::body_shape::{good_pair, GoodPair};
use crate::error::{invalid, Error, Result};
use crate::geom::normalize_body;
use crate::hull::{disk_contains, HomothetBody, SeparatedFrame};
use crate::separated::{SeparatedHitter, SeparatedShape};
use crate::{AffineFrame, ConvexPolygon, NormalizedBody, Point};
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

/// Boundary samples used by the homothet contact model.
pub const HOMOTHET_SAMPLES: usize = 512;

/// `floor(log2 r)` for `1 <= r <= m`.
pub fn layer_of(r: f64, m: f64) -> Result<u32> {
    if !(r >= 1.0 && r <= m) {
        return invalid(format!("scale {r} outside [1, {m}]"));
    }
    let mut j = r.log2().floor() as i64;
    // guard against log2 rounding at powers of two
    while j > 0 && 2f64.powi(j as i32) > r {
        j -= 1;
    }
    while 2f64.powi(j as i32 + 1) <= r {
        j += 1;
    }
    Ok(j as u32)
}

/// Number of layers for scales in `[1, m]`.
pub fn layer_count(m: f64) -> u32 {
    layer_of(m, m).map_or(1, |j| j + 1)
}

/// A lattice tiling `origin + Z v1 + Z v2` of parallelogram tiles.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TilingSpec {
    pub origin: Point,
    pub v1: Point,
    pub v2: Point,
}

impl TilingSpec {
    /// Square tiles of side `2^(j - 1/2)`, diameter `2^j`.
    pub fn disk(j: u32) -> Self {
        let s = 2f64.powf(j as f64 - 0.5);
        TilingSpec {
            origin: Point::origin(),
            v1: Point::new(s, 0.0),
            v2: Point::new(0.0, s),
        }
    }

    /// Rhombus tiles with sides along `d1`, `d2` and long diagonal `2^j rho`.
    pub fn rhombus(j: u32, d1: Point, d2: Point, rho: f64) -> Result<Self> {
        let (d1, mut d2) = (d1.unit(), d2.unit());
        if d1.dot(d2) < 0.0 {
            d2 = -d2;
        }
        let alpha = d1.cross(d2).abs().atan2(d1.dot(d2));
        if !(alpha > 0.0) || !(rho > 0.0) {
            return invalid("rhombus tiling needs independent directions and positive diameter");
        }
        let s = 2f64.powi(j as i32) * rho / (2.0 * (alpha / 2.0).cos());
        Ok(TilingSpec {
            origin: Point::origin(),
            v1: d1 * s,
            v2: d2 * s,
        })
    }

    fn det(&self) -> f64 {
        self.v1.cross(self.v2)
    }

    pub fn diameter(&self) -> f64 {
        (self.v1 + self.v2).norm().max((self.v1 - self.v2).norm())
    }

    /// Distance between adjacent lines of a family.
    pub fn pitch(&self, family: u8) -> f64 {
        let det = self.det().abs();
        if family == 1 {
            det / self.v2.norm()
        } else {
            det / self.v1.norm()
        }
    }

    /// Coordinates of `p` in the basis `(v1, v2)`.
    pub fn coords(&self, p: Point) -> (f64, f64) {
        let z = p - self.origin;
        let det = self.det();
        (z.cross(self.v2) / det, self.v1.cross(z) / det)
    }

    pub fn corner(&self, i: i64, k: i64) -> Point {
        self.origin + self.v1 * i as f64 + self.v2 * k as f64
    }

    /// The half-open tile containing `p`, with its corners counterclockwise.
    pub fn tile_of(&self, p: Point) -> ((i64, i64), [Point; 4]) {
        let (u, w) = self.coords(p);
        let (i, k) = (u.floor() as i64, w.floor() as i64);
        let mut c = [self.corner(i, k), self.corner(i + 1, k), self.corner(i + 1, k + 1), self.corner(i, k + 1)];
        if self.det() < 0.0 {
            c.reverse();
        }
        ((i, k), c)
    }

    /// Index ranges of every closed tile containing `p`.
    fn closed_range(&self, p: Point) -> ([i64; 2], [i64; 2]) {
        let (u, w) = self.coords(p);
        let r = |t: f64| {
            let f = t.floor();
            if f == t {
                [f as i64 - 1, f as i64]
            } else {
                [f as i64, f as i64]
            }
        };
        (r(u), r(w))
    }

    /// Gradient of the basis coordinate that is constant along family lines.
    fn gradient(&self, family: u8) -> Point {
        let det = self.det();
        if family == 1 {
            Point::new(self.v2.y, -self.v2.x) / det
        } else {
            Point::new(-self.v1.y, self.v1.x) / det
        }
    }

    /// Frame of a directed grid line: points of `L-` have positive local y.
    pub fn line_frame(&self, line: &DirectedGridLine) -> SeparatedFrame {
        let (anchor, along, across) = if line.family == 1 {
            (self.corner(line.offset, 0), self.v2, self.v1)
        } else {
            (self.corner(0, line.offset), self.v1, self.v2)
        };
        // left of `d` must be the side of smaller coordinate
        let mut d = along.unit();
        if d.cross(across) > 0.0 {
            d = -d;
        }
        if line.orientation < 0 {
            d = -d;
        }
        SeparatedFrame::new(anchor, d).expect("tiling directions are nonzero")
    }
}

/// A tiling line `coordinate = offset`, directed so that `L+` is the closed
/// side of larger coordinate when `orientation = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DirectedGridLine {
    pub layer: u32,
    /// 1: lines parallel to `v2`; 2: lines parallel to `v1`.
    pub family: u8,
    pub offset: i64,
    pub orientation: i8,
}

/// Directs every line of `range` (per family, inclusive) so that
/// `reference` is on its closed `L+` side.
fn direct_lines(spec: &TilingSpec, layer: u32, ranges: [(f64, f64); 2], reference: Point) -> Vec<DirectedGridLine> {
    let mut out = Vec::new();
    for (f, (lo, hi)) in ranges.into_iter().enumerate() {
        let family = f as u8 + 1;
        let (k0, k1) = (lo.ceil() as i64, hi.floor() as i64);
        for offset in k0..=k1 {
            let plus = DirectedGridLine { layer, family, offset, orientation: 1 };
            let y = spec.line_frame(&plus).to_local(reference).y;
            if y <= 0.0 {
                out.push(plus);
            }
            if y >= 0.0 {
                out.push(DirectedGridLine { orientation: -1, ..plus });
            }
        }
    }
    out
}

/// Directed lines of both families meeting the closed disk.
pub fn lines_hit_disk(spec: &TilingSpec, layer: u32, center: Point, radius: f64) -> Vec<DirectedGridLine> {
    let (u, w) = spec.coords(center);
    let ru = radius * spec.gradient(1).norm();
    let rw = radius * spec.gradient(2).norm();
    direct_lines(spec, layer, [(u - ru, u + ru), (w - rw, w + rw)], center)
}

/// Directed lines of both families meeting the convex hull of `vertices`.
pub fn lines_hit_polygon(spec: &TilingSpec, layer: u32, vertices: &[Point], reference: Point) -> Vec<DirectedGridLine> {
    let mut r = [(f64::INFINITY, f64::NEG_INFINITY); 2];
    for v in vertices {
        let (u, w) = spec.coords(*v);
        r[0] = (r[0].0.min(u), r[0].1.max(u));
        r[1] = (r[1].0.min(w), r[1].1.max(w));
    }
    direct_lines(spec, layer, r, reference)
}

/// Homothet machinery for one body: canonical frame, good pair and tiling
/// parameters.
#[derive(Clone, Debug)]
pub struct HomothetSetup {
    /// The body as given.
    pub body: ConvexPolygon,
    pub normalized: NormalizedBody,
    pub pair: GoodPair,
    /// Reference point of the body in input coordinates.
    pub reference: Point,
    /// Clearance used for the tile diameter.
    pub rho: f64,
    canonical: Arc<HomothetBody>,
}

impl HomothetSetup {
    /// `rho` defaults to the certified clearance of the good pair.
    pub fn new(body: &ConvexPolygon, rho: Option<f64>) -> Result<Self> {
        let normalized = normalize_body(body)?;
        let pair = good_pair(&normalized)?;
        let max_rho = pair.clearance;
        let rho = rho.unwrap_or(max_rho * (1.0 - 1e-9));
        if !(rho > 0.0 && rho <= max_rho) {
            return invalid(format!("tile clearance {rho} must lie in (0, {max_rho}]"));
        }
        let reference = normalized.frame.inverse()?.apply(pair.x);
        let canonical = Arc::new(HomothetBody::new(&normalized.polygon, pair.x, HOMOTHET_SAMPLES)?);
        Ok(HomothetSetup {
            body: body.clone(),
            normalized,
            pair,
            reference,
            rho,
            canonical,
        })
    }

    pub fn frame(&self) -> &AffineFrame {
        &self.normalized.frame
    }

    pub fn tiling(&self, j: u32) -> TilingSpec {
        TilingSpec::rhombus(j, self.pair.lines[0].dir, self.pair.lines[1].dir, self.rho)
            .expect("good pair directions are independent")
    }

    /// Closed membership in `scale * C + t`.
    pub fn contains(&self, scale: f64, t: Point, p: Point) -> bool {
        self.body.contains((p - t) / scale)
    }

    /// Upper bound on lines of a layer met by one homothet of that layer,
    /// `2 ceil(diam(2^(j+1) (C - C)) / pitch)` in the canonical frame.
    pub fn line_bound(&self, j: u32) -> usize {
        let spec = self.tiling(j);
        let diam = 2.0 * 2f64.powi(j as i32 + 1) * self.normalized.polygon.diameter();
        2 * (diam / spec.pitch(1).min(spec.pitch(2))).ceil() as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OnlineObject {
    Disk { center: Point, radius: f64 },
    Homothet { scale: f64, t: Point },
}

impl OnlineObject {
    pub fn scale(&self) -> f64 {
        match self {
            OnlineObject::Disk { radius, .. } => *radius,
            OnlineObject::Homothet { scale, .. } => *scale,
        }
    }
}

#[derive(Clone, Debug)]
pub enum OnlineShape {
    Disk,
    Homothet(Box<HomothetSetup>),
}

/// Telemetry for one arrival.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StepRecord {
    pub was_hit: bool,
    pub points_added: usize,
    pub layer: Option<u32>,
    pub tile_hit: bool,
    pub lines_invoked: usize,
    pub fallback: bool,
    /// Points added per invoked line.
    pub per_line: Vec<(DirectedGridLine, usize)>,
}

#[derive(Clone, Debug)]
pub struct OnlineState {
    points: Vec<Point>,
    /// Point coordinates in the tiling frame.
    frame_points: Vec<Point>,
    m: f64,
    shape: OnlineShape,
    hits: Vec<usize>,
    hit_set: BTreeSet<usize>,
    buckets: BTreeMap<u32, BTreeMap<(i64, i64), Vec<usize>>>,
    sub: BTreeMap<DirectedGridLine, SeparatedHitter>,
    pub telemetry: Vec<StepRecord>,
    pub final_fallbacks: usize,
}

impl OnlineState {
    pub fn new(points: Vec<Point>, m: f64, shape: OnlineShape) -> Result<Self> {
        if !(m >= 1.0) || !m.is_finite() {
            return invalid("scale cap must be finite and at least 1");
        }
        if points.iter().any(|p| !p.is_finite()) {
            return invalid("non-finite point");
        }
        let frame_points = match &shape {
            OnlineShape::Disk => points.clone(),
            OnlineShape::Homothet(h) => points.iter().map(|p| h.frame().apply(*p)).collect(),
        };
        Ok(OnlineState {
            points,
            frame_points,
            m,
            shape,
            hits: Vec::new(),
            hit_set: BTreeSet::new(),
            buckets: BTreeMap::new(),
            sub: BTreeMap::new(),
            telemetry: Vec::new(),
            final_fallbacks: 0,
        })
    }

    pub fn hits(&self) -> &[usize] {
        &self.hits
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn shape(&self) -> &OnlineShape {
        &self.shape
    }

    pub fn sub_hitters(&self) -> &BTreeMap<DirectedGridLine, SeparatedHitter> {
        &self.sub
    }

    pub fn contains(&self, obj: &OnlineObject, p: usize) -> bool {
        let q = self.points[p];
        match (obj, &self.shape) {
            (OnlineObject::Disk { center, radius }, OnlineShape::Disk) => disk_contains(*center, *radius, q),
            (OnlineObject::Homothet { scale, t }, OnlineShape::Homothet(h)) => h.contains(*scale, *t, q),
            _ => false,
        }
    }

    pub fn tiling(&self, j: u32) -> TilingSpec {
        match &self.shape {
            OnlineShape::Disk => TilingSpec::disk(j),
            OnlineShape::Homothet(h) => h.tiling(j),
        }
    }

    /// Reference point in the tiling frame.
    fn reference(&self, obj: &OnlineObject) -> Point {
        match (obj, &self.shape) {
            (OnlineObject::Disk { center, .. }, _) => *center,
            (OnlineObject::Homothet { scale, t }, OnlineShape::Homothet(h)) => {
                h.frame().apply(h.reference * *scale + *t)
            }
            _ => unreachable!("object kind checked on entry"),
        }
    }

    /// Lines met by `obj` in its layer's tiling.
    pub fn lines_hit(&self, obj: &OnlineObject, layer: u32) -> Vec<DirectedGridLine> {
        let spec = self.tiling(layer);
        match (obj, &self.shape) {
            (OnlineObject::Disk { center, radius }, _) => lines_hit_disk(&spec, layer, *center, *radius),
            (OnlineObject::Homothet { scale, t }, OnlineShape::Homothet(h)) => {
                let vs: Vec<Point> = h.body.vertices().iter().map(|v| h.frame().apply(*v * *scale + *t)).collect();
                lines_hit_polygon(&spec, layer, &vs, self.reference(obj))
            }
            _ => Vec::new(),
        }
    }

    fn bucket(&mut self, j: u32) -> &BTreeMap<(i64, i64), Vec<usize>> {
        if !self.buckets.contains_key(&j) {
            let spec = self.tiling(j);
            let mut b: BTreeMap<(i64, i64), Vec<usize>> = BTreeMap::new();
            for (i, p) in self.frame_points.iter().enumerate() {
                b.entry(spec.tile_of(*p).0).or_default().push(i);
            }
            self.buckets.insert(j, b);
        }
        &self.buckets[&j]
    }

    /// Points of the closed tiles containing `reference`.
    pub fn tile_candidates(&mut self, j: u32, reference: Point) -> Vec<usize> {
        let spec = self.tiling(j);
        let ([u0, u1], [w0, w1]) = spec.closed_range(reference);
        let mut out = Vec::new();
        let fp = self.frame_points.clone();
        let b = self.bucket(j);
        for i in u0..=u1 + 1 {
            for k in w0..=w1 + 1 {
                for &p in b.get(&(i, k)).into_iter().flatten() {
                    let (u, w) = spec.coords(fp[p]);
                    if u >= u0 as f64 && u <= (u1 + 1) as f64 && w >= w0 as f64 && w <= (w1 + 1) as f64 {
                        out.push(p);
                    }
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    fn lex_min(&self, cands: impl Iterator<Item = usize>) -> Option<usize> {
        cands.min_by(|a, b| self.points[*a].lex_cmp(&self.points[*b]).then(a.cmp(b)))
    }

    fn add(&mut self, p: usize) -> bool {
        if self.hit_set.insert(p) {
            self.hits.push(p);
            true
        } else {
            false
        }
    }

    fn strip_height(&self, layer: u32, frame: &SeparatedFrame) -> f64 {
        let cap = 2f64.powi(layer as i32 + 1);
        match &self.shape {
            OnlineShape::Disk => cap,
            OnlineShape::Homothet(h) => {
                let x = h.pair.x;
                let reach = h
                    .normalized
                    .polygon
                    .vertices()
                    .iter()
                    .map(|v| frame.vec_to_local(*v - x).y)
                    .fold(0.0f64, f64::max);
                cap * reach
            }
        }
    }

    fn sub_hitter(&mut self, line: DirectedGridLine) -> Result<&mut SeparatedHitter> {
        if !self.sub.contains_key(&line) {
            let frame = self.tiling(line.layer).line_frame(&line);
            let bound = self.strip_height(line.layer, &frame) * (1.0 + 1e-9);
            let pts: Vec<(usize, Point)> = self
                .frame_points
                .iter()
                .enumerate()
                .filter(|(_, p)| {
                    let y = frame.to_local(**p).y;
                    y > 0.0 && y <= bound
                })
                .map(|(i, p)| (i, *p))
                .collect();
            let shape = match &self.shape {
                OnlineShape::Disk => SeparatedShape::Disk,
                OnlineShape::Homothet(h) => SeparatedShape::Homothet(h.canonical.clone()),
            };
            let h = SeparatedHitter::new(&pts, frame, shape)?;
            self.sub.insert(line, h);
        }
        Ok(self.sub.get_mut(&line).expect("inserted above"))
    }

    /// Presents the next object; returns the points added to the hitting set.
    pub fn insert(&mut self, obj: &OnlineObject) -> Result<Vec<usize>> {
        match (obj, &self.shape) {
            (OnlineObject::Disk { .. }, OnlineShape::Disk) | (OnlineObject::Homothet { .. }, OnlineShape::Homothet(_)) => {}
            _ => return invalid("object kind does not match the configured shape"),
        }
        let layer = layer_of(obj.scale(), self.m)?;
        let trace: Vec<usize> = (0..self.points.len()).filter(|p| self.contains(obj, *p)).collect();
        if trace.is_empty() {
            return Err(Error::Unhittable { index: self.telemetry.len() });
        }
        let mut rec = StepRecord { layer: Some(layer), ..StepRecord::default() };
        if trace.iter().any(|p| self.hit_set.contains(p)) {
            rec.was_hit = true;
            self.telemetry.push(rec);
            return Ok(Vec::new());
        }
        let reference = self.reference(obj);
        let mut added = Vec::new();
        let in_tile = self.tile_candidates(layer, reference);
        if let Some(p) = self.lex_min(in_tile.into_iter().filter(|p| trace.binary_search(p).is_ok())) {
            self.add(p);
            rec.tile_hit = true;
            rec.points_added = 1;
            self.telemetry.push(rec);
            return Ok(vec![p]);
        }
        let spec = self.tiling(layer);
        for line in self.lines_hit(obj, layer) {
            let frame = spec.line_frame(&line);
            if !trace.iter().any(|p| frame.to_local(self.frame_points[*p]).y > 0.0) {
                continue;
            }
            let shape = self.shape.clone();
            let points = self.points.clone();
            let contains = |src: usize| match (obj, &shape) {
                (OnlineObject::Disk { center, radius }, _) => disk_contains(*center, *radius, points[src]),
                (OnlineObject::Homothet { scale, t }, OnlineShape::Homothet(h)) => h.contains(*scale, *t, points[src]),
                _ => false,
            };
            let h = self.sub_hitter(line)?;
            if !h.sources().any(|s| contains(s)) {
                continue;
            }
            let before = h.stats.fallbacks;
            let new = h.insert_with(obj.scale(), reference, &contains)?;
            if h.stats.fallbacks > before {
                rec.fallback = true;
            }
            rec.lines_invoked += 1;
            let mut count = 0;
            for p in new {
                if self.add(p) {
                    added.push(p);
                    count += 1;
                }
            }
            rec.per_line.push((line, count));
        }
        if !trace.iter().any(|p| self.hit_set.contains(p)) {
            let p = self.lex_min(trace.iter().copied()).expect("trace is nonempty");
            self.add(p);
            added.push(p);
            rec.fallback = true;
            self.final_fallbacks += 1;
        }
        rec.points_added = added.len();
        self.telemetry.push(rec);
        Ok(added)
    }
}

/// `96 (floor(log2 M) + 1) (log2 n + 3)`.
pub fn ratio_ceiling(m: f64, n: usize) -> f64 {
    96.0 * layer_count(m) as f64 * ((n.max(1) as f64).log2() + 3.0)
}
