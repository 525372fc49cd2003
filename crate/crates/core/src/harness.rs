//! Instance files, generators, replay and reports.

use crate::error::{invalid, Error, Result};
use crate::geom::regular_polygon;
use crate::hull::{disk_contains, SeparatedFrame};
use crate::lattice::{alg0_insert, BottomlessRect, HittingState, LatticeIndex, LatticePoint};
use crate::online::{layer_count, layer_of, ratio_ceiling, HomothetSetup, OnlineObject, OnlineShape, OnlineState};
use crate::oracle::{exact_opt, greedy, verify_hitting, Budget, IncidenceMatrix};
use crate::separated::{SeparatedHitter, SeparatedShape};
use crate::{ConvexPolygon, Point};
use rand_xoshiro::rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Bottomless,
    SeparatedDisks,
    Disks,
    Homothets,
}

impl Kind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Kind::Bottomless => "bottomless",
            Kind::SeparatedDisks => "separated-disks",
            Kind::Disks => "disks",
            Kind::Homothets => "homothets",
        }
    }
}

impl FromStr for Kind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "bottomless" => Kind::Bottomless,
            "separated-disks" => Kind::SeparatedDisks,
            "disks" => Kind::Disks,
            "homothets" => Kind::Homothets,
            _ => return invalid(format!("unknown instance kind {s:?}")),
        })
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `cap` is the lattice size `N` for bottomless instances, the coordinate
/// bound for separated disks, and the scale cap `M` otherwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub kind: Kind,
    pub cap: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ObjectSpec {
    Disk { c: [f64; 2], r: f64 },
    Bottomless { a: u64, b: u64, c: u64 },
    Homothet { scale: f64, t: [f64; 2] },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub name: String,
    pub params: Params,
    pub points: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub body: Option<Vec<[f64; 2]>>,
    pub objects: Vec<ObjectSpec>,
}

fn pt(a: [f64; 2]) -> Point {
    Point::new(a[0], a[1])
}

fn arr(p: Point) -> [f64; 2] {
    [p.x, p.y]
}

impl Instance {
    pub fn from_json(s: &str) -> Result<Self> {
        let inst: Instance = serde_json::from_str(s).map_err(|e| Error::InvalidInput(format!("instance JSON: {e}")))?;
        inst.validate()?;
        Ok(inst)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("instances serialize");
        s.push('\n');
        s
    }

    pub fn points(&self) -> Vec<Point> {
        self.points.iter().map(|p| pt(*p)).collect()
    }

    pub fn body_polygon(&self) -> Result<Option<ConvexPolygon>> {
        self.body
            .as_ref()
            .map(|b| ConvexPolygon::new(b.iter().map(|p| pt(*p)).collect()))
            .transpose()
    }

    pub fn validate(&self) -> Result<()> {
        let cap = self.params.cap;
        if !(cap >= 1.0) || !cap.is_finite() {
            return invalid("cap must be finite and at least 1");
        }
        if self.points.iter().flatten().any(|v| !v.is_finite()) {
            return invalid("non-finite point coordinate");
        }
        let kind = self.params.kind;
        match kind {
            Kind::Homothets => {
                if self.body_polygon()?.is_none() {
                    return invalid("homothet instance needs a body polygon");
                }
            }
            _ if self.body.is_some() => return invalid("only homothet instances carry a body"),
            _ => {}
        }
        if kind == Kind::Bottomless {
            for p in &self.points {
                if p.iter().any(|v| v.fract() != 0.0 || *v < 0.0 || *v >= cap) {
                    return invalid(format!("bottomless point {p:?} must be integral in [0, {cap})"));
                }
            }
        }
        if kind == Kind::SeparatedDisks && self.points.iter().any(|p| !(p[1] > 0.0)) {
            return invalid("separated instance points must lie strictly above the x-axis");
        }
        for (i, o) in self.objects.iter().enumerate() {
            let ok = match (kind, o) {
                (Kind::Bottomless, ObjectSpec::Bottomless { a, b, c }) => a < b && *b as f64 <= cap && *c >= 1,
                (Kind::SeparatedDisks, ObjectSpec::Disk { c, r }) => c[1] <= 0.0 && *r > 0.0 && r.is_finite(),
                (Kind::Disks, ObjectSpec::Disk { c, r }) => c.iter().all(|v| v.is_finite()) && *r >= 1.0 && *r <= cap,
                (Kind::Homothets, ObjectSpec::Homothet { scale, t }) => {
                    t.iter().all(|v| v.is_finite()) && *scale >= 1.0 && *scale <= cap
                }
                _ => false,
            };
            if !ok {
                return invalid(format!("object {i} is invalid for a {kind} instance"));
            }
        }
        Ok(())
    }

    /// Membership test shared by every algorithm and by verification.
    pub fn membership(&self) -> Result<Membership> {
        Ok(Membership {
            points: self.points(),
            body: self.body_polygon()?,
        })
    }

    /// Point indices contained in each object.
    pub fn traces(&self) -> Result<Vec<Vec<usize>>> {
        let m = self.membership()?;
        Ok(self.objects.iter().map(|o| m.trace(o)).collect())
    }
}

#[derive(Clone, Debug)]
pub struct Membership {
    points: Vec<Point>,
    body: Option<ConvexPolygon>,
}

impl Membership {
    pub fn contains(&self, o: &ObjectSpec, p: usize) -> bool {
        let q = self.points[p];
        match o {
            ObjectSpec::Disk { c, r } => disk_contains(pt(*c), *r, q),
            ObjectSpec::Bottomless { a, b, c } => q.x >= *a as f64 && q.x < *b as f64 && q.y >= 0.0 && q.y < *c as f64,
            ObjectSpec::Homothet { scale, t } => {
                self.body.as_ref().is_some_and(|body| body.contains((q - pt(*t)) / *scale))
            }
        }
    }

    pub fn trace(&self, o: &ObjectSpec) -> Vec<usize> {
        (0..self.points.len()).filter(|p| self.contains(o, *p)).collect()
    }
}

/// SplitMix64 stream. Integers in `[0, k)` use the high half of the 128-bit
/// product `next * k`; reals in `[0, 1)` use the top 53 bits.
#[derive(Clone, Debug)]
pub struct Rng(SplitMix64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(SplitMix64::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    pub fn below(&mut self, k: u64) -> u64 {
        ((self.next_u64() as u128 * k as u128) >> 64) as u64
    }

    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Style {
    Uniform,
    Clustered,
    AdversarialNested,
}

impl FromStr for Style {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "uniform" => Style::Uniform,
            "clustered" => Style::Clustered,
            "adversarial-nested" => Style::AdversarialNested,
            _ => return invalid(format!("unknown generator {s:?}")),
        })
    }
}

impl Style {
    pub fn as_str(&self) -> &'static str {
        match self {
            Style::Uniform => "uniform",
            Style::Clustered => "clustered",
            Style::AdversarialNested => "adversarial-nested",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum BodyKind {
    Triangle,
    Square,
    Gon64,
    /// Hull of random points on an ellipse, seeded from the instance seed.
    Random(usize),
    Custom(ConvexPolygon),
}

impl FromStr for BodyKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "triangle" => BodyKind::Triangle,
            "square" => BodyKind::Square,
            "64-gon" => BodyKind::Gon64,
            _ => match s.strip_prefix("random") {
                Some(k) => BodyKind::Random(k.parse().map_err(|_| Error::InvalidInput(format!("bad body {s:?}")))?),
                None => return invalid(format!("unknown body {s:?}")),
            },
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenSpec {
    pub kind: Kind,
    pub n: usize,
    pub m: usize,
    pub cap: f64,
    pub seed: u64,
    pub style: Style,
    pub body: BodyKind,
}

impl GenSpec {
    pub fn new(kind: Kind, n: usize, m: usize, cap: f64, seed: u64) -> Self {
        GenSpec {
            kind,
            n,
            m,
            cap,
            seed,
            style: Style::Uniform,
            body: BodyKind::Triangle,
        }
    }
}

const MAX_TRIES: usize = 100_000;

fn distinct_points(rng: &mut Rng, n: usize, mut draw: impl FnMut(&mut Rng) -> [f64; 2]) -> Result<Vec<[f64; 2]>> {
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::with_capacity(n);
    let mut tries = 0;
    while out.len() < n {
        let p = draw(rng);
        if seen.insert((p[0].to_bits(), p[1].to_bits())) {
            out.push(p);
        }
        tries += 1;
        if tries > MAX_TRIES {
            return invalid("could not draw enough distinct points");
        }
    }
    Ok(out)
}

fn clusters(rng: &mut Rng, k: usize, w: f64) -> Vec<[f64; 2]> {
    (0..k).map(|_| [rng.unit() * w, rng.unit() * w]).collect()
}

/// Roughly normal offset with unit spread.
fn bump(rng: &mut Rng) -> f64 {
    (0..4).map(|_| rng.unit()).sum::<f64>() - 2.0
}

fn quantize(v: f64, q: f64) -> f64 {
    (v * q).round() / q
}

pub fn body_for(kind: &BodyKind, seed: u64) -> Result<ConvexPolygon> {
    Ok(match kind {
        BodyKind::Triangle => ConvexPolygon::new(vec![Point::new(0.0, 0.0), Point::new(2.0, 0.0), Point::new(0.5, 1.5)])?,
        BodyKind::Square => ConvexPolygon::new(vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ])?,
        BodyKind::Gon64 => regular_polygon(64, 1.0, 0.0),
        BodyKind::Random(k) => {
            let mut rng = Rng::new(seed ^ 0x5eed_b0d1);
            let k = (*k).max(3);
            let (ax, ay, sh) = (0.5 + rng.unit(), 0.5 + rng.unit(), rng.unit() - 0.5);
            let pts: Vec<Point> = (0..k)
                .map(|_| {
                    let a = rng.unit() * std::f64::consts::TAU;
                    let (s, c) = a.sin_cos();
                    Point::new(quantize(ax * c + sh * s, 1024.0), quantize(ay * s, 1024.0))
                })
                .collect();
            ConvexPolygon::hull(&pts)?
        }
        BodyKind::Custom(p) => p.clone(),
    })
}

/// Deterministic instance for `(spec, seed)`.
pub fn gen_instance(spec: &GenSpec) -> Result<Instance> {
    if spec.n == 0 {
        return invalid("need at least one point");
    }
    if !(spec.cap >= 1.0) || !spec.cap.is_finite() {
        return invalid("cap must be finite and at least 1");
    }
    let mut rng = Rng::new(spec.seed);
    let (points, body, objects) = match spec.kind {
        Kind::Bottomless => gen_bottomless(spec, &mut rng)?,
        Kind::SeparatedDisks => gen_separated(spec, &mut rng)?,
        Kind::Disks | Kind::Homothets => gen_planar(spec, &mut rng)?,
    };
    let inst = Instance {
        name: format!(
            "{}-{}-n{}-m{}-cap{}-s{}",
            spec.kind,
            spec.style.as_str(),
            spec.n,
            spec.m,
            spec.cap,
            spec.seed
        ),
        params: Params { kind: spec.kind, cap: spec.cap, seed: spec.seed },
        points,
        body,
        objects,
    };
    inst.validate()?;
    Ok(inst)
}

type Parts = (Vec<[f64; 2]>, Option<Vec<[f64; 2]>>, Vec<ObjectSpec>);

fn gen_bottomless(spec: &GenSpec, rng: &mut Rng) -> Result<Parts> {
    let big_n = spec.cap as u64;
    if spec.cap.fract() != 0.0 || (spec.n as u64) > big_n {
        return invalid("bottomless needs an integral N with n <= N");
    }
    let mut xs: Vec<u64> = (0..big_n).collect();
    for i in 0..spec.n {
        let j = i + rng.below(big_n - i as u64) as usize;
        xs.swap(i, j);
    }
    let mut xs: Vec<u64> = xs[..spec.n].to_vec();
    if spec.style == Style::AdversarialNested {
        xs = (0..spec.n as u64).map(|i| i * big_n / spec.n as u64).collect();
    }
    let centres: Vec<f64> = (0..4).map(|_| rng.unit() * big_n as f64).collect();
    let pts: Vec<[f64; 2]> = xs
        .iter()
        .map(|x| {
            let y = match spec.style {
                Style::Clustered => {
                    let c = centres[rng.below(4) as usize];
                    (c + bump(rng) * big_n as f64 / 16.0).clamp(0.0, (big_n - 1) as f64).floor()
                }
                _ => rng.below(big_n) as f64,
            };
            [*x as f64, y]
        })
        .collect();
    let contains = |a: u64, b: u64, c: u64| pts.iter().any(|p| p[0] >= a as f64 && p[0] < b as f64 && p[1] < c as f64);
    let mut objs = Vec::new();
    if spec.style == Style::AdversarialNested {
        let lattice: Vec<LatticePoint> = pts.iter().map(|p| LatticePoint::new(p[0] as u64, p[1] as u64)).collect();
        let index = LatticeIndex::new(lattice.iter().copied(), big_n)?;
        let mut state = HittingState::new();
        while objs.len() < spec.m {
            // the widest run of unhit points between consecutive hit columns
            let mut cols: Vec<u64> = state.hits().iter().map(|p| p.x).collect();
            cols.sort_unstable();
            let mut best: Option<(usize, u64, u64)> = None;
            let mut lo = 0u64;
            for hi in cols.iter().copied().chain(std::iter::once(big_n)) {
                let cnt = xs.iter().filter(|x| **x >= lo && **x < hi).count();
                if cnt > 0 && best.map_or(true, |(c, _, _)| cnt > c) {
                    best = Some((cnt, lo, hi));
                }
                lo = hi + 1;
            }
            let Some((_, a, b)) = best else { break };
            let r = BottomlessRect::new(a, b, big_n)?;
            let obj = index.rect_to_object(&r).expect("run holds a point");
            alg0_insert(&index, &mut state, &obj)?;
            objs.push(ObjectSpec::Bottomless { a, b, c: big_n });
        }
    } else {
        let mut tries = 0;
        while objs.len() < spec.m {
            tries += 1;
            if tries > MAX_TRIES {
                return invalid("could not draw hittable rectangles");
            }
            let (a, b) = if spec.style == Style::Clustered {
                let p = pts[rng.below(pts.len() as u64) as usize][0] as u64;
                let w = 1 + rng.below(big_n / 8 + 1);
                (p.saturating_sub(rng.below(w + 1)), (p + 1 + rng.below(w + 1)).min(big_n))
            } else {
                let a = rng.below(big_n);
                (a, a + 1 + rng.below(big_n - a))
            };
            let c = 1 + rng.below(big_n);
            if contains(a, b, c) {
                objs.push(ObjectSpec::Bottomless { a, b, c });
            }
        }
    }
    Ok((pts, None, objs))
}

fn gen_separated(spec: &GenSpec, rng: &mut Rng) -> Result<Parts> {
    let b = spec.cap.floor().max(2.0) as u64;
    let cl = clusters(rng, 3, b as f64);
    let pts = distinct_points(rng, spec.n, |r| match spec.style {
        Style::Clustered => {
            let c = cl[r.below(3) as usize];
            [
                (c[0] + bump(r) * b as f64 / 12.0).round().clamp(0.0, b as f64),
                (c[1] / 2.0 + bump(r) * b as f64 / 12.0).round().clamp(1.0, b as f64),
            ]
        }
        _ => [r.below(b + 1) as f64, (1 + r.below(b)) as f64],
    })?;
    let mut objs = Vec::new();
    let mut nest: Option<(f64, f64, f64)> = None;
    let mut tries = 0;
    while objs.len() < spec.m {
        tries += 1;
        if tries > MAX_TRIES {
            return invalid("could not draw hittable disks");
        }
        let target = Point::new(pts[rng.below(spec.n as u64) as usize][0], pts[rng.below(spec.n as u64) as usize][1]);
        let (cx, cy, r) = if spec.style == Style::AdversarialNested {
            // shrinking disks about a fixed centre, restarting when empty
            match nest {
                Some((x, y, r)) if r > 1.0 => (x, y, (r * 0.8).floor()),
                _ => {
                    let x = r_below(rng, b + 1);
                    let y = -r_below(rng, b / 4 + 1);
                    let far = pts.iter().map(|p| Point::new(x, y).dist(pt(*p))).fold(0.0, f64::max);
                    (x, y, far.ceil())
                }
            }
        } else {
            let x = r_below(rng, b + 1);
            let y = -r_below(rng, b / 2 + 1);
            let d = Point::new(x, y).dist(target).ceil();
            (x, y, d + r_below(rng, b / 10 + 1))
        };
        nest = Some((cx, cy, r));
        let o = ObjectSpec::Disk { c: [cx, cy], r };
        if pts.iter().any(|p| disk_contains(Point::new(cx, cy), r, pt(*p))) {
            objs.push(o);
        } else {
            nest = None;
        }
    }
    Ok((pts, None, objs))
}

fn r_below(rng: &mut Rng, k: u64) -> f64 {
    rng.below(k) as f64
}

fn gen_planar(spec: &GenSpec, rng: &mut Rng) -> Result<Parts> {
    let m_cap = spec.cap;
    let w = (3.0 * (spec.n as f64).sqrt()).ceil().max(4.0);
    let cl = clusters(rng, 4, w);
    let pts = distinct_points(rng, spec.n, |r| match spec.style {
        Style::Clustered => {
            let c = cl[r.below(4) as usize];
            [(c[0] + bump(r) * w / 10.0).round(), (c[1] + bump(r) * w / 10.0).round()]
        }
        _ => [r.below(w as u64 + 1) as f64, r.below(w as u64 + 1) as f64],
    })?;
    let body = if spec.kind == Kind::Homothets { Some(body_for(&spec.body, spec.seed)?) } else { None };
    let inner: Vec<Point> = match &body {
        Some(b) => {
            let c = b.centroid();
            b.vertices().iter().map(|v| c.lerp(*v, 0.95)).collect()
        }
        None => Vec::new(),
    };
    // a uniform layer, then log-uniform inside it; the top layer may be the single value M
    let top = layer_count(m_cap) as u64;
    let scale_draw = |r: &mut Rng| {
        let j = r.below(top) as i32;
        let lo = 2f64.powi(j);
        let hi = (lo * 2.0).min(m_cap);
        quantize(lo * (hi / lo).powf(r.unit()), 16.0).clamp(lo, m_cap)
    };
    let mut objs = Vec::new();
    let mut tries = 0;
    let mut nest: Option<(Point, f64, usize)> = None;
    while objs.len() < spec.m {
        tries += 1;
        if tries > MAX_TRIES {
            return invalid("could not draw hittable objects");
        }
        let p = pt(pts[rng.below(spec.n as u64) as usize]);
        let (anchor, scale) = match (spec.style, nest) {
            (Style::AdversarialNested, Some((a, s, left))) if left > 0 => (a, quantize(s * 0.85, 16.0).max(1.0)),
            _ => (p, m_cap),
        };
        let scale = if spec.style == Style::AdversarialNested { scale } else { scale_draw(rng) };
        let o = match &body {
            None => {
                let ang = rng.unit() * std::f64::consts::TAU;
                let d = scale * rng.unit().sqrt();
                let c = Point::new(quantize(anchor.x + d * ang.cos(), 8.0), quantize(anchor.y + d * ang.sin(), 8.0));
                ObjectSpec::Disk { c: arr(c), r: scale }
            }
            Some(b) => {
                let (i, k) = (rng.below(inner.len() as u64) as usize, rng.below(inner.len() as u64) as usize);
                let c = inner[i].lerp(inner[k], rng.unit()).lerp(b.centroid(), rng.unit() * 0.5);
                let t = anchor - c * scale;
                ObjectSpec::Homothet { scale, t: [quantize(t.x, 8.0), quantize(t.y, 8.0)] }
            }
        };
        let hits = {
            let mem = Membership { points: pts.iter().map(|p| pt(*p)).collect(), body: body.clone() };
            !mem.trace(&o).is_empty()
        };
        if hits {
            nest = match nest {
                Some((a, _, left)) if left > 0 => Some((a, scale, left - 1)),
                _ => Some((anchor, scale, 8)),
            };
            objs.push(o);
        } else {
            nest = None;
        }
    }
    Ok((pts, body.map(|b| b.vertices().iter().map(|v| arr(*v)).collect()), objs))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Selector {
    Bottomless,
    Separated,
    Disks,
    Homothets,
}

impl FromStr for Selector {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "bottomless" => Selector::Bottomless,
            "separated" => Selector::Separated,
            "disks" => Selector::Disks,
            "homothets" => Selector::Homothets,
            _ => return invalid(format!("unknown algorithm {s:?}")),
        })
    }
}

impl Selector {
    pub fn for_kind(kind: Kind) -> Self {
        match kind {
            Kind::Bottomless => Selector::Bottomless,
            Kind::SeparatedDisks => Selector::Separated,
            Kind::Disks => Selector::Disks,
            Kind::Homothets => Selector::Homothets,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunOptions {
    pub skip_unhittable: bool,
    pub budget: Budget,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepRow {
    pub step: usize,
    pub object_id: usize,
    pub was_hit: bool,
    pub points_added: usize,
    pub layer: Option<u32>,
    pub lines_invoked: usize,
    pub fallback: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OptKind {
    Exact,
    Greedy,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunReport {
    pub instance: String,
    pub rows: Vec<StepRow>,
    /// Point indices in insertion order.
    pub hits: Vec<usize>,
    pub opt: usize,
    pub opt_kind: OptKind,
    pub greedy: usize,
    pub ratio: f64,
    pub ceiling: f64,
    pub ms: f64,
    pub skipped: Vec<usize>,
    pub fallbacks: usize,
    /// Scale-layer histogram of presented objects.
    pub layers: BTreeMap<u32, usize>,
    pub case_tag: Option<&'static str>,
}

impl RunReport {
    pub fn fallback_rate(&self) -> f64 {
        let n = self.rows.iter().filter(|r| !r.was_hit).count();
        if n == 0 {
            0.0
        } else {
            self.rows.iter().filter(|r| r.fallback).count() as f64 / n as f64
        }
    }

    /// Writes the per-step rows and the summary block as CSV.
    pub fn write_csv<W: Write>(&self, out: W, with_ms: bool) -> Result<()> {
        let io = |e: csv::Error| Error::Io(e.to_string());
        let mut w = csv::WriterBuilder::new().flexible(true).from_writer(out);
        w.write_record(["step", "object_id", "was_hit", "points_added", "layer", "lines_invoked", "fallback"])
            .map_err(io)?;
        for r in &self.rows {
            w.write_record([
                r.step.to_string(),
                r.object_id.to_string(),
                r.was_hit.to_string(),
                r.points_added.to_string(),
                r.layer.map_or(String::new(), |l| l.to_string()),
                r.lines_invoked.to_string(),
                r.fallback.to_string(),
            ])
            .map_err(io)?;
        }
        w.write_record(["|H|", "|OPT|", "opt_kind", "ratio", "ceiling", "ms"]).map_err(io)?;
        let kind = match self.opt_kind {
            OptKind::Exact => "exact",
            OptKind::Greedy => "greedy",
        };
        w.write_record([
            self.hits.len().to_string(),
            self.opt.to_string(),
            kind.to_string(),
            format!("{:.6}", self.ratio),
            format!("{:.3}", self.ceiling),
            if with_ms { format!("{:.3}", self.ms) } else { String::new() },
        ])
        .map_err(io)?;
        w.flush().map_err(|e| Error::Io(e.to_string()))
    }
}

/// Minimum hitting set of the given traces, exact when within budget.
pub fn opt_for(n_points: usize, rows: Vec<Vec<usize>>, budget: Budget) -> Result<(Vec<usize>, OptKind, Vec<usize>)> {
    let m = IncidenceMatrix::new(n_points, rows)?;
    let g = greedy(&m);
    match exact_opt(&m, budget) {
        Ok(e) => Ok((e, OptKind::Exact, g)),
        Err(Error::BudgetExceeded(_)) => Ok((g.clone(), OptKind::Greedy, g)),
        Err(e) => Err(e),
    }
}

struct Step {
    added: Vec<usize>,
    layer: Option<u32>,
    lines: usize,
    fallback: bool,
}

/// Replays the instance online, verifying the hitting property after every
/// arrival.
pub fn run_experiment(inst: &Instance, selector: Selector, opts: RunOptions) -> Result<RunReport> {
    inst.validate()?;
    let expected = Selector::for_kind(inst.params.kind);
    if selector != expected {
        return invalid(format!("algorithm {selector:?} does not run {} instances", inst.params.kind));
    }
    let mem = inst.membership()?;
    let points = inst.points();
    let traces: Vec<Vec<usize>> = inst.objects.iter().map(|o| mem.trace(o)).collect();
    let mut hits: Vec<usize> = Vec::new();
    let mut is_hit = vec![false; points.len()];
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    let mut layers = BTreeMap::new();
    let mut case_tag = None;
    let mut fallbacks = 0;
    let cap = inst.params.cap;
    let start = Instant::now();

    let mut runner: Box<dyn FnMut(usize, &ObjectSpec) -> Result<Step>> = match selector {
        Selector::Bottomless => {
            let lattice: Vec<LatticePoint> = points.iter().map(|p| LatticePoint::new(p.x as u64, p.y as u64)).collect();
            let by_point: BTreeMap<LatticePoint, usize> =
                lattice.iter().enumerate().rev().map(|(i, p)| (*p, i)).collect();
            let index = LatticeIndex::new(lattice.iter().copied(), cap as u64)?;
            let mut state = HittingState::new();
            Box::new(move |_, o| {
                let ObjectSpec::Bottomless { a, b, c } = o else { unreachable!("validated") };
                let r = BottomlessRect::new(*a, *b, *c)?;
                let obj = index.rect_to_object(&r).ok_or(Error::Unhittable { index: 0 })?;
                let (added, fallback) = match alg0_insert(&index, &mut state, &obj) {
                    Ok(a) => (a, false),
                    Err(Error::PropertyViolation { .. }) => {
                        let low = *obj.members.iter().min_by_key(|p| p.lowness_key()).expect("nonempty");
                        state.force_insert(low);
                        (vec![low], true)
                    }
                    Err(e) => return Err(e),
                };
                Ok(Step {
                    added: added.iter().map(|p| by_point[p]).collect(),
                    layer: None,
                    lines: 0,
                    fallback,
                })
            })
        }
        Selector::Separated => {
            let frame = SeparatedFrame::new(Point::origin(), Point::new(1.0, 0.0))?;
            let pts: Vec<(usize, Point)> = points.iter().copied().enumerate().collect();
            let mut h = SeparatedHitter::new(&pts, frame, SeparatedShape::Disk)?;
            Box::new(move |_, o| {
                let ObjectSpec::Disk { c, r } = o else { unreachable!("validated") };
                let before = h.stats.fallbacks;
                let added = h.insert_disk(pt(*c), *r)?;
                Ok(Step { added, layer: None, lines: 0, fallback: h.stats.fallbacks > before })
            })
        }
        Selector::Disks | Selector::Homothets => {
            let shape = match inst.body_polygon()? {
                Some(b) => {
                    let setup = HomothetSetup::new(&b, None)?;
                    case_tag = Some(setup.pair.case.as_str());
                    OnlineShape::Homothet(Box::new(setup))
                }
                None => OnlineShape::Disk,
            };
            let mut st = OnlineState::new(points.clone(), cap, shape)?;
            Box::new(move |_, o| {
                let obj = match o {
                    ObjectSpec::Disk { c, r } => OnlineObject::Disk { center: pt(*c), radius: *r },
                    ObjectSpec::Homothet { scale, t } => OnlineObject::Homothet { scale: *scale, t: pt(*t) },
                    ObjectSpec::Bottomless { .. } => unreachable!("validated"),
                };
                let added = st.insert(&obj)?;
                let rec = st.telemetry.last().expect("insert records telemetry").clone();
                Ok(Step { added, layer: rec.layer, lines: rec.lines_invoked, fallback: rec.fallback })
            })
        }
    };

    for (i, o) in inst.objects.iter().enumerate() {
        if traces[i].is_empty() {
            if opts.skip_unhittable {
                skipped.push(i);
                continue;
            }
            return Err(Error::Unhittable { index: i });
        }
        let was_hit = traces[i].iter().any(|p| is_hit[*p]);
        let step = if was_hit {
            Step { added: Vec::new(), layer: None, lines: 0, fallback: false }
        } else {
            runner(i, o)?
        };
        let layer = match o {
            ObjectSpec::Disk { r, .. } if selector == Selector::Disks => Some(layer_of(*r, cap)?),
            ObjectSpec::Homothet { scale, .. } => Some(layer_of(*scale, cap)?),
            _ => step.layer,
        };
        if let Some(l) = layer {
            *layers.entry(l).or_insert(0) += 1;
        }
        let mut count = 0;
        for p in step.added {
            if !is_hit[p] {
                is_hit[p] = true;
                hits.push(p);
                count += 1;
            }
        }
        if !traces[i].iter().any(|p| is_hit[*p]) {
            return Err(Error::Verification { index: i });
        }
        if step.fallback {
            fallbacks += 1;
        }
        rows.push(StepRow {
            step: rows.len(),
            object_id: i,
            was_hit,
            points_added: count,
            layer,
            lines_invoked: step.lines,
            fallback: step.fallback,
        });
    }
    drop(runner);
    let ms = start.elapsed().as_secs_f64() * 1e3;

    let live: Vec<Vec<usize>> = traces.iter().filter(|t| !t.is_empty()).cloned().collect();
    let (opt, opt_kind, g) = if live.is_empty() {
        (Vec::new(), OptKind::Exact, Vec::new())
    } else {
        opt_for(points.len(), live.clone(), opts.budget)?
    };
    let m = IncidenceMatrix::new(points.len(), live)?;
    verify_hitting(&hits, &m).map_err(|k| Error::Verification { index: k })?;
    let ceiling = match selector {
        Selector::Bottomless => 16.0 * ((cap as u64).next_power_of_two().trailing_zeros() as f64 + 2.0),
        Selector::Separated => 16.0 * (((points.len() + 1) as u64).next_power_of_two().trailing_zeros() as f64 + 2.0),
        Selector::Disks | Selector::Homothets => ratio_ceiling(cap, points.len()),
    };
    let ratio = if opt.is_empty() { if hits.is_empty() { 1.0 } else { f64::INFINITY } } else { hits.len() as f64 / opt.len() as f64 };
    Ok(RunReport {
        instance: inst.name.clone(),
        rows,
        hits,
        opt: opt.len(),
        opt_kind,
        greedy: g.len(),
        ratio,
        ceiling,
        ms,
        skipped,
        fallbacks,
        layers,
        case_tag,
    })
}

/// Whether `hits` meets every hittable object; `Err(k)` names the first
/// object missed.
pub fn verify_instance(inst: &Instance, hits: &[usize]) -> std::result::Result<(), usize> {
    let mem = inst.membership().map_err(|_| 0usize)?;
    for (i, o) in inst.objects.iter().enumerate() {
        let t = mem.trace(o);
        if !t.is_empty() && !t.iter().any(|p| hits.contains(p)) {
            return Err(i);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bottomless_instances_are_reproducible() {
        let spec = GenSpec::new(Kind::Bottomless, 12, 10, 16.0, 7);
        let a = gen_instance(&spec).unwrap().to_json();
        let b = gen_instance(&spec).unwrap().to_json();
        assert_eq!(a, b);
        let back = Instance::from_json(&a).unwrap();
        assert_eq!(back.to_json(), a);
        assert_eq!(back.objects.len(), 10);
    }

    #[test]
    fn disk_instances_fill_every_layer() {
        let inst = gen_instance(&GenSpec::new(Kind::Disks, 60, 200, 8.0, 1)).unwrap();
        let mut seen = [0; 4];
        for o in &inst.objects {
            let ObjectSpec::Disk { r, .. } = o else { panic!() };
            assert!((1.0..=8.0).contains(r));
            seen[layer_of(*r, 8.0).unwrap() as usize] += 1;
        }
        assert!(seen.iter().all(|c| *c > 0), "{seen:?}");
    }

    #[test]
    fn nested_bottomless_forces_growth() {
        let mut spec = GenSpec::new(Kind::Bottomless, 64, 40, 256.0, 3);
        spec.style = Style::AdversarialNested;
        let inst = gen_instance(&spec).unwrap();
        let rep = run_experiment(&inst, Selector::Bottomless, RunOptions::default()).unwrap();
        assert!(rep.ratio >= 3.0, "ratio {}", rep.ratio);
    }

    #[test]
    fn every_selector_runs_and_verifies() {
        let cases = [
            (Kind::Bottomless, 16.0, Selector::Bottomless),
            (Kind::SeparatedDisks, 1000.0, Selector::Separated),
            (Kind::Disks, 8.0, Selector::Disks),
            (Kind::Homothets, 4.0, Selector::Homothets),
        ];
        for (kind, cap, sel) in cases {
            for style in [Style::Uniform, Style::Clustered, Style::AdversarialNested] {
                let mut spec = GenSpec::new(kind, 12, 40, cap, 11);
                spec.style = style;
                let inst = gen_instance(&spec).unwrap();
                let rep = run_experiment(&inst, sel, RunOptions::default()).unwrap();
                assert!(verify_instance(&inst, &rep.hits).is_ok());
                assert!(rep.opt <= rep.greedy);
                let total: usize = rep.rows.iter().map(|r| r.points_added).sum();
                assert_eq!(total, rep.hits.len());
                let mut a = Vec::new();
                let mut b = Vec::new();
                rep.write_csv(&mut a, false).unwrap();
                run_experiment(&inst, sel, RunOptions::default()).unwrap().write_csv(&mut b, false).unwrap();
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn unhittable_objects_can_be_skipped() {
        let mut inst = gen_instance(&GenSpec::new(Kind::Disks, 10, 5, 2.0, 2)).unwrap();
        inst.objects.push(ObjectSpec::Disk { c: [1e6, 1e6], r: 1.0 });
        assert!(matches!(
            run_experiment(&inst, Selector::Disks, RunOptions::default()),
            Err(Error::Unhittable { index: 5 })
        ));
        let rep = run_experiment(&inst, Selector::Disks, RunOptions { skip_unhittable: true, ..Default::default() }).unwrap();
        assert_eq!(rep.skipped, vec![5]);
    }

    #[test]
    fn rejects_mismatched_inputs() {
        let inst = gen_instance(&GenSpec::new(Kind::Disks, 10, 5, 2.0, 2)).unwrap();
        assert!(run_experiment(&inst, Selector::Bottomless, RunOptions::default()).is_err());
        let mut bad = inst.clone();
        bad.objects.push(ObjectSpec::Disk { c: [0.0, 0.0], r: 5.0 });
        assert!(bad.validate().is_err());
        assert!(Instance::from_json("{\"name\": 3}").is_err());
    }
}
