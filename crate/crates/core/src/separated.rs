//! Online hitting set for objects whose reference points lie on one side of
//! a fixed line and whose points lie on the other.

use crate::error::{invalid, Result};
use crate::hull::{
    build_disk_reduction, build_homothet_reduction, disk_contains, HomothetBody, HullReduction, SeparatedFrame,
};
use crate::lattice::{alg0_insert, has_lowest_point_property, HittingState, LatticeIndex, LatticePoint};
use crate::Point;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

#[derive(Clone, Debug)]
pub enum SeparatedShape {
    Disk,
    Homothet(Arc<HomothetBody>),
}

/// Counters describing how insertions were resolved.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SeparatedStats {
    pub inserts: usize,
    pub already_hit: usize,
    pub fallbacks: usize,
    /// Images that failed the lowest-point check before reaching ALG0.
    pub property_failures: usize,
}

#[derive(Clone, Debug)]
pub struct SeparatedHitter {
    shape: SeparatedShape,
    reduction: HullReduction,
    index: LatticeIndex,
    inner: HittingState,
    points: BTreeMap<usize, Point>,
    hits: BTreeSet<usize>,
    order: Vec<usize>,
    pub stats: SeparatedStats,
}

impl SeparatedHitter {
    /// `points` are `(source id, world point)` pairs, all strictly on the
    /// left of `frame`'s directed line.
    pub fn new(points: &[(usize, Point)], frame: SeparatedFrame, shape: SeparatedShape) -> Result<Self> {
        let reduction = match &shape {
            SeparatedShape::Disk => build_disk_reduction(points, frame)?,
            SeparatedShape::Homothet(body) => build_homothet_reduction(points, body, frame)?,
        };
        let index = LatticeIndex::new(reduction.lattice_points(), reduction.extent)?;
        Ok(SeparatedHitter {
            shape,
            reduction,
            index,
            inner: HittingState::new(),
            points: points.iter().copied().collect(),
            hits: BTreeSet::new(),
            order: Vec::new(),
            stats: SeparatedStats::default(),
        })
    }

    pub fn reduction(&self) -> &HullReduction {
        &self.reduction
    }

    pub fn index(&self) -> &LatticeIndex {
        &self.index
    }

    pub fn frame(&self) -> &SeparatedFrame {
        &self.reduction.frame
    }

    /// Point sources in the order they were added.
    pub fn hits(&self) -> &[usize] {
        &self.order
    }

    pub fn is_hit(&self, src: usize) -> bool {
        self.hits.contains(&src)
    }

    pub fn sources(&self) -> impl Iterator<Item = usize> + '_ {
        self.points.keys().copied()
    }

    pub fn insert_disk(&mut self, center: Point, radius: f64) -> Result<Vec<usize>> {
        if !matches!(self.shape, SeparatedShape::Disk) {
            return invalid("disk inserted into a homothet hitter");
        }
        if !(radius > 0.0) {
            return invalid("radius must be positive");
        }
        let pts = self.points.clone();
        self.insert_with(radius, center, &|src| pts.get(&src).is_some_and(|p| disk_contains(center, radius, *p)))
    }

    pub fn insert_homothet(&mut self, scale: f64, b: Point) -> Result<Vec<usize>> {
        let body = match &self.shape {
            SeparatedShape::Homothet(body) => body.clone(),
            SeparatedShape::Disk => return invalid("homothet inserted into a disk hitter"),
        };
        if !(scale > 0.0) {
            return invalid("scale must be positive");
        }
        let pts = self.points.clone();
        self.insert_with(scale, b, &|src| pts.get(&src).is_some_and(|p| body.contains(scale, b, *p)))
    }

    /// Inserts an object given by its scale, reference point and membership
    /// predicate over point sources. Returns the sources newly added.
    pub fn insert_with(&mut self, scale: f64, reference: Point, contains: &dyn Fn(usize) -> bool) -> Result<Vec<usize>> {
        if self.reduction.frame.to_local(reference).y > 0.0 {
            return invalid("reference point lies on the point side of the line");
        }
        let trace: Vec<usize> = self.points.keys().copied().filter(|s| contains(*s)).collect();
        if trace.is_empty() {
            return invalid("object contains no point of this hitter");
        }
        self.stats.inserts += 1;
        if trace.iter().any(|s| self.hits.contains(s)) {
            self.stats.already_hit += 1;
            return Ok(Vec::new());
        }
        let image = self.reduction.map_trace(scale, contains);
        let checked = match (&self.shape, image) {
            (SeparatedShape::Homothet(_), Some(obj)) => {
                if has_lowest_point_property(&obj, self.index.points()) {
                    Some(obj)
                } else {
                    self.stats.property_failures += 1;
                    None
                }
            }
            (_, image) => image,
        };
        if let Some(obj) = checked {
            if let Ok(added) = alg0_insert(&self.index, &mut self.inner, &obj) {
                let new: Vec<usize> = added
                    .iter()
                    .filter_map(|p| self.reduction.pi_inverse(*p))
                    .filter(|s| self.hits.insert(*s))
                    .collect();
                self.order.extend(&new);
                if trace.iter().any(|s| self.hits.contains(s)) {
                    return Ok(new);
                }
                let mut rest = self.fallback(&trace);
                let mut all = new;
                all.append(&mut rest);
                return Ok(all);
            }
        }
        Ok(self.fallback(&trace))
    }

    /// Adds the lowest lattice point of the trace, or its smallest source
    /// when no traced point survived deduplication.
    fn fallback(&mut self, trace: &[usize]) -> Vec<usize> {
        self.stats.fallbacks += 1;
        let lowest: Option<(LatticePoint, usize)> = trace
            .iter()
            .filter_map(|s| self.reduction.pi(*s).map(|p| (p, *s)))
            .min_by_key(|(p, _)| p.lowness_key());
        let src = match lowest {
            Some((p, s)) => {
                self.inner.force_insert(p);
                s
            }
            None => trace[0],
        };
        if self.hits.insert(src) {
            self.order.push(src);
            vec![src]
        } else {
            Vec::new()
        }
    }
}
