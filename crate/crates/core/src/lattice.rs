//! Online hitting set for objects with the lowest-point property on an
//! integer lattice, in particular bottomless rectangles.

use crate::canonical::{span, split_partition, CanonicalInterval, IntInterval};
use crate::error::{invalid, Error, Result, Side};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap};

/// Ordered by `(x, y)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticePoint {
    pub x: u64,
    pub y: u64,
}

impl LatticePoint {
    pub fn new(x: u64, y: u64) -> Self {
        LatticePoint { x, y }
    }

    /// Lower `y` first, then lower `x`.
    pub fn lowness_key(&self) -> (u64, u64) {
        (self.y, self.x)
    }
}

/// `[a, b) x [0, c)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BottomlessRect {
    pub a: u64,
    pub b: u64,
    pub c: u64,
}

impl BottomlessRect {
    pub fn new(a: u64, b: u64, c: u64) -> Result<Self> {
        if a >= b || c == 0 {
            return invalid(format!("degenerate bottomless rectangle ({a}, {b}, {c})"));
        }
        Ok(BottomlessRect { a, b, c })
    }

    pub fn contains(&self, p: LatticePoint) -> bool {
        self.a <= p.x && p.x < self.b && p.y < self.c
    }
}

/// The trace of an object on the lattice point set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LowestPointObject {
    pub members: BTreeSet<LatticePoint>,
}

impl LowestPointObject {
    pub fn new(members: impl IntoIterator<Item = LatticePoint>) -> Result<Self> {
        let members: BTreeSet<_> = members.into_iter().collect();
        if members.is_empty() {
            return invalid("object with an empty trace");
        }
        Ok(LowestPointObject { members })
    }

    pub fn span(&self) -> IntInterval {
        span(self.members.iter().map(|p| p.x)).expect("non-empty")
    }

    pub fn contains(&self, p: &LatticePoint) -> bool {
        self.members.contains(p)
    }
}

/// Point set on `[0, N)^2` with the lowest point of every canonical strip.
#[derive(Clone, Debug)]
pub struct LatticeIndex {
    extent: u64,
    levels: u32,
    points: BTreeSet<LatticePoint>,
    lowest: HashMap<CanonicalInterval, LatticePoint>,
}

impl LatticeIndex {
    /// `n` is rounded up to a power of two; every point must lie in `[0, n)^2`.
    pub fn new(points: impl IntoIterator<Item = LatticePoint>, n: u64) -> Result<Self> {
        if n == 0 {
            return invalid("lattice extent must be positive");
        }
        let extent = n.checked_next_power_of_two().ok_or_else(|| {
            Error::InvalidInput(format!("lattice extent {n} too large"))
        })?;
        let levels = extent.trailing_zeros();
        let points: BTreeSet<LatticePoint> = points.into_iter().collect();
        if let Some(p) = points.iter().find(|p| p.x >= n || p.y >= n) {
            return invalid(format!("point ({}, {}) outside [0, {n})^2", p.x, p.y));
        }
        let mut lowest: HashMap<CanonicalInterval, LatticePoint> = HashMap::new();
        for p in &points {
            for j in 0..=levels {
                let iv = CanonicalInterval::containing(p.x, j);
                match lowest.get(&iv) {
                    Some(cur) if cur.lowness_key() <= p.lowness_key() => {}
                    _ => {
                        lowest.insert(iv, *p);
                    }
                }
            }
        }
        Ok(LatticeIndex { extent, levels, points, lowest })
    }

    pub fn extent(&self) -> u64 {
        self.extent
    }

    pub fn log_extent(&self) -> u32 {
        self.levels
    }

    pub fn points(&self) -> &BTreeSet<LatticePoint> {
        &self.points
    }

    /// `p(I)`: minimum `y`, ties by minimum `x`.
    pub fn lowest(&self, iv: CanonicalInterval) -> Option<LatticePoint> {
        self.lowest.get(&iv).copied()
    }

    /// Trace of a bottomless rectangle, `None` when empty.
    pub fn rect_to_object(&self, r: &BottomlessRect) -> Option<LowestPointObject> {
        let lo = LatticePoint::new(r.a, 0);
        let hi = LatticePoint::new(r.b, 0);
        let members: BTreeSet<_> = self
            .points
            .range(lo..hi)
            .filter(|p| r.contains(**p))
            .copied()
            .collect();
        if members.is_empty() {
            None
        } else {
            Some(LowestPointObject { members })
        }
    }
}

/// One call of the insertion routine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InsertEvent {
    pub triggered: bool,
    pub span: IntInterval,
    pub split: Option<u64>,
    pub chosen: Vec<(CanonicalInterval, LatticePoint)>,
}

#[derive(Clone, Debug, Default)]
pub struct HittingState {
    hits: BTreeSet<LatticePoint>,
    order: Vec<LatticePoint>,
    pub events: Vec<InsertEvent>,
}

impl HittingState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn hits(&self) -> &BTreeSet<LatticePoint> {
        &self.hits
    }

    /// Hits in insertion order.
    pub fn order(&self) -> &[LatticePoint] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn hits_object(&self, obj: &LowestPointObject) -> bool {
        obj.members.iter().any(|p| self.hits.contains(p))
    }

    /// Adds a point outside the regular routine; returns whether it was new.
    pub fn force_insert(&mut self, p: LatticePoint) -> bool {
        if self.hits.insert(p) {
            self.order.push(p);
            true
        } else {
            false
        }
    }
}

/// Inserts an object and returns the newly added points (at most two).
///
/// On either side of the splitting point the canonical intervals are scanned
/// from largest to smallest and the first whose lowest point belongs to the
/// object is used. A side with no such interval means the object does not
/// have the lowest-point property; the state is left untouched in that case.
pub fn alg0_insert(
    index: &LatticeIndex,
    state: &mut HittingState,
    obj: &LowestPointObject,
) -> Result<Vec<LatticePoint>> {
    let sp = obj.span();
    if state.hits_object(obj) {
        state.events.push(InsertEvent { triggered: false, span: sp, split: None, chosen: vec![] });
        return Ok(Vec::new());
    }
    let split = crate::canonical::splitting_point(sp);
    let (left, right) = split_partition(sp);
    let mut chosen = Vec::new();
    for (side, parts) in [(Side::Left, left), (Side::Right, right)] {
        if parts.is_empty() {
            continue;
        }
        let lo = parts.first().expect("non-empty").a();
        let hi = parts.last().expect("non-empty").b();
        let meets = obj.members.iter().any(|p| lo <= p.x && p.x < hi);
        if !meets {
            continue;
        }
        let mut by_size = parts.clone();
        by_size.sort_by(|u, v| v.j.cmp(&u.j));
        let pick = by_size
            .iter()
            .find_map(|iv| index.lowest(*iv).filter(|p| obj.contains(p)).map(|p| (*iv, p)));
        match pick {
            Some(c) => chosen.push(c),
            None => return Err(Error::PropertyViolation { side }),
        }
    }
    let mut added = Vec::new();
    for (_, p) in &chosen {
        if state.force_insert(*p) {
            added.push(*p);
        }
    }
    state.events.push(InsertEvent { triggered: true, span: sp, split, chosen });
    Ok(added)
}

/// Whether every lowest point of `all` in every vertical strip inside the
/// span that meets the object is a member.
pub fn has_lowest_point_property(obj: &LowestPointObject, all: &BTreeSet<LatticePoint>) -> bool {
    let sp = obj.span();
    // Column summaries: minimum y, whether every point at that minimum is a
    // member, whether the column holds a member.
    let mut cols: Vec<(u64, bool, bool)> = Vec::new();
    let mut cur_x = None;
    for p in all.range(LatticePoint::new(sp.a, 0)..LatticePoint::new(sp.b, 0)) {
        let member = obj.contains(p);
        if cur_x != Some(p.x) {
            cols.push((p.y, member, member));
            cur_x = Some(p.x);
        } else {
            let c = cols.last_mut().expect("column");
            // Points within a column arrive in increasing y.
            if p.y == c.0 {
                c.1 &= member;
            }
            c.2 |= member;
        }
    }
    for s in 0..cols.len() {
        let mut min_y = u64::MAX;
        let mut min_ok = true;
        let mut has_member = false;
        for c in &cols[s..] {
            if c.0 < min_y {
                min_y = c.0;
                min_ok = c.1;
            } else if c.0 == min_y {
                min_ok &= c.1;
            }
            has_member |= c.2;
            if has_member && !min_ok {
                return false;
            }
        }
    }
    true
}

/// Quadratic reference version of [`has_lowest_point_property`].
pub fn has_lowest_point_property_naive(obj: &LowestPointObject, all: &BTreeSet<LatticePoint>) -> bool {
    let sp = obj.span();
    for lo in sp.a..sp.b {
        for hi in lo + 1..=sp.b {
            let strip: Vec<&LatticePoint> = all.iter().filter(|p| lo <= p.x && p.x < hi).collect();
            if !strip.iter().any(|p| obj.contains(p)) {
                continue;
            }
            let min_y = strip.iter().map(|p| p.y).min().expect("non-empty");
            if strip.iter().any(|p| p.y == min_y && !obj.contains(p)) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(x: u64, y: u64) -> LatticePoint {
        LatticePoint::new(x, y)
    }

    #[test]
    fn lowest_point_tie_break() {
        let idx = LatticeIndex::new([lp(1, 3), lp(2, 3), lp(3, 5)], 8).unwrap();
        assert_eq!(idx.lowest(CanonicalInterval::new(0, 2)), Some(lp(1, 3)));
        assert_eq!(idx.lowest(CanonicalInterval::new(1, 1)), Some(lp(2, 3)));
        assert_eq!(idx.lowest(CanonicalInterval::new(1, 2)), None);
    }

    #[test]
    fn extent_rounds_up_and_bounds_checked() {
        let idx = LatticeIndex::new([lp(0, 0)], 5).unwrap();
        assert_eq!(idx.extent(), 8);
        assert!(LatticeIndex::new([lp(5, 0)], 5).is_err());
    }

    #[test]
    fn single_point_object() {
        let idx = LatticeIndex::new([lp(4, 2), lp(5, 1)], 8).unwrap();
        let mut st = HittingState::new();
        let obj = LowestPointObject::new([lp(4, 2)]).unwrap();
        let added = alg0_insert(&idx, &mut st, &obj).unwrap();
        assert_eq!(added, vec![lp(4, 2)]);
        assert!(alg0_insert(&idx, &mut st, &obj).unwrap().is_empty());
        assert_eq!(st.events.len(), 2);
        assert!(!st.events[1].triggered);
    }

    #[test]
    fn violation_is_reported_and_state_untouched() {
        // The strip [0, 2) has its lowest point (1, 0) outside the object.
        let idx = LatticeIndex::new([lp(0, 5), lp(1, 0), lp(2, 5)], 8).unwrap();
        let obj = LowestPointObject::new([lp(0, 5), lp(2, 5)]).unwrap();
        assert!(!has_lowest_point_property(&obj, idx.points()));
        let mut st = HittingState::new();
        let err = alg0_insert(&idx, &mut st, &obj).unwrap_err();
        assert!(matches!(err, Error::PropertyViolation { .. }));
        assert!(st.is_empty());
    }

    #[test]
    fn rect_trace() {
        let idx = LatticeIndex::new([lp(1, 1), lp(2, 4), lp(6, 0)], 8).unwrap();
        let r = BottomlessRect::new(0, 3, 3).unwrap();
        let obj = idx.rect_to_object(&r).unwrap();
        assert_eq!(obj.members.iter().copied().collect::<Vec<_>>(), vec![lp(1, 1)]);
        assert!(idx.rect_to_object(&BottomlessRect::new(3, 6, 8).unwrap()).is_none());
    }
}
