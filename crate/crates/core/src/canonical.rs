//! Dyadic (canonical) intervals of the integer line.

use crate::error::{invalid, Result};
use serde::{Deserialize, Serialize};

/// Half-open integer interval `[a, b)` with `a < b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IntInterval {
    pub a: u64,
    pub b: u64,
}

/// `[q 2^j, (q + 1) 2^j)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CanonicalInterval {
    pub q: u64,
    pub j: u32,
}

impl IntInterval {
    pub fn new(a: u64, b: u64) -> Result<Self> {
        if a >= b {
            return invalid(format!("empty interval [{a}, {b})"));
        }
        Ok(IntInterval { a, b })
    }

    pub fn len(&self) -> u64 {
        self.b - self.a
    }

    pub fn is_empty(&self) -> bool {
        self.a >= self.b
    }

    pub fn contains(&self, x: u64) -> bool {
        self.a <= x && x < self.b
    }

    pub fn as_canonical(&self) -> Option<CanonicalInterval> {
        if is_canonical(*self) {
            let j = self.len().trailing_zeros();
            Some(CanonicalInterval { q: self.a >> j, j })
        } else {
            None
        }
    }
}

impl CanonicalInterval {
    pub fn new(q: u64, j: u32) -> Self {
        CanonicalInterval { q, j }
    }

    pub fn a(&self) -> u64 {
        self.q << self.j
    }

    pub fn b(&self) -> u64 {
        (self.q + 1) << self.j
    }

    pub fn len(&self) -> u64 {
        1 << self.j
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn interval(&self) -> IntInterval {
        IntInterval { a: self.a(), b: self.b() }
    }

    pub fn contains(&self, x: u64) -> bool {
        x >> self.j == self.q
    }

    /// The canonical interval of the same size immediately to the left.
    pub fn left_neighbor(&self) -> Option<Self> {
        self.q.checked_sub(1).map(|q| CanonicalInterval { q, j: self.j })
    }

    pub fn right_neighbor(&self) -> Self {
        CanonicalInterval { q: self.q + 1, j: self.j }
    }

    /// The canonical interval of size `2^j` containing `x`.
    pub fn containing(x: u64, j: u32) -> Self {
        CanonicalInterval { q: x >> j, j }
    }
}

pub fn is_canonical(iv: IntInterval) -> bool {
    let len = iv.len();
    len.is_power_of_two() && iv.a % len == 0
}

/// The unique multiple of the largest power of two strictly inside `(a, b)`;
/// `None` for canonical intervals.
pub fn splitting_point(iv: IntInterval) -> Option<u64> {
    if is_canonical(iv) {
        return None;
    }
    let x = iv.a + 1;
    let y = iv.b - 1;
    if x == y {
        return Some(x);
    }
    let h = 63 - (x ^ y).leading_zeros();
    let s = y & !((1u64 << h) - 1);
    if x.trailing_zeros() > h {
        Some(x)
    } else {
        Some(s)
    }
}

/// Minimal decomposition into canonical intervals, left to right.
pub fn canonical_partition(iv: IntInterval) -> Vec<CanonicalInterval> {
    let (mut left, right) = split_partition(iv);
    left.extend(right);
    left
}

/// The two halves `A` and `B` of the canonical partition.
///
/// For a canonical interval `A` is empty and `B` holds the interval itself.
/// Otherwise `A` covers `[a, s)` and `B` covers `[s, b)` for the splitting
/// point `s`; both are listed left to right.
pub fn split_partition(iv: IntInterval) -> (Vec<CanonicalInterval>, Vec<CanonicalInterval>) {
    match splitting_point(iv) {
        None => (Vec::new(), vec![iv.as_canonical().expect("canonical")]),
        Some(s) => (suffix_blocks(iv.a, s), prefix_blocks(s, iv.b)),
    }
}

/// Partition of `[a, s)` where `s` is a multiple of every block size used.
fn suffix_blocks(a: u64, s: u64) -> Vec<CanonicalInterval> {
    let mut out = Vec::new();
    let mut x = a;
    while x < s {
        let mut j = if x == 0 { 63 } else { x.trailing_zeros() };
        while (1u64 << j) > s - x {
            j -= 1;
        }
        out.push(CanonicalInterval::containing(x, j));
        x += 1 << j;
    }
    out
}

/// Partition of `[s, b)` with `s` aligned to a block larger than `b - s`.
fn prefix_blocks(s: u64, b: u64) -> Vec<CanonicalInterval> {
    let mut out = Vec::new();
    let mut x = s;
    while x < b {
        let j = 63 - (b - x).leading_zeros();
        out.push(CanonicalInterval::containing(x, j));
        x += 1 << j;
    }
    out
}

/// `[min xs, max xs + 1)`.
pub fn span(xs: impl IntoIterator<Item = u64>) -> Result<IntInterval> {
    let mut lo = u64::MAX;
    let mut hi = 0;
    let mut any = false;
    for x in xs {
        lo = lo.min(x);
        hi = hi.max(x);
        any = true;
    }
    if !any {
        return invalid("span of an empty set");
    }
    IntInterval::new(lo, hi + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(a: u64, b: u64) -> IntInterval {
        IntInterval::new(a, b).unwrap()
    }

    fn brute_split(a: u64, b: u64) -> Option<u64> {
        if is_canonical(iv(a, b)) {
            return None;
        }
        (a + 1..b).max_by_key(|&x| (x.trailing_zeros(), std::cmp::Reverse(x)))
    }

    #[test]
    fn five_to_eleven() {
        assert_eq!(splitting_point(iv(5, 11)), Some(8));
        let parts: Vec<(u64, u64)> = canonical_partition(iv(5, 11))
            .iter()
            .map(|c| (c.a(), c.b()))
            .collect();
        assert_eq!(parts, vec![(5, 6), (6, 8), (8, 10), (10, 11)]);
    }

    #[test]
    fn canonical_examples() {
        assert!(is_canonical(iv(0, 8)));
        assert!(is_canonical(iv(12, 16)));
        assert!(!is_canonical(iv(4, 12)));
        assert_eq!(splitting_point(iv(0, 8)), None);
        let (a, b) = split_partition(iv(8, 16));
        assert!(a.is_empty());
        assert_eq!(b, vec![CanonicalInterval::new(1, 3)]);
    }

    #[test]
    fn exhaustive_against_brute_force() {
        for a in 0..256u64 {
            for b in a + 1..=256 {
                let i = iv(a, b);
                assert_eq!(splitting_point(i), brute_split(a, b), "[{a},{b})");
                let (left, right) = split_partition(i);
                let all: Vec<_> = left.iter().chain(right.iter()).collect();
                let mut x = a;
                for c in &all {
                    assert_eq!(c.a(), x);
                    x = c.b();
                }
                assert_eq!(x, b);
                if let Some(s) = splitting_point(i) {
                    assert!(left.iter().all(|c| c.b() <= s));
                    assert!(right.iter().all(|c| c.a() >= s));
                }
                assert!(left.len() <= 8 && right.len() <= 8);
                // Sizes strictly decrease away from the split.
                assert!(left.windows(2).all(|w| w[0].j < w[1].j));
                assert!(right.windows(2).all(|w| w[0].j > w[1].j));
            }
        }
    }

    #[test]
    fn neighbors_and_span() {
        let c = CanonicalInterval::new(0, 2);
        assert_eq!(c.left_neighbor(), None);
        assert_eq!(c.right_neighbor().interval(), iv(4, 8));
        assert_eq!(span([3, 9, 5]).unwrap(), iv(3, 10));
        assert!(span(std::iter::empty()).is_err());
        assert!(IntInterval::new(4, 4).is_err());
    }
}
