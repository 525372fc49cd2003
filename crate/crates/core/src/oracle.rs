//! Offline reference solvers on the point/object incidence structure.

use crate::error::{invalid, Error, Result};
use std::collections::{BTreeMap, BTreeSet, HashMap};

/// Row `i` lists the points contained in object `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncidenceMatrix {
    n_points: usize,
    rows: Vec<Vec<usize>>,
}

impl IncidenceMatrix {
    pub fn new(n_points: usize, rows: Vec<Vec<usize>>) -> Result<Self> {
        let mut out = Vec::with_capacity(rows.len());
        for (i, r) in rows.into_iter().enumerate() {
            let set: BTreeSet<usize> = r.into_iter().collect();
            if set.is_empty() {
                return Err(Error::Unhittable { index: i });
            }
            if let Some(&p) = set.iter().next_back().filter(|&&p| p >= n_points) {
                return invalid(format!("object {i} references point {p} of {n_points}"));
            }
            out.push(set.into_iter().collect());
        }
        Ok(IncidenceMatrix { n_points, rows: out })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }
}

/// Size limits for the exact solver, applied after reductions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_columns: usize,
    pub max_rows: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_columns: 64, max_rows: 512 }
    }
}

/// Index of the first object not hit by `hits`.
pub fn verify_hitting(hits: &[usize], m: &IncidenceMatrix) -> std::result::Result<(), usize> {
    let h: BTreeSet<usize> = hits.iter().copied().collect();
    match m.rows.iter().position(|r| !r.iter().any(|p| h.contains(p))) {
        Some(i) => Err(i),
        None => Ok(()),
    }
}

/// Repeatedly takes the point hitting the most unhit objects, smallest
/// index on ties.
pub fn greedy(m: &IncidenceMatrix) -> Vec<usize> {
    let mut by_point: Vec<Vec<usize>> = vec![Vec::new(); m.n_points];
    for (i, r) in m.rows.iter().enumerate() {
        for &p in r {
            by_point[p].push(i);
        }
    }
    let mut count: Vec<usize> = by_point.iter().map(|v| v.len()).collect();
    let mut hit = vec![false; m.rows.len()];
    let mut left = m.rows.len();
    let mut chosen = Vec::new();
    while left > 0 {
        let (best, _) = count
            .iter()
            .enumerate()
            .fold((0, 0), |acc, (p, &c)| if c > acc.1 { (p, c) } else { acc });
        chosen.push(best);
        for &i in &by_point[best] {
            if !hit[i] {
                hit[i] = true;
                left -= 1;
                for &p in &m.rows[i] {
                    count[p] -= 1;
                }
            }
        }
    }
    chosen.sort_unstable();
    chosen
}

/// Reduced instance: surviving rows as column masks over `columns`.
struct Reduced {
    forced: Vec<usize>,
    columns: Vec<usize>,
    rows: Vec<Vec<usize>>,
}

fn reduce(m: &IncidenceMatrix) -> Reduced {
    let mut rows: Vec<BTreeSet<usize>> = m.rows.iter().map(|r| r.iter().copied().collect()).collect();
    let mut forced: Vec<usize> = Vec::new();
    loop {
        let before = (rows.len(), rows.iter().map(|r| r.len()).sum::<usize>(), forced.len());
        // Unit rows force their point.
        let units: BTreeSet<usize> = rows.iter().filter(|r| r.len() == 1).map(|r| *r.iter().next().expect("unit")).collect();
        if !units.is_empty() {
            forced.extend(units.iter().copied());
            rows.retain(|r| !r.iter().any(|p| units.contains(p)));
        }
        // Duplicate and superset rows are implied by smaller ones.
        rows.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        rows.dedup();
        let mut kept: Vec<BTreeSet<usize>> = Vec::with_capacity(rows.len());
        for r in rows {
            if !kept.iter().any(|k| k.is_subset(&r)) {
                kept.push(r);
            }
        }
        rows = kept;
        // Columns: merge identical incidence, drop dominated ones.
        let mut incid: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        for (i, r) in rows.iter().enumerate() {
            for &p in r {
                incid.entry(p).or_default().insert(i);
            }
        }
        let cols: Vec<(usize, BTreeSet<usize>)> = incid.into_iter().collect();
        let mut drop: BTreeSet<usize> = BTreeSet::new();
        for (a, (pa, sa)) in cols.iter().enumerate() {
            for (b, (pb, sb)) in cols.iter().enumerate() {
                if a == b || drop.contains(pb) {
                    continue;
                }
                let dominated = sa.is_subset(sb) && (sa.len() < sb.len() || pb < pa);
                if dominated {
                    drop.insert(*pa);
                    break;
                }
            }
        }
        if !drop.is_empty() {
            for r in rows.iter_mut() {
                r.retain(|p| !drop.contains(p));
            }
        }
        let after = (rows.len(), rows.iter().map(|r| r.len()).sum::<usize>(), forced.len());
        if after == before {
            break;
        }
    }
    let columns: Vec<usize> = rows.iter().flatten().copied().collect::<BTreeSet<_>>().into_iter().collect();
    forced.sort_unstable();
    forced.dedup();
    Reduced { forced, columns, rows: rows.into_iter().map(|r| r.into_iter().collect()).collect() }
}

struct Search {
    rows: Vec<u64>,
    best: u64,
    best_len: u32,
    nodes: u64,
}

impl Search {
    fn lower_bound(&self, uncovered: &[u64]) -> u32 {
        let mut sorted: Vec<u64> = uncovered.to_vec();
        sorted.sort_by_key(|r| r.count_ones());
        let mut used = 0u64;
        let mut k = 0;
        for r in sorted {
            if r & used == 0 {
                used |= r;
                k += 1;
            }
        }
        k
    }

    fn go(&mut self, chosen: u64, banned: u64) {
        self.nodes += 1;
        let uncovered: Vec<u64> = self.rows.iter().copied().filter(|r| r & chosen == 0).collect();
        if uncovered.is_empty() {
            if chosen.count_ones() < self.best_len {
                self.best_len = chosen.count_ones();
                self.best = chosen;
            }
            return;
        }
        if uncovered.iter().any(|r| r & !banned == 0) {
            return;
        }
        if chosen.count_ones() + self.lower_bound(&uncovered) >= self.best_len {
            return;
        }
        let pivot = *uncovered
            .iter()
            .min_by_key(|r| (**r & !banned).count_ones())
            .expect("non-empty");
        let mut cands: Vec<u32> = (0..64).filter(|c| (pivot & !banned) >> c & 1 == 1).collect();
        cands.sort_by_key(|&c| (std::cmp::Reverse(uncovered.iter().filter(|r| *r >> c & 1 == 1).count()), c));
        let mut ban = banned;
        for c in cands {
            self.go(chosen | 1 << c, ban);
            ban |= 1 << c;
        }
    }
}

/// Minimum hitting set, as sorted point indices.
pub fn exact_opt(m: &IncidenceMatrix, budget: Budget) -> Result<Vec<usize>> {
    let red = reduce(m);
    if red.columns.len() > budget.max_columns.min(64) || red.rows.len() > budget.max_rows {
        return Err(Error::BudgetExceeded(format!(
            "{} columns and {} objects after reduction",
            red.columns.len(),
            red.rows.len()
        )));
    }
    let pos: HashMap<usize, u32> = red.columns.iter().enumerate().map(|(i, &p)| (p, i as u32)).collect();
    let rows: Vec<u64> = red.rows.iter().map(|r| r.iter().fold(0u64, |acc, p| acc | 1 << pos[p])).collect();
    let mut search = Search { rows, best: 0, best_len: u32::MAX, nodes: 0 };
    if !red.rows.is_empty() {
        let sub = IncidenceMatrix {
            n_points: m.n_points,
            rows: red.rows.clone(),
        };
        let g = greedy(&sub);
        search.best = g.iter().fold(0u64, |acc, p| acc | 1 << pos[p]);
        search.best_len = g.len() as u32;
        search.go(0, 0);
    }
    let mut out = red.forced;
    out.extend((0..red.columns.len()).filter(|c| search.best >> c & 1 == 1).map(|c| red.columns[c]));
    out.sort_unstable();
    Ok(out)
}
