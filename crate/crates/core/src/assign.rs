//! Cluster-to-class assignment and clustering accuracy.
//!
//! The linear assignment solver is the shortest-augmenting-path method
//! (Jonker–Volgenant style, as in Crouse's rectangular formulation): rows
//! are inserted one at a time, each by a Dijkstra search over reduced costs
//! maintained through dual potentials `u` (rows) and `v` (columns).

use crate::error::{Error, Result};
use crate::partition::{ClassMap, ContingencyTable};

/// Optimal one-to-one matching of `min(R, C)` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct Matching {
    /// `row_to_col[i]` is the column matched to row `i`, if any.
    pub row_to_col: Vec<Option<usize>>,
    pub total_cost: f64,
}

/// Minimum-cost assignment on a dense `rows × cols` cost matrix (row-major).
pub fn hungarian(cost: &[f64], rows: usize, cols: usize) -> Result<Matching> {
    if rows == 0 || cols == 0 {
        return Err(Error::input("cost matrix must be at least 1x1"));
    }
    if cost.len() != rows * cols {
        return Err(Error::input(format!("cost has {} entries, expected {rows}x{cols}", cost.len())));
    }
    if cost.iter().any(|c| c.is_nan()) {
        return Err(Error::Numeric("NaN in assignment cost matrix".into()));
    }
    if cost.iter().any(|c| c.is_infinite()) {
        return Err(Error::Numeric("infinite assignment cost".into()));
    }

    // Work on a wide matrix (rows ≤ cols), shifted so all costs are ≥ 0.
    let transposed = rows > cols;
    let (nr, nc) = if transposed { (cols, rows) } else { (rows, cols) };
    let min = cost.iter().copied().fold(f64::INFINITY, f64::min);
    let mut c = vec![0.0; nr * nc];
    for i in 0..rows {
        for j in 0..cols {
            let v = cost[i * cols + j] - min;
            if transposed {
                c[j * nc + i] = v;
            } else {
                c[i * nc + j] = v;
            }
        }
    }

    let col4row = solve_wide(&c, nr, nc)?;

    let mut row_to_col = vec![None; rows];
    if transposed {
        for (j, &i) in col4row.iter().enumerate() {
            row_to_col[i] = Some(j);
        }
    } else {
        for (i, &j) in col4row.iter().enumerate() {
            row_to_col[i] = Some(j);
        }
    }
    let total_cost = row_to_col
        .iter()
        .enumerate()
        .filter_map(|(i, j)| j.map(|j| cost[i * cols + j]))
        .sum();
    Ok(Matching { row_to_col, total_cost })
}

/// Assigns every row of a wide (`nr ≤ nc`) non-negative cost matrix.
fn solve_wide(cost: &[f64], nr: usize, nc: usize) -> Result<Vec<usize>> {
    const NONE: usize = usize::MAX;
    let mut u = vec![0.0f64; nr];
    let mut v = vec![0.0f64; nc];
    let mut shortest = vec![f64::INFINITY; nc];
    let mut path = vec![NONE; nc];
    let mut col4row = vec![NONE; nr];
    let mut row4col = vec![NONE; nc];
    let mut sr = vec![false; nr];
    let mut sc = vec![false; nc];
    let mut remaining = vec![0usize; nc];

    for cur_row in 0..nr {
        // Dijkstra from `cur_row` until an unassigned column is reached.
        let mut min_val = 0.0;
        let mut num_remaining = nc;
        // Reverse fill so a constant matrix yields the identity matching.
        for (it, slot) in remaining.iter_mut().enumerate() {
            *slot = nc - it - 1;
        }
        sr.fill(false);
        sc.fill(false);
        shortest.fill(f64::INFINITY);

        let mut sink = NONE;
        let mut i = cur_row;
        while sink == NONE {
            let mut index = NONE;
            let mut lowest = f64::INFINITY;
            sr[i] = true;
            for it in 0..num_remaining {
                let j = remaining[it];
                let r = min_val + cost[i * nc + j] - u[i] - v[j];
                if r < shortest[j] {
                    path[j] = i;
                    shortest[j] = r;
                }
                if shortest[j] < lowest || (shortest[j] == lowest && row4col[j] == NONE) {
                    lowest = shortest[j];
                    index = it;
                }
            }
            min_val = lowest;
            if !min_val.is_finite() || index == NONE {
                return Err(Error::Numeric("assignment problem is infeasible".into()));
            }
            let j = remaining[index];
            if row4col[j] == NONE {
                sink = j;
            } else {
                i = row4col[j];
            }
            sc[j] = true;
            num_remaining -= 1;
            remaining[index] = remaining[num_remaining];
        }

        // Dual update.
        u[cur_row] += min_val;
        for r in 0..nr {
            if sr[r] && r != cur_row {
                u[r] += min_val - shortest[col4row[r]];
            }
        }
        for j in 0..nc {
            if sc[j] {
                v[j] -= min_val - shortest[j];
            }
        }

        // Augment along the alternating path.
        let mut j = sink;
        loop {
            let r = path[j];
            row4col[j] = r;
            std::mem::swap(&mut col4row[r], &mut j);
            if r == cur_row {
                break;
            }
        }
    }
    Ok(col4row)
}

fn negated_counts(table: &ContingencyTable) -> Vec<f64> {
    table.counts().iter().map(|&c| -(c as f64)).collect()
}

fn matched(table: &ContingencyTable, map: &[usize]) -> u64 {
    map.iter().enumerate().map(|(i, &j)| table.get(i, j)).sum()
}

/// One-to-one cluster→class map maximizing the matched count (R = C).
pub fn optimal_class_map(table: &ContingencyTable) -> Result<(ClassMap, u64)> {
    if table.n_rows() != table.n_cols() {
        return Err(Error::input(format!(
            "optimal_class_map needs a square table, got {}x{}; use overcluster_map or undercluster_map",
            table.n_rows(),
            table.n_cols()
        )));
    }
    let m = hungarian(&negated_counts(table), table.n_rows(), table.n_cols())?;
    let map: Vec<usize> = m.row_to_col.into_iter().map(|j| j.expect("square matching is perfect")).collect();
    let count = matched(table, &map);
    Ok((ClassMap::new(map, table.n_cols())?, count))
}

/// Overclustering map (R ≥ C): first one cluster per class by optimal
/// assignment, then every leftover cluster to its majority class (lowest
/// class index on ties).
pub fn overcluster_map(table: &ContingencyTable) -> Result<(ClassMap, u64)> {
    let (r, c) = (table.n_rows(), table.n_cols());
    if r < c {
        return Err(Error::input(format!(
            "overcluster_map needs at least as many clusters as classes, got {r} < {c}"
        )));
    }
    let m = hungarian(&negated_counts(table), r, c)?;
    let map: Vec<usize> = m
        .row_to_col
        .iter()
        .enumerate()
        .map(|(i, j)| j.unwrap_or_else(|| argmax_first(table.row(i))))
        .collect();
    let count = matched(table, &map);
    Ok((ClassMap::new(map, c)?, count))
}

/// Underclustering map (R < C): optimal injective cluster→class map; some
/// classes stay unmatched.
pub fn undercluster_map(table: &ContingencyTable) -> Result<(ClassMap, u64)> {
    let (r, c) = (table.n_rows(), table.n_cols());
    if r >= c {
        return Err(Error::input(format!("undercluster_map needs fewer clusters than classes, got {r} >= {c}")));
    }
    let m = hungarian(&negated_counts(table), r, c)?;
    let map: Vec<usize> = m.row_to_col.into_iter().map(|j| j.expect("every row matched when R < C")).collect();
    let count = matched(table, &map);
    Ok((ClassMap::new(map, c)?, count))
}

/// Dispatches on table shape: square, overclustered, or underclustered.
pub fn best_class_map(table: &ContingencyTable) -> Result<(ClassMap, u64)> {
    use std::cmp::Ordering::*;
    match table.n_rows().cmp(&table.n_cols()) {
        Equal => optimal_class_map(table),
        Greater => overcluster_map(table),
        Less => undercluster_map(table),
    }
}

fn argmax_first(row: &[u64]) -> usize {
    let mut best = 0;
    for (j, &v) in row.iter().enumerate() {
        if v > row[best] {
            best = j;
        }
    }
    best
}

/// Fraction of instances whose cluster maps to their class.
pub fn accuracy(table: &ContingencyTable, map: &ClassMap) -> Result<f64> {
    if map.n_clusters() != table.n_rows() {
        return Err(Error::input(format!(
            "class map covers {} clusters, table has {}",
            map.n_clusters(),
            table.n_rows()
        )));
    }
    if let Some(&bad) = map.assignment().iter().find(|&&j| j >= table.n_cols()) {
        return Err(Error::input(format!("class map entry {bad} out of range for {} classes", table.n_cols())));
    }
    if table.total() == 0 {
        return Err(Error::input("accuracy of an empty table"));
    }
    Ok(matched(table, map.assignment()) as f64 / table.total() as f64)
}
