//! Partitions of a sample set, their joint counts, and cluster-to-class maps.
//!
//! Every metric and assignment routine in this crate works from a
//! [`ContingencyTable`]: rows are predicted clusters, columns are reference
//! classes, and cell `(i, j)` counts the instances carrying both labels.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Dense integer labelling of `N > 0` instances into `n_groups` groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    labels: Vec<usize>,
    n_groups: usize,
}

impl Partition {
    /// Builds a partition with `n_groups = max label + 1`.
    pub fn new(labels: Vec<usize>) -> Result<Self> {
        let n_groups = labels.iter().max().map_or(0, |&m| m + 1);
        Self::with_groups(labels, n_groups)
    }

    /// Builds a partition with an explicit group count, which may exceed the
    /// largest label present (empty clusters are legal).
    pub fn with_groups(labels: Vec<usize>, n_groups: usize) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::input("partition must contain at least one instance"));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= n_groups) {
            return Err(Error::input(format!("label {bad} out of range for {n_groups} groups")));
        }
        Ok(Self { labels, n_groups })
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_groups(&self) -> usize {
        self.n_groups
    }

    /// `|U_i|` for every group `i`.
    pub fn group_sizes(&self) -> Vec<u64> {
        let mut sizes = vec![0u64; self.n_groups];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    /// Applies `mapping[old] = new` to every label. The result has
    /// `max(mapping) + 1` groups.
    pub fn relabel(&self, mapping: &[usize]) -> Result<Partition> {
        if mapping.len() < self.n_groups {
            return Err(Error::input(format!(
                "relabel mapping covers {} groups, partition has {}",
                mapping.len(),
                self.n_groups
            )));
        }
        let n_groups = mapping.iter().max().map_or(0, |&m| m + 1);
        Partition::with_groups(self.labels.iter().map(|&l| mapping[l]).collect(), n_groups)
    }

    pub fn into_labels(self) -> Vec<usize> {
        self.labels
    }
}

/// Sorted dictionary from dense indices back to the original label values.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LabelDictionary {
    originals: Vec<i64>,
}

impl LabelDictionary {
    pub fn originals(&self) -> &[i64] {
        &self.originals
    }

    pub fn len(&self) -> usize {
        self.originals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.originals.is_empty()
    }

    pub fn dense_index(&self, original: i64) -> Option<usize> {
        self.originals.binary_search(&original).ok()
    }

    pub fn original(&self, dense: usize) -> Option<i64> {
        self.originals.get(dense).copied()
    }
}

/// Re-indexes arbitrary integer labels densely: the smallest original value
/// becomes 0, the next 1, and so on.
pub fn densify(raw: &[i64]) -> Result<(Partition, LabelDictionary)> {
    if raw.is_empty() {
        return Err(Error::input("label vector is empty"));
    }
    let originals: Vec<i64> = raw.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let dict = LabelDictionary { originals };
    let labels = raw
        .iter()
        .map(|&v| dict.dense_index(v).expect("value is in its own dictionary"))
        .collect();
    Ok((Partition::with_groups(labels, dict.len())?, dict))
}

/// R×C co-occurrence counts between a predicted and a reference partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    counts: Vec<u64>,
    n_rows: usize,
    n_cols: usize,
    row_marginals: Vec<u64>,
    col_marginals: Vec<u64>,
    total: u64,
}

impl ContingencyTable {
    /// Builds a table from explicit row-major counts.
    pub fn from_rows(rows: &[Vec<u64>]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if n_rows == 0 || n_cols == 0 {
            return Err(Error::input("contingency table must be at least 1x1"));
        }
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::input("ragged contingency table rows"));
        }
        let counts = rows.iter().flatten().copied().collect();
        Ok(Self::from_flat(counts, n_rows, n_cols))
    }

    fn from_flat(counts: Vec<u64>, n_rows: usize, n_cols: usize) -> Self {
        let mut row_marginals = vec![0u64; n_rows];
        let mut col_marginals = vec![0u64; n_cols];
        for i in 0..n_rows {
            for j in 0..n_cols {
                let c = counts[i * n_cols + j];
                row_marginals[i] += c;
                col_marginals[j] += c;
            }
        }
        let total = row_marginals.iter().sum();
        Self { counts, n_rows, n_cols, row_marginals, col_marginals, total }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.counts[i * self.n_cols + j]
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.counts[i * self.n_cols..(i + 1) * self.n_cols]
    }

    /// Row-major cell counts.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Cluster sizes `a_i`.
    pub fn row_marginals(&self) -> &[u64] {
        &self.row_marginals
    }

    /// Class sizes `b_j`.
    pub fn col_marginals(&self) -> &[u64] {
        &self.col_marginals
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        (0..self.n_rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> ContingencyTable {
        let mut counts = vec![0u64; self.counts.len()];
        for i in 0..self.n_rows {
            for j in 0..self.n_cols {
                counts[j * self.n_rows + i] = self.get(i, j);
            }
        }
        Self::from_flat(counts, self.n_cols, self.n_rows)
    }

    /// Drops all-zero rows and columns. Every metric in [`crate::metrics`] is
    /// unchanged by this.
    pub fn compact(&self) -> ContingencyTable {
        let rows: Vec<usize> = (0..self.n_rows).filter(|&i| self.row_marginals[i] > 0).collect();
        let cols: Vec<usize> = (0..self.n_cols).filter(|&j| self.col_marginals[j] > 0).collect();
        let mut counts = Vec::with_capacity(rows.len() * cols.len());
        for &i in &rows {
            counts.extend(cols.iter().map(|&j| self.get(i, j)));
        }
        Self::from_flat(counts, rows.len(), cols.len())
    }
}

const SHARD: usize = 1 << 16;

/// Tabulates `counts[i][j] = #{n : pred[n] = i, truth[n] = j}`.
///
/// Shards are summed with integer addition, so the result does not depend
/// on how the work was split.
pub fn build_contingency(pred: &Partition, truth: &Partition) -> Result<ContingencyTable> {
    if pred.len() != truth.len() {
        return Err(Error::input(format!(
            "partition lengths differ: predicted {} vs reference {}",
            pred.len(),
            truth.len()
        )));
    }
    let (r, c) = (pred.n_groups(), truth.n_groups());
    let tabulate = |p: &[usize], t: &[usize]| {
        let mut counts = vec![0u64; r * c];
        for (&i, &j) in p.iter().zip(t) {
            counts[i * c + j] += 1;
        }
        counts
    };
    let counts = if pred.len() <= SHARD {
        tabulate(pred.labels(), truth.labels())
    } else {
        pred.labels()
            .par_chunks(SHARD)
            .zip(truth.labels().par_chunks(SHARD))
            .map(|(p, t)| tabulate(p, t))
            .reduce(
                || vec![0u64; r * c],
                |mut acc, part| {
                    acc.iter_mut().zip(part).for_each(|(a, b)| *a += b);
                    acc
                },
            )
    };
    Ok(ContingencyTable::from_flat(counts, r, c))
}

/// Keeps only the instances whose reference class is in `keep`.
///
/// Reference classes are re-indexed densely in ascending order of their old
/// index; predicted labels and the predicted group count are preserved.
pub fn restrict_to_classes(
    pred: &Partition,
    truth: &Partition,
    keep: &BTreeSet<usize>,
) -> Result<(Partition, Partition)> {
    if pred.len() != truth.len() {
        return Err(Error::input("partition lengths differ"));
    }
    if keep.is_empty() {
        return Err(Error::input("class keep-set is empty"));
    }
    if let Some(&bad) = keep.iter().find(|&&k| k >= truth.n_groups()) {
        return Err(Error::input(format!(
            "keep-set class {bad} out of range for {} classes",
            truth.n_groups()
        )));
    }
    let new_index: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(n, &o)| (o, n)).collect();
    let (mut p, mut t) = (Vec::new(), Vec::new());
    for (&pl, &tl) in pred.labels().iter().zip(truth.labels()) {
        if let Some(&nl) = new_index.get(&tl) {
            p.push(pl);
            t.push(nl);
        }
    }
    if t.is_empty() {
        return Err(Error::input("no instances left after restricting to the keep-set"));
    }
    Ok((Partition::with_groups(p, pred.n_groups())?, Partition::with_groups(t, keep.len())?))
}

/// Merged class groups built from `(eval_class, target_class)` pairs.
///
/// Pairs are edges of a bipartite graph between evaluation-set classes and
/// target (training-set) classes; every connected component becomes one
/// merged class. Both "several eval classes share one target" and "one eval
/// class spans several targets" collapse to a single index this way.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassGroups {
    eval: BTreeMap<i64, usize>,
    target: BTreeMap<i64, usize>,
    n_groups: usize,
}

impl ClassGroups {
    pub fn from_pairs(pairs: &[(i64, i64)]) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::input("class table has no rows"));
        }
        let evals: Vec<i64> = pairs.iter().map(|p| p.0).collect::<BTreeSet<_>>().into_iter().collect();
        let targets: Vec<i64> = pairs.iter().map(|p| p.1).collect::<BTreeSet<_>>().into_iter().collect();
        let n_e = evals.len();
        let mut parent: Vec<usize> = (0..n_e + targets.len()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for &(e, t) in pairs {
            let a = evals.binary_search(&e).unwrap();
            let b = n_e + targets.binary_search(&t).unwrap();
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
        // Components are numbered by their smallest eval class value.
        let mut root_index = BTreeMap::new();
        let mut eval = BTreeMap::new();
        for (n, &e) in evals.iter().enumerate() {
            let root = find(&mut parent, n);
            let next = root_index.len();
            let g = *root_index.entry(root).or_insert(next);
            eval.insert(e, g);
        }
        let mut target = BTreeMap::new();
        for (n, &t) in targets.iter().enumerate() {
            let root = find(&mut parent, n_e + n);
            target.insert(t, root_index[&root]);
        }
        Ok(Self { eval, target, n_groups: root_index.len() })
    }

    pub fn n_groups(&self) -> usize {
        self.n_groups
    }

    pub fn eval_group(&self, class: i64) -> Option<usize> {
        self.eval.get(&class).copied()
    }

    pub fn target_group(&self, class: i64) -> Option<usize> {
        self.target.get(&class).copied()
    }
}

/// Total map from cluster index to class index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassMap {
    assignment: Vec<usize>,
    n_classes: usize,
}

impl ClassMap {
    pub fn new(assignment: Vec<usize>, n_classes: usize) -> Result<Self> {
        if let Some(&bad) = assignment.iter().find(|&&c| c >= n_classes) {
            return Err(Error::input(format!("class {bad} out of range for {n_classes} classes")));
        }
        Ok(Self { assignment, n_classes })
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn n_clusters(&self) -> usize {
        self.assignment.len()
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn class_of(&self, cluster: usize) -> usize {
        self.assignment[cluster]
    }

    /// True when every class receives at least one cluster.
    pub fn covers_all_classes(&self) -> bool {
        let mut seen = vec![false; self.n_classes];
        self.assignment.iter().for_each(|&c| seen[c] = true);
        seen.into_iter().all(|s| s)
    }
}
