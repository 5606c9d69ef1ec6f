//! Mini-batch k-means with per-center `1/count` learning rates.
//!
//! Training is reproducible bit-for-bit from `(data, k, epochs, batch size,
//! seed)`: shuffles come from seed-derived ChaCha streams, nearest-center
//! search is data-parallel but gathered in point order, and center updates
//! are applied sequentially.

use std::cmp::Ordering;
use std::cmp::Reverse;
use std::collections::BinaryHeap;

use ndarray::{Array2, ArrayView1, ArrayView2, Axis};
use rand::seq::index::sample as sample_indices;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::partition::Partition;

pub const DEFAULT_BATCH_SIZE: usize = 1024;
pub const DEFAULT_EPOCHS: usize = 60;

/// Rows per parallel work item in the assignment step.
const ASSIGN_BLOCK: usize = 64;

/// Cluster centers plus the per-center counts driving the learning rate.
#[derive(Debug, Clone, PartialEq)]
pub struct KMeansModel {
    centers: Array2<f64>,
    per_center_counts: Vec<u64>,
    rng_seed: u64,
    epochs_trained: usize,
    batch_size: usize,
}

/// Nearest-center labels and squared distances for a batch.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub labels: Vec<usize>,
    pub sq_distances: Vec<f64>,
}

impl KMeansModel {
    /// A model with the given initial centers and zero counts.
    pub fn from_centers(centers: Array2<f64>, rng_seed: u64) -> Result<Self> {
        Self::from_parts(centers, None, rng_seed, 0, DEFAULT_BATCH_SIZE)
    }

    pub fn from_parts(
        centers: Array2<f64>,
        per_center_counts: Option<Vec<u64>>,
        rng_seed: u64,
        epochs_trained: usize,
        batch_size: usize,
    ) -> Result<Self> {
        if centers.nrows() == 0 || centers.ncols() == 0 {
            return Err(Error::input("k-means needs at least one non-empty center"));
        }
        if centers.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric("non-finite cluster center".into()));
        }
        let counts = per_center_counts.unwrap_or_else(|| vec![0; centers.nrows()]);
        if counts.len() != centers.nrows() {
            return Err(Error::input(format!(
                "{} per-center counts for {} centers",
                counts.len(),
                centers.nrows()
            )));
        }
        Ok(Self { centers, per_center_counts: counts, rng_seed, epochs_trained, batch_size })
    }

    pub fn k(&self) -> usize {
        self.centers.nrows()
    }

    pub fn dim(&self) -> usize {
        self.centers.ncols()
    }

    pub fn centers(&self) -> &Array2<f64> {
        &self.centers
    }

    pub fn per_center_counts(&self) -> &[u64] {
        &self.per_center_counts
    }

    pub fn rng_seed(&self) -> u64 {
        self.rng_seed
    }

    pub fn epochs_trained(&self) -> usize {
        self.epochs_trained
    }

    pub fn batch_size(&self) -> usize {
        self.batch_size
    }

    /// One mini-batch update: assign every point, then for each point `x`
    /// (in order) with center `c`: `count[c] += 1`, `η = 1/count[c]`,
    /// `c ← (1 − η)·c + η·x`.
    pub fn minibatch_step(&mut self, batch: ArrayView2<f64>) -> Result<Assignment> {
        if batch.nrows() == 0 {
            return Err(Error::input("empty mini-batch"));
        }
        let assignment = assign_points(self.centers.view(), batch)?;
        for (x, &c) in batch.outer_iter().zip(&assignment.labels) {
            self.per_center_counts[c] += 1;
            let eta = 1.0 / self.per_center_counts[c] as f64;
            let mut center = self.centers.row_mut(c);
            center.zip_mut_with(&x, |m, &v| *m = (1.0 - eta) * *m + eta * v);
        }
        Ok(assignment)
    }

    /// Runs `epochs` further passes over `data`, continuing the shuffle
    /// streams after the epochs already trained.
    ///
    /// Each epoch visits a seed-derived permutation of the rows in batches of
    /// [`KMeansModel::batch_size`]. Afterwards, centers that received no
    /// points that epoch are moved onto the epoch's worst-fit points (largest
    /// squared distance at assignment time), worst first.
    pub fn train_epochs(&mut self, data: ArrayView2<f64>, epochs: usize) -> Result<()> {
        let (n, k) = (data.nrows(), self.k());
        if data.ncols() != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: data.ncols() });
        }
        if n == 0 || self.batch_size == 0 {
            return Err(Error::input("k-means training needs data and a positive batch size"));
        }
        let mut order: Vec<usize> = (0..n).collect();
        for _ in 0..epochs {
            let mut rng = stream(self.rng_seed, self.epochs_trained as u64 + 1);
            order.sort_unstable();
            order.shuffle(&mut rng);
            let mut hits = vec![0u64; k];
            let mut worst: BinaryHeap<Reverse<Offender>> = BinaryHeap::with_capacity(k + 1);
            for idx in order.chunks(self.batch_size) {
                let batch = data.select(Axis(0), idx);
                let a = self.minibatch_step(batch.view())?;
                for ((&row, &label), &dist) in idx.iter().zip(&a.labels).zip(&a.sq_distances) {
                    hits[label] += 1;
                    worst.push(Reverse(Offender(dist, row)));
                    if worst.len() > k {
                        worst.pop();
                    }
                }
            }
            let empty: Vec<usize> = (0..k).filter(|&c| hits[c] == 0).collect();
            if !empty.is_empty() {
                let mut candidates: Vec<Offender> = worst.into_iter().map(|r| r.0).collect();
                candidates.sort_by(|a, b| b.cmp(a));
                for (&c, cand) in empty.iter().zip(candidates) {
                    self.centers.row_mut(c).assign(&data.row(cand.1));
                }
            }
            self.epochs_trained += 1;
        }
        Ok(())
    }

    /// Nearest-center labels as a partition with `k` groups.
    pub fn predict(&self, batch: ArrayView2<f64>) -> Result<Partition> {
        let a = assign_points(self.centers.view(), batch)?;
        Partition::with_groups(a.labels, self.k())
    }

    /// Sum of squared distances from every row to its nearest center.
    pub fn inertia(&self, data: ArrayView2<f64>) -> Result<f64> {
        let a = assign_points(self.centers.view(), data)?;
        // Sequential sum in point order keeps the value thread-count independent.
        Ok(a.sq_distances.iter().sum())
    }
}

#[inline]
fn sq_dist(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[inline]
fn nearest(centers: ArrayView2<f64>, x: ArrayView1<f64>) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, center) in centers.outer_iter().enumerate() {
        let d = sq_dist(x, center);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

/// Labels each row with its nearest center in squared Euclidean distance;
/// ties go to the lowest center index.
pub fn assign_points(centers: ArrayView2<f64>, batch: ArrayView2<f64>) -> Result<Assignment> {
    if batch.ncols() != centers.ncols() {
        return Err(Error::Dimension { expected: centers.ncols(), got: batch.ncols() });
    }
    if centers.nrows() == 0 {
        return Err(Error::input("no centers to assign to"));
    }
    let pairs: Vec<(usize, f64)> = if batch.nrows() <= ASSIGN_BLOCK {
        batch.outer_iter().map(|x| nearest(centers, x)).collect()
    } else {
        let n = batch.nrows();
        let blocks: Vec<Vec<(usize, f64)>> = (0..n.div_ceil(ASSIGN_BLOCK))
            .into_par_iter()
            .map(|b| {
                let rows = b * ASSIGN_BLOCK..((b + 1) * ASSIGN_BLOCK).min(n);
                batch.slice(ndarray::s![rows, ..]).outer_iter().map(|x| nearest(centers, x)).collect()
            })
            .collect();
        blocks.into_iter().flatten().collect()
    };
    if pairs.iter().any(|p| !p.1.is_finite()) {
        return Err(Error::Numeric("non-finite distance during assignment".into()));
    }
    let (labels, sq_distances) = pairs.into_iter().unzip();
    Ok(Assignment { labels, sq_distances })
}

/// k-means++ seeding: the first center uniformly, each further center with
/// probability proportional to its squared distance to the nearest chosen
/// center. Returns `k` rows with distinct sample indices.
pub fn kmeanspp_init<R: Rng + ?Sized>(sample: ArrayView2<f64>, k: usize, rng: &mut R) -> Result<Array2<f64>> {
    kmeanspp_init_greedy(sample, k, 1, rng)
}

/// k-means++ drawing `trials` D²-weighted candidates per step and keeping the
/// one that lowers the total potential most (lowest index on ties).
/// `trials = 1` is plain k-means++.
pub fn kmeanspp_init_greedy<R: Rng + ?Sized>(
    sample: ArrayView2<f64>,
    k: usize,
    trials: usize,
    rng: &mut R,
) -> Result<Array2<f64>> {
    let m = sample.nrows();
    if k == 0 {
        return Err(Error::Usage("k must be at least 1".into()));
    }
    if m < k {
        return Err(Error::input(format!("k-means++ needs at least k={k} sample rows, got {m}")));
    }
    let trials = trials.max(1);
    let mut chosen = Vec::with_capacity(k);
    let mut taken = vec![false; m];
    let first = rng.random_range(0..m);
    chosen.push(first);
    taken[first] = true;
    let mut closest: Vec<f64> = sample.outer_iter().map(|x| sq_dist(x, sample.row(first))).collect();

    while chosen.len() < k {
        let potential: f64 = closest.iter().sum();
        let next = if potential > 0.0 {
            let cumulative: Vec<f64> = closest
                .iter()
                .scan(0.0, |acc, &d| {
                    *acc += d;
                    Some(*acc)
                })
                .collect();
            let mut best: Option<(usize, f64, Vec<f64>)> = None;
            for _ in 0..trials {
                let target = rng.random::<f64>() * potential;
                let cand = draw_weighted(&cumulative, &closest, target);
                let updated: Vec<f64> = sample
                    .outer_iter()
                    .zip(&closest)
                    .map(|(x, &d)| d.min(sq_dist(x, sample.row(cand))))
                    .collect();
                let pot: f64 = updated.iter().sum();
                let better = match &best {
                    None => true,
                    Some((b, bp, _)) => pot < *bp || (pot == *bp && cand < *b),
                };
                if better {
                    best = Some((cand, pot, updated));
                }
            }
            let (cand, _, updated) = best.expect("trials >= 1");
            closest = updated;
            cand
        } else {
            // Every remaining row duplicates a chosen center.
            let free: Vec<usize> = (0..m).filter(|&i| !taken[i]).collect();
            let cand = free[rng.random_range(0..free.len())];
            for (x, d) in sample.outer_iter().zip(closest.iter_mut()) {
                *d = d.min(sq_dist(x, sample.row(cand)));
            }
            cand
        };
        taken[next] = true;
        chosen.push(next);
    }
    Ok(sample.select(Axis(0), &chosen))
}

/// First index whose running weight exceeds `target`; zero-weight rows are
/// never returned.
fn draw_weighted(cumulative: &[f64], weights: &[f64], target: f64) -> usize {
    let idx = cumulative.partition_point(|&c| c <= target);
    if idx < weights.len() && weights[idx] > 0.0 {
        return idx;
    }
    // `target` rounded up to the total: take the last positive-weight row.
    weights.iter().rposition(|&w| w > 0.0).expect("positive potential")
}

/// Settings for [`kmeans_fit`].
#[derive(Debug, Clone, PartialEq)]
pub struct KMeansConfig {
    pub k: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    /// Rows drawn for seeding; `None` means `min(N, 10·k)`.
    pub init_sample: Option<usize>,
    /// Candidates per k-means++ step; `None` means `2 + ⌊ln k⌋`.
    pub init_trials: Option<usize>,
}

impl KMeansConfig {
    pub fn new(k: usize, seed: u64) -> Self {
        Self { k, epochs: DEFAULT_EPOCHS, batch_size: DEFAULT_BATCH_SIZE, seed, init_sample: None, init_trials: None }
    }

    pub fn epochs(mut self, epochs: usize) -> Self {
        self.epochs = epochs;
        self
    }

    pub fn batch_size(mut self, batch_size: usize) -> Self {
        self.batch_size = batch_size;
        self
    }

    pub fn init_trials(mut self, trials: usize) -> Self {
        self.init_trials = Some(trials);
        self
    }

    fn trials(&self) -> usize {
        self.init_trials.unwrap_or(2 + (self.k as f64).ln().floor() as usize)
    }
}

fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Max-heap entry ordered by distance, then by lower index.
#[derive(PartialEq)]
struct Offender(f64, usize);

impl Eq for Offender {}

impl PartialOrd for Offender {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Offender {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then_with(|| other.1.cmp(&self.1))
    }
}

/// Trains mini-batch k-means on an in-memory matrix.
///
/// Seeding runs k-means++ on a uniform sample of `min(N, 10·k)` rows, then
/// [`KMeansModel::train_epochs`] runs the requested passes.
pub fn kmeans_fit(data: ArrayView2<f64>, cfg: &KMeansConfig) -> Result<KMeansModel> {
    let n = data.nrows();
    if cfg.k == 0 {
        return Err(Error::Usage("k must be at least 1".into()));
    }
    if cfg.batch_size == 0 {
        return Err(Error::Usage("k-means batch size must be positive".into()));
    }
    if n < cfg.k {
        return Err(Error::input(format!("k-means needs at least k={} points, got {n}", cfg.k)));
    }
    if data.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("non-finite value in k-means input".into()));
    }

    let mut init_rng = stream(cfg.seed, 0);
    let m = cfg.init_sample.unwrap_or(10 * cfg.k).clamp(cfg.k, n);
    let mut rows = sample_indices(&mut init_rng, n, m).into_vec();
    rows.sort_unstable();
    let sample = data.select(Axis(0), &rows);
    let centers = kmeanspp_init_greedy(sample.view(), cfg.k, cfg.trials(), &mut init_rng)?;
    let mut model = KMeansModel::from_parts(centers, None, cfg.seed, 0, cfg.batch_size)?;

    model.train_epochs(data, cfg.epochs)?;
    Ok(model)
}
