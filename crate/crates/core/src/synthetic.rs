//! Seeded synthetic datasets for examples and tests.

use ndarray::{Array1, Array2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Isotropic Gaussian blobs.
#[derive(Debug, Clone)]
pub struct Blobs {
    pub features: Array2<f64>,
    /// Generating blob of each row, `0..n_blobs`.
    pub labels: Vec<i64>,
    pub centers: Array2<f64>,
}

impl Blobs {
    /// Smallest distance between two blob centers.
    pub fn min_center_distance(&self) -> f64 {
        let k = self.centers.nrows();
        let mut best = f64::INFINITY;
        for i in 0..k {
            for j in i + 1..k {
                let d = (&self.centers.row(i) - &self.centers.row(j)).mapv(|v| v * v).sum().sqrt();
                best = best.min(d);
            }
        }
        best
    }
}

/// `n` points in `dim` dimensions around `n_blobs` centers drawn uniformly
/// from `[-half_box, half_box]^dim`, with per-coordinate noise `sigma`.
/// Row `i` belongs to blob `i % n_blobs`.
pub fn make_blobs(n: usize, n_blobs: usize, dim: usize, half_box: f64, sigma: f64, seed: u64) -> Blobs {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centers = Array2::from_shape_fn((n_blobs, dim), |_| rng.random_range(-half_box..=half_box));
    let mut features = Array2::zeros((n, dim));
    let mut labels = Vec::with_capacity(n);
    for (i, mut row) in features.axis_iter_mut(Axis(0)).enumerate() {
        let b = i % n_blobs;
        labels.push(b as i64);
        for (j, v) in row.iter_mut().enumerate() {
            let z: f64 = StandardNormal.sample(&mut rng);
            *v = centers[(b, j)] + sigma * z;
        }
    }
    Blobs { features, labels, centers }
}

/// Data concentrated on a random `rank`-dimensional subspace.
#[derive(Debug, Clone)]
pub struct LowRank {
    pub features: Array2<f64>,
    /// `rank × dim` orthonormal generating basis.
    pub basis: Array2<f64>,
    pub offset: Array1<f64>,
}

/// `n` rows `offset + Σ_r scale_r · z_r · basis_r + noise·ε` with standard
/// normal `z`, `ε`. `scales` sets the spectrum (one entry per basis vector).
pub fn low_rank(n: usize, dim: usize, scales: &[f64], noise: f64, seed: u64) -> LowRank {
    let rank = scales.len();
    assert!(rank <= dim, "rank must not exceed the dimension");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gauss = || -> f64 { StandardNormal.sample(&mut rng) };
    // Gram–Schmidt on Gaussian vectors.
    let mut basis = Array2::<f64>::zeros((rank, dim));
    for r in 0..rank {
        let mut v = Array1::from_shape_fn(dim, |_| gauss());
        for _ in 0..2 {
            for q in 0..r {
                let proj = v.dot(&basis.row(q));
                v.scaled_add(-proj, &basis.row(q));
            }
        }
        let norm = v.dot(&v).sqrt();
        basis.row_mut(r).assign(&(v / norm));
    }
    let offset = Array1::from_shape_fn(dim, |_| 3.0 * gauss());
    let mut features = Array2::zeros((n, dim));
    for mut row in features.axis_iter_mut(Axis(0)) {
        row.assign(&offset);
        for (r, &s) in scales.iter().enumerate() {
            let z = s * gauss();
            row.scaled_add(z, &basis.row(r));
        }
        if noise > 0.0 {
            row.mapv_inplace(|v| v + noise * gauss());
        }
    }
    LowRank { features, basis, offset }
}
