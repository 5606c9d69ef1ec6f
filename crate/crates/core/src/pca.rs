//! Streaming (incremental) principal component analysis.
//!
//! Each batch update stacks the previous basis scaled by its singular values,
//! the mean-centered new batch, and one mean-correction row
//!
//! ```text
//! ⎡ diag(s) · V_old           ⎤
//! ⎢ X_batch − mean(X_batch)   ⎥
//! ⎣ √(n·m/(n+m)) · (μ_old − μ_batch) ⎦
//! ```
//!
//! and keeps the top `d` right singular vectors of the stack. The correction
//! row accounts for the shift between the old running mean and the batch
//! mean, so the result matches an exact truncated SVD of all centered rows
//! whenever the data has rank ≤ `d`.

use dyn_stack::{MemBuffer, MemStack};
use faer::diag::Diag;
use faer::linalg::svd::{svd, svd_scratch, ComputeSvdVectors};
use faer::{Mat, Par};
use ndarray::{s, Array1, Array2, ArrayView2, Axis};

use crate::error::{Error, Result};
use crate::features::FeatureSource;

/// Minimum incremental PCA batch size.
pub const MIN_BATCH_ROWS: usize = 4096;

/// Batch size for a feature dimension `n_features`: `max(4096, 2·n_features)`.
pub fn pca_batch_size(n_features: usize) -> usize {
    MIN_BATCH_ROWS.max(2 * n_features)
}

/// Fitted (or partially fitted) incremental PCA state.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    n_features: usize,
    n_components: usize,
    mean: Array1<f64>,
    /// `n_components × n_features`, orthonormal rows.
    components: Array2<f64>,
    singular_values: Array1<f64>,
    n_samples_seen: usize,
    svd_threads: usize,
}

impl PcaModel {
    /// An unfitted model reducing `n_features` to `n_components`.
    pub fn new(n_features: usize, n_components: usize) -> Result<Self> {
        if n_components == 0 || n_components > n_features {
            return Err(Error::Usage(format!(
                "PCA dimension must be in 1..={n_features}, got {n_components}"
            )));
        }
        Ok(Self {
            n_features,
            n_components,
            mean: Array1::zeros(n_features),
            components: Array2::zeros((0, n_features)),
            singular_values: Array1::zeros(0),
            n_samples_seen: 0,
            svd_threads: 1,
        })
    }

    /// Rebuilds a model from stored tensors, checking shapes and the
    /// orthonormality of `components`.
    pub fn from_parts(
        mean: Array1<f64>,
        components: Array2<f64>,
        singular_values: Array1<f64>,
        n_samples_seen: usize,
    ) -> Result<Self> {
        let (d, n_f) = components.dim();
        if mean.len() != n_f || singular_values.len() != d || d == 0 {
            return Err(Error::input(format!(
                "inconsistent PCA tensors: mean {}, components {d}x{n_f}, singular values {}",
                mean.len(),
                singular_values.len()
            )));
        }
        if n_samples_seen < d {
            return Err(Error::input("PCA sample count smaller than its dimension"));
        }
        Ok(Self {
            n_features: n_f,
            n_components: d,
            mean,
            components,
            singular_values,
            n_samples_seen,
            svd_threads: 1,
        })
    }

    /// Number of threads the SVD may use. `1` keeps every update bit-identical
    /// across machines with the same floating-point behavior.
    pub fn with_svd_threads(mut self, threads: usize) -> Self {
        self.svd_threads = threads.max(1);
        self
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn n_components(&self) -> usize {
        self.n_components
    }

    pub fn mean(&self) -> &Array1<f64> {
        &self.mean
    }

    pub fn components(&self) -> &Array2<f64> {
        &self.components
    }

    pub fn singular_values(&self) -> &Array1<f64> {
        &self.singular_values
    }

    pub fn n_samples_seen(&self) -> usize {
        self.n_samples_seen
    }

    pub fn is_fitted(&self) -> bool {
        self.n_samples_seen > 0
    }

    /// Variance along each component, `s² / (n − 1)`.
    pub fn explained_variance(&self) -> Array1<f64> {
        let denom = (self.n_samples_seen.max(2) - 1) as f64;
        self.singular_values.mapv(|s| s * s / denom)
    }

    /// Folds one batch into the model.
    pub fn partial_fit(&mut self, batch: ArrayView2<f64>) -> Result<()> {
        let (rows, cols) = batch.dim();
        if cols != self.n_features {
            return Err(Error::Dimension { expected: self.n_features, got: cols });
        }
        if rows == 0 {
            return Ok(());
        }
        if !self.is_fitted() && rows < self.n_components {
            return Err(Error::input(format!(
                "first PCA batch has {rows} rows, needs at least {} (the target dimension)",
                self.n_components
            )));
        }
        if batch.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric("non-finite value in PCA batch".into()));
        }

        let batch_mean = batch.mean_axis(Axis(0)).expect("rows > 0");
        let n_old = self.n_samples_seen as f64;
        let n_new = rows as f64;
        let n_total = n_old + n_new;

        let d = self.n_components;
        let prior = if self.is_fitted() { d + 1 } else { 0 };
        let mut stack = Mat::<f64>::zeros(prior + rows, cols);
        if self.is_fitted() {
            for i in 0..d {
                let s = self.singular_values[i];
                for j in 0..cols {
                    stack[(i, j)] = s * self.components[(i, j)];
                }
            }
            let scale = (n_old * n_new / n_total).sqrt();
            for j in 0..cols {
                stack[(d, j)] = scale * (self.mean[j] - batch_mean[j]);
            }
        }
        for (r, row) in batch.outer_iter().enumerate() {
            for j in 0..cols {
                stack[(prior + r, j)] = row[j] - batch_mean[j];
            }
        }

        let (singular, right) = thin_svd(&stack, self.svd_threads)?;
        let mut components = Array2::zeros((d, cols));
        for i in 0..d {
            for j in 0..cols {
                components[(i, j)] = right[(j, i)];
            }
        }
        canonicalize_signs(&mut components);

        // Running mean via running sums.
        let mean = (&self.mean * n_old + &batch.sum_axis(Axis(0))) / n_total;

        self.mean = mean;
        self.components = components;
        self.singular_values = Array1::from_iter(singular.into_iter().take(d).map(|s| s.max(0.0)));
        self.n_samples_seen += rows;
        Ok(())
    }

    /// Projects `(batch − mean) · componentsᵀ`. No whitening.
    pub fn transform(&self, batch: ArrayView2<f64>) -> Result<Array2<f64>> {
        if !self.is_fitted() {
            return Err(Error::Usage("PCA model has not been fitted".into()));
        }
        if batch.ncols() != self.n_features {
            return Err(Error::Dimension { expected: self.n_features, got: batch.ncols() });
        }
        let centered = &batch - &self.mean.view().insert_axis(Axis(0));
        Ok(centered.dot(&self.components.t()))
    }
}

/// Singular values and right singular vectors (`n_cols × min(m, n)`).
fn thin_svd(a: &Mat<f64>, threads: usize) -> Result<(Vec<f64>, Mat<f64>)> {
    let (m, n) = a.shape();
    let size = m.min(n);
    let par = if threads <= 1 { Par::Seq } else { Par::rayon(threads) };
    let mut v = Mat::<f64>::zeros(n, size);
    let mut s = Diag::<f64>::zeros(size);
    let mut buf = MemBuffer::new(svd_scratch::<f64>(
        m,
        n,
        ComputeSvdVectors::No,
        ComputeSvdVectors::Thin,
        par,
        Default::default(),
    ));
    svd(a.as_ref(), s.as_mut(), None, Some(v.as_mut()), par, MemStack::new(&mut buf), Default::default())
        .map_err(|e| Error::Numeric(format!("SVD did not converge: {e:?}")))?;
    let values = (0..size).map(|i| s.column_vector()[i]).collect();
    Ok((values, v))
}

/// Flips each row so its largest-magnitude entry (first on ties) is
/// non-negative.
fn canonicalize_signs(components: &mut Array2<f64>) {
    for mut row in components.outer_iter_mut() {
        let mut pivot = 0;
        for (j, v) in row.iter().enumerate() {
            if v.abs() > row[pivot].abs() {
                pivot = j;
            }
        }
        if row[pivot] < 0.0 {
            row.mapv_inplace(|v| -v);
        }
    }
}

/// Fits a `d`-component model in one pass over `source`, using batches of
/// [`pca_batch_size`] rows regardless of how the source is chunked.
pub fn pca_fit_stream(source: &dyn FeatureSource, d: usize) -> Result<PcaModel> {
    pca_fit_stream_with(source, d, pca_batch_size(source.n_features()), 1)
}

/// [`pca_fit_stream`] with an explicit batch size and SVD thread count.
pub fn pca_fit_stream_with(
    source: &dyn FeatureSource,
    d: usize,
    batch_rows: usize,
    svd_threads: usize,
) -> Result<PcaModel> {
    let n_f = source.n_features();
    if source.n_samples() < d {
        return Err(Error::input(format!(
            "need at least {d} samples for a {d}-dimensional PCA, have {}",
            source.n_samples()
        )));
    }
    if batch_rows == 0 {
        return Err(Error::Usage("PCA batch size must be positive".into()));
    }
    let mut model = PcaModel::new(n_f, d)?.with_svd_threads(svd_threads);
    let mut buffer = Array2::<f64>::zeros((batch_rows, n_f));
    let mut filled = 0;
    for chunk in source.chunks()? {
        let chunk = chunk?;
        if chunk.ncols() != n_f {
            return Err(Error::Dimension { expected: n_f, got: chunk.ncols() });
        }
        let mut at = 0;
        while at < chunk.nrows() {
            let take = (batch_rows - filled).min(chunk.nrows() - at);
            buffer.slice_mut(s![filled..filled + take, ..]).assign(&chunk.slice(s![at..at + take, ..]));
            filled += take;
            at += take;
            if filled == batch_rows {
                model.partial_fit(buffer.view())?;
                filled = 0;
            }
        }
    }
    if filled > 0 {
        model.partial_fit(buffer.slice(s![..filled, ..]))?;
    }
    Ok(model)
}

/// Projects every row of `source` into the model's reduced space.
pub fn transform_source(model: &PcaModel, source: &dyn FeatureSource) -> Result<Array2<f64>> {
    let mut out = Array2::zeros((source.n_samples(), model.n_components()));
    let mut at = 0;
    for chunk in source.chunks()? {
        let reduced = model.transform(chunk?.view())?;
        out.slice_mut(s![at..at + reduced.nrows(), ..]).assign(&reduced);
        at += reduced.nrows();
    }
    Ok(out)
}
