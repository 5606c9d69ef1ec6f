//! Streamable sources of N×D feature matrices.

use std::path::{Path, PathBuf};

use ndarray::{s, Array2};

use crate::error::{Error, Result};
use crate::io::npy::{DType, NpyRowReader};

pub const DEFAULT_CHUNK_ROWS: usize = 8192;

/// Boxed iterator over row-blocks of a feature matrix.
pub type Chunks<'a> = Box<dyn Iterator<Item = Result<Array2<f64>>> + 'a>;

/// A feature matrix that can be traversed, possibly many times, as
/// row-blocks of at most [`FeatureSource::chunk_rows`] rows.
///
/// Every chunk has exactly `n_features` columns, all values are finite, and
/// one full pass yields `n_samples` rows in storage order.
pub trait FeatureSource: Sync {
    fn n_samples(&self) -> usize;
    fn n_features(&self) -> usize;
    fn dtype(&self) -> DType;
    fn chunk_rows(&self) -> usize;
    /// Starts a fresh pass over the data.
    fn chunks(&self) -> Result<Chunks<'_>>;

    /// Materializes the whole matrix. Only sensible for reduced features.
    fn to_matrix(&self) -> Result<Array2<f64>> {
        let mut out = Array2::zeros((self.n_samples(), self.n_features()));
        let mut at = 0;
        for chunk in self.chunks()? {
            let chunk = chunk?;
            out.slice_mut(s![at..at + chunk.nrows(), ..]).assign(&chunk);
            at += chunk.nrows();
        }
        Ok(out)
    }
}

/// Features stored in a `.npy` file, re-read from disk on every pass.
#[derive(Debug, Clone)]
pub struct NpyFeatures {
    path: PathBuf,
    n_samples: usize,
    n_features: usize,
    dtype: DType,
    chunk_rows: usize,
}

/// Opens a 2-D `.npy` feature file without loading its payload.
pub fn open_features(path: impl AsRef<Path>, chunk_rows: usize) -> Result<NpyFeatures> {
    if chunk_rows == 0 {
        return Err(Error::Usage("chunk size must be positive".into()));
    }
    let reader = NpyRowReader::open(path.as_ref())?;
    let h = reader.header();
    if h.shape[0] == 0 || h.shape[1] == 0 {
        return Err(Error::format(path.as_ref(), format!("empty feature matrix {:?}", h.shape)));
    }
    Ok(NpyFeatures {
        path: path.as_ref().to_path_buf(),
        n_samples: h.shape[0],
        n_features: h.shape[1],
        dtype: h.dtype,
        chunk_rows,
    })
}

impl NpyFeatures {
    pub fn path(&self) -> &Path {
        &self.path
    }
}

impl FeatureSource for NpyFeatures {
    fn n_samples(&self) -> usize {
        self.n_samples
    }

    fn n_features(&self) -> usize {
        self.n_features
    }

    fn dtype(&self) -> DType {
        self.dtype
    }

    fn chunk_rows(&self) -> usize {
        self.chunk_rows
    }

    fn chunks(&self) -> Result<Chunks<'_>> {
        let mut reader = NpyRowReader::open(&self.path)?;
        let rows = self.chunk_rows;
        let mut failed = false;
        Ok(Box::new(std::iter::from_fn(move || {
            if failed {
                return None;
            }
            match reader.next_rows(rows) {
                Ok(chunk) => chunk.map(Ok),
                Err(e) => {
                    failed = true;
                    Some(Err(e))
                }
            }
        })))
    }
}

/// An in-memory matrix exposed through the streaming interface.
#[derive(Debug, Clone)]
pub struct MatrixSource {
    data: Array2<f64>,
    chunk_rows: usize,
}

impl MatrixSource {
    /// Wraps `data`, rejecting non-finite entries and empty matrices.
    pub fn new(data: Array2<f64>, chunk_rows: usize) -> Result<Self> {
        if chunk_rows == 0 {
            return Err(Error::Usage("chunk size must be positive".into()));
        }
        if data.is_empty() {
            return Err(Error::input("feature matrix is empty"));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::Numeric(format!("non-finite value at row {}", pos / data.ncols())));
        }
        Ok(Self { data, chunk_rows })
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.data
    }

    pub fn into_matrix(self) -> Array2<f64> {
        self.data
    }
}

impl FeatureSource for MatrixSource {
    fn n_samples(&self) -> usize {
        self.data.nrows()
    }

    fn n_features(&self) -> usize {
        self.data.ncols()
    }

    fn dtype(&self) -> DType {
        DType::F64
    }

    fn chunk_rows(&self) -> usize {
        self.chunk_rows
    }

    fn chunks(&self) -> Result<Chunks<'_>> {
        let n = self.data.nrows();
        let step = self.chunk_rows;
        Ok(Box::new((0..n).step_by(step).map(move |at| Ok(self.data.slice(s![at..(at + step).min(n), ..]).to_owned()))))
    }

    fn to_matrix(&self) -> Result<Array2<f64>> {
        Ok(self.data.clone())
    }
}
