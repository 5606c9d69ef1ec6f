//! Clustering-based evaluation of learned representations.
//!
//! Features are reduced with a streaming incremental PCA, clustered with
//! mini-batch k-means over several seeds, and scored against class labels
//! with Hungarian-matched accuracy (including over/under-clustering), ARI,
//! AMI and NMI. Everything is exposed as a library; the `clustereval` binary
//! is a thin wrapper around [`pipeline`].
//!
//! ```
//! use clustereval::metrics::nmi;
//! use clustereval::partition::{build_contingency, Partition};
//!
//! let pred = Partition::new(vec![0, 0, 1, 1]).unwrap();
//! let truth = Partition::new(vec![1, 1, 0, 0]).unwrap();
//! let table = build_contingency(&pred, &truth).unwrap();
//! assert!((nmi(&table) - 1.0).abs() < 1e-12);
//! ```

pub mod assign;
pub mod error;
pub mod features;
pub mod io;
pub mod kmeans;
pub mod metrics;
pub mod partition;
pub mod pca;
pub mod pipeline;
pub mod report;
pub mod synthetic;

pub use error::{Error, Result};
pub use features::{FeatureSource, MatrixSource, NpyFeatures};
pub use kmeans::{KMeansConfig, KMeansModel};
pub use partition::{ClassGroups, ClassMap, ContingencyTable, Partition};
pub use pca::PcaModel;
pub use pipeline::{AssignmentSource, RunConfig, Settings};
pub use report::MetricsReport;
