//! Out-of-core PCA: stream an `.npy` file in chunks and fit incrementally.
//!
//! ```text
//! cargo run --example incremental_pca
//! ```

use clustereval::features::{open_features, FeatureSource};
use clustereval::io::npy::write_matrix;
use clustereval::pca::{pca_batch_size, pca_fit_stream, transform_source};
use clustereval::synthetic::low_rank;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // 20k rows in 48 dims that really live on a 4-dim subspace.
    let data = low_rank(20_000, 48, &[8.0, 6.0, 4.0, 2.0], 0.05, 1);
    let dir = std::env::temp_dir().join("clustereval-pca-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("features.npy");
    write_matrix(&path, &data.features.mapv(|v| v as f32))?;

    // Only `chunk_rows` rows are read at a time; PCA batches are formed
    // independently of the chunking.
    let source = open_features(&path, 1000)?;
    println!(
        "{} rows × {} features ({}), PCA batch {} rows",
        source.n_samples(),
        source.n_features(),
        source.dtype().descr(),
        pca_batch_size(source.n_features())
    );
    let pca = pca_fit_stream(&source, 6)?;
    println!("singular values: {:.1}", pca.singular_values());
    println!("explained variance: {:.3}", pca.explained_variance());

    // How well the top 4 components span the generating subspace.
    let overlap = pca.components().slice(ndarray::s![..4, ..]).dot(&data.basis.t());
    let captured: f64 = overlap.iter().map(|v| v * v).sum::<f64>() / 4.0;
    println!("subspace overlap {captured:.6} (1 = identical)");

    let reduced = transform_source(&pca, &source)?;
    println!("reduced shape {:?}", reduced.dim());
    Ok(())
}
