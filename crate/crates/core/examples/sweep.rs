//! Accuracy as a function of the number of clusters and of PCA dimension.
//!
//! ```text
//! cargo run --example sweep
//! ```

use clustereval::features::MatrixSource;
use clustereval::pipeline::{sweep, LabeledSet, Settings, SweepAxis, SweepRow};
use clustereval::synthetic::make_blobs;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Blobs sitting on 12 coordinate axes: few PCA dims cannot separate them.
    let mut blobs = make_blobs(6000, 12, 32, 0.0, 0.6, 5);
    for (mut row, &l) in blobs.features.outer_iter_mut().zip(&blobs.labels) {
        row[l as usize] += 8.0;
    }
    let src = MatrixSource::new(blobs.features, 2048)?;
    let train = LabeledSet::new(&src, Some(&blobs.labels))?;
    let settings = Settings { k: 12, pca_dim: 12, epochs: 15, seeds: vec![0, 1, 2], ..Settings::default() };

    println!("{}", SweepRow::HEADER);
    let print = |r: &SweepRow| {
        println!("{}", r.csv_line());
        Ok(())
    };
    // PCA is fitted once and reused across k.
    sweep(train, None, None, &settings, SweepAxis::K, &[6, 12, 18, 24], print)?;
    // PCA is refitted for every dimension.
    sweep(train, None, None, &settings, SweepAxis::PcaDim, &[2, 4, 8, 12], print)?;
    Ok(())
}
