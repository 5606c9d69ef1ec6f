//! Mini-batch k-means with k-means++ seeding, on Gaussian blobs.
//!
//! ```text
//! cargo run --example minibatch_kmeans
//! ```

use clustereval::kmeans::{kmeans_fit, KMeansConfig};
use clustereval::partition::{build_contingency, Partition};
use clustereval::synthetic::make_blobs;
use clustereval::{assign, metrics};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let blobs = make_blobs(5000, 8, 10, 10.0, 1.0, 3);
    let truth = Partition::new(blobs.labels.iter().map(|&l| l as usize).collect())?;

    for seed in 0..3 {
        let cfg = KMeansConfig::new(8, seed).epochs(20).batch_size(512);
        let model = kmeans_fit(blobs.features.view(), &cfg)?;
        let pred = model.predict(blobs.features.view())?;
        let table = build_contingency(&pred, &truth)?;
        let (map, _) = assign::best_class_map(&table)?;
        println!(
            "seed {seed}: inertia {:>10.1}, ACC {:.4}, NMI {:.4}, points per center {:?}",
            model.inertia(blobs.features.view())?,
            assign::accuracy(&table, &map)?,
            metrics::nmi(&table),
            pred.group_sizes()
        );
    }

    // Same seed, same model, bit for bit.
    let cfg = KMeansConfig::new(8, 0).epochs(5);
    assert_eq!(kmeans_fit(blobs.features.view(), &cfg)?, kmeans_fit(blobs.features.view(), &cfg)?);

    // Training can be resumed epoch by epoch.
    let mut model = kmeans_fit(blobs.features.view(), &KMeansConfig::new(8, 0).epochs(0))?;
    for _ in 0..3 {
        model.train_epochs(blobs.features.view(), 1)?;
        println!("after epoch {}: inertia {:.1}", model.epochs_trained(), model.inertia(blobs.features.view())?);
    }
    Ok(())
}
