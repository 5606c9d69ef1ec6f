//! End to end on files: PCA → k-means per seed → report, then the same
//! through saved models.
//!
//! ```text
//! cargo run --example blobs_pipeline
//! ```

use clustereval::io::npy::{write_array, write_matrix};
use clustereval::pipeline::{cmd_eval, cmd_fit, cmd_run, RunConfig, Settings};
use clustereval::report::{write_report, ReportFormat};
use clustereval::synthetic::make_blobs;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("clustereval-blobs-example");
    std::fs::create_dir_all(&dir)?;
    let blobs = make_blobs(10_000, 10, 64, 10.0, 1.0, 7);
    write_matrix(dir.join("features.npy"), &blobs.features.mapv(|v| v as f32))?;
    write_array(dir.join("labels.npy"), &[blobs.labels.len()], &blobs.labels)?;

    let mut cfg = RunConfig::new(dir.join("features.npy"));
    cfg.data.train_labels = Some(dir.join("labels.npy"));
    cfg.settings = Settings { k: 10, pca_dim: 16, epochs: 20, deterministic: true, ..Settings::default() };

    let report = cmd_run(&cfg)?;
    for r in &report.per_seed {
        println!("seed {}: ACC {:.4} ARI {:.4} AMI {:.4} NMI {:.4}", r.seed, r.acc, r.ari, r.ami, r.nmi);
    }
    let a = &report.aggregate;
    println!("ACC {:.4} ± {:.4}, NMI {:.4} ± {:.4}", a.acc.mean, a.acc.std, a.nmi.mean, a.nmi.std);
    write_report(&report, dir.join("report.json"), ReportFormat::Json)?;
    write_report(&report, dir.join("report.csv"), ReportFormat::Csv)?;
    print!("{}", std::fs::read_to_string(dir.join("report.csv"))?);

    // Split into fit and eval: models go to disk and are scored later.
    let models = dir.join("models");
    cmd_fit(&cfg, &models)?;
    let again = cmd_eval(&cfg, &models)?;
    assert_eq!(again.to_json(), report.to_json());
    println!("fit + eval through {} reproduces the report", models.display());
    Ok(())
}
