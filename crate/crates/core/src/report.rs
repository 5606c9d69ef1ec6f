//! Per-seed evaluation records and their mean ± std aggregation.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Scores for one k-means seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedRecord {
    pub seed: u64,
    /// Accuracy under the configured assignment source.
    pub acc: f64,
    /// Accuracy with the class map built from training predictions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub acc_tr: Option<f64>,
    /// Accuracy with the class map built from the evaluated set itself.
    pub acc_val: f64,
    pub ari: f64,
    pub ami: f64,
    pub nmi: f64,
    /// k-means objective on the training features.
    pub inertia: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

impl MeanStd {
    /// Arithmetic mean and population standard deviation (0 for one value).
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        Self { mean, std: var.sqrt() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub acc: MeanStd,
    pub ari: MeanStd,
    pub ami: MeanStd,
    pub nmi: MeanStd,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub acc_tr: Option<MeanStd>,
    pub acc_val: MeanStd,
    pub inertia: MeanStd,
}

/// Echo of the settings a report was produced with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub k: usize,
    pub pca_dim: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub seeds: Vec<u64>,
    pub assignment: String,
    pub n_features: usize,
    pub n_train: usize,
    pub n_eval: usize,
    pub n_classes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub config: ReportConfig,
    pub per_seed: Vec<SeedRecord>,
    pub aggregate: Aggregate,
}

impl MetricsReport {
    pub fn new(config: ReportConfig, per_seed: Vec<SeedRecord>) -> Result<Self> {
        if per_seed.is_empty() {
            return Err(Error::input("a report needs at least one seed record"));
        }
        let col = |f: fn(&SeedRecord) -> f64| MeanStd::of(&per_seed.iter().map(f).collect::<Vec<_>>());
        let acc_tr = per_seed
            .iter()
            .map(|r| r.acc_tr)
            .collect::<Option<Vec<f64>>>()
            .map(|v| MeanStd::of(&v));
        let aggregate = Aggregate {
            acc: col(|r| r.acc),
            ari: col(|r| r.ari),
            ami: col(|r| r.ami),
            nmi: col(|r| r.nmi),
            acc_tr,
            acc_val: col(|r| r.acc_val),
            inertia: col(|r| r.inertia),
        };
        Ok(Self { config, per_seed, aggregate })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// One row per seed, then `MEAN` and `STD` rows.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["seed", "acc", "acc_tr", "acc_val", "ari", "ami", "nmi", "inertia"]).unwrap();
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for r in &self.per_seed {
            w.write_record([
                r.seed.to_string(),
                r.acc.to_string(),
                opt(r.acc_tr),
                r.acc_val.to_string(),
                r.ari.to_string(),
                r.ami.to_string(),
                r.nmi.to_string(),
                r.inertia.to_string(),
            ])
            .unwrap();
        }
        let a = &self.aggregate;
        for (tag, pick) in [("MEAN", (|m: &MeanStd| m.mean) as fn(&MeanStd) -> f64), ("STD", |m: &MeanStd| m.std)] {
            w.write_record([
                tag.to_string(),
                pick(&a.acc).to_string(),
                opt(a.acc_tr.as_ref().map(pick)),
                pick(&a.acc_val).to_string(),
                pick(&a.ari).to_string(),
                pick(&a.ami).to_string(),
                pick(&a.nmi).to_string(),
                pick(&a.inertia).to_string(),
            ])
            .unwrap();
        }
        String::from_utf8(w.into_inner().expect("in-memory writer")).expect("ASCII output")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum ReportFormat {
    #[default]
    Json,
    Csv,
}

pub fn write_report(report: &MetricsReport, path: impl AsRef<Path>, format: ReportFormat) -> Result<()> {
    let path = path.as_ref();
    let text = match format {
        ReportFormat::Json => report.to_json(),
        ReportFormat::Csv => report.to_csv(),
    };
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
