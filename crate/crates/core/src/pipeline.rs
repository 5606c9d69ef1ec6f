//! The evaluation protocol: incremental PCA on training features, mini-batch
//! k-means per seed in the reduced space, cluster→class assignment, and
//! ACC / ARI / AMI / NMI aggregated over seeds.
//!
//! PCA is fit once per configuration and shared by all seeds; only k-means
//! is seeded. Transfer evaluation (fit on one dataset, score another) goes
//! through the optional eval set plus a class table, and the assignment
//! source decides whether the cluster→class map comes from training
//! predictions (`train`) or from the scored set itself (`val`).

use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};

use ndarray::{Array2, ArrayView2};
use rayon::prelude::*;
use serde::Serialize;

use crate::assign::{accuracy, best_class_map};
use crate::error::{Error, Result};
use crate::features::{open_features, FeatureSource, DEFAULT_CHUNK_ROWS};
use crate::io::labels::{read_class_table, read_raw_labels};
use crate::io::model::{load_kmeans, load_pca, save_model, Model};
use crate::kmeans::{kmeans_fit, KMeansConfig, KMeansModel, DEFAULT_BATCH_SIZE, DEFAULT_EPOCHS};
use crate::metrics;
use crate::partition::{
    build_contingency, densify, restrict_to_classes, ClassGroups, ClassMap, Partition,
};
use crate::pca::{pca_batch_size, pca_fit_stream_with, transform_source, PcaModel};
use crate::report::{MeanStd, MetricsReport, ReportConfig, SeedRecord};

pub const DEFAULT_K: usize = 1000;
pub const DEFAULT_PCA_DIM: usize = 256;

/// Where the cluster→class map is estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum AssignmentSource {
    /// Map built from training predictions and labels, applied to the
    /// evaluated set.
    Train,
    /// Map built from the evaluated set's own predictions and labels.
    #[default]
    Val,
}

impl AssignmentSource {
    pub fn as_str(self) -> &'static str {
        match self {
            AssignmentSource::Train => "train",
            AssignmentSource::Val => "val",
        }
    }
}

/// Algorithm settings shared by the in-memory and file-based entry points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Settings {
    pub k: usize,
    pub pca_dim: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub seeds: Vec<u64>,
    pub assignment: AssignmentSource,
    /// Overrides the `max(4096, 2·n_f)` PCA batch rule.
    pub pca_batch: Option<usize>,
    /// Sequential SVD so every run is bit-identical.
    pub deterministic: bool,
    pub threads: Option<usize>,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            k: DEFAULT_K,
            pca_dim: DEFAULT_PCA_DIM,
            epochs: DEFAULT_EPOCHS,
            batch_size: DEFAULT_BATCH_SIZE,
            seeds: (0..5).collect(),
            assignment: AssignmentSource::Val,
            pca_batch: None,
            deterministic: false,
            threads: None,
        }
    }
}

impl Settings {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Usage(m.to_string()));
        if self.k == 0 {
            return bad("k must be at least 1");
        }
        if self.pca_dim == 0 {
            return bad("pca dimension must be at least 1");
        }
        if self.batch_size == 0 {
            return bad("k-means batch size must be positive");
        }
        if self.seeds.is_empty() {
            return bad("at least one seed is required");
        }
        if self.threads == Some(0) {
            return bad("thread count must be positive");
        }
        Ok(())
    }

    fn svd_threads(&self) -> usize {
        if self.deterministic {
            1
        } else {
            self.threads.unwrap_or_else(rayon::current_num_threads)
        }
    }

    fn kmeans(&self, seed: u64) -> KMeansConfig {
        KMeansConfig::new(self.k, seed).epochs(self.epochs).batch_size(self.batch_size)
    }

    /// Runs `f` inside a dedicated pool when a thread count is configured.
    fn install<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T> {
        match self.threads {
            Some(n) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .map_err(|e| Error::Usage(format!("cannot build thread pool: {e}")))?;
                Ok(pool.install(f))
            }
            None => Ok(f()),
        }
    }
}

/// File locations for a run.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct DataPaths {
    pub train_features: PathBuf,
    pub train_labels: Option<PathBuf>,
    pub eval_features: Option<PathBuf>,
    pub eval_labels: Option<PathBuf>,
    /// `eval_class,target_class` CSV restricting and merging classes.
    pub classes: Option<PathBuf>,
}

/// Everything a file-based command needs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub data: DataPaths,
    pub settings: Settings,
    pub chunk_rows: usize,
}

impl RunConfig {
    pub fn new(train_features: impl Into<PathBuf>) -> Self {
        Self {
            data: DataPaths { train_features: train_features.into(), ..Default::default() },
            settings: Settings::default(),
            chunk_rows: DEFAULT_CHUNK_ROWS,
        }
    }
}

/// Features plus optional raw integer labels.
#[derive(Clone, Copy)]
pub struct LabeledSet<'a> {
    pub features: &'a dyn FeatureSource,
    pub labels: Option<&'a [i64]>,
}

impl<'a> LabeledSet<'a> {
    pub fn new(features: &'a dyn FeatureSource, labels: Option<&'a [i64]>) -> Result<Self> {
        if let Some(l) = labels {
            if l.len() != features.n_samples() {
                return Err(Error::input(format!(
                    "{} labels for {} feature rows",
                    l.len(),
                    features.n_samples()
                )));
            }
        }
        Ok(Self { features, labels })
    }
}

/// A shared PCA model and one k-means model per seed.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedModels {
    pub pca: PcaModel,
    pub kmeans: Vec<KMeansModel>,
}

/// Streaming pass 1: incremental PCA over the training features.
pub fn fit_pca(train: &dyn FeatureSource, settings: &Settings) -> Result<PcaModel> {
    if settings.pca_dim > train.n_features() {
        return Err(Error::Usage(format!(
            "pca dimension {} exceeds the feature dimension {}",
            settings.pca_dim,
            train.n_features()
        )));
    }
    let batch = settings.pca_batch.unwrap_or_else(|| pca_batch_size(train.n_features()));
    pca_fit_stream_with(train, settings.pca_dim, batch, settings.svd_threads())
}

/// One k-means model per seed on already reduced data.
pub fn fit_kmeans_seeds(reduced: ArrayView2<f64>, settings: &Settings) -> Result<Vec<KMeansModel>> {
    settings
        .seeds
        .par_iter()
        .map(|&seed| kmeans_fit(reduced, &settings.kmeans(seed)).map_err(|e| e.context(format!("seed {seed}"))))
        .collect()
}

/// PCA then k-means for every seed.
pub fn fit_models(train: &dyn FeatureSource, settings: &Settings) -> Result<FittedModels> {
    settings.validate()?;
    settings.install(|| {
        let pca = fit_pca(train, settings)?;
        let reduced = transform_source(&pca, train)?;
        let kmeans = fit_kmeans_seeds(reduced.view(), settings)?;
        Ok(FittedModels { pca, kmeans })
    })?
}

/// Class labels translated into one shared index space, with the instances
/// that survive the class table.
struct Encoded {
    keep: Vec<usize>,
    classes: Vec<usize>,
}

fn encode_with(raw: &[i64], lookup: impl Fn(i64) -> Option<usize>) -> Encoded {
    let mut keep = Vec::new();
    let mut classes = Vec::new();
    for (i, &l) in raw.iter().enumerate() {
        if let Some(c) = lookup(l) {
            keep.push(i);
            classes.push(c);
        }
    }
    Encoded { keep, classes }
}

/// Keep/merge via the class table: restrict to listed classes, then fold each
/// kept class into its merged group.
fn encode_grouped(raw: &[i64], group_of: impl Fn(i64) -> Option<usize>, what: &str) -> Result<Encoded> {
    let (dense, dict) = densify(raw)?;
    let keep_set: BTreeSet<usize> =
        (0..dict.len()).filter(|&d| group_of(dict.original(d).unwrap()).is_some()).collect();
    if keep_set.is_empty() {
        return Err(Error::input(format!("no {what} class appears in the class table")));
    }
    let index = Partition::with_groups((0..raw.len()).collect(), raw.len())?;
    let (kept_idx, kept_truth) = restrict_to_classes(&index, &dense, &keep_set)?;
    let to_group: Vec<usize> = keep_set.iter().map(|&d| group_of(dict.original(d).unwrap()).unwrap()).collect();
    let merged = kept_truth.relabel(&to_group)?;
    Ok(Encoded { keep: kept_idx.into_labels(), classes: merged.into_labels() })
}

fn select_labels(pred: &Partition, keep: &[usize]) -> Result<Partition> {
    Partition::with_groups(keep.iter().map(|&i| pred.labels()[i]).collect(), pred.n_groups())
}

/// Densifies `classes` over the values present and returns the inverse map.
fn present_classes(classes: &[usize]) -> Result<(Partition, Vec<usize>)> {
    let raw: Vec<i64> = classes.iter().map(|&c| c as i64).collect();
    let (p, dict) = densify(&raw)?;
    Ok((p, dict.originals().iter().map(|&o| o as usize).collect()))
}

/// Scores one seed's predictions.
#[allow(clippy::too_many_arguments)]
fn score_seed(
    seed: u64,
    eval_pred: &Partition,
    eval_enc: &Encoded,
    train_side: Option<(&Partition, &Encoded)>,
    n_space: usize,
    assignment: AssignmentSource,
    inertia: f64,
) -> Result<SeedRecord> {
    let pred = select_labels(eval_pred, &eval_enc.keep)?;
    let truth = Partition::with_groups(eval_enc.classes.clone(), n_space)?;
    let table = build_contingency(&pred, &truth)?;
    let compact = table.compact();
    let ari = metrics::ari(&compact)?;
    let ami = metrics::ami(&compact);
    let nmi = metrics::nmi(&compact);

    let (present, _) = present_classes(&eval_enc.classes)?;
    let val_table = build_contingency(&pred, &present)?;
    let (val_map, _) = best_class_map(&val_table)?;
    let acc_val = accuracy(&val_table, &val_map)?;

    let acc_tr = match train_side {
        Some((train_pred, train_enc)) => {
            let tpred = select_labels(train_pred, &train_enc.keep)?;
            let (tpresent, tclasses) = present_classes(&train_enc.classes)?;
            let eval_classes: BTreeSet<usize> = eval_enc.classes.iter().copied().collect();
            let train_classes: BTreeSet<usize> = tclasses.iter().copied().collect();
            let missing: Vec<usize> = eval_classes.difference(&train_classes).copied().collect();
            if !missing.is_empty() {
                return Err(Error::input(format!(
                    "evaluated classes {missing:?} have no training instances (training covers {} classes: {:?})",
                    train_classes.len(),
                    train_classes.iter().take(20).collect::<Vec<_>>()
                )));
            }
            let ttable = build_contingency(&tpred, &tpresent)?;
            let (tmap, _) = best_class_map(&ttable)?;
            let in_space: Vec<usize> = tmap.assignment().iter().map(|&c| tclasses[c]).collect();
            Some(accuracy(&table, &ClassMap::new(in_space, n_space)?)?)
        }
        None => None,
    };
    let acc = match assignment {
        AssignmentSource::Val => acc_val,
        AssignmentSource::Train => acc_tr.ok_or_else(|| {
            Error::Usage("assignment source 'train' requires training labels".into())
        })?,
    };
    Ok(SeedRecord { seed, acc, acc_tr, acc_val, ari, ami, nmi, inertia })
}

/// Evaluates fitted models on reduced features.
///
/// `eval` defaults to the training set. With a class table, evaluated labels
/// are looked up on its `eval_class` side and training labels on its
/// `target_class` side; instances of unlisted classes are dropped.
pub fn evaluate_reduced(
    kmeans: &[KMeansModel],
    train_reduced: ArrayView2<f64>,
    train_labels: Option<&[i64]>,
    eval: Option<(ArrayView2<f64>, &[i64])>,
    classes: Option<&ClassGroups>,
    settings: &Settings,
    pca_dim: usize,
) -> Result<MetricsReport> {
    if kmeans.is_empty() {
        return Err(Error::input("no k-means models to evaluate"));
    }
    let (eval_x, eval_raw) = match eval {
        Some(e) => e,
        None => (
            train_reduced,
            train_labels.ok_or_else(|| Error::Usage("evaluation needs labels for the training set or an eval set".into()))?,
        ),
    };
    if eval_raw.len() != eval_x.nrows() {
        return Err(Error::input(format!("{} eval labels for {} eval rows", eval_raw.len(), eval_x.nrows())));
    }

    let (eval_enc, train_enc, n_space) = match classes {
        Some(g) => {
            let e = encode_grouped(eval_raw, |c| g.eval_group(c), "evaluated")?;
            let t = train_labels.map(|l| encode_grouped(l, |c| g.target_group(c), "training")).transpose()?;
            (e, t, g.n_groups())
        }
        None => {
            let mut vocab: Vec<i64> = eval_raw.to_vec();
            if let Some(l) = train_labels {
                vocab.extend_from_slice(l);
            }
            let (_, dict) = densify(&vocab)?;
            let e = encode_with(eval_raw, |c| dict.dense_index(c));
            let t = train_labels.map(|l| encode_with(l, |c| dict.dense_index(c)));
            (e, t, dict.len())
        }
    };
    if eval_enc.keep.is_empty() {
        return Err(Error::input("no evaluated instances left after class filtering"));
    }

    let records: Vec<SeedRecord> = kmeans
        .par_iter()
        .map(|model| {
            let seed = model.rng_seed();
            let run = || -> Result<SeedRecord> {
                let eval_pred = model.predict(eval_x)?;
                let train_pred = match &train_enc {
                    Some(_) => Some(model.predict(train_reduced)?),
                    None => None,
                };
                let inertia = model.inertia(train_reduced)?;
                score_seed(
                    seed,
                    &eval_pred,
                    &eval_enc,
                    train_pred.as_ref().zip(train_enc.as_ref()),
                    n_space,
                    settings.assignment,
                    inertia,
                )
            };
            run().map_err(|e| e.context(format!("seed {seed}")))
        })
        .collect::<Result<_>>()?;

    let n_classes = eval_enc.classes.iter().collect::<BTreeSet<_>>().len();
    let config = ReportConfig {
        k: kmeans[0].k(),
        pca_dim,
        epochs: kmeans[0].epochs_trained(),
        batch_size: kmeans[0].batch_size(),
        seeds: kmeans.iter().map(|m| m.rng_seed()).collect(),
        assignment: settings.assignment.as_str().to_string(),
        n_features: 0,
        n_train: train_reduced.nrows(),
        n_eval: eval_enc.keep.len(),
        n_classes,
    };
    MetricsReport::new(config, records)
}

/// Evaluates fitted models on raw (unreduced) feature sources.
pub fn evaluate_models(
    models: &FittedModels,
    train: LabeledSet<'_>,
    eval: Option<LabeledSet<'_>>,
    classes: Option<&ClassGroups>,
    settings: &Settings,
) -> Result<MetricsReport> {
    settings.install(|| {
        let train_reduced = transform_source(&models.pca, train.features)?;
        let eval_reduced = eval.map(|e| transform_source(&models.pca, e.features)).transpose()?;
        let eval_arg = match (&eval_reduced, eval) {
            (Some(x), Some(e)) => Some((
                x.view(),
                e.labels.ok_or_else(|| Error::Usage("eval set needs labels".into()))?,
            )),
            _ => None,
        };
        let mut report = evaluate_reduced(
            &models.kmeans,
            train_reduced.view(),
            train.labels,
            eval_arg,
            classes,
            settings,
            models.pca.n_components(),
        )?;
        report.config.n_features = models.pca.n_features();
        Ok(report)
    })?
}

/// Fits and evaluates in one go (PCA shared across seeds).
pub fn run(
    train: LabeledSet<'_>,
    eval: Option<LabeledSet<'_>>,
    classes: Option<&ClassGroups>,
    settings: &Settings,
) -> Result<MetricsReport> {
    settings.validate()?;
    settings.install(|| {
        let pca = fit_pca(train.features, settings)?;
        let train_reduced = transform_source(&pca, train.features)?;
        let eval_reduced = eval.map(|e| transform_source(&pca, e.features)).transpose()?;
        run_reduced(&pca, &train_reduced, train.labels, eval_reduced.as_ref().zip(eval), classes, settings)
    })?
}

fn run_reduced(
    pca: &PcaModel,
    train_reduced: &Array2<f64>,
    train_labels: Option<&[i64]>,
    eval: Option<(&Array2<f64>, LabeledSet<'_>)>,
    classes: Option<&ClassGroups>,
    settings: &Settings,
) -> Result<MetricsReport> {
    let kmeans = fit_kmeans_seeds(train_reduced.view(), settings)?;
    let eval_arg = match eval {
        Some((x, e)) => Some((x.view(), e.labels.ok_or_else(|| Error::Usage("eval set needs labels".into()))?)),
        None => None,
    };
    let mut report = evaluate_reduced(
        &kmeans,
        train_reduced.view(),
        train_labels,
        eval_arg,
        classes,
        settings,
        pca.n_components(),
    )?;
    report.config.n_features = pca.n_features();
    Ok(report)
}

/// Parameter varied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
pub enum SweepAxis {
    #[value(name = "pca_dim", alias = "pca-dim")]
    PcaDim,
    K,
}

/// One line of sweep output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: usize,
    pub acc: MeanStd,
    pub ari: MeanStd,
    pub ami: MeanStd,
    pub nmi: MeanStd,
}

impl SweepRow {
    pub const HEADER: &'static str = "value,acc_mean,acc_std,ari_mean,ari_std,ami_mean,ami_std,nmi_mean,nmi_std";

    fn from_report(value: usize, r: &MetricsReport) -> Self {
        let a = &r.aggregate;
        Self { value, acc: a.acc, ari: a.ari, ami: a.ami, nmi: a.nmi }
    }

    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.value,
            self.acc.mean,
            self.acc.std,
            self.ari.mean,
            self.ari.std,
            self.ami.mean,
            self.ami.std,
            self.nmi.mean,
            self.nmi.std
        )
    }
}

/// Runs the protocol once per value of `axis`. PCA is refit only when the
/// PCA dimension varies. `on_row` sees each row as soon as it is complete.
pub fn sweep(
    train: LabeledSet<'_>,
    eval: Option<LabeledSet<'_>>,
    classes: Option<&ClassGroups>,
    settings: &Settings,
    axis: SweepAxis,
    values: &[usize],
    mut on_row: impl FnMut(&SweepRow) -> Result<()> + Send,
) -> Result<Vec<SweepRow>> {
    settings.validate()?;
    if values.is_empty() {
        return Err(Error::Usage("sweep needs at least one value".into()));
    }
    if values.contains(&0) {
        return Err(Error::Usage("sweep values must be positive".into()));
    }
    if axis == SweepAxis::PcaDim {
        if let Some(&v) = values.iter().find(|&&v| v > train.features.n_features()) {
            return Err(Error::Usage(format!(
                "pca dimension {v} exceeds the feature dimension {}",
                train.features.n_features()
            )));
        }
    }
    settings.install(|| {
        let mut rows = Vec::with_capacity(values.len());
        match axis {
            SweepAxis::K => {
                let pca = fit_pca(train.features, settings)?;
                let train_reduced = transform_source(&pca, train.features)?;
                let eval_reduced = eval.map(|e| transform_source(&pca, e.features)).transpose()?;
                for &k in values {
                    let s = Settings { k, ..settings.clone() };
                    let r = run_reduced(&pca, &train_reduced, train.labels, eval_reduced.as_ref().zip(eval), classes, &s)
                        .map_err(|e| e.context(format!("k = {k}")))?;
                    let row = SweepRow::from_report(k, &r);
                    on_row(&row)?;
                    rows.push(row);
                }
            }
            SweepAxis::PcaDim => {
                for &d in values {
                    let s = Settings { pca_dim: d, ..settings.clone() };
                    let pca = fit_pca(train.features, &s)?;
                    let train_reduced = transform_source(&pca, train.features)?;
                    let eval_reduced = eval.map(|e| transform_source(&pca, e.features)).transpose()?;
                    let r = run_reduced(&pca, &train_reduced, train.labels, eval_reduced.as_ref().zip(eval), classes, &s)
                        .map_err(|e| e.context(format!("pca_dim = {d}")))?;
                    let row = SweepRow::from_report(d, &r);
                    on_row(&row)?;
                    rows.push(row);
                }
            }
        }
        Ok(rows)
    })?
}

// ---------------------------------------------------------------------------
// File-based commands.

/// Training and evaluation inputs loaded from a [`RunConfig`].
pub struct LoadedData {
    pub train: Box<dyn FeatureSource>,
    pub train_labels: Option<Vec<i64>>,
    pub eval: Option<(Box<dyn FeatureSource>, Vec<i64>)>,
    pub classes: Option<ClassGroups>,
}

impl LoadedData {
    pub fn load(cfg: &RunConfig) -> Result<Self> {
        let d = &cfg.data;
        let train = Box::new(open_features(&d.train_features, cfg.chunk_rows)?);
        let train_labels = d.train_labels.as_ref().map(read_raw_labels).transpose()?;
        if let Some(l) = &train_labels {
            if l.len() != train.n_samples() {
                return Err(Error::input(format!(
                    "{} training labels for {} training rows",
                    l.len(),
                    train.n_samples()
                )));
            }
        }
        let eval = match (&d.eval_features, &d.eval_labels) {
            (Some(f), Some(l)) => {
                let src = open_features(f, cfg.chunk_rows)?;
                let labels = read_raw_labels(l)?;
                if labels.len() != src.n_samples() {
                    return Err(Error::input(format!(
                        "{} eval labels for {} eval rows",
                        labels.len(),
                        src.n_samples()
                    )));
                }
                Some((Box::new(src) as Box<dyn FeatureSource>, labels))
            }
            (None, None) => None,
            _ => return Err(Error::Usage("--eval-features and --eval-labels must be given together".into())),
        };
        let classes = d.classes.as_ref().map(|p| read_class_table(p).and_then(|t| ClassGroups::from_pairs(&t))).transpose()?;
        Ok(Self { train, train_labels, eval, classes })
    }

    pub fn train_set(&self) -> LabeledSet<'_> {
        LabeledSet { features: self.train.as_ref(), labels: self.train_labels.as_deref() }
    }

    pub fn eval_set(&self) -> Option<LabeledSet<'_>> {
        self.eval.as_ref().map(|(f, l)| LabeledSet { features: f.as_ref(), labels: Some(l.as_slice()) })
    }
}

pub fn pca_dir(models: &Path) -> PathBuf {
    models.join("pca")
}

pub fn seed_dir(models: &Path, seed: u64) -> PathBuf {
    models.join(format!("seed-{seed}"))
}

fn config_echo(cfg: &RunConfig) -> serde_json::Value {
    serde_json::to_value(cfg).expect("config serializes")
}

/// Fits and saves `pca/` plus one `seed-<s>/` directory per seed under `out`.
pub fn cmd_fit(cfg: &RunConfig, out: &Path) -> Result<FittedModels> {
    let data = LoadedData::load(cfg)?;
    let models = fit_models(data.train.as_ref(), &cfg.settings)?;
    let echo = config_echo(cfg);
    save_model(&Model::Pca(models.pca.clone()), pca_dir(out), echo.clone())?;
    for m in &models.kmeans {
        save_model(&Model::KMeans(m.clone()), seed_dir(out, m.rng_seed()), echo.clone())
            .map_err(|e| e.context(format!("seed {}", m.rng_seed())))?;
    }
    Ok(models)
}

/// Loads models written by [`cmd_fit`] for the configured seeds.
pub fn load_models(models: &Path, seeds: &[u64]) -> Result<FittedModels> {
    let pca = load_pca(pca_dir(models))?;
    let kmeans = seeds
        .iter()
        .map(|&s| load_kmeans(seed_dir(models, s)).map_err(|e| e.context(format!("seed {s}"))))
        .collect::<Result<Vec<_>>>()?;
    if let Some(m) = kmeans.iter().find(|m| m.dim() != pca.n_components()) {
        return Err(Error::input(format!(
            "k-means model for seed {} has dimension {}, PCA produces {}",
            m.rng_seed(),
            m.dim(),
            pca.n_components()
        )));
    }
    Ok(FittedModels { pca, kmeans })
}

/// Scores saved models on the configured data.
pub fn cmd_eval(cfg: &RunConfig, models: &Path) -> Result<MetricsReport> {
    cfg.settings.validate()?;
    let data = LoadedData::load(cfg)?;
    let fitted = load_models(models, &cfg.settings.seeds)?;
    evaluate_models(&fitted, data.train_set(), data.eval_set(), data.classes.as_ref(), &cfg.settings)
}

/// Fit + evaluate for every seed; one report.
pub fn cmd_run(cfg: &RunConfig) -> Result<MetricsReport> {
    let data = LoadedData::load(cfg)?;
    run(data.train_set(), data.eval_set(), data.classes.as_ref(), &cfg.settings)
}

/// Sweep written to `out` as CSV, flushed after every completed value.
pub fn cmd_sweep(cfg: &RunConfig, axis: SweepAxis, values: &[usize], out: &Path) -> Result<Vec<SweepRow>> {
    if values.is_empty() {
        return Err(Error::Usage("sweep needs at least one value".into()));
    }
    let data = LoadedData::load(cfg)?;
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let mut file = std::fs::File::create(out).map_err(|e| Error::io(out, e))?;
    writeln!(file, "{}", SweepRow::HEADER).map_err(|e| Error::io(out, e))?;
    sweep(data.train_set(), data.eval_set(), data.classes.as_ref(), &cfg.settings, axis, values, |row| {
        writeln!(file, "{}", row.csv_line()).and_then(|_| file.flush()).map_err(|e| Error::io(out, e))
    })
}
