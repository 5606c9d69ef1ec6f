//! Model directories: one `.npy` file per tensor plus `manifest.json`.
//!
//! The manifest records a schema version, the model kind, every tensor's
//! file name, dtype, shape and SHA-256, scalar model fields, and an optional
//! free-form run configuration. Loading verifies all of it.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::io::npy::{read_array, write_array, ArrayData, DType, Element};
use crate::kmeans::KMeansModel;
use crate::pca::PcaModel;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Pca,
    Kmeans,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorEntry {
    pub file: String,
    pub dtype: String,
    pub shape: Vec<usize>,
    pub sha256: String,
}

/// Contents of `manifest.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub kind: ModelKind,
    pub tensors: BTreeMap<String, TensorEntry>,
    pub fields: BTreeMap<String, u64>,
    #[serde(default)]
    pub config: serde_json::Value,
}

/// Either persisted model type.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Pca(PcaModel),
    KMeans(KMeansModel),
}

impl From<PcaModel> for Model {
    fn from(m: PcaModel) -> Self {
        Model::Pca(m)
    }
}

impl From<KMeansModel> for Model {
    fn from(m: KMeansModel) -> Self {
        Model::KMeans(m)
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn checksum(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(hex(&Sha256::digest(&bytes)))
}

struct Writer<'a> {
    dir: &'a Path,
    tensors: BTreeMap<String, TensorEntry>,
}

impl Writer<'_> {
    fn put<T: Element>(&mut self, name: &str, shape: &[usize], data: &[T]) -> Result<()> {
        let file = format!("{name}.npy");
        let path = self.dir.join(&file);
        write_array(&path, shape, data)?;
        self.tensors.insert(
            name.to_string(),
            TensorEntry { file, dtype: T::DTYPE.descr().to_string(), shape: shape.to_vec(), sha256: checksum(&path)? },
        );
        Ok(())
    }
}

/// Writes `model` into `dir` (created if needed) and returns the manifest.
pub fn save_model(model: &Model, dir: impl AsRef<Path>, config: serde_json::Value) -> Result<Manifest> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut w = Writer { dir, tensors: BTreeMap::new() };
    let mut fields = BTreeMap::new();
    let kind = match model {
        Model::Pca(m) => {
            let (d, n_f) = m.components().dim();
            w.put("mean", &[n_f], m.mean().as_slice().expect("contiguous"))?;
            w.put("components", &[d, n_f], &m.components().iter().copied().collect::<Vec<_>>())?;
            w.put("singular_values", &[d], m.singular_values().as_slice().expect("contiguous"))?;
            fields.insert("n_samples_seen".into(), m.n_samples_seen() as u64);
            fields.insert("d".into(), d as u64);
            fields.insert("n_f".into(), n_f as u64);
            ModelKind::Pca
        }
        Model::KMeans(m) => {
            let (k, d) = m.centers().dim();
            w.put("centers", &[k, d], &m.centers().iter().copied().collect::<Vec<_>>())?;
            let counts: Vec<i64> = m.per_center_counts().iter().map(|&c| c as i64).collect();
            w.put("per_center_counts", &[k], &counts)?;
            fields.insert("k".into(), k as u64);
            fields.insert("d".into(), d as u64);
            fields.insert("seed".into(), m.rng_seed());
            fields.insert("epochs".into(), m.epochs_trained() as u64);
            fields.insert("batch_size".into(), m.batch_size() as u64);
            ModelKind::Kmeans
        }
    };
    let manifest = Manifest { schema_version: SCHEMA_VERSION, kind, tensors: w.tensors, fields, config };
    let path = dir.join(MANIFEST_FILE);
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    std::fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))?;
    Ok(manifest)
}

struct Loader {
    dir: PathBuf,
    manifest: Manifest,
}

impl Loader {
    fn manifest_path(&self) -> PathBuf {
        self.dir.join(MANIFEST_FILE)
    }

    fn field(&self, name: &str) -> Result<u64> {
        self.manifest
            .fields
            .get(name)
            .copied()
            .ok_or_else(|| Error::format(self.manifest_path(), format!("manifest missing field '{name}'")))
    }

    fn tensor(&self, name: &str, dtype: DType, shape: &[usize]) -> Result<ArrayData> {
        let entry = self
            .manifest
            .tensors
            .get(name)
            .ok_or_else(|| Error::format(self.manifest_path(), format!("manifest missing tensor '{name}'")))?;
        if entry.shape != shape || entry.dtype != dtype.descr() {
            return Err(Error::format(
                self.manifest_path(),
                format!(
                    "tensor '{name}' declared as {} {:?}, expected {} {shape:?}",
                    entry.dtype,
                    entry.shape,
                    dtype.descr()
                ),
            ));
        }
        let path = self.dir.join(&entry.file);
        if !path.exists() {
            return Err(Error::format(&path, format!("tensor file for '{name}' is missing")));
        }
        if checksum(&path)? != entry.sha256 {
            return Err(Error::format(&path, "checksum mismatch"));
        }
        let (header, data) = read_array(&path)?;
        if header.shape != shape || header.dtype != dtype {
            return Err(Error::format(
                &path,
                format!("payload is {} {:?}, manifest says {} {shape:?}", header.dtype.descr(), header.shape, dtype.descr()),
            ));
        }
        Ok(data)
    }

    fn f64s(&self, name: &str, shape: &[usize]) -> Result<Vec<f64>> {
        match self.tensor(name, DType::F64, shape)? {
            ArrayData::F64(v) => Ok(v),
            _ => unreachable!("dtype checked"),
        }
    }
}

/// Reads and validates `manifest.json` in `dir`.
pub fn read_manifest(dir: impl AsRef<Path>) -> Result<Manifest> {
    let path = dir.as_ref().join(MANIFEST_FILE);
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let manifest: Manifest =
        serde_json::from_str(&text).map_err(|e| Error::format(&path, format!("manifest schema mismatch: {e}")))?;
    if manifest.schema_version != SCHEMA_VERSION {
        return Err(Error::format(
            &path,
            format!("manifest schema version {} (expected {SCHEMA_VERSION})", manifest.schema_version),
        ));
    }
    Ok(manifest)
}

/// Loads a model saved by [`save_model`].
pub fn load_model(dir: impl AsRef<Path>) -> Result<Model> {
    let dir = dir.as_ref();
    let l = Loader { dir: dir.to_path_buf(), manifest: read_manifest(dir)? };
    let usize_field = |name: &str| l.field(name).map(|v| v as usize);
    match l.manifest.kind {
        ModelKind::Pca => {
            let (d, n_f) = (usize_field("d")?, usize_field("n_f")?);
            let mean = Array1::from(l.f64s("mean", &[n_f])?);
            let components = Array2::from_shape_vec((d, n_f), l.f64s("components", &[d, n_f])?).expect("shape checked");
            let singular = Array1::from(l.f64s("singular_values", &[d])?);
            let seen = usize_field("n_samples_seen")?;
            PcaModel::from_parts(mean, components, singular, seen)
                .map(Model::Pca)
                .map_err(|e| Error::format(l.manifest_path(), e.to_string()))
        }
        ModelKind::Kmeans => {
            let (k, d) = (usize_field("k")?, usize_field("d")?);
            let centers = Array2::from_shape_vec((k, d), l.f64s("centers", &[k, d])?).expect("shape checked");
            let counts = match l.tensor("per_center_counts", DType::I64, &[k])? {
                ArrayData::I64(v) if v.iter().all(|&c| c >= 0) => v.into_iter().map(|c| c as u64).collect(),
                _ => return Err(Error::format(l.manifest_path(), "per-center counts must be non-negative")),
            };
            KMeansModel::from_parts(centers, Some(counts), l.field("seed")?, usize_field("epochs")?, usize_field("batch_size")?)
                .map(Model::KMeans)
                .map_err(|e| Error::format(l.manifest_path(), e.to_string()))
        }
    }
}

pub fn load_pca(dir: impl AsRef<Path>) -> Result<PcaModel> {
    match load_model(dir.as_ref())? {
        Model::Pca(m) => Ok(m),
        Model::KMeans(_) => Err(Error::format(dir.as_ref(), "expected a PCA model, found k-means")),
    }
}

pub fn load_kmeans(dir: impl AsRef<Path>) -> Result<KMeansModel> {
    match load_model(dir.as_ref())? {
        Model::KMeans(m) => Ok(m),
        Model::Pca(_) => Err(Error::format(dir.as_ref(), "expected a k-means model, found PCA")),
    }
}
