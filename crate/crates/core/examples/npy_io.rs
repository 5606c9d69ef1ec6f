//! Reading and writing `.npy` arrays, labels and model directories.
//!
//! ```text
//! cargo run --example npy_io
//! ```

use clustereval::features::{open_features, FeatureSource};
use clustereval::io::labels::read_labels;
use clustereval::io::model::{load_pca, read_manifest, save_model, Model};
use clustereval::io::npy::{read_array, write_array, ArrayData};
use clustereval::pca::PcaModel;
use ndarray::Array2;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("clustereval-npy-example");
    std::fs::create_dir_all(&dir)?;

    // Any 2-D float32/float64 array works as a feature file.
    let x = Array2::from_shape_fn((1000, 5), |(i, j)| (i * 5 + j) as f32 / 100.0);
    let features = dir.join("x.npy");
    write_array(&features, &[1000, 5], x.as_slice().unwrap())?;
    let src = open_features(&features, 256)?;
    let mut rows = 0;
    for chunk in src.chunks()? {
        rows += chunk?.nrows();
    }
    println!("streamed {rows} rows of {} features", src.n_features());

    // Labels: a 1-D integer .npy or one integer per line.
    let labels = dir.join("y.npy");
    write_array(&labels, &[6], &[10i64, 20, 10, 30, 20, 10])?;
    let (partition, dict) = read_labels(&labels)?;
    println!("labels {:?} ← originals {:?}", partition.labels(), dict.originals());
    std::fs::write(dir.join("y.txt"), "5\n5\n-1\n")?;
    println!("text labels {:?}", read_labels(dir.join("y.txt"))?.0.labels());

    let (header, data) = read_array(&labels)?;
    if let ArrayData::I64(v) = data {
        println!("{:?} {:?} → {v:?}", header.dtype, header.shape);
    }

    // Models: one .npy per tensor plus a checksummed manifest.
    let mut pca = PcaModel::new(5, 2)?;
    pca.partial_fit(x.mapv(f64::from).view())?;
    let model_dir = dir.join("pca");
    save_model(&Model::Pca(pca.clone()), &model_dir, serde_json::json!({"note": "example"}))?;
    let manifest = read_manifest(&model_dir)?;
    for (name, t) in &manifest.tensors {
        println!("  {name}: {} {:?} sha256 {}…", t.dtype, t.shape, &t.sha256[..12]);
    }
    assert_eq!(load_pca(&model_dir)?.components(), pca.components());

    // Malformed input is reported, not guessed around.
    std::fs::write(dir.join("bad.npy"), b"not an array")?;
    println!("bad file: {}", open_features(dir.join("bad.npy"), 8).unwrap_err());
    Ok(())
}
