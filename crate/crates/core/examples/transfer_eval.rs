//! Fit on one dataset, evaluate on another whose classes are a relabeled,
//! partly merged subset, with the class map taken from either side.
//!
//! ```text
//! cargo run --example transfer_eval
//! ```

use clustereval::features::MatrixSource;
use clustereval::pipeline::{run, AssignmentSource, LabeledSet, Settings};
use clustereval::synthetic::make_blobs;
use clustereval::ClassGroups;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // "Train": 6 classes. "Eval": the same kind of data, shifted a little,
    // with its own label ids (100..) and one class the table does not list.
    let train = make_blobs(6000, 6, 16, 10.0, 1.0, 1);
    let mut eval = make_blobs(3000, 6, 16, 10.0, 1.0, 2);
    eval.features = &eval.features - &eval.centers.select(ndarray::Axis(0), &eval_rows(&eval.labels))
        + &train.centers.select(ndarray::Axis(0), &eval_rows(&eval.labels))
        + 0.3;
    let eval_labels: Vec<i64> = eval.labels.iter().map(|&l| 100 + l).collect();

    // eval_class,target_class pairs; 104 and 105 both count as target class 4,
    // so target classes 4 and 5 merge into one evaluation class.
    let groups = ClassGroups::from_pairs(&[(100, 0), (101, 1), (102, 2), (103, 3), (104, 4), (105, 4), (105, 5)])?;

    let train_src = MatrixSource::new(train.features, 2048)?;
    let eval_src = MatrixSource::new(eval.features, 2048)?;
    let train_set = LabeledSet::new(&train_src, Some(&train.labels))?;
    let eval_set = LabeledSet::new(&eval_src, Some(&eval_labels))?;

    for assignment in [AssignmentSource::Train, AssignmentSource::Val] {
        let settings = Settings { k: 6, pca_dim: 8, epochs: 15, seeds: vec![0, 1], assignment, ..Settings::default() };
        let r = run(train_set, Some(eval_set), Some(&groups), &settings)?;
        println!(
            "assignment={:<5} ACC {:.4}  (ACC-tr {:.4}, ACC-val {:.4}), {} eval classes",
            assignment.as_str(),
            r.aggregate.acc.mean,
            r.aggregate.acc_tr.map_or(f64::NAN, |m| m.mean),
            r.aggregate.acc_val.mean,
            r.config.n_classes
        );
    }
    Ok(())
}

fn eval_rows(labels: &[i64]) -> Vec<usize> {
    labels.iter().map(|&l| l as usize).collect()
}
