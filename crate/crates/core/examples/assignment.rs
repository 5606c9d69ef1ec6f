//! Cluster→class assignment: Hungarian matching, overclustering, accuracy.
//!
//! ```text
//! cargo run --example assignment
//! ```

use clustereval::assign::{accuracy, best_class_map, hungarian, optimal_class_map, overcluster_map};
use clustereval::io::labels::write_class_map;
use clustereval::partition::ContingencyTable;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Plain linear assignment on a cost matrix.
    let cost = [4.0, 1.0, 3.0, 2.0, 0.0, 5.0, 3.0, 2.0, 2.0];
    let m = hungarian(&cost, 3, 3)?;
    println!("min-cost matching {:?}, cost {}", m.row_to_col, m.total_cost);

    // Square table: one cluster per class.
    let square = ContingencyTable::from_rows(&[vec![1, 9, 0], vec![8, 1, 1], vec![0, 2, 7]])?;
    let (map, matched) = optimal_class_map(&square)?;
    println!("square map {:?}: {matched} matched, ACC {:.3}", map.assignment(), accuracy(&square, &map)?);

    // Overclustering: 5 clusters for 3 classes. Each class gets one cluster
    // by optimal matching; the two leftovers go to their majority class.
    let over = ContingencyTable::from_rows(&[
        vec![40, 2, 0],
        vec![3, 35, 1],
        vec![0, 4, 30],
        vec![12, 0, 1],
        vec![0, 1, 9],
    ])?;
    let (omap, ocount) = overcluster_map(&over)?;
    println!("overcluster map {:?}: {ocount} matched, ACC {:.3}", omap.assignment(), accuracy(&over, &omap)?);

    // `best_class_map` picks the right routine from the table shape.
    let (auto, _) = best_class_map(&over)?;
    assert_eq!(auto, omap);

    // The map can be exported for auditing.
    let dir = std::env::temp_dir().join("clustereval-assignment-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("class_map.csv");
    write_class_map(&path, &omap)?;
    print!("{}:\n{}", path.display(), std::fs::read_to_string(&path)?);
    Ok(())
}
