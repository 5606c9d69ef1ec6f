//! Score a predicted clustering against reference labels.
//!
//! ```text
//! cargo run --example metrics
//! ```

use clustereval::metrics::{ami, ari, expected_mutual_information, nmi, rand_index, score_table};
use clustereval::partition::{build_contingency, densify};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Raw labels can be any integers; they are densified first.
    let predicted = [7, 7, 7, 3, 3, 3, 9, 9, 9, 9];
    let reference = [0, 0, 1, 1, 1, 1, 2, 2, 2, 0];
    let (pred, _) = densify(&predicted)?;
    let (truth, dict) = densify(&reference)?;
    println!("reference classes: {:?}", dict.originals());

    let table = build_contingency(&pred, &truth)?;
    println!("contingency table (clusters × classes):");
    for row in table.to_rows() {
        println!("  {row:?}");
    }

    println!("NMI    = {:.4}", nmi(&table));
    println!("E[MI]  = {:.4} nats", expected_mutual_information(&table));
    println!("AMI    = {:.4}", ami(&table));
    println!("RI     = {:.4}", rand_index(&table)?);
    println!("ARI    = {:.4}", ari(&table)?);

    // Or all at once.
    let s = score_table(&table)?;
    assert_eq!(s.ari, ari(&table)?);

    // Chance-adjusted scores hover around zero for unrelated labelings.
    let (noise, _) = densify(&[0, 1, 0, 1, 0, 1, 0, 1, 0, 1])?;
    let t = build_contingency(&noise, &truth)?;
    println!("unrelated: NMI {:.3}, AMI {:+.3}, ARI {:+.3}", nmi(&t), ami(&t), ari(&t)?);
    Ok(())
}
