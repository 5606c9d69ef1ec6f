//! Information-theoretic and pair-counting clustering scores computed from a
//! [`ContingencyTable`]. Logarithms are natural; MI and entropies are in nats.
//!
//! Joint probabilities are the cell frequencies `n_ij / N`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::partition::ContingencyTable;

/// Denominators closer to zero than this are treated as degenerate.
const DEGENERATE: f64 = 1e-12;

/// `−Σ (m_i/N)·ln(m_i/N)` with `0·ln 0 = 0`.
pub fn entropy(marginals: &[u64], n: u64) -> Result<f64> {
    let sum: u64 = marginals.iter().sum();
    if n == 0 || sum != n {
        return Err(Error::input(format!("marginals sum to {sum}, expected N = {n} > 0")));
    }
    let n = n as f64;
    let h: f64 = marginals
        .iter()
        .filter(|&&m| m > 0)
        .map(|&m| {
            let p = m as f64 / n;
            -p * p.ln()
        })
        .sum();
    Ok(h.max(0.0))
}

/// Entropy from signed counts, rejecting negative entries.
pub fn entropy_signed(counts: &[i64]) -> Result<f64> {
    if counts.iter().any(|&c| c < 0) {
        return Err(Error::input("negative count in entropy input"));
    }
    let m: Vec<u64> = counts.iter().map(|&c| c as u64).collect();
    entropy(&m, m.iter().sum())
}

/// `Σ_ij (n_ij/N)·ln(N·n_ij / (a_i·b_j))` over non-empty cells.
pub fn mutual_information(table: &ContingencyTable) -> f64 {
    let n = table.total() as f64;
    let ln_n = n.ln();
    let (a, b) = (table.row_marginals(), table.col_marginals());
    let mut mi = 0.0;
    for i in 0..table.n_rows() {
        if a[i] == 0 {
            continue;
        }
        let ln_a = (a[i] as f64).ln();
        for (j, &nij) in table.row(i).iter().enumerate() {
            if nij == 0 {
                continue;
            }
            let nij = nij as f64;
            mi += nij / n * (nij.ln() + ln_n - ln_a - (b[j] as f64).ln());
        }
    }
    mi.max(0.0)
}

fn entropies(table: &ContingencyTable) -> (f64, f64) {
    let n = table.total();
    (
        entropy(table.row_marginals(), n).expect("table marginals are consistent"),
        entropy(table.col_marginals(), n).expect("table marginals are consistent"),
    )
}

/// MI normalized by the arithmetic mean of the two entropies.
///
/// When both partitions have a single group the score is 1.
pub fn nmi(table: &ContingencyTable) -> f64 {
    let (hu, hv) = entropies(table);
    let avg = 0.5 * (hu + hv);
    if avg < DEGENERATE {
        return 1.0;
    }
    (mutual_information(table) / avg).clamp(0.0, 1.0)
}

/// `ln k!` for `k = 0..=n`, accumulated with compensated summation.
#[derive(Debug, Clone)]
pub struct LogFactorials {
    table: Vec<f64>,
}

impl LogFactorials {
    pub fn new(n: u64) -> Self {
        let n = n as usize;
        let mut table = Vec::with_capacity(n + 1);
        table.push(0.0);
        let (mut sum, mut comp) = (0.0f64, 0.0f64);
        for k in 1..=n {
            // Neumaier summation keeps ln(N!) accurate to ~1 ulp at N ~ 10⁶.
            let x = (k as f64).ln();
            let t = sum + x;
            if sum.abs() >= x.abs() {
                comp += (sum - t) + x;
            } else {
                comp += (x - t) + sum;
            }
            sum = t;
            table.push(sum + comp);
        }
        Self { table }
    }

    #[inline]
    pub fn get(&self, k: u64) -> f64 {
        self.table[k as usize]
    }
}

/// Expected mutual information under the permutation model (fixed
/// marginals), summed over the hypergeometric distribution of every cell:
///
/// ```text
/// E[MI] = Σ_ij Σ_{n=max(1, a_i+b_j−N)}^{min(a_i, b_j)}
///           (n/N)·ln(N·n/(a_i·b_j)) · P(n; a_i, b_j, N)
/// ```
pub fn expected_mutual_information(table: &ContingencyTable) -> f64 {
    let n = table.total();
    let lf = LogFactorials::new(n);
    expected_mi_with(table, &lf)
}

fn expected_mi_with(table: &ContingencyTable, lf: &LogFactorials) -> f64 {
    let n = table.total();
    let a: Vec<u64> = table.row_marginals().iter().copied().filter(|&x| x > 0).collect();
    let b: Vec<u64> = table.col_marginals().iter().copied().filter(|&x| x > 0).collect();
    // A single block on either side forces every n_ij = a_i or b_j: MI ≡ 0.
    if a.len() <= 1 || b.len() <= 1 {
        return 0.0;
    }
    let nf = n as f64;
    let ln_n = nf.ln();
    let lf_n = lf.get(n);
    // Per-row sums in parallel, combined in row order.
    let rows: Vec<f64> = a
        .par_iter()
        .map(|&ai| {
            let ln_ai = (ai as f64).ln();
            let mut row = 0.0;
            for &bj in &b {
                let ln_bj = (bj as f64).ln();
                let lo = 1.max((ai + bj).saturating_sub(n));
                let hi = ai.min(bj);
                let fixed = lf.get(ai) + lf.get(bj) + lf.get(n - ai) + lf.get(n - bj) - lf_n;
                for nij in lo..=hi {
                    let log_p = fixed
                        - lf.get(nij)
                        - lf.get(ai - nij)
                        - lf.get(bj - nij)
                        - lf.get(n + nij - ai - bj);
                    let x = nij as f64;
                    row += x / nf * (x.ln() + ln_n - ln_ai - ln_bj) * log_p.exp();
                }
            }
            row
        })
        .collect();
    rows.iter().sum()
}

/// Adjusted mutual information with arithmetic-mean normalization:
/// `(MI − E[MI]) / (avg(H(U), H(V)) − E[MI])`.
///
/// A vanishing denominator yields 1 when MI equals the normalizer (identical
/// trivial partitions) and 0 otherwise.
pub fn ami(table: &ContingencyTable) -> f64 {
    let (hu, hv) = entropies(table);
    let mi = mutual_information(table);
    let emi = expected_mutual_information(table);
    let avg = 0.5 * (hu + hv);
    let denom = avg - emi;
    if denom.abs() < DEGENERATE {
        return if (mi - avg).abs() < DEGENERATE { 1.0 } else { 0.0 };
    }
    ((mi - emi) / denom).min(1.0)
}

/// Pair counts behind the Rand index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairCounts {
    /// `C(N, 2)`.
    pub pairs: u128,
    /// `Σ C(n_ij, 2)`: pairs together in both partitions (TP).
    pub together_both: u128,
    /// `Σ C(a_i, 2)`.
    pub together_rows: u128,
    /// `Σ C(b_j, 2)`.
    pub together_cols: u128,
}

fn choose2(x: u64) -> u128 {
    let x = x as u128;
    x * x.saturating_sub(1) / 2
}

pub fn pair_counts(table: &ContingencyTable) -> PairCounts {
    PairCounts {
        pairs: choose2(table.total()),
        together_both: table.counts().iter().map(|&c| choose2(c)).sum(),
        together_rows: table.row_marginals().iter().map(|&c| choose2(c)).sum(),
        together_cols: table.col_marginals().iter().map(|&c| choose2(c)).sum(),
    }
}

/// `(TP + TN) / C(N, 2)`.
pub fn rand_index(table: &ContingencyTable) -> Result<f64> {
    if table.total() < 2 {
        return Err(Error::input("Rand index needs at least two instances"));
    }
    let p = pair_counts(table);
    let agree = p.pairs + 2 * p.together_both - p.together_rows - p.together_cols;
    Ok(agree as f64 / p.pairs as f64)
}

/// Hubert–Arabie adjusted Rand index, evaluated in exact integer arithmetic
/// up to the final division:
///
/// ```text
/// ARI = 2·(TP·P − R·C) / ((R + C)·P − 2·R·C)
/// ```
///
/// with `P = C(N,2)`, `R = Σ C(a_i,2)`, `C = Σ C(b_j,2)`. A zero denominator
/// yields 1 for identical partitions and 0 otherwise.
pub fn ari(table: &ContingencyTable) -> Result<f64> {
    if table.total() < 2 {
        return Err(Error::input("adjusted Rand index needs at least two instances"));
    }
    let p = pair_counts(table);
    let (tp, pairs, r, c) = (
        p.together_both as i128,
        p.pairs as i128,
        p.together_rows as i128,
        p.together_cols as i128,
    );
    let num = 2 * (tp * pairs - r * c);
    let den = (r + c) * pairs - 2 * r * c;
    if den == 0 {
        return Ok(if identical_partitions(table) { 1.0 } else { 0.0 });
    }
    Ok(num as f64 / den as f64)
}

/// True when the table is a relabeling: each non-empty row and column has
/// exactly one non-zero cell.
pub fn identical_partitions(table: &ContingencyTable) -> bool {
    let rows_ok = (0..table.n_rows()).all(|i| table.row(i).iter().filter(|&&c| c > 0).count() <= 1);
    let mut col_nz = vec![0usize; table.n_cols()];
    for i in 0..table.n_rows() {
        for (j, &c) in table.row(i).iter().enumerate() {
            if c > 0 {
                col_nz[j] += 1;
            }
        }
    }
    rows_ok && col_nz.iter().all(|&k| k <= 1)
}

/// All four comparison scores for one table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scores {
    pub nmi: f64,
    pub ami: f64,
    pub ari: f64,
    pub rand_index: f64,
    pub mutual_information: f64,
}

/// NMI, AMI, ARI and RI, sharing one log-factorial table.
pub fn score_table(table: &ContingencyTable) -> Result<Scores> {
    Ok(Scores {
        nmi: nmi(table),
        ami: ami(table),
        ari: ari(table)?,
        rand_index: rand_index(table)?,
        mutual_information: mutual_information(table),
    })
}
