//! Brute-force oracles, written independently of the library code paths.
#![allow(dead_code)]

use clustereval::partition::{build_contingency, ContingencyTable, Partition};
use ndarray::{Array1, Array2, ArrayView2, Axis};

pub fn table(pred: &[usize], truth: &[usize]) -> ContingencyTable {
    build_contingency(&Partition::new(pred.to_vec()).unwrap(), &Partition::new(truth.to_vec()).unwrap()).unwrap()
}

pub fn table_from(rows: &[Vec<u64>]) -> ContingencyTable {
    ContingencyTable::from_rows(rows).unwrap()
}

fn counts_of(labels: &[usize]) -> Vec<(usize, f64)> {
    let mut out: Vec<(usize, f64)> = Vec::new();
    for &l in labels {
        match out.iter_mut().find(|(k, _)| *k == l) {
            Some((_, c)) => *c += 1.0,
            None => out.push((l, 1.0)),
        }
    }
    out
}

/// −Σ p ln p straight from a label vector.
pub fn entropy(labels: &[usize]) -> f64 {
    let n = labels.len() as f64;
    -counts_of(labels).iter().map(|&(_, c)| (c / n) * (c / n).ln()).sum::<f64>()
}

/// Direct double sum over co-occurring label pairs.
pub fn mutual_information(u: &[usize], v: &[usize]) -> f64 {
    let n = u.len() as f64;
    let mut mi = 0.0;
    for &(a, ca) in &counts_of(u) {
        for &(b, cb) in &counts_of(v) {
            let nij = u.iter().zip(v).filter(|&(&x, &y)| x == a && y == b).count() as f64;
            if nij > 0.0 {
                mi += nij / n * (n * nij / (ca * cb)).ln();
            }
        }
    }
    mi
}

pub fn nmi(u: &[usize], v: &[usize]) -> f64 {
    let (hu, hv) = (entropy(u), entropy(v));
    if hu == 0.0 && hv == 0.0 {
        return 1.0;
    }
    mutual_information(u, v) / (0.5 * (hu + hv))
}

/// Counts over all unordered pairs: (same in u, same in v, same in both, total).
pub fn pair_stats(u: &[usize], v: &[usize]) -> (f64, f64, f64, f64) {
    let (mut su, mut sv, mut both, mut total) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..u.len() {
        for j in i + 1..u.len() {
            let (a, b) = (u[i] == u[j], v[i] == v[j]);
            su += a as u8 as f64;
            sv += b as u8 as f64;
            both += (a && b) as u8 as f64;
            total += 1.0;
        }
    }
    (su, sv, both, total)
}

pub fn rand_index(u: &[usize], v: &[usize]) -> f64 {
    let (su, sv, both, total) = pair_stats(u, v);
    if total == 0.0 {
        return 1.0;
    }
    // Agreements: together in both, or apart in both.
    (both + (total - su - sv + both)) / total
}

pub fn same_partition(u: &[usize], v: &[usize]) -> bool {
    (0..u.len()).all(|i| (0..u.len()).all(|j| (u[i] == u[j]) == (v[i] == v[j])))
}

pub fn ari(u: &[usize], v: &[usize]) -> f64 {
    let (su, sv, both, total) = pair_stats(u, v);
    let expected = if total > 0.0 { su * sv / total } else { 0.0 };
    let max = 0.5 * (su + sv);
    if max - expected == 0.0 {
        return if same_partition(u, v) { 1.0 } else { 0.0 };
    }
    (both - expected) / (max - expected)
}

/// Calls `f` on every permutation of `items` (Heap's algorithm).
pub fn for_each_permutation<T: Clone>(items: &[T], mut f: impl FnMut(&[T])) {
    let mut a = items.to_vec();
    let n = a.len();
    let mut c = vec![0usize; n];
    f(&a);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            f(&a);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// E[MI] as the average MI over all N! reorderings of `v` against fixed `u`.
pub fn expected_mi_by_permutation(u: &[usize], v: &[usize]) -> f64 {
    let (mut sum, mut count) = (0.0, 0.0);
    for_each_permutation(v, |p| {
        sum += mutual_information(u, p);
        count += 1.0;
    });
    sum / count
}

/// Maximum Σ counts[i][σ(i)] over injective maps rows → columns (R ≤ C).
pub fn best_injective(counts: &[Vec<u64>]) -> u64 {
    fn go(counts: &[Vec<u64>], row: usize, used: &mut Vec<bool>) -> u64 {
        if row == counts.len() {
            return 0;
        }
        let mut best = 0;
        for c in 0..used.len() {
            if !used[c] {
                used[c] = true;
                best = best.max(counts[row][c] + go(counts, row + 1, used));
                used[c] = false;
            }
        }
        best
    }
    let cols = counts.first().map_or(0, Vec::len);
    assert!(counts.len() <= cols);
    go(counts, 0, &mut vec![false; cols])
}

/// Minimum total cost over all one-to-one matchings of the smaller side.
pub fn min_cost_matching(cost: &[Vec<f64>]) -> f64 {
    let (r, c) = (cost.len(), cost[0].len());
    if r > c {
        let t: Vec<Vec<f64>> = (0..c).map(|j| (0..r).map(|i| cost[i][j]).collect()).collect();
        return min_cost_matching(&t);
    }
    fn go(cost: &[Vec<f64>], row: usize, used: &mut Vec<bool>) -> f64 {
        if row == cost.len() {
            return 0.0;
        }
        let mut best = f64::INFINITY;
        for c in 0..used.len() {
            if !used[c] {
                used[c] = true;
                best = best.min(cost[row][c] + go(cost, row + 1, used));
                used[c] = false;
            }
        }
        best
    }
    go(cost, 0, &mut vec![false; c])
}

/// Nearest center by exhaustive scan, first minimum wins.
pub fn nearest_scan(centers: ArrayView2<f64>, x: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, row) in centers.outer_iter().enumerate() {
        let d: f64 = row.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

/// Plain batch Lloyd iterations until assignments stop changing.
pub fn lloyd(data: ArrayView2<f64>, init: Array2<f64>, max_iter: usize) -> (Array2<f64>, f64) {
    let mut centers = init;
    let mut labels = vec![usize::MAX; data.nrows()];
    for _ in 0..max_iter {
        let next: Vec<usize> =
            data.outer_iter().map(|x| nearest_scan(centers.view(), x.as_slice().unwrap()).0).collect();
        let changed = next != labels;
        labels = next;
        let mut sums = Array2::<f64>::zeros(centers.dim());
        let mut counts = vec![0.0; centers.nrows()];
        for (x, &l) in data.outer_iter().zip(&labels) {
            let mut s = sums.row_mut(l);
            s += &x;
            counts[l] += 1.0;
        }
        for (c, &n) in counts.iter().enumerate() {
            if n > 0.0 {
                let mean = &sums.row(c) / n;
                centers.row_mut(c).assign(&mean);
            }
        }
        if !changed {
            break;
        }
    }
    let inertia = data.outer_iter().map(|x| nearest_scan(centers.view(), x.as_slice().unwrap()).1).sum();
    (centers, inertia)
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix; eigenpairs sorted
/// by decreasing eigenvalue, eigenvectors as rows.
pub fn jacobi_eigen(a: &Array2<f64>) -> (Array1<f64>, Array2<f64>) {
    let n = a.nrows();
    let mut a = a.clone();
    let mut v = Array2::<f64>::eye(n);
    for _sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[(i, j)].powi(2)).sum();
        let scale: f64 = a.iter().map(|x| x * x).sum();
        if off <= 1e-30 * scale.max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[(p, q)].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * a[(p, q)]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].partial_cmp(&a[(i, i)]).unwrap());
    let values = Array1::from_iter(order.iter().map(|&i| a[(i, i)]));
    let vectors = Array2::from_shape_fn((n, n), |(r, c)| v[(c, order[r])]);
    (values, vectors)
}

/// Top-`d` principal axes and singular values of `x` via the covariance
/// eigenproblem.
pub fn truncated_svd_oracle(x: ArrayView2<f64>, d: usize) -> (Array2<f64>, Array1<f64>) {
    let mean = x.mean_axis(Axis(0)).unwrap();
    let xc = &x - &mean;
    let gram = xc.t().dot(&xc);
    let (vals, vecs) = jacobi_eigen(&gram);
    let comps = vecs.slice(ndarray::s![..d, ..]).to_owned();
    let svals = vals.slice(ndarray::s![..d]).mapv(|l| l.max(0.0).sqrt());
    (comps, svals)
}

/// Largest principal angle (radians) between the row spaces of two
/// orthonormal-row matrices of equal rank.
pub fn max_principal_angle(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    // σ_min of A·Bᵀ is cos of the largest angle; use its Gram eigenvalues.
    let m = a.dot(&b.t());
    let (vals, _) = jacobi_eigen(&m.dot(&m.t()));
    let smallest = vals.iter().cloned().fold(f64::INFINITY, f64::min).max(0.0).sqrt().min(1.0);
    smallest.acos()
}

/// Sign-insensitive maximum entry difference between corresponding rows.
pub fn max_row_diff_up_to_sign(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    a.outer_iter()
        .zip(b.outer_iter())
        .map(|(x, y)| {
            let plus = (&x - &y).iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let minus = (&x + &y).iter().fold(0.0f64, |m, v| m.max(v.abs()));
            plus.min(minus)
        })
        .fold(0.0, f64::max)
}
