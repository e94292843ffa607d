//! Han-Kobayashi rate-splitting region and its projection to aggregate rates.
//!
//! Rates are ordered `(R1p, R1c, .., RKp, RKc)`. Receiver `i` decodes its own
//! private part together with the common parts of a set `M` of users, which
//! gives `R_ip + sum_{k in M} R_kc <= H(Y_i | V_{M^c})` for every `M`.

use crate::entropy::EntropyTable;
use crate::error::{Error, Result};
use crate::polytope::{aggregate_labels, fm_eliminate, prune_redundant, LinearInequality, Region};
use crate::subset::UserSet;

pub fn private_index(i: usize) -> usize {
    2 * i
}

pub fn common_index(i: usize) -> usize {
    2 * i + 1
}

pub fn split_labels(k: usize) -> Vec<String> {
    (1..=k).flat_map(|i| [format!("R{i}p"), format!("R{i}c")]).collect()
}

/// The `K x 2K` 0/1 matrix mapping split rates to aggregate rates.
pub fn aggregate_projection(k: usize) -> Vec<Vec<u8>> {
    (0..k)
        .map(|i| (0..2 * k).map(|j| u8::from(j / 2 == i)).collect())
        .collect()
}

/// Builds the split-rate region: one row per receiver and subset `M`
/// (all `2^K` of them, `M = {}` and `M ∋ i` included), then `R_ip, R_ic >= 0`.
pub fn build_a1(table: &EntropyTable) -> Region {
    let k = table.k();
    let dim = 2 * k;
    let mut rows = Vec::with_capacity(k << k);
    for i in 0..k {
        for m in UserSet::all(k) {
            let mut coeffs = vec![0; dim];
            coeffs[private_index(i)] = 1;
            for j in m.iter() {
                coeffs[common_index(j)] += 1;
            }
            rows.push(LinearInequality::new(coeffs, table.bound(i, m)));
        }
    }
    for var in 0..dim {
        rows.push(LinearInequality::nonnegativity(dim, var));
    }
    Region::new(split_labels(k), rows).expect("rows match the split dimension")
}

/// Projects a split-rate region onto `(R1, .., RK)` with `R_i = R_ip + R_ic`.
///
/// Aggregate variables are appended and tied to the split rates by pairs of
/// inequalities. Then for each user in turn `R_ic` and `R_ip` are eliminated,
/// pruning redundant rows after every elimination.
pub fn project_to_aggregate(a1: &Region, tol: f64) -> Result<Region> {
    if !a1.dim().is_multiple_of(2) || a1.dim() == 0 {
        return Err(Error::Domain(format!("split-rate region needs even dimension, got {}", a1.dim())));
    }
    let k = a1.dim() / 2;
    let dim = 3 * k;
    let mut rows: Vec<LinearInequality> = a1
        .inequalities()
        .iter()
        .map(|q| {
            let mut coeffs = q.coeffs.clone();
            coeffs.resize(dim, 0);
            LinearInequality::new(coeffs, q.rhs)
        })
        .collect();
    for i in 0..k {
        let mut tie = vec![0; dim];
        tie[2 * k + i] = 1;
        tie[private_index(i)] = -1;
        tie[common_index(i)] = -1;
        rows.push(LinearInequality::new(tie.clone(), 0.0));
        rows.push(LinearInequality::new(tie.iter().map(|c| -c).collect(), 0.0));
    }
    let mut labels = a1.labels().to_vec();
    labels.extend(aggregate_labels(k));
    let mut region = Region::new(labels, rows)?;
    for _ in 0..k {
        // The current user's (p, c) pair always sits at indices 0 and 1.
        region = prune_redundant(&fm_eliminate(&region, 1, tol)?, tol)?;
        region = prune_redundant(&fm_eliminate(&region, 0, tol)?, tol)?;
    }
    region.ensure_nonnegativity();
    Ok(region)
}
