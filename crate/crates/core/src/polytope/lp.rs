//! Small dense simplex solver.
//!
//! Rate regions live in at most a dozen variables but can carry hundreds of
//! inequalities, so `max c.x s.t. A x <= b` is solved through its dual
//! `min b.y s.t. A^T y = c, y >= 0`. That tableau has one row per variable
//! instead of one per inequality. Pivoting uses Bland's rule throughout.

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-10;
const FEAS_TOL: f64 = 1e-9;
const MAX_PIVOTS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LpOutcome {
    Optimal(f64),
    Unbounded,
    Infeasible,
}

/// Maximizes `objective . x` over `{x : rows[r] . x <= rhs[r]}` with `x` free.
pub fn maximize(objective: &[f64], rows: &[Vec<f64>], rhs: &[f64]) -> Result<LpOutcome> {
    let n = objective.len();
    debug_assert!(rows.iter().all(|r| r.len() == n));
    let columns: Vec<Vec<f64>> = (0..n).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
    match minimize_standard(rhs, &columns, objective)? {
        LpOutcome::Optimal(v) => Ok(LpOutcome::Optimal(v)),
        // An unbounded dual certifies an empty primal.
        LpOutcome::Unbounded => Ok(LpOutcome::Infeasible),
        LpOutcome::Infeasible => {
            if is_feasible(rows, rhs)? {
                Ok(LpOutcome::Unbounded)
            } else {
                Ok(LpOutcome::Infeasible)
            }
        }
    }
}

/// Whether `{x : rows . x <= rhs}` is nonempty (Farkas: no `y >= 0` with
/// `A^T y = 0` and `b . y < 0`).
pub fn is_feasible(rows: &[Vec<f64>], rhs: &[f64]) -> Result<bool> {
    let n = rows.first().map_or(0, Vec::len);
    let columns: Vec<Vec<f64>> = (0..n).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
    Ok(matches!(
        minimize_standard(rhs, &columns, &vec![0.0; n])?,
        LpOutcome::Optimal(_)
    ))
}

/// Minimizes `cost . y` subject to `eq[i] . y = target[i]` and `y >= 0`.
fn minimize_standard(cost: &[f64], eq: &[Vec<f64>], target: &[f64]) -> Result<LpOutcome> {
    let m = cost.len();
    let rows = eq.len();
    let width = m + rows + 1;
    let rhs_col = width - 1;

    let mut t: Vec<Vec<f64>> = Vec::with_capacity(rows);
    for (i, row) in eq.iter().enumerate() {
        let sign = if target[i] < 0.0 { -1.0 } else { 1.0 };
        let mut line = vec![0.0; width];
        for (dst, &a) in line.iter_mut().zip(row) {
            *dst = sign * a;
        }
        line[m + i] = 1.0;
        line[rhs_col] = sign * target[i];
        t.push(line);
    }
    let mut basis: Vec<usize> = (m..m + rows).collect();

    // Phase 1: minimize the sum of artificials.
    let mut obj = vec![0.0; width];
    for line in &t {
        for (o, &a) in obj.iter_mut().zip(line) {
            *o -= a;
        }
    }
    for o in &mut obj[m..m + rows] {
        *o = 0.0;
    }
    if run(&mut t, &mut basis, &mut obj, width - 1)? {
        return Err(Error::InternalConsistency("phase-one problem reported unbounded".into()));
    }
    if -obj[rhs_col] > FEAS_TOL {
        return Ok(LpOutcome::Infeasible);
    }

    // Pivot leftover artificials out of the basis, dropping redundant rows.
    let mut r = 0;
    while r < t.len() {
        if basis[r] >= m {
            match (0..m).find(|&j| t[r][j].abs() > PIVOT_EPS) {
                Some(j) => pivot(&mut t, &mut basis, &mut obj, r, j),
                None => {
                    t.remove(r);
                    basis.remove(r);
                    continue;
                }
            }
        }
        r += 1;
    }

    // Phase 2 over the original columns only.
    let mut obj = vec![0.0; width];
    obj[..m].copy_from_slice(cost);
    for (line, &b) in t.iter().zip(&basis) {
        let cb = cost[b];
        if cb != 0.0 {
            for (o, &a) in obj.iter_mut().zip(line) {
                *o -= cb * a;
            }
        }
    }
    for o in &mut obj[m..m + rows] {
        *o = 0.0;
    }
    if run(&mut t, &mut basis, &mut obj, m)? {
        return Ok(LpOutcome::Unbounded);
    }
    Ok(LpOutcome::Optimal(-obj[rhs_col]))
}

/// Runs simplex iterations with entering columns restricted to `0..allowed`.
/// Returns `true` when the objective is unbounded below.
fn run(t: &mut [Vec<f64>], basis: &mut [usize], obj: &mut [f64], allowed: usize) -> Result<bool> {
    let rhs_col = obj.len() - 1;
    for _ in 0..MAX_PIVOTS {
        let Some(enter) = (0..allowed).find(|&j| obj[j] < -PIVOT_EPS) else {
            return Ok(false);
        };
        let mut leave: Option<(usize, f64)> = None;
        for (r, line) in t.iter().enumerate() {
            let a = line[enter];
            if a > PIVOT_EPS {
                let ratio = line[rhs_col] / a;
                leave = match leave {
                    None => Some((r, ratio)),
                    Some((best, br)) => {
                        if ratio < br - PIVOT_EPS || (ratio <= br + PIVOT_EPS && basis[r] < basis[best]) {
                            Some((r, ratio))
                        } else {
                            Some((best, br))
                        }
                    }
                };
            }
        }
        let Some((row, _)) = leave else {
            return Ok(true);
        };
        pivot(t, basis, obj, row, enter);
    }
    Err(Error::InternalConsistency("simplex pivot limit reached".into()))
}

fn pivot(t: &mut [Vec<f64>], basis: &mut [usize], obj: &mut [f64], row: usize, col: usize) {
    let p = t[row][col];
    for a in t[row].iter_mut() {
        *a /= p;
    }
    let pivot_row = t[row].clone();
    for (r, line) in t.iter_mut().enumerate() {
        if r != row {
            eliminate(line, &pivot_row, col);
        }
    }
    eliminate(obj, &pivot_row, col);
    basis[row] = col;
}

fn eliminate(line: &mut [f64], pivot_row: &[f64], col: usize) {
    let f = line[col];
    if f != 0.0 {
        for (a, &p) in line.iter_mut().zip(pivot_row) {
            *a -= f * p;
        }
        line[col] = 0.0;
    }
}
