//! Half-space rate regions: Fourier-Motzkin projection, LP redundancy
//! pruning, containment checks and small-dimension vertex enumeration.
//!
//! Left-hand sides are exact integers throughout. Right-hand sides are
//! entropies, so they are `f64` and every comparison takes a tolerance.

pub mod lp;

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use lp::LpOutcome;

pub const DEFAULT_TOL: f64 = 1e-9;

/// `coeffs . R <= rhs`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearInequality {
    pub coeffs: Vec<i64>,
    pub rhs: f64,
}

impl LinearInequality {
    pub fn new(coeffs: Vec<i64>, rhs: f64) -> Self {
        LinearInequality { coeffs, rhs }
    }

    /// `-R_var <= 0`
    pub fn nonnegativity(dim: usize, var: usize) -> Self {
        let mut coeffs = vec![0; dim];
        coeffs[var] = -1;
        LinearInequality { coeffs, rhs: 0.0 }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_nonnegativity(&self) -> bool {
        self.rhs == 0.0
            && self.coeffs.iter().filter(|&&c| c != 0).count() == 1
            && self.coeffs.contains(&-1)
    }

    pub fn value_at(&self, point: &[f64]) -> f64 {
        self.coeffs.iter().zip(point).map(|(&c, &x)| c as f64 * x).sum()
    }

    pub fn holds_at(&self, point: &[f64], tol: f64) -> bool {
        self.value_at(point) <= self.rhs + tol
    }

    fn as_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(|&c| c as f64).collect()
    }

    /// Divides through by the gcd of the coefficients.
    pub fn reduced(mut self) -> Self {
        let g = self.coeffs.iter().fold(0i64, |g, &c| gcd(g, c.abs()));
        if g > 1 {
            for c in &mut self.coeffs {
                *c /= g;
            }
            self.rhs /= g as f64;
        }
        self
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RegionFile")]
pub struct Region {
    dim: usize,
    labels: Vec<String>,
    inequalities: Vec<LinearInequality>,
}

#[derive(Deserialize)]
struct RegionFile {
    dim: usize,
    labels: Vec<String>,
    inequalities: Vec<LinearInequality>,
}

impl TryFrom<RegionFile> for Region {
    type Error = Error;

    fn try_from(file: RegionFile) -> Result<Self> {
        if file.labels.len() != file.dim {
            return Err(Error::Structural(format!(
                "dim is {} but {} labels given",
                file.dim,
                file.labels.len()
            )));
        }
        Region::new(file.labels, file.inequalities)
    }
}

impl Region {
    pub fn new(labels: Vec<String>, inequalities: Vec<LinearInequality>) -> Result<Self> {
        let dim = labels.len();
        if let Some(n) = inequalities.iter().position(|q| q.dim() != dim) {
            return Err(Error::Structural(format!(
                "inequality {n} has {} coefficients, region has dimension {dim}",
                inequalities[n].dim()
            )));
        }
        if let Some(n) = inequalities.iter().position(|q| !q.rhs.is_finite()) {
            return Err(Error::Structural(format!("inequality {n} has a non-finite right-hand side")));
        }
        Ok(Region {
            dim,
            labels,
            inequalities,
        })
    }

    /// Region over `R1..RK` holding only the given rows.
    pub fn aggregate(k: usize, inequalities: Vec<LinearInequality>) -> Result<Self> {
        Region::new(aggregate_labels(k), inequalities)
    }

    /// Shorthand for tests and examples: rows as `(coeffs, rhs)` pairs.
    pub fn from_rows(labels: &[&str], rows: &[(&[i64], f64)]) -> Result<Self> {
        Region::new(
            labels.iter().map(|s| s.to_string()).collect(),
            rows.iter().map(|(c, r)| LinearInequality::new(c.to_vec(), *r)).collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn inequalities(&self) -> &[LinearInequality] {
        &self.inequalities
    }

    pub fn push(&mut self, q: LinearInequality) -> Result<()> {
        if q.dim() != self.dim {
            return Err(Error::Domain(format!(
                "inequality has {} coefficients, region has dimension {}",
                q.dim(),
                self.dim
            )));
        }
        self.inequalities.push(q);
        Ok(())
    }

    /// Appends `-R_i <= 0` for every variable that lacks it.
    pub fn ensure_nonnegativity(&mut self) {
        for var in 0..self.dim {
            let q = LinearInequality::nonnegativity(self.dim, var);
            if !self.inequalities.contains(&q) {
                self.inequalities.push(q);
            }
        }
    }

    pub fn contains_point(&self, point: &[f64], tol: f64) -> bool {
        self.inequalities.iter().all(|q| q.holds_at(point, tol))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("region serializes")
    }

    fn lp_rows(&self, skip: Option<usize>) -> (Vec<Vec<f64>>, Vec<f64>) {
        self.inequalities
            .iter()
            .enumerate()
            .filter(|(n, _)| Some(*n) != skip)
            .map(|(_, q)| (q.as_f64(), q.rhs))
            .unzip()
    }

    /// Maximum of `direction . R` over the region.
    pub fn support(&self, direction: &[f64]) -> Result<LpOutcome> {
        if direction.len() != self.dim {
            return Err(Error::Domain(format!(
                "direction has {} entries, region has dimension {}",
                direction.len(),
                self.dim
            )));
        }
        let (rows, rhs) = self.lp_rows(None);
        lp::maximize(direction, &rows, &rhs)
    }

    pub fn is_feasible(&self) -> Result<bool> {
        let (rows, rhs) = self.lp_rows(None);
        lp::is_feasible(&rows, &rhs)
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in &self.inequalities {
            let mut first = true;
            for (c, label) in q.coeffs.iter().zip(&self.labels) {
                if *c == 0 {
                    continue;
                }
                let sign = if *c < 0 { "-" } else if first { "" } else { "+" };
                let mag = c.abs();
                let lead = if first { "" } else { " " };
                let sep = if first || sign.is_empty() { "" } else { " " };
                if mag == 1 {
                    write!(f, "{lead}{sign}{sep}{label}")?;
                } else {
                    write!(f, "{lead}{sign}{sep}{mag} {label}")?;
                }
                first = false;
            }
            if first {
                write!(f, "0")?;
            }
            writeln!(f, " <= {}", q.rhs)?;
        }
        Ok(())
    }
}

pub fn aggregate_labels(k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("R{i}")).collect()
}

/// Projects out variable `var` by Fourier-Motzkin elimination.
///
/// Rows whose coefficient on `var` is zero carry over. Every pair of a
/// positive and a negative row is combined by integer cross-multiplication.
/// Results are divided by their coefficient gcd and rows with equal
/// left-hand sides keep the smallest right-hand side. All-zero rows are
/// dropped unless their right-hand side is below `-tol`, which means the
/// system is infeasible.
pub fn fm_eliminate(region: &Region, var: usize, tol: f64) -> Result<Region> {
    if var >= region.dim {
        return Err(Error::Domain(format!("variable {var} outside dimension {}", region.dim)));
    }
    let drop_var = |q: &LinearInequality| {
        let mut coeffs = q.coeffs.clone();
        coeffs.remove(var);
        LinearInequality::new(coeffs, q.rhs)
    };
    let (mut pos, mut neg, mut out) = (Vec::new(), Vec::new(), Vec::new());
    for q in &region.inequalities {
        match q.coeffs[var].signum() {
            1 => pos.push(q),
            -1 => neg.push(q),
            _ => out.push(drop_var(q).reduced()),
        }
    }
    for p in &pos {
        for n in &neg {
            let (a, b) = (p.coeffs[var], -n.coeffs[var]);
            let coeffs: Vec<i64> = p
                .coeffs
                .iter()
                .zip(&n.coeffs)
                .enumerate()
                .filter(|&(j, _)| j != var)
                .map(|(_, (&pc, &nc))| b * pc + a * nc)
                .collect();
            out.push(LinearInequality::new(coeffs, b as f64 * p.rhs + a as f64 * n.rhs).reduced());
        }
    }
    let mut kept: Vec<LinearInequality> = Vec::with_capacity(out.len());
    for q in out {
        if q.coeffs.iter().all(|&c| c == 0) {
            if q.rhs < -tol {
                return Err(Error::Infeasible);
            }
            continue;
        }
        match kept.iter_mut().find(|k| k.coeffs == q.coeffs) {
            Some(k) => k.rhs = k.rhs.min(q.rhs),
            None => kept.push(q),
        }
    }
    let mut labels = region.labels.clone();
    labels.remove(var);
    Region::new(labels, kept)
}

/// Removes every inequality implied by the others.
///
/// Rows are visited in order. A row is dropped when the maximum of its left
/// side over the rows still kept (itself excluded) is at most `rhs + tol`.
/// A direction in which the rest is unbounded keeps the row.
pub fn prune_redundant(region: &Region, tol: f64) -> Result<Region> {
    if !region.is_feasible()? {
        return Err(Error::Infeasible);
    }
    let mut current = region.clone();
    let mut n = 0;
    while n < current.inequalities.len() {
        let q = &current.inequalities[n];
        let (rows, rhs) = current.lp_rows(Some(n));
        let redundant = match lp::maximize(&q.as_f64(), &rows, &rhs)? {
            LpOutcome::Optimal(v) => v <= q.rhs + tol,
            LpOutcome::Unbounded => false,
            LpOutcome::Infeasible => {
                return Err(Error::InternalConsistency(
                    "feasible system became infeasible after dropping a row".into(),
                ))
            }
        };
        if redundant {
            current.inequalities.remove(n);
        } else {
            n += 1;
        }
    }
    Ok(current)
}

/// An inequality of the outer region that the inner region violates.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub index: usize,
    pub inequality: LinearInequality,
    /// Maximum of the left side over the inner region; `None` when unbounded.
    pub support: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubsetCheck {
    pub holds: bool,
    /// The inner region is empty, so containment holds vacuously.
    pub inner_infeasible: bool,
    pub violations: Vec<Violation>,
}

/// Checks `inner ⊆ outer` with one LP per inequality of `outer`.
pub fn subset_check(inner: &Region, outer: &Region, tol: f64) -> Result<SubsetCheck> {
    if inner.dim != outer.dim {
        return Err(Error::Domain(format!(
            "cannot compare regions of dimension {} and {}",
            inner.dim, outer.dim
        )));
    }
    if !inner.is_feasible()? {
        return Ok(SubsetCheck {
            holds: true,
            inner_infeasible: true,
            violations: Vec::new(),
        });
    }
    let mut violations = Vec::new();
    for (index, q) in outer.inequalities.iter().enumerate() {
        let support = match inner.support(&q.as_f64())? {
            LpOutcome::Optimal(v) if v <= q.rhs + tol => continue,
            LpOutcome::Optimal(v) => Some(v),
            LpOutcome::Unbounded => None,
            LpOutcome::Infeasible => return Err(Error::InternalConsistency("feasible region reported empty".into())),
        };
        violations.push(Violation {
            index,
            inequality: q.clone(),
            support,
        });
    }
    Ok(SubsetCheck {
        holds: violations.is_empty(),
        inner_infeasible: false,
        violations,
    })
}

pub fn is_subset(a: &Region, b: &Region, tol: f64) -> Result<bool> {
    Ok(subset_check(a, b, tol)?.holds)
}

pub fn regions_equal(a: &Region, b: &Region, tol: f64) -> Result<bool> {
    Ok(is_subset(a, b, tol)? && is_subset(b, a, tol)?)
}

/// Maximum of `direction . R` over the region.
pub fn support_value(region: &Region, direction: &[f64]) -> Result<f64> {
    match region.support(direction)? {
        LpOutcome::Optimal(v) => Ok(v),
        LpOutcome::Unbounded => Err(Error::Unbounded(format_direction(direction, &region.labels))),
        LpOutcome::Infeasible => Err(Error::Infeasible),
    }
}

fn format_direction(direction: &[f64], labels: &[String]) -> String {
    let parts: Vec<String> = direction
        .iter()
        .zip(labels)
        .filter(|(d, _)| **d != 0.0)
        .map(|(d, l)| {
            if *d == 1.0 {
                format!("+{l}")
            } else if *d == -1.0 {
                format!("-{l}")
            } else {
                format!("{d:+}*{l}")
            }
        })
        .collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" ")
    }
}

/// All vertices of a bounded region of dimension at most 3.
///
/// Candidates are intersections of `dim` hyperplanes; those inside the region
/// (within `tol`) are deduplicated keeping the lexicographically smallest
/// representative of each cluster. The result is sorted lexicographically.
pub fn vertices(region: &Region, tol: f64) -> Result<Vec<Vec<f64>>> {
    let dim = region.dim;
    if dim > 3 {
        return Err(Error::Unsupported(format!("vertex enumeration in dimension {dim}")));
    }
    if !region.is_feasible()? {
        return Ok(Vec::new());
    }
    for var in 0..dim {
        for sign in [1.0, -1.0] {
            let mut d = vec![0.0; dim];
            d[var] = sign;
            if let LpOutcome::Unbounded = region.support(&d)? {
                return Err(Error::Unbounded(format_direction(&d, &region.labels)));
            }
        }
    }
    if dim == 0 {
        return Ok(vec![Vec::new()]);
    }
    let rows = &region.inequalities;
    let mut found: Vec<Vec<f64>> = Vec::new();
    let mut pick = Vec::with_capacity(dim);
    combinations(rows.len(), dim, &mut pick, &mut |idx| {
        let a: Vec<Vec<f64>> = idx.iter().map(|&n| rows[n].as_f64()).collect();
        let b: Vec<f64> = idx.iter().map(|&n| rows[n].rhs).collect();
        if let Some(x) = solve_square(a, b) {
            if region.contains_point(&x, tol) {
                found.push(x);
            }
        }
    });
    found.sort_by(|p, q| lex_cmp(p, q));
    let mut unique: Vec<Vec<f64>> = Vec::new();
    for p in found {
        if !unique.iter().any(|u| u.iter().zip(&p).all(|(a, b)| (a - b).abs() <= tol.max(1e-12) * 10.0)) {
            unique.push(p);
        }
    }
    Ok(unique)
}

fn lex_cmp(p: &[f64], q: &[f64]) -> std::cmp::Ordering {
    p.iter()
        .zip(q)
        .map(|(a, b)| a.total_cmp(b))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

fn combinations(n: usize, r: usize, pick: &mut Vec<usize>, visit: &mut impl FnMut(&[usize])) {
    if pick.len() == r {
        visit(pick);
        return;
    }
    let start = pick.last().map_or(0, |&l| l + 1);
    for i in start..n {
        if n - i < r - pick.len() {
            break;
        }
        pick.push(i);
        combinations(n, r, pick, visit);
        pick.pop();
    }
}

/// Gaussian elimination with partial pivoting; `None` when singular.
fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let p = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[p][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, p);
        b.swap(col, p);
        let (top, rest) = a.split_at_mut(col + 1);
        let pivot = &top[col];
        for (offset, row) in rest.iter_mut().enumerate() {
            let f = row[col] / pivot[col];
            if f != 0.0 {
                for (x, p) in row.iter_mut().zip(pivot).skip(col) {
                    *x -= f * p;
                }
                b[col + 1 + offset] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}
