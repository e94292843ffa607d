//! Nonnegative integer combinations of split-rate inequalities.
//!
//! A scheme puts weight `c(i, M)` on the row `R_ip + sum_{k in M} R_kc <=
//! H(Y_i | V_{M^c})`. Summing gives `sum d_m R_mp + sum e_m R_mc <= theta`
//! where `d_m` is the total weight at receiver `m` and `e_m` is the total
//! weight of rows whose set contains `m`. Projecting onto aggregate rates
//! turns that into `sum min(d_m, e_m) R_m <= theta`.
//!
//! The reductions here rewrite any scheme into one with `d = e` without
//! changing `min(d, e)` and without increasing `theta`. Each step returns a
//! certificate with the integer bookkeeping and both right-hand sides.

use std::collections::BTreeMap;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::entropy::EntropyTable;
use crate::error::{Error, Result};
use crate::hk_region::{common_index, private_index};
use crate::polytope::LinearInequality;
use crate::subset::UserSet;

/// Row key: receiver and common-rate set.
pub type Row = (usize, UserSet);

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CoefficientScheme {
    k: usize,
    weights: BTreeMap<Row, u64>,
}

impl CoefficientScheme {
    pub fn new(k: usize) -> Self {
        CoefficientScheme {
            k,
            weights: BTreeMap::new(),
        }
    }

    /// Builder form of [`add`](Self::add).
    pub fn with(mut self, receiver: usize, set: UserSet, weight: u64) -> Self {
        self.add(receiver, set, weight);
        self
    }

    pub fn add(&mut self, receiver: usize, set: UserSet, weight: u64) {
        assert!(receiver < self.k, "receiver {receiver} out of range");
        assert!(set.mask() < 1 << self.k, "set {set:?} out of range");
        if weight > 0 {
            *self.weights.entry((receiver, set)).or_default() += weight;
        }
    }

    fn sub(&mut self, row: Row, weight: u64) {
        let w = self.weights.get_mut(&row).expect("subtracting from an existing row");
        *w -= weight;
        if *w == 0 {
            self.weights.remove(&row);
        }
    }

    /// Up to `rows` random rows with weights in `1..=max_weight`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, k: usize, max_weight: u64, rows: usize) -> Self {
        let mut scheme = CoefficientScheme::new(k);
        for _ in 0..rows {
            let set = UserSet::from_mask(rng.gen_range(0..1u32 << k));
            scheme.add(rng.gen_range(0..k), set, rng.gen_range(1..=max_weight));
        }
        scheme
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn weight(&self, receiver: usize, set: UserSet) -> u64 {
        self.weights.get(&(receiver, set)).copied().unwrap_or(0)
    }

    /// Nonzero weights in (receiver, subset rank) order.
    pub fn iter(&self) -> impl Iterator<Item = (Row, u64)> + '_ {
        self.weights.iter().map(|(&r, &w)| (r, w))
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn rhs(&self, table: &EntropyTable) -> f64 {
        self.iter().map(|((i, m), w)| w as f64 * table.bound(i, m)).sum()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: SchemeFile = serde_json::from_str(text)?;
        let mut scheme = CoefficientScheme::new(file.k);
        for entry in file.c {
            if entry.i == 0 || entry.i > file.k {
                return Err(Error::Structural(format!("receiver {} outside 1..={}", entry.i, file.k)));
            }
            let set = UserSet::from_one_based(&entry.m, file.k)
                .ok_or_else(|| Error::Structural(format!("subset {:?} outside 1..={}", entry.m, file.k)))?;
            scheme.add(entry.i - 1, set, entry.w);
        }
        Ok(scheme)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        let file = SchemeFile {
            k: self.k,
            c: self
                .iter()
                .map(|((i, m), w)| SchemeEntry {
                    i: i + 1,
                    m: m.to_one_based(),
                    w,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("scheme serializes")
    }
}

#[derive(Serialize, Deserialize)]
struct SchemeFile {
    #[serde(rename = "K")]
    k: usize,
    c: Vec<SchemeEntry>,
}

#[derive(Serialize, Deserialize)]
struct SchemeEntry {
    i: usize,
    #[serde(rename = "M")]
    m: Vec<usize>,
    w: u64,
}

/// Private-rate weights `d` and common-rate weights `e` of a scheme.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeVector {
    pub d: Vec<u64>,
    pub e: Vec<u64>,
}

impl DeVector {
    pub fn min(&self) -> Vec<u64> {
        self.d.iter().zip(&self.e).map(|(&d, &e)| d.min(e)).collect()
    }

    pub fn balanced(&self) -> bool {
        self.d == self.e
    }
}

pub fn de_of(scheme: &CoefficientScheme) -> DeVector {
    let mut d = vec![0; scheme.k];
    let mut e = vec![0; scheme.k];
    for ((i, m), w) in scheme.iter() {
        d[i] += w;
        for j in m.iter() {
            e[j] += w;
        }
    }
    DeVector { d, e }
}

/// The summed inequality in split-rate coordinates `(R1p, R1c, ..)`.
pub fn combined_inequality(scheme: &CoefficientScheme, table: &EntropyTable) -> LinearInequality {
    let de = de_of(scheme);
    let mut coeffs = vec![0i64; 2 * scheme.k];
    for m in 0..scheme.k {
        coeffs[private_index(m)] = de.d[m] as i64;
        coeffs[common_index(m)] = de.e[m] as i64;
    }
    LinearInequality::new(coeffs, scheme.rhs(table))
}

/// The combined inequality projected onto aggregate rates.
pub fn project_combined(scheme: &CoefficientScheme, table: &EntropyTable) -> LinearInequality {
    let coeffs = de_of(scheme).min().into_iter().map(|a| a as i64).collect();
    LinearInequality::new(coeffs, scheme.rhs(table))
}

/// Bookkeeping of one reduction step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepCertificate {
    pub user: usize,
    pub before: DeVector,
    pub after: DeVector,
    /// Weight moved off each row (`beta` in step 1, `alpha` then `beta` in step 2).
    pub removed: Vec<(Row, u64)>,
    /// Weight moved onto each row.
    pub added: Vec<(Row, u64)>,
    pub rhs_before: f64,
    pub rhs_after: f64,
    /// The exact `d`/`e` identities the step promises.
    pub coefficients_ok: bool,
}

impl StepCertificate {
    pub fn rhs_non_increasing(&self, tol: f64) -> bool {
        self.rhs_after <= self.rhs_before + tol
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.coefficients_ok && self.rhs_non_increasing(tol)
    }
}

/// Lexicographic greedy: take `min(cap, remaining)` from each candidate row.
fn greedy(candidates: &[(Row, u64)], target: u64) -> Option<Vec<(Row, u64)>> {
    let mut remaining = target;
    let mut picked = Vec::new();
    for &(row, cap) in candidates {
        if remaining == 0 {
            break;
        }
        let take = cap.min(remaining);
        if take > 0 {
            picked.push((row, take));
            remaining -= take;
        }
    }
    (remaining == 0).then_some(picked)
}

/// Step 1 for a user `m` with `e_m > d_m`.
///
/// Moves `e_m - d_m` units of weight from rows `(i, M)` with `i != m` and
/// `m in M` onto `(i, M \ {m})`. That lowers `e_m` to `d_m` and leaves every
/// other `d`, `e` alone. Each moved unit trades `H(Y_i | V_{M^c})` for
/// `H(Y_i | V_m V_{M^c})`, which is no larger.
pub fn step1_reduce(scheme: &CoefficientScheme, m: usize, table: &EntropyTable) -> Result<(CoefficientScheme, StepCertificate)> {
    check_user(scheme, m)?;
    let before = de_of(scheme);
    if before.e[m] <= before.d[m] {
        return Err(Error::Contract(format!(
            "step 1 needs e_m > d_m at user {}, have d={} e={}",
            m + 1,
            before.d[m],
            before.e[m]
        )));
    }
    let candidates: Vec<(Row, u64)> = scheme.iter().filter(|&((i, set), _)| i != m && set.contains(m)).collect();
    let beta = greedy(&candidates, before.e[m] - before.d[m]).ok_or_else(|| {
        Error::InternalConsistency(format!("no weight to move at user {} in step 1", m + 1))
    })?;
    let mut next = scheme.clone();
    let mut added = Vec::with_capacity(beta.len());
    for &((i, set), w) in &beta {
        next.sub((i, set), w);
        next.add(i, set.without(m), w);
        added.push(((i, set.without(m)), w));
    }
    let after = de_of(&next);
    let coefficients_ok = (0..scheme.k).all(|u| {
        after.d[u] == before.d[u]
            && after.e[u] == if u == m { before.e[u].min(before.d[u]) } else { before.e[u] }
    });
    let cert = StepCertificate {
        user: m,
        rhs_before: scheme.rhs(table),
        rhs_after: next.rhs(table),
        before,
        after,
        removed: beta,
        added,
        coefficients_ok,
    };
    if !cert.coefficients_ok {
        return Err(Error::InternalConsistency(format!("step 1 bookkeeping failed at user {}", m + 1)));
    }
    Ok((next, cert))
}

/// Every way to draw `target` units from the candidates, respecting caps.
fn all_draws(candidates: &[(Row, u64)], target: u64, acc: &mut Vec<(Row, u64)>, out: &mut Vec<Vec<(Row, u64)>>) {
    let Some((&(row, cap), rest)) = candidates.split_first() else {
        if target == 0 {
            out.push(acc.clone());
        }
        return;
    };
    let rest_cap: u64 = rest.iter().map(|&(_, c)| c).sum();
    for take in (0..=cap.min(target)).rev() {
        if target - take > rest_cap {
            break;
        }
        if take > 0 {
            acc.push((row, take));
        }
        all_draws(rest, target - take, acc, out);
        if take > 0 {
            acc.pop();
        }
    }
}

/// For a given `alpha` at receiver `m`, finds the `beta` draws at every
/// other receiver `m'` that restore `e_{m'}`.
fn balancing_beta(scheme: &CoefficientScheme, m: usize, alpha: &[(Row, u64)]) -> Option<Vec<(Row, u64)>> {
    let mut beta = Vec::new();
    for other in (0..scheme.k).filter(|&u| u != m) {
        let gamma: u64 = alpha.iter().filter(|((_, set), _)| set.contains(other)).map(|&(_, w)| w).sum();
        if gamma == 0 {
            continue;
        }
        let candidates: Vec<(Row, u64)> = scheme
            .iter()
            .filter(|&((i, set), _)| i == other && !set.contains(other))
            .collect();
        beta.extend(greedy(&candidates, gamma)?);
    }
    Some(beta)
}

/// Step 2 for a user `m` with `d_m > e_m`.
///
/// Removes `alpha`, worth `d_m - e_m` units, from rows `(m, M)` with
/// `m not in M`. That drops `e_{m'}` by `gamma_{m'}` for each `m' in M`. Each
/// receiver `m' != m` then moves `gamma_{m'}` units from rows `(m', M')`
/// with `m' not in M'` onto `(m', M' ∪ {m'})`, which restores `e_{m'}` and
/// keeps `d_{m'}`. The right-hand side does not increase on injective
/// channels.
///
/// `alpha` is drawn greedily first. If no `beta` fits, every `alpha` is
/// tried. When nothing works and some other user still has `d < e`, the
/// caller skipped step 1 and gets a contract error.
pub fn step2_reduce(scheme: &CoefficientScheme, m: usize, table: &EntropyTable) -> Result<(CoefficientScheme, StepCertificate)> {
    check_user(scheme, m)?;
    let before = de_of(scheme);
    if before.d[m] <= before.e[m] {
        return Err(Error::Contract(format!(
            "step 2 needs d_m > e_m at user {}, have d={} e={}",
            m + 1,
            before.d[m],
            before.e[m]
        )));
    }
    let target = before.d[m] - before.e[m];
    let candidates: Vec<(Row, u64)> = scheme.iter().filter(|&((i, set), _)| i == m && !set.contains(m)).collect();
    let greedy_alpha = greedy(&candidates, target)
        .ok_or_else(|| Error::InternalConsistency(format!("no private weight to remove at user {}", m + 1)))?;
    let choice = match balancing_beta(scheme, m, &greedy_alpha) {
        Some(beta) => Some((greedy_alpha, beta)),
        None => {
            let mut draws = Vec::new();
            all_draws(&candidates, target, &mut Vec::new(), &mut draws);
            draws
                .into_iter()
                .find_map(|alpha| balancing_beta(scheme, m, &alpha).map(|beta| (alpha, beta)))
        }
    };
    let Some((alpha, beta)) = choice else {
        if let Some(u) = (0..scheme.k).find(|&u| u != m && before.d[u] < before.e[u]) {
            return Err(Error::Contract(format!(
                "step 2 at user {} needs d >= e at every other user; user {} has d={} e={} (run step 1 first)",
                m + 1,
                u + 1,
                before.d[u],
                before.e[u]
            )));
        }
        return Err(Error::InternalConsistency(format!(
            "no balancing weights exist for step 2 at user {}",
            m + 1
        )));
    };

    let mut next = scheme.clone();
    let mut added = Vec::with_capacity(beta.len());
    for &(row, w) in &alpha {
        next.sub(row, w);
    }
    for &((i, set), w) in &beta {
        next.sub((i, set), w);
        next.add(i, set.with(i), w);
        added.push(((i, set.with(i)), w));
    }
    let after = de_of(&next);
    let coefficients_ok = (0..scheme.k).all(|u| {
        if u == m {
            after.d[u] == before.e[u] && after.e[u] == before.e[u]
        } else {
            after.d[u] == before.d[u] && after.e[u] == before.e[u]
        }
    });
    let mut removed = alpha;
    removed.extend(beta);
    let cert = StepCertificate {
        user: m,
        rhs_before: scheme.rhs(table),
        rhs_after: next.rhs(table),
        before,
        after,
        removed,
        added,
        coefficients_ok,
    };
    if !cert.coefficients_ok {
        return Err(Error::InternalConsistency(format!("step 2 bookkeeping failed at user {}", m + 1)));
    }
    Ok((next, cert))
}

fn check_user(scheme: &CoefficientScheme, m: usize) -> Result<()> {
    if m >= scheme.k {
        return Err(Error::Domain(format!("user {} outside 1..={}", m + 1, scheme.k)));
    }
    Ok(())
}

/// Result of [`normalize_traced`].
#[derive(Debug, Clone, PartialEq)]
pub struct Normalization {
    pub scheme: CoefficientScheme,
    pub step1: Vec<StepCertificate>,
    pub step2: Vec<StepCertificate>,
}

impl Normalization {
    pub fn certificates(&self) -> impl Iterator<Item = &StepCertificate> {
        self.step1.iter().chain(&self.step2)
    }
}

/// Runs step 1 for every user with `e > d`, then step 2 for every user with
/// `d > e`, both in ascending user order.
pub fn normalize_traced(scheme: &CoefficientScheme, table: &EntropyTable) -> Result<Normalization> {
    let mut current = scheme.clone();
    let mut step1 = Vec::new();
    for m in 0..scheme.k {
        let de = de_of(&current);
        if de.e[m] > de.d[m] {
            let (next, cert) = step1_reduce(&current, m, table)?;
            current = next;
            step1.push(cert);
        }
    }
    let mut step2 = Vec::new();
    for m in 0..scheme.k {
        let de = de_of(&current);
        if de.d[m] > de.e[m] {
            let (next, cert) = step2_reduce(&current, m, table)?;
            current = next;
            step2.push(cert);
        }
    }
    let end = de_of(&current);
    if !end.balanced() || end.min() != de_of(scheme).min() {
        return Err(Error::InternalConsistency("normalization did not reach d = e".into()));
    }
    Ok(Normalization {
        scheme: current,
        step1,
        step2,
    })
}

pub fn normalize(scheme: &CoefficientScheme, table: &EntropyTable) -> Result<CoefficientScheme> {
    Ok(normalize_traced(scheme, table)?.scheme)
}
