//! The capacity region written directly as a facet family.
//!
//! A facet choice is an integer vector `a` plus, for every receiver `i`, a
//! list of `a_i` user sets `S_{i,1..a_i}` such that each user `m` appears in
//! exactly `a_m` of the sets overall. It contributes
//! `sum a_i R_i <= sum_i sum_j H(Y_i | V_{S_{i,j}^c})`.

use std::collections::BTreeMap;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::coeff_scheme::{de_of, CoefficientScheme};
use crate::entropy::EntropyTable;
use crate::error::{Error, Result};
use crate::polytope::{prune_redundant, LinearInequality, Region};
use crate::subset::UserSet;

pub const DEFAULT_FACET_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FacetSpec {
    a: Vec<u32>,
    sets: Vec<Vec<UserSet>>,
}

impl FacetSpec {
    /// Checks list lengths and the per-user membership count.
    pub fn new(a: Vec<u32>, sets: Vec<Vec<UserSet>>) -> Result<Self> {
        let k = a.len();
        if sets.len() != k {
            return Err(Error::Contract(format!("{} set lists for {k} users", sets.len())));
        }
        for (i, list) in sets.iter().enumerate() {
            if list.len() != a[i] as usize {
                return Err(Error::Contract(format!(
                    "receiver {} has {} sets but a_{} = {}",
                    i + 1,
                    list.len(),
                    i + 1,
                    a[i]
                )));
            }
            if let Some(s) = list.iter().find(|s| s.mask() >> k != 0) {
                return Err(Error::Contract(format!("set {s:?} mentions users beyond {k}")));
            }
        }
        let counts = membership_counts(k, &sets);
        if let Some(m) = (0..k).find(|&m| counts[m] != a[m]) {
            return Err(Error::Contract(format!(
                "user {} appears in {} sets but a_{} = {}",
                m + 1,
                counts[m],
                m + 1,
                a[m]
            )));
        }
        Ok(FacetSpec { a, sets })
    }

    /// Builds from 1-based user lists, e.g. `&[&[&[1]], &[]]`.
    pub fn from_lists(a: &[u32], sets: &[&[&[usize]]]) -> Result<Self> {
        let k = a.len();
        let converted = sets
            .iter()
            .map(|list| {
                list.iter()
                    .map(|users| {
                        UserSet::from_one_based(users, k)
                            .ok_or_else(|| Error::Contract(format!("set {users:?} outside 1..={k}")))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        FacetSpec::new(a.to_vec(), converted)
    }

    pub fn k(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &[u32] {
        &self.a
    }

    pub fn sets(&self) -> &[Vec<UserSet>] {
        &self.sets
    }

    /// Same facet with every receiver's sets sorted by rank.
    pub fn canonical(&self) -> FacetSpec {
        let mut sets = self.sets.clone();
        for list in &mut sets {
            list.sort();
        }
        FacetSpec { a: self.a.clone(), sets }
    }

    /// Relabels users: user `u` becomes `perm[u]`.
    pub fn permuted(&self, perm: &[usize]) -> FacetSpec {
        let k = self.k();
        let mut a = vec![0; k];
        let mut sets = vec![Vec::new(); k];
        for i in 0..k {
            a[perm[i]] = self.a[i];
            sets[perm[i]] = self.sets[i].iter().map(|s| s.permuted(perm)).collect();
        }
        FacetSpec { a, sets }.canonical()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        FacetFile::from_json_value(serde_json::from_str(text)?)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_file_repr(&self) -> FacetFile {
        FacetFile {
            a: self.a.clone(),
            s: self
                .sets
                .iter()
                .map(|list| list.iter().map(|s| s.to_one_based()).collect())
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file_repr()).expect("facet serializes")
    }
}

/// On-disk form with 1-based users.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FacetFile {
    pub a: Vec<u32>,
    #[serde(rename = "S")]
    pub s: Vec<Vec<Vec<usize>>>,
}

impl FacetFile {
    fn from_json_value(file: FacetFile) -> Result<FacetSpec> {
        let lists: Vec<Vec<&[usize]>> = file.s.iter().map(|l| l.iter().map(Vec::as_slice).collect()).collect();
        let refs: Vec<&[&[usize]]> = lists.iter().map(Vec::as_slice).collect();
        FacetSpec::from_lists(&file.a, &refs)
    }

    pub fn into_spec(self) -> Result<FacetSpec> {
        Self::from_json_value(self)
    }
}

fn membership_counts(k: usize, sets: &[Vec<UserSet>]) -> Vec<u32> {
    let mut counts = vec![0; k];
    for s in sets.iter().flatten() {
        for m in s.iter() {
            counts[m] += 1;
        }
    }
    counts
}

/// `sum_i sum_j H(Y_i | V_{S_{i,j}^c})`
pub fn facet_rhs(sets: &[Vec<UserSet>], table: &EntropyTable) -> f64 {
    sets.iter()
        .enumerate()
        .flat_map(|(i, list)| list.iter().map(move |&s| table.bound(i, s)))
        .sum()
}

pub fn facet_inequality(fs: &FacetSpec, table: &EntropyTable) -> Result<LinearInequality> {
    if fs.k() != table.k() {
        return Err(Error::Domain(format!("facet for K={} but table for K={}", fs.k(), table.k())));
    }
    Ok(LinearInequality::new(
        fs.a.iter().map(|&a| a as i64).collect(),
        facet_rhs(&fs.sets, table),
    ))
}

/// Default enumeration bound on the entries of `a`.
pub fn default_a_max(k: usize) -> u32 {
    match k {
        0..=2 => 2,
        3 => 4,
        _ => k as u32 + 1,
    }
}

/// Visits every facet choice with `0 <= a_i <= a_max` (not all zero). Sets
/// within a receiver come in nondecreasing rank order, so each multiset
/// shows up once. Returns the number visited, or an overflow error once it
/// passes `cap`.
pub fn for_each_facet(k: usize, a_max: u32, cap: usize, mut visit: impl FnMut(&[u32], &[Vec<UserSet>])) -> Result<usize> {
    if a_max == 0 {
        return Err(Error::Contract("a_max must be at least 1".into()));
    }
    let mut count = 0usize;
    let mut a = vec![0u32; k];
    loop {
        // Odometer over a in lexicographic order.
        let mut pos = k;
        loop {
            if pos == 0 {
                return Ok(count);
            }
            pos -= 1;
            if a[pos] < a_max {
                a[pos] += 1;
                break;
            }
            a[pos] = 0;
        }
        let slots: Vec<usize> = (0..k).flat_map(|i| std::iter::repeat_n(i, a[i] as usize)).collect();
        let mut need = a.clone();
        let mut sets: Vec<Vec<UserSet>> = vec![Vec::new(); k];
        let mut overflow = false;
        fill(k, &slots, 0, &mut need, &mut sets, &mut |s| {
            count += 1;
            if count > cap {
                overflow = true;
                return false;
            }
            visit(&a, s);
            true
        });
        if overflow {
            return Err(Error::FacetOverflow { cap });
        }
    }
}

/// Depth-first fill of `slots`; returns `false` to abort.
fn fill(
    k: usize,
    slots: &[usize],
    pos: usize,
    need: &mut [u32],
    sets: &mut [Vec<UserSet>],
    emit: &mut impl FnMut(&[Vec<UserSet>]) -> bool,
) -> bool {
    if pos == slots.len() {
        return emit(sets);
    }
    let receiver = slots[pos];
    let remaining = (slots.len() - pos - 1) as u32;
    let start = sets[receiver].last().map_or(0, |s| s.mask());
    for mask in start..1u32 << k {
        let s = UserSet::from_mask(mask);
        if s.iter().any(|m| need[m] == 0) {
            continue;
        }
        // Every user not in s must still fit into the slots that follow.
        if (0..k).any(|m| !s.contains(m) && need[m] > remaining) {
            continue;
        }
        for m in s.iter() {
            need[m] -= 1;
        }
        sets[receiver].push(s);
        let go_on = fill(k, slots, pos + 1, need, sets, emit);
        sets[receiver].pop();
        for m in s.iter() {
            need[m] += 1;
        }
        if !go_on {
            return false;
        }
    }
    true
}

/// All facet choices up to `a_max`, materialized.
pub fn enumerate_facet_specs(k: usize, a_max: u32, cap: usize) -> Result<Vec<FacetSpec>> {
    let mut out = Vec::new();
    for_each_facet(k, a_max, cap, |a, sets| {
        out.push(FacetSpec {
            a: a.to_vec(),
            sets: sets.to_vec(),
        })
    })?;
    Ok(out)
}

/// The region cut out by every facet choice up to `a_max`, pruned.
///
/// Choices sharing the same `a` only matter through their smallest
/// right-hand side, so only that one is kept before LP pruning.
pub fn enumerate_facets(table: &EntropyTable, a_max: u32, cap: usize, tol: f64) -> Result<Region> {
    let k = table.k();
    let mut best: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
    for_each_facet(k, a_max, cap, |a, sets| {
        let rhs = facet_rhs(sets, table);
        best.entry(a.to_vec()).and_modify(|r| *r = r.min(rhs)).or_insert(rhs);
    })?;
    let rows = best
        .into_iter()
        .map(|(a, rhs)| LinearInequality::new(a.iter().map(|&x| x as i64).collect(), rhs))
        .collect();
    finish(k, rows, tol)
}

/// The region cut out by an explicit list of facet choices, pruned.
pub fn region_from_facets(table: &EntropyTable, facets: &[FacetSpec], tol: f64) -> Result<Region> {
    let rows = facets
        .iter()
        .map(|fs| facet_inequality(fs, table))
        .collect::<Result<Vec<_>>>()?;
    finish(table.k(), rows, tol)
}

/// Divides rows by their gcd, keeps the smallest right-hand side per
/// left-hand side, adds `R >= 0` and prunes.
fn finish(k: usize, rows: Vec<LinearInequality>, tol: f64) -> Result<Region> {
    let mut best: BTreeMap<Vec<i64>, f64> = BTreeMap::new();
    for q in rows {
        let q = q.reduced();
        best.entry(q.coeffs).and_modify(|r| *r = r.min(q.rhs)).or_insert(q.rhs);
    }
    let rows = best.into_iter().map(|(c, r)| LinearInequality::new(c, r)).collect();
    let mut region = Region::aggregate(k, rows)?;
    region.ensure_nonnegativity();
    let mut pruned = prune_redundant(&region, tol)?;
    pruned.ensure_nonnegativity();
    Ok(pruned)
}

macro_rules! facet {
    ([$($a:expr),*] $([$($set:tt),*])*) => {
        FacetSpec::from_lists(&[$($a),*], &[$(&[$(&$set),*]),*]).expect("preset satisfies its counting constraint")
    };
}

/// Facet choices tabulated for two and three users.
///
/// The three-user list gives one representative per relabelling of the
/// users; [`preset_orbit`] expands it.
pub fn presets(k: usize) -> Result<Vec<FacetSpec>> {
    let e: [usize; 0] = [];
    match k {
        2 => Ok(vec![
            facet!([1, 0] [[1]] []),
            facet!([0, 1] [] [[2]]),
            facet!([1, 1] [e] [[1, 2]]),
            facet!([1, 1] [[1, 2]] [e]),
            facet!([1, 1] [[2]] [[1]]),
            facet!([2, 1] [[1, 2], e] [[1]]),
            facet!([1, 2] [[2]] [[1, 2], e]),
        ]),
        3 => Ok(vec![
            facet!([1, 0, 0] [[1]] [] []),
            facet!([1, 1, 0] [e] [[1, 2]] []),
            facet!([1, 1, 0] [[2]] [[1]] []),
            facet!([2, 1, 0] [[1, 2], e] [[1]] []),
            facet!([1, 1, 1] [[2, 3]] [[1]] [e]),
            facet!([1, 1, 1] [[2]] [[3]] [[1]]),
            facet!([1, 1, 1] [e] [[2, 3]] [[1]]),
            facet!([1, 1, 1] [e] [e] [[1, 2, 3]]),
            facet!([2, 1, 1] [[1, 2, 3], e] [[1]] [e]),
            facet!([2, 1, 1] [[2, 3], e] [[1]] [[1]]),
            facet!([2, 1, 1] [[2], [1, 3]] [e] [[1]]),
            facet!([2, 1, 1] [e, [1, 2]] [[3]] [[1]]),
            facet!([2, 1, 1] [e, [1, 2]] [[1, 3]] [e]),
            facet!([2, 1, 1] [e, [3]] [[1]] [[1, 2]]),
            facet!([2, 1, 1] [e, e] [[1, 2, 3]] [[1]]),
            facet!([2, 1, 1] [e, e] [[1, 3]] [[1, 2]]),
            facet!([3, 1, 1] [e, e, [1, 2, 3]] [[1]] [[1]]),
            facet!([3, 1, 1] [e, e, [1, 3]] [[1]] [[1, 2]]),
            facet!([2, 2, 1] [[1, 2, 3], [2]] [e, e] [[1]]),
            facet!([2, 2, 1] [[1, 2, 3], e] [e, [1]] [[2]]),
            facet!([2, 2, 1] [[1, 2, 3], e] [e, e] [[1, 2]]),
            facet!([2, 2, 1] [[2, 3], e] [e, [1]] [[1, 2]]),
            facet!([2, 2, 1] [[2], [2]] [e, [1, 3]] [[1]]),
            facet!([3, 2, 1] [e, e, [1, 2, 3]] [e, [1]] [[1, 2]]),
            facet!([3, 2, 1] [e, e, [1, 2, 3]] [[1], [1]] [[2]]),
            facet!([3, 2, 1] [e, e, [2, 3]] [[1], [1]] [[1, 2]]),
            facet!([3, 2, 1] [e, e, e] [[1], [1, 2, 3]] [[1, 2]]),
            facet!([4, 2, 1] [e, e, e, [1, 2, 3]] [[1], [1]] [[1, 2]]),
        ]),
        _ => Err(Error::Unsupported(format!("no tabulated facets for K={k}"))),
    }
}

/// Every relabelling of the users applied to every preset, deduplicated.
pub fn preset_orbit(k: usize) -> Result<Vec<FacetSpec>> {
    let base = presets(k)?;
    let mut out: Vec<FacetSpec> = Vec::new();
    for perm in permutations(k) {
        for fs in &base {
            let p = fs.permuted(&perm);
            if !out.contains(&p) {
                out.push(p);
            }
        }
    }
    Ok(out)
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

/// Samples a valid facet choice with entries of `a` in `0..=a_max`: each user
/// `m` is dropped into `a_m` distinct slots out of the `sum a` available.
pub fn random_facet_spec<R: Rng + ?Sized>(rng: &mut R, k: usize, a_max: u32) -> FacetSpec {
    let a: Vec<u32> = (0..k).map(|_| rng.gen_range(0..=a_max)).collect();
    let slots: Vec<usize> = (0..k).flat_map(|i| std::iter::repeat_n(i, a[i] as usize)).collect();
    let mut masks = vec![0u32; slots.len()];
    let mut order: Vec<usize> = (0..slots.len()).collect();
    for m in 0..k {
        order.shuffle(rng);
        for &slot in &order[..a[m] as usize] {
            masks[slot] |= 1 << m;
        }
    }
    let mut sets = vec![Vec::new(); k];
    for (slot, &i) in slots.iter().enumerate() {
        sets[i].push(UserSet::from_mask(masks[slot]));
    }
    FacetSpec::new(a, sets).expect("every user fills exactly a_m slots")
}

/// Unrolls a balanced scheme: receiver `i` gets `c(i, M)` copies of `M`, in rank order.
pub fn scheme_to_facet(scheme: &CoefficientScheme) -> Result<FacetSpec> {
    let de = de_of(scheme);
    if !de.balanced() {
        return Err(Error::Contract(format!("scheme is not balanced: d={:?} e={:?}", de.d, de.e)));
    }
    let mut sets = vec![Vec::new(); scheme.k()];
    for ((i, m), w) in scheme.iter() {
        sets[i].extend(std::iter::repeat_n(m, w as usize));
    }
    let a = de.d.iter().map(|&d| d as u32).collect();
    FacetSpec::new(a, sets)
}

/// `c(i, M)` = number of times `M` appears among receiver `i`'s sets.
pub fn facet_to_scheme(fs: &FacetSpec) -> CoefficientScheme {
    let mut scheme = CoefficientScheme::new(fs.k());
    for (i, list) in fs.sets.iter().enumerate() {
        for &s in list {
            scheme.add(i, s, 1);
        }
    }
    scheme
}

/// With `L = sum a_i` and `phi = [K] \ S`, each user `m` must lie in exactly
/// `L - a_m` of the complements.
pub fn converse_complement_check(fs: &FacetSpec) -> bool {
    let k = fs.k();
    let total: u32 = fs.a.iter().sum();
    let complements: Vec<Vec<UserSet>> = fs
        .sets
        .iter()
        .map(|list| list.iter().map(|s| s.complement(k)).collect())
        .collect();
    let counts = membership_counts(k, &complements);
    (0..k).all(|m| counts[m] == total - fs.a[m])
}
