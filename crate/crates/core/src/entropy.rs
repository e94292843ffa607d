//! Exact entropies of channel outputs under product input distributions.
//!
//! Everything is computed by enumerating the joint pmf of all inputs, in
//! bits, with `0 log 0 = 0`.

use std::collections::HashMap;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{tuples, ChannelSpec};
use crate::error::{Error, Result};
use crate::subset::UserSet;

const SUM_TOL: f64 = 1e-12;

/// Product distribution over the users' inputs; `p[i][x]` is `P(X_i = x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDistribution {
    p: Vec<Vec<f64>>,
}

impl InputDistribution {
    pub fn new(p: Vec<Vec<f64>>) -> Result<Self> {
        for (i, row) in p.iter().enumerate() {
            if row.iter().any(|&q| q.is_nan() || q < 0.0 || !q.is_finite()) {
                return Err(Error::Domain(format!("user {} has a negative or non-finite probability", i + 1)));
            }
            let total: f64 = row.iter().sum();
            if (total - 1.0).abs() > SUM_TOL {
                return Err(Error::Domain(format!("probabilities of user {} sum to {total}", i + 1)));
            }
        }
        Ok(InputDistribution { p })
    }

    pub fn uniform(sizes: &[usize]) -> Self {
        InputDistribution {
            p: sizes.iter().map(|&n| vec![1.0 / n as f64; n]).collect(),
        }
    }

    /// Every user sends symbol 0 with certainty.
    pub fn point_mass(sizes: &[usize]) -> Self {
        InputDistribution {
            p: sizes
                .iter()
                .map(|&n| {
                    let mut row = vec![0.0; n];
                    row[0] = 1.0;
                    row
                })
                .collect(),
        }
    }

    /// Random distribution with every probability at least `floor / n`.
    pub fn random_full_support<R: Rng + ?Sized>(rng: &mut R, sizes: &[usize]) -> Self {
        let p = sizes
            .iter()
            .map(|&n| {
                let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
                let total: f64 = raw.iter().sum();
                let mut row: Vec<f64> = raw.iter().map(|r| r / total).collect();
                // Push the rounding residue into the last entry.
                let head: f64 = row[..n - 1].iter().sum();
                row[n - 1] = 1.0 - head;
                row
            })
            .collect();
        InputDistribution { p }
    }

    pub fn probabilities(&self) -> &[Vec<f64>] {
        &self.p
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Raw {
            p: Vec<Vec<f64>>,
        }
        let raw: Raw = serde_json::from_str(text)?;
        Self::new(raw.p)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("distribution serializes")
    }

    fn check_against(&self, spec: &ChannelSpec) -> Result<()> {
        let dims: Vec<usize> = self.p.iter().map(Vec::len).collect();
        if dims != spec.x_sizes() {
            return Err(Error::Domain(format!(
                "distribution shape {dims:?} does not match alphabets {:?}",
                spec.x_sizes()
            )));
        }
        Ok(())
    }
}

/// One point of the joint input pmf with everything derived from it.
struct State {
    prob: f64,
    xs: Vec<usize>,
    /// Interference alphabet positions, one per user.
    vs: Vec<usize>,
    ys: Vec<u32>,
}

fn joint_states(spec: &ChannelSpec, dist: &InputDistribution) -> Result<Vec<State>> {
    dist.check_against(spec)?;
    let k = spec.k();
    let states = tuples(spec.x_sizes())
        .filter_map(|xs| {
            let prob: f64 = xs.iter().enumerate().map(|(i, &x)| dist.p[i][x]).product();
            if prob <= 0.0 {
                return None;
            }
            let vs = (0..k).map(|j| spec.interference_index(j, xs[j])).collect();
            let ys = (0..k).map(|i| spec.output_for_inputs(i, &xs)).collect();
            Some(State { prob, xs, vs, ys })
        })
        .collect();
    Ok(states)
}

/// `H(A | B)` from `(b, a, p)` samples: `sum p(a,b) log2(p(b) / p(a,b))`.
fn conditional_entropy<B, A>(samples: impl Iterator<Item = (B, A, f64)>) -> f64
where
    B: std::hash::Hash + Eq,
    A: std::hash::Hash + Eq,
{
    let mut groups: HashMap<B, HashMap<A, f64>> = HashMap::new();
    for (b, a, p) in samples {
        *groups.entry(b).or_default().entry(a).or_default() += p;
    }
    let mut h = 0.0;
    for inner in groups.values() {
        let pb: f64 = inner.values().sum();
        for &pab in inner.values() {
            if pab > 0.0 {
                h += pab * (pb / pab).log2();
            }
        }
    }
    h.max(0.0)
}

fn pick(vs: &[usize], set: UserSet) -> Vec<usize> {
    set.iter().map(|j| vs[j]).collect()
}

/// `H(Y_i | V_T)` for every receiver `i` and every subset `T`, plus `H(V_j)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyTable {
    k: usize,
    /// `cond[i][T.mask()]`
    cond: Vec<Vec<f64>>,
    h_v: Vec<f64>,
}

impl EntropyTable {
    pub fn k(&self) -> usize {
        self.k
    }

    /// `H(Y_i | V_T)` in bits.
    pub fn cond(&self, i: usize, given: UserSet) -> f64 {
        self.cond[i][given.mask() as usize]
    }

    /// `H(Y_i | V_{M^c})`, the bound attached to common-rate set `M` at receiver `i`.
    pub fn bound(&self, i: usize, m: UserSet) -> f64 {
        self.cond(i, m.complement(self.k))
    }

    pub fn h_y(&self, i: usize) -> f64 {
        self.cond(i, UserSet::EMPTY)
    }

    pub fn h_v(&self, j: usize) -> f64 {
        self.h_v[j]
    }

    /// Table with every entry zero, as produced by deterministic inputs.
    pub fn zeros(k: usize) -> Self {
        EntropyTable {
            k,
            cond: vec![vec![0.0; 1 << k]; k],
            h_v: vec![0.0; k],
        }
    }
}

pub fn build_entropy_table(spec: &ChannelSpec, dist: &InputDistribution) -> Result<EntropyTable> {
    let states = joint_states(spec, dist)?;
    let k = spec.k();
    let cond = (0..k)
        .map(|i| {
            UserSet::all(k)
                .map(|t| conditional_entropy(states.iter().map(|s| (pick(&s.vs, t), s.ys[i], s.prob))))
                .collect()
        })
        .collect();
    let h_v = (0..k)
        .map(|j| conditional_entropy(states.iter().map(|s| ((), s.vs[j], s.prob))))
        .collect();
    Ok(EntropyTable { k, cond, h_v })
}

/// Joint entropy `H(V_S)` computed from the joint pmf.
pub fn joint_interference_entropy(spec: &ChannelSpec, dist: &InputDistribution, set: UserSet) -> Result<f64> {
    let states = joint_states(spec, dist)?;
    Ok(conditional_entropy(states.iter().map(|s| ((), pick(&s.vs, set), s.prob))))
}

/// Both sides of `H(Y_i | X_i) = sum_{j != i} H(V_j)` for one receiver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityGap {
    pub receiver: usize,
    pub h_y_given_x: f64,
    pub sum_h_v: f64,
}

impl IdentityGap {
    pub fn gap(&self) -> f64 {
        (self.h_y_given_x - self.sum_h_v).abs()
    }
}

pub fn injectivity_identity_gaps(spec: &ChannelSpec, dist: &InputDistribution) -> Result<Vec<IdentityGap>> {
    let states = joint_states(spec, dist)?;
    let k = spec.k();
    let h_v: Vec<f64> = (0..k)
        .map(|j| conditional_entropy(states.iter().map(|s| ((), s.vs[j], s.prob))))
        .collect();
    Ok((0..k)
        .map(|i| IdentityGap {
            receiver: i,
            h_y_given_x: conditional_entropy(states.iter().map(|s| (s.xs[i], s.ys[i], s.prob))),
            sum_h_v: (0..k).filter(|&j| j != i).map(|j| h_v[j]).sum(),
        })
        .collect())
}

/// True iff `|H(Y_i | X_i) - sum_{j != i} H(V_j)| <= tol` at every receiver.
pub fn check_injectivity_identity(spec: &ChannelSpec, dist: &InputDistribution, tol: f64) -> Result<bool> {
    Ok(injectivity_identity_gaps(spec, dist)?.iter().all(|g| g.gap() <= tol))
}
