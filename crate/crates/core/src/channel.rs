//! Finite-alphabet symmetric deterministic interference channels.
//!
//! Transmitter `i` sends `x_i` and every other receiver sees the same
//! interference symbol `v_i = g_i(x_i)`. Receiver `i` observes
//! `y_i = f_i(x_i, v_j for j != i)`.
//!
//! The interference alphabet of user `j` is the image of `g_j`, sorted
//! ascending. Receiver tables `f_i` are indexed by `x_i` and by a mixed-radix
//! code over the other users' interference alphabets. Users are taken in
//! increasing order, skipping `i`, and the lowest-index user is the most
//! significant digit.

use std::collections::HashMap;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// On-disk form of a channel, see [`ChannelSpec::from_file`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelFile {
    #[serde(rename = "K")]
    pub k: usize,
    pub x_alphabet_sizes: Vec<usize>,
    pub g: Vec<Vec<u32>>,
    pub f: Vec<Vec<Vec<u32>>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelSpec {
    x_sizes: Vec<usize>,
    g: Vec<Vec<u32>>,
    f: Vec<Vec<Vec<u32>>>,
    images: Vec<Vec<u32>>,
    /// `g_pos[j][x]` is the position of `g_j(x)` inside `images[j]`.
    g_pos: Vec<Vec<usize>>,
}

impl ChannelSpec {
    pub fn new(x_sizes: Vec<usize>, g: Vec<Vec<u32>>, f: Vec<Vec<Vec<u32>>>) -> Result<Self> {
        let k = x_sizes.len();
        if k < 2 {
            return Err(Error::Structural(format!("need at least 2 users, got {k}")));
        }
        if let Some(i) = x_sizes.iter().position(|&s| s == 0) {
            return Err(Error::Structural(format!("user {} has an empty input alphabet", i + 1)));
        }
        if g.len() != k || f.len() != k {
            return Err(Error::Structural(format!(
                "expected {k} g and f tables, got {} and {}",
                g.len(),
                f.len()
            )));
        }
        let mut images = Vec::with_capacity(k);
        let mut g_pos = Vec::with_capacity(k);
        for (i, table) in g.iter().enumerate() {
            if table.len() != x_sizes[i] {
                return Err(Error::Structural(format!(
                    "g table of user {} has {} entries, alphabet has {}",
                    i + 1,
                    table.len(),
                    x_sizes[i]
                )));
            }
            let mut image = table.clone();
            image.sort_unstable();
            image.dedup();
            g_pos.push(
                table
                    .iter()
                    .map(|v| image.binary_search(v).expect("value is in its own image"))
                    .collect(),
            );
            images.push(image);
        }
        for (i, table) in f.iter().enumerate() {
            if table.len() != x_sizes[i] {
                return Err(Error::Structural(format!(
                    "f table of receiver {} has {} rows, alphabet has {}",
                    i + 1,
                    table.len(),
                    x_sizes[i]
                )));
            }
            let width: usize = (0..k).filter(|&j| j != i).map(|j| images[j].len()).product();
            if let Some(x) = table.iter().position(|row| row.len() != width) {
                return Err(Error::Structural(format!(
                    "f table of receiver {} row x={} has {} entries, expected {}",
                    i + 1,
                    x,
                    table[x].len(),
                    width
                )));
            }
        }
        Ok(ChannelSpec {
            x_sizes,
            g,
            f,
            images,
            g_pos,
        })
    }

    /// Builds a channel from closures. `f(i, x_i, v)` receives the interference
    /// symbols of the other users in increasing user order.
    pub fn from_fns(
        x_sizes: Vec<usize>,
        g: impl Fn(usize, usize) -> u32,
        f: impl Fn(usize, usize, &[u32]) -> u32,
    ) -> Result<Self> {
        let k = x_sizes.len();
        let g_tables: Vec<Vec<u32>> = (0..k)
            .map(|i| (0..x_sizes[i]).map(|x| g(i, x)).collect())
            .collect();
        let images: Vec<Vec<u32>> = g_tables
            .iter()
            .map(|t| {
                let mut im = t.clone();
                im.sort_unstable();
                im.dedup();
                im
            })
            .collect();
        let f_tables = (0..k)
            .map(|i| {
                let others: Vec<&Vec<u32>> = (0..k).filter(|&j| j != i).map(|j| &images[j]).collect();
                (0..x_sizes[i])
                    .map(|x| {
                        tuples(&others.iter().map(|im| im.len()).collect::<Vec<_>>())
                            .map(|digits| {
                                let v: Vec<u32> =
                                    digits.iter().zip(&others).map(|(&d, im)| im[d]).collect();
                                f(i, x, &v)
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        ChannelSpec::new(x_sizes, g_tables, f_tables)
    }

    pub fn from_file_repr(file: ChannelFile) -> Result<Self> {
        if file.x_alphabet_sizes.len() != file.k {
            return Err(Error::Structural(format!(
                "K={} but {} alphabet sizes given",
                file.k,
                file.x_alphabet_sizes.len()
            )));
        }
        ChannelSpec::new(file.x_alphabet_sizes, file.g, file.f)
    }

    pub fn to_file_repr(&self) -> ChannelFile {
        ChannelFile {
            k: self.k(),
            x_alphabet_sizes: self.x_sizes.clone(),
            g: self.g.clone(),
            f: self.f.clone(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_file_repr(serde_json::from_str(text)?)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file_repr()).expect("channel serializes")
    }

    pub fn k(&self) -> usize {
        self.x_sizes.len()
    }

    pub fn x_sizes(&self) -> &[usize] {
        &self.x_sizes
    }

    /// Sorted interference alphabet `image(g_j)` of user `j`.
    pub fn interference_alphabet(&self, j: usize) -> &[u32] {
        &self.images[j]
    }

    pub fn interference_of(&self, i: usize, x: usize) -> Result<u32> {
        self.check_input(i, x)?;
        Ok(self.g[i][x])
    }

    /// Position of `g_i(x)` in user `i`'s interference alphabet. No bounds checks.
    pub(crate) fn interference_index(&self, i: usize, x: usize) -> usize {
        self.g_pos[i][x]
    }

    pub fn output_of(&self, i: usize, x_i: usize, v_others: &[u32]) -> Result<u32> {
        self.check_input(i, x_i)?;
        if v_others.len() != self.k() - 1 {
            return Err(Error::Domain(format!(
                "receiver {} takes {} interference symbols, got {}",
                i + 1,
                self.k() - 1,
                v_others.len()
            )));
        }
        let mut code = 0;
        for (j, &v) in self.others(i).zip(v_others) {
            let pos = self.images[j].binary_search(&v).map_err(|_| {
                Error::Domain(format!("interference symbol {v} is not attainable for user {}", j + 1))
            })?;
            code = code * self.images[j].len() + pos;
        }
        Ok(self.f[i][x_i][code])
    }

    /// Output of receiver `i` when the users send the full input tuple `xs`.
    pub(crate) fn output_for_inputs(&self, i: usize, xs: &[usize]) -> u32 {
        let code = self
            .others(i)
            .fold(0, |acc, j| acc * self.images[j].len() + self.g_pos[j][xs[j]]);
        self.f[i][xs[i]][code]
    }

    fn others(&self, i: usize) -> impl Iterator<Item = usize> {
        (0..self.k()).filter(move |&j| j != i)
    }

    fn check_input(&self, i: usize, x: usize) -> Result<()> {
        if i >= self.k() {
            return Err(Error::Domain(format!("user {} does not exist (K={})", i + 1, self.k())));
        }
        if x >= self.x_sizes[i] {
            return Err(Error::Domain(format!(
                "input symbol {x} outside alphabet of user {} (size {})",
                i + 1,
                self.x_sizes[i]
            )));
        }
        Ok(())
    }
}

/// Every digit vector of a mixed-radix counter, most significant digit first.
pub(crate) fn tuples(radices: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    let total: usize = radices.iter().product();
    (0..total).map(move |mut code| {
        let mut digits = vec![0; radices.len()];
        for (d, &r) in digits.iter_mut().zip(radices).rev() {
            *d = code % r;
            code /= r;
        }
        digits
    })
}

/// Two attainable interference tuples that receiver `receiver` cannot tell
/// apart when its own input is `x`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Collision {
    pub receiver: usize,
    pub x: usize,
    pub first: Vec<u32>,
    pub second: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InjectivityReport {
    pub is_injective: bool,
    pub violations: Vec<Collision>,
}

/// Exhaustively checks that every receiver can recover the other users'
/// interference from its own input and output.
///
/// Each colliding tuple is reported against the first tuple (in mixed-radix
/// order) that produced the same output.
pub fn validate_injectivity(spec: &ChannelSpec) -> InjectivityReport {
    let mut violations = Vec::new();
    for i in 0..spec.k() {
        let others: Vec<usize> = spec.others(i).collect();
        let radices: Vec<usize> = others.iter().map(|&j| spec.images[j].len()).collect();
        for x in 0..spec.x_sizes[i] {
            let mut seen: HashMap<u32, Vec<u32>> = HashMap::new();
            for (code, digits) in tuples(&radices).enumerate() {
                let v: Vec<u32> = digits
                    .iter()
                    .zip(&others)
                    .map(|(&d, &j)| spec.images[j][d])
                    .collect();
                let y = spec.f[i][x][code];
                match seen.get(&y) {
                    Some(first) => violations.push(Collision {
                        receiver: i,
                        x,
                        first: first.clone(),
                        second: v,
                    }),
                    None => {
                        seen.insert(y, v);
                    }
                }
            }
        }
    }
    InjectivityReport {
        is_injective: violations.is_empty(),
        violations,
    }
}

/// Two-user binary channel with identity interference and `y_i = x_i XOR v_j`.
pub fn xor_channel() -> ChannelSpec {
    ChannelSpec::from_fns(vec![2, 2], |_, x| x as u32, |_, x, v| x as u32 ^ v[0])
        .expect("valid channel")
}

/// Binary parity channel `y_i = x_i XOR (XOR of all v_j)`; not injective for K >= 3.
pub fn parity_channel(k: usize) -> ChannelSpec {
    ChannelSpec::from_fns(
        vec![2; k],
        |_, x| x as u32,
        |_, x, v| v.iter().fold(x as u32, |acc, &b| acc ^ b),
    )
    .expect("valid channel")
}

/// Two-user binary channel that delivers the pair `(x_i, v_j)` as symbol `2 x_i + v_j`.
pub fn product_channel() -> ChannelSpec {
    ChannelSpec::from_fns(vec![2, 2], |_, x| x as u32, |_, x, v| 2 * x as u32 + v[0])
        .expect("valid channel")
}

/// Samples an injective channel with `k` users and alphabets of size
/// `2..=max_x`. For each `x_i` the receiver map is a random injection of
/// the interference tuples into a small output alphabet shared across `x_i`.
pub fn random_injective<R: Rng + ?Sized>(rng: &mut R, k: usize, max_x: usize) -> ChannelSpec {
    let max_x = max_x.max(2);
    let x_sizes: Vec<usize> = (0..k).map(|_| rng.gen_range(2..=max_x)).collect();
    let g: Vec<Vec<u32>> = x_sizes
        .iter()
        .map(|&n| {
            let levels = rng.gen_range(1..=n) as u32;
            let mut table: Vec<u32> = (0..n).map(|x| (x as u32) % levels).collect();
            table.shuffle(rng);
            table
        })
        .collect();
    let images: Vec<usize> = g
        .iter()
        .map(|t| {
            let mut im = t.clone();
            im.sort_unstable();
            im.dedup();
            im.len()
        })
        .collect();
    let f = (0..k)
        .map(|i| {
            let width: usize = (0..k).filter(|&j| j != i).map(|j| images[j]).product();
            let outputs = width + rng.gen_range(0..=2);
            (0..x_sizes[i])
                .map(|_| {
                    let mut symbols: Vec<u32> = (0..outputs as u32).collect();
                    symbols.shuffle(rng);
                    symbols.truncate(width);
                    symbols
                })
                .collect()
        })
        .collect();
    ChannelSpec::new(x_sizes, g, f).expect("generated tables are total")
}
