use std::fmt;

/// A subset of the users `{0, .., K-1}` stored as a bitmask.
///
/// The integer value of the mask is also the subset's rank, so iterating
/// masks `0..1 << K` walks every subset in binary-encoding order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct UserSet(u32);

impl UserSet {
    pub const EMPTY: UserSet = UserSet(0);

    pub const fn from_mask(mask: u32) -> Self {
        UserSet(mask)
    }

    pub fn full(k: usize) -> Self {
        UserSet(((1u64 << k) - 1) as u32)
    }

    pub fn from_users<I: IntoIterator<Item = usize>>(users: I) -> Self {
        UserSet(users.into_iter().fold(0, |acc, u| acc | (1 << u)))
    }

    /// Builds a set from 1-based user labels, as used in the JSON file formats.
    pub fn from_one_based(users: &[usize], k: usize) -> Option<Self> {
        let mut mask = 0;
        for &u in users {
            if u == 0 || u > k {
                return None;
            }
            mask |= 1 << (u - 1);
        }
        Some(UserSet(mask))
    }

    pub fn to_one_based(self) -> Vec<usize> {
        self.iter().map(|u| u + 1).collect()
    }

    pub const fn mask(self) -> u32 {
        self.0
    }

    pub fn contains(self, user: usize) -> bool {
        self.0 >> user & 1 == 1
    }

    pub fn with(self, user: usize) -> Self {
        UserSet(self.0 | 1 << user)
    }

    pub fn without(self, user: usize) -> Self {
        UserSet(self.0 & !(1 << user))
    }

    pub fn complement(self, k: usize) -> Self {
        UserSet(!self.0 & Self::full(k).0)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..32).filter(move |&u| self.contains(u))
    }

    /// Every subset of `{0, .., k-1}` in rank order.
    pub fn all(k: usize) -> impl Iterator<Item = UserSet> {
        (0..1u32 << k).map(UserSet)
    }

    /// Relabels users: user `u` becomes `perm[u]`.
    pub fn permuted(self, perm: &[usize]) -> Self {
        UserSet::from_users(self.iter().map(|u| perm[u]))
    }
}

impl fmt::Debug for UserSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (n, u) in self.iter().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", u + 1)?;
        }
        write!(f, "}}")
    }
}
