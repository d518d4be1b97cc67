//! Subsets of the sample labels `{1, …, N}`.

use std::fmt;

use smallvec::SmallVec;

/// A set of sample labels, stored as a bitset.
///
/// Label `k` occupies bit `k - 1`. Trailing zero words are always trimmed, so
/// two sets are equal exactly when their word vectors are equal.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct TypeSet {
    words: SmallVec<[u64; 2]>,
}

impl TypeSet {
    pub fn empty() -> Self {
        Self::default()
    }

    /// The singleton `{label}`. Labels start at 1.
    pub fn singleton(label: u32) -> Self {
        let mut set = Self::empty();
        set.insert(label);
        set
    }

    /// The full label set `{1, …, n}`.
    pub fn full(n: u32) -> Self {
        (1..=n).collect()
    }

    pub fn insert(&mut self, label: u32) {
        assert!(label >= 1, "sample labels start at 1");
        let bit = (label - 1) as usize;
        let word = bit / 64;
        if self.words.len() <= word {
            self.words.resize(word + 1, 0);
        }
        self.words[word] |= 1 << (bit % 64);
    }

    pub fn contains(&self, label: u32) -> bool {
        if label == 0 {
            return false;
        }
        let bit = (label - 1) as usize;
        self.words.get(bit / 64).is_some_and(|w| w & (1 << (bit % 64)) != 0)
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Smallest label, if any.
    pub fn min_label(&self) -> Option<u32> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, w)| **w != 0)
            .map(|(i, w)| (i * 64) as u32 + w.trailing_zeros() + 1)
    }

    /// Largest label, if any.
    pub fn max_label(&self) -> Option<u32> {
        let last = self.words.last()?;
        Some(((self.words.len() - 1) * 64) as u32 + 64 - last.leading_zeros())
    }

    pub fn union(&self, other: &Self) -> Self {
        let (long, short) = if self.words.len() >= other.words.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut words = long.words.clone();
        for (w, o) in words.iter_mut().zip(short.words.iter()) {
            *w |= o;
        }
        Self { words }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let words = self.words.iter().zip(other.words.iter()).map(|(a, b)| a & b).collect();
        Self::trimmed(words)
    }

    pub fn difference(&self, other: &Self) -> Self {
        let words = self
            .words
            .iter()
            .enumerate()
            .map(|(i, a)| a & !other.words.get(i).copied().unwrap_or(0))
            .collect();
        Self::trimmed(words)
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.words.iter().zip(other.words.iter()).all(|(a, b)| a & b == 0)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.difference(other).is_empty()
    }

    /// Labels in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            (0..64u32)
                .filter(move |b| w & (1 << b) != 0)
                .map(move |b| (i * 64) as u32 + b + 1)
        })
    }

    fn trimmed(mut words: SmallVec<[u64; 2]>) -> Self {
        while words.last() == Some(&0) {
            words.pop();
        }
        Self { words }
    }
}

impl FromIterator<u32> for TypeSet {
    fn from_iter<I: IntoIterator<Item = u32>>(iter: I) -> Self {
        let mut set = Self::empty();
        for label in iter {
            set.insert(label);
        }
        set
    }
}

impl PartialOrd for TypeSet {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Lexicographic order on the sorted label sequences.
impl Ord for TypeSet {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.iter().cmp(other.iter())
    }
}

/// Renders as `{1,2,5}`; the empty set is `{}`.
impl fmt::Display for TypeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, label) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{label}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for TypeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
