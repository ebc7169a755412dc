use std::fmt;

use serde::Serialize;

/// Unordered tail `i_1, ..., i_{s-1}` of a coefficient index, stored as
/// `(index, multiplicity)` pairs with strictly increasing indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct IndexMultiset {
    entries: Vec<(usize, usize)>,
}

impl IndexMultiset {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        indices.into_iter().fold(Self::empty(), |m, j| m.with(j))
    }

    /// Counts over an ordered index list (`counts[a]` copies of `indices[a]`).
    pub(crate) fn from_counts(indices: &[usize], counts: &[u16]) -> Self {
        let entries = indices.iter().zip(counts).filter(|(_, &c)| c > 0).map(|(&j, &c)| (j, c as usize)).collect();
        Self { entries }
    }

    /// Add one copy of `index`.
    pub fn with(mut self, index: usize) -> Self {
        match self.entries.binary_search_by_key(&index, |&(j, _)| j) {
            Ok(k) => self.entries[k].1 += 1,
            Err(k) => self.entries.insert(k, (index, 1)),
        }
        self
    }

    pub fn entries(&self) -> &[(usize, usize)] {
        &self.entries
    }

    /// Total multiplicity, `s - 1`.
    pub fn len(&self) -> usize {
        self.entries.iter().map(|&(_, c)| c).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn count(&self, index: usize) -> usize {
        self.entries.binary_search_by_key(&index, |&(j, _)| j).map_or(0, |k| self.entries[k].1)
    }

    /// `α^l` over the string `root, i_1, ..., i_{s-1}`.
    pub fn alpha(&self, root: usize, l: usize) -> usize {
        self.count(l) + usize::from(l == root)
    }

    /// Indices with repetition, in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().flat_map(|&(j, c)| std::iter::repeat_n(j, c))
    }
}

impl fmt::Display for IndexMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|j| (j + 1).to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}
