//! Counted multisets over a totally ordered domain.
//!
//! Multiplicities are stored in a `BTreeMap`, so iteration order (and the
//! `Display` form) is canonical. Zero multiplicities are never stored.

use std::collections::btree_map::{self, BTreeMap};
use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Multiset<T: Ord> {
    counts: BTreeMap<T, u64>,
    total: u64,
}

impl<T: Ord> Default for Multiset<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Ord> Multiset<T> {
    pub fn new() -> Self {
        Multiset {
            counts: BTreeMap::new(),
            total: 0,
        }
    }

    pub fn insert(&mut self, item: T) {
        self.insert_n(item, 1);
    }

    /// Adds `n` copies of `item`. Adding zero copies is a no-op.
    pub fn insert_n(&mut self, item: T, n: u64) {
        if n == 0 {
            return;
        }
        *self.counts.entry(item).or_insert(0) += n;
        self.total += n;
    }

    /// Removes one occurrence of `item`; returns false if it was absent.
    pub fn remove_one(&mut self, item: &T) -> bool {
        match self.counts.get_mut(item) {
            Some(c) if *c > 1 => {
                *c -= 1;
            }
            Some(_) => {
                self.counts.remove(item);
            }
            None => return false,
        }
        self.total -= 1;
        true
    }

    /// Multiplicity of `item` (its characteristic function value).
    pub fn count(&self, item: &T) -> u64 {
        self.counts.get(item).copied().unwrap_or(0)
    }

    pub fn contains(&self, item: &T) -> bool {
        self.counts.contains_key(item)
    }

    /// Multiset cardinality: the sum of all multiplicities.
    pub fn cardinality(&self) -> u64 {
        self.total
    }

    /// Number of distinct elements.
    pub fn support_len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    /// Distinct elements with their multiplicities, in ascending order.
    pub fn iter(&self) -> btree_map::Iter<'_, T, u64> {
        self.counts.iter()
    }

    /// All occurrences, each element repeated by its multiplicity.
    pub fn occurrences(&self) -> impl Iterator<Item = &T> + '_ {
        self.counts
            .iter()
            .flat_map(|(k, &c)| std::iter::repeat_n(k, c as usize))
    }

    /// `self ⊆ other` as multisets.
    pub fn is_submultiset_of(&self, other: &Self) -> bool {
        self.counts.iter().all(|(k, &c)| c <= other.count(k))
    }

    /// Cardinality of `self ∩ other` without materializing it.
    pub fn intersection_cardinality(&self, other: &Self) -> u64 {
        let (small, large) = if self.support_len() <= other.support_len() {
            (self, other)
        } else {
            (other, self)
        };
        small
            .counts
            .iter()
            .map(|(k, &c)| c.min(large.count(k)))
            .sum()
    }
}

impl<T: Ord + Clone> Multiset<T> {
    /// Disjoint union: multiplicities add.
    pub fn sum(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, &c) in &other.counts {
            out.insert_n(k.clone(), c);
        }
        out
    }

    /// Intersection: pointwise minimum of multiplicities.
    pub fn intersection(&self, other: &Self) -> Self {
        let mut out = Multiset::new();
        for (k, &c) in &self.counts {
            out.insert_n(k.clone(), c.min(other.count(k)));
        }
        out
    }

    /// Clamped difference: pointwise `max(0, a - b)`.
    pub fn difference(&self, other: &Self) -> Self {
        let mut out = Multiset::new();
        for (k, &c) in &self.counts {
            out.insert_n(k.clone(), c.saturating_sub(other.count(k)));
        }
        out
    }

    /// Applies `f` to every occurrence, merging multiplicities of collisions.
    pub fn map<U: Ord, F: FnMut(&T) -> U>(&self, mut f: F) -> Multiset<U> {
        let mut out = Multiset::new();
        for (k, &c) in &self.counts {
            out.insert_n(f(k), c);
        }
        out
    }
}

impl<T: Ord> FromIterator<T> for Multiset<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut out = Multiset::new();
        out.extend(iter);
        out
    }
}

impl<T: Ord> Extend<T> for Multiset<T> {
    fn extend<I: IntoIterator<Item = T>>(&mut self, iter: I) {
        for item in iter {
            self.insert(item);
        }
    }
}

impl<T: Ord + fmt::Debug> fmt::Debug for Multiset<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.occurrences()).finish()
    }
}

/// Canonical form, e.g. `{1,1,2,8,8,8}`.
impl<T: Ord + fmt::Display> fmt::Display for Multiset<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, item) in self.occurrences().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{item}")?;
        }
        f.write_str("}")
    }
}
