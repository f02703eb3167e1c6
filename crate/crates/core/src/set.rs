//! Fixed-universe vertex subsets backed by packed 64-bit words.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[inline]
pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

/// A subset of `{0, .., universe-1}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VertexSet {
    universe: usize,
    words: Vec<u64>,
}

impl VertexSet {
    pub fn empty(universe: usize) -> Self {
        VertexSet {
            universe,
            words: vec![0; words_for(universe)],
        }
    }

    pub fn full(universe: usize) -> Self {
        let mut set = Self::empty(universe);
        for w in set.words.iter_mut() {
            *w = u64::MAX;
        }
        set.trim();
        set
    }

    pub fn singleton(universe: usize, v: usize) -> Result<Self> {
        let mut set = Self::empty(universe);
        set.try_insert(v)?;
        Ok(set)
    }

    /// Builds a set from vertex indices, rejecting anything outside the universe.
    pub fn from_vertices<I>(universe: usize, vertices: I) -> Result<Self>
    where
        I: IntoIterator<Item = usize>,
    {
        let mut set = Self::empty(universe);
        for v in vertices {
            set.try_insert(v)?;
        }
        Ok(set)
    }

    pub(crate) fn from_words(universe: usize, words: Vec<u64>) -> Self {
        debug_assert_eq!(words.len(), words_for(universe));
        let mut set = VertexSet { universe, words };
        set.trim();
        set
    }

    fn trim(&mut self) {
        let rem = self.universe % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    #[inline]
    pub fn contains(&self, v: usize) -> bool {
        v < self.universe && (self.words[v >> 6] >> (v & 63)) & 1 == 1
    }

    pub fn try_insert(&mut self, v: usize) -> Result<()> {
        if v >= self.universe {
            return Err(Error::input(format!(
                "vertex {v} outside universe of size {}",
                self.universe
            )));
        }
        self.words[v >> 6] |= 1u64 << (v & 63);
        Ok(())
    }

    /// Inserts `v`; panics if `v` is outside the universe.
    pub fn insert(&mut self, v: usize) {
        assert!(v < self.universe, "vertex {v} outside universe");
        self.words[v >> 6] |= 1u64 << (v & 63);
    }

    pub fn remove(&mut self, v: usize) {
        if v < self.universe {
            self.words[v >> 6] &= !(1u64 << (v & 63));
        }
    }

    pub fn toggle(&mut self, v: usize) {
        assert!(v < self.universe, "vertex {v} outside universe");
        self.words[v >> 6] ^= 1u64 << (v & 63);
    }

    pub fn iter(&self) -> Iter<'_> {
        Iter {
            words: &self.words,
            index: 0,
            current: self.words.first().copied().unwrap_or(0),
        }
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    fn zip_with(&self, other: &Self, op: impl Fn(u64, u64) -> u64) -> Self {
        assert_eq!(self.universe, other.universe, "universe mismatch");
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(&a, &b)| op(a, b))
            .collect();
        VertexSet::from_words(self.universe, words)
    }

    pub fn union(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a & !b)
    }

    pub fn complement(&self) -> Self {
        let words = self.words.iter().map(|w| !w).collect();
        VertexSet::from_words(self.universe, words)
    }

    pub fn intersection_len(&self, other: &Self) -> usize {
        assert_eq!(self.universe, other.universe, "universe mismatch");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

pub struct Iter<'a> {
    words: &'a [u64],
    index: usize,
    current: u64,
}

impl Iterator for Iter<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        loop {
            if self.current != 0 {
                let bit = self.current.trailing_zeros() as usize;
                self.current &= self.current - 1;
                return Some(self.index * 64 + bit);
            }
            self.index += 1;
            self.current = *self.words.get(self.index)?;
        }
    }
}

impl<'a> IntoIterator for &'a VertexSet {
    type Item = usize;
    type IntoIter = Iter<'a>;

    fn into_iter(self) -> Iter<'a> {
        self.iter()
    }
}

// Serialized as a sorted vertex list; the universe travels separately.
impl Serialize for VertexSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

/// Deserialization helper: a plain vertex list, bound to a universe later.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq, Eq)]
#[serde(transparent)]
pub struct VertexList(pub Vec<usize>);

impl VertexList {
    pub fn bind(&self, universe: usize) -> Result<VertexSet> {
        VertexSet::from_vertices(universe, self.0.iter().copied())
    }
}

impl<'de> Deserialize<'de> for VertexSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let list = Vec::<usize>::deserialize(deserializer)?;
        let universe = list.iter().max().map_or(0, |m| m + 1);
        VertexSet::from_vertices(universe, list).map_err(serde::de::Error::custom)
    }
}
