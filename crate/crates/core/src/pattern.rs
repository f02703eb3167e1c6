//! Labelled template graphs `H` on vertices `0..r` with a designated vertex.

use std::fmt;
use std::io::{BufReader, Read};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{content_lines, parse_usizes};

/// Patterns are small; larger ones make exact counting hopeless anyway.
pub const MAX_PATTERN_VERTICES: usize = 16;

#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawPattern", into = "RawPattern")]
pub struct Pattern {
    r: usize,
    edges: Vec<(usize, usize)>,
    designated: usize,
    neighbors: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPattern {
    r: usize,
    edges: Vec<(usize, usize)>,
    #[serde(default)]
    designated: usize,
}

impl TryFrom<RawPattern> for Pattern {
    type Error = Error;

    fn try_from(raw: RawPattern) -> Result<Self> {
        Pattern::new(raw.r, raw.edges)?.with_designated(raw.designated)
    }
}

impl From<Pattern> for RawPattern {
    fn from(p: Pattern) -> Self {
        RawPattern {
            r: p.r,
            edges: p.edges,
            designated: p.designated,
        }
    }
}

impl fmt::Debug for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pattern(r={}, edges={:?}", self.r, self.edges)?;
        if self.designated != 0 {
            write!(f, ", designated={}", self.designated)?;
        }
        write!(f, ")")
    }
}

impl Pattern {
    /// Edges are normalised to `(i, j)` with `i < j`, sorted and deduplicated.
    pub fn new<I>(r: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if r > MAX_PATTERN_VERTICES {
            return Err(Error::input(format!(
                "pattern has {r} vertices; at most {MAX_PATTERN_VERTICES} supported"
            )));
        }
        let mut list = Vec::new();
        for (i, j) in edges {
            if i >= r || j >= r {
                return Err(Error::input(format!(
                    "pattern edge ({i}, {j}) outside 0..{r}"
                )));
            }
            if i == j {
                return Err(Error::input(format!("pattern self-loop at {i}")));
            }
            list.push((i.min(j), i.max(j)));
        }
        list.sort_unstable();
        list.dedup();
        let mut neighbors = vec![Vec::new(); r];
        for &(i, j) in &list {
            neighbors[i].push(j);
            neighbors[j].push(i);
        }
        for nb in &mut neighbors {
            nb.sort_unstable();
        }
        Ok(Pattern {
            r,
            edges: list,
            designated: 0,
            neighbors,
        })
    }

    pub fn with_designated(mut self, designated: usize) -> Result<Self> {
        if designated >= self.r.max(1) {
            return Err(Error::input(format!(
                "designated vertex {designated} outside 0..{}",
                self.r
            )));
        }
        self.designated = designated;
        Ok(self)
    }

    pub fn single_vertex() -> Self {
        Self::new(1, []).expect("valid")
    }

    pub fn k2() -> Self {
        Self::complete(2)
    }

    pub fn k3() -> Self {
        Self::complete(3)
    }

    pub fn c4() -> Self {
        Self::cycle(4)
    }

    /// Path on three vertices `0-1-2`.
    pub fn p3() -> Self {
        Self::path(3)
    }

    pub fn complete(k: usize) -> Self {
        Self::new(k, (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j)))).expect("valid")
    }

    pub fn cycle(k: usize) -> Self {
        assert!(k >= 3, "cycle needs 3 vertices");
        Self::new(k, (0..k).map(|i| (i, (i + 1) % k))).expect("valid")
    }

    pub fn path(k: usize) -> Self {
        Self::new(k, (1..k).map(|i| (i - 1, i))).expect("valid")
    }

    /// Named presets: `K<k>`, `C<k>`, `P<k>` (path on `k` vertices).
    pub fn from_name(name: &str) -> Result<Self> {
        let bad = || Error::input(format!("unknown pattern preset `{name}`"));
        let mut chars = name.trim().chars();
        let family = chars.next().ok_or_else(bad)?.to_ascii_uppercase();
        let k: usize = chars.as_str().parse().map_err(|_| bad())?;
        if k == 0 || k > MAX_PATTERN_VERTICES {
            return Err(bad());
        }
        match family {
            'K' => Ok(Self::complete(k)),
            'C' if k >= 3 => Ok(Self::cycle(k)),
            'P' => Ok(Self::path(k)),
            _ => Err(bad()),
        }
    }

    /// Parses `r`, an optional `designated k` line, then `i j` edge lines.
    pub fn read<R: Read>(reader: R) -> Result<Self> {
        let mut r = None;
        let mut designated = 0;
        let mut edges = Vec::new();
        for item in content_lines(BufReader::new(reader)) {
            let (line_no, body) = item?;
            if let Some(rest) = body.strip_prefix("designated") {
                designated = parse_usizes(line_no, rest, 1)?[0];
                continue;
            }
            match r {
                None => r = Some(parse_usizes(line_no, &body, 1)?[0]),
                Some(_) => {
                    let ij = parse_usizes(line_no, &body, 2)?;
                    edges.push((ij[0], ij[1]));
                }
            }
        }
        let r = r.ok_or(Error::Parse {
            line: 1,
            message: "missing vertex count".into(),
        })?;
        Self::new(r, edges)?.with_designated(designated)
    }

    pub fn read_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read(file)
    }

    #[inline]
    pub fn r(&self) -> usize {
        self.r
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn designated(&self) -> usize {
        self.designated
    }

    pub fn is_nonempty(&self) -> bool {
        !self.edges.is_empty()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.neighbors[i].len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.neighbors[i].binary_search(&j).is_ok()
    }

    /// Smallest-index vertex of minimum degree.
    pub fn min_degree_vertex(&self) -> Option<usize> {
        (0..self.r).min_by_key(|&i| (self.degree(i), i))
    }

    /// Spanning subgraph keeping only `kept` (each must be an edge of `self`).
    pub fn spanning_subgraph(&self, kept: &[(usize, usize)]) -> Result<Self> {
        for &(i, j) in kept {
            if i >= self.r || j >= self.r || !self.has_edge(i, j) {
                return Err(Error::input(format!(
                    "({i}, {j}) is not an edge of the pattern"
                )));
            }
        }
        Self::new(self.r, kept.iter().copied())?.with_designated(self.designated)
    }

    /// Removes vertex `v`; the returned map sends old indices to new ones.
    pub fn remove_vertex(&self, v: usize) -> (Pattern, Vec<Option<usize>>) {
        let map: Vec<Option<usize>> = (0..self.r)
            .map(|i| match i.cmp(&v) {
                std::cmp::Ordering::Less => Some(i),
                std::cmp::Ordering::Equal => None,
                std::cmp::Ordering::Greater => Some(i - 1),
            })
            .collect();
        let edges = self
            .edges
            .iter()
            .filter_map(|&(i, j)| Some((map[i]?, map[j]?)));
        let pattern = Pattern::new(self.r - 1, edges).expect("sub-pattern is valid");
        (pattern, map)
    }

    /// Merges vertex `j` into `i`. `None` when `ij` is an edge (a loop would
    /// result, and such maps have no image in a simple graph).
    pub fn identify(&self, i: usize, j: usize) -> Option<(Pattern, Vec<usize>)> {
        if i == j || self.has_edge(i, j) {
            return None;
        }
        let shift = |k: usize| if k > j { k - 1 } else { k };
        let map: Vec<usize> = (0..self.r)
            .map(|k| if k == j { shift(i) } else { shift(k) })
            .collect();
        let edges = self.edges.iter().map(|&(a, b)| (map[a], map[b]));
        let pattern = Pattern::new(self.r - 1, edges).expect("identified pattern is valid");
        Some((pattern, map))
    }
}

impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::from_name(s)
    }
}
