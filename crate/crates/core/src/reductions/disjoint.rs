//! Reducing counts over overlapping constraint sets to counts over disjoint
//! ones: three-term overlap splitting and random equitable bipartitions.

use std::cell::Cell;

use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::hom::{hom_count, ConstraintTuple};
use crate::pattern::Pattern;
use crate::sampler::stream_rng;
use crate::set::VertexSet;

/// Three tuples whose counts sum to the count of the original tuple:
/// `(U_i \ U_j, U_j)`, `(U_i ∩ U_j, U_j \ U_i)` and `(U_i ∩ U_j, U_i ∩ U_j)`
/// at positions `(i, j)`, every other position unchanged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OverlapSplit {
    pub target_pair: (usize, usize),
    pub terms: [ConstraintTuple; 3],
}

pub fn overlap_split(tuple: &ConstraintTuple, i: usize, j: usize) -> Result<OverlapSplit> {
    if i == j {
        return Err(Error::input("overlap split needs two distinct positions"));
    }
    if i >= tuple.len() || j >= tuple.len() {
        return Err(Error::input(format!(
            "positions ({i}, {j}) outside a tuple of length {}",
            tuple.len()
        )));
    }
    let (ui, uj) = (tuple.get(i), tuple.get(j));
    let both = ui.intersection(uj);
    let with = |a: VertexSet, b: VertexSet| tuple.replace(i, a).replace(j, b);
    Ok(OverlapSplit {
        target_pair: (i, j),
        terms: [
            with(ui.difference(uj), uj.clone()),
            with(both.clone(), uj.difference(ui)),
            with(both.clone(), both),
        ],
    })
}

/// Homomorphisms counted by `tuple` that send `v_i` and `v_j` to the same
/// vertex. Zero when `ij` is an edge of `H`.
fn diagonal_count(pattern: &Pattern, graph: &Graph, tuple: &ConstraintTuple, i: usize, j: usize) -> Result<u64> {
    let Some((merged, map)) = pattern.identify(i, j) else {
        return Ok(0);
    };
    let mut sets = vec![graph.full_set(); merged.r()];
    for k in 0..pattern.r() {
        if k != j {
            sets[map[k]] = tuple.get(k).clone();
        }
    }
    sets[map[i]] = tuple.get(i).intersection(tuple.get(j));
    hom_count(&merged, graph, &ConstraintTuple::new(sets))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BipartitionOptions {
    pub trials: u64,
    pub seed: u64,
    /// Enumerate every equitable bipartition when `|U|` is at most this.
    pub exact_limit: usize,
}

impl Default for BipartitionOptions {
    fn default() -> Self {
        BipartitionOptions {
            trials: 1000,
            seed: 0,
            exact_limit: 12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BipartitionExpectation {
    pub positions: (usize, usize),
    pub set_size: usize,
    /// `|U|` rounded up to even by the padding vertex.
    pub padded_size: usize,
    pub c_full: u64,
    pub c_diagonal: u64,
    /// Homomorphisms with `φ(v_i) ≠ φ(v_j)`.
    pub c_offdiag: u64,
    /// Off-diagonal count in the padded host (equals `c_offdiag` unless the
    /// padding vertex can host `v_i` or `v_j`).
    pub c_offdiag_padded: u64,
    /// Exact contribution of the padding vertex to the expectation, already
    /// subtracted from `mc_mean` and `exact_small`.
    pub padding_correction: f64,
    pub mc_mean: f64,
    pub mc_stderr: f64,
    pub trials: u64,
    pub seed: u64,
    pub exact_small: Option<f64>,
    /// Sum of counts over all ordered equitable bipartitions of the padded set.
    pub exact_sum: Option<u64>,
    pub bipartitions: Option<u64>,
    /// `m / (4(m-1)) · c_offdiag` with `m` the padded size.
    pub formula: f64,
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// All `k`-subsets of `0..n` as index lists, in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for v in start..n {
            if n - v < k - current.len() {
                break;
            }
            current.push(v);
            rec(v + 1, n, k, current, out);
            current.pop();
        }
    }
    rec(0, n, k, &mut current, &mut out);
    out
}

/// Expected count `E[c(H, G; .., U_1', .., U_2', ..)]` over uniform random
/// equitable bipartitions `U = U_1' ⊎ U_2'` placed at positions `(i, j)`.
///
/// `tuple` must carry the same set `U` at both positions. Odd `|U|` is padded
/// with a fresh isolated vertex that appears in no other constraint set; its
/// contribution is computed exactly and subtracted. For `|U|` within
/// `exact_limit` every bipartition is also enumerated.
pub fn equitable_bipartition_expectation(
    pattern: &Pattern,
    graph: &Graph,
    tuple: &ConstraintTuple,
    (i, j): (usize, usize),
    options: &BipartitionOptions,
) -> Result<BipartitionExpectation> {
    tuple.validate(pattern, graph)?;
    if i == j || i >= tuple.len() || j >= tuple.len() {
        return Err(Error::input("bipartition needs two distinct valid positions"));
    }
    if tuple.get(i) != tuple.get(j) {
        return Err(Error::input("positions i and j must carry the same set"));
    }
    if options.trials == 0 {
        return Err(Error::input("need at least one trial"));
    }
    let set = tuple.get(i).clone();
    let size = set.len();
    if size < 2 {
        return Err(Error::input("bipartition needs |U| >= 2"));
    }
    let c_full = hom_count(pattern, graph, tuple)?;
    let c_diagonal = diagonal_count(pattern, graph, tuple, i, j)?;
    let c_offdiag = c_full - c_diagonal;

    let padded = size % 2 == 1;
    let (host, host_tuple) = if padded {
        let host = graph.with_isolated(1)?;
        let n = host.n();
        let lift = |s: &VertexSet| VertexSet::from_vertices(n, s.iter()).expect("in range");
        let mut sets: Vec<VertexSet> = tuple.sets().iter().map(lift).collect();
        let mut with_dummy = lift(&set);
        with_dummy.insert(n - 1);
        sets[i] = with_dummy.clone();
        sets[j] = with_dummy;
        (host, ConstraintTuple::new(sets))
    } else {
        (graph.clone(), tuple.clone())
    };
    let members = host_tuple.get(i).to_vec();
    let m = members.len();
    let factor = m as f64 / (4.0 * (m as f64 - 1.0));
    let c_offdiag_padded = if padded {
        hom_count(pattern, &host, &host_tuple)? - diagonal_count(pattern, &host, &host_tuple, i, j)?
    } else {
        c_offdiag
    };
    let padding_correction = factor * (c_offdiag_padded as f64 - c_offdiag as f64);

    let hn = host.n();
    let count_split = |first: &[usize]| -> Result<u64> {
        let left = VertexSet::from_vertices(hn, first.iter().copied())?;
        let all = host_tuple.get(i);
        let right = all.difference(&left);
        hom_count(pattern, &host, &host_tuple.replace(i, left).replace(j, right))
    };

    let samples = (0..options.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream_rng(options.seed, t);
            let first: Vec<usize> = index::sample(&mut rng, m, m / 2).iter().map(|k| members[k]).collect();
            count_split(&first).map(|c| c as f64)
        })
        .collect::<Result<Vec<f64>>>()?;
    let trials = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / trials;
    let stderr = if samples.len() > 1 {
        let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (trials - 1.0);
        (var / trials).sqrt()
    } else {
        0.0
    };

    let (exact_small, exact_sum, bipartitions) = if size <= options.exact_limit {
        let splits = combinations(m, m / 2);
        let sum = splits
            .par_iter()
            .map(|idx| {
                let first: Vec<usize> = idx.iter().map(|&k| members[k]).collect();
                count_split(&first)
            })
            .collect::<Result<Vec<u64>>>()?
            .into_iter()
            .sum::<u64>();
        let count = binomial(m as u64, (m / 2) as u64);
        debug_assert_eq!(count as usize, splits.len());
        (
            Some(sum as f64 / count as f64 - padding_correction),
            Some(sum),
            Some(count),
        )
    } else {
        (None, None, None)
    };

    Ok(BipartitionExpectation {
        positions: (i, j),
        set_size: size,
        padded_size: m,
        c_full,
        c_diagonal,
        c_offdiag,
        c_offdiag_padded,
        padding_correction,
        mc_mean: mean - padding_correction,
        mc_stderr: stderr,
        trials: options.trials,
        seed: options.seed,
        exact_small,
        exact_sum,
        bipartitions,
        formula: factor * c_offdiag as f64,
    })
}

/// A counter trusted only on tuples whose sets are pairwise disjoint.
pub trait DisjointOracle {
    fn count(&self, pattern: &Pattern, graph: &Graph, tuple: &ConstraintTuple) -> Result<f64>;
}

/// The exact counter, refusing tuples that are not pairwise disjoint.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactOracle;

impl DisjointOracle for ExactOracle {
    fn count(&self, pattern: &Pattern, graph: &Graph, tuple: &ConstraintTuple) -> Result<f64> {
        if !tuple.pairwise_disjoint() {
            return Err(Error::input("oracle queried on a tuple that is not pairwise disjoint"));
        }
        hom_count(pattern, graph, tuple).map(|c| c as f64)
    }
}

impl<F> DisjointOracle for F
where
    F: Fn(&Pattern, &Graph, &ConstraintTuple) -> Result<f64>,
{
    fn count(&self, pattern: &Pattern, graph: &Graph, tuple: &ConstraintTuple) -> Result<f64> {
        self(pattern, graph, tuple)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DisjointifyOptions {
    pub trials: u64,
    pub seed: u64,
    /// Rescale each bipartition term by `4(m-1)/m` and add the diagonal count
    /// computed exactly, instead of the plain `4 E[..]` whose error is
    /// `O(n^{v(H)-1})`.
    pub exact_corrections: bool,
}

impl Default for DisjointifyOptions {
    fn default() -> Self {
        DisjointifyOptions {
            trials: 1000,
            seed: 0,
            exact_corrections: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DisjointifyEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub trials: u64,
    /// Most overlapping pairs resolved along a single branch.
    pub steps: usize,
    pub oracle_calls: u64,
}

struct Disjointifier<'a, O: ?Sized> {
    pattern: &'a Pattern,
    graph: &'a Graph,
    oracle: &'a O,
    pairs: Vec<(usize, usize)>,
    exact_corrections: bool,
    calls: Cell<u64>,
}

impl<O: DisjointOracle + ?Sized> Disjointifier<'_, O> {
    /// One unbiased sample of the count of `tuple`, given that every pair
    /// before `from` is already disjoint.
    fn sample<R: Rng>(&self, tuple: &ConstraintTuple, from: usize, rng: &mut R, depth: usize, steps: &mut usize) -> Result<f64> {
        let next = (from..self.pairs.len()).find(|&k| {
            let (i, j) = self.pairs[k];
            !tuple.get(i).is_disjoint(tuple.get(j))
        });
        let Some(k) = next else {
            self.calls.set(self.calls.get() + 1);
            *steps = (*steps).max(depth);
            return self.oracle.count(self.pattern, self.graph, tuple);
        };
        let (i, j) = self.pairs[k];
        let split = overlap_split(tuple, i, j)?;
        let mut total = 0.0;
        for term in &split.terms[..2] {
            total += self.sample(term, k + 1, rng, depth + 1, steps)?;
        }
        let shared = split.terms[2].get(i).clone();
        let members = shared.to_vec();
        let m = members.len() + members.len() % 2;
        let left_idx = index::sample(rng, m, m / 2);
        let mut left = VertexSet::empty(self.graph.n());
        let mut right = VertexSet::empty(self.graph.n());
        let in_left: Vec<bool> = {
            let mut flags = vec![false; m];
            for idx in left_idx.iter() {
                flags[idx] = true;
            }
            flags
        };
        for (idx, &v) in members.iter().enumerate() {
            if in_left[idx] {
                left.insert(v);
            } else {
                right.insert(v);
            }
        }
        let halves = split.terms[2].replace(i, left).replace(j, right);
        let sampled = self.sample(&halves, k + 1, rng, depth + 1, steps)?;
        total += if self.exact_corrections {
            let diagonal = diagonal_count(self.pattern, self.graph, &split.terms[2], i, j)? as f64;
            4.0 * (m as f64 - 1.0) / m as f64 * sampled + diagonal
        } else {
            4.0 * sampled
        };
        Ok(total)
    }
}

/// Estimates `c(H, G; U)` using only oracle counts on pairwise-disjoint
/// tuples, resolving overlapping position pairs in lexicographic order.
pub fn disjointify_estimate<O: DisjointOracle + ?Sized>(
    pattern: &Pattern,
    graph: &Graph,
    tuple: &ConstraintTuple,
    oracle: &O,
    options: &DisjointifyOptions,
) -> Result<DisjointifyEstimate> {
    tuple.validate(pattern, graph)?;
    if options.trials == 0 {
        return Err(Error::input("need at least one trial"));
    }
    let r = pattern.r();
    let pairs: Vec<(usize, usize)> = (0..r).flat_map(|i| (i + 1..r).map(move |j| (i, j))).collect();
    let runner = Disjointifier {
        pattern,
        graph,
        oracle,
        pairs,
        exact_corrections: options.exact_corrections,
        calls: Cell::new(0),
    };
    if tuple.pairwise_disjoint() {
        let value = runner.sample(tuple, 0, &mut stream_rng(options.seed, 0), 0, &mut 0)?;
        return Ok(DisjointifyEstimate {
            estimate: value,
            stderr: 0.0,
            trials: 1,
            steps: 0,
            oracle_calls: runner.calls.get(),
        });
    }
    let mut values = Vec::with_capacity(options.trials as usize);
    let mut steps = 0;
    for t in 0..options.trials {
        let mut rng = stream_rng(options.seed, t);
        values.push(runner.sample(tuple, 0, &mut rng, 0, &mut steps)?);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let stderr = if values.len() > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt()
    } else {
        0.0
    };
    Ok(DisjointifyEstimate {
        estimate: mean,
        stderr,
        trials: options.trials,
        steps,
        oracle_calls: runner.calls.get(),
    })
}
