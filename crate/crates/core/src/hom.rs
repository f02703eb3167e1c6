//! Constrained homomorphism counting.
//!
//! `c(H, G; U_1, .., U_r)` counts maps `φ: V(H) → V(G)` with `φ(i) ∈ U_i`
//! that send every edge of `H` to an edge of `G`. Maps need not be injective.
//!
//! The exact counter works one connected component of `H` at a time and
//! backtracks over the component's vertices in a static order where each
//! vertex has as many already-placed neighbours as possible. The candidate
//! set of a vertex is its constraint set intersected with the neighbourhoods
//! of the images of its placed neighbours, so each step is a handful of
//! word-parallel ANDs; the last vertex of each branch is counted with a
//! popcount.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::pattern::Pattern;
use crate::set::VertexSet;

/// Ordered list of constraint sets, one per pattern vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintTuple {
    sets: Vec<VertexSet>,
}

impl ConstraintTuple {
    pub fn new(sets: Vec<VertexSet>) -> Self {
        ConstraintTuple { sets }
    }

    /// Every position constrained to all of `V(G)`.
    pub fn unconstrained(pattern: &Pattern, graph: &Graph) -> Self {
        Self::uniform(graph.full_set(), pattern.r())
    }

    pub fn uniform(set: VertexSet, r: usize) -> Self {
        ConstraintTuple { sets: vec![set; r] }
    }

    pub fn sets(&self) -> &[VertexSet] {
        &self.sets
    }

    pub fn get(&self, i: usize) -> &VertexSet {
        &self.sets[i]
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn replace(&self, i: usize, set: VertexSet) -> Self {
        let mut sets = self.sets.clone();
        sets[i] = set;
        ConstraintTuple { sets }
    }

    /// `∏ |U_i|` as a real.
    pub fn size_product(&self) -> f64 {
        self.sets.iter().map(|s| s.len() as f64).product()
    }

    pub fn pairwise_disjoint(&self) -> bool {
        self.sets
            .iter()
            .enumerate()
            .all(|(i, a)| self.sets[i + 1..].iter().all(|b| a.is_disjoint(b)))
    }

    pub fn validate(&self, pattern: &Pattern, graph: &Graph) -> Result<()> {
        if self.sets.len() != pattern.r() {
            return Err(Error::input(format!(
                "constraint tuple has {} sets but the pattern has {} vertices",
                self.sets.len(),
                pattern.r()
            )));
        }
        self.sets.iter().try_for_each(|s| graph.check_set(s))
    }
}

/// Below this many first-level candidates the search stays sequential.
const PARALLEL_THRESHOLD: usize = 48;

struct Component {
    /// Pattern vertices in search order.
    order: Vec<usize>,
    /// For each search level, the earlier levels holding its neighbours.
    back: Vec<Vec<usize>>,
}

fn components(pattern: &Pattern) -> Vec<Vec<usize>> {
    let r = pattern.r();
    let mut seen = vec![false; r];
    let mut out = Vec::new();
    for start in 0..r {
        if seen[start] {
            continue;
        }
        let mut comp = vec![start];
        seen[start] = true;
        let mut head = 0;
        while head < comp.len() {
            let v = comp[head];
            head += 1;
            for &w in pattern.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    comp.push(w);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

fn search_order(pattern: &Pattern, comp: &[usize], sets: &[VertexSet]) -> Component {
    let mut order = Vec::with_capacity(comp.len());
    let mut placed = vec![false; pattern.r()];
    while order.len() < comp.len() {
        let next = comp
            .iter()
            .copied()
            .filter(|&v| !placed[v])
            .max_by_key(|&v| {
                let back_degree = pattern.neighbors(v).iter().filter(|&&w| placed[w]).count();
                (
                    back_degree,
                    pattern.degree(v),
                    std::cmp::Reverse(sets[v].len()),
                    std::cmp::Reverse(v),
                )
            })
            .expect("component has unplaced vertices");
        placed[next] = true;
        order.push(next);
    }
    let level_of = |v: usize| order.iter().position(|&w| w == v).expect("placed");
    let back = order
        .iter()
        .enumerate()
        .map(|(level, &v)| {
            pattern
                .neighbors(v)
                .iter()
                .map(|&w| level_of(w))
                .filter(|&l| l < level)
                .collect()
        })
        .collect();
    Component { order, back }
}

struct Search<'a> {
    graph: &'a Graph,
    comp: &'a Component,
    sets: &'a [VertexSet],
    words: usize,
}

impl Search<'_> {
    fn candidates(&self, level: usize, images: &[usize], out: &mut [u64]) {
        let base = self.sets[self.comp.order[level]].words();
        out.copy_from_slice(base);
        for &b in &self.comp.back[level] {
            let row = self.graph.neighborhood(images[b]).words();
            for (o, w) in out.iter_mut().zip(row) {
                *o &= w;
            }
        }
    }

    fn count_from(&self, level: usize, images: &mut [usize], scratch: &mut [Vec<u64>]) -> Result<u64> {
        let (buf, rest) = scratch.split_first_mut().expect("scratch per level");
        self.candidates(level, images, buf);
        if level + 1 == self.comp.order.len() {
            return Ok(buf.iter().map(|w| w.count_ones() as u64).sum());
        }
        let mut total = 0u64;
        for (wi, &word) in buf.iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                let v = wi * 64 + bits.trailing_zeros() as usize;
                bits &= bits - 1;
                images[level] = v;
                let sub = self.count_from(level + 1, images, rest)?;
                total = total.checked_add(sub).ok_or(Error::Overflow)?;
            }
        }
        Ok(total)
    }

    fn run(&self) -> Result<u64> {
        let depth = self.comp.order.len();
        if depth == 1 {
            return Ok(self.sets[self.comp.order[0]].len() as u64);
        }
        let mut first = vec![0u64; self.words];
        self.candidates(0, &[], &mut first);
        let roots = VertexSet::from_words(self.graph.n(), first).to_vec();
        let branch = |v: usize| -> Result<u64> {
            let mut images = vec![0usize; depth];
            images[0] = v;
            let mut scratch = vec![vec![0u64; self.words]; depth - 1];
            self.count_from(1, &mut images, &mut scratch)
        };
        let partials: Vec<Result<u64>> = if roots.len() >= PARALLEL_THRESHOLD {
            roots.par_iter().map(|&v| branch(v)).collect()
        } else {
            roots.iter().map(|&v| branch(v)).collect()
        };
        partials
            .into_iter()
            .try_fold(0u64, |acc, part| acc.checked_add(part?).ok_or(Error::Overflow))
    }
}

/// Exact `c(H, G; U_1, .., U_r)`.
pub fn hom_count(pattern: &Pattern, graph: &Graph, constraints: &ConstraintTuple) -> Result<u64> {
    constraints.validate(pattern, graph)?;
    let sets = constraints.sets();
    let words = graph.full_set().words().len();
    let mut total = 1u64;
    for comp in components(pattern) {
        let order = search_order(pattern, &comp, sets);
        let search = Search {
            graph,
            comp: &order,
            sets,
            words,
        };
        let count = search.run()?;
        if count == 0 {
            return Ok(0);
        }
        total = total.checked_mul(count).ok_or(Error::Overflow)?;
    }
    Ok(total)
}

/// `c(H, G[U]) = c(H, G; U, .., U)`.
pub fn hom_count_in_induced(pattern: &Pattern, graph: &Graph, set: &VertexSet) -> Result<u64> {
    hom_count(pattern, graph, &ConstraintTuple::uniform(set.clone(), pattern.r()))
}

/// Unconstrained `c(H, G)`.
pub fn hom_count_all(pattern: &Pattern, graph: &Graph) -> Result<u64> {
    hom_count(pattern, graph, &ConstraintTuple::unconstrained(pattern, graph))
}

fn check_vertex(graph: &Graph, v: usize) -> Result<()> {
    if v >= graph.n() {
        return Err(Error::input(format!("vertex {v} outside 0..{}", graph.n())));
    }
    Ok(())
}

/// `c(u, v)`: pairs of homomorphisms `φ, ψ: H → G` agreeing on `H' = H - v₁`
/// with `φ(v₁) = u` and `ψ(v₁) = v`.
///
/// Computed as the number of maps of `H'` whose images of the neighbours of
/// `v₁` lie in `N(u) ∩ N(v)`, i.e. copies of `H'` extending both ways.
pub fn doubled_count(pattern: &Pattern, graph: &Graph, u: usize, v: usize) -> Result<u64> {
    check_vertex(graph, u)?;
    check_vertex(graph, v)?;
    if pattern.r() == 0 {
        return Err(Error::input("doubled count needs a designated vertex"));
    }
    let d = pattern.designated();
    let (rest, map) = pattern.remove_vertex(d);
    let common = graph.neighborhood(u).intersection(graph.neighborhood(v));
    let mut sets = vec![graph.full_set(); rest.r()];
    for &w in pattern.neighbors(d) {
        sets[map[w].expect("neighbour survives removal")] = common.clone();
    }
    hom_count(&rest, graph, &ConstraintTuple::new(sets))
}

/// The tuple `({v}, N(u), .., N(u), V, .., V)` whose count equals `c(u, v)`:
/// `{v}` at the designated vertex, `N(u)` at its neighbours, `V(G)` elsewhere.
pub fn doubled_count_tuple(pattern: &Pattern, graph: &Graph, u: usize, v: usize) -> Result<ConstraintTuple> {
    check_vertex(graph, u)?;
    let d = pattern.designated();
    let mut sets = vec![graph.full_set(); pattern.r()];
    sets[d] = VertexSet::singleton(graph.n(), v)?;
    for &w in pattern.neighbors(d) {
        sets[w] = graph.neighborhood(u).clone();
    }
    Ok(ConstraintTuple::new(sets))
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::input(format!("p = {p} is outside [0, 1]")));
    }
    Ok(())
}

/// `c_{H,H'}`: the count with the indicator of every edge outside `kept`
/// replaced by the constant `p`. Since the kept indicators multiply out to a
/// homomorphism count of the spanning subgraph, this is
/// `p^{e(H) - |kept|} · c(H_kept, G; U)`.
pub fn partial_weighted_count(
    pattern: &Pattern,
    kept: &[(usize, usize)],
    graph: &Graph,
    p: f64,
    constraints: &ConstraintTuple,
) -> Result<f64> {
    check_probability(p)?;
    let sub = pattern.spanning_subgraph(kept)?;
    let count = hom_count(&sub, graph, constraints)?;
    let replaced = pattern.edge_count() - sub.edge_count();
    Ok(p.powi(replaced as i32) * count as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiltrationStep {
    pub k: usize,
    /// Edge introduced at this step; `None` for the empty spanning subgraph.
    pub added_edge: Option<(usize, usize)>,
    /// Homomorphism count of the spanning subgraph `H_k`.
    pub count: u64,
    /// `c_{H,H_k} = p^{e(H) - k} · count`.
    pub value: f64,
}

/// Values `c_{H,H_0}, .., c_{H,H_{e(H)}}` along the filtration that adds
/// edges in `order` (lexicographic when `None`).
pub fn filtration_values(
    pattern: &Pattern,
    graph: &Graph,
    p: f64,
    constraints: &ConstraintTuple,
    order: Option<&[(usize, usize)]>,
) -> Result<Vec<FiltrationStep>> {
    check_probability(p)?;
    constraints.validate(pattern, graph)?;
    let order: Vec<(usize, usize)> = match order {
        None => pattern.edges().to_vec(),
        Some(order) => {
            let mut normalized: Vec<(usize, usize)> =
                order.iter().map(|&(i, j)| (i.min(j), i.max(j))).collect();
            let as_given = normalized.clone();
            normalized.sort_unstable();
            if normalized != pattern.edges() {
                return Err(Error::input(
                    "filtration order is not a permutation of the pattern's edges",
                ));
            }
            as_given
        }
    };
    let e = pattern.edge_count();
    (0..=e)
        .map(|k| {
            let sub = pattern.spanning_subgraph(&order[..k])?;
            let count = hom_count(&sub, graph, constraints)?;
            Ok(FiltrationStep {
                k,
                added_edge: k.checked_sub(1).map(|i| order[i]),
                count,
                value: p.powi((e - k) as i32) * count as f64,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityEstimate {
    /// Estimate of `c(H, G; U) / ∏ |U_i|`.
    pub estimate: f64,
    pub stderr: f64,
    pub samples: u64,
}

const ESTIMATE_CHUNK: u64 = 4096;

/// Monte-Carlo estimate of the constrained homomorphism density.
///
/// Tuples are drawn uniformly with replacement from `U_1 × .. × U_r`. Chunk
/// `i` of the sample uses stream `i` of a ChaCha generator keyed by `seed`,
/// so the result does not depend on how chunks are scheduled.
pub fn hom_density_estimate(
    pattern: &Pattern,
    graph: &Graph,
    constraints: &ConstraintTuple,
    samples: u64,
    seed: u64,
) -> Result<DensityEstimate> {
    constraints.validate(pattern, graph)?;
    if samples == 0 {
        return Err(Error::input("need at least one sample"));
    }
    if let Some(i) = constraints.sets().iter().position(VertexSet::is_empty) {
        return Err(Error::input(format!("constraint set {i} is empty")));
    }
    let members: Vec<Vec<usize>> = constraints.sets().iter().map(VertexSet::to_vec).collect();
    let chunks = samples.div_ceil(ESTIMATE_CHUNK);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk);
            let len = ESTIMATE_CHUNK.min(samples - chunk * ESTIMATE_CHUNK);
            let mut image = vec![0usize; pattern.r()];
            let mut hits = 0u64;
            for _ in 0..len {
                for (slot, m) in image.iter_mut().zip(&members) {
                    *slot = m[rng.gen_range(0..m.len())];
                }
                if pattern.edges().iter().all(|&(i, j)| graph.has_edge(image[i], image[j])) {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    let n = samples as f64;
    let mean = hits as f64 / n;
    let stderr = if samples > 1 {
        let var = (hits as f64 - n * mean * mean) / (n - 1.0);
        (var.max(0.0) / n).sqrt()
    } else {
        0.0
    };
    Ok(DensityEstimate {
        estimate: mean,
        stderr,
        samples,
    })
}
