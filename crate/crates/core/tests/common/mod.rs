//! Strategies and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use proptest::prelude::*;
use quasirand::{ConstraintTuple, Graph, Pattern, VertexSet};

/// A graph on `n` vertices from an edge mask over all pairs.
pub fn graph_from_mask(n: usize, mask: &[bool]) -> Graph {
    let pairs = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
    Graph::from_edges(n, pairs.zip(mask).filter(|(_, &b)| b).map(|(e, _)| e)).unwrap()
}

pub fn graph(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Graph> {
    n.prop_flat_map(|n| {
        let pairs = n * n.saturating_sub(1) / 2;
        (Just(n), proptest::collection::vec(any::<bool>(), pairs))
    })
    .prop_map(|(n, mask)| graph_from_mask(n, &mask))
}

pub fn pattern(r: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Pattern> {
    r.prop_flat_map(|r| {
        let pairs = r * (r - 1) / 2;
        (Just(r), proptest::collection::vec(any::<bool>(), pairs))
    })
    .prop_map(|(r, mask)| {
        let pairs = (0..r).flat_map(|i| (i + 1..r).map(move |j| (i, j)));
        Pattern::new(r, pairs.zip(&mask).filter(|(_, &b)| b).map(|(e, _)| e)).unwrap()
    })
}

pub fn set_from_mask(n: usize, mask: &[bool]) -> VertexSet {
    VertexSet::from_vertices(n, (0..n).filter(|&v| mask[v])).unwrap()
}

pub fn subset(n: usize) -> impl Strategy<Value = VertexSet> {
    proptest::collection::vec(any::<bool>(), n).prop_map(move |m| set_from_mask(n, &m))
}

/// A graph with two arbitrary subsets of its vertices.
pub fn graph_with_pair(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = (Graph, VertexSet, VertexSet)> {
    graph(n).prop_flat_map(|g| {
        let n = g.n();
        (Just(g), subset(n), subset(n))
    })
}

/// A pattern, a host and one constraint set per pattern vertex.
pub fn instance(
    r: std::ops::RangeInclusive<usize>,
    n: std::ops::RangeInclusive<usize>,
) -> impl Strategy<Value = (Pattern, Graph, ConstraintTuple)> {
    (pattern(r), graph(n)).prop_flat_map(|(h, g)| {
        let sets = proptest::collection::vec(subset(g.n()), h.r());
        (Just(h), Just(g), sets.prop_map(ConstraintTuple::new))
    })
}

/// Visits every map `0..r -> 0..n`.
pub fn for_each_map(r: usize, n: usize, mut f: impl FnMut(&[usize])) {
    let mut image = vec![0usize; r];
    if n == 0 && r > 0 {
        return;
    }
    loop {
        f(&image);
        let mut k = 0;
        loop {
            if k == r {
                return;
            }
            image[k] += 1;
            if image[k] < n {
                break;
            }
            image[k] = 0;
            k += 1;
        }
    }
}

/// `c(H, G; U)` by enumerating all `n^{v(H)}` maps.
pub fn naive_hom_count(h: &Pattern, g: &Graph, sets: &[VertexSet]) -> u64 {
    let mut count = 0;
    for_each_map(h.r(), g.n(), |phi| {
        let fits = phi.iter().zip(sets).all(|(&v, s)| s.contains(v));
        if fits && h.edges().iter().all(|&(i, j)| g.has_edge(phi[i], phi[j])) {
            count += 1;
        }
    });
    count
}

/// Ordered pairs `(a, b)` with `a ∈ A`, `b ∈ B` and `ab` an edge.
pub fn naive_edges_between(g: &Graph, a: &VertexSet, b: &VertexSet) -> u64 {
    let mut count = 0;
    for x in a.iter() {
        for y in b.iter() {
            count += g.has_edge(x, y) as u64;
        }
    }
    count
}

pub fn naive_edges_within(g: &Graph, s: &VertexSet) -> u64 {
    naive_edges_between(g, s, s) / 2
}

/// Maps of `H - v₁` into `G` that extend both to `v₁ ↦ u` and to `v₁ ↦ v`.
pub fn naive_doubled_count(h: &Pattern, g: &Graph, u: usize, v: usize) -> u64 {
    let d = h.designated();
    let mut count = 0;
    for_each_map(h.r(), g.n(), |phi| {
        if phi[d] != 0 {
            return;
        }
        let rest_ok = h
            .edges()
            .iter()
            .filter(|&&(i, j)| i != d && j != d)
            .all(|&(i, j)| g.has_edge(phi[i], phi[j]));
        let nbrs_ok = h.neighbors(d).iter().all(|&w| g.has_edge(u, phi[w]) && g.has_edge(v, phi[w]));
        if rest_ok && nbrs_ok {
            count += 1;
        }
    });
    count
}

/// Every subset of `0..n` as a bit mask.
pub fn all_subsets(n: usize) -> impl Iterator<Item = VertexSet> {
    (0u64..1 << n).map(move |m| VertexSet::from_vertices(n, (0..n).filter(|&v| m >> v & 1 == 1)).unwrap())
}

/// `max_U |e(U) - ½p|U|²| / n²` over all subsets.
pub fn brute_edge_discrepancy(g: &Graph, p: f64) -> f64 {
    let n = g.n() as f64;
    all_subsets(g.n())
        .map(|s| {
            let k = s.len() as f64;
            (naive_edges_within(g, &s) as f64 - p * k * k / 2.0).abs()
        })
        .fold(0.0, f64::max)
        / (n * n)
}

/// Largest `|e(X) - e(Y)|` over disjoint `X`, `Y` of size `⌊n/4⌋`.
pub fn brute_quarter_pair_gap(g: &Graph) -> u64 {
    let n = g.n();
    let k = n / 4;
    let quarters: Vec<VertexSet> = all_subsets(n).filter(|s| s.len() == k).collect();
    let mut best = 0;
    for x in &quarters {
        let ex = naive_edges_within(g, x);
        for y in quarters.iter().filter(|y| y.is_disjoint(x)) {
            best = best.max(ex.abs_diff(naive_edges_within(g, y)));
        }
    }
    best
}

/// Sampled labelled deviation over random tuples plus the main-lemma tuples
/// `(V±, N(u), .., N(u), V, ..)` of `table`.
pub fn proof_family_delta(
    h: &Pattern,
    g: &Graph,
    p: f64,
    table: &quasirand::reductions::DoubledCountTable,
    trials: u64,
    seed: u64,
) -> f64 {
    let mut tuples = quasirand::sampler::sample_tuples(g.n(), h.r(), &quasirand::SamplerSpec::with_trials(trials, seed));
    tuples.extend(table.proof_tuples(g));
    quasirand::metrics::labeled_deviation_over(h, g, p, &tuples).unwrap().deviation
}

/// `(Σ_{i,j} |b_j^r - a_i^r|, Σ_j b_j^{r-1} · (Σ b - Σ a))` term by term.
pub fn naive_power_sums(a: &[u64], b: &[u64], r: u32) -> (i128, i128) {
    let mut lhs = 0i128;
    for &x in a {
        for &y in b {
            lhs += ((y as i128).pow(r) - (x as i128).pow(r)).abs();
        }
    }
    let weight: i128 = b.iter().map(|&y| (y as i128).pow(r - 1)).sum();
    let diff: i128 = b.iter().map(|&y| y as i128).sum::<i128>() - a.iter().map(|&x| x as i128).sum::<i128>();
    (lhs, weight * diff)
}

/// Every ordered equitable bipartition `(U₁, U₂)` of an even-sized `U`.
pub fn equitable_bipartitions(u: &VertexSet) -> Vec<(VertexSet, VertexSet)> {
    let members = u.to_vec();
    let m = members.len();
    let mut out = Vec::new();
    for mask in 0u64..1 << m {
        if mask.count_ones() as usize * 2 != m {
            continue;
        }
        let pick = |side: u64| {
            VertexSet::from_vertices(u.universe(), (0..m).filter(|&k| mask >> k & 1 == side).map(|k| members[k])).unwrap()
        };
        out.push((pick(1), pick(0)));
    }
    out
}
