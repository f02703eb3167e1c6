//! Discrepancy amplification: from one subset `S` with
//! `|e(S) - q·C(|S|,2)| = D` to two disjoint quarter-size sets whose edge
//! counts differ by about `D/16`.

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::metrics::Method;
use crate::sampler::{sample_subset_of_size, stream_rng};
use crate::set::VertexSet;

/// Largest `n` accepted by [`half_set_exhaustive`].
pub const HALF_SET_EXHAUSTIVE_CAP: usize = 24;

/// Slack of the half-set guarantee `disc(S') ≥ D/4 - HALF_SET_SLACK·n²`.
pub const HALF_SET_SLACK: f64 = 0.05;

fn pairs(k: usize) -> f64 {
    (k as f64) * (k as f64 - 1.0) / 2.0
}

/// `|e(S) - q·C(|S|, 2)|`.
pub fn set_discrepancy(graph: &Graph, q: f64, set: &VertexSet) -> f64 {
    (graph.edges_within(set) as f64 - q * pairs(set.len())).abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HalfSetOptions {
    /// Random half-sets climbed in addition to the ones derived from `S`.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for HalfSetOptions {
    fn default() -> Self {
        HalfSetOptions { restarts: 8, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HalfSetResult {
    pub set: VertexSet,
    pub discrepancy: f64,
    pub edges: u64,
    pub method: Method,
}

/// Swap climbing on a set of fixed size: repeatedly exchanges the pair
/// `(out, in)` that most increases `sign · e(S)`.
fn swap_climb(graph: &Graph, start: VertexSet, sign: i64) -> VertexSet {
    let n = graph.n();
    let mut set = start;
    let mut inside: Vec<i64> = (0..n)
        .map(|v| graph.neighborhood(v).intersection_len(&set) as i64)
        .collect();
    loop {
        let mut best = (0i64, usize::MAX, usize::MAX);
        for u in set.iter() {
            for w in 0..n {
                if set.contains(w) {
                    continue;
                }
                let adjacent = graph.has_edge(u, w) as i64;
                let gain = sign * (inside[w] - inside[u] - adjacent);
                if gain > best.0 {
                    best = (gain, u, w);
                }
            }
        }
        if best.0 <= 0 {
            return set;
        }
        let (_, u, w) = best;
        set.remove(u);
        set.insert(w);
        for x in graph.neighborhood(u).iter() {
            inside[x] -= 1;
        }
        for x in graph.neighborhood(w).iter() {
            inside[x] += 1;
        }
    }
}

/// Trims or pads `set` to `k` vertices, padding first from `prefer`.
fn resize<R: Rng>(set: &VertexSet, k: usize, prefer: &VertexSet, avoid: &VertexSet, rng: &mut R) -> VertexSet {
    let mut out = set.clone();
    if out.len() > k {
        let mut members = out.to_vec();
        members.shuffle(rng);
        for &v in &members[..members.len() - k] {
            out.remove(v);
        }
        return out;
    }
    for pool in [prefer.difference(&out).difference(avoid), out.union(avoid).complement()] {
        if out.len() >= k {
            break;
        }
        let mut members = pool.difference(&out).to_vec();
        members.shuffle(rng);
        for &v in members.iter().take(k - out.len()) {
            out.insert(v);
        }
    }
    out
}

/// A half-size set heuristically maximising `|e(S') - q·C(⌊n/2⌋, 2)|`.
///
/// Candidates are `S` and `V \ S` resized to `⌊n/2⌋` plus `restarts` random
/// half-sets; each is swap-climbed towards both more and fewer edges.
pub fn discrepancy_half_set(graph: &Graph, q: f64, set: &VertexSet, options: &HalfSetOptions) -> Result<HalfSetResult> {
    graph.check_set(set)?;
    if set.is_empty() {
        return Err(Error::input("half-set search needs a nonempty S"));
    }
    let n = graph.n();
    let k = n / 2;
    let mut rng = stream_rng(options.seed, 0);
    let none = VertexSet::empty(n);
    let mut starts = vec![
        resize(set, k, set, &none, &mut rng),
        resize(&set.complement(), k, &set.complement(), &none, &mut rng),
    ];
    for i in 0..options.restarts {
        starts.push(sample_subset_of_size(n, k, &mut stream_rng(options.seed, 1 + i as u64)));
    }
    let target = q * pairs(k);
    let best = starts
        .par_iter()
        .flat_map_iter(|s| [1, -1].map(|sign| (s, sign)))
        .map(|(s, sign)| {
            let climbed = swap_climb(graph, s.clone(), sign);
            let edges = graph.edges_within(&climbed);
            (climbed, edges)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(None::<(VertexSet, u64)>, |best, cand| match best {
            Some(b) if (b.1 as f64 - target).abs() >= (cand.1 as f64 - target).abs() => Some(b),
            _ => Some(cand),
        })
        .expect("at least two candidates");
    Ok(HalfSetResult {
        discrepancy: (best.1 as f64 - target).abs(),
        edges: best.1,
        set: best.0,
        method: Method::Heuristic,
    })
}

/// The exact optimum over all `⌊n/2⌋`-subsets.
pub fn half_set_exhaustive(graph: &Graph, q: f64) -> Result<HalfSetResult> {
    let n = graph.n();
    if n > HALF_SET_EXHAUSTIVE_CAP {
        return Err(Error::Refused(format!(
            "exhaustive half-set search limited to n <= {HALF_SET_EXHAUSTIVE_CAP}, got {n}"
        )));
    }
    let k = n / 2;
    let target = q * pairs(k);
    let adjacency: Vec<u32> = (0..n).map(|v| graph.neighborhood(v).words().first().copied().unwrap_or(0) as u32).collect();
    let mut best = (f64::NEG_INFINITY, 0u32, 0u64);
    // Gosper's hack over k-subsets of n bits.
    let mut mask: u64 = if k == 0 { 0 } else { (1u64 << k) - 1 };
    let limit = 1u64 << n;
    while mask < limit {
        let m = mask as u32;
        let twice: u32 = (0..n)
            .filter(|&v| m >> v & 1 == 1)
            .map(|v| (adjacency[v] & m).count_ones())
            .sum();
        let edges = (twice / 2) as u64;
        let disc = (edges as f64 - target).abs();
        if disc > best.0 {
            best = (disc, m, edges);
        }
        if mask == 0 {
            break;
        }
        let c = mask & mask.wrapping_neg();
        let r = mask + c;
        mask = (((r ^ mask) >> 2) / c) | r;
    }
    let set = VertexSet::from_vertices(n, (0..n).filter(|&v| best.1 >> v & 1 == 1))?;
    Ok(HalfSetResult {
        set,
        discrepancy: best.0,
        edges: best.2,
        method: Method::Exact,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AmplifyOptions {
    /// The `o(n²)` term: certification needs `gap ≥ D/16 - slack·n²`.
    pub slack: f64,
    /// Raw `|X|`, `|Y|` must lie within `size_slack·n` of `n/4`.
    pub size_slack: f64,
    pub max_retries: usize,
    pub seed: u64,
    pub restarts: usize,
}

impl Default for AmplifyOptions {
    fn default() -> Self {
        AmplifyOptions {
            slack: 0.02,
            size_slack: 0.05,
            max_retries: 10,
            seed: 0,
            restarts: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AmplificationResult {
    pub q: f64,
    /// `|e(S) - q·C(|S|,2)|` of the input set.
    pub d: f64,
    pub s_half: VertexSet,
    pub s_half_discrepancy: f64,
    pub s_half_method: Method,
    pub x: VertexSet,
    pub y: VertexSet,
    pub e_x: u64,
    pub e_y: u64,
    pub gap: f64,
    /// `D/16 - slack·n²`.
    pub target: f64,
    /// Attempts after the first; the reported attempt is the certified one,
    /// or the best one when none certified.
    pub retries: usize,
    pub certified: bool,
    pub x_raw_sizes: Vec<usize>,
    pub y_raw_sizes: Vec<usize>,
    pub seed: u64,
    pub slack: f64,
    pub size_slack: f64,
    pub max_retries: usize,
}

struct Attempt {
    x: VertexSet,
    y: VertexSet,
    gap: f64,
    e_x: u64,
    e_y: u64,
}

/// Runs the randomized construction: `A` uniform, `X = A ∩ S'`, `Y` uniform
/// in `V \ A`, both resized to `⌊n/4⌋`, retried until sizes and gap certify.
pub fn amplify_discrepancy(graph: &Graph, q: f64, set: &VertexSet, options: &AmplifyOptions) -> Result<AmplificationResult> {
    graph.check_set(set)?;
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::input(format!("q = {q} is outside [0, 1]")));
    }
    if !(options.slack >= 0.0 && options.size_slack >= 0.0) {
        return Err(Error::input("slack terms must be non-negative"));
    }
    let d = set_discrepancy(graph, q, set);
    if d == 0.0 {
        return Err(Error::input("S has zero discrepancy; nothing to amplify"));
    }
    let n = graph.n();
    let nf = n as f64;
    let half = discrepancy_half_set(
        graph,
        q,
        set,
        &HalfSetOptions {
            restarts: options.restarts,
            seed: options.seed,
        },
    )?;
    let s_half = half.set.clone();
    let k = n / 4;
    let target = d / 16.0 - options.slack * nf * nf;
    let window = options.size_slack * nf;

    let mut x_raw_sizes = Vec::new();
    let mut y_raw_sizes = Vec::new();
    let mut best: Option<(usize, Attempt)> = None;
    let mut certified = None;
    for attempt in 0..=options.max_retries {
        // stream 0 and 1..=restarts belong to the half-set search
        let mut rng = stream_rng(options.seed, (1 + options.restarts + attempt) as u64);
        let mut a = VertexSet::empty(n);
        for v in 0..n {
            if rng.gen_bool(0.5) {
                a.insert(v);
            }
        }
        let x_raw = a.intersection(&s_half);
        let rest = a.complement();
        let mut y_raw = VertexSet::empty(n);
        for v in rest.iter() {
            if rng.gen_bool(0.5) {
                y_raw.insert(v);
            }
        }
        x_raw_sizes.push(x_raw.len());
        y_raw_sizes.push(y_raw.len());
        let x = resize(&x_raw, k, &s_half, &y_raw, &mut rng);
        let y = resize(&y_raw.difference(&x), k, &rest, &x, &mut rng);
        let (e_x, e_y) = (graph.edges_within(&x), graph.edges_within(&y));
        let gap = (e_x as f64 - e_y as f64).abs();
        let sizes_ok = [x_raw.len(), y_raw.len()]
            .iter()
            .all(|&s| (s as f64 - nf / 4.0).abs() <= window);
        let current = Attempt { x, y, gap, e_x, e_y };
        if sizes_ok && gap >= target {
            certified = Some((attempt, current));
            break;
        }
        if best.as_ref().is_none_or(|(_, b)| current.gap > b.gap) {
            best = Some((attempt, current));
        }
    }
    let is_certified = certified.is_some();
    let (retries, chosen) = certified.or(best).expect("at least one attempt");
    Ok(AmplificationResult {
        q,
        d,
        s_half,
        s_half_discrepancy: half.discrepancy,
        s_half_method: half.method,
        x: chosen.x,
        y: chosen.y,
        e_x: chosen.e_x,
        e_y: chosen.e_y,
        gap: chosen.gap,
        target,
        retries,
        certified: is_certified,
        x_raw_sizes,
        y_raw_sizes,
        seed: options.seed,
        slack: options.slack,
        size_slack: options.size_slack,
        max_retries: options.max_retries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, GeneratorSpec};

    #[test]
    fn complete_graph_half_sets_are_flat() {
        let g = Graph::complete(10);
        let s = VertexSet::from_vertices(10, [0, 1, 2]).unwrap();
        let half = discrepancy_half_set(&g, 1.0, &s, &HalfSetOptions::default()).unwrap();
        assert_eq!(half.set.len(), 5);
        assert_eq!(half.discrepancy, 0.0);
    }

    #[test]
    fn exhaustive_matches_brute_force_size() {
        let g = generate(&GeneratorSpec::erdos_renyi(10, 0.5, 3)).unwrap();
        let q = g.edge_density().unwrap();
        let exact = half_set_exhaustive(&g, q).unwrap();
        assert_eq!(exact.set.len(), 5);
        let heuristic = discrepancy_half_set(&g, q, &g.full_set(), &HalfSetOptions::default()).unwrap();
        assert!(heuristic.discrepancy <= exact.discrepancy + 1e-9);
        assert!((set_discrepancy(&g, q, &exact.set) - exact.discrepancy).abs() < 1e-9);
    }

    #[test]
    fn bipartite_side_amplifies() {
        let g = Graph::complete_bipartite(32, 32);
        let q = g.edge_density().unwrap();
        let side = VertexSet::from_vertices(64, 0..32).unwrap();
        let res = amplify_discrepancy(&g, q, &side, &AmplifyOptions { seed: 5, ..Default::default() }).unwrap();
        assert_eq!(res.x.len(), 16);
        assert_eq!(res.y.len(), 16);
        assert!(res.x.is_disjoint(&res.y));
        assert!(res.s_half_discrepancy >= res.d / 4.0 - HALF_SET_SLACK * 64.0 * 64.0);
        assert_eq!(res.gap, (res.e_x as f64 - res.e_y as f64).abs());
        let json = serde_json::to_value(&res).unwrap();
        assert_eq!(json["seed"], 5);
    }

    #[test]
    fn zero_discrepancy_rejected() {
        let g = Graph::complete(8);
        let s = VertexSet::from_vertices(8, [0, 1, 2]).unwrap();
        assert!(amplify_discrepancy(&g, 1.0, &s, &AmplifyOptions::default()).is_err());
    }
}
