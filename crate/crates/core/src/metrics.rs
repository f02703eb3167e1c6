//! Deviation evaluators for the quasirandomness properties of a host graph.
//!
//! Every evaluator returns a [`DeviationReport`] whose `deviation` is the
//! smallest error parameter for which the property holds on the examined
//! family, normalised by `n²` (edge properties) or `n^{v(H)}` (counts).

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::hom::{hom_count, hom_count_all, hom_count_in_induced, ConstraintTuple};
use crate::pattern::Pattern;
use crate::sampler::{sample_subset, sample_subsets, sample_tuples, SamplerSpec};
use crate::set::VertexSet;
use crate::spectral;

/// Largest `n` for which all `2^n` subsets are enumerated.
pub const EXACT_SUBSET_CAP: usize = 24;

/// Largest `n` for which the hereditary evaluator enumerates every subset.
pub const HEREDITARY_EXACT_CAP: usize = 16;

/// Largest `n` for which the C₄ count is cross-checked against the spectrum.
pub const SPECTRAL_CROSS_CHECK_CAP: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PropertyKind {
    EdgeDiscrepancy,
    C4,
    Spectral,
    Hereditary,
    LabeledDisjoint,
    LabeledFree,
    CrudeDensity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    Sampled,
    Heuristic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationReport {
    pub property: PropertyKind,
    pub p_ref: f64,
    pub q_obs: f64,
    pub deviation: f64,
    /// Unnormalised signed difference at the witness.
    pub raw: f64,
    /// Which counting convention `raw` uses.
    pub convention: String,
    /// Witness sets, each a sorted vertex list.
    pub witness: Vec<Vec<usize>>,
    pub method: Method,
    pub trials: u64,
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extras: BTreeMap<String, f64>,
}

impl DeviationReport {
    fn new(property: PropertyKind, graph: &Graph, p: f64, method: Method) -> Self {
        DeviationReport {
            property,
            p_ref: p,
            q_obs: graph.edge_density().unwrap_or(0.0),
            deviation: 0.0,
            raw: 0.0,
            convention: String::new(),
            witness: Vec::new(),
            method,
            trials: 0,
            seed: None,
            extras: BTreeMap::new(),
        }
    }

    pub fn extra(&self, key: &str) -> Option<f64> {
        self.extras.get(key).copied()
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::input(format!("p = {p} is outside [0, 1]")));
    }
    Ok(())
}

fn check_nonempty(pattern: &Pattern) -> Result<()> {
    if !pattern.is_nonempty() {
        return Err(Error::input(
            "pattern has no edges; the property holds trivially for every graph",
        ));
    }
    Ok(())
}

/// `e(U) - ½ p |U|²` with `e(U)` unordered.
#[inline]
fn edge_excess(edges: f64, size: usize, p: f64) -> f64 {
    edges - 0.5 * p * (size as f64) * (size as f64)
}

const EDGE_CONVENTION: &str = "unordered e(U) - p|U|^2/2; c(K2,G[U]) = 2e(U)";

/// Exact edge discrepancy `max_U |e(U) - ½p|U|²| / n²` over all `2^n` subsets.
///
/// Subsets are visited in Gray-code order so each step adds or removes a
/// single vertex and `e(U)` updates with one popcount.
pub fn edge_discrepancy_exact(graph: &Graph, p: f64) -> Result<DeviationReport> {
    check_p(p)?;
    let n = graph.n();
    if n > EXACT_SUBSET_CAP {
        return Err(Error::Refused(format!(
            "exact edge discrepancy enumerates 2^n subsets and is capped at n = {EXACT_SUBSET_CAP} \
             (got {n}); use the search variant"
        )));
    }
    let adj: Vec<u32> = (0..n)
        .map(|u| graph.neighborhood(u).words().first().copied().unwrap_or(0) as u32)
        .collect();
    let mut mask = 0u32;
    let mut edges = 0i64;
    let mut size = 0usize;
    let mut best = (0.0f64, 0.0f64, 0u32);
    for i in 1u64..(1u64 << n) {
        let b = i.trailing_zeros() as usize;
        let bit = 1u32 << b;
        if mask & bit == 0 {
            edges += (adj[b] & mask).count_ones() as i64;
            mask |= bit;
            size += 1;
        } else {
            mask &= !bit;
            edges -= (adj[b] & mask).count_ones() as i64;
            size -= 1;
        }
        let excess = edge_excess(edges as f64, size, p);
        if excess.abs() > best.0 {
            best = (excess.abs(), excess, mask);
        }
    }
    let witness: Vec<usize> = (0..n).filter(|&v| best.2 >> v & 1 == 1).collect();
    let mut report = DeviationReport::new(PropertyKind::EdgeDiscrepancy, graph, p, Method::Exact);
    report.deviation = normalize(best.0, n, 2);
    report.raw = best.1;
    report.convention = EDGE_CONVENTION.into();
    report.witness = vec![witness];
    report.trials = 1u64 << n;
    Ok(report)
}

fn normalize(value: f64, n: usize, power: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        value / (n as f64).powi(power as i32)
    }
}

/// Index and signed value of the entry with the largest absolute value; the
/// earliest index wins ties.
fn argmax_abs(values: &[f64]) -> Option<(usize, f64)> {
    values
        .iter()
        .copied()
        .enumerate()
        .fold(None, |best, (i, v)| match best {
            Some((_, b)) if b.abs() >= v.abs() => best,
            _ => Some((i, v)),
        })
}

fn spread(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (values.len() - 1) as f64;
    var.sqrt()
}

/// Edge discrepancy restricted to `family`.
pub fn edge_discrepancy_over(graph: &Graph, p: f64, family: &[VertexSet]) -> Result<DeviationReport> {
    check_p(p)?;
    family.iter().try_for_each(|s| graph.check_set(s))?;
    let values: Vec<f64> = family
        .par_iter()
        .map(|s| edge_excess(graph.edges_within(s) as f64, s.len(), p))
        .collect();
    let n = graph.n();
    let mut report = DeviationReport::new(PropertyKind::EdgeDiscrepancy, graph, p, Method::Sampled);
    report.convention = EDGE_CONVENTION.into();
    report.trials = family.len() as u64;
    if let Some((i, v)) = argmax_abs(&values) {
        report.deviation = normalize(v.abs(), n, 2);
        report.raw = v;
        report.witness = vec![family[i].to_vec()];
    }
    let normalized: Vec<f64> = values.iter().map(|v| normalize(*v, n, 2)).collect();
    report.extras.insert("sd".into(), spread(&normalized));
    Ok(report)
}

/// Local search state for `s · (e(U) - ½p|U|²)`.
struct Climber<'a> {
    graph: &'a Graph,
    p: f64,
    sign: f64,
    set: VertexSet,
    inside: Vec<i64>,
    edges: i64,
    size: usize,
}

impl<'a> Climber<'a> {
    fn new(graph: &'a Graph, p: f64, sign: f64, start: VertexSet) -> Self {
        let inside: Vec<i64> = (0..graph.n())
            .map(|v| graph.neighborhood(v).intersection_len(&start) as i64)
            .collect();
        let edges = start.iter().map(|v| inside[v]).sum::<i64>() / 2;
        let size = start.len();
        Climber {
            graph,
            p,
            sign,
            set: start,
            inside,
            edges,
            size,
        }
    }

    fn value(&self) -> f64 {
        edge_excess(self.edges as f64, self.size, self.p)
    }

    fn gain(&self, v: usize) -> f64 {
        let k = self.size as f64;
        let delta = if self.set.contains(v) {
            -(self.inside[v] as f64) + 0.5 * self.p * (2.0 * k - 1.0)
        } else {
            self.inside[v] as f64 - 0.5 * self.p * (2.0 * k + 1.0)
        };
        self.sign * delta
    }

    fn flip(&mut self, v: usize) {
        let delta = if self.set.contains(v) {
            self.edges -= self.inside[v];
            self.size -= 1;
            -1
        } else {
            self.edges += self.inside[v];
            self.size += 1;
            1
        };
        self.set.toggle(v);
        for w in self.graph.neighborhood(v).iter() {
            self.inside[w] += delta;
        }
    }

    /// Best-improvement single-vertex flips until no flip helps.
    fn climb(mut self) -> (f64, VertexSet) {
        loop {
            let best = (0..self.graph.n())
                .map(|v| (self.gain(v), v))
                .fold((1e-9, None), |acc, (g, v)| if g > acc.0 { (g, Some(v)) } else { acc });
            match best.1 {
                Some(v) => self.flip(v),
                None => return (self.value(), self.set),
            }
        }
    }
}

fn climb_both_ways(graph: &Graph, p: f64, start: &VertexSet) -> (f64, VertexSet) {
    let up = Climber::new(graph, p, 1.0, start.clone()).climb();
    let down = Climber::new(graph, p, -1.0, start.clone()).climb();
    if up.0.abs() >= down.0.abs() {
        up
    } else {
        down
    }
}

/// Heuristic lower bound on the edge discrepancy: hill climbing from `V`,
/// from each of `starts`, and from `spec.trials` random subsets.
pub fn edge_discrepancy_search(graph: &Graph, p: f64, spec: &SamplerSpec) -> Result<DeviationReport> {
    edge_discrepancy_search_from(graph, p, spec, &[])
}

pub fn edge_discrepancy_search_from(
    graph: &Graph,
    p: f64,
    spec: &SamplerSpec,
    starts: &[VertexSet],
) -> Result<DeviationReport> {
    check_p(p)?;
    spec.validate()?;
    starts.iter().try_for_each(|s| graph.check_set(s))?;
    let n = graph.n();
    let mut anchors = vec![graph.full_set()];
    anchors.extend(starts.iter().cloned());
    let anchored = anchors.len() as u64;
    let results: Vec<(f64, VertexSet)> = (0..anchored + spec.trials)
        .into_par_iter()
        .map(|i| {
            let start = if i < anchored {
                anchors[i as usize].clone()
            } else {
                sample_subset(n, spec.subset_law, &mut spec.stream(i - anchored))
            };
            climb_both_ways(graph, p, &start)
        })
        .collect();
    let values: Vec<f64> = results.iter().map(|r| r.0).collect();
    let mut report = DeviationReport::new(PropertyKind::EdgeDiscrepancy, graph, p, Method::Heuristic);
    report.convention = EDGE_CONVENTION.into();
    report.trials = spec.trials;
    report.seed = Some(spec.seed);
    if let Some((i, v)) = argmax_abs(&values) {
        report.deviation = normalize(v.abs(), n, 2);
        report.raw = v;
        report.witness = vec![results[i].1.to_vec()];
    }
    Ok(report)
}

/// Exact when `n` is within [`EXACT_SUBSET_CAP`], heuristic otherwise.
pub fn edge_discrepancy(graph: &Graph, p: f64, spec: &SamplerSpec) -> Result<DeviationReport> {
    if graph.n() <= EXACT_SUBSET_CAP {
        edge_discrepancy_exact(graph, p)
    } else {
        edge_discrepancy_search(graph, p, spec)
    }
}

/// One-sided C₄ deviation `max(0, hom(C₄, G) - p⁴n⁴) / n⁴`.
///
/// `hom(C₄, G)` counts closed 4-walks, so degenerate walks contribute
/// `O(n³)` on top of genuine 4-cycles.
pub fn c4_deviation(graph: &Graph, p: f64) -> Result<DeviationReport> {
    check_p(p)?;
    let n = graph.n();
    let hom = hom_count_all(&Pattern::c4(), graph)? as f64;
    let expected = p.powi(4) * (n as f64).powi(4);
    let mut report = DeviationReport::new(PropertyKind::C4, graph, p, Method::Exact);
    report.raw = hom - expected;
    report.deviation = normalize((hom - expected).max(0.0), n, 4);
    report.convention = "hom(C4, G) - p^4 n^4 (closed 4-walks)".into();
    report.trials = 1;
    report.extras.insert("hom_engine".into(), hom);
    if n <= SPECTRAL_CROSS_CHECK_CAP {
        let spectral = spectral::fourth_moment(graph);
        report.extras.insert("hom_spectral".into(), spectral);
        report
            .extras
            .insert("relative_gap".into(), (hom - spectral).abs() / hom.max(1.0));
    }
    Ok(report)
}

/// `max(|λ₁ - pn|, |λ₂|) / n`.
pub fn spectral_deviation(graph: &Graph, p: f64) -> Result<DeviationReport> {
    check_p(p)?;
    let (l1, l2) = spectral::spectral_top2(graph)?;
    let n = graph.n() as f64;
    let mut report = DeviationReport::new(PropertyKind::Spectral, graph, p, Method::Exact);
    let first = (l1 - p * n).abs();
    report.raw = if first >= l2.abs() { l1 - p * n } else { l2 };
    report.deviation = first.max(l2.abs()) / n;
    report.convention = "max(|lambda1 - p n|, |lambda2|)".into();
    report.trials = 1;
    report.extras.insert("lambda1".into(), l1);
    report.extras.insert("lambda2".into(), l2);
    Ok(report)
}

fn all_subsets(n: usize) -> Vec<VertexSet> {
    (0u64..(1u64 << n))
        .map(|mask| VertexSet::from_vertices(n, (0..n).filter(|&v| mask >> v & 1 == 1)).expect("in range"))
        .collect()
}

/// `|c(H, G[U]) - p^{e(H)} |U|^{v(H)}| / n^{v(H)}` maximised over `family`.
pub fn hereditary_deviation_over(
    pattern: &Pattern,
    graph: &Graph,
    p: f64,
    family: &[VertexSet],
) -> Result<DeviationReport> {
    check_p(p)?;
    check_nonempty(pattern)?;
    family.iter().try_for_each(|s| graph.check_set(s))?;
    let weight = p.powi(pattern.edge_count() as i32);
    let r = pattern.r() as i32;
    let values = family
        .par_iter()
        .map(|s| Ok(hom_count_in_induced(pattern, graph, s)? as f64 - weight * (s.len() as f64).powi(r)))
        .collect::<Result<Vec<f64>>>()?;
    let n = graph.n();
    let mut report = DeviationReport::new(PropertyKind::Hereditary, graph, p, Method::Sampled);
    report.convention = "c(H, G[U]) - p^e(H) |U|^v(H) (labelled homomorphisms)".into();
    report.trials = family.len() as u64;
    if let Some((i, v)) = argmax_abs(&values) {
        report.deviation = normalize(v.abs(), n, pattern.r());
        report.raw = v;
        report.witness = vec![family[i].to_vec()];
    }
    let normalized: Vec<f64> = values.iter().map(|v| normalize(*v, n, pattern.r())).collect();
    report.extras.insert("sd".into(), spread(&normalized));
    Ok(report)
}

/// Hereditary deviation over every subset when `n ≤ 16`, otherwise over `V`
/// plus `spec.trials` sampled subsets.
pub fn hereditary_deviation(
    pattern: &Pattern,
    graph: &Graph,
    p: f64,
    spec: &SamplerSpec,
) -> Result<DeviationReport> {
    check_nonempty(pattern)?;
    spec.validate()?;
    let n = graph.n();
    if n <= HEREDITARY_EXACT_CAP {
        let mut report = hereditary_deviation_over(pattern, graph, p, &all_subsets(n))?;
        report.method = Method::Exact;
        return Ok(report);
    }
    let mut family = vec![graph.full_set()];
    family.extend(sample_subsets(n, spec));
    let mut report = hereditary_deviation_over(pattern, graph, p, &family)?;
    report.seed = Some(spec.seed);
    Ok(report)
}

/// `|c(H, G; U_1, ..) - p^{e(H)} ∏|U_i|| / n^{v(H)}` maximised over `tuples`.
/// The report is tagged disjoint when every tuple is pairwise disjoint.
pub fn labeled_deviation_over(
    pattern: &Pattern,
    graph: &Graph,
    p: f64,
    tuples: &[ConstraintTuple],
) -> Result<DeviationReport> {
    check_p(p)?;
    check_nonempty(pattern)?;
    tuples.iter().try_for_each(|t| t.validate(pattern, graph))?;
    let weight = p.powi(pattern.edge_count() as i32);
    let values = tuples
        .par_iter()
        .map(|t| Ok(hom_count(pattern, graph, t)? as f64 - weight * t.size_product()))
        .collect::<Result<Vec<f64>>>()?;
    let disjoint = tuples.iter().all(ConstraintTuple::pairwise_disjoint);
    let property = if disjoint {
        PropertyKind::LabeledDisjoint
    } else {
        PropertyKind::LabeledFree
    };
    let n = graph.n();
    let mut report = DeviationReport::new(property, graph, p, Method::Sampled);
    report.convention = "c(H, G; U_1..U_r) - p^e(H) prod |U_i| (labelled homomorphisms)".into();
    report.trials = tuples.len() as u64;
    if let Some((i, v)) = argmax_abs(&values) {
        report.deviation = normalize(v.abs(), n, pattern.r());
        report.raw = v;
        report.witness = tuples[i].sets().iter().map(VertexSet::to_vec).collect();
    }
    let normalized: Vec<f64> = values.iter().map(|v| normalize(*v, n, pattern.r())).collect();
    report.extras.insert("sd".into(), spread(&normalized));
    Ok(report)
}

/// Labelled deviation over sampled tuples: disjoint tuples (`spec.disjoint`)
/// or arbitrary ones, the latter always including `(V, .., V)`.
pub fn labeled_deviation(
    pattern: &Pattern,
    graph: &Graph,
    p: f64,
    spec: &SamplerSpec,
) -> Result<DeviationReport> {
    check_nonempty(pattern)?;
    spec.validate()?;
    let mut tuples = Vec::new();
    if !spec.disjoint {
        tuples.push(ConstraintTuple::unconstrained(pattern, graph));
    }
    tuples.extend(sample_tuples(graph.n(), pattern.r(), spec));
    let mut report = labeled_deviation_over(pattern, graph, p, &tuples)?;
    report.property = if spec.disjoint {
        PropertyKind::LabeledDisjoint
    } else {
        PropertyKind::LabeledFree
    };
    report.seed = Some(spec.seed);
    Ok(report)
}

/// Density sanity check against the measured free-tuple deviation `delta`:
/// `(p^{e(H)} - δ) n^{v} ≤ c(H, G) ≤ (2e(G))^{v}`, with `H` stripped of
/// isolated vertices (`v` is the stripped vertex count). Deviation is the
/// normalised violation, 0 when both sides hold.
pub fn crude_density_check(pattern: &Pattern, graph: &Graph, p: f64, delta: f64) -> Result<DeviationReport> {
    check_p(p)?;
    check_nonempty(pattern)?;
    let mut core = pattern.clone();
    while let Some(v) = (0..core.r()).find(|&v| core.degree(v) == 0) {
        core = core.remove_vertex(v).0;
    }
    let n = graph.n() as f64;
    let v = core.r() as i32;
    let count = hom_count_all(&core, graph)? as f64;
    let lower = (p.powi(pattern.edge_count() as i32) - delta) * n.powi(v);
    let upper = (2.0 * graph.edge_count() as f64).powi(v);
    let slack = 1e-9 * n.powi(v);
    let shortfall = (lower - count).max(count - upper).max(0.0);
    let mut report = DeviationReport::new(PropertyKind::CrudeDensity, graph, p, Method::Exact);
    report.deviation = if shortfall <= slack { 0.0 } else { shortfall / n.powi(v) };
    report.raw = count - lower;
    report.convention = "c(H,G) against (p^e - delta) n^v below and (2e(G))^v above".into();
    report.trials = 1;
    let implied = if n >= 2.0 {
        lower.max(0.0).powf(1.0 / v as f64) / (n * (n - 1.0))
    } else {
        0.0
    };
    report.extras.insert("hom_count".into(), count);
    report.extras.insert("lower".into(), lower);
    report.extras.insert("upper".into(), upper);
    report.extras.insert("delta".into(), delta);
    report.extras.insert("q_implied_min".into(), implied);
    report.extras.insert(
        "p_power".into(),
        p.powf(pattern.edge_count() as f64 / pattern.r() as f64),
    );
    Ok(report)
}

/// Runs every applicable evaluator.
pub fn full_report(
    pattern: &Pattern,
    graph: &Graph,
    p: f64,
    spec: &SamplerSpec,
) -> Result<Vec<DeviationReport>> {
    full_report_from(pattern, graph, p, spec, &[])
}

/// [`full_report`] with extra starting sets for the edge-discrepancy search
/// (used only when `n` exceeds [`EXACT_SUBSET_CAP`]).
pub fn full_report_from(
    pattern: &Pattern,
    graph: &Graph,
    p: f64,
    spec: &SamplerSpec,
    starts: &[VertexSet],
) -> Result<Vec<DeviationReport>> {
    check_nonempty(pattern)?;
    check_p(p)?;
    spec.validate()?;
    let edge = if graph.n() <= EXACT_SUBSET_CAP {
        edge_discrepancy_exact(graph, p)?
    } else {
        edge_discrepancy_search_from(graph, p, spec, starts)?
    };
    let mut reports = vec![edge, c4_deviation(graph, p)?];
    if graph.n() >= 2 {
        reports.push(spectral_deviation(graph, p)?);
    }
    reports.push(hereditary_deviation(pattern, graph, p, spec)?);
    let disjoint = SamplerSpec { disjoint: true, ..*spec };
    let free = SamplerSpec { disjoint: false, ..*spec };
    reports.push(labeled_deviation(pattern, graph, p, &disjoint)?);
    let free_report = labeled_deviation(pattern, graph, p, &free)?;
    let delta = free_report.deviation;
    reports.push(free_report);
    reports.push(crude_density_check(pattern, graph, p, delta)?);
    Ok(reports)
}
