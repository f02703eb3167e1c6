//! The counting-lemma telescope: replacing edge indicators of `H` by `p` one
//! at a time moves the weighted count by at most `4δ·n^{v(H)}`, where `δ` is
//! the hereditary `K₂` deviation of the host.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::hom::{filtration_values, ConstraintTuple, FiltrationStep};
use crate::metrics::{edge_discrepancy, Method};
use crate::pattern::Pattern;
use crate::sampler::SamplerSpec;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountingLemmaReport {
    pub steps: Vec<FiltrationStep>,
    /// `c_{H,H_k} - c_{H,H_{k-1}}` for `k = 1..=e(H)`.
    pub diffs: Vec<f64>,
    /// `4δ·n^{v(H)}`.
    pub bound: f64,
    pub verdicts: Vec<bool>,
    pub bound_holds: bool,
    /// Smallest `δ` with `|2e(U) - p|U|²| ≤ δn²` for every examined `U`.
    pub delta_used: f64,
    /// `Exact` when every subset was examined; otherwise `δ` is a witnessed
    /// lower bound and a passing verdict is not a proof.
    pub delta_method: Method,
    /// `c_H - p^{e(H)} ∏|U_i|`.
    pub total_deviation: f64,
    /// `4e(H)δ·n^{v(H)}`.
    pub total_bound: f64,
}

/// Measures `δ` on `graph` (exactly for `n ≤ 24`, by search otherwise) and
/// checks the telescope along the lexicographic filtration.
pub fn counting_lemma_bound(
    pattern: &Pattern,
    graph: &Graph,
    p: f64,
    constraints: &ConstraintTuple,
    spec: &SamplerSpec,
) -> Result<CountingLemmaReport> {
    let disc = edge_discrepancy(graph, p, spec)?;
    counting_lemma_bound_with_delta(pattern, graph, p, constraints, 2.0 * disc.deviation, disc.method)
}

pub fn counting_lemma_bound_with_delta(
    pattern: &Pattern,
    graph: &Graph,
    p: f64,
    constraints: &ConstraintTuple,
    delta: f64,
    delta_method: Method,
) -> Result<CountingLemmaReport> {
    if !pattern.is_nonempty() {
        return Err(Error::input("counting lemma needs a pattern with an edge"));
    }
    if !(delta >= 0.0) {
        return Err(Error::input(format!("delta = {delta} must be non-negative")));
    }
    let steps = filtration_values(pattern, graph, p, constraints, None)?;
    let n_v = (graph.n() as f64).powi(pattern.r() as i32);
    let bound = 4.0 * delta * n_v;
    // Counts are integers scaled by powers of p; leave room for rounding.
    let tolerance = 1e-9 * n_v.max(1.0);
    let diffs: Vec<f64> = steps.windows(2).map(|w| w[1].value - w[0].value).collect();
    let verdicts: Vec<bool> = diffs.iter().map(|d| d.abs() <= bound + tolerance).collect();
    let first = steps.first().expect("filtration has a step 0").value;
    let last = steps.last().expect("filtration has a last step").value;
    Ok(CountingLemmaReport {
        bound_holds: verdicts.iter().all(|&v| v),
        total_deviation: last - first,
        total_bound: bound * pattern.edge_count() as f64,
        steps,
        diffs,
        bound,
        verdicts,
        delta_used: delta,
        delta_method,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, GeneratorSpec};
    use crate::set::VertexSet;

    #[test]
    fn k2_single_step() {
        let g = generate(&GeneratorSpec::erdos_renyi(12, 0.5, 4)).unwrap();
        let a = VertexSet::from_vertices(12, [0, 1, 2, 3, 4]).unwrap();
        let b = VertexSet::from_vertices(12, [3, 4, 5, 6, 7, 8, 9]).unwrap();
        let c = ConstraintTuple::new(vec![a.clone(), b.clone()]);
        let report = counting_lemma_bound(&Pattern::k2(), &g, 0.5, &c, &SamplerSpec::default()).unwrap();
        assert_eq!(report.diffs.len(), 1);
        let expected = g.edges_between(&a, &b) as f64 - 0.5 * 35.0;
        assert!((report.diffs[0] - expected).abs() < 1e-9);
        assert_eq!(report.delta_method, Method::Exact);
        assert!(report.bound_holds);
    }

    #[test]
    fn complete_host_with_p_one() {
        // K_n has no loops, so indicators are identically 1 only across
        // disjoint sets
        let g = Graph::complete(9);
        let h = Pattern::k3();
        let c = ConstraintTuple::new((0..3).map(|i| VertexSet::from_vertices(9, 3 * i..3 * i + 3).unwrap()).collect());
        let report = counting_lemma_bound(&h, &g, 1.0, &c, &SamplerSpec::default()).unwrap();
        assert!(report.diffs.iter().all(|&d| d == 0.0));
        assert!(report.bound_holds);
    }

    #[test]
    fn random_host_triangle() {
        let g = generate(&GeneratorSpec::erdos_renyi(20, 0.5, 9)).unwrap();
        let h = Pattern::k3();
        let c = ConstraintTuple::unconstrained(&h, &g);
        let report = counting_lemma_bound(&h, &g, 0.5, &c, &SamplerSpec::default()).unwrap();
        assert_eq!(report.diffs.len(), 3);
        assert!(report.bound_holds, "{report:?}");
        assert!(report.total_deviation.abs() <= report.total_bound);
    }

    #[test]
    fn rejects_empty_pattern() {
        let g = Graph::complete(4);
        let h = Pattern::single_vertex();
        let c = ConstraintTuple::unconstrained(&h, &g);
        assert!(counting_lemma_bound_with_delta(&h, &g, 0.5, &c, 0.1, Method::Exact).is_err());
    }
}
