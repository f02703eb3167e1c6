//! Degree-power discrepancy and the doubled-count argument bounding it.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::hom::{doubled_count, hom_count, ConstraintTuple};
use crate::pattern::Pattern;
use crate::set::VertexSet;

fn checked_pow(x: u64, r: u32) -> Result<i128> {
    (x as i128).checked_pow(r).ok_or(Error::Overflow)
}

/// `Σ_{i,j} |b_j^r - a_i^r|` for sorted powers, via prefix sums.
fn pairwise_abs_sum(a_pow: &[i128], b_pow: &[i128]) -> Result<i128> {
    let mut sorted = a_pow.to_vec();
    sorted.sort_unstable();
    let mut prefix = Vec::with_capacity(sorted.len() + 1);
    prefix.push(0i128);
    for &x in &sorted {
        let last = *prefix.last().expect("nonempty");
        prefix.push(last.checked_add(x).ok_or(Error::Overflow)?);
    }
    let total = *prefix.last().expect("nonempty");
    let mut sum = 0i128;
    for &b in b_pow {
        let below = sorted.partition_point(|&a| a < b);
        let above = sorted.len() - below;
        let low = (below as i128).checked_mul(b).ok_or(Error::Overflow)? - prefix[below];
        let high = (total - prefix[below]) - (above as i128).checked_mul(b).ok_or(Error::Overflow)?;
        sum = sum
            .checked_add(low)
            .and_then(|s| s.checked_add(high))
            .ok_or(Error::Overflow)?;
    }
    Ok(sum)
}

/// Both sides of `Σ_{i,j}|b_j^r - a_i^r| ≥ (Σ_j b_j^{r-1})(Σ_j b_j - Σ_i a_i)`,
/// in exact integer arithmetic.
pub fn power_sum_gap(a: &[u64], b: &[u64], r: u32) -> Result<(i128, i128)> {
    if a.len() != b.len() {
        return Err(Error::input(format!(
            "sequences differ in length: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(Error::input("sequences must be nonempty"));
    }
    if r == 0 {
        return Err(Error::input("r must be at least 1"));
    }
    let a_pow = a.iter().map(|&x| checked_pow(x, r)).collect::<Result<Vec<_>>>()?;
    let b_pow = b.iter().map(|&x| checked_pow(x, r)).collect::<Result<Vec<_>>>()?;
    let lhs = pairwise_abs_sum(&a_pow, &b_pow)?;
    let mut b_lower = 0i128;
    for &x in b {
        b_lower = b_lower.checked_add(checked_pow(x, r - 1)?).ok_or(Error::Overflow)?;
    }
    let diff = b.iter().map(|&x| x as i128).sum::<i128>() - a.iter().map(|&x| x as i128).sum::<i128>();
    let rhs = b_lower.checked_mul(diff).ok_or(Error::Overflow)?;
    Ok((lhs, rhs))
}

/// `Σ_{u,v} |d^r(u) - d^r(v)|` over ordered pairs.
pub fn degree_power_discrepancy(graph: &Graph, r: u32) -> Result<u128> {
    if r == 0 {
        return Err(Error::input("r must be at least 1"));
    }
    if graph.n() == 0 {
        return Ok(0);
    }
    let powers = graph
        .degrees()
        .iter()
        .map(|&d| checked_pow(d as u64, r))
        .collect::<Result<Vec<_>>>()?;
    Ok(pairwise_abs_sum(&powers, &powers)? as u128)
}

/// The table of doubled counts `c(u, v)` with the per-`u` split of
/// `V(G)` into `V⁺` (where `c(u, v) ≥ p^{e(H)} d^r(u) n^{v(H)-r-1}`) and `V⁻`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DoubledCountTable {
    pub n: usize,
    pub r: usize,
    pub designated: usize,
    /// Row-major `c(u, v)`.
    pub counts: Vec<u64>,
    /// `p^{e(H)} d^r(u) n^{v(H)-r-1}` per `u`.
    pub expected: Vec<f64>,
    pub v_plus: Vec<VertexSet>,
    pub v_minus: Vec<VertexSet>,
    #[serde(skip)]
    pattern: Pattern,
}

impl DoubledCountTable {
    pub fn compute(pattern: &Pattern, graph: &Graph, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::input(format!("p = {p} is outside [0, 1]")));
        }
        if pattern.r() == 0 {
            return Err(Error::input("pattern needs a designated vertex"));
        }
        let n = graph.n();
        let designated = pattern.designated();
        let r = pattern.degree(designated);
        let scale = p.powi(pattern.edge_count() as i32) * (n as f64).powi((pattern.r() - r - 1) as i32);
        let rows = (0..n)
            .into_par_iter()
            .map(|u| (0..n).map(|v| doubled_count(pattern, graph, u, v)).collect::<Result<Vec<u64>>>())
            .collect::<Result<Vec<_>>>()?;
        let expected: Vec<f64> = graph
            .degrees()
            .iter()
            .map(|&d| scale * (d as f64).powi(r as i32))
            .collect();
        let mut v_plus = Vec::with_capacity(n);
        let mut v_minus = Vec::with_capacity(n);
        for (u, row) in rows.iter().enumerate() {
            let plus = VertexSet::from_vertices(n, (0..n).filter(|&v| row[v] as f64 >= expected[u]))?;
            v_minus.push(plus.complement());
            v_plus.push(plus);
        }
        Ok(DoubledCountTable {
            n,
            r,
            designated,
            counts: rows.concat(),
            expected,
            v_plus,
            v_minus,
            pattern: pattern.clone(),
        })
    }

    pub fn get(&self, u: usize, v: usize) -> u64 {
        self.counts[u * self.n + v]
    }

    /// `(W, N(u), .., N(u), V, .., V)` with `W` at the designated vertex and
    /// `N(u)` at its neighbours.
    pub fn tuple_for(&self, graph: &Graph, u: usize, w: VertexSet) -> ConstraintTuple {
        let mut sets = vec![graph.full_set(); self.pattern.r()];
        sets[self.designated] = w;
        for &x in self.pattern.neighbors(self.designated) {
            sets[x] = graph.neighborhood(u).clone();
        }
        ConstraintTuple::new(sets)
    }

    /// The `2n` tuples `(V^±(u), N(u), .., V, ..)` used to bound `Σᵤ±`.
    pub fn proof_tuples(&self, graph: &Graph) -> Vec<ConstraintTuple> {
        (0..self.n)
            .flat_map(|u| {
                [
                    self.tuple_for(graph, u, self.v_plus[u].clone()),
                    self.tuple_for(graph, u, self.v_minus[u].clone()),
                ]
            })
            .collect()
    }

    /// `(Σᵤ⁺, Σᵤ⁻)` per `u`; `Σᵤ⁻ ≤ 0`.
    pub fn sigmas(&self) -> (Vec<f64>, Vec<f64>) {
        (0..self.n)
            .map(|u| {
                let mut plus = 0.0;
                let mut minus = 0.0;
                for v in 0..self.n {
                    let diff = self.get(u, v) as f64 - self.expected[u];
                    if self.v_plus[u].contains(v) {
                        plus += diff;
                    } else {
                        minus += diff;
                    }
                }
                (plus, minus)
            })
            .unzip()
    }

    pub fn trace(&self, graph: &Graph, p: f64, delta: f64) -> Result<MainLemmaTrace> {
        if !(delta >= 0.0) {
            return Err(Error::input(format!("delta = {delta} must be non-negative")));
        }
        if self.r == 0 {
            return Err(Error::input("designated vertex is isolated; r must be at least 1"));
        }
        let n = self.n as f64;
        let v = self.pattern.r() as i32;
        let e = self.pattern.edge_count() as i32;
        let r = self.r as i32;
        let (sigma_plus, sigma_minus) = self.sigmas();

        // Σ_{v ∈ V±} c(u, v) must be the single constrained count of the tuple.
        let tuple_check = (0..self.n)
            .into_par_iter()
            .map(|u| {
                let row = &self.counts[u * self.n..(u + 1) * self.n];
                for w in [&self.v_plus[u], &self.v_minus[u]] {
                    let direct: u64 = w.iter().map(|x| row[x]).sum();
                    if hom_count(&self.pattern, graph, &self.tuple_for(graph, u, w.clone()))? != direct {
                        return Ok(false);
                    }
                }
                Ok(true)
            })
            .collect::<Result<Vec<bool>>>()?
            .into_iter()
            .all(|ok| ok);

        let total = degree_power_discrepancy(graph, self.r as u32)?;
        let total_f = total as f64;
        let sigma_bound = delta * n.powi(v);
        let tolerance = 1e-9 * n.powi(v).max(1.0);
        let sigma_within_bound = sigma_plus
            .iter()
            .chain(&sigma_minus)
            .all(|s| s.abs() <= sigma_bound + tolerance);
        let p_e = p.powi(e);
        let sum_abs: f64 = sigma_plus.iter().zip(&sigma_minus).map(|(a, b)| a.abs() + b.abs()).sum();
        let d_difference_rhs = 2.0 / p_e * n.powi(-v + r + 1) * sum_abs;
        let ratio = |norm: f64| {
            if total == 0 {
                0.0
            } else {
                total_f / (norm * delta * n.powi(r + 2))
            }
        };
        Ok(MainLemmaTrace {
            r: self.r,
            designated: self.designated,
            p,
            delta,
            total,
            sigma_plus,
            sigma_minus,
            sigma_bound,
            sigma_within_bound,
            d_difference_rhs,
            d_difference_holds: total_f <= d_difference_rhs * (1.0 + 1e-12) + 1e-9,
            bound_ratio: ratio(1.0 / p_e),
            bound_ratio_stated: ratio(p_e),
            tuple_check,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MainLemmaTrace {
    pub r: usize,
    pub designated: usize,
    pub p: f64,
    pub delta: f64,
    /// `Σ_{u,v} |d^r(u) - d^r(v)|`.
    pub total: u128,
    pub sigma_plus: Vec<f64>,
    pub sigma_minus: Vec<f64>,
    /// `δ·n^{v(H)}`.
    pub sigma_bound: f64,
    pub sigma_within_bound: bool,
    /// `2p^{-e(H)} n^{-v(H)+r+1} Σ_u (|Σᵤ⁺| + |Σᵤ⁻|)`.
    pub d_difference_rhs: f64,
    pub d_difference_holds: bool,
    /// `total / (p^{-e(H)} δ n^{r+2})`.
    pub bound_ratio: f64,
    /// `total / (p^{e(H)} δ n^{r+2})`, the normalisation in the lemma's
    /// statement.
    pub bound_ratio_stated: f64,
    /// Whether every `Σ_{v∈V±} c(u, v)` equals the count of its tuple.
    pub tuple_check: bool,
}

/// Traces the bound on `Σ_{u,v}|d^r(u) - d^r(v)|` for the designated vertex
/// of `H` (of degree `r`), given a measured labelled deviation `delta`.
pub fn main_lemma_trace(pattern: &Pattern, graph: &Graph, p: f64, delta: f64) -> Result<MainLemmaTrace> {
    DoubledCountTable::compute(pattern, graph, p)?.trace(graph, p, delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, GeneratorSpec};

    fn brute_lhs(a: &[u64], b: &[u64], r: u32) -> i128 {
        let mut s = 0i128;
        for &x in a {
            for &y in b {
                s += ((y as i128).pow(r) - (x as i128).pow(r)).abs();
            }
        }
        s
    }

    #[test]
    fn power_sum_examples() {
        let a = [3, 1, 4, 1, 5];
        let (lhs, rhs) = power_sum_gap(&a, &a, 3).unwrap();
        assert_eq!(lhs, brute_lhs(&a, &a, 3));
        assert_eq!(rhs, 0);
        let (lhs, rhs) = power_sum_gap(&[0; 7], &[1; 7], 2).unwrap();
        assert_eq!((lhs, rhs), (49, 49));
        assert!(power_sum_gap(&[1, 2], &[1], 2).is_err());
        assert!(power_sum_gap(&[1], &[1], 0).is_err());
    }

    #[test]
    fn degree_power_examples() {
        assert_eq!(degree_power_discrepancy(&Graph::star(3), 1).unwrap(), 12);
        assert_eq!(degree_power_discrepancy(&Graph::path(3), 2).unwrap(), 12);
        assert_eq!(degree_power_discrepancy(&Graph::cycle(7).unwrap(), 3).unwrap(), 0);
    }

    #[test]
    fn regular_host_has_zero_total() {
        let g = Graph::complete_bipartite(5, 5);
        let trace = main_lemma_trace(&Pattern::k3(), &g, 0.5, 0.01).unwrap();
        assert_eq!(trace.total, 0);
        assert_eq!(trace.bound_ratio, 0.0);
        assert!(trace.tuple_check);
    }

    #[test]
    fn star_host_codegrees() {
        let g = Graph::star(4);
        let table = DoubledCountTable::compute(&Pattern::k2(), &g, 0.5).unwrap();
        for u in 0..5 {
            for v in 0..5 {
                let co = g.neighborhood(u).intersection_len(g.neighborhood(v)) as u64;
                assert_eq!(table.get(u, v), co);
            }
        }
        let trace = table.trace(&g, 0.5, 0.1).unwrap();
        assert_eq!(trace.total, degree_power_discrepancy(&g, 1).unwrap());
        assert!(trace.d_difference_holds);
        assert!(trace.tuple_check);
    }

    #[test]
    fn random_host_d_difference() {
        let g = generate(&GeneratorSpec::erdos_renyi(24, 0.5, 11)).unwrap();
        let trace = main_lemma_trace(&Pattern::k3(), &g, 0.5, 0.05).unwrap();
        assert_eq!(trace.r, 2);
        assert!(trace.d_difference_holds, "{} > {}", trace.total, trace.d_difference_rhs);
        assert!(trace.tuple_check);
        assert!(trace.sigma_minus.iter().all(|&s| s <= 0.0));
        assert!(trace.sigma_plus.iter().all(|&s| s >= 0.0));
    }
}
