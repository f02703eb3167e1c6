mod common;

use common::*;
use proptest::prelude::*;
use quasirand::metrics::{
    c4_deviation, crude_density_check, edge_discrepancy_exact, edge_discrepancy_over, edge_discrepancy_search,
    hereditary_deviation, hereditary_deviation_over, labeled_deviation, labeled_deviation_over,
};
use quasirand::sampler::sample_subsets;
use quasirand::spectral::spectral_top2;
use quasirand::{generate, generate_instance, ConstraintTuple, GeneratorSpec, Pattern, SamplerSpec};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn exact_discrepancy_matches_enumeration(g in graph(1..=10), p in 0.0f64..=1.0) {
        let report = edge_discrepancy_exact(&g, p).unwrap();
        prop_assert!((report.deviation - brute_edge_discrepancy(&g, p)).abs() < 1e-12);
    }

    #[test]
    fn exact_discrepancy_is_isomorphism_invariant(g in graph(1..=12), p in 0.0f64..=1.0, key in any::<u64>()) {
        let mut perm: Vec<usize> = (0..g.n()).collect();
        perm.sort_by_key(|&v| (v as u64 ^ key).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let a = edge_discrepancy_exact(&g, p).unwrap().deviation;
        let b = edge_discrepancy_exact(&g.permute(&perm).unwrap(), p).unwrap().deviation;
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn edge_hereditary_is_twice_edge_discrepancy(g in graph(2..=20), p in 0.0f64..=1.0, seed in any::<u64>()) {
        let family = sample_subsets(g.n(), &SamplerSpec::with_trials(30, seed));
        let h = hereditary_deviation_over(&Pattern::k2(), &g, p, &family).unwrap().deviation;
        let e = edge_discrepancy_over(&g, p, &family).unwrap().deviation;
        prop_assert!((h - 2.0 * e).abs() <= 1e-12, "{} vs {}", h, 2.0 * e);
    }

    #[test]
    fn labelled_edge_tuple_is_normalised_edges_between((g, a, b) in graph_with_pair(1..=12), p in 0.0f64..=1.0) {
        let t = ConstraintTuple::new(vec![a.clone(), b.clone()]);
        let report = labeled_deviation_over(&Pattern::k2(), &g, p, &[t]).unwrap();
        let n = g.n() as f64;
        let expected = (naive_edges_between(&g, &a, &b) as f64 - p * (a.len() * b.len()) as f64).abs() / (n * n);
        prop_assert!((report.deviation - expected).abs() < 1e-12);
    }

    #[test]
    fn more_trials_never_lower_a_sampled_deviation(g in graph(4..=24), seed in any::<u64>(), t in 1u64..40) {
        let h = Pattern::k3();
        let small = SamplerSpec::with_trials(t, seed);
        let large = SamplerSpec::with_trials(2 * t, seed);
        let lab = |s| labeled_deviation(&h, &g, 0.5, s).unwrap().deviation;
        let her = |s| hereditary_deviation(&h, &g, 0.5, s).unwrap().deviation;
        prop_assert!(lab(&large) >= lab(&small));
        prop_assert!(her(&large) >= her(&small));
    }

    #[test]
    fn disjoint_family_is_dominated_by_its_superset(g in graph(3..=16), seed in any::<u64>()) {
        let h = Pattern::p3();
        let spec = SamplerSpec::with_trials(40, seed);
        let disjoint = labeled_deviation(&h, &g, 0.5, &spec).unwrap();
        let mut tuples = vec![ConstraintTuple::unconstrained(&h, &g)];
        tuples.extend(quasirand::sampler::sample_tuples(g.n(), h.r(), &spec));
        let superset = labeled_deviation_over(&h, &g, 0.5, &tuples).unwrap();
        prop_assert!(disjoint.deviation <= superset.deviation);
    }
}

#[test]
fn search_is_close_to_exact_on_small_hosts() {
    for i in 0..50u64 {
        let n = 10 + (i % 7) as usize;
        let p = 0.2 + 0.6 * (i as f64 / 50.0);
        let g = generate(&GeneratorSpec::planted_dense(n, p * 0.7, 0.4, 0.3 * (i % 2) as f64, i)).unwrap();
        let exact = edge_discrepancy_exact(&g, p).unwrap().deviation;
        let search = edge_discrepancy_search(&g, p, &SamplerSpec::with_trials(64, i)).unwrap().deviation;
        assert!(search <= exact + 1e-12, "graph {i}: search {search} above exact {exact}");
        assert!(search >= 0.9 * exact, "graph {i}: search {search} below 0.9 x {exact}");
    }
}

#[test]
fn search_witness_finds_the_plant() {
    let seeds = 10;
    let mut hits = 0;
    for seed in 0..seeds {
        let inst = generate_instance(&GeneratorSpec::planted_dense(200, 0.3, 0.25, 0.2, seed)).unwrap();
        let plant = inst.plant.unwrap();
        let report = edge_discrepancy_search(&inst.graph, 0.3, &SamplerSpec::with_trials(200, seed)).unwrap();
        let witness = &report.witness[0];
        let overlap = witness.iter().filter(|&&v| plant.contains(v)).count();
        hits += (overlap as f64 >= 0.6 * plant.len() as f64) as u32;
    }
    assert!(hits as f64 >= 0.8 * seeds as f64, "{hits}/{seeds}");
}

#[test]
fn random_host_is_spectrally_and_cyclically_flat() {
    let g = generate(&GeneratorSpec::erdos_renyi(256, 0.5, 1)).unwrap();
    assert!(c4_deviation(&g, 0.5).unwrap().deviation <= 0.01);
    let (l1, l2) = spectral_top2(&g).unwrap();
    assert!((l1 - 128.0).abs() <= 0.05 * 256.0, "{l1}");
    assert!(l2.abs() <= 3.0 * 16.0, "{l2}");
}

#[test]
fn crude_bound_holds_on_random_hosts() {
    for (seed, h) in [(0u64, Pattern::k3()), (1, Pattern::c4()), (2, Pattern::p3()), (3, Pattern::k2())] {
        let g = generate(&GeneratorSpec::erdos_renyi(60, 0.5, seed)).unwrap();
        let spec = SamplerSpec { disjoint: false, ..SamplerSpec::with_trials(200, seed) };
        let delta = labeled_deviation(&h, &g, 0.5, &spec).unwrap().deviation;
        assert!(delta < 0.5f64.powi(h.edge_count() as i32) / 2.0);
        assert_eq!(crude_density_check(&h, &g, 0.5, delta).unwrap().deviation, 0.0);
    }
}
