mod common;

use common::*;
use proptest::prelude::*;
use quasirand::{generate, GeneratorKind, GeneratorSpec};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn degrees_sum_to_twice_edges(g in graph(0..=14)) {
        let total: usize = g.degrees().iter().sum();
        prop_assert_eq!(total as u64, 2 * g.edge_count());
    }

    #[test]
    fn edges_between_matches_oracle_and_is_symmetric((g, a, b) in graph_with_pair(1..=12)) {
        let ab = g.edges_between(&a, &b);
        prop_assert_eq!(ab, naive_edges_between(&g, &a, &b));
        prop_assert_eq!(ab, g.edges_between(&b, &a));
    }

    #[test]
    fn self_pairs_count_edges_twice((g, a, _b) in graph_with_pair(1..=12)) {
        prop_assert_eq!(g.edges_between(&a, &a), 2 * g.edges_within(&a));
        prop_assert_eq!(g.edges_within(&a), naive_edges_within(&g, &a));
    }

    #[test]
    fn four_term_identity((g, a, b) in graph_with_pair(1..=12)) {
        let e = |s| g.edges_within(s) as i64;
        let rhs = e(&a.union(&b)) + e(&a.intersection(&b)) - e(&a.difference(&b)) - e(&b.difference(&a));
        prop_assert_eq!(g.edges_between(&a, &b) as i64, rhs);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generation_is_a_function_of_the_spec(
        n in 1usize..60,
        p in 0.0f64..=1.0,
        fraction in 0.0f64..=1.0,
        boost in 0.0f64..=1.0,
        seed in any::<u64>(),
        planted in any::<bool>(),
    ) {
        let spec = if planted {
            GeneratorSpec::planted_dense(n, p * (1.0 - boost), fraction, boost, seed)
        } else {
            GeneratorSpec::erdos_renyi(n, p, seed)
        };
        let a = generate(&spec).unwrap();
        prop_assert_eq!(&a, &generate(&spec).unwrap());
        prop_assert_eq!(a.n(), n);
    }

    #[test]
    fn permutation_preserves_degree_multiset(g in graph(1..=12), key in any::<u64>()) {
        let n = g.n();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.sort_by_key(|&v| (v as u64).wrapping_mul(key | 1).rotate_left(17));
        let h = g.permute(&perm).unwrap();
        let mut a = g.degree_sequence();
        let mut b = h.degree_sequence();
        a.sort_unstable();
        b.sort_unstable();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn extreme_kinds_have_closed_form_edge_counts() {
    for n in [1usize, 2, 7, 20] {
        let m = (n * (n - 1) / 2) as u64;
        assert_eq!(generate(&GeneratorSpec::of_kind(GeneratorKind::Complete, n)).unwrap().edge_count(), m);
        assert_eq!(generate(&GeneratorSpec::of_kind(GeneratorKind::Empty, n)).unwrap().edge_count(), 0);
        assert_eq!(generate(&GeneratorSpec::erdos_renyi(n, 1.0, 3)).unwrap().edge_count(), m);
    }
}
