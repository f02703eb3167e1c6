//! Constructive versions of the reductions between quasirandomness
//! properties, each producing a checkable certificate.

pub mod counting;
pub mod degree;
pub mod discrepancy;
pub mod disjoint;

pub use counting::{counting_lemma_bound, counting_lemma_bound_with_delta, CountingLemmaReport};
pub use degree::{
    degree_power_discrepancy, main_lemma_trace, power_sum_gap, DoubledCountTable, MainLemmaTrace,
};
pub use discrepancy::{
    amplify_discrepancy, discrepancy_half_set, half_set_exhaustive, set_discrepancy,
    AmplificationResult, AmplifyOptions, HalfSetOptions, HalfSetResult, HALF_SET_EXHAUSTIVE_CAP,
    HALF_SET_SLACK,
};
pub use disjoint::{
    disjointify_estimate, equitable_bipartition_expectation, overlap_split, BipartitionExpectation,
    BipartitionOptions, DisjointOracle, DisjointifyEstimate, DisjointifyOptions, ExactOracle,
    OverlapSplit,
};
