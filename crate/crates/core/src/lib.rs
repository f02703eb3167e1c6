//! Quasirandomness measurements for simple graphs.
//!
//! The crate counts constrained labelled homomorphisms `c(H, G; U_1, .., U_r)`,
//! evaluates the classical quasirandomness properties of a host graph as
//! normalised deviations, and turns the standard reductions between those
//! properties into runnable procedures with checkable certificates.

pub mod error;
pub mod generate;
pub mod graph;
pub mod harness;
pub mod hom;
pub mod io;
pub mod metrics;
pub mod pattern;
pub mod reductions;
pub mod sampler;
pub mod set;
pub mod spectral;

pub use error::{Error, Result};
pub use generate::{generate, generate_instance, GeneratorKind, GeneratorSpec, Instance};
pub use graph::Graph;
pub use hom::{
    doubled_count, doubled_count_tuple, filtration_values, hom_count, hom_count_all,
    hom_count_in_induced, hom_density_estimate, partial_weighted_count, ConstraintTuple,
    DensityEstimate, FiltrationStep,
};
pub use metrics::{DeviationReport, Method, PropertyKind};
pub use pattern::Pattern;
pub use reductions::{
    amplify_discrepancy, counting_lemma_bound, degree_power_discrepancy, disjointify_estimate,
    equitable_bipartition_expectation, main_lemma_trace, overlap_split, power_sum_gap,
    AmplificationResult, CountingLemmaReport, MainLemmaTrace, OverlapSplit,
};
pub use sampler::{SamplerSpec, SubsetLaw};
pub use set::VertexSet;
