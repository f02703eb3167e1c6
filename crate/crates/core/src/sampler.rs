//! Random vertex-subset and constraint-tuple families.
//!
//! Draw `i` of every family uses stream `i` of a ChaCha generator keyed by the
//! sampler seed, so a family of `2t` draws always extends the family of `t`.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hom::ConstraintTuple;
use crate::set::VertexSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SubsetLaw {
    /// Each vertex independently with probability 1/2.
    Uniform,
    /// Size uniform on `0..=n`, then a uniform subset of that size.
    #[default]
    SizeStratified,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerSpec {
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub subset_law: SubsetLaw,
    #[serde(default = "default_disjoint")]
    pub disjoint: bool,
    #[serde(default)]
    pub seed: u64,
}

fn default_trials() -> u64 {
    1000
}

fn default_disjoint() -> bool {
    true
}

impl Default for SamplerSpec {
    fn default() -> Self {
        SamplerSpec {
            trials: default_trials(),
            subset_law: SubsetLaw::default(),
            disjoint: default_disjoint(),
            seed: 0,
        }
    }
}

impl SamplerSpec {
    pub fn with_trials(trials: u64, seed: u64) -> Self {
        SamplerSpec {
            trials,
            seed,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::input("sampler needs at least one trial"));
        }
        Ok(())
    }

    pub(crate) fn stream(&self, draw: u64) -> ChaCha8Rng {
        stream_rng(self.seed, draw)
    }
}

pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn sample_subset<R: Rng>(n: usize, law: SubsetLaw, rng: &mut R) -> VertexSet {
    match law {
        SubsetLaw::Uniform => {
            let mut set = VertexSet::empty(n);
            for v in 0..n {
                if rng.gen_bool(0.5) {
                    set.insert(v);
                }
            }
            set
        }
        SubsetLaw::SizeStratified => {
            let k = rng.gen_range(0..=n);
            let mut set = VertexSet::empty(n);
            for v in index::sample(rng, n, k) {
                set.insert(v);
            }
            set
        }
    }
}

/// Uniform subset of exactly `k` vertices.
pub fn sample_subset_of_size<R: Rng>(n: usize, k: usize, rng: &mut R) -> VertexSet {
    let mut set = VertexSet::empty(n);
    for v in index::sample(rng, n, k.min(n)) {
        set.insert(v);
    }
    set
}

/// `spec.trials` subsets drawn with `spec.subset_law`.
pub fn sample_subsets(n: usize, spec: &SamplerSpec) -> Vec<VertexSet> {
    (0..spec.trials)
        .map(|i| sample_subset(n, spec.subset_law, &mut spec.stream(i)))
        .collect()
}

/// `spec.trials` tuples of `r` subsets. Disjoint tuples colour a random
/// subset uniformly with `r` colours; otherwise each position is drawn
/// independently.
pub fn sample_tuples(n: usize, r: usize, spec: &SamplerSpec) -> Vec<ConstraintTuple> {
    (0..spec.trials)
        .map(|i| {
            let mut rng = spec.stream(i);
            if spec.disjoint {
                let pool = sample_subset(n, spec.subset_law, &mut rng);
                random_coloring(&pool, r, &mut rng)
            } else {
                ConstraintTuple::new(
                    (0..r)
                        .map(|_| sample_subset(n, spec.subset_law, &mut rng))
                        .collect(),
                )
            }
        })
        .collect()
}

pub fn random_coloring<R: Rng>(pool: &VertexSet, r: usize, rng: &mut R) -> ConstraintTuple {
    let n = pool.universe();
    let mut sets = vec![VertexSet::empty(n); r];
    if r > 0 {
        for v in pool.iter() {
            sets[rng.gen_range(0..r)].insert(v);
        }
    }
    ConstraintTuple::new(sets)
}

/// Splits `pool` into `parts` consecutive blocks of near-equal size.
pub fn split_evenly(pool: &VertexSet, parts: usize) -> Vec<VertexSet> {
    let members = pool.to_vec();
    let n = pool.universe();
    (0..parts)
        .map(|p| {
            let lo = p * members.len() / parts;
            let hi = (p + 1) * members.len() / parts;
            VertexSet::from_vertices(n, members[lo..hi].iter().copied()).expect("members in range")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn families_are_nested() {
        let small = SamplerSpec::with_trials(10, 3);
        let big = SamplerSpec::with_trials(20, 3);
        assert_eq!(sample_subsets(30, &small)[..], sample_subsets(30, &big)[..10]);
        assert_eq!(sample_tuples(30, 3, &small)[..], sample_tuples(30, 3, &big)[..10]);
    }

    #[test]
    fn disjoint_tuples_are_disjoint() {
        let spec = SamplerSpec::with_trials(50, 1);
        assert!(sample_tuples(40, 4, &spec).iter().all(ConstraintTuple::pairwise_disjoint));
    }

    #[test]
    fn split_covers_pool() {
        let pool = VertexSet::from_vertices(20, [1, 3, 5, 7, 9, 11, 13]).unwrap();
        let parts = split_evenly(&pool, 3);
        assert_eq!(parts.iter().map(VertexSet::len).sum::<usize>(), 7);
        assert!(parts[0].is_disjoint(&parts[1]));
    }

    #[test]
    fn zero_trials_rejected() {
        assert!(SamplerSpec::with_trials(0, 0).validate().is_err());
    }
}
