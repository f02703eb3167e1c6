//! Seeded host-graph generators.

use std::path::PathBuf;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::io;
use crate::set::VertexSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    ErdosRenyi,
    PlantedDense,
    Complete,
    Empty,
    /// `K_{n/2, n/2}`; the first side is reported as the plant.
    CompleteBipartite,
    Cycle,
    File,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    #[serde(default)]
    pub n: usize,
    #[serde(default)]
    pub p: f64,
    #[serde(default)]
    pub plant_fraction: f64,
    #[serde(default)]
    pub plant_boost: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

impl GeneratorSpec {
    pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Self {
        GeneratorSpec {
            kind: GeneratorKind::ErdosRenyi,
            n,
            p,
            plant_fraction: 0.0,
            plant_boost: 0.0,
            seed,
            path: None,
        }
    }

    pub fn planted_dense(n: usize, p: f64, plant_fraction: f64, plant_boost: f64, seed: u64) -> Self {
        GeneratorSpec {
            kind: GeneratorKind::PlantedDense,
            plant_fraction,
            plant_boost,
            ..Self::erdos_renyi(n, p, seed)
        }
    }

    pub fn of_kind(kind: GeneratorKind, n: usize) -> Self {
        GeneratorSpec {
            kind,
            ..Self::erdos_renyi(n, 0.0, 0)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        if !unit(self.p) {
            return Err(Error::input(format!("p = {} is outside [0, 1]", self.p)));
        }
        if !unit(self.plant_fraction) {
            return Err(Error::input(format!(
                "plant_fraction = {} is outside [0, 1]",
                self.plant_fraction
            )));
        }
        if !unit(self.p + self.plant_boost) {
            return Err(Error::input(format!(
                "p + plant_boost = {} is outside [0, 1]",
                self.p + self.plant_boost
            )));
        }
        if self.kind == GeneratorKind::File && self.path.is_none() {
            return Err(Error::input("file generator needs a path"));
        }
        Ok(())
    }
}

/// A generated graph together with its planted set, when the generator has one.
#[derive(Debug, Clone)]
pub struct Instance {
    pub graph: Graph,
    pub plant: Option<VertexSet>,
}

pub fn generate(spec: &GeneratorSpec) -> Result<Graph> {
    generate_instance(spec).map(|inst| inst.graph)
}

pub fn generate_instance(spec: &GeneratorSpec) -> Result<Instance> {
    spec.validate()?;
    let n = spec.n;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (graph, plant) = match spec.kind {
        GeneratorKind::ErdosRenyi => (gnp(n, spec.p, &mut rng)?, None),
        GeneratorKind::PlantedDense => {
            let base = gnp_pairs(n, spec.p, &mut rng);
            let k = (spec.plant_fraction * n as f64).floor() as usize;
            let plant_vertices = index::sample(&mut rng, n, k).into_vec();
            let plant = VertexSet::from_vertices(n, plant_vertices)?;
            let mut edges: Vec<(usize, usize)> = base
                .into_iter()
                .filter(|&(u, v)| !(plant.contains(u) && plant.contains(v)))
                .collect();
            let members = plant.to_vec();
            let boosted = spec.p + spec.plant_boost;
            for (i, &u) in members.iter().enumerate() {
                for &v in &members[i + 1..] {
                    if rng.gen_bool(boosted) {
                        edges.push((u, v));
                    }
                }
            }
            (Graph::from_edges(n, edges)?, Some(plant))
        }
        GeneratorKind::Complete => (Graph::complete(n), None),
        GeneratorKind::Empty => (Graph::empty(n), None),
        GeneratorKind::CompleteBipartite => {
            let a = n / 2;
            let side = VertexSet::from_vertices(n, 0..a)?;
            (Graph::complete_bipartite(a, n - a), Some(side))
        }
        GeneratorKind::Cycle => (Graph::cycle(n)?, None),
        GeneratorKind::File => {
            let path = spec.path.as_ref().expect("validated");
            (io::read_graph_file(path)?, None)
        }
    };
    Ok(Instance { graph, plant })
}

fn gnp_pairs(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    edges
}

fn gnp(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Result<Graph> {
    Graph::from_edges(n, gnp_pairs(n, p, rng))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extreme_probabilities() {
        let empty = generate(&GeneratorSpec::erdos_renyi(5, 0.0, 1)).unwrap();
        assert_eq!(empty.edge_count(), 0);
        let full = generate(&GeneratorSpec::erdos_renyi(5, 1.0, 1)).unwrap();
        assert_eq!(full.edge_count(), 10);
    }

    #[test]
    fn gnp_edge_count_concentrates() {
        let g = generate(&GeneratorSpec::erdos_renyi(100, 0.5, 7)).unwrap();
        let mean = 4950.0 * 0.5;
        let tol = 4.0 * (4950.0f64 * 0.25).sqrt();
        assert!((g.edge_count() as f64 - mean).abs() <= tol, "{}", g.edge_count());
    }

    #[test]
    fn same_seed_same_graph() {
        let spec = GeneratorSpec::planted_dense(60, 0.3, 0.25, 0.2, 11);
        let a = generate_instance(&spec).unwrap();
        let b = generate_instance(&spec).unwrap();
        assert_eq!(a.graph, b.graph);
        assert_eq!(a.plant, b.plant);
        let other = generate(&GeneratorSpec { seed: 12, ..spec }).unwrap();
        assert_ne!(a.graph, other);
    }

    #[test]
    fn planted_set_is_denser() {
        let spec = GeneratorSpec::planted_dense(200, 0.2, 0.3, 0.6, 3);
        let inst = generate_instance(&spec).unwrap();
        let plant = inst.plant.unwrap();
        assert_eq!(plant.len(), 60);
        let inside = inst.graph.edges_within(&plant) as f64 / (60.0 * 59.0 / 2.0);
        assert!(inside > 0.7, "{inside}");
    }

    #[test]
    fn rejects_invalid_specs() {
        assert!(generate(&GeneratorSpec::erdos_renyi(5, 1.5, 0)).is_err());
        assert!(generate(&GeneratorSpec::planted_dense(5, 0.9, 0.5, 0.2, 0)).is_err());
        assert!(generate(&GeneratorSpec::planted_dense(5, 0.5, 1.5, 0.2, 0)).is_err());
        assert!(generate(&GeneratorSpec::of_kind(GeneratorKind::File, 0)).is_err());
    }

    #[test]
    fn bipartite_plant_is_a_side() {
        let inst = generate_instance(&GeneratorSpec::of_kind(GeneratorKind::CompleteBipartite, 8)).unwrap();
        let side = inst.plant.unwrap();
        assert_eq!(side.to_vec(), vec![0, 1, 2, 3]);
        assert_eq!(inst.graph.edges_within(&side), 0);
        assert_eq!(inst.graph.edge_count(), 16);
    }
}
