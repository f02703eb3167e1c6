use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use quasirand::harness::{evaluate, read_rows_csv, run_experiment, ExperimentConfig, Row};

fn config(text: &str, out: &Path) -> ExperimentConfig {
    let mut c = ExperimentConfig::from_toml_str(text).unwrap();
    c.output_dir = out.to_path_buf();
    c
}

fn rows(text: &str) -> Vec<Row> {
    let (rows, failures) = evaluate(&ExperimentConfig::from_toml_str(text).unwrap()).unwrap();
    assert!(failures.is_empty(), "{failures:?}");
    rows
}

const LINEAR: &str = r#"
experiment = "linear_dependence"
pattern = "K3"
p_ref = 0.4

[generator]
kind = "planted_dense"
n = 120
p = 0.4
plant_fraction = 0.5
seed = 3

[sampler]
trials = 400
seed = 1

[sweep]
parameter = "plant_boost"
values = [0.0, 0.1, 0.2, 0.3, 0.4]
"#;

#[test]
fn random_host_rows_are_small() {
    for pattern in ["K2", "K3", "C4"] {
        let text = format!(
            "experiment = \"cgw_suite\"\npattern = \"{pattern}\"\np_ref = 0.5\n\
             [generator]\nkind = \"erdos_renyi\"\nn = 256\np = 0.5\nseed = 5\n"
        );
        let rows = rows(&text);
        assert_eq!(rows.len(), 7);
        for row in &rows {
            if row.metric == "spectral" {
                // |λ₂|/n sits at about 2√(p(1-p)/n) ≈ 0.0625 for this n.
                assert!(row.measured <= 3.0 / 16.0, "{pattern}: {row:?}");
            } else {
                assert!(row.measured <= 0.02, "{pattern}: {row:?}");
            }
        }
    }
}

#[test]
fn bipartite_host_edge_row_is_large() {
    let rows = rows(
        "experiment = \"cgw_suite\"\npattern = \"K3\"\np_ref = 0.5\n[generator]\nkind = \"complete_bipartite\"\nn = 256\n",
    );
    let edge = rows.iter().find(|r| r.metric == "edge_discrepancy").unwrap();
    assert!(edge.measured >= 1.0 / 16.0 - 0.01, "{edge:?}");
}

#[test]
fn replay_is_byte_identical_and_traceable() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let first = run_experiment(&config(LINEAR, a.path())).unwrap();
    let second = run_experiment(&config(LINEAR, b.path())).unwrap();
    let csv_a = fs::read(&first.csv_path).unwrap();
    assert_eq!(csv_a, fs::read(&second.csv_path).unwrap());
    assert_eq!(first.manifest.config_hash, second.manifest.config_hash);

    let seeds: BTreeSet<u64> = first.manifest.seeds.iter().copied().collect();
    let back = read_rows_csv(&first.csv_path).unwrap();
    assert_eq!(back.len(), first.manifest.row_count);
    for row in &back {
        assert!(seeds.contains(&row.seed) && seeds.contains(&row.sampler_seed), "{row:?}");
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&first.manifest_path).unwrap()).unwrap();
    assert_eq!(manifest["csv"], "linear_dependence.csv");
    assert!(manifest["fit"]["slope"].is_number());
    assert_eq!(first.plot_paths.len(), 1);
    let plot = fs::read_to_string(&first.plot_paths[0]).unwrap();
    assert!(plot.lines().any(|l| l == "# delta epsilon fit above_floor"));
}

#[test]
fn config_hash_tracks_semantic_fields_only() {
    let base = ExperimentConfig::from_toml_str(LINEAR).unwrap();
    let mut moved = base.clone();
    moved.output_dir = "elsewhere".into();
    moved.workers = 3;
    assert_eq!(base.config_hash(), moved.config_hash());
    let mut changed = base.clone();
    changed.sampler.trials += 1;
    assert_ne!(base.config_hash(), changed.config_hash());
    let mut changed = base.clone();
    changed.generator.seed += 1;
    assert_ne!(base.config_hash(), changed.config_hash());
}

#[test]
fn worker_count_does_not_change_rows() {
    let serial = rows(LINEAR);
    let mut parallel = ExperimentConfig::from_toml_str(LINEAR).unwrap();
    parallel.workers = 4;
    assert_eq!(serial, evaluate(&parallel).unwrap().0);
}

#[test]
fn unperturbed_point_sits_near_the_floor() {
    let rows = rows(LINEAR);
    let at = |point: usize, metric: &str| rows.iter().find(|r| r.point == point && r.metric == metric).unwrap().clone();
    let base = at(0, "delta");
    let strongest = at(4, "delta");
    let floor = base.reference.unwrap();
    assert!(base.measured <= 3.0 * floor, "{base:?}");
    assert!(strongest.measured >= 10.0 * floor, "{strongest:?}");
    assert!(at(4, "epsilon").measured > 5.0 * at(0, "epsilon").measured);
}

#[test]
fn delta_is_stable_under_doubled_trials() {
    let doubled = LINEAR.replace("trials = 400", "trials = 800");
    let (one, two) = (rows(LINEAR), rows(&doubled));
    for (a, b) in one.iter().zip(&two).filter(|(a, _)| a.metric == "delta") {
        let detail: serde_json::Value = serde_json::from_str(&a.detail).unwrap();
        let se = detail["sd"].as_f64().unwrap();
        assert!((a.measured - b.measured).abs() < 2.0 * se, "point {}: {} vs {} (se {se})", a.point, a.measured, b.measured);
    }
}

#[test]
fn counting_lemma_rows_hold_on_a_random_host() {
    for pattern in ["K3", "C4", "P3"] {
        let text = format!(
            "experiment = \"counting_lemma\"\npattern = \"{pattern}\"\np_ref = 0.5\n\
             [generator]\nkind = \"erdos_renyi\"\nn = 128\np = 0.5\nseed = 2\n"
        );
        let rows = rows(&text);
        assert!(rows.iter().any(|r| r.metric == "total_deviation"));
        for row in &rows {
            assert_eq!(row.holds, Some(true), "{pattern}: {row:?}");
            assert_eq!(row.method, "heuristic");
        }
    }
}

#[test]
fn amplification_rows_certify_on_the_bipartite_host() {
    let rows = rows(
        "experiment = \"amplification\"\npattern = \"K2\"\np_ref = 0.5\nreplicates = 3\n\
         [generator]\nkind = \"complete_bipartite\"\nn = 64\n",
    );
    let gaps: Vec<&Row> = rows.iter().filter(|r| r.metric == "amplification_gap").collect();
    assert_eq!(gaps.len(), 3);
    for row in gaps {
        let cert: serde_json::Value = serde_json::from_str(&row.detail).unwrap();
        assert_eq!(cert["d"], 248.0);
        assert_eq!(row.holds, Some(true), "{row:?}");
    }
}

#[test]
fn main_lemma_on_a_regular_host_has_zero_total() {
    let rows = rows("experiment = \"main_lemma\"\npattern = \"K3\"\np_ref = 0.5\n[generator]\nkind = \"cycle\"\nn = 12\n");
    let total = rows.iter().find(|r| r.metric == "degree_power_total").unwrap();
    assert_eq!(total.measured, 0.0);
    let ratio = rows.iter().find(|r| r.metric == "bound_ratio").unwrap();
    assert_eq!(ratio.measured, 0.0);
}

#[test]
fn empty_sweep_gives_one_row_set() {
    let rows = rows(
        "experiment = \"cgw_suite\"\npattern = \"K3\"\np_ref = 0.5\n[generator]\nkind = \"erdos_renyi\"\nn = 20\np = 0.5\n",
    );
    assert_eq!(rows.len(), 7);
    assert!(rows.iter().all(|r| r.point == 0 && r.replicate == 0));
}
