use std::path::{Path, PathBuf};

use quasirand::harness::{self, load_config};
use quasirand::io::{read_graph_file, read_vertex_set_file, write_graph_file};
use quasirand::metrics::full_report;
use quasirand::reductions::{
    amplify_discrepancy, counting_lemma_bound, degree_power_discrepancy, discrepancy_half_set, disjointify_estimate,
    equitable_bipartition_expectation, main_lemma_trace, overlap_split, power_sum_gap, AmplifyOptions,
    BipartitionOptions, DisjointifyOptions, DoubledCountTable, ExactOracle, HalfSetOptions,
};
use quasirand::sampler::sample_tuples;
use quasirand::{
    generate_instance, hom_count, ConstraintTuple, Error, GeneratorKind, GeneratorSpec, Graph, Pattern, Result,
    SamplerSpec,
};
use serde_json::{json, Value};

use crate::{Cli, Command, KindArg, PatternGraph, ReduceCommand, EXIT_CONFIG, EXIT_ROW_FAILURES};

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Overflow => 1,
        _ => EXIT_CONFIG,
    }
}

fn emit(cli: &Cli, value: Value, text: impl FnOnce() -> String) {
    if cli.json {
        println!("{}", serde_json::to_string_pretty(&value).expect("json value"));
    } else {
        println!("{}", text());
    }
}

fn load_pattern(spec: &str) -> Result<Pattern> {
    match Pattern::from_name(spec) {
        Ok(p) => Ok(p),
        Err(e) if !Path::new(spec).exists() => Err(e),
        Err(_) => Pattern::read_file(spec),
    }
}

fn load(input: &PatternGraph) -> Result<(Pattern, Graph)> {
    Ok((load_pattern(&input.pattern)?, read_graph_file(&input.graph)?))
}

fn load_tuple(pattern: &Pattern, graph: &Graph, files: &[PathBuf]) -> Result<ConstraintTuple> {
    if files.is_empty() {
        return Ok(ConstraintTuple::unconstrained(pattern, graph));
    }
    if files.len() != pattern.r() {
        return Err(Error::InvalidInput(format!(
            "pattern has {} vertices but {} set files were given",
            pattern.r(),
            files.len()
        )));
    }
    let sets = files
        .iter()
        .map(|f| read_vertex_set_file(f, graph.n()))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConstraintTuple::new(sets))
}

fn seed(cli: &Cli) -> u64 {
    cli.seed.unwrap_or(0)
}

fn install_workers(cli: &Cli) {
    // Sizes the global pool used outside experiments; must run before any parallel work.
    if let Some(w) = cli.workers.filter(|&w| w > 0) {
        std::env::set_var("RAYON_NUM_THREADS", w.to_string());
    }
}

pub fn run(cli: &Cli) -> Result<u8> {
    install_workers(cli);
    match &cli.command {
        Command::Gen(args) => {
            let kind = match args.kind {
                KindArg::ErdosRenyi => GeneratorKind::ErdosRenyi,
                KindArg::PlantedDense => GeneratorKind::PlantedDense,
                KindArg::Complete => GeneratorKind::Complete,
                KindArg::Empty => GeneratorKind::Empty,
                KindArg::CompleteBipartite => GeneratorKind::CompleteBipartite,
                KindArg::Cycle => GeneratorKind::Cycle,
            };
            let spec = GeneratorSpec {
                kind,
                n: args.n,
                p: args.p,
                plant_fraction: args.plant_fraction,
                plant_boost: args.plant_boost,
                seed: seed(cli),
                path: None,
            };
            let inst = generate_instance(&spec)?;
            let dir = cli.output_dir.clone().unwrap_or_else(|| PathBuf::from("."));
            let out = args.out.clone().unwrap_or_else(|| dir.join("graph.txt"));
            if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent).map_err(|e| Error::Io {
                    path: parent.into(),
                    source: e,
                })?;
            }
            write_graph_file(&out, &inst.graph)?;
            if let (Some(path), Some(plant)) = (&args.plant_out, &inst.plant) {
                let body: Vec<String> = plant.iter().map(|v| v.to_string()).collect();
                std::fs::write(path, body.join("\n") + "\n").map_err(|e| Error::Io {
                    path: path.clone(),
                    source: e,
                })?;
            }
            emit(
                cli,
                json!({ "path": out, "n": inst.graph.n(), "edges": inst.graph.edge_count(), "spec": spec,
                        "plant": inst.plant }),
                || format!("wrote {} (n = {}, m = {})", out.display(), inst.graph.n(), inst.graph.edge_count()),
            );
        }
        Command::Count(args) => {
            let (h, g) = load(&args.input)?;
            let tuple = load_tuple(&h, &g, &args.sets)?;
            let count = hom_count(&h, &g, &tuple)?;
            emit(cli, json!({ "count": count }), || count.to_string());
        }
        Command::Report(args) => {
            let h = load_pattern(&args.pattern)?;
            let g = read_graph_file(&args.graph)?;
            let spec = SamplerSpec::with_trials(args.trials, seed(cli));
            let reports = full_report(&h, &g, args.p, &spec)?;
            emit(cli, serde_json::to_value(&reports)?, || {
                reports
                    .iter()
                    .map(|r| {
                        format!(
                            "{:<18} {:>12.6e}  {:?}",
                            serde_json::to_value(r.property).expect("tag").as_str().unwrap_or(""),
                            r.deviation,
                            r.method
                        )
                    })
                    .collect::<Vec<_>>()
                    .join("\n")
            });
        }
        Command::Reduce(op) => reduce(cli, op)?,
        Command::Experiment(args) => {
            let mut config = load_config(&args.config)?;
            if let Some(s) = cli.seed {
                config.generator.seed = s;
                config.sampler.seed = s;
            }
            if let Some(dir) = &cli.output_dir {
                config.output_dir = dir.clone();
            }
            if let Some(w) = cli.workers {
                config.workers = w;
            }
            eprint!("{}", config.echo());
            if args.dry_run {
                return Ok(0);
            }
            let out = harness::run_experiment(&config)?;
            emit(cli, serde_json::to_value(&out.manifest)?, || {
                let mut lines = vec![
                    format!("rows: {} -> {}", out.rows.len(), out.csv_path.display()),
                    format!("manifest: {}", out.manifest_path.display()),
                ];
                lines.extend(out.plot_paths.iter().map(|p| format!("plot data: {}", p.display())));
                if let Some(fit) = &out.manifest.fit {
                    lines.push(format!(
                        "fit: slope {:.4}, intercept {:.4}, r {:.4} ({} points{})",
                        fit.slope,
                        fit.intercept,
                        fit.correlation,
                        fit.points_used,
                        if fit.inconclusive { ", inconclusive" } else { "" }
                    ));
                }
                for f in &out.manifest.failures {
                    lines.push(format!("failed run {}.{}: {}", f.point, f.replicate, f.message));
                }
                lines.join("\n")
            });
            if out.has_failures() {
                return Ok(EXIT_ROW_FAILURES);
            }
        }
    }
    Ok(0)
}

fn reduce(cli: &Cli, op: &ReduceCommand) -> Result<()> {
    match op {
        ReduceCommand::OverlapSplit { input, sets, i, j } => {
            let (h, g) = load(input)?;
            let tuple = load_tuple(&h, &g, sets)?;
            let split = overlap_split(&tuple, *i, *j)?;
            let counts = split
                .terms
                .iter()
                .map(|t| hom_count(&h, &g, t))
                .collect::<Result<Vec<u64>>>()?;
            let original = hom_count(&h, &g, &tuple)?;
            let sum: u64 = counts.iter().sum();
            emit(
                cli,
                json!({ "target_pair": [i, j], "term_counts": counts, "sum": sum, "original": original,
                        "terms": split.terms.iter().map(|t| t.sets().to_vec()).collect::<Vec<_>>() }),
                || format!("terms {counts:?}, sum {sum}, original {original}"),
            );
        }
        ReduceCommand::Bipartition { input, sets, i, j, trials } => {
            let (h, g) = load(input)?;
            let tuple = load_tuple(&h, &g, sets)?;
            let opts = BipartitionOptions {
                trials: *trials,
                seed: seed(cli),
                ..Default::default()
            };
            let e = equitable_bipartition_expectation(&h, &g, &tuple, (*i, *j), &opts)?;
            emit(cli, serde_json::to_value(&e)?, || {
                format!(
                    "mc_mean {:.6} ± {:.6}, exact {:?}, formula {:.6}",
                    e.mc_mean, e.mc_stderr, e.exact_small, e.formula
                )
            });
        }
        ReduceCommand::Disjointify { input, sets, trials, literal } => {
            let (h, g) = load(input)?;
            let tuple = load_tuple(&h, &g, sets)?;
            let opts = DisjointifyOptions {
                trials: *trials,
                seed: seed(cli),
                exact_corrections: !literal,
            };
            let est = disjointify_estimate(&h, &g, &tuple, &ExactOracle, &opts)?;
            let exact = hom_count(&h, &g, &tuple)?;
            let mut value = serde_json::to_value(&est)?;
            value["exact"] = json!(exact);
            emit(cli, value, || {
                format!(
                    "estimate {:.3} ± {:.3} (exact {exact}), steps {}, oracle calls {}",
                    est.estimate, est.stderr, est.steps, est.oracle_calls
                )
            });
        }
        ReduceCommand::CountingLemma { input, p, sets, trials } => {
            let (h, g) = load(input)?;
            let tuple = load_tuple(&h, &g, sets)?;
            let spec = SamplerSpec::with_trials(*trials, seed(cli));
            let report = counting_lemma_bound(&h, &g, *p, &tuple, &spec)?;
            emit(cli, serde_json::to_value(&report)?, || {
                format!(
                    "delta {:.6e} ({:?}), bound {:.4e}, diffs {:?}, holds {}",
                    report.delta_used, report.delta_method, report.bound, report.diffs, report.bound_holds
                )
            });
        }
        ReduceCommand::HalfSet { graph, set, q, restarts } => {
            let g = read_graph_file(graph)?;
            let s = read_vertex_set_file(set, g.n())?;
            let q = match q {
                Some(q) => *q,
                None => g.edge_density()?,
            };
            let opts = HalfSetOptions {
                restarts: *restarts,
                seed: seed(cli),
            };
            let res = discrepancy_half_set(&g, q, &s, &opts)?;
            emit(cli, serde_json::to_value(&res)?, || {
                format!("discrepancy {:.3} with {:?}", res.discrepancy, res.set.to_vec())
            });
        }
        ReduceCommand::Amplify {
            graph,
            set,
            q,
            slack,
            size_slack,
            max_retries,
        } => {
            let g = read_graph_file(graph)?;
            let s = read_vertex_set_file(set, g.n())?;
            let q = match q {
                Some(q) => *q,
                None => g.edge_density()?,
            };
            let opts = AmplifyOptions {
                slack: *slack,
                size_slack: *size_slack,
                max_retries: *max_retries,
                seed: seed(cli),
                ..Default::default()
            };
            let res = amplify_discrepancy(&g, q, &s, &opts)?;
            emit(cli, serde_json::to_value(&res)?, || {
                format!(
                    "D {:.3}, gap {} (target {:.3}), retries {}, certified {}",
                    res.d, res.gap, res.target, res.retries, res.certified
                )
            });
        }
        ReduceCommand::PowerSum { a, b, r } => {
            let (lhs, rhs) = power_sum_gap(a, b, *r)?;
            emit(
                cli,
                json!({ "lhs": lhs.to_string(), "rhs": rhs.to_string(), "holds": lhs >= rhs }),
                || format!("lhs {lhs} >= rhs {rhs}: {}", lhs >= rhs),
            );
        }
        ReduceCommand::DegreePower { graph, r } => {
            let g = read_graph_file(graph)?;
            let total = degree_power_discrepancy(&g, *r)?;
            emit(cli, json!({ "total": total.to_string() }), || total.to_string());
        }
        ReduceCommand::MainLemma { input, p, delta, trials } => {
            let (h, g) = load(input)?;
            let designated = h.min_degree_vertex().unwrap_or(0);
            let h = h.with_designated(designated)?;
            let trace = match delta {
                Some(d) => main_lemma_trace(&h, &g, *p, *d)?,
                None => {
                    let table = DoubledCountTable::compute(&h, &g, *p)?;
                    let mut tuples = sample_tuples(g.n(), h.r(), &SamplerSpec::with_trials(*trials, seed(cli)));
                    tuples.extend(table.proof_tuples(&g));
                    let d = quasirand::metrics::labeled_deviation_over(&h, &g, *p, &tuples)?.deviation;
                    table.trace(&g, *p, d)?
                }
            };
            emit(cli, serde_json::to_value(&trace)?, || {
                format!(
                    "r {}, total {}, delta {:.6e}, bound_ratio {:.4e}, sigma within bound {}, d-difference holds {}",
                    trace.r, trace.total, trace.delta, trace.bound_ratio, trace.sigma_within_bound, trace.d_difference_holds
                )
            });
        }
    }
    Ok(())
}
