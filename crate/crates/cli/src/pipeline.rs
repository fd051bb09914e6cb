//! The batch pipelines behind each subcommand.

use crate::error::{CliError, Result};
use crate::io::{load_counts, write_counts, write_file};
use crate::report::{self, Report};
use countnet_core::entropy::{
    bivariate_joint_entropy_exact, joint_entropy_approx, mutual_information_poisson,
    poisson_entropy,
};
use countnet_core::graph::{weakly_connected_components, CentralityReport};
use countnet_core::infer::{infer_network, EstimatorKind, InferenceConfig};
use countnet_core::sim::{er_graph, simulate, SimConfig};
use countnet_core::stats::{derive_seed, ks_test_negbin, ks_test_poisson, substream, GofResult};
use countnet_core::{CountMatrix, RateMatrix, TruncationPolicy};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

const PHASE_GRAPH: u64 = 101;
const PHASE_DATA: u64 = 102;
const PHASE_INFER: u64 = 103;
const PHASE_SCREEN: u64 = 104;

/// Which goodness-of-fit screen to attach to kept rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScreenKind {
    None,
    Poisson,
    NegBin,
}

impl FromStr for ScreenKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "none" => Ok(ScreenKind::None),
            "poisson" => Ok(ScreenKind::Poisson),
            "negbin" => Ok(ScreenKind::NegBin),
            other => Err(format!("unknown screen {other:?} (none|poisson|negbin)")),
        }
    }
}

impl std::fmt::Display for ScreenKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ScreenKind::None => write!(f, "none"),
            ScreenKind::Poisson => write!(f, "poisson"),
            ScreenKind::NegBin => write!(f, "negbin"),
        }
    }
}

/// Full configuration of an `infer` run.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub input: PathBuf,
    pub min_total_count: u64,
    pub scale: bool,
    pub screen: ScreenKind,
    pub inference: InferenceConfig,
    pub out_dir: PathBuf,
}

/// Row filtering, optional mean scaling, optional screening.
/// The sample count never changes; rows are only dropped or rescaled.
#[derive(Debug)]
pub struct Preprocessed {
    pub counts: CountMatrix,
    pub dropped: Vec<String>,
    pub screening: Vec<(String, GofResult)>,
}

pub fn preprocess(counts: &CountMatrix, cfg: &PipelineConfig) -> Result<Preprocessed> {
    let n = counts.n_vars();
    let keep: Vec<usize> = (0..n)
        .filter(|&i| counts.row(i).iter().sum::<u64>() > cfg.min_total_count)
        .collect();
    let dropped: Vec<String> = (0..n)
        .filter(|i| !keep.contains(i))
        .map(|i| counts.label(i))
        .collect();
    if keep.is_empty() {
        return Err(CliError::input(format!(
            "all {n} rows fall at or below the minimum total count {}",
            cfg.min_total_count
        )));
    }
    let mut kept = counts
        .select_rows(&keep)
        .map_err(|e| CliError::input(e.to_string()))?;

    if cfg.scale {
        let rows: Vec<Vec<u64>> = (0..kept.n_vars())
            .map(|i| {
                let row = kept.row(i);
                let mean = row.iter().sum::<u64>() as f64 / row.len() as f64;
                row.iter()
                    .map(|&c| (c as f64 / mean).floor() as u64)
                    .collect()
            })
            .collect();
        let labels: Vec<String> = (0..kept.n_vars()).map(|i| kept.label(i)).collect();
        kept = CountMatrix::from_rows(rows)
            .and_then(|m| m.with_labels(labels))
            .map_err(|e| CliError::runtime(e.to_string()))?;
    }

    let mut screening = Vec::new();
    if cfg.screen != ScreenKind::None {
        for i in 0..kept.n_vars() {
            let mut rng = substream(cfg.inference.seed, &[PHASE_SCREEN, i as u64]);
            let outcome = match cfg.screen {
                ScreenKind::Poisson => ks_test_poisson(kept.row(i), &mut rng, 200),
                ScreenKind::NegBin => ks_test_negbin(kept.row(i), &mut rng, 200),
                ScreenKind::None => unreachable!(),
            }
            .map_err(|e| CliError::runtime(format!("screening row {}: {e}", kept.label(i))))?;
            screening.push((kept.label(i), outcome));
        }
    }
    Ok(Preprocessed {
        counts: kept,
        dropped,
        screening,
    })
}

fn format_f64(v: f64) -> String {
    // shortest round-trip representation: exact and deterministic
    format!("{v}")
}

/// Run the full inference pipeline; returns the paths written.
pub fn run_infer(cfg: &PipelineConfig) -> Result<Vec<PathBuf>> {
    let raw = load_counts(&cfg.input)?;
    let pre = preprocess(&raw, cfg)?;
    let result = infer_network(&pre.counts, &cfg.inference)
        .map_err(|e| CliError::runtime(format!("inference failed: {e}")))?;

    std::fs::create_dir_all(&cfg.out_dir)
        .map_err(|e| CliError::runtime(format!("cannot create {}: {e}", cfg.out_dir.display())))?;

    // edge list
    let mut edges_csv = String::from("source,target,cmi_nats,p_value,order_added\n");
    for e in &result.edges {
        writeln!(
            edges_csv,
            "{},{},{},{},{}",
            pre.counts.label(e.source),
            pre.counts.label(e.target),
            format_f64(e.cmi),
            format_f64(e.p_value),
            e.order_added
        )
        .expect("string write");
    }
    let edges_path = cfg.out_dir.join("edges.csv");
    write_file(&edges_path, edges_csv.as_bytes())?;

    // network summary and centralities
    let components = weakly_connected_components(&result.adjacency);
    let component_sizes: Vec<usize> = components.iter().map(|c| c.len()).collect();
    let centrality = CentralityReport::compute(&result.adjacency)
        .map_err(|e| CliError::runtime(format!("centrality failed: {e}")))?;

    let top20 = |values: &[f64]| -> Vec<report::RankedNode> {
        CentralityReport::ranking(values)
            .into_iter()
            .take(20)
            .map(|i| report::RankedNode {
                label: pre.counts.label(i),
                value: values[i],
            })
            .collect()
    };
    let out_degree_f: Vec<f64> = centrality.out_degree.iter().map(|&d| d as f64).collect();

    let screening = if cfg.screen == ScreenKind::None {
        None
    } else {
        let records: Vec<report::ScreenRecord> = pre
            .screening
            .iter()
            .map(|(label, g)| report::ScreenRecord {
                label: label.clone(),
                statistic: g.statistic,
                p_value: g.p_value,
                params: match g.params {
                    countnet_core::FitParams::Poisson { lambda } => {
                        report::FittedParams::Poisson { lambda }
                    }
                    countnet_core::FitParams::NegBinomial { r, lambda } => {
                        report::FittedParams::NegBinomial { r, lambda }
                    }
                },
                flagged: g.p_value <= cfg.inference.alpha,
            })
            .collect();
        Some(report::ScreeningSummary {
            method: cfg.screen.to_string(),
            alpha: cfg.inference.alpha,
            flagged: records.iter().filter(|r| r.flagged).count(),
            records,
        })
    };

    let report = Report {
        config: report::ConfigEcho {
            input: cfg.input.display().to_string(),
            min_total_count: cfg.min_total_count,
            scale: cfg.scale,
            screen: cfg.screen.to_string(),
            estimator: cfg.inference.estimator.to_string(),
            alpha: cfg.inference.alpha,
            shuffles: cfg.inference.n_shuffles,
            lag: cfg.inference.lag,
            max_parents: cfg.inference.max_parents,
            seed: cfg.inference.seed,
        },
        input: report::InputSummary {
            variables: raw.n_vars(),
            samples: raw.n_samples(),
        },
        preprocess: report::PreprocessSummary {
            order: vec!["filter".into(), "scale".into(), "screen".into()],
            rows_in: raw.n_vars(),
            rows_kept: pre.counts.n_vars(),
            dropped: pre.dropped.clone(),
            scaled: cfg.scale,
        },
        screening,
        network: report::NetworkSummary {
            nodes: pre.counts.n_vars(),
            edges: result.edges.len(),
            component_sizes: component_sizes.clone(),
            lwcc_size: component_sizes.first().copied().unwrap_or(0),
        },
        centrality: report::CentralitySummary {
            out_degree_top: top20(&out_degree_f),
            betweenness_top: top20(&centrality.betweenness),
            eigenvector_top: centrality.eigenvector.as_deref().map(top20),
        },
        outputs: report::Outputs {
            edges_csv: "edges.csv".into(),
            report_json: "report.json".into(),
        },
    };
    let mut json = serde_json::to_string_pretty(&report)
        .map_err(|e| CliError::runtime(format!("report serialization: {e}")))?;
    json.push('\n');
    let report_path = cfg.out_dir.join("report.json");
    write_file(&report_path, json.as_bytes())?;

    Ok(vec![edges_path, report_path])
}

/// Configuration of a `simulate` run.
#[derive(Debug, Clone)]
pub struct SimulateArgs {
    pub nodes: usize,
    pub samples: usize,
    pub er_p: f64,
    pub lambda_edge: f64,
    pub lambda_base: f64,
    pub noise: f64,
    pub seed: u64,
    pub out_dir: PathBuf,
}

/// Draw a graph and counts, persist `counts.csv` and `truth_edges.csv`.
pub fn run_simulate(args: &SimulateArgs) -> Result<Vec<PathBuf>> {
    let mut graph_rng = substream(args.seed, &[PHASE_GRAPH]);
    let adj = er_graph(args.nodes, args.er_p, &mut graph_rng)
        .map_err(|e| CliError::input(e.to_string()))?;
    let sim_cfg = SimConfig::new(
        args.nodes,
        args.samples,
        args.er_p,
        derive_seed(args.seed, &[PHASE_DATA]),
    )
    .and_then(|c| c.with_rates(args.lambda_edge, args.lambda_base, args.noise))
    .map_err(|e| CliError::input(e.to_string()))?;
    let counts = simulate(&sim_cfg, &adj).map_err(|e| CliError::runtime(e.to_string()))?;

    std::fs::create_dir_all(&args.out_dir)
        .map_err(|e| CliError::runtime(format!("cannot create {}: {e}", args.out_dir.display())))?;
    let counts_path = args.out_dir.join("counts.csv");
    write_counts(&counts_path, &counts)?;

    let mut truth = String::from("source,target\n");
    for (i, j) in adj.undirected_pairs() {
        writeln!(truth, "{},{}", i + 1, j + 1).expect("string write");
    }
    let truth_path = args.out_dir.join("truth_edges.csv");
    write_file(&truth_path, truth.as_bytes())?;
    Ok(vec![counts_path, truth_path])
}

/// Configuration of a `benchmark` run.
#[derive(Debug, Clone)]
pub struct BenchmarkArgs {
    pub nodes: Vec<usize>,
    pub edge_probs: Vec<f64>,
    pub samples: Vec<usize>,
    pub methods: Vec<EstimatorKind>,
    pub realizations: usize,
    pub alpha: f64,
    pub shuffles: usize,
    pub lambda_edge: f64,
    pub lambda_base: f64,
    pub noise: f64,
    pub seed: u64,
    pub out_dir: PathBuf,
}

/// Mean and standard error over per-realization scores.
fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Aggregated scores of one (method, n, p, t) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkRow {
    pub method: EstimatorKind,
    pub n: usize,
    pub p: f64,
    pub t: usize,
    pub tpr_mean: f64,
    pub tpr_se: f64,
    pub fpr_mean: f64,
    pub fpr_se: f64,
    /// Realizations aggregated; always positive (cells where every
    /// realization had an empty true edge set are reported on stderr and
    /// omitted).
    pub realizations: usize,
}

/// One benchmark grid: simulate `realizations` data sets per cell, run every
/// method on the same data, score undirected TPR/FPR against the truth.
pub fn benchmark_rows(args: &BenchmarkArgs) -> Result<Vec<BenchmarkRow>> {
    if args.nodes.is_empty()
        || args.edge_probs.is_empty()
        || args.samples.is_empty()
        || args.methods.is_empty()
    {
        return Err(CliError::input("benchmark grid must be nonempty"));
    }
    if args.realizations == 0 {
        return Err(CliError::input("need at least one realization"));
    }

    let mut rows = Vec::new();
    for &n in &args.nodes {
        for &p in &args.edge_probs {
            for &t in &args.samples {
                // per-method accumulators over valid realizations
                let mut scores: Vec<(Vec<f64>, Vec<f64>)> = args
                    .methods
                    .iter()
                    .map(|_| (Vec::new(), Vec::new()))
                    .collect();
                for r in 0..args.realizations {
                    let cell_key = [n as u64, p.to_bits(), t as u64, r as u64];
                    let mut graph_rng = substream(
                        args.seed,
                        &[PHASE_GRAPH, cell_key[0], cell_key[1], cell_key[3]],
                    );
                    let truth = er_graph(n, p, &mut graph_rng)
                        .map_err(|e| CliError::input(e.to_string()))?;
                    if truth.undirected_pairs().is_empty() {
                        eprintln!(
                            "benchmark: skipping realization {r} of cell n={n} p={p} t={t}: empty true edge set"
                        );
                        continue;
                    }
                    let data_seed = derive_seed(
                        args.seed,
                        &[
                            PHASE_DATA,
                            cell_key[0],
                            cell_key[1],
                            cell_key[2],
                            cell_key[3],
                        ],
                    );
                    let sim_cfg = SimConfig::new(n, t, p, data_seed)
                        .and_then(|c| c.with_rates(args.lambda_edge, args.lambda_base, args.noise))
                        .map_err(|e| CliError::input(e.to_string()))?;
                    let counts =
                        simulate(&sim_cfg, &truth).map_err(|e| CliError::runtime(e.to_string()))?;
                    // the inference seed is shared by all methods so they see
                    // identical data and identical shuffle streams
                    let infer_seed = derive_seed(
                        args.seed,
                        &[
                            PHASE_INFER,
                            cell_key[0],
                            cell_key[1],
                            cell_key[2],
                            cell_key[3],
                        ],
                    );
                    for (m, &method) in args.methods.iter().enumerate() {
                        let cfg = InferenceConfig {
                            estimator: method,
                            alpha: args.alpha,
                            n_shuffles: args.shuffles,
                            seed: infer_seed,
                            ..Default::default()
                        };
                        let result = infer_network(&counts, &cfg)
                            .map_err(|e| CliError::runtime(e.to_string()))?;
                        let (tpr, fpr) = countnet_core::graph::tpr_fpr(&truth, &result.adjacency)
                            .map_err(|e| CliError::runtime(e.to_string()))?;
                        scores[m].0.push(tpr);
                        scores[m].1.push(fpr);
                    }
                }
                for (m, &method) in args.methods.iter().enumerate() {
                    let (tprs, fprs) = &scores[m];
                    if tprs.is_empty() {
                        eprintln!(
                            "benchmark: error row for method={method} n={n} p={p} t={t}: no realization had a nonempty true edge set"
                        );
                        continue;
                    }
                    let (tpr_mean, tpr_se) = mean_se(tprs);
                    let (fpr_mean, fpr_se) = mean_se(fprs);
                    rows.push(BenchmarkRow {
                        method,
                        n,
                        p,
                        t,
                        tpr_mean,
                        tpr_se,
                        fpr_mean,
                        fpr_se,
                        realizations: tprs.len(),
                    });
                }
            }
        }
    }
    Ok(rows)
}

/// Run the benchmark grid and write `benchmark.csv`.
pub fn run_benchmark(args: &BenchmarkArgs) -> Result<Vec<PathBuf>> {
    let rows = benchmark_rows(args)?;
    let mut csv = String::from("method,n,p,t,tpr_mean,tpr_se,fpr_mean,fpr_se,realizations\n");
    for r in &rows {
        writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{}",
            r.method,
            r.n,
            r.p,
            r.t,
            format_f64(r.tpr_mean),
            format_f64(r.tpr_se),
            format_f64(r.fpr_mean),
            format_f64(r.fpr_se),
            r.realizations
        )
        .expect("string write");
    }
    std::fs::create_dir_all(&args.out_dir)
        .map_err(|e| CliError::runtime(format!("cannot create {}: {e}", args.out_dir.display())))?;
    let path = args.out_dir.join("benchmark.csv");
    write_file(&path, csv.as_bytes())?;
    Ok(vec![path])
}

/// Ad-hoc estimator evaluation for debugging: entropies, exact vs approx
/// joint entropy, hatted vs naive mutual information.
pub struct EntropyArgs {
    pub lambda11: f64,
    pub lambda22: Option<f64>,
    pub lambda12: Option<f64>,
    pub tail_mass: f64,
    pub max_terms: usize,
}

pub fn run_entropy(args: &EntropyArgs) -> Result<String> {
    let policy = TruncationPolicy::new(args.tail_mass, args.max_terms)
        .map_err(|e| CliError::input(e.to_string()))?;
    let mut out = String::new();
    let h1 = poisson_entropy(args.lambda11, &policy).map_err(|e| CliError::input(e.to_string()))?;
    writeln!(
        out,
        "H(Poisson({})) = {} nats",
        args.lambda11,
        format_f64(h1)
    )
    .unwrap();

    if let (Some(l22), Some(l12)) = (args.lambda22, args.lambda12) {
        let h2 = poisson_entropy(l22, &policy).map_err(|e| CliError::input(e.to_string()))?;
        writeln!(out, "H(Poisson({l22})) = {} nats", format_f64(h2)).unwrap();
        let exact = bivariate_joint_entropy_exact(args.lambda11, l22, l12, &policy)
            .map_err(|e| CliError::input(e.to_string()))?;
        let rates = RateMatrix::from_entries(2, |i, j| match (i, j) {
            (0, 0) => args.lambda11,
            (1, 1) => l22,
            _ => l12,
        })
        .map_err(|e| CliError::input(e.to_string()))?;
        let approx = joint_entropy_approx(&rates, &[0, 1], &policy)
            .map_err(|e| CliError::input(e.to_string()))?;
        let mi = mutual_information_poisson(args.lambda11, l22, l12, &policy)
            .map_err(|e| CliError::input(e.to_string()))?;
        writeln!(out, "joint_exact = {} nats", format_f64(exact)).unwrap();
        writeln!(out, "joint_approx = {} nats", format_f64(approx)).unwrap();
        writeln!(
            out,
            "rel_error = {}",
            format_f64((approx - exact).abs() / exact)
        )
        .unwrap();
        writeln!(out, "mi_hatted = {} nats", format_f64(mi)).unwrap();
        writeln!(
            out,
            "mi_naive_marginals = {} nats",
            format_f64(h1 + h2 - approx)
        )
        .unwrap();
    }
    Ok(out)
}

/// Shared helper for tests and main: resolve a directory path.
pub fn ensure_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path)
        .map_err(|e| CliError::runtime(format!("cannot create {}: {e}", path.display())))
}
