use clap::{Args, Parser, Subcommand};
use countnet_cli::config::ConfigFile;
use countnet_cli::error::{CliError, Result};
use countnet_cli::pipeline::{
    run_benchmark, run_entropy, run_infer, run_simulate, BenchmarkArgs, EntropyArgs,
    PipelineConfig, ScreenKind, SimulateArgs,
};
use countnet_core::infer::{EstimatorKind, InferenceConfig};
use std::path::PathBuf;
use std::str::FromStr;

const WORKERS_ENV: &str = "COUNTNET_WORKERS";

#[derive(Parser)]
#[command(
    name = "countnet",
    about = "Interaction-network inference from event-count data via Poisson information measures",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct Common {
    /// Flat key=value config file; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed for all randomness
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker thread count (default: COUNTNET_WORKERS or all cores)
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a ground-truth graph and simulate count data from it
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Number of variables
        #[arg(long)]
        nodes: Option<usize>,
        /// Number of samples
        #[arg(long)]
        samples: Option<usize>,
        /// Edge probability of the random graph
        #[arg(long = "er-p")]
        er_p: Option<f64>,
        #[arg(long = "lambda-edge")]
        lambda_edge: Option<f64>,
        #[arg(long = "lambda-base")]
        lambda_base: Option<f64>,
        /// Poisson noise rate per node and sample
        #[arg(long)]
        noise: Option<f64>,
    },
    /// Infer an interaction network from a count file
    Infer {
        #[command(flatten)]
        common: Common,
        /// Input count CSV (label, then integer counts per sample)
        #[arg(long)]
        input: Option<PathBuf>,
        /// Significance level of the shuffle test
        #[arg(long)]
        alpha: Option<f64>,
        /// Permutations per shuffle test
        #[arg(long)]
        shuffles: Option<usize>,
        /// CMI estimator: poisson | gaussian
        #[arg(long)]
        estimator: Option<String>,
        /// 0 = contemporaneous, 1 = one-step lag (transfer-entropy mode)
        #[arg(long)]
        lag: Option<u8>,
        /// Cap on parents per target
        #[arg(long = "max-parents")]
        max_parents: Option<usize>,
        /// Drop rows whose total count is at or below this
        #[arg(long = "min-count")]
        min_count: Option<u64>,
        /// Rescale each row by its mean (floor division)
        #[arg(long, num_args = 0..=1, default_missing_value = "true")]
        scale: Option<bool>,
        /// Goodness-of-fit screen: none | poisson | negbin
        #[arg(long)]
        screen: Option<String>,
    },
    /// Sweep simulated benchmark cells and report TPR/FPR per method
    Benchmark {
        #[command(flatten)]
        common: Common,
        /// Node counts, comma-separated
        #[arg(long)]
        nodes: Option<String>,
        /// Edge probabilities, comma-separated
        #[arg(long)]
        p: Option<String>,
        /// Sample counts, comma-separated
        #[arg(long)]
        samples: Option<String>,
        /// Methods, comma-separated: poisson,gaussian
        #[arg(long)]
        methods: Option<String>,
        /// Realizations per cell
        #[arg(long)]
        realizations: Option<usize>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        shuffles: Option<usize>,
        #[arg(long = "lambda-edge")]
        lambda_edge: Option<f64>,
        #[arg(long = "lambda-base")]
        lambda_base: Option<f64>,
        #[arg(long)]
        noise: Option<f64>,
    },
    /// Evaluate the entropy estimators on explicit rates
    Entropy {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        lambda11: Option<f64>,
        #[arg(long)]
        lambda22: Option<f64>,
        #[arg(long)]
        lambda12: Option<f64>,
        #[arg(long = "tail-mass")]
        tail_mass: Option<f64>,
        #[arg(long = "max-terms")]
        max_terms: Option<usize>,
    },
}

fn parse_list<T: FromStr>(raw: &str, what: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    raw.split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|e| CliError::input(format!("bad {what} {s:?}: {e}")))
        })
        .collect()
}

fn parse_estimator(raw: &str) -> Result<EstimatorKind> {
    match raw {
        "poisson" => Ok(EstimatorKind::Poisson),
        "gaussian" => Ok(EstimatorKind::Gaussian),
        other => Err(CliError::input(format!(
            "unknown estimator {other:?} (poisson|gaussian)"
        ))),
    }
}

fn load_config(common: &Common) -> Result<ConfigFile> {
    match &common.config {
        Some(path) => ConfigFile::load(path),
        None => Ok(ConfigFile::default()),
    }
}

fn init_workers(common: &Common, cfg: &ConfigFile) -> Result<()> {
    let from_env = std::env::var(WORKERS_ENV).ok().and_then(|v| v.parse().ok());
    let workers: Option<usize> = cfg.resolve_opt(common.workers, "workers")?.or(from_env);
    if let Some(w) = workers {
        if w == 0 {
            return Err(CliError::input("workers must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| CliError::runtime(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate {
            common,
            nodes,
            samples,
            er_p,
            lambda_edge,
            lambda_base,
            noise,
        } => {
            let cfg = load_config(&common)?;
            init_workers(&common, &cfg)?;
            let args = SimulateArgs {
                nodes: cfg
                    .resolve_opt(nodes, "nodes")?
                    .ok_or_else(|| CliError::input("simulate needs --nodes"))?,
                samples: cfg
                    .resolve_opt(samples, "samples")?
                    .ok_or_else(|| CliError::input("simulate needs --samples"))?,
                er_p: cfg.resolve(er_p, "er-p", 0.04)?,
                lambda_edge: cfg.resolve(lambda_edge, "lambda-edge", 1.0)?,
                lambda_base: cfg.resolve(lambda_base, "lambda-base", 1.0)?,
                noise: cfg.resolve(noise, "noise", 0.5)?,
                seed: cfg.resolve(common.seed, "seed", 0)?,
                out_dir: cfg.resolve(common.out.clone(), "out", PathBuf::from("."))?,
            };
            for path in run_simulate(&args)? {
                println!("wrote {}", path.display());
            }
            Ok(())
        }
        Command::Infer {
            common,
            input,
            alpha,
            shuffles,
            estimator,
            lag,
            max_parents,
            min_count,
            scale,
            screen,
        } => {
            let cfg = load_config(&common)?;
            init_workers(&common, &cfg)?;
            let estimator =
                parse_estimator(&cfg.resolve(estimator, "estimator", "poisson".to_string())?)?;
            let screen =
                ScreenKind::from_str(&cfg.resolve(screen, "screen", "none".to_string())?)
                    .map_err(CliError::input)?;
            let inference = InferenceConfig {
                estimator,
                alpha: cfg.resolve(alpha, "alpha", 0.05)?,
                n_shuffles: cfg.resolve(shuffles, "shuffles", 200)?,
                lag: cfg.resolve(lag, "lag", 0)?,
                max_parents: cfg.resolve_opt(max_parents, "max-parents")?,
                seed: cfg.resolve(common.seed, "seed", 0)?,
                ..Default::default()
            };
            let pipeline = PipelineConfig {
                input: cfg
                    .resolve_opt(input, "input")?
                    .ok_or_else(|| CliError::input("infer needs --input"))?,
                min_total_count: cfg.resolve(min_count, "min-count", 100)?,
                scale: cfg.resolve(scale, "scale", false)?,
                screen,
                inference,
                out_dir: cfg.resolve(common.out.clone(), "out", PathBuf::from("."))?,
            };
            for path in run_infer(&pipeline)? {
                println!("wrote {}", path.display());
            }
            Ok(())
        }
        Command::Benchmark {
            common,
            nodes,
            p,
            samples,
            methods,
            realizations,
            alpha,
            shuffles,
            lambda_edge,
            lambda_base,
            noise,
        } => {
            let cfg = load_config(&common)?;
            init_workers(&common, &cfg)?;
            let methods_raw = cfg.resolve(methods, "methods", "poisson,gaussian".to_string())?;
            let methods = parse_list::<String>(&methods_raw, "method")?
                .iter()
                .map(|m| parse_estimator(m))
                .collect::<Result<Vec<_>>>()?;
            let args = BenchmarkArgs {
                nodes: parse_list(
                    &cfg.resolve(nodes, "nodes", "50".to_string())?,
                    "node count",
                )?,
                edge_probs: parse_list(
                    &cfg.resolve(p, "p", "0.04".to_string())?,
                    "edge probability",
                )?,
                samples: parse_list(
                    &cfg.resolve(samples, "samples", "100,250,500,1000".to_string())?,
                    "sample count",
                )?,
                methods,
                realizations: cfg.resolve(realizations, "realizations", 50)?,
                alpha: cfg.resolve(alpha, "alpha", 0.005)?,
                shuffles: cfg.resolve(shuffles, "shuffles", 200)?,
                lambda_edge: cfg.resolve(lambda_edge, "lambda-edge", 1.0)?,
                lambda_base: cfg.resolve(lambda_base, "lambda-base", 1.0)?,
                noise: cfg.resolve(noise, "noise", 0.5)?,
                seed: cfg.resolve(common.seed, "seed", 0)?,
                out_dir: cfg.resolve(common.out.clone(), "out", PathBuf::from("."))?,
            };
            for path in run_benchmark(&args)? {
                println!("wrote {}", path.display());
            }
            Ok(())
        }
        Command::Entropy {
            common,
            lambda11,
            lambda22,
            lambda12,
            tail_mass,
            max_terms,
        } => {
            let cfg = load_config(&common)?;
            let args = EntropyArgs {
                lambda11: cfg
                    .resolve_opt(lambda11, "lambda11")?
                    .ok_or_else(|| CliError::input("entropy needs --lambda11"))?,
                lambda22: cfg.resolve_opt(lambda22, "lambda22")?,
                lambda12: cfg.resolve_opt(lambda12, "lambda12")?,
                tail_mass: cfg.resolve(tail_mass, "tail-mass", 1e-12)?,
                max_terms: cfg.resolve(max_terms, "max-terms", 1_000_000)?,
            };
            print!("{}", run_entropy(&args)?);
            Ok(())
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version are not input errors
            if e.use_stderr() {
                eprint!("{e}");
                std::process::exit(1);
            }
            print!("{e}");
            std::process::exit(0);
        }
    };
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
