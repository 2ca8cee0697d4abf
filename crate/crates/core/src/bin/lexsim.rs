use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lexsim::calibration::SearchConfig;
use lexsim::cli::{self, CalibrateOptions, Error, RunConfig};
use lexsim::diffusion::Mode;

/// Lexical similarity of languages to reference clusters.
#[derive(Parser)]
#[command(name = "lexsim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Dataset file (JSON).
    dataset: PathBuf,
    /// Intensity sharpness K.
    #[arg(long, default_value_t = 0.6)]
    k: f64,
    /// Weight divisor for edges into hypothetical vertices.
    #[arg(long, default_value_t = 5.0)]
    nu0: f64,
    #[arg(long, default_value_t = 0.3)]
    a_con: f64,
    #[arg(long, default_value_t = 0.3)]
    a_vow: f64,
    #[arg(long, default_value_t = 1.0)]
    w_con: f64,
    #[arg(long, default_value_t = 0.7)]
    w_vow: f64,
    /// directed or undirected.
    #[arg(long, default_value = "directed")]
    mode: Mode,
    /// NMWD histogram bins.
    #[arg(long, default_value_t = 20)]
    bins: usize,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory.
    #[arg(long, short, default_value = "out")]
    out: PathBuf,
}

impl Common {
    fn config(&self) -> RunConfig {
        RunConfig {
            k: self.k,
            nu0: self.nu0,
            a_con: self.a_con,
            a_vow: self.a_vow,
            w_con: self.w_con,
            w_vow: self.w_vow,
            mode: self.mode,
            bins: self.bins,
            workers: self.workers,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Per-concept and aggregate distributions, NMWD histograms and PCA.
    Classify(Common),
    /// Translation-distance matrix per concept.
    Distances(Common),
    /// NMWD histograms.
    Nmwd {
        #[command(flatten)]
        common: Common,
        /// Language to report (repeatable; default all classified).
        #[arg(long = "language")]
        languages: Vec<String>,
    },
    /// PCA projection of per-concept distributions.
    Pca {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 3)]
        dims: usize,
    },
    /// Fit w_con and w_vow with the pinned-reference model.
    Calibrate {
        #[command(flatten)]
        common: Common,
        /// LANGUAGE=CLUSTER target (repeatable; default leave-one-out over references).
        #[arg(long = "target", value_parser = parse_target)]
        targets: Vec<(String, String)>,
        /// Concept to use (repeatable; default all).
        #[arg(long = "concept")]
        concepts: Vec<String>,
        /// K values, one search each.
        #[arg(long = "k-values", value_delimiter = ',', default_values_t = [0.5, 0.6, 0.7, 0.8, 0.9, 1.0])]
        k_values: Vec<f64>,
        #[arg(long, default_value_t = 30)]
        population: usize,
        #[arg(long, default_value_t = 5)]
        iterations: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Load and check a dataset.
    Validate { dataset: PathBuf },
}

fn parse_target(s: &str) -> Result<(String, String), String> {
    s.split_once('=')
        .map(|(l, c)| (l.to_string(), c.to_string()))
        .ok_or_else(|| format!("expected LANGUAGE=CLUSTER, got {s:?}"))
}

fn report(paths: &[PathBuf]) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Classify(c) => report(&cli::run_classify(
            &c.config(),
            &cli::load_dataset(&c.dataset)?,
            &c.out,
        )?),
        Command::Distances(c) => report(&cli::run_distances(
            &c.config(),
            &cli::load_dataset(&c.dataset)?,
            &c.out,
        )?),
        Command::Nmwd { common, languages } => {
            let d = cli::load_dataset(&common.dataset)?;
            report(&cli::run_nmwd(
                &common.config(),
                &d,
                &languages,
                &common.out,
            )?)
        }
        Command::Pca { common, dims } => {
            let d = cli::load_dataset(&common.dataset)?;
            report(&cli::run_pca(&common.config(), &d, dims, &common.out)?)
        }
        Command::Calibrate {
            common,
            targets,
            concepts,
            k_values,
            population,
            iterations,
            seed,
        } => {
            let d = cli::load_dataset(&common.dataset)?;
            let options = CalibrateOptions {
                targets,
                concepts: (!concepts.is_empty()).then_some(concepts),
                k_values,
                search: SearchConfig {
                    population,
                    iterations,
                    seed,
                    ..SearchConfig::default()
                },
            };
            let (fit, paths) = cli::run_calibrate(&common.config(), &d, &options, &common.out)?;
            println!(
                "w_con = {:.4}, w_vow = {:.4} over {} runs",
                fit.mean_w_con,
                fit.mean_w_vow,
                fit.runs.len()
            );
            report(&paths);
        }
        Command::Validate { dataset } => {
            let s = cli::validate(&dataset)?;
            println!(
                "ok: {} concepts, {} clusters, {} reference and {} classified languages, {} translations, {} words",
                s.concepts, s.clusters, s.references, s.classified, s.translations, s.words
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
