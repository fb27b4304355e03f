use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use vtsfd_cli::experiment::{artificial_configs, run_experiment, run_table, Builtin, DataSource, Manifest, RunConfig, Settings};
use vtsfd_cli::report::render_report_text;
use vtsfd_cli::{exit, write_dataset_csv, HarnessError, Result};
use vtsfd_core::{add_skewed_noise, gen_gaussian_clusters, GaussianSpec, NoiseSpec};

/// Fuzzy C-Means K sweeps with fuzzy-inertia validity indices and Visual TSFD.
#[derive(Debug, Parser)]
#[command(name = "vtsfd", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a built-in dataset to CSV.
    Generate(GenerateArgs),
    /// Sweep K on one dataset and write metrics, report and charts.
    Sweep(SweepArgs),
    /// Sweep K on a batch of datasets and write a combined report.
    Table(TableArgs),
}

#[derive(Debug, Args)]
struct GenerateArgs {
    /// ruspini, ruspini-noised, e1071-<K> or e1071-<K>-overlapped
    dataset: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV file.
    #[arg(long, short)]
    out: PathBuf,
    /// Points per Gaussian cluster (e1071 datasets).
    #[arg(long)]
    points_per_cluster: Option<usize>,
    /// Standard deviation (plain e1071 datasets; overlapped ones use 0.4).
    #[arg(long)]
    sd: Option<f64>,
    #[arg(long)]
    dimension: Option<usize>,
    /// Noise points added per label after generation.
    #[arg(long)]
    noise_per_label: Option<usize>,
}

#[derive(Debug, Args)]
struct FitArgs {
    #[arg(long)]
    k_min: Option<usize>,
    /// Defaults to min(18, n - 1).
    #[arg(long)]
    k_max: Option<usize>,
    /// Fuzziness coefficient [default: 2]
    #[arg(long)]
    m: Option<f64>,
    /// Relative FW change that ends a fit [default: 1e-4]
    #[arg(long)]
    epsilon: Option<f64>,
    /// [default: 100]
    #[arg(long)]
    max_iterations: Option<usize>,
    /// Random initializations per K [default: 10]
    #[arg(long)]
    restarts: Option<usize>,
    /// Base seed of the restarts [default: 0]
    #[arg(long)]
    seed: Option<u64>,
    /// Visual TSFD plateau threshold [default: 0.1]
    #[arg(long)]
    plateau_threshold: Option<f64>,
}

impl FitArgs {
    fn settings(&self) -> Settings {
        Settings {
            k_min: self.k_min,
            k_max: self.k_max,
            m: self.m,
            epsilon: self.epsilon,
            max_iterations: self.max_iterations,
            restarts: self.restarts,
            seed: self.seed,
            plateau_threshold: self.plateau_threshold,
        }
    }
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Input CSV with a header row.
    #[arg(long, conflicts_with = "builtin", required_unless_present = "builtin")]
    input: Option<PathBuf>,
    /// Column holding the true labels.
    #[arg(long, requires = "input")]
    label_column: Option<String>,
    /// Built-in dataset instead of a CSV.
    #[arg(long)]
    builtin: Option<String>,
    /// Generator seed for built-in random datasets.
    #[arg(long, default_value_t = 0)]
    data_seed: u64,
    /// Dataset name used in reports and file names.
    #[arg(long)]
    name: Option<String>,
    #[arg(long, short, default_value = "out")]
    out: PathBuf,
    #[command(flatten)]
    fit: FitArgs,
}

#[derive(Debug, Args)]
struct TableArgs {
    /// TOML manifest listing the datasets.
    #[arg(long, conflicts_with = "artificial", required_unless_present = "artificial")]
    manifest: Option<PathBuf>,
    /// Run every built-in artificial dataset.
    #[arg(long)]
    artificial: bool,
    /// Generator seed for built-in random datasets (with --artificial).
    #[arg(long, default_value_t = 0)]
    data_seed: u64,
    #[arg(long, short, default_value = "out")]
    out: PathBuf,
    #[command(flatten)]
    fit: FitArgs,
}

fn generate(args: &GenerateArgs) -> Result<()> {
    let which: Builtin = args.dataset.parse()?;
    let data = match which {
        Builtin::Gaussian { clusters, overlapped } => {
            let mut spec = GaussianSpec::new(clusters, args.seed);
            if let Some(p) = args.points_per_cluster {
                spec.points_per_cluster = p;
            }
            if let Some(d) = args.dimension {
                spec.dimension = d;
            }
            if let Some(sd) = args.sd {
                if overlapped {
                    return Err(HarnessError::Config("--sd cannot be combined with an overlapped dataset".into()));
                }
                spec.sd = sd;
            }
            if overlapped {
                vtsfd_core::gen_overlapped(&spec)?
            } else {
                gen_gaussian_clusters(&spec)?
            }
        }
        other => {
            if args.points_per_cluster.is_some() || args.sd.is_some() || args.dimension.is_some() {
                return Err(HarnessError::Config(format!(
                    "{} takes no generator parameters",
                    other.name()
                )));
            }
            other.build(args.seed)?
        }
    };
    let data = match args.noise_per_label {
        Some(p) => add_skewed_noise(&data, &NoiseSpec::new(p, args.seed))?,
        None => data,
    };
    write_dataset_csv(&data, &args.out)?;
    eprintln!("wrote {} points to {}", data.n(), args.out.display());
    Ok(())
}

fn sweep(args: &SweepArgs) -> Result<()> {
    let source = match (&args.input, &args.builtin) {
        (Some(path), _) => DataSource::Csv {
            path: path.clone(),
            label_column: args.label_column.clone(),
        },
        (None, Some(name)) => DataSource::Builtin {
            which: name.parse()?,
            seed: args.data_seed,
        },
        (None, None) => unreachable!("clap requires a data source"),
    };
    let mut config = RunConfig::new(source, &args.out);
    args.fit.settings().apply(&mut config);
    config.name = args.name.clone();
    let report = run_experiment(&config)?;
    print!("{}", render_report_text(std::slice::from_ref(&report)));
    Ok(())
}

fn table(args: &TableArgs) -> Result<()> {
    let overrides = args.fit.settings();
    let configs = match &args.manifest {
        Some(path) => {
            let manifest = Manifest::load(path)?;
            let base = path.parent().unwrap_or(Path::new("."));
            manifest.run_configs(base, &args.out, &overrides)?
        }
        None => artificial_configs(&args.out, args.data_seed, &overrides),
    };
    let reports = run_table(&configs, &args.out)?;
    print!("{}", render_report_text(&reports));
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(exit::PARSE as u8)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = match &cli.command {
        Command::Generate(args) => generate(args),
        Command::Sweep(args) => sweep(args),
        Command::Table(args) => table(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
