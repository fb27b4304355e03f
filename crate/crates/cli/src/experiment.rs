//! Running a K sweep on one dataset, or on a batch of them, and writing
//! every artifact to disk.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::Deserialize;
use vtsfd_core::{
    elbow, gen_gaussian_clusters, gen_overlapped, ruspini_fixture, ruspini_noised, select_by_rule, sweep,
    visual_tsfd, Dataset, FcmConfig, GaussianSpec, Index, DEFAULT_PLATEAU_THRESHOLD,
};

use crate::csv_io::load_csv;
use crate::error::{HarnessError, Result};
use crate::report::{
    write_metrics_csv, write_report_csv, write_report_text, ExperimentReport,
};
use crate::svg::{emit_elbow_svg, emit_visual_tsfd_svg};

/// Upper end of the default `K` range, enough for datasets with up to 18 classes.
pub const DEFAULT_K_CAP: usize = 18;

/// Datasets that need no input file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    Ruspini,
    RuspiniNoised,
    Gaussian { clusters: usize, overlapped: bool },
}

impl Builtin {
    /// The artificial datasets of the benchmark table.
    pub const ARTIFICIAL: [Builtin; 6] = [
        Builtin::Gaussian { clusters: 3, overlapped: false },
        Builtin::Ruspini,
        Builtin::Gaussian { clusters: 5, overlapped: false },
        Builtin::Gaussian { clusters: 3, overlapped: true },
        Builtin::RuspiniNoised,
        Builtin::Gaussian { clusters: 5, overlapped: true },
    ];

    pub fn name(self) -> String {
        match self {
            Builtin::Ruspini => "Ruspini".into(),
            Builtin::RuspiniNoised => "Ruspini_noised".into(),
            Builtin::Gaussian { clusters, overlapped: false } => format!("E1071-{clusters}"),
            Builtin::Gaussian { clusters, overlapped: true } => format!("E1071-{clusters}-overlapped"),
        }
    }

    /// Builds the dataset; `seed` drives the random generators and is
    /// ignored by the fixed Ruspini table.
    pub fn build(self, seed: u64) -> Result<Dataset> {
        let data = match self {
            Builtin::Ruspini => ruspini_fixture(),
            Builtin::RuspiniNoised => ruspini_noised(seed),
            Builtin::Gaussian { clusters, overlapped } => {
                let spec = GaussianSpec::new(clusters, seed);
                if overlapped {
                    gen_overlapped(&spec)?
                } else {
                    gen_gaussian_clusters(&spec)?
                }
            }
        };
        Ok(data.with_meta("name", self.name()))
    }
}

impl FromStr for Builtin {
    type Err = HarnessError;

    /// Accepts `ruspini`, `ruspini-noised`, `e1071-<K>` and
    /// `e1071-<K>-overlapped`, case-insensitively.
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase().replace('_', "-");
        match lower.as_str() {
            "ruspini" => return Ok(Builtin::Ruspini),
            "ruspini-noised" => return Ok(Builtin::RuspiniNoised),
            _ => {}
        }
        let bad = || HarnessError::Config(format!("unknown built-in dataset '{s}'"));
        let rest = lower.strip_prefix("e1071-").ok_or_else(bad)?;
        let (count, overlapped) = match rest.strip_suffix("-overlapped") {
            Some(c) => (c, true),
            None => (rest, false),
        };
        let clusters: usize = count.parse().map_err(|_| bad())?;
        if clusters < 2 {
            return Err(bad());
        }
        Ok(Builtin::Gaussian { clusters, overlapped })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    Csv { path: PathBuf, label_column: Option<String> },
    Builtin { which: Builtin, seed: u64 },
}

impl DataSource {
    pub fn load(&self) -> Result<Dataset> {
        match self {
            DataSource::Csv { path, label_column } => load_csv(path, label_column.as_deref()),
            DataSource::Builtin { which, seed } => which.build(*seed),
        }
    }
}

/// Everything needed for one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub source: DataSource,
    /// Name used in reports and file names; defaults to the dataset's own name.
    pub name: Option<String>,
    pub k_min: Option<usize>,
    pub k_max: Option<usize>,
    /// Fit settings; `k` is overwritten per sweep step.
    pub fcm: FcmConfig,
    pub plateau_threshold: f64,
    pub output_dir: PathBuf,
}

impl RunConfig {
    pub fn new(source: DataSource, output_dir: impl Into<PathBuf>) -> Self {
        Self {
            source,
            name: None,
            k_min: None,
            k_max: None,
            fcm: FcmConfig::default(),
            plateau_threshold: DEFAULT_PLATEAU_THRESHOLD,
            output_dir: output_dir.into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        FcmConfig { k: 2, ..self.fcm.clone() }
            .validate()
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        if !(self.plateau_threshold.is_finite() && self.plateau_threshold >= 0.0) {
            return Err(HarnessError::Config(format!(
                "plateau threshold must be >= 0, got {}",
                self.plateau_threshold
            )));
        }
        Ok(())
    }
}

/// Resolves the sweep range for a dataset of `n` points.
pub fn k_range(n: usize, k_min: Option<usize>, k_max: Option<usize>) -> Result<(usize, usize)> {
    let lo = k_min.unwrap_or(2);
    let hi = k_max.unwrap_or_else(|| DEFAULT_K_CAP.min(n.saturating_sub(1)));
    if lo < 2 || lo > hi || hi >= n {
        return Err(HarnessError::KRange(format!(
            "[{lo}, {hi}] must satisfy 2 <= k_min <= k_max < n = {n}"
        )));
    }
    Ok((lo, hi))
}

/// Sweep, per-index verdicts, TSFD elbow and Visual TSFD for one dataset,
/// without touching the file system.
pub fn analyze(
    data: &Dataset,
    name: &str,
    k_min: usize,
    k_max: usize,
    template: &FcmConfig,
    plateau_threshold: f64,
) -> Result<ExperimentReport> {
    let result = sweep(data, template, k_min, k_max)?;
    if result.is_empty() {
        let reasons: Vec<String> = result.failures.iter().map(|(k, r)| format!("K={k}: {r}")).collect();
        return Err(vtsfd_core::Error::DegenerateData(format!("no K could be fitted ({})", reasons.join("; "))).into());
    }
    let verdicts = select_by_rule(&result)?;
    let elbow_tsfd = elbow(&result.series(Index::Tsfd), Index::Tsfd.orientation()).map_err(|e| e.to_string());
    let visual = visual_tsfd(&result, plateau_threshold)?;
    Ok(ExperimentReport {
        dataset: name.to_string(),
        n: data.n(),
        true_clusters: data.label_count(),
        verdicts,
        elbow_tsfd,
        visual,
        sweep: result,
    })
}

/// Turns a dataset name into a safe file-name fragment.
pub fn file_stem(name: &str) -> String {
    let s: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect();
    if s.is_empty() { "dataset".into() } else { s }
}

fn dataset_name(config: &RunConfig, data: &Dataset) -> String {
    config
        .name
        .clone()
        .or_else(|| data.meta().get("name").cloned())
        .unwrap_or_else(|| "dataset".into())
}

/// Writes the per-dataset artifacts of a finished analysis into `dir`.
pub fn write_artifacts(report: &ExperimentReport, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let stem = file_stem(&report.dataset);
    write_metrics_csv(report, &dir.join(format!("metrics_{stem}.csv")))?;
    write_report_csv(std::slice::from_ref(report), &dir.join("report.csv"))?;
    write_report_text(std::slice::from_ref(report), &dir.join("report.txt"))?;
    let triples = report
        .sweep
        .entries
        .iter()
        .map(|(&k, e)| (k, *e.inertia()))
        .collect();
    emit_visual_tsfd_svg(
        &triples,
        &format!("Visual TSFD: {}", report.dataset),
        &dir.join(format!("visual_tsfd_{stem}.svg")),
    )?;
    emit_elbow_svg(
        &report.sweep.series(Index::Tsfd),
        "TSFD",
        Index::Tsfd.orientation(),
        &format!("Elbow TSFD: {}", report.dataset),
        &dir.join(format!("elbow_tsfd_{stem}.svg")),
    )
}

/// Loads the data, analyses it and writes all artifacts to the output directory.
pub fn run_experiment(config: &RunConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let data = config.source.load()?;
    let (k_min, k_max) = k_range(data.n(), config.k_min, config.k_max)?;
    let name = dataset_name(config, &data);
    let report = analyze(&data, &name, k_min, k_max, &config.fcm, config.plateau_threshold)?;
    write_artifacts(&report, &config.output_dir)?;
    Ok(report)
}

/// Runs several experiments in parallel, each into its own subdirectory of
/// `output_dir`, then writes the combined `report.csv` and `report.txt`.
/// Reports keep the order of `configs`.
pub fn run_table(configs: &[RunConfig], output_dir: &Path) -> Result<Vec<ExperimentReport>> {
    fs::create_dir_all(output_dir).map_err(|e| HarnessError::io(output_dir, e))?;
    let reports = configs
        .par_iter()
        .map(run_experiment)
        .collect::<Result<Vec<_>>>()?;
    write_report_csv(&reports, &output_dir.join("report.csv"))?;
    write_report_text(&reports, &output_dir.join("report.txt"))?;
    Ok(reports)
}

/// Optional fit and sweep settings shared by a manifest's datasets.
#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    pub k_min: Option<usize>,
    pub k_max: Option<usize>,
    pub m: Option<f64>,
    pub epsilon: Option<f64>,
    pub max_iterations: Option<usize>,
    pub restarts: Option<usize>,
    pub seed: Option<u64>,
    pub plateau_threshold: Option<f64>,
}

impl Settings {
    /// Fields set in `self` win over `fallback`.
    pub fn or(&self, fallback: &Settings) -> Settings {
        Settings {
            k_min: self.k_min.or(fallback.k_min),
            k_max: self.k_max.or(fallback.k_max),
            m: self.m.or(fallback.m),
            epsilon: self.epsilon.or(fallback.epsilon),
            max_iterations: self.max_iterations.or(fallback.max_iterations),
            restarts: self.restarts.or(fallback.restarts),
            seed: self.seed.or(fallback.seed),
            plateau_threshold: self.plateau_threshold.or(fallback.plateau_threshold),
        }
    }

    pub fn apply(&self, config: &mut RunConfig) {
        let d = FcmConfig::default();
        config.k_min = self.k_min;
        config.k_max = self.k_max;
        config.fcm = FcmConfig {
            k: d.k,
            m: self.m.unwrap_or(d.m),
            epsilon: self.epsilon.unwrap_or(d.epsilon),
            max_iterations: self.max_iterations.unwrap_or(d.max_iterations),
            restarts: self.restarts.unwrap_or(d.restarts),
            seed: self.seed.unwrap_or(d.seed),
        };
        config.plateau_threshold = self.plateau_threshold.unwrap_or(DEFAULT_PLATEAU_THRESHOLD);
    }
}

/// One `[[dataset]]` table of a manifest.
#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    pub name: Option<String>,
    /// CSV path, relative to the manifest's directory.
    pub path: Option<PathBuf>,
    pub label_column: Option<String>,
    pub builtin: Option<String>,
    /// Generator seed for built-in random datasets.
    #[serde(default)]
    pub data_seed: u64,
    pub k_min: Option<usize>,
    pub k_max: Option<usize>,
    pub m: Option<f64>,
    pub epsilon: Option<f64>,
    pub max_iterations: Option<usize>,
    pub restarts: Option<usize>,
    pub seed: Option<u64>,
    pub plateau_threshold: Option<f64>,
}

impl ManifestEntry {
    pub fn settings(&self) -> Settings {
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

/// Batch description for the `table` command.
///
/// ```toml
/// [defaults]
/// restarts = 10
///
/// [[dataset]]
/// name = "Iris"
/// path = "iris.csv"
/// label_column = "species"
///
/// [[dataset]]
/// builtin = "e1071-3"
/// data_seed = 4
/// ```
#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    #[serde(default)]
    pub defaults: Settings,
    #[serde(rename = "dataset")]
    pub datasets: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn parse(text: &str) -> Result<Self> {
        let manifest: Manifest = toml::from_str(text).map_err(|e| HarnessError::Manifest(e.to_string()))?;
        if manifest.datasets.is_empty() {
            return Err(HarnessError::Manifest("no [[dataset]] entries".into()));
        }
        Ok(manifest)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::parse(&text)
    }

    /// One run configuration per dataset, writing below `output_dir`.
    /// `overrides` (typically command-line flags) beat every manifest value.
    pub fn run_configs(&self, base_dir: &Path, output_dir: &Path, overrides: &Settings) -> Result<Vec<RunConfig>> {
        let mut configs = Vec::with_capacity(self.datasets.len());
        let mut seen = std::collections::BTreeSet::new();
        for (i, entry) in self.datasets.iter().enumerate() {
            let source = match (&entry.path, &entry.builtin) {
                (Some(p), None) => DataSource::Csv {
                    path: base_dir.join(p),
                    label_column: entry.label_column.clone(),
                },
                (None, Some(b)) => DataSource::Builtin {
                    which: b.parse()?,
                    seed: entry.data_seed,
                },
                _ => {
                    return Err(HarnessError::Manifest(format!(
                        "dataset #{}: exactly one of 'path' or 'builtin' is required",
                        i + 1
                    )))
                }
            };
            let name = match (&entry.name, &source) {
                (Some(n), _) => n.clone(),
                (None, DataSource::Builtin { which, .. }) => which.name(),
                (None, DataSource::Csv { path, .. }) => path
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| format!("dataset{}", i + 1)),
            };
            let stem = file_stem(&name);
            if !seen.insert(stem.clone()) {
                return Err(HarnessError::Manifest(format!("duplicate dataset name '{name}'")));
            }
            let mut config = RunConfig::new(source, output_dir.join(&stem));
            config.name = Some(name);
            overrides.or(&entry.settings().or(&self.defaults)).apply(&mut config);
            configs.push(config);
        }
        Ok(configs)
    }
}

/// Configurations for every built-in artificial dataset.
pub fn artificial_configs(output_dir: &Path, data_seed: u64, settings: &Settings) -> Vec<RunConfig> {
    Builtin::ARTIFICIAL
        .iter()
        .map(|&which| {
            let name = which.name();
            let mut config = RunConfig::new(DataSource::Builtin { which, seed: data_seed }, output_dir.join(file_stem(&name)));
            config.name = Some(name);
            settings.apply(&mut config);
            config
        })
        .collect()
}
