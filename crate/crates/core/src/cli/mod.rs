//! File-level orchestration behind the `lexsim` binary: dataset loading,
//! run configuration and deterministic report emission.

mod dataset;

pub use dataset::{
    load_dataset, parse_dataset, DatasetError, DatasetFile, LanguageEntry, WordEntry,
};

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::calibration::{
    fit_weights, CalibrationError, CalibrationFit, CalibrationTask, SearchConfig,
};
use crate::diffusion::{DiffusionError, DiffusionParams, Mode};
use crate::distance::{translation_distance_min, translation_distance_ref, EditWeights};
use crate::pipeline::{
    classify, nmwd, pca_project, ClassificationReport, Dataset, NmwdHistogram, PcaProjection,
    PipelineError, Role, Skip,
};

/// Simplex tolerance checked before anything is written.
const SIMPLEX_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Calibration(#[from] CalibrationError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error("cannot write {path}: {source}")]
    Output {
        path: String,
        source: std::io::Error,
    },
}

impl Error {
    /// 1 for bad input, 2 for internal failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Invariant(_) | Error::Output { .. } => 2,
            Error::Pipeline(PipelineError::Diffusion(DiffusionError::Singular(_))) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub k: f64,
    pub nu0: f64,
    pub a_con: f64,
    pub a_vow: f64,
    pub w_con: f64,
    pub w_vow: f64,
    pub mode: Mode,
    pub bins: usize,
    /// Worker threads; `None` uses the available parallelism. Never affects
    /// results, so it is not serialized.
    #[serde(skip)]
    pub workers: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let w = EditWeights::default();
        let p = DiffusionParams::default();
        RunConfig {
            k: p.k,
            nu0: p.nu0,
            a_con: w.a_con,
            a_vow: w.a_vow,
            w_con: w.w_con,
            w_vow: w.w_vow,
            mode: Mode::Directed,
            bins: 20,
            workers: None,
        }
    }
}

impl RunConfig {
    pub fn params(&self) -> DiffusionParams {
        DiffusionParams {
            k: self.k,
            nu0: self.nu0,
            edit_weights: EditWeights {
                a_con: self.a_con,
                a_vow: self.a_vow,
                w_con: self.w_con,
                w_vow: self.w_vow,
                ..EditWeights::default()
            },
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        self.params()
            .validate()
            .map_err(|e| Error::Config(e.to_string()))?;
        if self.bins == 0 {
            return Err(Error::Config("bins must be positive".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::Config("workers must be positive".into()));
        }
        Ok(())
    }

    /// Runs `f` on a pool sized by `workers`.
    fn install<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T, Error> {
        self.validate()?;
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = self.workers {
            builder = builder.num_threads(n);
        }
        let pool = builder
            .build()
            .map_err(|e| Error::Config(format!("cannot start workers: {e}")))?;
        Ok(pool.install(f))
    }
}

/// Replaces anything outside `[A-Za-z0-9_-]` so ids are safe in file names.
pub fn file_stem(id: &str) -> String {
    id.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Files rendered in memory and written together; a failed write removes
/// whatever was already written.
#[derive(Default)]
struct Outputs {
    files: Vec<(String, Vec<u8>)>,
}

impl Outputs {
    fn add(&mut self, name: impl Into<String>, bytes: Vec<u8>) {
        self.files.push((name.into(), bytes));
    }

    fn write(self, dir: &Path) -> Result<Vec<PathBuf>, Error> {
        let fail = |path: &Path, source| Error::Output {
            path: path.display().to_string(),
            source,
        };
        fs::create_dir_all(dir).map_err(|e| fail(dir, e))?;
        let mut written = Vec::new();
        for (name, bytes) in self.files {
            let path = dir.join(name);
            if let Err(e) = fs::write(&path, bytes) {
                for p in &written {
                    let _ = fs::remove_file(p);
                }
                let _ = fs::remove_file(&path);
                return Err(fail(&path, e));
            }
            written.push(path);
        }
        Ok(written)
    }
}

fn csv_bytes(
    header: &[String],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<Vec<u8>, Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let internal = |e: csv::Error| Error::Invariant(format!("csv encoding: {e}"));
    w.write_record(header).map_err(internal)?;
    for row in rows {
        w.write_record(&row).map_err(internal)?;
    }
    w.into_inner()
        .map_err(|e| Error::Invariant(format!("csv encoding: {e}")))
}

fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>, Error> {
    let mut bytes = serde_json::to_vec_pretty(value)
        .map_err(|e| Error::Invariant(format!("json encoding: {e}")))?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn fixed(v: f64) -> String {
    let s = format!("{v:.6}");
    // values that round to zero print without a sign
    match s.strip_prefix('-') {
        Some(rest) if rest.bytes().all(|b| b == b'0' || b == b'.') => rest.to_string(),
        _ => s,
    }
}

fn check_report(report: &ClassificationReport) -> Result<(), Error> {
    let concepts = report.per_concept.iter().flat_map(|c| &c.distributions);
    for (id, v) in concepts.chain(&report.aggregate) {
        if !v.is_on_simplex(SIMPLEX_TOLERANCE) {
            return Err(Error::Invariant(format!(
                "{id:?} left the simplex: {:?}",
                v.components()
            )));
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct AggregateEntry<'a> {
    role: Role,
    concepts: usize,
    distribution: &'a [f64],
}

#[derive(Serialize)]
struct AggregateDoc<'a> {
    clusters: &'a [String],
    config: &'a RunConfig,
    languages: BTreeMap<&'a str, AggregateEntry<'a>>,
    skipped: &'a [Skip],
}

fn aggregate_doc<'a>(
    config: &'a RunConfig,
    dataset: &'a Dataset,
    report: &'a ClassificationReport,
) -> AggregateDoc<'a> {
    let languages = report
        .aggregate
        .iter()
        .map(|(id, v)| {
            let role = dataset.language(id).map_or(Role::Classified, |l| l.role);
            let concepts = report
                .per_concept
                .iter()
                .filter(|c| c.distributions.contains_key(id))
                .count();
            (
                id.as_str(),
                AggregateEntry {
                    role,
                    concepts,
                    distribution: v.components(),
                },
            )
        })
        .collect();
    AggregateDoc {
        clusters: &report.clusters,
        config,
        languages,
        skipped: &report.skipped,
    }
}

fn per_concept_csv(report: &ClassificationReport) -> Result<Vec<u8>, Error> {
    let mut header = vec!["concept".to_string(), "language".to_string()];
    header.extend(report.clusters.iter().cloned());
    let rows = report.per_concept.iter().flat_map(|c| {
        c.distributions.iter().map(move |(id, v)| {
            let mut row = vec![c.concept.clone(), id.clone()];
            row.extend(v.components().iter().map(|&x| fixed(x)));
            row
        })
    });
    csv_bytes(&header, rows)
}

fn nmwd_csv(h: &NmwdHistogram) -> Result<Vec<u8>, Error> {
    let header = ["bin_lo", "bin_hi", "count", "normalizer"].map(String::from);
    let rows = h.counts.iter().enumerate().map(|(i, count)| {
        vec![
            fixed(h.bin_edges[i]),
            fixed(h.bin_edges[i + 1]),
            count.to_string(),
            fixed(h.normalizer),
        ]
    });
    csv_bytes(&header, rows)
}

fn pca_csv(p: &PcaProjection) -> Result<Vec<u8>, Error> {
    let mut header = vec!["language".to_string()];
    header.extend(
        ["x", "y", "z"]
            .iter()
            .take(p.components.len())
            .map(|s| s.to_string()),
    );
    let rows = p.languages.iter().zip(&p.coordinates).map(|(id, xs)| {
        let mut row = vec![id.clone()];
        row.extend(xs.iter().map(|&x| fixed(x)));
        row
    });
    csv_bytes(&header, rows)
}

fn classified_ids(dataset: &Dataset) -> Vec<String> {
    let mut ids: Vec<String> = dataset.classified().map(|l| l.id.clone()).collect();
    ids.sort();
    ids
}

fn project(report: &ClassificationReport, dims: usize) -> Result<PcaProjection, Error> {
    Ok(pca_project(report, dims)?)
}

/// Classifies every concept and writes `per_concept.csv`, `aggregate.json`,
/// one `nmwd_<language>.csv` per classified language and `pca.csv`.
pub fn run_classify(
    config: &RunConfig,
    dataset: &Dataset,
    out_dir: &Path,
) -> Result<Vec<PathBuf>, Error> {
    let params = config.params();
    let (report, histograms) = config.install(|| -> Result<_, Error> {
        let report = classify(dataset, &dataset.cluster_specs(), &params, config.mode)?;
        let histograms = classified_ids(dataset)
            .iter()
            .map(|id| nmwd(dataset, id, &params, config.bins))
            .collect::<Result<Vec<_>, _>>()?;
        Ok((report, histograms))
    })??;
    check_report(&report)?;

    let mut out = Outputs::default();
    out.add("per_concept.csv", per_concept_csv(&report)?);
    out.add(
        "aggregate.json",
        json_bytes(&aggregate_doc(config, dataset, &report))?,
    );
    for h in &histograms {
        out.add(format!("nmwd_{}.csv", file_stem(&h.language)), nmwd_csv(h)?);
    }
    // a projection needs more languages than dimensions; small runs get 2D or none
    if let Some(p) = [3, 2].iter().find_map(|&d| project(&report, d).ok()) {
        out.add("pca.csv", pca_csv(&p)?);
    }
    out.write(out_dir)
}

/// Writes `distances_<concept>.csv`: the translation-distance matrix of all
/// languages with a translation for that concept.
pub fn run_distances(
    config: &RunConfig,
    dataset: &Dataset,
    out_dir: &Path,
) -> Result<Vec<PathBuf>, Error> {
    let w = config.params().edit_weights;
    let mut out = Outputs::default();
    for concept in dataset.concepts() {
        let present: Vec<_> = dataset
            .languages()
            .iter()
            .filter_map(|l| dataset.translation(&l.id, concept).map(|t| (l, t)))
            .collect();
        let matrix = config.install(|| -> Result<Vec<Vec<f64>>, Error> {
            use rayon::prelude::*;
            present
                .par_iter()
                .enumerate()
                .map(|(i, (li, ti))| {
                    present
                        .iter()
                        .enumerate()
                        .map(|(j, (lj, tj))| {
                            if i == j {
                                return Ok(0.0);
                            }
                            let both_ref = li.role == Role::Reference && lj.role == Role::Reference;
                            let d = if both_ref {
                                translation_distance_ref(ti, tj, &w)
                            } else {
                                translation_distance_min(ti, tj, &w)
                            };
                            d.map_err(|e| Error::Pipeline(e.into()))
                        })
                        .collect()
                })
                .collect()
        })??;
        let mut header = vec!["language".to_string()];
        header.extend(present.iter().map(|(l, _)| l.id.clone()));
        let rows = present.iter().zip(&matrix).map(|((l, _), row)| {
            let mut r = vec![l.id.clone()];
            r.extend(row.iter().map(|&d| fixed(d)));
            r
        });
        out.add(
            format!("distances_{}.csv", file_stem(concept)),
            csv_bytes(&header, rows)?,
        );
    }
    out.write(out_dir)
}

/// Writes `nmwd_<language>.csv` for the given languages (all classified
/// languages when empty).
pub fn run_nmwd(
    config: &RunConfig,
    dataset: &Dataset,
    languages: &[String],
    out_dir: &Path,
) -> Result<Vec<PathBuf>, Error> {
    let ids = if languages.is_empty() {
        classified_ids(dataset)
    } else {
        languages.to_vec()
    };
    let params = config.params();
    let histograms = config.install(|| {
        ids.iter()
            .map(|id| nmwd(dataset, id, &params, config.bins))
            .collect::<Result<Vec<_>, _>>()
    })??;
    let mut out = Outputs::default();
    for h in &histograms {
        out.add(format!("nmwd_{}.csv", file_stem(&h.language)), nmwd_csv(h)?);
    }
    out.write(out_dir)
}

/// Classifies and writes the `dims`-dimensional projection to `pca.csv`.
pub fn run_pca(
    config: &RunConfig,
    dataset: &Dataset,
    dims: usize,
    out_dir: &Path,
) -> Result<Vec<PathBuf>, Error> {
    if !(1..=3).contains(&dims) {
        return Err(Error::Config(format!("dims must be 1, 2 or 3, got {dims}")));
    }
    let params = config.params();
    let report =
        config.install(|| classify(dataset, &dataset.cluster_specs(), &params, config.mode))??;
    check_report(&report)?;
    let mut out = Outputs::default();
    out.add("pca.csv", pca_csv(&project(&report, dims)?)?);
    out.write(out_dir)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrateOptions {
    /// `(language, target cluster)` pairs; empty means leave-one-out over
    /// every reference language with its own cluster as target.
    pub targets: Vec<(String, String)>,
    pub concepts: Option<Vec<String>>,
    pub k_values: Vec<f64>,
    pub search: SearchConfig,
}

impl Default for CalibrateOptions {
    fn default() -> Self {
        CalibrateOptions {
            targets: Vec::new(),
            concepts: None,
            k_values: vec![0.5, 0.6, 0.7, 0.8, 0.9, 1.0],
            search: SearchConfig::default(),
        }
    }
}

#[derive(Serialize)]
struct CalibrationDoc<'a> {
    config: &'a RunConfig,
    search: &'a SearchConfig,
    #[serde(flatten)]
    fit: &'a CalibrationFit,
}

/// Fits `(w_con, w_vow)` and writes every run plus the means to
/// `calibration.json`.
pub fn run_calibrate(
    config: &RunConfig,
    dataset: &Dataset,
    options: &CalibrateOptions,
    out_dir: &Path,
) -> Result<(CalibrationFit, Vec<PathBuf>), Error> {
    let targets: Vec<(String, String)> = if options.targets.is_empty() {
        dataset
            .references()
            .map(|l| {
                (
                    l.id.clone(),
                    l.cluster.clone().expect("references have clusters"),
                )
            })
            .collect()
    } else {
        options.targets.clone()
    };
    if targets.is_empty() {
        return Err(Error::Config("nothing to calibrate".into()));
    }
    let params = config.params();
    let fits = config.install(|| {
        targets
            .iter()
            .map(|(lang, cluster)| {
                let task = CalibrationTask::new(
                    dataset,
                    lang,
                    cluster,
                    options.concepts.as_deref(),
                    options.k_values.clone(),
                    &params,
                )?
                .with_mode(config.mode);
                fit_weights(&task, &options.search)
            })
            .collect::<Result<Vec<_>, _>>()
    })??;
    let fit = CalibrationFit::merge(fits).expect("at least one target");
    let mut out = Outputs::default();
    out.add(
        "calibration.json",
        json_bytes(&CalibrationDoc {
            config,
            search: &options.search,
            fit: &fit,
        })?,
    );
    let written = out.write(out_dir)?;
    Ok((fit, written))
}

/// Counts reported by `validate`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationSummary {
    pub concepts: usize,
    pub clusters: usize,
    pub references: usize,
    pub classified: usize,
    pub translations: usize,
    pub words: usize,
}

/// Loads and checks a dataset without running anything.
pub fn validate(path: &Path) -> Result<ValidationSummary, Error> {
    let d = load_dataset(path)?;
    let specs = d.cluster_specs();
    if let Some(empty) = specs.iter().find(|c| c.members.is_empty()) {
        return Err(Error::Pipeline(PipelineError::InvalidDataset(format!(
            "cluster {:?} has no reference languages",
            empty.name
        ))));
    }
    Ok(ValidationSummary {
        concepts: d.concepts().len(),
        clusters: d.clusters().len(),
        references: d.references().count(),
        classified: d.classified().count(),
        translations: d.translation_count(),
        words: d.translations().map(|t| t.words().len()).sum(),
    })
}
