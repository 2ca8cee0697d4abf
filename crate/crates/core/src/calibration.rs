//! Fitting the word-distance weights `(w_con, w_vow)` with a simplified
//! model in which every reference language is pinned to its cluster.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::diffusion::{intensity, DiffusionError, DiffusionParams, Mode, SimilarityDistribution};
use crate::distance::{combine, substring_distances, DistanceError, EditWeights};
use crate::pipeline::Dataset;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CalibrationError {
    #[error("no reference languages to pin")]
    NoReferences,
    #[error("invalid calibration task: {0}")]
    InvalidTask(String),
    #[error("invalid search configuration: {0}")]
    InvalidSearch(String),
    #[error(transparent)]
    Diffusion(#[from] DiffusionError),
    #[error(transparent)]
    Distance(#[from] DistanceError),
}

/// A reference vertex fixed to its cluster's basis vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PinnedReference {
    pub cluster: usize,
    /// Distance from the classified language.
    pub lambda: f64,
}

/// Value of a classified vertex whose out-neighbours are all pinned: the
/// weighted mean of their basis vectors. Directed weights divide by the
/// number of pinned references in the head's cluster.
pub fn simplified_solve(
    references: &[PinnedReference],
    clusters: usize,
    k: f64,
    mode: Mode,
) -> Result<SimilarityDistribution, CalibrationError> {
    if references.is_empty() {
        return Err(CalibrationError::NoReferences);
    }
    let mut sizes = vec![0usize; clusters];
    for r in references {
        *sizes.get_mut(r.cluster).ok_or_else(|| {
            CalibrationError::InvalidTask(format!("cluster index {} out of range", r.cluster))
        })? += 1;
    }
    let mut acc = vec![0.0; clusters];
    for r in references {
        let mass = match mode {
            Mode::Directed => sizes[r.cluster] as f64,
            Mode::Undirected => 1.0,
        };
        acc[r.cluster] += intensity(r.lambda, k) / mass;
    }
    let total: f64 = acc.iter().sum();
    Ok(SimilarityDistribution::new(
        acc.into_iter().map(|a| a / total).collect(),
    ))
}

/// Per-concept substring distances between one classified language and the
/// reference languages, precomputed so the objective only recombines them.
/// A pinned reference's cluster and the `(δ_con, δ_vow)` of every word pair
/// it forms with the classified language.
type PinnedPairs = (usize, Vec<(f64, f64)>);

#[derive(Debug, Clone)]
pub struct CalibrationTask {
    classified: String,
    clusters: Vec<String>,
    target: usize,
    k_values: Vec<f64>,
    mode: Mode,
    base: EditWeights,
    concepts: Vec<(String, Vec<PinnedPairs>)>,
}

impl CalibrationTask {
    /// `classified` may be a reference language, in which case it is left
    /// out of the pinned set (leave-one-out). `concepts` defaults to all.
    pub fn new(
        dataset: &Dataset,
        classified: &str,
        target_cluster: &str,
        concepts: Option<&[String]>,
        k_values: Vec<f64>,
        params: &DiffusionParams,
    ) -> Result<Self, CalibrationError> {
        params.validate()?;
        if dataset.language(classified).is_none() {
            return Err(CalibrationError::InvalidTask(format!(
                "unknown language {classified:?}"
            )));
        }
        let clusters = dataset.clusters().to_vec();
        let target = clusters
            .iter()
            .position(|c| c == target_cluster)
            .ok_or_else(|| {
                CalibrationError::InvalidTask(format!("unknown cluster {target_cluster:?}"))
            })?;
        if k_values.is_empty() || k_values.iter().any(|k| !(k.is_finite() && *k > 0.0)) {
            return Err(CalibrationError::InvalidTask(
                "K values must be positive".into(),
            ));
        }
        let selected: Vec<String> = match concepts {
            Some(list) => {
                if let Some(bad) = list.iter().find(|c| !dataset.concepts().contains(c)) {
                    return Err(CalibrationError::InvalidTask(format!(
                        "unknown concept {bad:?}"
                    )));
                }
                list.to_vec()
            }
            None => dataset.concepts().to_vec(),
        };

        let w = &params.edit_weights;
        let mut prepared = Vec::new();
        for concept in selected {
            let Some(own) = dataset.translation(classified, &concept) else {
                continue;
            };
            let mut refs = Vec::new();
            for r in dataset.references().filter(|r| r.id != classified) {
                let Some(t) = dataset.translation(&r.id, &concept) else {
                    continue;
                };
                let cluster = clusters
                    .iter()
                    .position(|c| Some(c) == r.cluster.as_ref())
                    .expect("dataset validated cluster names");
                let mut pairs = Vec::new();
                for x in own.words() {
                    for y in t.words() {
                        pairs.push(substring_distances(x, y, w)?);
                    }
                }
                refs.push((cluster, pairs));
            }
            if !refs.is_empty() {
                prepared.push((concept, refs));
            }
        }
        // a fixed summation order keeps the objective independent of how
        // concepts were listed
        prepared.sort_by(|a, b| a.0.cmp(&b.0));
        if prepared.is_empty() {
            return Err(CalibrationError::InvalidTask(format!(
                "{classified:?} shares no concept with any reference language"
            )));
        }
        Ok(CalibrationTask {
            classified: classified.to_string(),
            clusters,
            target,
            k_values,
            mode: Mode::Directed,
            base: *w,
            concepts: prepared,
        })
    }

    pub fn with_mode(self, mode: Mode) -> Self {
        CalibrationTask { mode, ..self }
    }

    pub fn classified(&self) -> &str {
        &self.classified
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn cluster_names(&self) -> &[String] {
        &self.clusters
    }

    pub fn k_values(&self) -> &[f64] {
        &self.k_values
    }

    pub fn concept_count(&self) -> usize {
        self.concepts.len()
    }

    /// Simplified-model distribution of every concept at the given weights.
    pub fn distributions(
        &self,
        w1: f64,
        w2: f64,
        k: f64,
    ) -> Result<Vec<SimilarityDistribution>, CalibrationError> {
        let weights = self.base.with_word_weights(w1, w2);
        self.concepts
            .iter()
            .map(|(_, refs)| {
                let pinned: Vec<PinnedReference> = refs
                    .iter()
                    .map(|(cluster, pairs)| PinnedReference {
                        cluster: *cluster,
                        lambda: pairs
                            .iter()
                            .map(|&(c, v)| combine(c, v, &weights))
                            .fold(f64::INFINITY, f64::min),
                    })
                    .collect();
                simplified_solve(&pinned, self.clusters.len(), k, self.mode)
            })
            .collect()
    }
}

/// `‖mean_i Φ_i(w1, w2) − ι_target‖₂` over the task's concepts.
pub fn objective(
    task: &CalibrationTask,
    w1: f64,
    w2: f64,
    k: f64,
) -> Result<f64, CalibrationError> {
    let dists = task.distributions(w1, w2, k)?;
    let n = dists.len() as f64;
    let c = task.clusters.len();
    let mut mean = vec![0.0; c];
    for d in &dists {
        for (m, x) in mean.iter_mut().zip(d.components()) {
            *m += x / n;
        }
    }
    mean[task.target] -= 1.0;
    Ok(mean.iter().map(|x| x * x).sum::<f64>().sqrt())
}

/// Population search settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SearchConfig {
    pub population: usize,
    pub iterations: usize,
    pub seed: u64,
    /// How far past the leader a member travels (multiples of the gap).
    pub path_length: f64,
    pub step: f64,
    /// Probability that a coordinate takes part in a move.
    pub prt: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            population: 30,
            iterations: 5,
            seed: 0,
            path_length: 3.0,
            step: 0.11,
            prt: 0.3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SearchResult {
    pub point: [f64; 2],
    pub value: f64,
    pub evaluations: usize,
}

fn member_rng(seed: u64, iteration: usize, member: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((iteration as u64) << 32) | member as u64);
    rng
}

/// Minimizes `f` over `[0,1]²`: every member walks towards the current
/// leader along a randomly masked direction, keeping the best point seen
/// on its path. Deterministic for a given seed and independent of the
/// thread count.
pub fn minimize_unit_square<F>(f: F, cfg: &SearchConfig) -> Result<SearchResult, CalibrationError>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    if cfg.population < 2 {
        return Err(CalibrationError::InvalidSearch(
            "population must be at least 2".into(),
        ));
    }
    if !(cfg.step > 0.0 && cfg.path_length >= cfg.step && (0.0..=1.0).contains(&cfg.prt)) {
        return Err(CalibrationError::InvalidSearch(
            "bad step, path length or PRT".into(),
        ));
    }
    let eval = |p: [f64; 2]| {
        let v = f(p[0], p[1]);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut init = ChaCha8Rng::seed_from_u64(cfg.seed);
    let points: Vec<[f64; 2]> = (0..cfg.population)
        .map(|_| [init.gen(), init.gen()])
        .collect();
    let mut members: Vec<([f64; 2], f64)> = points.par_iter().map(|&p| (p, eval(p))).collect();
    let mut evaluations = cfg.population;
    let steps = (cfg.path_length / cfg.step + 1e-9).floor() as usize;

    for iteration in 0..cfg.iterations {
        let leader = (0..members.len())
            .min_by(|&a, &b| members[a].1.total_cmp(&members[b].1))
            .expect("population is non-empty");
        let target = members[leader].0;
        members = members
            .par_iter()
            .enumerate()
            .map(|(i, &(start, value))| {
                if i == leader {
                    return (start, value);
                }
                let mut rng = member_rng(cfg.seed, iteration, i);
                let mut best = (start, value);
                for s in 1..=steps {
                    let t = s as f64 * cfg.step;
                    let mut mask = [rng.gen::<f64>() < cfg.prt, rng.gen::<f64>() < cfg.prt];
                    if !mask[0] && !mask[1] {
                        mask[rng.gen_range(0..2)] = true;
                    }
                    let mut p = start;
                    for d in 0..2 {
                        if mask[d] {
                            p[d] = (start[d] + (target[d] - start[d]) * t).clamp(0.0, 1.0);
                        }
                    }
                    let v = eval(p);
                    if v < best.1 {
                        best = (p, v);
                    }
                }
                best
            })
            .collect();
        evaluations += (cfg.population - 1) * steps;
    }

    let (point, value) = members
        .into_iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("population is non-empty");
    Ok(SearchResult {
        point,
        value,
        evaluations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationRun {
    pub language: String,
    pub k: f64,
    pub w_con: f64,
    pub w_vow: f64,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationFit {
    pub runs: Vec<CalibrationRun>,
    pub mean_w_con: f64,
    pub mean_w_vow: f64,
}

impl CalibrationFit {
    /// Pools the runs of several fits and recomputes the means.
    pub fn merge(fits: impl IntoIterator<Item = CalibrationFit>) -> Option<CalibrationFit> {
        let runs: Vec<CalibrationRun> = fits.into_iter().flat_map(|f| f.runs).collect();
        if runs.is_empty() {
            return None;
        }
        let n = runs.len() as f64;
        Some(CalibrationFit {
            mean_w_con: runs.iter().map(|r| r.w_con).sum::<f64>() / n,
            mean_w_vow: runs.iter().map(|r| r.w_vow).sum::<f64>() / n,
            runs,
        })
    }
}

/// One search per K value; the fitted weights are the run averages.
pub fn fit_weights(
    task: &CalibrationTask,
    cfg: &SearchConfig,
) -> Result<CalibrationFit, CalibrationError> {
    let mut runs = Vec::with_capacity(task.k_values.len());
    for (i, &k) in task.k_values.iter().enumerate() {
        // errors cannot occur once the task is built; map them to +inf anyway
        let f = |w1: f64, w2: f64| objective(task, w1, w2, k).unwrap_or(f64::INFINITY);
        let run_cfg = SearchConfig {
            seed: cfg.seed.wrapping_add(i as u64),
            ..*cfg
        };
        let best = minimize_unit_square(f, &run_cfg)?;
        runs.push(CalibrationRun {
            language: task.classified.clone(),
            k,
            w_con: best.point[0],
            w_vow: best.point[1],
            objective: best.value,
        });
    }
    Ok(CalibrationFit::merge([CalibrationFit {
        runs,
        mean_w_con: 0.0,
        mean_w_vow: 0.0,
    }])
    .expect("at least one K value"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::{Dataset, Language};

    fn pin(cluster: usize, lambda: f64) -> PinnedReference {
        PinnedReference { cluster, lambda }
    }

    #[test]
    fn two_references_one_apart() {
        let d = simplified_solve(&[pin(0, 0.0), pin(1, 1.0)], 2, 0.6, Mode::Directed).unwrap();
        let g1 = intensity(1.0, 0.6);
        assert!((d[0] - 1.0 / (1.0 + g1)).abs() < 1e-15);
        assert!((d[0] - 0.6263).abs() < 5e-5 && (d[1] - 0.3737).abs() < 5e-5);
    }

    #[test]
    fn equal_distances() {
        let refs = [pin(0, 2.0), pin(1, 2.0), pin(1, 2.0), pin(1, 2.0)];
        let u = simplified_solve(&refs, 2, 0.6, Mode::Undirected).unwrap();
        assert!((u[0] - 0.25).abs() < 1e-15 && (u[1] - 0.75).abs() < 1e-15);
        let d = simplified_solve(&refs, 2, 0.6, Mode::Directed).unwrap();
        assert!((d[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn far_references_vanish() {
        let refs = [pin(0, 50.0), pin(1, 0.0), pin(2, 50.0)];
        let d = simplified_solve(&refs, 3, 0.6, Mode::Directed).unwrap();
        assert!((d[1] - 1.0).abs() < 1e-12);
        assert!(d.is_on_simplex(1e-12));
    }

    #[test]
    fn no_references() {
        assert_eq!(
            simplified_solve(&[], 2, 0.6, Mode::Directed),
            Err(CalibrationError::NoReferences)
        );
    }

    #[test]
    fn quadratic_minimum_is_found() {
        let f = |x: f64, y: f64| (x - 0.7).powi(2) + 2.0 * (y - 0.3).powi(2);
        let r = minimize_unit_square(f, &SearchConfig::default()).unwrap();
        assert!(
            (r.point[0] - 0.7).abs() < 0.05 && (r.point[1] - 0.3).abs() < 0.05,
            "{r:?}"
        );
    }

    #[test]
    fn never_worse_than_initial_population() {
        let f = |x: f64, y: f64| (x * 9.0).sin() + (y * 7.0).cos();
        let cfg = SearchConfig {
            iterations: 0,
            ..Default::default()
        };
        let start = minimize_unit_square(f, &cfg).unwrap();
        let end = minimize_unit_square(f, &SearchConfig::default()).unwrap();
        assert!(end.value <= start.value);
    }

    #[test]
    fn constant_objective() {
        let r = minimize_unit_square(|_, _| 0.5, &SearchConfig::default()).unwrap();
        assert_eq!(r.value, 0.5);
        assert!(r.point.iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn search_is_reproducible() {
        let f = |x: f64, y: f64| (x - 0.2).abs() + (y - 0.9).powi(2);
        let cfg = SearchConfig {
            seed: 42,
            ..Default::default()
        };
        assert_eq!(
            minimize_unit_square(f, &cfg).unwrap(),
            minimize_unit_square(f, &cfg).unwrap()
        );
        assert!(minimize_unit_square(
            f,
            &SearchConfig {
                population: 1,
                ..cfg
            }
        )
        .is_err());
    }

    fn toy() -> Dataset {
        crate::pipeline::tests::toy()
    }

    #[test]
    fn objective_bounds_and_leave_one_out() {
        let d = toy();
        let task =
            CalibrationTask::new(&d, "a1", "A", None, vec![0.6], &DiffusionParams::default())
                .unwrap();
        assert_eq!(task.concept_count(), 2);
        for (w1, w2) in [(0.0, 0.0), (1.0, 0.7), (0.3, 1.0)] {
            let v = objective(&task, w1, w2, 0.6).unwrap();
            assert!((0.0..=2f64.sqrt()).contains(&v));
        }
        // a copy of a1 with everything else far away
        let mut langs = d.languages().to_vec();
        langs.push(Language::classified("copy"));
        let mut ts: Vec<_> = d.translations().cloned().collect();
        ts.push(crate::pipeline::tests::tr("copy", "water", &["voda"]));
        let d2 = Dataset::new(d.concepts().to_vec(), d.clusters().to_vec(), langs, ts).unwrap();
        let t2 = CalibrationTask::new(
            &d2,
            "copy",
            "A",
            None,
            vec![3.0],
            &DiffusionParams::default(),
        )
        .unwrap();
        assert!(objective(&t2, 1.0, 0.7, 3.0).unwrap() < 0.05);
    }

    #[test]
    fn fit_reports_every_k() {
        let d = toy();
        let task = CalibrationTask::new(
            &d,
            "x",
            "A",
            None,
            vec![0.5, 0.6],
            &DiffusionParams::default(),
        )
        .unwrap();
        let cfg = SearchConfig {
            population: 6,
            iterations: 2,
            ..Default::default()
        };
        let fit = fit_weights(&task, &cfg).unwrap();
        assert_eq!(fit.runs.len(), 2);
        let mean = (fit.runs[0].w_con + fit.runs[1].w_con) / 2.0;
        assert_eq!(fit.mean_w_con, mean);
        assert_eq!(fit, fit_weights(&task, &cfg).unwrap());
    }

    #[test]
    fn task_validation() {
        let d = toy();
        let p = DiffusionParams::default();
        assert!(CalibrationTask::new(&d, "nope", "A", None, vec![0.6], &p).is_err());
        assert!(CalibrationTask::new(&d, "x", "Z", None, vec![0.6], &p).is_err());
        assert!(CalibrationTask::new(&d, "x", "A", None, vec![], &p).is_err());
        assert!(
            CalibrationTask::new(&d, "x", "A", Some(&["fire".to_string()]), vec![0.6], &p).is_err()
        );
    }
}
