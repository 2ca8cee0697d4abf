//! Dataset-level classification, aggregation and post-processing.

mod nmwd;
mod pca;

pub use nmwd::{nmwd, NmwdHistogram};
pub use pca::{pca, pca_project, PcaProjection};

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diffusion::{
    build_graph, solve, ClusterSpec, DiffusionError, DiffusionParams, Mode, SimilarityDistribution,
};
use crate::distance::{DistanceError, Translation};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PipelineError {
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),
    #[error("unknown language {0:?}")]
    UnknownLanguage(String),
    #[error("no concept could be classified")]
    NoUsableConcepts,
    #[error("language {0:?} has no phonemes to normalize by")]
    ZeroNormalizer(String),
    #[error("cannot project: {0}")]
    Pca(String),
    #[error(transparent)]
    Diffusion(#[from] DiffusionError),
    #[error(transparent)]
    Distance(#[from] DistanceError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Reference,
    Classified,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Language {
    pub id: String,
    pub role: Role,
    pub cluster: Option<String>,
}

impl Language {
    pub fn reference(id: impl Into<String>, cluster: impl Into<String>) -> Self {
        Language {
            id: id.into(),
            role: Role::Reference,
            cluster: Some(cluster.into()),
        }
    }

    pub fn classified(id: impl Into<String>) -> Self {
        Language {
            id: id.into(),
            role: Role::Classified,
            cluster: None,
        }
    }
}

/// Concepts × languages table of translations. Entries may be missing.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    concepts: Vec<String>,
    clusters: Vec<String>,
    languages: Vec<Language>,
    translations: HashMap<(String, String), Translation>,
}

fn ensure_unique<'a>(
    what: &str,
    ids: impl IntoIterator<Item = &'a str>,
) -> Result<(), PipelineError> {
    let mut seen = BTreeSet::new();
    for id in ids {
        if !seen.insert(id) {
            return Err(PipelineError::InvalidDataset(format!(
                "duplicate {what} {id:?}"
            )));
        }
    }
    Ok(())
}

impl Dataset {
    pub fn new(
        concepts: Vec<String>,
        clusters: Vec<String>,
        languages: Vec<Language>,
        translations: Vec<Translation>,
    ) -> Result<Self, PipelineError> {
        ensure_unique("concept", concepts.iter().map(String::as_str))?;
        ensure_unique("cluster", clusters.iter().map(String::as_str))?;
        ensure_unique("language", languages.iter().map(|l| l.id.as_str()))?;
        for l in &languages {
            match (l.role, &l.cluster) {
                (Role::Reference, None) => {
                    return Err(PipelineError::InvalidDataset(format!(
                        "reference language {:?} has no cluster",
                        l.id
                    )))
                }
                (Role::Reference, Some(c)) if !clusters.contains(c) => {
                    return Err(PipelineError::InvalidDataset(format!(
                        "language {:?} names unknown cluster {c:?}",
                        l.id
                    )))
                }
                (Role::Classified, Some(c)) => {
                    return Err(PipelineError::InvalidDataset(format!(
                        "classified language {:?} is assigned cluster {c:?}",
                        l.id
                    )))
                }
                _ => {}
            }
        }
        let mut map = HashMap::with_capacity(translations.len());
        for t in translations {
            if !languages.iter().any(|l| l.id == t.language()) {
                return Err(PipelineError::UnknownLanguage(t.language().to_string()));
            }
            if !concepts.iter().any(|c| c == t.concept()) {
                return Err(PipelineError::InvalidDataset(format!(
                    "translation for unknown concept {:?}",
                    t.concept()
                )));
            }
            let key = (t.language().to_string(), t.concept().to_string());
            if map.insert(key, t).is_some() {
                return Err(PipelineError::InvalidDataset(
                    "duplicate translation".into(),
                ));
            }
        }
        Ok(Dataset {
            concepts,
            clusters,
            languages,
            translations: map,
        })
    }

    pub fn concepts(&self) -> &[String] {
        &self.concepts
    }

    pub fn clusters(&self) -> &[String] {
        &self.clusters
    }

    pub fn languages(&self) -> &[Language] {
        &self.languages
    }

    pub fn language(&self, id: &str) -> Option<&Language> {
        self.languages.iter().find(|l| l.id == id)
    }

    pub fn translation(&self, language: &str, concept: &str) -> Option<&Translation> {
        self.translations
            .get(&(language.to_string(), concept.to_string()))
    }

    /// All translations, by concept then language, in declaration order.
    pub fn translations(&self) -> impl Iterator<Item = &Translation> {
        self.concepts.iter().flat_map(move |c| {
            self.languages
                .iter()
                .filter_map(move |l| self.translation(&l.id, c))
        })
    }

    pub fn translation_count(&self) -> usize {
        self.translations.len()
    }

    pub fn references(&self) -> impl Iterator<Item = &Language> {
        self.languages.iter().filter(|l| l.role == Role::Reference)
    }

    pub fn classified(&self) -> impl Iterator<Item = &Language> {
        self.languages.iter().filter(|l| l.role == Role::Classified)
    }

    /// Clusters in declaration order with the reference languages assigned
    /// to them.
    pub fn cluster_specs(&self) -> Vec<ClusterSpec> {
        self.clusters
            .iter()
            .map(|name| {
                ClusterSpec::new(
                    name.clone(),
                    self.references()
                        .filter(|l| l.cluster.as_deref() == Some(name))
                        .map(|l| l.id.clone()),
                )
            })
            .collect()
    }
}

/// Something left out of a classification run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Skip {
    pub concept: String,
    /// `None` when the whole concept was skipped.
    pub language: Option<String>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConceptResult {
    pub concept: String,
    pub distributions: BTreeMap<String, SimilarityDistribution>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationReport {
    pub clusters: Vec<String>,
    /// Solved concepts in dataset order.
    pub per_concept: Vec<ConceptResult>,
    /// Mean distribution of every language over the concepts it took part in.
    pub aggregate: BTreeMap<String, SimilarityDistribution>,
    pub skipped: Vec<Skip>,
}

impl ClassificationReport {
    pub fn concept(&self, concept: &str) -> Option<&ConceptResult> {
        self.per_concept.iter().find(|c| c.concept == concept)
    }
}

enum ConceptOutcome {
    Solved(ConceptResult, Vec<Skip>),
    Skipped(Vec<Skip>),
}

fn classify_concept(
    dataset: &Dataset,
    concept: &str,
    clusters: &[ClusterSpec],
    classified: &[String],
    params: &DiffusionParams,
    mode: Mode,
) -> Result<ConceptOutcome, PipelineError> {
    let mut skips = Vec::new();
    let skip = |language: &str, reason: &str| Skip {
        concept: concept.to_string(),
        language: Some(language.to_string()),
        reason: reason.to_string(),
    };
    let mut translations = Vec::new();
    let mut present = Vec::with_capacity(clusters.len());
    for cluster in clusters {
        let mut members = Vec::new();
        for id in &cluster.members {
            match dataset.translation(id, concept) {
                Some(t) => {
                    translations.push(t);
                    members.push(id.clone());
                }
                None => skips.push(skip(id, "no translation")),
            }
        }
        if members.is_empty() {
            skips.push(Skip {
                concept: concept.to_string(),
                language: None,
                reason: format!("cluster {:?} has no translations", cluster.name),
            });
            return Ok(ConceptOutcome::Skipped(skips));
        }
        present.push(ClusterSpec::new(cluster.name.clone(), members));
    }
    let mut active = Vec::new();
    for id in classified {
        match dataset.translation(id, concept) {
            Some(t) => {
                translations.push(t);
                active.push(id.clone());
            }
            None => skips.push(skip(id, "no translation")),
        }
    }
    let graph = build_graph(&translations, &present, &active, params, mode)?;
    let solution = solve(&graph)?;
    let distributions = solution
        .languages()
        .map(|(id, v)| (id.to_string(), v.clone()))
        .collect();
    Ok(ConceptOutcome::Solved(
        ConceptResult {
            concept: concept.to_string(),
            distributions,
        },
        skips,
    ))
}

/// Classifies every concept independently and averages the results.
///
/// Reference languages are the members of `clusters`; every classified
/// language of the dataset is included. A member without a translation is
/// dropped for that concept, a cluster left empty skips the concept.
pub fn classify(
    dataset: &Dataset,
    clusters: &[ClusterSpec],
    params: &DiffusionParams,
    mode: Mode,
) -> Result<ClassificationReport, PipelineError> {
    params.validate()?;
    for id in clusters.iter().flat_map(|c| &c.members) {
        match dataset.language(id) {
            Some(l) if l.role == Role::Reference => {}
            Some(_) => {
                return Err(PipelineError::InvalidDataset(format!(
                    "{id:?} is classified and cannot be a cluster member"
                )))
            }
            None => return Err(PipelineError::UnknownLanguage(id.clone())),
        }
    }
    let mut classified: Vec<String> = dataset.classified().map(|l| l.id.clone()).collect();
    classified.sort();

    let outcomes = dataset
        .concepts
        .par_iter()
        .map(|concept| classify_concept(dataset, concept, clusters, &classified, params, mode))
        .collect::<Result<Vec<_>, _>>()?;

    let mut per_concept = Vec::new();
    let mut skipped = Vec::new();
    for outcome in outcomes {
        match outcome {
            ConceptOutcome::Solved(result, skips) => {
                per_concept.push(result);
                skipped.extend(skips);
            }
            ConceptOutcome::Skipped(skips) => skipped.extend(skips),
        }
    }
    if per_concept.is_empty() {
        return Err(PipelineError::NoUsableConcepts);
    }

    Ok(ClassificationReport {
        clusters: clusters.iter().map(|c| c.name.clone()).collect(),
        aggregate: aggregate(&per_concept, clusters.len()),
        per_concept,
        skipped,
    })
}

/// Mean per language, summed in concept-id order so the result does not
/// depend on the order concepts were listed in.
fn aggregate(per_concept: &[ConceptResult], c: usize) -> BTreeMap<String, SimilarityDistribution> {
    let mut sorted: Vec<&ConceptResult> = per_concept.iter().collect();
    sorted.sort_by(|a, b| a.concept.cmp(&b.concept));
    let mut sums: BTreeMap<&str, (Vec<f64>, usize)> = BTreeMap::new();
    for result in sorted {
        for (id, v) in &result.distributions {
            let (acc, count) = sums.entry(id).or_insert_with(|| (vec![0.0; c], 0));
            for (a, x) in acc.iter_mut().zip(v.components()) {
                *a += x;
            }
            *count += 1;
        }
    }
    sums.into_iter()
        .map(|(id, (acc, count))| {
            let mean = acc.into_iter().map(|s| s / count as f64).collect();
            (id.to_string(), SimilarityDistribution::new(mean))
        })
        .collect()
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::ipa::{tokenize, PhonemeInventory};

    pub(crate) fn tr(lang: &str, concept: &str, words: &[&str]) -> Translation {
        let inv = PhonemeInventory::bundled();
        Translation::new(
            lang,
            concept,
            words.iter().map(|w| tokenize(w, inv).unwrap()).collect(),
        )
        .unwrap()
    }

    pub(crate) fn toy() -> Dataset {
        let concepts = vec!["water".to_string(), "hand".to_string()];
        let clusters = vec!["A".to_string(), "B".to_string()];
        let languages = vec![
            Language::reference("a1", "A"),
            Language::reference("a2", "A"),
            Language::reference("b1", "B"),
            Language::reference("b2", "B"),
            Language::classified("x"),
        ];
        let translations = vec![
            tr("a1", "water", &["voda"]),
            tr("a2", "water", &["vɔda"]),
            tr("b1", "water", &["aɡua"]),
            tr("b2", "water", &["aʁwa"]),
            tr("x", "water", &["voda"]),
            tr("a1", "hand", &["ruka"]),
            tr("a2", "hand", &["ruke"]),
            tr("b1", "hand", &["mano"]),
            tr("b2", "hand", &["mɛ"]),
            tr("x", "hand", &["ruka", "dlaɲ"]),
        ];
        Dataset::new(concepts, clusters, languages, translations).unwrap()
    }

    #[test]
    fn copy_of_a_reference_lands_in_its_cluster() {
        let d = toy();
        let report = classify(
            &d,
            &d.cluster_specs(),
            &DiffusionParams::default(),
            Mode::Directed,
        )
        .unwrap();
        let x = &report.aggregate["x"];
        assert_eq!(x.argmax(), 0);
        assert!(x.is_on_simplex(1e-9));
        assert!(report.skipped.is_empty());
        assert_eq!(report.per_concept.len(), 2);
    }

    #[test]
    fn single_concept_aggregate_equals_concept_value() {
        let d = toy();
        let only_water = Dataset::new(
            vec!["water".into()],
            d.clusters().to_vec(),
            d.languages().to_vec(),
            d.translations()
                .filter(|t| t.concept() == "water")
                .cloned()
                .collect(),
        )
        .unwrap();
        let report = classify(
            &only_water,
            &only_water.cluster_specs(),
            &DiffusionParams::default(),
            Mode::Directed,
        )
        .unwrap();
        assert_eq!(
            report.aggregate["x"],
            report.per_concept[0].distributions["x"]
        );
    }

    #[test]
    fn missing_translations_are_logged() {
        let d = toy();
        let mut langs = d.languages().to_vec();
        langs.push(Language::classified("y"));
        let mut ts: Vec<Translation> = d
            .translations()
            .filter(|t| !(t.language() == "a2" && t.concept() == "hand"))
            .cloned()
            .collect();
        ts.push(tr("y", "water", &["wɔtə"]));
        let d2 = Dataset::new(d.concepts().to_vec(), d.clusters().to_vec(), langs, ts).unwrap();
        let r = classify(
            &d2,
            &d2.cluster_specs(),
            &DiffusionParams::default(),
            Mode::Directed,
        )
        .unwrap();
        assert_eq!(r.per_concept.len(), 2);
        assert!(r
            .skipped
            .iter()
            .any(|s| s.language.as_deref() == Some("a2") && s.concept == "hand"));
        assert!(r
            .skipped
            .iter()
            .any(|s| s.language.as_deref() == Some("y") && s.concept == "hand"));
        assert!(!r.concept("hand").unwrap().distributions.contains_key("a2"));
        assert!(r.aggregate.contains_key("y"));
    }

    #[test]
    fn empty_cluster_skips_concept() {
        let d = toy();
        let ts: Vec<Translation> = d
            .translations()
            .filter(|t| !(t.language().starts_with('b') && t.concept() == "hand"))
            .cloned()
            .collect();
        let d2 = Dataset::new(
            d.concepts().to_vec(),
            d.clusters().to_vec(),
            d.languages().to_vec(),
            ts,
        )
        .unwrap();
        let r = classify(
            &d2,
            &d2.cluster_specs(),
            &DiffusionParams::default(),
            Mode::Directed,
        )
        .unwrap();
        assert_eq!(r.per_concept.len(), 1);
        assert!(r
            .skipped
            .iter()
            .any(|s| s.concept == "hand" && s.language.is_none()));
    }

    #[test]
    fn dataset_validation() {
        let bad = Dataset::new(
            vec![],
            vec!["A".into()],
            vec![Language::reference("a", "Z")],
            vec![],
        );
        assert!(matches!(bad, Err(PipelineError::InvalidDataset(_))));
        let cls = Language {
            id: "x".into(),
            role: Role::Classified,
            cluster: Some("A".into()),
        };
        assert!(Dataset::new(vec![], vec!["A".into()], vec![cls], vec![]).is_err());
        let dup = vec![Language::classified("x"), Language::classified("x")];
        assert!(Dataset::new(vec![], vec![], dup, vec![]).is_err());
        let stray = Dataset::new(vec!["c".into()], vec![], vec![], vec![tr("q", "c", &["a"])]);
        assert_eq!(
            stray.unwrap_err(),
            PipelineError::UnknownLanguage("q".into())
        );
    }

    #[test]
    fn no_usable_concepts() {
        let d = Dataset::new(
            vec!["c".into()],
            vec!["A".into()],
            vec![Language::reference("a", "A")],
            vec![],
        )
        .unwrap();
        assert_eq!(
            classify(
                &d,
                &d.cluster_specs(),
                &DiffusionParams::default(),
                Mode::Directed
            )
            .unwrap_err(),
            PipelineError::NoUsableConcepts
        );
    }
}
