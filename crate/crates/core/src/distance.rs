//! Phonetically weighted Damerau-Levenshtein distance between transcriptions
//! and the synonym-aware distances between translations.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ipa::{substitution_weight, IpaError, Phoneme, Transcription};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DistanceError {
    #[error("sequence mixes consonants and vowels ({0:?} differs in kind)")]
    MixedKinds(String),
    #[error("translation of {concept:?} in {language:?} has no words")]
    EmptyTranslation { language: String, concept: String },
    #[error("invalid edit weights: {0}")]
    InvalidWeights(String),
    #[error(transparent)]
    Ipa(#[from] IpaError),
}

/// Costs of the elementary edits and of the consonant/vowel split.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EditWeights {
    pub insertion: f64,
    pub deletion: f64,
    pub transposition: f64,
    /// Scale applied to consonant feature distance to get a substitution cost.
    pub a_con: f64,
    /// Scale applied to vowel feature distance to get a substitution cost.
    pub a_vow: f64,
    pub w_con: f64,
    pub w_vow: f64,
}

impl Default for EditWeights {
    fn default() -> Self {
        EditWeights {
            insertion: 1.0,
            deletion: 1.0,
            transposition: 1.0,
            a_con: 0.3,
            a_vow: 0.3,
            w_con: 1.0,
            w_vow: 0.7,
        }
    }
}

impl EditWeights {
    pub fn with_word_weights(self, w_con: f64, w_vow: f64) -> Self {
        EditWeights {
            w_con,
            w_vow,
            ..self
        }
    }

    pub fn validate(&self) -> Result<(), DistanceError> {
        let all = [
            ("insertion", self.insertion),
            ("deletion", self.deletion),
            ("transposition", self.transposition),
            ("a_con", self.a_con),
            ("a_vow", self.a_vow),
            ("w_con", self.w_con),
            ("w_vow", self.w_vow),
        ];
        for (name, value) in all {
            if !(value.is_finite() && value >= 0.0) {
                return Err(DistanceError::InvalidWeights(format!(
                    "{name} = {value} must be finite and non-negative"
                )));
            }
        }
        for (name, value) in [("a_con", self.a_con), ("a_vow", self.a_vow)] {
            if value > 1.0 {
                return Err(DistanceError::InvalidWeights(format!(
                    "{name} = {value} must lie in [0, 1]"
                )));
            }
        }
        Ok(())
    }
}

/// Words a language uses for one concept.
#[derive(Debug, Clone, PartialEq)]
pub struct Translation {
    language: String,
    concept: String,
    words: Vec<Transcription>,
}

impl Translation {
    pub fn new(
        language: impl Into<String>,
        concept: impl Into<String>,
        words: Vec<Transcription>,
    ) -> Result<Self, DistanceError> {
        let language = language.into();
        let concept = concept.into();
        if words.is_empty() {
            return Err(DistanceError::EmptyTranslation { language, concept });
        }
        Ok(Translation {
            language,
            concept,
            words,
        })
    }

    pub fn language(&self) -> &str {
        &self.language
    }

    pub fn concept(&self) -> &str {
        &self.concept
    }

    pub fn words(&self) -> &[Transcription] {
        &self.words
    }
}

fn check_single_kind(a: &[Phoneme], b: &[Phoneme]) -> Result<(), DistanceError> {
    let mut all = a.iter().chain(b);
    if let Some(first) = all.next() {
        if let Some(odd) = all.find(|p| p.kind() != first.kind()) {
            return Err(DistanceError::MixedKinds(odd.symbol().to_string()));
        }
    }
    Ok(())
}

/// Optimal-string-alignment distance where substituting `x` by `y` costs
/// `substitution_weight(x, y)` and insertion, deletion and adjacent
/// transposition keep their own (unit by default) costs.
///
/// Both sequences must consist of a single phoneme kind.
pub fn weighted_dl(a: &[Phoneme], b: &[Phoneme], w: &EditWeights) -> Result<f64, DistanceError> {
    check_single_kind(a, b)?;
    let cols = b.len() + 1;
    let mut d = vec![0.0f64; (a.len() + 1) * cols];
    for j in 1..cols {
        d[j] = d[j - 1] + w.insertion;
    }
    for i in 1..=a.len() {
        d[i * cols] = d[(i - 1) * cols] + w.deletion;
        for j in 1..cols {
            let x = &a[i - 1];
            let y = &b[j - 1];
            let sub = if x.symbol() == y.symbol() {
                0.0
            } else {
                substitution_weight(x, y, w.a_con, w.a_vow)?
            };
            let mut best = (d[(i - 1) * cols + j] + w.deletion)
                .min(d[i * cols + j - 1] + w.insertion)
                .min(d[(i - 1) * cols + j - 1] + sub);
            if i > 1 && j > 1 && x.symbol() == b[j - 2].symbol() && a[i - 2].symbol() == y.symbol()
            {
                best = best.min(d[(i - 2) * cols + j - 2] + w.transposition);
            }
            d[i * cols + j] = best;
        }
    }
    Ok(d[a.len() * cols + b.len()])
}

/// The word distance `w_con·δ(consonants) + w_vow·δ(vowels)`.
pub fn word_distance(
    p: &Transcription,
    q: &Transcription,
    w: &EditWeights,
) -> Result<f64, DistanceError> {
    let (consonants, vowels) = substring_distances(p, q, w)?;
    Ok(combine(consonants, vowels, w))
}

/// `δ` of the consonant substrings and of the vowel substrings.
pub fn substring_distances(
    p: &Transcription,
    q: &Transcription,
    w: &EditWeights,
) -> Result<(f64, f64), DistanceError> {
    Ok((
        weighted_dl(p.consonants(), q.consonants(), w)?,
        weighted_dl(p.vowels(), q.vowels(), w)?,
    ))
}

pub(crate) fn combine(consonants: f64, vowels: f64, w: &EditWeights) -> f64 {
    w.w_con * consonants + w.w_vow * vowels
}

/// Distance between two reference-language translations: every word is
/// matched with its closest counterpart in the other translation and the
/// matches from both sides are averaged.
pub fn translation_distance_ref(
    p: &Translation,
    q: &Translation,
    w: &EditWeights,
) -> Result<f64, DistanceError> {
    let d = pairwise(p, q, w)?;
    let forward: f64 = d
        .iter()
        .map(|row| row.iter().copied().fold(f64::INFINITY, f64::min))
        .sum();
    let backward: f64 = (0..q.words.len())
        .map(|j| d.iter().map(|row| row[j]).fold(f64::INFINITY, f64::min))
        .sum();
    Ok((forward + backward) / (p.words.len() + q.words.len()) as f64)
}

/// Distance used whenever at most one side is a reference language: the
/// closest pair of words.
pub fn translation_distance_min(
    p: &Translation,
    q: &Translation,
    w: &EditWeights,
) -> Result<f64, DistanceError> {
    Ok(pairwise(p, q, w)?
        .into_iter()
        .flatten()
        .fold(f64::INFINITY, f64::min))
}

fn pairwise(
    p: &Translation,
    q: &Translation,
    w: &EditWeights,
) -> Result<Vec<Vec<f64>>, DistanceError> {
    w.validate()?;
    p.words
        .iter()
        .map(|x| q.words.iter().map(|y| word_distance(x, y, w)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ipa::{tokenize, PhonemeInventory};
    use proptest::prelude::*;

    fn tr(ipa: &str) -> Transcription {
        tokenize(ipa, PhonemeInventory::bundled()).unwrap()
    }

    fn translation(words: &[&str]) -> Translation {
        Translation::new("x", "c", words.iter().map(|w| tr(w)).collect()).unwrap()
    }

    fn w() -> EditWeights {
        EditWeights::default()
    }

    #[test]
    fn identical_sequences_are_zero() {
        let t = tr("kvjɛt");
        assert_eq!(
            weighted_dl(t.consonants(), t.consonants(), &w()).unwrap(),
            0.0
        );
        assert_eq!(word_distance(&t, &t, &w()).unwrap(), 0.0);
    }

    #[test]
    fn adjacent_swap_costs_one_transposition() {
        let a = tr("pt");
        let b = tr("tp");
        assert_eq!(
            weighted_dl(a.consonants(), b.consonants(), &w()).unwrap(),
            1.0
        );
    }

    #[test]
    fn single_substitution_uses_feature_weight() {
        let d = weighted_dl(tr("p").consonants(), tr("b").consonants(), &w()).unwrap();
        assert!((d - 0.3).abs() < 1e-15);
    }

    #[test]
    fn expensive_substitution_falls_back_to_delete_insert() {
        // m and r differ by 13, so substitution (3.9) loses to delete + insert
        let d = weighted_dl(tr("m").consonants(), tr("r").consonants(), &w()).unwrap();
        assert_eq!(d, 2.0);
    }

    #[test]
    fn mixed_kinds_are_rejected() {
        let t = tr("ka");
        assert!(matches!(
            weighted_dl(t.phonemes(), t.phonemes(), &w()),
            Err(DistanceError::MixedKinds(_))
        ));
    }

    #[test]
    fn deletion_only_word_distance() {
        let p = tr("blumə");
        let empty = tr("");
        let d = word_distance(&p, &empty, &w()).unwrap();
        assert!((d - (1.0 * 3.0 + 0.7 * 2.0)).abs() < 1e-12);
    }

    #[test]
    fn red_rod_coch_ordering() {
        let red = tr("ɹɛd");
        let rod = tr("ʁœð");
        for coch in ["koːx", "koːχ"] {
            let coch = tr(coch);
            let near = word_distance(&red, &rod, &w()).unwrap();
            let far = word_distance(&red, &coch, &w()).unwrap();
            assert!(near < far, "{near} vs {far}");
        }
    }

    #[test]
    fn reference_distance_examples() {
        let x = "kosa";
        let y = "flu:r";
        let d0 = word_distance(&tr(x), &tr(y), &w()).unwrap();
        assert_eq!(
            translation_distance_ref(&translation(&[x]), &translation(&[x]), &w()).unwrap(),
            0.0
        );
        let d = translation_distance_ref(&translation(&[x, y]), &translation(&[x]), &w()).unwrap();
        assert!((d - d0 / 3.0).abs() < 1e-12);
        let d = translation_distance_ref(&translation(&[x]), &translation(&[y]), &w()).unwrap();
        assert!((d - d0).abs() < 1e-12);
    }

    #[test]
    fn min_distance_examples() {
        let (x, y, z) = ("kosa", "kɔsɐ", "tɯɾpan");
        assert_eq!(
            translation_distance_min(&translation(&[x]), &translation(&[x, z]), &w()).unwrap(),
            0.0
        );
        let got =
            translation_distance_min(&translation(&[x, y]), &translation(&[z]), &w()).unwrap();
        let xz = word_distance(&tr(x), &tr(z), &w()).unwrap();
        let yz = word_distance(&tr(y), &tr(z), &w()).unwrap();
        assert_eq!(got, xz.min(yz));
    }

    #[test]
    fn hypothetical_language_is_at_zero_from_members() {
        let cluster = translation(&["kɔsɐ", "kosa", "kɐsa", "kɒsɒ"]);
        for member in ["kɔsɐ", "kɒsɒ"] {
            assert_eq!(
                translation_distance_min(&translation(&[member]), &cluster, &w()).unwrap(),
                0.0
            );
        }
    }

    #[test]
    fn empty_translation_is_rejected() {
        assert!(matches!(
            Translation::new("en", "flower", vec![]),
            Err(DistanceError::EmptyTranslation { .. })
        ));
    }

    #[test]
    fn invalid_weights_are_rejected() {
        let bad = EditWeights { a_con: 1.5, ..w() };
        assert!(
            translation_distance_min(&translation(&["a"]), &translation(&["a"]), &bad).is_err()
        );
        let bad = EditWeights {
            insertion: -1.0,
            ..w()
        };
        assert!(bad.validate().is_err());
    }

    const WORDS: &[&str] = &[
        "kvjɛt", "kvjat", "cvɪtok", "flɔ", "flœʁ", "fjore", "floɾ", "blum", "flaʊɹ", "blumə",
        "blɔmst", "blʊma", "flu:r", "koasə", "tɯɾpan", "", "a", "ts",
    ];

    proptest! {
        #[test]
        fn word_distance_is_symmetric_and_non_negative(i in 0..WORDS.len(), j in 0..WORDS.len()) {
            let (p, q) = (tr(WORDS[i]), tr(WORDS[j]));
            let pq = word_distance(&p, &q, &w()).unwrap();
            let qp = word_distance(&q, &p, &w()).unwrap();
            prop_assert!(pq >= 0.0);
            prop_assert_eq!(pq, qp);
        }

        #[test]
        fn translation_distances_are_symmetric(
            a in proptest::collection::vec(0..WORDS.len(), 1..4),
            b in proptest::collection::vec(0..WORDS.len(), 1..4),
        ) {
            let p = translation(&a.iter().map(|&i| WORDS[i]).collect::<Vec<_>>());
            let q = translation(&b.iter().map(|&i| WORDS[i]).collect::<Vec<_>>());
            prop_assert_eq!(translation_distance_ref(&p, &q, &w()).unwrap(), translation_distance_ref(&q, &p, &w()).unwrap());
            prop_assert_eq!(translation_distance_min(&p, &q, &w()).unwrap(), translation_distance_min(&q, &p, &w()).unwrap());
            prop_assert_eq!(translation_distance_ref(&p, &p, &w()).unwrap(), 0.0);
        }

        #[test]
        fn adding_a_synonym_never_increases_min_distance(
            a in proptest::collection::vec(0..WORDS.len(), 1..4),
            b in proptest::collection::vec(0..WORDS.len(), 1..4),
            extra in 0..WORDS.len(),
        ) {
            let p = translation(&a.iter().map(|&i| WORDS[i]).collect::<Vec<_>>());
            let mut qs: Vec<&str> = b.iter().map(|&i| WORDS[i]).collect();
            let before = translation_distance_min(&p, &translation(&qs), &w()).unwrap();
            qs.push(WORDS[extra]);
            let after = translation_distance_min(&p, &translation(&qs), &w()).unwrap();
            prop_assert!(after <= before);
        }
    }
}
