use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distance::Translation;
use crate::ipa::{tokenize, IpaError, PhonemeInventory};
use crate::pipeline::{Dataset, Language, PipelineError, Role};

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed dataset: {0}")]
    Json(#[from] serde_json::Error),
    #[error("language {language:?}, concept {concept:?}, word {ipa:?}: {source}")]
    Phoneme {
        language: String,
        concept: String,
        ipa: String,
        source: Box<IpaError>,
    },
    #[error("language {language:?}, concept {concept:?}: no words given")]
    EmptyTranslation { language: String, concept: String },
    #[error(transparent)]
    Invalid(#[from] PipelineError),
}

/// On-disk form of a dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetFile {
    pub concepts: Vec<String>,
    pub clusters: Vec<String>,
    pub languages: Vec<LanguageEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LanguageEntry {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub role: Role,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cluster: Option<String>,
    #[serde(default)]
    pub translations: BTreeMap<String, Vec<WordEntry>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WordEntry {
    #[serde(default)]
    pub orthography: String,
    pub ipa: String,
}

impl DatasetFile {
    /// Validates the table and tokenizes every transcription.
    pub fn into_dataset(self, inventory: &PhonemeInventory) -> Result<Dataset, DatasetError> {
        let mut languages = Vec::with_capacity(self.languages.len());
        let mut translations = Vec::new();
        for entry in self.languages {
            for (concept, words) in &entry.translations {
                if words.is_empty() {
                    return Err(DatasetError::EmptyTranslation {
                        language: entry.id.clone(),
                        concept: concept.clone(),
                    });
                }
                let tokens = words
                    .iter()
                    .map(|w| {
                        tokenize(&w.ipa, inventory).map_err(|source| DatasetError::Phoneme {
                            language: entry.id.clone(),
                            concept: concept.clone(),
                            ipa: w.ipa.clone(),
                            source: Box::new(source),
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                translations.push(
                    Translation::new(entry.id.clone(), concept.clone(), tokens)
                        .expect("non-empty checked above"),
                );
            }
            languages.push(Language {
                id: entry.id,
                role: entry.role,
                cluster: entry.cluster,
            });
        }
        Ok(Dataset::new(
            self.concepts,
            self.clusters,
            languages,
            translations,
        )?)
    }
}

/// Parses a dataset document against the bundled inventory.
pub fn parse_dataset(text: &str) -> Result<Dataset, DatasetError> {
    let file: DatasetFile = serde_json::from_str(text)?;
    file.into_dataset(PhonemeInventory::bundled())
}

pub fn load_dataset(path: impl AsRef<Path>) -> Result<Dataset, DatasetError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| DatasetError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_dataset(&text)
}
