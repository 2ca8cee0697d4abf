use serde::Serialize;

use super::{Dataset, PipelineError, Role};
use crate::diffusion::DiffusionParams;
use crate::distance::word_distance;

/// Normalized minimal word distances of one classified language.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NmwdHistogram {
    pub language: String,
    /// `bins + 1` ascending edges.
    pub bin_edges: Vec<f64>,
    pub counts: Vec<usize>,
    /// Mean phoneme count of the language's words.
    pub normalizer: f64,
    /// `(concept, value)` in dataset concept order.
    pub values: Vec<(String, f64)>,
}

/// For each concept the closest pair between any of `classified`'s words and
/// any reference word, divided by the mean word length of `classified`.
/// Values are binned into `bins` equal bins over `[0, max]`.
pub fn nmwd(
    dataset: &Dataset,
    classified: &str,
    params: &DiffusionParams,
    bins: usize,
) -> Result<NmwdHistogram, PipelineError> {
    params.validate()?;
    match dataset.language(classified) {
        Some(l) if l.role == Role::Classified => {}
        Some(_) => {
            return Err(PipelineError::InvalidDataset(format!(
                "{classified:?} is a reference language"
            )))
        }
        None => return Err(PipelineError::UnknownLanguage(classified.to_string())),
    }
    if bins == 0 {
        return Err(PipelineError::InvalidDataset(
            "histogram needs at least one bin".into(),
        ));
    }

    let own: Vec<_> = dataset
        .concepts()
        .iter()
        .filter_map(|c| dataset.translation(classified, c))
        .collect();
    let words: Vec<_> = own.iter().flat_map(|t| t.words()).collect();
    let phonemes: usize = words.iter().map(|w| w.len()).sum();
    if phonemes == 0 {
        return Err(PipelineError::ZeroNormalizer(classified.to_string()));
    }
    let normalizer = phonemes as f64 / words.len() as f64;

    let w = &params.edit_weights;
    let mut values = Vec::new();
    for t in own {
        let mut best = f64::INFINITY;
        for r in dataset.references() {
            let Some(rt) = dataset.translation(&r.id, t.concept()) else {
                continue;
            };
            for x in t.words() {
                for y in rt.words() {
                    best = best.min(word_distance(x, y, w)?);
                }
            }
        }
        if best.is_finite() {
            values.push((t.concept().to_string(), best / normalizer));
        }
    }

    let max = values.iter().map(|(_, v)| *v).fold(0.0, f64::max);
    let width = if max > 0.0 {
        max / bins as f64
    } else {
        1.0 / bins as f64
    };
    let bin_edges = (0..=bins).map(|i| i as f64 * width).collect();
    let mut counts = vec![0; bins];
    for (_, v) in &values {
        let i = ((v / width) as usize).min(bins - 1);
        counts[i] += 1;
    }
    Ok(NmwdHistogram {
        language: classified.to_string(),
        bin_edges,
        counts,
        normalizer,
        values,
    })
}
