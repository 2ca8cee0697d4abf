//! Stationary diffusion on the per-concept language graph.
//!
//! Every reference and classified language is a vertex; each cluster adds a
//! hypothetical boundary vertex pinned to a standard basis vector of
//! `R^c`. Solving the Dirichlet problem gives each language a similarity
//! distribution over the clusters.

mod graph;
mod solve;

pub use graph::{build_graph, DiffusionGraph, Edge, Mode, Vertex, VertexKind};
pub use solve::{max_mean_value_residual, max_residual, solve, Solution};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distance::{DistanceError, EditWeights};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiffusionError {
    #[error("invalid diffusion parameters: {0}")]
    InvalidParams(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("linear system is singular or ill-conditioned: {0}")]
    Singular(String),
    #[error(transparent)]
    Distance(#[from] DistanceError),
}

/// Diffusion intensity `1 / (1 + (e^{Kx} - 1)^2)`: 1 at zero, strictly
/// decreasing, with `g(x)/g(x+1) → e^{2K}`.
pub fn intensity(x: f64, k: f64) -> f64 {
    let t = (k * x).exp_m1();
    1.0 / (1.0 + t * t)
}

/// A named group of reference languages.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterSpec {
    pub name: String,
    pub members: Vec<String>,
}

impl ClusterSpec {
    pub fn new<S: Into<String>>(
        name: impl Into<String>,
        members: impl IntoIterator<Item = S>,
    ) -> Self {
        ClusterSpec {
            name: name.into(),
            members: members.into_iter().map(Into::into).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiffusionParams {
    /// Sharpness of the intensity function.
    pub k: f64,
    /// Mass assigned to hypothetical vertices when weighting edges into them.
    pub nu0: f64,
    pub edit_weights: EditWeights,
}

impl Default for DiffusionParams {
    fn default() -> Self {
        DiffusionParams {
            k: 0.6,
            nu0: 5.0,
            edit_weights: EditWeights::default(),
        }
    }
}

impl DiffusionParams {
    pub fn with_k(self, k: f64) -> Self {
        DiffusionParams { k, ..self }
    }

    pub fn validate(&self) -> Result<(), DiffusionError> {
        if !(self.k.is_finite() && self.k > 0.0) {
            return Err(DiffusionError::InvalidParams(format!(
                "K = {} must be positive",
                self.k
            )));
        }
        if !(self.nu0.is_finite() && self.nu0 > 0.0) {
            return Err(DiffusionError::InvalidParams(format!(
                "nu0 = {} must be positive",
                self.nu0
            )));
        }
        self.edit_weights.validate()?;
        Ok(())
    }
}

/// A point of the probability simplex in `R^c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SimilarityDistribution(Vec<f64>);

impl SimilarityDistribution {
    pub fn new(components: Vec<f64>) -> Self {
        SimilarityDistribution(components)
    }

    /// The `i`-th standard basis vector of `R^c`.
    pub fn basis(c: usize, i: usize) -> Self {
        let mut v = vec![0.0; c];
        v[i] = 1.0;
        SimilarityDistribution(v)
    }

    pub fn components(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Index of the largest component (first one on ties).
    pub fn argmax(&self) -> usize {
        self.0
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, &v)| {
                if v > best.1 {
                    (i, v)
                } else {
                    best
                }
            })
            .0
    }

    /// Components in `[-tol, 1 + tol]` and summing to `1 ± tol`.
    pub fn is_on_simplex(&self, tol: f64) -> bool {
        self.0.iter().all(|&v| v >= -tol && v <= 1.0 + tol) && (self.sum() - 1.0).abs() <= tol
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl std::ops::Index<usize> for SimilarityDistribution {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}
