use nalgebra::DMatrix;

use super::{DiffusionError, DiffusionGraph, SimilarityDistribution, VertexKind};

/// Stationary values for every vertex of a graph, in vertex order.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    ids: Vec<String>,
    values: Vec<SimilarityDistribution>,
    interior: usize,
}

impl Solution {
    /// Value of a reference or classified language.
    pub fn get(&self, id: &str) -> Option<&SimilarityDistribution> {
        self.ids[..self.interior]
            .iter()
            .position(|v| v == id)
            .map(|i| &self.values[i])
    }

    /// Values of all vertices, hypothetical ones included.
    pub fn values(&self) -> &[SimilarityDistribution] {
        &self.values
    }

    /// `(id, value)` for the reference and classified vertices.
    pub fn languages(&self) -> impl Iterator<Item = (&str, &SimilarityDistribution)> {
        self.ids[..self.interior]
            .iter()
            .map(String::as_str)
            .zip(&self.values)
    }
}

/// Solves the Dirichlet problem: every non-boundary vertex satisfies
/// `Σ_out w (φ_v - φ_head) = 0`, boundary vertices are fixed to their
/// cluster's basis vector. One LU factorization serves all `c` components.
pub fn solve(graph: &DiffusionGraph) -> Result<Solution, DiffusionError> {
    let n = graph.interior_count();
    let c = graph.cluster_count();
    let mut a = DMatrix::<f64>::zeros(n, n);
    let mut b = DMatrix::<f64>::zeros(n, c);
    for e in graph.edges() {
        a[(e.tail, e.tail)] += e.weight;
        match graph.vertices()[e.head].kind {
            VertexKind::Hypothetical { cluster } => b[(e.tail, cluster)] += e.weight,
            _ => a[(e.tail, e.head)] -= e.weight,
        }
    }
    if let Some(v) = (0..n).find(|&v| a[(v, v)] <= 0.0) {
        return Err(DiffusionError::Singular(format!(
            "vertex {:?} has no outgoing weight",
            graph.vertices()[v].id
        )));
    }
    let x = a
        .lu()
        .solve(&b)
        .ok_or_else(|| DiffusionError::Singular("LU factorization failed".into()))?;
    if x.iter().any(|v| !v.is_finite()) {
        return Err(DiffusionError::Singular("non-finite solution".into()));
    }

    let values = (0..n)
        .map(|i| SimilarityDistribution::new(x.row(i).iter().copied().collect()))
        .chain((0..c).map(|k| SimilarityDistribution::basis(c, k)))
        .collect();
    Ok(Solution {
        ids: graph.vertices().iter().map(|v| v.id.clone()).collect(),
        values,
        interior: n,
    })
}

fn weighted_rows(graph: &DiffusionGraph, solution: &Solution) -> Vec<(f64, Vec<f64>)> {
    let c = graph.cluster_count();
    let mut rows = vec![(0.0, vec![0.0; c]); graph.interior_count()];
    for e in graph.edges() {
        let (total, acc) = &mut rows[e.tail];
        *total += e.weight;
        for (slot, v) in acc.iter_mut().zip(solution.values[e.head].components()) {
            *slot += e.weight * v;
        }
    }
    rows
}

/// Largest `|Σ_out w (φ_v - φ_head)|` over vertices and components.
pub fn max_residual(graph: &DiffusionGraph, solution: &Solution) -> f64 {
    weighted_rows(graph, solution)
        .iter()
        .enumerate()
        .flat_map(|(v, (total, acc))| {
            let own = solution.values[v].components();
            acc.iter().zip(own).map(move |(s, x)| (total * x - s).abs())
        })
        .fold(0.0, f64::max)
}

/// Largest gap between a vertex value and the weighted mean of its
/// out-neighbours.
pub fn max_mean_value_residual(graph: &DiffusionGraph, solution: &Solution) -> f64 {
    weighted_rows(graph, solution)
        .iter()
        .enumerate()
        .flat_map(|(v, (total, acc))| {
            let own = solution.values[v].components();
            acc.iter().zip(own).map(move |(s, x)| (x - s / total).abs())
        })
        .fold(0.0, f64::max)
}
