use nalgebra::{DMatrix, SymmetricEigen};

use super::{ClassificationReport, PipelineError};

#[derive(Debug, Clone, PartialEq)]
pub struct PcaProjection {
    pub languages: Vec<String>,
    /// One row per language, `dims` columns.
    pub coordinates: Vec<Vec<f64>>,
    /// Leading eigenvalues of the covariance matrix, descending.
    pub eigenvalues: Vec<f64>,
    /// Unit principal axes; the first non-negligible entry of each is positive.
    pub components: Vec<Vec<f64>>,
}

/// Mean-centred projection of `rows` onto the top `dims` principal axes.
pub fn pca(
    labels: Vec<String>,
    rows: &[Vec<f64>],
    dims: usize,
) -> Result<PcaProjection, PipelineError> {
    let n = rows.len();
    if labels.len() != n {
        return Err(PipelineError::Pca("one label per row required".into()));
    }
    if dims == 0 || n < dims + 1 {
        return Err(PipelineError::Pca(format!(
            "{n} points cannot be projected onto {dims} dimensions"
        )));
    }
    let p = rows[0].len();
    if rows.iter().any(|r| r.len() != p) {
        return Err(PipelineError::Pca("rows differ in length".into()));
    }
    if dims > p {
        return Err(PipelineError::Pca(format!(
            "only {p} coordinates available"
        )));
    }

    let mut x = DMatrix::from_fn(n, p, |i, j| rows[i][j]);
    for j in 0..p {
        let mean = x.column(j).mean();
        x.column_mut(j).add_scalar_mut(-mean);
    }
    let cov = (x.transpose() * &x) / (n - 1) as f64;
    let eig = SymmetricEigen::new(cov);

    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .total_cmp(&eig.eigenvalues[a])
            .then(a.cmp(&b))
    });

    let mut components = Vec::with_capacity(dims);
    let mut eigenvalues = Vec::with_capacity(dims);
    for &k in &order[..dims] {
        let mut axis: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
        let scale = axis.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if let Some(first) = axis.iter().find(|v| v.abs() > 1e-9 * scale) {
            if *first < 0.0 {
                axis.iter_mut().for_each(|v| *v = -*v);
            }
        }
        components.push(axis);
        eigenvalues.push(eig.eigenvalues[k].max(0.0));
    }

    let coordinates = (0..n)
        .map(|i| {
            components
                .iter()
                .map(|axis| x.row(i).iter().zip(axis).map(|(a, b)| a * b).sum())
                .collect()
        })
        .collect();
    Ok(PcaProjection {
        languages: labels,
        coordinates,
        eigenvalues,
        components,
    })
}

/// Projects the languages solved in every concept, using their per-concept
/// distributions concatenated in concept order as coordinates.
pub fn pca_project(
    report: &ClassificationReport,
    dims: usize,
) -> Result<PcaProjection, PipelineError> {
    let Some(first) = report.per_concept.first() else {
        return Err(PipelineError::Pca("report has no concepts".into()));
    };
    let languages: Vec<String> = first
        .distributions
        .keys()
        .filter(|id| {
            report
                .per_concept
                .iter()
                .all(|c| c.distributions.contains_key(*id))
        })
        .cloned()
        .collect();
    let rows: Vec<Vec<f64>> = languages
        .iter()
        .map(|id| {
            report
                .per_concept
                .iter()
                .flat_map(|c| c.distributions[id].components().iter().copied())
                .collect()
        })
        .collect();
    pca(languages, &rows, dims)
}
