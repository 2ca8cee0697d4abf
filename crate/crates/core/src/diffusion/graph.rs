use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{intensity, ClusterSpec, DiffusionError, DiffusionParams};
use crate::distance::{translation_distance_min, translation_distance_ref, Translation};

/// Edge weighting scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Weights `g(λ)/ν(head)`, insensitive to cluster sizes.
    #[default]
    Directed,
    /// Symmetric weights `g(λ)` between references and unit boundary mass.
    Undirected,
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "directed" => Ok(Mode::Directed),
            "undirected" => Ok(Mode::Undirected),
            other => Err(format!(
                "unknown mode {other:?} (expected directed or undirected)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexKind {
    Reference { cluster: usize },
    Classified,
    Hypothetical { cluster: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Vertex {
    pub id: String,
    pub kind: VertexKind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub tail: usize,
    pub head: usize,
    /// Translation distance between the endpoints.
    pub lambda: f64,
    pub weight: f64,
}

/// Weighted directed graph for one concept.
///
/// Vertices are ordered: references (grouped by cluster, sorted by id),
/// classified languages (sorted by id), then one hypothetical vertex per
/// cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionGraph {
    clusters: Vec<String>,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    references: usize,
    classified: usize,
}

impl DiffusionGraph {
    /// Assembles a graph from precomputed translation distances.
    ///
    /// `references[i]` is `(id, cluster index)`; `reference_lambda[i][j]` is
    /// the distance on the edge `i → j` and `classified_lambda[l][j]` the
    /// distance from classified language `l` to reference `j`.
    pub fn from_distances(
        clusters: Vec<String>,
        references: Vec<(String, usize)>,
        classified: Vec<String>,
        reference_lambda: &[Vec<f64>],
        classified_lambda: &[Vec<f64>],
        params: &DiffusionParams,
        mode: Mode,
    ) -> Result<Self, DiffusionError> {
        params.validate()?;
        let n = references.len();
        let m = classified.len();
        let c = clusters.len();
        if c == 0 {
            return Err(DiffusionError::Config("no clusters".into()));
        }
        let mut sizes = vec![0usize; c];
        for (id, cluster) in &references {
            let slot = sizes.get_mut(*cluster).ok_or_else(|| {
                DiffusionError::Config(format!(
                    "{id:?} assigned to unknown cluster index {cluster}"
                ))
            })?;
            *slot += 1;
        }
        if let Some(empty) = sizes.iter().position(|&s| s == 0) {
            return Err(DiffusionError::Config(format!(
                "cluster {:?} is empty",
                clusters[empty]
            )));
        }
        let square = reference_lambda.len() == n && reference_lambda.iter().all(|r| r.len() == n);
        let rect = classified_lambda.len() == m && classified_lambda.iter().all(|r| r.len() == n);
        if !(square && rect) {
            return Err(DiffusionError::Config(
                "distance matrix shape mismatch".into(),
            ));
        }
        let all_lambdas = reference_lambda.iter().chain(classified_lambda).flatten();
        if let Some(bad) = all_lambdas.copied().find(|l| !(l.is_finite() && *l >= 0.0)) {
            return Err(DiffusionError::Config(format!("invalid distance {bad}")));
        }

        let (head_mass, boundary_mass) = match mode {
            Mode::Directed => (
                sizes.iter().map(|&s| s as f64).collect::<Vec<_>>(),
                params.nu0,
            ),
            Mode::Undirected => (vec![1.0; c], 1.0),
        };
        let k = params.k;
        let edge = |tail, head, lambda: f64, mass: f64| Edge {
            tail,
            head,
            lambda,
            weight: intensity(lambda, k) / mass,
        };

        let mut edges = Vec::with_capacity(n * n + m * n);
        for (i, (_, ci)) in references.iter().enumerate() {
            for (j, (_, cj)) in references.iter().enumerate() {
                if i != j {
                    edges.push(edge(i, j, reference_lambda[i][j], head_mass[*cj]));
                }
            }
            edges.push(edge(i, n + m + ci, 0.0, boundary_mass));
        }
        for (l, row) in classified_lambda.iter().enumerate() {
            for (j, (_, cj)) in references.iter().enumerate() {
                edges.push(edge(n + l, j, row[j], head_mass[*cj]));
            }
        }

        let vertices = references
            .into_iter()
            .map(|(id, cluster)| Vertex {
                id,
                kind: VertexKind::Reference { cluster },
            })
            .chain(classified.into_iter().map(|id| Vertex {
                id,
                kind: VertexKind::Classified,
            }))
            .chain(clusters.iter().enumerate().map(|(cluster, name)| Vertex {
                id: name.clone(),
                kind: VertexKind::Hypothetical { cluster },
            }))
            .collect();

        Ok(DiffusionGraph {
            clusters,
            vertices,
            edges,
            references: n,
            classified: m,
        })
    }

    pub fn clusters(&self) -> &[String] {
        &self.clusters
    }

    pub fn cluster_count(&self) -> usize {
        self.clusters.len()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn reference_count(&self) -> usize {
        self.references
    }

    pub fn classified_count(&self) -> usize {
        self.classified
    }

    /// Number of vertices whose value is unknown (references and classified).
    pub fn interior_count(&self) -> usize {
        self.references + self.classified
    }

    pub fn out_edges(&self, vertex: usize) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.tail == vertex)
    }

    pub fn out_degree(&self, vertex: usize) -> usize {
        self.out_edges(vertex).count()
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices
            .iter()
            .position(|v| v.id == id && !matches!(v.kind, VertexKind::Hypothetical { .. }))
    }
}

/// Builds the graph of one concept from its translations.
///
/// Reference–reference edges use the mean-of-minima translation distance,
/// classified→reference edges the closest-pair distance and
/// reference→hypothetical edges distance 0. Every language with a
/// translation must be a cluster member or listed in `classified`, and
/// every cluster member needs a translation.
pub fn build_graph(
    translations: &[&Translation],
    clusters: &[ClusterSpec],
    classified: &[String],
    params: &DiffusionParams,
    mode: Mode,
) -> Result<DiffusionGraph, DiffusionError> {
    params.validate()?;
    let mut by_language: BTreeMap<&str, &Translation> = BTreeMap::new();
    for t in translations {
        if by_language.insert(t.language(), t).is_some() {
            return Err(DiffusionError::Config(format!(
                "two translations for {:?}",
                t.language()
            )));
        }
    }

    let mut membership: BTreeMap<&str, usize> = BTreeMap::new();
    let mut references = Vec::new();
    for (ci, cluster) in clusters.iter().enumerate() {
        if cluster.members.is_empty() {
            return Err(DiffusionError::Config(format!(
                "cluster {:?} is empty",
                cluster.name
            )));
        }
        let mut members: Vec<&str> = cluster.members.iter().map(String::as_str).collect();
        members.sort_unstable();
        for id in members {
            if let Some(prev) = membership.insert(id, ci) {
                return Err(DiffusionError::Config(format!(
                    "{id:?} belongs to both {:?} and {:?}",
                    clusters[prev].name, cluster.name
                )));
            }
            let t = by_language.get(id).ok_or_else(|| {
                DiffusionError::Config(format!("reference language {id:?} has no translation"))
            })?;
            references.push((id, ci, *t));
        }
    }

    let classified: BTreeSet<&str> = classified.iter().map(String::as_str).collect();
    let mut classified_translations = Vec::new();
    for id in &classified {
        if membership.contains_key(id) {
            return Err(DiffusionError::Config(format!(
                "{id:?} is both classified and a cluster member"
            )));
        }
        let t = by_language.get(id).ok_or_else(|| {
            DiffusionError::Config(format!("classified language {id:?} has no translation"))
        })?;
        classified_translations.push((*id, *t));
    }
    if let Some(stray) = by_language
        .keys()
        .find(|id| !membership.contains_key(*id) && !classified.contains(*id))
    {
        return Err(DiffusionError::Config(format!(
            "{stray:?} is neither in a cluster nor classified"
        )));
    }

    let w = &params.edit_weights;
    let n = references.len();
    let mut reference_lambda = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let d = translation_distance_ref(references[i].2, references[j].2, w)?;
            reference_lambda[i][j] = d;
            reference_lambda[j][i] = d;
        }
    }
    let classified_lambda = classified_translations
        .iter()
        .map(|(_, t)| {
            references
                .iter()
                .map(|(_, _, r)| translation_distance_min(t, r, w))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;

    DiffusionGraph::from_distances(
        clusters.iter().map(|c| c.name.clone()).collect(),
        references
            .iter()
            .map(|(id, ci, _)| (id.to_string(), *ci))
            .collect(),
        classified_translations
            .iter()
            .map(|(id, _)| id.to_string())
            .collect(),
        &reference_lambda,
        &classified_lambda,
        params,
        mode,
    )
}
