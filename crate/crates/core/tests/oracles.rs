//! Library results checked against independent reimplementations.

#![allow(clippy::needless_range_loop)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lexsim::calibration::{objective, simplified_solve, CalibrationTask, PinnedReference};
use lexsim::diffusion::{DiffusionParams, Mode};
use lexsim::distance::{word_distance, EditWeights, Translation};
use lexsim::ipa::{tokenize, PhonemeInventory};
use lexsim::pipeline::{pca, Dataset, Language};

/// Cyclic Jacobi rotations on a symmetric matrix; returns eigenvalues and
/// eigenvectors as columns of `v`.
fn jacobi(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| f64::from(i == j)).collect())
        .collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j].powi(2))
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let (vkp, vkq) = (row[p], row[q]);
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| a[i][i]).collect(), v)
}

#[test]
fn pca_matches_jacobi_eigendecomposition() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let rows: Vec<Vec<f64>> = (0..6)
            .map(|_| (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let labels = (0..6).map(|i| i.to_string()).collect();
        let got = pca(labels, &rows, 3).unwrap();

        let means: Vec<f64> = (0..8)
            .map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / 6.0)
            .collect();
        let centred: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| r.iter().zip(&means).map(|(x, m)| x - m).collect())
            .collect();
        let cov: Vec<Vec<f64>> = (0..8)
            .map(|i| {
                (0..8)
                    .map(|j| centred.iter().map(|r| r[i] * r[j]).sum::<f64>() / 5.0)
                    .collect()
            })
            .collect();
        let (values, vectors) = jacobi(cov);
        let mut order: Vec<usize> = (0..8).collect();
        order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));

        for (k, &col) in order.iter().take(3).enumerate() {
            assert!((got.eigenvalues[k] - values[col]).abs() < 1e-8);
            let proj: Vec<f64> = centred
                .iter()
                .map(|r| r.iter().enumerate().map(|(j, x)| x * vectors[j][col]).sum())
                .collect();
            let same = proj
                .iter()
                .zip(&got.coordinates)
                .all(|(a, b)| (a - b[k]).abs() < 1e-8);
            let flipped = proj
                .iter()
                .zip(&got.coordinates)
                .all(|(a, b)| (a + b[k]).abs() < 1e-8);
            assert!(same || flipped, "component {k}");
        }
    }
}

fn tr(lang: &str, concept: &str, ipa: &str) -> Translation {
    Translation::new(
        lang,
        concept,
        vec![tokenize(ipa, PhonemeInventory::bundled()).unwrap()],
    )
    .unwrap()
}

fn toy() -> Dataset {
    let words = [
        ("a1", "A", [("hand", "ruka"), ("water", "voda")]),
        ("a2", "A", [("hand", "ruke"), ("water", "vɔda")]),
        ("a3", "A", [("hand", "ræka"), ("water", "vodə")]),
        ("b1", "B", [("hand", "mano"), ("water", "aɡua")]),
        ("b2", "B", [("hand", "mɛ"), ("water", "o")]),
    ];
    let mut langs: Vec<Language> = words
        .iter()
        .map(|(id, c, _)| Language::reference(*id, *c))
        .collect();
    langs.push(Language::classified("x"));
    let mut ts: Vec<Translation> = words
        .iter()
        .flat_map(|(id, _, ws)| ws.iter().map(move |(c, w)| tr(id, c, w)))
        .collect();
    ts.push(tr("x", "hand", "roka"));
    ts.push(tr("x", "water", "vado"));
    Dataset::new(
        vec!["hand".into(), "water".into()],
        vec!["A".into(), "B".into()],
        langs,
        ts,
    )
    .unwrap()
}

/// The objective recomputed from word distances and the intensity formula.
fn objective_by_hand(d: &Dataset, w1: f64, w2: f64, k: f64) -> f64 {
    let weights = EditWeights::default().with_word_weights(w1, w2);
    let mut mean = [0.0; 2];
    let concepts = ["hand", "water"];
    for concept in concepts {
        let x = &d.translation("x", concept).unwrap().words()[0];
        let mut sums = [0.0; 2];
        let mut sizes = [0.0; 2];
        let mut terms = Vec::new();
        for l in d.references() {
            let ci = usize::from(l.cluster.as_deref() == Some("B"));
            let y = &d.translation(&l.id, concept).unwrap().words()[0];
            let lambda = word_distance(x, y, &weights).unwrap();
            let g = 1.0 / (1.0 + ((k * lambda).exp() - 1.0).powi(2));
            terms.push((ci, g));
            sizes[ci] += 1.0;
        }
        for (ci, g) in terms {
            sums[ci] += g / sizes[ci];
        }
        let total = sums[0] + sums[1];
        for c in 0..2 {
            mean[c] += sums[c] / total / concepts.len() as f64;
        }
    }
    ((mean[0] - 1.0).powi(2) + mean[1].powi(2)).sqrt()
}

#[test]
fn objective_on_a_grid_matches_direct_recomputation() {
    let d = toy();
    let task =
        CalibrationTask::new(&d, "x", "A", None, vec![0.6], &DiffusionParams::default()).unwrap();
    for i in 0..5 {
        for j in 0..5 {
            let (w1, w2) = (i as f64 / 4.0, j as f64 / 4.0);
            let got = objective(&task, w1, w2, 0.6).unwrap();
            let want = objective_by_hand(&d, w1, w2, 0.6);
            assert!((got - want).abs() < 1e-12, "({w1}, {w2}): {got} vs {want}");
        }
    }
}

#[test]
fn objective_ignores_concept_order() {
    let d = toy();
    let p = DiffusionParams::default();
    let fwd = CalibrationTask::new(
        &d,
        "x",
        "A",
        Some(&["hand".into(), "water".into()]),
        vec![0.6],
        &p,
    )
    .unwrap();
    let rev = CalibrationTask::new(
        &d,
        "x",
        "A",
        Some(&["water".into(), "hand".into()]),
        vec![0.6],
        &p,
    )
    .unwrap();
    for (w1, w2) in [(0.1, 0.9), (1.0, 0.7), (0.5, 0.5)] {
        assert_eq!(
            objective(&fwd, w1, w2, 0.6).unwrap(),
            objective(&rev, w1, w2, 0.6).unwrap()
        );
    }
}

#[test]
fn simplified_solve_is_a_convex_combination() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let c = rng.gen_range(1..=4);
        let refs: Vec<PinnedReference> = (0..rng.gen_range(1..10))
            .map(|_| PinnedReference {
                cluster: rng.gen_range(0..c),
                lambda: rng.gen_range(0.0..20.0),
            })
            .collect();
        let v = simplified_solve(&refs, c, 0.6, Mode::Directed).unwrap();
        assert!(v.is_on_simplex(1e-12));
    }
}

#[test]
fn grid_search_agrees_with_population_search() {
    use lexsim::calibration::{minimize_unit_square, SearchConfig};
    let f = |x: f64, y: f64| (x - 0.7).powi(2) + (y - 0.3).powi(2) + 0.5 * (x - 0.7) * (y - 0.3);
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for i in 0..=100 {
        for j in 0..=100 {
            let (x, y) = (i as f64 / 100.0, j as f64 / 100.0);
            if f(x, y) < best.0 {
                best = (f(x, y), x, y);
            }
        }
    }
    let r = minimize_unit_square(f, &SearchConfig::default()).unwrap();
    assert!(
        (r.point[0] - best.1).abs() < 0.05 && (r.point[1] - best.2).abs() < 0.05,
        "{r:?} vs {best:?}"
    );
}
