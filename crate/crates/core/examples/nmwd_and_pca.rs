//! Normalized minimum word distances for the classified language, then a
//! two-dimensional PCA of the per-language distributions.

use std::path::Path;

use lexsim::cli::load_dataset;
use lexsim::diffusion::{DiffusionParams, Mode};
use lexsim::pipeline::{classify, nmwd, pca_project};

fn main() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/flower.json");
    let d = load_dataset(&path).unwrap();
    let params = DiffusionParams::default();

    let h = nmwd(&d, "sco", &params, 10).unwrap();
    println!("NMWD for sco (normalizer {:.2})", h.normalizer);
    for (concept, v) in &h.values {
        println!("  {concept}: {v:.3}");
    }
    for (i, count) in h.counts.iter().enumerate() {
        println!(
            "  [{:.3}, {:.3}) {}",
            h.bin_edges[i],
            h.bin_edges[i + 1],
            "#".repeat(*count)
        );
    }

    let report = classify(&d, &d.cluster_specs(), &params, Mode::Directed).unwrap();
    let p = pca_project(&report, 2).unwrap();
    println!("PCA eigenvalues {:.4?}", p.eigenvalues);
    for (lang, xy) in p.languages.iter().zip(&p.coordinates) {
        println!("  {lang:<4} {:>8.4} {:>8.4}", xy[0], xy[1]);
    }
}
