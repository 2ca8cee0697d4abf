//! Fits the consonant and vowel weights so that reference languages land in
//! their own cluster, leaving each one out in turn.

use std::path::Path;

use lexsim::calibration::{fit_weights, CalibrationFit, CalibrationTask, SearchConfig};
use lexsim::cli::load_dataset;
use lexsim::diffusion::DiffusionParams;

fn main() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/flower.json");
    let d = load_dataset(&path).unwrap();
    let params = DiffusionParams::default();
    let search = SearchConfig::default();

    let mut fits = Vec::new();
    for lang in d.references() {
        let cluster = lang.cluster.as_deref().unwrap();
        let task = CalibrationTask::new(&d, &lang.id, cluster, None, vec![0.6, 0.8, 1.0], &params)
            .unwrap();
        let fit = fit_weights(&task, &search).unwrap();
        println!(
            "{:<3} ({cluster}): w_con {:.3}, w_vow {:.3}",
            lang.id, fit.mean_w_con, fit.mean_w_vow
        );
        fits.push(fit);
    }
    let t = CalibrationFit::merge(fits).unwrap();
    println!(
        "mean over {} runs: w_con {:.3}, w_vow {:.3}",
        t.runs.len(),
        t.mean_w_con,
        t.mean_w_vow
    );
}
