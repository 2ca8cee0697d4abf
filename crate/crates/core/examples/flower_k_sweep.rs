//! Classifies Scots "flu:r" against Slavic, Romance and Germanic words for
//! "flower" while varying the intensity sharpness K.

use std::path::Path;

use lexsim::cli::load_dataset;
use lexsim::diffusion::{DiffusionParams, Mode};
use lexsim::pipeline::classify;

fn main() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/flower.json");
    let dataset = load_dataset(&path).expect("bundled dataset");
    println!("{:>5}  {}", "K", dataset.clusters().join("  "));
    for k in [0.4, 0.5, 0.6, 0.7, 0.8, 1.0, 3.0] {
        let params = DiffusionParams::default().with_k(k);
        let report = classify(&dataset, &dataset.cluster_specs(), &params, Mode::Directed).unwrap();
        let v = &report.aggregate["sco"];
        let cells: Vec<String> = v.components().iter().map(|x| format!("{x:.3}")).collect();
        println!("{k:>5}  {}", cells.join("   "));
    }
}
