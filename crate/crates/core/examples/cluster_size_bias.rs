//! Romanian "coasă" against three clusters of very different size. The
//! directed graph divides each edge weight by the size of its cluster, so a
//! large cluster of near-identical words does not outvote a single close one.

use std::path::Path;

use lexsim::cli::load_dataset;
use lexsim::diffusion::{DiffusionParams, Mode};
use lexsim::pipeline::classify;

fn main() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/coasa.json");
    let dataset = load_dataset(&path).expect("bundled dataset");
    for spec in dataset.cluster_specs() {
        println!("{:<16} {} members", spec.name, spec.members.len());
    }
    for mode in [Mode::Directed, Mode::Undirected] {
        let report = classify(
            &dataset,
            &dataset.cluster_specs(),
            &DiffusionParams::default(),
            mode,
        )
        .unwrap();
        let v = &report.aggregate["ro"];
        let cells: Vec<String> = dataset
            .clusters()
            .iter()
            .zip(v.components())
            .map(|(c, x)| format!("{c} {x:.3}"))
            .collect();
        println!("{mode:?}: {}", cells.join(", "));
    }
}
