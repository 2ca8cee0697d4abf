//! Runs the full classification on a dataset file and writes the same
//! reports as `lexsim classify`.
//!
//! ```text
//! cargo run --example classify_dataset -- data/flower.json out
//! ```

use std::path::PathBuf;

use lexsim::cli::{load_dataset, run_classify, RunConfig};

fn main() {
    let mut args = std::env::args().skip(1);
    let dataset = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/flower.json"));
    let out = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("lexsim-classify"));

    let d = match load_dataset(&dataset) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("{}: {e}", dataset.display());
            std::process::exit(1);
        }
    };
    let written = run_classify(&RunConfig::default(), &d, &out).unwrap_or_else(|e| {
        eprintln!("{e}");
        std::process::exit(e.exit_code());
    });
    for p in written {
        println!("{}", p.display());
    }
}
