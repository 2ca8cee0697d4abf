//! Builds a diffusion graph directly from distance matrices and inspects the
//! linear solve: edge weights, the solution and its residuals.

use lexsim::diffusion::{
    max_mean_value_residual, max_residual, solve, DiffusionGraph, DiffusionParams, Mode,
};

fn main() {
    let clusters = vec!["A".to_string(), "B".to_string()];
    let references = vec![
        ("a1".to_string(), 0),
        ("a2".to_string(), 0),
        ("b1".to_string(), 1),
    ];
    let classified = vec!["x".to_string()];
    let reference_lambda = vec![
        vec![0.0, 0.4, 2.0],
        vec![0.4, 0.0, 1.8],
        vec![2.0, 1.8, 0.0],
    ];
    let classified_lambda = vec![vec![0.5, 0.7, 1.2]];

    for mode in [Mode::Directed, Mode::Undirected] {
        let g = DiffusionGraph::from_distances(
            clusters.clone(),
            references.clone(),
            classified.clone(),
            &reference_lambda,
            &classified_lambda,
            &DiffusionParams::default(),
            mode,
        )
        .unwrap();
        println!(
            "{mode:?}: {} vertices, {} edges",
            g.vertices().len(),
            g.edges().len()
        );
        for e in g.edges().iter().filter(|e| g.vertices()[e.tail].id == "x") {
            println!(
                "  x -> {:<4} lambda {:.2} weight {:.4}",
                g.vertices()[e.head].id,
                e.lambda,
                e.weight
            );
        }
        let s = solve(&g).unwrap();
        for id in ["a1", "a2", "b1", "x"] {
            println!("  {id}: {:.4?}", s.get(id).unwrap().components());
        }
        println!(
            "  residual {:.1e}, mean-value residual {:.1e}",
            max_residual(&g, &s),
            max_mean_value_residual(&g, &s)
        );
    }
}
