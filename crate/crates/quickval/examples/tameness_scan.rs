//! Empirical tameness constants `c_hat(epsilon) = max beta(u,t) (t-u)^epsilon`
//! over a pair grid, for unit cost and two symbol sources.
//!
//! Symbol-comparison cost is epsilon-tame for every epsilon > 0 on these
//! sources, so the scan should report finite constants that fall as epsilon
//! grows.
//!
//! Run with: `cargo run --release --example tameness_scan`

use quickval::cost::{estimate_tameness, CostModel};
use quickval::source::SourceSpec;

fn main() {
    let grid = 512;
    let models = [
        ("key comparisons".to_string(), CostModel::key_comparisons()),
        (
            "symbol, memoryless(1/2, 1/2)".to_string(),
            CostModel::symbol_comparisons(SourceSpec::memoryless(vec![0.5, 0.5]).unwrap()).unwrap(),
        ),
        (
            "symbol, markov".to_string(),
            CostModel::symbol_comparisons(
                SourceSpec::markov(vec![0.5, 0.5], vec![vec![0.8, 0.2], vec![0.3, 0.7]]).unwrap(),
            )
            .unwrap(),
        ),
    ];
    for (name, cost) in &models {
        println!("{name} (grid {grid}):");
        for epsilon in [0.0, 0.1, 0.25, 0.5] {
            let est = estimate_tameness(cost, epsilon, grid).expect("tameness scan");
            println!(
                "  epsilon = {epsilon:<4}  c_hat = {:>9.4}  at (u, t) = ({:.6}, {:.6})",
                est.c_hat, est.argmax.0, est.argmax.1
            );
        }
    }
}
