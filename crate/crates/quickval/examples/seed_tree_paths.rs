//! The seed tree behind the algorithms: quantile paths, per-node cost sums,
//! and the geometric decay of the conditional second moments by level.
//!
//! The path the tree assigns to a quantile carries exactly the pivot-chain
//! records built from the same seeds, and for a tame symbol cost the level
//! means of `I_{2,theta}` decay geometrically.
//!
//! Run with: `cargo run --release --example seed_tree_paths`

use quickval::chain::build_pivot_chain;
use quickval::cost::{estimate_tameness, CostModel};
use quickval::source::SourceSpec;
use quickval::stream::{SeedStream, SeedTape};
use quickval::tree::{node_sums, SeedTree};

fn main() {
    let n = 2048;
    let seeds: Vec<f64> = SeedStream::new(2026, 0).take(n).collect();
    let tree = SeedTree::build(&seeds).unwrap();
    let key = CostModel::key_comparisons();

    let alpha = 0.3;
    let path = tree.alpha_path(alpha);
    println!("alpha = {alpha}: path of {} nodes", path.len());
    let mut tape = SeedTape::from_seeds(seeds.clone()).unwrap();
    let chain = build_pivot_chain(&mut tape, alpha, path.len()).unwrap();
    for (addr, rec) in path.iter().take(6).zip(chain.records()) {
        let node = tree.node(addr).unwrap();
        let sums = node_sums(&tree, addr, &seeds, n, &key).unwrap();
        println!(
            "  node {:6} tau = {:>4} pivot = {:.6} (chain tau = {:?})  S_n = {:>6}  I_1 = {:.6}",
            format!("{addr:?}"),
            node.tau,
            node.pivot,
            rec.tau,
            sums.s_n,
            sums.i1.value,
        );
    }

    // level means of I_{2,theta} for a tame symbol cost vs the geometric bound
    let source = SourceSpec::memoryless(vec![0.5, 0.5]).unwrap();
    let cost = CostModel::symbol_comparisons(source).unwrap();
    let epsilon = 0.1;
    let c_hat = estimate_tameness(&cost, epsilon, 256).unwrap().c_hat;
    let front = 2f64.powf(2.0 * epsilon) * c_hat * c_hat / (1.0 - 2.0 * epsilon);
    let per_level = 1.0 / (2.0 - 2.0 * epsilon);
    println!("\nsymbol cost, declared (c, epsilon) = ({c_hat:.3}, {epsilon}):");
    println!(
        "{:>5} {:>8} {:>14} {:>14}",
        "level", "nodes", "mean I_2", "bound"
    );
    for level in 0..=6 {
        let values: Vec<f64> = tree
            .level(level)
            .map(|(addr, _)| tree.node_integral(addr, &cost, 2.0).unwrap().value)
            .collect();
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let bound = front * per_level.powi(level as i32);
        println!("{level:>5} {:>8} {mean:>14.6} {bound:>14.6}", values.len());
    }
}
