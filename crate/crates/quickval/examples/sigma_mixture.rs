//! The mixing scale `sigma_infinity^2` of the residual limit law.
//!
//! Three views: a deterministic midpoint-pivot chain where the value is
//! exactly 2, the algebraic identity between the general double sum and the
//! unit-cost interval-length form, and the Monte Carlo mean over random
//! chains (which sits at 3/2 for QuickMin under unit cost).
//!
//! Run with: `cargo run --release --example sigma_mixture`

use quickval::chain::{NoExtension, PivotChain};
use quickval::cost::CostModel;
use quickval::experiments::run_sigma_samples;
use quickval::limits::{sigma_sq, sigma_sq_unit_cost_from_lengths, SigmaTruncation};
use quickval::stats::mean_se;
use quickval::stream::{SeedStream, SeedTape};

fn main() {
    let key = CostModel::key_comparisons();

    // deterministic chain: pivot at the midpoint of every interval
    let mut chain = PivotChain::new(0.0).unwrap();
    let midpoints: Vec<f64> = (0..120).map(|j| 2.0_f64.powi(-(j + 1))).collect();
    let mut tape = SeedTape::from_seeds(midpoints).unwrap();
    for _ in 0..120 {
        chain.extend_scanning(&mut tape).unwrap();
    }
    let sample = sigma_sq(
        &mut chain,
        &mut NoExtension,
        &key,
        SigmaTruncation::RowTol(1e-12),
    )
    .expect("deterministic chain");
    println!(
        "midpoint chain: sigma^2 = {:.12} (exact value 2), K = {}",
        sample.sigma_sq, sample.k_used
    );

    // the unit-cost shortcut agrees with the general double sum on any chain
    let mut stream = SeedStream::new(42, 0);
    let mut random_chain = PivotChain::new(0.3).unwrap();
    for _ in 0..40 {
        random_chain.extend_direct(&mut stream).unwrap();
    }
    let general = sigma_sq(
        &mut random_chain,
        &mut NoExtension,
        &key,
        SigmaTruncation::FixedK(40),
    )
    .unwrap()
    .sigma_sq;
    let lengths = sigma_sq_unit_cost_from_lengths(&random_chain, 40);
    println!("two routes on one random chain (alpha = 0.3): {general:.12} vs {lengths:.12}");

    // Monte Carlo mean of the random scale for QuickMin
    let reps = 100_000;
    let samples = run_sigma_samples(0.0, &key, reps, 1e-9, 7).expect("sigma batch");
    let (mean, se) = mean_se(&samples);
    println!(
        "E sigma^2 over {reps} draws (alpha = 0): {mean:.5} +- {se:.5} (target 1.5, z = {:+.2})",
        (mean - 1.5) / se
    );
}
