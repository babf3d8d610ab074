//! Dickman perpetuity draws: `D = 1 + U_1 + U_1 U_2 + ...`.
//!
//! The mean should sit at 2 and the variance at 1/2; this samples a million
//! draws and reports both with standard errors.
//!
//! Run with: `cargo run --release --example dickman_sampler`

use quickval::experiments::run_dickman;
use quickval::stats::{mean_se, variance_and_se};

fn main() {
    let reps = 1_000_000;
    let samples = run_dickman(reps, 1e-12, 1).expect("dickman batch");
    let (mean, mean_se) = mean_se(&samples);
    let (var, var_se) = variance_and_se(&samples);
    let min = samples.iter().cloned().fold(f64::INFINITY, f64::min);

    println!("draws: {reps}");
    println!(
        "mean:     {mean:.6} +- {mean_se:.6}   (target 2, z = {:+.2})",
        (mean - 2.0) / mean_se
    );
    println!(
        "variance: {var:.6} +- {var_se:.6}   (target 0.5, z = {:+.2})",
        (var - 0.5) / var_se
    );
    println!("smallest draw: {min:.9} (every draw is >= 1)");
}
