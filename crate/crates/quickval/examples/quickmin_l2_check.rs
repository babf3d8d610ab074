//! Monte Carlo check of the exact QuickMin residual second moment.
//!
//! Each replication couples the finite-n cost `K_n` with the limit `S` on
//! the same seed stream, so `((K_n - mu_n)/(n+1) - (S - 2))^2` estimates
//! `a_n^2` directly; the estimate is compared with the closed form.
//!
//! Run with: `cargo run --release --example quickmin_l2_check`

use quickval::experiments::run_quickmin_l2;

fn main() {
    println!(
        "{:>5} {:>12} {:>12} {:>10} {:>8} {:>12}",
        "n", "estimate", "exact", "std err", "|z|", "med tail"
    );
    for n in [1usize, 8, 64, 256] {
        let res = run_quickmin_l2(n, 100_000, 3, 1e-9).expect("quickmin l2");
        println!(
            "{n:>5} {:>12.6} {:>12.6} {:>10.6} {:>8.2} {:>12.2e}",
            res.estimate, res.exact, res.std_error, res.abs_error_in_se, res.median_tail_bound
        );
    }
}
