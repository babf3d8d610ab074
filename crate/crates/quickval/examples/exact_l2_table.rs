//! The exact second moment of the QuickMin residual, two ways.
//!
//! `a_n^2 = E (Y_n - Y)^2` has a closed form in harmonic numbers and an
//! independent divide-and-conquer recurrence route; this prints both, their
//! agreement, and the `n a_n^2 -> 3/2` asymptotics.
//!
//! Run with: `cargo run --release --example exact_l2_table`

use quickval::exact::{a_n_sq_exact_from, a_n_sq_via_recurrence, HarmonicTable};

fn main() {
    let n_max = 1 << 14;
    let table = HarmonicTable::new(n_max);
    let via = a_n_sq_via_recurrence(n_max).expect("recurrence self-check");

    println!(
        "{:>6} {:>22} {:>22} {:>12}",
        "n", "a_n^2 (closed form)", "a_n^2 (recurrence)", "n a_n^2"
    );
    for n in [0usize, 1, 2, 3, 4, 8, 16, 64, 256, 1024, 4096, n_max] {
        let exact = a_n_sq_exact_from(&table, n);
        println!(
            "{n:>6} {exact:>22.16} {:>22.16} {:>12.6}",
            via[n],
            n as f64 * exact
        );
    }

    let mut worst = (0usize, 0.0f64);
    for n in 1..=n_max {
        let exact = a_n_sq_exact_from(&table, n);
        let rel = (via[n] - exact).abs() / exact;
        if rel > worst.1 {
            worst = (n, rel);
        }
    }
    println!(
        "\nworst relative gap between the two routes: {:.3e} at n = {}",
        worst.1, worst.0
    );
    println!(
        "n a_n^2 at n = 10^4: {:.6} (limit 3/2)",
        1e4 * a_n_sq_exact_from(&table, 10_000)
    );
}
