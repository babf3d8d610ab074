//! One run of each algorithm on a shared seed stream, with full ledgers.
//!
//! Shows the natural coupling at work: QuickVal at alpha = 0 reproduces
//! QuickMin pivot for pivot, and QuickQuant's per-pivot costs track
//! QuickVal's at the matching quantile.
//!
//! Run with: `cargo run --release --example single_runs`

use quickval::cost::CostModel;
use quickval::select::{quickmin_cost, quickquant_cost, quickselect_cost, quickval_cost};
use quickval::source::SourceSpec;
use quickval::stream::{SeedStream, SeedTape};

fn main() {
    let n = 24;
    let mut tape = SeedTape::from_stream(SeedStream::new(12345, 0));
    let seeds = tape.prefix(n).unwrap().to_vec();
    let key = CostModel::key_comparisons();
    let symbol =
        CostModel::symbol_comparisons(SourceSpec::memoryless(vec![0.5, 0.5]).unwrap()).unwrap();

    let quickmin = quickmin_cost(&seeds, &key).unwrap();
    let quickval0 = quickval_cost(&seeds, 0.0, &key).unwrap();
    println!(
        "quickmin      total {:>5}  per-pivot {:?}",
        quickmin.total_cost, quickmin.per_pivot
    );
    println!(
        "quickval(0)   total {:>5}  per-pivot {:?}",
        quickval0.total_cost, quickval0.per_pivot
    );
    println!("ledgers identical: {}\n", quickmin == quickval0);

    let m = n / 2;
    let alpha = 0.5;
    let quant = quickquant_cost(&seeds, m, &key).unwrap();
    let val = quickval_cost(&seeds, alpha, &key).unwrap();
    println!(
        "quickquant(m = {m})     total {:>5}  per-pivot {:?}",
        quant.total_cost, quant.per_pivot
    );
    println!(
        "quickval(alpha = {alpha}) total {:>5}  per-pivot {:?}\n",
        val.total_cost, val.per_pivot
    );

    let select = quickselect_cost(&seeds, 5, &key).unwrap();
    let select_sym = quickselect_cost(&seeds, 5, &symbol).unwrap();
    println!(
        "quickselect(m = 5), unit cost:   total {:>5} over {} comparisons",
        select.total_cost, select.comparisons
    );
    println!(
        "quickselect(m = 5), symbol cost: total {:>5} over {} comparisons",
        select_sym.total_cost, select_sym.comparisons
    );
}
