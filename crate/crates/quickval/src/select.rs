//! Executable QuickSelect, QuickQuant, QuickMin, and QuickVal with per-pivot
//! cost ledgers, all driven by the same seed sequence.
//!
//! The pivot is always the first key of the current sublist and recursive
//! sublists preserve arrival order. Running the algorithms for every `n` and
//! every rank on one shared seed sequence is what couples them: QuickVal at
//! `alpha = 0` performs exactly the comparisons of QuickMin, pivot for pivot.

use serde::Serialize;

use crate::chain::PivotChain;
use crate::cost::CostModel;
use crate::error::{Error, Result};

/// Cost accounting for one run: the grand total, the per-pivot split
/// (`S_{k,n}` for QuickVal, per-recursion-level sums for QuickSelect), and
/// the raw comparison count.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CostLedger {
    pub total_cost: f64,
    pub per_pivot: Vec<f64>,
    pub comparisons: u64,
}

impl CostLedger {
    fn new() -> Self {
        CostLedger {
            total_cost: 0.0,
            per_pivot: Vec::new(),
            comparisons: 0,
        }
    }
}

/// Cost of QuickSelect for the `m`-th smallest of the given seeds (`m` is
/// 1-based). `K_{n,m}` under unit cost.
pub fn quickselect_cost(seeds: &[f64], m: usize, cost: &CostModel) -> Result<CostLedger> {
    if seeds.is_empty() {
        return Err(Error::Domain("quickselect needs at least one key".into()));
    }
    if m < 1 || m > seeds.len() {
        return Err(Error::Domain(format!(
            "rank m = {m} out of range 1..={}",
            seeds.len()
        )));
    }
    let mut ledger = CostLedger::new();
    let mut current: Vec<f64> = seeds.to_vec();
    let mut target = m;
    loop {
        let pivot = current[0];
        let mut smaller = Vec::new();
        let mut larger = Vec::new();
        let mut level_cost = 0.0;
        for &x in &current[1..] {
            level_cost += cost.beta(x, pivot)?;
            ledger.comparisons += 1;
            if x < pivot {
                smaller.push(x);
            } else {
                larger.push(x);
            }
        }
        ledger.per_pivot.push(level_cost);
        ledger.total_cost += level_cost;
        let rank = smaller.len() + 1;
        if rank == target {
            return Ok(ledger);
        }
        if target < rank {
            current = smaller;
        } else {
            current = larger;
            target -= rank;
        }
    }
}

/// QuickSelect for the minimum key.
pub fn quickmin_cost(seeds: &[f64], cost: &CostModel) -> Result<CostLedger> {
    quickselect_cost(seeds, 1, cost)
}

/// QuickSelect for the `m_n`-th order statistic; the entry point experiments
/// use when tracking a quantile `m_n / n -> alpha`.
pub fn quickquant_cost(seeds: &[f64], m_n: usize, cost: &CostModel) -> Result<CostLedger> {
    quickselect_cost(seeds, m_n, cost)
}

/// Cost of QuickVal searching for the population quantile `alpha` among the
/// given seeds, with the per-pivot totals `S_{k,n}`.
///
/// Implemented directly from the pivot-chain recursions rather than by tree
/// insertion, so the ledger is exact per pivot; the seed-tree route exists
/// separately as a cross-check.
pub fn quickval_cost(seeds: &[f64], alpha: f64, cost: &CostModel) -> Result<CostLedger> {
    quickval_cost_with_chain(seeds, alpha, cost).map(|(ledger, _)| ledger)
}

/// As [`quickval_cost`], also returning the pivot chain so the caller can
/// keep extending it (for instance toward the limit cost on the same
/// replication).
pub fn quickval_cost_with_chain(
    seeds: &[f64],
    alpha: f64,
    cost: &CostModel,
) -> Result<(CostLedger, PivotChain)> {
    if seeds.is_empty() {
        return Err(Error::Domain("quickval needs at least one key".into()));
    }
    let mut chain = PivotChain::new(alpha)?;
    let mut ledger = CostLedger::new();
    for (idx, &u) in seeds.iter().enumerate() {
        let i = idx + 1;
        // Compare U_i to every earlier pivot whose interval contains it.
        // Intervals are nested, so the first miss ends the walk.
        for (k, rec) in chain.records().iter().enumerate() {
            if !(rec.lo < u && u < rec.hi) {
                break;
            }
            debug_assert!(rec.tau.is_some_and(|tau| tau < i));
            let c = cost.beta(u, rec.pivot)?;
            ledger.per_pivot[k] += c;
            ledger.total_cost += c;
            ledger.comparisons += 1;
        }
        if chain.offer(i, u)?.is_some() {
            ledger.per_pivot.push(0.0);
        }
    }
    Ok((ledger, chain))
}

/// Running QuickVal totals `S_n` at each checkpoint of a sorted list of
/// sizes, on one pass over the seeds. Returns the totals (aligned with
/// `checkpoints`) and the chain over the full prefix.
pub fn quickval_totals_at(
    seeds: &[f64],
    alpha: f64,
    cost: &CostModel,
    checkpoints: &[usize],
) -> Result<(Vec<f64>, PivotChain)> {
    if checkpoints.is_empty() {
        return Err(Error::Domain("no checkpoints given".into()));
    }
    if checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain(
            "checkpoints must be strictly increasing".into(),
        ));
    }
    let n_max = *checkpoints.last().unwrap();
    if n_max > seeds.len() || checkpoints[0] == 0 {
        return Err(Error::Domain(format!(
            "checkpoints must lie in 1..={}",
            seeds.len()
        )));
    }
    let mut chain = PivotChain::new(alpha)?;
    let mut totals = Vec::with_capacity(checkpoints.len());
    let mut running = 0.0;
    let mut next_checkpoint = 0usize;
    for (idx, &u) in seeds.iter().enumerate().take(n_max) {
        let i = idx + 1;
        for rec in chain.records() {
            if !(rec.lo < u && u < rec.hi) {
                break;
            }
            running += cost.beta(u, rec.pivot)?;
        }
        chain.offer(i, u)?;
        if i == checkpoints[next_checkpoint] {
            totals.push(running);
            next_checkpoint += 1;
        }
    }
    Ok((totals, chain))
}
