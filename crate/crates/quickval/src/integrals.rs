//! Exact per-pivot cost integrals.
//!
//! For a fixed comparison partner `v`, the symbol cost `beta(u, v)` is a step
//! function of `u` whose level sets are differences of the nested cylinders
//! around `v` (the seeds whose keys share a given prefix with `M(v)`). That
//! makes integrals of `beta^q` exact sums over cylinder masses:
//!
//! `beta^q(u, v) = sum_j [(j+1)^q - j^q] 1{u in C_j(v)}`, with `C_0 = (0,1)`.
//!
//! Cylinder masses shrink at least geometrically (factor = the source's
//! largest conditional symbol probability), so the sums converge fast and
//! every truncation carries a computable tail majorant.

use serde::Serialize;

use crate::chain::PivotRecord;
use crate::cost::{CostKind, CostModel};
use crate::error::{Error, Result};

/// Absolute cylinder-mass cutoff below which integral tails are truncated.
pub const CYLINDER_MASS_TOL: f64 = 1e-12;

const MAX_MAJORANT_TERMS: usize = 20_000;

/// An integral value together with its truncation bookkeeping.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct IntegralResult {
    pub value: f64,
    pub truncation_error_bound: f64,
    pub terms_used: usize,
}

impl IntegralResult {
    fn exact(value: f64) -> Self {
        IntegralResult {
            value,
            truncation_error_bound: 0.0,
            terms_used: 1,
        }
    }
}

fn overlap(a_lo: f64, a_hi: f64, b_lo: f64, b_hi: f64) -> f64 {
    (a_hi.min(b_hi) - a_lo.max(b_lo)).max(0.0)
}

fn check_interval(lo: f64, hi: f64) -> Result<()> {
    if lo < hi {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "integration interval ({lo}, {hi}) is empty"
        )))
    }
}

/// Tail majorant for `sum_{i>=1} [w(j0+i)] m gamma^i` where `w(j) =
/// (j+1)^q - j^q` and `m` bounds the current cylinder mass. Every deeper
/// cylinder mass is at most `m gamma^i`, so this dominates the dropped tail.
fn tail_majorant(j0: usize, m: f64, gamma: f64, q: f64) -> Result<f64> {
    if m == 0.0 {
        return Ok(0.0);
    }
    let mut sum = 0.0;
    let mut g = 1.0;
    for i in 1..=MAX_MAJORANT_TERMS {
        g *= gamma;
        let j = (j0 + i) as f64;
        let w = (j + 1.0).powf(q) - j.powf(q);
        let term = w * g;
        sum += term;
        if term <= sum * 1e-16 {
            return Ok(m * sum);
        }
    }
    Err(Error::NonConvergent(format!(
        "tail majorant did not converge within {MAX_MAJORANT_TERMS} terms (gamma = {gamma})"
    )))
}

/// `integral over (lo, hi) of beta^q(u, v) du`, exact for unit cost and via
/// cylinder decomposition for symbol cost.
pub fn integral_q(cost: &CostModel, lo: f64, hi: f64, v: f64, q: f64) -> Result<IntegralResult> {
    if !(q > 0.0) {
        return Err(Error::Domain(format!(
            "moment order q must be positive, got {q}"
        )));
    }
    check_interval(lo, hi)?;
    match cost.kind() {
        CostKind::KeyComparisons => Ok(IntegralResult::exact(hi - lo)),
        CostKind::SymbolComparisons(src) => {
            let gamma = src.max_symbol_prob().unwrap();
            // j = 0 term: C_0 = (0,1) covers the whole interval
            let mut value = hi - lo;
            let mut terms = 1usize;
            let mut cylinders = src.cylinders(v)?;
            for j in 1..=cost.max_depth() {
                let Some((_, c_lo, c_hi)) = cylinders.next() else {
                    // cylinder width underflowed; remaining mass is zero
                    return Ok(IntegralResult {
                        value,
                        truncation_error_bound: 0.0,
                        terms_used: terms,
                    });
                };
                let m = overlap(c_lo, c_hi, lo, hi);
                let jf = j as f64;
                value += ((jf + 1.0).powf(q) - jf.powf(q)) * m;
                terms += 1;
                if m < CYLINDER_MASS_TOL {
                    return Ok(IntegralResult {
                        value,
                        truncation_error_bound: tail_majorant(j, m, gamma, q)?,
                        terms_used: terms,
                    });
                }
            }
            Err(Error::ExpansionCap(cost.max_depth()))
        }
    }
}

/// Cross integral `integral over (lo, hi) of beta(u, v1) beta(u, v2) du`.
///
/// Splitting at the separation depth `d` (the common prefix length of the two
/// keys) gives an exact finite part plus two geometric tails:
/// the shared cylinders contribute `sum_{m<=d} (2m+1) mass_m`, and each key's
/// private cylinders below `d` meet the other factor at its constant value
/// `d+1`.
pub fn integral_cross(
    cost: &CostModel,
    lo: f64,
    hi: f64,
    v1: f64,
    v2: f64,
) -> Result<IntegralResult> {
    check_interval(lo, hi)?;
    match cost.kind() {
        CostKind::KeyComparisons => Ok(IntegralResult::exact(hi - lo)),
        CostKind::SymbolComparisons(src) => {
            if v1 == v2 {
                return integral_q(cost, lo, hi, v1, 2.0);
            }
            let gamma = src.max_symbol_prob().unwrap();
            let d = cost.beta(v1, v2)? as usize - 1;
            // shared cylinders C_0 .. C_d
            let mut value = hi - lo; // m = 0 term, weight 1
            let mut terms = 1usize;
            let mut shared = src.cylinders(v1)?;
            for m_idx in 1..=d {
                let (_, c_lo, c_hi) = shared.next().ok_or_else(|| {
                    Error::NonConvergent("shared cylinder vanished before separation".into())
                })?;
                let mass = overlap(c_lo, c_hi, lo, hi);
                value += (2 * m_idx + 1) as f64 * mass;
                terms += 1;
            }
            // private tails: each pairs with the other factor frozen at d+1
            let mut bound = 0.0;
            for v in [v1, v2] {
                let mut cyl = src.cylinders(v)?;
                let mut tail_sum = 0.0;
                let mut done = false;
                // skip the shared prefix
                for _ in 0..d {
                    if cyl.next().is_none() {
                        done = true;
                        break;
                    }
                }
                if !done {
                    let mut depth = d;
                    loop {
                        depth += 1;
                        if depth > cost.max_depth() {
                            return Err(Error::ExpansionCap(cost.max_depth()));
                        }
                        let Some((_, c_lo, c_hi)) = cyl.next() else {
                            break;
                        };
                        let mass = overlap(c_lo, c_hi, lo, hi);
                        tail_sum += mass;
                        terms += 1;
                        if mass < CYLINDER_MASS_TOL {
                            bound += (d + 1) as f64 * tail_majorant(0, mass, gamma, 1.0)?;
                            break;
                        }
                    }
                }
                value += (d + 1) as f64 * tail_sum;
            }
            Ok(IntegralResult {
                value,
                truncation_error_bound: bound,
                terms_used: terms,
            })
        }
    }
}

/// `I_k` (q = 1), `I_{2,k}` (q = 2), or general `I_{q,k}` for a chain record:
/// the conditional q-th moment of the cost of one comparison against the
/// record's pivot, integrated over the record's interval.
pub fn integral_i(rec: &PivotRecord, cost: &CostModel, q: f64) -> Result<IntegralResult> {
    integral_q(cost, rec.lo, rec.hi, rec.pivot, q)
}

/// `I_{2,k,l}` for two records of one chain, symmetrized in the record order:
/// the integral runs over the later (inner) record's interval.
pub fn integral_i2_cross(
    a: &PivotRecord,
    b: &PivotRecord,
    cost: &CostModel,
) -> Result<IntegralResult> {
    let (outer, inner) = if a.interval_len() >= b.interval_len() {
        (a, b)
    } else {
        (b, a)
    };
    integral_cross(cost, inner.lo, inner.hi, outer.pivot, inner.pivot)
}
