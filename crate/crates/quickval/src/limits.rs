//! Limit-law ingredients: the truncated almost-sure limit `S`, the
//! conditional variances `sigma_K^2` and their limit `sigma_infinity^2`, and
//! samplers for the mixing scale and the Dickman distribution.

use serde::Serialize;

use crate::chain::{DirectDraws, ExtendChain, PivotChain};
use crate::cost::CostModel;
use crate::error::{Error, Result};
use crate::integrals::{integral_i, integral_i2_cross};
use crate::stream::SeedStream;

/// Hard cap on chain length before a truncation is declared non-convergent.
pub const CHAIN_HARD_CAP: usize = 10_000;

/// How many consecutive small rows the variance truncation requires before
/// stopping; guards against even/odd artifacts in the row increments.
const SIGMA_QUIET_ROWS: usize = 3;

/// One draw (or deterministic evaluation) of the limiting conditional
/// variance.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SigmaSample {
    pub sigma_sq: f64,
    pub k_used: usize,
    /// Magnitude of the last row increment; reported, not asserted.
    pub tail_bound: f64,
}

/// Truncated value of `S = sum_k I_k` on one chain.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TruncatedS {
    pub value: f64,
    pub k_used: usize,
    /// Heuristic geometric tail bound `I_K * gamma / (1 - gamma)`.
    pub tail_bound: f64,
}

/// Sum `I_k` along the chain, extending it until `I_K < tol * (1 - gamma)`,
/// where `gamma` is the largest interval-shrink ratio observed so far.
pub fn s_truncated(
    chain: &mut PivotChain,
    ext: &mut dyn ExtendChain,
    cost: &CostModel,
    tol: f64,
) -> Result<TruncatedS> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let mut sum = 0.0;
    let mut gamma = 0.0_f64;
    let mut k = 0usize;
    loop {
        if k == chain.len() {
            ext.extend(chain)?;
        }
        if chain.len() > CHAIN_HARD_CAP {
            return Err(Error::CapExceeded(format!(
                "chain exceeded {CHAIN_HARD_CAP} records before the tail fell below {tol}"
            )));
        }
        let i_k = integral_i(&chain.records()[k], cost, 1.0)?.value;
        sum += i_k;
        k += 1;
        if k >= 2 {
            let records = chain.records();
            gamma = gamma.max(records[k - 1].interval_len() / records[k - 2].interval_len());
            if i_k < tol * (1.0 - gamma) {
                return Ok(TruncatedS {
                    value: sum,
                    k_used: k,
                    tail_bound: i_k * gamma / (1.0 - gamma),
                });
            }
        }
    }
}

/// Truncation rule for [`sigma_sq`].
#[derive(Clone, Copy, Debug)]
pub enum SigmaTruncation {
    /// Evaluate `sigma_K^2` for exactly this `K`.
    FixedK(usize),
    /// Grow `K` until the full row increment `sum_{k<=l} |I_{2,k,l} - I_k I_l|`
    /// stays below the tolerance for several consecutive rows.
    RowTol(f64),
}

/// `sigma_K^2 = sum_{1<=k,l<=K} (I_{2,k,l} - I_k I_l)` over a chain,
/// extending it as needed.
pub fn sigma_sq(
    chain: &mut PivotChain,
    ext: &mut dyn ExtendChain,
    cost: &CostModel,
    truncation: SigmaTruncation,
) -> Result<SigmaSample> {
    match truncation {
        SigmaTruncation::FixedK(0) => {
            return Err(Error::Domain(
                "sigma truncation K must be at least 1".into(),
            ))
        }
        SigmaTruncation::RowTol(tol) if !(tol > 0.0) => {
            return Err(Error::Domain(format!(
                "sigma truncation tolerance must be positive, got {tol}"
            )));
        }
        _ => {}
    }
    let mut i_values: Vec<f64> = Vec::new();
    let mut total = 0.0;
    let mut quiet_rows = 0usize;
    let mut last_row_abs = f64::INFINITY;
    let mut k_used = 0usize;
    for ell in 1.. {
        if let SigmaTruncation::FixedK(k) = truncation {
            if ell > k {
                break;
            }
        }
        while chain.len() < ell {
            ext.extend(chain)?;
        }
        if ell > CHAIN_HARD_CAP {
            return Err(Error::CapExceeded(format!(
                "sigma truncation exceeded {CHAIN_HARD_CAP} rows"
            )));
        }
        let records = chain.records();
        let rec_l = records[ell - 1];
        let i_l = integral_i(&rec_l, cost, 1.0)?.value;
        let i2_diag = integral_i(&rec_l, cost, 2.0)?.value;
        let diag = i2_diag - i_l * i_l;
        let mut row_signed = diag;
        let mut row_abs = diag.abs();
        for k in 1..ell {
            let i2 = integral_i2_cross(&records[k - 1], &rec_l, cost)?.value;
            let cov = i2 - i_values[k - 1] * i_l;
            row_signed += 2.0 * cov;
            row_abs += 2.0 * cov.abs();
        }
        total += row_signed;
        i_values.push(i_l);
        k_used = ell;
        last_row_abs = row_abs;
        if let SigmaTruncation::RowTol(tol) = truncation {
            if row_abs < tol {
                quiet_rows += 1;
                if quiet_rows >= SIGMA_QUIET_ROWS {
                    break;
                }
            } else {
                quiet_rows = 0;
            }
        }
    }
    Ok(SigmaSample {
        // a conditional variance; clamp the last bits of cancellation noise
        sigma_sq: total.max(0.0),
        k_used,
        tail_bound: last_row_abs,
    })
}

/// Unit-cost shortcut for `sigma_infinity^2` written purely in terms of the
/// interval lengths `I_j = R_j - L_j` (valid only when `beta == 1`):
///
/// `sum_k (I_{k-1} - I_{k-1}^2) + 2 sum_l sum_{k<l} (I_{l-1} - I_{k-1} I_{l-1})`.
pub fn sigma_sq_unit_cost_from_lengths(chain: &PivotChain, k_max: usize) -> f64 {
    let records = chain.records();
    let k_max = k_max.min(records.len());
    // records[j] holds (L_j-1.., .. ) i.e. length after j pivots is
    // records[j].interval_len() shifted: record with index j (0-based) spans
    // (L_j, R_j) from the intro's indexing, so I_{k-1} = records[k-1].len().
    let len = |k: usize| records[k].interval_len();
    let mut total = 0.0;
    for k in 1..=k_max {
        let l = len(k - 1);
        total += l - l * l;
    }
    for ell in 2..=k_max {
        let ll = len(ell - 1);
        for k in 1..ell {
            total += 2.0 * (ll - len(k - 1) * ll);
        }
    }
    total
}

/// One draw of `sigma_infinity^2`: a fresh pivot chain grown directly from
/// the stream, fed through [`sigma_sq`] with the row tolerance rule.
///
/// Requires declared tameness with `epsilon < 1/2`; unit cost qualifies
/// automatically.
pub fn sample_sigma_infinity(
    alpha: f64,
    cost: &CostModel,
    stream: &mut SeedStream,
    tol: f64,
) -> Result<SigmaSample> {
    let tameness = cost.declared_tameness().ok_or_else(|| {
        Error::Tameness("symbol cost needs declared (c, epsilon) to sample sigma".into())
    })?;
    if tameness.epsilon >= 0.5 {
        return Err(Error::Tameness(format!(
            "epsilon = {} but the mixing scale needs epsilon < 1/2",
            tameness.epsilon
        )));
    }
    let mut chain = PivotChain::new(alpha)?;
    sigma_sq(
        &mut chain,
        &mut DirectDraws(stream),
        cost,
        SigmaTruncation::RowTol(tol),
    )
}

/// One draw from the Dickman distribution: `1 + U_1 + U_1 U_2 + ...`,
/// truncated once the running product drops below `tol`. Every draw is at
/// least 1.
pub fn sample_dickman(stream: &mut SeedStream, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let mut product = 1.0;
    let mut sum = 1.0;
    loop {
        product *= stream.next_seed();
        sum += product;
        if product < tol {
            return Ok(sum);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::NoExtension;
    use crate::cost::CostModel;
    use crate::source::SourceSpec;
    use crate::stream::{SeedStream, SeedTape};

    /// Chain whose k-th pivot is the midpoint of the current interval, so at
    /// alpha = 0 the interval lengths are exactly 2^-k.
    fn midpoint_chain(k: usize) -> PivotChain {
        let mut chain = PivotChain::new(0.0).unwrap();
        let seeds: Vec<f64> = (0..k).map(|j| 2.0_f64.powi(-(j as i32 + 1))).collect();
        let mut tape = SeedTape::from_seeds(seeds).unwrap();
        for _ in 0..k {
            chain.extend_scanning(&mut tape).unwrap();
        }
        chain
    }

    #[test]
    fn geometric_chain_sums_to_two() {
        let mut chain = midpoint_chain(80);
        let key = CostModel::key_comparisons();
        let s = s_truncated(&mut chain, &mut NoExtension, &key, 1e-9).unwrap();
        assert!((s.value - 2.0).abs() < 1e-9, "S = {}", s.value);
        assert!(s.tail_bound < 1e-9);
    }

    #[test]
    fn geometric_chain_sigma_sq_is_two() {
        let mut chain = midpoint_chain(120);
        let key = CostModel::key_comparisons();
        let sig = sigma_sq(
            &mut chain,
            &mut NoExtension,
            &key,
            SigmaTruncation::RowTol(1e-12),
        )
        .unwrap();
        assert!(
            (sig.sigma_sq - 2.0).abs() < 1e-9,
            "sigma^2 = {}",
            sig.sigma_sq
        );
    }

    #[test]
    fn sigma_1_vanishes_on_the_unit_interval() {
        // K = 1 with (L_0, R_0) = (0, 1): I_1 = 1 so the variance of the
        // constant indicator is 0
        let mut chain = midpoint_chain(1);
        let key = CostModel::key_comparisons();
        let sig = sigma_sq(
            &mut chain,
            &mut NoExtension,
            &key,
            SigmaTruncation::FixedK(1),
        )
        .unwrap();
        assert_eq!(sig.sigma_sq, 0.0);
    }

    #[test]
    fn double_sum_matches_length_form_at_unit_cost() {
        let key = CostModel::key_comparisons();
        for alpha in [0.0, 0.37] {
            let mut stream = SeedStream::new(314, 1);
            let mut chain = PivotChain::new(alpha).unwrap();
            for _ in 0..40 {
                chain.extend_direct(&mut stream).unwrap();
            }
            let a = sigma_sq(
                &mut chain,
                &mut NoExtension,
                &key,
                SigmaTruncation::FixedK(40),
            )
            .unwrap()
            .sigma_sq;
            let b = sigma_sq_unit_cost_from_lengths(&chain, 40);
            assert!((a - b).abs() <= 1e-10 * b.max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn sigma_k_is_nondecreasing_at_unit_cost_alpha_zero() {
        let key = CostModel::key_comparisons();
        let mut stream = SeedStream::new(99, 5);
        let mut chain = PivotChain::new(0.0).unwrap();
        for _ in 0..30 {
            chain.extend_direct(&mut stream).unwrap();
        }
        let mut prev = 0.0;
        for k in 1..=30 {
            let s = sigma_sq(
                &mut chain,
                &mut NoExtension,
                &key,
                SigmaTruncation::FixedK(k),
            )
            .unwrap()
            .sigma_sq;
            assert!(s >= prev - 1e-12, "sigma_K^2 decreased at K = {k}");
            prev = s;
        }
    }

    #[test]
    fn sigma_k_matches_conditional_variance_monte_carlo() {
        // brute-force oracle: variance of X_hat_K = sum_k 1(U in interval_k) beta(U, pivot_k)
        // over fresh uniforms, conditionally on a fixed chain
        let key = CostModel::key_comparisons();
        let mut stream = SeedStream::new(2718, 0);
        let mut chain = PivotChain::new(0.3).unwrap();
        for _ in 0..4 {
            chain.extend_direct(&mut stream).unwrap();
        }
        for k in 1..=4 {
            let exact = sigma_sq(
                &mut chain,
                &mut NoExtension,
                &key,
                SigmaTruncation::FixedK(k),
            )
            .unwrap()
            .sigma_sq;
            let mut mc = SeedStream::new(555, 1);
            let reps = 400_000;
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            let mut fourth = 0.0;
            for _ in 0..reps {
                let u = mc.next_seed();
                let mut x = 0.0;
                for rec in chain.records().iter().take(k) {
                    if rec.lo < u && u < rec.hi {
                        x += key.beta(u, rec.pivot).unwrap();
                    }
                }
                sum += x;
                sum_sq += x * x;
                fourth += x * x * x * x;
            }
            let n = reps as f64;
            let mean = sum / n;
            let var = sum_sq / n - mean * mean;
            // standard error of a sample variance
            let m4 = fourth / n;
            let se = ((m4 - var * var).max(0.0) / n).sqrt().max(1e-9);
            assert!(
                (var - exact).abs() < 3.0 * se + 1e-3,
                "K = {k}: mc {var} vs exact {exact} (se {se})"
            );
        }
    }

    #[test]
    fn row_increments_shrink_and_are_dominated() {
        // on a fixed chain the row increments go to zero and the partial sums
        // of |I_2kl - Ik Il| stay below (sum_k sqrt(I_2k))^2
        let key = CostModel::key_comparisons();
        let mut stream = SeedStream::new(421, 9);
        let mut chain = PivotChain::new(0.5).unwrap();
        for _ in 0..25 {
            chain.extend_direct(&mut stream).unwrap();
        }
        let mut abs_sum = 0.0;
        let mut sqrt_sum = 0.0;
        let mut i_vals: Vec<f64> = Vec::new();
        let mut last_rows = Vec::new();
        for ell in 1..=25 {
            let rec_l = chain.records()[ell - 1];
            let i_l = integral_i(&rec_l, &key, 1.0).unwrap().value;
            let i2_l = integral_i(&rec_l, &key, 2.0).unwrap().value;
            sqrt_sum += i2_l.sqrt();
            let mut row = (i2_l - i_l * i_l).abs();
            for k in 1..ell {
                let i2 = integral_i2_cross(&chain.records()[k - 1], &rec_l, &key)
                    .unwrap()
                    .value;
                row += 2.0 * (i2 - i_vals[k - 1] * i_l).abs();
            }
            i_vals.push(i_l);
            abs_sum += row;
            last_rows.push(row);
            assert!(abs_sum <= sqrt_sum * sqrt_sum + 1e-12);
        }
        assert!(last_rows[24] < last_rows[4]);
        assert!(last_rows[24] < 1e-2 * last_rows[1]);
    }

    #[test]
    fn dickman_draws_are_at_least_one() {
        let mut stream = SeedStream::new(7, 0);
        for _ in 0..10_000 {
            let d = sample_dickman(&mut stream, 1e-12).unwrap();
            assert!(d >= 1.0);
        }
    }

    #[test]
    fn dickman_small_sample_moments_are_sane() {
        let mut stream = SeedStream::new(100, 0);
        let n = 200_000;
        let draws: Vec<f64> = (0..n)
            .map(|_| sample_dickman(&mut stream, 1e-12).unwrap())
            .collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!((mean - 2.0).abs() < 0.01, "mean = {mean}");
        assert!((var - 0.5).abs() < 0.03, "var = {var}");
    }

    #[test]
    fn truncated_s_has_the_dickman_law_at_alpha_zero() {
        // S = 1 + sum of pivot values; the pivot values share the law of
        // cumulative products of uniforms, so S and the Dickman perpetuity
        // must agree in mean (2) and variance (1/2)
        let key = CostModel::key_comparisons();
        let reps = 100_000;
        let draws: Vec<f64> = (0..reps)
            .map(|r| {
                let mut stream = SeedStream::new(8_888, r);
                let mut chain = PivotChain::new(0.0).unwrap();
                s_truncated(&mut chain, &mut DirectDraws(&mut stream), &key, 1e-9)
                    .unwrap()
                    .value
            })
            .collect();
        let n = reps as f64;
        let mean = draws.iter().sum::<f64>() / n;
        let var = draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let mean_se = (var / n).sqrt();
        assert!((mean - 2.0).abs() <= 3.0 * mean_se, "mean {mean}");
        // moment-based standard error for the variance estimate
        let m4 = draws.iter().map(|d| (d - mean).powi(4)).sum::<f64>() / n;
        let var_se = ((m4 - var * var).max(0.0) / n).sqrt();
        assert!((var - 0.5).abs() <= 3.0 * var_se, "var {var} (se {var_se})");
    }

    #[test]
    fn sqrt_second_moment_series_stabilizes() {
        // sum_k (mean I_{2,k})^(1/2) should converge geometrically
        let key = CostModel::key_comparisons();
        let reps = 4_000;
        let k_max = 20;
        let mut means = vec![0.0f64; k_max];
        for r in 0..reps {
            let mut stream = SeedStream::new(9_191, r);
            let mut chain = PivotChain::new(0.3).unwrap();
            for slot in means.iter_mut() {
                chain.extend_direct(&mut stream).unwrap();
                let rec = chain.records().last().unwrap();
                *slot += integral_i(rec, &key, 2.0).unwrap().value;
            }
        }
        let increments: Vec<f64> = means.iter().map(|m| (m / reps as f64).sqrt()).collect();
        // decreasing tail and a vanishing final increment
        for w in increments.windows(2).skip(2) {
            assert!(w[1] < w[0], "increments not shrinking: {increments:?}");
        }
        assert!(increments[k_max - 1] < 0.05 * increments[0]);
        // geometric decay: the late ratios stay bounded away from 1
        let late_ratio = increments[k_max - 1] / increments[k_max - 5];
        assert!(late_ratio < 0.8, "late ratio {late_ratio}");
    }

    #[test]
    fn tameness_preconditions_are_enforced() {
        let mut stream = SeedStream::new(1, 0);
        let sym =
            CostModel::symbol_comparisons(SourceSpec::memoryless(vec![0.5, 0.5]).unwrap()).unwrap();
        assert!(matches!(
            sample_sigma_infinity(0.0, &sym, &mut stream, 1e-6),
            Err(Error::Tameness(_))
        ));
        let declared = sym.clone().with_tameness(3.0, 0.6).unwrap();
        assert!(matches!(
            sample_sigma_infinity(0.0, &declared, &mut stream, 1e-6),
            Err(Error::Tameness(_))
        ));
        let ok = sym.with_tameness(3.0, 0.1).unwrap();
        assert!(sample_sigma_infinity(0.0, &ok, &mut stream, 1e-4).is_ok());
    }

    #[test]
    fn invalid_tolerances_are_domain_errors() {
        let mut stream = SeedStream::new(1, 0);
        assert!(matches!(
            sample_dickman(&mut stream, 0.0),
            Err(Error::Domain(_))
        ));
        let key = CostModel::key_comparisons();
        let mut chain = midpoint_chain(5);
        assert!(matches!(
            s_truncated(&mut chain, &mut NoExtension, &key, -1.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn coupled_s_equals_one_plus_pivot_sum_at_alpha_zero() {
        // S = 1 + sum_k U_{tau_k} for unit cost at alpha = 0
        let key = CostModel::key_comparisons();
        let mut stream = SeedStream::new(31337, 2);
        let mut chain = PivotChain::new(0.0).unwrap();
        let s = s_truncated(&mut chain, &mut DirectDraws(&mut stream), &key, 1e-10).unwrap();
        let expected = 1.0
            + chain.records()[..s.k_used - 1]
                .iter()
                .map(|r| r.pivot)
                .sum::<f64>();
        assert!(
            (s.value - expected).abs() < 1e-12,
            "{} vs {expected}",
            s.value
        );
    }
}
