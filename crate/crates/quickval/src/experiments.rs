//! Monte Carlo engine tying the pieces together: coupled residual
//! experiments, the QuickMin L^2 check, mean-cost verification, and batch
//! samplers.
//!
//! Replication `r` always uses stream index `r` (attempt retries move to a
//! disjoint index range), and results are reduced in replication order, so a
//! run is bit-identical for a fixed master seed no matter how many worker
//! threads execute it.

use rayon::prelude::*;
use serde::Serialize;

use crate::chain::{DirectDraws, PivotChain};
use crate::cost::CostModel;
use crate::error::{Error, Result};
use crate::exact::{a_n_sq_exact, mu_n};
use crate::limits::{s_truncated, sample_dickman, sample_sigma_infinity};
use crate::select::{quickmin_cost, quickval_totals_at};
use crate::stats::{ks_two_sample, mean_se, median, moment_report, variance, MomentEstimate};
use crate::stream::{SeedStream, SeedTape};

/// Stream-index namespace tag for mixture draws, so they never collide with
/// replication streams under the same master seed.
const MIXTURE_TAG: u64 = 1 << 62;

/// Retries per replication before giving up on measure-zero redraws.
const MAX_ATTEMPTS: usize = 64;

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentConfig {
    pub alpha: f64,
    pub cost: CostModel,
    /// Sample sizes, strictly increasing after validation.
    pub n_list: Vec<usize>,
    pub reps: usize,
    pub rng_master_seed: u64,
    pub truncation_tol: f64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::Domain(format!(
                "alpha must lie in [0, 1], got {}",
                self.alpha
            )));
        }
        if self.reps < 1 {
            return Err(Error::Domain("reps must be at least 1".into()));
        }
        if self.n_list.is_empty() || self.n_list.iter().any(|&n| n < 1) {
            return Err(Error::Domain("n_list must contain sizes >= 1".into()));
        }
        if self.n_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain("n_list must be strictly increasing".into()));
        }
        if !(self.truncation_tol > 0.0) {
            return Err(Error::Domain(
                "truncation tolerance must be positive".into(),
            ));
        }
        Ok(())
    }

    fn require_tameness_below_half(&self) -> Result<()> {
        let t = self.cost.declared_tameness().ok_or_else(|| {
            Error::Tameness("symbol cost needs declared (c, epsilon) for limit experiments".into())
        })?;
        if t.epsilon >= 0.5 {
            return Err(Error::Tameness(format!(
                "declared epsilon = {} but the residual limit needs epsilon < 1/2",
                t.epsilon
            )));
        }
        Ok(())
    }
}

fn rep_stream(master: u64, tag: u64, r: usize, attempt: usize) -> SeedStream {
    SeedStream::new(master, tag | ((attempt as u64) << 48) | r as u64)
}

/// Run `f(attempt)` until it succeeds, redrawing on the two recoverable
/// failure classes. Returns the value plus (alpha-redraw, cap-redraw) counts.
fn with_redraws<T>(mut f: impl FnMut(usize) -> Result<T>) -> Result<(T, usize, usize)> {
    let mut alpha_redraws = 0;
    let mut cap_redraws = 0;
    for attempt in 0..MAX_ATTEMPTS {
        match f(attempt) {
            Ok(v) => return Ok((v, alpha_redraws, cap_redraws)),
            Err(Error::PivotHitsAlpha(_)) => alpha_redraws += 1,
            Err(Error::CapExceeded(_)) => cap_redraws += 1,
            Err(e) => return Err(e),
        }
    }
    Err(Error::NonConvergent(format!(
        "replication still failing after {MAX_ATTEMPTS} redraws"
    )))
}

/// Per-`n` summary of a residual experiment.
#[derive(Clone, Debug, Serialize)]
pub struct ResidualNSummary {
    pub n: usize,
    pub mean: f64,
    pub mean_se: f64,
    pub variance: f64,
    pub second_moment: f64,
    pub second_moment_se: f64,
    pub ks_vs_mixture: f64,
    pub moments: Vec<MomentEstimate>,
    pub median_tail_bound: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidualCltSummary {
    pub per_n: Vec<ResidualNSummary>,
    pub mixture_second_moment: f64,
    pub mixture_second_moment_se: f64,
    pub redraws: usize,
    pub truncation_redraws: usize,
}

/// Full result: scaled residual samples per `n`, the independent mixture
/// samples, and the summary.
#[derive(Clone, Debug)]
pub struct ResidualCltResult {
    pub n_list: Vec<usize>,
    /// `residual_samples[i][r]` = sqrt(n_i) (S_{n_i}/n_i - S) in replication r.
    pub residual_samples: Vec<Vec<f64>>,
    pub mixture_samples: Vec<f64>,
    pub summary: ResidualCltSummary,
}

struct ResidualRep {
    residuals: Vec<f64>,
    tail_bound: f64,
}

fn residual_rep(cfg: &ExperimentConfig, r: usize, attempt: usize) -> Result<ResidualRep> {
    let n_max = *cfg.n_list.last().unwrap();
    let mut tape = SeedTape::from_stream(rep_stream(cfg.rng_master_seed, 0, r, attempt));
    let seeds = tape.prefix(n_max)?.to_vec();
    let (totals, mut chain) = quickval_totals_at(&seeds, cfg.alpha, &cfg.cost, &cfg.n_list)?;
    // The same stream keeps driving the chain past the materialized seeds:
    // each later pivot is drawn from its exact conditional law, which is what
    // the literal scan would deliver without materializing the wait.
    let mut stream = tape.into_stream().expect("stream-backed tape");
    let limit = s_truncated(
        &mut chain,
        &mut DirectDraws(&mut stream),
        &cfg.cost,
        cfg.truncation_tol,
    )?;
    let residuals = cfg
        .n_list
        .iter()
        .zip(&totals)
        .map(|(&n, &s_n)| (n as f64).sqrt() * (s_n / n as f64 - limit.value))
        .collect();
    Ok(ResidualRep {
        residuals,
        tail_bound: limit.tail_bound,
    })
}

fn mixture_rep(cfg: &ExperimentConfig, s: usize, attempt: usize) -> Result<f64> {
    let mut stream = rep_stream(cfg.rng_master_seed, MIXTURE_TAG, s, attempt);
    let sigma = sample_sigma_infinity(cfg.alpha, &cfg.cost, &mut stream, cfg.truncation_tol)?;
    Ok(sigma.sigma_sq.sqrt() * stream.next_normal())
}

/// The residual-law experiment: per replication one seed stream drives both
/// the finite-`n` QuickVal costs and the truncated limit `S` on the same
/// pivot chain; independent streams supply mixture samples `sigma * Z`.
pub fn run_residual_clt(cfg: &ExperimentConfig) -> Result<ResidualCltResult> {
    cfg.validate()?;
    cfg.require_tameness_below_half()?;

    let reps: Vec<(ResidualRep, usize, usize)> = (0..cfg.reps)
        .into_par_iter()
        .map(|r| with_redraws(|attempt| residual_rep(cfg, r, attempt)))
        .collect::<Result<Vec<_>>>()?;
    let mixture: Vec<(f64, usize, usize)> = (0..cfg.reps)
        .into_par_iter()
        .map(|s| with_redraws(|attempt| mixture_rep(cfg, s, attempt)))
        .collect::<Result<Vec<_>>>()?;

    let mut redraws = 0;
    let mut truncation_redraws = 0;
    let mut residual_samples: Vec<Vec<f64>> = vec![Vec::with_capacity(cfg.reps); cfg.n_list.len()];
    let mut tails = Vec::with_capacity(cfg.reps);
    for (rep, a, c) in &reps {
        redraws += a;
        truncation_redraws += c;
        tails.push(rep.tail_bound);
        for (i, &x) in rep.residuals.iter().enumerate() {
            residual_samples[i].push(x);
        }
    }
    let mixture_samples: Vec<f64> = mixture
        .iter()
        .map(|(x, a, c)| {
            redraws += a;
            truncation_redraws += c;
            *x
        })
        .collect();

    let median_tail = median(&tails);
    let sq: Vec<f64> = mixture_samples.iter().map(|x| x * x).collect();
    let (mix_m2, mix_m2_se) = mean_se(&sq);

    let mut per_n = Vec::with_capacity(cfg.n_list.len());
    for (i, &n) in cfg.n_list.iter().enumerate() {
        let xs = &residual_samples[i];
        let (mean, se) = mean_se(xs);
        let sq: Vec<f64> = xs.iter().map(|x| x * x).collect();
        let (m2, m2_se) = mean_se(&sq);
        per_n.push(ResidualNSummary {
            n,
            mean,
            mean_se: se,
            variance: variance(xs),
            second_moment: m2,
            second_moment_se: m2_se,
            ks_vs_mixture: ks_two_sample(xs, &mixture_samples)?,
            moments: moment_report(xs, 4)?,
            median_tail_bound: median_tail,
        });
    }

    Ok(ResidualCltResult {
        n_list: cfg.n_list.clone(),
        residual_samples,
        mixture_samples,
        summary: ResidualCltSummary {
            per_n,
            mixture_second_moment: mix_m2,
            mixture_second_moment_se: mix_m2_se,
            redraws,
            truncation_redraws,
        },
    })
}

/// Result of the coupled QuickMin L^2 experiment.
#[derive(Clone, Debug, Serialize)]
pub struct QuickminL2Result {
    pub n: usize,
    pub reps: usize,
    /// Monte Carlo estimate of `E (Y_n - Y)^2`.
    pub estimate: f64,
    pub std_error: f64,
    /// The exact closed-form value it should match.
    pub exact: f64,
    pub abs_error_in_se: f64,
    pub median_tail_bound: f64,
    pub redraws: usize,
    pub truncation_redraws: usize,
    #[serde(skip)]
    pub samples: Vec<f64>,
}

/// Estimate `E (Y_n - Y)^2` by the natural coupling: each replication runs
/// QuickMin for `K_n` and truncates the limit `S` on the same stream's pivot
/// chain, giving `Y = S - 2` coupled with `Y_n = (K_n - mu_n) / (n+1)`.
pub fn run_quickmin_l2(
    n: usize,
    reps: usize,
    rng_master_seed: u64,
    truncation_tol: f64,
) -> Result<QuickminL2Result> {
    if n < 1 || reps < 1 {
        return Err(Error::Domain("n and reps must be at least 1".into()));
    }
    if !(truncation_tol > 0.0) {
        return Err(Error::Domain(
            "truncation tolerance must be positive".into(),
        ));
    }
    let key = CostModel::key_comparisons();
    let mu = mu_n(n);
    let out: Vec<((f64, f64), usize, usize)> = (0..reps)
        .into_par_iter()
        .map(|r| {
            with_redraws(|attempt| {
                let mut tape = SeedTape::from_stream(rep_stream(rng_master_seed, 0, r, attempt));
                let seeds = tape.prefix(n)?.to_vec();
                let k_n = quickmin_cost(&seeds, &key)?.total_cost;
                let mut chain = PivotChain::new(0.0)?;
                while chain.extend_within(&seeds)? {}
                let mut stream = tape.into_stream().expect("stream-backed tape");
                let limit = s_truncated(
                    &mut chain,
                    &mut DirectDraws(&mut stream),
                    &key,
                    truncation_tol,
                )?;
                let y_n = (k_n - mu) / (n as f64 + 1.0);
                let y = limit.value - 2.0;
                Ok(((y_n - y) * (y_n - y), limit.tail_bound))
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut redraws = 0;
    let mut truncation_redraws = 0;
    let mut samples = Vec::with_capacity(reps);
    let mut tails = Vec::with_capacity(reps);
    for ((sq, tail), a, c) in out {
        samples.push(sq);
        tails.push(tail);
        redraws += a;
        truncation_redraws += c;
    }
    let (estimate, std_error) = mean_se(&samples);
    let exact = a_n_sq_exact(n);
    Ok(QuickminL2Result {
        n,
        reps,
        estimate,
        std_error,
        exact,
        abs_error_in_se: (estimate - exact).abs() / std_error,
        median_tail_bound: median(&tails),
        redraws,
        truncation_redraws,
        samples,
    })
}

/// Monte Carlo mean of the QuickMin key-comparison cost against its exact
/// mean `mu_n`.
#[derive(Clone, Debug, Serialize)]
pub struct MeanCostReport {
    pub n: usize,
    pub reps: usize,
    pub mc_mean: f64,
    pub std_error: f64,
    pub expected: f64,
    pub z_score: f64,
}

pub fn run_mean_cost_check(n: usize, reps: usize, rng_master_seed: u64) -> Result<MeanCostReport> {
    if n < 1 || reps < 1 {
        return Err(Error::Domain("n and reps must be at least 1".into()));
    }
    let key = CostModel::key_comparisons();
    let totals: Vec<f64> = (0..reps)
        .into_par_iter()
        .map(|r| {
            let mut tape = SeedTape::from_stream(rep_stream(rng_master_seed, 0, r, 0));
            let seeds = tape.prefix(n)?;
            Ok(quickmin_cost(seeds, &key)?.total_cost)
        })
        .collect::<Result<Vec<f64>>>()?;
    let (mc_mean, std_error) = mean_se(&totals);
    let expected = mu_n(n);
    let z_score = if std_error > 0.0 {
        (mc_mean - expected) / std_error
    } else {
        0.0
    };
    Ok(MeanCostReport {
        n,
        reps,
        mc_mean,
        std_error,
        expected,
        z_score,
    })
}

/// Batch of Dickman draws.
pub fn run_dickman(reps: usize, tol: f64, rng_master_seed: u64) -> Result<Vec<f64>> {
    if reps < 1 {
        return Err(Error::Domain("reps must be at least 1".into()));
    }
    (0..reps)
        .into_par_iter()
        .map(|r| {
            let mut stream = rep_stream(rng_master_seed, 0, r, 0);
            sample_dickman(&mut stream, tol)
        })
        .collect()
}

/// Batch of `sigma_infinity^2` draws.
pub fn run_sigma_samples(
    alpha: f64,
    cost: &CostModel,
    reps: usize,
    tol: f64,
    rng_master_seed: u64,
) -> Result<Vec<f64>> {
    if reps < 1 {
        return Err(Error::Domain("reps must be at least 1".into()));
    }
    let out: Vec<(f64, usize, usize)> = (0..reps)
        .into_par_iter()
        .map(|r| {
            with_redraws(|attempt| {
                let mut stream = rep_stream(rng_master_seed, 0, r, attempt);
                Ok(sample_sigma_infinity(alpha, cost, &mut stream, tol)?.sigma_sq)
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(out.into_iter().map(|(x, _, _)| x).collect())
}
