//! Behavior of the scaled residual across sample sizes: the variance locks
//! onto the mixture's second moment from below the noise floor long before
//! the mean offset has died out.

use quickval::cost::CostModel;
use quickval::experiments::{run_residual_clt, ExperimentConfig};

#[test]
fn variance_approaches_the_mixture_second_moment_monotonically() {
    let cfg = ExperimentConfig {
        alpha: 0.0,
        cost: CostModel::key_comparisons(),
        n_list: vec![1 << 10, 1 << 12, 1 << 14],
        reps: 4_000,
        rng_master_seed: 2_024,
        truncation_tol: 1e-9,
    };
    let res = run_residual_clt(&cfg).unwrap();
    let mix = res.summary.mixture_second_moment;
    let mix_se = res.summary.mixture_second_moment_se;

    let mut prev_gap = f64::INFINITY;
    let mut prev_se = 0.0;
    for s in &res.summary.per_n {
        let gap = (s.variance - mix).abs();
        // approach within standard-error bands: allow the combined noise of
        // the two estimates being compared
        let slack = 2.0 * (s.second_moment_se + mix_se + prev_se);
        assert!(
            gap <= prev_gap + slack,
            "variance gap grew at n = {}: {gap} vs {prev_gap} (slack {slack})",
            s.n
        );
        prev_gap = gap;
        prev_se = s.second_moment_se;
    }
    // and the final size is already inside the noise band
    let last = res.summary.per_n.last().unwrap();
    assert!(
        (last.variance - mix).abs() <= 3.0 * (last.second_moment_se + mix_se),
        "variance {} vs mixture {mix} at n = {}",
        last.variance,
        last.n
    );
}

#[test]
fn residual_means_shrink_toward_zero_in_n() {
    // the limit law is centered; at finite n the mean offset is still
    // visible and must shrink as n grows
    let cfg = ExperimentConfig {
        alpha: 0.5,
        cost: CostModel::key_comparisons(),
        n_list: vec![1 << 8, 1 << 10, 1 << 12],
        reps: 4_000,
        rng_master_seed: 2_025,
        truncation_tol: 1e-9,
    };
    let res = run_residual_clt(&cfg).unwrap();
    let means: Vec<f64> = res.summary.per_n.iter().map(|s| s.mean).collect();
    assert!(means[0] < 0.0);
    for w in means.windows(2) {
        assert!(w[1].abs() < w[0].abs(), "means not shrinking: {means:?}");
    }
}
