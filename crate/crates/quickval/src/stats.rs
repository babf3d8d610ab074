//! Sample statistics: the two-sample Kolmogorov-Smirnov distance and moment
//! reports with standard errors.

use serde::Serialize;

use crate::error::{Error, Result};

fn check_samples(name: &str, xs: &[f64]) -> Result<()> {
    if xs.is_empty() {
        return Err(Error::Domain(format!("{name}: empty sample")));
    }
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(Error::Domain(format!("{name}: non-finite sample value")));
    }
    Ok(())
}

/// Two-sample Kolmogorov-Smirnov statistic: the sup distance between the two
/// empirical distribution functions, in [0, 1].
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    check_samples("ks first sample", a)?;
    check_samples("ks second sample", b)?;
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(|p, q| p.partial_cmp(q).unwrap());
    ys.sort_by(|p, q| p.partial_cmp(q).unwrap());
    let (na, nb) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0_f64;
    while i < xs.len() && j < ys.len() {
        let x = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= x {
            i += 1;
        }
        while j < ys.len() && ys[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

/// Mean and its standard error.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)
}

/// Sample variance with its own standard error (moment-based:
/// `Var(s^2) ~ (m4 - s^4) / n`).
pub fn variance_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
    let se = ((m4 - var * var).max(0.0) / n).sqrt();
    (var, se)
}

/// Median of a sample (by sorting a copy).
pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(|p, q| p.partial_cmp(q).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Raw and absolute moment of one order, with standard errors.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MomentEstimate {
    pub order: u32,
    pub raw: f64,
    pub raw_se: f64,
    pub abs: f64,
    pub abs_se: f64,
}

/// Raw and absolute sample moments of orders `1..=max_order`. The standard
/// error of each moment is the plain standard error of the transformed
/// sample's mean.
pub fn moment_report(samples: &[f64], max_order: u32) -> Result<Vec<MomentEstimate>> {
    if max_order < 1 {
        return Err(Error::Domain("moment order must be at least 1".into()));
    }
    check_samples("moment samples", samples)?;
    if samples.len() < 2 {
        return Err(Error::Domain(
            "need at least two samples for a standard error".into(),
        ));
    }
    let mut out = Vec::with_capacity(max_order as usize);
    for order in 1..=max_order {
        let raws: Vec<f64> = samples.iter().map(|x| x.powi(order as i32)).collect();
        let abss: Vec<f64> = samples.iter().map(|x| x.abs().powi(order as i32)).collect();
        let (raw, raw_se) = mean_se(&raws);
        let (abs, abs_se) = mean_se(&abss);
        out.push(MomentEstimate {
            order,
            raw,
            raw_se,
            abs,
            abs_se,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::SeedStream;

    #[test]
    fn ks_hand_cases() {
        assert_eq!(
            ks_two_sample(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(),
            0.0
        );
        assert_eq!(ks_two_sample(&[0.0, 0.1], &[5.0, 6.0]).unwrap(), 1.0);
        assert_eq!(ks_two_sample(&[1.0, 2.0], &[1.5]).unwrap(), 0.5);
    }

    #[test]
    fn ks_rejects_bad_input() {
        assert!(ks_two_sample(&[], &[1.0]).is_err());
        assert!(ks_two_sample(&[1.0], &[f64::NAN]).is_err());
    }

    #[test]
    fn ks_is_symmetric_and_small_under_the_null() {
        let a: Vec<f64> = SeedStream::new(5, 0).take(4000).collect();
        let b: Vec<f64> = SeedStream::new(5, 1).take(4000).collect();
        let d1 = ks_two_sample(&a, &b).unwrap();
        let d2 = ks_two_sample(&b, &a).unwrap();
        assert_eq!(d1, d2);
        assert!(d1 < 0.05, "null KS unexpectedly large: {d1}");
    }

    #[test]
    fn constant_sample_moments() {
        let xs = vec![3.0; 100];
        let m = moment_report(&xs, 2).unwrap();
        assert_eq!(m[1].raw, 9.0);
        assert_eq!(m[1].raw_se, 0.0);
    }

    #[test]
    fn standard_normal_second_moment_is_one() {
        let mut s = SeedStream::new(12, 0);
        let xs: Vec<f64> = (0..200_000).map(|_| s.next_normal()).collect();
        let m = moment_report(&xs, 2).unwrap();
        assert!((m[1].raw - 1.0).abs() <= 3.0 * m[1].raw_se, "{:?}", m[1]);
        assert!(m[0].raw.abs() <= 3.0 * m[0].raw_se);
    }

    #[test]
    fn median_of_even_and_odd_samples() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
