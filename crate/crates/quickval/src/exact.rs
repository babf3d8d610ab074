//! Exact second-moment bookkeeping for the QuickMin residual: harmonic
//! tables, the mean cost `mu_n`, the closed form for `a_n^2 = E(Y_n - Y)^2`,
//! and an independent divide-and-conquer recurrence route to the same
//! quantity. Keeping both routes is deliberate: two derivations of one number
//! are this module's own oracle.

use crate::error::{Error, Result};

/// Harmonic numbers `H_n` and second-order `H_n^(2)`, by compensated forward
/// summation (no asymptotic approximations).
#[derive(Clone, Debug)]
pub struct HarmonicTable {
    h: Vec<f64>,
    h2: Vec<f64>,
}

impl HarmonicTable {
    pub fn new(n_max: usize) -> Self {
        let mut h = Vec::with_capacity(n_max + 1);
        let mut h2 = Vec::with_capacity(n_max + 1);
        h.push(0.0);
        h2.push(0.0);
        let (mut sh, mut ch) = (0.0_f64, 0.0_f64);
        let (mut s2, mut c2) = (0.0_f64, 0.0_f64);
        for i in 1..=n_max {
            let x = 1.0 / i as f64;
            // Kahan summation keeps the n <= 1e4 identities at 1e-12
            let y = x - ch;
            let t = sh + y;
            ch = (t - sh) - y;
            sh = t;
            h.push(sh);
            let y2 = x * x - c2;
            let t2 = s2 + y2;
            c2 = (t2 - s2) - y2;
            s2 = t2;
            h2.push(s2);
        }
        HarmonicTable { h, h2 }
    }

    pub fn n_max(&self) -> usize {
        self.h.len() - 1
    }

    /// `H_n`.
    pub fn h(&self, n: usize) -> f64 {
        self.h[n]
    }

    /// `H_n^(2)`.
    pub fn h2(&self, n: usize) -> f64 {
        self.h2[n]
    }
}

/// `H_n` by direct summation.
pub fn harmonic(n: usize) -> f64 {
    HarmonicTable::new(n).h(n)
}

/// Mean key-comparison cost of QuickMin: `mu_n = 2 (n - H_n)`, with
/// `mu_0 = 0`.
pub fn mu_n(n: usize) -> f64 {
    2.0 * (n as f64 - harmonic(n))
}

/// Closed form for `a_n^2 = E(Y_n - Y)^2`:
/// `(n+1)^{-2} [ 3n/2 + 4 H_n - 4 H_n^(2) + 1/2 ]`. Evaluates to 1/2 at
/// n = 0.
pub fn a_n_sq_exact(n: usize) -> f64 {
    a_n_sq_exact_from(&HarmonicTable::new(n), n)
}

/// As [`a_n_sq_exact`] but reusing a prebuilt table for bulk evaluation.
pub fn a_n_sq_exact_from(table: &HarmonicTable, n: usize) -> f64 {
    let nf = n as f64;
    (1.5 * nf + 4.0 * table.h(n) - 4.0 * table.h2(n) + 0.5) / ((nf + 1.0) * (nf + 1.0))
}

/// Solve `A_n = (1/n) sum_{k<n} A_k + B_n` (n >= 1) in closed form:
/// `A_n = A_0 + B_n + sum_{k=1}^{n-1} B_k / (k+1)`.
///
/// The closed form is cross-checked against direct iteration of the
/// recurrence to 1e-12 relative; disagreement is an error, not a silent
/// result.
pub fn solve_dnc_recurrence(a0: f64, b: impl Fn(usize) -> f64, n_max: usize) -> Result<Vec<f64>> {
    let mut closed = Vec::with_capacity(n_max + 1);
    closed.push(a0);
    let mut weighted_prefix = 0.0; // sum_{k=1}^{n-1} B_k / (k+1)
    for n in 1..=n_max {
        let bn = b(n);
        closed.push(a0 + bn + weighted_prefix);
        weighted_prefix += bn / (n as f64 + 1.0);
    }

    let mut running_sum = a0; // sum_{k=0}^{n-1} A_k
    for n in 1..=n_max {
        let direct = running_sum / n as f64 + b(n);
        let scale = direct.abs().max(1.0);
        if (direct - closed[n]).abs() > 1e-12 * scale {
            return Err(Error::NonConvergent(format!(
                "recurrence solution mismatch at n = {n}: closed {} vs direct {direct}",
                closed[n]
            )));
        }
        running_sum += direct;
    }
    Ok(closed)
}

/// The inhomogeneous term of the second-moment recurrence:
/// `b_n = 3(n+1)/4 + 4 (1 - H_n / n)` for n >= 1.
pub fn b_n(table: &HarmonicTable, n: usize) -> f64 {
    let nf = n as f64;
    0.75 * (nf + 1.0) + 4.0 * (1.0 - table.h(n) / nf)
}

/// `a_n^2` for all `n <= n_max` via the divide-and-conquer recurrence
/// `(n+1)^2 a_n^2 = (1/n) sum_{k<n} (k+1)^2 a_k^2 + b_n` with `A_0 = 1/2`.
pub fn a_n_sq_via_recurrence(n_max: usize) -> Result<Vec<f64>> {
    if n_max < 1 {
        return Err(Error::Domain("n_max must be at least 1".into()));
    }
    let table = HarmonicTable::new(n_max);
    let solved = solve_dnc_recurrence(0.5, |n| b_n(&table, n), n_max)?;
    Ok(solved
        .into_iter()
        .enumerate()
        .map(|(n, a)| {
            let np1 = n as f64 + 1.0;
            a / (np1 * np1)
        })
        .collect())
}

/// Brute-force moments of the harmonic gap `H_n - H_{N}` for `N` uniform on
/// `{0, ..., n-1}`, plus the closed-form second moment of the affine
/// remainder `W_2` they feed.
#[derive(Clone, Copy, Debug)]
pub struct HarmonicGapReport {
    /// `(1/n) sum_{i=0}^{n-1} (H_n - H_i)`; identically 1.
    pub m1: f64,
    /// `(1/n) sum_{i=0}^{n-1} (H_n - H_i)^2`; identically `2 - H_n / n`.
    pub m2: f64,
    /// `E W_2^2 = 2/(3(n+1)) + (2/(n+1))^2 (1 - H_n/n)`.
    pub e_w2_sq: f64,
}

pub fn harmonic_gap_identities(n: usize) -> Result<HarmonicGapReport> {
    if n < 1 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    let table = HarmonicTable::new(n);
    let hn = table.h(n);
    let mut m1 = 0.0;
    let mut m2 = 0.0;
    for i in 0..n {
        let gap = hn - table.h(i);
        m1 += gap;
        m2 += gap * gap;
    }
    let nf = n as f64;
    m1 /= nf;
    m2 /= nf;
    let np1 = nf + 1.0;
    let e_w2_sq = 2.0 / (3.0 * np1) + (2.0 / np1) * (2.0 / np1) * (1.0 - hn / nf);
    Ok(HarmonicGapReport { m1, m2, e_w2_sq })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_values() {
        let t = HarmonicTable::new(8);
        assert_eq!(t.h(0), 0.0);
        assert_eq!(t.h(1), 1.0);
        assert_eq!(t.h(2), 1.5);
        assert!((t.h(3) - 11.0 / 6.0).abs() < 1e-15);
        assert!((t.h2(2) - 1.25).abs() < 1e-15);
    }

    #[test]
    fn mu_n_values() {
        assert_eq!(mu_n(0), 0.0);
        assert_eq!(mu_n(1), 0.0);
        assert_eq!(mu_n(2), 1.0);
        assert!((mu_n(3) - 7.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn a_n_sq_small_values() {
        assert!((a_n_sq_exact(0) - 0.5).abs() < 1e-15);
        assert!((a_n_sq_exact(1) - 0.5).abs() < 1e-15);
        assert!((a_n_sq_exact(2) - 0.5).abs() < 1e-14);
        assert!((a_n_sq_exact(3) - 31.0 / 72.0).abs() < 1e-14);
    }

    #[test]
    fn recurrence_with_zero_forcing_is_constant() {
        let a = solve_dnc_recurrence(3.25, |_| 0.0, 50).unwrap();
        assert!(a.iter().all(|&x| x == 3.25));
    }

    #[test]
    fn recurrence_with_unit_forcing_gives_harmonic_numbers() {
        let a = solve_dnc_recurrence(0.0, |_| 1.0, 6).unwrap();
        assert_eq!(a[1], 1.0);
        assert_eq!(a[2], 1.5);
        assert!((a[3] - (1.0 + 0.5 + 1.0 / 3.0)).abs() < 1e-15);
        let t = HarmonicTable::new(6);
        for n in 1..=6 {
            assert!((a[n] - t.h(n)).abs() < 1e-14);
        }
    }

    #[test]
    fn recurrence_first_step_matches_hand_value() {
        // b_1 = 3*2/4 + 4*(1 - 1) = 1.5; A_1 = 0.5 + 1.5 = 2 so a_1^2 = 1/2
        let t = HarmonicTable::new(1);
        assert!((b_n(&t, 1) - 1.5).abs() < 1e-15);
        let a = a_n_sq_via_recurrence(1).unwrap();
        assert!((a[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn recurrence_agrees_with_closed_form() {
        let n_max = 2000;
        let via = a_n_sq_via_recurrence(n_max).unwrap();
        let table = HarmonicTable::new(n_max);
        for n in 0..=n_max {
            let exact = a_n_sq_exact_from(&table, n);
            assert!(
                (via[n] - exact).abs() <= 1e-10 * exact,
                "mismatch at n = {n}: {} vs {exact}",
                via[n]
            );
        }
    }

    #[test]
    fn harmonic_gap_hand_values() {
        let r = harmonic_gap_identities(1).unwrap();
        assert_eq!(r.m1, 1.0);
        let r = harmonic_gap_identities(2).unwrap();
        assert!((r.m1 - 1.0).abs() < 1e-15);
        assert!((r.m2 - 1.25).abs() < 1e-15);
        assert!((r.e_w2_sq - (2.0 / 9.0 + (4.0 / 9.0) * 0.25)).abs() < 1e-15);
    }

    #[test]
    fn tail_of_n_a_n_sq_approaches_three_halves() {
        let table = HarmonicTable::new(1 << 14);
        let mut prev_gap = f64::INFINITY;
        for exp in 7..=14 {
            let n = 1usize << exp;
            let gap = (n as f64 * a_n_sq_exact_from(&table, n) - 1.5).abs();
            assert!(gap < prev_gap, "|n a_n^2 - 3/2| not shrinking at n = {n}");
            prev_gap = gap;
        }
    }
}
