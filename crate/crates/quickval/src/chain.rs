//! The QuickVal pivot chain: nested open intervals bracketing the target
//! quantile `alpha`, together with the pivot arrivals that produce them.
//!
//! Record `k` (1-based) captures `C_k = (L_{k-1}, R_{k-1}, tau_k, U_{tau_k})`:
//! the interval the k-th pivot was drawn from, its arrival index among the
//! seeds, and its value. The interval then shrinks toward `alpha` on the
//! pivot's side.

use crate::error::{Error, Result};
use crate::stream::{SeedStream, SeedTape};

/// One pivot step: the interval it was found in, its arrival index (if it
/// came from scanning a concrete seed sequence), and its value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PivotRecord {
    /// Left end of the interval the pivot was drawn from (`L_{k-1}`).
    pub lo: f64,
    /// Right end of the interval the pivot was drawn from (`R_{k-1}`).
    pub hi: f64,
    /// 1-based arrival index `tau_k` among the scanned seeds; `None` when the
    /// pivot was drawn directly from its conditional law instead.
    pub tau: Option<usize>,
    /// The pivot seed `U_{tau_k}`.
    pub pivot: f64,
}

impl PivotRecord {
    pub fn interval_len(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Clone, Debug)]
pub struct PivotChain {
    alpha: f64,
    records: Vec<PivotRecord>,
    lo: f64,
    hi: f64,
    /// Number of arrivals examined so far (1-based cursor: next seed is
    /// `U_{cursor + 1}`).
    cursor: usize,
}

impl PivotChain {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::Domain(format!(
                "alpha must lie in [0, 1], got {alpha}"
            )));
        }
        Ok(PivotChain {
            alpha,
            records: Vec::new(),
            lo: 0.0,
            hi: 1.0,
            cursor: 0,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn records(&self) -> &[PivotRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// The open interval still bracketing `alpha` after the last pivot.
    pub fn current_interval(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    /// Arrivals examined so far.
    pub fn cursor(&self) -> usize {
        self.cursor
    }

    fn push_pivot(&mut self, tau: Option<usize>, u: f64) -> Result<&PivotRecord> {
        if u == self.alpha {
            return Err(Error::PivotHitsAlpha(self.alpha));
        }
        self.records.push(PivotRecord {
            lo: self.lo,
            hi: self.hi,
            tau,
            pivot: u,
        });
        if u < self.alpha {
            self.lo = u;
        } else {
            self.hi = u;
        }
        Ok(self.records.last().unwrap())
    }

    /// Offer arrival `U_i = u`. Arrivals must be offered in order; the seed
    /// becomes the next pivot exactly when it falls in the current interval.
    pub fn offer(&mut self, i: usize, u: f64) -> Result<Option<&PivotRecord>> {
        debug_assert_eq!(i, self.cursor + 1, "arrivals must be offered in order");
        self.cursor = i;
        if self.lo < u && u < self.hi {
            self.push_pivot(Some(i), u).map(Some)
        } else {
            Ok(None)
        }
    }

    /// Scan the rest of a seed slice for the next arrival in the current
    /// interval. Returns `true` if a pivot was appended before the slice ran
    /// out.
    pub fn extend_within(&mut self, seeds: &[f64]) -> Result<bool> {
        while self.cursor < seeds.len() {
            let u = seeds[self.cursor];
            if self.offer(self.cursor + 1, u)?.is_some() {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Scan a growing tape until the next arrival (the exact coupling).
    pub fn extend_scanning(&mut self, tape: &mut SeedTape) -> Result<&PivotRecord> {
        loop {
            let u = tape.seed(self.cursor + 1)?;
            if self.offer(self.cursor + 1, u)?.is_some() {
                return Ok(self.records.last().unwrap());
            }
        }
    }

    /// Append a pivot drawn directly from its conditional law: given the
    /// chain so far, the next pivot is uniform on the current interval, no
    /// matter how many non-qualifying seeds the literal scan would skip. This
    /// extends the chain in distribution without materializing those seeds;
    /// the arrival index is recorded as unknown.
    pub fn extend_direct(&mut self, stream: &mut SeedStream) -> Result<&PivotRecord> {
        for _ in 0..128 {
            let u = self.lo + stream.next_seed() * (self.hi - self.lo);
            if self.lo < u && u < self.hi && u != self.alpha {
                return self.push_pivot(None, u);
            }
            // rounding pinned the draw to the boundary; redraw
        }
        Err(Error::NonConvergent(
            "direct pivot draws kept collapsing onto the interval boundary".into(),
        ))
    }

    /// Check the structural invariants; used by tests and debug paths.
    pub fn check_invariants(&self) -> Result<()> {
        let mut lo = 0.0;
        let mut hi = 1.0;
        let mut last_tau = 0usize;
        for (idx, rec) in self.records.iter().enumerate() {
            let k = idx + 1;
            if rec.lo != lo || rec.hi != hi {
                return Err(Error::Domain(format!(
                    "record {k} interval ({}, {}) does not chain from ({lo}, {hi})",
                    rec.lo, rec.hi
                )));
            }
            if !(rec.lo < rec.pivot && rec.pivot < rec.hi) {
                return Err(Error::Domain(format!("record {k} pivot not interior")));
            }
            if let Some(tau) = rec.tau {
                if tau <= last_tau {
                    return Err(Error::Domain(format!("record {k} tau not increasing")));
                }
                last_tau = tau;
            }
            if rec.pivot < self.alpha {
                lo = rec.pivot;
            } else {
                hi = rec.pivot;
            }
            if !(lo <= self.alpha && self.alpha <= hi) {
                return Err(Error::Domain(format!(
                    "alpha {} escaped interval ({lo}, {hi}) at record {k}",
                    self.alpha
                )));
            }
        }
        Ok(())
    }
}

/// Extension strategies for operations that consume a chain of unknown
/// required length.
pub trait ExtendChain {
    fn extend(&mut self, chain: &mut PivotChain) -> Result<()>;
}

/// Extend by drawing each next pivot from its conditional law.
pub struct DirectDraws<'a>(pub &'a mut SeedStream);

impl ExtendChain for DirectDraws<'_> {
    fn extend(&mut self, chain: &mut PivotChain) -> Result<()> {
        chain.extend_direct(self.0).map(|_| ())
    }
}

/// Extend by scanning the tape for the next literal arrival.
pub struct ScanTape<'a>(pub &'a mut SeedTape);

impl ExtendChain for ScanTape<'_> {
    fn extend(&mut self, chain: &mut PivotChain) -> Result<()> {
        chain.extend_scanning(self.0).map(|_| ())
    }
}

/// Refuse to extend: for callers that prebuilt the whole chain.
pub struct NoExtension;

impl ExtendChain for NoExtension {
    fn extend(&mut self, _chain: &mut PivotChain) -> Result<()> {
        Err(Error::Domain(
            "chain exhausted and no extension source was provided".into(),
        ))
    }
}

/// Build a pivot chain with `k` records by scanning the tape.
pub fn build_pivot_chain(tape: &mut SeedTape, alpha: f64, k: usize) -> Result<PivotChain> {
    if k == 0 {
        return Err(Error::Domain("chain length must be at least 1".into()));
    }
    let mut chain = PivotChain::new(alpha)?;
    for _ in 0..k {
        chain.extend_scanning(tape)?;
    }
    Ok(chain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::{SeedStream, SeedTape};

    fn tape(seeds: &[f64]) -> SeedTape {
        SeedTape::from_seeds(seeds.to_vec()).unwrap()
    }

    #[test]
    fn first_record_is_the_unit_interval() {
        let mut t = SeedTape::from_stream(SeedStream::new(9, 0));
        let chain = build_pivot_chain(&mut t, 0.3, 1).unwrap();
        let r = &chain.records()[0];
        assert_eq!((r.lo, r.hi, r.tau), (0.0, 1.0, Some(1)));
    }

    #[test]
    fn alpha_zero_always_shrinks_from_the_right() {
        let mut t = SeedTape::from_stream(SeedStream::new(11, 4));
        let chain = build_pivot_chain(&mut t, 0.0, 8).unwrap();
        for rec in chain.records() {
            assert_eq!(rec.lo, 0.0);
        }
        // R_k = U_{tau_k} for every k
        for w in chain.records().windows(2) {
            assert_eq!(w[1].hi, w[0].pivot);
        }
        chain.check_invariants().unwrap();
    }

    #[test]
    fn hand_simulated_second_record() {
        // seeds (0.5, 0.9, 0.3), alpha = 0.25: 0.9 misses (0, 0.5), 0.3 hits
        let mut t = tape(&[0.5, 0.9, 0.3]);
        let chain = build_pivot_chain(&mut t, 0.25, 2).unwrap();
        let c2 = &chain.records()[1];
        assert_eq!((c2.lo, c2.hi, c2.tau, c2.pivot), (0.0, 0.5, Some(3), 0.3));
    }

    #[test]
    fn interval_lengths_strictly_decrease() {
        let mut t = SeedTape::from_stream(SeedStream::new(5, 2));
        let chain = build_pivot_chain(&mut t, 0.7, 10).unwrap();
        for w in chain.records().windows(2) {
            assert!(w[1].interval_len() < w[0].interval_len());
        }
    }

    #[test]
    fn pivot_hitting_alpha_is_an_error() {
        let mut t = tape(&[0.25]);
        assert!(matches!(
            build_pivot_chain(&mut t, 0.25, 1),
            Err(Error::PivotHitsAlpha(_))
        ));
    }

    #[test]
    fn direct_extension_draws_inside_the_interval() {
        let mut t = tape(&[0.5, 0.9, 0.3]);
        let mut chain = build_pivot_chain(&mut t, 0.25, 2).unwrap();
        let mut stream = SeedStream::new(1, 1);
        for _ in 0..50 {
            chain.extend_direct(&mut stream).unwrap();
        }
        chain.check_invariants().unwrap();
        assert_eq!(chain.len(), 52);
        let last = chain.records().last().unwrap();
        assert!(last.tau.is_none());
        assert!(last.interval_len() < 0.5);
    }
}
