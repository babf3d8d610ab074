//! Reproducible seed streams and per-replication seed tapes.
//!
//! A [`SeedStream`] is fully determined by `(master seed, stream index)`, so
//! replication `r` of an experiment can be regenerated in isolation and
//! results do not depend on worker count or scheduling.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Hard cap on how many seeds a tape will materialize while scanning for an
/// arrival. Scanning past this means the caller asked for a pivot whose
/// expected arrival time is astronomically large; fail loudly instead of
/// exhausting memory.
pub const TAPE_SCAN_CAP: usize = 1 << 26;

/// A deterministic stream of seeds, uniform on the open unit interval.
///
/// ChaCha8's 64-bit stream counter gives independent-quality streams for
/// distinct indices under one master seed.
#[derive(Clone, Debug)]
pub struct SeedStream {
    rng: ChaCha8Rng,
    master_seed: u64,
    stream_index: u64,
}

impl SeedStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(stream_index);
        SeedStream {
            rng,
            master_seed,
            stream_index,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    /// Next seed, uniform on (0, 1). The sampler yields [0, 1); an exact 0.0
    /// is rejected so seeds stay in the open interval.
    pub fn next_seed(&mut self) -> f64 {
        loop {
            let u: f64 = self.rng.random();
            if u > 0.0 {
                return u;
            }
        }
    }

    /// Standard normal draw, used for mixture samples.
    pub fn next_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }
}

impl Iterator for SeedStream {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        Some(self.next_seed())
    }
}

enum TapeSource {
    Stream(SeedStream),
    Fixed(std::vec::IntoIter<f64>),
}

/// Lazily materialized seed sequence `U_1, U_2, ...` for one replication.
///
/// Exact ties are regenerated (stream source) or rejected (fixed source) so
/// that keys are almost surely distinct, matching the model's assumption.
pub struct SeedTape {
    source: TapeSource,
    seeds: Vec<f64>,
    seen: HashSet<u64>,
}

impl SeedTape {
    pub fn from_stream(stream: SeedStream) -> Self {
        SeedTape {
            source: TapeSource::Stream(stream),
            seeds: Vec::new(),
            seen: HashSet::new(),
        }
    }

    /// A tape over an explicit seed list. Seeds must be distinct and lie in
    /// the open unit interval; reading past the end is an error.
    pub fn from_seeds(seeds: Vec<f64>) -> Result<Self> {
        let mut seen = HashSet::new();
        for &u in &seeds {
            if !(u > 0.0 && u < 1.0) {
                return Err(Error::Domain(format!(
                    "seed {u} is outside the open unit interval"
                )));
            }
            if !seen.insert(u.to_bits()) {
                return Err(Error::Domain(format!("duplicate seed {u} in fixed list")));
            }
        }
        Ok(SeedTape {
            source: TapeSource::Fixed(seeds.into_iter()),
            seeds: Vec::new(),
            seen,
        })
    }

    /// Seed `U_i`, 1-based, materializing the tape as needed.
    pub fn seed(&mut self, i: usize) -> Result<f64> {
        debug_assert!(i >= 1);
        while self.seeds.len() < i {
            self.grow()?;
        }
        Ok(self.seeds[i - 1])
    }

    /// The first `n` seeds as a slice.
    pub fn prefix(&mut self, n: usize) -> Result<&[f64]> {
        self.seed(n)?;
        Ok(&self.seeds[..n])
    }

    pub fn materialized(&self) -> &[f64] {
        &self.seeds
    }

    /// Hand back the underlying stream (positioned after everything the tape
    /// consumed) so the caller can keep drawing from the same replication.
    pub fn into_stream(self) -> Option<SeedStream> {
        match self.source {
            TapeSource::Stream(s) => Some(s),
            TapeSource::Fixed(_) => None,
        }
    }

    fn grow(&mut self) -> Result<()> {
        if self.seeds.len() >= TAPE_SCAN_CAP {
            return Err(Error::CapExceeded(format!(
                "seed tape exceeded {TAPE_SCAN_CAP} materialized seeds"
            )));
        }
        match &mut self.source {
            TapeSource::Stream(stream) => loop {
                let u = stream.next_seed();
                if self.seen.insert(u.to_bits()) {
                    self.seeds.push(u);
                    return Ok(());
                }
                // exact tie: regenerate
            },
            TapeSource::Fixed(iter) => match iter.next() {
                Some(u) => {
                    self.seeds.push(u);
                    Ok(())
                }
                None => Err(Error::Domain("fixed seed list exhausted".into())),
            },
        }
    }
}
