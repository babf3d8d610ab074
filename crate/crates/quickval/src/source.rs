//! Probabilistic sources over a finite alphabet and the inverse probability
//! transform from seeds to symbol strings.
//!
//! A key is an infinite symbol string; under the inverse probability
//! transform `M`, a seed `u` in the open unit interval stands in for the key
//! `M(u)`. Symbols are recovered by iterated interval subdivision: partition
//! the current interval into cells with lengths proportional to the source's
//! (conditional) symbol probabilities, emit the cell containing `u`, and
//! recurse into it. Cells are half-open `[lo, hi)`, so a seed landing on a
//! boundary belongs to the cell on its right.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Depth cap on symbol expansion. Hitting the cap is an error, never a
/// silent truncation, because a truncated expansion would understate costs.
pub const MAX_EXPANSION_DEPTH: usize = 1024;

const PROB_SUM_TOL: f64 = 1e-12;

/// Parameters of a probabilistic source.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum SourceSpec {
    /// Keys are the seeds themselves; no symbol structure. Only meaningful
    /// together with unit comparison cost.
    UniformSeed,
    /// Independent symbols, each drawn from `probs`.
    Memoryless { probs: Vec<f64> },
    /// Symbols form a Markov chain: `initial` for the first symbol, then the
    /// transition row of the previously emitted symbol.
    Markov {
        initial: Vec<f64>,
        transitions: Vec<Vec<f64>>,
    },
}

fn validate_dist(p: &[f64], what: &str) -> Result<()> {
    if p.len() < 2 {
        return Err(Error::Domain(format!(
            "{what}: alphabet size must be at least 2, got {}",
            p.len()
        )));
    }
    for &x in p {
        if !(x > 0.0 && x.is_finite()) {
            return Err(Error::Domain(format!(
                "{what}: probabilities must be strictly positive, got {x}"
            )));
        }
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > PROB_SUM_TOL {
        return Err(Error::Domain(format!(
            "{what}: probabilities sum to {sum}, not 1 within {PROB_SUM_TOL}"
        )));
    }
    Ok(())
}

impl SourceSpec {
    pub fn memoryless(probs: Vec<f64>) -> Result<Self> {
        validate_dist(&probs, "memoryless source")?;
        Ok(SourceSpec::Memoryless { probs })
    }

    pub fn markov(initial: Vec<f64>, transitions: Vec<Vec<f64>>) -> Result<Self> {
        validate_dist(&initial, "markov initial distribution")?;
        if transitions.len() != initial.len() {
            return Err(Error::Domain(format!(
                "markov source: {} transition rows for alphabet of size {}",
                transitions.len(),
                initial.len()
            )));
        }
        for (i, row) in transitions.iter().enumerate() {
            validate_dist(row, &format!("markov transition row {i}"))?;
            if row.len() != initial.len() {
                return Err(Error::Domain(format!(
                    "markov transition row {i} has length {}, expected {}",
                    row.len(),
                    initial.len()
                )));
            }
        }
        Ok(SourceSpec::Markov {
            initial,
            transitions,
        })
    }

    pub fn alphabet_size(&self) -> Option<usize> {
        match self {
            SourceSpec::UniformSeed => None,
            SourceSpec::Memoryless { probs } => Some(probs.len()),
            SourceSpec::Markov { initial, .. } => Some(initial.len()),
        }
    }

    pub fn has_symbols(&self) -> bool {
        !matches!(self, SourceSpec::UniformSeed)
    }

    /// Largest conditional symbol probability: the worst-case factor by which
    /// one more matched symbol shrinks a cylinder. Strictly below 1 for any
    /// valid symbol source, which is what makes cost integrals converge
    /// geometrically.
    pub fn max_symbol_prob(&self) -> Option<f64> {
        let max = |v: &[f64]| v.iter().cloned().fold(0.0_f64, f64::max);
        match self {
            SourceSpec::UniformSeed => None,
            SourceSpec::Memoryless { probs } => Some(max(probs)),
            SourceSpec::Markov {
                initial,
                transitions,
            } => Some(
                transitions
                    .iter()
                    .map(|r| max(r))
                    .fold(max(initial), f64::max),
            ),
        }
    }

    /// Conditional symbol distribution given the previously emitted symbol.
    pub(crate) fn conditional(&self, prev: Option<usize>) -> &[f64] {
        match self {
            SourceSpec::UniformSeed => {
                unreachable!("uniform-seed source has no symbol distribution")
            }
            SourceSpec::Memoryless { probs } => probs,
            SourceSpec::Markov {
                initial,
                transitions,
            } => match prev {
                None => initial,
                Some(s) => &transitions[s],
            },
        }
    }

    /// Iterator over the nested cylinders of the key `M(v)`.
    pub(crate) fn cylinders(&self, v: f64) -> Result<Cylinders<'_>> {
        if !self.has_symbols() {
            return Err(Error::Domain(
                "uniform-seed source has no symbol expansion".into(),
            ));
        }
        check_seed(v)?;
        Ok(Cylinders {
            src: self,
            v,
            lo: 0.0,
            hi: 1.0,
            prev: None,
        })
    }
}

pub(crate) fn check_seed(u: f64) -> Result<()> {
    if u > 0.0 && u < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "seed {u} is outside the open unit interval"
        )))
    }
}

/// Locate the half-open cell of `u` when `(lo, hi)` is partitioned in
/// proportion to `probs`. Returns `(symbol, cell_lo, cell_hi)`.
pub(crate) fn locate_cell(lo: f64, hi: f64, probs: &[f64], u: f64) -> (usize, f64, f64) {
    debug_assert!(lo <= u && u < hi, "u = {u} outside [{lo}, {hi})");
    let width = hi - lo;
    let mut acc = 0.0;
    let last = probs.len() - 1;
    for (s, &p) in probs.iter().enumerate() {
        let cell_lo = lo + acc * width;
        acc += p;
        // pin the final boundary to hi exactly so cells tile the interval
        let cell_hi = if s == last { hi } else { lo + acc * width };
        if u < cell_hi || s == last {
            return (s, cell_lo, cell_hi);
        }
    }
    unreachable!()
}

/// Yields `(symbol, cylinder_lo, cylinder_hi)` per depth for a fixed seed.
pub(crate) struct Cylinders<'a> {
    src: &'a SourceSpec,
    v: f64,
    lo: f64,
    hi: f64,
    prev: Option<usize>,
}

impl Iterator for Cylinders<'_> {
    type Item = (usize, f64, f64);

    fn next(&mut self) -> Option<Self::Item> {
        if self.hi - self.lo <= 0.0 {
            // interval width underflowed; deeper cylinders are numerically void
            return None;
        }
        let probs = self.src.conditional(self.prev);
        let (s, lo, hi) = locate_cell(self.lo, self.hi, probs, self.v);
        self.lo = lo;
        self.hi = hi;
        self.prev = Some(s);
        Some((s, lo, hi))
    }
}

/// First `depth` symbols of `M(u)`.
pub fn expand_seed(source: &SourceSpec, u: f64, depth: usize) -> Result<Vec<usize>> {
    if depth == 0 {
        return Err(Error::Domain("expansion depth must be at least 1".into()));
    }
    if depth > MAX_EXPANSION_DEPTH {
        return Err(Error::ExpansionCap(MAX_EXPANSION_DEPTH));
    }
    let mut out = Vec::with_capacity(depth);
    for (s, _, _) in source.cylinders(u)?.take(depth) {
        out.push(s);
    }
    if out.len() < depth {
        return Err(Error::ExpansionCap(out.len()));
    }
    Ok(out)
}
