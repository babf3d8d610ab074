//! Comparison-cost models: unit key comparisons and source-specific symbol
//! comparisons, plus empirical tameness estimation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::source::{check_seed, locate_cell, SourceSpec, MAX_EXPANSION_DEPTH};

/// Declared tameness parameters: `beta(u, t) <= c * (t - u)^(-epsilon)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tameness {
    pub c: f64,
    pub epsilon: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum CostKind {
    /// Every comparison of distinct keys costs exactly 1.
    KeyComparisons,
    /// Cost is the first index at which the two symbol strings differ.
    SymbolComparisons(SourceSpec),
}

/// Evaluator for the source-specific comparison cost `beta(u, v)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    kind: CostKind,
    tameness: Option<Tameness>,
    max_depth: usize,
}

impl CostModel {
    pub fn key_comparisons() -> Self {
        CostModel {
            kind: CostKind::KeyComparisons,
            tameness: None,
            max_depth: MAX_EXPANSION_DEPTH,
        }
    }

    pub fn symbol_comparisons(source: SourceSpec) -> Result<Self> {
        if !source.has_symbols() {
            return Err(Error::Domain(
                "symbol-comparisons cost needs a source with symbols".into(),
            ));
        }
        Ok(CostModel {
            kind: CostKind::SymbolComparisons(source),
            tameness: None,
            max_depth: MAX_EXPANSION_DEPTH,
        })
    }

    /// Declare tameness parameters `(c, epsilon)` with `c > 0` and
    /// `0 <= epsilon < 1`.
    pub fn with_tameness(mut self, c: f64, epsilon: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::Domain(format!(
                "tameness c must be positive, got {c}"
            )));
        }
        if !(0.0..1.0).contains(&epsilon) {
            return Err(Error::Domain(format!(
                "tameness epsilon must lie in [0, 1), got {epsilon}"
            )));
        }
        self.tameness = Some(Tameness { c, epsilon });
        Ok(self)
    }

    pub fn with_max_depth(mut self, max_depth: usize) -> Self {
        self.max_depth = max_depth;
        self
    }

    pub fn kind(&self) -> &CostKind {
        &self.kind
    }

    pub fn is_symbol(&self) -> bool {
        matches!(self.kind, CostKind::SymbolComparisons(_))
    }

    pub fn source(&self) -> Option<&SourceSpec> {
        match &self.kind {
            CostKind::KeyComparisons => None,
            CostKind::SymbolComparisons(s) => Some(s),
        }
    }

    pub fn max_depth(&self) -> usize {
        self.max_depth
    }

    /// Declared tameness. Unit cost is `(1, 0)`-tame by construction; symbol
    /// cost reports whatever the caller declared.
    pub fn declared_tameness(&self) -> Option<Tameness> {
        match self.kind {
            CostKind::KeyComparisons => Some(Tameness {
                c: 1.0,
                epsilon: 0.0,
            }),
            CostKind::SymbolComparisons(_) => self.tameness,
        }
    }

    /// Comparison cost of the keys behind seeds `u` and `v`.
    ///
    /// Unit cost returns 1; symbol cost returns the 1-based index of the
    /// first symbol at which the two expansions disagree.
    pub fn beta(&self, u: f64, v: f64) -> Result<f64> {
        check_seed(u)?;
        check_seed(v)?;
        if u == v {
            return Err(Error::IdenticalKeys(u));
        }
        match &self.kind {
            CostKind::KeyComparisons => Ok(1.0),
            CostKind::SymbolComparisons(src) => {
                // Walk the shared cell: while the expansions agree the two
                // seeds sit in the same cell, so one subdivision serves both.
                let mut lo = 0.0;
                let mut hi = 1.0;
                let mut prev = None;
                for index in 1..=self.max_depth {
                    let probs = src.conditional(prev);
                    let (su, u_lo, u_hi) = locate_cell(lo, hi, probs, u);
                    let (sv, _, _) = locate_cell(lo, hi, probs, v);
                    if su != sv {
                        return Ok(index as f64);
                    }
                    lo = u_lo;
                    hi = u_hi;
                    prev = Some(su);
                }
                Err(Error::ExpansionCap(self.max_depth))
            }
        }
    }
}

/// Result of scanning a grid of seed pairs for the smallest tameness
/// constant compatible with a given `epsilon`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TamenessEstimate {
    pub c_hat: f64,
    pub epsilon: f64,
    pub grid_size: usize,
    /// The pair `(u, t)` attaining the maximum of `beta(u, t) (t-u)^epsilon`.
    pub argmax: (f64, f64),
}

/// Empirical smallest tameness constant over a grid of pairs `0 < u < t < 1`:
/// `c_hat = max beta(u, t) * (t - u)^epsilon`. A lower bound for any true
/// tameness constant.
pub fn estimate_tameness(
    cost: &CostModel,
    epsilon: f64,
    grid_size: usize,
) -> Result<TamenessEstimate> {
    if epsilon < 0.0 {
        return Err(Error::Domain(format!(
            "tameness epsilon must be nonnegative, got {epsilon}"
        )));
    }
    if grid_size < 2 {
        return Err(Error::Domain(format!(
            "grid size must be at least 2, got {grid_size}"
        )));
    }
    let step = 1.0 / (grid_size as f64 + 1.0);
    let points: Vec<f64> = (1..=grid_size).map(|i| i as f64 * step).collect();
    let mut c_hat = 0.0;
    let mut argmax = (points[0], points[1]);
    for (i, &u) in points.iter().enumerate() {
        for &t in &points[i + 1..] {
            let candidate = cost.beta(u, t)? * (t - u).powf(epsilon);
            if candidate > c_hat {
                c_hat = candidate;
                argmax = (u, t);
            }
        }
    }
    Ok(TamenessEstimate {
        c_hat,
        epsilon,
        grid_size,
        argmax,
    })
}
