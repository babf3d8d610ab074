//! A laboratory for the comparison costs of QuickSelect-family selection
//! algorithms under one shared source of randomness.
//!
//! Keys are modelled by seeds: uniform(0, 1) variables mapped to symbol
//! strings through a probabilistic source's inverse probability transform.
//! Comparing two keys costs either 1 (key comparisons) or the index of the
//! first differing symbol (symbol comparisons). Running QuickSelect,
//! QuickQuant, QuickMin, and QuickVal for every input size on one seed
//! sequence — always pivoting on the first arrival and preserving arrival
//! order in recursion — couples the finite runs with each other and with
//! their scaled cost limits, which is what makes residuals like
//! `sqrt(n) (S_n / n - S)` directly observable.
//!
//! What's here:
//!
//! - [`source`]: probabilistic sources and seed-to-symbol expansion.
//! - [`cost`]: cost models `beta(u, v)` and empirical tameness estimation.
//! - [`stream`]: reproducible seed streams keyed by (master seed, index).
//! - [`chain`] / [`tree`]: the pivot chain of nested intervals and the seed
//!   BST whose quantile path reproduces it node for node.
//! - [`select`]: the executable algorithms with per-pivot cost ledgers.
//! - [`integrals`] / [`limits`]: exact cost integrals over intervals, the
//!   truncated limit `S`, the mixing scale `sigma_infinity`, and a Dickman
//!   sampler.
//! - [`exact`]: closed-form and recurrence routes to the exact second moment
//!   of the QuickMin residual.
//! - [`experiments`]: reproducible parallel Monte Carlo drivers.
//! - [`stats`] / [`report`] / [`config`]: KS distance and moment summaries,
//!   manifests and output files, flat key/value configs.
//!
//! The `examples/` directory exercises each capability end to end; the
//! `quickval` binary exposes the same drivers as subcommands.

pub mod chain;
pub mod config;
pub mod cost;
pub mod error;
pub mod exact;
pub mod experiments;
pub mod integrals;
pub mod limits;
pub mod report;
pub mod select;
pub mod source;
pub mod stats;
pub mod stream;
pub mod tree;

pub use chain::{build_pivot_chain, PivotChain, PivotRecord};
pub use cost::{estimate_tameness, CostKind, CostModel, Tameness};
pub use error::{Error, Result};
pub use select::{quickmin_cost, quickquant_cost, quickselect_cost, quickval_cost, CostLedger};
pub use source::{expand_seed, SourceSpec};
pub use stream::{SeedStream, SeedTape};
