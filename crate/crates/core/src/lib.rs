//! Core engine for evolving consistent sets of interval rules.
//!
//! A model is a set of rules; each rule tests every feature against a
//! half-open interval `[lower, upper)` and predicts a binary label vector.
//! Rules inside one model never conflict: their boxes are pairwise disjoint
//! by construction, so prediction needs no conflict-resolution strategy and
//! no rule ordering.
//!
//! Module map:
//!
//! * [`dataset`] - feature/label matrices, per-feature value indexes, folds
//! * [`rule`] - feature tests, boxes, rules, models, prediction
//! * [`cfsbe`] - constrained box enlargement around a seed instance
//! * [`rulegen`] - rule creation: seed, outer box, inner growth, consequent
//! * [`nsga2`] - non-dominated sorting, crowding distance, survivor selection
//! * [`metrics`] - micro-averaged F-Score, fitness, Pareto filtering
//! * [`evolution`] - the mutation-selection loop
//! * [`rng`] - deterministic random source and seed derivation
//!
//! The crate is `no_std` (with `alloc`) and has no dependencies; everything
//! is a pure function of its inputs plus an explicit [`rng::Rng`] value, so
//! runs are reproducible bit for bit from a seed.

#![no_std]

extern crate alloc;

#[cfg(any(test, feature = "test-oracles"))]
extern crate std;

pub mod cfsbe;
pub mod dataset;
pub mod evolution;
pub mod metrics;
pub mod nsga2;
pub mod rng;
pub mod rule;
pub mod rulegen;

#[cfg(feature = "test-oracles")]
pub mod oracle;

pub use dataset::{ColumnNames, Dataset, DatasetError, FoldSplit};
pub use evolution::{
    EvolutionConfig, EvolutionError, GenerationLog, Mutation, MutationWeights, RunResult,
    StopReason,
};
pub use nsga2::FitnessTuple;
pub use rng::Rng;
pub use rule::{DefaultRule, FeatureTest, HyperBox, Individual, ModelError, Rule};
pub use rulegen::RuleGenConfig;
