//! Prophet inequalities for linearly correlated arrivals.
//!
//! Arrival values are `X = A · Y` for a sparse nonnegative matrix `A` and
//! independent finite-support features `Y`. The crate provides:
//!
//! - [`model`]: distributions, instances, sparsity measures, generators and
//!   joint samplers.
//! - [`oracle`]: exact scenario enumeration (prophet benchmark, exact policy
//!   value, optimal online stopping by backward induction) and seeded Monte
//!   Carlo estimators.
//! - [`single_item`]: fixed-threshold and inclusion-threshold policies.
//! - [`stream`]: augmented streams and the adversary suite.
//! - [`multi_item`]: cardinality-constrained selection (bucket algorithm and
//!   its reductions).
//!
//! The crate is `no_std` + `alloc` when the default `std` feature is off.
//! With `std`, scenario enumeration and Monte Carlo trials fan out over rayon
//! using fixed chunk boundaries, so results are bit-identical either way.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod error;
pub mod model;
pub mod multi_item;
pub mod oracle;
pub mod policy;
pub mod rng;
pub mod single_item;
pub mod stream;

mod par;

pub use error::{Error, Result};
pub use model::{DiscreteDistribution, JointSampler, LinearInstance, NaPermutation, Realization};
pub use oracle::{Estimate, OracleConfig};
pub use policy::{Policy, Session, ThresholdPolicy};
