//! Instances `X = A · Y`, feature distributions, generators and samplers.

pub mod dist;
pub mod generators;
mod instance;
mod sampler;

pub use dist::{expected_max_independent, max_cdf, max_survival, DiscreteDistribution};
pub use generators::{CoefficientLaw, FeatureLaw, FeatureSpec};
pub use instance::{Entry, LinearInstance, Realization};
pub use sampler::{JointSampler, NaPermutation};
