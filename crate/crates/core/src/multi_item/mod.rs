//! Selection under a cardinality budget `r`.
//!
//! The bucket algorithm handles independent values plus nonnegative
//! adversarial bonuses; the reductions map linearly correlated instances onto
//! it (column sparsity) or onto per-bucket single-item rules (row sparsity,
//! small `r`).

mod bucket;
mod buckets;
mod groups;

pub use bucket::{
    clamp_epsilon, compute_bucket_config, epsilon_floor, run_bucket_algorithm, run_bucket_indexed, run_bucket_on, simulate_bucket,
    BucketConfig, BucketPolicy, BucketReport, BucketRun, Discard, DiscardReason, SelectionTranscript, Step, Take,
};
pub use buckets::{row_sparse_multi, small_r_col_sparse, small_r_mixture, small_r_with_assignment, RowSparseMulti, SmallRColSparse};
pub use groups::{col_sparse_multi, default_eps_prime, merge_takes, unique_features, ColSparseMulti, GroupPartition};
