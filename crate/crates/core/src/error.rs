use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("epsilon {value} outside {range}")]
    EpsilonOutOfRange { value: f64, range: &'static str },

    #[error("joint support of {size} scenarios exceeds the cap of {cap}; use the Monte Carlo path")]
    SupportTooLarge { size: u128, cap: u64 },

    #[error("feature {0} has no nonzero coefficient; drop it before normalizing")]
    EmptyColumn(usize),

    #[error("instance is not column-normalized (feature {0} has max coefficient != 1)")]
    NotNormalized(usize),

    #[error("matrix entry ({row}, {col}) = {value} is not 0/1")]
    NotUnweighted { row: usize, col: usize, value: f64 },

    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },

    #[error("infeasible sparsity targets: {0}")]
    InfeasibleSparsity(String),

    #[error("per-group budget floor({eps_prime} * {r} / {s_col}) is zero; raise r or eps'")]
    BudgetUnderflow { eps_prime: f64, r: usize, s_col: usize },

    #[error("adversary produced bonus {bonus} at arrival {index}; bonuses must be nonnegative")]
    AdversaryViolation { index: usize, bonus: f64 },

    #[error("brute-force search stopped after {steps} steps without finishing (limit {limit})")]
    BruteForceTooLarge { steps: u64, limit: u64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
