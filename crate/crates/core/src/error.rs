use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid sparsity: k = {k} must satisfy 1 <= k <= n = {n}")]
    InvalidSparsity { k: usize, n: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("branch count p = {p} does not divide channel length n = {n}")]
    BlockPartition { n: usize, p: usize },

    #[error("requested {requested} virtual measurements but only {available} distinct non-constant extraction patterns exist")]
    PatternCapacity { requested: usize, available: usize },

    #[error("invalid recovery config: {0}")]
    InvalidRecovery(String),

    #[error("exhaustive search over C({n}, {k}) = {count} subsets exceeds the budget of {budget}")]
    CombinatorialBudget {
        n: usize,
        k: usize,
        count: u128,
        budget: u128,
    },

    #[error("statistic undefined over an empty set of estimates")]
    EmptyStatistic,

    #[error("cannot start worker pool: {0}")]
    WorkerPool(String),

    #[error("config key `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("{path}: line {line}: {reason}")]
    Csv {
        path: String,
        line: u64,
        reason: String,
    },

    #[error("{0}")]
    Plot(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
