use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid rank {rank} for family {family}")]
    InvalidRank { family: char, rank: usize },

    #[error("vectors do not form a base: {0}")]
    NotABase(String),

    #[error("vector is not in the span of the given base")]
    NotInSpan,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("type D flag with middle block {middle} cannot pick between the two fork vertices")]
    VeryEvenAmbiguity { middle: usize },

    #[error("unmarked labels do not generate the fixed Levi root system: {0}")]
    LeviMismatch(String),

    #[error("vertex {0} is not marked")]
    NotMarked(usize),

    #[error("{what} exceeded budget of {limit}")]
    BudgetExceeded { what: &'static str, limit: usize },

    #[error("{context}: {numerator} is not divisible by {denominator}")]
    DivisibilityViolation {
        context: &'static str,
        numerator: u64,
        denominator: u64,
    },

    #[error("parity violation: part {part} has multiplicity {multiplicity}")]
    ParityViolation { part: u32, multiplicity: usize },

    #[error("partition sums to {sum}, expected {expected}")]
    SumMismatch { sum: usize, expected: usize },

    #[error("very even orthogonal partitions are not supported")]
    VeryEvenUnsupported,

    #[error("invalid gl block: {0}")]
    InvalidBlock(String),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("induction chain mismatch at step {step}: {detail}")]
    ChainMismatch { step: usize, detail: String },

    #[error("unsupported family: {0}")]
    UnsupportedFamily(String),

    #[error("unsupported merge: {0}")]
    UnsupportedMerge(String),

    #[error("non-integral order: {0}")]
    NonIntegralOrder(String),

    #[error("rho image has order {actual}, expected {expected}")]
    SurjectivityFailure { expected: u64, actual: u64 },

    #[error("order mismatch for {what}: expected {expected}, got {actual}")]
    OrderMismatch {
        what: &'static str,
        expected: u64,
        actual: u64,
    },

    #[error("non-integral count: {0}")]
    NonIntegralCount(String),

    #[error("twist at vertex {0} moves the Levi subsystem and has no action on the center")]
    LeviNotPreserved(usize),

    #[error("rho is not a homomorphism: {0}")]
    HomomorphismViolation(String),
}
