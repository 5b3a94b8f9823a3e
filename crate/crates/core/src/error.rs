use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("index {index} out of range for list of length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("invalid inclusion: {0}")]
    InvalidInclusion(String),
    #[error("list mismatch: {0}")]
    ListMismatch(String),
    #[error("mass mismatch: {left} vs {right}")]
    MassMismatch { left: String, right: String },
    #[error("zero total mass")]
    ZeroMass,
    #[error("schema: {0}")]
    Schema(String),
    #[error("not a permutation: {0:?}")]
    NotPermutation(Vec<usize>),
    #[error("chain at level -1 has no boundary")]
    EmptyLevel,
    #[error("complex not face-closed: {0}")]
    NotFaceClosed(String),
    #[error("inconsistent overlap: reductions onto the shared list differ")]
    InconsistentOverlap,
    #[error("incompatible horn: {0}")]
    IncompatibleHorn(String),
    #[error("missing face: {0}")]
    MissingFace(String),
    #[error("section not natural: {0}")]
    NotNatural(String),
    #[error("data complex is not path-connected; components: {0:?}")]
    NotPathConnected(Vec<Vec<usize>>),
    #[error("witness enumeration empty: {0}")]
    NoWitness(String),
    #[error("variable budget exceeded: {variables} variables, {constraints} constraints (budget {budget})")]
    BudgetExceeded { variables: usize, constraints: usize, budget: usize },
    #[error("solver invariant violated: {0}")]
    SolverInvariant(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("config: {0}")]
    Config(String),
    #[error("ingestion: {0}")]
    Ingest(String),
}

pub type Result<T> = std::result::Result<T, Error>;
