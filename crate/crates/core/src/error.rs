use thiserror::Error;

/// Errors raised by the library. Every module-level abort maps onto one of
/// these so the CLI can emit a machine-readable record.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported root datum: {0}")]
    UnsupportedDatum(String),
    #[error("lattice choice {lattice} is incompatible with type {label}")]
    IncompatibleLattice { label: String, lattice: String },
    #[error("elements belong to different root data")]
    MixedDatum,
    #[error("element {0} is not in the ball")]
    OutsideBall(String),
    #[error("extended ball requested for a datum with infinite length-zero subgroup ({0})")]
    InfiniteOmega(String),
    #[error("could not parse word {0:?}")]
    BadWord(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("value not stabilized: {0}")]
    Unstabilized(String),
    #[error("cocycle degree mismatch: {0}")]
    CocycleDegree(String),
    #[error("representation error: {0}")]
    Rep(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("cache error: {0}")]
    Cache(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short stable tag used in machine-readable error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::UnsupportedDatum(_) => "unsupported_datum",
            Error::IncompatibleLattice { .. } => "incompatible_lattice",
            Error::MixedDatum => "mixed_datum",
            Error::OutsideBall(_) => "outside_ball",
            Error::InfiniteOmega(_) => "infinite_omega",
            Error::BadWord(_) => "bad_word",
            Error::Invariant(_) => "invariant_violation",
            Error::Unstabilized(_) => "unstabilized",
            Error::CocycleDegree(_) => "cocycle_degree",
            Error::Rep(_) => "representation",
            Error::Config(_) => "config",
            Error::Cache(_) => "cache",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
