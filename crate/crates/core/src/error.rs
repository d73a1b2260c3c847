use thiserror::Error;

/// Every failure the library reports. The CLI maps each variant to an exit
/// code through [`Error::exit_code`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("point is not on the boundary of KS_{level}")]
    NotOnBoundary { level: u32 },
    #[error("level 0 has no cells")]
    EmptyDomain,
    #[error("ray travels along side {side} of the boundary")]
    DegenerateRay { side: usize },
    #[error("segment passes through the scale-{level} lattice point {point}")]
    VertexCollision { level: u32, point: String },
    #[error("no compatible initial condition at level {level}: {reason}")]
    NoCompatible { level: u32, reason: String },
    #[error("no basepoint of type [lr,∅] in any member of the sequence")]
    NoCantorBasepoints,
    #[error("hybrid verdict is undefined for a truncated orbit")]
    TruncatedOrbit,
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("resource limit: {0}")]
    Resource(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Verification(_) => 3,
            Error::Resource(_) => 4,
            Error::Io(_) => 1,
            _ => 2,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
