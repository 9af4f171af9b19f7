use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("matrix is not nilpotent")]
    NotNilpotent,

    #[error("grading c = (0,0) is trivial")]
    TrivialGrading,

    #[error("invalid word {word:?}: {reason}")]
    InvalidWord { word: Vec<u8>, reason: String },

    #[error("singular element: {0} vanishes")]
    SingularElement(String),

    #[error("missing coefficient for slot `{0}`")]
    MissingCoefficient(String),

    #[error("unsupported case for {op}: {case}")]
    UnsupportedCase { op: &'static str, case: String },

    #[error("integration failed at t = {at}: {reason}")]
    IntegrationFailure { at: f64, reason: String },

    #[error("node ({ix}, {iy}) lacks support for the order-{order} stencil")]
    BoundaryNode { ix: usize, iy: usize, order: u8 },

    #[error("every interior node is singular")]
    AllSingular,

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
