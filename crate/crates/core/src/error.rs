use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("binomial expansion needs at least one formal variable")]
    BothArgumentsNumeric,
    #[error("variable {0} appears more than once")]
    DuplicateVariable(String),
    #[error("variable {0} already occurs in the series")]
    VariableCollision(String),
    #[error("product is undefined: {0}")]
    UndefinedProduct(String),
    #[error("missing structure constant for ({u}, {v}, {n})")]
    MissingTableEntry { u: String, v: String, n: i64 },
    #[error("L(1) is not locally nilpotent on {0}")]
    NotLocallyNilpotent(String),
    #[error("module is not strongly graded: {0}")]
    NotStronglyGraded(String),
    #[error("map is not a module homomorphism: {0}")]
    NotAHomomorphism(String),
    #[error("no rational function within the given bounds fits the series")]
    NoFit,
    #[error("rational fit is underdetermined; enlarge the window")]
    AmbiguousFit,
    #[error("pole hit while evaluating at the given point")]
    PoleHit,
    #[error("invalid commutative algebra data: {0}")]
    SpecInvalid(String),
    #[error("structure is not finite dimensional")]
    NotFiniteDimensional,
    #[error("schema error: {0}")]
    Schema(String),
    #[error("invariant {name} violated: {witness}")]
    InvariantViolation { name: String, witness: String },
    #[error("Lie modules are over different algebras")]
    AlgebraMismatch,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("syntax error at line {line}, column {column}: expected {expected}")]
    Syntax {
        line: usize,
        column: usize,
        expected: String,
    },
    #[error("cannot evaluate expression: {0}")]
    Eval(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Schema(e.to_string())
    }
}
