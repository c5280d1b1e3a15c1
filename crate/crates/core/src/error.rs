use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("variable left-hand side in rule {0}")]
    VariableLhs(String),
    #[error("free variable in right-hand side of rule {0}")]
    FreeVariable(String),
    #[error("arity mismatch for symbol {symbol}: expected {expected}, found {found}")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("no constructor constant in signature")]
    NoConstructorConstant,
    #[error("position out of range: {0}")]
    PositionOutOfRange(String),
    #[error("relative closure budget exceeded")]
    RelativeBudgetExceeded,
    #[error("symbol {0} is not interpreted")]
    Uninterpreted(String),
    #[error("degree undefined for non-triangular scope")]
    NonTriangularScope,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("malformed certificate: {0}")]
    Certificate(String),
    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
