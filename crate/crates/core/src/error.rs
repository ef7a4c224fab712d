use thiserror::Error;

use crate::bqf::Bqf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("valuation of zero is undefined")]
    ZeroValuation,
    #[error("invalid scalar context: {0}")]
    InvalidContext(String),
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("form {0} is not positive definite")]
    NotDefinite(Bqf),
    #[error("form {form} is not p-primitive for p = {p}")]
    NotPrimitive { form: Bqf, p: u64 },
    #[error("form {form} has Legendre class {class} at p = {p}; the orbit needs +1")]
    WrongLegendreClass { form: Bqf, p: u64, class: i8 },
    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("contraction needs degree at least 2, got {0}")]
    DegreeTooSmall(usize),
    #[error("contraction needs p > degree (p = {p}, degree = {degree})")]
    PrimeTooSmall { p: u64, degree: usize },
    #[error("precision exhausted applying {op} at precision {precision}")]
    PrecisionExhausted { op: String, precision: u64 },
    #[error("coefficient {0} has negative valuation; expression is not integral")]
    NonIntegral(String),
    #[error("invalid weight: {0}")]
    InvalidWeight(String),
    #[error("context mismatch: {0}")]
    ContextMismatch(String),
    #[error("invalid module: {0}")]
    InvalidModule(String),
    #[error("module is not balanced (defect {0})")]
    NotBalanced(i64),
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0}")]
    Io(String),
}
