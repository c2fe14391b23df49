use thiserror::Error;

use crate::semifield::SemifieldId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("the zero element has no multiplicative inverse")]
    InvertZero,

    #[error("power {exponent} of the zero element is undefined")]
    ZeroPower { exponent: String },

    #[error("`{value}` is not a finite element of {semifield}")]
    InvalidValue {
        value: String,
        semifield: SemifieldId,
    },

    #[error("cannot parse `{0}` as a scalar")]
    ParseScalar(String),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("dimension mismatch in {op}: {left:?} vs {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("{op} requires a square matrix, got {rows}x{cols}")]
    NotSquare {
        op: &'static str,
        rows: usize,
        cols: usize,
    },

    #[error("expected a {expected} vector, got a {rows}x{cols} matrix")]
    NotVector {
        expected: &'static str,
        rows: usize,
        cols: usize,
    },

    #[error("matrix and vector must have at least one entry")]
    Empty,

    #[error("conjugate transpose of the zero vector")]
    ZeroVector,

    #[error("matrix is not column-regular: column {column} has only zero entries")]
    NotColumnRegular { column: usize },

    #[error("vector `{name}` must be regular (component {index} is zero)")]
    NotRegular { name: &'static str, index: usize },

    #[error("no solution: Tr = {trace} exceeds the identity")]
    NoSolution { trace: String },

    #[error("no regular solution: Tr = {trace} exceeds the identity")]
    NoRegularSolution { trace: String },

    #[error("spectral radius is zero")]
    ZeroSpectralRadius,

    #[error("vector q must be regular (component {index} is zero)")]
    NonRegularQ { index: usize },

    #[error("infeasible constraints: Tr(B) = {trace} exceeds the identity")]
    InfeasibleConstraints { trace: String },

    #[error("upper constraint unsatisfiable: h^- C B* g = {value} exceeds the identity")]
    UpperConstraintViolated { value: String },

    #[error("internal error: empty solution box at component {component} ({lower} > {upper})")]
    EmptySolutionBox {
        component: usize,
        lower: String,
        upper: String,
    },

    #[error("order {order} exceeds the enumeration limit {limit}")]
    OrderTooLarge { order: usize, limit: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("no feasible point on the grid")]
    EmptyGrid,

    #[error("invalid project: {0}")]
    InvalidProject(String),
}

/// Coarse grouping of errors, used by front-ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Input,
    Dimension,
    Solver,
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        use Error::*;
        match self {
            InvalidValue { .. }
            | ParseScalar(_)
            | Malformed(_)
            | InvalidGrid(_)
            | Empty
            | InvalidProject(_) => ErrorCategory::Input,
            DimensionMismatch { .. } | NotSquare { .. } | NotVector { .. } => {
                ErrorCategory::Dimension
            }
            _ => ErrorCategory::Solver,
        }
    }

    /// Short variant name, stable across releases; used in diagnostics output.
    pub fn name(&self) -> &'static str {
        use Error::*;
        match self {
            InvertZero => "InvertZero",
            ZeroPower { .. } => "ZeroPower",
            InvalidValue { .. } => "InvalidValue",
            ParseScalar(_) => "ParseScalar",
            Malformed(_) => "Malformed",
            DimensionMismatch { .. } => "DimensionMismatch",
            NotSquare { .. } => "NotSquare",
            NotVector { .. } => "NotVector",
            Empty => "Empty",
            ZeroVector => "ZeroVector",
            NotColumnRegular { .. } => "NotColumnRegular",
            NotRegular { .. } => "NotRegular",
            NoSolution { .. } => "NoSolutionCertificate",
            NoRegularSolution { .. } => "NoRegularSolution",
            ZeroSpectralRadius => "ZeroSpectralRadius",
            NonRegularQ { .. } => "NonRegularQ",
            InfeasibleConstraints { .. } => "InfeasibleConstraints",
            UpperConstraintViolated { .. } => "UpperConstraintViolated",
            EmptySolutionBox { .. } => "EmptySolutionBox",
            OrderTooLarge { .. } => "OrderTooLarge",
            InvalidGrid(_) => "InvalidGrid",
            EmptyGrid => "EmptyGrid",
            InvalidProject(_) => "InvalidProject",
        }
    }
}
