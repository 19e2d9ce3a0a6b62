use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("variable count mismatch: {left} vs {right}")]
    VarCountMismatch { left: usize, right: usize },

    #[error("variable index {index} out of range for {num_vars} variables")]
    VarIndex { index: usize, num_vars: usize },

    #[error("constant term must be {expected}, found {found}")]
    ConstantTerm { expected: String, found: String },

    #[error("shape mismatch in {op}: {left:?} vs {right:?}")]
    Shape { op: &'static str, left: (usize, usize), right: (usize, usize) },

    #[error("matrix is not nilpotent")]
    NotNilpotent,

    #[error("matrix is singular")]
    Singular,

    #[error("form has nonzero constant term in entry {entry:?}, component {component}")]
    FormConstantTerm { entry: (usize, usize), component: usize },

    #[error("form is not closed: entry {entry:?}, monomial {alpha:?}, components {j} and {k}")]
    NotClosed { entry: (usize, usize), alpha: Vec<u32>, j: usize, k: usize },

    #[error("degenerate bilinear form: {0}")]
    Degenerate(String),

    #[error("associativity relation fails at indices (a,b,c,g) = {0:?}")]
    Associativity([usize; 4]),

    #[error("monomial {exps:?} has weighted degree {degree}, expected 8")]
    NotQuasiHomogeneous { exps: Vec<u32>, degree: u32 },

    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),

    #[error("basis is not adapted: {0}")]
    NotAdapted(String),

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("filtration error: {0}")]
    Filtration(String),

    #[error("mixed Hodge structure is not Hodge-Tate: {0}")]
    NotHodgeTate(String),

    #[error("orbit is not maximally unipotent: {0}")]
    NotMaximallyUnipotent(String),

    #[error("invalid orbit: {0}")]
    InvalidOrbit(String),

    #[error("matrix does not lie in the required graded piece: {0}")]
    NotInGradedPiece(String),

    #[error("connection is not flat: directions ({j},{k}), monomial {alpha:?}")]
    NotFlat { j: usize, k: usize, alpha: Vec<u32> },

    #[error("Gamma is not integrable: d D_{a} != -sum C_{{k,{a}}} dz_k at direction {k}, monomial {alpha:?}")]
    Integrability { a: usize, k: usize, alpha: Vec<u32> },

    #[error("Gamma is not in canonical coordinates: {0}")]
    NotCanonical(String),

    #[error("coordinate change is not simple: f_{j}(0) = {value}")]
    NotSimpleChange { j: usize, value: String },

    #[error("solver level {level}: {source}")]
    Solver { level: usize, source: Box<Error> },

    #[error("master equation residual nonzero in direction {j}, monomial {alpha:?}")]
    MasterEquation { j: usize, alpha: Vec<u32> },

    #[error("parse error: {0}")]
    Parse(String),
}
