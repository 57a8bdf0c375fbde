use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown domain `{0}` (expected unit-square, square, or lshape)")]
    UnknownDomain(String),
    #[error("unknown benchmark `{0}`")]
    UnknownBenchmark(String),
    #[error("triangle id {id} out of range (mesh has {len} triangles)")]
    InvalidTriangle { id: usize, len: usize },
    #[error("vertex id {id} out of range (mesh has {len} vertices)")]
    InvalidVertex { id: usize, len: usize },
    #[error("triangle {0} is degenerate")]
    DegenerateTriangle(usize),
    #[error("edge ({0}, {1}) is shared by more than two triangles")]
    NonConforming(usize, usize),
    #[error("bisection count must be at least 1")]
    InvalidBisectionCount,
    #[error("data assumption {assumption} violated on initial element {element}: {detail}")]
    DataAssumption {
        assumption: &'static str,
        element: usize,
        detail: String,
    },
    #[error("problem has no exact solution")]
    MissingExactSolution,
    #[error("marking parameter theta = {0} outside (0, 1]")]
    InvalidTheta(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("sparse factorization failed: {0}")]
    SingularMatrix(String),
    #[error("relative residual {achieved:.3e} above tolerance {tolerance:.1e}")]
    ResidualTooLarge { achieved: f64, tolerance: f64 },
    #[error("iterative solver did not converge: residual {0:.3e} after {1} iterations")]
    NoConvergence(f64, usize),
    #[error("convergence rate undefined: {0}")]
    InvalidHistory(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
