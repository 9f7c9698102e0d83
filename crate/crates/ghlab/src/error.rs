use thiserror::Error;

/// A single failed metric axiom, with the offending indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NonzeroDiagonal(usize),
    Negative(usize, usize),
    Asymmetric(usize, usize),
    /// `dist[i][j] > dist[i][k] + dist[k][j]`, stored as (i, j, k).
    Triangle(usize, usize, usize),
    ZeroOffDiagonal(usize, usize),
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::NonzeroDiagonal(i) => write!(f, "nonzero diagonal at {i}"),
            Violation::Negative(i, j) => write!(f, "negative entry at ({i},{j})"),
            Violation::Asymmetric(i, j) => write!(f, "asymmetry at ({i},{j})"),
            Violation::Triangle(i, j, k) => write!(f, "triangle at ({i},{j}) via {k}"),
            Violation::ZeroOffDiagonal(i, j) => write!(f, "zero distance at ({i},{j})"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square")]
    NotSquare,
    #[error("metric axioms violated: {}", list(.0))]
    AxiomViolation(Vec<Violation>),
    #[error("empty set")]
    EmptySet,
    #[error("index {0} out of range")]
    BadIndex(usize),
    #[error("function differs on a zero-distance pair ({0},{1})")]
    InfiniteLipschitz(usize, usize),
    #[error("empty subspace")]
    EmptySubspace,
    #[error("support not contained in the ball: point {0}")]
    SupportViolation(usize),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("embedding not distance preserving at ({0},{1})")]
    NotDistancePreserving(usize, usize),
    #[error("eta below half the distortion")]
    EtaTooSmall,
    #[error("host mismatch")]
    HostMismatch,
    #[error("primal transport requires a metric Lipschitz seminorm")]
    PrimalUnavailable,
    #[error("radius must be positive")]
    NonPositiveRadius,
    #[error("search budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("radius condition violated: {0}")]
    RadiusConditionViolated(String),
    #[error("codomain of the first passage is not the domain of the second")]
    DomainMismatch,
    #[error("radius lies between the two diameters")]
    RadiusGap,
    #[error("no local norm bound: a ball is the whole space")]
    NoLocalBound,
    #[error("lift set is empty")]
    Infeasible,
    #[error("linear program: {0}")]
    Lp(String),
    #[error("parse error: {0}")]
    Parse(String),
}

fn list(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
