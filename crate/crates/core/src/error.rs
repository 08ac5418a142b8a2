use crate::arena::VertexId;

/// Errors shared by all game operations in this crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid arena: {}", .0.join("; "))]
    InvalidArena(Vec<String>),
    #[error("expected a 2-player arena but vertex {0} is random")]
    NotTwoPlayer(VertexId),
    #[error("annotation covers {found} vertices, arena has {expected}")]
    NotTotal { expected: usize, found: usize },
    #[error("strategy for {player:?} has no choice at vertex {vertex}")]
    IncompleteStrategy {
        player: crate::arena::Player,
        vertex: VertexId,
    },
    #[error("enumeration budget exceeded: {pairs} strategy pairs, budget {budget}")]
    BudgetExceeded { pairs: u128, budget: u128 },
    #[error("game is not stopping: absorption is not almost sure from every vertex")]
    NotStopping,
    #[error("missing escape probability for vertex {0}")]
    MissingProbability(VertexId),
    #[error("escape probability at vertex {0} is outside (0,1)")]
    ProbabilityRange(VertexId),
    #[error("probability assumptions (A0)-(A2) violated for a generated scheme; this is a bug")]
    AssumptionsViolated,
    #[error("transition probability at vertex {0} is not dyadic")]
    NonDyadic(VertexId),
    #[error("discount factor must satisfy 0 < lambda < 1")]
    InvalidDiscount,
    #[error("rewards must be integers for this reduction")]
    NonIntegerRewards,
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{0}")]
    Semantic(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
