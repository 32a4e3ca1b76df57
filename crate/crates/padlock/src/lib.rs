//! Padlock solitaire toolkit.
//!
//! A padlock solitaire instance is a set of locked boxes, each opened by its
//! own key. A few keys are retained at the start; every other key is hidden
//! inside some box. Opening boxes releases the keys they hold, which may open
//! further boxes. The game is won when every box can be opened.
//!
//! The crate provides:
//!
//! - [`game`]: the engine — instances, play under sequential or round-based
//!   opening, win detection, solvency checks, and the exact state ratios that
//!   drive the martingale arguments.
//! - [`schemes`]: every key-distribution scheme (uniform, weighted,
//!   permutation, paired triples, degree-conditioned, bipartite,
//!   multipartite, key-ring), each with exhaustive indexing, uniform
//!   sampling, and exact win counting.
//! - [`formulas`]: the closed-form counts and probabilities (Cayley, rooted
//!   forests, parking functions, hypergraph spanning counts, Catalan numbers,
//!   bipartite/multipartite spanning-tree counts, the multiaffine state-value
//!   function and its determinant form, nilpotent-matrix counts).
//! - [`gf`]: prime-field matrix arithmetic and the linear key-distribution
//!   schemes, with brute-force nilpotency counting and the round-uniformity
//!   check.
//! - [`cards`]: card-deck realizations — labeled pile games, lazy talon play,
//!   threshold (ballot) events, clock solitaire, and both Catalan deals.
//! - [`estimate`]: seeded, counter-derived Monte Carlo with exact Wilson
//!   intervals, plus exact martingale verification by posterior enumeration.
//!
//! All exact values are arbitrary-precision integers or rationals; floating
//! point appears only in decimal renderings of estimates.

pub mod cards;
pub mod estimate;
pub mod formulas;
pub mod game;
pub mod gf;
pub mod schemes;

use num::BigUint;

/// Default ceiling on the number of outcomes an exhaustive operation may
/// enumerate before refusing with [`Error::TooLarge`].
pub const DEFAULT_BUDGET: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("order violation: {0}")]
    OrderViolation(String),
    #[error("degenerate state: {0}")]
    DegenerateState(String),
    #[error("scheme is not equiprobable")]
    NotEquiprobable,
    #[error("outcome space of size {size} exceeds budget {budget}")]
    TooLarge { size: BigUint, budget: u64 },
    #[error("outcome index out of range")]
    IndexOutOfRange,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("inconsistent history: {0}")]
    InconsistentHistory(String),
}

pub type Result<T> = std::result::Result<T, Error>;
