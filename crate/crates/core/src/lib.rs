//! Minimum-size coalitional manipulation of unweighted Borda elections.
//!
//! A coalition of `n` voters wants a distinguished candidate `d` to win (ties
//! count as wins). Given the Borda totals of everybody else, this crate
//! finds small coalitions with three greedy heuristics ([`greedy::reverse`],
//! [`greedy::lslg`], [`greedy::lsla`]), proves optimality with a lower bound
//! and an exact search ([`exact`]), turns column assignments into ballots
//! ([`matrix`]), and generates random and adversarial elections ([`gen`])
//! for batch experiments ([`harness`]).
//!
//! The numeric core is generic over the score integer type ([`Score`]); the
//! aliases below fix it to `i64`.

pub mod election;
pub mod error;
pub mod exact;
pub mod gen;
pub mod greedy;
pub mod harness;
pub mod io;
pub mod matrix;
pub mod scalar;

pub use election::{gaps, tally, verify_manipulation, winners, Candidate, Election, GapVector, ScoreProfile, Vote};
pub use error::{Error, Result};
pub use exact::{exists_manipulation, lower_bound, minimum_manipulators, Budget, Feasibility, OptimalityReport, Proof};
pub use greedy::{choose_score, lsla, lslg, reverse, ScorePool, Status, TiePolicy};
pub use matrix::{
    convert_to_votes, perfect_matching, validate_column_matrix, ColumnMatrix, OccurrenceGraph, VoteMatrix,
};
pub use scalar::Score;

/// Score profile with 64-bit totals.
pub type Profile = ScoreProfile<i64>;
pub type Gaps = GapVector<i64>;
pub type Outcome = greedy::GreedyOutcome<i64>;
pub type ReverseRun = greedy::ReverseOutcome<i64>;
pub type Placement = greedy::Placement<i64>;
