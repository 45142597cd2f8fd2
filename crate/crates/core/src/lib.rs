//! Solvers for coalitional manipulation of elections under incomplete
//! information.
//!
//! Non-manipulators' votes are known only as partial orders. The library
//! decides, for a preferred candidate:
//!
//! - possible / necessary winner (PW / NW) over joint extensions,
//! - coalitional manipulation (CM) with complete information,
//! - weak manipulation (WM): some manipulator votes plus some extension make
//!   the candidate the unique winner,
//! - strong manipulation (SM): some manipulator votes win in every extension,
//!
//! via exhaustive, budget-bounded oracles ([`oracle`]) and, where they exist,
//! polynomial-time algorithms ([`poly`]) that are contractually equivalent to
//! the oracles. [`gadgets`] generates the hardness-reduction instances with
//! built-in audits, and [`harness`] cross-checks poly solvers against the
//! oracle on random instances.

pub mod error;
pub mod flow;
pub mod gadgets;
pub mod harness;
pub mod oracle;
pub mod poly;
pub mod prefs;
pub mod rules;

pub use error::{Error, Result};
pub use oracle::{ManipulationInstance, OracleOptions, ProblemKind, SolveResult, Witness};
pub use prefs::{CandidateSet, LinearVote, PartialProfile, PartialVote, Profile};
pub use rules::{MarginMatrix, Rule, ScoreVector};
