//! Simulator and exact-analysis toolkit for Arthur-Merlin proof systems
//! whose verifiers are two-way finite automata with quantum and classical
//! states.
//!
//! The crate models verifiers with a constant-size quantum register driven
//! by unitaries and projective measurements ([`machine`]), all-powerful
//! honest provers and exhaustive deterministic adversary families
//! ([`prover`]), and an exact engine that solves the reachable-configuration
//! graph as an absorbing Markov chain ([`engine`]). Five concrete protocols
//! ship in [`protocols`], each with one-sided error: members are accepted
//! with probability 1, non-members rejected with probability above 1 − ε
//! against every prover.
//!
//! Start with the runnable examples (`cargo run --example analyze_middle`),
//! or the `qamfa` binary for analyze / verify / sweep / simulate runs.

pub mod analysis;
pub mod cli;
pub mod engine;
pub mod error;
pub mod format;
pub mod linalg;
pub mod machine;
pub mod prover;
pub mod protocols;
pub mod report;
pub mod suites;

pub use error::{Error, Result};
