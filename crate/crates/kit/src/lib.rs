//! Randomized sweeps over the inequality checkers of `godbersen-core`.

pub mod experiment;
pub mod random;
pub mod translation;
