//! Observation sets of piecewise-constant signals under a shifting sampling
//! grid.
//!
//! A signal made of `m` constant regions is sampled on a grid of period `T`
//! whose offset is unknown. Each grid placement yields a vector of per-region
//! sample counts. This crate computes which vectors can occur (forward) and
//! what a set of observed vectors reveals about the region lengths (inverse),
//! using exact rational arithmetic throughout.
//!
//! - [`oracle`] counts samples by brute force and sweeps every critical offset.
//! - [`enumerator`] builds the same set from closed-form extension rules.
//! - [`cells`] enumerates the cells of the `f`-hypercube.
//! - [`inference`] solves the inverse problem.

pub mod cells;
pub mod check;
pub mod enumerator;
pub mod formats;
pub mod inference;
pub mod oracle;
pub mod random;
pub mod rational;
pub mod signal;

pub use enumerator::{full_observation_set, CellProfile, EngineError, FullObservationSet, OffsetPartition};
pub use oracle::{oracle_observation_set, ObservationVector, Offset};
pub use rational::Rational;
pub use signal::{RegionSpec, SignalError, SignalSpec};
