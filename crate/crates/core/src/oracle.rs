//! Brute-force ground truth.
//!
//! Nothing in this module knows about the closed-form count rules: a grid is
//! placed at offset `d`, and the samples landing in each half-open region
//! `[B_{i-1}, B_i)` are counted directly. Exhaustive enumeration sweeps the
//! finitely many offsets at which a grid point meets a region boundary.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

use crate::enumerator::OffsetPartition;
use crate::rational::Rational;
use crate::signal::SignalSpec;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("offset {0} is outside [0, 1)")]
pub struct OffsetRangeError(pub Rational);

/// A grid offset in `[0, 1)`, in units of the sampling period.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Offset(Rational);

impl Offset {
    pub fn new(delta: Rational) -> Result<Self, OffsetRangeError> {
        if delta.is_negative() || delta >= 1 {
            return Err(OffsetRangeError(delta));
        }
        Ok(Offset(delta))
    }

    pub fn zero() -> Self {
        Offset(Rational::zero())
    }

    /// Reduces any rational into `[0, 1)`.
    pub fn wrapping(value: &Rational) -> Self {
        Offset(value.fract_floor())
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    pub fn into_inner(self) -> Rational {
        self.0
    }
}

impl fmt::Display for Offset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// Per-region sample counts `(eta_1, ..., eta_m)` from one grid placement.
/// Ordered lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct ObservationVector(Vec<u64>);

impl ObservationVector {
    pub fn new(counts: Vec<u64>) -> Self {
        ObservationVector(counts)
    }

    pub fn counts(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Sum of counts over regions `start..=start + extent`.
    pub fn window_sum(&self, start: usize, extent: usize) -> u64 {
        self.0[start..=start + extent].iter().sum()
    }

    /// Returns a copy with `count` appended.
    pub fn extended(&self, count: u64) -> Self {
        let mut counts = self.0.clone();
        counts.push(count);
        ObservationVector(counts)
    }
}

impl From<Vec<u64>> for ObservationVector {
    fn from(counts: Vec<u64>) -> Self {
        ObservationVector(counts)
    }
}

impl fmt::Display for ObservationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

// Number of integers k >= 0 with lo <= d + k < hi, for 0 <= lo.
fn grid_points_in(lo: &Rational, hi: &Rational, d: &Rational) -> u64 {
    let first: BigInt = (lo - d).ceil();
    let past: BigInt = (hi - d).ceil();
    let first = first.max(BigInt::from(0));
    let count = (past - first).max(BigInt::from(0));
    count.to_u64().expect("region sample count exceeds u64")
}

/// Counts the grid points `d, d + 1, d + 2, ...` falling in each region.
pub fn count_samples(signal: &SignalSpec, d: &Offset) -> ObservationVector {
    let bounds = signal.boundaries();
    ObservationVector(
        bounds
            .windows(2)
            .map(|w| grid_points_in(&w[0], &w[1], d.value()))
            .collect(),
    )
}

/// Distance from each region's left end to the first grid point inside it,
/// measured geometrically from the boundary positions.
pub fn region_offsets(signal: &SignalSpec, d: &Offset) -> Vec<Offset> {
    let bounds = signal.boundaries();
    bounds[..signal.len()]
        .iter()
        .map(|left| {
            let first_point = Rational::from_bigint((left - d.value()).ceil()) + d.value();
            Offset::new(first_point - left).expect("geometric offset lies in [0, 1)")
        })
        .collect()
}

/// Offsets `d` in `[0, 1)` at which some grid point sits exactly on a region
/// boundary, deduplicated and ascending. Always contains 0.
pub fn critical_offsets(signal: &SignalSpec) -> Vec<Offset> {
    let set: BTreeSet<Offset> = signal.boundaries().iter().map(Offset::wrapping).collect();
    set.into_iter().collect()
}

/// Every observation vector some grid offset produces. Counts are constant
/// on `[c_j, c_{j+1})` between consecutive critical offsets; both the
/// critical offsets and the interval midpoints are probed.
pub fn oracle_observation_set(signal: &SignalSpec) -> BTreeSet<ObservationVector> {
    let crit = critical_offsets(signal);
    let mut out = BTreeSet::new();
    for (j, c) in crit.iter().enumerate() {
        out.insert(count_samples(signal, c));
        let next = crit.get(j + 1).map(|o| o.value().clone()).unwrap_or_else(Rational::one);
        let mid = Offset::new(c.value().midpoint(&next)).expect("midpoint inside [0, 1)");
        out.insert(count_samples(signal, &mid));
    }
    out
}

/// The piecewise-constant offset-to-vector map, read off at each critical
/// offset and with equal neighbours merged.
pub fn oracle_partition(signal: &SignalSpec) -> OffsetPartition {
    let mut breakpoints = Vec::new();
    let mut vectors: Vec<ObservationVector> = Vec::new();
    for c in critical_offsets(signal) {
        let v = count_samples(signal, &c);
        if vectors.last() == Some(&v) {
            continue;
        }
        if !vectors.is_empty() {
            breakpoints.push(c);
        }
        vectors.push(v);
    }
    OffsetPartition::from_parts(breakpoints, vectors)
}
