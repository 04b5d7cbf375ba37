//! Cells of the unit hypercube of `(f_1, ..., f_m)`.
//!
//! The hyperplanes `f_i + ... + f_j = integer` cut `(0, 1)^m` into cells on
//! which the full observation set (as a set of deficit patterns) is constant.
//! Cells are discovered by sampling: first a structured lattice, then random
//! rationals. The expected count is `m!`; the atlas records whether that many
//! were found rather than assuming it.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

use crate::enumerator::{full_observation_set_capped, m3_cell_of, CellProfile, EngineError};
use crate::random::{random_fraction, rng_from_seed};
use crate::rational::Rational;
use crate::signal::{fraction_genericity, SignalSpec, DEFAULT_MAX_REGIONS};

pub const DEFAULT_CELL_BUDGET: usize = 20_000;

/// Denominator bound for the random phase.
const RANDOM_MAX_DENOMINATOR: i64 = 1000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CellError {
    #[error("cell enumeration needs at least one region")]
    NoRegions,
    #[error("{m} regions exceeds the limit of {cap}")]
    TooManyRegions { m: usize, cap: usize },
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// A deficit pattern: `true` at position `j` means `eta_j = n_j - 1`.
pub type Pattern = Vec<bool>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CellEntry {
    pub profile: CellProfile,
    /// An exact generic `f`-vector inside the cell.
    pub representative: Vec<Rational>,
    /// The full observation set of any signal in this cell, as deficit
    /// patterns relative to `n`.
    #[serde(skip)]
    pub patterns: BTreeSet<Pattern>,
}

impl CellEntry {
    pub fn inequalities(&self) -> Vec<String> {
        self.profile.inequalities()
    }

    /// The conventional three-region wording, when `m = 3`.
    pub fn m3_inequalities(&self) -> Option<&'static str> {
        m3_cell_of(&self.profile).map(|c| c.inequalities)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CellAtlas {
    pub m: usize,
    pub seed: u64,
    pub budget: usize,
    /// Sorted by profile.
    pub cells: Vec<CellEntry>,
    /// `m!`, or `None` if it overflows `u64`.
    pub expected: Option<u64>,
}

impl CellAtlas {
    pub fn is_complete(&self) -> bool {
        self.expected == Some(self.cells.len() as u64)
    }

    pub fn find(&self, profile: &CellProfile) -> Option<&CellEntry> {
        self.cells
            .binary_search_by(|c| c.profile.cmp(profile))
            .ok()
            .map(|i| &self.cells[i])
    }
}

pub fn factorial(m: usize) -> Option<u64> {
    (1..=m as u64).try_fold(1u64, |acc, k| acc.checked_mul(k))
}

fn deficit_patterns(fs: &[Rational]) -> Result<BTreeSet<Pattern>, EngineError> {
    let parts: Vec<(u64, Rational)> = fs.iter().map(|f| (2, f.clone())).collect();
    let signal = SignalSpec::from_nf(&parts).expect("n = 2 and 0 < f < 1");
    let full = full_observation_set_capped(&signal, fs.len())?;
    Ok(full
        .vectors
        .iter()
        .map(|v| v.counts().iter().map(|&c| c == 1).collect())
        .collect())
}

/// All of `{1, ..., m}/(m+1)` in each coordinate, if that is at most
/// `budget` points. Every cell has a representative on this lattice.
fn lattice(m: usize, budget: usize) -> Vec<Vec<Rational>> {
    let side = m as u64;
    let total = side.checked_pow(m as u32).and_then(|t| t.to_usize());
    match total {
        Some(total) if total <= budget => {}
        _ => return Vec::new(),
    }
    let den = m as i64 + 1;
    let mut out = Vec::new();
    let mut digits = vec![1i64; m];
    loop {
        out.push(digits.iter().map(|&d| Rational::new(d, den)).collect());
        let mut pos = m;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if digits[pos] < m as i64 {
                digits[pos] += 1;
                break;
            }
            digits[pos] = 1;
        }
    }
}

pub fn enumerate_cells(m: usize, budget: usize, seed: u64) -> Result<CellAtlas, CellError> {
    enumerate_cells_capped(m, budget, seed, DEFAULT_MAX_REGIONS)
}

pub fn enumerate_cells_capped(
    m: usize,
    budget: usize,
    seed: u64,
    max_regions: usize,
) -> Result<CellAtlas, CellError> {
    if m == 0 {
        return Err(CellError::NoRegions);
    }
    if m > max_regions {
        return Err(CellError::TooManyRegions { m, cap: max_regions });
    }
    let expected = factorial(m);
    let mut found: BTreeMap<CellProfile, Vec<Rational>> = BTreeMap::new();
    let consider = |fs: Vec<Rational>, found: &mut BTreeMap<CellProfile, Vec<Rational>>| {
        if fraction_genericity(&fs).generic {
            found.entry(CellProfile::from_fractions(&fs)).or_insert(fs);
        }
    };

    for fs in lattice(m, budget) {
        consider(fs, &mut found);
    }
    let mut rng = rng_from_seed(seed);
    for _ in 0..budget {
        if expected.is_some_and(|e| found.len() as u64 >= e) {
            break;
        }
        let fs = (0..m).map(|_| random_fraction(&mut rng, RANDOM_MAX_DENOMINATOR)).collect();
        consider(fs, &mut found);
    }

    let cells = found
        .into_iter()
        .map(|(profile, representative)| {
            let patterns = deficit_patterns(&representative)?;
            Ok(CellEntry { profile, representative, patterns })
        })
        .collect::<Result<Vec<_>, EngineError>>()?;
    Ok(CellAtlas { m, seed, budget, cells, expected })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_counts() {
        assert_eq!(enumerate_cells(1, 100, 0).unwrap().cells.len(), 1);
        let two = enumerate_cells(2, 100, 0).unwrap();
        assert_eq!(two.cells.len(), 2);
        let ineq: Vec<_> = two.cells.iter().map(|c| c.inequalities()).collect();
        assert_eq!(ineq, vec![vec!["f1+f2<1".to_string()], vec!["f1+f2>1".to_string()]]);
        let three = enumerate_cells(3, 100, 0).unwrap();
        assert_eq!(three.cells.len(), 6);
        assert!(three.is_complete());
        let mut idx: Vec<_> =
            three.cells.iter().map(|c| m3_cell_of(&c.profile).unwrap().index).collect();
        idx.sort();
        assert_eq!(idx, vec![1, 2, 3, 4, 5, 6]);
    }

    #[test]
    fn patterns_have_m_plus_one_members() {
        let atlas = enumerate_cells(4, DEFAULT_CELL_BUDGET, 3).unwrap();
        assert_eq!(atlas.cells.len(), 24);
        for c in &atlas.cells {
            assert_eq!(c.patterns.len(), 5);
            assert_eq!(CellProfile::from_fractions(&c.representative), c.profile);
        }
    }

    #[test]
    fn lattice_alone_covers_every_cell() {
        for m in 1..=5 {
            let profiles: BTreeSet<CellProfile> = lattice(m, usize::MAX)
                .into_iter()
                .filter(|fs| fraction_genericity(fs).generic)
                .map(|fs| CellProfile::from_fractions(&fs))
                .collect();
            assert_eq!(profiles.len() as u64, factorial(m).unwrap());
        }
        assert!(lattice(5, 10).is_empty());
    }

    #[test]
    fn deterministic_per_seed() {
        let a = enumerate_cells(5, 5000, 11).unwrap();
        let b = enumerate_cells(5, 5000, 11).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn errors() {
        assert_eq!(enumerate_cells(0, 10, 0), Err(CellError::NoRegions));
        assert_eq!(
            enumerate_cells(13, 10, 0),
            Err(CellError::TooManyRegions { m: 13, cap: 12 })
        );
    }
}
