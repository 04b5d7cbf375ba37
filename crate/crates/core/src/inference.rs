//! The inverse problem: what a set of observed count vectors reveals.
//!
//! Three layers, each usable on its own:
//!
//! 1. Direct rules. A coordinate seen at two values pins `n_i`. A window
//!    whose count sum is seen at two values pins `kappa` for that window.
//! 2. Length bounds from window sums alone. One observed sum `W` confines the
//!    window length to `(W - 1, W + 1)`; sums `W` and `W + 1` confine it to
//!    `(W, W + 1)`.
//! 3. Exhaustive hypothesis search over `n` candidates and hypercube cells.
//!    A hypothesis survives when its full observation set contains every
//!    observed vector.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::cells::{enumerate_cells_capped, CellAtlas, CellError, DEFAULT_CELL_BUDGET};
use crate::enumerator::{window_inequality, window_label, CellProfile};
use crate::oracle::ObservationVector;
use crate::rational::Rational;
use crate::signal::DEFAULT_MAX_REGIONS;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InferenceError {
    #[error("observation set is empty")]
    Empty,
    #[error("region count must be at least 1")]
    NoRegions,
    #[error("observation {index} has {found} counts, expected {expected}")]
    WrongLength { index: usize, found: usize, expected: usize },
    #[error("observation {index} has a zero count for region {region}")]
    ZeroCount { index: usize, region: usize },
    #[error("region {region} shows counts {low} and {high}; at most two adjacent values can occur")]
    CoordinateSpread { region: usize, low: u64, high: u64 },
    #[error("window {label} shows sums {low} and {high}; at most two adjacent values can occur")]
    WindowSpread { label: String, low: u64, high: u64 },
    #[error("window {label} has count deficit {deficit}, impossible for {size} region(s)")]
    InfeasibleWindow { label: String, deficit: i64, size: usize },
    #[error("no hypothesis explains all observations")]
    NoSurvivors,
    #[error("n_cap must be at least 1")]
    BadNCap,
    #[error(transparent)]
    Cells(#[from] CellError),
}

/// A nonempty set of count vectors of equal length `m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ObservationSet {
    m: usize,
    vectors: BTreeSet<ObservationVector>,
}

impl ObservationSet {
    pub fn new(m: usize, vectors: Vec<ObservationVector>) -> Result<Self, InferenceError> {
        if m == 0 {
            return Err(InferenceError::NoRegions);
        }
        if vectors.is_empty() {
            return Err(InferenceError::Empty);
        }
        for (index, v) in vectors.iter().enumerate() {
            if v.len() != m {
                return Err(InferenceError::WrongLength { index, found: v.len(), expected: m });
            }
            if let Some(region) = v.counts().iter().position(|&c| c == 0) {
                return Err(InferenceError::ZeroCount { index, region: region + 1 });
            }
        }
        let set = ObservationSet { m, vectors: vectors.into_iter().collect() };
        for region in 0..m {
            let (low, high) = set.coordinate_range(region);
            if high - low > 1 {
                return Err(InferenceError::CoordinateSpread { region: region + 1, low, high });
            }
        }
        Ok(set)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn vectors(&self) -> &BTreeSet<ObservationVector> {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    fn coordinate_range(&self, region: usize) -> (u64, u64) {
        let vals = self.vectors.iter().map(|v| v.counts()[region]);
        (vals.clone().min().unwrap(), vals.max().unwrap())
    }

    /// Distinct count sums observed on the window `start..=start + extent`.
    pub fn window_sums(&self, start: usize, extent: usize) -> BTreeSet<u64> {
        self.vectors.iter().map(|v| v.window_sum(start, extent)).collect()
    }
}

/// What the observations say about one region's `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum NStatus {
    Determined { n: u64 },
    /// Only one count `eta` was seen; `n` is `eta` or `eta + 1`.
    Ambiguous { low: u64, high: u64 },
}

impl NStatus {
    pub fn determined(&self) -> Option<u64> {
        match *self {
            NStatus::Determined { n } => Some(n),
            NStatus::Ambiguous { .. } => None,
        }
    }

    /// Candidate `n` values allowed by the count rule, widened to `n_cap`
    /// consecutive values above the observed count when ambiguous.
    pub fn candidates(&self, n_cap: usize) -> Vec<u64> {
        match *self {
            NStatus::Determined { n } => vec![n],
            NStatus::Ambiguous { low, .. } => {
                (0..n_cap as u64).map(|k| low + k).filter(|&n| n >= 2).collect()
            }
        }
    }
}

impl fmt::Display for NStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NStatus::Determined { n } => write!(f, "{n}"),
            NStatus::Ambiguous { low, high } => write!(f, "{low} or {high}"),
        }
    }
}

pub fn infer_n(set: &ObservationSet) -> Vec<NStatus> {
    (0..set.m)
        .map(|region| {
            let (low, high) = set.coordinate_range(region);
            if low == high {
                NStatus::Ambiguous { low, high: low + 1 }
            } else {
                NStatus::Determined { n: high }
            }
        })
        .collect()
}

/// What is known about `kappa = floor(f_start + ... + f_{start+extent})`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WindowConstraint {
    pub start: usize,
    pub extent: usize,
    /// Smallest value of `kappa` consistent with the observations.
    pub kappa: u32,
    /// `kappa` is known exactly; otherwise it is `kappa` or `kappa + 1`.
    pub tight: bool,
}

impl WindowConstraint {
    /// E.g. `"1<f1+f2+f3<2"`, or `"0<f1+f2<2"` when not tight.
    pub fn render(&self) -> String {
        if self.tight {
            window_inequality(self.start, self.extent, self.kappa)
        } else {
            let label = window_label("f", self.start, self.extent);
            format!("{}<{label}<{}", self.kappa, self.kappa + 2)
        }
    }

    pub fn admits(&self, kappa: u32) -> bool {
        kappa == self.kappa || (!self.tight && kappa == self.kappa + 1)
    }
}

/// Window constraints plus the windows that had to be skipped because some
/// `n` in them is not determined.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WindowAnalysis {
    pub constraints: Vec<WindowConstraint>,
    pub unconstrained: Vec<(usize, usize)>,
}

/// For each window with all `n` known, the observed deficits
/// `sum n - sum eta` take values in `{kappa, kappa + 1}`.
pub fn window_sum_constraints(
    set: &ObservationSet,
    n_status: &[NStatus],
) -> Result<WindowAnalysis, InferenceError> {
    let mut constraints = Vec::new();
    let mut unconstrained = Vec::new();
    for start in 0..set.m {
        for extent in 0..set.m - start {
            let sums = set.window_sums(start, extent);
            let (low, high) = (*sums.first().unwrap(), *sums.last().unwrap());
            if high - low > 1 {
                return Err(InferenceError::WindowSpread {
                    label: window_label("eta", start, extent),
                    low,
                    high,
                });
            }
            let ns: Option<Vec<u64>> =
                n_status[start..=start + extent].iter().map(NStatus::determined).collect();
            let Some(ns) = ns else {
                unconstrained.push((start, extent));
                continue;
            };
            let n_sum: u64 = ns.iter().sum();
            // deficits outside 0..=extent+1 cannot come from any signal
            let infeasible = |deficit: i64| InferenceError::InfeasibleWindow {
                label: window_label("eta", start, extent),
                deficit,
                size: extent + 1,
            };
            let (Some(least), Some(most)) = (n_sum.checked_sub(high), n_sum.checked_sub(low))
            else {
                return Err(infeasible(n_sum as i64 - high as i64));
            };
            if most > extent as u64 + 1 {
                return Err(infeasible(most as i64));
            }
            let constraint = if least != most {
                WindowConstraint { start, extent, kappa: least as u32, tight: true }
            } else {
                // one deficit d: kappa in {d - 1, d}, clipped to 0..=extent
                let lo = least.saturating_sub(1);
                let hi = least.min(extent as u64);
                WindowConstraint { start, extent, kappa: lo as u32, tight: lo == hi }
            };
            constraints.push(constraint);
        }
    }
    Ok(WindowAnalysis { constraints, unconstrained })
}

/// An open interval for the total length of a window, in units of `T`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LengthBound {
    pub start: usize,
    pub extent: usize,
    pub lower: u64,
    pub upper: u64,
}

impl LengthBound {
    pub fn width(&self) -> u64 {
        self.upper - self.lower
    }

    pub fn render(&self) -> String {
        format!(
            "{} in ({}T, {}T)",
            window_label("R", self.start, self.extent),
            self.lower,
            self.upper
        )
    }
}

/// Bounds for every window from its observed count sums: width 2 from a
/// single sum, width 1 from two adjacent sums.
pub fn length_bounds(set: &ObservationSet) -> Result<Vec<LengthBound>, InferenceError> {
    let mut out = Vec::new();
    for start in 0..set.m {
        for extent in 0..set.m - start {
            let sums = set.window_sums(start, extent);
            let (low, high) = (*sums.first().unwrap(), *sums.last().unwrap());
            let (lower, upper) = match high - low {
                0 => (low - 1, low + 1),
                1 => (low, high),
                _ => {
                    return Err(InferenceError::WindowSpread {
                        label: window_label("eta", start, extent),
                        low,
                        high,
                    })
                }
            };
            out.push(LengthBound { start, extent, lower, upper });
        }
    }
    Ok(out)
}

/// A candidate explanation: integer parts `n` and the hypercube cell of `f`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Hypothesis {
    pub n: Vec<u64>,
    pub cell: CellProfile,
    /// An exact `f`-vector in the cell.
    pub representative: Vec<Rational>,
    pub inequalities: Vec<String>,
}

fn cartesian(candidates: &[Vec<u64>]) -> Vec<Vec<u64>> {
    candidates.iter().fold(vec![Vec::new()], |acc, options| {
        acc.iter()
            .flat_map(|prefix| {
                options.iter().map(move |&c| {
                    let mut next = prefix.clone();
                    next.push(c);
                    next
                })
            })
            .collect()
    })
}

/// Every `(n, cell)` whose full observation set contains all of `set`.
/// Survivors are ordered by `n`, then by cell profile.
pub fn hypothesis_search(
    set: &ObservationSet,
    atlas: &CellAtlas,
    n_cap: usize,
) -> Result<Vec<Hypothesis>, InferenceError> {
    if n_cap == 0 {
        return Err(InferenceError::BadNCap);
    }
    let status = infer_n(set);
    let candidates: Vec<Vec<u64>> = status.iter().map(|s| s.candidates(n_cap)).collect();
    let mut survivors = Vec::new();
    for ns in cartesian(&candidates) {
        let patterns: Option<Vec<Vec<bool>>> = set
            .vectors
            .iter()
            .map(|v| {
                v.counts()
                    .iter()
                    .zip(&ns)
                    .map(|(&eta, &n)| match n.checked_sub(eta) {
                        Some(0) => Some(false),
                        Some(1) => Some(true),
                        _ => None,
                    })
                    .collect()
            })
            .collect();
        let Some(patterns) = patterns else { continue };
        for cell in &atlas.cells {
            if patterns.iter().all(|p| cell.patterns.contains(p)) {
                survivors.push(Hypothesis {
                    n: ns.clone(),
                    cell: cell.profile.clone(),
                    representative: cell.representative.clone(),
                    inequalities: cell.inequalities(),
                });
            }
        }
    }
    if survivors.is_empty() {
        return Err(InferenceError::NoSurvivors);
    }
    Ok(survivors)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InferenceConfig {
    pub n_cap: usize,
    pub cell_budget: usize,
    pub seed: u64,
    pub max_regions: usize,
}

impl Default for InferenceConfig {
    fn default() -> Self {
        InferenceConfig {
            n_cap: 2,
            cell_budget: DEFAULT_CELL_BUDGET,
            seed: 0,
            max_regions: DEFAULT_MAX_REGIONS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InferenceReport {
    pub m: usize,
    pub observations: Vec<ObservationVector>,
    pub n_status: Vec<NStatus>,
    pub constraints: Vec<WindowConstraint>,
    /// Windows with some undetermined `n`: no constraint extracted.
    pub unconstrained_windows: Vec<(usize, usize)>,
    pub length_bounds: Vec<LengthBound>,
    pub survivors: Vec<Hypothesis>,
    /// Per region, the `n` values appearing among survivors.
    pub survivor_n: Vec<Vec<u64>>,
    pub cells_found: usize,
    pub cells_expected: Option<u64>,
}

impl InferenceReport {
    pub fn atlas_complete(&self) -> bool {
        self.cells_expected == Some(self.cells_found as u64)
    }
}

/// Runs all three layers with a freshly enumerated cell atlas.
pub fn infer(set: &ObservationSet, config: &InferenceConfig) -> Result<InferenceReport, InferenceError> {
    let atlas = enumerate_cells_capped(set.m, config.cell_budget, config.seed, config.max_regions)?;
    infer_with_atlas(set, &atlas, config.n_cap)
}

pub fn infer_with_atlas(
    set: &ObservationSet,
    atlas: &CellAtlas,
    n_cap: usize,
) -> Result<InferenceReport, InferenceError> {
    let n_status = infer_n(set);
    let windows = window_sum_constraints(set, &n_status)?;
    let bounds = length_bounds(set)?;
    let survivors = hypothesis_search(set, atlas, n_cap)?;
    let survivor_n = (0..set.m)
        .map(|i| {
            let vals: BTreeSet<u64> = survivors.iter().map(|h| h.n[i]).collect();
            vals.into_iter().collect()
        })
        .collect();
    Ok(InferenceReport {
        m: set.m,
        observations: set.vectors.iter().cloned().collect(),
        n_status,
        constraints: windows.constraints,
        unconstrained_windows: windows.unconstrained,
        length_bounds: bounds,
        survivors,
        survivor_n,
        cells_found: atlas.cells.len(),
        cells_expected: atlas.expected,
    })
}
