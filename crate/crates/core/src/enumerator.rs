//! Closed-form construction of the full observation set.
//!
//! The offset partition of `[0, 1)` is built one region at a time. Region 1
//! splits the offsets into two intervals. Adding region `K + 1` inserts one
//! new breakpoint `ceil(S) - S`, where `S = f_1 + ... + f_{K+1}`. Exactly one
//! existing projection (the fork vector) lies across that breakpoint and gets
//! both possible counts for the new region. Every other projection extends in
//! exactly one way, which is decided from its deficit pattern alone.
//!
//! All functions here assume a generic window (no contiguous sum of `f`
//! values is an integer) and report [`EngineError::NonGeneric`] otherwise.
//! The brute-force oracle in [`crate::oracle`] covers non-generic signals.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

use crate::oracle::{ObservationVector, Offset};
use crate::rational::Rational;
use crate::signal::{
    fraction_genericity, genericity_check, GenericityReport, RegionSpec, SignalSpec,
    DEFAULT_MAX_REGIONS,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("signal is not generic: {} window(s) have an integer f-sum", .0.violations.len())]
    NonGeneric(GenericityReport),
    #[error("{m} regions exceeds the limit of {cap}")]
    TooManyRegions { m: usize, cap: usize },
    #[error("window starting at region {} with {size} region(s) does not fit in {m} regions", start + 1)]
    WindowOutOfRange { start: usize, size: usize, m: usize },
    #[error("projection {0} is the fork vector and extends both ways")]
    ForkVector(ObservationVector),
    #[error("projection {0} cannot occur for this signal")]
    NotAchievable(ObservationVector),
    #[error("construction invariant broken: {0}")]
    Internal(String),
}

/// A partition of `[0, 1)` into half-open intervals
/// `[0, b_1), [b_1, b_2), ..., [b_k, 1)`, each carrying one observation
/// vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OffsetPartition {
    breakpoints: Vec<Offset>,
    vectors: Vec<ObservationVector>,
}

/// One interval of an [`OffsetPartition`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OffsetInterval {
    pub start: Rational,
    pub end: Rational,
    pub counts: ObservationVector,
}

impl OffsetPartition {
    /// Panics unless there is exactly one more vector than breakpoints and
    /// the breakpoints are strictly increasing and nonzero.
    pub fn from_parts(breakpoints: Vec<Offset>, vectors: Vec<ObservationVector>) -> Self {
        assert_eq!(breakpoints.len() + 1, vectors.len(), "one vector per interval");
        assert!(
            breakpoints.windows(2).all(|w| w[0] < w[1]),
            "breakpoints must be strictly increasing"
        );
        assert!(breakpoints.first().is_none_or(|b| !b.value().is_zero()));
        OffsetPartition { breakpoints, vectors }
    }

    pub fn breakpoints(&self) -> &[Offset] {
        &self.breakpoints
    }

    pub fn vectors(&self) -> &[ObservationVector] {
        &self.vectors
    }

    pub fn intervals(&self) -> Vec<OffsetInterval> {
        (0..self.vectors.len())
            .map(|j| OffsetInterval {
                start: self.start_of(j),
                end: self.end_of(j),
                counts: self.vectors[j].clone(),
            })
            .collect()
    }

    fn start_of(&self, j: usize) -> Rational {
        if j == 0 {
            Rational::zero()
        } else {
            self.breakpoints[j - 1].value().clone()
        }
    }

    fn end_of(&self, j: usize) -> Rational {
        self.breakpoints.get(j).map(|b| b.value().clone()).unwrap_or_else(Rational::one)
    }

    /// The vector produced by grid offset `d`.
    pub fn vector_at(&self, d: &Offset) -> &ObservationVector {
        let idx = self.breakpoints.partition_point(|b| b <= d);
        &self.vectors[idx]
    }

    pub fn vector_set(&self) -> BTreeSet<ObservationVector> {
        self.vectors.iter().cloned().collect()
    }
}

/// The floor `kappa` of the `f`-sum over regions `start..=start + extent`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct WindowFloor {
    pub start: usize,
    pub extent: usize,
    pub kappa: u32,
}

/// The floors of all `m(m+1)/2` contiguous windows. Two generic `f`-vectors
/// with the same profile lie in the same cell of the unit hypercube and
/// produce the same full observation set for equal `n`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellProfile {
    m: usize,
    floors: Vec<u32>,
}

impl CellProfile {
    pub fn from_fractions(fs: &[Rational]) -> Self {
        let m = fs.len();
        let mut floors = Vec::with_capacity(m * (m + 1) / 2);
        for start in 0..m {
            let mut sum = Rational::zero();
            for f in &fs[start..] {
                sum = sum + f;
                floors.push(sum.floor().to_u32().expect("window floor fits in u32"));
            }
        }
        CellProfile { m, floors }
    }

    pub fn of(signal: &SignalSpec) -> Self {
        Self::from_fractions(&signal.fs())
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Floor for the window `start..=start + extent`. Panics outside the profile.
    pub fn kappa(&self, start: usize, extent: usize) -> u32 {
        assert!(start + extent < self.m, "window out of range");
        let offset: usize = (0..start).map(|s| self.m - s).sum();
        self.floors[offset + extent]
    }

    pub fn floors(&self) -> Vec<WindowFloor> {
        let mut out = Vec::with_capacity(self.floors.len());
        let mut k = 0;
        for start in 0..self.m {
            for extent in 0..self.m - start {
                out.push(WindowFloor { start, extent, kappa: self.floors[k] });
                k += 1;
            }
        }
        out
    }

    /// Inequalities for every window of two or more regions, e.g.
    /// `"f1+f2>1"` or `"1<f1+f2+f3<2"`.
    pub fn inequalities(&self) -> Vec<String> {
        self.floors()
            .into_iter()
            .filter(|w| w.extent > 0)
            .map(|w| window_inequality(w.start, w.extent, w.kappa))
            .collect()
    }
}

impl Serialize for CellProfile {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.floors().serialize(serializer)
    }
}

/// `"f2+f3+f4"` for the window starting at 0-based region 1 with extent 2.
pub fn window_label(symbol: &str, start: usize, extent: usize) -> String {
    (start..=start + extent)
        .map(|i| format!("{symbol}{}", i + 1))
        .collect::<Vec<_>>()
        .join("+")
}

/// Renders `kappa < f_i + ... + f_{i+K} < kappa + 1`, dropping whichever
/// side is implied by `0 < f <= 1` and genericity.
pub fn window_inequality(start: usize, extent: usize, kappa: u32) -> String {
    let label = window_label("f", start, extent);
    if kappa == 0 {
        format!("{label}<1")
    } else if kappa as usize == extent {
        format!("{label}>{kappa}")
    } else {
        format!("{kappa}<{label}<{}", kappa + 1)
    }
}

fn check_window(signal: &SignalSpec, start: usize, size: usize) -> Result<(), EngineError> {
    if size == 0 || start + size > signal.len() {
        return Err(EngineError::WindowOutOfRange { start, size, m: signal.len() });
    }
    Ok(())
}

fn require_generic_window(signal: &SignalSpec, start: usize, size: usize) -> Result<(), EngineError> {
    check_window(signal, start, size)?;
    let report = fraction_genericity(&signal.fs()[start..start + size]);
    if report.generic {
        Ok(())
    } else {
        Err(EngineError::NonGeneric(report))
    }
}

/// Region offsets from the recurrence `D_i = (D_{i-1} + f_{i-1}) mod 1`,
/// starting at `D_1 = d`.
pub fn recurrence_offsets(signal: &SignalSpec, d: &Offset) -> Vec<Offset> {
    let mut out = Vec::with_capacity(signal.len());
    let mut current = d.clone();
    for (i, region) in signal.regions().iter().enumerate() {
        out.push(current.clone());
        if i + 1 < signal.len() {
            current = Offset::wrapping(&(current.value() + region.f()));
        }
    }
    out
}

/// Single-region table: count `n` for offsets below `1 - f`, `n - 1` above.
pub fn single_region_partition(region: &RegionSpec) -> Result<OffsetPartition, EngineError> {
    if region.f() == &Rational::one() {
        return Err(EngineError::NonGeneric(fraction_genericity(std::slice::from_ref(region.f()))));
    }
    let split = Offset::new(Rational::one() - region.f()).expect("0 < f < 1");
    Ok(OffsetPartition::from_parts(
        vec![split],
        vec![
            ObservationVector::new(vec![region.n()]),
            ObservationVector::new(vec![region.n() - 1]),
        ],
    ))
}

/// Which row of the two-region table applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PairCase {
    /// `f_1 < 1` and `f_1 + f_2 <= 1`.
    Case1,
    /// `f_1 < 1` and `f_1 + f_2 >= 1`.
    Case2,
    /// `f_1 = 1`.
    Case3,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairTable {
    pub case: PairCase,
    pub partition: OffsetPartition,
    /// False when `f_1 = 1` or `f_1 + f_2` is an integer; such tables are
    /// correct but never used by [`full_observation_set`].
    pub generic: bool,
}

/// Two adjacent regions, indexed by the offset of the first one.
/// Zero-width rows of the table (which occur only at integer sums) are
/// dropped.
pub fn pair_partition(first: &RegionSpec, second: &RegionSpec) -> PairTable {
    let (n1, n2) = (first.n(), second.n());
    let (f1, f2) = (first.f(), second.f());
    let one = Rational::one();
    let two = Rational::from_integer(2);
    let sum = f1 + f2;
    let (case, rows) = if f1 == &one {
        (
            PairCase::Case3,
            vec![
                (Rational::zero(), &one - f2, [n1 - 1, n2]),
                (&one - f2, one.clone(), [n1 - 1, n2 - 1]),
            ],
        )
    } else if sum <= one {
        (
            PairCase::Case1,
            vec![
                (Rational::zero(), &one - &sum, [n1, n2]),
                (&one - &sum, &one - f1, [n1, n2 - 1]),
                (&one - f1, one.clone(), [n1 - 1, n2]),
            ],
        )
    } else {
        (
            PairCase::Case2,
            vec![
                (Rational::zero(), &one - f1, [n1, n2 - 1]),
                (&one - f1, &two - &sum, [n1 - 1, n2]),
                (&two - &sum, one.clone(), [n1 - 1, n2 - 1]),
            ],
        )
    };
    let mut breakpoints = Vec::new();
    let mut vectors = Vec::new();
    for (lo, _, counts) in rows.into_iter().filter(|(lo, hi, _)| lo < hi) {
        if !vectors.is_empty() {
            breakpoints.push(Offset::new(lo).expect("row start in [0, 1)"));
        }
        vectors.push(ObservationVector::new(counts.to_vec()));
    }
    PairTable {
        case,
        partition: OffsetPartition::from_parts(breakpoints, vectors),
        generic: f1 != &one && !sum.is_integer(),
    }
}

/// The `size` breakpoints `ceil(S_j) - S_j` for the partial sums
/// `S_j = f_start + ... + f_{start+j-1}`, `j = 1..=size`, ascending.
pub fn window_breakpoints(
    signal: &SignalSpec,
    start: usize,
    size: usize,
) -> Result<Vec<Offset>, EngineError> {
    require_generic_window(signal, start, size)?;
    let mut sum = Rational::zero();
    let mut out: Vec<Offset> = signal.regions()[start..start + size]
        .iter()
        .map(|r| {
            sum = &sum + r.f();
            Offset::new(sum.ceil_gap()).expect("gap in [0, 1)")
        })
        .collect();
    out.sort();
    if out.windows(2).any(|w| w[0] == w[1]) || out.iter().any(|b| b.value().is_zero()) {
        return Err(EngineError::Internal("coincident breakpoints in a generic window".into()));
    }
    Ok(out)
}

/// `floor(f_start + ... + f_{start+extent})`.
pub fn kappa(signal: &SignalSpec, start: usize, extent: usize) -> Result<WindowFloor, EngineError> {
    check_window(signal, start, extent + 1)?;
    let k = signal.window_f_sum(start, extent).floor();
    Ok(WindowFloor { start, extent, kappa: k.to_u32().expect("window floor fits in u32") })
}

/// Window-relative positions `(beta_kappa, ..., beta_1)`, ascending. For each
/// `h = 1..=kappa`, `beta_h` is the position where the tail sum
/// `f_{start+j} + ... + f_{start+extent}` first exceeds `h` when walking
/// leftwards from the window's last region.
pub fn beta_indices(
    signal: &SignalSpec,
    start: usize,
    extent: usize,
) -> Result<Vec<usize>, EngineError> {
    require_generic_window(signal, start, extent + 1)?;
    let fs = &signal.fs()[start..=start + extent];
    let mut betas = Vec::new();
    let mut tail = Rational::zero();
    let mut next_h = 1i64;
    for j in (0..=extent).rev() {
        tail = tail + &fs[j];
        while tail > next_h {
            betas.push(j);
            next_h += 1;
        }
    }
    betas.reverse();
    Ok(betas)
}

fn deficits(
    signal: &SignalSpec,
    v: &ObservationVector,
    start: usize,
) -> Result<Vec<bool>, EngineError> {
    let ns = &signal.ns()[start..start + v.len()];
    v.counts()
        .iter()
        .zip(ns)
        .map(|(&eta, &n)| match n.checked_sub(eta) {
            Some(0) => Ok(false),
            Some(1) => Ok(true),
            _ => Err(EngineError::NotAchievable(v.clone())),
        })
        .collect()
}

/// The unique length-`extent` projection over regions
/// `start..start + extent` that admits both counts for region
/// `start + extent`: all regions at `n` except `n - 1` at the beta positions.
pub fn fork_vector(
    signal: &SignalSpec,
    start: usize,
    extent: usize,
) -> Result<ObservationVector, EngineError> {
    if extent == 0 {
        return Err(EngineError::WindowOutOfRange { start, size: 0, m: signal.len() });
    }
    let betas = beta_indices(signal, start, extent)?;
    let ns = signal.ns();
    let counts = (0..extent)
        .map(|j| if betas.contains(&j) { ns[start + j] - 1 } else { ns[start + j] })
        .collect();
    Ok(ObservationVector::new(counts))
}

/// The count of region `start + v.len()` that must follow projection `v`,
/// when `v` is not the fork vector.
pub fn extend_projection(
    signal: &SignalSpec,
    v: &ObservationVector,
    start: usize,
) -> Result<u64, EngineError> {
    let extent = v.len();
    if extent == 0 {
        return Err(EngineError::WindowOutOfRange { start, size: 0, m: signal.len() });
    }
    require_generic_window(signal, start, extent + 1)?;
    let marks = deficits(signal, v, start)?;
    if !within_window_bounds(signal, v, start) {
        return Err(EngineError::NotAchievable(v.clone()));
    }
    let n_next = signal.ns()[start + extent];
    let kappa = kappa(signal, start, extent)?.kappa as usize;
    let deficit = marks.iter().filter(|&&d| d).count();

    if deficit == kappa + 1 {
        return Ok(n_next);
    }
    if deficit + 1 == kappa {
        return Ok(n_next - 1);
    }
    if deficit != kappa {
        return Err(EngineError::NotAchievable(v.clone()));
    }
    let positions: Vec<usize> = (0..extent).filter(|&j| marks[j]).collect();
    let betas = beta_indices(signal, start, extent)?;
    // both lists ascending; index h from the right end
    for (b, beta) in positions.iter().rev().zip(betas.iter().rev()) {
        if b > beta {
            return Ok(n_next);
        }
        if b < beta {
            return Ok(n_next - 1);
        }
    }
    Err(EngineError::ForkVector(v.clone()))
}

/// Whether every contiguous window of `v` (placed at `start`) has a count
/// sum in `{sum n - kappa - 1, sum n - kappa}`. For a generic signal this
/// holds exactly for the projections some grid offset produces.
pub fn within_window_bounds(signal: &SignalSpec, v: &ObservationVector, start: usize) -> bool {
    let ns = signal.ns();
    let len = v.len();
    (0..len).all(|a| {
        (a..len).all(|b| {
            let n_sum: u64 = ns[start + a..=start + b].iter().sum();
            let eta_sum = v.window_sum(a, b - a);
            let kappa = signal.window_f_sum(start + a, b - a).floor();
            let kappa = kappa.to_u64().expect("window floor fits in u64");
            eta_sum + kappa <= n_sum && n_sum <= eta_sum + kappa + 1
        })
    })
}

/// Counts for region `start + v.len()` compatible with the two-valued
/// window-sum range on every window that ends at that region. A second,
/// independent route to the fork/extension decision.
pub fn trial_extensions(signal: &SignalSpec, v: &ObservationVector, start: usize) -> Vec<u64> {
    let extent = v.len();
    let ns = signal.ns();
    let n_next = ns[start + extent];
    [n_next, n_next - 1]
        .into_iter()
        .filter(|&c| {
            let ext = v.extended(c);
            (0..=extent).all(|j| {
                let tail_n: u64 = ns[start + j..=start + extent].iter().sum();
                let tail_eta = ext.window_sum(j, extent - j);
                let kappa = signal.window_f_sum(start + j, extent - j).floor();
                let kappa = kappa.to_u64().expect("window floor fits in u64");
                tail_eta + kappa <= tail_n && tail_n <= tail_eta + kappa + 1
            })
        })
        .collect()
}

/// Everything the closed-form construction yields for a generic signal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FullObservationSet {
    pub vectors: BTreeSet<ObservationVector>,
    pub partition: OffsetPartition,
    pub cell: CellProfile,
}

pub fn full_observation_set(signal: &SignalSpec) -> Result<FullObservationSet, EngineError> {
    full_observation_set_capped(signal, DEFAULT_MAX_REGIONS)
}

pub fn full_observation_set_capped(
    signal: &SignalSpec,
    max_regions: usize,
) -> Result<FullObservationSet, EngineError> {
    let m = signal.len();
    if m > max_regions {
        return Err(EngineError::TooManyRegions { m, cap: max_regions });
    }
    let report = genericity_check(signal);
    if !report.generic {
        return Err(EngineError::NonGeneric(report));
    }

    let regions = signal.regions();
    let first = single_region_partition(&regions[0])?;
    let mut breakpoints = first.breakpoints.clone();
    let mut vectors = first.vectors.clone();
    let mut prefix = regions[0].f().clone();

    for (extent, region) in regions.iter().enumerate().skip(1) {
        prefix = prefix + region.f();
        let split = Offset::new(prefix.ceil_gap()).expect("gap in [0, 1)");
        let fork = fork_vector(signal, 0, extent)?;
        let n_next = region.n();

        let idx = vectors
            .iter()
            .position(|v| *v == fork)
            .ok_or_else(|| EngineError::Internal(format!("fork vector {fork} not among projections")))?;
        let lo = if idx == 0 { Offset::zero() } else { breakpoints[idx - 1].clone() };
        let inside = lo < split && breakpoints.get(idx).is_none_or(|hi| &split < hi);
        if !inside {
            return Err(EngineError::Internal(format!(
                "breakpoint {split} outside the interval of fork vector {fork}"
            )));
        }

        let mut next = Vec::with_capacity(vectors.len() + 1);
        for (j, v) in vectors.iter().enumerate() {
            if j == idx {
                debug_assert_eq!(trial_extensions(signal, v, 0), vec![n_next, n_next - 1]);
                next.push(v.extended(n_next));
                next.push(v.extended(n_next - 1));
            } else {
                let count = extend_projection(signal, v, 0)?;
                debug_assert_eq!(trial_extensions(signal, v, 0), vec![count]);
                next.push(v.extended(count));
            }
        }
        breakpoints.insert(idx, split);
        vectors = next;
    }

    let partition = OffsetPartition::from_parts(breakpoints, vectors);
    Ok(FullObservationSet {
        vectors: partition.vector_set(),
        partition,
        cell: CellProfile::of(signal),
    })
}

/// One of the six cells of the unit cube for three regions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct M3Cell {
    /// 1..=6, in the order the cells are conventionally listed.
    pub index: u8,
    pub inequalities: &'static str,
    /// Deficit patterns: `true` at position `j` means `eta_j = n_j - 1`.
    pub patterns: [[bool; 3]; 4],
}

impl M3Cell {
    pub fn vectors(&self, ns: &[u64]) -> BTreeSet<ObservationVector> {
        self.patterns
            .iter()
            .map(|p| {
                ObservationVector::new((0..3).map(|j| ns[j] - u64::from(p[j])).collect())
            })
            .collect()
    }
}

impl fmt::Display for M3Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cell {}: {}", self.index, self.inequalities)
    }
}

const O: bool = false;
const I: bool = true;

/// Cells keyed by `(floor(f1+f2), floor(f2+f3), floor(f1+f2+f3))`.
const M3_CELLS: [((u32, u32, u32), M3Cell); 6] = [
    ((0, 0, 0), M3Cell {
        index: 1,
        inequalities: "f1+f2+f3<1",
        patterns: [[O, O, O], [O, O, I], [O, I, O], [I, O, O]],
    }),
    ((0, 0, 1), M3Cell {
        index: 2,
        inequalities: "f1+f2<1, f2+f3<1, f1+f2+f3>1",
        patterns: [[O, O, I], [O, I, O], [I, O, O], [I, O, I]],
    }),
    ((0, 1, 1), M3Cell {
        index: 3,
        inequalities: "f1+f2<1, f2+f3>1",
        patterns: [[O, O, I], [O, I, O], [O, I, I], [I, O, I]],
    }),
    ((1, 0, 1), M3Cell {
        index: 4,
        inequalities: "f1+f2>1, f2+f3<1",
        patterns: [[O, I, O], [I, O, O], [I, O, I], [I, I, O]],
    }),
    ((1, 1, 1), M3Cell {
        index: 5,
        inequalities: "f1+f2>1, f2+f3>1, f1+f2+f3<2",
        patterns: [[O, I, O], [O, I, I], [I, O, I], [I, I, O]],
    }),
    ((1, 1, 2), M3Cell {
        index: 6,
        inequalities: "f1+f2+f3>2",
        patterns: [[O, I, I], [I, O, I], [I, I, O], [I, I, I]],
    }),
];

/// Looks up the three-region cell of a profile, if it has three regions.
pub fn m3_cell_of(profile: &CellProfile) -> Option<M3Cell> {
    if profile.m() != 3 {
        return None;
    }
    let key = (profile.kappa(0, 1), profile.kappa(1, 1), profile.kappa(0, 2));
    M3_CELLS.iter().find(|(k, _)| *k == key).map(|(_, c)| c.clone())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("cell classification needs exactly 3 regions, got {0}")]
    WrongRegionCount(usize),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

pub fn classify_m3_cell(signal: &SignalSpec) -> Result<M3Cell, ClassifyError> {
    if signal.len() != 3 {
        return Err(ClassifyError::WrongRegionCount(signal.len()));
    }
    let report = genericity_check(signal);
    if !report.generic {
        return Err(EngineError::NonGeneric(report).into());
    }
    m3_cell_of(&CellProfile::of(signal))
        .ok_or_else(|| EngineError::Internal("floor profile matches no cell".into()).into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{oracle_observation_set, oracle_partition};
    use crate::rational::q;

    fn sig(parts: &[(u64, (i64, i64))]) -> SignalSpec {
        let parts: Vec<_> = parts.iter().map(|&(n, (a, b))| (n, q(a, b))).collect();
        SignalSpec::from_nf(&parts).unwrap()
    }

    fn ov(c: &[u64]) -> ObservationVector {
        ObservationVector::new(c.to_vec())
    }

    fn off(a: i64, b: i64) -> Offset {
        Offset::new(q(a, b)).unwrap()
    }

    fn region(n: u64, a: i64, b: i64) -> RegionSpec {
        RegionSpec::new(n, q(a, b), q(1, 1)).unwrap()
    }

    #[test]
    fn single_region_examples() {
        for (n, (a, b), split) in [(3, (1, 2), off(1, 2)), (2, (9, 10), off(1, 10)), (5, (1, 4), off(3, 4))] {
            let p = single_region_partition(&region(n, a, b)).unwrap();
            assert_eq!(p.breakpoints(), &[split]);
            assert_eq!(p.vectors(), &[ov(&[n]), ov(&[n - 1])]);
        }
        assert!(matches!(single_region_partition(&region(3, 1, 1)), Err(EngineError::NonGeneric(_))));
    }

    #[test]
    fn pair_case_tables() {
        let t = pair_partition(&region(3, 3, 10), &region(4, 4, 10));
        assert_eq!(t.case, PairCase::Case1);
        assert!(t.generic);
        assert_eq!(t.partition.breakpoints(), &[off(3, 10), off(7, 10)]);
        assert_eq!(t.partition.vectors(), &[ov(&[3, 4]), ov(&[3, 3]), ov(&[2, 4])]);

        let t = pair_partition(&region(3, 7, 10), &region(4, 4, 10));
        assert_eq!(t.case, PairCase::Case2);
        assert_eq!(t.partition.breakpoints(), &[off(3, 10), off(9, 10)]);
        assert_eq!(t.partition.vectors(), &[ov(&[3, 3]), ov(&[2, 4]), ov(&[2, 3])]);

        let t = pair_partition(&region(3, 1, 1), &region(4, 4, 10));
        assert_eq!(t.case, PairCase::Case3);
        assert!(!t.generic);
        assert_eq!(t.partition.breakpoints(), &[off(6, 10)]);
        assert_eq!(t.partition.vectors(), &[ov(&[2, 4]), ov(&[2, 3])]);
    }

    #[test]
    fn pair_tables_match_oracle_including_degenerate_rows() {
        for (f1, f2) in [((3, 10), (4, 10)), ((7, 10), (4, 10)), ((1, 1), (4, 10)), ((7, 10), (3, 10)), ((1, 1), (1, 1))] {
            let s = sig(&[(3, f1), (4, f2)]);
            let t = pair_partition(&s.regions()[0], &s.regions()[1]);
            assert_eq!(t.partition, oracle_partition(&s), "f = {f1:?}, {f2:?}");
        }
    }

    #[test]
    fn window_breakpoint_examples() {
        let s = sig(&[(3, (7, 10)), (4, (4, 10)), (3, (3, 10))]);
        assert_eq!(window_breakpoints(&s, 0, 3).unwrap(), vec![off(3, 10), off(6, 10), off(9, 10)]);
        let s = sig(&[(2, (9, 10)), (2, (8, 10)), (2, (9, 10))]);
        assert_eq!(window_breakpoints(&s, 0, 3).unwrap(), vec![off(1, 10), off(3, 10), off(4, 10)]);
        let s = sig(&[(3, (3, 10)), (4, (4, 10))]);
        assert_eq!(window_breakpoints(&s, 0, 2).unwrap(), vec![off(3, 10), off(7, 10)]);
        let s = sig(&[(3, (7, 10)), (4, (3, 10))]);
        assert!(matches!(window_breakpoints(&s, 0, 2), Err(EngineError::NonGeneric(_))));
        assert!(matches!(window_breakpoints(&s, 1, 2), Err(EngineError::WindowOutOfRange { .. })));
    }

    #[test]
    fn kappa_examples() {
        let s = sig(&[(3, (7, 10)), (4, (4, 10)), (3, (3, 10))]);
        assert_eq!(kappa(&s, 0, 2).unwrap().kappa, 1);
        assert_eq!(kappa(&s, 1, 0).unwrap().kappa, 0);
        let s = sig(&[(2, (9, 10)), (2, (8, 10)), (2, (9, 10))]);
        assert_eq!(kappa(&s, 0, 2).unwrap().kappa, 2);
    }

    #[test]
    fn beta_examples() {
        let s = sig(&[(3, (7, 10)), (4, (4, 10))]);
        assert_eq!(beta_indices(&s, 0, 1).unwrap(), vec![0]);
        let s = sig(&[(3, (7, 10)), (4, (4, 10)), (3, (3, 10))]);
        assert_eq!(beta_indices(&s, 0, 2).unwrap(), vec![0]);
        let s = sig(&[(2, (9, 10)), (2, (8, 10)), (2, (9, 10))]);
        assert_eq!(beta_indices(&s, 0, 2).unwrap(), vec![0, 1]);
        let s = sig(&[(3, (3, 10)), (4, (4, 10))]);
        assert!(beta_indices(&s, 0, 1).unwrap().is_empty());
    }

    #[test]
    fn fork_vector_examples() {
        let s = sig(&[(3, (7, 10)), (4, (4, 10)), (3, (3, 10))]);
        assert_eq!(fork_vector(&s, 0, 2).unwrap(), ov(&[2, 4]));
        let s = sig(&[(3, (3, 10)), (4, (4, 10)), (3, (3, 10))]);
        assert_eq!(fork_vector(&s, 0, 1).unwrap(), ov(&[3]));
        let s = sig(&[(3, (3, 10)), (4, (4, 10)), (5, (1, 10))]);
        assert_eq!(fork_vector(&s, 0, 2).unwrap(), ov(&[3, 4]));
        let s = sig(&[(2, (9, 10)), (2, (8, 10)), (2, (9, 10))]);
        assert_eq!(fork_vector(&s, 0, 2).unwrap(), ov(&[1, 1]));
    }

    #[test]
    fn extension_examples() {
        let s = sig(&[(3, (7, 10)), (4, (4, 10)), (3, (3, 10))]);
        assert_eq!(extend_projection(&s, &ov(&[2, 3]), 0).unwrap(), 3);
        assert_eq!(extend_projection(&s, &ov(&[3, 3]), 0).unwrap(), 3);
        assert_eq!(extend_projection(&s, &ov(&[2, 4]), 0), Err(EngineError::ForkVector(ov(&[2, 4]))));
        assert_eq!(extend_projection(&s, &ov(&[3, 4]), 0), Err(EngineError::NotAchievable(ov(&[3, 4]))));
        assert_eq!(extend_projection(&s, &ov(&[5, 4]), 0), Err(EngineError::NotAchievable(ov(&[5, 4]))));
    }

    #[test]
    fn trial_extension_agrees_on_small_example() {
        let s = sig(&[(3, (7, 10)), (4, (4, 10)), (3, (3, 10))]);
        assert_eq!(trial_extensions(&s, &ov(&[2, 4]), 0), vec![3, 2]);
        assert_eq!(trial_extensions(&s, &ov(&[3, 3]), 0), vec![3]);
        assert_eq!(trial_extensions(&s, &ov(&[2, 3]), 0), vec![3]);
    }

    #[test]
    fn full_set_examples() {
        let s = sig(&[(3, (7, 10)), (4, (4, 10)), (3, (3, 10))]);
        let full = full_observation_set(&s).unwrap();
        let expected: BTreeSet<_> =
            [ov(&[3, 3, 3]), ov(&[2, 4, 3]), ov(&[2, 4, 2]), ov(&[2, 3, 3])].into_iter().collect();
        assert_eq!(full.vectors, expected);
        assert_eq!(full.partition, oracle_partition(&s));
        assert_eq!(full.partition.breakpoints(), window_breakpoints(&s, 0, 3).unwrap().as_slice());

        let s = sig(&[(2, (9, 10)), (2, (8, 10)), (2, (9, 10))]);
        let full = full_observation_set(&s).unwrap();
        assert_eq!(full.vectors, oracle_observation_set(&s));

        let s = sig(&[(3, (1, 2))]);
        let full = full_observation_set(&s).unwrap();
        assert_eq!(full.vectors, [ov(&[3]), ov(&[2])].into_iter().collect());
    }

    #[test]
    fn full_set_rejections() {
        let s = sig(&[(3, (1, 1))]);
        assert!(matches!(full_observation_set(&s), Err(EngineError::NonGeneric(_))));
        let s = sig(&[(3, (1, 3)), (3, (1, 3)), (3, (1, 3))]);
        assert!(matches!(full_observation_set(&s), Err(EngineError::NonGeneric(_))));
        let s = sig(&[(3, (1, 7)), (3, (1, 7)), (3, (1, 7))]);
        assert_eq!(
            full_observation_set_capped(&s, 2),
            Err(EngineError::TooManyRegions { m: 3, cap: 2 })
        );
    }

    #[test]
    fn m3_classification() {
        let cases = [
            (sig(&[(3, (1, 10)), (3, (2, 10)), (3, (3, 10))]), 1, "f1+f2+f3<1"),
            (sig(&[(3, (7, 10)), (4, (4, 10)), (3, (3, 10))]), 4, "f1+f2>1, f2+f3<1"),
            (sig(&[(2, (9, 10)), (2, (8, 10)), (2, (9, 10))]), 6, "f1+f2+f3>2"),
        ];
        for (s, index, text) in cases {
            let cell = classify_m3_cell(&s).unwrap();
            assert_eq!(cell.index, index);
            assert_eq!(cell.inequalities, text);
            assert_eq!(cell.vectors(&s.ns()), full_observation_set(&s).unwrap().vectors);
        }
        assert_eq!(
            classify_m3_cell(&sig(&[(3, (1, 2))])),
            Err(ClassifyError::WrongRegionCount(1))
        );
    }

    #[test]
    fn cell_profile_layout_and_rendering() {
        let s = sig(&[(3, (7, 10)), (4, (4, 10)), (3, (3, 10))]);
        let p = CellProfile::of(&s);
        assert_eq!(p.floors().len(), 6);
        assert_eq!(p.kappa(0, 1), 1);
        assert_eq!(p.kappa(1, 1), 0);
        assert_eq!(p.kappa(0, 2), 1);
        assert_eq!(p.kappa(2, 0), 0);
        assert_eq!(p.inequalities(), vec!["f1+f2>1", "1<f1+f2+f3<2", "f2+f3<1"]);
        assert_eq!(window_inequality(0, 4, 2), "2<f1+f2+f3+f4+f5<3");
    }
}
