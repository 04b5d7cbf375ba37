//! Spatially-limited piecewise-constant signals.
//!
//! A signal is a run of `m` contiguous regions. Region `i` has length
//! `R_i = (n_i - f_i) T` with integer `n_i >= 2` and `0 < f_i <= 1`, so every
//! region is at least one grid period long. The grid period is normalized to
//! one: every length, offset and breakpoint stored here is in units of `T`.

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::Rational;

/// Default upper bound on the number of regions accepted by the enumeration
/// and inference engines. Inference cost grows like `2^m * m!`.
pub const DEFAULT_MAX_REGIONS: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignalError {
    #[error("a signal needs at least one region")]
    Empty,
    #[error("sampling period must be positive, got {0}")]
    NonPositivePeriod(Rational),
    #[error("{lengths} lengths but {values} values")]
    LengthValueMismatch { lengths: usize, values: usize },
    #[error("region {region} has length {length}, shorter than the sampling period")]
    TooShort { region: usize, length: Rational },
    #[error("region {region}: n = {n} must be at least 2")]
    CountTooSmall { region: usize, n: u64 },
    #[error("region {region}: f = {f} must satisfy 0 < f <= 1")]
    FractionOutOfRange { region: usize, f: Rational },
    #[error("region {region}: length is too large to count")]
    TooLong { region: usize },
    #[error("region {region} is an end region and must have a nonzero value")]
    ZeroEndValue { region: usize },
    #[error("regions {region} and {} share the value {value}", region + 1)]
    EqualAdjacentValues { region: usize, value: Rational },
}

/// One constant piece of the signal. Region numbers in errors and reports
/// are 1-based; indices in the API are 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RegionSpec {
    n: u64,
    f: Rational,
    value: Rational,
}

impl RegionSpec {
    pub fn new(n: u64, f: Rational, value: Rational) -> Result<Self, SignalError> {
        Self::checked(0, n, f, value)
    }

    fn checked(region: usize, n: u64, f: Rational, value: Rational) -> Result<Self, SignalError> {
        if n < 2 {
            return Err(SignalError::CountTooSmall { region: region + 1, n });
        }
        if !f.is_positive() || f > 1 {
            return Err(SignalError::FractionOutOfRange { region: region + 1, f });
        }
        Ok(RegionSpec { n, f, value })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn f(&self) -> &Rational {
        &self.f
    }

    pub fn value(&self) -> &Rational {
        &self.value
    }

    /// `n - f`, in units of `T`.
    pub fn length(&self) -> Rational {
        Rational::from(self.n) - &self.f
    }
}

/// The ground-truth signal, with `T = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SignalSpec {
    regions: Vec<RegionSpec>,
}

impl SignalSpec {
    pub fn new(regions: Vec<RegionSpec>) -> Result<Self, SignalError> {
        if regions.is_empty() {
            return Err(SignalError::Empty);
        }
        let last = regions.len() - 1;
        if regions[0].value.is_zero() {
            return Err(SignalError::ZeroEndValue { region: 1 });
        }
        if regions[last].value.is_zero() {
            return Err(SignalError::ZeroEndValue { region: last + 1 });
        }
        for (i, pair) in regions.windows(2).enumerate() {
            if pair[0].value == pair[1].value {
                return Err(SignalError::EqualAdjacentValues {
                    region: i + 1,
                    value: pair[0].value.clone(),
                });
            }
        }
        Ok(SignalSpec { regions })
    }

    /// Builds a signal from `(n_i, f_i)` pairs with alternating values
    /// `1, 2, 1, 2, ...`, which always satisfy the value constraints.
    pub fn from_nf(parts: &[(u64, Rational)]) -> Result<Self, SignalError> {
        let regions = parts
            .iter()
            .enumerate()
            .map(|(i, (n, f))| {
                let value = Rational::from_integer(1 + (i % 2) as i64);
                RegionSpec::checked(i, *n, f.clone(), value)
            })
            .collect::<Result<Vec<_>, _>>()?;
        SignalSpec::new(regions)
    }

    /// Decomposes raw region lengths measured against period `period` into
    /// `(n, f)` form. An exact multiple `R = cT` becomes `n = c + 1, f = 1`.
    pub fn from_lengths(
        lengths: &[Rational],
        values: &[Rational],
        period: &Rational,
    ) -> Result<Self, SignalError> {
        if !period.is_positive() {
            return Err(SignalError::NonPositivePeriod(period.clone()));
        }
        if lengths.is_empty() {
            return Err(SignalError::Empty);
        }
        if lengths.len() != values.len() {
            return Err(SignalError::LengthValueMismatch {
                lengths: lengths.len(),
                values: values.len(),
            });
        }
        let mut regions = Vec::with_capacity(lengths.len());
        for (i, (length, value)) in lengths.iter().zip(values).enumerate() {
            let units = length / period;
            if units < 1 {
                return Err(SignalError::TooShort { region: i + 1, length: length.clone() });
            }
            let n: num_bigint::BigInt = units.floor() + 1;
            let n = n.to_u64().ok_or(SignalError::TooLong { region: i + 1 })?;
            let f = Rational::from(n) - &units;
            regions.push(RegionSpec::checked(i, n, f, value.clone())?);
        }
        SignalSpec::new(regions)
    }

    pub fn regions(&self) -> &[RegionSpec] {
        &self.regions
    }

    /// Number of regions, `m`.
    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }

    pub fn ns(&self) -> Vec<u64> {
        self.regions.iter().map(|r| r.n).collect()
    }

    pub fn fs(&self) -> Vec<Rational> {
        self.regions.iter().map(|r| r.f.clone()).collect()
    }

    pub fn lengths(&self) -> Vec<Rational> {
        self.regions.iter().map(RegionSpec::length).collect()
    }

    /// Region boundaries `0 = B_0 < B_1 < ... < B_m`, `B_i = R_1 + ... + R_i`.
    pub fn boundaries(&self) -> Vec<Rational> {
        let mut out = Vec::with_capacity(self.len() + 1);
        let mut acc = Rational::zero();
        out.push(acc.clone());
        for r in &self.regions {
            acc = acc + r.length();
            out.push(acc.clone());
        }
        out
    }

    /// Sum of `f` over regions `start..=start + extent`.
    pub fn window_f_sum(&self, start: usize, extent: usize) -> Rational {
        self.regions[start..=start + extent].iter().map(|r| &r.f).sum()
    }
}

/// Running sums `f_1, f_1 + f_2, ..., f_1 + ... + f_m`.
pub fn prefix_sums(signal: &SignalSpec) -> Vec<Rational> {
    let mut acc = Rational::zero();
    signal
        .regions
        .iter()
        .map(|r| {
            acc = &acc + &r.f;
            acc.clone()
        })
        .collect()
}

/// A contiguous window `start..=start + extent` whose `f` values add up to
/// an integer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenericityViolation {
    /// 1-based index of the first region in the window.
    pub start: usize,
    /// Number of regions in the window.
    pub size: usize,
    pub sum: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenericityReport {
    pub generic: bool,
    pub violations: Vec<GenericityViolation>,
}

/// Lists every contiguous window with an integer `f`-sum.
pub fn genericity_check(signal: &SignalSpec) -> GenericityReport {
    fraction_genericity(&signal.fs())
}

/// [`genericity_check`] over a bare run of `f` values; window starts are
/// numbered from 1 relative to the slice.
pub fn fraction_genericity(fs: &[Rational]) -> GenericityReport {
    let mut violations = Vec::new();
    for start in 0..fs.len() {
        let mut sum = Rational::zero();
        for (offset, f) in fs[start..].iter().enumerate() {
            sum = sum + f;
            if sum.is_integer() {
                violations.push(GenericityViolation {
                    start: start + 1,
                    size: offset + 1,
                    sum: sum.clone(),
                });
            }
        }
    }
    GenericityReport { generic: violations.is_empty(), violations }
}
