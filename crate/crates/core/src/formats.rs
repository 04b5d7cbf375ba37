//! JSON file formats and report rendering.
//!
//! Signal file:
//!
//! ```json
//! { "T": "1", "regions": [ { "length": "2.3", "value": 1 },
//!                          { "n": 4, "f": "2/5", "value": "-1/2" } ] }
//! ```
//!
//! Observation file:
//!
//! ```json
//! { "m": 3, "T": "1/2", "observations": [[3, 3, 3], [2, 4, 2]] }
//! ```
//!
//! Rationals are `"p/q"` strings, decimal strings (read exactly), or JSON
//! integers. Machine output always renders rationals as `"p/q"` strings.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cells::CellAtlas;
use crate::enumerator::{m3_cell_of, FullObservationSet, OffsetInterval};
use crate::inference::{InferenceError, InferenceReport, NStatus, ObservationSet};
use crate::oracle::{ObservationVector, Offset};
use crate::rational::Rational;
use crate::signal::{genericity_check, GenericityReport, RegionSpec, SignalError, SignalSpec};

/// Upper bound on input document size accepted by the parsers.
pub const MAX_DOCUMENT_BYTES: usize = 1 << 20;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("document is larger than {MAX_DOCUMENT_BYTES} bytes")]
    TooLarge,
    #[error("malformed document: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("region {region}: give either `length` or both `n` and `f`")]
    RegionShape { region: usize },
    #[error("period T must be positive, got {0}")]
    NonPositivePeriod(Rational),
    #[error("`m` is {declared} but observation {index} has {found} counts")]
    Arity { declared: usize, index: usize, found: usize },
    #[error(transparent)]
    Signal(#[from] SignalError),
    #[error(transparent)]
    Observations(#[from] InferenceError),
}

impl FormatError {
    /// True when the document parsed but failed domain validation.
    pub fn is_validation(&self) -> bool {
        matches!(self, FormatError::Signal(_) | FormatError::Observations(_) | FormatError::NonPositivePeriod(_))
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRegion {
    length: Option<Rational>,
    n: Option<u64>,
    f: Option<Rational>,
    value: Rational,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSignal {
    #[serde(rename = "T", default = "Rational::one")]
    period: Rational,
    regions: Vec<RawRegion>,
}

/// A parsed signal file: the normalized signal and the period it was given in.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SignalDocument {
    #[serde(rename = "T")]
    pub period: Rational,
    pub signal: SignalSpec,
}

pub fn parse_signal_file(text: &str) -> Result<SignalDocument, FormatError> {
    if text.len() > MAX_DOCUMENT_BYTES {
        return Err(FormatError::TooLarge);
    }
    let raw: RawSignal = serde_json::from_str(text)?;
    if !raw.period.is_positive() {
        return Err(FormatError::NonPositivePeriod(raw.period));
    }
    let mut lengths = Vec::with_capacity(raw.regions.len());
    let mut values = Vec::with_capacity(raw.regions.len());
    for (i, r) in raw.regions.into_iter().enumerate() {
        let length = match (r.length, r.n, r.f) {
            (Some(length), None, None) => length,
            (None, Some(n), Some(f)) => {
                let region = RegionSpec::new(n, f, r.value.clone()).map_err(|e| match e {
                    SignalError::CountTooSmall { n, .. } => {
                        SignalError::CountTooSmall { region: i + 1, n }
                    }
                    SignalError::FractionOutOfRange { f, .. } => {
                        SignalError::FractionOutOfRange { region: i + 1, f }
                    }
                    other => other,
                })?;
                region.length() * &raw.period
            }
            _ => return Err(FormatError::RegionShape { region: i + 1 }),
        };
        lengths.push(length);
        values.push(r.value);
    }
    let signal = SignalSpec::from_lengths(&lengths, &values, &raw.period)?;
    Ok(SignalDocument { period: raw.period, signal })
}

#[derive(Debug, Serialize)]
struct RawSignalOut<'a> {
    #[serde(rename = "T")]
    period: &'a Rational,
    regions: Vec<RegionOut<'a>>,
}

#[derive(Debug, Serialize)]
struct RegionOut<'a> {
    n: u64,
    f: &'a Rational,
    value: &'a Rational,
}

/// Writes a signal in the `{n, f, value}` form of the signal file format.
pub fn signal_to_json(doc: &SignalDocument) -> serde_json::Value {
    let out = RawSignalOut {
        period: &doc.period,
        regions: doc
            .signal
            .regions()
            .iter()
            .map(|r| RegionOut { n: r.n(), f: r.f(), value: r.value() })
            .collect(),
    };
    serde_json::to_value(out).expect("signal serializes")
}

#[derive(Debug, Deserialize)]
struct RawObservations {
    m: usize,
    #[serde(rename = "T", default)]
    period: Option<Rational>,
    observations: Vec<Vec<u64>>,
}

/// A parsed observation file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservationDocument {
    pub period: Option<Rational>,
    pub set: ObservationSet,
}

/// Unknown top-level fields are ignored, so `simulate` output (which also
/// carries offsets) can be fed straight back in.
pub fn parse_observation_file(text: &str) -> Result<ObservationDocument, FormatError> {
    if text.len() > MAX_DOCUMENT_BYTES {
        return Err(FormatError::TooLarge);
    }
    let raw: RawObservations = serde_json::from_str(text)?;
    if let Some(p) = &raw.period {
        if !p.is_positive() {
            return Err(FormatError::NonPositivePeriod(p.clone()));
        }
    }
    if let Some((index, v)) = raw.observations.iter().enumerate().find(|(_, v)| v.len() != raw.m) {
        return Err(FormatError::Arity { declared: raw.m, index, found: v.len() });
    }
    let vectors = raw.observations.into_iter().map(ObservationVector::new).collect();
    let set = ObservationSet::new(raw.m, vectors)?;
    Ok(ObservationDocument { period: raw.period, set })
}

/// One simulated grid placement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SimulatedRecord {
    pub offset: Offset,
    pub counts: ObservationVector,
}

/// Output of `simulate`; also a valid observation file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SimulationDocument {
    pub m: usize,
    #[serde(rename = "T")]
    pub period: Rational,
    pub generic: bool,
    pub records: Vec<SimulatedRecord>,
    pub observations: Vec<ObservationVector>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EnumerationDocument {
    pub signal: serde_json::Value,
    pub generic: bool,
    pub observations: Vec<ObservationVector>,
    pub breakpoints: Vec<Offset>,
    pub intervals: Vec<OffsetInterval>,
    pub cell: crate::enumerator::CellProfile,
    pub inequalities: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m3_cell: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m3_inequalities: Option<&'static str>,
    pub oracle_agrees: bool,
}

impl EnumerationDocument {
    pub fn new(doc: &SignalDocument, full: &FullObservationSet, oracle_agrees: bool) -> Self {
        let m3 = m3_cell_of(&full.cell);
        EnumerationDocument {
            signal: signal_to_json(doc),
            generic: true,
            observations: full.vectors.iter().cloned().collect(),
            breakpoints: full.partition.breakpoints().to_vec(),
            intervals: full.partition.intervals(),
            cell: full.cell.clone(),
            inequalities: full.cell.inequalities(),
            m3_cell: m3.as_ref().map(|c| c.index),
            m3_inequalities: m3.map(|c| c.inequalities),
            oracle_agrees,
        }
    }
}

pub fn to_machine<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn approx(r: &Rational) -> String {
    if r.is_integer() {
        r.to_string()
    } else {
        format!("{r} (~{:.4})", r.to_f64())
    }
}

pub fn render_enumeration(doc: &EnumerationDocument) -> String {
    let mut out = String::new();
    let m = doc.observations.first().map_or(0, ObservationVector::len);
    let _ = writeln!(out, "{} observation vectors for {m} region(s):", doc.observations.len());
    for v in &doc.observations {
        let _ = writeln!(out, "  {v}");
    }
    let _ = writeln!(out, "offset partition (decimals approximate):");
    for iv in &doc.intervals {
        let _ = writeln!(out, "  [{}, {}) -> {}", approx(&iv.start), approx(&iv.end), iv.counts);
    }
    if doc.inequalities.is_empty() {
        let _ = writeln!(out, "cell: the whole interval (one region)");
    } else {
        let _ = writeln!(out, "cell: {}", doc.inequalities.join(", "));
    }
    if let (Some(idx), Some(text)) = (doc.m3_cell, doc.m3_inequalities) {
        let _ = writeln!(out, "three-region cell {idx}: {text}");
    }
    let _ = writeln!(
        out,
        "brute-force cross-check: {}",
        if doc.oracle_agrees { "agrees" } else { "MISMATCH" }
    );
    out
}

pub fn render_simulation(doc: &SimulationDocument) -> String {
    let mut out = String::new();
    if !doc.generic {
        let _ = writeln!(out, "note: signal is not generic; fewer than m+1 vectors may occur");
    }
    for r in &doc.records {
        let _ = writeln!(out, "offset {} -> {}", approx(r.offset.value()), r.counts);
    }
    let _ = writeln!(out, "{} distinct vector(s)", doc.observations.len());
    out
}

pub fn render_genericity(report: &GenericityReport) -> String {
    let mut out = String::from("integer window sums:\n");
    for v in &report.violations {
        let label = crate::enumerator::window_label("f", v.start - 1, v.size - 1);
        let _ = writeln!(out, "  {label} = {}", v.sum);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InferenceDocument<'a> {
    #[serde(rename = "T", skip_serializing_if = "Option::is_none")]
    pub period: Option<&'a Rational>,
    #[serde(flatten)]
    pub report: &'a InferenceReport,
    pub rendered_constraints: Vec<String>,
    pub rendered_bounds: Vec<String>,
}

impl<'a> InferenceDocument<'a> {
    pub fn new(report: &'a InferenceReport, period: Option<&'a Rational>) -> Self {
        InferenceDocument {
            period,
            report,
            rendered_constraints: report.constraints.iter().map(|c| c.render()).collect(),
            rendered_bounds: report.length_bounds.iter().map(|b| b.render()).collect(),
        }
    }
}

pub fn render_inference(report: &InferenceReport, period: Option<&Rational>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} observation(s) of {} region(s)", report.observations.len(), report.m);
    let _ = writeln!(out, "n per region:");
    for (i, s) in report.n_status.iter().enumerate() {
        let tag = match s {
            NStatus::Determined { .. } => "determined",
            NStatus::Ambiguous { .. } => "ambiguous",
        };
        let _ = writeln!(out, "  n{} = {s} ({tag})", i + 1);
    }
    let _ = writeln!(out, "window constraints:");
    for c in &report.constraints {
        if c.extent > 0 {
            let tag = if c.tight { "" } else { " (loose)" };
            let _ = writeln!(out, "  {}{tag}", c.render());
        }
    }
    if !report.unconstrained_windows.is_empty() {
        let _ = writeln!(
            out,
            "  no constraint extracted for {} window(s) with undetermined n",
            report.unconstrained_windows.len()
        );
    }
    let _ = writeln!(out, "length bounds:");
    for b in &report.length_bounds {
        let _ = write!(out, "  {} width {}T", b.render(), b.width());
        if let Some(t) = period {
            let lo = Rational::from(b.lower) * t;
            let hi = Rational::from(b.upper) * t;
            let _ = write!(out, "  = ({lo}, {hi})");
        }
        out.push('\n');
    }
    let _ = writeln!(out, "{} surviving hypothesis(es):", report.survivors.len());
    for h in &report.survivors {
        let n: Vec<String> = h.n.iter().map(u64::to_string).collect();
        let cell = if h.inequalities.is_empty() {
            "any f".to_string()
        } else {
            h.inequalities.join(", ")
        };
        let _ = writeln!(out, "  n=({}) with {cell}", n.join(","));
    }
    if !report.atlas_complete() {
        let _ = writeln!(
            out,
            "warning: cell atlas found {} of {} cells; survivors may be incomplete",
            report.cells_found,
            report.cells_expected.map_or("?".to_string(), |e| e.to_string())
        );
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AtlasEntryDocument {
    pub floors: crate::enumerator::CellProfile,
    pub representative: Vec<Rational>,
    pub inequalities: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m3_inequalities: Option<&'static str>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AtlasDocument {
    pub m: usize,
    pub seed: u64,
    pub budget: usize,
    pub found: usize,
    pub expected: Option<u64>,
    pub complete: bool,
    pub cells: Vec<AtlasEntryDocument>,
}

impl From<&CellAtlas> for AtlasDocument {
    fn from(atlas: &CellAtlas) -> Self {
        AtlasDocument {
            m: atlas.m,
            seed: atlas.seed,
            budget: atlas.budget,
            found: atlas.cells.len(),
            expected: atlas.expected,
            complete: atlas.is_complete(),
            cells: atlas
                .cells
                .iter()
                .map(|c| AtlasEntryDocument {
                    floors: c.profile.clone(),
                    representative: c.representative.clone(),
                    inequalities: c.inequalities(),
                    m3_inequalities: c.m3_inequalities(),
                })
                .collect(),
        }
    }
}

pub fn render_atlas(doc: &AtlasDocument) -> String {
    let mut out = String::new();
    for (k, c) in doc.cells.iter().enumerate() {
        let text = c
            .m3_inequalities
            .map(str::to_string)
            .unwrap_or_else(|| c.inequalities.join(", "));
        let rep: Vec<String> = c.representative.iter().map(Rational::to_string).collect();
        let text = if text.is_empty() { "whole interval".to_string() } else { text };
        let _ = writeln!(out, "{:>4}. {text}   e.g. f=({})", k + 1, rep.join(", "));
    }
    let expected = doc.expected.map_or("overflow".to_string(), |e| e.to_string());
    let _ = writeln!(out, "found {} cells, expected m! = {expected}", doc.found);
    if !doc.complete {
        let _ = writeln!(out, "undercount: raise --budget to search further");
    }
    out
}

/// Genericity of a parsed signal, for callers that only have the document.
pub fn document_genericity(doc: &SignalDocument) -> GenericityReport {
    genericity_check(&doc.signal)
}
