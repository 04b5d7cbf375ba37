//! Closed-form-versus-oracle validation harness.
//!
//! The engine under test is passed in as a function so the harness can be
//! pointed at deliberately broken engines in its own tests.

use std::fmt::Write as _;

use serde::Serialize;

use crate::enumerator::{full_observation_set, EngineError, FullObservationSet};
use crate::oracle::{oracle_observation_set, oracle_partition};
use crate::random::{rng_from_seed, SignalSampler};
use crate::signal::SignalSpec;

/// Outcome of checking one signal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SignalCheck {
    pub passed: bool,
    /// Human-readable failure reasons; empty on success.
    pub failures: Vec<String>,
}

/// Compares `engine` against the brute-force oracle on one generic signal:
/// vector set, interval-by-interval partition, `m + 1` cardinality, and the
/// window-sum range on every window with both extremes attained.
pub fn check_signal_with<E>(signal: &SignalSpec, engine: E) -> SignalCheck
where
    E: Fn(&SignalSpec) -> Result<FullObservationSet, EngineError>,
{
    let mut failures = Vec::new();
    match engine(signal) {
        Err(e) => failures.push(format!("engine error: {e}")),
        Ok(full) => {
            let oracle = oracle_observation_set(signal);
            if full.vectors != oracle {
                failures.push(format!(
                    "vector sets differ: engine {} vs oracle {}",
                    list(full.vectors.iter()),
                    list(oracle.iter())
                ));
            }
            let oracle_part = oracle_partition(signal);
            if full.partition != oracle_part {
                failures.push(format!(
                    "partitions differ: engine {:?} vs oracle {:?}",
                    full.partition.intervals(),
                    oracle_part.intervals()
                ));
            }
            if full.vectors.len() != signal.len() + 1 {
                failures.push(format!(
                    "{} vectors for {} regions",
                    full.vectors.len(),
                    signal.len()
                ));
            }
            failures.extend(window_bound_failures(signal, &full));
        }
    }
    SignalCheck { passed: failures.is_empty(), failures }
}

pub fn check_signal(signal: &SignalSpec) -> SignalCheck {
    check_signal_with(signal, full_observation_set)
}

fn list<'a, T: std::fmt::Display + 'a>(items: impl Iterator<Item = &'a T>) -> String {
    let parts: Vec<String> = items.map(ToString::to_string).collect();
    format!("{{{}}}", parts.join(", "))
}

/// Every vector must have each window sum in
/// `[sum n - kappa - 1, sum n - kappa]`, and both ends must occur.
pub fn window_bound_failures(signal: &SignalSpec, full: &FullObservationSet) -> Vec<String> {
    let ns = signal.ns();
    let m = signal.len();
    let mut out = Vec::new();
    for start in 0..m {
        for extent in 0..m - start {
            let n_sum: u64 = ns[start..=start + extent].iter().sum();
            let kappa = full.cell.kappa(start, extent) as u64;
            let hi = n_sum - kappa;
            let lo = hi - 1;
            let sums: Vec<u64> = full.vectors.iter().map(|v| v.window_sum(start, extent)).collect();
            if let Some(bad) = sums.iter().find(|&&s| s < lo || s > hi) {
                out.push(format!(
                    "window {}..{} sum {bad} outside [{lo}, {hi}]",
                    start + 1,
                    start + extent + 1
                ));
            }
            if !sums.contains(&lo) || !sums.contains(&hi) {
                out.push(format!(
                    "window {}..{} does not attain both {lo} and {hi}",
                    start + 1,
                    start + extent + 1
                ));
            }
        }
    }
    out
}

/// A failing signal with its rendering.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub index: usize,
    pub signal: serde_json::Value,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckSummary {
    pub total: usize,
    pub passed: usize,
    pub counterexamples: Vec<Counterexample>,
}

impl CheckSummary {
    pub fn all_passed(&self) -> bool {
        self.passed == self.total
    }

    pub fn render(&self) -> String {
        let mut out = format!("{}/{} pass\n", self.passed, self.total);
        for c in &self.counterexamples {
            let _ = writeln!(out, "counterexample #{}: {}", c.index, c.signal);
            for f in &c.failures {
                let _ = writeln!(out, "  {f}");
            }
        }
        out
    }
}

fn signal_json(signal: &SignalSpec) -> serde_json::Value {
    let regions: Vec<serde_json::Value> = signal
        .regions()
        .iter()
        .map(|r| serde_json::json!({ "n": r.n(), "f": r.f().to_string(), "value": r.value().to_string() }))
        .collect();
    serde_json::json!({ "T": "1", "regions": regions })
}

/// Runs the check over `signals`, keeping at most `max_counterexamples`.
pub fn check_many_with<'a, E, I>(signals: I, engine: E, max_counterexamples: usize) -> CheckSummary
where
    E: Fn(&SignalSpec) -> Result<FullObservationSet, EngineError>,
    I: IntoIterator<Item = &'a SignalSpec>,
{
    let mut summary = CheckSummary { total: 0, passed: 0, counterexamples: Vec::new() };
    for (index, signal) in signals.into_iter().enumerate() {
        summary.total += 1;
        let result = check_signal_with(signal, &engine);
        if result.passed {
            summary.passed += 1;
        } else if summary.counterexamples.len() < max_counterexamples {
            summary.counterexamples.push(Counterexample {
                index,
                signal: signal_json(signal),
                failures: result.failures,
            });
        }
    }
    summary
}

/// `count` generic signals with `1..=m_max` regions, drawn from `seed`.
pub fn random_generic_signals(count: usize, seed: u64, m_max: usize) -> Vec<SignalSpec> {
    let sampler = SignalSampler::with_regions(1, m_max.max(1));
    let mut rng = rng_from_seed(seed);
    (0..count).map(|_| sampler.sample_generic(&mut rng)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerator::OffsetPartition;
    use crate::oracle::ObservationVector;
    use crate::rational::q;

    #[test]
    fn crafted_signal_passes() {
        let s = SignalSpec::from_nf(&[(3, q(7, 10)), (4, q(2, 5)), (3, q(3, 10))]).unwrap();
        assert_eq!(check_signal(&s), SignalCheck { passed: true, failures: vec![] });
    }

    #[test]
    fn random_batch_passes() {
        let signals = random_generic_signals(100, 7, 6);
        let summary = check_many_with(&signals, full_observation_set, 5);
        assert!(summary.all_passed(), "{}", summary.render());
        assert_eq!(summary.render().lines().next(), Some("100/100 pass"));
    }

    // Drops the last interval's vector and bumps a count: both the set and
    // the partition comparisons must notice.
    fn broken_engine(signal: &SignalSpec) -> Result<FullObservationSet, EngineError> {
        let mut full = full_observation_set(signal)?;
        let mut vectors = full.partition.vectors().to_vec();
        let last = vectors.pop().unwrap();
        let mut counts = last.counts().to_vec();
        counts[0] += 1;
        vectors.push(ObservationVector::new(counts));
        full.partition = OffsetPartition::from_parts(full.partition.breakpoints().to_vec(), vectors);
        full.vectors = full.partition.vector_set();
        Ok(full)
    }

    #[test]
    fn injected_bug_is_reported_with_counterexample() {
        let signals = random_generic_signals(10, 3, 4);
        let summary = check_many_with(&signals, broken_engine, 2);
        assert_eq!(summary.passed, 0);
        assert_eq!(summary.counterexamples.len(), 2);
        let text = summary.render();
        assert!(text.starts_with("0/10 pass"));
        assert!(text.contains("vector sets differ"));
        assert!(text.contains("partitions differ"));
        assert!(text.contains("\"regions\""));
    }
}
