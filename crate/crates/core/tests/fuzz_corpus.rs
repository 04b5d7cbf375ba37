//! Replays the checked-in fuzz corpus through the same checks the fuzz
//! targets make, so the seeds stay meaningful without a nightly toolchain.

use std::fs;
use std::path::PathBuf;

use gridcount::formats::{parse_observation_file, parse_signal_file};
use gridcount::inference::{infer_n, length_bounds, window_sum_constraints};
use gridcount::oracle::oracle_partition;
use gridcount::signal::genericity_check;
use gridcount::{full_observation_set, Rational};

fn corpus(target: &str) -> Vec<(PathBuf, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut files: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|entry| entry.unwrap().path())
        .collect();
    files.sort();
    assert!(!files.is_empty(), "no seeds in {}", dir.display());
    files
        .into_iter()
        .map(|path| {
            let bytes = fs::read(&path).unwrap();
            (path, String::from_utf8_lossy(&bytes).into_owned())
        })
        .collect()
}

#[test]
fn rational_seeds() {
    let mut parsed = 0;
    for (path, text) in corpus("parse_rational") {
        if let Ok(r) = text.parse::<Rational>() {
            parsed += 1;
            let again: Rational = r.to_string().parse().unwrap();
            assert_eq!(again, r, "{}", path.display());
        }
    }
    assert!(parsed > 0);
}

#[test]
fn signal_file_seeds() {
    let mut enumerated = 0;
    for (path, text) in corpus("parse_signal_file") {
        let Ok(doc) = parse_signal_file(&text) else { continue };
        let signal = &doc.signal;
        if signal.len() <= 8 && genericity_check(signal).generic {
            let full = full_observation_set(signal).unwrap();
            assert_eq!(full.partition, oracle_partition(signal), "{}", path.display());
            assert_eq!(full.vectors.len(), signal.len() + 1);
            enumerated += 1;
        }
    }
    assert!(enumerated > 0);
}

#[test]
fn observation_file_seeds() {
    let mut parsed = 0;
    for (_, text) in corpus("parse_observation_file") {
        let Ok(doc) = parse_observation_file(&text) else { continue };
        parsed += 1;
        let status = infer_n(&doc.set);
        let _ = window_sum_constraints(&doc.set, &status);
        if let Ok(bounds) = length_bounds(&doc.set) {
            assert!(bounds.iter().all(|b| b.width() == 1 || b.width() == 2));
        }
    }
    assert!(parsed > 0);
}
