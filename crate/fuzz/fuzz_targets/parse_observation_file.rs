#![no_main]

use libfuzzer_sys::fuzz_target;

use gridcount::formats::parse_observation_file;
use gridcount::inference::{infer_n, length_bounds, window_sum_constraints};

fuzz_target!(|text: &str| {
    let Ok(doc) = parse_observation_file(text) else { return };
    let status = infer_n(&doc.set);
    let _ = window_sum_constraints(&doc.set, &status);
    if let Ok(bounds) = length_bounds(&doc.set) {
        assert!(bounds.iter().all(|b| b.width() == 1 || b.width() == 2));
    }
});
