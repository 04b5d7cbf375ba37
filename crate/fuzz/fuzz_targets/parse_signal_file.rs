#![no_main]

use libfuzzer_sys::fuzz_target;

use gridcount::formats::parse_signal_file;
use gridcount::full_observation_set;
use gridcount::oracle::oracle_partition;
use gridcount::signal::genericity_check;

fuzz_target!(|text: &str| {
    let Ok(doc) = parse_signal_file(text) else { return };
    let signal = &doc.signal;
    if signal.len() > 8 {
        return;
    }
    if genericity_check(signal).generic {
        let full = full_observation_set(signal).expect("generic signal enumerates");
        assert_eq!(full.partition, oracle_partition(signal));
        assert_eq!(full.vectors.len(), signal.len() + 1);
    }
});
