#![no_main]

use libfuzzer_sys::fuzz_target;

use gridcount::Rational;

fuzz_target!(|text: &str| {
    if let Ok(r) = text.parse::<Rational>() {
        let again: Rational = r.to_string().parse().expect("display output parses");
        assert_eq!(again, r);
    }
});
