#![no_main]

use anm_core::parse_csv_str;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    if let Ok(sample) = parse_csv_str(text) {
        assert!(!sample.is_empty());
        assert!(sample.pairs().all(|(x, y)| x.is_finite() && y.is_finite()));
    }
});
