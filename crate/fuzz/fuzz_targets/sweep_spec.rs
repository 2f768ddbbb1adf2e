#![no_main]

use anm_core::SweepSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    if let Ok(spec) = SweepSpec::parse(text) {
        let _ = spec.axis.values();
    }
});
