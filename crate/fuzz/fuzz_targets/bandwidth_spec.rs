#![no_main]

use anm_core::BandwidthSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    if let Ok(spec) = text.parse::<BandwidthSpec>() {
        let again: BandwidthSpec = spec.to_string().parse().expect("rendered bandwidth reparses");
        assert_eq!(again, spec);
    }
});
