#![no_main]

use anm_core::AnmSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    if let Ok(spec) = text.parse::<AnmSpec>() {
        let again: AnmSpec = spec.to_kv_string().parse().expect("rendered spec reparses");
        assert_eq!(again, spec);
        let _ = spec.f.eval(0.5);
    }
});
