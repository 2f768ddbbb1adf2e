#![no_main]

use anm_core::InferenceConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    if let Ok(cfg) = text.parse::<InferenceConfig>() {
        // Anything accepted must survive a render/parse round trip.
        let again: InferenceConfig = cfg.to_kv_string().parse().expect("rendered config reparses");
        assert_eq!(again, cfg);
    }
});
