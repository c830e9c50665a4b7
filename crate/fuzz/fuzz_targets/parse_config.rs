#![no_main]

use cyclemeter_core::config::parse_config;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(cfg) = parse_config(text) {
            // Resolving must not panic either; building is skipped because
            // some families sum millions of terms.
            for name in cfg.families.keys() {
                let _ = cfg.resolve(name, &Default::default());
            }
        }
    }
});
