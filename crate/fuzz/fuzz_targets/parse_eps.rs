#![no_main]

use cyclemeter_core::config::{parse_eps, parse_log_param};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(p) = parse_log_param(text) {
            assert!(p.value.is_finite());
        }
        let _ = parse_eps(text);
    }
});
