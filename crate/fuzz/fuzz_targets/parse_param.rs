#![no_main]

use cyclemeter_core::config::{parse_k_spec, parse_param, parse_real};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(q) = parse_param(text) {
            // Canonical output parses back to the same value, within the
            // parser's length limit.
            let canonical = q.to_string();
            if canonical.len() <= 64 {
                assert_eq!(parse_param(&canonical).ok(), Some(q));
            }
            assert!(parse_real(text).unwrap().is_finite());
        }
        let _ = parse_k_spec(text);
    }
});
