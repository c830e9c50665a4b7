#![no_main]

use cyclemeter_core::config::{parse_n_grid, parse_s_grid};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(grid) = parse_n_grid(text) {
            let joined: Vec<String> = grid.iter().map(usize::to_string).collect();
            assert_eq!(parse_n_grid(&joined.join(",")).unwrap(), grid);
        }
        let _ = parse_s_grid(text);
    }
});
