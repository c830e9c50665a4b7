//! Replays the checked-in fuzz seeds through the parsers.

use std::fs;
use std::path::PathBuf;

use cyclemeter_core::config::{
    parse_config, parse_eps, parse_k_spec, parse_log_param, parse_n_grid, parse_param, parse_s_grid,
};

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|entry| {
            let path = entry.unwrap().path();
            let name = path.file_name().unwrap().to_string_lossy().into_owned();
            (name, fs::read_to_string(&path).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn config_seeds_parse() {
    for (name, text) in seeds("parse_config") {
        let cfg = parse_config(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        for fam in cfg.families.keys() {
            cfg.resolve(fam, &Default::default()).unwrap();
        }
    }
}

#[test]
fn param_seeds_parse() {
    for (name, text) in seeds("parse_param") {
        let ok = parse_param(&text).is_ok() || parse_k_spec(&text).is_ok();
        assert!(ok, "{name}");
    }
}

#[test]
fn grid_seeds_parse() {
    for (name, text) in seeds("parse_grid") {
        assert!(parse_n_grid(&text).is_ok() || parse_s_grid(&text).is_ok(), "{name}");
    }
}

#[test]
fn eps_seeds_parse() {
    for (name, text) in seeds("parse_eps") {
        let eps = parse_eps(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        for (p, raw) in eps.iter().zip(text.split(',')) {
            assert_eq!(p.value, parse_log_param(raw).unwrap().value);
        }
    }
}
