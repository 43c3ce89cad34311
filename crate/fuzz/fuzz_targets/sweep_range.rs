#![no_main]

use libfuzzer_sys::fuzz_target;
use wigner_lab_cli::config::parse_range;

fuzz_target!(|text: &str| {
    if let Ok(v) = parse_range(text) {
        assert!(v.iter().all(|x| x.is_finite()));
    }
});
