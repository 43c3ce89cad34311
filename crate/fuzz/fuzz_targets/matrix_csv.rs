#![no_main]

use libfuzzer_sys::fuzz_target;
use wigner_lab::ensemble::WignerMatrix;

fuzz_target!(|text: &str| {
    if let Ok(m) = WignerMatrix::from_csv(text) {
        let _ = WignerMatrix::from_csv(&m.to_csv()).expect("re-encoded matrix parses");
    }
});
