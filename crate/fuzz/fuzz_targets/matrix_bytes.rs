#![no_main]

use libfuzzer_sys::fuzz_target;
use wigner_lab::ensemble::WignerMatrix;

fuzz_target!(|data: &[u8]| {
    if let Ok(m) = WignerMatrix::from_bytes(data) {
        let bytes = m.to_bytes();
        let back = WignerMatrix::from_bytes(&bytes).expect("re-encoded matrix parses");
        assert_eq!(back.to_bytes(), bytes);
    }
});
