#![no_main]

use libfuzzer_sys::fuzz_target;
use wigner_lab::spectra::SpectralSample;

fuzz_target!(|text: &str| {
    if let Ok(s) = SpectralSample::from_csv(text) {
        let back = SpectralSample::from_csv(&s.to_csv()).expect("re-encoded spectrum parses");
        assert_eq!(back.len(), s.len());
    }
});
