#![no_main]

use libfuzzer_sys::fuzz_target;
use wigner_lab::ou_flow::HermiteDensity;

fuzz_target!(|text: &str| {
    if let Ok(d) = HermiteDensity::from_text(text) {
        let back = HermiteDensity::from_text(&d.to_text()).expect("re-encoded density parses");
        assert_eq!(back.order(), d.order());
        let _ = d.eval(0.5);
    }
});
