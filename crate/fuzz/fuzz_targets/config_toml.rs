#![no_main]

use libfuzzer_sys::fuzz_target;
use wigner_lab_cli::config::ExperimentConfig;

fuzz_target!(|text: &str| {
    if let Ok(c) = ExperimentConfig::from_toml(text) {
        let _ = c.validate();
        if let Ok(encoded) = c.to_toml() {
            let back = ExperimentConfig::from_toml(&encoded).expect("re-encoded config parses");
            assert_eq!(back.hash().ok(), c.hash().ok());
        }
    }
});
