#![no_main]

use libfuzzer_sys::fuzz_target;
use wigner_lab_cli::compare::compare;
use wigner_lab_cli::table::Table;

// Two tables separated by a NUL byte.
fuzz_target!(|text: &str| {
    let (a, b) = text.split_once('\0').unwrap_or((text, text));
    let (Ok(a), Ok(b)) = (Table::parse(a), Table::parse(b)) else {
        return;
    };
    if let Ok(r) = compare(&a, &b, None, None, 0.05) {
        assert!(!r.pass || r.sup_deviation <= 0.05);
    }
});
