#![no_main]

use libfuzzer_sys::fuzz_target;
use tomoprob::io::{hybrid_from_csv, quadrature_from_csv, spin_from_csv, CsvTable};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(table) = CsvTable::parse(text) {
        let _ = spin_from_csv(&table);
        let _ = quadrature_from_csv(&table);
        let _ = hybrid_from_csv(&table);
    }
});
