#![no_main]

use libfuzzer_sys::fuzz_target;
use tomoprob::cli::{parse_config, EvolveConfig, MarginalConfig, ReconstructConfig};

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = parse_config::<MarginalConfig>(text);
        let _ = parse_config::<ReconstructConfig>(text);
        let _ = parse_config::<EvolveConfig>(text);
    }
});
