//! Fuzzes the FrequencyGrid JSON decoder.

#![no_main]

use ergavg::spectral::FrequencyGrid;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(g) = FrequencyGrid::from_json_slice(data) {
        assert_eq!(g.size(), g.values().len());
        let again = FrequencyGrid::from_json_str(&g.to_json_string()).unwrap();
        assert_eq!(again, g);
    }
});
