//! Fuzzes the points CSV reader.

#![no_main]

use ergavg::lab::parse_points_csv;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(points) = parse_points_csv(text) {
        assert!(points.iter().all(|(x, y)| x.is_finite() && y.is_finite()));
    }
});
