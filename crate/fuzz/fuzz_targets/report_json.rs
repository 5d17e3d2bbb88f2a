//! Fuzzes the report decoder: parsing, verdict re-evaluation from stored
//! measurements, and the points CSV round trip.

#![no_main]

use ergavg::lab::{parse_points_csv, ExperimentReport};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(report) = ExperimentReport::from_json_slice(data) {
        // Stored verdicts may well be inconsistent for synthetic inputs;
        // re-evaluation must reject them with an error, never a panic.
        let _ = report.reevaluate();
        let csv = report.points_csv();
        let parsed = parse_points_csv(&csv);
        if report.series.first().map_or(true, |s| {
            s.points.iter().all(|(x, y)| x.is_finite() && y.is_finite())
        }) {
            assert_eq!(
                parsed.unwrap().len(),
                report.series.first().map_or(0, |s| s.points.len())
            );
        }
    }
});
