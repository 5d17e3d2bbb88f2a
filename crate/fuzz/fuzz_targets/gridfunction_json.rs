//! Fuzzes the GridFunction JSON decoder. Errors are fine; panics are not,
//! and accepted inputs must be canonical and round-trip exactly.

#![no_main]

use ergavg::gridfn::GridFunction;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(f) = GridFunction::from_json_slice(data) {
        // Canonical form: nonzero endpoints unless identically zero.
        if let Some((lo, hi)) = f.support() {
            assert_ne!(f.value_at(lo), num_complex::Complex64::new(0.0, 0.0));
            assert_ne!(f.value_at(hi), num_complex::Complex64::new(0.0, 0.0));
        } else {
            assert_eq!(f.offset(), 0);
        }
        let again = GridFunction::from_json_str(&f.to_json_string()).unwrap();
        assert_eq!(again, f);
    }
});
