//! Fuzzes the sampled-sequence decoder and drives the variation norms on
//! whatever it accepts.

#![no_main]

use ergavg::lab::io::{sequence_from_json, sequence_to_json};
use ergavg::variation::{jump_count, variation_norm};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(seq) = sequence_from_json(data) {
        let again = sequence_from_json(sequence_to_json(&seq).as_bytes()).unwrap();
        assert_eq!(again, seq);
        // The norms are O(n^2); bound the work per input.
        if !seq.is_empty() && seq.len() <= 128 {
            let v = variation_norm(&seq, 2.0).unwrap();
            assert!(v.value >= v.sup_term);
            let j = jump_count(&seq, 0.5).unwrap();
            assert!((j.count as usize) < seq.len());
        }
    }
});
