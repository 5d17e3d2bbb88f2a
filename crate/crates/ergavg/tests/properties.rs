//! Property tests for the structural invariants: canonical forms,
//! serialization round trips, lacunary ratios, norm invariances, and the
//! chain dynamic programs against their exhaustive oracles.

use num_complex::Complex64;
use proptest::prelude::*;

use ergavg::averages::{dual_star, dual_star_star, upper_half_average};
use ergavg::gridfn::{bilinear_pairing, floor_sqrt, lacunary_set, GridFunction};
use ergavg::variation::{self, exhaustive, IndexedSequence};

fn complex_vec(max_len: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 0..max_len).prop_map(|v| {
        v.into_iter()
            .map(|(re, im)| Complex64::new(re, im))
            .collect()
    })
}

proptest! {
    #[test]
    fn canonicalization_is_idempotent(offset in -1000i64..1000, values in complex_vec(24),
                                      head in 0usize..4, tail in 0usize..4) {
        let mut padded = vec![Complex64::new(0.0, 0.0); head];
        padded.extend(values.iter().copied());
        padded.extend(vec![Complex64::new(0.0, 0.0); tail]);
        let direct = GridFunction::new(offset + head as i64, values);
        let via_padding = GridFunction::new(offset, padded);
        prop_assert_eq!(&direct, &via_padding);
        let again = GridFunction::new(direct.offset(), direct.values().to_vec());
        prop_assert_eq!(&again, &direct);
    }

    #[test]
    fn grid_json_round_trip_is_exact(offset in -1_000_000i64..1_000_000, values in complex_vec(32)) {
        let f = GridFunction::new(offset, values);
        let back = GridFunction::from_json_str(&f.to_json_string()).unwrap();
        prop_assert_eq!(back.offset(), f.offset());
        prop_assert_eq!(back.values(), f.values());
    }

    #[test]
    fn lp_norm_is_translation_invariant(values in complex_vec(16), shift in -100i64..100,
                                        p in 0.25f64..8.0) {
        let f = GridFunction::new(0, values);
        let a = f.lp_norm(p).unwrap();
        let b = f.shift(shift).lp_norm(p).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn lacunary_greedy_respects_ratio(lambda in 1.01f64..8.0, n_min in 1u64..64,
                                      span in 1u64..4096) {
        let set = lacunary_set(lambda, n_min, n_min + span).unwrap();
        prop_assert_eq!(set.scales()[0], n_min);
        for w in set.scales().windows(2) {
            prop_assert!(w[1] as f64 > lambda * w[0] as f64);
        }
    }

    #[test]
    fn floor_sqrt_is_exact(n in 0u64..u64::MAX) {
        let k = floor_sqrt(n);
        prop_assert!((k as u128) * (k as u128) <= n as u128);
        prop_assert!(((k + 1) as u128) * ((k + 1) as u128) > n as u128);
    }

    #[test]
    fn variation_dp_matches_exhaustive(samples in complex_vec(8), r in prop::sample::select(vec![1.0, 2.0, 3.0])) {
        prop_assume!(!samples.is_empty());
        let seq = IndexedSequence::from_samples(samples.clone());
        let dp = variation::variation_norm(&seq, r).unwrap().osc_term;
        let brute = exhaustive::variation_osc(&samples, r);
        prop_assert!((dp - brute).abs() <= 1e-12 * brute.max(1.0));
    }

    #[test]
    fn jump_count_matches_exhaustive(samples in complex_vec(8), delta in 0.05f64..2.0) {
        prop_assume!(!samples.is_empty());
        let seq = IndexedSequence::from_samples(samples.clone());
        let dp = variation::jump_count(&seq, delta).unwrap().count;
        prop_assert_eq!(dp, exhaustive::jump_count(&samples, delta));
    }

    #[test]
    fn trilinear_dualities_hold(f in complex_vec(24), g in complex_vec(24), h in complex_vec(24),
                                cap in 1u64..32) {
        let f = GridFunction::new(-3, f);
        let g = GridFunction::new(2, g);
        let h = GridFunction::new(0, h);
        let lhs = bilinear_pairing(&h, &upper_half_average(&f, &g, cap));
        let via_star = bilinear_pairing(&f, &dual_star(&h, &g, cap));
        let via_star_star = bilinear_pairing(&g, &dual_star_star(&h, &f, cap));
        let scale = lhs.norm().max(1e-30);
        prop_assert!((lhs - via_star).norm() / scale <= 1e-12);
        prop_assert!((lhs - via_star_star).norm() / scale <= 1e-12);
    }
}
