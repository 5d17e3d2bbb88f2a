//! Differencing operators, the unnormalised (global) Gowers `U^s` norms,
//! and the `U²` inverse witness.
//!
//! `U²` is computed exactly from the autocorrelation,
//! `‖f‖⁴_{U²} = Σ_h |Σ_x f(x)·conj(f(x+h))|²`; higher norms use the nesting
//! recursion `‖f‖^{2^s}_{U^s} = Σ_h ‖Δ_h f‖^{2^{s−1}}_{U^{s−1}}` with the
//! `h`-sum reduced by a fixed pairwise tree so results are bit-stable under
//! parallel evaluation. Direct `2^s`-fold sums are reserved for oracle tests
//! on tiny supports.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::gridfn::GridFunction;
use crate::spectral::{self, torus_transform};
use crate::{invalid, Error, Result};

/// `Δ_h f(x) = f(x) · conj(f(x+h))`, iterated over the shift vector; the
/// result is invariant under permutations of the shifts.
pub fn differencing(f: &GridFunction, shifts: &[i64]) -> GridFunction {
    let mut cur = f.clone();
    for &h in shifts {
        cur = difference_once(&cur, h);
    }
    cur
}

fn difference_once(f: &GridFunction, h: i64) -> GridFunction {
    let Some((lo, hi)) = f.support() else {
        return GridFunction::zero();
    };
    // supp Δ_h f ⊆ supp f ∩ (supp f − h).
    let lo = lo.max(lo - h);
    let hi = hi.min(hi - h);
    if lo > hi {
        return GridFunction::zero();
    }
    GridFunction::new(
        lo,
        (lo..=hi)
            .map(|x| f.value_at(x) * f.value_at(x + h).conj())
            .collect(),
    )
}

/// Deterministic pairwise (balanced tree) summation.
fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => pairwise_sum(&xs[..n / 2]) + pairwise_sum(&xs[n / 2..]),
    }
}

/// The `2^s`-th power `‖f‖^{2^s}_{U^s}`, for `s ∈ {1, …, 5}`.
pub fn gowers_norm_power(f: &GridFunction, s: u32) -> Result<f64> {
    if s == 0 || s > 5 {
        return Err(invalid(format!(
            "U^s is implemented for 1 <= s <= 5, got {s}"
        )));
    }
    if s >= 4 && f.len() > 32 {
        return Err(invalid(format!(
            "U^{s} on support length {} exceeds the cost guard (32)",
            f.len()
        )));
    }
    Ok(power_rec(f, s))
}

fn power_rec(f: &GridFunction, s: u32) -> f64 {
    if f.is_zero() {
        return 0.0;
    }
    let reach = f.len() as i64 - 1;
    match s {
        1 => {
            let total: Complex64 = f.values().iter().sum();
            total.norm_sqr()
        }
        2 => {
            let terms: Vec<f64> = (-reach..=reach)
                .map(|h| {
                    let c: Complex64 = f.iter().map(|(x, v)| v * f.value_at(x + h).conj()).sum();
                    c.norm_sqr()
                })
                .collect();
            pairwise_sum(&terms)
        }
        _ => {
            let terms: Vec<f64> = (-reach..=reach)
                .into_par_iter()
                .map(|h| power_rec(&difference_once(f, h), s - 1))
                .collect();
            pairwise_sum(&terms)
        }
    }
}

/// `‖f‖_{U^s}`, the `2^s`-th root of [`gowers_norm_power`].
pub fn gowers_norm(f: &GridFunction, s: u32) -> Result<f64> {
    Ok(gowers_norm_power(f, s)?.powf(0.5f64.powi(s as i32)))
}

/// The `U²` inverse witness: the grid frequency maximizing `|f̂|` together
/// with the bound `|supp f| · |f̂(ξ)|²`, which dominates `‖f‖⁴_{U²}` up to
/// the 2% grid slack.
///
/// The grid must satisfy `M ≥ 8 · support length`; a refinement check
/// against the doubled grid enforces that the grid max is within 1% of the
/// true sup.
pub fn u2_witness(f: &GridFunction, m: usize) -> Result<(f64, f64)> {
    if f.is_zero() {
        return Err(invalid("witness of the zero function"));
    }
    if m < 8 * f.len() {
        return Err(Error::UndersizedGrid {
            need: 8 * f.len(),
            got: m,
        });
    }
    let grid = torus_transform(f, m)?;
    let (arg, max) = grid
        .values()
        .iter()
        .enumerate()
        .map(|(j, v)| (j, v.norm()))
        .max_by(|(_, a), (_, b)| a.total_cmp(b))
        .expect("nonempty grid");
    let fine = torus_transform(f, 2 * m)?;
    let fine_max = fine.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
    if fine_max > 1.01 * max {
        return Err(Error::Refinement(format!(
            "grid max {max:.6e} at M={m} understates the doubled-grid max {fine_max:.6e}"
        )));
    }
    let xi = spectral::signed_frequency(arg, m);
    Ok((xi, f.support_size() as f64 * max * max))
}
