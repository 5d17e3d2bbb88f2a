//! The bilinear averaging operators on ℤ sampled along `(⌊√n⌋, n)`: the full
//! average `A_N`, the upper-half operator `Ã_N`, the linear smoothing
//! operator `B_N`, and the two dual functions of the trilinear form
//! `Σ_x h · Ã_N(f,g)`.
//!
//! All sums are evaluated exactly over windows computed from support
//! arithmetic; nothing is truncated. The pairing convention throughout is
//! the bilinear sum `Σ h · Ã_N(f,g)` with no conjugation.

use num_complex::Complex64;

use crate::gridfn::{floor_sqrt, GridFunction};

/// Inclusive range of `n` entering the average.
fn n_range(cap: u64, upper_half: bool) -> std::ops::RangeInclusive<u64> {
    if upper_half {
        cap / 2 + 1..=cap
    } else {
        1..=cap
    }
}

/// Accumulates `(1/N) Σ_n a(x − sa(n)) b(x − sb(n))` over the given `n`
/// range, where the shifts may depend on `n` and `m = ⌊√n⌋`.
fn bilinear_sum(
    a: &GridFunction,
    b: &GridFunction,
    cap: u64,
    upper_half: bool,
    shifts: impl Fn(i64, i64) -> (i64, i64),
) -> GridFunction {
    let (Some((alo, ahi)), Some((blo, bhi))) = (a.support(), b.support()) else {
        return GridFunction::zero();
    };
    let range = n_range(cap, upper_half);

    // First pass: the exact output window.
    let mut lo = i64::MAX;
    let mut hi = i64::MIN;
    for n in range.clone() {
        let (sa, sb) = shifts(floor_sqrt(n) as i64, n as i64);
        let l = (alo + sa).max(blo + sb);
        let h = (ahi + sa).min(bhi + sb);
        if l <= h {
            lo = lo.min(l);
            hi = hi.max(h);
        }
    }
    if lo > hi {
        return GridFunction::zero();
    }

    let mut buf = vec![Complex64::new(0.0, 0.0); (hi - lo + 1) as usize];
    for n in range {
        let (sa, sb) = shifts(floor_sqrt(n) as i64, n as i64);
        let l = (alo + sa).max(blo + sb);
        let h = (ahi + sa).min(bhi + sb);
        for x in l..=h {
            buf[(x - lo) as usize] += a.value_at(x - sa) * b.value_at(x - sb);
        }
    }
    let inv = Complex64::new(1.0 / cap as f64, 0.0);
    for v in &mut buf {
        *v *= inv;
    }
    GridFunction::new(lo, buf)
}

/// `A_N(f,g)(x) = (1/N) Σ_{n≤N} f(x − ⌊√n⌋) g(x − n)`.
pub fn bilinear_average(f: &GridFunction, g: &GridFunction, cap: u64) -> GridFunction {
    assert!(cap >= 1, "averaging length must be positive");
    bilinear_sum(f, g, cap, false, |m, n| (m, n))
}

/// The upper-half operator `Ã_N(f,g)(x) = (1/N) Σ_{N/2<n≤N} f(x−⌊√n⌋) g(x−n)`.
///
/// Satisfies `Ã_N = A_N − (⌊N/2⌋/N) A_{⌊N/2⌋}` exactly for `N ≥ 2`.
pub fn upper_half_average(f: &GridFunction, g: &GridFunction, cap: u64) -> GridFunction {
    assert!(cap >= 1, "averaging length must be positive");
    bilinear_sum(f, g, cap, true, |m, n| (m, n))
}

/// The linear smoothing operator `B_N g(x) = (1/N) Σ_{n≤N} g(x + ⌊√n⌋ − n)`.
///
/// Preserves mass: `‖B_N g‖₁ = ‖g‖₁` for nonnegative `g`.
pub fn linear_smoothing_average(g: &GridFunction, cap: u64) -> GridFunction {
    assert!(cap >= 1, "averaging length must be positive");
    let Some((glo, ghi)) = g.support() else {
        return GridFunction::zero();
    };
    // Shifts n − ⌊√n⌋ run over [0, N − ⌊√N⌋]; group n by the shift value.
    let mut lo = i64::MAX;
    let mut hi = i64::MIN;
    for n in 1..=cap {
        let s = n as i64 - floor_sqrt(n) as i64;
        lo = lo.min(glo + s);
        hi = hi.max(ghi + s);
    }
    let mut buf = vec![Complex64::new(0.0, 0.0); (hi - lo + 1) as usize];
    for n in 1..=cap {
        let s = n as i64 - floor_sqrt(n) as i64;
        for (y, v) in g.iter() {
            buf[(y + s - lo) as usize] += v;
        }
    }
    let inv = Complex64::new(1.0 / cap as f64, 0.0);
    for v in &mut buf {
        *v *= inv;
    }
    GridFunction::new(lo, buf)
}

/// First dual function:
/// `Ã*_N(h,g)(x) = (1/N) Σ_{N/2<n≤N} h(x+⌊√n⌋) g(x+⌊√n⌋−n)`.
///
/// Pairs against the `f` slot: `Σ_x h·Ã_N(f,g) = Σ_x f·Ã*_N(h,g)`.
pub fn dual_star(h: &GridFunction, g: &GridFunction, cap: u64) -> GridFunction {
    assert!(cap >= 1, "averaging length must be positive");
    bilinear_sum(h, g, cap, true, |m, n| (-m, n - m))
}

/// Second dual function:
/// `Ã**_N(f₀,f₁)(x) = (1/N) Σ_{N/2<n≤N} f₀(x+n) f₁(x−⌊√n⌋+n)`.
///
/// Pairs against the `g` slot: `Σ_x f₀·Ã_N(f₁,f₂) = Σ_x f₂·Ã**_N(f₀,f₁)`.
pub fn dual_star_star(f0: &GridFunction, f1: &GridFunction, cap: u64) -> GridFunction {
    assert!(cap >= 1, "averaging length must be positive");
    bilinear_sum(f0, f1, cap, true, |m, n| (-n, m - n))
}
