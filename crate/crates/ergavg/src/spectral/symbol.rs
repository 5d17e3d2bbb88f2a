//! The exponential-sum symbols of the averaging operators: the unnormalised
//! Dirichlet kernel, the discrete symbol
//! `m_{N;ℤ}(ξ₁,ξ₂) = 𝔼_{n∈[N]} 1_{n>N/2} e(−ξ₁⌊√n⌋ − ξ₂n)`,
//! its continuous counterpart `m_{N;ℝ}`, and the exhaustive grid scan that
//! collects the frequencies where the symbol stays large (which all sit on
//! the principal arc `‖ξ₂‖ ≲ 1/N`).

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use super::{e, quadrature};
use crate::gridfn::floor_sqrt;
use crate::{invalid, Result};

/// Reduces a real frequency to its torus representative in `[−1/2, 1/2)`.
pub fn reduce_torus(x: f64) -> f64 {
    let r = x - x.floor();
    if r >= 0.5 {
        r - 1.0
    } else {
        r
    }
}

/// Distance to the nearest integer, `‖x‖_𝕋`.
pub fn torus_norm(x: f64) -> f64 {
    reduce_torus(x).abs()
}

/// Arguments of the discrete symbol; torus points are stored reduced.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymbolQuery {
    pub xi1: f64,
    pub xi2: f64,
    pub cap: u64,
    pub upper_half: bool,
}

impl SymbolQuery {
    pub fn new(xi1: f64, xi2: f64, cap: u64, upper_half: bool) -> Self {
        SymbolQuery {
            xi1: reduce_torus(xi1),
            xi2: reduce_torus(xi2),
            cap,
            upper_half,
        }
    }
}

/// `D_k(ξ) = Σ_{j<k} e(ξj)`, in closed form
/// `e((k−1)ξ/2) · sin(kπξ)/sin(πξ)` away from integer `ξ`.
pub fn dirichlet_kernel(k: u64, xi: f64) -> Complex64 {
    let xi = reduce_torus(xi);
    if xi == 0.0 {
        return Complex64::new(k as f64, 0.0);
    }
    let pi = std::f64::consts::PI;
    let ratio = (k as f64 * pi * xi).sin() / (pi * xi).sin();
    e((k as f64 - 1.0) * xi / 2.0) * ratio
}

/// Exact direct summation of `m_{N;ℤ}`.
pub fn discrete_symbol(q: &SymbolQuery) -> Complex64 {
    let start = if q.upper_half { q.cap / 2 + 1 } else { 1 };
    let mut acc = Complex64::new(0.0, 0.0);
    for n in start..=q.cap {
        let m = floor_sqrt(n) as f64;
        acc += e(-(q.xi1 * m + q.xi2 * n as f64));
    }
    acc / q.cap as f64
}

/// `m_{N;ℝ}(ξ₁,ξ₂) = (1/N) ∫_{N/2}^N e(−ξ₁√t − ξ₂t) dt`.
///
/// Evaluated after the substitution `t = u²`, which makes the phase
/// polynomial in `u`; panels start at `64·⌈1 + |ξ₁|√N + |ξ₂|N⌉` and double
/// until two refinements agree within 1e−10.
pub fn continuous_symbol(xi1: f64, xi2: f64, cap: u64) -> Result<Complex64> {
    if cap < 1 {
        return Err(invalid("averaging length must be positive"));
    }
    let n = cap as f64;
    let (a, b) = ((n / 2.0).sqrt(), n.sqrt());
    let phase_scale = 1.0 + xi1.abs() * n.sqrt() + xi2.abs() * n;
    let init = 64 * (phase_scale.ceil() as usize);
    let budget = init.max(1) << 6;
    let val = quadrature::converged(a, b, init, budget, 5e-11, |u| {
        e(-(xi1 * u + xi2 * u * u)) * (2.0 * u)
    })?;
    Ok(val / n)
}

/// Closed form of `m_{N;ℝ}(0, ξ₂)`:
/// `(e(−ξ₂N) − e(−ξ₂N/2)) / (−2πiξ₂N)`, and 1/2 at `ξ₂ = 0`.
pub fn continuous_symbol_axis_closed_form(xi2: f64, cap: u64) -> Complex64 {
    let n = cap as f64;
    if xi2 == 0.0 {
        return Complex64::new(0.5, 0.0);
    }
    let num = e(-xi2 * n) - e(-xi2 * n / 2.0);
    let den = Complex64::new(0.0, -2.0 * std::f64::consts::PI * xi2 * n);
    num / den
}

/// A grid point where the discrete symbol is at least the scan threshold.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArcWitness {
    pub zeta: f64,
    pub xi: f64,
    pub abs_m: f64,
    /// `‖ξ‖_𝕋 · N`, the normalized principal-arc coordinate.
    pub xi_times_n: f64,
}

/// Scans the full `(ζ, ξ)` torus grid with spacing at most `grid_step` and
/// returns every point with `|m_{N;ℤ}(ζ,ξ)| ≥ delta`.
///
/// For fixed `ξ` the symbol, grouped over the intervals where `⌊√n⌋` is
/// constant, is a short trigonometric polynomial in `ζ` whose coefficients
/// are Dirichlet-kernel sums, so each row of the scan is one FFT.
pub fn principal_arc_witness(cap: u64, delta: f64, grid_step: f64) -> Result<Vec<ArcWitness>> {
    if delta.is_nan() || delta <= 0.0 || delta > 1.0 {
        return Err(invalid(format!("threshold must lie in (0,1], got {delta}")));
    }
    if grid_step.is_nan() || grid_step <= 0.0 || grid_step > 1.0 / (4.0 * cap as f64) {
        return Err(invalid(format!(
            "grid step {grid_step} too coarse: need at most 1/(4N) = {}",
            1.0 / (4.0 * cap as f64)
        )));
    }
    let m = (1.0 / grid_step).ceil() as usize;
    let half = cap / 2;
    let m_lo = floor_sqrt(half + 1);
    let m_hi = floor_sqrt(cap);
    let fft = FftPlanner::new().plan_fft_forward(m);

    let rows: Vec<Vec<ArcWitness>> = (0..m)
        .into_par_iter()
        .map(|j| {
            let xi = super::signed_frequency(j, m);
            // Coefficient of e(−ζ·mm) is Σ_{n ∈ I_mm} e(−ξn) over the block
            // I_mm where ⌊√n⌋ = mm, expressed through Dirichlet kernels.
            let mut buf = vec![Complex64::new(0.0, 0.0); m];
            for mm in m_lo..=m_hi {
                let a = (half + 1).max(mm * mm);
                let b = cap.min(mm * mm + 2 * mm);
                if a > b {
                    continue;
                }
                let block = e(-xi * a as f64) * dirichlet_kernel(b - a + 1, -xi);
                buf[mm as usize] = block / cap as f64;
            }
            fft.process(&mut buf);
            buf.iter()
                .enumerate()
                .filter(|(_, v)| v.norm() >= delta)
                .map(|(i, v)| {
                    let zeta = super::signed_frequency(i, m);
                    ArcWitness {
                        zeta,
                        xi,
                        abs_m: v.norm(),
                        xi_times_n: xi.abs() * cap as f64,
                    }
                })
                .collect()
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

/// Renders witnesses as CSV with the columns `zeta,xi,absm,xiTimesN`.
pub fn witnesses_to_csv(witnesses: &[ArcWitness]) -> String {
    let mut out = String::from("zeta,xi,absm,xiTimesN\n");
    for w in witnesses {
        out.push_str(&format!(
            "{},{},{},{}\n",
            w.zeta, w.xi, w.abs_m, w.xi_times_n
        ));
    }
    out
}
