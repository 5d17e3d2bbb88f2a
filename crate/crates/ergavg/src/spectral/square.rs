//! Shifted square functions: the ℓ² aggregate over a lacunary scale set of
//! band-limited convolutions recentred at scale-dependent shifts,
//!
//! `S f = (Σ_{N∈𝔻} |𝔉_ℝ⁻¹η_N(· − λ_N·A·N^d) * f|²)^{1/2}`,  `η_N = η(A N^d ξ)`.
//!
//! Each summand is computed by multiplying the grid transform of `f` with
//! the modulated symbol `e(−2πi λ_N A N^d ξ) · η(A N^d ξ)` and inverting.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::cutoff::{cutoff_psi, snap_scale};
use super::{default_grid_size, e, fft_in_place, ifft_normalized, signed_frequency};
use crate::gridfn::{GridFunction, LacunarySet};
use crate::{invalid, Result};

/// A band symbol for the square function: vanishes at the origin and is
/// supported on `[−C, C]` with `C = 2^⌈log₂ scale⌉ < 1/2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EtaSpec {
    pub scale: f64,
    /// Overall amplitude; zero gives the zero operator.
    pub amplitude: f64,
}

impl EtaSpec {
    pub fn band(scale: f64) -> Self {
        EtaSpec {
            scale,
            amplitude: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.scale.is_nan() || self.scale <= 0.0 || !self.scale.is_finite() {
            return Err(invalid(format!(
                "eta scale must be positive, got {}",
                self.scale
            )));
        }
        if snap_scale(self.scale) >= 0.5 {
            return Err(invalid(format!(
                "eta support 2^ceil(log2 {}) must stay strictly inside half the torus",
                self.scale
            )));
        }
        if !self.amplitude.is_finite() {
            return Err(invalid("eta amplitude must be finite"));
        }
        Ok(())
    }

    /// `η(ξ) = amplitude · (Ψ(ξ/h) − Ψ(2ξ/h))`; the difference vanishes at
    /// the origin by construction.
    pub fn value(&self, xi: f64) -> f64 {
        let h = snap_scale(self.scale);
        self.amplitude * (cutoff_psi(xi / h) - cutoff_psi(2.0 * xi / h))
    }
}

/// One square-function summand before taking moduli: the convolution of `f`
/// with the kernel whose grid symbol is `e(−shift·ξ) η(dilation·ξ)`.
pub fn modulated_band_convolve(
    f: &GridFunction,
    eta: &EtaSpec,
    dilation: f64,
    shift: f64,
) -> Result<GridFunction> {
    eta.validate()?;
    if f.is_zero() || eta.amplitude == 0.0 {
        return Ok(GridFunction::zero());
    }
    let m = default_grid_size(f.len());
    let centre = f.offset() + f.len() as i64 / 2;
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for (x, v) in f.iter() {
        buf[(x - centre).rem_euclid(m as i64) as usize] = v;
    }
    fft_in_place(&mut buf);
    for (j, v) in buf.iter_mut().enumerate() {
        let xi = signed_frequency(j, m);
        *v *= e(-shift * xi) * eta.value(dilation * xi);
    }
    ifft_normalized(&mut buf);
    let lo = centre - m as i64 / 2;
    Ok(GridFunction::new(
        lo,
        (lo..lo + m as i64)
            .map(|p| buf[(p - centre).rem_euclid(m as i64) as usize])
            .collect(),
    ))
}

/// The shifted square function over the scale set, with per-scale recentring
/// amounts `λ_N` supplied as a map from scale to a real in `[−K, K]`.
pub fn shifted_square_function(
    f: &GridFunction,
    scales: &LacunarySet,
    eta: &EtaSpec,
    a: f64,
    d: f64,
    lambda_by_scale: &BTreeMap<u64, f64>,
) -> Result<GridFunction> {
    eta.validate()?;
    if a.is_nan() || a <= 0.0 || !a.is_finite() {
        return Err(invalid(format!("dilation base must be positive, got {a}")));
    }
    if d.is_nan() || d <= 0.0 || !d.is_finite() {
        return Err(invalid(format!(
            "dilation exponent must be positive, got {d}"
        )));
    }
    for &n in scales.scales() {
        match lambda_by_scale.get(&n) {
            Some(l) if l.is_finite() => {}
            Some(_) => return Err(invalid(format!("non-finite shift at scale {n}"))),
            None => return Err(invalid(format!("missing shift for scale {n}"))),
        }
    }
    if f.is_zero() || eta.amplitude == 0.0 || scales.is_empty() {
        return Ok(GridFunction::zero());
    }

    let m = default_grid_size(f.len());
    let centre = f.offset() + f.len() as i64 / 2;
    let mut hat = vec![Complex64::new(0.0, 0.0); m];
    for (x, v) in f.iter() {
        hat[(x - centre).rem_euclid(m as i64) as usize] = v;
    }
    fft_in_place(&mut hat);

    let mut sq = vec![0.0f64; m];
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for &n in scales.scales() {
        let dil = a * (n as f64).powf(d);
        let shift = lambda_by_scale[&n] * dil;
        for (j, v) in buf.iter_mut().enumerate() {
            let xi = signed_frequency(j, m);
            *v = hat[j] * e(-shift * xi) * eta.value(dil * xi);
        }
        ifft_normalized(&mut buf);
        for (s, v) in sq.iter_mut().zip(&buf) {
            *s += v.norm_sqr();
        }
    }
    let lo = centre - m as i64 / 2;
    Ok(GridFunction::new(
        lo,
        (lo..lo + m as i64)
            .map(|p| Complex64::new(sq[(p - centre).rem_euclid(m as i64) as usize].sqrt(), 0.0))
            .collect(),
    ))
}
