//! The fixed smooth cutoff `Ψ` and everything derived from it: the
//! lowpass/band/highpass family with power-of-two scale snapping, band
//! projections of grid functions, and a cached table of the real-line
//! inverse transform `𝔉_ℝ⁻¹Ψ` used by the spatial-side operators.

use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{fft_in_place, ifft_normalized, quadrature, signed_frequency};
use crate::gridfn::GridFunction;
use crate::{invalid, Error, Result};

/// The fixed bump: even, supported on `[−1, 1]`, identically 1 on
/// `[−1/2, 1/2]`, gluing the two plateaus with the symmetric smooth step
/// `s(u) = φ(1−u) / (φ(1−u) + φ(u))`, `φ(u) = exp(−1/u)` for `u > 0`.
pub fn cutoff_psi(t: f64) -> f64 {
    let a = t.abs();
    if a <= 0.5 {
        1.0
    } else if a >= 1.0 {
        0.0
    } else {
        let u = 2.0 * a - 1.0;
        let up = (-1.0 / (1.0 - u)).exp();
        let down = (-1.0 / u).exp();
        up / (up + down)
    }
}

/// Snaps a positive scale to `2^⌈log₂ x⌉`, the dilation the cutoff family
/// actually uses.
pub fn snap_scale(x: f64) -> f64 {
    (x.log2().ceil()).exp2()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CutoffKind {
    /// `Ψ_{≤x}`: one near the origin, supported on `|ξ| ≤ 2^⌈log₂x⌉`.
    Lowpass,
    /// `Ψ_x = Ψ_{≤x} − Ψ_{≤x/2}`: an annular band.
    Band,
    /// `Ψ_{>x} = 1 − Ψ_{≤x}`.
    Highpass,
}

/// One member of the cutoff family at a given (pre-snap) scale.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutoffSpec {
    pub scale: f64,
    pub kind: CutoffKind,
}

impl CutoffSpec {
    pub fn lowpass(scale: f64) -> Self {
        CutoffSpec {
            scale,
            kind: CutoffKind::Lowpass,
        }
    }

    pub fn band(scale: f64) -> Self {
        CutoffSpec {
            scale,
            kind: CutoffKind::Band,
        }
    }

    pub fn highpass(scale: f64) -> Self {
        CutoffSpec {
            scale,
            kind: CutoffKind::Highpass,
        }
    }

    /// The snapped dilation `2^⌈log₂ scale⌉`.
    pub fn snapped(&self) -> f64 {
        snap_scale(self.scale)
    }

    /// Lowpass and band cutoffs must live inside the torus; highpass is the
    /// complement and is allowed any scale.
    pub fn validate(&self) -> Result<()> {
        if self.scale.is_nan() || self.scale <= 0.0 || !self.scale.is_finite() {
            return Err(invalid(format!(
                "cutoff scale must be positive, got {}",
                self.scale
            )));
        }
        if matches!(self.kind, CutoffKind::Lowpass | CutoffKind::Band) && self.scale > 0.5 {
            return Err(Error::CutoffScale(self.scale));
        }
        Ok(())
    }

    /// Symbol value at a frequency `ξ ∈ [−1/2, 1/2)`.
    pub fn value(&self, xi: f64) -> f64 {
        let h = self.snapped();
        match self.kind {
            CutoffKind::Lowpass => cutoff_psi(xi / h),
            CutoffKind::Band => cutoff_psi(xi / h) - cutoff_psi(2.0 * xi / h),
            CutoffKind::Highpass => 1.0 - cutoff_psi(xi / h),
        }
    }
}

/// Multiplies the transform of `f` by the cutoff on a grid of size `m` and
/// inverts. The output carries the full grid window centred on the support
/// of `f`; the grid-level identity `f_{≤x} + f_{>x} = f` is exact.
pub fn band_project(f: &GridFunction, spec: &CutoffSpec, m: usize) -> Result<GridFunction> {
    spec.validate()?;
    if f.is_zero() {
        return Ok(GridFunction::zero());
    }
    if m < 8 * f.len() {
        return Err(Error::UndersizedGrid {
            need: 8 * f.len(),
            got: m,
        });
    }
    // Circular buffer centred on the support: index (x − centre) mod m.
    let centre = f.offset() + f.len() as i64 / 2;
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for (x, v) in f.iter() {
        buf[(x - centre).rem_euclid(m as i64) as usize] = v;
    }
    fft_in_place(&mut buf);
    for (j, v) in buf.iter_mut().enumerate() {
        *v *= spec.value(signed_frequency(j, m));
    }
    ifft_normalized(&mut buf);
    let lo = centre - m as i64 / 2;
    let vals = (lo..lo + m as i64)
        .map(|p| buf[(p - centre).rem_euclid(m as i64) as usize])
        .collect();
    Ok(GridFunction::new(lo, vals))
}

// ---------------------------------------------------------------------------
// Cached 𝔉_ℝ⁻¹Ψ
// ---------------------------------------------------------------------------

const INV_PSI_STEP: f64 = 1.0 / 1024.0; // 2^-10
const INV_PSI_RANGE: f64 = 64.0;
/// Kernel samples beyond this magnitude threshold are treated as zero.
pub const INV_PSI_TRUNCATION: f64 = 1e-12;

struct InvPsiTable {
    /// Values at `u = i · step` for `u ∈ [0, range]`, plus one guard point.
    values: Vec<f64>,
    /// Largest `|u|` at which the tabulated kernel still exceeds the
    /// truncation threshold.
    support_radius: f64,
}

static INV_PSI: OnceLock<InvPsiTable> = OnceLock::new();

/// Direct quadrature for `𝔉_ℝ⁻¹Ψ(u) = ∫ Ψ(ξ) e(uξ) dξ`, real and even.
///
/// The plateau contributes `sin(πu)/(πu)` in closed form; the transition
/// region is integrated by panels.
fn inverse_psi_direct(u: f64) -> f64 {
    let u = u.abs();
    let plateau = if u == 0.0 {
        1.0
    } else {
        (std::f64::consts::PI * u).sin() / (std::f64::consts::PI * u)
    };
    // 2 ∫_{1/2}^1 Ψ(ξ) cos(2πuξ) dξ, about u/2 oscillation cycles.
    let panels = 4 + (u / 8.0).ceil() as usize;
    let tail = 2.0
        * quadrature::gl16_real(0.5, 1.0, panels, |xi| {
            cutoff_psi(xi) * (2.0 * std::f64::consts::PI * u * xi).cos()
        });
    plateau + tail
}

fn build_inv_psi_table() -> InvPsiTable {
    use rayon::prelude::*;
    let n = (INV_PSI_RANGE / INV_PSI_STEP) as usize;
    let values: Vec<f64> = (0..=n + 1)
        .into_par_iter()
        .map(|i| inverse_psi_direct(i as f64 * INV_PSI_STEP))
        .collect();
    let last_big = values
        .iter()
        .rposition(|v| v.abs() >= INV_PSI_TRUNCATION)
        .unwrap_or(0);
    let table = InvPsiTable {
        support_radius: (last_big as f64 * INV_PSI_STEP).min(INV_PSI_RANGE),
        values,
    };
    // Interpolation budget: compare against direct quadrature between grid
    // points on a deterministic subsample.
    let mut worst = 0.0f64;
    for k in 0..256 {
        let u = (k as f64 + 0.37) * (INV_PSI_RANGE / 256.0);
        worst = worst.max((interpolate(&table, u) - inverse_psi_direct(u)).abs());
    }
    assert!(
        worst < 1e-9,
        "inverse-Psi interpolation error {worst:.3e} exceeds the 1e-9 budget"
    );
    table
}

fn interpolate(table: &InvPsiTable, u: f64) -> f64 {
    let a = u.abs();
    if a >= table.support_radius {
        return 0.0;
    }
    let pos = a / INV_PSI_STEP;
    let i = pos as usize;
    let t = pos - i as f64;
    // Catmull–Rom through the four surrounding samples; the even extension
    // supplies the left neighbour at the origin.
    let v = &table.values;
    let p0 = if i == 0 { v[1] } else { v[i - 1] };
    let p1 = v[i];
    let p2 = v[i + 1];
    let p3 = if i + 2 < v.len() { v[i + 2] } else { 0.0 };
    let a0 = -0.5 * p0 + 1.5 * p1 - 1.5 * p2 + 0.5 * p3;
    let a1 = p0 - 2.5 * p1 + 2.0 * p2 - 0.5 * p3;
    let a2 = 0.5 * (p2 - p0);
    ((a0 * t + a1) * t + a2) * t + p1
}

/// `𝔉_ℝ⁻¹Ψ(u)`, served from the cached table (built once, then read-only).
///
/// Values beyond the support radius, where the kernel magnitude falls under
/// [`INV_PSI_TRUNCATION`], are clamped to zero.
pub fn inverse_psi(u: f64) -> f64 {
    interpolate(INV_PSI.get_or_init(build_inv_psi_table), u)
}

/// Spatial truncation radius of the tabulated kernel.
pub fn inverse_psi_radius() -> f64 {
    INV_PSI.get_or_init(build_inv_psi_table).support_radius
}
