//! Fourier analysis on ℤ and its dual torus: grid transforms, the smooth
//! cutoff family with band projections, Dirichlet kernels, the discrete and
//! continuous exponential-sum symbols with a principal-arc witness scan, the
//! model paraproduct, and shifted square functions.
//!
//! The sign convention is fixed project-wide as
//! `f̂(ξ) = Σ_x f(x) e(−2πixξ)`.

pub mod cutoff;
pub mod paraproduct;
pub mod quadrature;
pub mod square;
pub mod symbol;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::gridfn::GridFunction;
use crate::{Error, Result};

pub use cutoff::{band_project, cutoff_psi, inverse_psi, CutoffKind, CutoffSpec};
pub use paraproduct::{model_paraproduct, paraproduct_kernel_oracle};
pub use square::{shifted_square_function, EtaSpec};
pub use symbol::{
    continuous_symbol, continuous_symbol_axis_closed_form, dirichlet_kernel, discrete_symbol,
    principal_arc_witness, witnesses_to_csv, ArcWitness, SymbolQuery,
};

/// Uniform sampling of a transform on the torus: `values[j]` lives at the
/// frequency `ξ_j = j / size`.
#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyGrid {
    size: usize,
    values: Vec<Complex64>,
}

impl FrequencyGrid {
    pub fn new(values: Vec<Complex64>) -> Self {
        FrequencyGrid {
            size: values.len(),
            values,
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// The frequency of slot `j`, reduced to `[−1/2, 1/2)`.
    pub fn frequency(&self, j: usize) -> f64 {
        signed_frequency(j, self.size)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&FrequencyGridJson::from(self)).expect("serializing plain floats")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let raw: FrequencyGridJson = serde_json::from_str(s)?;
        raw.try_into()
    }

    pub fn from_json_slice(bytes: &[u8]) -> Result<Self> {
        let raw: FrequencyGridJson = serde_json::from_slice(bytes)?;
        raw.try_into()
    }
}

/// Wire form of [`FrequencyGrid`]: `{M, re: [..], im: [..]}`.
#[derive(Serialize, Deserialize)]
struct FrequencyGridJson {
    #[serde(rename = "M")]
    size: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl From<&FrequencyGrid> for FrequencyGridJson {
    fn from(g: &FrequencyGrid) -> Self {
        FrequencyGridJson {
            size: g.size,
            re: g.values.iter().map(|v| v.re).collect(),
            im: g.values.iter().map(|v| v.im).collect(),
        }
    }
}

impl TryFrom<FrequencyGridJson> for FrequencyGrid {
    type Error = Error;

    fn try_from(raw: FrequencyGridJson) -> Result<Self> {
        if raw.re.len() != raw.im.len() || raw.re.len() != raw.size {
            return Err(Error::Parse(format!(
                "grid declares M={} but carries {} re / {} im samples",
                raw.size,
                raw.re.len(),
                raw.im.len()
            )));
        }
        if raw.re.iter().chain(raw.im.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Parse("non-finite sample".into()));
        }
        Ok(FrequencyGrid {
            size: raw.size,
            values: raw
                .re
                .into_iter()
                .zip(raw.im)
                .map(|(re, im)| Complex64::new(re, im))
                .collect(),
        })
    }
}

/// Maps grid slot `j` of `m` to its representative in `[−1/2, 1/2)`.
pub(crate) fn signed_frequency(j: usize, m: usize) -> f64 {
    if 2 * j >= m {
        j as f64 / m as f64 - 1.0
    } else {
        j as f64 / m as f64
    }
}

/// Smallest power of two that is at least `8 · len` (and at least 64), the
/// default transform size for a support of length `len`.
pub fn default_grid_size(len: usize) -> usize {
    (8 * len.max(8)).next_power_of_two()
}

pub(crate) fn fft_in_place(buf: &mut [Complex64]) {
    FftPlanner::new().plan_fft_forward(buf.len()).process(buf);
}

pub(crate) fn ifft_normalized(buf: &mut [Complex64]) {
    FftPlanner::new().plan_fft_inverse(buf.len()).process(buf);
    let inv = 1.0 / buf.len() as f64;
    for v in buf.iter_mut() {
        *v *= inv;
    }
}

/// `e(t) = exp(2πit)`.
pub(crate) fn e(t: f64) -> Complex64 {
    let (s, c) = (2.0 * std::f64::consts::PI * t).sin_cos();
    Complex64::new(c, s)
}

/// Exact DFT values `f̂(j/M) = Σ_x f(x) e(−2πi x j/M)` on a grid of size `M`.
///
/// Computed by FFT plus an offset twiddle; rejects `M` below the support
/// length, where the samples would alias.
pub fn torus_transform(f: &GridFunction, m: usize) -> Result<FrequencyGrid> {
    if m == 0 || m < f.len() {
        return Err(Error::UndersizedGrid {
            need: f.len().max(1),
            got: m,
        });
    }
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for (i, v) in f.values().iter().enumerate() {
        buf[i] = *v;
    }
    fft_in_place(&mut buf);
    let offset = f.offset();
    for (j, v) in buf.iter_mut().enumerate() {
        // Twiddle e(−offset·j/M); the product is reduced mod M exactly in
        // integers so large offsets lose no phase precision.
        let t = ((offset as i128 * j as i128).rem_euclid(m as i128)) as f64 / m as f64;
        *v *= e(-t);
    }
    Ok(FrequencyGrid {
        size: m,
        values: buf,
    })
}

/// Inverts a grid of transform values onto the window `[offset, offset + M)`.
///
/// Round-trips [`torus_transform`] exactly (up to FFT rounding) when the
/// original support fits the window.
pub fn inverse_torus_transform(grid: &FrequencyGrid, offset: i64) -> GridFunction {
    let m = grid.size;
    let mut buf = grid.values.clone();
    for (j, v) in buf.iter_mut().enumerate() {
        let t = ((offset as i128 * j as i128).rem_euclid(m as i128)) as f64 / m as f64;
        *v *= e(t);
    }
    ifft_normalized(&mut buf);
    GridFunction::new(offset, buf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn direct_transform(f: &GridFunction, m: usize) -> Vec<Complex64> {
        (0..m)
            .map(|j| {
                f.iter()
                    .map(|(x, v)| v * e(-(x as f64) * j as f64 / m as f64))
                    .sum()
            })
            .collect()
    }

    fn random_fn(rng: &mut ChaCha8Rng, lo: i64, len: usize) -> GridFunction {
        GridFunction::new(
            lo,
            (0..len)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect(),
        )
    }

    #[test]
    fn transform_examples() {
        // δ₀ transforms to the constant 1.
        let g = torus_transform(&GridFunction::delta(0), 8).unwrap();
        for v in g.values() {
            assert_abs_diff_eq!(v.re, 1.0, epsilon = 1e-14);
            assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-14);
        }
        // δ₁ at M = 4 gives (1, −i, −1, i).
        let g = torus_transform(&GridFunction::delta(1), 4).unwrap();
        let expect = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, 1.0),
        ];
        for (v, want) in g.values().iter().zip(expect) {
            assert!((v - want).norm() < 1e-14);
        }
        assert!(torus_transform(&GridFunction::indicator(0, 5), 4).is_err());
    }

    #[test]
    fn transform_matches_direct_summation() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..20 {
            let lo = rng.gen_range(-1000..1000);
            let len = rng.gen_range(1..40);
            let f = random_fn(&mut rng, lo, len);
            let m = rng.gen_range(len..4 * len + 3);
            let grid = torus_transform(&f, m).unwrap();
            let direct = direct_transform(&f, m);
            let scale = f.lp_norm(1.0).unwrap().max(1e-30);
            for (a, b) in grid.values().iter().zip(&direct) {
                assert!((a - b).norm() / scale < 1e-10);
            }
        }
    }

    #[test]
    fn parseval_and_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let len = rng.gen_range(1..64);
            let lo = rng.gen_range(-50..50);
            let f = random_fn(&mut rng, lo, len);
            let m = 4 * len;
            let grid = torus_transform(&f, m).unwrap();
            let freq_energy: f64 =
                grid.values().iter().map(|v| v.norm_sqr()).sum::<f64>() / m as f64;
            let space_energy: f64 = f.values().iter().map(|v| v.norm_sqr()).sum();
            assert!((freq_energy - space_energy).abs() / space_energy.max(1e-30) < 1e-10);

            let back = inverse_torus_transform(&grid, f.offset());
            let diff = back.sub(&f).lp_norm(f64::INFINITY).unwrap();
            assert!(diff < 1e-10);
        }
    }

    #[test]
    fn frequency_grid_json_round_trip() {
        let g = FrequencyGrid::new(vec![
            Complex64::new(1.0, -2.0),
            Complex64::new(0.25, 0.5),
            Complex64::new(0.0, 0.0),
        ]);
        let back = FrequencyGrid::from_json_str(&g.to_json_string()).unwrap();
        assert_eq!(back, g);
        assert!(FrequencyGrid::from_json_str("{\"M\":2,\"re\":[1.0],\"im\":[1.0]}").is_err());
    }

    #[test]
    fn signed_frequency_mapping() {
        assert_abs_diff_eq!(signed_frequency(0, 8), 0.0);
        assert_abs_diff_eq!(signed_frequency(3, 8), 0.375);
        assert_abs_diff_eq!(signed_frequency(4, 8), -0.5);
        assert_abs_diff_eq!(signed_frequency(7, 8), -0.125);
    }
}
