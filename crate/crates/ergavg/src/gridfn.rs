//! Finitely supported complex functions on the integers, plus the integer
//! sequence utilities the averaging operators are built from: exact
//! `⌊√n⌋`, lacunary scale sets, the multiplicity of `⌊√n⌋ − n`, and the
//! uncentered Hardy–Littlewood maximal function.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{invalid, Error, Result};

/// A finitely supported function `ℤ → ℂ`.
///
/// Stored as the index of the first sample plus a dense sample vector, kept
/// in canonical form: the first and last stored samples are nonzero unless
/// the function is identically zero, in which case no samples are stored and
/// the offset is 0. Equality is equality of canonical forms.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    offset: i64,
    values: Vec<Complex64>,
}

impl GridFunction {
    /// Builds a function from its first index and samples, trimming exact
    /// zeros at both ends.
    pub fn new(offset: i64, values: Vec<Complex64>) -> Self {
        let mut f = GridFunction { offset, values };
        f.canonicalize();
        f
    }

    pub fn zero() -> Self {
        GridFunction {
            offset: 0,
            values: Vec::new(),
        }
    }

    /// Unit point mass at `x`.
    pub fn delta(x: i64) -> Self {
        GridFunction {
            offset: x,
            values: vec![Complex64::new(1.0, 0.0)],
        }
    }

    /// Indicator of the half-open interval `[lo, lo + len)`.
    pub fn indicator(lo: i64, len: usize) -> Self {
        GridFunction::new(lo, vec![Complex64::new(1.0, 0.0); len])
    }

    /// Samples `f` on `[lo, lo + len)`.
    pub fn from_fn(lo: i64, len: usize, f: impl Fn(i64) -> Complex64) -> Self {
        GridFunction::new(lo, (0..len as i64).map(|i| f(lo + i)).collect())
    }

    fn canonicalize(&mut self) {
        let zero = Complex64::new(0.0, 0.0);
        let head = self.values.iter().take_while(|v| **v == zero).count();
        if head == self.values.len() {
            self.offset = 0;
            self.values.clear();
            return;
        }
        let tail = self.values.iter().rev().take_while(|v| **v == zero).count();
        self.values.drain(..head);
        self.values.truncate(self.values.len() - tail);
        self.offset += head as i64;
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    /// First index of the stored window.
    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Number of stored samples (the support diameter plus one).
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Inclusive support bounds `(lo, hi)`, or `None` for the zero function.
    pub fn support(&self) -> Option<(i64, i64)> {
        if self.values.is_empty() {
            None
        } else {
            Some((self.offset, self.offset + self.values.len() as i64 - 1))
        }
    }

    /// Number of nonzero samples.
    pub fn support_size(&self) -> usize {
        let zero = Complex64::new(0.0, 0.0);
        self.values.iter().filter(|v| **v != zero).count()
    }

    pub fn value_at(&self, x: i64) -> Complex64 {
        let i = x - self.offset;
        if i < 0 || i as usize >= self.values.len() {
            Complex64::new(0.0, 0.0)
        } else {
            self.values[i as usize]
        }
    }

    /// Iterates over `(x, f(x))` for the stored window.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| (self.offset + i as i64, *v))
    }

    /// The translate `x ↦ f(x − k)`.
    pub fn shift(&self, k: i64) -> Self {
        GridFunction {
            offset: self.offset + k,
            values: self.values.clone(),
        }
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        GridFunction::new(self.offset, self.values.iter().map(|v| c * v).collect())
    }

    pub fn conj(&self) -> Self {
        GridFunction {
            offset: self.offset,
            values: self.values.iter().map(|v| v.conj()).collect(),
        }
    }

    /// Pointwise modulus.
    pub fn abs(&self) -> Self {
        GridFunction::new(
            self.offset,
            self.values
                .iter()
                .map(|v| Complex64::new(v.norm(), 0.0))
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let lo = self.offset.min(other.offset);
        let hi =
            (self.offset + self.values.len() as i64).max(other.offset + other.values.len() as i64);
        GridFunction::new(
            lo,
            (lo..hi)
                .map(|x| self.value_at(x) + other.value_at(x))
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scaled(Complex64::new(-1.0, 0.0)))
    }

    /// `ℓ^p` quasi-norm, `p ∈ (0, ∞]`. Rejects `p ≤ 0` and NaN.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if p.is_nan() || p <= 0.0 {
            return Err(invalid(format!("lp_norm requires p > 0, got {p}")));
        }
        if self.values.is_empty() {
            return Ok(0.0);
        }
        if p.is_infinite() {
            return Ok(self.values.iter().map(|v| v.norm()).fold(0.0, f64::max));
        }
        if p == 2.0 {
            return Ok(self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt());
        }
        if p == 1.0 {
            return Ok(self.values.iter().map(|v| v.norm()).sum());
        }
        let sum: f64 = self.values.iter().map(|v| v.norm().powf(p)).sum();
        Ok(sum.powf(1.0 / p))
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&GridFunctionJson::from(self)).expect("serializing plain floats")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let raw: GridFunctionJson = serde_json::from_str(s)?;
        raw.try_into()
    }

    pub fn from_json_slice(bytes: &[u8]) -> Result<Self> {
        let raw: GridFunctionJson = serde_json::from_slice(bytes)?;
        raw.try_into()
    }
}

/// Wire form of [`GridFunction`]: `{offset, re: [..], im: [..]}`.
#[derive(Serialize, Deserialize)]
struct GridFunctionJson {
    offset: i64,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl From<&GridFunction> for GridFunctionJson {
    fn from(f: &GridFunction) -> Self {
        GridFunctionJson {
            offset: f.offset,
            re: f.values.iter().map(|v| v.re).collect(),
            im: f.values.iter().map(|v| v.im).collect(),
        }
    }
}

impl TryFrom<GridFunctionJson> for GridFunction {
    type Error = Error;

    fn try_from(raw: GridFunctionJson) -> Result<Self> {
        if raw.re.len() != raw.im.len() {
            return Err(Error::Parse(format!(
                "re has {} samples but im has {}",
                raw.re.len(),
                raw.im.len()
            )));
        }
        if raw.re.iter().chain(raw.im.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Parse("non-finite sample".into()));
        }
        if raw.offset.unsigned_abs() > i64::MAX as u64 / 4
            || raw.re.len() as u64 > i64::MAX as u64 / 4
        {
            return Err(Error::Parse("window overflows the index range".into()));
        }
        Ok(GridFunction::new(
            raw.offset,
            raw.re
                .into_iter()
                .zip(raw.im)
                .map(|(re, im)| Complex64::new(re, im))
                .collect(),
        ))
    }
}

/// The bilinear pairing `Σ_x f(x) · conj(g(x))` over the overlap of supports.
pub fn inner_product(f: &GridFunction, g: &GridFunction) -> Complex64 {
    let (Some((flo, fhi)), Some((glo, ghi))) = (f.support(), g.support()) else {
        return Complex64::new(0.0, 0.0);
    };
    let lo = flo.max(glo);
    let hi = fhi.min(ghi);
    let mut acc = Complex64::new(0.0, 0.0);
    for x in lo..=hi {
        acc += f.value_at(x) * g.value_at(x).conj();
    }
    acc
}

/// The unconjugated pairing `Σ_x f(x) g(x)`, the form the trilinear
/// identities are stated in.
pub fn bilinear_pairing(f: &GridFunction, g: &GridFunction) -> Complex64 {
    inner_product(f, &g.conj())
}

/// Exact integer square root: the `k` with `k² ≤ n < (k+1)²`.
///
/// Integer Newton iteration; no floating point anywhere, so 64-bit inputs
/// adjacent to perfect squares are classified exactly.
pub fn floor_sqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    // Initial guess: 2^⌈bits/2⌉ ≥ √n, and the iteration is monotone down.
    let mut x = 1u64 << (u64::BITS - n.leading_zeros()).div_ceil(2);
    loop {
        let next = (x + n / x) / 2;
        if next >= x {
            break;
        }
        x = next;
    }
    debug_assert!({
        let (x, n) = (x as u128, n as u128);
        x * x <= n && (x + 1) * (x + 1) > n
    });
    x
}

/// A strictly increasing set of scales with consecutive ratios `> lambda`.
#[derive(Clone, Debug, PartialEq)]
pub struct LacunarySet {
    lambda: f64,
    scales: Vec<u64>,
}

impl LacunarySet {
    /// Wraps an existing scale list, verifying the ratio invariant.
    pub fn from_scales(lambda: f64, scales: Vec<u64>) -> Result<Self> {
        if lambda.is_nan() || lambda <= 1.0 {
            return Err(invalid(format!(
                "lacunarity requires lambda > 1, got {lambda}"
            )));
        }
        for w in scales.windows(2) {
            if w[1] as f64 <= lambda * w[0] as f64 {
                return Err(invalid(format!(
                    "consecutive scales {} and {} violate the ratio > {lambda}",
                    w[0], w[1]
                )));
            }
        }
        if scales.contains(&0) {
            return Err(invalid("scales must be positive"));
        }
        Ok(LacunarySet { lambda, scales })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn scales(&self) -> &[u64] {
        &self.scales
    }

    pub fn len(&self) -> usize {
        self.scales.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scales.is_empty()
    }
}

/// Greedy maximal `lambda`-lacunary subset of `[n_min, n_max]`: start at
/// `n_min` and repeatedly append the smallest integer strictly greater than
/// `lambda · last`.
pub fn lacunary_set(lambda: f64, n_min: u64, n_max: u64) -> Result<LacunarySet> {
    if lambda.is_nan() || lambda <= 1.0 {
        return Err(invalid(format!(
            "lacunarity requires lambda > 1, got {lambda}"
        )));
    }
    if n_min < 1 || n_min > n_max {
        return Err(invalid(format!(
            "need 1 <= n_min <= n_max, got [{n_min}, {n_max}]"
        )));
    }
    let mut scales = vec![n_min];
    loop {
        let last = *scales.last().expect("nonempty");
        let target = lambda * last as f64;
        let mut next = target.floor() as u64 + 1;
        // Guard against the floor landing short under f64 rounding.
        while next as f64 <= lambda * last as f64 {
            next += 1;
        }
        if next > n_max {
            break;
        }
        scales.push(next);
    }
    LacunarySet::from_scales(lambda, scales)
}

/// Number of `n ∈ [1, n_cap]` with `⌊√n⌋ − n = k`.
///
/// The map `n ↦ ⌊√n⌋ − n` is non-increasing with steps in `{0, −1}`, so the
/// count is always 0, 1 or 2; candidates are located around `√(−k)` directly
/// rather than by scanning.
pub fn difference_multiplicity(k: i64, n_cap: u64) -> u32 {
    if n_cap == 0 || k > 0 {
        return 0;
    }
    let s = floor_sqrt(k.unsigned_abs());
    let mut count = 0;
    for m in s.saturating_sub(2)..=s + 2 {
        let n = m as i64 - k;
        if n >= 1 && n as u64 <= n_cap && floor_sqrt(n as u64) == m {
            count += 1;
        }
    }
    count
}

/// Uncentered Hardy–Littlewood maximal function with a radius cap: at each
/// `x`, the maximum of the average of `|f|` over integer intervals `I ∋ x`
/// with `|I| ≤ radius_cap`.
pub fn hl_maximal(f: &GridFunction, radius_cap: u64) -> Result<GridFunction> {
    if radius_cap < 1 {
        return Err(invalid("radius cap must be at least 1"));
    }
    let Some((lo, hi)) = f.support() else {
        return Ok(GridFunction::zero());
    };
    let cap = radius_cap as i64;
    let out_lo = lo - (cap - 1);
    let out_hi = hi + (cap - 1);
    let win_len = (out_hi - out_lo + 1) as usize;
    // Prefix sums of |f| over the output window.
    let mut prefix = vec![0.0f64; win_len + 1];
    for i in 0..win_len {
        prefix[i + 1] = prefix[i] + f.value_at(out_lo + i as i64).norm();
    }
    let window_sum = |a: i64, b: i64| -> f64 {
        // Sum of |f| over [a, b]; indices clamped to the window, outside is 0.
        let a = (a - out_lo).clamp(0, win_len as i64) as usize;
        let b = (b - out_lo + 1).clamp(0, win_len as i64) as usize;
        if b > a {
            prefix[b] - prefix[a]
        } else {
            0.0
        }
    };
    let mut out = Vec::with_capacity(win_len);
    for x in out_lo..=out_hi {
        let mut best = 0.0f64;
        for len in 1..=cap {
            for start in (x - len + 1)..=x {
                let avg = window_sum(start, start + len - 1) / len as f64;
                best = best.max(avg);
            }
        }
        out.push(Complex64::new(best, 0.0));
    }
    Ok(GridFunction::new(out_lo, out))
}
