//! Exact r-variation norms, the V^∞ norm, and jump counting for finite
//! complex sequences indexed by a scale set.
//!
//! The oscillation part of `V^r` is the supremum over increasing chains of
//! times of the `ℓ^r` norm of consecutive differences. Scale sets here are
//! lacunary, so sequences are short and the O(n²) dynamic programs below are
//! exact and cheap; [`exhaustive`] holds the brute-force chain enumerations
//! used as oracles.

use num_complex::Complex64;

use crate::{invalid, Result};

/// A complex sequence sampled at strictly increasing integer times.
#[derive(Clone, Debug, PartialEq)]
pub struct IndexedSequence {
    times: Vec<u64>,
    samples: Vec<Complex64>,
}

impl IndexedSequence {
    pub fn new(times: Vec<u64>, samples: Vec<Complex64>) -> Result<Self> {
        if times.len() != samples.len() {
            return Err(invalid(format!(
                "{} times but {} samples",
                times.len(),
                samples.len()
            )));
        }
        if times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("times must be strictly increasing"));
        }
        Ok(IndexedSequence { times, samples })
    }

    /// Samples with implicit times `0..len`.
    pub fn from_samples(samples: Vec<Complex64>) -> Self {
        IndexedSequence {
            times: (0..samples.len() as u64).collect(),
            samples,
        }
    }

    pub fn times(&self) -> &[u64] {
        &self.times
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Value of `V^r` together with its sup/oscillation split and a witnessing
/// chain of indices into the time set.
#[derive(Clone, Debug, PartialEq)]
pub struct VariationResult {
    pub value: f64,
    pub sup_term: f64,
    pub osc_term: f64,
    /// Strictly increasing indices whose consecutive differences realize the
    /// oscillation term.
    pub witness_chain: Vec<usize>,
}

/// `V^r` of a nonempty sequence, `r ∈ (0, ∞]`.
///
/// For finite `r` the oscillation is computed by dynamic programming over
/// chain endpoints: `best[j] = max_{i<j}(best[i] + |a_j − a_i|^r)`. Powers
/// are taken on differences normalized by the largest one, so large `r`
/// cannot overflow; the maximizing chain is unchanged by that scaling. For
/// `r = ∞` the oscillation is the diameter `max_{i<j} |a_j − a_i|`.
pub fn variation_norm(seq: &IndexedSequence, r: f64) -> Result<VariationResult> {
    if seq.is_empty() {
        return Err(invalid("variation of an empty sequence"));
    }
    if r.is_nan() || r <= 0.0 {
        return Err(invalid(format!(
            "variation exponent must be positive, got {r}"
        )));
    }
    let a = seq.samples();
    let sup_term = a.iter().map(|v| v.norm()).fold(0.0, f64::max);

    let (osc_term, witness_chain) = if r.is_infinite() {
        diameter(a)
    } else {
        osc_dp(a, r)
    };
    Ok(VariationResult {
        value: sup_term + osc_term,
        sup_term,
        osc_term,
        witness_chain,
    })
}

fn diameter(a: &[Complex64]) -> (f64, Vec<usize>) {
    let mut best = 0.0f64;
    let mut chain = vec![0];
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            let d = (a[j] - a[i]).norm();
            if d > best {
                best = d;
                chain = vec![i, j];
            }
        }
    }
    (best, chain)
}

fn osc_dp(a: &[Complex64], r: f64) -> (f64, Vec<usize>) {
    let n = a.len();
    let scale = a
        .iter()
        .flat_map(|x| a.iter().map(move |y| (x - y).norm()))
        .fold(0.0f64, f64::max);
    if scale == 0.0 {
        return (0.0, vec![0]);
    }
    // best[j]: largest normalized r-power sum over chains ending at j.
    let mut best = vec![0.0f64; n];
    let mut prev = vec![usize::MAX; n];
    for j in 1..n {
        for i in 0..j {
            let d = (a[j] - a[i]).norm() / scale;
            let cand = best[i] + d.powf(r);
            if cand > best[j] {
                best[j] = cand;
                prev[j] = i;
            }
        }
    }
    let (end, &total) = best
        .iter()
        .enumerate()
        .max_by(|(_, x), (_, y)| x.total_cmp(y))
        .expect("nonempty");
    let mut chain = vec![end];
    let mut cur = end;
    while prev[cur] != usize::MAX {
        cur = prev[cur];
        chain.push(cur);
    }
    chain.reverse();
    (scale * total.powf(1.0 / r), chain)
}

/// `V^r` of a bare sample slice (sup plus oscillation), without witness
/// bookkeeping. Hot-loop variant of [`variation_norm`] for pointwise sweeps;
/// the caller guarantees `r > 0` and a nonempty slice.
pub fn variation_value(samples: &[Complex64], r: f64) -> f64 {
    let sup = samples.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if r.is_infinite() {
        let mut best = 0.0f64;
        for i in 0..samples.len() {
            for j in i + 1..samples.len() {
                best = best.max((samples[j] - samples[i]).norm());
            }
        }
        return sup + best;
    }
    let n = samples.len();
    let mut scale = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            scale = scale.max((samples[j] - samples[i]).norm());
        }
    }
    if scale == 0.0 {
        return sup;
    }
    let mut best = vec![0.0f64; n];
    let mut top = 0.0f64;
    for j in 1..n {
        for i in 0..j {
            let d = (samples[j] - samples[i]).norm() / scale;
            let cand = best[i] + d.powf(r);
            if cand > best[j] {
                best[j] = cand;
            }
        }
        top = top.max(best[j]);
    }
    sup + scale * top.powf(1.0 / r)
}

/// Recomputes the `ℓ^r` norm of consecutive differences along `chain`,
/// with the same normalization as the DP. Checks the witness invariant.
pub fn chain_osc(seq: &IndexedSequence, chain: &[usize], r: f64) -> f64 {
    let a = seq.samples();
    let diffs: Vec<f64> = chain
        .windows(2)
        .map(|w| (a[w[1]] - a[w[0]]).norm())
        .collect();
    let scale = diffs.iter().copied().fold(0.0f64, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    if r.is_infinite() {
        return scale;
    }
    scale
        * diffs
            .iter()
            .map(|d| (d / scale).powf(r))
            .sum::<f64>()
            .powf(1.0 / r)
}

/// Maximal number of δ-jumps together with a witnessing chain.
#[derive(Clone, Debug, PartialEq)]
pub struct JumpCount {
    pub count: u32,
    pub witness_chain: Vec<usize>,
}

/// Exact maximal `J` for which some increasing chain of `J + 1` times has
/// every consecutive difference of modulus at least `delta` (ties count).
///
/// Computed as a longest path over the jump relation: the one-pass greedy
/// that anchors at the first time undercounts when the first sample sits
/// between two later extremes, so each endpoint is considered.
pub fn jump_count(seq: &IndexedSequence, delta: f64) -> Result<JumpCount> {
    if delta.is_nan() || delta <= 0.0 {
        return Err(invalid(format!(
            "jump threshold must be positive, got {delta}"
        )));
    }
    if seq.is_empty() {
        return Err(invalid("jump count of an empty sequence"));
    }
    let a = seq.samples();
    let n = a.len();
    let mut jumps = vec![0u32; n];
    let mut prev = vec![usize::MAX; n];
    for j in 1..n {
        for i in 0..j {
            if (a[j] - a[i]).norm() >= delta && jumps[i] + 1 > jumps[j] {
                jumps[j] = jumps[i] + 1;
                prev[j] = i;
            }
        }
    }
    let (end, &count) = jumps
        .iter()
        .enumerate()
        .max_by_key(|(_, &c)| c)
        .expect("nonempty");
    let mut chain = vec![end];
    let mut cur = end;
    while prev[cur] != usize::MAX {
        cur = prev[cur];
        chain.push(cur);
    }
    chain.reverse();
    Ok(JumpCount {
        count,
        witness_chain: chain,
    })
}

/// Brute-force chain enumerations. Exponential in the sequence length; these
/// exist to validate the dynamic programs and must stay independent of them.
pub mod exhaustive {
    use num_complex::Complex64;

    /// Oscillation term of `V^r` by enumerating every increasing chain.
    pub fn variation_osc(a: &[Complex64], r: f64) -> f64 {
        let n = a.len();
        assert!(n <= 25, "exhaustive enumeration is exponential");
        let mut best = 0.0f64;
        for mask in 0u32..(1 << n) {
            if mask.count_ones() < 2 {
                continue;
            }
            let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            let sum: f64 = idx
                .windows(2)
                .map(|w| (a[w[1]] - a[w[0]]).norm().powf(r))
                .sum();
            best = best.max(sum.powf(1.0 / r));
        }
        best
    }

    /// Maximal δ-jump count by enumerating every increasing chain.
    pub fn jump_count(a: &[Complex64], delta: f64) -> u32 {
        let n = a.len();
        assert!(n <= 25, "exhaustive enumeration is exponential");
        let mut best = 0u32;
        for mask in 0u32..(1 << n) {
            let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            if idx.len() < 2 {
                continue;
            }
            if idx.windows(2).all(|w| (a[w[1]] - a[w[0]]).norm() >= delta) {
                best = best.max(idx.len() as u32 - 1);
            }
        }
        best
    }
}
