//! Finite rotation systems ℤ/Qℤ with `T x = x − a`, the discretized stage
//! for the sharpness simulation: the spatial mean of the bilinear average
//! of an interval indicator against itself.

use crate::gridfn::floor_sqrt;
use crate::{invalid, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CyclicSystem {
    modulus: u64,
    rotation: u64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl CyclicSystem {
    pub fn new(modulus: u64, rotation: u64) -> Result<Self> {
        if modulus < 2 {
            return Err(invalid("modulus must be at least 2"));
        }
        let rotation = rotation % modulus;
        if gcd(rotation, modulus) != 1 {
            return Err(invalid(format!(
                "rotation {rotation} is not coprime to the modulus {modulus}"
            )));
        }
        Ok(CyclicSystem { modulus, rotation })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn rotation(&self) -> u64 {
        self.rotation
    }

    /// `(1/Q) Σ_x A_N(1_A, 1_A)(x)` for `A = [0, size_a)`, where
    /// `A_N(1_A,1_A)(x) = (1/N) Σ_{n≤N} 1_A(x − a⌊√n⌋) 1_A(x − an)` mod Q.
    ///
    /// Folding the x-sum first turns this into a correlation of `A` with
    /// itself sampled along the residues `−a(n − ⌊√n⌋) mod Q`, so the cost
    /// is `O(N + Q·|A|)` rather than `O(N·Q)`.
    pub fn mean_bilinear_average(&self, size_a: u64, cap: u64) -> f64 {
        let q = self.modulus;
        let size_a = size_a.min(q);
        if size_a == 0 || cap == 0 {
            return 0.0;
        }
        // corr[t] = #{y : y ∈ A, (y + t) mod Q ∈ A}.
        let mut corr = vec![0u64; q as usize];
        for t in 0..q {
            let mut count = 0;
            for y in 0..size_a {
                if (y + t) % q < size_a {
                    count += 1;
                }
            }
            corr[t as usize] = count;
        }
        // hist[t] = #{n ≤ N : −a(n − ⌊√n⌋) ≡ t mod Q}.
        let mut hist = vec![0u64; q as usize];
        for n in 1..=cap {
            let k = (n - floor_sqrt(n)) % q;
            let t = (q - (self.rotation * k) % q) % q;
            hist[t as usize] += 1;
        }
        let total: f64 = hist
            .iter()
            .zip(&corr)
            .map(|(&h, &c)| h as f64 * c as f64)
            .sum();
        total / (q as f64 * cap as f64)
    }

    /// Direct `O(N·Q)` evaluation of the same mean, for cross-checking.
    pub fn mean_bilinear_average_direct(&self, size_a: u64, cap: u64) -> f64 {
        let q = self.modulus;
        let size_a = size_a.min(q);
        let in_a = |x: u64| x % q < size_a;
        let mut total = 0.0;
        for x in 0..q {
            let mut acc = 0u64;
            for n in 1..=cap {
                let u = (x + q * q - (self.rotation * (floor_sqrt(n) % q)) % q) % q;
                let v = (x + q * q - (self.rotation * (n % q)) % q) % q;
                if in_a(u) && in_a(v) {
                    acc += 1;
                }
            }
            total += acc as f64 / cap as f64;
        }
        total / q as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn construction_checks_coprimality() {
        assert!(CyclicSystem::new(987, 610).is_ok());
        assert!(CyclicSystem::new(10, 5).is_err());
        assert!(CyclicSystem::new(1, 1).is_err());
    }

    #[test]
    fn whole_space_average_is_one() {
        let sys = CyclicSystem::new(13, 8).unwrap();
        assert_abs_diff_eq!(sys.mean_bilinear_average(13, 100), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn folded_form_matches_direct_evaluation() {
        for (q, a) in [(13u64, 8u64), (21, 13), (34, 21)] {
            let sys = CyclicSystem::new(q, a).unwrap();
            for size_a in [1, q / 4, q / 2] {
                for cap in [7, 50, 200] {
                    let fast = sys.mean_bilinear_average(size_a, cap);
                    let slow = sys.mean_bilinear_average_direct(size_a, cap);
                    assert_abs_diff_eq!(fast, slow, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn equidistribution_at_scale() {
        // On ℤ/987ℤ with the Fibonacci rotation, the mean at N = Q² lands
        // within 15% of the squared density.
        let sys = CyclicSystem::new(987, 610).unwrap();
        let size_a = 494; // density ~ 0.5
        let mu = size_a as f64 / 987.0;
        let mean = sys.mean_bilinear_average(size_a, 987 * 987);
        assert!((mean / (mu * mu) - 1.0).abs() <= 0.15);
    }
}
