//! Randomly shifted Halton points and compensated summation.

use rand::Rng;

const PRIMES: [u32; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Largest supported point dimension.
pub const MAX_DIM: usize = PRIMES.len();

fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = u64::from(base);
    let inv = 1.0 / f64::from(base);
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % b) as f64;
        i /= b;
        f *= inv;
    }
    r
}

/// Halton point `index` (starting at 1) in `dim` dimensions, shifted
/// modulo 1 by `shift` (Cranley-Patterson rotation).
pub fn shifted_halton(index: u64, shift: &[f64], out: &mut [f64]) {
    for (k, (o, s)) in out.iter_mut().zip(shift).enumerate() {
        let x = radical_inverse(index, PRIMES[k]) + s;
        *o = if x >= 1.0 { x - 1.0 } else { x };
    }
}

pub fn random_shift<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    (0..dim).map(|_| rng.random::<f64>()).collect()
}

/// Neumaier's compensated sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn van_der_corput_prefix() {
        let v: Vec<f64> = (1..=4).map(|i| radical_inverse(i, 2)).collect();
        assert_eq!(v, vec![0.5, 0.25, 0.75, 0.125]);
        assert!((radical_inverse(1, 3) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = NeumaierSum::default();
        s.add(1e16);
        for _ in 0..1000 {
            s.add(1.0);
        }
        s.add(-1e16);
        assert_eq!(s.value(), 1000.0);
    }

    #[test]
    fn integrates_a_smooth_function() {
        let shift = [0.3, 0.7, 0.1];
        let mut p = [0.0; 3];
        let n = 20_000;
        let mut s = NeumaierSum::default();
        for i in 1..=n {
            shifted_halton(i, &shift, &mut p);
            s.add(p[0] * p[1] * p[1] * (1.0 + p[2]));
        }
        let exact = 0.5 / 3.0 * 1.5;
        assert!((s.value() / n as f64 - exact).abs() < 1e-3);
    }
}
