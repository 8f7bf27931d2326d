//! Deterministic sample sets from additive (Kronecker) recurrences.
//!
//! Coordinate `i` of point `k` in stream `s` is `frac((k + offset(s)) * alpha_i)`
//! with `alpha_i` the fractional part of the square root of the `i`-th prime.
//! No random number generator is involved, so sample sets are identical on
//! every platform.

use crate::linalg::{dot, norm, normalized};

const PRIMES: [u32; 24] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
];

/// Stream of quasi-uniform points in unit cubes of any dimension up to 24.
#[derive(Debug, Clone)]
pub struct Sampler {
    index: u64,
}

impl Sampler {
    pub fn new(stream: u64) -> Self {
        Sampler {
            index: 1 + stream.wrapping_mul(7919),
        }
    }

    /// Next point of `[0, 1)^n`.
    pub fn next_cube(&mut self, n: usize) -> Vec<f64> {
        assert!(n <= PRIMES.len(), "sampler supports at most {} coordinates", PRIMES.len());
        let k = self.index as f64;
        self.index += 1;
        PRIMES[..n]
            .iter()
            .map(|&p| {
                let a = f64::from(p).sqrt().fract();
                (k * a).fract()
            })
            .collect()
    }
}

pub fn rng(stream: u64) -> Sampler {
    Sampler::new(stream)
}

/// Vector with entries in `[-scale, scale]`.
pub fn uniform_vector(s: &mut Sampler, n: usize, scale: f64) -> Vec<f64> {
    s.next_cube(n).into_iter().map(|x| scale * (2.0 * x - 1.0)).collect()
}

/// Unit vector in `R^n`, by normalizing points of the cube that fall inside the unit ball.
pub fn unit_vector(s: &mut Sampler, n: usize) -> Vec<f64> {
    loop {
        let v = uniform_vector(s, n, 1.0);
        let r = norm(&v);
        if r <= 1.0 && r > 1e-2 {
            return normalized(&v);
        }
    }
}

/// `count` unit vectors in `R^n` from stream `stream`.
pub fn unit_vectors(n: usize, count: usize, stream: u64) -> Vec<Vec<f64>> {
    let mut s = Sampler::new(stream);
    (0..count).map(|_| unit_vector(&mut s, n)).collect()
}

/// Unit vector orthogonal to the unit vector `u`.
pub fn unit_vector_orthogonal_to(s: &mut Sampler, u: &[f64]) -> Vec<f64> {
    loop {
        let mut v = unit_vector(s, u.len());
        let c = dot(&v, u);
        for (x, y) in v.iter_mut().zip(u) {
            *x -= c * y;
        }
        if norm(&v) > 1e-2 {
            return normalized(&v);
        }
    }
}
