//! Seeded random generators shared by the unit tests.

use crate::mat::{CMatrix, CVector, SkewHermitian, StateVector};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard normal via Box-Muller.
pub fn normal(r: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = r.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = r.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

pub fn random_complex(r: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(normal(r), normal(r))
}

pub fn random_matrix(r: &mut ChaCha8Rng, n: usize) -> CMatrix {
    CMatrix::from_fn(n, |_, _| random_complex(r))
}

pub fn random_hermitian(r: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let g = random_matrix(r, n);
    g.add(&g.dagger()).scale(Complex64::new(0.5, 0.0))
}

pub fn random_skew(r: &mut ChaCha8Rng, n: usize) -> SkewHermitian {
    let g = random_matrix(r, n);
    SkewHermitian::symmetrize(g).0
}

pub fn random_unitary(r: &mut ChaCha8Rng, n: usize) -> CMatrix {
    crate::mat::expm(&random_skew(r, n)).expect("random skew-Hermitian exponentiates")
}

pub fn random_state(r: &mut ChaCha8Rng, n: usize) -> StateVector {
    let v = CVector::new((0..n).map(|_| random_complex(r)).collect());
    StateVector::normalize(&v).expect("Gaussian vector is nonzero")
}
