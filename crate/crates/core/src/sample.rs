//! Seeded random matrices for sampling studies.
//!
//! Every routine that samples takes a master seed. Per-sample generators are
//! derived by selecting a ChaCha stream, so sample `k` is the same no matter
//! how the work is scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::matrix::{c, expm, CMatrix, CVector, I};

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for sample `index` under `seed`.
pub fn stream(seed: u64, index: u64) -> SampleRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(index);
    r
}

fn standard_normal<R: Rng + ?Sized>(r: &mut R) -> f64 {
    r.sample(StandardNormal)
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn random_complex<R: Rng + ?Sized>(n: usize, r: &mut R) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| {
        c(standard_normal(r), standard_normal(r)) * std::f64::consts::FRAC_1_SQRT_2
    })
}

pub fn random_vector<R: Rng + ?Sized>(n: usize, r: &mut R) -> CVector {
    CVector::from_fn(n, |_, _| c(standard_normal(r), standard_normal(r)))
}

/// `(B + B*)/2` for a complex Gaussian `B`.
pub fn random_hermitian<R: Rng + ?Sized>(n: usize, r: &mut R) -> CMatrix {
    let b = random_complex(n, r);
    (&b + b.adjoint()) * c(0.5, 0.0)
}

/// `B*B` for a complex Gaussian `B`.
pub fn random_psd<R: Rng + ?Sized>(n: usize, r: &mut R) -> CMatrix {
    let b = random_complex(n, r);
    b.adjoint() * b
}

/// `e^{iH}` for a random Hermitian `H`.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, r: &mut R) -> CMatrix {
    let h = random_hermitian(n, r);
    expm(&(h * I), 1.0).expect("skew-Hermitian exponent has no overflow cap")
}
