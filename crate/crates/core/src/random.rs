//! Seeded random instances.
//!
//! Every randomized construction in the crate draws from
//! `Xoshiro256PlusPlus` (xorshift family) seeded with a `u64`, so a seed fully
//! determines an instance.

use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::numerics::{CMatrix, C64};

pub type Prng = Xoshiro256PlusPlus;

pub fn seeded(seed: u64) -> Prng {
    Prng::seed_from_u64(seed)
}

pub fn normal_c64(rng: &mut Prng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Complex Gaussian matrix with unit-variance entries.
pub fn random_cmatrix(rng: &mut Prng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| normal_c64(rng))
}

pub fn random_hermitian(rng: &mut Prng, n: usize) -> CMatrix {
    let g = random_cmatrix(rng, n, n);
    (&g + g.adjoint()) * C64::new(0.5, 0.0)
}

/// Haar-ish unitary from the QR factorization of a Gaussian matrix, with the
/// diagonal of R made positive.
pub fn random_unitary(rng: &mut Prng, n: usize) -> CMatrix {
    if n == 0 {
        return CMatrix::zeros(0, 0);
    }
    let g = random_cmatrix(rng, n, n);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        if d.norm() > 0.0 {
            let ph = d / d.norm();
            for z in q.column_mut(j).iter_mut() {
                *z *= ph;
            }
        }
    }
    q
}

pub fn uniform(rng: &mut Prng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}

pub fn index(rng: &mut Prng, lo: usize, hi_inclusive: usize) -> usize {
    rng.random_range(lo..=hi_inclusive)
}

/// Gaussian vector of a Hilbert module.
pub fn random_vector(rng: &mut Prng, module: &crate::modcorr::HilbertModule) -> crate::modcorr::ModVector {
    let blocks = module
        .ambient()
        .iter()
        .zip(module.shape().blocks())
        .map(|(&d, &n)| random_cmatrix(rng, d, n))
        .collect();
    crate::modcorr::ModVector::new(module.clone(), blocks).expect("block sizes match the module")
}
