//! Shared fixtures and random generators for the unit tests.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::operator_core::{DensityOperator, StatePair};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_hermitian(dim: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
    });
    (&g + g.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Random full-rank density; the identity shift keeps it well conditioned.
pub fn random_density(dim: usize, rng: &mut ChaCha8Rng) -> DensityOperator {
    let g = DMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
    });
    let psd =
        &g * g.adjoint() + DMatrix::<Complex64>::identity(dim, dim) * Complex64::new(0.05, 0.0);
    let tr = psd.trace().re;
    DensityOperator::from_matrix(psd / Complex64::new(tr, 0.0)).unwrap()
}

/// Classical (1/2, 1/2) vs (1/4, 3/4), diagonally embedded.
pub fn bern_pair() -> StatePair {
    let rho = DensityOperator::from_probabilities(&[0.5, 0.5]).unwrap();
    let eta = DensityOperator::from_probabilities(&[0.25, 0.75]).unwrap();
    StatePair::new(rho, eta).unwrap()
}

/// Non-commuting qubit pair with a complex off-diagonal; order_log ≈ 0.561.
pub fn tilted_pair() -> StatePair {
    let rho = DensityOperator::from_matrix(DMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(0.5, 0.0),
            Complex64::new(0.25, -0.1),
            Complex64::new(0.25, 0.1),
            Complex64::new(0.5, 0.0),
        ],
    ))
    .unwrap();
    let eta = DensityOperator::from_probabilities(&[0.65, 0.35]).unwrap();
    StatePair::new(rho, eta).unwrap()
}

/// rho = eta, non-diagonal, full rank.
pub fn equal_pair() -> StatePair {
    let m = DMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(0.7, 0.0),
            Complex64::new(0.1, 0.05),
            Complex64::new(0.1, -0.05),
            Complex64::new(0.3, 0.0),
        ],
    );
    let d = DensityOperator::from_matrix(m).unwrap();
    StatePair::new(d.clone(), d).unwrap()
}
