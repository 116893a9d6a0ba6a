#![allow(dead_code)]

use jacobi_tsankov::linalg::{self, Matrix};
use jacobi_tsankov::tensor::{ComplexStructure, CurvatureTensor, SymmetricForm};
use jacobi_tsankov::{Rational, Scalar, ScalarMode};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type Q = Rational;

pub fn q(n: i64, d: i64) -> Q {
    Q::from_ratio(n, d)
}

/// Nonzero `p/q` with `|p| <= 9`, `1 <= q <= 9`.
pub fn random_c(rng: &mut ChaCha8Rng) -> Q {
    let mut p = 0;
    while p == 0 {
        p = rng.random_range(-9i64..=9);
    }
    q(p, rng.random_range(1i64..=9))
}

/// Standard structure conjugated by a seeded signed permutation.
pub fn conjugated_theta<S: Scalar>(m: usize, seed: u64) -> ComplexStructure<S> {
    let p = linalg::random_signed_permutation::<S>(m, seed);
    ComplexStructure::standard(m).unwrap().conjugate(&p, &ScalarMode::of::<S>()).unwrap()
}

/// Random orthogonal matrix from Gram-Schmidt on Gaussian columns.
pub fn random_rotation(m: usize, seed: u64) -> Matrix<f64> {
    let mode = ScalarMode::float(1e-12).unwrap();
    let vs: Vec<Vec<f64>> = (0..m).map(|k| linalg::random_unit_vector(m, seed * 97 + k as u64).unwrap()).collect();
    Matrix::from_columns(&linalg::orthonormalize(&vs, &mode, true).unwrap())
}

pub fn r_theta_q(m: usize, c: Q, seed: u64) -> CurvatureTensor<Q> {
    CurvatureTensor::r_theta(&conjugated_theta(m, seed), c).unwrap()
}

pub fn gauss_diag(d: &[Q]) -> CurvatureTensor<Q> {
    let phi = SymmetricForm::new(Matrix::diag(d), &ScalarMode::exact()).unwrap();
    CurvatureTensor::from_form(&phi).unwrap()
}

/// A nonzero random algebraic curvature tensor.
pub fn nonzero_act(m: usize, seed: u64) -> CurvatureTensor<Q> {
    let mut s = seed;
    loop {
        let t = CurvatureTensor::random_act(m, 1 + (s % 3) as usize, s).unwrap();
        if !t.is_zero() {
            return t;
        }
        s = s.wrapping_add(1_000_003);
    }
}
