//! Algebraic curvature tensors on Euclidean spaces, their Jacobi operators,
//! an exact decision procedure for commutation of Jacobi operators on
//! orthogonal pairs, and the classification of tensors with that property as
//! `c·R₀` or `c·R_Θ`.

#![allow(clippy::needless_range_loop)]

pub mod classify;
pub mod cli;
pub mod error;
pub mod format;
pub mod jacobi;
pub mod linalg;
pub mod scalar;
pub mod tensor;
pub mod tsankov;

pub use classify::{classify, osserman_check, recover_complex_structure, structure_report, Classification, Tag};
pub use error::{Error, Result};
pub use jacobi::{block_structure, jacobi, jacobi_polarized, jacobi_rank, ricci, w_space, BlockStructureReport};
pub use linalg::{Matrix, Vector};
pub use scalar::{Rational, Scalar, ScalarKind, ScalarMode};
pub use tensor::{validate, ComplexStructure, CurvatureTensor, SymmetricForm, ValidationReport};
pub use tsankov::{
    commutator, commutator_poly, divisible_by_pairing, full_commutation_test, tsankov_test, BiQuadraticMatrixPoly,
    TestMethod, TsankovVerdict,
};
