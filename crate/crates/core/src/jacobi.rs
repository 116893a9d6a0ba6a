//! Jacobi operators `J(x): y ↦ R(y,x)x`, their polarization, the rank
//! function, `W(x) = ℝx ⊕ Range J(x)`, the Ricci form and the block-frame
//! diagnostic for orthogonal pairs with `J(x)y = 0`.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, SelfAdjointOperator, Vector};
use crate::scalar::{Rational, Scalar, ScalarKind, ScalarMode};
use crate::tensor::CurvatureTensor;

/// `J(x)[a][b] = R(e_b, x, x, e_a)`.
pub fn jacobi<S: Scalar>(r: &CurvatureTensor<S>, x: &[S]) -> Result<SelfAdjointOperator<S>> {
    r.check_vector(x)?;
    let m = r.dim();
    let mut xx = vec![S::zero(); m * m];
    for i in 0..m {
        for j in 0..m {
            xx[i * m + j].add_prod(&x[i], &x[j]);
        }
    }
    Ok(contract_middle(r, &xx))
}

/// `J(x,y): z ↦ ½R(z,x)y + ½R(z,y)x`.
pub fn jacobi_polarized<S: Scalar>(r: &CurvatureTensor<S>, x: &[S], y: &[S]) -> Result<SelfAdjointOperator<S>> {
    r.check_vector(x)?;
    r.check_vector(y)?;
    let m = r.dim();
    let half = S::one() / S::from_i64(2);
    let mut w = vec![S::zero(); m * m];
    for i in 0..m {
        for j in 0..m {
            let mut v = S::zero();
            v.add_prod(&x[i], &y[j]);
            v.add_prod(&y[i], &x[j]);
            w[i * m + j] = v * half.clone();
        }
    }
    Ok(contract_middle(r, &w))
}

/// `M[a][b] = Σ_ij w[i][j] R[b][i][j][a]`
fn contract_middle<S: Scalar>(r: &CurvatureTensor<S>, w: &[S]) -> Matrix<S> {
    if S::KIND == ScalarKind::ExactRational {
        return contract_middle_exact(r, w);
    }
    let m = r.dim();
    let comps = r.components();
    let mut out: Matrix<S> = Matrix::square(m);
    for b in 0..m {
        for i in 0..m {
            for j in 0..m {
                let wij = &w[i * m + j];
                if wij.is_zero() {
                    continue;
                }
                let base = r.index(b, i, j, 0);
                for a in 0..m {
                    out[(a, b)].add_prod(wij, &comps[base + a]);
                }
            }
        }
    }
    out
}

/// Same contraction over integers: `R = V / L` and `w = W / D` give
/// `M = (Σ W V) / (D L)`, with one reduction per entry instead of per product.
fn contract_middle_exact<S: Scalar>(r: &CurvatureTensor<S>, w: &[S]) -> Matrix<S> {
    let m = r.dim();
    let int = r.integer_form();
    let (d, wi) = linalg::integer_scaled(w);
    let mut acc = vec![BigInt::zero(); m * m];
    for b in 0..m {
        for i in 0..m {
            for j in 0..m {
                let wij = &wi[i * m + j];
                if wij.is_zero() {
                    continue;
                }
                let base = r.index(b, i, j, 0);
                for a in 0..m {
                    let v = &int.values[base + a];
                    if !v.is_zero() {
                        acc[a * m + b] += wij * v;
                    }
                }
            }
        }
    }
    let den = d * &int.denom;
    let mut out: Matrix<S> = Matrix::square(m);
    for a in 0..m {
        for b in 0..m {
            let v = std::mem::take(&mut acc[a * m + b]);
            if !v.is_zero() {
                out[(a, b)] = S::from_rational(&Rational::new(v, den.clone()));
            }
        }
    }
    out
}

fn require_nonzero<S: Scalar>(x: &[S]) -> Result<()> {
    if x.iter().all(Zero::is_zero) {
        return Err(Error::DegenerateInput("zero vector".into()));
    }
    Ok(())
}

/// `r(x) = rank J(x)`, at most `m - 1`.
pub fn jacobi_rank<S: Scalar>(r: &CurvatureTensor<S>, x: &[S], mode: &ScalarMode) -> Result<usize> {
    require_nonzero(x)?;
    let j = jacobi(r, x)?;
    let j = normalize_scale(&j, x);
    Ok(linalg::rank_with_mode(&j, mode))
}

/// `J(x) / |x|²` in float mode so that thresholds do not depend on the length of `x`.
fn normalize_scale<S: Scalar>(j: &Matrix<S>, x: &[S]) -> Matrix<S> {
    if S::KIND == crate::scalar::ScalarKind::Float {
        let n2 = linalg::norm_sq(x);
        j.scale(&(S::one() / n2))
    } else {
        j.clone()
    }
}

/// Orthonormal basis of `ℝx ⊕ Range J(x)`; `x/|x|` comes first.
pub fn w_space<S: Scalar>(r: &CurvatureTensor<S>, x: &[S], mode: &ScalarMode) -> Result<Vec<Vector<S>>> {
    require_nonzero(x)?;
    let m = r.dim();
    let j = jacobi(r, x)?;
    let rank = linalg::rank_with_mode(&normalize_scale(&j, x), mode);
    let xhat = linalg::normalize(x)?;
    if rank + 1 == m {
        // W(x) is the whole space
        let mut out = vec![xhat.clone()];
        out.extend(linalg::orthocomplement_basis(&[xhat], mode)?);
        return Ok(out);
    }
    let range = range_basis(&j, mode)?;
    let mut vs = vec![xhat];
    vs.extend(range);
    let basis = linalg::orthonormalize(&vs, mode, false)?;
    if basis.len() != rank + 1 {
        return Err(Error::ClassificationInconsistency(format!(
            "W(x) has dimension {} but rank is {rank}",
            basis.len()
        )));
    }
    Ok(basis)
}

/// Orthonormal basis for the range of a symmetric matrix.
fn range_basis<S: Scalar>(a: &Matrix<S>, mode: &ScalarMode) -> Result<Vec<Vector<S>>> {
    if mode.is_exact() {
        let cols: Vec<Vector<S>> = (0..a.cols()).map(|c| a.column(c)).collect();
        return linalg::orthonormalize(&cols, mode, false);
    }
    let af = a.to_f64();
    let threshold = mode.tol * af.max_abs_f64().max(1.0);
    let (vals, vecs) = linalg::eig_selfadjoint(&af, f64::INFINITY)?;
    Ok(vals
        .iter()
        .enumerate()
        .filter(|(_, l)| l.abs() > threshold)
        .map(|(k, _)| vecs.column(k).iter().map(|v| S::from_f64(*v)).collect())
        .collect())
}

/// Ricci form `ρ[a][b] = Σ_i R[a][i][i][b]`, so that `ρ(x,x) = tr J(x)`.
pub fn ricci<S: Scalar>(r: &CurvatureTensor<S>) -> SelfAdjointOperator<S> {
    let m = r.dim();
    let mut rho = Matrix::square(m);
    for a in 0..m {
        for b in 0..m {
            let mut v = S::zero();
            for i in 0..m {
                v += r.get(a, i, i, b);
            }
            rho[(a, b)] = v;
        }
    }
    rho
}

/// Adapted frame for an orthonormal pair `(x, y)` with `J(x)y = 0`.
#[derive(Debug, Clone)]
pub struct BlockStructureReport<S> {
    /// Nonzero eigenvalues of `J(x)`, ascending.
    pub lambda_list: Vec<S>,
    /// Eigenvectors of `J(x)` for `lambda_list`.
    pub e_basis: Vec<Vector<S>>,
    /// `f_i = 2 λ_i⁻¹ J(x,y) e_i`, not re-orthonormalized.
    pub f_basis: Vec<Vector<S>>,
    /// Orthonormal basis of the complement of `span{e, f}`.
    pub g_basis: Vec<Vector<S>>,
    pub residuals: Vec<(&'static str, S)>,
}

impl<S: Scalar> BlockStructureReport<S> {
    pub fn max_residual(&self) -> S {
        let mut worst = S::zero();
        for (_, r) in &self.residuals {
            if *r > worst {
                worst = r.clone();
            }
        }
        worst
    }

    pub fn residual(&self, name: &str) -> Option<&S> {
        self.residuals.iter().find(|(n, _)| *n == name).map(|(_, v)| v)
    }

    /// Errors with `StructureViolation` when any residual exceeds `bound`
    /// (exact backends: when any residual is nonzero).
    pub fn ensure_clean(&self, bound: f64) -> Result<()> {
        for (name, r) in &self.residuals {
            if !r.within(bound) {
                return Err(Error::StructureViolation { identity: (*name).to_string(), residual: r.to_f64() });
            }
        }
        Ok(())
    }
}

pub const RESIDUAL_NAMES: [&str; 9] = [
    "J(y)x",
    "J(x)J(y)",
    "J(y)^2+J(x)^2-4J(x,y)^2",
    "J(x,y)J(x)-J(y)J(x,y)",
    "J(x)J(x,y)-J(x,y)J(y)",
    "frame_orthonormality",
    "block_J(x)",
    "block_J(y)",
    "block_J(x,y)",
];

pub fn block_structure<S: Scalar>(
    r: &CurvatureTensor<S>,
    x: &[S],
    y: &[S],
    mode: &ScalarMode,
) -> Result<BlockStructureReport<S>> {
    mode.check::<S>()?;
    r.check_vector(x)?;
    r.check_vector(y)?;
    let m = r.dim();
    let unit_bound = mode.bound(1.0);
    let one = S::one();
    if !(linalg::norm_sq(x) - one.clone()).within(unit_bound) || !(linalg::norm_sq(y) - one).within(unit_bound) {
        return Err(Error::PreconditionFailed("x and y must be unit vectors".into()));
    }
    if !linalg::dot(x, y).within(unit_bound) {
        return Err(Error::PreconditionFailed("x and y must be orthogonal".into()));
    }
    let scale = r.norm_f64().max(1.0);
    let jx = jacobi(r, x)?;
    if !jx.matvec(y).iter().all(|v| v.within(mode.bound(scale))) {
        return Err(Error::PreconditionFailed("J(x)y = 0 does not hold".into()));
    }
    let jy = jacobi(r, y)?;
    let jxy = jacobi_polarized(r, x, y)?;

    let (lambda_list, e_basis) = eigen_frame(&jx, mode)?;
    let two = S::from_i64(2);
    let f_basis: Vec<Vector<S>> = lambda_list
        .iter()
        .zip(&e_basis)
        .map(|(l, e)| linalg::scaled(&jxy.matvec(e), &(two.clone() / l.clone())))
        .collect();
    let mut ef: Vec<Vector<S>> = e_basis.clone();
    ef.extend(f_basis.iter().cloned());
    let g_basis = if ef.is_empty() {
        (0..m).map(|i| linalg::basis_vector(m, i)).collect()
    } else {
        linalg::orthocomplement_basis(&ef, mode).map_err(|e| match e {
            Error::DegenerateInput(_) => Error::StructureViolation {
                identity: "frame_orthonormality".into(),
                residual: f64::INFINITY,
            },
            other => other,
        })?
    };

    let mut residuals: Vec<(&'static str, S)> = Vec::with_capacity(RESIDUAL_NAMES.len());
    residuals.push((RESIDUAL_NAMES[0], crate::scalar::max_abs(&jy.matvec(x))));
    residuals.push((RESIDUAL_NAMES[1], jx.matmul(&jy).max_abs()));
    let four = S::from_i64(4);
    let quad = jy.matmul(&jy).add(&jx.matmul(&jx)).sub(&jxy.matmul(&jxy).scale(&four));
    residuals.push((RESIDUAL_NAMES[2], quad.max_abs()));
    residuals.push((RESIDUAL_NAMES[3], jxy.matmul(&jx).sub(&jy.matmul(&jxy)).max_abs()));
    residuals.push((RESIDUAL_NAMES[4], jx.matmul(&jxy).sub(&jxy.matmul(&jy)).max_abs()));

    let mut frame = ef;
    frame.extend(g_basis.iter().cloned());
    let b = Matrix::from_columns(&frame);
    let bt = b.transpose();
    residuals.push((RESIDUAL_NAMES[5], bt.matmul(&b).sub(&Matrix::identity(m)).max_abs()));
    let rk = lambda_list.len();
    let mut want_x = Matrix::square(m);
    let mut want_y = Matrix::square(m);
    let mut want_xy = Matrix::square(m);
    let half = S::one() / two;
    for (i, l) in lambda_list.iter().enumerate() {
        want_x[(i, i)] = l.clone();
        want_y[(rk + i, rk + i)] = l.clone();
        want_xy[(i, rk + i)] = half.clone() * l.clone();
        want_xy[(rk + i, i)] = half.clone() * l.clone();
    }
    let conj = |a: &Matrix<S>| bt.matmul(a).matmul(&b);
    residuals.push((RESIDUAL_NAMES[6], conj(&jx).sub(&want_x).max_abs()));
    residuals.push((RESIDUAL_NAMES[7], conj(&jy).sub(&want_y).max_abs()));
    residuals.push((RESIDUAL_NAMES[8], conj(&jxy).sub(&want_xy).max_abs()));

    Ok(BlockStructureReport { lambda_list, e_basis, f_basis, g_basis, residuals })
}

/// Nonzero eigenpairs of a symmetric matrix.
///
/// Exact mode handles the case the block frame needs, a single nonzero
/// eigenvalue `λ = tr/rank` with `A² = λA`, and requires a rational
/// orthonormal basis of the range.
fn eigen_frame<S: Scalar>(a: &Matrix<S>, mode: &ScalarMode) -> Result<(Vec<S>, Vec<Vector<S>>)> {
    if mode.is_exact() {
        let rank = linalg::rank_with_mode(a, mode);
        if rank == 0 {
            return Ok((vec![], vec![]));
        }
        let lambda = a.trace() / S::from_i64(rank as i64);
        if a.matmul(a) != a.scale(&lambda) {
            return Err(Error::NotRepresentable(
                "exact eigen-frame requires a single nonzero eigenvalue".into(),
            ));
        }
        let basis = range_basis(a, mode)?;
        if basis.len() != rank {
            return Err(Error::ClassificationInconsistency("range basis size differs from rank".into()));
        }
        return Ok((vec![lambda; rank], basis));
    }
    let af = a.to_f64();
    let threshold = mode.tol * af.max_abs_f64().max(1.0);
    let (vals, vecs) = linalg::eig_selfadjoint(&af, f64::INFINITY)?;
    let mut lambdas = Vec::new();
    let mut basis = Vec::new();
    for (k, l) in vals.iter().enumerate() {
        if l.abs() > threshold {
            lambdas.push(S::from_f64(*l));
            basis.push(vecs.column(k).iter().map(|v| S::from_f64(*v)).collect());
        }
    }
    Ok((lambdas, basis))
}
