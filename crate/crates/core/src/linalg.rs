//! Small dense linear algebra over any [`Scalar`].
//!
//! Matrices are square or rectangular row-major arrays; vectors are plain
//! `Vec<S>`. Exact-mode routines never take square roots of non-squares:
//! unit vectors are produced by stereographic projection and orthonormal
//! completions by Householder reflections, both of which stay rational.

use std::ops::{Index, IndexMut};

use nalgebra::{DMatrix, SymmetricEigen};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::scalar::{max_abs_f64, Rational, Scalar, ScalarKind, ScalarMode};

pub type Vector<S> = Vec<S>;

/// Self-adjoint operators are stored as ordinary square matrices; routines
/// that need symmetry check it.
pub type SelfAdjointOperator<S> = Matrix<S>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn square(n: usize) -> Self {
        Self::zeros(n, n)
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::square(n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn diag(d: &[S]) -> Self {
        let mut m = Self::square(d.len());
        for (i, v) in d.iter().enumerate() {
            m[(i, i)] = v.clone();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidShape(r * c));
        }
        Ok(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vector<S>]) -> Self {
        let rows = cols.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, v) in c.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    pub fn outer(u: &[S], v: &[S]) -> Self {
        let mut m = Self::zeros(u.len(), v.len());
        for (i, a) in u.iter().enumerate() {
            for (j, b) in v.iter().enumerate() {
                m[(i, j)] = a.clone() * b.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dim(&self) -> usize {
        self.rows
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[S] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vector<S> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<S>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        if S::KIND == ScalarKind::ExactRational {
            return self.matmul_exact(other);
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j].add_prod(a, &other[(k, j)]);
                }
            }
        }
        out
    }

    /// Integer product over common denominators, reduced once per entry.
    fn matmul_exact(&self, other: &Self) -> Self {
        let (da, a) = integer_scaled(&self.data);
        let (db, b) = integer_scaled(&other.data);
        let n = other.cols;
        let mut acc = vec![BigInt::zero(); self.rows * n];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let x = &a[i * self.cols + k];
                if x.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let y = &b[k * n + j];
                    if !y.is_zero() {
                        acc[i * n + j] += x * y;
                    }
                }
            }
        }
        let den = da * db;
        let data = acc
            .into_iter()
            .map(|v| if v.is_zero() { S::zero() } else { S::from_rational(&Rational::new(v, den.clone())) })
            .collect();
        Matrix { rows: self.rows, cols: n, data }
    }

    pub fn matvec(&self, v: &[S]) -> Vector<S> {
        assert_eq!(self.cols, v.len(), "matvec shape mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = S::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    acc.add_prod(a, b);
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a.clone() + b.clone())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a.clone() - b.clone())
    }

    pub fn scale(&self, s: &S) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.clone() * s.clone()).collect(),
        }
    }

    /// `self * other - other * self`
    pub fn commutator(&self, other: &Self) -> Self {
        self.matmul(other).sub(&other.matmul(self))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&S, &S) -> S) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn trace(&self) -> S {
        let mut t = S::zero();
        for i in 0..self.rows.min(self.cols) {
            t += &self[(i, i)];
        }
        t
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> S {
        crate::scalar::max_abs(&self.data)
    }

    pub fn max_abs_f64(&self) -> f64 {
        max_abs_f64(&self.data)
    }

    pub fn is_zero_within(&self, bound: f64) -> bool {
        self.data.iter().all(|a| a.within(bound))
    }

    /// Largest `|A[a][b] - A[b][a]|`.
    pub fn asymmetry(&self) -> S {
        let mut worst = S::zero();
        for i in 0..self.rows {
            for j in i + 1..self.cols {
                let d = (self[(i, j)].clone() - self[(j, i)].clone()).abs();
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }

    pub fn is_symmetric(&self, mode: &ScalarMode) -> bool {
        self.is_square() && self.asymmetry().within(mode.bound(self.max_abs_f64()))
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Matrix<T> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        self.map(Scalar::to_f64)
    }
}

impl<S> Index<(usize, usize)> for Matrix<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.cols + j]
    }
}

impl<S> IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    let mut acc = S::zero();
    for (x, y) in a.iter().zip(b) {
        acc.add_prod(x, y);
    }
    acc
}

pub fn norm_sq<S: Scalar>(a: &[S]) -> S {
    dot(a, a)
}

pub fn scaled<S: Scalar>(a: &[S], s: &S) -> Vector<S> {
    a.iter().map(|x| x.clone() * s.clone()).collect()
}

/// `a + s * b`
pub fn axpy<S: Scalar>(a: &[S], s: &S, b: &[S]) -> Vector<S> {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let mut v = x.clone();
            v.add_prod(s, y);
            v
        })
        .collect()
}

pub fn basis_vector<S: Scalar>(m: usize, i: usize) -> Vector<S> {
    let mut v = vec![S::zero(); m];
    v[i] = S::one();
    v
}

/// Normalize with an exact or floating square root.
pub fn normalize<S: Scalar>(v: &[S]) -> Result<Vector<S>> {
    let n2 = norm_sq(v);
    if n2.is_zero() {
        return Err(Error::DegenerateInput("cannot normalize the zero vector".into()));
    }
    let n = n2
        .sqrt_checked()
        .ok_or_else(|| Error::NotRepresentable(format!("norm of {} is irrational", format_vector(v))))?;
    Ok(scaled(v, &(S::one() / n)))
}

pub fn format_vector<S: Scalar>(v: &[S]) -> String {
    v.iter().map(Scalar::to_text).collect::<Vec<_>>().join(",")
}

/// Eigen-decomposition of a symmetric `f64` matrix.
///
/// Eigenvalues ascend; ties are broken by lexicographic order of the
/// eigenvectors, each normalized so its first nonzero entry is positive.
/// Columns of the returned matrix are the eigenvectors.
pub fn eig_selfadjoint(a: &Matrix<f64>, tol: f64) -> Result<(Vec<f64>, Matrix<f64>)> {
    if !a.is_square() {
        return Err(Error::InvalidOperator(f64::INFINITY));
    }
    let n = a.dim();
    let asym = a.asymmetry();
    if asym > tol * a.max_abs_f64() {
        return Err(Error::InvalidOperator(asym));
    }
    if n == 0 {
        return Ok((vec![], Matrix::zeros(0, 0)));
    }
    let dm = DMatrix::from_fn(n, n, |i, j| 0.5 * (a[(i, j)] + a[(j, i)]));
    let eig = SymmetricEigen::new(dm);
    let mut pairs: Vec<(f64, Vec<f64>)> = (0..n)
        .map(|k| {
            let mut v: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
            if let Some(first) = v.iter().find(|x| f64::abs(**x) > 1e-12) {
                if *first < 0.0 {
                    v.iter_mut().for_each(|x| *x = -*x);
                }
            }
            (eig.eigenvalues[k], v)
        })
        .collect();
    let scale = a.max_abs_f64().max(1.0);
    pairs.sort_by(|(la, _), (lb, _)| la.total_cmp(lb));
    // Within each cluster of eigenvalues closer than the tolerance, order the
    // eigenvectors lexicographically so that ties are resolved deterministically.
    let mut start = 0;
    while start < pairs.len() {
        let mut end = start + 1;
        while end < pairs.len() && pairs[end].0 - pairs[end - 1].0 <= tol * scale {
            end += 1;
        }
        pairs[start..end].sort_by(|(_, va), (_, vb)| va.partial_cmp(vb).unwrap_or(std::cmp::Ordering::Equal));
        start = end;
    }
    let values = pairs.iter().map(|(l, _)| *l).collect();
    let vecs: Vec<Vec<f64>> = pairs.into_iter().map(|(_, v)| v).collect();
    Ok((values, Matrix::from_columns(&vecs)))
}

/// `(L, v·L)` with `L` the least common denominator of `v`.
pub(crate) fn integer_scaled<S: Scalar>(v: &[S]) -> (BigInt, Vec<BigInt>) {
    let rs: Vec<Rational> = v.iter().map(Scalar::to_rational).collect();
    let l = rs.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let scale = Rational::from_integer(l.clone());
    let ints = rs.into_iter().map(|r| (r * &scale).to_integer()).collect();
    (l, ints)
}

/// Sorted spectrum of any symmetric matrix, computed in `f64`.
pub fn spectrum<S: Scalar>(a: &Matrix<S>, tol: f64) -> Result<Vec<f64>> {
    eig_selfadjoint(&a.to_f64(), tol.max(1e-12)).map(|(l, _)| l)
}

/// Rank of a symmetric matrix.
///
/// Exact mode converts the entries to rationals and runs fraction-free
/// (Bareiss) elimination; float mode counts eigenvalues with
/// `|λ| > tol * max(1, ‖A‖)`.
pub fn rank_with_mode<S: Scalar>(a: &Matrix<S>, mode: &ScalarMode) -> usize {
    match mode.kind {
        ScalarKind::ExactRational => rank_exact(&a.map(Scalar::to_rational)),
        ScalarKind::Float => {
            let af = a.to_f64();
            let threshold = mode.tol * af.max_abs_f64().max(1.0);
            let sym = Matrix {
                rows: af.rows,
                cols: af.cols,
                data: (0..af.rows * af.cols)
                    .map(|k| {
                        let (i, j) = (k / af.cols, k % af.cols);
                        0.5 * (af[(i, j)] + af[(j, i)])
                    })
                    .collect(),
            };
            match eig_selfadjoint(&sym, f64::INFINITY) {
                Ok((vals, _)) => vals.iter().filter(|l| f64::abs(**l) > threshold).count(),
                Err(_) => 0,
            }
        }
    }
}

/// Exact rank by Bareiss elimination over the integers.
pub fn rank_exact(a: &Matrix<Rational>) -> usize {
    // Clear denominators row by row; row scaling preserves rank.
    let mut rows: Vec<Vec<BigInt>> = (0..a.rows())
        .map(|i| {
            let row = a.row(i);
            let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.iter().map(|x| (x * Rational::from_integer(l.clone())).to_integer()).collect()
        })
        .collect();
    let (n, m) = (a.rows(), a.cols());
    let mut prev = BigInt::one();
    let mut rank = 0;
    for col in 0..m {
        if rank == n {
            break;
        }
        let Some(p) = (rank..n).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        for r in rank + 1..n {
            for c in col + 1..m {
                let v = &rows[rank][col] * &rows[r][c] - &rows[r][col] * &rows[rank][c];
                rows[r][c] = v / &prev;
            }
            rows[r][col] = BigInt::zero();
        }
        prev = rows[rank][col].clone();
        rank += 1;
    }
    rank
}

/// Gram-Schmidt over the inputs. Dependent vectors are an error when
/// `strict`, skipped otherwise. Output vectors are normalized.
pub fn orthonormalize<S: Scalar>(vs: &[Vector<S>], mode: &ScalarMode, strict: bool) -> Result<Vec<Vector<S>>> {
    // Orthogonalize without normalizing first, so that dependence is reported
    // before any irrational norm is met in exact mode.
    let mut ortho: Vec<(Vector<S>, S)> = Vec::new();
    for v in vs {
        let scale = max_abs_f64(v);
        let mut w = v.clone();
        let passes = if mode.is_exact() { 1 } else { 2 };
        for _ in 0..passes {
            for (q, qq) in &ortho {
                let c = dot(&w, q) / qq.clone();
                w = axpy(&w, &(-c), q);
            }
        }
        let ww = norm_sq(&w);
        let dependent = if mode.is_exact() { ww.is_zero() } else { ww.to_f64().sqrt() <= mode.tol * scale.max(1.0) };
        if dependent {
            if strict {
                return Err(Error::DegenerateInput("linearly dependent vectors".into()));
            }
            continue;
        }
        ortho.push((w, ww));
    }
    ortho.iter().map(|(w, _)| normalize(w)).collect()
}

/// Orthonormal basis of the orthogonal complement of `span(vs)`.
///
/// The inputs are orthonormalized first; the completion uses Householder
/// reflections, so rational orthonormal inputs give a rational orthonormal
/// result.
pub fn orthocomplement_basis<S: Scalar>(vs: &[Vector<S>], mode: &ScalarMode) -> Result<Vec<Vector<S>>> {
    let m = match vs.first() {
        Some(v) => v.len(),
        None => return Err(Error::DegenerateInput("empty input; dimension unknown".into())),
    };
    if vs.iter().any(|v| v.len() != m) {
        return Err(Error::IncompatibleTensors("vectors of different dimension".into()));
    }
    if vs.len() > m {
        return Err(Error::DegenerateInput("more vectors than the dimension".into()));
    }
    let qs = orthonormalize(vs, mode, true)?;
    let p = householder_completion(&qs, m);
    Ok((qs.len()..m).map(|j| p.column(j)).collect())
}

/// Orthogonal matrix whose first `qs.len()` columns are `±qs[i]`.
fn householder_completion<S: Scalar>(qs: &[Vector<S>], m: usize) -> Matrix<S> {
    let mut p = Matrix::<S>::identity(m);
    for (i, q) in qs.iter().enumerate() {
        // a = P^T q, orthogonal to e_0..e_{i-1} and of unit length.
        let a = p.transpose().matvec(q);
        let sign = if a[i] >= S::zero() { S::one() } else { -S::one() };
        let mut v = a.clone();
        v[i] += &sign;
        let vv = norm_sq(&v);
        if vv.is_zero() {
            continue;
        }
        // P <- P (I - 2 v v^T / v^T v)
        let pv = p.matvec(&v);
        let factor = S::from_i64(2) / vv;
        for r in 0..m {
            let coef = pv[r].clone() * factor.clone();
            for c in 0..m {
                let mut d = coef.clone();
                d *= &v[c];
                p[(r, c)] -= &d;
            }
        }
    }
    p
}

/// Random unit vector, deterministic in `seed`.
///
/// `Float`: normalized Gaussian sample (rotation invariant). Exact: inverse
/// stereographic projection of a random rational point followed by a random
/// signed coordinate permutation, so the result is exactly unit and rational.
pub fn random_unit_vector<S: Scalar>(m: usize, seed: u64) -> Result<Vector<S>> {
    if m == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let mut r = rng(seed);
    Ok(random_unit_with(m, &mut r))
}

pub(crate) fn random_unit_with<S: Scalar, R: Rng>(m: usize, r: &mut R) -> Vector<S> {
    match S::KIND {
        ScalarKind::Float => loop {
            let g: Vec<f64> = (0..m).map(|_| r.sample(StandardNormal)).collect();
            let n = g.iter().map(|x| x * x).sum::<f64>().sqrt();
            if n > 1e-12 {
                return g.iter().map(|x| S::from_f64(x / n)).collect();
            }
        },
        ScalarKind::ExactRational => {
            let v = random_rational_unit(m, r);
            v.iter().map(S::from_rational).collect()
        }
    }
}

fn random_rational_unit<R: Rng>(m: usize, r: &mut R) -> Vec<Rational> {
    if m == 1 {
        return vec![if r.random_bool(0.5) { Rational::one() } else { -Rational::one() }];
    }
    let den = BigInt::from(r.random_range(1..=4i64));
    let u: Vec<Rational> = (0..m - 1)
        .map(|_| Rational::new(BigInt::from(r.random_range(-6..=6i64)), den.clone()))
        .collect();
    let s = norm_sq(&u);
    let denom = s.clone() + Rational::one();
    let mut v: Vec<Rational> = u.iter().map(|x| Rational::from_integer(BigInt::from(2)) * x / &denom).collect();
    v.push((s - Rational::one()) / denom);
    v.shuffle(r);
    for x in v.iter_mut() {
        if r.random_bool(0.5) {
            *x = -x.clone();
        }
    }
    v
}

/// Random unit vector orthogonal to `span(vs)`.
pub fn random_unit_in_complement<S: Scalar>(vs: &[Vector<S>], mode: &ScalarMode, seed: u64) -> Result<Vector<S>> {
    random_unit_in_complement_with(vs, mode, &mut rng(seed))
}

pub(crate) fn random_unit_in_complement_with<S: Scalar, R: Rng>(
    vs: &[Vector<S>],
    mode: &ScalarMode,
    r: &mut R,
) -> Result<Vector<S>> {
    let basis = orthocomplement_basis(vs, mode)?;
    if basis.is_empty() {
        return Err(Error::DegenerateInput("complement is trivial".into()));
    }
    let coef: Vector<S> = random_unit_with(basis.len(), r);
    let m = vs[0].len();
    let mut out = vec![S::zero(); m];
    for (c, b) in coef.iter().zip(&basis) {
        out = axpy(&out, c, b);
    }
    Ok(out)
}

/// Random signed permutation matrix (rational orthogonal).
pub fn random_signed_permutation<S: Scalar>(m: usize, seed: u64) -> Matrix<S> {
    let mut r = rng(seed);
    let mut perm: Vec<usize> = (0..m).collect();
    perm.shuffle(&mut r);
    let mut q = Matrix::square(m);
    for (i, &p) in perm.iter().enumerate() {
        q[(i, p)] = if r.random_bool(0.5) { S::one() } else { -S::one() };
    }
    q
}

/// Random symmetric matrix with integer entries in `[-bound, bound]`.
pub fn random_symmetric_int<S: Scalar, R: Rng>(m: usize, bound: i64, r: &mut R) -> Matrix<S> {
    let mut a = Matrix::square(m);
    for i in 0..m {
        for j in i..m {
            let v = S::from_i64(r.random_range(-bound..=bound));
            a[(i, j)] = v.clone();
            a[(j, i)] = v;
        }
    }
    a
}
