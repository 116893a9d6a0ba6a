//! Commutators of Jacobi operators and the two commutation decision
//! procedures.
//!
//! The orthogonal-pair condition is decided exactly: each entry of the
//! commutator field `C(x,y) = J(x)J(y) - J(y)J(x)` is a bihomogeneous
//! polynomial of bidegree (2,2), and such a polynomial vanishes on the quadric
//! `<x,y> = 0` iff it is a multiple of `Σ x_i y_i`. Membership is settled by
//! division by that single generator, which is triangular elimination on the
//! unknown bidegree-(1,1) quotient.

use std::fmt;
use std::ops::{AddAssign, SubAssign};


use num_traits::Zero;
use rand::Rng;

use crate::error::{Error, Result};
use crate::jacobi::{jacobi, jacobi_polarized};
use crate::linalg::{self, Matrix, Vector};
use crate::scalar::{Rational, Scalar, ScalarKind, ScalarMode};
use crate::tensor::CurvatureTensor;

pub const DEFAULT_SAMPLES: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ExactDivisibility,
    Sampled,
    CoefficientExpansion,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Method::ExactDivisibility => "ExactDivisibility",
            Method::Sampled => "Sampled",
            Method::CoefficientExpansion => "CoefficientExpansion",
        };
        f.write_str(s)
    }
}

/// Which decision procedure `tsankov_test` runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestMethod {
    Exact,
    Sampled,
}

/// A pair `(x, y)` whose Jacobi operators fail to commute.
///
/// Float witnesses are unit vectors. Exact witnesses are rational directions;
/// `commutator_norm` is always reported for the normalized pair, i.e.
/// `max|[J(x),J(y)]| / (|x|²|y|²)`, which is rational because the commutator
/// is homogeneous of degree two in each argument.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness<S> {
    pub x: Vector<S>,
    pub y: Vector<S>,
    pub commutator_norm: S,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TsankovVerdict<S> {
    pub holds: bool,
    pub witness: Option<Witness<S>>,
    pub method: Method,
}

/// `J(x)J(y) - J(y)J(x)`
pub fn commutator<S: Scalar>(r: &CurvatureTensor<S>, x: &[S], y: &[S]) -> Result<Matrix<S>> {
    let jx = jacobi(r, x)?;
    let jy = jacobi(r, y)?;
    Ok(jx.commutator(&jy))
}

/// Max-abs commutator entry for the normalized pair.
pub fn normalized_commutator_norm<S: Scalar>(r: &CurvatureTensor<S>, x: &[S], y: &[S]) -> Result<S> {
    let c = commutator(r, x, y)?;
    Ok(normalize_norm(c.max_abs(), x, y))
}

fn normalize_norm<S: Scalar>(raw: S, x: &[S], y: &[S]) -> S {
    let d = linalg::norm_sq(x) * linalg::norm_sq(y);
    if d.is_zero() {
        return S::zero();
    }
    raw / d
}

/// Index of the unordered pair `(i, j)`, `i <= j`, among `m(m+1)/2` pairs.
#[inline]
pub fn pair_index(m: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * m - i * (i + 1) / 2 + j
}

pub fn pair_list(m: usize) -> Vec<(usize, usize)> {
    let mut v = Vec::with_capacity(m * (m + 1) / 2);
    for i in 0..m {
        for j in i..m {
            v.push((i, j));
        }
    }
    v
}

/// `(a, b, x_exponents, y_exponents, coeff)`: one monomial of matrix entry `(a, b)`.
pub type Term<S> = (usize, usize, Vec<u32>, Vec<u32>, S);

/// Matrix-valued polynomial of bidegree (2,2) in `(x, y)`.
///
/// Entry `(a,b)` stores the coefficient of `x_i x_j y_k y_l` (`i <= j`,
/// `k <= l`) at `[a][b][(i,j)][(k,l)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BiQuadraticMatrixPoly<S> {
    m: usize,
    pairs: usize,
    coeffs: Vec<S>,
}

impl<S: Scalar> BiQuadraticMatrixPoly<S> {
    pub fn zero(m: usize) -> Self {
        let pairs = m * (m + 1) / 2;
        BiQuadraticMatrixPoly { m, pairs, coeffs: vec![S::zero(); m * m * pairs * pairs] }
    }

    /// Build from explicit terms `(a, b, x_exponents, y_exponents, coeff)`.
    /// Every term must have total degree 2 in `x` and 2 in `y`.
    pub fn from_terms(m: usize, terms: &[Term<S>]) -> Result<Self> {
        let mut p = Self::zero(m);
        for (a, b, xe, ye, c) in terms {
            if *a >= m || *b >= m || xe.len() != m || ye.len() != m {
                return Err(Error::InvalidPolynomial("term shape does not match dimension".into()));
            }
            let to_pair = |e: &[u32]| -> Result<usize> {
                if e.iter().sum::<u32>() != 2 {
                    return Err(Error::InvalidPolynomial("term is not of bidegree (2,2)".into()));
                }
                let idx: Vec<usize> = e.iter().enumerate().flat_map(|(i, &k)| std::iter::repeat_n(i, k as usize)).collect();
                Ok(pair_index(m, idx[0], idx[1]))
            };
            let (u, v) = (to_pair(xe)?, to_pair(ye)?);
            let k = p.idx(*a, *b, u, v);
            p.coeffs[k] += c;
        }
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    #[inline]
    fn idx(&self, a: usize, b: usize, u: usize, v: usize) -> usize {
        ((a * self.m + b) * self.pairs + u) * self.pairs + v
    }

    /// Coefficient of `x_i x_j y_k y_l` in entry `(a, b)`.
    pub fn coeff(&self, a: usize, b: usize, (i, j): (usize, usize), (k, l): (usize, usize)) -> &S {
        &self.coeffs[self.idx(a, b, pair_index(self.m, i, j), pair_index(self.m, k, l))]
    }

    pub fn coefficients(&self) -> &[S] {
        &self.coeffs
    }

    fn entry(&self, a: usize, b: usize) -> &[S] {
        let n = self.pairs * self.pairs;
        let start = (a * self.m + b) * n;
        &self.coeffs[start..start + n]
    }

    pub fn is_zero_within(&self, bound: f64) -> bool {
        self.coeffs.iter().all(|c| c.within(bound))
    }

    pub fn max_abs(&self) -> S {
        crate::scalar::max_abs(&self.coeffs)
    }

    fn monomials(&self, x: &[S]) -> Vec<S> {
        pair_list(self.m)
            .into_iter()
            .map(|(i, j)| {
                let mut v = S::zero();
                v.add_prod(&x[i], &x[j]);
                v
            })
            .collect()
    }

    pub fn evaluate(&self, x: &[S], y: &[S]) -> Result<Matrix<S>> {
        if x.len() != self.m || y.len() != self.m {
            return Err(Error::IncompatibleTensors("evaluation point has wrong dimension".into()));
        }
        let mx = self.monomials(x);
        let my = self.monomials(y);
        let mut out = Matrix::square(self.m);
        for a in 0..self.m {
            for b in 0..self.m {
                let entry = self.entry(a, b);
                let mut acc = S::zero();
                for (u, xu) in mx.iter().enumerate() {
                    if xu.is_zero() {
                        continue;
                    }
                    let mut row = S::zero();
                    for (v, yv) in my.iter().enumerate() {
                        row.add_prod(&entry[u * self.pairs + v], yv);
                    }
                    acc.add_prod(xu, &row);
                }
                out[(a, b)] = acc;
            }
        }
        Ok(out)
    }
}

/// Matrix-valued polynomial of bidegree (1,1): entry `(a,b)` is
/// `Σ_{p,q} L[a][b][p][q] x_p y_q`.
#[derive(Debug, Clone, PartialEq)]
pub struct BilinearMatrixPoly<S> {
    m: usize,
    coeffs: Vec<S>,
}

impl<S: Scalar> BilinearMatrixPoly<S> {
    pub fn zero(m: usize) -> Self {
        BilinearMatrixPoly { m, coeffs: vec![S::zero(); m.pow(4)] }
    }

    #[inline]
    fn idx(&self, a: usize, b: usize, p: usize, q: usize) -> usize {
        ((a * self.m + b) * self.m + p) * self.m + q
    }

    /// Coefficient of `x_p y_q` in entry `(a, b)`.
    pub fn coeff(&self, a: usize, b: usize, p: usize, q: usize) -> &S {
        &self.coeffs[self.idx(a, b, p, q)]
    }

    /// `(Σ_s x_s y_s) · self`
    pub fn multiply_by_pairing(&self) -> BiQuadraticMatrixPoly<S> {
        let m = self.m;
        let mut out = BiQuadraticMatrixPoly::zero(m);
        for a in 0..m {
            for b in 0..m {
                for p in 0..m {
                    for q in 0..m {
                        let c = &self.coeffs[self.idx(a, b, p, q)];
                        if c.is_zero() {
                            continue;
                        }
                        for s in 0..m {
                            let k = out.idx(a, b, pair_index(m, p, s), pair_index(m, q, s));
                            out.coeffs[k] += c;
                        }
                    }
                }
            }
        }
        out
    }
}

/// Symbolic commutator field of `R`, expanded from
/// `J(x)[a][b] = Σ x_i x_j R[b][i][j][a]`.
///
/// Rational tensors are scaled to integers by the common denominator `L` of
/// their components and expanded over `BigInt`, which avoids a gcd per
/// accumulation; the result is divided by `L²` at the end.
pub fn commutator_poly<S: Scalar>(r: &CurvatureTensor<S>) -> BiQuadraticMatrixPoly<S> {
    let m = r.dim();
    let mut poly = BiQuadraticMatrixPoly::zero(m);
    if S::KIND == ScalarKind::ExactRational {
        let l = r.integer_form().denom.clone();
        let scale = Rational::from_integer(l.clone());
        let quad = quadratic_forms(r, |v: &S| (v.to_rational() * &scale).to_integer());
        let acc = expand(m, poly.pairs, &quad, |a, b| a * b);
        let l2 = &l * &l;
        for (dst, v) in poly.coeffs.iter_mut().zip(acc) {
            if !v.is_zero() {
                *dst = S::from_rational(&Rational::new(v, l2.clone()));
            }
        }
    } else {
        let quad = quadratic_forms(r, S::clone);
        poly.coeffs = expand(m, poly.pairs, &quad, |a, b| {
            let mut p = a.clone();
            p *= b;
            p
        });
    }
    poly
}

/// Nonzero `(pair, coeff)` lists of the quadratic forms `J(x)[a][c]`.
fn quadratic_forms<S: Scalar, T: Zero>(r: &CurvatureTensor<S>, conv: impl Fn(&S) -> T) -> Vec<Vec<(usize, T)>> {
    let m = r.dim();
    let mut quad = Vec::with_capacity(m * m);
    for a in 0..m {
        for c in 0..m {
            let mut row = Vec::new();
            for (u, (i, j)) in pair_list(m).into_iter().enumerate() {
                let mut v = r.get(c, i, j, a).clone();
                if i != j {
                    v += r.get(c, j, i, a);
                }
                if !v.is_zero() {
                    row.push((u, conv(&v)));
                }
            }
            quad.push(row);
        }
    }
    quad
}

/// `J(x)[a][c] J(y)[c][b] - J(y)[a][c] J(x)[c][b]`, coefficientwise.
fn expand<T>(m: usize, pairs: usize, quad: &[Vec<(usize, T)>], mul: impl Fn(&T, &T) -> T) -> Vec<T>
where
    T: Clone + Zero + for<'a> AddAssign<&'a T> + for<'a> SubAssign<&'a T>,
{
    let mut out = vec![T::zero(); m * m * pairs * pairs];
    for a in 0..m {
        for b in 0..m {
            let base = (a * m + b) * pairs * pairs;
            for c in 0..m {
                for (u, qa) in &quad[a * m + c] {
                    for (v, qb) in &quad[c * m + b] {
                        let prod = mul(qa, qb);
                        out[base + u * pairs + v] += &prod;
                        out[base + v * pairs + u] -= &prod;
                    }
                }
            }
        }
    }
    out
}

/// Exact quotient by `Σ_s x_s y_s`, if every entry is divisible.
pub fn divisible_by_pairing<S: Scalar>(p: &BiQuadraticMatrixPoly<S>) -> Option<BilinearMatrixPoly<S>> {
    divisible_by_pairing_within(p, 0.0)
}

/// Division by `Σ_s x_s y_s` with leading monomial `x_0 y_0`; the polynomial
/// is divisible iff the remainder vanishes (within `bound` for floats).
pub fn divisible_by_pairing_within<S: Scalar>(
    p: &BiQuadraticMatrixPoly<S>,
    bound: f64,
) -> Option<BilinearMatrixPoly<S>> {
    let m = p.m;
    let np = p.pairs;
    let mut quotient = BilinearMatrixPoly::zero(m);
    let mut work: Vec<S> = Vec::with_capacity(np * np);
    for a in 0..m {
        for b in 0..m {
            let entry = p.entry(a, b);
            if entry.iter().all(Zero::is_zero) {
                continue;
            }
            work.clear();
            work.extend_from_slice(entry);
            // Terms divisible by x_0 y_0 are x_0 x_j y_0 y_l. Reducing
            // x_0² y_0² first: it spawns only x_0 x_s y_0 y_s terms, which are
            // handled in the second sweep and spawn nothing reducible.
            let mut order: Vec<(usize, usize)> = vec![(0, 0)];
            order.extend((0..m).flat_map(|j| (0..m).map(move |l| (j, l))).filter(|&(j, l)| (j, l) != (0, 0)));
            for (j, l) in order {
                let (u, v) = (pair_index(m, 0, j), pair_index(m, 0, l));
                let c = work[u * np + v].clone();
                if c.is_zero() {
                    continue;
                }
                let qk = quotient.idx(a, b, j, l);
                quotient.coeffs[qk] += &c;
                for s in 0..m {
                    let k = pair_index(m, j, s) * np + pair_index(m, l, s);
                    work[k] -= &c;
                }
            }
            if !work.iter().all(|c| c.within(bound)) {
                return None;
            }
        }
    }
    Some(quotient)
}

fn orthogonal_candidates<S: Scalar>(m: usize) -> Vec<(Vector<S>, Vector<S>)> {
    let e = |i| linalg::basis_vector::<S>(m, i);
    let mut out = Vec::new();
    for i in 0..m {
        for j in 0..m {
            if j != i {
                out.push((e(i), e(j)));
            }
        }
        for j in 0..m {
            for k in j + 1..m {
                if j == i || k == i {
                    continue;
                }
                for sign in [S::one(), -S::one()] {
                    out.push((e(i), linalg::axpy(&e(j), &sign, &e(k))));
                }
            }
        }
    }
    out
}

fn general_candidates<S: Scalar>(m: usize) -> Vec<(Vector<S>, Vector<S>)> {
    let e = |i| linalg::basis_vector::<S>(m, i);
    let mut out = orthogonal_candidates::<S>(m);
    for i in 0..m {
        for j in 0..m {
            if j != i {
                for sign in [S::one(), -S::one()] {
                    out.push((e(i), linalg::axpy(&e(i), &sign, &e(j))));
                }
            }
        }
    }
    out
}

fn float_unit<S: Scalar>(v: Vector<S>) -> Vector<S> {
    if S::KIND == crate::scalar::ScalarKind::Float {
        linalg::normalize(&v).unwrap_or(v)
    } else {
        v
    }
}

/// Best pair among the candidates (or the first one found when `first_hit`),
/// falling back to a random search.
fn search_witness<S: Scalar>(
    r: &CurvatureTensor<S>,
    candidates: Vec<(Vector<S>, Vector<S>)>,
    orthogonal: bool,
    first_hit: bool,
    bound: f64,
    seed: u64,
) -> Result<Witness<S>> {
    let m = r.dim();
    let mut best: Option<Witness<S>> = None;
    for (x, y) in candidates {
        let n = normalized_commutator_norm(r, &x, &y)?;
        if !n.within(bound) && best.as_ref().is_none_or(|b| n > b.commutator_norm) {
            best = Some(Witness { x: float_unit(x), y: float_unit(y), commutator_norm: n });
            if first_hit {
                break;
            }
        }
    }
    if let Some(w) = best {
        return Ok(w);
    }
    let mode = *r.mode();
    let mut rng = linalg::rng(seed);
    for _ in 0..1024 {
        let x: Vector<S> = linalg::random_unit_with(m, &mut rng);
        let y: Vector<S> = if orthogonal {
            linalg::random_unit_in_complement_with(std::slice::from_ref(&x), &mode, &mut rng)?
        } else {
            linalg::random_unit_with(m, &mut rng)
        };
        let n = normalized_commutator_norm(r, &x, &y)?;
        if !n.within(bound) {
            return Ok(Witness { x, y, commutator_norm: n });
        }
    }
    Err(Error::ClassificationInconsistency("commutator is nonzero but no witness pair was found".into()))
}

fn commutator_bound<S: Scalar>(r: &CurvatureTensor<S>) -> f64 {
    let n = r.norm_f64();
    r.mode().bound(n * n)
}

/// Decides whether `J(x)` and `J(y)` commute for all `x, y`.
pub fn full_commutation_test<S: Scalar>(r: &CurvatureTensor<S>) -> Result<TsankovVerdict<S>> {
    let bound = commutator_bound(r);
    let poly = commutator_poly(r);
    if poly.is_zero_within(bound) {
        return Ok(TsankovVerdict { holds: true, witness: None, method: Method::CoefficientExpansion });
    }
    let w = search_witness(r, general_candidates(r.dim()), false, true, bound, 0)?;
    Ok(TsankovVerdict { holds: false, witness: Some(w), method: Method::CoefficientExpansion })
}

/// Decides whether `x ⊥ y` implies `J(x)J(y) = J(y)J(x)`.
pub fn tsankov_test<S: Scalar>(
    r: &CurvatureTensor<S>,
    method: TestMethod,
    n_samples: usize,
    seed: u64,
) -> Result<TsankovVerdict<S>> {
    let bound = commutator_bound(r);
    match method {
        TestMethod::Exact => {
            let poly = commutator_poly(r);
            if divisible_by_pairing_within(&poly, bound).is_some() {
                return Ok(TsankovVerdict { holds: true, witness: None, method: Method::ExactDivisibility });
            }
            let w = search_witness(r, orthogonal_candidates(r.dim()), true, false, bound, seed)?;
            Ok(TsankovVerdict { holds: false, witness: Some(w), method: Method::ExactDivisibility })
        }
        TestMethod::Sampled => {
            if n_samples == 0 {
                return Err(Error::DegenerateInput("sampled test needs at least one sample".into()));
            }
            let m = r.dim();
            let mode = *r.mode();
            let mut rng = linalg::rng(seed);
            for _ in 0..n_samples {
                let (x, y) = if mode.is_exact() {
                    integer_orthogonal_pair(m, &mut rng)
                } else {
                    let x: Vector<S> = linalg::random_unit_with(m, &mut rng);
                    let y = linalg::random_unit_in_complement_with(std::slice::from_ref(&x), &mode, &mut rng)?;
                    (x, y)
                };
                let n = normalized_commutator_norm(r, &x, &y)?;
                if !n.within(bound) {
                    return Ok(TsankovVerdict {
                        holds: false,
                        witness: Some(Witness { x, y, commutator_norm: n }),
                        method: Method::Sampled,
                    });
                }
            }
            Ok(TsankovVerdict { holds: true, witness: None, method: Method::Sampled })
        }
    }
}

/// Orthogonal integer directions with entries drawn from `[-9, 9]`:
/// `y = |x|² z - <z,x> x`. Exact sampling only needs orthogonality, since the
/// normalized commutator norm is homogeneous, and small integers keep the
/// arithmetic cheap.
fn integer_orthogonal_pair<S: Scalar, R: Rng>(m: usize, rng: &mut R) -> (Vector<S>, Vector<S>) {
    loop {
        let x: Vector<S> = (0..m).map(|_| S::from_i64(rng.random_range(-9..=9))).collect();
        let z: Vector<S> = (0..m).map(|_| S::from_i64(rng.random_range(-9..=9))).collect();
        let xx = linalg::norm_sq(&x);
        if xx.is_zero() {
            continue;
        }
        let y = linalg::axpy(&linalg::scaled(&z, &xx), &-linalg::dot(&z, &x), &x);
        if !linalg::norm_sq(&y).is_zero() {
            return (x, y);
        }
    }
}

/// Random orthogonal unit pair drawn from `rng` (exactly orthogonal in both modes).
pub fn random_orthogonal_pair<S: Scalar, R: Rng>(
    m: usize,
    mode: &ScalarMode,
    rng: &mut R,
) -> Result<(Vector<S>, Vector<S>)> {
    let x: Vector<S> = linalg::random_unit_with(m, rng);
    let y = linalg::random_unit_in_complement_with(std::slice::from_ref(&x), mode, rng)?;
    Ok((x, y))
}

/// `J(x + t y) = J(x) + 2t J(x,y) + t² J(y)`, used to cross-check the polarization.
pub fn jacobi_along<S: Scalar>(r: &CurvatureTensor<S>, x: &[S], y: &[S], t: &S) -> Result<Matrix<S>> {
    let jx = jacobi(r, x)?;
    let jy = jacobi(r, y)?;
    let jxy = jacobi_polarized(r, x, y)?;
    let two_t = S::from_i64(2) * t.clone();
    Ok(jx.add(&jxy.scale(&two_t)).add(&jy.scale(&(t.clone() * t.clone()))))
}

impl<S: Scalar> TsankovVerdict<S> {
    pub fn one_line(&self) -> String {
        let mut s = format!("holds={} method={}", self.holds, self.method);
        if let Some(w) = &self.witness {
            s.push_str(&format!(
                " witness_x={} witness_y={} comm_norm={}",
                linalg::format_vector(&w.x),
                linalg::format_vector(&w.y),
                w.commutator_norm.to_text()
            ));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::basis_vector;
    use crate::scalar::Rational;
    use crate::tensor::ComplexStructure;

    type Q = Rational;

    fn q(n: i64) -> Q {
        Q::from_i64(n)
    }

    fn e(m: usize, i: usize) -> Vector<Q> {
        basis_vector(m, i)
    }

    fn std_rtheta(c: i64) -> CurvatureTensor<Q> {
        CurvatureTensor::r_theta(&ComplexStructure::standard(4).unwrap(), q(c)).unwrap()
    }

    fn mixed() -> CurvatureTensor<Q> {
        let r0 = CurvatureTensor::r0(4, q(1)).unwrap();
        CurvatureTensor::combine(&[(q(1), &r0), (q(1), &std_rtheta(1))]).unwrap()
    }

    #[test]
    fn pair_indexing_is_dense() {
        for m in 1..7 {
            let pl = pair_list(m);
            for (k, &(i, j)) in pl.iter().enumerate() {
                assert_eq!(pair_index(m, i, j), k);
                assert_eq!(pair_index(m, j, i), k);
            }
        }
    }

    #[test]
    fn commutator_examples() {
        let r0 = CurvatureTensor::<Q>::r0(3, q(1)).unwrap();
        assert!(commutator(&r0, &e(3, 0), &e(3, 1)).unwrap().is_zero_within(0.0));

        // J(e1) = diag(0,4,1,1); J(y) = I - yyᵀ + 3wwᵀ, y = (e2+e3)/√2, w = Θy.
        // With y unnormalized the commutator doubles; halve to compare.
        let y = vec![q(0), q(1), q(1), q(0)];
        let c = commutator(&mixed(), &e(4, 0), &y).unwrap().scale(&Q::from_ratio(1, 2));
        assert_eq!(c[(1, 2)].clone().abs(), Q::from_ratio(3, 2));
        assert_eq!(c[(0, 3)].clone().abs(), Q::from_ratio(3, 2));
        assert_eq!(c[(1, 2)], -c[(2, 1)].clone());
        assert_eq!(c.max_abs(), Q::from_ratio(3, 2));

        let r = CurvatureTensor::<Q>::random_act(4, 3, 2).unwrap();
        let x = vec![q(1), q(2), q(-1), q(3)];
        assert!(commutator(&r, &x, &x).unwrap().is_zero_within(0.0));
    }

    #[test]
    fn poly_matches_dense_commutator() {
        let z = CurvatureTensor::<Q>::zero(4).unwrap();
        assert!(commutator_poly(&z).is_zero_within(0.0));
        let r = CurvatureTensor::<Q>::random_act(4, 3, 9).unwrap();
        let p = commutator_poly(&r);
        let mut rng = linalg::rng(4);
        for _ in 0..20 {
            let x: Vec<Q> = (0..4).map(|_| Q::from_ratio(rng.random_range(-5..=5), rng.random_range(1..=3))).collect();
            let y: Vec<Q> = (0..4).map(|_| Q::from_ratio(rng.random_range(-5..=5), rng.random_range(1..=3))).collect();
            assert_eq!(p.evaluate(&x, &y).unwrap(), commutator(&r, &x, &y).unwrap());
        }
    }

    #[test]
    fn poly_of_r_theta_vanishes_on_orthogonal_pairs() {
        let p = commutator_poly(&std_rtheta(1));
        let mode = ScalarMode::exact();
        let mut rng = linalg::rng(12);
        for _ in 0..100 {
            let (x, y) = random_orthogonal_pair::<Q, _>(4, &mode, &mut rng).unwrap();
            assert!(p.evaluate(&x, &y).unwrap().is_zero_within(0.0));
        }
    }

    #[test]
    fn divisibility_examples() {
        let m = 3;
        // (Σ x_i y_i) x_1 y_1 expanded: x_1² y_1² + x_1 x_2 y_1 y_2 + x_1 x_3 y_1 y_3
        let ex = |i: usize, j: usize| {
            let mut v = vec![0u32; m];
            v[i] += 1;
            v[j] += 1;
            v
        };
        let terms = vec![
            (0, 0, ex(0, 0), ex(0, 0), q(1)),
            (0, 0, ex(0, 1), ex(0, 1), q(1)),
            (0, 0, ex(0, 2), ex(0, 2), q(1)),
        ];
        let p = BiQuadraticMatrixPoly::from_terms(m, &terms).unwrap();
        let l = divisible_by_pairing(&p).unwrap();
        for pp in 0..m {
            for qq in 0..m {
                let want = if (pp, qq) == (0, 0) { q(1) } else { q(0) };
                assert_eq!(*l.coeff(0, 0, pp, qq), want);
            }
        }
        assert_eq!(l.multiply_by_pairing(), p);

        let p = BiQuadraticMatrixPoly::from_terms(2, &[(0, 1, vec![2, 0], vec![0, 2], q(1))]).unwrap();
        assert!(divisible_by_pairing(&p).is_none());

        let bad = BiQuadraticMatrixPoly::from_terms(2, &[(0, 0, vec![1, 0], vec![1, 1], q(1))]);
        assert!(matches!(bad, Err(Error::InvalidPolynomial(_))));
    }

    #[test]
    fn mixed_tensor_entry_not_divisible() {
        let p = commutator_poly(&mixed());
        // isolate entry (1,2) (0-based) of the commutator polynomial
        let mut single = BiQuadraticMatrixPoly::zero(4);
        for u in 0..p.pairs {
            for v in 0..p.pairs {
                let k = p.idx(1, 2, u, v);
                single.coeffs[k] = p.coeffs[k].clone();
            }
        }
        assert!(!single.is_zero_within(0.0));
        assert!(divisible_by_pairing(&single).is_none());
    }

    #[test]
    fn full_commutation_examples() {
        let z = CurvatureTensor::<Q>::zero(3).unwrap();
        assert!(full_commutation_test(&z).unwrap().holds);

        let r0 = CurvatureTensor::<Q>::r0(3, q(1)).unwrap();
        let v = full_commutation_test(&r0).unwrap();
        assert!(!v.holds);
        let w = v.witness.unwrap();
        assert!(w.commutator_norm > q(0));
        // the pair x = e1, y = (e1+e2)/√2 gives ±1/2 at (0,1)
        let y = vec![q(1), q(1), q(0)];
        let c = commutator(&r0, &e(3, 0), &y).unwrap().scale(&Q::from_ratio(1, 2));
        assert_eq!(c[(0, 1)].clone().abs(), Q::from_ratio(1, 2));

        let v = full_commutation_test(&std_rtheta(1)).unwrap();
        assert!(!v.holds);
        let y = vec![q(1), q(0), q(1), q(0)];
        assert!(!commutator(&std_rtheta(1), &e(4, 0), &y).unwrap().is_zero_within(0.0));
    }

    #[test]
    fn tsankov_examples() {
        for m in 3..7 {
            for c in [-2, 1, 5] {
                let r = CurvatureTensor::<Q>::r0(m, q(c)).unwrap();
                assert!(tsankov_test(&r, TestMethod::Exact, 0, 1).unwrap().holds);
                assert!(tsankov_test(&r, TestMethod::Sampled, 20, 1).unwrap().holds);
            }
        }
        let v = tsankov_test(&mixed(), TestMethod::Exact, 0, 3).unwrap();
        assert!(!v.holds);
        let w = v.witness.unwrap();
        assert!(linalg::dot(&w.x, &w.y).is_zero());
        assert!(w.commutator_norm >= Q::from_ratio(3, 2));
        let v = tsankov_test(&mixed(), TestMethod::Sampled, 50, 3).unwrap();
        assert!(!v.holds);
        let w = v.witness.unwrap();
        assert!(linalg::dot(&w.x, &w.y).is_zero());
        assert!(w.commutator_norm > q(0));
        assert!(tsankov_test(&mixed(), TestMethod::Sampled, 0, 3).is_err());
    }

    #[test]
    fn float_tsankov() {
        let th = ComplexStructure::<f64>::standard(6).unwrap();
        let r = CurvatureTensor::r_theta(&th, 1.5).unwrap();
        assert!(tsankov_test(&r, TestMethod::Exact, 0, 0).unwrap().holds);
        assert!(tsankov_test(&r, TestMethod::Sampled, 50, 0).unwrap().holds);
        let a = CurvatureTensor::<f64>::random_act(5, 2, 8).unwrap();
        assert!(!tsankov_test(&a, TestMethod::Exact, 0, 0).unwrap().holds);
        let v = tsankov_test(&a, TestMethod::Sampled, 50, 0).unwrap();
        assert!(!v.holds);
        let w = v.witness.unwrap();
        assert!(linalg::dot(&w.x, &w.y).abs() < 1e-12);
        assert!((linalg::norm_sq(&w.x) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn polarization_identity_along_line() {
        let r = CurvatureTensor::<Q>::random_act(4, 2, 21).unwrap();
        let x = vec![q(1), q(0), q(2), q(-1)];
        let y = vec![q(0), q(3), q(-1), q(1)];
        let t = Q::from_ratio(2, 7);
        let direct = jacobi(&r, &linalg::axpy(&x, &t, &y)).unwrap();
        assert_eq!(jacobi_along(&r, &x, &y, &t).unwrap(), direct);
    }
}
