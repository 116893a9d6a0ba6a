//! Algebraic curvature tensors.
//!
//! Components are stored densely, `R[i][j][k][l] = R(e_i, e_j, e_k, e_l)` in
//! a fixed orthonormal frame, so the inner product is the identity. The
//! curvature operator is `<R(x,y)z, w> = R(x,y,z,w)`.

use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Vector};
use crate::scalar::{max_abs_f64, Scalar, ScalarMode};

/// Per-symmetry maximum violations of a raw component array.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport<S> {
    pub m: usize,
    /// `R(x,y,z,w) - R(z,w,x,y)`
    pub pair_exchange: Violation<S>,
    /// `R(x,y,z,w) + R(y,x,z,w)`
    pub antisym_12: Violation<S>,
    /// `R(x,y,z,w) + R(x,y,w,z)`
    pub antisym_34: Violation<S>,
    /// `R(x,y,z,w) + R(y,z,x,w) + R(z,x,y,w)`
    pub bianchi: Violation<S>,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation<S> {
    pub max: S,
    /// First index tuple attaining `max` (all zeros when `max` is zero).
    pub at: [usize; 4],
}

impl<S: Scalar> Violation<S> {
    fn new() -> Self {
        Violation { max: S::zero(), at: [0; 4] }
    }

    fn record(&mut self, v: S, at: [usize; 4]) {
        let a = v.abs();
        if a > self.max {
            self.max = a;
            self.at = at;
        }
    }
}

impl<S: Scalar> ValidationReport<S> {
    pub fn rows(&self) -> [(&'static str, &Violation<S>); 4] {
        [
            ("pair_exchange", &self.pair_exchange),
            ("antisym_12", &self.antisym_12),
            ("antisym_34", &self.antisym_34),
            ("bianchi", &self.bianchi),
        ]
    }
}

/// Dimension `m` with `m^4 == len`, if any (`m >= 2`).
pub fn dimension_of(len: usize) -> Result<usize> {
    let mut m = 2usize;
    while m.pow(4) < len {
        m += 1;
    }
    if m.pow(4) == len {
        Ok(m)
    } else {
        Err(Error::InvalidShape(len))
    }
}

/// Checks the curvature symmetries on a raw `m^4` array.
pub fn validate<S: Scalar>(components: &[S], mode: &ScalarMode) -> Result<ValidationReport<S>> {
    let m = dimension_of(components.len())?;
    let at = |i: usize, j: usize, k: usize, l: usize| &components[((i * m + j) * m + k) * m + l];
    let mut pair = Violation::new();
    let mut a12 = Violation::new();
    let mut a34 = Violation::new();
    let mut bianchi = Violation::new();
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                for l in 0..m {
                    let r = at(i, j, k, l);
                    let idx = [i, j, k, l];
                    pair.record(r.clone() - at(k, l, i, j).clone(), idx);
                    a12.record(r.clone() + at(j, i, k, l).clone(), idx);
                    a34.record(r.clone() + at(i, j, l, k).clone(), idx);
                    bianchi.record(r.clone() + at(j, k, i, l).clone() + at(k, i, j, l).clone(), idx);
                }
            }
        }
    }
    let bound = mode.bound(max_abs_f64(components));
    let accepted = [&pair, &a12, &a34, &bianchi].iter().all(|v| v.max.within(bound));
    Ok(ValidationReport { m, pair_exchange: pair, antisym_12: a12, antisym_34: a34, bianchi, accepted })
}

/// A skew matrix `Θ` with `Θ² = -I`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexStructure<S> {
    theta: Matrix<S>,
}

impl<S: Scalar> ComplexStructure<S> {
    pub fn new(theta: Matrix<S>, mode: &ScalarMode) -> Result<Self> {
        if !theta.is_square() {
            return Err(Error::InvalidComplexStructure("matrix is not square".into()));
        }
        let m = theta.dim();
        if m == 0 || !m.is_multiple_of(2) {
            return Err(Error::InvalidComplexStructure(format!("dimension {m} is not even")));
        }
        let skew = theta.add(&theta.transpose());
        let bound = mode.bound(theta.max_abs_f64().max(1.0));
        if !skew.is_zero_within(bound) {
            return Err(Error::InvalidComplexStructure("Θ is not skew-adjoint".into()));
        }
        let sq = theta.matmul(&theta).add(&Matrix::identity(m));
        if !sq.is_zero_within(bound) {
            return Err(Error::InvalidComplexStructure("Θ² is not -id".into()));
        }
        Ok(ComplexStructure { theta })
    }

    /// `Θ e_{2k} = e_{2k+1}`, `Θ e_{2k+1} = -e_{2k}`.
    pub fn standard(m: usize) -> Result<Self> {
        if m == 0 || !m.is_multiple_of(2) {
            return Err(Error::InvalidComplexStructure(format!("dimension {m} is not even")));
        }
        let mut t = Matrix::square(m);
        for k in (0..m).step_by(2) {
            t[(k + 1, k)] = S::one();
            t[(k, k + 1)] = -S::one();
        }
        Ok(ComplexStructure { theta: t })
    }

    /// `Q Θ Qᵀ` for orthogonal `Q`.
    pub fn conjugate(&self, q: &Matrix<S>, mode: &ScalarMode) -> Result<Self> {
        Self::new(q.matmul(&self.theta).matmul(&q.transpose()), mode)
    }

    pub fn dim(&self) -> usize {
        self.theta.dim()
    }

    pub fn matrix(&self) -> &Matrix<S> {
        &self.theta
    }

    /// `Θ v`
    pub fn apply(&self, v: &[S]) -> Vector<S> {
        self.theta.matvec(v)
    }
}

/// Symmetric bilinear form (shape operator role in the Gauss equation).
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricForm<S> {
    phi: Matrix<S>,
}

impl<S: Scalar> SymmetricForm<S> {
    pub fn new(phi: Matrix<S>, mode: &ScalarMode) -> Result<Self> {
        if !phi.is_symmetric(mode) {
            return Err(Error::InvalidOperator(phi.asymmetry().to_f64()));
        }
        Ok(SymmetricForm { phi })
    }

    pub fn matrix(&self) -> &Matrix<S> {
        &self.phi
    }
}

#[derive(Debug, Clone)]
pub struct CurvatureTensor<S> {
    m: usize,
    components: Vec<S>,
    mode: ScalarMode,
    /// Integer-scaled components, built on first use by exact contractions.
    integer: OnceLock<Arc<IntegerForm>>,
}

/// `components = values / denom` with `values` integral.
#[derive(Debug)]
pub(crate) struct IntegerForm {
    pub denom: BigInt,
    pub values: Vec<BigInt>,
}

impl<S: PartialEq> PartialEq for CurvatureTensor<S> {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m && self.mode == other.mode && self.components == other.components
    }
}

impl<S: Scalar> CurvatureTensor<S> {
    /// Validated construction; invalid arrays are rejected, never repaired.
    pub fn new(components: Vec<S>, mode: ScalarMode) -> Result<Self> {
        mode.check::<S>()?;
        let report = validate(&components, &mode)?;
        if !report.accepted {
            let worst = report
                .rows()
                .into_iter()
                .max_by(|a, b| a.1.max.partial_cmp(&b.1.max).unwrap_or(std::cmp::Ordering::Equal))
                .map(|(_, v)| v.clone())
                .unwrap_or_else(Violation::new);
            if report.pair_exchange.max.within(mode.bound(max_abs_f64(&components)))
                && report.antisym_12.max.within(mode.bound(max_abs_f64(&components)))
                && report.antisym_34.max.within(mode.bound(max_abs_f64(&components)))
            {
                return Err(Error::BianchiViolation { max: worst.max.to_text(), indices: worst.at });
            }
            return Err(Error::ConflictingEntry(worst.at));
        }
        Ok(Self::raw(report.m, components, mode))
    }

    fn raw(m: usize, components: Vec<S>, mode: ScalarMode) -> Self {
        CurvatureTensor { m, components, mode, integer: OnceLock::new() }
    }

    /// Components over a common denominator, computed once per tensor.
    pub(crate) fn integer_form(&self) -> &IntegerForm {
        self.integer.get_or_init(|| {
            let (denom, values) = linalg::integer_scaled(&self.components);
            Arc::new(IntegerForm { denom, values })
        })
    }

    /// Construction from components known to satisfy the symmetries.
    pub(crate) fn from_trusted(m: usize, components: Vec<S>) -> Self {
        debug_assert_eq!(components.len(), m.pow(4));
        Self::raw(m, components, ScalarMode::of::<S>())
    }

    pub fn zero(m: usize) -> Result<Self> {
        check_dim(m)?;
        Ok(Self::from_trusted(m, vec![S::zero(); m.pow(4)]))
    }

    /// `c · R₀`, with `R₀(x,y)z = <y,z>x - <x,z>y`.
    pub fn r0(m: usize, c: S) -> Result<Self> {
        check_dim(m)?;
        let mut t = Self::zero(m)?;
        for i in 0..m {
            for j in 0..m {
                if i == j {
                    continue;
                }
                // δ_jk δ_il - δ_ik δ_jl
                *t.get_mut(i, j, j, i) = c.clone();
                *t.get_mut(i, j, i, j) = -c.clone();
            }
        }
        Ok(t)
    }

    /// `c · R_Θ`, with `R_Θ(x,y)z = <Θy,z>Θx - <Θx,z>Θy - 2<Θx,y>Θz`.
    pub fn r_theta(theta: &ComplexStructure<S>, c: S) -> Result<Self> {
        let m = theta.dim();
        check_dim(m)?;
        let t = theta.matrix();
        let two = S::from_i64(2);
        let mut comps = vec![S::zero(); m.pow(4)];
        // <Θe_b, e_a> = t[a][b]
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    for l in 0..m {
                        let mut v = S::zero();
                        v.add_prod(&t[(k, j)], &t[(l, i)]);
                        let mut w = S::zero();
                        w.add_prod(&t[(k, i)], &t[(l, j)]);
                        v -= w;
                        let mut u = S::zero();
                        u.add_prod(&t[(j, i)], &t[(l, k)]);
                        v -= two.clone() * u;
                        if !v.is_zero() {
                            comps[((i * m + j) * m + k) * m + l] = v * c.clone();
                        }
                    }
                }
            }
        }
        Ok(Self::from_trusted(m, comps))
    }

    /// Gauss-equation tensor `R(x,y,z,w) = φ(x,w)φ(y,z) - φ(x,z)φ(y,w)`.
    pub fn from_form(phi: &SymmetricForm<S>) -> Result<Self> {
        let p = phi.matrix();
        let m = p.dim();
        check_dim(m)?;
        let mut comps = vec![S::zero(); m.pow(4)];
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    for l in 0..m {
                        let mut v = S::zero();
                        v.add_prod(&p[(i, l)], &p[(j, k)]);
                        let mut w = S::zero();
                        w.add_prod(&p[(i, k)], &p[(j, l)]);
                        comps[((i * m + j) * m + k) * m + l] = v - w;
                    }
                }
            }
        }
        Ok(Self::from_trusted(m, comps))
    }

    /// `Σ ε_i · from_form(φ_i)` with random integer symmetric `φ_i` (entries in
    /// `[-2, 2]`) and random signs.
    pub fn random_act(m: usize, k: usize, seed: u64) -> Result<Self> {
        check_dim(m)?;
        if k == 0 {
            return Err(Error::DegenerateInput("generator count must be positive".into()));
        }
        let mut r = linalg::rng(seed);
        let mut acc = Self::zero(m)?;
        for _ in 0..k {
            let phi = SymmetricForm { phi: linalg::random_symmetric_int::<S, _>(m, 2, &mut r) };
            let g = Self::from_form(&phi)?;
            let sign = if r.random_bool(0.5) { S::one() } else { -S::one() };
            acc = acc.add_scaled(&sign, &g);
        }
        Ok(acc)
    }

    /// Componentwise `Σ c_i R_i`.
    pub fn combine(terms: &[(S, &CurvatureTensor<S>)]) -> Result<Self> {
        let (_, first) = terms
            .first()
            .ok_or_else(|| Error::IncompatibleTensors("empty combination".into()))?;
        let mut acc = Self::raw(first.m, vec![S::zero(); first.m.pow(4)], first.mode);
        for (c, t) in terms {
            if t.m != first.m {
                return Err(Error::IncompatibleTensors(format!("dimensions {} and {}", first.m, t.m)));
            }
            if t.mode != first.mode {
                return Err(Error::IncompatibleTensors("scalar modes differ".into()));
            }
            acc = acc.add_scaled(c, t);
        }
        Ok(acc)
    }

    fn add_scaled(mut self, c: &S, other: &Self) -> Self {
        if c.is_zero() {
            return self;
        }
        self.integer = OnceLock::new();
        for (a, b) in self.components.iter_mut().zip(&other.components) {
            a.add_prod(c, b);
        }
        self
    }

    pub fn scaled(&self, c: &S) -> Self {
        Self::raw(self.m, self.components.iter().map(|a| a.clone() * c.clone()).collect(), self.mode)
    }

    /// Same tensor evaluated in a different tolerance setting.
    pub fn with_mode(mut self, mode: ScalarMode) -> Result<Self> {
        mode.check::<S>()?;
        self.mode = mode;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn mode(&self) -> &ScalarMode {
        &self.mode
    }

    pub fn components(&self) -> &[S] {
        &self.components
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.m + j) * self.m + k) * self.m + l
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> &S {
        &self.components[self.index(i, j, k, l)]
    }

    fn get_mut(&mut self, i: usize, j: usize, k: usize, l: usize) -> &mut S {
        self.integer = OnceLock::new();
        let idx = self.index(i, j, k, l);
        &mut self.components[idx]
    }

    /// Max-abs component norm.
    pub fn norm(&self) -> S {
        crate::scalar::max_abs(&self.components)
    }

    pub fn norm_f64(&self) -> f64 {
        max_abs_f64(&self.components)
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| c.within(0.0))
    }

    /// `max|R - S| / max|R|` (0 for two zero tensors).
    pub fn relative_distance(&self, other: &Self) -> Result<S> {
        self.check_compatible(other)?;
        let mut diff = S::zero();
        for (a, b) in self.components.iter().zip(&other.components) {
            let d = (a.clone() - b.clone()).abs();
            if d > diff {
                diff = d;
            }
        }
        let n = self.norm();
        if n.is_zero() {
            return Ok(diff);
        }
        Ok(diff / n)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.m != other.m {
            return Err(Error::IncompatibleTensors(format!("dimensions {} and {}", self.m, other.m)));
        }
        Ok(())
    }

    pub(crate) fn check_vector(&self, v: &[S]) -> Result<()> {
        if v.len() != self.m {
            return Err(Error::IncompatibleTensors(format!(
                "vector of length {} for tensor of dimension {}",
                v.len(),
                self.m
            )));
        }
        Ok(())
    }

    /// `R(x,y,z,w)`
    pub fn eval(&self, x: &[S], y: &[S], z: &[S], w: &[S]) -> Result<S> {
        let v = self.apply(x, y, z)?;
        self.check_vector(w)?;
        Ok(linalg::dot(&v, w))
    }

    /// Sectional value `R(x,y,y,x)`.
    pub fn sectional(&self, x: &[S], y: &[S]) -> Result<S> {
        self.eval(x, y, y, x)
    }

    /// Curvature operator `R(x,y)z`, the vector with `<R(x,y)z, w> = R(x,y,z,w)`.
    pub fn apply(&self, x: &[S], y: &[S], z: &[S]) -> Result<Vector<S>> {
        for v in [x, y, z] {
            self.check_vector(v)?;
        }
        let m = self.m;
        let mut out = vec![S::zero(); m];
        for i in 0..m {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..m {
                if y[j].is_zero() {
                    continue;
                }
                let xy = x[i].clone() * y[j].clone();
                for k in 0..m {
                    if z[k].is_zero() {
                        continue;
                    }
                    let xyz = xy.clone() * z[k].clone();
                    let base = self.index(i, j, k, 0);
                    for (l, o) in out.iter_mut().enumerate() {
                        o.add_prod(&xyz, &self.components[base + l]);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Pushforward by an orthogonal `Q`: the result satisfies
    /// `R'(x,y,z,w) = R(Qᵀx, Qᵀy, Qᵀz, Qᵀw)`.
    pub fn transform(&self, q: &Matrix<S>) -> Result<Self> {
        let m = self.m;
        if q.rows() != m || q.cols() != m {
            return Err(Error::IncompatibleTensors("transform matrix has wrong shape".into()));
        }
        let mut cur = self.components.clone();
        // contract one slot at a time: slot s index a -> Σ_a Q[i][a] T[..a..]
        for slot in 0..4 {
            let stride = m.pow(3 - slot as u32);
            let mut next = vec![S::zero(); cur.len()];
            for (pos, out) in next.iter_mut().enumerate() {
                let i = (pos / stride) % m;
                let base = pos - i * stride;
                for a in 0..m {
                    out.add_prod(&q[(i, a)], &cur[base + a * stride]);
                }
            }
            cur = next;
        }
        Ok(Self::raw(m, cur, self.mode))
    }

    pub fn to_f64(&self) -> CurvatureTensor<f64> {
        let mode = if self.mode.is_exact() { ScalarMode::of::<f64>() } else { self.mode };
        CurvatureTensor::raw(self.m, self.components.iter().map(Scalar::to_f64).collect(), mode)
    }

    /// Re-express a tensor given in a basis with Gram matrix `gram` in an
    /// orthonormal frame obtained by Cholesky factorization `gram = L Lᵀ`.
    pub fn from_gram_frame(components: Vec<S>, gram: &Matrix<S>, mode: ScalarMode) -> Result<Self> {
        let m = dimension_of(components.len())?;
        if gram.rows() != m || !gram.is_symmetric(&mode) {
            return Err(Error::InvalidOperator(gram.asymmetry().to_f64()));
        }
        let l = cholesky(gram)?;
        // frame f = e · L^{-T}; components transform by T = L^{-T}, i.e. R' = T^T-contraction
        let linv = lower_inverse(&l);
        let raw = Self::raw(m, components, mode);
        let t = raw.transform(&linv)?;
        Self::new(t.components, mode)
    }
}

fn check_dim(m: usize) -> Result<()> {
    if m < 2 {
        return Err(Error::InvalidDimension(m));
    }
    Ok(())
}

fn cholesky<S: Scalar>(a: &Matrix<S>) -> Result<Matrix<S>> {
    let n = a.dim();
    let mut l = Matrix::<S>::square(n);
    for j in 0..n {
        let mut d = a[(j, j)].clone();
        for k in 0..j {
            let mut p = l[(j, k)].clone();
            p *= &l[(j, k)];
            d -= p;
        }
        if d <= S::zero() {
            return Err(Error::DegenerateInput("Gram matrix is not positive definite".into()));
        }
        let s = d
            .sqrt_checked()
            .ok_or_else(|| Error::NotRepresentable("Cholesky pivot is not a perfect square".into()))?;
        l[(j, j)] = s.clone();
        for i in j + 1..n {
            let mut v = a[(i, j)].clone();
            for k in 0..j {
                let mut p = l[(i, k)].clone();
                p *= &l[(j, k)];
                v -= p;
            }
            l[(i, j)] = v / s.clone();
        }
    }
    Ok(l)
}

fn lower_inverse<S: Scalar>(l: &Matrix<S>) -> Matrix<S> {
    let n = l.dim();
    let mut inv = Matrix::<S>::square(n);
    for col in 0..n {
        for i in col..n {
            let mut v = if i == col { S::one() } else { S::zero() };
            for k in col..i {
                let mut p = l[(i, k)].clone();
                p *= &inv[(k, col)];
                v -= p;
            }
            inv[(i, col)] = v / l[(i, i)].clone();
        }
    }
    inv
}
