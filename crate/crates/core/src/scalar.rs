//! Scalar backends: exact rationals and `f64` with a tolerance.
//!
//! Every numeric routine in the crate is generic over [`Scalar`]. Exact
//! arithmetic compares against zero; floating point compares against a bound
//! that the caller derives from [`ScalarMode::tol`] and a problem scale.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScalarKind {
    ExactRational,
    Float,
}

/// Arithmetic backend plus the tolerance used by `Float` comparisons.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarMode {
    pub kind: ScalarKind,
    pub tol: f64,
}

impl ScalarMode {
    pub fn exact() -> Self {
        ScalarMode { kind: ScalarKind::ExactRational, tol: 0.0 }
    }

    pub fn float(tol: f64) -> Result<Self> {
        if tol <= 0.0 || !tol.is_finite() {
            return Err(Error::DegenerateInput(format!("float tolerance must be positive, got {tol}")));
        }
        Ok(ScalarMode { kind: ScalarKind::Float, tol })
    }

    /// Default mode for a scalar type (`DEFAULT_TOL` for floats).
    pub fn of<S: Scalar>() -> Self {
        match S::KIND {
            ScalarKind::ExactRational => Self::exact(),
            ScalarKind::Float => ScalarMode { kind: ScalarKind::Float, tol: DEFAULT_TOL },
        }
    }

    pub fn is_exact(&self) -> bool {
        self.kind == ScalarKind::ExactRational
    }

    /// Absolute threshold `tol * scale`; zero in exact mode.
    pub fn bound(&self, scale: f64) -> f64 {
        if self.is_exact() {
            0.0
        } else {
            self.tol * scale
        }
    }

    pub(crate) fn check<S: Scalar>(&self) -> Result<()> {
        if self.kind != S::KIND {
            return Err(Error::IncompatibleTensors(format!(
                "mode {:?} used with {:?} scalars",
                self.kind,
                S::KIND
            )));
        }
        Ok(())
    }
}

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
    + for<'a> MulAssign<&'a Self>
{
    const KIND: ScalarKind;

    fn from_i64(v: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num) / Self::from_i64(den)
    }
    fn to_f64(&self) -> f64;
    /// Nearest value (exact dyadic conversion for rationals; NaN maps to zero).
    fn from_f64(v: f64) -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn to_rational(&self) -> Rational;
    fn abs(&self) -> Self;
    /// Square root when it exists in this backend (perfect squares for rationals).
    fn sqrt_checked(&self) -> Option<Self>;
    /// Parse a decimal (`-1.25`, `3e-2`) or `p/q` string.
    fn parse_str(s: &str) -> Option<Self>;
    fn to_text(&self) -> String;

    /// Zero test against an absolute bound; exact backends ignore the bound.
    fn within(&self, bound: f64) -> bool;

    /// `self += a * b`
    fn add_prod(&mut self, a: &Self, b: &Self) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        let mut p = a.clone();
        p *= b;
        *self += &p;
    }
}

impl Scalar for f64 {
    const KIND: ScalarKind = ScalarKind::Float;

    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn from_f64(v: f64) -> Self {
        v
    }
    fn from_rational(r: &Rational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }
    fn to_rational(&self) -> Rational {
        Rational::from_float(*self).unwrap_or_else(Rational::zero)
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn sqrt_checked(&self) -> Option<Self> {
        if *self >= 0.0 {
            Some(self.sqrt())
        } else if *self > -1e-300 {
            Some(0.0)
        } else {
            None
        }
    }
    fn parse_str(s: &str) -> Option<Self> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p: f64 = p.trim().parse().ok()?;
            let q: f64 = q.trim().parse().ok()?;
            if q == 0.0 {
                return None;
            }
            return Some(p / q);
        }
        s.parse().ok().filter(|v: &f64| v.is_finite())
    }
    fn to_text(&self) -> String {
        if *self == 0.0 {
            // avoid "-0"
            "0".to_string()
        } else {
            format!("{self}")
        }
    }
    fn within(&self, bound: f64) -> bool {
        f64::abs(*self) <= bound
    }
    fn add_prod(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }
}

impl Scalar for Rational {
    const KIND: ScalarKind = ScalarKind::ExactRational;

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn from_f64(v: f64) -> Self {
        Rational::from_float(v).unwrap_or_else(Rational::zero)
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn to_rational(&self) -> Rational {
        self.clone()
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn sqrt_checked(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let n = self.numer().sqrt();
        let d = self.denom().sqrt();
        if &(&n * &n) == self.numer() && &(&d * &d) == self.denom() {
            Some(Rational::new(n, d))
        } else {
            None
        }
    }
    fn parse_str(s: &str) -> Option<Self> {
        parse_rational(s)
    }
    fn to_text(&self) -> String {
        if self.is_integer() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }
    fn within(&self, _bound: f64) -> bool {
        self.is_zero()
    }
}

/// Exact parse of `p/q`, integers and finite decimals with optional exponent.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(Rational::new(p, q));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all: BigInt = format!("0{int_part}{frac_part}").parse().ok()?;
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut r = Rational::from_integer(all);
    if scale >= 0 {
        r *= Rational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        r /= Rational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if neg { -r } else { r })
}

/// Largest absolute value of a slice, as `f64` (0 for empty input).
pub fn max_abs_f64<S: Scalar>(xs: &[S]) -> f64 {
    xs.iter().map(|x| x.to_f64().abs()).fold(0.0, f64::max)
}

/// Largest absolute value of a slice in the scalar's own arithmetic.
pub fn max_abs<S: Scalar>(xs: &[S]) -> S {
    let mut best = S::zero();
    for x in xs {
        let a = x.abs();
        if a > best {
            best = a;
        }
    }
    best
}
