//! JSON tensor files.
//!
//! ```json
//! {"m": 3, "scalar": "rational", "storage": "sparse",
//!  "entries": [{"i": 0, "j": 1, "k": 1, "l": 0, "v": "1"}]}
//! ```
//!
//! Sparse files list one representative per symmetry orbit; the loader fills
//! in the remaining images `R_jikl = -R_ijkl`, `R_ijlk = -R_ijkl`,
//! `R_klij = R_ijkl`. Dense files hold all `m^4` values in row-major
//! `[i][j][k][l]` order. Values are strings (`"3/4"`, `"-1.5"`); bare JSON
//! numbers are also accepted on input. `scalar` defaults to `rational` and
//! `storage` to `sparse`.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar, ScalarKind, ScalarMode};
use crate::tensor::CurvatureTensor;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Storage {
    Sparse,
    Dense,
}

impl FromStr for Storage {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sparse" => Ok(Storage::Sparse),
            "dense" => Ok(Storage::Dense),
            other => Err(format_error(0, format!("unknown storage {other:?}"))),
        }
    }
}

impl fmt::Display for Storage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Storage::Sparse => "sparse",
            Storage::Dense => "dense",
        })
    }
}

/// A loaded tensor in whichever arithmetic the file asked for.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyTensor {
    Rational(CurvatureTensor<Rational>),
    Float(CurvatureTensor<f64>),
}

impl AnyTensor {
    pub fn dim(&self) -> usize {
        match self {
            AnyTensor::Rational(t) => t.dim(),
            AnyTensor::Float(t) => t.dim(),
        }
    }

    pub fn to_json(&self, storage: Storage) -> String {
        match self {
            AnyTensor::Rational(t) => to_json(t, storage),
            AnyTensor::Float(t) => to_json(t, storage),
        }
    }
}

#[derive(Deserialize)]
struct RawFile {
    m: usize,
    #[serde(default)]
    scalar: Option<String>,
    #[serde(default)]
    storage: Option<String>,
    entries: Vec<Value>,
}

#[derive(Serialize)]
struct SparseEntry {
    i: usize,
    j: usize,
    k: usize,
    l: usize,
    v: String,
}

#[derive(Serialize)]
struct OutFile<E: Serialize> {
    m: usize,
    scalar: &'static str,
    storage: String,
    entries: Vec<E>,
}

fn format_error(line: usize, msg: impl Into<String>) -> Error {
    Error::FormatError { line, msg: msg.into() }
}

fn scalar_name(kind: ScalarKind) -> &'static str {
    match kind {
        ScalarKind::ExactRational => "rational",
        ScalarKind::Float => "float",
    }
}

/// Component arrays as read from a file, before symmetry validation.
#[derive(Debug, Clone, PartialEq)]
pub enum RawComponents {
    Rational(Vec<Rational>),
    Float(Vec<f64>),
}

/// Parses a tensor file. `tol` is the tolerance attached to float tensors.
pub fn from_json(text: &str, tol: f64) -> Result<AnyTensor> {
    match components_from_json(text, tol)? {
        RawComponents::Rational(c) => Ok(AnyTensor::Rational(CurvatureTensor::new(c, ScalarMode::exact())?)),
        RawComponents::Float(c) => Ok(AnyTensor::Float(CurvatureTensor::new(c, ScalarMode::float(tol)?)?)),
    }
}

/// Reads the component array (completing sparse orbits) without checking
/// the Bianchi identity, so that a caller can report violations.
pub fn components_from_json(text: &str, tol: f64) -> Result<RawComponents> {
    let raw: RawFile = serde_json::from_str(text).map_err(|e| format_error(e.line(), e.to_string()))?;
    let storage: Storage = raw.storage.as_deref().unwrap_or("sparse").parse()?;
    match raw.scalar.as_deref().unwrap_or("rational") {
        "rational" => Ok(RawComponents::Rational(build(&raw, storage, &ScalarMode::exact())?)),
        "float" => Ok(RawComponents::Float(build(&raw, storage, &ScalarMode::float(tol)?)?)),
        other => Err(format_error(0, format!("unknown scalar {other:?}"))),
    }
}

fn parse_value<S: Scalar>(v: &Value, what: &str) -> Result<S> {
    let text = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        _ => return Err(format_error(0, format!("{what}: expected a string or number"))),
    };
    S::parse_str(&text).ok_or_else(|| format_error(0, format!("{what}: cannot parse {text:?}")))
}

fn build<S: Scalar>(raw: &RawFile, storage: Storage, mode: &ScalarMode) -> Result<Vec<S>> {
    let m = raw.m;
    if m < 2 {
        return Err(Error::InvalidDimension(m));
    }
    let n = m.pow(4);
    match storage {
        Storage::Dense => {
            if raw.entries.len() != n {
                return Err(Error::InvalidShape(raw.entries.len()));
            }
            raw.entries.iter().enumerate().map(|(p, v)| parse_value(v, &format!("entry {p}"))).collect()
        }
        Storage::Sparse => {
            let mut slots: Vec<Option<S>> = vec![None; n];
            for (p, e) in raw.entries.iter().enumerate() {
                let obj = e.as_object().ok_or_else(|| format_error(0, format!("entry {p}: expected an object")))?;
                let mut idx = [0usize; 4];
                for (slot, key) in idx.iter_mut().zip(["i", "j", "k", "l"]) {
                    let v = obj
                        .get(key)
                        .and_then(Value::as_u64)
                        .ok_or_else(|| format_error(0, format!("entry {p}: missing index {key}")))?;
                    if v as usize >= m {
                        return Err(format_error(0, format!("entry {p}: index {key}={v} out of range")));
                    }
                    *slot = v as usize;
                }
                let v = obj.get("v").ok_or_else(|| format_error(0, format!("entry {p}: missing value v")))?;
                let v: S = parse_value(v, &format!("entry {p}"))?;
                fill_orbit(&mut slots, m, idx, &v, mode)?;
            }
            Ok(slots.into_iter().map(|s| s.unwrap_or_else(S::zero)).collect())
        }
    }
}

/// The 8 images of `(i,j,k,l)` under the curvature symmetries, with signs.
fn orbit([i, j, k, l]: [usize; 4]) -> [([usize; 4], bool); 8] {
    [
        ([i, j, k, l], false),
        ([j, i, k, l], true),
        ([i, j, l, k], true),
        ([j, i, l, k], false),
        ([k, l, i, j], false),
        ([l, k, i, j], true),
        ([k, l, j, i], true),
        ([l, k, j, i], false),
    ]
}

fn fill_orbit<S: Scalar>(slots: &mut [Option<S>], m: usize, idx: [usize; 4], v: &S, mode: &ScalarMode) -> Result<()> {
    let bound = mode.bound(v.to_f64().abs());
    for (img, negate) in orbit(idx) {
        let val = if negate { -v.clone() } else { v.clone() };
        let p = ((img[0] * m + img[1]) * m + img[2]) * m + img[3];
        match &slots[p] {
            Some(old) if !(old.clone() - val.clone()).within(bound) => return Err(Error::ConflictingEntry(idx)),
            Some(_) => {}
            None => slots[p] = Some(val),
        }
    }
    Ok(())
}

pub fn to_json<S: Scalar>(t: &CurvatureTensor<S>, storage: Storage) -> String {
    let m = t.dim();
    let scalar = scalar_name(S::KIND);
    let out = match storage {
        Storage::Dense => serde_json::to_string_pretty(&OutFile {
            m,
            scalar,
            storage: storage.to_string(),
            entries: t.components().iter().map(Scalar::to_text).collect(),
        }),
        Storage::Sparse => {
            let mut entries = Vec::new();
            for i in 0..m {
                for j in 0..m {
                    for k in 0..m {
                        for l in 0..m {
                            let idx = [i, j, k, l];
                            let v = t.get(i, j, k, l);
                            if v.is_zero() || orbit(idx).iter().any(|(img, _)| *img < idx) {
                                continue;
                            }
                            entries.push(SparseEntry { i, j, k, l, v: v.to_text() });
                        }
                    }
                }
            }
            serde_json::to_string_pretty(&OutFile { m, scalar, storage: storage.to_string(), entries })
        }
    };
    out.expect("tensor files serialize infallibly") + "\n"
}

pub fn load_tensor(path: &Path, tol: f64) -> Result<AnyTensor> {
    let text = std::fs::read_to_string(path)?;
    from_json(&text, tol)
}

pub fn store_tensor<S: Scalar>(path: &Path, t: &CurvatureTensor<S>, storage: Storage) -> Result<()> {
    std::fs::write(path, to_json(t, storage))?;
    Ok(())
}
