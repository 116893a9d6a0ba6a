//! Classification of Jacobi-Tsankov tensors.
//!
//! A nonzero tensor whose Jacobi operators commute on orthogonal pairs is
//! either `c·R₀` or `c·R_Θ` for a Hermitian almost complex structure `Θ`.
//! The classifier decides which, recovers `c` (and `Θ`) constructively, and
//! verifies the answer by rebuilding the tensor and measuring the residual.

use std::collections::BTreeMap;
use std::fmt;


use crate::error::{Error, Result};
use crate::jacobi::{jacobi, jacobi_polarized};
use crate::linalg::{self, Matrix, Vector};
use crate::scalar::{Scalar, ScalarMode};
use crate::tensor::{ComplexStructure, CurvatureTensor};
use crate::tsankov::{tsankov_test, TestMethod, Witness};

/// Number of random probes used to find the generic rank of `J`.
pub const RANK_PROBES: u64 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tag {
    Zero,
    ConstantCurvature,
    ComplexForm,
    NotTsankov,
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tag::Zero => "Zero",
            Tag::ConstantCurvature => "ConstantCurvature",
            Tag::ComplexForm => "ComplexForm",
            Tag::NotTsankov => "NotTsankov",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification<S> {
    pub tag: Tag,
    pub c: Option<S>,
    pub theta: Option<ComplexStructure<S>>,
    pub witness: Option<Witness<S>>,
    /// `max|R - R̂| / max|R|`; absent for `NotTsankov`.
    pub residual: Option<S>,
}

impl<S: Scalar> Classification<S> {
    fn zero() -> Self {
        Classification { tag: Tag::Zero, c: None, theta: None, witness: None, residual: Some(S::zero()) }
    }

    /// Single-line `key=value` rendering used by the CLI.
    ///
    /// Keys, in order: `tag`, then `c`, `residual`, `theta` (row-major, rows
    /// separated by `;`) or `witness_x`, `witness_y`, `comm_norm`.
    pub fn key_values(&self) -> String {
        let mut out = format!("tag={}", self.tag);
        if let Some(c) = &self.c {
            out.push_str(&format!(" c={}", c.to_text()));
        }
        if let Some(r) = &self.residual {
            out.push_str(&format!(" residual={}", r.to_text()));
        }
        if let Some(t) = &self.theta {
            out.push_str(&format!(" theta={}", format_matrix(t.matrix())));
        }
        if let Some(w) = &self.witness {
            out.push_str(&format!(
                " witness_x={} witness_y={} comm_norm={}",
                linalg::format_vector(&w.x),
                linalg::format_vector(&w.y),
                w.commutator_norm.to_text()
            ));
        }
        out
    }
}

pub fn format_matrix<S: Scalar>(a: &Matrix<S>) -> String {
    (0..a.rows()).map(|i| linalg::format_vector(a.row(i))).collect::<Vec<_>>().join(";")
}

/// Eigenvalues to 12 decimals; values that round to zero print as `0.000000000000`.
pub fn format_spectrum(spec: &[f64], sep: &str) -> String {
    spec.iter().map(|&v| format!("{:.12}", if v.abs() < 5e-13 { 0.0 } else { v })).collect::<Vec<_>>().join(sep)
}

/// Largest rank of `J(x)` over `RANK_PROBES` seeded random unit vectors.
pub fn generic_rank<S: Scalar>(r: &CurvatureTensor<S>, mode: &ScalarMode, seed: u64) -> Result<usize> {
    let m = r.dim();
    let mut best = 0;
    for k in 0..RANK_PROBES {
        let x: Vector<S> = linalg::random_unit_vector(m, seed.wrapping_add(k))?;
        let j = jacobi(r, &x)?;
        best = best.max(linalg::rank_with_mode(&j, mode));
        if best + 1 == m {
            break;
        }
    }
    Ok(best)
}

pub fn classify<S: Scalar>(r: &CurvatureTensor<S>, mode: &ScalarMode, seed: u64) -> Result<Classification<S>> {
    mode.check::<S>()?;
    let m = r.dim();
    if m < 3 {
        return Err(Error::UnsupportedDimension(m));
    }
    let r = r.clone().with_mode(*mode)?;
    if r.is_zero() {
        return Ok(Classification::zero());
    }
    let verdict = tsankov_test(&r, TestMethod::Exact, 0, seed)?;
    if !verdict.holds {
        return Ok(Classification {
            tag: Tag::NotTsankov,
            c: None,
            theta: None,
            witness: verdict.witness,
            residual: None,
        });
    }
    let rank = generic_rank(&r, mode, seed)?;
    if rank + 1 == m {
        let c = sectional_constant(&r, mode)?;
        let rebuilt = CurvatureTensor::r0(m, c.clone())?;
        let residual = r.relative_distance(&rebuilt)?;
        if !residual.within(mode.tol) {
            return Err(Error::ClassificationInconsistency(format!(
                "constant-curvature reconstruction residual {}",
                residual.to_text()
            )));
        }
        return Ok(Classification {
            tag: Tag::ConstantCurvature,
            c: Some(c),
            theta: None,
            witness: None,
            residual: Some(residual),
        });
    }
    if rank != 1 || !m.is_multiple_of(2) {
        return Err(Error::ClassificationInconsistency(format!(
            "Jacobi-Tsankov tensor with generic rank {rank} in dimension {m}"
        )));
    }
    let (c, theta) = recover_complex_structure(&r, mode)?;
    let rebuilt = CurvatureTensor::r_theta(&theta, c.clone())?;
    let residual = r.relative_distance(&rebuilt)?;
    if !residual.within(mode.tol) {
        return Err(Error::ClassificationInconsistency(format!(
            "complex-form reconstruction residual {}",
            residual.to_text()
        )));
    }
    Ok(Classification { tag: Tag::ComplexForm, c: Some(c), theta: Some(theta), witness: None, residual: Some(residual) })
}

/// `R(e_i, e_j, e_j, e_i)` for the first basis pair where it is nonzero.
fn sectional_constant<S: Scalar>(r: &CurvatureTensor<S>, mode: &ScalarMode) -> Result<S> {
    let m = r.dim();
    let bound = mode.bound(r.norm_f64());
    for i in 0..m {
        for j in i + 1..m {
            let k = r.get(i, j, j, i);
            if !k.within(bound) {
                return Ok(k.clone());
            }
        }
    }
    Err(Error::ClassificationInconsistency("all basis sectional curvatures vanish".into()))
}

/// Recovers `(c, Θ)` with `R = c·R_Θ` from the rank-one Jacobi operators.
///
/// With `J(e_p) = 3c·w wᵀ` and `w = Θe_p`, the polarized operator satisfies
/// `J(e_p, e_j) w = (3c/2) Θe_j` for `j ≠ p`. The sign of `Θ` is fixed by
/// making the first nonzero coordinate of `Θe_1` positive.
pub fn recover_complex_structure<S: Scalar>(
    r: &CurvatureTensor<S>,
    mode: &ScalarMode,
) -> Result<(S, ComplexStructure<S>)> {
    mode.check::<S>()?;
    let m = r.dim();
    if !m.is_multiple_of(2) {
        return Err(Error::UnsupportedDimension(m));
    }
    let mut last_rank = 0;
    let mut base = None;
    for p in 0..m {
        let ep = linalg::basis_vector::<S>(m, p);
        let j = jacobi(r, &ep)?;
        last_rank = linalg::rank_with_mode(&j, mode);
        if last_rank == 1 {
            base = Some((p, j));
            break;
        }
    }
    let (p, jp) = base.ok_or(Error::NotRankOne(last_rank))?;

    let three = S::from_i64(3);
    let three_c = jp.trace();
    let c = three_c.clone() / three;
    let bound = mode.bound(jp.max_abs_f64());
    let k = (0..m)
        .find(|&k| !jp[(k, k)].within(bound))
        .ok_or_else(|| Error::ClassificationInconsistency("rank-one operator with zero diagonal".into()))?;
    let wk = (jp[(k, k)].clone() / three_c.clone())
        .sqrt_checked()
        .ok_or_else(|| Error::NotRepresentable("Θe_p has an irrational coordinate".into()))?;
    let denom = three_c.clone() * wk.clone();
    let w: Vector<S> = (0..m).map(|i| jp[(i, k)].clone() / denom.clone()).collect();

    let ep = linalg::basis_vector::<S>(m, p);
    let factor = S::from_i64(2) / three_c;
    let mut cols: Vec<Vector<S>> = Vec::with_capacity(m);
    for j in 0..m {
        if j == p {
            cols.push(w.clone());
        } else {
            let jpj = jacobi_polarized(r, &ep, &linalg::basis_vector(m, j))?;
            cols.push(linalg::scaled(&jpj.matvec(&w), &factor));
        }
    }
    let mut theta = Matrix::from_columns(&cols);
    let first = theta.column(0);
    let flip = first
        .iter()
        .find(|v| !v.within(mode.bound(1.0)))
        .is_some_and(|v| *v < S::zero());
    if flip {
        theta = theta.scale(&(-S::one()));
    }
    let theta = ComplexStructure::new(theta, &relaxed(mode))
        .map_err(|e| Error::ClassificationInconsistency(format!("recovered Θ is invalid: {e}")))?;
    Ok((c, theta))
}

fn relaxed(mode: &ScalarMode) -> ScalarMode {
    if mode.is_exact() {
        *mode
    } else {
        ScalarMode { kind: mode.kind, tol: mode.tol.max(1e-9) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OssermanReport {
    pub is_osserman: bool,
    pub reference_spectrum: Vec<f64>,
    pub max_deviation: f64,
    pub n_samples: usize,
}

impl OssermanReport {
    pub fn key_values(&self) -> String {
        format!(
            "is_osserman={} spectrum={} max_deviation={:e} n_samples={}",
            self.is_osserman,
            format_spectrum(&self.reference_spectrum, ","),
            self.max_deviation,
            self.n_samples
        )
    }
}

/// Compares sorted spectra of `J(x)` over seeded random unit vectors.
pub fn osserman_check<S: Scalar>(r: &CurvatureTensor<S>, n_samples: usize, seed: u64, tol: f64) -> Result<OssermanReport> {
    if n_samples < 2 {
        return Err(Error::DegenerateInput("osserman check needs at least two samples".into()));
    }
    let rf = r.to_f64();
    let m = rf.dim();
    let mut rng = linalg::rng(seed);
    let mut reference: Option<Vec<f64>> = None;
    let mut max_dev = 0.0f64;
    for _ in 0..n_samples {
        let x: Vector<f64> = linalg::random_unit_with(m, &mut rng);
        let spec = linalg::spectrum(&jacobi(&rf, &x)?, 1e-9)?;
        match &reference {
            None => reference = Some(spec),
            Some(re) => {
                let d = re.iter().zip(&spec).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                max_dev = max_dev.max(d);
            }
        }
    }
    Ok(OssermanReport {
        is_osserman: max_dev <= tol,
        reference_spectrum: reference.unwrap_or_default(),
        max_deviation: max_dev,
        n_samples,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleRecord {
    pub index: usize,
    pub x: Vec<f64>,
    pub rank: usize,
    pub spectrum: Vec<f64>,
    pub w_dim: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StructureReport {
    pub m: usize,
    pub samples: Vec<SampleRecord>,
    pub rank_histogram: BTreeMap<usize, usize>,
    pub tsankov: bool,
    /// Each sampled `J(x)` has exactly the eigenvalues 0 and one repeated
    /// nonzero value. Checked only for Tsankov tensors of sub-maximal rank.
    pub two_eigenvalues: Option<bool>,
    /// Spectra of `J(w)` match `J(x)` for sampled unit `w ∈ W(x)`. Same gating.
    pub similar_on_w: Option<bool>,
}

impl StructureReport {
    pub fn key_values(&self) -> String {
        let hist = self.rank_histogram.iter().map(|(r, n)| format!("{r}:{n}")).collect::<Vec<_>>().join(",");
        let opt = |b: Option<bool>| b.map_or("skipped".to_string(), |v| v.to_string());
        format!(
            "m={} n_samples={} tsankov={} rank_histogram={} two_eigenvalues={} similar_on_w={}",
            self.m,
            self.samples.len(),
            self.tsankov,
            hist,
            opt(self.two_eigenvalues),
            opt(self.similar_on_w)
        )
    }

    /// `sample,rank,w_dim,spectrum` with the spectrum `;`-separated.
    pub fn csv(&self) -> String {
        let mut s = String::from("sample,rank,w_dim,spectrum\n");
        for rec in &self.samples {
            let spec = format_spectrum(&rec.spectrum, ";");
            s.push_str(&format!("{},{},{},{}\n", rec.index, rec.rank, rec.w_dim, spec));
        }
        s
    }
}

fn distinct_values(spec: &[f64], tol: f64) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for &v in spec {
        if !out.iter().any(|u| (u - v).abs() <= tol) {
            out.push(v);
        }
    }
    out
}

/// Rank histogram, spectra and `W(x)` dimensions over sampled unit vectors,
/// with the two-eigenvalue and similarity checks for Tsankov tensors.
pub fn structure_report<S: Scalar>(r: &CurvatureTensor<S>, n_samples: usize, seed: u64) -> Result<StructureReport> {
    if n_samples == 0 {
        return Err(Error::DegenerateInput("structure report needs at least one sample".into()));
    }
    let m = r.dim();
    let mode = *r.mode();
    let rf = r.to_f64();
    let ftol = 1e-9 * rf.norm_f64().max(1.0);
    let mut rng = linalg::rng(seed);
    let mut samples = Vec::with_capacity(n_samples);
    let mut hist = BTreeMap::new();
    for index in 0..n_samples {
        let x: Vector<S> = linalg::random_unit_with(m, &mut rng);
        let j = jacobi(r, &x)?;
        let rank = linalg::rank_with_mode(&j, &mode);
        let spectrum = linalg::spectrum(&j, 1e-9)?;
        *hist.entry(rank).or_insert(0) += 1;
        samples.push(SampleRecord { index, x: x.iter().map(Scalar::to_f64).collect(), rank, spectrum, w_dim: rank + 1 });
    }
    let tsankov = if r.is_zero() { true } else { tsankov_test(r, TestMethod::Exact, 0, seed)?.holds };
    let max_rank = hist.keys().copied().max().unwrap_or(0);
    let (two, similar) = if tsankov && max_rank + 1 < m && max_rank > 0 {
        let two = samples.iter().all(|s| {
            let d = distinct_values(&s.spectrum, ftol);
            d.len() == 2 && d.iter().any(|v| v.abs() <= ftol)
        });
        let fmode = ScalarMode::float(1e-9)?;
        let mut similar = true;
        for s in &samples {
            let w_basis = crate::jacobi::w_space(&rf, &s.x, &fmode)?;
            let coef: Vector<f64> = linalg::random_unit_with(w_basis.len(), &mut rng);
            let mut w = vec![0.0; m];
            for (c, b) in coef.iter().zip(&w_basis) {
                w = linalg::axpy(&w, c, b);
            }
            let sw = linalg::spectrum(&jacobi(&rf, &w)?, 1e-9)?;
            let dev = sw.iter().zip(&s.spectrum).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            if dev > ftol * 10.0 {
                similar = false;
            }
        }
        (Some(two), Some(similar))
    } else {
        (None, None)
    };
    Ok(StructureReport { m, samples, rank_histogram: hist, tsankov, two_eigenvalues: two, similar_on_w: similar })
}

/// Searches for a unit `y ⊥ x` with `J(x)y = 0`, drawn from the complement of
/// `W(x)`; `None` when `J(x)` has rank `m - 1`.
pub fn kernel_partner<S: Scalar>(
    r: &CurvatureTensor<S>,
    x: &[S],
    mode: &ScalarMode,
    seed: u64,
) -> Result<Option<Vector<S>>> {
    let w = crate::jacobi::w_space(r, x, mode)?;
    if w.len() == r.dim() {
        return Ok(None);
    }
    linalg::random_unit_in_complement(&w, mode, seed).map(Some)
}

impl<S: Scalar> Classification<S> {
    pub fn is_tsankov(&self) -> bool {
        self.tag != Tag::NotTsankov
    }
}
