//! The `jtsankov` command line.
//!
//! Exit codes: 0 on success, 1 when a check fails or a computation errors
//! (the error name goes to stderr), 2 on usage errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::Value;

use crate::classify::{self, format_matrix, Tag};
use crate::error::{Error, Result};
use crate::format::{self, AnyTensor, RawComponents, Storage};
use crate::jacobi::jacobi;
use crate::linalg::{self, Matrix};
use crate::scalar::{Rational, Scalar, ScalarMode, DEFAULT_TOL};
use crate::tensor::{validate, ComplexStructure, CurvatureTensor, SymmetricForm};
use crate::tsankov::{tsankov_test, TestMethod, DEFAULT_SAMPLES};

/// Environment variable overriding the float tolerance.
pub const TOL_ENV: &str = "ACT_TOL";

#[derive(Parser, Debug)]
#[command(name = "jtsankov", version, about = "Algebraic curvature tensors and the Jacobi-Tsankov property")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a tensor file.
    Gen(GenArgs),
    /// Print the per-symmetry violation table; exit 0 iff accepted.
    Validate { file: PathBuf },
    /// Print J(x) and its spectrum.
    Jacobi {
        file: PathBuf,
        /// Comma-separated coordinates.
        #[arg(long, allow_hyphen_values = true)]
        x: String,
    },
    /// Decide the Jacobi-Tsankov property; exit 0 iff it holds.
    Tsankov {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Exact)]
        method: MethodArg,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Classify the tensor; exit 0 unless it is not Jacobi-Tsankov.
    Classify {
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Compare spectra of J(x) over random unit vectors.
    Osserman {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Structure diagnostics followed by a per-sample CSV.
    Report {
        file: PathBuf,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(clap::Args, Debug)]
struct GenArgs {
    #[arg(long = "type", value_enum)]
    kind: GenType,
    #[arg(long)]
    m: Option<usize>,
    /// Scale factor, decimal or p/q.
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    c: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Symmetric matrix for `gauss`, as a JSON array of rows.
    #[arg(long)]
    phi: Option<PathBuf>,
    /// Number of Gauss generators for `random`.
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// For `rtheta`: conjugate the standard structure by a signed permutation drawn from `--seed`.
    #[arg(long)]
    conjugate: bool,
    #[arg(long, value_enum, default_value_t = ScalarArg::Rational)]
    scalar: ScalarArg,
    #[arg(long, value_enum, default_value_t = StorageArg::Sparse)]
    storage: StorageArg,
    /// Output path; standard output when omitted.
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum GenType {
    R0,
    Rtheta,
    Gauss,
    Random,
    /// `c·(R₀ + R_Θ)` with the standard structure.
    Combo,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum MethodArg {
    Exact,
    Sampled,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ScalarArg {
    Rational,
    Float,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum StorageArg {
    Sparse,
    Dense,
}

impl From<StorageArg> for Storage {
    fn from(s: StorageArg) -> Self {
        match s {
            StorageArg::Sparse => Storage::Sparse,
            StorageArg::Dense => Storage::Dense,
        }
    }
}

/// Float tolerance from `ACT_TOL`, or the library default.
pub fn float_tolerance() -> Result<f64> {
    match std::env::var(TOL_ENV) {
        Ok(s) => match s.trim().parse::<f64>() {
            Ok(t) if t > 0.0 && t.is_finite() => Ok(t),
            _ => Err(Error::PreconditionFailed(format!("{TOL_ENV}={s:?} is not a positive number"))),
        },
        Err(_) => Ok(DEFAULT_TOL),
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {}: {}", e.name(), e);
            1
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<i32> {
    let tol = float_tolerance()?;
    match cmd {
        Command::Gen(args) => gen(&args, tol, out),
        Command::Validate { file } => validate_file(&file, tol, out),
        Command::Jacobi { file, x } => match format::load_tensor(&file, tol)? {
            AnyTensor::Rational(t) => print_jacobi(&t, &x, out),
            AnyTensor::Float(t) => print_jacobi(&t, &x, out),
        },
        Command::Tsankov { file, method, samples, seed } => {
            let method = if method == MethodArg::Exact { TestMethod::Exact } else { TestMethod::Sampled };
            let (line, holds) = match format::load_tensor(&file, tol)? {
                AnyTensor::Rational(t) => verdict_line(&t, method, samples, seed)?,
                AnyTensor::Float(t) => verdict_line(&t, method, samples, seed)?,
            };
            writeln!(out, "{line}")?;
            Ok(if holds { 0 } else { 1 })
        }
        Command::Classify { file, seed } => {
            let (line, tag) = match format::load_tensor(&file, tol)? {
                AnyTensor::Rational(t) => classify_line(&t, seed)?,
                AnyTensor::Float(t) => classify_line(&t, seed)?,
            };
            writeln!(out, "{line}")?;
            Ok(if tag == Tag::NotTsankov { 1 } else { 0 })
        }
        Command::Osserman { file, samples, seed } => {
            let rep = match format::load_tensor(&file, tol)? {
                AnyTensor::Rational(t) => classify::osserman_check(&t, samples, seed, tol)?,
                AnyTensor::Float(t) => classify::osserman_check(&t, samples, seed, tol)?,
            };
            writeln!(out, "{}", rep.key_values())?;
            Ok(0)
        }
        Command::Report { file, samples, seed } => {
            let rep = match format::load_tensor(&file, tol)? {
                AnyTensor::Rational(t) => classify::structure_report(&t, samples, seed)?,
                AnyTensor::Float(t) => classify::structure_report(&t, samples, seed)?,
            };
            writeln!(out, "{}", rep.key_values())?;
            write!(out, "{}", rep.csv())?;
            Ok(0)
        }
    }
}

fn gen(args: &GenArgs, tol: f64, out: &mut dyn Write) -> Result<i32> {
    let text = match args.scalar {
        ScalarArg::Rational => format::to_json(&generate::<Rational>(args, ScalarMode::exact())?, args.storage.into()),
        ScalarArg::Float => format::to_json(&generate::<f64>(args, ScalarMode::float(tol)?)?, args.storage.into()),
    };
    match &args.output {
        Some(path) => std::fs::write(path, text)?,
        None => write!(out, "{text}")?,
    }
    Ok(0)
}

fn generate<S: Scalar>(args: &GenArgs, mode: ScalarMode) -> Result<CurvatureTensor<S>> {
    let c = S::parse_str(&args.c).ok_or_else(|| Error::PreconditionFailed(format!("cannot parse --c {:?}", args.c)))?;
    let need_m = || args.m.ok_or_else(|| Error::PreconditionFailed("--m is required for this type".into()));
    let t = match args.kind {
        GenType::R0 => CurvatureTensor::r0(need_m()?, c)?,
        GenType::Rtheta => {
            let m = need_m()?;
            let mut theta = ComplexStructure::<S>::standard(m)?;
            if args.conjugate {
                theta = theta.conjugate(&linalg::random_signed_permutation(m, args.seed), &mode)?;
            }
            CurvatureTensor::r_theta(&theta, c)?
        }
        GenType::Combo => {
            let m = need_m()?;
            let r0 = CurvatureTensor::r0(m, S::one())?;
            let rt = CurvatureTensor::r_theta(&ComplexStructure::standard(m)?, S::one())?;
            CurvatureTensor::combine(&[(c.clone(), &r0), (c, &rt)])?
        }
        GenType::Gauss => {
            let phi = match &args.phi {
                Some(path) => read_matrix::<S>(path)?,
                None => linalg::random_symmetric_int::<S, _>(need_m()?, 2, &mut linalg::rng(args.seed)),
            };
            if let Some(m) = args.m {
                if m != phi.dim() {
                    return Err(Error::IncompatibleTensors(format!("--m {m} but phi is {}x{}", phi.dim(), phi.dim())));
                }
            }
            CurvatureTensor::from_form(&SymmetricForm::new(phi, &mode)?)?.scaled(&c)
        }
        GenType::Random => CurvatureTensor::random_act(need_m()?, args.k, args.seed)?.scaled(&c),
    };
    t.with_mode(mode)
}

fn read_matrix<S: Scalar>(path: &Path) -> Result<Matrix<S>> {
    let text = std::fs::read_to_string(path)?;
    let v: Value = serde_json::from_str(&text).map_err(|e| Error::FormatError { line: e.line(), msg: e.to_string() })?;
    let bad = || Error::FormatError { line: 0, msg: "phi must be an array of rows of numbers or strings".into() };
    let rows = v.as_array().ok_or_else(bad)?;
    let mut out = Vec::with_capacity(rows.len());
    for row in rows {
        let row = row.as_array().ok_or_else(bad)?;
        let parsed = row
            .iter()
            .map(|x| match x {
                Value::String(s) => S::parse_str(s),
                Value::Number(n) => S::parse_str(&n.to_string()),
                _ => None,
            })
            .collect::<Option<Vec<S>>>()
            .ok_or_else(bad)?;
        out.push(parsed);
    }
    let m = Matrix::from_rows(out)?;
    if m.rows() != m.cols() {
        return Err(Error::InvalidDimension(m.rows()));
    }
    Ok(m)
}

fn validate_file(path: &Path, tol: f64, out: &mut dyn Write) -> Result<i32> {
    let text = std::fs::read_to_string(path)?;
    let accepted = match format::components_from_json(&text, tol)? {
        RawComponents::Rational(c) => print_validation(&c, &ScalarMode::exact(), out)?,
        RawComponents::Float(c) => print_validation(&c, &ScalarMode::float(tol)?, out)?,
    };
    Ok(if accepted { 0 } else { 1 })
}

fn print_validation<S: Scalar>(c: &[S], mode: &ScalarMode, out: &mut dyn Write) -> Result<bool> {
    let rep = validate(c, mode)?;
    writeln!(out, "{:<14} {:>24}  at", "symmetry", "max_violation")?;
    for (name, v) in rep.rows() {
        writeln!(out, "{:<14} {:>24}  {:?}", name, v.max.to_text(), v.at)?;
    }
    writeln!(out, "accepted={}", rep.accepted)?;
    Ok(rep.accepted)
}

fn print_jacobi<S: Scalar>(t: &CurvatureTensor<S>, x: &str, out: &mut dyn Write) -> Result<i32> {
    let x = x
        .split(',')
        .map(|s| S::parse_str(s).ok_or_else(|| Error::PreconditionFailed(format!("cannot parse coordinate {s:?}"))))
        .collect::<Result<Vec<S>>>()?;
    let j = jacobi(t, &x)?;
    let spec = linalg::spectrum(&j, t.mode().tol)?;
    writeln!(out, "jacobi={}", format_matrix(&j))?;
    writeln!(out, "spectrum={}", classify::format_spectrum(&spec, ","))?;
    writeln!(out, "rank={}", linalg::rank_with_mode(&j, t.mode()))?;
    Ok(0)
}

fn verdict_line<S: Scalar>(t: &CurvatureTensor<S>, method: TestMethod, samples: usize, seed: u64) -> Result<(String, bool)> {
    let v = tsankov_test(t, method, samples, seed)?;
    Ok((v.one_line(), v.holds))
}

fn classify_line<S: Scalar>(t: &CurvatureTensor<S>, seed: u64) -> Result<(String, Tag)> {
    let c = classify::classify(t, t.mode(), seed)?;
    Ok((c.key_values(), c.tag))
}
