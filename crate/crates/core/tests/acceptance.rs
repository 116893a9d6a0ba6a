//! Acceptance suite. Run with `cargo test --test acceptance`; prints one
//! PASS/FAIL line per criterion and exits nonzero if any criterion fails.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use common::*;
use jacobi_tsankov::classify::{classify, kernel_partner, osserman_check, Tag};
use jacobi_tsankov::format::{self, AnyTensor, Storage};
use jacobi_tsankov::jacobi::{block_structure, jacobi, jacobi_polarized};
use jacobi_tsankov::linalg::{self, Matrix};
use jacobi_tsankov::tensor::{ComplexStructure, CurvatureTensor};
use jacobi_tsankov::tsankov::{
    commutator, commutator_poly, divisible_by_pairing, full_commutation_test, normalized_commutator_norm,
    tsankov_test, TestMethod,
};
use jacobi_tsankov::{Scalar, ScalarMode};
use num_traits::Zero;
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn exact() -> ScalarMode {
    ScalarMode::exact()
}

/// c·R₀ and c·R_Θ satisfy the Tsankov property; the sampled decider agrees.
fn criterion_1() -> Outcome {
    let mut rng = linalg::rng(1);
    let mut count = 0;
    for k in 0..50u64 {
        let c = random_c(&mut rng);
        let m = 3 + (k % 4) as usize;
        let r0 = CurvatureTensor::r0(m, c.clone()).unwrap();
        let mt = [4, 6, 8][(k % 3) as usize];
        let rt = r_theta_q(mt, c, 100 + k);
        for r in [&r0, &rt] {
            let v = tsankov_test(r, TestMethod::Exact, 0, k).map_err(|e| e.to_string())?;
            ensure!(v.holds && v.witness.is_none(), "exact test failed for m={} instance {k}", r.dim());
            let poly = commutator_poly(r);
            let quotient = divisible_by_pairing(&poly).ok_or("no exact quotient")?;
            ensure!(quotient.multiply_by_pairing() == poly, "quotient does not re-multiply, instance {k}");
            let s = tsankov_test(&r.to_f64(), TestMethod::Sampled, 200, k).map_err(|e| e.to_string())?;
            ensure!(s.holds, "sampled test disagrees for m={} instance {k}", r.dim());
            count += 1;
        }
    }
    Ok(format!("{count} tensors, exact and 200-pair sampled verdicts agree"))
}

/// No nonzero tensor has globally commuting Jacobi operators.
fn criterion_2() -> Outcome {
    for k in 0..500u64 {
        let m = 3 + (k % 4) as usize;
        let r = nonzero_act(m, k);
        let v = full_commutation_test(&r).map_err(|e| e.to_string())?;
        ensure!(!v.holds, "full commutation reported for nonzero tensor {k}");
        let w = v.witness.ok_or("missing witness")?;
        let n = normalized_commutator_norm(&r, &w.x, &w.y).map_err(|e| e.to_string())?;
        ensure!(n == w.commutator_norm && n > Q::zero(), "witness {k} does not verify");
        ensure!(!commutator(&r, &w.x, &w.y).unwrap().max_abs().is_zero(), "zero commutator at witness {k}");
    }
    for m in 3..=6 {
        ensure!(full_commutation_test(&CurvatureTensor::<Q>::zero(m).unwrap()).unwrap().holds, "zero tensor m={m}");
    }
    Ok("500 nonzero tensors refuted with verified witnesses; zero tensor accepted".into())
}

fn check_theta<S: Scalar>(theta: &ComplexStructure<S>, bound: f64) -> Result<(), String> {
    let t = theta.matrix();
    let m = t.rows();
    let sq = t.matmul(t).add(&Matrix::identity(m));
    ensure!(sq.is_zero_within(bound), "recovered Θ² ≠ -I");
    ensure!(t.add(&t.transpose()).is_zero_within(bound), "recovered Θ not skew");
    Ok(())
}

/// Classification roundtrip in exact and float arithmetic.
fn criterion_3() -> Outcome {
    let mut rng = linalg::rng(3);
    let mut worst_float = 0.0f64;
    for k in 0..50u64 {
        let c = random_c(&mut rng);
        let m = 3 + (k % 4) as usize;
        let r = CurvatureTensor::r0(m, c.clone()).unwrap();
        let cl = classify(&r, &exact(), k).map_err(|e| e.to_string())?;
        ensure!(cl.tag == Tag::ConstantCurvature && cl.c.as_ref() == Some(&c), "R₀ instance {k}: {}", cl.key_values());
        ensure!(cl.residual == Some(Q::zero()), "R₀ residual {k}");

        let mt = [4, 6, 8][(k % 3) as usize];
        let r = r_theta_q(mt, c.clone(), 300 + k);
        let cl = classify(&r, &exact(), k).map_err(|e| e.to_string())?;
        ensure!(cl.tag == Tag::ComplexForm && cl.c.as_ref() == Some(&c), "R_Θ instance {k}: {}", cl.key_values());
        let theta = cl.theta.ok_or("missing Θ")?;
        check_theta(&theta, 0.0)?;
        let rebuilt = CurvatureTensor::r_theta(&theta, c.clone()).unwrap();
        ensure!(rebuilt == r, "R_Θ reconstruction differs at {k}");

        // float: rotate Θ by a generic orthogonal matrix
        let cf = c.to_f64();
        let theta_f = ComplexStructure::<f64>::standard(mt)
            .unwrap()
            .conjugate(&random_rotation(mt, k), &ScalarMode::float(1e-10).unwrap())
            .map_err(|e| e.to_string())?;
        let rf = CurvatureTensor::r_theta(&theta_f, cf).unwrap().with_mode(ScalarMode::float(1e-10).unwrap()).unwrap();
        let fmode = *rf.mode();
        let cl = classify(&rf, &fmode, k).map_err(|e| e.to_string())?;
        ensure!(cl.tag == Tag::ComplexForm, "float R_Θ instance {k}: {}", cl.key_values());
        let res = cl.residual.unwrap();
        ensure!(res <= 1e-10, "float residual {res:e} at {k}");
        ensure!((cl.c.unwrap() - cf).abs() <= 1e-10 * cf.abs(), "float c at {k}");
        check_theta(&cl.theta.unwrap(), 1e-9)?;
        worst_float = worst_float.max(res);

        let rf0 = CurvatureTensor::r0(m, cf).unwrap().transform(&random_rotation(m, k)).unwrap();
        let rf0 = rf0.with_mode(fmode).unwrap();
        let cl = classify(&rf0, &fmode, k).map_err(|e| e.to_string())?;
        ensure!(cl.tag == Tag::ConstantCurvature, "float R₀ instance {k}: {}", cl.key_values());
        worst_float = worst_float.max(cl.residual.unwrap());
        ensure!(cl.residual.unwrap() <= 1e-10, "float R₀ residual at {k}");
    }
    Ok(format!("50+50 exact instances recovered exactly; worst float residual {worst_float:.1e}"))
}

/// R₀ + R_Θ is rejected; the shipped witness gives commutator entries ±3/2.
fn criterion_4() -> Outcome {
    let r0 = CurvatureTensor::<Q>::r0(4, q(1, 1)).unwrap();
    let rt = CurvatureTensor::r_theta(&ComplexStructure::standard(4).unwrap(), q(1, 1)).unwrap();
    let r = CurvatureTensor::combine(&[(q(1, 1), &r0), (q(1, 1), &rt)]).unwrap();
    let cl = classify(&r, &exact(), 0).map_err(|e| e.to_string())?;
    ensure!(cl.tag == Tag::NotTsankov, "mixed tensor classified {}", cl.tag);
    let w = cl.witness.ok_or("missing witness")?;
    ensure!(linalg::dot(&w.x, &w.y).is_zero(), "witness not orthogonal");
    // y = (e2+e3)/√2: use the unnormalized direction and divide by |y|² = 2.
    let x = linalg::basis_vector::<Q>(4, 0);
    let y = vec![q(0, 1), q(1, 1), q(1, 1), q(0, 1)];
    let c = commutator(&r, &x, &y).unwrap().scale(&q(1, 2));
    let three_halves = q(3, 2);
    ensure!(c.max_abs() == three_halves, "max entry {}", c.max_abs().to_text());
    let big: Vec<(usize, usize)> =
        (0..4).flat_map(|i| (0..4).map(move |j| (i, j))).filter(|&(i, j)| c[(i, j)].abs() == three_halves).collect();
    ensure!(!big.is_empty(), "no entry of magnitude 3/2");
    let s = 0.5f64.sqrt();
    let cf = commutator(&r.to_f64(), &[1.0, 0.0, 0.0, 0.0], &[0.0, s, s, 0.0]).unwrap();
    for &(i, j) in &big {
        ensure!((cf[(i, j)].abs() - 1.5).abs() < 1e-12, "float entry ({i},{j}) = {}", cf[(i, j)]);
    }
    Ok(format!("NotTsankov; entries {big:?} have magnitude exactly 3/2; reported comm_norm={}", w.commutator_norm.to_text()))
}

/// Structure identities for c·R_Θ at random x and y ∈ ker J(x) ∩ x^⊥.
fn criterion_5() -> Outcome {
    let mut rng = linalg::rng(5);
    for k in 0..50u64 {
        let m = [4, 6, 8][(k % 3) as usize];
        let r = r_theta_q(m, random_c(&mut rng), 500 + k);
        let x: Vec<Q> = linalg::random_unit_vector(m, k).map_err(|e| e.to_string())?;
        let y = kernel_partner(&r, &x, &exact(), k).map_err(|e| e.to_string())?.ok_or("no kernel partner")?;
        ensure!(linalg::dot(&x, &y).is_zero() && linalg::norm_sq(&y) == q(1, 1), "bad partner at {k}");
        let jx = jacobi(&r, &x).unwrap();
        let jy = jacobi(&r, &y).unwrap();
        let jxy = jacobi_polarized(&r, &x, &y).unwrap();
        ensure!(jx.matvec(&y).iter().all(Zero::is_zero), "J(x)y ≠ 0 at {k}");
        ensure!(jy.matvec(&x).iter().all(Zero::is_zero), "J(y)x ≠ 0 at {k}");
        ensure!(jx.matmul(&jy).is_zero_within(0.0), "J(x)J(y) ≠ 0 at {k}");
        let quad = jy.matmul(&jy).add(&jx.matmul(&jx)).sub(&jxy.matmul(&jxy).scale(&q(4, 1)));
        ensure!(quad.is_zero_within(0.0), "quadratic identity fails at {k}");
        let rep = block_structure(&r, &x, &y, &exact()).map_err(|e| e.to_string())?;
        rep.ensure_clean(0.0).map_err(|e| format!("block frame at {k}: {e}"))?;
    }
    Ok("50 pairs: all identities and block-frame residuals exactly 0".into())
}

/// Rank-one Tsankov tensors are Osserman with spectrum {0^(m-1), 3c}.
fn criterion_6() -> Outcome {
    let mut rng = linalg::rng(6);
    let mut worst = 0.0f64;
    for k in 0..12u64 {
        let m = [4, 6, 8][(k % 3) as usize];
        let c = random_c(&mut rng);
        let r = r_theta_q(m, c.clone(), 600 + k);
        let rep = osserman_check(&r, 200, k, 1e-10).map_err(|e| e.to_string())?;
        ensure!(rep.is_osserman, "not Osserman at {k}: deviation {:e}", rep.max_deviation);
        let mut expected = vec![0.0; m - 1];
        expected.push(3.0 * c.to_f64());
        expected.sort_by(f64::total_cmp);
        let dev = expected.iter().zip(&rep.reference_spectrum).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        ensure!(dev <= 1e-10, "reference spectrum off by {dev:e} at {k}");
        worst = worst.max(rep.max_deviation).max(dev);
    }
    Ok(format!("12 tensors x 200 samples; max deviation {worst:.1e}"))
}

/// Gauss tensors: φ = λI gives c = λ², generic diagonal φ is not Tsankov.
fn criterion_7() -> Outcome {
    let mut rng = linalg::rng(7);
    for m in 3..=5 {
        let lambda = random_c(&mut rng);
        let r = gauss_diag(&vec![lambda.clone(); m]);
        let cl = classify(&r, &exact(), 0).map_err(|e| e.to_string())?;
        ensure!(
            cl.tag == Tag::ConstantCurvature && cl.c == Some(lambda.clone() * lambda.clone()),
            "λI, m={m}: {}",
            cl.key_values()
        );
    }
    let mut done = 0;
    while done < 30 {
        let m = 3 + done % 3;
        let d: Vec<Q> = (0..m).map(|_| q(rng.random_range(-3i64..=3), 1)).collect();
        let nonzero = d.iter().filter(|v| !v.is_zero()).count();
        let mut abs: Vec<Q> = d.iter().map(Scalar::abs).collect();
        abs.sort();
        abs.dedup();
        if nonzero < 2 || abs.len() < 2 {
            continue;
        }
        let cl = classify(&gauss_diag(&d), &exact(), done as u64).map_err(|e| e.to_string())?;
        ensure!(cl.tag == Tag::NotTsankov, "diag {:?}: {}", linalg::format_vector(&d), cl.key_values());
        done += 1;
    }
    Ok("λI -> ConstantCurvature(λ²) for m=3..5; 30 generic diagonal φ -> NotTsankov".into())
}


/// Exact and sampled deciders agree on a mixed corpus.
fn criterion_8() -> Outcome {
    let mut rng = linalg::rng(8);
    let mut tsankov = 0;
    for k in 0..200u64 {
        let m = 3 + (k % 4) as usize;
        let c = random_c(&mut rng);
        let r = match k % 5 {
            0 => CurvatureTensor::r0(m, c).unwrap(),
            1 => r_theta_q(if m.is_multiple_of(2) { m } else { m + 1 }, c, k),
            2 => nonzero_act(m, 800 + k),
            3 => {
                let me = if m.is_multiple_of(2) { m } else { m + 1 };
                let a = CurvatureTensor::r0(me, q(1, 1)).unwrap();
                let b = r_theta_q(me, q(1, 1), k);
                CurvatureTensor::combine(&[(c, &a), (q(1, 1), &b)]).unwrap()
            }
            _ => {
                let d: Vec<Q> = (0..m).map(|_| q(rng.random_range(-3i64..=3), 1)).collect();
                gauss_diag(&d)
            }
        };
        let e = tsankov_test(&r, TestMethod::Exact, 0, k).map_err(|e| e.to_string())?;
        let s = tsankov_test(&r, TestMethod::Sampled, 200, k).map_err(|e| e.to_string())?;
        ensure!(e.holds == s.holds, "verdicts disagree on tensor {k} (exact {}, sampled {})", e.holds, s.holds);
        let poly = commutator_poly(&r);
        match divisible_by_pairing(&poly) {
            Some(quot) => {
                ensure!(e.holds, "quotient produced for non-Tsankov tensor {k}");
                ensure!(quot.multiply_by_pairing() == poly, "quotient of {k} does not re-multiply");
                tsankov += 1;
            }
            None => ensure!(!e.holds, "no quotient for Tsankov tensor {k}"),
        }
    }
    Ok(format!("200 tensors ({tsankov} Tsankov); verdicts agree, quotients re-multiply exactly"))
}

/// Lossless rational file roundtrip and the worked CLI examples.
fn criterion_9() -> Outcome {
    let mut rng = linalg::rng(9);
    for k in 0..20u64 {
        let m = 3 + (k % 4) as usize;
        let r = CurvatureTensor::combine(&[
            (random_c(&mut rng), &nonzero_act(m, 900 + k)),
            (random_c(&mut rng), &CurvatureTensor::r0(m, q(1, 1)).unwrap()),
        ])
        .unwrap();
        for storage in [Storage::Sparse, Storage::Dense] {
            match format::from_json(&format::to_json(&r, storage), 1e-9).map_err(|e| e.to_string())? {
                AnyTensor::Rational(back) => ensure!(back == r, "roundtrip differs ({storage}, {k})"),
                AnyTensor::Float(_) => return Err("rational file reloaded as float".into()),
            }
        }
    }

    let bin = env!("CARGO_BIN_EXE_jtsankov");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    let run = |args: &[&str]| {
        let out = Command::new(bin).args(args).env_remove("ACT_TOL").output().expect("run jtsankov");
        (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).trim().to_string())
    };
    let (a, b, c) = (path("a.json"), path("b.json"), path("c.json"));
    ensure!(run(&["gen", "--type", "r0", "--m", "4", "--c", "5", "-o", &a]).0 == 0, "gen r0");
    let (code, out) = run(&["classify", &a]);
    ensure!(code == 0 && out == "tag=ConstantCurvature c=5 residual=0", "classify r0: {code} {out}");
    ensure!(run(&["gen", "--type", "rtheta", "--m", "4", "--c", "2", "-o", &b]).0 == 0, "gen rtheta");
    let (code, out) = run(&["tsankov", &b, "--method", "exact"]);
    ensure!(code == 0 && out == "holds=true method=ExactDivisibility", "tsankov rtheta: {code} {out}");
    ensure!(run(&["gen", "--type", "combo", "--m", "4", "-o", &c]).0 == 0, "gen combo");
    let (code, out) = run(&["classify", &c]);
    ensure!(code == 1 && out.starts_with("tag=NotTsankov witness_x="), "classify combo: {code} {out}");
    let norm = out.rsplit("comm_norm=").next().and_then(jacobi_tsankov::scalar::parse_rational).ok_or("no comm_norm")?;
    ensure!(norm >= q(3, 2), "comm_norm {} < 3/2", norm.to_text());
    ensure!(run(&["classify", &c, "--no-such-flag"]).0 == 2, "usage error exit code");
    Ok("rational roundtrip lossless (40 files); CLI examples exit 0/0/1, usage error exits 2".into())
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("1 Tsankov property of c·R₀ and c·R_Θ", criterion_1),
        ("2 full commutation forces R = 0", criterion_2),
        ("3 classification roundtrip", criterion_3),
        ("4 mixed-tensor rejection", criterion_4),
        ("5 kernel-pair structure identities", criterion_5),
        ("6 Osserman spectrum of rank-one tensors", criterion_6),
        ("7 Gauss-tensor desk check", criterion_7),
        ("8 decider cross-validation", criterion_8),
        ("9 CLI contract and file roundtrip", criterion_9),
    ];
    let start = Instant::now();
    let mut failures = 0;
    for (name, f) in criteria {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {name} ({secs:.2}s): {detail}"),
            Err(detail) => {
                failures += 1;
                println!("FAIL criterion {name} ({secs:.2}s): {detail}");
            }
        }
    }
    let total = start.elapsed();
    println!("acceptance: {} of 9 criteria passed in {:.2}s", 9 - failures, total.as_secs_f64());
    if total > Duration::from_secs(120) {
        println!("note: total runtime exceeded the 2 minute target");
    }
    if failures > 0 {
        std::process::exit(1);
    }
}
