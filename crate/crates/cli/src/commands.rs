//! The five subcommands. Each returns a `RunReport` whose `pass` flag maps
//! to exit code 0 or 2; unrecoverable input problems map to exit code 1.

use std::path::Path;

use num_complex::Complex64;
use serde_json::{json, Value};
use specband_core::corpus::{self, ALL_REGIMES};
use specband_core::direct;
use specband_core::inverse::{self, Reconstruction, SpectralData};
use specband_core::matrix::{PeriodicMatrixGeneral, PeriodicMatrixHat};
use specband_core::{Error, DEFAULT_ROOT_TOL, DEFAULT_TOL_BASE, DEFAULT_VERIFY_TOL};

use crate::io::{self, InstanceFile};
use crate::report::{complex_value, complex_vec, condition_rows_value, CheckRow, RunReport};

pub struct CmdError {
    pub exit: i32,
    pub message: String,
}

fn input_error(message: impl Into<String>) -> CmdError {
    CmdError {
        exit: 1,
        message: message.into(),
    }
}

/// Structural problems are input errors; numerical or feasibility problems
/// are run failures.
fn core_error(e: Error) -> CmdError {
    let exit = match e {
        Error::InvalidMatrix(_) | Error::InvalidData(_) | Error::InvalidMeasure(_) => 1,
        _ => 2,
    };
    CmdError {
        exit,
        message: e.to_string(),
    }
}

fn read_file(path: &Path) -> Result<String, CmdError> {
    std::fs::read_to_string(path)
        .map_err(|e| input_error(format!("cannot read {}: {e}", path.display())))
}

fn parse_file(path: &Path) -> Result<(String, InstanceFile), CmdError> {
    let text = read_file(path)?;
    let inst = io::parse_instance(&text).map_err(input_error)?;
    Ok((text, inst))
}

fn resolve_tol(flag: Option<f64>, file: Option<f64>) -> f64 {
    flag.or(file).unwrap_or(DEFAULT_TOL_BASE)
}

fn hat_value(m: &PeriodicMatrixHat) -> Value {
    json!({
        "a_n": complex_value(m.a_n()),
        "b": m.b(),
        "b_n": complex_value(m.b_n()),
        "c": m.c(),
    })
}

fn one_based(indices: &[usize]) -> Vec<usize> {
    indices.iter().map(|&k| k + 1).collect()
}

pub fn cmd_direct(path: &Path, tol_flag: Option<f64>) -> Result<RunReport, CmdError> {
    let (text, inst) = parse_file(path)?;
    let m = io::instance_matrix(&inst).map_err(input_error)?;
    let tol = resolve_tol(tol_flag, inst.tol);
    let rep = direct::full_spectrum_with(&m, tol, DEFAULT_ROOT_TOL).map_err(core_error)?;

    let outputs = json!({
        "alpha": rep.alpha,
        "beta": complex_value(rep.beta.value),
        "beta_real": rep.beta.is_real,
        "char_at_mu": complex_vec(&rep.char_at_mu),
        "char_poly": complex_vec(rep.char_poly.coeffs()),
        "condition_rows": condition_rows_value(&rep.condition_rows),
        "corner": complex_value(rep.corner),
        "lambda": complex_vec(&rep.lambda),
        "mu": rep.mu,
        "regime": rep.regime.name(),
        "residue_zero_nodes": one_based(&rep.residue_zero_set),
        "tau": rep.tau,
    });
    let checks: Vec<CheckRow> = rep.checks.iter().map(CheckRow::from).collect();
    let pass = rep.all_pass();
    Ok(RunReport {
        command: "direct",
        input_digest: io::digest(text.as_bytes()),
        outputs,
        checks,
        pass,
    })
}

fn feasibility_value(feas: &inverse::FeasibilityReport) -> Value {
    json!({
        "branch_count": u64::try_from(feas.branch_count).unwrap_or(u64::MAX),
        "char_at_mu": complex_vec(&feas.char_at_mu),
        "corner": complex_value(feas.corner),
        "degenerate_nodes": one_based(&feas.degenerate),
        "pass": feas.pass,
        "regime": feas.regime.name(),
        "rows": condition_rows_value(&feas.rows),
        "tau": feas.tau,
    })
}

fn feasibility_checks(feas: &inverse::FeasibilityReport) -> Vec<CheckRow> {
    let mut checks = Vec::new();
    checks.push(CheckRow::new(
        "char-real-at-nodes",
        feas.char_real_ok,
        format!(
            "max |Im chi(mu_k)| = {:.3e}, threshold {:.3e}",
            feas.char_at_mu
                .iter()
                .map(|z| z.im.abs())
                .fold(0.0, f64::max),
            feas.tau
        ),
    ));
    let worst_sign = feas
        .rows
        .iter()
        .map(|r| r.sign_margin)
        .fold(f64::INFINITY, f64::min);
    let worst_window = feas
        .rows
        .iter()
        .map(|r| r.window_margin)
        .fold(f64::INFINITY, f64::min);
    checks.push(CheckRow::new(
        "sign-condition",
        feas.rows.iter().all(|r| r.sign_margin >= -feas.tau),
        format!("min sign margin {worst_sign:.3e}"),
    ));
    checks.push(CheckRow::new(
        "window-condition",
        feas.rows.iter().all(|r| r.window_margin >= -feas.tau),
        format!("min window margin {worst_window:.3e}"),
    ));
    checks.extend(feas.location_checks.iter().map(CheckRow::from));
    checks
}

fn branch_value(sol: &Reconstruction, verification: &Value) -> Value {
    json!({
        "matrix": hat_value(&sol.matrix),
        "selector": sol.selector,
        "verification": verification,
        "weights": sol.weights,
        "x_values": sol.x_values,
    })
}

pub fn cmd_inverse(
    path: &Path,
    tol_flag: Option<f64>,
    branch: Option<u64>,
) -> Result<RunReport, CmdError> {
    let (text, inst) = parse_file(path)?;
    let data = io::instance_data(&inst).map_err(input_error)?;
    let tol = resolve_tol(tol_flag, inst.tol);

    let feas = inverse::feasibility_check(&data, tol);
    let mut checks = feasibility_checks(&feas);

    if !feas.pass {
        let outputs = json!({
            "branches": [],
            "feasibility": feasibility_value(&feas),
        });
        return Ok(RunReport {
            command: "inverse",
            input_digest: io::digest(text.as_bytes()),
            outputs,
            checks,
            pass: false,
        });
    }

    let pairs = inverse::branch_candidates_with(&data, &feas).map_err(core_error)?;
    let sols: Vec<Reconstruction> = match branch {
        Some(idx) => {
            let selector =
                inverse::selector_for_index(&pairs, u128::from(idx)).map_err(core_error)?;
            vec![
                inverse::reconstruct_from_candidates(&data, &pairs, &selector)
                    .map_err(core_error)?,
            ]
        }
        None => inverse::enumerate_solutions(&data, tol).map_err(core_error)?,
    };

    let mut branches = Vec::with_capacity(sols.len());
    let mut worst_residual = 0.0f64;
    let mut all_verified = true;
    for sol in &sols {
        let verification =
            match inverse::verify_reconstruction(&sol.matrix, &data, DEFAULT_VERIFY_TOL) {
                Ok(v) => {
                    worst_residual = worst_residual.max(v.worst);
                    json!({
                        "beta_residual": v.beta_residual,
                        "lambda_distance": v.lambda_distance,
                        "mu_distance": v.mu_distance,
                        "pass": true,
                    })
                }
                Err(Error::VerificationFailed { residual, detail }) => {
                    worst_residual = worst_residual.max(residual);
                    all_verified = false;
                    json!({ "detail": detail, "pass": false, "residual": residual })
                }
                Err(e) => return Err(core_error(e)),
            };
        branches.push(branch_value(sol, &verification));
    }
    checks.push(CheckRow::new(
        "branches-verified",
        all_verified,
        format!(
            "{} branch(es), worst spectral distance {worst_residual:.3e}",
            sols.len()
        ),
    ));

    let pass = all_verified;
    let outputs = json!({
        "branches": branches,
        "feasibility": feasibility_value(&feas),
    });
    Ok(RunReport {
        command: "inverse",
        input_digest: io::digest(text.as_bytes()),
        outputs,
        checks,
        pass,
    })
}

pub fn cmd_verify(
    matrix_path: &Path,
    data_path: &Path,
    tol_flag: Option<f64>,
) -> Result<RunReport, CmdError> {
    let (matrix_text, matrix_inst) = parse_file(matrix_path)?;
    let (data_text, data_inst) = parse_file(data_path)?;
    let m = io::instance_matrix(&matrix_inst).map_err(input_error)?;
    let data = io::instance_data(&data_inst).map_err(input_error)?;
    let _ = tol_flag; // verification distance is fixed; tau only affects feasibility

    let digest = io::digest(format!("{matrix_text}\n--\n{data_text}").as_bytes());
    let hat = m.canonicalize();
    let (pass, outputs, detail) =
        match inverse::verify_reconstruction(&hat, &data, DEFAULT_VERIFY_TOL) {
            Ok(v) => (
                true,
                json!({
                    "beta_residual": v.beta_residual,
                    "lambda_distance": v.lambda_distance,
                    "mu_distance": v.mu_distance,
                    "worst": v.worst,
                }),
                format!("worst spectral distance {:.3e}", v.worst),
            ),
            Err(Error::VerificationFailed { residual, detail }) => {
                (false, json!({ "worst": residual }), detail)
            }
            Err(e) => return Err(core_error(e)),
        };

    Ok(RunReport {
        command: "verify",
        input_digest: digest,
        outputs,
        checks: vec![CheckRow::new("spectra-match", pass, detail)],
        pass,
    })
}

struct TripSummary {
    name: String,
    n: usize,
    regime: &'static str,
    branch_count: usize,
    matrix_residual: f64,
    verify_residual: f64,
    matched: bool,
    verified: bool,
}

fn round_trip_one(
    name: String,
    m: &PeriodicMatrixGeneral,
    tol: f64,
) -> Result<TripSummary, CmdError> {
    let rep = direct::full_spectrum_with(m, tol, DEFAULT_ROOT_TOL).map_err(core_error)?;
    let data = SpectralData::from_direct(&rep).map_err(core_error)?;
    let sols = inverse::enumerate_solutions(&data, tol).map_err(core_error)?;
    let hat = m.canonicalize();

    let mut matrix_residual = f64::INFINITY;
    let mut verify_residual = 0.0f64;
    let mut verified = true;
    for sol in &sols {
        matrix_residual = matrix_residual.min(hat.entry_distance(&sol.matrix));
        match inverse::verify_reconstruction(&sol.matrix, &data, DEFAULT_VERIFY_TOL) {
            Ok(v) => verify_residual = verify_residual.max(v.worst),
            Err(Error::VerificationFailed { residual, .. }) => {
                verify_residual = verify_residual.max(residual);
                verified = false;
            }
            Err(e) => return Err(core_error(e)),
        }
    }

    Ok(TripSummary {
        name,
        n: m.n(),
        regime: rep.regime.name(),
        branch_count: sols.len(),
        matrix_residual,
        verify_residual,
        matched: matrix_residual <= DEFAULT_VERIFY_TOL,
        verified,
    })
}

pub fn cmd_roundtrip(
    file: Option<&Path>,
    random: usize,
    seed: u64,
    tol_flag: Option<f64>,
) -> Result<RunReport, CmdError> {
    let (digest, items): (String, Vec<(String, PeriodicMatrixGeneral)>) = match file {
        Some(path) => {
            let (text, inst) = parse_file(path)?;
            let m = io::instance_matrix(&inst).map_err(input_error)?;
            let name = path
                .file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "instance".into());
            (io::digest(text.as_bytes()), vec![(name, m)])
        }
        None => {
            if random == 0 {
                return Err(input_error("--random must be at least 1"));
            }
            let digest = io::digest(format!("random:{random}:{seed}").as_bytes());
            let items = (0..random)
                .map(|i| {
                    let regime = ALL_REGIMES[i % ALL_REGIMES.len()];
                    let n = 3 + (i / ALL_REGIMES.len()) % 6;
                    let item_seed = seed.wrapping_add(i as u64);
                    (
                        format!("seed-{item_seed}"),
                        corpus::random_hat(n, regime, item_seed).embed(),
                    )
                })
                .collect();
            (digest, items)
        }
    };

    let tol = tol_flag.unwrap_or(DEFAULT_TOL_BASE);
    let mut rows = Vec::with_capacity(items.len());
    let mut max_matrix = 0.0f64;
    let mut max_verify = 0.0f64;
    let mut all_matched = true;
    let mut all_verified = true;
    for (name, m) in &items {
        let trip = round_trip_one(name.clone(), m, tol)?;
        max_matrix = max_matrix.max(trip.matrix_residual);
        max_verify = max_verify.max(trip.verify_residual);
        all_matched &= trip.matched;
        all_verified &= trip.verified;
        rows.push(json!({
            "branch_count": trip.branch_count,
            "matched": trip.matched,
            "matrix_residual": trip.matrix_residual,
            "n": trip.n,
            "name": trip.name,
            "regime": trip.regime,
            "verify_residual": trip.verify_residual,
        }));
    }

    let checks = vec![
        CheckRow::new(
            "all-matched",
            all_matched,
            format!("max matrix residual {max_matrix:.3e}"),
        ),
        CheckRow::new(
            "all-verified",
            all_verified,
            format!("max spectral residual {max_verify:.3e}"),
        ),
    ];
    let outputs = json!({
        "count": items.len(),
        "items": rows,
        "max_matrix_residual": max_matrix,
        "max_verify_residual": max_verify,
    });
    Ok(RunReport {
        command: "roundtrip",
        input_digest: digest,
        outputs,
        checks,
        pass: all_matched && all_verified,
    })
}

pub fn cmd_selftest() -> Result<RunReport, CmdError> {
    let mut checks = Vec::new();
    let c = Complex64::new;

    // Worked direct instance: zero diagonal, couplings {1, 1, i}.
    {
        let m = PeriodicMatrixGeneral::new(
            vec![0.0, 0.0],
            vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)],
            c(0.0, 0.0),
        )
        .map_err(core_error)?;
        let rep = direct::full_spectrum(&m).map_err(core_error)?;
        let s3 = 3.0f64.sqrt();
        let spectrum_ok = rep
            .lambda
            .iter()
            .zip(&[-s3, 0.0, s3])
            .all(|(z, &want)| (z - c(want, 0.0)).norm() <= 1e-9);
        checks.push(CheckRow::new(
            "direct-worked-instance",
            spectrum_ok && rep.all_pass(),
            format!(
                "spectrum {}, checks {}",
                if spectrum_ok { "exact" } else { "off" },
                if rep.all_pass() { "pass" } else { "fail" }
            ),
        ));
    }

    // Golden inverse data: unique solution with unit couplings.
    {
        let s3 = 3.0f64.sqrt();
        let data = SpectralData::new(
            vec![c(-s3, 0.0), c(0.0, 0.0), c(s3, 0.0)],
            vec![-1.0, 1.0],
            c(0.0, 1.0),
        )
        .map_err(core_error)?;
        let sols = inverse::enumerate_solutions(&data, DEFAULT_TOL_BASE).map_err(core_error)?;
        let expected =
            PeriodicMatrixHat::new(vec![0.0, 0.0], vec![1.0, 1.0], c(0.0, 1.0), c(0.0, 0.0))
                .map_err(core_error)?;
        let unique = sols.len() == 1;
        let distance = if unique {
            expected.entry_distance(&sols[0].matrix)
        } else {
            f64::INFINITY
        };
        checks.push(CheckRow::new(
            "inverse-golden-unique",
            unique && distance <= 1e-10,
            format!("{} solution(s), entry distance {distance:.3e}", sols.len()),
        ));
    }

    // Doubling the coupling product makes the same data infeasible, with
    // window margins exactly -2.
    {
        let s3 = 3.0f64.sqrt();
        let data = SpectralData::new(
            vec![c(-s3, 0.0), c(0.0, 0.0), c(s3, 0.0)],
            vec![-1.0, 1.0],
            c(0.0, 2.0),
        )
        .map_err(core_error)?;
        let feas = inverse::feasibility_check(&data, DEFAULT_TOL_BASE);
        let margins_ok = feas
            .rows
            .iter()
            .all(|r| (r.window_margin + 2.0).abs() <= 1e-12);
        checks.push(CheckRow::new(
            "inverse-oversized-product-rejected",
            !feas.pass && margins_ok,
            format!(
                "pass={}, window margins {:?}",
                feas.pass,
                feas.rows
                    .iter()
                    .map(|r| r.window_margin)
                    .collect::<Vec<_>>()
            ),
        ));
    }

    // Real coupling product: four branches, all verifying.
    {
        let data = SpectralData::new(
            vec![c(-2.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)],
            vec![-1.0, 1.0],
            c(-0.25, 0.0),
        )
        .map_err(core_error)?;
        let sols = inverse::enumerate_solutions(&data, DEFAULT_TOL_BASE).map_err(core_error)?;
        let all_ok = sols.len() == 4
            && sols.iter().all(|s| {
                inverse::verify_reconstruction(&s.matrix, &data, DEFAULT_VERIFY_TOL).is_ok()
            });
        checks.push(CheckRow::new(
            "inverse-real-product-branches",
            all_ok,
            format!("{} solution(s)", sols.len()),
        ));
    }

    // One tight window halves the count: 4 instead of 8.
    {
        let data = SpectralData::new(
            vec![c(-2.0, 0.0), c(-0.5, 0.0), c(0.5, 0.0), c(4.0, 0.0)],
            vec![-1.0, 0.0, 1.0],
            c(0.0, 1.0),
        )
        .map_err(core_error)?;
        let feas = inverse::feasibility_check(&data, DEFAULT_TOL_BASE);
        let sols = inverse::enumerate_solutions(&data, DEFAULT_TOL_BASE).map_err(core_error)?;
        checks.push(CheckRow::new(
            "inverse-single-equality-branches",
            feas.branch_count == 4 && sols.len() == 4,
            format!(
                "branch count {}, solutions {}",
                feas.branch_count,
                sols.len()
            ),
        ));
    }

    let pass = checks.iter().all(|c| c.pass);
    Ok(RunReport {
        command: "selftest",
        input_digest: io::digest(b"selftest"),
        outputs: json!({ "fixtures": checks.len() }),
        checks,
        pass,
    })
}
