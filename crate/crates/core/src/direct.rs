//! Direct problem: compute the spectrum of a ring matrix from the spectrum
//! of its leading principal submatrix, and verify the structural facts that
//! tie the two together (residue signs, interlacing, half-plane location).

use num_complex::Complex64;

use crate::error::Result;
use crate::matrix::{Beta, PeriodicMatrixGeneral, REAL_REL_TOL};
use crate::poly::{self, ComplexPolynomial};
use crate::tridiag::{self, SubmatrixSpectrum};
use crate::{DEFAULT_ROOT_TOL, DEFAULT_TOL_BASE};

/// Half-plane membership must hold strictly beyond this relative slack when
/// the corner entry is nonreal and the coupling product is nonreal.
const OPEN_HALF_PLANE_REL: f64 = 1e-12;

/// Closed half-plane membership tolerates this much relative excursion.
const CLOSED_HALF_PLANE_REL: f64 = 1e-10;

/// An eigenvalue counts as real only within the root-extraction noise floor.
/// Structurally complex eigenvalues near the axis carry an imaginary part
/// proportional to their node distance, so a looser threshold would demand
/// node membership from eigenvalues the theory places off the nodes.
const REAL_AXIS_REL: f64 = 1e-10;

/// Residues below this times the residue scale count as exact zeros.
const RESIDUE_ZERO_REL: f64 = 1e-12;

/// The four structural classes, split by realness of the coupling product
/// and of the corner diagonal entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Real simple spectrum, strictly interlacing the submatrix spectrum.
    NonrealBetaRealCorner,
    /// Spectrum confined to the open half-plane of the corner entry.
    NonrealBetaComplexCorner,
    /// Real spectrum, multiplicity at most two, weak interlacing patterns.
    RealBetaRealCorner,
    /// Spectrum in the closed half-plane; real eigenvalues only at submatrix
    /// eigenvalues.
    RealBetaComplexCorner,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::NonrealBetaRealCorner => "nonreal-beta-real-corner",
            Regime::NonrealBetaComplexCorner => "nonreal-beta-complex-corner",
            Regime::RealBetaRealCorner => "real-beta-real-corner",
            Regime::RealBetaComplexCorner => "real-beta-complex-corner",
        }
    }

    pub fn beta_is_real(self) -> bool {
        matches!(
            self,
            Regime::RealBetaRealCorner | Regime::RealBetaComplexCorner
        )
    }

    pub fn corner_is_real(self) -> bool {
        matches!(
            self,
            Regime::NonrealBetaRealCorner | Regime::RealBetaRealCorner
        )
    }
}

/// True when the imaginary part is negligible at the scalar's own scale.
pub fn is_effectively_real(z: Complex64) -> bool {
    z.im.abs() <= REAL_REL_TOL * z.norm().max(1.0)
}

pub fn classify(beta: Beta, corner: Complex64) -> Regime {
    match (beta.is_real, is_effectively_real(corner)) {
        (false, true) => Regime::NonrealBetaRealCorner,
        (false, false) => Regime::NonrealBetaComplexCorner,
        (true, true) => Regime::RealBetaRealCorner,
        (true, false) => Regime::RealBetaComplexCorner,
    }
}

/// Scale-aware equality threshold shared by the feasibility and verification
/// checks: tol_base * max(1, max_k |chi(mu_k)|, 2 |beta|).
pub fn tau_eq(tol_base: f64, char_at_mu: &[Complex64], beta_abs: f64) -> f64 {
    let chi_max = char_at_mu.iter().map(|z| z.norm()).fold(0.0, f64::max);
    tol_base * 1.0f64.max(chi_max).max(2.0 * beta_abs)
}

/// Nonnegative residues of the rational reduction at the submatrix
/// eigenvalues, with the indices where they vanish.
#[derive(Debug, Clone)]
pub struct Residues {
    pub alpha: Vec<f64>,
    /// 0-based indices k with alpha_k = 0 within tolerance.
    pub zero_set: Vec<usize>,
}

/// Computes the residues |b_n u_{k,1} + conj(b_{n-1}) u_{k,n-1}|^2 from the
/// phase-restored eigenvector endpoints of the submatrix.
pub fn residues(m: &PeriodicMatrixGeneral, s: &SubmatrixSpectrum) -> Residues {
    let n = m.n();
    let (_, phases) = tridiag::phase_reduce(m);
    let phase_last = phases[n - 2];
    let b_ring = m.b()[n - 1];
    let b_last = m.b()[n - 2];
    let alpha: Vec<f64> = (0..n - 1)
        .map(|k| {
            let u_first = Complex64::new(s.u_first[k], 0.0);
            let u_last = phase_last * s.u_last[k];
            (b_ring * u_first + b_last.conj() * u_last).norm_sqr()
        })
        .collect();
    let scale = alpha.iter().fold(1.0f64, |acc, &a| acc.max(a));
    let zero_set = alpha
        .iter()
        .enumerate()
        .filter(|&(_, &a)| a <= RESIDUE_ZERO_REL * scale)
        .map(|(k, _)| k)
        .collect();
    Residues { alpha, zero_set }
}

/// Characteristic polynomial of the full matrix from the submatrix spectrum:
/// the submatrix node product times (z - a_n), minus the residue-weighted
/// partial-fraction numerator.
pub fn assemble_char_poly(mu: &[f64], alpha: &[f64], corner: Complex64) -> ComplexPolynomial {
    let sub = ComplexPolynomial::from_real_coeffs(&poly::product_from_real_roots(mu));
    let weighted = ComplexPolynomial::from_real_coeffs(&poly::weighted_node_expansion(mu, alpha));
    sub.mul_linear(corner).sub(&weighted)
}

/// One row of the necessary-condition table at a submatrix eigenvalue.
#[derive(Debug, Clone)]
pub struct NecessaryConditionRow {
    /// 1-based index of the submatrix eigenvalue.
    pub k: usize,
    /// Real part of the characteristic value chi(mu_k).
    pub char_value: f64,
    /// (-1)^(n-k) chi(mu_k); nonnegative when the data is attainable.
    pub sign_margin: f64,
    /// Window slack: |chi + 2 Re beta| - 2 |beta| for nonreal beta,
    /// |chi| - 4 (-1)^(n-k-1) beta for real beta. Nonnegative when attainable.
    pub window_margin: f64,
    /// Real beta only: chi(mu_k) vanishes within tolerance.
    pub sign_equality: bool,
    /// The window condition is tight within tolerance.
    pub window_equality: bool,
    pub pass: bool,
}

impl NecessaryConditionRow {
    /// A tight condition collapses the two branch roots into one.
    pub fn degenerate(&self) -> bool {
        self.sign_equality || self.window_equality
    }
}

/// Evaluates the attainability conditions on chi(mu_k) for every k.
///
/// `char_values` are the real characteristic values at the ascending
/// submatrix eigenvalues; `tau` is the scale-aware equality threshold.
pub fn necessary_conditions(
    char_values: &[f64],
    beta: Beta,
    tau: f64,
) -> Vec<NecessaryConditionRow> {
    let count = char_values.len();
    char_values
        .iter()
        .enumerate()
        .map(|(kk, &chi)| {
            let sign = if (count - kk) % 2 == 0 { 1.0 } else { -1.0 };
            let sign_margin = sign * chi;
            if beta.is_real {
                let b = beta.value.re;
                let window_margin = chi.abs() + 4.0 * sign * b;
                let sign_equality = chi.abs() <= tau;
                let window_equality = window_margin.abs() <= tau && !sign_equality;
                NecessaryConditionRow {
                    k: kk + 1,
                    char_value: chi,
                    sign_margin,
                    window_margin,
                    sign_equality,
                    window_equality,
                    pass: sign_margin >= -tau && window_margin >= -tau,
                }
            } else {
                let window_margin = (chi + 2.0 * beta.value.re).abs() - 2.0 * beta.value.norm();
                let window_equality = window_margin.abs() <= tau;
                NecessaryConditionRow {
                    k: kk + 1,
                    char_value: chi,
                    sign_margin,
                    window_margin,
                    sign_equality: false,
                    window_equality,
                    pass: sign_margin >= -tau && window_margin >= -tau,
                }
            }
        })
        .collect()
}

/// Outcome of one named structural check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

/// Everything the direct problem produces for one matrix.
#[derive(Debug, Clone)]
pub struct DirectReport {
    pub regime: Regime,
    /// Full spectrum with multiplicity, sorted by (real, imaginary).
    pub lambda: Vec<Complex64>,
    /// Distinct eigenvalues with multiplicities.
    pub lambda_clusters: Vec<(Complex64, usize)>,
    /// Submatrix spectrum, strictly ascending.
    pub mu: Vec<f64>,
    /// Characteristic values chi(mu_k) of the assembled polynomial.
    pub char_at_mu: Vec<Complex64>,
    /// prod_{r != k} (mu_k - mu_r).
    pub chi_prime_at_mu: Vec<f64>,
    pub alpha: Vec<f64>,
    pub residue_zero_set: Vec<usize>,
    pub beta: Beta,
    pub corner: Complex64,
    pub char_poly: ComplexPolynomial,
    pub condition_rows: Vec<NecessaryConditionRow>,
    /// Equality threshold on the characteristic-value scale.
    pub tau: f64,
    /// Equality threshold on the eigenvalue (geometric) scale.
    pub tau_geom: f64,
    /// Geometric scale max(1, |lambda|, |mu|) the location checks use.
    pub scale: f64,
    pub checks: Vec<CheckResult>,
}

impl DirectReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failed_checks(&self) -> Vec<&CheckResult> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }
}

/// Runs the whole direct pipeline with default tolerances.
pub fn full_spectrum(m: &PeriodicMatrixGeneral) -> Result<DirectReport> {
    full_spectrum_with(m, DEFAULT_TOL_BASE, DEFAULT_ROOT_TOL)
}

/// Direct pipeline: phase reduction, submatrix eigendata, residues, assembled
/// characteristic polynomial, root extraction, then every structural check.
pub fn full_spectrum_with(
    m: &PeriodicMatrixGeneral,
    tol_base: f64,
    root_tol: f64,
) -> Result<DirectReport> {
    let (t, _) = tridiag::phase_reduce(m);
    let s = tridiag::eig_endpoints(&t)?;
    let res = residues(m, &s);
    let char_poly = assemble_char_poly(&s.mu, &res.alpha, m.a_n());
    let roots = char_poly.roots(root_tol)?;

    let char_at_mu: Vec<Complex64> =
        s.mu.iter()
            .map(|&x| char_poly.eval(Complex64::new(x, 0.0)))
            .collect();
    let beta = m.beta();
    let tau = tau_eq(tol_base, &char_at_mu, beta.value.norm());
    let lambda_scale = 1.0f64.max(
        roots
            .roots
            .iter()
            .map(|z| z.norm())
            .chain(s.mu.iter().map(|&x| x.abs()))
            .fold(0.0, f64::max),
    );
    let tau_geom = tol_base * lambda_scale;

    let condition_rows = necessary_conditions(
        &char_at_mu.iter().map(|z| z.re).collect::<Vec<_>>(),
        beta,
        tau,
    );

    let mut report = DirectReport {
        regime: classify(beta, m.a_n()),
        lambda: roots.roots,
        lambda_clusters: roots.clusters,
        mu: s.mu.clone(),
        char_at_mu,
        chi_prime_at_mu: s.chi_prime_at_mu.clone(),
        alpha: res.alpha,
        residue_zero_set: res.zero_set,
        beta,
        corner: m.a_n(),
        char_poly,
        condition_rows,
        tau,
        tau_geom,
        scale: lambda_scale,
        checks: Vec::new(),
    };
    classify_and_verify(&mut report, m);
    Ok(report)
}

/// Appends every structural check to the report: consistency of residues,
/// the necessary-condition table, the trace identity, and the regime-specific
/// location facts for the computed spectrum.
pub fn classify_and_verify(report: &mut DirectReport, m: &PeriodicMatrixGeneral) {
    let n = m.n();
    let tau = report.tau;
    let tau_geom = report.tau_geom;

    // chi(mu_k) is real for every class member.
    let worst_imag = report
        .char_at_mu
        .iter()
        .map(|z| z.im.abs())
        .fold(0.0, f64::max);
    push(
        &mut report.checks,
        "char-real-at-nodes",
        worst_imag <= tau,
        format!("max |Im chi(mu_k)| = {worst_imag:.3e}, threshold {tau:.3e}"),
    );

    // alpha_k = -chi(mu_k) / chi'(mu_k), polynomial-evaluation route.
    let mut worst_residue = 0.0f64;
    for k in 0..n - 1 {
        let lhs = report.alpha[k] * report.chi_prime_at_mu[k];
        let rhs = -report.char_at_mu[k].re;
        let scale = lhs.abs().max(rhs.abs()).max(1.0);
        worst_residue = worst_residue.max((lhs - rhs).abs() / scale);
    }
    push(
        &mut report.checks,
        "residue-consistency",
        worst_residue <= 1e-9,
        format!("max relative defect {worst_residue:.3e}"),
    );

    // Vanishing residues are impossible for nonreal beta and are restricted
    // to alternate positions for real beta.
    if report.beta.is_real {
        let b = report.beta.value.re;
        let misplaced: Vec<usize> = report
            .residue_zero_set
            .iter()
            .copied()
            .filter(|&kk| {
                let sign = if (n - 1 - kk) % 2 == 0 { 1.0 } else { -1.0 };
                sign * b <= 0.0
            })
            .collect();
        push(
            &mut report.checks,
            "residue-zero-parity",
            misplaced.is_empty(),
            format!(
                "zero residues at k = {:?} (1-based), misplaced: {:?}",
                report
                    .residue_zero_set
                    .iter()
                    .map(|k| k + 1)
                    .collect::<Vec<_>>(),
                misplaced.iter().map(|k| k + 1).collect::<Vec<_>>()
            ),
        );
    } else {
        push(
            &mut report.checks,
            "residues-positive",
            report.residue_zero_set.is_empty(),
            format!(
                "min residue {:.3e}",
                report.alpha.iter().copied().fold(f64::INFINITY, f64::min)
            ),
        );
    }

    // Necessary-condition table.
    let sign_ok = report.condition_rows.iter().all(|r| r.sign_margin >= -tau);
    let window_ok = report
        .condition_rows
        .iter()
        .all(|r| r.window_margin >= -tau);
    let worst_sign = report
        .condition_rows
        .iter()
        .map(|r| r.sign_margin)
        .fold(f64::INFINITY, f64::min);
    let worst_window = report
        .condition_rows
        .iter()
        .map(|r| r.window_margin)
        .fold(f64::INFINITY, f64::min);
    push(
        &mut report.checks,
        "sign-condition",
        sign_ok,
        format!("min sign margin {worst_sign:.3e}, threshold {:.3e}", -tau),
    );
    push(
        &mut report.checks,
        "window-condition",
        window_ok,
        format!(
            "min window margin {worst_window:.3e}, threshold {:.3e}",
            -tau
        ),
    );

    // Trace identity: the eigenvalue sum equals the diagonal sum. Double
    // roots limit the extracted-root sum to roughly 1e-10 absolute, so the
    // threshold stays well above that.
    let root_sum: Complex64 = report.lambda.iter().sum();
    let expected: Complex64 = Complex64::new(m.c().iter().sum::<f64>(), 0.0) + m.a_n();
    let trace_defect = (root_sum - expected).norm() / expected.norm().max(1.0);
    push(
        &mut report.checks,
        "trace-identity",
        trace_defect <= 1e-8,
        format!("relative defect {trace_defect:.3e}"),
    );

    // The imaginary parts of the assembled coefficients are a scalar multiple
    // of the submatrix node product.
    let sub = poly::product_from_real_roots(&report.mu);
    let mut worst_imag_coeff = 0.0f64;
    let coeff_scale = report.char_poly.coeff_scale().max(1.0);
    for (i, coeff) in report.char_poly.coeffs().iter().enumerate() {
        let expected_im = if i == 0 {
            0.0
        } else {
            -report.corner.im * sub[i - 1]
        };
        worst_imag_coeff = worst_imag_coeff.max((coeff.im - expected_im).abs());
    }
    push(
        &mut report.checks,
        "imag-coefficient-identity",
        worst_imag_coeff <= 1e-10 * coeff_scale,
        format!("max coefficient defect {worst_imag_coeff:.3e}"),
    );

    let location = {
        let ctx = LocationContext {
            lambda: &report.lambda,
            clusters: &report.lambda_clusters,
            mu: &report.mu,
            beta: report.beta,
            corner: report.corner,
            scale: report.scale,
            tau_geom,
        };
        location_checks(&ctx, report.regime)
    };
    report.checks.extend(location);
}

/// Inputs for the eigenvalue-location checks, shared between direct
/// verification and the inverse feasibility screen.
pub(crate) struct LocationContext<'a> {
    /// Full spectrum sorted by (real, imaginary), cluster centroids repeated.
    pub lambda: &'a [Complex64],
    pub clusters: &'a [(Complex64, usize)],
    pub mu: &'a [f64],
    pub beta: Beta,
    pub corner: Complex64,
    /// max(1, |lambda|, |mu|).
    pub scale: f64,
    pub tau_geom: f64,
}

/// Regime-specific location facts for a spectrum, as named checks.
pub(crate) fn location_checks(ctx: &LocationContext, regime: Regime) -> Vec<CheckResult> {
    let mut checks = Vec::new();
    match regime {
        Regime::NonrealBetaRealCorner => {
            check_spectrum_real(ctx, &mut checks);
            check_strict_interlacing(ctx, &mut checks);
        }
        Regime::NonrealBetaComplexCorner => {
            check_open_half_plane(ctx, &mut checks);
        }
        Regime::RealBetaRealCorner => {
            check_spectrum_real(ctx, &mut checks);
            check_weak_interlacing_pattern(ctx, &mut checks);
            check_multiplicity(ctx, &mut checks);
        }
        Regime::RealBetaComplexCorner => {
            check_closed_half_plane(ctx, &mut checks);
        }
    }
    checks
}

fn push(checks: &mut Vec<CheckResult>, name: &'static str, pass: bool, detail: String) {
    checks.push(CheckResult { name, pass, detail });
}

fn check_spectrum_real(ctx: &LocationContext, checks: &mut Vec<CheckResult>) {
    let worst = ctx.lambda.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    push(
        checks,
        "spectrum-real",
        worst <= ctx.tau_geom,
        format!(
            "max |Im lambda| = {worst:.3e}, threshold {:.3e}",
            ctx.tau_geom
        ),
    );
}

fn check_strict_interlacing(ctx: &LocationContext, checks: &mut Vec<CheckResult>) {
    let lam: Vec<f64> = ctx.lambda.iter().map(|z| z.re).collect();
    let mut ok = true;
    let mut detail = String::from("strict");
    for (kk, &node) in ctx.mu.iter().enumerate() {
        if !(lam[kk] < node && node < lam[kk + 1]) {
            ok = false;
            detail = format!(
                "violated at k = {}: {} !< {} !< {}",
                kk + 1,
                lam[kk],
                node,
                lam[kk + 1]
            );
            break;
        }
    }
    push(checks, "interlacing-strict", ok, detail);
}

fn check_open_half_plane(ctx: &LocationContext, checks: &mut Vec<CheckResult>) {
    let side = if ctx.corner.im > 0.0 { 1.0 } else { -1.0 };
    let floor = OPEN_HALF_PLANE_REL * ctx.scale;
    let min_depth = ctx
        .lambda
        .iter()
        .map(|z| side * z.im)
        .fold(f64::INFINITY, f64::min);
    push(
        checks,
        "half-plane-open",
        min_depth > floor,
        format!("min signed Im lambda = {min_depth:.3e}, floor {floor:.3e}"),
    );
}

fn check_closed_half_plane(ctx: &LocationContext, checks: &mut Vec<CheckResult>) {
    let side = if ctx.corner.im > 0.0 { 1.0 } else { -1.0 };
    let slack = CLOSED_HALF_PLANE_REL * ctx.scale;
    let min_depth = ctx
        .lambda
        .iter()
        .map(|z| side * z.im)
        .fold(f64::INFINITY, f64::min);
    push(
        checks,
        "half-plane-closed",
        min_depth >= -slack,
        format!("min signed Im lambda = {min_depth:.3e}, slack {slack:.3e}"),
    );

    // Real eigenvalues must sit on submatrix eigenvalues.
    let axis_floor = REAL_AXIS_REL * ctx.scale;
    let mut ok = true;
    let mut detail = String::from("no real eigenvalues");
    for z in ctx.lambda {
        if z.im.abs() <= axis_floor {
            let nearest = ctx
                .mu
                .iter()
                .map(|&x| (z.re - x).abs())
                .fold(f64::INFINITY, f64::min);
            if nearest > ctx.tau_geom {
                ok = false;
                detail = format!(
                    "real eigenvalue {} at distance {nearest:.3e} from nodes",
                    z.re
                );
                break;
            }
            detail = String::from("all real eigenvalues sit on nodes");
        }
    }
    push(checks, "real-roots-at-nodes", ok, detail);
}

fn check_weak_interlacing_pattern(ctx: &LocationContext, checks: &mut Vec<CheckResult>) {
    let lam: Vec<f64> = ctx.lambda.iter().map(|z| z.re).collect();
    let count = ctx.mu.len();
    let b = ctx.beta.value.re;
    let slack = (crate::poly::CLUSTER_REL * ctx.scale).max(ctx.tau_geom);
    let mut ok = true;
    let mut detail = String::from("pattern holds");
    for (kk, &node) in ctx.mu.iter().enumerate() {
        // Equality is allowed exactly where a vanishing residue is allowed.
        let sign = if (count - kk) % 2 == 0 { 1.0 } else { -1.0 };
        let weak = sign * b > 0.0;
        let (lo_ok, hi_ok) = if weak {
            (lam[kk] <= node + slack, node <= lam[kk + 1] + slack)
        } else {
            (lam[kk] < node, node < lam[kk + 1])
        };
        if !(lo_ok && hi_ok) {
            ok = false;
            detail = format!(
                "violated at k = {} ({}): {} vs {} vs {}",
                kk + 1,
                if weak { "weak" } else { "strict" },
                lam[kk],
                node,
                lam[kk + 1]
            );
            break;
        }
    }
    push(checks, "interlacing-pattern", ok, detail);
}

fn check_multiplicity(ctx: &LocationContext, checks: &mut Vec<CheckResult>) {
    let near = crate::poly::CLUSTER_REL * ctx.scale;
    let max_mult = ctx.clusters.iter().map(|&(_, m)| m).max().unwrap_or(1);
    push(
        checks,
        "multiplicity-bound",
        max_mult <= 2,
        format!("max multiplicity {max_mult}"),
    );

    let mut ok = true;
    let mut detail = String::from("no multiple eigenvalues");
    for &(value, mult) in ctx.clusters {
        if mult >= 2 {
            let nearest = ctx
                .mu
                .iter()
                .map(|&x| (value - Complex64::new(x, 0.0)).norm())
                .fold(f64::INFINITY, f64::min);
            if nearest > near {
                ok = false;
                detail =
                    format!("multiple eigenvalue {value} at distance {nearest:.3e} from nodes");
                break;
            }
            detail = String::from("multiple eigenvalues sit on nodes");
        }
    }
    push(checks, "multiple-roots-at-nodes", ok, detail);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::PeriodicMatrixGeneral;

    fn c64(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ring(b: [Complex64; 3], a_n: Complex64) -> PeriodicMatrixGeneral {
        PeriodicMatrixGeneral::new(vec![0.0, 0.0], b.to_vec(), a_n).unwrap()
    }

    #[test]
    fn worked_ring_with_real_corner() {
        let m = ring([c64(1.0, 0.0), c64(1.0, 0.0), c64(0.0, 1.0)], c64(0.0, 0.0));
        let report = full_spectrum(&m).unwrap();
        assert_eq!(report.regime, Regime::NonrealBetaRealCorner);
        let s3 = 3.0f64.sqrt();
        let expected = [-s3, 0.0, s3];
        for (z, want) in report.lambda.iter().zip(&expected) {
            assert!((z - c64(*want, 0.0)).norm() <= 1e-9, "{z} vs {want}");
        }
        assert!((report.alpha[0] - 1.0).abs() <= 1e-12);
        assert!((report.alpha[1] - 1.0).abs() <= 1e-12);
        assert!((report.char_at_mu[0] - c64(2.0, 0.0)).norm() <= 1e-12);
        assert!((report.char_at_mu[1] - c64(-2.0, 0.0)).norm() <= 1e-12);
        assert!(report.all_pass(), "failures: {:?}", report.failed_checks());
    }

    #[test]
    fn worked_ring_with_complex_corner() {
        let m = ring([c64(1.0, 0.0), c64(1.0, 0.0), c64(0.0, 1.0)], c64(0.0, 1.0));
        let report = full_spectrum(&m).unwrap();
        assert_eq!(report.regime, Regime::NonrealBetaComplexCorner);
        assert!(report.lambda.iter().all(|z| z.im > 0.0));
        // chi = z^3 - i z^2 - 3 z + i
        let expected = [c64(1.0, 0.0), c64(0.0, -1.0), c64(-3.0, 0.0), c64(0.0, 1.0)];
        for (got, want) in report.char_poly.coeffs().iter().zip(&expected) {
            assert!((got - want).norm() <= 1e-12);
        }
        assert!(report.all_pass(), "failures: {:?}", report.failed_checks());
    }

    #[test]
    fn assembled_cubic_is_exact() {
        let p = assemble_char_poly(&[-1.0, 1.0], &[1.0, 1.0], c64(0.0, 0.0));
        let expected = [1.0, 0.0, -3.0, 0.0];
        for (got, want) in p.coeffs().iter().zip(&expected) {
            assert_eq!(got.re, *want);
            assert_eq!(got.im, 0.0);
        }
    }

    #[test]
    fn positive_real_product_with_double_eigenvalue() {
        // All-ones couplings: spectrum {-1, -1, 2}, double eigenvalue on a node.
        let m = ring([c64(1.0, 0.0), c64(1.0, 0.0), c64(1.0, 0.0)], c64(0.0, 0.0));
        let report = full_spectrum(&m).unwrap();
        assert_eq!(report.regime, Regime::RealBetaRealCorner);
        assert_eq!(report.residue_zero_set, vec![0]);
        assert_eq!(report.lambda_clusters.len(), 2);
        let double = report
            .lambda_clusters
            .iter()
            .find(|&&(_, mult)| mult == 2)
            .unwrap()
            .0;
        assert!((double - c64(-1.0, 0.0)).norm() <= 1e-7);
        assert!((report.lambda[2] - c64(2.0, 0.0)).norm() <= 1e-9);
        assert!(report.all_pass(), "failures: {:?}", report.failed_checks());
    }

    #[test]
    fn negative_real_product_with_double_eigenvalue() {
        // b = {1, 1, -1}: spectrum {-2, 1, 1}, double eigenvalue at node mu_2.
        let m = ring(
            [c64(1.0, 0.0), c64(1.0, 0.0), c64(-1.0, 0.0)],
            c64(0.0, 0.0),
        );
        let report = full_spectrum(&m).unwrap();
        assert_eq!(report.regime, Regime::RealBetaRealCorner);
        assert_eq!(report.residue_zero_set, vec![1]);
        let double = report
            .lambda_clusters
            .iter()
            .find(|&&(_, mult)| mult == 2)
            .unwrap()
            .0;
        assert!((double - c64(1.0, 0.0)).norm() <= 1e-7);
        assert!(report.all_pass(), "failures: {:?}", report.failed_checks());
    }

    #[test]
    fn real_product_complex_corner_stays_in_closed_half_plane() {
        let m = ring(
            [c64(1.0, 0.0), c64(1.0, 0.0), c64(-1.0, 0.0)],
            c64(0.3, 0.8),
        );
        let report = full_spectrum(&m).unwrap();
        assert_eq!(report.regime, Regime::RealBetaComplexCorner);
        assert!(report.all_pass(), "failures: {:?}", report.failed_checks());
    }

    #[test]
    fn condition_rows_on_worked_data() {
        let beta = Beta::classify(c64(0.0, 1.0));
        let rows = necessary_conditions(&[2.0, -2.0], beta, 1e-8 * 2.0);
        assert_eq!(rows.len(), 2);
        for row in &rows {
            assert!((row.sign_margin - 2.0).abs() <= 1e-12);
            assert!(row.window_margin.abs() <= 1e-12);
            assert!(row.window_equality);
            assert!(row.pass);
        }
    }

    #[test]
    fn condition_rows_reject_oversized_product() {
        let beta = Beta::classify(c64(0.0, 2.0));
        let rows = necessary_conditions(&[2.0, -2.0], beta, 1e-8 * 4.0);
        for row in &rows {
            assert!((row.window_margin + 2.0).abs() <= 1e-12);
            assert!(!row.pass);
        }
    }

    #[test]
    fn condition_rows_real_product_fixture() {
        let beta = Beta::classify(c64(-0.25, 0.0));
        let rows = necessary_conditions(&[3.0, -3.0], beta, 1e-8 * 3.0);
        assert!((rows[0].sign_margin - 3.0).abs() <= 1e-12);
        assert!((rows[0].window_margin - 2.0).abs() <= 1e-12);
        assert!((rows[1].sign_margin - 3.0).abs() <= 1e-12);
        assert!((rows[1].window_margin - 4.0).abs() <= 1e-12);
        assert!(rows.iter().all(|r| r.pass));
        assert!(rows.iter().all(|r| !r.degenerate()));
    }

    #[test]
    fn regime_classification() {
        let nonreal = Beta::classify(c64(0.0, 1.0));
        let real = Beta::classify(c64(2.0, 0.0));
        assert_eq!(
            classify(nonreal, c64(1.0, 0.0)),
            Regime::NonrealBetaRealCorner
        );
        assert_eq!(
            classify(nonreal, c64(0.0, -1.0)),
            Regime::NonrealBetaComplexCorner
        );
        assert_eq!(classify(real, c64(1.0, 0.0)), Regime::RealBetaRealCorner);
        assert_eq!(classify(real, c64(0.0, 0.5)), Regime::RealBetaComplexCorner);
    }

    #[test]
    fn oracle_agreement_on_mixed_ring() {
        let m = PeriodicMatrixGeneral::new(
            vec![0.7, -0.2, 1.1],
            vec![c64(0.9, 0.4), c64(-0.5, 0.7), c64(1.2, 0.0), c64(0.3, -0.8)],
            c64(-0.6, 0.9),
        )
        .unwrap();
        let report = full_spectrum(&m).unwrap();
        let oracle = crate::matrix::charpoly_oracle(&m).unwrap();
        let scale = oracle.coeff_scale().max(1.0);
        for (got, want) in report.char_poly.coeffs().iter().zip(oracle.coeffs()) {
            assert!(
                (got - want).norm() <= 1e-9 * scale,
                "{got} vs {want} (scale {scale})"
            );
        }
        assert!(report.all_pass(), "failures: {:?}", report.failed_checks());
    }
}
