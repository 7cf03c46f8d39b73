//! Inverse problem: decide whether a prescribed pair of spectra and a
//! coupling product are attainable by a ring matrix, enumerate the finitely
//! many solution branches, and rebuild the canonical matrix for each.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::direct::{self, CheckResult, NecessaryConditionRow, Regime};
use crate::error::{Error, Result};
use crate::matrix::{Beta, PeriodicMatrixHat};
use crate::poly::RootSet;
use crate::tridiag::{self, RealTridiag};

/// A Lanczos coupling below this times the node scale is a breakdown.
const BREAKDOWN_REL: f64 = 1e-13;

/// Spectral weights must sum to one within this.
const WEIGHT_SUM_TOL: f64 = 1e-10;

/// Enumeration refuses more than 2^24 branches.
pub const MAX_FREE_SELECTORS: usize = 24;

/// Enumeration switches to a parallel loop at this many branches.
const PARALLEL_THRESHOLD: u128 = 64;

/// Prescribed inverse data: the spectrum of the ring matrix, the spectrum of
/// its leading principal submatrix, and the product of all couplings.
#[derive(Debug, Clone)]
pub struct SpectralData {
    lambda: Vec<Complex64>,
    mu: Vec<f64>,
    beta: Complex64,
}

impl SpectralData {
    pub fn new(lambda: Vec<Complex64>, mu: Vec<f64>, beta: Complex64) -> Result<Self> {
        if lambda.len() < 3 {
            return Err(Error::InvalidData(format!(
                "need at least 3 prescribed eigenvalues, got {}",
                lambda.len()
            )));
        }
        if mu.len() + 1 != lambda.len() {
            return Err(Error::InvalidData(format!(
                "submatrix spectrum must have {} values, got {}",
                lambda.len() - 1,
                mu.len()
            )));
        }
        if lambda
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
            || mu.iter().any(|x| !x.is_finite())
        {
            return Err(Error::InvalidData("spectra must be finite".into()));
        }
        if mu.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidData("mu not strictly increasing".into()));
        }
        if !beta.re.is_finite() || !beta.im.is_finite() || beta.norm_sqr() == 0.0 {
            return Err(Error::InvalidData(
                "coupling product must be finite and nonzero".into(),
            ));
        }
        let mut lambda = lambda;
        lambda.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
        Ok(Self { lambda, mu, beta })
    }

    /// Inverse data taken from a direct-problem report, for round trips.
    pub fn from_direct(report: &direct::DirectReport) -> Result<Self> {
        Self::new(report.lambda.clone(), report.mu.clone(), report.beta.value)
    }

    pub fn n(&self) -> usize {
        self.lambda.len()
    }

    pub fn lambda(&self) -> &[Complex64] {
        &self.lambda
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    pub fn beta_class(&self) -> Beta {
        Beta::classify(self.beta)
    }

    /// Corner diagonal entry forced by the trace identity.
    pub fn corner(&self) -> Complex64 {
        self.lambda.iter().sum::<Complex64>() - Complex64::new(self.mu.iter().sum::<f64>(), 0.0)
    }

    /// chi(mu_k) = prod_j (mu_k - lambda_j) at every node.
    pub fn char_at_nodes(&self) -> Vec<Complex64> {
        self.mu
            .iter()
            .map(|&x| {
                self.lambda
                    .iter()
                    .map(|&l| Complex64::new(x, 0.0) - l)
                    .product()
            })
            .collect()
    }
}

/// Full feasibility verdict for prescribed inverse data.
#[derive(Debug, Clone)]
pub struct FeasibilityReport {
    pub regime: Regime,
    /// Corner entry Sum(lambda) - Sum(mu).
    pub corner: Complex64,
    pub char_at_mu: Vec<Complex64>,
    /// The characteristic values are real at every node.
    pub char_real_ok: bool,
    pub rows: Vec<NecessaryConditionRow>,
    pub location_checks: Vec<CheckResult>,
    /// Equality threshold on the characteristic-value scale.
    pub tau: f64,
    /// Equality threshold on the eigenvalue scale.
    pub tau_geom: f64,
    /// 0-based nodes where the two branch roots coincide.
    pub degenerate: Vec<usize>,
    /// 2^(free nodes); saturates at u128::MAX.
    pub branch_count: u128,
    pub pass: bool,
}

impl FeasibilityReport {
    /// Human-readable list of everything that failed.
    pub fn failure_summary(&self) -> String {
        let mut parts = Vec::new();
        if !self.char_real_ok {
            parts.push("characteristic values not real at the nodes".to_string());
        }
        for row in self.rows.iter().filter(|r| !r.pass) {
            parts.push(format!(
                "node {}: sign margin {:.3e}, window margin {:.3e}",
                row.k, row.sign_margin, row.window_margin
            ));
        }
        for check in self.location_checks.iter().filter(|c| !c.pass) {
            parts.push(format!("{}: {}", check.name, check.detail));
        }
        if parts.is_empty() {
            parts.push("all checks passed".into());
        }
        parts.join("; ")
    }
}

/// Screens prescribed data against every attainability condition: realness
/// of the characteristic values at the nodes, the sign and window conditions,
/// and the regime-specific location facts.
pub fn feasibility_check(d: &SpectralData, tol_base: f64) -> FeasibilityReport {
    let char_at_mu = d.char_at_nodes();
    let beta = d.beta_class();
    let corner = d.corner();
    let regime = direct::classify(beta, corner);
    let tau = direct::tau_eq(tol_base, &char_at_mu, beta.value.norm());

    let char_real_ok = char_at_mu.iter().all(|z| z.im.abs() <= tau);
    let rows = direct::necessary_conditions(
        &char_at_mu.iter().map(|z| z.re).collect::<Vec<_>>(),
        beta,
        tau,
    );

    let scale = 1.0f64.max(
        d.lambda
            .iter()
            .map(|z| z.norm())
            .chain(d.mu.iter().map(|&x| x.abs()))
            .fold(0.0, f64::max),
    );
    let tau_geom = tol_base * scale;
    let clustered = RootSet::from_raw(d.lambda.clone(), 0.0);
    let location_checks = {
        let ctx = direct::LocationContext {
            lambda: &clustered.roots,
            clusters: &clustered.clusters,
            mu: &d.mu,
            beta,
            corner,
            scale,
            tau_geom,
        };
        direct::location_checks(&ctx, regime)
    };

    let degenerate: Vec<usize> = rows
        .iter()
        .enumerate()
        .filter(|(_, r)| r.degenerate())
        .map(|(k, _)| k)
        .collect();
    let free = d.mu.len() - degenerate.len();
    let branch_count = if free >= 128 {
        u128::MAX
    } else {
        1u128 << free
    };
    let pass =
        char_real_ok && rows.iter().all(|r| r.pass) && location_checks.iter().all(|c| c.pass);

    FeasibilityReport {
        regime,
        corner,
        char_at_mu,
        char_real_ok,
        rows,
        location_checks,
        tau,
        tau_geom,
        degenerate,
        branch_count,
        pass,
    }
}

/// The two admissible values of |b_n u_{k,1}|^2 at one node.
#[derive(Debug, Clone, Copy)]
pub struct RootPair {
    /// Larger root, from the positive square-root branch.
    pub x_plus: f64,
    /// Smaller root, recovered through the product identity to avoid
    /// cancellation near the window boundary.
    pub x_minus: f64,
    pub degenerate: bool,
}

/// Branch roots at every node for feasible data.
pub fn branch_candidates(d: &SpectralData, tol_base: f64) -> Result<Vec<RootPair>> {
    let report = feasibility_check(d, tol_base);
    if !report.pass {
        return Err(Error::InfeasibleBranch(report.failure_summary()));
    }
    branch_candidates_with(d, &report)
}

/// Branch roots computed from an existing feasibility report.
pub fn branch_candidates_with(
    d: &SpectralData,
    report: &FeasibilityReport,
) -> Result<Vec<RootPair>> {
    let beta_abs = d.beta.norm();
    let two_re = 2.0 * d.beta.re;
    let chi_prime = tridiag::derivative_products(&d.mu);
    let count = d.mu.len();
    report
        .rows
        .iter()
        .enumerate()
        .map(|(kk, row)| {
            // The quadratic for X = |b_n u_{k,1}|^2 is
            //   chi'^2 X^2 - sign * chi' |chi'| (chi + 2 Re beta) X + |beta|^2
            // with root sum s / |chi'| where s = sign * (chi + 2 Re beta).
            let sign = if (count - kk) % 2 == 0 { 1.0 } else { -1.0 };
            let u = row.char_value + two_re;
            let s = sign * u;
            if s <= 0.0 {
                return Err(Error::InfeasibleBranch(format!(
                    "branch quadratic at node {} has nonpositive root sum {s:.3e}",
                    kk + 1
                )));
            }
            let abs_prime = chi_prime[kk].abs();
            let margin = u.abs() - 2.0 * beta_abs;
            let disc = if row.degenerate() || margin <= 0.0 {
                0.0
            } else {
                margin * (u.abs() + 2.0 * beta_abs)
            };
            let x_plus = (s + disc.sqrt()) / (2.0 * abs_prime);
            let ratio = beta_abs / abs_prime;
            let x_minus = ratio * ratio / x_plus;
            if !x_plus.is_finite() || !x_minus.is_finite() || x_plus <= 0.0 || x_minus <= 0.0 {
                return Err(Error::InfeasibleBranch(format!(
                    "branch roots at node {} not positive: {x_plus:.3e}, {x_minus:.3e}",
                    kk + 1
                )));
            }
            Ok(RootPair {
                x_plus,
                x_minus,
                degenerate: row.degenerate(),
            })
        })
        .collect()
}

/// Rebuilds the chain whose spectral measure is the given discrete measure,
/// by the three-term recurrence with full reorthogonalization. Nodes must be
/// strictly increasing; weights positive, summing to one.
pub fn jacobi_from_measure(nodes: &[f64], weights: &[f64]) -> Result<RealTridiag> {
    let m = nodes.len();
    if m == 0 || weights.len() != m {
        return Err(Error::InvalidMeasure(format!(
            "need matching nonzero node and weight counts, got {} and {}",
            m,
            weights.len()
        )));
    }
    if nodes.iter().any(|x| !x.is_finite()) || nodes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidMeasure(
            "nodes must be finite and strictly increasing".into(),
        ));
    }
    if weights.iter().any(|&w| !w.is_finite() || w <= 0.0) {
        return Err(Error::InvalidMeasure(
            "weights must be positive and finite".into(),
        ));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::InvalidMeasure(format!(
            "weights must sum to one, got {total}"
        )));
    }

    let scale = nodes.iter().fold(1.0f64, |acc, &x| acc.max(x.abs()));
    let dot = |f: &[f64], g: &[f64]| -> f64 {
        f.iter()
            .zip(g)
            .zip(weights)
            .map(|((&a, &b), &w)| w * a * b)
            .sum()
    };

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m);
    basis.push(vec![1.0 / total.sqrt(); m]);
    let mut diag = Vec::with_capacity(m);
    let mut off = Vec::with_capacity(m.saturating_sub(1));

    for j in 0..m {
        let q = basis[j].clone();
        let xq: Vec<f64> = nodes.iter().zip(&q).map(|(&x, &qi)| x * qi).collect();
        diag.push(dot(&xq, &q));
        if j + 1 == m {
            break;
        }
        let mut r = xq;
        // Two orthogonalization passes keep the basis orthogonal to working
        // precision even when nodes cluster tightly.
        for _ in 0..2 {
            for prev in &basis {
                let overlap = dot(&r, prev);
                for (ri, pi) in r.iter_mut().zip(prev) {
                    *ri -= overlap * pi;
                }
            }
        }
        let norm = dot(&r, &r).sqrt();
        if norm <= BREAKDOWN_REL * scale {
            return Err(Error::Breakdown(format!(
                "chain recurrence broke down at step {} (coupling {norm:.3e})",
                j + 1
            )));
        }
        off.push(norm);
        for ri in r.iter_mut() {
            *ri /= norm;
        }
        basis.push(r);
    }

    RealTridiag::new(diag, off)
}

/// One reconstructed matrix together with the data that produced it.
#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub matrix: PeriodicMatrixHat,
    /// Per node: false picks the larger quadratic root, true the smaller.
    pub selector: Vec<bool>,
    /// Chosen |b_n u_{k,1}|^2 at each node.
    pub x_values: Vec<f64>,
    /// Normalized spectral weights handed to the chain recurrence.
    pub weights: Vec<f64>,
}

/// Rebuilds the matrix for one root selection, recomputing candidates.
pub fn reconstruct_branch(
    d: &SpectralData,
    selector: &[bool],
    tol_base: f64,
) -> Result<Reconstruction> {
    let pairs = branch_candidates(d, tol_base)?;
    reconstruct_from_candidates(d, &pairs, selector)
}

/// Rebuilds the matrix for one root selection from precomputed candidates.
pub fn reconstruct_from_candidates(
    d: &SpectralData,
    pairs: &[RootPair],
    selector: &[bool],
) -> Result<Reconstruction> {
    let m = d.mu.len();
    if selector.len() != m || pairs.len() != m {
        return Err(Error::InvalidData(format!(
            "selector and candidate counts must both be {m}"
        )));
    }
    let x_values: Vec<f64> = pairs
        .iter()
        .zip(selector)
        .map(|(p, &bit)| if bit { p.x_minus } else { p.x_plus })
        .collect();
    let ring_sqr: f64 = x_values.iter().sum();
    let ring_abs = ring_sqr.sqrt();
    let weights: Vec<f64> = x_values.iter().map(|&x| x / ring_sqr).collect();

    let chain = jacobi_from_measure(&d.mu, &weights)?;
    let chain_product: f64 = chain.offdiag().iter().product();
    let beta_abs = d.beta.norm();
    let last_coupling = beta_abs / (chain_product * ring_abs);
    if !last_coupling.is_finite() || last_coupling <= 0.0 {
        return Err(Error::Breakdown(format!(
            "closing coupling not positive: {last_coupling:.3e}"
        )));
    }

    let mut b = chain.offdiag().to_vec();
    b.push(last_coupling);
    let ring_coupling = d.beta / beta_abs * ring_abs;
    let matrix = PeriodicMatrixHat::new(chain.diag().to_vec(), b, ring_coupling, d.corner())?;
    Ok(Reconstruction {
        matrix,
        selector: selector.to_vec(),
        x_values,
        weights,
    })
}

/// Expands a branch index into per-position bits, least significant first.
pub fn selector_bits(value: u128, len: usize) -> Vec<bool> {
    (0..len).map(|j| (value >> j) & 1 == 1).collect()
}

/// Full selector for one branch index: bit j of `index` drives the j-th
/// non-degenerate node, least significant bit first; degenerate nodes stay
/// on the coincident root.
pub fn selector_for_index(pairs: &[RootPair], index: u128) -> Result<Vec<bool>> {
    let free: Vec<usize> = (0..pairs.len()).filter(|&k| !pairs[k].degenerate).collect();
    if free.len() < 128 && index >= (1u128 << free.len()) {
        return Err(Error::InvalidData(format!(
            "branch index {index} out of range (branch count {})",
            1u128 << free.len()
        )));
    }
    let mut selector = vec![false; pairs.len()];
    for (j, &pos) in free.iter().enumerate() {
        selector[pos] = (index >> j) & 1 == 1;
    }
    Ok(selector)
}

/// Every solution branch for feasible data, in ascending index order over
/// the non-degenerate nodes (least significant bit moves first).
pub fn enumerate_solutions(d: &SpectralData, tol_base: f64) -> Result<Vec<Reconstruction>> {
    let report = feasibility_check(d, tol_base);
    if !report.pass {
        return Err(Error::InfeasibleBranch(report.failure_summary()));
    }
    let pairs = branch_candidates_with(d, &report)?;
    let free: Vec<usize> = (0..d.mu.len()).filter(|&k| !pairs[k].degenerate).collect();
    if free.len() > MAX_FREE_SELECTORS {
        return Err(Error::InvalidData(format!(
            "{} free selectors exceed the enumeration cap of {MAX_FREE_SELECTORS}",
            free.len()
        )));
    }
    let total: u128 = 1u128 << free.len();

    let build = |idx: u128| -> Result<Reconstruction> {
        let mut selector = vec![false; d.mu.len()];
        for (j, &pos) in free.iter().enumerate() {
            selector[pos] = (idx >> j) & 1 == 1;
        }
        reconstruct_from_candidates(d, &pairs, &selector)
    };

    if total >= PARALLEL_THRESHOLD {
        (0..total as u64)
            .into_par_iter()
            .map(|idx| build(idx as u128))
            .collect()
    } else {
        (0..total).map(build).collect()
    }
}

/// Distances between a reconstructed matrix's spectra and the prescribed
/// data, relative to the geometric scale.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    /// Hausdorff distance between eigenvalue sets.
    pub lambda_distance: f64,
    /// Largest node difference.
    pub mu_distance: f64,
    /// Relative coupling-product defect.
    pub beta_residual: f64,
    pub worst: f64,
}

/// Recomputes the spectra of a reconstructed matrix and compares them with
/// the prescribed data. Errors when any distance exceeds `tol`.
pub fn verify_reconstruction(
    matrix: &PeriodicMatrixHat,
    d: &SpectralData,
    tol: f64,
) -> Result<VerificationReport> {
    let embedded = matrix.embed();
    let report = direct::full_spectrum(&embedded)?;
    let scale = 1.0f64.max(
        d.lambda
            .iter()
            .chain(report.lambda.iter())
            .map(|z| z.norm())
            .fold(0.0, f64::max),
    );
    let lambda_distance = hausdorff(&report.lambda, &d.lambda) / scale;
    let mu_distance = report
        .mu
        .iter()
        .zip(&d.mu)
        .map(|(&a, &b)| (a - b).abs())
        .fold(0.0, f64::max)
        / scale;
    let beta_residual = (embedded.beta().value - d.beta).norm() / d.beta.norm();
    let worst = lambda_distance.max(mu_distance).max(beta_residual);
    if worst > tol {
        return Err(Error::VerificationFailed {
            residual: worst,
            detail: format!(
                "eigenvalues {lambda_distance:.3e}, nodes {mu_distance:.3e}, \
                 coupling product {beta_residual:.3e}"
            ),
        });
    }
    Ok(VerificationReport {
        lambda_distance,
        mu_distance,
        beta_residual,
        worst,
    })
}

fn hausdorff(a: &[Complex64], b: &[Complex64]) -> f64 {
    let one_way = |from: &[Complex64], to: &[Complex64]| -> f64 {
        from.iter()
            .map(|&x| {
                to.iter()
                    .map(|&y| (x - y).norm())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}
