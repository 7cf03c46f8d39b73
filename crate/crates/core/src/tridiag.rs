//! Eigensolver for the Hermitian leading principal submatrix.
//!
//! A unitary diagonal phase change turns the complex tridiagonal submatrix
//! into a real symmetric one with positive couplings, which is then fully
//! diagonalized by the implicit-shift QL iteration with Wilkinson shifts.
//! A Sturm-count bisection solver lives in [`sturm`]; it shares no code with
//! the QL path and serves as its cross-check.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::PeriodicMatrixGeneral;

/// Eigenvalue gaps below this times the matrix scale are treated as a
/// defective cluster the endpoint formulas cannot be trusted on.
const DEGENERATE_REL_GAP: f64 = 1e-10;

/// Unreduced real symmetric tridiagonal matrix (all couplings positive).
#[derive(Debug, Clone, PartialEq)]
pub struct RealTridiag {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

impl RealTridiag {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || offdiag.len() + 1 != diag.len() {
            return Err(Error::InvalidMatrix(format!(
                "tridiagonal needs k diagonal and k-1 coupling entries, got {} and {}",
                diag.len(),
                offdiag.len()
            )));
        }
        if let Some(i) = diag.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidMatrix(format!(
                "diagonal[{}] is not finite",
                i + 1
            )));
        }
        if let Some(i) = offdiag.iter().position(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(Error::InvalidMatrix(format!(
                "coupling[{}] must be positive, got {}",
                i + 1,
                offdiag[i]
            )));
        }
        Ok(Self { diag, offdiag })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    /// Infinity norm; the scale for gap and agreement thresholds.
    pub fn norm(&self) -> f64 {
        let n = self.len();
        (0..n)
            .map(|i| {
                let left = if i > 0 {
                    self.offdiag[i - 1].abs()
                } else {
                    0.0
                };
                let right = if i + 1 < n {
                    self.offdiag[i].abs()
                } else {
                    0.0
                };
                self.diag[i].abs() + left + right
            })
            .fold(0.0, f64::max)
    }
}

/// Strips the coupling phases off the leading principal submatrix.
///
/// Returns the cospectral real tridiagonal together with the unit phases
/// d_1..d_{n-1} (d_1 = 1) such that the original submatrix eigenvectors are
/// the phase-scaled real ones: u_j = d_j * t_j.
pub fn phase_reduce(m: &PeriodicMatrixGeneral) -> (RealTridiag, Vec<Complex64>) {
    let n = m.n();
    let mut phases = Vec::with_capacity(n - 1);
    phases.push(Complex64::new(1.0, 0.0));
    let mut offdiag = Vec::with_capacity(n - 2);
    for k in 0..n - 2 {
        let b = m.b()[k];
        offdiag.push(b.norm());
        let next = phases[k] * b.norm() / b;
        phases.push(next);
    }
    let t = RealTridiag {
        diag: m.c().to_vec(),
        offdiag,
    };
    (t, phases)
}

/// Full eigendecomposition of a real symmetric tridiagonal matrix.
#[derive(Debug, Clone)]
pub struct TridiagEigen {
    /// Ascending; guaranteed pairwise separated by the degeneracy threshold.
    pub values: Vec<f64>,
    /// vectors[k] is the unit eigenvector for values[k], first entry positive.
    pub vectors: Vec<Vec<f64>>,
}

/// Spectrum of the submatrix together with the eigenvector endpoint data the
/// residue formulas consume.
#[derive(Debug, Clone)]
pub struct SubmatrixSpectrum {
    /// Eigenvalues, strictly ascending.
    pub mu: Vec<f64>,
    /// First eigenvector components, all positive.
    pub u_first: Vec<f64>,
    /// Last eigenvector components, signed.
    pub u_last: Vec<f64>,
    /// prod_{r != k} (mu_k - mu_r); alternates sign ending positive at k = n-1.
    pub chi_prime_at_mu: Vec<f64>,
}

/// Implicit-shift QL with Wilkinson shifts and full vector accumulation.
pub fn decompose(t: &RealTridiag) -> Result<TridiagEigen> {
    let n = t.len();
    let mut d = t.diag.clone();
    let mut e = t.offdiag.clone();
    e.push(0.0);
    let mut z: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();

    ql_implicit(&mut d, &mut e, &mut z)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| d[i]).collect();

    let scale = t.norm().max(f64::MIN_POSITIVE);
    for pair in values.windows(2) {
        if pair[1] - pair[0] < DEGENERATE_REL_GAP * scale {
            return Err(Error::NonConvergence(format!(
                "eigenvalue cluster: gap {:.3e} below {:.3e}",
                pair[1] - pair[0],
                DEGENERATE_REL_GAP * scale
            )));
        }
    }

    let vectors: Vec<Vec<f64>> = order
        .iter()
        .map(|&col| {
            let mut v: Vec<f64> = (0..n).map(|row| z[row][col]).collect();
            if v[0] < 0.0 {
                for x in &mut v {
                    *x = -*x;
                }
            }
            v
        })
        .collect();

    Ok(TridiagEigen { values, vectors })
}

/// Eigenvalues and eigenvector endpoints of the submatrix.
pub fn eig_endpoints(t: &RealTridiag) -> Result<SubmatrixSpectrum> {
    let eig = decompose(t)?;
    let n = t.len();
    let mu = eig.values;
    let u_first: Vec<f64> = eig.vectors.iter().map(|v| v[0]).collect();
    let u_last: Vec<f64> = eig.vectors.iter().map(|v| v[n - 1]).collect();
    let chi_prime_at_mu = derivative_products(&mu);
    Ok(SubmatrixSpectrum {
        mu,
        u_first,
        u_last,
        chi_prime_at_mu,
    })
}

/// prod_{r != k} (x_k - x_r) for each k; the derivative of the node product
/// polynomial evaluated at its own roots.
pub fn derivative_products(xs: &[f64]) -> Vec<f64> {
    (0..xs.len())
        .map(|k| {
            xs.iter()
                .enumerate()
                .filter(|&(r, _)| r != k)
                .map(|(_, &xr)| xs[k] - xr)
                .product()
        })
        .collect()
}

fn ql_implicit(d: &mut [f64], e: &mut [f64], z: &mut [Vec<f64>]) -> Result<()> {
    let n = d.len();
    if n == 1 {
        return Ok(());
    }
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 50 {
                return Err(Error::NonConvergence(
                    "QL sweep cap (50) reached without deflation".into(),
                ));
            }
            // Wilkinson shift from the 2x2 block at the active corner.
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    // Rotation annihilated prematurely; recover and retry.
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for row in z.iter_mut() {
                    f = row[i + 1];
                    row[i + 1] = s * row[i] + c * f;
                    row[i] = c * row[i] - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Sturm-count bisection eigenvalues; independent of the QL path.
pub mod sturm {
    use super::RealTridiag;

    /// Number of eigenvalues strictly below `x`, from the signs of the
    /// LDL^T pivots of T - xI.
    pub fn count_below(t: &RealTridiag, x: f64) -> usize {
        let n = t.len();
        let guard = f64::EPSILON * t.norm().max(f64::MIN_POSITIVE);
        let mut pivot = 1.0f64;
        let mut count = 0;
        for i in 0..n {
            let off2 = if i == 0 {
                0.0
            } else {
                t.offdiag()[i - 1] * t.offdiag()[i - 1]
            };
            pivot = (t.diag()[i] - x) - off2 / pivot;
            if pivot == 0.0 {
                pivot = guard;
            }
            if pivot < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// All eigenvalues ascending, each bisected to `tol_abs`.
    pub fn eigenvalues(t: &RealTridiag, tol_abs: f64) -> Vec<f64> {
        let n = t.len();
        // Gershgorin enclosure of the whole spectrum.
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { t.offdiag()[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { t.offdiag()[i].abs() } else { 0.0 };
            lo = lo.min(t.diag()[i] - left - right);
            hi = hi.max(t.diag()[i] + left + right);
        }
        let spread = (hi - lo).max(f64::MIN_POSITIVE);
        let tol = tol_abs.max(4.0 * f64::EPSILON * spread);
        (0..n)
            .map(|k| {
                let mut a = lo;
                let mut b = hi;
                while b - a > tol {
                    let mid = 0.5 * (a + b);
                    if count_below(t, mid) <= k {
                        a = mid;
                    } else {
                        b = mid;
                    }
                }
                0.5 * (a + b)
            })
            .collect()
    }
}
