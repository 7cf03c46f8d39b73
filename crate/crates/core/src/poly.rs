//! Dense univariate polynomials over the complex field, sized for
//! characteristic polynomials of small band matrices (degree <= 64).
//!
//! Coefficients are stored highest degree first. Root finding uses the
//! Aberth-Ehrlich simultaneous iteration; root sets are clustered so that
//! numerically coincident roots are reported as one value with multiplicity.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Hard cap on Aberth-Ehrlich sweeps before reporting non-convergence.
const MAX_SWEEPS: usize = 200;

/// Roots closer than this times the root scale are merged into one cluster.
pub(crate) const CLUSTER_REL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPolynomial {
    /// Highest-degree coefficient first; leading coefficient nonzero unless
    /// the polynomial is identically zero (then a single zero entry).
    coeffs: Vec<Complex64>,
}

impl ComplexPolynomial {
    /// Builds a polynomial from coefficients, trimming exact leading zeros.
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        let first = coeffs
            .iter()
            .position(|c| c.re != 0.0 || c.im != 0.0)
            .unwrap_or(coeffs.len().saturating_sub(1));
        let coeffs = if coeffs.is_empty() {
            vec![Complex64::new(0.0, 0.0)]
        } else {
            coeffs[first..].to_vec()
        };
        Self { coeffs }
    }

    pub fn from_real_coeffs(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// Monic polynomial with the given roots, by factor-by-factor convolution.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        let mut coeffs = vec![Complex64::new(1.0, 0.0)];
        for &r in roots {
            coeffs.push(Complex64::new(0.0, 0.0));
            for i in (1..coeffs.len()).rev() {
                let shifted = coeffs[i - 1];
                coeffs[i] -= r * shifted;
            }
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == Complex64::new(0.0, 0.0)
    }

    /// Largest coefficient magnitude; the residual scale for root finding.
    pub fn coeff_scale(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Horner evaluation returning the value and the first derivative.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &c in &self.coeffs {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.eval_with_derivative(z).0
    }

    /// Product with a monic linear factor (z - root).
    pub fn mul_linear(&self, root: Complex64) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.push(Complex64::new(0.0, 0.0));
        for i in (1..coeffs.len()).rev() {
            let shifted = coeffs[i - 1];
            coeffs[i] -= root * shifted;
        }
        Self { coeffs }
    }

    /// Coefficient-wise scalar multiple.
    pub fn scale(&self, k: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * k).collect())
    }

    /// Coefficient-wise difference; degrees may differ.
    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
        for (i, &c) in self.coeffs.iter().rev().enumerate() {
            coeffs[n - 1 - i] += c;
        }
        for (i, &c) in other.coeffs.iter().rev().enumerate() {
            coeffs[n - 1 - i] -= c;
        }
        Self::new(coeffs)
    }

    /// All roots with multiplicity, via Aberth-Ehrlich simultaneous iteration.
    ///
    /// `tol` bounds the accepted relative residual max |p(root)| / max |coeff|.
    pub fn roots(&self, tol: f64) -> Result<RootSet> {
        let d = self.degree();
        if self.is_zero() || d == 0 {
            return Err(Error::InvalidData(
                "root finding requires degree >= 1".into(),
            ));
        }
        let lead = self.coeffs[0];
        let monic: Vec<Complex64> = self.coeffs.iter().map(|&c| c / lead).collect();

        let mut z = initial_guesses(&monic);
        let mut jit = SplitMix64::new(0x5eed_0000 ^ d as u64);
        for _sweep in 0..MAX_SWEEPS {
            let mut max_step = 0.0f64;
            for i in 0..d {
                let (p, dp) = horner_pair(&monic, z[i]);
                if p.norm() == 0.0 {
                    continue;
                }
                let newton = if dp.norm() == 0.0 {
                    // Critical point: nudge off it deterministically.
                    let nudge = Complex64::new(1e-8 * (1.0 + z[i].norm()), 1e-8);
                    z[i] += nudge;
                    max_step = f64::INFINITY;
                    continue;
                } else {
                    p / dp
                };
                let mut repulsion = Complex64::new(0.0, 0.0);
                for j in 0..d {
                    if j != i {
                        let gap = z[i] - z[j];
                        if gap.norm() == 0.0 {
                            let t = jit.next_unit();
                            z[i] += Complex64::new(1e-8 * (t + 0.5), 1e-8 * t);
                            repulsion = Complex64::new(0.0, 0.0);
                            break;
                        }
                        repulsion += gap.inv();
                    }
                }
                let denom = Complex64::new(1.0, 0.0) - newton * repulsion;
                let step = if denom.norm() < 1e-300 {
                    newton
                } else {
                    newton / denom
                };
                z[i] -= step;
                max_step = max_step.max(step.norm() / (1.0 + z[i].norm()));
            }
            if max_step <= 4.0 * f64::EPSILON {
                break;
            }
        }

        let scale = self.coeff_scale();
        let residual = z.iter().map(|&zi| self.eval(zi).norm()).fold(0.0, f64::max) / scale;
        if !residual.is_finite() || residual > tol {
            return Err(Error::NonConvergence(format!(
                "root residual {residual:.3e} above tolerance {tol:.3e}"
            )));
        }

        Ok(RootSet::from_raw(z, residual))
    }
}

/// Roots of a polynomial together with the relative residual achieved
/// and the clustering into numerically coincident values.
#[derive(Debug, Clone)]
pub struct RootSet {
    /// Sorted by (real, imaginary); members of a cluster repeat its centroid.
    pub roots: Vec<Complex64>,
    /// max |p(root)| / max |coeff| over all reported roots.
    pub residual: f64,
    /// Distinct values with multiplicities, in the same order as `roots`.
    pub clusters: Vec<(Complex64, usize)>,
}

impl RootSet {
    pub(crate) fn from_raw(mut raw: Vec<Complex64>, residual: f64) -> Self {
        raw.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
        let scale = 1.0f64.max(raw.iter().map(|z| z.norm()).fold(0.0, f64::max));
        let threshold = CLUSTER_REL * scale;

        let mut clusters: Vec<(Complex64, usize)> = Vec::new();
        let mut start = 0;
        while start < raw.len() {
            let mut end = start + 1;
            while end < raw.len() && (raw[end] - raw[start]).norm() < threshold {
                end += 1;
            }
            let sum: Complex64 = raw[start..end].iter().sum();
            clusters.push((sum / (end - start) as f64, end - start));
            start = end;
        }

        let mut roots = Vec::with_capacity(raw.len());
        for &(value, count) in &clusters {
            roots.extend(std::iter::repeat(value).take(count));
        }
        roots.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
        Self {
            roots,
            residual,
            clusters,
        }
    }

    /// Largest cluster size (1 when all roots are simple).
    pub fn max_multiplicity(&self) -> usize {
        self.clusters.iter().map(|&(_, m)| m).max().unwrap_or(0)
    }
}

fn horner_pair(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Starting points on a circle of radius 1 + max |c_i / c_0| with a
/// deterministic pseudo-random angular jitter to break symmetries.
fn initial_guesses(monic: &[Complex64]) -> Vec<Complex64> {
    let d = monic.len() - 1;
    let radius = 1.0 + monic.iter().skip(1).map(|c| c.norm()).fold(0.0, f64::max);
    let mut jit = SplitMix64::new(0xabe7_1234 ^ d as u64);
    (0..d)
        .map(|k| {
            let angle = std::f64::consts::TAU * (k as f64 + 0.25) / d as f64
                + 0.2 * (jit.next_unit() - 0.5);
            Complex64::new(radius * angle.cos(), radius * angle.sin())
        })
        .collect()
}

/// Minimal deterministic generator for jitter; avoids threading an external
/// RNG through the root finder.
struct SplitMix64(u64);

impl SplitMix64 {
    fn new(seed: u64) -> Self {
        Self(seed)
    }

    fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    fn next_unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }
}

/// Monic real polynomial with the given real roots, highest degree first.
/// Real arithmetic throughout, so coefficients carry no imaginary rounding.
pub fn product_from_real_roots(roots: &[f64]) -> Vec<f64> {
    let mut coeffs = vec![1.0];
    for &r in roots {
        coeffs.push(0.0);
        for i in (1..coeffs.len()).rev() {
            let shifted = coeffs[i - 1];
            coeffs[i] -= r * shifted;
        }
    }
    coeffs
}

/// Sum_k w_k * prod_{j != k} (x - node_j), computed by deflating the full
/// node product once per k. Real arithmetic; no positivity requirements.
pub(crate) fn weighted_node_expansion(nodes: &[f64], weights: &[f64]) -> Vec<f64> {
    debug_assert_eq!(nodes.len(), weights.len());
    let full = product_from_real_roots(nodes);
    let mut acc = vec![0.0; nodes.len()];
    for (&node, &w) in nodes.iter().zip(weights) {
        // Synthetic division of the full product by (x - node).
        let mut q = Vec::with_capacity(full.len() - 1);
        let mut carry = 0.0;
        for &c in &full[..full.len() - 1] {
            carry = c + node * carry;
            q.push(carry);
        }
        for (a, &qi) in acc.iter_mut().zip(&q) {
            *a += w * qi;
        }
    }
    acc
}

/// Numerator of sum_k w_k / (x - node_k) over the common denominator
/// prod_k (x - node_k), for a discrete measure with positive weights.
///
/// The result satisfies psi(node_k) = w_k * prod_{j != k} (node_k - node_j).
pub fn numerator_from_partial_fractions(
    nodes: &[f64],
    weights: &[f64],
) -> Result<ComplexPolynomial> {
    if nodes.is_empty() || nodes.len() != weights.len() {
        return Err(Error::InvalidMeasure(format!(
            "need equal nonzero counts of nodes and weights, got {} and {}",
            nodes.len(),
            weights.len()
        )));
    }
    for pair in nodes.windows(2) {
        if !(pair[0].is_finite() && pair[1].is_finite() && pair[0] < pair[1]) {
            return Err(Error::InvalidMeasure(
                "nodes must be finite and strictly increasing".into(),
            ));
        }
    }
    if let Some(i) = weights.iter().position(|&w| !(w.is_finite() && w > 0.0)) {
        return Err(Error::InvalidMeasure(format!(
            "weight[{}] = {} is not positive",
            i + 1,
            weights[i]
        )));
    }
    Ok(ComplexPolynomial::from_real_coeffs(
        &weighted_node_expansion(nodes, weights),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn assert_coeffs_close(p: &ComplexPolynomial, expected: &[Complex64], tol: f64) {
        assert_eq!(p.degree(), expected.len() - 1, "degree mismatch: {p:?}");
        for (got, want) in p.coeffs().iter().zip(expected) {
            assert!(
                (got - want).norm() <= tol,
                "coefficient {got} != {want} (tol {tol:e})"
            );
        }
    }

    #[test]
    fn cubic_from_symmetric_real_roots() {
        let s = 3.0f64.sqrt();
        let p = ComplexPolynomial::from_roots(&[c(-s, 0.0), c(0.0, 0.0), c(s, 0.0)]);
        assert_coeffs_close(
            &p,
            &[c(1.0, 0.0), c(0.0, 0.0), c(-3.0, 0.0), c(0.0, 0.0)],
            1e-12,
        );
    }

    #[test]
    fn conjugate_pair_gives_real_quadratic() {
        let p = ComplexPolynomial::from_roots(&[c(0.0, 1.0), c(0.0, -1.0)]);
        assert_coeffs_close(&p, &[c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)], 0.0);
    }

    #[test]
    fn single_root_gives_linear() {
        let p = ComplexPolynomial::from_roots(&[c(2.0, 0.0)]);
        assert_coeffs_close(&p, &[c(1.0, 0.0), c(-2.0, 0.0)], 0.0);
    }

    #[test]
    fn eval_cubic_and_derivative_at_one() {
        let p = ComplexPolynomial::from_real_coeffs(&[1.0, 0.0, -3.0, 0.0]);
        let (v, dv) = p.eval_with_derivative(c(1.0, 0.0));
        assert!((v - c(-2.0, 0.0)).norm() <= 1e-15);
        assert!(dv.norm() <= 1e-15);
    }

    #[test]
    fn roots_of_symmetric_cubic() {
        let p = ComplexPolynomial::from_real_coeffs(&[1.0, 0.0, -3.0, 0.0]);
        let rs = p.roots(1e-10).unwrap();
        let s = 3.0f64.sqrt();
        let expected = [c(-s, 0.0), c(0.0, 0.0), c(s, 0.0)];
        for (got, want) in rs.roots.iter().zip(&expected) {
            assert!((got - want).norm() <= 1e-9, "{got} vs {want}");
        }
        assert!(rs.residual <= 1e-10);
    }

    #[test]
    fn root_of_linear() {
        let p = ComplexPolynomial::new(vec![c(1.0, 0.0), c(-2.0, 0.0)]);
        let rs = p.roots(1e-12).unwrap();
        assert_eq!(rs.roots.len(), 1);
        assert!((rs.roots[0] - c(2.0, 0.0)).norm() <= 1e-12);
    }

    #[test]
    fn upper_half_plane_cubic_roots() {
        // chi(z) = z^3 - i z^2 - 3 z + i; all roots must lie strictly above
        // the real axis, and the root set must rebuild the coefficients.
        let p = ComplexPolynomial::new(vec![c(1.0, 0.0), c(0.0, -1.0), c(-3.0, 0.0), c(0.0, 1.0)]);
        let rs = p.roots(1e-10).unwrap();
        assert!(rs.roots.iter().all(|z| z.im > 0.0), "{:?}", rs.roots);
        let rebuilt = ComplexPolynomial::from_roots(&rs.roots);
        assert_coeffs_close(&rebuilt, p.coeffs(), 1e-8);
    }

    #[test]
    fn double_root_is_clustered() {
        // (z + 1)^2 (z - 2) = z^3 - 3 z - 2
        let p = ComplexPolynomial::from_real_coeffs(&[1.0, 0.0, -3.0, -2.0]);
        let rs = p.roots(1e-9).unwrap();
        assert_eq!(rs.clusters.len(), 2);
        assert_eq!(rs.max_multiplicity(), 2);
        let double = rs.clusters.iter().find(|&&(_, m)| m == 2).unwrap().0;
        assert!((double - c(-1.0, 0.0)).norm() <= 1e-6);
        assert!((rs.roots[0] - rs.roots[1]).norm() == 0.0);
    }

    #[test]
    fn degree_zero_is_rejected() {
        let p = ComplexPolynomial::new(vec![c(4.0, 0.0)]);
        assert!(matches!(p.roots(1e-10), Err(Error::InvalidData(_))));
    }

    #[test]
    fn partial_fraction_numerator_two_nodes() {
        let p = numerator_from_partial_fractions(&[-1.0, 1.0], &[0.5, 0.5]).unwrap();
        assert_coeffs_close(&p, &[c(1.0, 0.0), c(0.0, 0.0)], 1e-15);
    }

    #[test]
    fn partial_fraction_numerator_single_node() {
        let p = numerator_from_partial_fractions(&[0.0], &[1.0]).unwrap();
        assert_coeffs_close(&p, &[c(1.0, 0.0)], 0.0);
    }

    #[test]
    fn partial_fraction_numerator_three_nodes() {
        // Expanded by hand: 1/4 x(x-1) + 1/2 (x+1)(x-1) + 1/4 (x+1)x = x^2 - 1/2.
        let p = numerator_from_partial_fractions(&[-1.0, 0.0, 1.0], &[0.25, 0.5, 0.25]).unwrap();
        assert_coeffs_close(&p, &[c(1.0, 0.0), c(0.0, 0.0), c(-0.5, 0.0)], 1e-15);
    }

    #[test]
    fn numerator_matches_its_node_values() {
        let nodes = [-2.0, -0.3, 0.7, 1.9];
        let weights = [0.1, 0.2, 0.3, 0.4];
        let p = numerator_from_partial_fractions(&nodes, &weights).unwrap();
        for (k, &x) in nodes.iter().enumerate() {
            let expected: f64 = weights[k]
                * nodes
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != k)
                    .map(|(_, &nj)| x - nj)
                    .product::<f64>();
            let got = p.eval(c(x, 0.0));
            assert!((got.re - expected).abs() <= 1e-12 * expected.abs().max(1.0));
            assert!(got.im == 0.0);
        }
    }

    #[test]
    fn measure_validation_errors() {
        assert!(matches!(
            numerator_from_partial_fractions(&[0.0, 0.0], &[0.5, 0.5]),
            Err(Error::InvalidMeasure(_))
        ));
        assert!(matches!(
            numerator_from_partial_fractions(&[0.0, 1.0], &[0.5, -0.5]),
            Err(Error::InvalidMeasure(_))
        ));
        assert!(matches!(
            numerator_from_partial_fractions(&[], &[]),
            Err(Error::InvalidMeasure(_))
        ));
    }
}
