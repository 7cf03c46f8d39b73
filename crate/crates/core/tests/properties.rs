//! Property-based checks for the polynomial, tridiagonal, and canonical-form
//! layers: root-finding round trips, derivative consistency, the
//! partial-fraction numerator identity, eigensolver residuals, and
//! cospectrality of the canonical form.

use num_complex::Complex64;
use proptest::prelude::*;
use specband_core::corpus;
use specband_core::matrix::charpoly_oracle;
use specband_core::poly::{numerator_from_partial_fractions, ComplexPolynomial};
use specband_core::tridiag::{self, sturm, RealTridiag};

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Pairwise-separated points in the 2-disc, so every root is simple.
fn separated_roots() -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), 1..=8)
        .prop_map(|pts| {
            pts.into_iter()
                .map(|(re, im)| c64(re, im))
                .collect::<Vec<_>>()
        })
        .prop_filter("roots must be separated", |pts| {
            pts.iter()
                .enumerate()
                .all(|(i, a)| pts.iter().skip(i + 1).all(|b| (a - b).norm() >= 0.15))
        })
}

/// Strictly increasing nodes with positive weights.
fn discrete_measure() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    prop::collection::vec((-3.0..3.0f64, 0.05..1.0f64), 1..=6)
        .prop_map(|mut pairs| {
            pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            pairs.into_iter().unzip::<f64, f64, Vec<_>, Vec<_>>()
        })
        .prop_filter("nodes must be separated", |(nodes, _)| {
            nodes.windows(2).all(|w| w[1] - w[0] >= 0.05)
        })
}

/// Random chain with couplings bounded away from zero.
fn chain() -> impl Strategy<Value = RealTridiag> {
    (2usize..=10)
        .prop_flat_map(|len| {
            (
                prop::collection::vec(-2.0..2.0f64, len),
                prop::collection::vec(0.1..2.0f64, len - 1),
            )
        })
        .prop_map(|(diag, off)| RealTridiag::new(diag, off).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn roots_round_trip(roots in separated_roots()) {
        let p = ComplexPolynomial::from_roots(&roots);
        let found = p.roots(1e-9).unwrap();
        prop_assert_eq!(found.roots.len(), roots.len());
        for want in &roots {
            let best = found
                .roots
                .iter()
                .map(|got| (got - want).norm())
                .fold(f64::INFINITY, f64::min);
            prop_assert!(best <= 1e-6, "root {} missed by {:.3e}", want, best);
        }
    }

    #[test]
    fn derivative_matches_finite_difference(
        roots in separated_roots(),
        zre in -2.0..2.0f64,
        zim in -2.0..2.0f64,
    ) {
        let p = ComplexPolynomial::from_roots(&roots);
        let z = c64(zre, zim);
        let (_, dp) = p.eval_with_derivative(z);
        let h = 1e-6 * (1.0 + z.norm());
        let fd = (p.eval(z + c64(h, 0.0)) - p.eval(z - c64(h, 0.0))) / c64(2.0 * h, 0.0);
        let scale = dp.norm().max(p.coeff_scale());
        prop_assert!(
            (fd - dp).norm() <= 1e-4 * scale.max(1.0),
            "derivative {} vs finite difference {}", dp, fd
        );
    }

    #[test]
    fn partial_fraction_numerator_identity((nodes, weights) in discrete_measure()) {
        let psi = numerator_from_partial_fractions(&nodes, &weights).unwrap();
        prop_assert_eq!(psi.degree(), nodes.len() - 1);

        // Agreement with the defining sum at points spread over the node range.
        let lo = nodes.first().unwrap() - 1.0;
        let hi = nodes.last().unwrap() + 1.0;
        let samples = 3 * nodes.len();
        for i in 0..samples {
            let z = lo + (hi - lo) * (i as f64 + 0.5) / samples as f64;
            let brute: f64 = nodes
                .iter()
                .enumerate()
                .map(|(k, _)| {
                    weights[k]
                        * nodes
                            .iter()
                            .enumerate()
                            .filter(|&(j, _)| j != k)
                            .map(|(_, &x)| z - x)
                            .product::<f64>()
                })
                .sum();
            let got = psi.eval(c64(z, 0.0));
            prop_assert!(got.im.abs() <= 1e-12 * got.norm().max(1.0));
            let scale = brute.abs().max(1.0);
            prop_assert!(
                (got.re - brute).abs() <= 1e-10 * scale,
                "at {}: {} vs {}", z, got.re, brute
            );
        }

        // At each node the sum collapses to a single product.
        for (k, &node) in nodes.iter().enumerate() {
            let want: f64 = weights[k]
                * nodes
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != k)
                    .map(|(_, &x)| node - x)
                    .product::<f64>();
            let got = psi.eval(c64(node, 0.0)).re;
            prop_assert!(
                (got - want).abs() <= 1e-10 * want.abs().max(1.0),
                "node {}: {} vs {}", node, got, want
            );
        }
    }

    #[test]
    fn eigensolver_residuals_and_orthonormality(t in chain()) {
        let eig = tridiag::decompose(&t).unwrap();
        let norm = t.norm().max(1.0);
        let len = t.len();

        for w in eig.values.windows(2) {
            prop_assert!(w[0] < w[1], "values not ascending");
        }

        for (value, vector) in eig.values.iter().zip(&eig.vectors) {
            for i in 0..len {
                let mut acc = t.diag()[i] * vector[i];
                if i > 0 {
                    acc += t.offdiag()[i - 1] * vector[i - 1];
                }
                if i + 1 < len {
                    acc += t.offdiag()[i] * vector[i + 1];
                }
                prop_assert!(
                    (acc - value * vector[i]).abs() <= 1e-12 * norm,
                    "residual at row {}", i
                );
            }
        }

        for i in 0..len {
            for j in i..len {
                let dot: f64 = eig.vectors[i]
                    .iter()
                    .zip(&eig.vectors[j])
                    .map(|(a, b)| a * b)
                    .sum();
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!(
                    (dot - want).abs() <= 1e-12,
                    "vectors {} and {} not orthonormal: {}", i, j, dot
                );
            }
        }
    }

    #[test]
    fn eigensolver_matches_bisection(t in chain()) {
        let eig = tridiag::decompose(&t).unwrap();
        let norm = t.norm().max(1.0);
        let bisected = sturm::eigenvalues(&t, 1e-13 * norm);
        prop_assert_eq!(bisected.len(), eig.values.len());
        for (a, b) in eig.values.iter().zip(&bisected) {
            prop_assert!((a - b).abs() <= 1e-12 * norm, "{} vs {}", a, b);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_form_is_cospectral(n in 3usize..=8, seed in 0u64..1_000_000) {
        let m = corpus::random_general(n, seed);
        let hat = m.canonicalize();
        let a = charpoly_oracle(&m).unwrap();
        let b = charpoly_oracle(&hat.embed()).unwrap();
        let scale = a.coeff_scale().max(1.0);
        for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
            prop_assert!(
                (x - y).norm() <= 1e-9 * scale,
                "coefficient {} vs {}", x, y
            );
        }
    }

    #[test]
    fn submatrix_spectrum_is_phase_blind(n in 3usize..=8, seed in 0u64..1_000_000) {
        let m = corpus::random_general(n, seed);
        let (t, phases) = tridiag::phase_reduce(&m);
        for p in &phases {
            prop_assert!((p.norm() - 1.0).abs() <= 1e-14);
        }
        for (i, b) in m.b().iter().take(n - 2).enumerate() {
            prop_assert!((t.offdiag()[i] - b.norm()).abs() <= 1e-14);
        }
        let direct_eig = tridiag::eig_endpoints(&t).unwrap();
        let check = sturm::eigenvalues(&t, 1e-13 * t.norm().max(1.0));
        for (a, b) in direct_eig.mu.iter().zip(&check) {
            prop_assert!((a - b).abs() <= 1e-11 * t.norm().max(1.0));
        }
    }
}
