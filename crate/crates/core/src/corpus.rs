//! Seeded random instances for tests, benchmarks, and self-checks.
//!
//! Every generator is deterministic in (size, seed) so failures reproduce.
//! Couplings are bounded away from zero and, where a regime demands it,
//! phases are bounded away from the real axis, keeping the generated
//! matrices comfortably inside their class. Hat instances additionally keep
//! their necessary-condition margins away from the equality boundary: data
//! inside the equality tolerance is treated as degenerate downstream, so a
//! generic sample that close to the boundary is numerically ambiguous.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::direct::{self, Regime};
use crate::matrix::{PeriodicMatrixGeneral, PeriodicMatrixHat};

const DIAG_RANGE: (f64, f64) = (-1.5, 1.5);
const COUPLING_RANGE: (f64, f64) = (0.4, 1.6);
/// Ring-coupling phases stay at least this far from the real axis.
const PHASE_MARGIN: f64 = 0.3;
/// Nonreal corner entries keep |Im| in this range.
const IMAG_RANGE: (f64, f64) = (0.2, 1.2);
/// Sign and window margins stay above this times the condition scale; three
/// decades above the default equality tolerance.
const MIN_MARGIN_REL: f64 = 1e-5;
/// Seed stride between redraw attempts.
const REDRAW_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

/// Canonical-form matrix drawn from the given regime, with margins bounded
/// away from the degenerate boundary.
pub fn random_hat(n: usize, regime: Regime, seed: u64) -> PeriodicMatrixHat {
    for attempt in 0..64u64 {
        let candidate = draw_hat(
            n,
            regime,
            seed.wrapping_add(attempt.wrapping_mul(REDRAW_STRIDE)),
        );
        if margins_clear(&candidate) {
            return candidate;
        }
    }
    // Borderline margins occur on a few percent of draws; 64 in a row do not.
    panic!("corpus generator exhausted its redraw budget (n={n}, seed={seed})");
}

/// The necessary-condition margins sit clear of the equality boundary.
fn margins_clear(m: &PeriodicMatrixHat) -> bool {
    let report = match direct::full_spectrum(&m.embed()) {
        Ok(r) => r,
        // Clustered submatrix spectra are legitimately outside the generic
        // corpus; redraw rather than fail.
        Err(_) => return false,
    };
    let cond_scale = direct::tau_eq(1.0, &report.char_at_mu, report.beta.value.norm());
    report
        .condition_rows
        .iter()
        .all(|row| row.sign_margin.min(row.window_margin) >= MIN_MARGIN_REL * cond_scale)
}

fn draw_hat(n: usize, regime: Regime, seed: u64) -> PeriodicMatrixHat {
    assert!(n >= 3, "ring needs at least 3 sites");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c: Vec<f64> = (0..n - 1)
        .map(|_| rng.gen_range(DIAG_RANGE.0..DIAG_RANGE.1))
        .collect();
    let b: Vec<f64> = (0..n - 1)
        .map(|_| rng.gen_range(COUPLING_RANGE.0..COUPLING_RANGE.1))
        .collect();

    let modulus = rng.gen_range(COUPLING_RANGE.0..COUPLING_RANGE.1);
    let flip = if rng.gen::<bool>() { 1.0 } else { -1.0 };
    let b_n = if regime.beta_is_real() {
        Complex64::new(flip * modulus, 0.0)
    } else {
        let theta = flip * rng.gen_range(PHASE_MARGIN..std::f64::consts::PI - PHASE_MARGIN);
        Complex64::from_polar(modulus, theta)
    };

    let re = rng.gen_range(DIAG_RANGE.0..DIAG_RANGE.1);
    let side = if rng.gen::<bool>() { 1.0 } else { -1.0 };
    let a_n = if regime.corner_is_real() {
        Complex64::new(re, 0.0)
    } else {
        Complex64::new(re, side * rng.gen_range(IMAG_RANGE.0..IMAG_RANGE.1))
    };

    PeriodicMatrixHat::new(c, b, b_n, a_n).expect("generated entries are valid")
}

/// Fully complex matrix with unconstrained coupling phases.
pub fn random_general(n: usize, seed: u64) -> PeriodicMatrixGeneral {
    assert!(n >= 3, "ring needs at least 3 sites");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c: Vec<f64> = (0..n - 1)
        .map(|_| rng.gen_range(DIAG_RANGE.0..DIAG_RANGE.1))
        .collect();
    let b: Vec<Complex64> = (0..n)
        .map(|_| {
            let modulus = rng.gen_range(COUPLING_RANGE.0..COUPLING_RANGE.1);
            let theta = rng.gen_range(0.0..std::f64::consts::TAU);
            Complex64::from_polar(modulus, theta)
        })
        .collect();
    let a_n = Complex64::new(
        rng.gen_range(DIAG_RANGE.0..DIAG_RANGE.1),
        rng.gen_range(DIAG_RANGE.0..DIAG_RANGE.1),
    );
    PeriodicMatrixGeneral::new(c, b, a_n).expect("generated entries are valid")
}

/// All four regimes, for exhaustive sweeps.
pub const ALL_REGIMES: [Regime; 4] = [
    Regime::NonrealBetaRealCorner,
    Regime::NonrealBetaComplexCorner,
    Regime::RealBetaRealCorner,
    Regime::RealBetaComplexCorner,
];
