//! Matrix classes for the periodic Jacobi spectral problem.
//!
//! A general member couples n sites in a ring: real diagonal entries
//! c_1..c_{n-1}, one complex diagonal entry a_n in the corner site, complex
//! couplings b_1..b_{n-1} on the super/subdiagonal (conjugated below), and a
//! corner coupling b_n closing the ring ((1,n) = conj(b_n), (n,1) = b_n).
//! The hat subclass restricts b_1..b_{n-1} to nonzero reals.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::ComplexPolynomial;

/// Relative imaginary-part threshold used to classify a product as real.
pub const REAL_REL_TOL: f64 = 1e-8;

/// Size cap for the dense characteristic-polynomial oracle.
const ORACLE_MAX_N: usize = 64;

/// Magnitude guard for the Faddeev-LeVerrier recursion.
const ORACLE_OVERFLOW: f64 = 1e300;

/// General class member: complex couplings, one complex diagonal corner.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicMatrixGeneral {
    n: usize,
    /// Real diagonal entries at sites 1..n-1.
    c: Vec<f64>,
    /// b[0..n-2] couple adjacent sites; b[n-1] is the ring-closing coupling.
    b: Vec<Complex64>,
    /// Complex diagonal entry at site n.
    a_n: Complex64,
}

/// Subclass member: real chain couplings, complex ring coupling and corner.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicMatrixHat {
    n: usize,
    c: Vec<f64>,
    /// Nonzero real couplings at sites 1..n-1.
    b: Vec<f64>,
    /// Ring-closing coupling; nonzero complex.
    b_n: Complex64,
    a_n: Complex64,
}

/// Product of all couplings with a realness classification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Beta {
    pub value: Complex64,
    /// True when |Im value| <= REAL_REL_TOL * |value|.
    pub is_real: bool,
}

impl Beta {
    pub fn classify(value: Complex64) -> Self {
        Self {
            value,
            is_real: value.im.abs() <= REAL_REL_TOL * value.norm(),
        }
    }
}

fn check_site_count(n: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::InvalidMatrix(format!(
            "ring needs at least 3 sites, got {n}"
        )));
    }
    Ok(())
}

impl PeriodicMatrixGeneral {
    pub fn new(c: Vec<f64>, b: Vec<Complex64>, a_n: Complex64) -> Result<Self> {
        let n = b.len();
        check_site_count(n)?;
        if c.len() != n - 1 {
            return Err(Error::InvalidMatrix(format!(
                "expected {} diagonal entries for {} couplings, got {}",
                n - 1,
                n,
                c.len()
            )));
        }
        if let Some(i) = c.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidMatrix(format!("c[{}] is not finite", i + 1)));
        }
        for (i, bi) in b.iter().enumerate() {
            if !bi.re.is_finite() || !bi.im.is_finite() {
                return Err(Error::InvalidMatrix(format!("b[{}] is not finite", i + 1)));
            }
            if bi.norm() == 0.0 {
                return Err(Error::InvalidMatrix(format!(
                    "b[{}] must be nonzero",
                    i + 1
                )));
            }
        }
        if !a_n.re.is_finite() || !a_n.im.is_finite() {
            return Err(Error::InvalidMatrix("a_n is not finite".into()));
        }
        Ok(Self { n, c, b, a_n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn b(&self) -> &[Complex64] {
        &self.b
    }

    pub fn a_n(&self) -> Complex64 {
        self.a_n
    }

    /// Product of all n couplings, including the ring-closing one.
    pub fn beta(&self) -> Beta {
        Beta::classify(self.b.iter().product())
    }

    /// Sign-and-phase normal form: chain couplings replaced by their moduli,
    /// the ring coupling rescaled so the coupling product is unchanged.
    /// Preserves the spectrum and the submatrix spectrum.
    pub fn canonicalize(&self) -> PeriodicMatrixHat {
        let moduli: Vec<f64> = self.b[..self.n - 1].iter().map(|b| b.norm()).collect();
        let chain: f64 = moduli.iter().product();
        let b_n = self.beta().value / chain;
        PeriodicMatrixHat {
            n: self.n,
            c: self.c.clone(),
            b: moduli,
            b_n,
            a_n: self.a_n,
        }
    }

    /// Dense row-major materialization, for oracles and tests.
    pub fn to_dense(&self) -> Vec<Vec<Complex64>> {
        let n = self.n;
        let zero = Complex64::new(0.0, 0.0);
        let mut m = vec![vec![zero; n]; n];
        for (i, &ci) in self.c.iter().enumerate() {
            m[i][i] = Complex64::new(ci, 0.0);
        }
        m[n - 1][n - 1] = self.a_n;
        for i in 0..n - 1 {
            m[i][i + 1] = self.b[i];
            m[i + 1][i] = self.b[i].conj();
        }
        m[0][n - 1] = self.b[n - 1].conj();
        m[n - 1][0] = self.b[n - 1];
        m
    }
}

impl PeriodicMatrixHat {
    pub fn new(c: Vec<f64>, b: Vec<f64>, b_n: Complex64, a_n: Complex64) -> Result<Self> {
        let n = b.len() + 1;
        check_site_count(n)?;
        if c.len() != n - 1 {
            return Err(Error::InvalidMatrix(format!(
                "expected {} diagonal entries, got {}",
                n - 1,
                c.len()
            )));
        }
        if let Some(i) = c.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidMatrix(format!("c[{}] is not finite", i + 1)));
        }
        for (i, &bi) in b.iter().enumerate() {
            if !bi.is_finite() {
                return Err(Error::InvalidMatrix(format!("b[{}] is not finite", i + 1)));
            }
            if bi == 0.0 {
                return Err(Error::InvalidMatrix(format!(
                    "b[{}] must be nonzero",
                    i + 1
                )));
            }
        }
        if !b_n.re.is_finite() || !b_n.im.is_finite() || b_n.norm() == 0.0 {
            return Err(Error::InvalidMatrix(
                "ring coupling b_n must be finite and nonzero".into(),
            ));
        }
        if !a_n.re.is_finite() || !a_n.im.is_finite() {
            return Err(Error::InvalidMatrix("a_n is not finite".into()));
        }
        Ok(Self { n, c, b, b_n, a_n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn b_n(&self) -> Complex64 {
        self.b_n
    }

    pub fn a_n(&self) -> Complex64 {
        self.a_n
    }

    pub fn beta(&self) -> Beta {
        let chain: f64 = self.b.iter().product();
        Beta::classify(self.b_n * chain)
    }

    /// Largest entry difference against another canonical matrix, relative
    /// to the larger entry scale. Panics unless sizes match.
    pub fn entry_distance(&self, other: &Self) -> f64 {
        assert_eq!(self.n, other.n, "size mismatch");
        let mut worst = 0.0f64;
        let mut scale = 1.0f64;
        for (x, y) in self.c.iter().zip(&other.c) {
            worst = worst.max((x - y).abs());
            scale = scale.max(x.abs()).max(y.abs());
        }
        for (x, y) in self.b.iter().zip(&other.b) {
            worst = worst.max((x - y).abs());
            scale = scale.max(x.abs()).max(y.abs());
        }
        worst = worst.max((self.b_n - other.b_n).norm());
        worst = worst.max((self.a_n - other.a_n).norm());
        scale = scale
            .max(self.b_n.norm())
            .max(other.b_n.norm())
            .max(self.a_n.norm())
            .max(other.a_n.norm());
        worst / scale
    }

    /// View as a general class member; all operations on the general class
    /// apply unchanged.
    pub fn embed(&self) -> PeriodicMatrixGeneral {
        let mut b: Vec<Complex64> = self.b.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        b.push(self.b_n);
        PeriodicMatrixGeneral {
            n: self.n,
            c: self.c.clone(),
            b,
            a_n: self.a_n,
        }
    }
}

/// Characteristic polynomial det(zI - M) by the Faddeev-LeVerrier recursion
/// on the dense matrix. Exercises none of the structured spectral machinery,
/// so it serves as an independent oracle for it.
pub fn charpoly_oracle(m: &PeriodicMatrixGeneral) -> Result<ComplexPolynomial> {
    let n = m.n();
    if n > ORACLE_MAX_N {
        return Err(Error::InvalidMatrix(format!(
            "dense characteristic-polynomial oracle supports n <= {ORACLE_MAX_N}, got {n}"
        )));
    }
    let a = m.to_dense();
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);

    let mut coeffs = vec![one];
    let mut work: Vec<Vec<Complex64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { one } else { zero }).collect())
        .collect();
    let mut trace = zero;
    for i in 0..n {
        for k in 0..n {
            trace += a[i][k] * work[k][i];
        }
    }
    coeffs.push(-trace);

    for step in 2..=n {
        let prev = *coeffs.last().unwrap();
        // work <- A * work + prev * I
        let mut next = vec![vec![zero; n]; n];
        for i in 0..n {
            for k in 0..n {
                let aik = a[i][k];
                if aik == zero {
                    continue;
                }
                for j in 0..n {
                    next[i][j] += aik * work[k][j];
                }
            }
            next[i][i] += prev;
        }
        work = next;
        let mut tr = zero;
        for i in 0..n {
            for k in 0..n {
                tr += a[i][k] * work[k][i];
            }
        }
        let ck = -tr / step as f64;
        if !ck.re.is_finite()
            || !ck.im.is_finite()
            || ck.norm() > ORACLE_OVERFLOW
            || work
                .iter()
                .flatten()
                .any(|w| !w.re.is_finite() || !w.im.is_finite() || w.norm() > ORACLE_OVERFLOW)
        {
            return Err(Error::OracleOverflow);
        }
        coeffs.push(ck);
    }
    Ok(ComplexPolynomial::new(coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c64(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn worked_matrix(a_n: Complex64) -> PeriodicMatrixGeneral {
        PeriodicMatrixGeneral::new(
            vec![0.0, 0.0],
            vec![c64(1.0, 0.0), c64(1.0, 0.0), c64(0.0, 1.0)],
            a_n,
        )
        .unwrap()
    }

    #[test]
    fn validation_rejects_bad_inputs() {
        // Too few sites.
        assert!(matches!(
            PeriodicMatrixGeneral::new(vec![0.0], vec![c64(1.0, 0.0); 2], c64(0.0, 0.0)),
            Err(Error::InvalidMatrix(_))
        ));
        // Zero coupling, reported with its 1-based position.
        let err = PeriodicMatrixGeneral::new(
            vec![0.0, 0.0],
            vec![c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 1.0)],
            c64(0.0, 0.0),
        )
        .unwrap_err();
        assert!(err.to_string().contains("b[2]"), "{err}");
        // Non-finite diagonal.
        assert!(PeriodicMatrixGeneral::new(
            vec![f64::NAN, 0.0],
            vec![c64(1.0, 0.0); 3],
            c64(0.0, 0.0)
        )
        .is_err());
        // Length mismatch.
        assert!(
            PeriodicMatrixGeneral::new(vec![0.0], vec![c64(1.0, 0.0); 3], c64(0.0, 0.0)).is_err()
        );
    }

    #[test]
    fn beta_products() {
        let m = worked_matrix(c64(0.0, 0.0));
        let beta = m.beta();
        assert_eq!(beta.value, c64(0.0, 1.0));
        assert!(!beta.is_real);

        let m2 = PeriodicMatrixGeneral::new(
            vec![0.0, 0.0],
            vec![c64(0.0, 2.0), c64(3.0, 0.0), c64(-1.0, 0.0)],
            c64(0.0, 0.0),
        )
        .unwrap();
        assert_eq!(m2.beta().value, c64(0.0, -6.0));

        let m3 = PeriodicMatrixGeneral::new(
            vec![0.0, 0.0],
            vec![c64(1.0, 1.0), c64(1.0, -1.0), c64(1.0, 0.0)],
            c64(0.0, 0.0),
        )
        .unwrap();
        let beta3 = m3.beta();
        assert_eq!(beta3.value, c64(2.0, 0.0));
        assert!(beta3.is_real);
    }

    #[test]
    fn dense_layout() {
        let m = worked_matrix(c64(0.5, -0.5));
        let d = m.to_dense();
        assert_eq!(d[0][2], c64(0.0, -1.0)); // conj(b_n) in the corner
        assert_eq!(d[2][0], c64(0.0, 1.0)); // b_n below
        assert_eq!(d[0][1], c64(1.0, 0.0));
        assert_eq!(d[1][0], c64(1.0, 0.0));
        assert_eq!(d[2][2], c64(0.5, -0.5));
    }

    #[test]
    fn canonicalize_fixes_hat_members() {
        let hat =
            PeriodicMatrixHat::new(vec![0.0, 0.0], vec![1.0, 1.0], c64(0.0, 1.0), c64(0.0, 0.0))
                .unwrap();
        let again = hat.embed().canonicalize();
        assert_eq!(again, hat);
    }

    #[test]
    fn canonicalize_moves_phases_into_ring_coupling() {
        let m = PeriodicMatrixGeneral::new(
            vec![0.0, 0.0],
            vec![c64(0.0, 1.0), c64(-1.0, 0.0), c64(1.0, 0.0)],
            c64(0.0, 0.0),
        )
        .unwrap();
        let hat = m.canonicalize();
        assert_eq!(hat.b(), &[1.0, 1.0]);
        assert!((hat.b_n() - c64(0.0, -1.0)).norm() <= 1e-15);
        assert_eq!(hat.beta().value, m.beta().value);

        let m2 = PeriodicMatrixGeneral::new(
            vec![0.0, 0.0],
            vec![c64(0.0, 2.0), c64(3.0, 0.0), c64(-1.0, 0.0)],
            c64(0.0, 0.0),
        )
        .unwrap();
        let hat2 = m2.canonicalize();
        assert_eq!(hat2.b(), &[2.0, 3.0]);
        assert!((hat2.b_n() - c64(0.0, -1.0)).norm() <= 1e-15);
    }

    #[test]
    fn oracle_on_worked_ring() {
        let p = charpoly_oracle(&worked_matrix(c64(0.0, 0.0))).unwrap();
        let expected = [c64(1.0, 0.0), c64(0.0, 0.0), c64(-3.0, 0.0), c64(0.0, 0.0)];
        for (got, want) in p.coeffs().iter().zip(&expected) {
            assert!((got - want).norm() <= 1e-12, "{got} vs {want}");
        }

        let p_shifted = charpoly_oracle(&worked_matrix(c64(0.0, 1.0))).unwrap();
        let expected = [c64(1.0, 0.0), c64(0.0, -1.0), c64(-3.0, 0.0), c64(0.0, 1.0)];
        for (got, want) in p_shifted.coeffs().iter().zip(&expected) {
            assert!((got - want).norm() <= 1e-12, "{got} vs {want}");
        }
    }

    /// Dense determinant via complex LU with partial pivoting; independent of
    /// the Faddeev-LeVerrier recursion.
    fn det_dense(mut a: Vec<Vec<Complex64>>) -> Complex64 {
        let n = a.len();
        let mut det = Complex64::new(1.0, 0.0);
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| a[i][col].norm().partial_cmp(&a[j][col].norm()).unwrap())
                .unwrap();
            if a[pivot][col].norm() == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            if pivot != col {
                a.swap(pivot, col);
                det = -det;
            }
            det *= a[col][col];
            let pivot_row = a[col].clone();
            for row in a.iter_mut().skip(col + 1) {
                let factor = row[col] / pivot_row[col];
                for (entry, &upper) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                    *entry -= factor * upper;
                }
            }
        }
        det
    }

    #[test]
    fn oracle_matches_interpolated_determinant() {
        let m = PeriodicMatrixGeneral::new(
            vec![0.3, -1.1, 0.7],
            vec![c64(1.0, 0.5), c64(-0.4, 0.9), c64(0.8, -0.2), c64(0.1, 1.3)],
            c64(0.25, 0.75),
        )
        .unwrap();
        let p = charpoly_oracle(&m).unwrap();
        let n = m.n();

        // Interpolate det(zI - M) from n+1 samples.
        let samples: Vec<f64> = (0..=n).map(|k| -2.0 + k as f64).collect();
        let values: Vec<Complex64> = samples
            .iter()
            .map(|&s| {
                let mut shifted = m.to_dense();
                for (i, row) in shifted.iter_mut().enumerate() {
                    for (j, entry) in row.iter_mut().enumerate() {
                        *entry = -*entry;
                        if i == j {
                            *entry += c64(s, 0.0);
                        }
                    }
                }
                det_dense(shifted)
            })
            .collect();
        let mut interp = ComplexPolynomial::new(vec![Complex64::new(0.0, 0.0)]);
        for (k, &sk) in samples.iter().enumerate() {
            let others: Vec<Complex64> = samples
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .map(|(_, &s)| c64(s, 0.0))
                .collect();
            let basis = ComplexPolynomial::from_roots(&others);
            let denom = basis.eval(c64(sk, 0.0));
            interp = interp.sub(&basis.scale(-values[k] / denom));
        }

        assert_eq!(interp.degree(), p.degree());
        let scale = p.coeff_scale();
        for (got, want) in p.coeffs().iter().zip(interp.coeffs()) {
            assert!(
                (got - want).norm() <= 1e-9 * scale.max(1.0),
                "{got} vs {want}"
            );
        }
    }

    #[test]
    fn oracle_rejects_oversized_input() {
        let n = 65;
        let m = PeriodicMatrixGeneral::new(vec![0.0; n - 1], vec![c64(1.0, 0.0); n], c64(0.0, 0.0))
            .unwrap();
        assert!(matches!(charpoly_oracle(&m), Err(Error::InvalidMatrix(_))));
    }
}
