//! Dense complex linear algebra: adjoints, Hermitian eigendecomposition,
//! spectral norms, PSD square roots, matrix absolute values and power
//! functions of Hermitian arguments.
//!
//! Every operator in the crate is a [`ComplexMatrix`]. Eigen-solves and the
//! SVD are delegated to `nalgebra`; everything layered on top of them
//! (clamping, the `|A| = (A*A)^{1/2}` construction, spectral calculus) lives
//! here.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Column vector of complex entries.
pub type CVector = DVector<Complex64>;

/// Relative tolerance on `‖H − H*‖_F / ‖H‖_F` for Hermitian inputs.
pub const TOL_SYM: f64 = 1e-10;
/// Relative tolerance below zero tolerated (and clamped) for PSD inputs.
pub const TOL_PSD: f64 = 1e-10;
/// `A` counts as hyponormal when `λ_min(A*A − AA*) ≥ −HYPONORMAL_TOL · ‖A‖²`.
pub const HYPONORMAL_TOL: f64 = 1e-10;
/// Relative singular-value floor for the invertibility gate.
pub const TOL_INV: f64 = 1e-10;

/// Dense square complex matrix with finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    inner: DMatrix<Complex64>,
}

impl ComplexMatrix {
    /// Wrap an nalgebra matrix, checking shape and finiteness.
    pub fn from_dmatrix(inner: DMatrix<Complex64>) -> Result<Self> {
        if inner.nrows() != inner.ncols() {
            return Err(Error::NotSquare {
                rows: inner.nrows(),
                row: 0,
                cols: inner.ncols(),
            });
        }
        if inner.nrows() == 0 {
            return Err(Error::InvalidArgument("matrix dimension must be positive".into()));
        }
        for j in 0..inner.ncols() {
            for i in 0..inner.nrows() {
                let z = inner[(i, j)];
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(Self { inner })
    }

    /// Build from complex rows. Rejects ragged or non-square data.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NotSquare {
                    rows: n,
                    row: i,
                    cols: row.len(),
                });
            }
        }
        Self::from_dmatrix(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    /// Build from real rows, e.g. `from_real(&[&[2.0, 1.0], &[0.0, 4.0]])`.
    pub fn from_real(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_unchecked(DMatrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        Self::from_unchecked(DMatrix::identity(n, n))
    }

    pub fn diagonal(d: &[Complex64]) -> Self {
        Self::from_unchecked(DMatrix::from_diagonal(&DVector::from_column_slice(d)))
    }

    pub fn real_diagonal(d: &[f64]) -> Self {
        let d: Vec<Complex64> = d.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::diagonal(&d)
    }

    pub(crate) fn from_unchecked(inner: DMatrix<Complex64>) -> Self {
        debug_assert_eq!(inner.nrows(), inner.ncols());
        Self { inner }
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.inner[(row, col)]
    }

    pub fn as_dmatrix(&self) -> &DMatrix<Complex64> {
        &self.inner
    }

    pub fn into_dmatrix(self) -> DMatrix<Complex64> {
        self.inner
    }

    /// Row-major copy of the entries.
    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.inner[(i, j)]).collect())
            .collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_unchecked(self.inner.adjoint())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::from_unchecked(&self.inner * c)
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    pub fn mul_vec(&self, x: &CVector) -> CVector {
        &self.inner * x
    }

    /// `⟨Ax, x⟩ = x* A x`.
    pub fn quad_form(&self, x: &CVector) -> Complex64 {
        x.dotc(&(&self.inner * x))
    }

    pub fn trace(&self) -> Complex64 {
        self.inner.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner.norm()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        self.inner
            .iter()
            .zip(other.inner.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.inner.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    /// `(H + H*) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_unchecked((&self.inner + self.inner.adjoint()) * Complex64::new(0.5, 0.0))
    }
}

impl fmt::Display for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim() {
            let row: Vec<String> = (0..self.dim())
                .map(|j| {
                    let z = self.inner[(i, j)];
                    format!("{:.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: Self) -> ComplexMatrix {
        ComplexMatrix::from_unchecked(&self.inner + &rhs.inner)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: Self) -> ComplexMatrix {
        ComplexMatrix::from_unchecked(&self.inner - &rhs.inner)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: Self) -> ComplexMatrix {
        ComplexMatrix::from_unchecked(&self.inner * &rhs.inner)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix::from_unchecked(-&self.inner)
    }
}

/// Spectral decomposition `H = V diag(λ) V*` of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEig {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Unitary; column `k` belongs to `eigenvalues[k]`.
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEig {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().expect("empty decomposition")
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn eigenvector(&self, k: usize) -> CVector {
        self.eigenvectors.as_dmatrix().column(k).into_owned()
    }

    /// `V diag(f(λ)) V*`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let v = self.eigenvectors.as_dmatrix();
        let mut scaled = v.clone();
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            let fk = Complex64::new(f(lambda), 0.0);
            for i in 0..scaled.nrows() {
                scaled[(i, k)] *= fk;
            }
        }
        ComplexMatrix::from_unchecked(scaled * v.adjoint())
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_spectrum(|l| l)
    }
}

/// Scalar functions admitted by the spectral calculus: `t ↦ t^r`, `1 ≤ r ≤ 2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ScalarFn {
    Identity,
    Power(f64),
}

impl ScalarFn {
    pub fn power(r: f64) -> Result<Self> {
        if !(1.0..=2.0).contains(&r) {
            return Err(Error::BadExponent(r));
        }
        Ok(ScalarFn::Power(r))
    }

    pub fn exponent(&self) -> f64 {
        match *self {
            ScalarFn::Identity => 1.0,
            ScalarFn::Power(r) => r,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            ScalarFn::Identity => t,
            ScalarFn::Power(r) if r == 1.0 => t,
            ScalarFn::Power(r) if r == 2.0 => t * t,
            ScalarFn::Power(r) => t.powf(r),
        }
    }
}

impl fmt::Display for ScalarFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarFn::Identity => write!(f, "identity"),
            ScalarFn::Power(r) => write!(f, "power:{r}"),
        }
    }
}

impl FromStr for ScalarFn {
    type Err = Error;

    /// Accepts `identity` or `power:R`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "identity" {
            return Ok(ScalarFn::Identity);
        }
        let r = s
            .strip_prefix("power:")
            .ok_or_else(|| Error::Parse(format!("unknown scalar function `{s}`")))?;
        let r: f64 = r
            .parse()
            .map_err(|_| Error::Parse(format!("bad exponent in `{s}`")))?;
        ScalarFn::power(r)
    }
}

/// Conjugate transpose.
pub fn adjoint(a: &ComplexMatrix) -> ComplexMatrix {
    a.adjoint()
}

fn checked_hermitian(h: &ComplexMatrix) -> Result<DMatrix<Complex64>> {
    let m = h.as_dmatrix();
    let asymmetry = (m - m.adjoint()).norm();
    let threshold = TOL_SYM * m.norm();
    if asymmetry > threshold {
        return Err(Error::NotHermitian { asymmetry, threshold });
    }
    Ok((m + m.adjoint()) * Complex64::new(0.5, 0.0))
}

fn eig_symmetrized(m: DMatrix<Complex64>) -> Result<HermitianEig> {
    let n = m.nrows();
    let eig = SymmetricEigen::try_new(m, f64::EPSILON, 1000 * n.max(1))
        .ok_or(Error::ConvergenceFailure { dim: n })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(HermitianEig {
        eigenvalues,
        eigenvectors: ComplexMatrix::from_unchecked(eigenvectors),
    })
}

/// Eigendecomposition of a Hermitian matrix; the input is symmetrized as
/// `(H + H*)/2` after the asymmetry check.
pub fn hermitian_eig(h: &ComplexMatrix) -> Result<HermitianEig> {
    eig_symmetrized(checked_hermitian(h)?)
}

/// `A*A`, symmetrized.
pub(crate) fn gram(a: &ComplexMatrix) -> ComplexMatrix {
    (&a.adjoint() * a).hermitian_part()
}

/// `AA*`, symmetrized.
pub(crate) fn co_gram(a: &ComplexMatrix) -> ComplexMatrix {
    (a * &a.adjoint()).hermitian_part()
}

/// Largest eigenvalue of a Hermitian matrix.
pub fn lambda_max(h: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eig(h)?.max_eigenvalue())
}

/// Largest singular value, computed as `sqrt(λ_max(A*A))`.
pub fn spectral_norm(a: &ComplexMatrix) -> f64 {
    if a.is_zero() {
        return 0.0;
    }
    let eig = eig_symmetrized(gram(a).into_dmatrix())
        .expect("Hermitian eigensolver failed on a Gram matrix");
    eig.max_eigenvalue().max(0.0).sqrt()
}

/// Singular values in descending order.
pub fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    let svd = a.as_dmatrix().clone().svd(false, false);
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

pub fn smallest_singular_value(a: &ComplexMatrix) -> f64 {
    *singular_values(a).last().expect("empty matrix")
}

/// Fails with [`Error::NotInvertible`] when `σ_min < TOL_INV · ‖A‖`.
pub fn check_invertible(a: &ComplexMatrix) -> Result<f64> {
    let s = singular_values(a);
    let sigma_min = *s.last().expect("empty matrix");
    let threshold = TOL_INV * s[0];
    if sigma_min < threshold || sigma_min == 0.0 {
        return Err(Error::NotInvertible { sigma_min, threshold });
    }
    Ok(sigma_min)
}

/// Decompose a nominally PSD matrix, clamping eigenvalues in
/// `[−TOL_PSD·‖H‖, 0)` to zero.
pub fn psd_eig(h: &ComplexMatrix) -> Result<HermitianEig> {
    let mut eig = hermitian_eig(h)?;
    let scale = eig
        .eigenvalues
        .iter()
        .fold(0.0_f64, |acc, l| acc.max(l.abs()));
    let threshold = TOL_PSD * scale;
    let min = eig.min_eigenvalue();
    if min < -threshold {
        return Err(Error::NotPsd {
            min_eigenvalue: min,
            threshold: -threshold,
        });
    }
    for l in &mut eig.eigenvalues {
        if *l < 0.0 {
            *l = 0.0;
        }
    }
    Ok(eig)
}

/// Hermitian PSD square root.
pub fn sqrt_psd(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(psd_eig(h)?.map_spectrum(f64::sqrt))
}

/// `H^r` for PSD `H` and any `r ≥ 0` (`H^0 = I`). Used by the norm-power
/// primitive, whose exponents lie in `[0, 1]`.
pub fn psd_power(h: &ComplexMatrix, r: f64) -> Result<ComplexMatrix> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::BadExponent(r));
    }
    Ok(psd_eig(h)?.map_spectrum(|l| if r == 1.0 { l } else { l.powf(r) }))
}

/// `|A| = (A*A)^{1/2}`.
pub fn abs_value(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.is_zero() {
        return Ok(ComplexMatrix::zeros(a.dim()));
    }
    sqrt_psd(&gram(a))
}

/// `f(H)` via the spectral decomposition of a PSD `H`.
pub fn apply_fn_psd(h: &ComplexMatrix, f: ScalarFn) -> Result<ComplexMatrix> {
    Ok(psd_eig(h)?.map_spectrum(|l| f.eval(l)))
}

/// `λ_min(A*A − AA*)`; non-negative exactly when `A` is hyponormal.
pub fn hyponormality_defect(a: &ComplexMatrix) -> f64 {
    let commutator = &gram(a) - &co_gram(a);
    eig_symmetrized(commutator.hermitian_part().into_dmatrix())
        .expect("Hermitian eigensolver failed on a self-commutator")
        .min_eigenvalue()
}

pub fn is_hyponormal(a: &ComplexMatrix) -> bool {
    let norm = spectral_norm(a);
    hyponormality_defect(a) >= -HYPONORMAL_TOL * norm * norm
}

/// Eigenvalues and unit eigenvectors of a general square matrix.
#[derive(Clone, Debug)]
pub struct GeneralEig {
    pub values: Vec<Complex64>,
    pub vectors: Vec<CVector>,
}

/// Eigenpairs of an arbitrary complex matrix from its Schur form `A = Q T Q*`,
/// with eigenvectors of `T` obtained by back substitution.
pub fn general_eig(a: &ComplexMatrix) -> Result<GeneralEig> {
    let n = a.dim();
    let schur = nalgebra::Schur::try_new(a.as_dmatrix().clone(), f64::EPSILON, 1000 * n.max(1))
        .ok_or(Error::ConvergenceFailure { dim: n })?;
    let (q, t) = schur.unpack();
    let small = f64::EPSILON * t.norm().max(f64::MIN_POSITIVE);
    let values: Vec<Complex64> = (0..n).map(|k| t[(k, k)]).collect();
    let mut vectors = Vec::with_capacity(n);
    for k in 0..n {
        let mut y = CVector::zeros(n);
        y[k] = Complex64::new(1.0, 0.0);
        for j in (0..k).rev() {
            let mut acc = Complex64::new(0.0, 0.0);
            for l in (j + 1)..=k {
                acc += t[(j, l)] * y[l];
            }
            let mut denom = t[(j, j)] - values[k];
            if denom.norm() < small {
                denom = Complex64::new(small, 0.0);
            }
            y[j] = -acc / denom;
        }
        let x = &q * y;
        let norm = x.norm();
        vectors.push(x / Complex64::new(norm, 0.0));
    }
    Ok(GeneralEig { values, vectors })
}

/// Normalize a nonzero vector.
pub fn normalized(x: &CVector) -> CVector {
    let n = x.norm();
    x / Complex64::new(n, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn nilpotent() -> ComplexMatrix {
        ComplexMatrix::from_real(&[&[0.0, 0.0], &[3.0, 0.0]]).unwrap()
    }

    fn upper() -> ComplexMatrix {
        ComplexMatrix::from_real(&[&[2.0, 1.0], &[0.0, 4.0]]).unwrap()
    }

    #[test]
    fn adjoint_examples() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(adjoint(&i2), i2);
        let expected = ComplexMatrix::from_real(&[&[0.0, 3.0], &[0.0, 0.0]]).unwrap();
        assert_eq!(adjoint(&nilpotent()), expected);
        let a = ComplexMatrix::diagonal(&[c(0.0, 1.0), c(0.0, 0.0)]);
        assert_eq!(adjoint(&a), ComplexMatrix::diagonal(&[c(0.0, -1.0), c(0.0, 0.0)]));
        assert_eq!(adjoint(&adjoint(&upper())), upper());
    }

    #[test]
    fn rejects_bad_shapes_and_values() {
        let ragged = vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(1.0, 0.0)]];
        assert!(matches!(ComplexMatrix::from_rows(&ragged), Err(Error::NotSquare { .. })));
        let nan = vec![vec![c(f64::NAN, 0.0)]];
        assert!(matches!(ComplexMatrix::from_rows(&nan), Err(Error::NonFinite { .. })));
        assert!(ComplexMatrix::from_rows(&[]).is_err());
    }

    #[test]
    fn eig_of_diagonal_and_pauli() {
        let e = hermitian_eig(&ComplexMatrix::real_diagonal(&[4.0, 9.0])).unwrap();
        assert_eq!(e.eigenvalues, vec![4.0, 9.0]);
        assert!(e.eigenvectors.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);

        let x = ComplexMatrix::from_real(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let e = hermitian_eig(&x).unwrap();
        assert_abs_diff_eq!(e.eigenvalues[0], -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e.eigenvalues[1], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn eig_of_gram_matches_characteristic_polynomial() {
        // A*A = [[4, 2], [2, 17]]: λ² − 21λ + 64 = 0.
        let expected = (21.0 + 185f64.sqrt()) / 2.0;
        let e = hermitian_eig(&gram(&upper())).unwrap();
        assert_abs_diff_eq!(e.max_eigenvalue(), expected, epsilon = 1e-12);
        assert_abs_diff_eq!(expected, 17.3007, epsilon = 1e-4);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        assert!(matches!(hermitian_eig(&upper()), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn spectral_norm_examples() {
        // ‖A‖² is the larger root of λ² − 21λ + 64.
        let expected = ((21.0 + 185f64.sqrt()) / 2.0).sqrt();
        assert_abs_diff_eq!(spectral_norm(&upper()), expected, epsilon = 1e-12);
        assert_abs_diff_eq!(spectral_norm(&upper()), 4.1594, epsilon = 5e-5);
        assert_eq!(spectral_norm(&ComplexMatrix::zeros(3)), 0.0);
        let h = 0.5f64.sqrt();
        let u = ComplexMatrix::from_rows(&[vec![c(h, 0.0), c(0.0, h)], vec![c(0.0, h), c(h, 0.0)]]).unwrap();
        assert_abs_diff_eq!(spectral_norm(&u), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn sqrt_examples() {
        let s = sqrt_psd(&ComplexMatrix::real_diagonal(&[4.0, 9.0])).unwrap();
        assert!(s.max_abs_diff(&ComplexMatrix::real_diagonal(&[2.0, 3.0])) < 1e-15);
        let s = sqrt_psd(&ComplexMatrix::identity(3)).unwrap();
        assert!(s.max_abs_diff(&ComplexMatrix::identity(3)) < 1e-15);
        let s = sqrt_psd(&gram(&nilpotent())).unwrap();
        assert!(s.max_abs_diff(&ComplexMatrix::real_diagonal(&[3.0, 0.0])) < 1e-14);
    }

    #[test]
    fn sqrt_rejects_indefinite_but_clamps_roundoff() {
        let bad = ComplexMatrix::real_diagonal(&[1.0, -0.5]);
        assert!(matches!(sqrt_psd(&bad), Err(Error::NotPsd { .. })));
        let tiny = ComplexMatrix::real_diagonal(&[1.0, -1e-13]);
        let s = sqrt_psd(&tiny).unwrap();
        assert_eq!(s.entry(1, 1), c(0.0, 0.0));
    }

    #[test]
    fn abs_value_examples() {
        let a = nilpotent();
        let abs_a = abs_value(&a).unwrap();
        let abs_adj = abs_value(&adjoint(&a)).unwrap();
        assert!(abs_a.max_abs_diff(&ComplexMatrix::real_diagonal(&[3.0, 0.0])) < 1e-14);
        assert!(abs_adj.max_abs_diff(&ComplexMatrix::real_diagonal(&[0.0, 3.0])) < 1e-14);

        let h = ComplexMatrix::from_rows(&[vec![c(2.0, 0.0), c(0.5, 0.5)], vec![c(0.5, -0.5), c(1.0, 0.0)]]).unwrap();
        assert!(abs_value(&h).unwrap().max_abs_diff(&h) < 1e-14);

        let d = ComplexMatrix::real_diagonal(&[-2.0, 3.0]);
        assert!(abs_value(&d).unwrap().max_abs_diff(&ComplexMatrix::real_diagonal(&[2.0, 3.0])) < 1e-14);
        assert!(abs_value(&ComplexMatrix::zeros(2)).unwrap().is_zero());
    }

    #[test]
    fn apply_fn_examples() {
        let d = ComplexMatrix::real_diagonal(&[4.0, 9.0]);
        let sq = apply_fn_psd(&d, ScalarFn::power(2.0).unwrap()).unwrap();
        assert!(sq.max_abs_diff(&ComplexMatrix::real_diagonal(&[16.0, 81.0])) < 1e-12);
        let p = apply_fn_psd(&d, ScalarFn::power(1.5).unwrap()).unwrap();
        assert!(p.max_abs_diff(&ComplexMatrix::real_diagonal(&[8.0, 27.0])) < 1e-12);
        let id = apply_fn_psd(&d, ScalarFn::Identity).unwrap();
        let one = apply_fn_psd(&d, ScalarFn::power(1.0).unwrap()).unwrap();
        assert_eq!(id, one);
        assert!(id.max_abs_diff(&d) < 1e-14);
    }

    #[test]
    fn scalar_fn_window() {
        assert!(matches!(ScalarFn::power(0.5), Err(Error::BadExponent(_))));
        assert!(matches!(ScalarFn::power(2.5), Err(Error::BadExponent(_))));
        assert_eq!("power:1.5".parse::<ScalarFn>().unwrap(), ScalarFn::Power(1.5));
        assert_eq!("identity".parse::<ScalarFn>().unwrap(), ScalarFn::Identity);
        assert!("power:3".parse::<ScalarFn>().is_err());
    }

    #[test]
    fn hyponormality_examples() {
        assert_abs_diff_eq!(hyponormality_defect(&nilpotent()), -9.0, epsilon = 1e-12);
        assert_abs_diff_eq!(hyponormality_defect(&ComplexMatrix::identity(3)), 0.0, epsilon = 1e-15);
        let normal = ComplexMatrix::diagonal(&[c(1.0, 2.0), c(-3.0, 0.5)]);
        assert_abs_diff_eq!(hyponormality_defect(&normal), 0.0, epsilon = 1e-13);
        assert!(is_hyponormal(&normal));
        assert!(!is_hyponormal(&nilpotent()));
    }

    #[test]
    fn general_eig_of_triangular() {
        let e = general_eig(&upper()).unwrap();
        let mut re: Vec<f64> = e.values.iter().map(|z| z.re).collect();
        re.sort_by(f64::total_cmp);
        assert_abs_diff_eq!(re[0], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(re[1], 4.0, epsilon = 1e-12);
        for (lambda, v) in e.values.iter().zip(&e.vectors) {
            let residual = upper().mul_vec(v) - v * *lambda;
            assert!(residual.norm() < 1e-12);
        }
    }

    #[test]
    fn invertibility_gate() {
        assert!(check_invertible(&upper()).is_ok());
        assert!(matches!(check_invertible(&nilpotent()), Err(Error::NotInvertible { .. })));
    }
}
