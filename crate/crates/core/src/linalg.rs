//! Dense complex linear algebra on the qubit-ancilla space `H ⊗ K`.
//!
//! Every composite index is qubit-major: basis vector `|q⟩ ⊗ |k⟩` sits at
//! position `q * d + k`, so `|z⟩⟨z| ⊗ 1_K` is a contiguous diagonal block.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const TOL_UNITARY: f64 = 1e-10;
pub const TOL_NORM: f64 = 1e-10;
pub const TOL_PROJECTOR: f64 = 1e-10;
pub const TOL_POSITIVE: f64 = 1e-10;
pub const TOL_PROB_SUM: f64 = 1e-9;
/// Eigenvalues and probabilities in `[-EIG_CLAMP, 0)` are treated as zero.
pub const EIG_CLAMP: f64 = 1e-12;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// A complex amplitude vector. Normalization is not enforced; see
/// [`StateVector::is_normalized`].
#[derive(Clone, PartialEq)]
pub struct StateVector(DVector<C64>);

/// A complex square matrix.
#[derive(Clone, PartialEq)]
pub struct OperatorMatrix(DMatrix<C64>);

impl fmt::Debug for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

impl fmt::Debug for OperatorMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<C64>> = (0..self.dim())
            .map(|i| self.0.row(i).iter().copied().collect())
            .collect();
        f.debug_list().entries(rows).finish()
    }
}

impl StateVector {
    pub fn from_amplitudes(amps: Vec<C64>) -> Self {
        StateVector(DVector::from_vec(amps))
    }

    pub fn from_real(amps: &[f64]) -> Self {
        StateVector(DVector::from_iterator(
            amps.len(),
            amps.iter().map(|&x| C64::new(x, 0.0)),
        ))
    }

    /// Computational basis vector `|index⟩` in dimension `dim`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = DVector::from_element(dim, ZERO);
        v[index] = ONE;
        StateVector(v)
    }

    pub fn zeros(dim: usize) -> Self {
        StateVector(DVector::from_element(dim, ZERO))
    }

    /// `|+⟩ = (|0⟩ + |1⟩)/√2`.
    pub fn plus() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::from_real(&[h, h])
    }

    /// `|−⟩ = (|0⟩ − |1⟩)/√2`.
    pub fn minus() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::from_real(&[h, -h])
    }

    /// Samples an unnormalized vector of independent complex Gaussians.
    pub fn random_gaussian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        StateVector(DVector::from_fn(dim, |_, _| complex_gaussian(rng)))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        self.0.as_slice()
    }

    pub fn as_vector(&self) -> &DVector<C64> {
        &self.0
    }

    pub fn norm_squared(&self) -> f64 {
        self.0.norm_squared()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_squared() - 1.0).abs() <= TOL_NORM
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.0.norm();
        if n <= EIG_CLAMP {
            return Err(Error::Degenerate("cannot normalize a zero vector".into()));
        }
        Ok(StateVector(self.0.unscale(n)))
    }

    /// `⟨self|other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.0.dotc(&other.0)
    }

    /// `⟨self|m|self⟩`.
    pub fn expectation(&self, m: &OperatorMatrix) -> C64 {
        self.0.dotc(&(&m.0 * &self.0))
    }

    /// `|self⟩⟨self|`.
    pub fn projector(&self) -> OperatorMatrix {
        OperatorMatrix(&self.0 * self.0.adjoint())
    }

    pub fn scale(&self, factor: C64) -> StateVector {
        StateVector(&self.0 * factor)
    }

    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        (&self.0 - &other.0)
            .iter()
            .fold(0.0, |m, z| m.max(z.norm()))
    }
}

impl OperatorMatrix {
    pub fn from_matrix(m: DMatrix<C64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        Ok(OperatorMatrix(m))
    }

    /// Builds a `dim × dim` operator from row-major entries.
    pub fn from_rows(dim: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::Dimension {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Ok(OperatorMatrix(DMatrix::from_row_slice(dim, dim, entries)))
    }

    pub fn from_real_rows(dim: usize, entries: &[f64]) -> Result<Self> {
        let c: Vec<C64> = entries.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_rows(dim, &c)
    }

    pub fn identity(dim: usize) -> Self {
        OperatorMatrix(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        OperatorMatrix(DMatrix::from_element(dim, dim, ZERO))
    }

    pub fn diagonal(entries: &[C64]) -> Self {
        OperatorMatrix(DMatrix::from_diagonal(&DVector::from_column_slice(entries)))
    }

    /// `|row⟩⟨col|` in dimension `dim`.
    pub fn matrix_unit(dim: usize, row: usize, col: usize) -> Self {
        let mut m = DMatrix::from_element(dim, dim, ZERO);
        m[(row, col)] = ONE;
        OperatorMatrix(m)
    }

    pub fn random_gaussian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        OperatorMatrix(DMatrix::from_fn(dim, dim, |_, _| complex_gaussian(rng)))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.0
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.0[(row, col)]
    }

    /// Row-major copy of the entries.
    pub fn to_rows(&self) -> Vec<Vec<C64>> {
        (0..self.dim())
            .map(|i| self.0.row(i).iter().copied().collect())
            .collect()
    }

    pub fn adjoint(&self) -> OperatorMatrix {
        OperatorMatrix(self.0.adjoint())
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn scale(&self, factor: C64) -> OperatorMatrix {
        OperatorMatrix(&self.0 * factor)
    }

    pub fn apply(&self, v: &StateVector) -> StateVector {
        StateVector(&self.0 * &v.0)
    }

    /// `m · self · m†`.
    pub fn conjugate_by(&self, m: &OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix(&m.0 * &self.0 * m.0.adjoint())
    }

    /// Largest entry modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &OperatorMatrix) -> f64 {
        (&self.0 - &other.0)
            .iter()
            .fold(0.0, |m, z| m.max(z.norm()))
    }

    /// `‖M†M − 1‖_max`.
    pub fn unitarity_deviation(&self) -> f64 {
        let g = self.0.adjoint() * &self.0;
        max_abs_diff_identity(&g)
    }

    /// `‖M − M†‖_max`.
    pub fn hermiticity_deviation(&self) -> f64 {
        (&self.0 - self.0.adjoint())
            .iter()
            .fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn is_unitary(&self) -> bool {
        self.unitarity_deviation() <= TOL_UNITARY
    }

    pub fn is_projector(&self) -> bool {
        let sq = &self.0 * &self.0;
        self.hermiticity_deviation() <= TOL_PROJECTOR
            && (&sq - &self.0).iter().all(|z| z.norm() <= TOL_PROJECTOR)
    }

    /// Hermitian with eigenvalues at least `-TOL_POSITIVE`.
    pub fn is_positive(&self) -> bool {
        self.hermiticity_deviation() <= TOL_POSITIVE
            && self
                .hermitian_eigenvalues()
                .iter()
                .all(|&l| l >= -TOL_POSITIVE)
    }

    pub fn is_density(&self) -> bool {
        self.is_positive() && (self.trace() - ONE).norm() <= TOL_NORM
    }

    pub fn check_unitary(&self, what: &str) -> Result<()> {
        let deviation = self.unitarity_deviation();
        if deviation <= TOL_UNITARY {
            Ok(())
        } else {
            Err(Error::Validation {
                what: what.to_string(),
                role: "unitary",
                deviation,
            })
        }
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = hermitian_part(&self.0)
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    /// Applies `f` to the spectrum of the Hermitian part:
    /// `Q diag(f(λ)) Q†`.
    pub fn hermitian_function<F: Fn(f64) -> C64>(&self, f: F) -> OperatorMatrix {
        let eig = hermitian_part(&self.0).symmetric_eigen();
        let q = &eig.eigenvectors;
        let d = DMatrix::from_diagonal(&eig.eigenvalues.map(f));
        OperatorMatrix(q * d * q.adjoint())
    }

    /// `exp(i·H)` for the Hermitian part `H` of `self`; exactly unitary up to
    /// eigensolver round-off.
    pub fn exp_i_hermitian(&self) -> OperatorMatrix {
        self.hermitian_function(|l| C64::from_polar(1.0, l))
    }
}

fn hermitian_part(m: &DMatrix<C64>) -> DMatrix<C64> {
    (m + m.adjoint()).scale(0.5)
}

fn max_abs_diff_identity(m: &DMatrix<C64>) -> f64 {
    let mut worst: f64 = 0.0;
    for ((i, j), z) in m
        .iter()
        .enumerate()
        .map(|(k, z)| ((k % m.nrows(), k / m.nrows()), z))
    {
        let target = if i == j { ONE } else { ZERO };
        worst = worst.max((z - target).norm());
    }
    worst
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

impl<'a> Mul<&'a OperatorMatrix> for &'a OperatorMatrix {
    type Output = OperatorMatrix;
    fn mul(self, rhs: &'a OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix(&self.0 * &rhs.0)
    }
}

impl<'a> Add<&'a OperatorMatrix> for &'a OperatorMatrix {
    type Output = OperatorMatrix;
    fn add(self, rhs: &'a OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a OperatorMatrix> for &'a OperatorMatrix {
    type Output = OperatorMatrix;
    fn sub(self, rhs: &'a OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix(&self.0 - &rhs.0)
    }
}

impl<'a> Add<&'a StateVector> for &'a StateVector {
    type Output = StateVector;
    fn add(self, rhs: &'a StateVector) -> StateVector {
        StateVector(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a StateVector> for &'a StateVector {
    type Output = StateVector;
    fn sub(self, rhs: &'a StateVector) -> StateVector {
        StateVector(&self.0 - &rhs.0)
    }
}

/// Kronecker product with the left factor as the major index.
pub trait Tensor {
    fn tensor(&self, other: &Self) -> Self;
}

impl Tensor for StateVector {
    fn tensor(&self, other: &Self) -> Self {
        StateVector(self.0.kronecker(&other.0))
    }
}

impl Tensor for OperatorMatrix {
    fn tensor(&self, other: &Self) -> Self {
        OperatorMatrix(self.0.kronecker(&other.0))
    }
}

/// Traces out the qubit factor of an operator on `C² ⊗ C^d`:
/// `r[k][l] = Σ_q m[(q,k),(q,l)]`.
pub fn partial_trace_qubit(m: &OperatorMatrix) -> Result<OperatorMatrix> {
    let n = m.dim();
    if !n.is_multiple_of(2) || n == 0 {
        return Err(Error::OddDimension(n));
    }
    let d = n / 2;
    let a = &m.0;
    Ok(OperatorMatrix(DMatrix::from_fn(d, d, |k, l| {
        a[(k, l)] + a[(d + k, d + l)]
    })))
}

/// Largest singular value, from the top eigenvalue of `M†M`.
pub fn operator_norm(m: &OperatorMatrix) -> f64 {
    let gram = m.0.adjoint() * &m.0;
    let top = gram
        .symmetric_eigenvalues()
        .iter()
        .fold(0.0_f64, |acc, &l| acc.max(l));
    top.max(0.0).sqrt()
}

/// Samples a Haar-distributed unitary of dimension `dim`.
///
/// Draws a complex Ginibre matrix, takes its QR factorization and multiplies
/// `Q` by the phases of `diag(R)`; without that correction the distribution
/// of `Q` depends on the QR convention and is not Haar.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> OperatorMatrix {
    assert!(dim >= 1, "haar_unitary needs dim >= 1");
    let g = DMatrix::from_fn(dim, dim, |_, _| complex_gaussian(rng));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let rjj = r[(j, j)];
        let n = rjj.norm();
        let phase = if n > 0.0 { rjj / n } else { ONE };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    OperatorMatrix(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn tensor_identities() {
        let i2 = OperatorMatrix::identity(2);
        assert_eq!(i2.tensor(&i2), OperatorMatrix::identity(4));

        let v = StateVector::basis(2, 0).tensor(&StateVector::basis(2, 1));
        assert_eq!(v, StateVector::basis(4, 1));

        let p = StateVector::plus().projector().tensor(&i2);
        let psi = StateVector::plus().tensor(&StateVector::basis(2, 0));
        assert!(p.apply(&psi).max_abs_diff(&psi) < 1e-15);
    }

    #[test]
    fn partial_trace_fixtures() {
        let rho_k =
            OperatorMatrix::from_real_rows(3, &[0.5, 0.1, 0.0, 0.1, 0.3, 0.0, 0.0, 0.0, 0.2])
                .unwrap();
        let m = StateVector::basis(2, 0).projector().tensor(&rho_k);
        assert!(partial_trace_qubit(&m).unwrap().max_abs_diff(&rho_k) < 1e-15);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = StateVector::from_real(&[h, 0.0, 0.0, h]).projector();
        let r = partial_trace_qubit(&bell).unwrap();
        assert!(r.max_abs_diff(&OperatorMatrix::identity(2).scale(c(0.5))) < 1e-15);

        assert_eq!(
            partial_trace_qubit(&OperatorMatrix::identity(3)),
            Err(Error::OddDimension(3))
        );
    }

    #[test]
    fn partial_trace_preserves_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for d in 1..=5 {
            let m = OperatorMatrix::random_gaussian(2 * d, &mut rng);
            // oracle: explicit double loop
            let mut direct = C64::new(0.0, 0.0);
            for q in 0..2 {
                for k in 0..d {
                    direct += m.entry(q * d + k, q * d + k);
                }
            }
            let r = partial_trace_qubit(&m).unwrap();
            assert!((r.trace() - direct).norm() < 1e-12);
            assert!((r.trace() - m.trace()).norm() < 1e-12);
        }
    }

    #[test]
    fn operator_norm_fixtures() {
        assert!((operator_norm(&OperatorMatrix::identity(5)) - 1.0).abs() < 1e-12);
        assert!((operator_norm(&OperatorMatrix::matrix_unit(2, 0, 1)) - 1.0).abs() < 1e-12);
        let d = OperatorMatrix::diagonal(&[c(0.3), c(-2.0)]);
        assert!((operator_norm(&d) - 2.0).abs() < 2e-10);
    }

    #[test]
    fn haar_dim_one_is_a_phase() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let u = haar_unitary(1, &mut rng);
        assert_eq!(u.dim(), 1);
        assert!((u.entry(0, 0).norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn haar_samples_are_unitary_and_reproducible() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for dim in 1..=12 {
            assert!(haar_unitary(dim, &mut rng).unitarity_deviation() <= 1e-10);
        }
        let a = haar_unitary(6, &mut ChaCha8Rng::seed_from_u64(42));
        let b = haar_unitary(6, &mut ChaCha8Rng::seed_from_u64(42));
        assert_eq!(a, b);
    }

    #[test]
    fn haar_first_moment() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let n = 100_000;
        let mean: f64 = (0..n)
            .map(|_| haar_unitary(2, &mut rng).entry(0, 0).norm_sqr())
            .sum::<f64>()
            / n as f64;
        assert!((mean - 0.5).abs() < 0.01, "mean |U00|^2 = {mean}");
    }

    #[test]
    fn haar_phase_correction_matters() {
        // Haar invariance makes the phase of every entry uniform.
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let n = 20_000;
        let mean: C64 = (0..n)
            .map(|_| {
                let z = haar_unitary(2, &mut rng).entry(0, 0);
                z / z.norm()
            })
            .sum::<C64>()
            / n as f64;
        assert!(mean.norm() < 0.03, "phase mean {mean}");
    }

    #[test]
    fn validity_checks() {
        assert!(OperatorMatrix::identity(4).is_unitary());
        assert!(StateVector::plus().projector().is_projector());
        assert!(StateVector::plus().projector().is_density());
        let not_pos = OperatorMatrix::diagonal(&[c(1.0), c(-0.1)]);
        assert!(!not_pos.is_positive());
        let err = OperatorMatrix::diagonal(&[c(1.0), c(1.1)])
            .check_unitary("V")
            .unwrap_err();
        match err {
            Error::Validation { deviation, .. } => assert!((deviation - 0.21).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn exp_i_hermitian_of_zero_is_identity() {
        let u = OperatorMatrix::zeros(4).exp_i_hermitian();
        assert!(u.max_abs_diff(&OperatorMatrix::identity(4)) < 1e-15);
    }
}
