//! Pure states and density matrices on a finite-dimensional Hilbert space.
//!
//! `PureState` holds a normalized complex amplitude vector, `DensityMatrix` a
//! Hermitian, positive semidefinite, unit-trace operator. Both serialize to a
//! flat JSON document `{"dim": n, "matrix_re": [...], "matrix_im": [...]}`
//! (row-major for matrices); deserialization re-validates every invariant.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};

pub type CVector = DVector<Complex64>;
pub type CMatrix = DMatrix<Complex64>;

/// Norm below which an amplitude vector is rejected as unnormalizable.
pub const ZERO_NORM_THRESHOLD: f64 = 1e-14;
/// Elementwise tolerance for Hermiticity and unit-trace checks.
pub const MATRIX_TOL: f64 = 1e-12;
/// Eigenvalues of a density matrix may undershoot zero by at most this much.
pub const PSD_TOL: f64 = 1e-10;

/// A normalized pure state |phi> over a `dim`-dimensional Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: CVector,
}

impl PureState {
    /// Builds a state from raw amplitudes, normalizing them.
    ///
    /// Inputs whose norm deviates from 1 by more than 1e-9 are accepted but
    /// the applied renormalization is reported through `log::warn`. Vectors
    /// with norm below [`ZERO_NORM_THRESHOLD`] are rejected.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        Self::from_vector(CVector::from_vec(amplitudes))
    }

    /// Same as [`PureState::new`] but starting from an owned vector.
    pub fn from_vector(amplitudes: CVector) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::ZeroVector { norm: 0.0 });
        }
        let norm = amplitudes.norm();
        if norm < ZERO_NORM_THRESHOLD {
            return Err(Error::ZeroVector { norm });
        }
        if (norm - 1.0).abs() > 1e-9 {
            log::warn!("renormalizing state vector: input norm was {norm}");
        }
        Ok(Self {
            amplitudes: amplitudes / Complex64::new(norm, 0.0),
        })
    }

    /// Wraps a vector that is already normalized. Internal fast path for
    /// measurement channels; debug builds verify the claim.
    pub(crate) fn from_normalized(amplitudes: CVector) -> Self {
        debug_assert!((amplitudes.norm() - 1.0).abs() < 1e-9);
        Self { amplitudes }
    }

    /// The computational basis state e_index.
    pub fn basis_state(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index {index} out of range for dim {dim}");
        let mut v = CVector::zeros(dim);
        v[index] = Complex64::ONE;
        Self { amplitudes: v }
    }

    /// The equal superposition (|1> + |0>)/sqrt(2) of the two-dimensional
    /// computational basis; the interference basis state labelled `plus`.
    pub fn plus() -> Self {
        let c = Complex64::new(FRAC_1_SQRT_2, 0.0);
        Self {
            amplitudes: CVector::from_vec(vec![c, c]),
        }
    }

    /// The orthogonal interference basis state (|1> - |0>)/sqrt(2).
    pub fn minus() -> Self {
        let c = Complex64::new(FRAC_1_SQRT_2, 0.0);
        Self {
            amplitudes: CVector::from_vec(vec![c, -c]),
        }
    }

    /// Equal-weight superposition of all `dim` basis states.
    pub fn uniform_superposition(dim: usize) -> Self {
        assert!(dim >= 1);
        let c = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Self {
            amplitudes: CVector::from_element(dim, c),
        }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    /// Inner product <self|other>.
    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        check_dims(self.dim(), other.dim())?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// The rank-one projector |phi><phi| as a density matrix.
    pub fn density(&self) -> DensityMatrix {
        let n = self.dim();
        let m = CMatrix::from_fn(n, n, |i, j| self.amplitudes[i] * self.amplitudes[j].conj());
        DensityMatrix { matrix: m }
    }
}

/// Transition probability |<a|b>|^2 between two pure states.
///
/// Symmetric in its arguments (bitwise, not just up to rounding) and bounded
/// by [0, 1] up to floating-point error.
pub fn fidelity(a: &PureState, b: &PureState) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr())
}

/// A Hermitian, positive semidefinite, unit-trace operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity (1e-12 elementwise), unit trace (1e-12) and
    /// positive semidefiniteness (eigenvalues >= -1e-10), then wraps.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                got: matrix.ncols(),
            });
        }
        let deviation = hermitian_deviation(&matrix);
        if deviation > hermitian_tol(&matrix) {
            return Err(Error::NotHermitian { deviation });
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > MATRIX_TOL || trace.im.abs() > MATRIX_TOL {
            return Err(Error::NotUnitTrace { trace: trace.re });
        }
        let eigenvalues = matrix.clone().symmetric_eigen().eigenvalues;
        let min_eigenvalue = eigenvalues.iter().fold(f64::INFINITY, |m, &x| m.min(x));
        if min_eigenvalue < -PSD_TOL {
            return Err(Error::NotPositiveSemidefinite { min_eigenvalue });
        }
        Ok(Self { matrix })
    }

    /// The maximally mixed state I/dim.
    pub fn maximally_mixed(dim: usize) -> Self {
        assert!(dim >= 1);
        Self {
            matrix: CMatrix::identity(dim, dim) * Complex64::new(1.0 / dim as f64, 0.0),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Purity tr(rho^2); 1 for pure states, 1/dim for the maximally mixed
    /// state. Uses tr(rho^2) = sum |rho_ij|^2, valid for Hermitian rho.
    pub fn purity(&self) -> f64 {
        self.matrix.norm_squared()
    }

    /// Expectation <phi|rho|phi>.
    pub fn expectation(&self, state: &PureState) -> Result<f64> {
        check_dims(self.dim(), state.dim())?;
        let v = &self.matrix * state.amplitudes();
        Ok(state.amplitudes().dotc(&v).re)
    }
}

/// The object left behind by a measurement: a pure state when the outcome
/// was read, a density matrix for unread (ensemble) channels.
#[derive(Debug, Clone, PartialEq)]
pub enum PostState {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl PostState {
    pub fn dim(&self) -> usize {
        match self {
            PostState::Pure(s) => s.dim(),
            PostState::Mixed(r) => r.dim(),
        }
    }

    /// Purity of the state, computed from its density-matrix form.
    pub fn purity(&self) -> f64 {
        self.density().purity()
    }

    pub fn density(&self) -> DensityMatrix {
        match self {
            PostState::Pure(s) => s.density(),
            PostState::Mixed(r) => r.clone(),
        }
    }

    pub fn as_pure(&self) -> Option<&PureState> {
        match self {
            PostState::Pure(s) => Some(s),
            PostState::Mixed(_) => None,
        }
    }
}

impl From<PureState> for PostState {
    fn from(s: PureState) -> Self {
        PostState::Pure(s)
    }
}

impl From<DensityMatrix> for PostState {
    fn from(r: DensityMatrix) -> Self {
        PostState::Mixed(r)
    }
}

/// Assembles column vectors into a matrix.
pub(crate) fn matrix_from_columns(columns: &[&CVector]) -> CMatrix {
    let rows = columns[0].len();
    CMatrix::from_fn(rows, columns.len(), |i, j| columns[j][i])
}

pub(crate) fn check_dims(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

/// Max elementwise |M - M'| over the matrix.
pub(crate) fn hermitian_deviation(m: &CMatrix) -> f64 {
    let mut dev = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Hermiticity tolerance, scaled by the matrix magnitude so that checks stay
/// meaningful away from unit scale.
pub(crate) fn hermitian_tol(m: &CMatrix) -> f64 {
    let scale = m.iter().fold(0.0f64, |s, z| s.max(z.norm()));
    MATRIX_TOL * scale.max(1.0)
}

// --- JSON wire format -----------------------------------------------------

/// Flat row-major document shared by states and operators.
#[derive(Serialize, Deserialize)]
struct WireMatrix {
    dim: usize,
    matrix_re: Vec<f64>,
    matrix_im: Vec<f64>,
}

impl WireMatrix {
    fn from_vector(v: &CVector) -> Self {
        WireMatrix {
            dim: v.len(),
            matrix_re: v.iter().map(|z| z.re).collect(),
            matrix_im: v.iter().map(|z| z.im).collect(),
        }
    }

    fn from_matrix(m: &CMatrix) -> Self {
        let n = m.nrows();
        let mut re = Vec::with_capacity(n * n);
        let mut im = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                re.push(m[(i, j)].re);
                im.push(m[(i, j)].im);
            }
        }
        WireMatrix {
            dim: n,
            matrix_re: re,
            matrix_im: im,
        }
    }

    fn expect_len(&self, len: usize) -> Result<()> {
        if self.matrix_re.len() != len || self.matrix_im.len() != len {
            return Err(Error::DimensionMismatch {
                expected: len,
                got: self.matrix_re.len().max(self.matrix_im.len()),
            });
        }
        Ok(())
    }

    fn to_vector(&self) -> Result<CVector> {
        self.expect_len(self.dim)?;
        Ok(CVector::from_iterator(
            self.dim,
            self.matrix_re
                .iter()
                .zip(&self.matrix_im)
                .map(|(&re, &im)| Complex64::new(re, im)),
        ))
    }

    fn to_matrix(&self) -> Result<CMatrix> {
        self.expect_len(self.dim * self.dim)?;
        let n = self.dim;
        Ok(CMatrix::from_fn(n, n, |i, j| {
            Complex64::new(self.matrix_re[i * n + j], self.matrix_im[i * n + j])
        }))
    }
}

/// Wire form of an observable: just the Hermitian matrix. The spectral
/// decomposition is re-derived on load, which re-validates every invariant.
#[derive(Serialize, Deserialize)]
pub(crate) struct ObservableWire(WireMatrix);

impl From<&crate::observable::Observable> for ObservableWire {
    fn from(obs: &crate::observable::Observable) -> Self {
        ObservableWire(WireMatrix::from_matrix(obs.matrix()))
    }
}

impl ObservableWire {
    pub(crate) fn into_observable(self) -> Result<crate::observable::Observable> {
        let m = self.0.to_matrix()?;
        crate::observable::Observable::from_matrix(&m)
    }
}

impl Serialize for PureState {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        WireMatrix::from_vector(&self.amplitudes).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PureState {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = WireMatrix::deserialize(deserializer)?;
        let v = wire.to_vector().map_err(D::Error::custom)?;
        validated_state(v).map_err(D::Error::custom)
    }
}

/// A serialized state claims normalization; reject documents that violate
/// it rather than silently rescaling them, and keep valid amplitudes
/// bit-exact so round trips are lossless.
fn validated_state(v: CVector) -> Result<PureState> {
    let norm_sqr = v.norm_squared();
    if (norm_sqr - 1.0).abs() > MATRIX_TOL {
        return Err(Error::NotNormalized { norm_sqr });
    }
    Ok(PureState::from_normalized(v))
}

impl Serialize for DensityMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        WireMatrix::from_matrix(&self.matrix).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = WireMatrix::deserialize(deserializer)?;
        let m = wire.to_matrix().map_err(D::Error::custom)?;
        DensityMatrix::new(m).map_err(D::Error::custom)
    }
}

impl Serialize for PostState {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            PostState::Pure(s) => s.serialize(serializer),
            PostState::Mixed(r) => r.serialize(serializer),
        }
    }
}

impl<'de> Deserialize<'de> for PostState {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = WireMatrix::deserialize(deserializer)?;
        // A dim-length payload is a state vector, dim^2 a density matrix.
        if wire.matrix_re.len() == wire.dim {
            let v = wire.to_vector().map_err(D::Error::custom)?;
            Ok(PostState::Pure(validated_state(v).map_err(D::Error::custom)?))
        } else {
            let m = wire.to_matrix().map_err(D::Error::custom)?;
            Ok(PostState::Mixed(
                DensityMatrix::new(m).map_err(D::Error::custom)?,
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn equal_superposition_normalizes() {
        let s = PureState::new(vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_relative_eq!(s.amplitude(0).re, FRAC_1_SQRT_2, max_relative = 1e-15);
        assert_relative_eq!(s.amplitude(1).re, FRAC_1_SQRT_2, max_relative = 1e-15);
    }

    #[test]
    fn already_normalized_is_untouched() {
        let s = PureState::new(vec![c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(s.amplitude(0), Complex64::ONE);
        assert_eq!(s.amplitude(1), Complex64::ZERO);
    }

    #[test]
    fn zero_vector_is_rejected() {
        let err = PureState::new(vec![c(0.0, 0.0), c(0.0, 0.0)]).unwrap_err();
        assert!(matches!(err, Error::ZeroVector { .. }));
    }

    #[test]
    fn fidelity_examples() {
        let plus = PureState::plus();
        let up = PureState::basis_state(2, 0);
        let down = PureState::basis_state(2, 1);
        assert_relative_eq!(fidelity(&plus, &plus).unwrap(), 1.0, epsilon = 1e-12);
        assert_eq!(fidelity(&up, &down).unwrap(), 0.0);
        assert_relative_eq!(fidelity(&plus, &up).unwrap(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn fidelity_dimension_mismatch() {
        let a = PureState::basis_state(2, 0);
        let b = PureState::basis_state(3, 0);
        assert!(matches!(
            fidelity(&a, &b),
            Err(Error::DimensionMismatch { expected: 2, got: 3 })
        ));
    }

    #[test]
    fn density_of_pure_state_has_unit_purity() {
        let rho = PureState::plus().density();
        assert_relative_eq!(rho.purity(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(rho.trace(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn maximally_mixed_purity() {
        assert_relative_eq!(DensityMatrix::maximally_mixed(2).purity(), 0.5);
        assert_relative_eq!(DensityMatrix::maximally_mixed(4).purity(), 0.25);
    }

    #[test]
    fn density_matrix_validation_rejects_bad_inputs() {
        let not_herm = CMatrix::from_fn(2, 2, |i, j| c((i + 2 * j) as f64, 0.1));
        assert!(matches!(
            DensityMatrix::new(not_herm),
            Err(Error::NotHermitian { .. })
        ));

        let wrong_trace = CMatrix::identity(2, 2);
        assert!(matches!(
            DensityMatrix::new(wrong_trace),
            Err(Error::NotUnitTrace { .. })
        ));

        // Hermitian and unit trace, but indefinite.
        let indefinite = CMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => c(1.5, 0.0),
            (1, 1) => c(-0.5, 0.0),
            _ => c(0.0, 0.0),
        });
        assert!(matches!(
            DensityMatrix::new(indefinite),
            Err(Error::NotPositiveSemidefinite { .. })
        ));
    }

    proptest! {
        #[test]
        fn construction_always_normalizes(res in prop::collection::vec(-10.0f64..10.0, 1..9),
                                           ims in prop::collection::vec(-10.0f64..10.0, 1..9)) {
            let n = res.len().min(ims.len());
            let amps: Vec<Complex64> = (0..n).map(|i| c(res[i], ims[i])).collect();
            match PureState::new(amps) {
                Ok(s) => prop_assert!((s.amplitudes().norm_squared() - 1.0).abs() < 1e-12),
                Err(Error::ZeroVector { .. }) => {}
                Err(e) => prop_assert!(false, "unexpected error {e}"),
            }
        }

        #[test]
        fn fidelity_is_symmetric_and_bounded(res_a in prop::collection::vec(-1.0f64..1.0, 4),
                                             ims_a in prop::collection::vec(-1.0f64..1.0, 4),
                                             res_b in prop::collection::vec(-1.0f64..1.0, 4),
                                             ims_b in prop::collection::vec(-1.0f64..1.0, 4)) {
            let make = |res: &[f64], ims: &[f64]| {
                PureState::new((0..4).map(|i| c(res[i], ims[i])).collect())
            };
            if let (Ok(a), Ok(b)) = (make(&res_a, &ims_a), make(&res_b, &ims_b)) {
                let fab = fidelity(&a, &b).unwrap();
                let fba = fidelity(&b, &a).unwrap();
                prop_assert_eq!(fab, fba);
                prop_assert!((-0.0..=1.0 + 1e-12).contains(&fab));
            }
        }
    }
}
