//! Hermitian observables with degeneracy-aware spectral decomposition.
//!
//! An [`Observable`] groups the spectrum of a Hermitian matrix into K
//! distinct eigenvalues with degeneracies d_k and carries one projector
//! P_k = sum_j |psi_kj><psi_kj| per group. The projector of a degenerate
//! group depends only on the group's eigenspace, never on the particular
//! orthonormal basis chosen for it.

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::state::{hermitian_deviation, hermitian_tol, matrix_from_columns, CMatrix, CVector, PureState};

/// Relative factor for the default degeneracy-merge tolerance.
const DEFAULT_DEGENERACY_TOL: f64 = 1e-10;
/// Orthonormality tolerance for caller-supplied eigenbases.
const BASIS_TOL: f64 = 1e-10;

/// A Hermitian operator together with its grouped spectral decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    matrix: CMatrix,
    eigenvalues: Vec<f64>,
    degeneracies: Vec<usize>,
    /// One dim x d_k matrix per group whose columns form an orthonormal
    /// basis of the group's eigenspace.
    group_bases: Vec<CMatrix>,
    projectors: Vec<CMatrix>,
}

impl Observable {
    /// Spectrally decomposes a Hermitian matrix with the default degeneracy
    /// tolerance 1e-10 * max(1, spectral radius).
    pub fn from_matrix(matrix: &CMatrix) -> Result<Self> {
        Self::decompose(matrix, None)
    }

    /// Spectrally decomposes with an explicit degeneracy tolerance:
    /// consecutive raw eigenvalues closer than `tol_degen` are merged into
    /// one degenerate group whose eigenvalue is the group mean.
    pub fn from_matrix_with_tol(matrix: &CMatrix, tol_degen: f64) -> Result<Self> {
        if !tol_degen.is_finite() || tol_degen <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "degeneracy tolerance must be positive, got {tol_degen}"
            )));
        }
        Self::decompose(matrix, Some(tol_degen))
    }

    fn decompose(matrix: &CMatrix, tol_degen: Option<f64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                got: matrix.ncols(),
            });
        }
        let deviation = hermitian_deviation(matrix);
        if deviation > hermitian_tol(matrix) {
            return Err(Error::NotHermitian { deviation });
        }

        let dim = matrix.nrows();
        let eig = matrix.clone().symmetric_eigen();

        // Sort eigenpairs ascending; nalgebra returns them unordered.
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let raw: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let mut vectors: Vec<CVector> = order
            .iter()
            .map(|&i| eig.eigenvectors.column(i).into_owned())
            .collect();
        orthonormalize(&mut vectors)?;

        let spectral_radius = raw.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
        let tol = tol_degen.unwrap_or(DEFAULT_DEGENERACY_TOL * spectral_radius.max(1.0));

        // Group consecutive eigenvalues whose gap is within tolerance.
        let mut groups: Vec<(usize, usize)> = Vec::new(); // [start, end)
        let mut start = 0;
        for i in 1..dim {
            if raw[i] - raw[i - 1] > tol {
                groups.push((start, i));
                start = i;
            }
        }
        groups.push((start, dim));

        let mut eigenvalues = Vec::with_capacity(groups.len());
        let mut degeneracies = Vec::with_capacity(groups.len());
        let mut group_bases = Vec::with_capacity(groups.len());
        let mut projectors = Vec::with_capacity(groups.len());
        for &(lo, hi) in &groups {
            let d = hi - lo;
            eigenvalues.push(raw[lo..hi].iter().sum::<f64>() / d as f64);
            degeneracies.push(d);
            let basis = matrix_from_columns(&vectors[lo..hi].iter().collect::<Vec<_>>());
            projectors.push(&basis * basis.adjoint());
            group_bases.push(basis);
        }

        Ok(Self {
            matrix: matrix.clone(),
            eigenvalues,
            degeneracies,
            group_bases,
            projectors,
        })
    }

    /// Builds an observable from explicit eigenvalue groups, each given as
    /// `(eigenvalue, orthonormal basis of the eigenspace)`. The bases must
    /// jointly span the space; eigenvalues must be pairwise distinct.
    pub fn from_eigensystem(groups: Vec<(f64, Vec<PureState>)>) -> Result<Self> {
        if groups.is_empty() || groups.iter().any(|(_, vs)| vs.is_empty()) {
            return Err(Error::InvalidEigensystem(
                "every group needs at least one eigenvector".into(),
            ));
        }
        let dim = groups[0].1[0].dim();
        let total: usize = groups.iter().map(|(_, vs)| vs.len()).sum();
        if total != dim {
            return Err(Error::InvalidEigensystem(format!(
                "{total} eigenvectors cannot span a {dim}-dimensional space"
            )));
        }

        let mut order: Vec<usize> = (0..groups.len()).collect();
        order.sort_by(|&a, &b| groups[a].0.total_cmp(&groups[b].0));
        for pair in order.windows(2) {
            if groups[pair[1]].0 <= groups[pair[0]].0 {
                return Err(Error::InvalidEigensystem(
                    "group eigenvalues must be pairwise distinct".into(),
                ));
            }
        }

        let all: Vec<&PureState> = order
            .iter()
            .flat_map(|&g| groups[g].1.iter())
            .collect();
        check_orthonormal(&all, dim)?;

        let mut eigenvalues = Vec::with_capacity(groups.len());
        let mut degeneracies = Vec::with_capacity(groups.len());
        let mut group_bases = Vec::with_capacity(groups.len());
        let mut projectors = Vec::with_capacity(groups.len());
        let mut matrix = CMatrix::zeros(dim, dim);
        for &g in &order {
            let (lambda, ref vs) = groups[g];
            let cols: Vec<&CVector> = vs.iter().map(|s| s.amplitudes()).collect();
            let basis = matrix_from_columns(&cols);
            let projector = &basis * basis.adjoint();
            matrix += &projector * Complex64::new(lambda, 0.0);
            eigenvalues.push(lambda);
            degeneracies.push(vs.len());
            group_bases.push(basis);
            projectors.push(projector);
        }

        Ok(Self {
            matrix,
            eigenvalues,
            degeneracies,
            group_bases,
            projectors,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Number K of distinct eigenvalues.
    pub fn num_groups(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn degeneracies(&self) -> &[usize] {
        &self.degeneracies
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn projector(&self, group: usize) -> &CMatrix {
        &self.projectors[group]
    }

    pub fn projectors(&self) -> &[CMatrix] {
        &self.projectors
    }

    /// Orthonormal basis of group `group`'s eigenspace, as matrix columns.
    pub fn group_basis(&self, group: usize) -> &CMatrix {
        &self.group_bases[group]
    }

    /// Component of `state` inside group `group`'s eigenspace, expressed in
    /// the group basis: B_k' |phi>. Its squared norm is the Born probability.
    pub(crate) fn group_coefficients(&self, state: &PureState, group: usize) -> CVector {
        self.group_bases[group].adjoint() * state.amplitudes()
    }

    /// P_k |phi> reassembled from group coefficients.
    pub(crate) fn apply_projector(&self, coefficients: &CVector, group: usize) -> CVector {
        &self.group_bases[group] * coefficients
    }
}

/// Projector onto the span of an orthonormal family of states.
pub fn projector_onto_span(basis: &[PureState]) -> Result<CMatrix> {
    if basis.is_empty() {
        return Err(Error::InvalidEigensystem("empty basis".into()));
    }
    let dim = basis[0].dim();
    let refs: Vec<&PureState> = basis.iter().collect();
    check_orthonormal(&refs, dim)?;
    let cols: Vec<&CVector> = basis.iter().map(|s| s.amplitudes()).collect();
    let b = matrix_from_columns(&cols);
    Ok(&b * b.adjoint())
}

fn check_orthonormal(states: &[&PureState], dim: usize) -> Result<()> {
    let mut deviation = 0.0f64;
    for (i, a) in states.iter().enumerate() {
        if a.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: a.dim(),
            });
        }
        for (j, b) in states.iter().enumerate() {
            let expected = if i == j { 1.0 } else { 0.0 };
            let dot = a.amplitudes().dotc(b.amplitudes());
            deviation = deviation.max((dot - Complex64::new(expected, 0.0)).norm());
        }
    }
    if deviation > BASIS_TOL {
        return Err(Error::BasisNotOrthonormal { deviation });
    }
    Ok(())
}

/// Modified Gram-Schmidt pass over eigenvectors in spectral order. The
/// eigensolver already returns nearly orthonormal columns; this pins the
/// residual down to machine precision so projector algebra holds at 1e-12.
fn orthonormalize(vectors: &mut [CVector]) -> Result<()> {
    for j in 0..vectors.len() {
        for i in 0..j {
            let overlap = vectors[i].dotc(&vectors[j]);
            let correction = &vectors[i] * overlap;
            vectors[j] -= correction;
        }
        let norm = vectors[j].norm();
        if norm < 1e-8 {
            return Err(Error::InvalidEigensystem(
                "eigenvector collapsed during re-orthonormalization".into(),
            ));
        }
        vectors[j] /= Complex64::new(norm, 0.0);
    }
    Ok(())
}

impl Serialize for Observable {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        // Only the matrix goes over the wire; the decomposition is re-derived
        // (and thereby re-validated) on load.
        crate::state::ObservableWire::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Observable {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = crate::state::ObservableWire::deserialize(deserializer)?;
        wire.into_observable().map_err(D::Error::custom)
    }
}
