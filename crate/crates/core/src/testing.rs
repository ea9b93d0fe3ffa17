//! Random fixtures shared by tests and benchmarks: Gaussian states,
//! Haar-ish unitaries, Hermitian matrices with prescribed spectra.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::state::{matrix_from_columns, CMatrix, CVector, PureState};

pub fn random_complex_vector(dim: usize, rng: &mut impl Rng) -> CVector {
    CVector::from_fn(dim, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

pub fn random_pure_state(dim: usize, rng: &mut impl Rng) -> PureState {
    loop {
        if let Ok(state) = PureState::from_vector(random_complex_vector(dim, rng)) {
            return state;
        }
    }
}

/// Unitary with Haar-like distribution: Gram-Schmidt of a complex Gaussian
/// matrix.
pub fn random_unitary(dim: usize, rng: &mut impl Rng) -> CMatrix {
    let mut columns: Vec<CVector> = (0..dim).map(|_| random_complex_vector(dim, rng)).collect();
    for j in 0..dim {
        for i in 0..j {
            let overlap = columns[i].dotc(&columns[j]);
            let correction = &columns[i] * overlap;
            columns[j] -= correction;
        }
        let norm = columns[j].norm();
        columns[j] /= Complex64::new(norm, 0.0);
    }
    matrix_from_columns(&columns.iter().collect::<Vec<_>>())
}

/// Random Hermitian matrix with Gaussian entries, (A + A')/2.
pub fn random_hermitian(dim: usize, rng: &mut impl Rng) -> CMatrix {
    let a = CMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    (&a + a.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Hermitian matrix U diag(spectrum) U' for a random unitary U. Repeating
/// entries in `spectrum` constructs exact degeneracies.
pub fn hermitian_with_spectrum(spectrum: &[f64], rng: &mut impl Rng) -> CMatrix {
    let dim = spectrum.len();
    let u = random_unitary(dim, rng);
    let d = CMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            Complex64::new(spectrum[i], 0.0)
        } else {
            Complex64::ZERO
        }
    });
    &u * d * u.adjoint()
}

/// `count` orthonormal states in a `dim`-dimensional space.
pub fn random_orthonormal_states(dim: usize, count: usize, rng: &mut impl Rng) -> Vec<PureState> {
    assert!(count <= dim);
    let u = random_unitary(dim, rng);
    (0..count)
        .map(|j| PureState::from_vector(u.column(j).into_owned()).expect("unit column"))
        .collect()
}

/// Re-expresses an orthonormal family in a random rotated basis of the same
/// span: columns of B V for a random unitary V.
pub fn rotate_within_span(basis: &[PureState], rng: &mut impl Rng) -> Vec<PureState> {
    let cols: Vec<&CVector> = basis.iter().map(|s| s.amplitudes()).collect();
    let b = matrix_from_columns(&cols);
    let rotated = &b * random_unitary(basis.len(), rng);
    (0..basis.len())
        .map(|j| PureState::from_vector(rotated.column(j).into_owned()).expect("unit column"))
        .collect()
}

/// Unit vector drawn from the span of the given orthonormal columns.
pub fn random_state_in_span(basis_columns: &CMatrix, rng: &mut impl Rng) -> PureState {
    let coefficients = random_complex_vector(basis_columns.ncols(), rng);
    let vector = basis_columns * coefficients;
    PureState::from_vector(vector).expect("Gaussian combination is almost surely nonzero")
}
