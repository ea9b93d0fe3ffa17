//! Simulation of projective quantum measurement with degenerate spectra.
//!
//! The library covers four layers:
//!
//! - [`state`] / [`observable`]: complex linear algebra for pure states,
//!   density matrices, and Hermitian observables with degeneracy-grouped
//!   spectral decompositions.
//! - [`lueders`]: measurement channels: coherence-preserving collapse onto
//!   degenerate eigenspaces, Born probabilities, outcome sampling, and the
//!   basis-projecting von Neumann channel for contrast.
//! - [`protocol`]: discrimination of the identity observable from an
//!   infinitesimally gapped one via interference measurements, with the
//!   exact 2^-(m+1) error law.
//! - [`noise`]: eigenbasis implementation noise: angle-parametrized
//!   perturbed observables, uniform and truncated von Mises angle
//!   distributions, quadrature averages, and noisy discrimination.
//!
//! [`verify`] re-derives every analytic claim in one deterministic pass;
//! [`stream`] provides the per-trial random streams that make parallel and
//! sequential runs tally identically.

pub mod error;
pub mod lueders;
pub mod noise;
pub mod observable;
pub mod protocol;
pub mod quad;
pub mod report;
pub mod state;
pub mod stats;
pub mod stream;
pub mod testing;
pub mod verify;

pub use error::{Error, Result};
pub use lueders::{
    lueders_collapse, lueders_collapse_mixed, lueders_measure_unread, measure,
    measurement_tally, outcome_probabilities, von_neumann_measure_unread, MeasurementOutcome,
    MeasurementTally,
};
pub use noise::{
    average_plus_probability, noisy_discrimination, perturbed_observable,
    plus_probability_given_alpha, AlphaSampler, AngleEigenbasis, NoiseModel,
    NoisyDiscriminationConfig, NoisyDiscriminationReport, SweepRow,
};
pub use observable::{projector_onto_span, Observable};
pub use protocol::{
    analytic_error_probability, decide, enumerated_error_probability, gapped_observable,
    identity_observable, interference_measure, interference_plus_probability, required_copies,
    DiscriminationConfig, DiscriminationExperiment, DiscriminationReport, Hypothesis,
    InterferenceOutcome, TrialRecord,
};
pub use report::{ExperimentReport, MetricEntry};
pub use state::{fidelity, CMatrix, CVector, DensityMatrix, PostState, PureState};
pub use stats::{binomial_sigma, sigma_deviation, wilson_interval};
pub use stream::{derive_stream, sub_seed, TrialRng};
pub use verify::verify_all;
