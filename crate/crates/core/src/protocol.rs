//! Discrimination of two similar spin-1/2 observables.
//!
//! A black box measures prepared copies of (|1> + |0>)/sqrt(2) with either
//! the identity operator (degenerate spectrum: the state passes through
//! untouched) or a gapped diagonal operator diag(1, 1 + delta) (the state
//! collapses onto spin-up or spin-down). A follow-up interference
//! measurement in the {plus, minus} basis separates the two: the identity
//! hypothesis can never produce `minus`, while the gapped hypothesis
//! produces it with probability 1/2 per copy. Declaring "gapped" on the
//! first `minus` therefore errs only when the gapped box yields `plus` on
//! all m copies, i.e. with probability 2^-m, and never errs under the
//! identity. With equal priors the total error is 2^-(m+1), halving with
//! every extra copy. The sampled eigenvalue labels (1 vs 1 + delta) are
//! deliberately ignored by the decision: the protocol discriminates through
//! interference alone.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};
use crate::lueders::measure;
use crate::observable::Observable;
use crate::state::{CMatrix, PostState, PureState};
use crate::stats::wilson_interval;
use crate::stream::derive_stream;

/// Which observable the black box implements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Hypothesis {
    /// The identity operator; fully degenerate spectrum.
    #[serde(rename = "I")]
    Identity,
    /// diag(1, 1 + delta); the infinitesimally deformed, nondegenerate one.
    #[serde(rename = "J")]
    Gapped,
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Hypothesis::Identity => "I",
            Hypothesis::Gapped => "J",
        })
    }
}

/// Outcome of one interference measurement in the {plus, minus} basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterferenceOutcome {
    Plus,
    Minus,
}

impl fmt::Display for InterferenceOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InterferenceOutcome::Plus => "plus",
            InterferenceOutcome::Minus => "minus",
        })
    }
}

/// Parameters of the discrimination experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiscriminationConfig {
    /// Spectral gap delta of the gapped observable; must be positive
    /// (at delta = 0 the hypotheses coincide and the task is undefined).
    pub delta: f64,
    /// Number m of prepared copies per trial.
    pub copies: usize,
    /// Prior probability that the box implements the gapped observable.
    pub prior_gapped: f64,
    pub seed: u64,
    /// Stop a trial at the first `minus`: the decision is already final.
    /// Saves copies but leaves the error rate untouched.
    pub early_stop: bool,
}

impl DiscriminationConfig {
    pub fn new(delta: f64, copies: usize, seed: u64) -> Self {
        Self {
            delta,
            copies,
            prior_gapped: 0.5,
            seed,
            early_stop: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.delta.is_finite() || self.delta <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "delta must be positive, got {}",
                self.delta
            )));
        }
        if self.copies == 0 {
            return Err(Error::InvalidConfig("need at least one copy".into()));
        }
        if !(self.prior_gapped > 0.0 && self.prior_gapped < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "prior must lie in (0, 1), got {}",
                self.prior_gapped
            )));
        }
        Ok(())
    }
}

/// One trial: the truth, the per-copy interference outcomes, and the call.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialRecord {
    pub truth: Hypothesis,
    /// Interference outcomes in copy order; shorter than m only when
    /// early stopping cut the trial at its first `minus`.
    pub outcomes: Vec<InterferenceOutcome>,
    pub decision: Hypothesis,
    pub correct: bool,
}

/// Summary of a Monte Carlo discrimination run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscriminationReport {
    pub empirical_error: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub analytic_error: f64,
    pub trials: u64,
    pub m: usize,
    pub errors: u64,
    pub delta: f64,
    pub prior_j: f64,
    pub seed: u64,
    pub early_stop: bool,
}

/// The identity observable on the qubit space.
pub fn identity_observable() -> Observable {
    Observable::from_matrix(&CMatrix::identity(2, 2)).expect("identity is Hermitian")
}

/// The deformed observable diag(1, 1 + delta).
pub fn gapped_observable(delta: f64) -> Result<Observable> {
    if !delta.is_finite() || delta <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "delta must be positive, got {delta}"
        )));
    }
    let m = CMatrix::from_fn(2, 2, |i, j| {
        if i == j {
            num_complex::Complex64::new(if i == 0 { 1.0 } else { 1.0 + delta }, 0.0)
        } else {
            num_complex::Complex64::ZERO
        }
    });
    Observable::from_matrix(&m)
}

/// Probability that an interference measurement of `state` yields `plus`.
pub fn interference_plus_probability(state: &PostState) -> Result<f64> {
    if state.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: state.dim(),
        });
    }
    let p = match state {
        PostState::Pure(s) => {
            // |<plus|phi>|^2 with <plus| = (1, 1)/sqrt(2)
            (s.amplitude(0) + s.amplitude(1)).norm_sqr() / 2.0
        }
        PostState::Mixed(rho) => {
            let m = rho.matrix();
            (m[(0, 0)] + m[(0, 1)] + m[(1, 0)] + m[(1, 1)]).re / 2.0
        }
    };
    Ok(p.clamp(0.0, 1.0))
}

/// Samples one interference measurement in the {plus, minus} basis.
/// Consumes exactly one uniform draw.
pub fn interference_measure(
    state: &PostState,
    rng: &mut impl Rng,
) -> Result<InterferenceOutcome> {
    let p_plus = interference_plus_probability(state)?;
    Ok(if rng.random::<f64>() < p_plus {
        InterferenceOutcome::Plus
    } else {
        InterferenceOutcome::Minus
    })
}

/// The decision rule: call the box gapped iff any copy interfered to
/// `minus`. This is the rule under which the identity is never
/// misidentified and the gapped box escapes detection with probability
/// exactly 2^-m.
pub fn decide(outcomes: &[InterferenceOutcome]) -> Hypothesis {
    if outcomes.contains(&InterferenceOutcome::Minus) {
        Hypothesis::Gapped
    } else {
        Hypothesis::Identity
    }
}

/// Closed-form error probability of the decision rule with m copies:
/// prior_gapped * 2^-m. Exact in floating point (a power of two scales
/// the exponent only).
///
/// Accepts priors in [0, 1]; the endpoints give the conditional error
/// under the corresponding fixed truth.
pub fn analytic_error_probability(copies: usize, prior_gapped: f64) -> f64 {
    assert!(copies >= 1);
    assert!((0.0..=1.0).contains(&prior_gapped));
    prior_gapped * 0.5f64.powi(copies as i32)
}

/// Error probability computed by brute force: enumerate all 2^m
/// interference outcome strings, weight each by its chain probability
/// (1/2 per copy under the gapped truth, all-plus certain under the
/// identity), and apply [`decide`] to each string.
///
/// Independent of the closed form; agrees with it exactly because every
/// branch weight is dyadic.
pub fn enumerated_error_probability(copies: usize, prior_gapped: f64) -> f64 {
    assert!((1..=20).contains(&copies), "enumeration is 2^m; keep m small");
    assert!((0.0..=1.0).contains(&prior_gapped));
    let weight = 0.5f64.powi(copies as i32);
    let mut error_given_gapped = 0.0;
    let mut outcomes = Vec::with_capacity(copies);
    for bits in 0u64..(1 << copies) {
        outcomes.clear();
        for copy in 0..copies {
            outcomes.push(if bits >> copy & 1 == 1 {
                InterferenceOutcome::Minus
            } else {
                InterferenceOutcome::Plus
            });
        }
        if decide(&outcomes) == Hypothesis::Identity {
            error_given_gapped += weight;
        }
    }
    // Under the identity truth the all-plus string carries all the mass.
    let all_plus = vec![InterferenceOutcome::Plus; copies];
    let error_given_identity = if decide(&all_plus) == Hypothesis::Gapped {
        1.0
    } else {
        0.0
    };
    prior_gapped * error_given_gapped + (1.0 - prior_gapped) * error_given_identity
}

/// Smallest number of copies whose analytic error probability is at most
/// `epsilon`.
pub fn required_copies(epsilon: f64, prior_gapped: f64) -> usize {
    assert!(epsilon > 0.0 && epsilon < 1.0);
    let mut copies = 1;
    while analytic_error_probability(copies, prior_gapped) > epsilon {
        copies += 1;
    }
    copies
}

/// A configured experiment with both candidate observables prebuilt.
#[derive(Debug, Clone)]
pub struct DiscriminationExperiment {
    config: DiscriminationConfig,
    observable_identity: Observable,
    observable_gapped: Observable,
    input: PureState,
}

impl DiscriminationExperiment {
    pub fn new(config: DiscriminationConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            observable_identity: identity_observable(),
            observable_gapped: gapped_observable(config.delta)?,
            input: PureState::plus(),
            config,
        })
    }

    pub fn config(&self) -> &DiscriminationConfig {
        &self.config
    }

    /// Runs one trial against a known truth: per copy, prepare the plus
    /// state, measure it with the truth's observable, then interference-
    /// measure the post-state.
    pub fn run_trial(&self, truth: Hypothesis, rng: &mut impl Rng) -> TrialRecord {
        let observable = match truth {
            Hypothesis::Identity => &self.observable_identity,
            Hypothesis::Gapped => &self.observable_gapped,
        };
        let mut outcomes = Vec::with_capacity(self.config.copies);
        for _ in 0..self.config.copies {
            let measured = measure(&self.input, observable, rng)
                .expect("dimensions fixed by construction");
            // The sampled eigenvalue in `measured` is recorded in the
            // outcome but plays no role in the decision.
            let interfered = interference_measure(&measured.post_state, rng)
                .expect("post-state is two-dimensional");
            outcomes.push(interfered);
            if self.config.early_stop && interfered == InterferenceOutcome::Minus {
                break;
            }
        }
        let decision = decide(&outcomes);
        TrialRecord {
            truth,
            outcomes,
            decision,
            correct: decision == truth,
        }
    }

    fn trial_from_index(&self, index: u64) -> TrialRecord {
        let mut rng = derive_stream(self.config.seed, index);
        let truth = if rng.random::<f64>() < self.config.prior_gapped {
            Hypothesis::Gapped
        } else {
            Hypothesis::Identity
        };
        self.run_trial(truth, &mut rng)
    }

    /// Full per-trial records, truths drawn from the prior. Parallel
    /// execution returns the same vector as sequential.
    pub fn run_trials(&self, trials: u64, parallel: bool) -> Vec<TrialRecord> {
        if parallel {
            (0..trials)
                .into_par_iter()
                .map(|i| self.trial_from_index(i))
                .collect()
        } else {
            (0..trials).map(|i| self.trial_from_index(i)).collect()
        }
    }

    /// Monte Carlo error rate over `trials` trials (parallel).
    pub fn monte_carlo_error_rate(&self, trials: u64) -> DiscriminationReport {
        let errors = (0..trials)
            .into_par_iter()
            .map(|i| u64::from(!self.trial_from_index(i).correct))
            .sum();
        self.report_from_errors(errors, trials)
    }

    /// Sequential twin of [`Self::monte_carlo_error_rate`]; tallies are
    /// bit-identical because each trial owns a derived stream.
    pub fn monte_carlo_error_rate_sequential(&self, trials: u64) -> DiscriminationReport {
        let errors = (0..trials)
            .map(|i| u64::from(!self.trial_from_index(i).correct))
            .sum();
        self.report_from_errors(errors, trials)
    }

    /// Builds the summary report from already-collected records.
    pub fn report_from_records(&self, records: &[TrialRecord]) -> DiscriminationReport {
        let errors = records.iter().filter(|r| !r.correct).count() as u64;
        self.report_from_errors(errors, records.len() as u64)
    }

    fn report_from_errors(&self, errors: u64, trials: u64) -> DiscriminationReport {
        let (ci_low, ci_high) = wilson_interval(errors, trials.max(1), 0.95);
        DiscriminationReport {
            empirical_error: errors as f64 / trials as f64,
            ci_low,
            ci_high,
            analytic_error: analytic_error_probability(self.config.copies, self.config.prior_gapped),
            trials,
            m: self.config.copies,
            errors,
            delta: self.config.delta,
            prior_j: self.config.prior_gapped,
            seed: self.config.seed,
            early_stop: self.config.early_stop,
        }
    }
}
