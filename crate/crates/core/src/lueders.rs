//! Measurement channels.
//!
//! The central rule: measuring eigenvalue group k of an observable with
//! projectors P_k collapses a pure state |phi> to P_k|phi> / sqrt(p_k) with
//! Born probability p_k = <phi|P_k|phi>. Within a degenerate eigenspace the
//! state is disturbed minimally; the post-state is the closest point of the
//! eigenspace in transition probability. The older von Neumann prescription
//! instead projects onto a full apparatus basis, dephasing degenerate
//! subspaces; [`von_neumann_measure_unread`] exposes that channel for
//! contrast.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::observable::Observable;
use crate::state::{check_dims, CMatrix, DensityMatrix, PostState, PureState};
use crate::stats::wilson_interval;
use crate::stream::derive_stream;

/// Probabilities below this are treated as an impossible outcome rather
/// than a tiny one; conditioning on them is rejected deterministically.
pub const ZERO_PROBABILITY_THRESHOLD: f64 = 1e-14;

/// One sampled measurement: which eigenvalue group fired, with what Born
/// probability, and the state left behind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementOutcome {
    /// Index k of the eigenvalue group that was observed.
    #[serde(rename = "k")]
    pub group_index: usize,
    /// The degenerate eigenvalue lambda_k attached to the group.
    pub eigenvalue: f64,
    /// Born probability of this outcome given the pre-measurement state.
    pub probability: f64,
    pub post_state: PostState,
}

/// Born probabilities for every eigenvalue group, as `(lambda_k, p_k)`
/// ordered by group index. The probabilities sum to 1 within 1e-12.
pub fn outcome_probabilities(state: &PureState, obs: &Observable) -> Result<Vec<(f64, f64)>> {
    check_dims(obs.dim(), state.dim())?;
    Ok((0..obs.num_groups())
        .map(|k| {
            let p = obs.group_coefficients(state, k).norm_squared();
            (obs.eigenvalues()[k], p)
        })
        .collect())
}

/// Collapse of a pure state onto eigenvalue group `k`:
/// |phi> -> P_k|phi> / sqrt(p_k), normalized.
pub fn lueders_collapse(state: &PureState, obs: &Observable, k: usize) -> Result<PureState> {
    check_dims(obs.dim(), state.dim())?;
    check_group(obs, k)?;
    let coeff = obs.group_coefficients(state, k);
    let probability = coeff.norm_squared();
    if probability < ZERO_PROBABILITY_THRESHOLD {
        return Err(Error::ZeroProbabilityOutcome {
            group: k,
            probability,
        });
    }
    let projected = obs.apply_projector(&coeff, k);
    let norm = projected.norm();
    Ok(PureState::from_normalized(
        projected / num_complex::Complex64::new(norm, 0.0),
    ))
}

/// Mixed-state form of the collapse: rho -> P_k rho P_k / tr(P_k rho).
pub fn lueders_collapse_mixed(
    rho: &DensityMatrix,
    obs: &Observable,
    k: usize,
) -> Result<DensityMatrix> {
    check_dims(obs.dim(), rho.dim())?;
    check_group(obs, k)?;
    let p = obs.projector(k);
    let probability = (p * rho.matrix()).trace().re;
    if probability < ZERO_PROBABILITY_THRESHOLD {
        return Err(Error::ZeroProbabilityOutcome {
            group: k,
            probability,
        });
    }
    let projected = p * rho.matrix() * p;
    let trace = projected.trace().re;
    DensityMatrix::new(projected / num_complex::Complex64::new(trace, 0.0))
}

/// The unread measurement channel rho -> sum_k P_k rho P_k: the ensemble
/// left behind when the outcome is discarded.
pub fn lueders_measure_unread(rho: &DensityMatrix, obs: &Observable) -> Result<DensityMatrix> {
    check_dims(obs.dim(), rho.dim())?;
    let dim = rho.dim();
    let mut out = CMatrix::zeros(dim, dim);
    for p in obs.projectors() {
        out += p * rho.matrix() * p;
    }
    DensityMatrix::new(out)
}

/// Samples one measurement of `state` by `obs`.
///
/// Consumes exactly one uniform draw from `rng` and picks the outcome group
/// by inverse CDF over the Born distribution, so a trial can be replayed
/// exactly from the stream state.
pub fn measure(state: &PureState, obs: &Observable, rng: &mut impl Rng) -> Result<MeasurementOutcome> {
    check_dims(obs.dim(), state.dim())?;
    let groups = obs.num_groups();
    let probabilities: Vec<f64> = (0..groups)
        .map(|k| obs.group_coefficients(state, k).norm_squared())
        .collect();

    let u: f64 = rng.random();
    let mut cumulative = 0.0;
    let mut chosen = None;
    for (k, &p) in probabilities.iter().enumerate() {
        cumulative += p;
        if u < cumulative {
            chosen = Some(k);
            break;
        }
    }
    // u can land past the accumulated total by rounding; fall back to the
    // last group that has mass.
    let k = chosen.unwrap_or_else(|| {
        probabilities
            .iter()
            .rposition(|&p| p > ZERO_PROBABILITY_THRESHOLD)
            .unwrap_or(groups - 1)
    });

    let post = lueders_collapse(state, obs, k)?;
    Ok(MeasurementOutcome {
        group_index: k,
        eigenvalue: obs.eigenvalues()[k],
        probability: probabilities[k],
        post_state: PostState::Pure(post),
    })
}

/// Unread von Neumann measurement: projects onto a full orthonormal basis
/// and discards the outcome, returning sum_i |<b_i|phi>|^2 |b_i><b_i|.
///
/// Unlike the unread channel built from a degenerate observable's
/// projectors, this dephases inside degenerate subspaces; the basis choice
/// is part of the apparatus.
pub fn von_neumann_measure_unread(state: &PureState, basis: &[PureState]) -> Result<DensityMatrix> {
    let dim = state.dim();
    if basis.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: basis.len(),
        });
    }
    let mut deviation = 0.0f64;
    for (i, a) in basis.iter().enumerate() {
        check_dims(dim, a.dim())?;
        for (j, b) in basis.iter().enumerate() {
            let expected = if i == j { 1.0 } else { 0.0 };
            let dot = a.amplitudes().dotc(b.amplitudes());
            deviation = deviation.max((dot - num_complex::Complex64::new(expected, 0.0)).norm());
        }
    }
    if deviation > 1e-10 {
        return Err(Error::BasisNotOrthonormal { deviation });
    }

    let mut weights = Vec::with_capacity(dim);
    let mut total = 0.0;
    for b in basis {
        let w = b.amplitudes().dotc(state.amplitudes()).norm_sqr();
        weights.push(w);
        total += w;
    }
    let mut out = CMatrix::zeros(dim, dim);
    for (b, w) in basis.iter().zip(&weights) {
        let scale = num_complex::Complex64::new(w / total, 0.0);
        for i in 0..dim {
            for j in 0..dim {
                out[(i, j)] += b.amplitude(i) * b.amplitude(j).conj() * scale;
            }
        }
    }
    DensityMatrix::new(out)
}

fn check_group(obs: &Observable, k: usize) -> Result<()> {
    if k < obs.num_groups() {
        Ok(())
    } else {
        Err(Error::GroupIndexOutOfRange {
            index: k,
            groups: obs.num_groups(),
        })
    }
}

/// Outcome tallies from repeatedly measuring the same prepared state, with
/// Born references and Wilson intervals per group.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasurementTally {
    pub trials: u64,
    pub seed: u64,
    pub eigenvalues: Vec<f64>,
    pub born: Vec<f64>,
    pub counts: Vec<u64>,
    pub frequencies: Vec<f64>,
    pub ci_low: Vec<f64>,
    pub ci_high: Vec<f64>,
    /// |frequency - born| in binomial standard deviations, per group.
    pub sigma_deviations: Vec<f64>,
}

/// Measures `trials` independent preparations of `state`, one derived
/// random stream per trial.
pub fn measurement_tally(
    state: &PureState,
    obs: &Observable,
    trials: u64,
    seed: u64,
) -> Result<MeasurementTally> {
    let born: Vec<f64> = outcome_probabilities(state, obs)?
        .into_iter()
        .map(|(_, p)| p)
        .collect();
    let mut counts = vec![0u64; obs.num_groups()];
    for trial in 0..trials {
        let mut rng = derive_stream(seed, trial);
        let outcome = measure(state, obs, &mut rng)?;
        counts[outcome.group_index] += 1;
    }

    let mut frequencies = Vec::new();
    let mut ci_low = Vec::new();
    let mut ci_high = Vec::new();
    let mut sigma_deviations = Vec::new();
    for (k, &c) in counts.iter().enumerate() {
        let freq = c as f64 / trials as f64;
        let (low, high) = wilson_interval(c, trials, 0.95);
        let sigma = (born[k] * (1.0 - born[k]) / trials as f64).sqrt();
        frequencies.push(freq);
        ci_low.push(low);
        ci_high.push(high);
        sigma_deviations.push(if sigma > 0.0 {
            (freq - born[k]).abs() / sigma
        } else {
            0.0
        });
    }

    Ok(MeasurementTally {
        trials,
        seed,
        eigenvalues: obs.eigenvalues().to_vec(),
        born,
        counts,
        frequencies,
        ci_low,
        ci_high,
        sigma_deviations,
    })
}
