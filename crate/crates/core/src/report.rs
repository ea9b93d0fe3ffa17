//! Structured experiment reports.

use serde::{Deserialize, Serialize};
use std::time::Duration;

use crate::stats::{sigma_deviation, wilson_interval};

/// One checked quantity: an empirical value next to whatever reference it
/// has (closed form, tolerance, confidence interval).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricEntry {
    pub name: String,
    pub empirical: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub analytic: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ci_low: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ci_high: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    /// |empirical - analytic| in binomial standard deviations; present
    /// whenever both an analytic reference and a trial count are.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_deviation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub passed: bool,
}

impl MetricEntry {
    /// Deterministic check: |empirical - expected| <= tolerance.
    pub fn within_tolerance(name: &str, empirical: f64, expected: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            empirical,
            analytic: Some(expected),
            ci_low: None,
            ci_high: None,
            trials: None,
            sigma_deviation: None,
            tolerance: Some(tolerance),
            passed: (empirical - expected).abs() <= tolerance,
        }
    }

    /// Statistical check: empirical rate within `max_sigma` binomial
    /// standard deviations of the analytic rate.
    pub fn within_sigma(
        name: &str,
        successes: u64,
        trials: u64,
        analytic: f64,
        max_sigma: f64,
    ) -> Self {
        let empirical = successes as f64 / trials as f64;
        let dev = sigma_deviation(empirical, analytic, trials);
        let (ci_low, ci_high) = wilson_interval(successes, trials, 0.95);
        Self {
            name: name.to_string(),
            empirical,
            analytic: Some(analytic),
            ci_low: Some(ci_low),
            ci_high: Some(ci_high),
            trials: Some(trials),
            sigma_deviation: Some(dev),
            tolerance: Some(max_sigma),
            passed: dev <= max_sigma,
        }
    }

    /// Boolean check with a 0/1 empirical value.
    pub fn boolean(name: &str, passed: bool) -> Self {
        Self {
            name: name.to_string(),
            empirical: f64::from(u8::from(passed)),
            analytic: Some(1.0),
            ci_low: None,
            ci_high: None,
            trials: None,
            sigma_deviation: None,
            tolerance: None,
            passed,
        }
    }
}

/// A full experiment report: the configuration that produced it and one
/// entry per checked metric.
///
/// Wall time is carried for display but never serialized, so reports from
/// identical configurations are byte-identical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub command: String,
    pub seed: u64,
    pub config: serde_json::Value,
    pub metrics: Vec<MetricEntry>,
    pub all_passed: bool,
    #[serde(skip)]
    pub wall_time: Option<Duration>,
}

impl ExperimentReport {
    pub fn new(command: &str, seed: u64, config: serde_json::Value, metrics: Vec<MetricEntry>) -> Self {
        let all_passed = metrics.iter().all(|m| m.passed);
        Self {
            command: command.to_string(),
            seed,
            config,
            metrics,
            all_passed,
            wall_time: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Fixed-width pass/fail table for terminals.
    pub fn render_table(&self) -> String {
        let name_width = self
            .metrics
            .iter()
            .map(|m| m.name.len())
            .max()
            .unwrap_or(4)
            .max(4);
        let mut out = String::new();
        out.push_str(&format!(
            "{:<width$}  {:>14}  {:>14}  {:>9}  result\n",
            "check",
            "empirical",
            "reference",
            "sigma",
            width = name_width
        ));
        for m in &self.metrics {
            let reference = m
                .analytic
                .map(|a| format!("{a:.9}"))
                .unwrap_or_else(|| "-".to_string());
            let sigma = m
                .sigma_deviation
                .map(|s| format!("{s:.2}"))
                .unwrap_or_else(|| "-".to_string());
            out.push_str(&format!(
                "{:<width$}  {:>14.9}  {:>14}  {:>9}  {}\n",
                m.name,
                m.empirical,
                reference,
                sigma,
                if m.passed { "PASS" } else { "FAIL" },
                width = name_width
            ));
        }
        let (passed, total) = (
            self.metrics.iter().filter(|m| m.passed).count(),
            self.metrics.len(),
        );
        out.push_str(&format!(
            "{}: {passed}/{total} checks passed",
            if self.all_passed { "OK" } else { "FAILED" },
        ));
        if let Some(t) = self.wall_time {
            out.push_str(&format!(" in {:.2}s", t.as_secs_f64()));
        }
        out.push('\n');
        out
    }
}
