//! Run reports in human-readable and JSON form.

use serde::{Deserialize, Serialize};

use crate::engine::{EcaParams, EcaRun, Format};
use crate::error::{EcaError, Result};
use crate::significance::{EcaResult, SigConfig, SigMethod};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    #[serde(flatten)]
    pub result: EcaResult,
    pub method: SigMethod,
    pub reps: usize,
    pub alpha: f64,
    /// Seed of the surrogate ensemble; absent for the analytical test.
    pub seed: Option<u64>,
    pub delt: f64,
    pub tau: f64,
    pub sym: bool,
    pub format: Format,
    pub n_a: usize,
    pub n_b: usize,
    pub k_p: usize,
    pub k_t: usize,
    pub t_eff: f64,
}

impl RunReport {
    pub fn new(run: &EcaRun, params: &EcaParams, sig: &SigConfig) -> Self {
        Self {
            result: run.result,
            method: sig.method,
            reps: sig.reps,
            alpha: sig.alpha,
            seed: run.seed,
            delt: params.delt,
            tau: params.tau,
            sym: params.sym,
            format: run.format,
            n_a: run.counts.n_a,
            n_b: run.counts.n_b,
            k_p: run.counts.k_p,
            k_t: run.counts.k_t,
            t_eff: run.counts.t_eff,
        }
    }

    /// The six-line summary:
    ///
    /// ```text
    /// NH precursor: FALSE
    /// NH trigger: FALSE
    /// p-value precursor: 0.03824319
    /// p-value trigger: 0.04147892
    /// precursor coincidence rate: 0.2727273
    /// trigger coincidence rate: 0.1875
    /// ```
    pub fn to_text(&self) -> String {
        let r = &self.result;
        format!(
            "NH precursor: {}\nNH trigger: {}\np-value precursor: {}\np-value trigger: {}\n\
             precursor coincidence rate: {}\ntrigger coincidence rate: {}\n",
            flag(r.nh_precursor),
            flag(r.nh_trigger),
            format_sig(r.p_precursor),
            format_sig(r.p_trigger),
            format_sig(r.rate_precursor),
            format_sig(r.rate_trigger),
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| EcaError::Parse(e.to_string()))
    }
}

fn flag(b: bool) -> &'static str {
    if b {
        "TRUE"
    } else {
        "FALSE"
    }
}

pub const SIGNIFICANT_DIGITS: usize = 7;

/// Rounds to [`SIGNIFICANT_DIGITS`] significant digits and prints without
/// trailing zeros; values below `1e-4` switch to exponent notation.
pub fn format_sig(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .expect("formatted float parses");
    if rounded != 0.0 && rounded.abs() < 1e-4 {
        format!("{rounded:e}")
    } else {
        format!("{rounded}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(format_sig(0.038243189650597), "0.03824319");
        assert_eq!(format_sig(3.0 / 11.0), "0.2727273");
        assert_eq!(format_sig(0.1875), "0.1875");
        assert_eq!(format_sig(0.5), "0.5");
        assert_eq!(format_sig(1.0), "1");
        assert_eq!(format_sig(0.0), "0");
        assert_eq!(format_sig(0.0621), "0.0621");
        assert_eq!(format_sig(1.23456789e-7), "1.234568e-7");
    }

    fn sample() -> RunReport {
        RunReport {
            result: EcaResult {
                nh_precursor: false,
                nh_trigger: true,
                p_precursor: 0.038243189650597,
                p_trigger: 0.0625,
                rate_precursor: 3.0 / 11.0,
                rate_trigger: 0.1875,
            },
            method: SigMethod::Shuffle,
            reps: 1000,
            alpha: 0.05,
            seed: Some(42),
            delt: 0.0,
            tau: 0.0,
            sym: false,
            format: Format::Ts,
            n_a: 11,
            n_b: 16,
            k_p: 3,
            k_t: 3,
            t_eff: 218.0,
        }
    }

    #[test]
    fn text_layout() {
        let text = sample().to_text();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(
            lines,
            vec![
                "NH precursor: FALSE",
                "NH trigger: TRUE",
                "p-value precursor: 0.03824319",
                "p-value trigger: 0.0625",
                "precursor coincidence rate: 0.2727273",
                "trigger coincidence rate: 0.1875",
            ]
        );
    }

    #[test]
    fn json_has_flat_fields() {
        let json: serde_json::Value = serde_json::from_str(&sample().to_json()).unwrap();
        assert_eq!(json["nh_precursor"], false);
        assert_eq!(json["method"], "shuffle");
        assert_eq!(json["format"], "ts");
        assert_eq!(json["seed"], 42);
        assert_eq!(json["k_p"], 3);
    }
}
