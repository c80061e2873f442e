//! Coincidence counting.
//!
//! A precursor coincidence marks an A-event at `t` when some B-event `s`
//! satisfies `(t - tau) - s` in `[0, delT]`; a trigger coincidence marks a
//! B-event `s` when some A-event `t` satisfies the same condition. Symmetric
//! windows replace `[0, delT]` with `[-delT, delT]` and require `tau = 0`.
//! All windows are closed and are never clipped at the series boundaries.
//!
//! Counting runs on sorted event times with a binary search per event, so a
//! pair of series costs `O((N_A + N_B) log(N_A + N_B))`.

use serde::{Deserialize, Serialize};

use crate::error::{EcaError, Result};
use crate::series::{EventSequence, EventTimeSeries, Step};
use crate::significance::{self, EcaResult, SigConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    /// Event sequences: real-valued times inside an observation span.
    Es,
    /// Event time series: one indicator per time step.
    Ts,
}

impl std::fmt::Display for Format {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Format::Es => "es",
            Format::Ts => "ts",
        })
    }
}

/// Tolerance window, symmetry and lag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EcaParams {
    pub delt: f64,
    pub sym: bool,
    pub tau: f64,
}

impl Default for EcaParams {
    fn default() -> Self {
        Self {
            delt: 0.0,
            sym: false,
            tau: 0.0,
        }
    }
}

impl EcaParams {
    pub fn new(delt: f64, sym: bool, tau: f64) -> Result<Self> {
        let params = Self { delt, sym, tau };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delt.is_finite() && self.delt >= 0.0) {
            return Err(EcaError::InvalidParameter(format!(
                "delT must satisfy delT >= 0, got {}",
                self.delt
            )));
        }
        if !(self.tau.is_finite() && self.tau >= 0.0) {
            return Err(EcaError::InvalidParameter(format!(
                "tau must satisfy tau >= 0, got {}",
                self.tau
            )));
        }
        if self.sym && self.tau > 0.0 {
            return Err(EcaError::SymmetricWithLag(self.tau));
        }
        Ok(())
    }

    /// Event time series count in whole time steps.
    pub fn validate_for_steps(&self) -> Result<()> {
        self.validate()?;
        if self.delt.fract() != 0.0 || self.tau.fract() != 0.0 {
            return Err(EcaError::InvalidParameter(format!(
                "delT and tau must be whole numbers of time steps for ts data, got delT = {}, tau = {}",
                self.delt, self.tau
            )));
        }
        Ok(())
    }

    /// Bounds on `(t_a - tau) - t_b` for a coincidence.
    fn window(&self) -> (f64, f64) {
        if self.sym {
            (-self.delt, self.delt)
        } else {
            (0.0, self.delt)
        }
    }
}

/// The observation domain events live on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Support {
    /// Time steps `1..=n` after missing-value removal.
    Steps(usize),
    /// Continuous span `[start, end]`.
    Span { start: f64, end: f64 },
}

impl Support {
    /// Length `T` entering the significance tests.
    pub fn length(&self) -> f64 {
        match *self {
            Support::Steps(n) => n as f64,
            Support::Span { start, end } => end - start,
        }
    }

    pub fn format(&self) -> Format {
        match self {
            Support::Steps(_) => Format::Ts,
            Support::Span { .. } => Format::Es,
        }
    }
}

/// Two aligned event series on a common support, ready for counting.
#[derive(Debug, Clone, PartialEq)]
pub struct EventPair {
    a: Vec<f64>,
    b: Vec<f64>,
    support: Support,
}

impl EventPair {
    /// Drops every step that is missing in either series, re-indexes the
    /// remaining steps as `1..=T_eff` and keeps the event positions.
    pub fn from_ts(a: &EventTimeSeries, b: &EventTimeSeries) -> Result<Self> {
        if a.len() != b.len() {
            return Err(EcaError::LengthMismatch(a.len(), b.len()));
        }
        let mut ta = Vec::new();
        let mut tb = Vec::new();
        let mut kept = 0usize;
        for (&sa, &sb) in a.steps().iter().zip(b.steps()) {
            if sa == Step::Missing || sb == Step::Missing {
                continue;
            }
            kept += 1;
            if sa.is_event() {
                ta.push(kept as f64);
            }
            if sb.is_event() {
                tb.push(kept as f64);
            }
        }
        if kept < a.len() {
            log::info!(
                "ignoring {} time step(s) with missing values",
                a.len() - kept
            );
        }
        Ok(Self {
            a: ta,
            b: tb,
            support: Support::Steps(kept),
        })
    }

    /// Restricts both sequences to the overlap of their spans.
    pub fn from_es(a: &EventSequence, b: &EventSequence) -> Result<Self> {
        let start = a.start().max(b.start());
        let end = a.end().min(b.end());
        if start >= end {
            return Err(EcaError::InvalidSpan {
                start,
                end,
                reason: "the spans of the two sequences do not overlap",
            });
        }
        let clip = |s: &EventSequence| -> Vec<f64> {
            s.times()
                .iter()
                .copied()
                .filter(|&t| t >= start && t <= end)
                .collect()
        };
        Ok(Self {
            a: clip(a),
            b: clip(b),
            support: Support::Span { start, end },
        })
    }

    /// Builds a pair from raw sorted times. Used by surrogate generation and
    /// tests; `a` and `b` must be sorted ascending and lie inside `support`.
    pub fn from_sorted(a: Vec<f64>, b: Vec<f64>, support: Support) -> Self {
        debug_assert!(a.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(b.windows(2).all(|w| w[0] < w[1]));
        Self { a, b, support }
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn support(&self) -> Support {
        self.support
    }

    pub fn format(&self) -> Format {
        self.support.format()
    }

    fn check_params(&self, params: &EcaParams) -> Result<()> {
        match self.support {
            Support::Steps(_) => params.validate_for_steps(),
            Support::Span { .. } => params.validate(),
        }
    }

    fn check_events(&self) -> Result<()> {
        if self.a.is_empty() {
            return Err(EcaError::NoEvents('A'));
        }
        if self.b.is_empty() {
            return Err(EcaError::NoEvents('B'));
        }
        Ok(())
    }
}

/// Matches found on one side of the comparison.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coincidences {
    pub k: usize,
    pub flags: Vec<bool>,
}

impl Coincidences {
    fn from_flags(flags: Vec<bool>) -> Self {
        let k = flags.iter().filter(|&&f| f).count();
        Self { k, flags }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoincidenceCounts {
    pub k_p: usize,
    pub k_t: usize,
    pub n_a: usize,
    pub n_b: usize,
    /// Series length after missing-value removal (ts) or span length (es).
    pub t_eff: f64,
    pub flags_a: Vec<bool>,
    pub flags_b: Vec<bool>,
}

impl CoincidenceCounts {
    pub fn rate_precursor(&self) -> f64 {
        self.k_p as f64 / self.n_a as f64
    }

    pub fn rate_trigger(&self) -> f64 {
        self.k_t as f64 / self.n_b as f64
    }
}

fn precursor_hit(t_a: f64, b: &[f64], params: &EcaParams) -> bool {
    let (lo, hi) = params.window();
    let x = t_a - params.tau;
    // x - s is non-increasing in s: skip the B-events that are too early.
    let idx = b.partition_point(|&s| x - s > hi);
    b.get(idx).is_some_and(|&s| x - s >= lo)
}

fn trigger_hit(t_b: f64, a: &[f64], params: &EcaParams) -> bool {
    let (lo, hi) = params.window();
    let idx = a.partition_point(|&t| (t - params.tau) - t_b < lo);
    a.get(idx).is_some_and(|&t| (t - params.tau) - t_b <= hi)
}

/// Number of A-events with a precursor coincidence. Inputs must be sorted.
pub fn precursor_count(a: &[f64], b: &[f64], params: &EcaParams) -> usize {
    a.iter().filter(|&&t| precursor_hit(t, b, params)).count()
}

/// Number of B-events with a trigger coincidence. Inputs must be sorted.
pub fn trigger_count(a: &[f64], b: &[f64], params: &EcaParams) -> usize {
    b.iter().filter(|&&t| trigger_hit(t, a, params)).count()
}

fn precursor_flags(a: &[f64], b: &[f64], params: &EcaParams) -> Vec<bool> {
    a.iter().map(|&t| precursor_hit(t, b, params)).collect()
}

fn trigger_flags(a: &[f64], b: &[f64], params: &EcaParams) -> Vec<bool> {
    b.iter().map(|&t| trigger_hit(t, a, params)).collect()
}

fn check_sequences(a: &EventSequence, b: &EventSequence, params: &EcaParams) -> Result<()> {
    params.validate()?;
    if a.start().max(b.start()) >= a.end().min(b.end()) {
        return Err(EcaError::InvalidSpan {
            start: a.start().max(b.start()),
            end: a.end().min(b.end()),
            reason: "the spans of the two sequences do not overlap",
        });
    }
    if a.n_events() == 0 {
        return Err(EcaError::NoEvents('A'));
    }
    if b.n_events() == 0 {
        return Err(EcaError::NoEvents('B'));
    }
    Ok(())
}

/// Marks every A-event preceded (within `tau` and `delT`) by a B-event.
pub fn count_precursor(
    a: &EventSequence,
    b: &EventSequence,
    params: &EcaParams,
) -> Result<Coincidences> {
    check_sequences(a, b, params)?;
    Ok(Coincidences::from_flags(precursor_flags(
        a.times(),
        b.times(),
        params,
    )))
}

/// Marks every B-event followed (within `tau` and `delT`) by an A-event.
pub fn count_trigger(
    a: &EventSequence,
    b: &EventSequence,
    params: &EcaParams,
) -> Result<Coincidences> {
    check_sequences(a, b, params)?;
    Ok(Coincidences::from_flags(trigger_flags(
        a.times(),
        b.times(),
        params,
    )))
}

/// Counts both coincidence types on an aligned pair.
pub fn count_coincidences(pair: &EventPair, params: &EcaParams) -> Result<CoincidenceCounts> {
    pair.check_params(params)?;
    pair.check_events()?;
    let p = Coincidences::from_flags(precursor_flags(&pair.a, &pair.b, params));
    let t = Coincidences::from_flags(trigger_flags(&pair.a, &pair.b, params));
    Ok(CoincidenceCounts {
        k_p: p.k,
        k_t: t.k,
        n_a: pair.a.len(),
        n_b: pair.b.len(),
        t_eff: pair.support.length(),
        flags_a: p.flags,
        flags_b: t.flags,
    })
}

/// Outcome of a full analysis: the summary result, the raw counts and the
/// seed the surrogate ensemble was drawn with (if any).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EcaRun {
    pub result: EcaResult,
    pub counts: CoincidenceCounts,
    pub format: Format,
    pub seed: Option<u64>,
}

/// Counts coincidences and runs the configured significance test.
pub fn run_eca(pair: &EventPair, params: &EcaParams, sig: &SigConfig) -> Result<EcaRun> {
    sig.validate()?;
    let counts = count_coincidences(pair, params)?;
    let (pvalues, seed) = significance::test_pair(pair, &counts, params, sig)?;
    let result = EcaResult::new(
        pvalues,
        counts.rate_precursor(),
        counts.rate_trigger(),
        sig.alpha,
    );
    Ok(EcaRun {
        result,
        counts,
        format: pair.format(),
        seed,
    })
}

/// Analysis of two event time series. Steps missing in either series are
/// removed pairwise before counting, which makes steps on both sides of a
/// gap adjacent.
pub fn run_eca_ts(
    a: &EventTimeSeries,
    b: &EventTimeSeries,
    params: &EcaParams,
    sig: &SigConfig,
) -> Result<EcaRun> {
    params.validate_for_steps()?;
    run_eca(&EventPair::from_ts(a, b)?, params, sig)
}

/// Analysis of two event sequences over the overlap of their spans.
pub fn run_eca_es(
    a: &EventSequence,
    b: &EventSequence,
    params: &EcaParams,
    sig: &SigConfig,
) -> Result<EcaRun> {
    params.validate()?;
    run_eca(&EventPair::from_es(a, b)?, params, sig)
}
