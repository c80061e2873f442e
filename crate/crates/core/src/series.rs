//! Event-series data model.
//!
//! Two representations are supported:
//!
//! * [`EventTimeSeries`]: one entry per equidistant time step, each an event,
//!   a non-event or missing.
//! * [`EventSequence`]: strictly increasing real-valued event times inside an
//!   observation span.
//!
//! Raw numeric series are turned into event time series with [`binarize`].

use serde::{Deserialize, Serialize};

use crate::error::{EcaError, Result};

/// State of a single time step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Step {
    NoEvent,
    Event,
    Missing,
}

impl Step {
    pub fn is_event(self) -> bool {
        self == Step::Event
    }

    pub fn is_missing(self) -> bool {
        self == Step::Missing
    }
}

/// Binary event indicator per time step, with missing-value markers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventTimeSeries {
    steps: Vec<Step>,
}

impl EventTimeSeries {
    pub fn new(steps: Vec<Step>) -> Result<Self> {
        if steps.is_empty() {
            return Err(EcaError::EmptyInput("event time series"));
        }
        Ok(Self { steps })
    }

    /// Builds a series from `0`/`1` indicators. Any other value is rejected.
    pub fn from_indicators(values: &[u8]) -> Result<Self> {
        let steps = values
            .iter()
            .map(|&v| match v {
                0 => Ok(Step::NoEvent),
                1 => Ok(Step::Event),
                other => Err(EcaError::Parse(format!("non-binary value {other}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(steps)
    }

    /// Builds a series from optional indicators, `None` meaning missing.
    pub fn from_optional(values: &[Option<bool>]) -> Result<Self> {
        Self::new(
            values
                .iter()
                .map(|v| match v {
                    Some(true) => Step::Event,
                    Some(false) => Step::NoEvent,
                    None => Step::Missing,
                })
                .collect(),
        )
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    /// Always false; a series holds at least one step.
    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn n_events(&self) -> usize {
        self.steps.iter().filter(|s| s.is_event()).count()
    }

    pub fn has_missing(&self) -> bool {
        self.steps.iter().any(|s| s.is_missing())
    }

    /// 1-based indices of the event steps.
    pub fn event_indices(&self) -> Vec<usize> {
        self.steps
            .iter()
            .enumerate()
            .filter(|(_, s)| s.is_event())
            .map(|(i, _)| i + 1)
            .collect()
    }

    /// The same series read backwards in time.
    pub fn reversed(&self) -> Self {
        let mut steps = self.steps.clone();
        steps.reverse();
        Self { steps }
    }
}

/// Sorted, de-duplicated event times together with the observation span.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventSequence {
    times: Vec<f64>,
    start: f64,
    end: f64,
}

impl EventSequence {
    /// Sorts `times` and removes duplicates (with a warning). Every time must
    /// lie within `[start, end]` and `start < end`.
    pub fn new(mut times: Vec<f64>, start: f64, end: f64) -> Result<Self> {
        if !start.is_finite() || !end.is_finite() {
            return Err(EcaError::InvalidSpan {
                start,
                end,
                reason: "bounds must be finite",
            });
        }
        if start >= end {
            return Err(EcaError::InvalidSpan {
                start,
                end,
                reason: "start must be before end",
            });
        }
        if times.iter().any(|t| !t.is_finite()) {
            return Err(EcaError::Parse("event times must be finite".into()));
        }
        times.sort_by(f64::total_cmp);
        let before = times.len();
        times.dedup();
        if times.len() != before {
            log::warn!("removed {} duplicate event time(s)", before - times.len());
        }
        if let (Some(&first), Some(&last)) = (times.first(), times.last()) {
            if first < start || last > end {
                return Err(EcaError::InvalidSpan {
                    start,
                    end,
                    reason: "event times must lie inside the span",
                });
            }
        }
        Ok(Self { times, start, end })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn span(&self) -> (f64, f64) {
        (self.start, self.end)
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        self.end
    }

    pub fn n_events(&self) -> usize {
        self.times.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ThresholdMethod {
    /// `thres` is a quantile level in `[0, 1]` of the empirical distribution.
    Percentile,
    /// `thres` is compared against the values directly.
    Absolute,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Higher,
    Lower,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSpec {
    pub method: ThresholdMethod,
    pub thres: f64,
    pub direction: Direction,
}

impl ThresholdSpec {
    pub fn new(method: ThresholdMethod, thres: f64, direction: Direction) -> Result<Self> {
        let spec = Self {
            method,
            thres,
            direction,
        };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        match self.method {
            ThresholdMethod::Percentile if !(0.0..=1.0).contains(&self.thres) => {
                Err(EcaError::InvalidParameter(format!(
                    "percentile threshold must satisfy 0 <= thres <= 1, got {}",
                    self.thres
                )))
            }
            ThresholdMethod::Absolute if !self.thres.is_finite() => Err(
                EcaError::InvalidParameter("absolute threshold must be finite".into()),
            ),
            _ => Ok(()),
        }
    }
}

/// Empirical quantile with linear interpolation between order statistics
/// at 1-based rank `h = (n - 1) q + 1`. `sorted` must be ascending and
/// non-empty.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let pos = (sorted.len() - 1) as f64 * q;
    let lo = pos.floor() as usize;
    let frac = pos - lo as f64;
    match sorted.get(lo + 1) {
        Some(&hi) if frac > 0.0 => sorted[lo] + frac * (hi - sorted[lo]),
        _ => sorted[lo],
    }
}

/// Turns a numeric series into an event time series. Missing inputs (`None`
/// or NaN) stay missing. Values equal to the cut value are non-events.
pub fn binarize(data: &[Option<f64>], spec: &ThresholdSpec) -> Result<EventTimeSeries> {
    spec.validate()?;
    if data.is_empty() {
        return Err(EcaError::EmptyInput("data to binarize"));
    }
    let present = |v: &Option<f64>| v.filter(|x| !x.is_nan());

    let cut = match spec.method {
        ThresholdMethod::Absolute => spec.thres,
        ThresholdMethod::Percentile => {
            let mut values: Vec<f64> = data.iter().filter_map(present).collect();
            if values.is_empty() {
                return Err(EcaError::AllMissing);
            }
            values.sort_by(f64::total_cmp);
            quantile_sorted(&values, spec.thres)
        }
    };
    if data.iter().all(|v| present(v).is_none()) {
        return Err(EcaError::AllMissing);
    }

    let steps = data
        .iter()
        .map(|v| match present(v) {
            None => Step::Missing,
            Some(x) => {
                let hit = match spec.direction {
                    Direction::Higher => x > cut,
                    Direction::Lower => x < cut,
                };
                if hit {
                    Step::Event
                } else {
                    Step::NoEvent
                }
            }
        })
        .collect();
    EventTimeSeries::new(steps)
}

/// Converts an event time series into an event sequence with 1-based event
/// times and span `(1, T)`.
pub fn ts_to_es(series: &EventTimeSeries) -> Result<EventSequence> {
    if series.has_missing() {
        return Err(EcaError::MissingInSequence);
    }
    let times = series
        .event_indices()
        .into_iter()
        .map(|i| i as f64)
        .collect();
    EventSequence::new(times, 1.0, series.len() as f64)
}

/// Converts an event sequence to an event time series sampled every
/// `10^-digits` time units from the (rounded) span start to the span end.
/// Events landing on the same step after rounding are merged with a warning.
pub fn es_to_ts(seq: &EventSequence, digits: u32) -> Result<EventTimeSeries> {
    if digits > 15 {
        return Err(EcaError::InvalidParameter(format!(
            "resolution digits must be <= 15, got {digits}"
        )));
    }
    let scale = 10f64.powi(digits as i32);
    let to_grid = |t: f64| (t * scale).round() as i64;
    let first = to_grid(seq.start());
    let last = to_grid(seq.end());
    let len = usize::try_from(last - first + 1)
        .map_err(|_| EcaError::InvalidParameter("span collapses at this resolution".into()))?;

    let mut steps = vec![Step::NoEvent; len];
    let mut merged = 0usize;
    for &t in seq.times() {
        let idx = (to_grid(t) - first).clamp(0, len as i64 - 1) as usize;
        if steps[idx].is_event() {
            merged += 1;
        }
        steps[idx] = Step::Event;
    }
    if merged > 0 {
        log::warn!("{merged} event(s) merged onto an occupied time step after rounding");
    }
    EventTimeSeries::new(steps)
}
