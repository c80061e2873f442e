//! Event coincidence analysis.
//!
//! Quantifies how often events in one series coincide, simultaneously or
//! with a lag and within a tolerance window, with events in another series,
//! and tests whether the observed coincidences could arise by chance.
//!
//! * [`series`]: event time series, event sequences, binarization and
//!   format conversion.
//! * [`engine`]: precursor and trigger coincidence counting.
//! * [`significance`]: analytical, shuffle and waiting-time surrogate tests.
//! * [`viz`]: SVG event raster.
//! * [`io`], [`report`], [`cli`]: file formats, reports and the `eca`
//!   command.

pub mod cli;
pub mod engine;
pub mod error;
pub mod io;
pub mod report;
pub mod series;
pub mod significance;
pub mod viz;

pub use engine::{
    count_coincidences, count_precursor, count_trigger, run_eca, run_eca_es, run_eca_ts,
    CoincidenceCounts, Coincidences, EcaParams, EcaRun, EventPair, Format, Support,
};
pub use error::{EcaError, Result};
pub use series::{
    binarize, es_to_ts, ts_to_es, Direction, EventSequence, EventTimeSeries, Step, ThresholdMethod,
    ThresholdSpec,
};
pub use significance::{
    analytical_pvalue, decide, effective_tol, shuffle_test, waiting_time_test, EcaResult, PValues,
    SigConfig, SigMethod,
};
