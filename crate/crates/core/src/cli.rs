//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 for usage errors and parameters out of
//! range, 2 for unreadable or invalid data.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::engine::{run_eca_es, run_eca_ts, EcaParams, Format};
use crate::error::EcaError;
use crate::io::{
    format_es, format_ts, parse_span, read_labels, read_series, read_series_with_span, ColumnRef,
    InputFormat, SeriesData,
};
use crate::report::RunReport;
use crate::series::{binarize, es_to_ts, ts_to_es, Direction, ThresholdMethod, ThresholdSpec};
use crate::significance::{SigConfig, SigMethod};
use crate::viz::{self, PlotSpec, Track};

/// Environment variable supplying a default `--seed`.
pub const SEED_ENV: &str = "ECA_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "eca",
    version,
    about = "Event coincidence analysis for pairs of event series"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Turn a numeric column into a 0/1 event time series.
    Binarize(BinarizeArgs),
    /// Convert between event time series and event sequences.
    Convert(ConvertArgs),
    /// Compute coincidence rates and their significance.
    Eca(EcaArgs),
    /// Draw the event raster of two event time series as SVG.
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
struct BinarizeArgs {
    /// Delimited file with the numeric column.
    #[arg(long)]
    input: PathBuf,
    /// Column name or 0-based index.
    #[arg(long, default_value = "0")]
    column: ColumnRef,
    #[arg(long, value_enum, default_value_t = ThresholdMethod::Percentile)]
    method: ThresholdMethod,
    /// Percentile in [0, 1] or absolute threshold, depending on --method.
    #[arg(long, allow_negative_numbers = true)]
    thres: f64,
    /// Whether values above or below the threshold are events.
    #[arg(long, value_enum, default_value_t = Direction::Higher)]
    event: Direction,
    /// Write here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ConvertArgs {
    #[arg(long)]
    input: PathBuf,
    /// Column name or 0-based index.
    #[arg(long, default_value = "0")]
    column: ColumnRef,
    /// Target format; the input is read as the other one.
    #[arg(long, value_enum)]
    to: Format,
    /// Decimal digits kept when sampling an event sequence.
    #[arg(long, default_value_t = 0)]
    digits: u32,
    /// Observation span `<start>,<end>` of an event-sequence input.
    #[arg(long, allow_hyphen_values = true)]
    span: Option<String>,
    /// Write here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct WindowArgs {
    /// Tolerance window.
    #[arg(long = "delt", default_value_t = 0.0, allow_negative_numbers = true)]
    delt: f64,
    /// Use a symmetric tolerance window.
    #[arg(long)]
    sym: bool,
    /// Time lag.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    tau: f64,
}

impl WindowArgs {
    fn params(&self) -> Result<EcaParams, EcaError> {
        EcaParams::new(self.delt, self.sym, self.tau)
    }
}

#[derive(Debug, Args)]
struct EcaArgs {
    /// Delimited file holding series A.
    #[arg(long)]
    series_a: PathBuf,
    /// Delimited file holding series B.
    #[arg(long)]
    series_b: PathBuf,
    /// Column of series A: header name or 0-based index.
    #[arg(long, default_value = "0")]
    column_a: ColumnRef,
    /// Column of series B: header name or 0-based index.
    #[arg(long, default_value = "0")]
    column_b: ColumnRef,
    #[arg(long, value_enum, default_value_t = Format::Ts)]
    format: Format,
    /// Span `<start>,<end>` of series A (es format), overriding the file.
    #[arg(long, allow_hyphen_values = true)]
    span_a: Option<String>,
    /// Span `<start>,<end>` of series B (es format), overriding the file.
    #[arg(long, allow_hyphen_values = true)]
    span_b: Option<String>,
    #[command(flatten)]
    window: WindowArgs,
    /// Significance test.
    #[arg(long, value_enum, default_value_t = SigMethod::Poisson)]
    sigtest: SigMethod,
    /// Surrogate ensemble size.
    #[arg(long, default_value_t = 1000, allow_negative_numbers = true)]
    reps: i64,
    /// Significance level; the null hypothesis is retained when p >= alpha.
    #[arg(long, default_value_t = 0.05, allow_negative_numbers = true)]
    alpha: f64,
    /// Seed for surrogate tests.
    #[arg(long, env = SEED_ENV)]
    seed: Option<u64>,
    /// Print the full report as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct PlotArgs {
    /// Delimited file holding series A.
    #[arg(long)]
    series_a: PathBuf,
    /// Delimited file holding series B.
    #[arg(long)]
    series_b: PathBuf,
    /// Column of series A: header name or 0-based index.
    #[arg(long, default_value = "0")]
    column_a: ColumnRef,
    /// Column of series B: header name or 0-based index.
    #[arg(long, default_value = "0")]
    column_b: ColumnRef,
    #[command(flatten)]
    window: WindowArgs,
    /// File with one date label per time step.
    #[arg(long)]
    dates: Option<PathBuf>,
    /// Column of the date file: header name or 0-based index.
    #[arg(long, default_value = "0")]
    dates_column: ColumnRef,
    /// Draw this track without the coincident/non-coincident shading.
    #[arg(long, value_enum)]
    reference: Option<Track>,
    /// SVG file to write.
    #[arg(long)]
    output: PathBuf,
}

enum Failure {
    Usage(String),
    Data(String),
}

impl From<EcaError> for Failure {
    fn from(e: EcaError) -> Self {
        match e {
            EcaError::InvalidParameter(_) | EcaError::SymmetricWithLag(_) => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Data(e.to_string()),
        }
    }
}

fn usage(e: EcaError) -> Failure {
    Failure::Usage(e.to_string())
}

/// Parses `argv` (including the program name), runs the subcommand and
/// returns the process exit code.
pub fn run_cli<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Binarize(args) => cmd_binarize(args, out),
        Command::Convert(args) => cmd_convert(args, out),
        Command::Eca(args) => cmd_eca(args, out),
        Command::Plot(args) => cmd_plot(args),
    };
    match outcome {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
        Err(Failure::Data(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

fn emit(text: &str, output: Option<&PathBuf>, out: &mut dyn Write) -> Result<(), Failure> {
    match output {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Data(e.to_string())),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Data(e.to_string())),
    }
}

fn span_arg(text: Option<&String>) -> Result<Option<(f64, f64)>, Failure> {
    text.map(|s| parse_span(s)).transpose().map_err(usage)
}

fn cmd_binarize(args: BinarizeArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let spec = ThresholdSpec::new(args.method, args.thres, args.event).map_err(usage)?;
    let SeriesData::Raw(values) = read_series(&args.input, &args.column, InputFormat::Raw)? else {
        unreachable!("raw input yields raw data");
    };
    let series = binarize(&values, &spec)?;
    emit(&format_ts(&series), args.output.as_ref(), out)
}

fn cmd_convert(args: ConvertArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let span = span_arg(args.span.as_ref())?;
    let text = match args.to {
        Format::Es => match read_series(&args.input, &args.column, InputFormat::Ts)? {
            SeriesData::Ts(ts) => format_es(&ts_to_es(&ts)?),
            _ => unreachable!("ts input yields ts data"),
        },
        Format::Ts => {
            match read_series_with_span(&args.input, &args.column, InputFormat::Es, span)? {
                SeriesData::Es(es) => format_ts(&es_to_ts(&es, args.digits)?),
                _ => unreachable!("es input yields es data"),
            }
        }
    };
    emit(&text, args.output.as_ref(), out)
}

fn cmd_eca(args: EcaArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let params = args.window.params().map_err(usage)?;
    if args.format == Format::Ts {
        params.validate_for_steps().map_err(usage)?;
    }
    let reps = usize::try_from(args.reps)
        .map_err(|_| Failure::Usage(format!("reps must satisfy reps >= 1, got {}", args.reps)))?;
    let sig = SigConfig {
        method: args.sigtest,
        reps,
        alpha: args.alpha,
        seed: args.seed,
    };
    sig.validate().map_err(usage)?;
    let span_a = span_arg(args.span_a.as_ref())?;
    let span_b = span_arg(args.span_b.as_ref())?;

    let run = match args.format {
        Format::Ts => {
            let a = read_ts(&args.series_a, &args.column_a)?;
            let b = read_ts(&args.series_b, &args.column_b)?;
            run_eca_ts(&a, &b, &params, &sig)?
        }
        Format::Es => {
            let a = read_es(&args.series_a, &args.column_a, span_a)?;
            let b = read_es(&args.series_b, &args.column_b, span_b)?;
            run_eca_es(&a, &b, &params, &sig)?
        }
    };
    let report = RunReport::new(&run, &params, &sig);
    let text = if args.json {
        let mut json = report.to_json();
        json.push('\n');
        json
    } else {
        report.to_text()
    };
    emit(&text, None, out)
}

fn read_ts(path: &PathBuf, column: &ColumnRef) -> Result<crate::series::EventTimeSeries, Failure> {
    match read_series(path, column, InputFormat::Ts)? {
        SeriesData::Ts(ts) => Ok(ts),
        _ => unreachable!("ts input yields ts data"),
    }
}

fn read_es(
    path: &PathBuf,
    column: &ColumnRef,
    span: Option<(f64, f64)>,
) -> Result<crate::series::EventSequence, Failure> {
    match read_series_with_span(path, column, InputFormat::Es, span)? {
        SeriesData::Es(es) => Ok(es),
        _ => unreachable!("es input yields es data"),
    }
}

fn cmd_plot(args: PlotArgs) -> Result<(), Failure> {
    let params = args.window.params().map_err(usage)?;
    params.validate_for_steps().map_err(usage)?;
    let mut spec = PlotSpec::new(
        read_ts(&args.series_a, &args.column_a)?,
        read_ts(&args.series_b, &args.column_b)?,
        params,
    );
    if let Some(path) = &args.dates {
        spec.dates = Some(read_labels(path, &args.dates_column)?);
    }
    spec.reference = args.reference;
    viz::render(&spec, &args.output)?;
    Ok(())
}
