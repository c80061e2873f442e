//! Delimited-file input and output.
//!
//! Input files are comma-separated text. Lines starting with `#` are
//! comments, except `# span: <start>,<end>`, which carries the observation
//! span of an event sequence. The first row is a header when any of its
//! fields is neither a number nor a missing-value marker. Missing values
//! are written `NA` or left empty.

use std::path::Path;
use std::str::FromStr;

use csv::{ReaderBuilder, StringRecord, Trim};

use crate::error::{EcaError, Result};
use crate::series::{EventSequence, EventTimeSeries, Step};

/// A column selected by header name or by 0-based position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnRef {
    Index(usize),
    Name(String),
}

impl Default for ColumnRef {
    fn default() -> Self {
        ColumnRef::Index(0)
    }
}

impl FromStr for ColumnRef {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s.parse::<usize>() {
            Ok(i) => ColumnRef::Index(i),
            Err(_) => ColumnRef::Name(s.to_string()),
        })
    }
}

impl std::fmt::Display for ColumnRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ColumnRef::Index(i) => write!(f, "{i}"),
            ColumnRef::Name(n) => f.write_str(n),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum InputFormat {
    /// Binary event time series with `0`, `1` and missing markers.
    Ts,
    /// Event times plus a span.
    Es,
    /// Numeric values with missing markers.
    Raw,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SeriesData {
    Ts(EventTimeSeries),
    Es(EventSequence),
    Raw(Vec<Option<f64>>),
}

fn is_missing_token(s: &str) -> bool {
    s.is_empty() || s.eq_ignore_ascii_case("na") || s.eq_ignore_ascii_case("nan")
}

/// Parses `# span: <start>,<end>` out of a comment line.
fn span_from_comment(line: &str) -> Option<Result<(f64, f64)>> {
    let body = line.trim().strip_prefix('#')?.trim();
    let rest = body.strip_prefix("span:")?;
    Some(parse_span(rest))
}

/// Parses `"<start>,<end>"`.
pub fn parse_span(text: &str) -> Result<(f64, f64)> {
    let bad = || {
        EcaError::Parse(format!(
            "span must read '<start>,<end>', got '{}'",
            text.trim()
        ))
    };
    let (a, b) = text.split_once(',').ok_or_else(bad)?;
    let start = a.trim().parse::<f64>().map_err(|_| bad())?;
    let end = b.trim().parse::<f64>().map_err(|_| bad())?;
    Ok((start, end))
}

struct Table {
    header: Option<StringRecord>,
    rows: Vec<StringRecord>,
    span: Option<(f64, f64)>,
}

impl Table {
    fn parse(text: &str, force_header: Option<bool>) -> Result<Self> {
        let mut span = None;
        for line in text.lines() {
            if let Some(parsed) = span_from_comment(line) {
                span = Some(parsed?);
            }
        }
        let mut reader = ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .flexible(true)
            .trim(Trim::All)
            .from_reader(text.as_bytes());
        let mut rows = reader
            .records()
            .collect::<std::result::Result<Vec<_>, _>>()?;
        if rows.is_empty() {
            return Err(EcaError::Parse("file contains no data rows".into()));
        }
        let has_header = force_header.unwrap_or_else(|| {
            rows[0]
                .iter()
                .any(|f| !is_missing_token(f) && f.parse::<f64>().is_err())
        });
        let header = has_header.then(|| rows.remove(0));
        Ok(Self { header, rows, span })
    }

    fn column_index(&self, column: &ColumnRef) -> Result<usize> {
        match column {
            ColumnRef::Index(i) => Ok(*i),
            ColumnRef::Name(name) => self
                .header
                .as_ref()
                .and_then(|h| h.iter().position(|f| f == name))
                .ok_or_else(|| EcaError::Parse(format!("no column named '{name}'"))),
        }
    }

    /// Field values of one column; rows too short to reach it yield `""`.
    fn column<'a>(&'a self, column: &ColumnRef) -> Result<impl Iterator<Item = (usize, &'a str)>> {
        let idx = self.column_index(column)?;
        if self.rows.iter().all(|r| r.len() <= idx) {
            return Err(EcaError::Parse(format!("column {column} not found")));
        }
        let offset = if self.header.is_some() { 2 } else { 1 };
        Ok(self
            .rows
            .iter()
            .enumerate()
            .map(move |(i, r)| (i + offset, r.get(idx).unwrap_or(""))))
    }
}

fn parse_number(row: usize, field: &str) -> Result<f64> {
    field
        .parse::<f64>()
        .map_err(|_| EcaError::Parse(format!("row {row}: '{field}' is not a number")))
}

fn raw_values(table: &Table, column: &ColumnRef) -> Result<Vec<Option<f64>>> {
    table
        .column(column)?
        .map(|(row, f)| {
            if is_missing_token(f) {
                Ok(None)
            } else {
                parse_number(row, f).map(Some)
            }
        })
        .collect()
}

fn ts_values(table: &Table, column: &ColumnRef) -> Result<EventTimeSeries> {
    let steps = table
        .column(column)?
        .map(|(row, f)| {
            if is_missing_token(f) {
                return Ok(Step::Missing);
            }
            match parse_number(row, f)? {
                0.0 => Ok(Step::NoEvent),
                1.0 => Ok(Step::Event),
                _ => Err(EcaError::Parse(format!(
                    "row {row}: '{f}' is not a binary event indicator (0, 1 or NA)"
                ))),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    EventTimeSeries::new(steps)
}

/// Event times of one column. Empty fields are skipped so that columns of
/// different length can share a file; other missing markers are rejected.
fn es_times(table: &Table, column: &ColumnRef) -> Result<Vec<f64>> {
    table
        .column(column)?
        .filter(|(_, f)| !f.is_empty())
        .map(|(row, f)| {
            if is_missing_token(f) {
                Err(EcaError::Parse(format!(
                    "row {row}: event sequences cannot contain missing values"
                )))
            } else {
                parse_number(row, f)
            }
        })
        .collect()
}

/// Parses delimited text already loaded into memory. See [`read_series`].
pub fn parse_series(text: &str, column: &ColumnRef, format: InputFormat) -> Result<SeriesData> {
    parse_series_with_span(text, column, format, None)
}

/// Like [`parse_series`]; `span` overrides a `# span:` line for event
/// sequences.
pub fn parse_series_with_span(
    text: &str,
    column: &ColumnRef,
    format: InputFormat,
    span: Option<(f64, f64)>,
) -> Result<SeriesData> {
    let table = Table::parse(text, None)?;
    match format {
        InputFormat::Raw => Ok(SeriesData::Raw(raw_values(&table, column)?)),
        InputFormat::Ts => Ok(SeriesData::Ts(ts_values(&table, column)?)),
        InputFormat::Es => {
            let (start, end) = span.or(table.span).ok_or_else(|| {
                EcaError::Parse("event sequence file needs a '# span: <start>,<end>' line".into())
            })?;
            Ok(SeriesData::Es(EventSequence::new(
                es_times(&table, column)?,
                start,
                end,
            )?))
        }
    }
}

/// Reads one column of a comma-separated file as the requested format.
pub fn read_series(
    path: impl AsRef<Path>,
    column: &ColumnRef,
    format: InputFormat,
) -> Result<SeriesData> {
    read_series_with_span(path, column, format, None)
}

pub fn read_series_with_span(
    path: impl AsRef<Path>,
    column: &ColumnRef,
    format: InputFormat,
    span: Option<(f64, f64)>,
) -> Result<SeriesData> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| EcaError::Io(format!("{}: {e}", path.display())))?;
    parse_series_with_span(&text, column, format, span)
}

/// Reads text labels (for example dates). The first row is a header only
/// when the column is selected by name.
pub fn read_labels(path: impl AsRef<Path>, column: &ColumnRef) -> Result<Vec<String>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| EcaError::Io(format!("{}: {e}", path.display())))?;
    let table = Table::parse(&text, Some(matches!(column, ColumnRef::Name(_))))?;
    let labels = table.column(column)?.map(|(_, f)| f.to_string()).collect();
    Ok(labels)
}

/// One indicator per line under an `event` header, `NA` for missing steps.
pub fn format_ts(series: &EventTimeSeries) -> String {
    let mut out = String::from("event\n");
    for s in series.steps() {
        out.push_str(match s {
            Step::Event => "1\n",
            Step::NoEvent => "0\n",
            Step::Missing => "NA\n",
        });
    }
    out
}

/// Span comment followed by one event time per line under a `time` header.
pub fn format_es(seq: &EventSequence) -> String {
    let mut out = format!("# span: {},{}\ntime\n", seq.start(), seq.end());
    for t in seq.times() {
        out.push_str(&format!("{t}\n"));
    }
    out
}
