//! Event raster plot for two event time series.
//!
//! Series A is drawn as a row of bars on the upper track, series B on the
//! lower track. An event taking part in a coincidence is drawn in the dark
//! shade of its track's hue, any other event in the light shade. Each bar
//! carries `class="event coincident"` or `class="event"` and a `data-track`
//! attribute so the output can be inspected programmatically.

use std::fmt::Write as _;
use std::path::Path;

use crate::engine::{count_coincidences, EcaParams, EventPair};
use crate::error::{EcaError, Result};
use crate::series::EventTimeSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Track {
    A,
    B,
}

/// Fill colours as `#rrggbb` strings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Palette {
    pub a_dark: String,
    pub a_light: String,
    pub a_plain: String,
    pub b_dark: String,
    pub b_light: String,
    pub b_plain: String,
}

impl Default for Palette {
    fn default() -> Self {
        Self {
            a_dark: "#b2182b".into(),
            a_light: "#f4a582".into(),
            a_plain: "#d6604d".into(),
            b_dark: "#2166ac".into(),
            b_light: "#92c5de".into(),
            b_plain: "#4393c3".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PlotSpec {
    pub series_a: EventTimeSeries,
    pub series_b: EventTimeSeries,
    pub params: EcaParams,
    /// Optional label per time step; event steps get their label printed
    /// under the lower track.
    pub dates: Option<Vec<String>>,
    /// When set, this track is drawn in a single plain shade without the
    /// coincident/non-coincident distinction.
    pub reference: Option<Track>,
    pub palette: Palette,
}

impl PlotSpec {
    pub fn new(series_a: EventTimeSeries, series_b: EventTimeSeries, params: EcaParams) -> Self {
        Self {
            series_a,
            series_b,
            params,
            dates: None,
            reference: None,
            palette: Palette::default(),
        }
    }
}

const WIDTH: f64 = 960.0;
const MARGIN_LEFT: f64 = 60.0;
const MARGIN_RIGHT: f64 = 20.0;
const TOP: f64 = 30.0;
const TRACK_HEIGHT: f64 = 60.0;
const TRACK_GAP: f64 = 20.0;
const AXIS_SPACE: f64 = 30.0;
const DATE_SPACE: f64 = 70.0;

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Renders the raster as a standalone SVG 1.1 document.
pub fn render_svg(spec: &PlotSpec) -> Result<String> {
    let len = spec.series_a.len();
    if spec.series_b.len() != len {
        return Err(EcaError::LengthMismatch(len, spec.series_b.len()));
    }
    if let Some(dates) = &spec.dates {
        if dates.len() != len {
            return Err(EcaError::LengthMismatch(len, dates.len()));
        }
    }
    spec.params.validate_for_steps()?;

    // Flags refer to compacted positions; map them back to original steps.
    let pair = EventPair::from_ts(&spec.series_a, &spec.series_b)?;
    let counts = count_coincidences(&pair, &spec.params)?;
    let valid: Vec<usize> = (0..len)
        .filter(|&i| {
            !spec.series_a.steps()[i].is_missing() && !spec.series_b.steps()[i].is_missing()
        })
        .collect();
    let events_a: Vec<(usize, bool)> = pair
        .a()
        .iter()
        .zip(&counts.flags_a)
        .map(|(&pos, &hit)| (valid[pos as usize - 1], hit))
        .collect();
    let events_b: Vec<(usize, bool)> = pair
        .b()
        .iter()
        .zip(&counts.flags_b)
        .map(|(&pos, &hit)| (valid[pos as usize - 1], hit))
        .collect();

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let step_w = plot_w / len as f64;
    let bar_w = (step_w * 0.8).max(0.5);
    let track_top = |t: Track| match t {
        Track::A => TOP,
        Track::B => TOP + TRACK_HEIGHT + TRACK_GAP,
    };
    let axis_y = TOP + 2.0 * TRACK_HEIGHT + TRACK_GAP;
    let height = axis_y
        + AXIS_SPACE
        + if spec.dates.is_some() {
            DATE_SPACE
        } else {
            0.0
        };
    let x_of = |step: usize| MARGIN_LEFT + step as f64 * step_w + (step_w - bar_w) / 2.0;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#
    );
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}">"#
    );
    let _ = writeln!(
        svg,
        r#"<rect x="0" y="0" width="{WIDTH}" height="{height}" fill="white"/>"#
    );

    // missing steps shaded grey across both tracks
    for (i, s) in spec
        .series_a
        .steps()
        .iter()
        .zip(spec.series_b.steps())
        .enumerate()
    {
        if s.0.is_missing() || s.1.is_missing() {
            let _ = writeln!(
                svg,
                r##"<rect class="missing" x="{:.3}" y="{TOP}" width="{:.3}" height="{}" fill="#eeeeee"/>"##,
                MARGIN_LEFT + i as f64 * step_w,
                step_w,
                2.0 * TRACK_HEIGHT + TRACK_GAP
            );
        }
    }

    let pal = &spec.palette;
    for (track, events, dark, light, plain, label) in [
        (
            Track::A,
            &events_a,
            &pal.a_dark,
            &pal.a_light,
            &pal.a_plain,
            "A",
        ),
        (
            Track::B,
            &events_b,
            &pal.b_dark,
            &pal.b_light,
            &pal.b_plain,
            "B",
        ),
    ] {
        let y = track_top(track);
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="14" text-anchor="end">{label}</text>"#,
            MARGIN_LEFT - 10.0,
            y + TRACK_HEIGHT / 2.0 + 5.0
        );
        let undifferentiated = spec.reference == Some(track);
        for &(step, hit) in events.iter() {
            let (class, fill) = match (undifferentiated, hit) {
                (true, _) => ("event", plain),
                (false, true) => ("event coincident", dark),
                (false, false) => ("event", light),
            };
            let _ = writeln!(
                svg,
                r#"<rect class="{class}" data-track="{label}" data-step="{}" x="{:.3}" y="{y}" width="{bar_w:.3}" height="{TRACK_HEIGHT}" fill="{fill}"/>"#,
                step + 1,
                x_of(step)
            );
        }
    }

    let _ = writeln!(
        svg,
        r#"<line x1="{MARGIN_LEFT}" y1="{axis_y}" x2="{:.1}" y2="{axis_y}" stroke="black" stroke-width="1"/>"#,
        WIDTH - MARGIN_RIGHT
    );
    let ticks = (len - 1).min(10);
    let tick_steps: Vec<usize> = if ticks == 0 {
        vec![0]
    } else {
        (0..=ticks).map(|k| k * (len - 1) / ticks).collect()
    };
    for step in tick_steps {
        let x = MARGIN_LEFT + (step as f64 + 0.5) * step_w;
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.3}" y1="{axis_y}" x2="{x:.3}" y2="{:.1}" stroke="black" stroke-width="1"/>"#,
            axis_y + 5.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{x:.3}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"#,
            axis_y + 18.0,
            step + 1
        );
    }

    if let Some(dates) = &spec.dates {
        let mut steps: Vec<usize> = events_a.iter().chain(&events_b).map(|e| e.0).collect();
        steps.sort_unstable();
        steps.dedup();
        let y = axis_y + AXIS_SPACE + 5.0;
        for step in steps {
            let x = MARGIN_LEFT + (step as f64 + 0.5) * step_w;
            let _ = writeln!(
                svg,
                r#"<text class="date" x="{x:.3}" y="{y:.1}" font-family="sans-serif" font-size="10" text-anchor="end" transform="rotate(-90 {x:.3} {y:.1})">{}</text>"#,
                escape(&dates[step])
            );
        }
    }

    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Renders the raster and writes it to `path`.
pub fn render(spec: &PlotSpec, path: impl AsRef<Path>) -> Result<()> {
    let svg = render_svg(spec)?;
    std::fs::write(path, svg)?;
    Ok(())
}
