//! CSV interchange schemas for telemetry.
//!
//! Two files per trial, both with a versioned magic line so external tools
//! (and future schema revisions) can identify them:
//!
//! ```text
//! # amphipede markers v1
//! t_s,x1_mm,y1_mm,z1_mm,...,x16_mm,y16_mm,z16_mm
//! 0,12.5,-3.25,112.0,...
//! ```
//!
//! ```text
//! # amphipede motors v1
//! t_s,phase1_rad,speed1_rps,volt1_v,curr1_a,...,curr16_a
//! 0,0,0.48789,7.4,0.15,...
//! ```
//!
//! Values are written with the shortest representation that parses back to
//! the identical float, so export → import is lossless, and identical logs
//! always produce byte-identical files. These schemas are the boundary for
//! feeding externally captured (real) experiment data into the metrics
//! pipeline.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{MarkerSample, MarkerTrajectory, MotorLog, MotorSample, TelemetryError};
use crate::real::{lit, Real};

pub const MARKERS_MAGIC: &str = "# amphipede markers v1";
pub const MOTORS_MAGIC: &str = "# amphipede motors v1";

/// Number of channels both schemas carry.
pub const CHANNELS: usize = 16;

pub fn write_markers<T: Real, W: Write>(
    markers: &[MarkerTrajectory<T>],
    out: &mut W,
) -> Result<(), TelemetryError> {
    let markers = sorted_by_id(markers, |m| m.id, |m| m.samples.len())?;
    writeln!(out, "{MARKERS_MAGIC}")?;
    let mut header = String::from("t_s");
    for id in 1..=CHANNELS {
        header.push_str(&format!(",x{id}_mm,y{id}_mm,z{id}_mm"));
    }
    writeln!(out, "{header}")?;
    let rows = markers[0].samples.len();
    for j in 0..rows {
        let mut line = fmt(markers[0].samples[j].t);
        for m in &markers {
            let s = m.samples[j];
            line.push_str(&format!(",{},{},{}", fmt(s.x), fmt(s.y), fmt(s.z)));
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

pub fn write_motors<T: Real, W: Write>(
    motors: &[MotorLog<T>],
    out: &mut W,
) -> Result<(), TelemetryError> {
    let motors = sorted_by_id(motors, |m| m.id, |m| m.samples.len())?;
    writeln!(out, "{MOTORS_MAGIC}")?;
    let mut header = String::from("t_s");
    for id in 1..=CHANNELS {
        header.push_str(&format!(",phase{id}_rad,speed{id}_rps,volt{id}_v,curr{id}_a"));
    }
    writeln!(out, "{header}")?;
    let rows = motors[0].samples.len();
    for j in 0..rows {
        let mut line = fmt(motors[0].samples[j].t);
        for m in &motors {
            let s = m.samples[j];
            line.push_str(&format!(
                ",{},{},{},{}",
                fmt(s.phase),
                fmt(s.speed),
                fmt(s.voltage),
                fmt(s.current)
            ));
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

pub fn read_markers<T: Real, R: Read>(input: R) -> Result<Vec<MarkerTrajectory<T>>, TelemetryError> {
    let mut lines = LineParser::new(input, MARKERS_MAGIC)?;
    let header = lines.header()?;
    let expected: Vec<String> = std::iter::once("t_s".to_string())
        .chain((1..=CHANNELS).flat_map(|id| {
            [format!("x{id}_mm"), format!("y{id}_mm"), format!("z{id}_mm")]
        }))
        .collect();
    check_header(&header, &expected, |col| {
        col.strip_prefix('x')
            .and_then(|r| r.strip_suffix("_mm"))
            .and_then(|id| id.parse::<usize>().ok())
    })
    .map_err(TelemetryError::MissingMarkers)?;

    let mut markers: Vec<MarkerTrajectory<T>> = (1..=CHANNELS)
        .map(|id| MarkerTrajectory {
            id,
            samples: Vec::new(),
        })
        .collect();
    while let Some((row, fields)) = lines.next_row()? {
        if fields.len() != expected.len() {
            return Err(TelemetryError::Malformed {
                row,
                what: format!("expected {} fields, found {}", expected.len(), fields.len()),
            });
        }
        let t = parse_field::<T>(&fields[0], row)?;
        for (k, m) in markers.iter_mut().enumerate() {
            m.samples.push(MarkerSample {
                t,
                x: parse_field(&fields[1 + 3 * k], row)?,
                y: parse_field(&fields[2 + 3 * k], row)?,
                z: parse_field(&fields[3 + 3 * k], row)?,
            });
        }
    }
    Ok(markers)
}

pub fn read_motors<T: Real, R: Read>(input: R) -> Result<Vec<MotorLog<T>>, TelemetryError> {
    let mut lines = LineParser::new(input, MOTORS_MAGIC)?;
    let header = lines.header()?;
    let expected: Vec<String> = std::iter::once("t_s".to_string())
        .chain((1..=CHANNELS).flat_map(|id| {
            [
                format!("phase{id}_rad"),
                format!("speed{id}_rps"),
                format!("volt{id}_v"),
                format!("curr{id}_a"),
            ]
        }))
        .collect();
    check_header(&header, &expected, |col| {
        col.strip_prefix("phase")
            .and_then(|r| r.strip_suffix("_rad"))
            .and_then(|id| id.parse::<usize>().ok())
    })
    .map_err(TelemetryError::MissingLegs)?;

    let mut motors: Vec<MotorLog<T>> = (1..=CHANNELS)
        .map(|id| MotorLog {
            id,
            samples: Vec::new(),
        })
        .collect();
    while let Some((row, fields)) = lines.next_row()? {
        if fields.len() != expected.len() {
            return Err(TelemetryError::Malformed {
                row,
                what: format!("expected {} fields, found {}", expected.len(), fields.len()),
            });
        }
        let t = parse_field::<T>(&fields[0], row)?;
        for (k, m) in motors.iter_mut().enumerate() {
            m.samples.push(MotorSample {
                t,
                phase: parse_field(&fields[1 + 4 * k], row)?,
                speed: parse_field(&fields[2 + 4 * k], row)?,
                voltage: parse_field(&fields[3 + 4 * k], row)?,
                current: parse_field(&fields[4 + 4 * k], row)?,
            });
        }
    }
    Ok(motors)
}

pub fn export_markers<T: Real>(
    path: &Path,
    markers: &[MarkerTrajectory<T>],
) -> Result<(), TelemetryError> {
    let mut out = BufWriter::new(File::create(path)?);
    write_markers(markers, &mut out)
}

pub fn export_motors<T: Real>(path: &Path, motors: &[MotorLog<T>]) -> Result<(), TelemetryError> {
    let mut out = BufWriter::new(File::create(path)?);
    write_motors(motors, &mut out)
}

pub fn import_markers<T: Real>(path: &Path) -> Result<Vec<MarkerTrajectory<T>>, TelemetryError> {
    read_markers(BufReader::new(File::open(path)?))
}

pub fn import_motors<T: Real>(path: &Path) -> Result<Vec<MotorLog<T>>, TelemetryError> {
    read_motors(BufReader::new(File::open(path)?))
}

/// Shortest decimal that reparses to the identical float.
fn fmt<T: Real>(v: T) -> String {
    format!("{v}")
}

fn parse_field<T: Real>(field: &str, row: usize) -> Result<T, TelemetryError> {
    field
        .trim()
        .parse::<f64>()
        .map(lit::<T>)
        .map_err(|e| TelemetryError::Malformed {
            row,
            what: format!("{field:?}: {e}"),
        })
}

fn sorted_by_id<'a, M>(
    items: &'a [M],
    id: impl Fn(&M) -> usize,
    len: impl Fn(&M) -> usize,
) -> Result<Vec<&'a M>, TelemetryError> {
    let mut by_id: Vec<Option<&M>> = vec![None; CHANNELS];
    for item in items {
        let i = id(item);
        if (1..=CHANNELS).contains(&i) {
            by_id[i - 1] = Some(item);
        }
    }
    let missing: Vec<usize> = by_id
        .iter()
        .enumerate()
        .filter(|(_, m)| m.is_none())
        .map(|(i, _)| i + 1)
        .collect();
    if !missing.is_empty() {
        return Err(TelemetryError::MissingMarkers(missing));
    }
    let items: Vec<&M> = by_id.into_iter().map(Option::unwrap).collect();
    let rows = len(items[0]);
    if items.iter().any(|m| len(m) != rows) {
        return Err(TelemetryError::Malformed {
            row: 0,
            what: "channels have differing sample counts".into(),
        });
    }
    Ok(items)
}

/// Validates the header columns, reporting which channel ids are absent.
fn check_header(
    header: &[String],
    expected: &[String],
    id_of: impl Fn(&str) -> Option<usize>,
) -> Result<(), Vec<usize>> {
    if header == expected {
        return Ok(());
    }
    let present: Vec<usize> = header.iter().filter_map(|c| id_of(c)).collect();
    let missing: Vec<usize> = (1..=CHANNELS).filter(|id| !present.contains(id)).collect();
    // Either some ids are genuinely absent, or the layout is unrecognized.
    Err(if missing.is_empty() {
        (1..=CHANNELS).collect()
    } else {
        missing
    })
}

struct LineParser {
    lines: Vec<String>,
    next: usize,
}

impl LineParser {
    fn new<R: Read>(mut input: R, magic: &str) -> Result<Self, TelemetryError> {
        let mut text = String::new();
        input.read_to_string(&mut text)?;
        let lines: Vec<String> = text.lines().map(str::to_string).collect();
        match lines.first() {
            Some(first) if first.trim() == magic => Ok(Self { lines, next: 1 }),
            Some(first) => Err(TelemetryError::Header(first.clone())),
            None => Err(TelemetryError::Header("<empty file>".into())),
        }
    }

    fn header(&mut self) -> Result<Vec<String>, TelemetryError> {
        let line = self
            .lines
            .get(self.next)
            .ok_or_else(|| TelemetryError::Header("<missing column header>".into()))?;
        self.next += 1;
        Ok(line.split(',').map(|s| s.trim().to_string()).collect())
    }

    /// Next data row as (1-based file row number, fields).
    fn next_row(&mut self) -> Result<Option<(usize, Vec<String>)>, TelemetryError> {
        while let Some(line) = self.lines.get(self.next) {
            self.next += 1;
            if line.trim().is_empty() {
                continue;
            }
            let fields = line.split(',').map(str::to_string).collect();
            return Ok(Some((self.next, fields)));
        }
        Ok(None)
    }
}
