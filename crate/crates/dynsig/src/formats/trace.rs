//! Trace files. CSV has a header whose first column is the frame index
//! (`t,person,vehicle`); JSON-lines has one object per frame whose first
//! key is the frame index (`{"t": 1, "person": 0.9}`).

use std::path::Path;

use dynsig_core::ObservationTrace;
use serde_json::Value;

use super::{FormatError, Location};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceFormat {
    Csv,
    JsonLines,
}

impl TraceFormat {
    /// `.jsonl` and `.ndjson` are JSON-lines; anything else is CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl" | "ndjson") => Self::JsonLines,
            _ => Self::Csv,
        }
    }
}

pub fn parse_trace(text: &str, format: TraceFormat) -> Result<ObservationTrace, FormatError> {
    let (attributes, rows) = match format {
        TraceFormat::Csv => csv_rows(text)?,
        TraceFormat::JsonLines => jsonl_rows(text)?,
    };
    build(attributes, rows)
}

type Rows = Vec<(usize, u64, Vec<f64>)>;

fn build(attributes: Vec<String>, rows: Rows) -> Result<ObservationTrace, FormatError> {
    if rows.is_empty() {
        return Err(FormatError::Invalid { at: Location::default(), source: dynsig_core::Error::EmptyTrace });
    }
    let mut prev: Option<u64> = None;
    for (line, frame, values) in &rows {
        if prev.is_some_and(|p| *frame <= p) {
            return Err(FormatError::NonMonotonicFrames { line: *line, frame: *frame });
        }
        prev = Some(*frame);
        for (a, &v) in values.iter().enumerate() {
            if !(0.0..=1.0).contains(&v) {
                return Err(FormatError::OutOfRangeProbability { line: *line, attribute: attributes[a].clone(), value: v });
            }
        }
    }
    ObservationTrace::new(attributes, rows.into_iter().map(|(_, f, v)| (f, v)).collect())
        .map_err(|source| FormatError::Invalid { at: Location::line(1), source })
}

fn frame(field: &str, line: usize) -> Result<u64, FormatError> {
    field.trim().parse().map_err(|_| FormatError::MalformedRow { line, message: format!("bad frame index `{field}`") })
}

fn csv_rows(text: &str) -> Result<(Vec<String>, Rows), FormatError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| FormatError::parse(Location::line(1), e.to_string()))?.clone();
    if header.len() < 2 {
        return Err(FormatError::parse(Location::line(1), "header needs a frame column and at least one attribute"));
    }
    let attributes: Vec<String> = header.iter().skip(1).map(String::from).collect();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            FormatError::MalformedRow { line, message: e.to_string() }
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let t = frame(&record[0], line)?;
        let values = record
            .iter()
            .skip(1)
            .zip(&attributes)
            .map(|(v, a)| {
                v.parse::<f64>()
                    .map_err(|_| FormatError::MalformedRow { line, message: format!("bad value `{v}` for `{a}`") })
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push((line, t, values));
    }
    Ok((attributes, rows))
}

fn jsonl_rows(text: &str) -> Result<(Vec<String>, Rows), FormatError> {
    let mut attributes: Option<Vec<String>> = None;
    let mut rows = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let malformed = |message: String| FormatError::MalformedRow { line, message };
        let obj = match serde_json::from_str::<Value>(raw) {
            Ok(Value::Object(m)) => m,
            Ok(_) => return Err(malformed("expected an object".into())),
            Err(e) => return Err(malformed(e.to_string())),
        };
        let mut entries = obj.into_iter();
        let (_, t) = entries.next().ok_or_else(|| malformed("empty object".into()))?;
        let t = t.as_u64().ok_or_else(|| malformed(format!("bad frame index {t}")))?;
        let mut names = Vec::new();
        let mut values = Vec::new();
        for (k, v) in entries {
            let p = v.as_f64().ok_or_else(|| malformed(format!("bad value {v} for `{k}`")))?;
            names.push(k);
            values.push(p);
        }
        match &attributes {
            None => attributes = Some(names),
            Some(a) if *a == names => {}
            Some(a) => return Err(malformed(format!("attributes {names:?} differ from {a:?}"))),
        }
        rows.push((line, t, values));
    }
    let attributes = attributes.unwrap_or_default();
    if attributes.is_empty() && !rows.is_empty() {
        return Err(FormatError::MalformedRow { line: rows[0].0, message: "no attributes".into() });
    }
    Ok((attributes, rows))
}

/// CSV rendering; values use the shortest representation that parses back
/// to the same `f64`.
pub fn write_csv(trace: &ObservationTrace) -> String {
    let mut out = String::from("t");
    for a in trace.attributes() {
        out.push(',');
        out.push_str(a);
    }
    out.push('\n');
    for (t, &frame) in trace.frame_indices().iter().enumerate() {
        out.push_str(&frame.to_string());
        for p in trace.row(t) {
            out.push(',');
            out.push_str(&p.to_string());
        }
        out.push('\n');
    }
    out
}
