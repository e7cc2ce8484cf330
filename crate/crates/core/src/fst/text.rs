//! Line-oriented text form of a log-weight machine:
//!
//! ```text
//! states 3
//! start 0
//! final 2
//! 0 1 2 2 0
//! 1 2 1 1 -0.2231435513142097
//! ```
//!
//! Edge lines are `src dst in out logweight`. Lines starting with `#` are
//! comments. `-inf` encodes the semiring zero.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::{self, Write};

use super::{Edge, StateId, Symbol, Transducer};
use crate::semiring::LogWeight;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct TextError {
    pub line: usize,
    pub message: String,
}

pub fn to_text(t: &Transducer<LogWeight>) -> String {
    let mut out = String::new();
    write_text(t, &mut out).expect("writing to a String cannot fail");
    out
}

fn write_text(t: &Transducer<LogWeight>, out: &mut String) -> fmt::Result {
    writeln!(out, "states {}", t.state_count())?;
    writeln!(out, "start {}", t.start())?;
    out.push_str("final");
    for f in t.finals() {
        write!(out, " {f}")?;
    }
    out.push('\n');
    for e in t.edges() {
        writeln!(out, "{} {} {} {} {}", e.source, e.target, e.input, e.output, e.weight.value())?;
    }
    Ok(())
}

pub fn from_text(text: &str) -> Result<Transducer<LogWeight>, TextError> {
    let mut states: Option<usize> = None;
    let mut start: Option<StateId> = None;
    let mut finals: Option<Vec<StateId>> = None;
    let mut edges = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |message: String| TextError { line, message };
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let mut fields = content.split_whitespace();
        let head = fields.next().unwrap_or_default();
        match head {
            "states" => {
                states = Some(parse_one(fields, "state count").map_err(err)?);
            }
            "start" => {
                start = Some(parse_one(fields, "start state").map_err(err)?);
            }
            "final" => {
                let ids = fields
                    .map(|f| f.parse::<StateId>().map_err(|_| format!("bad final state `{f}`")))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(err)?;
                finals = Some(ids);
            }
            _ => {
                let cols: Vec<&str> = content.split_whitespace().collect();
                if cols.len() != 5 {
                    return Err(err(format!("expected 5 edge fields, found {}", cols.len())));
                }
                let state = |s: &str| s.parse::<StateId>().map_err(|_| format!("bad state id `{s}`"));
                let sym = |s: &str| s.parse::<Symbol>().map_err(|_| format!("bad symbol `{s}`"));
                let weight: f64 =
                    cols[4].parse().map_err(|_| err(format!("bad weight `{}`", cols[4])))?;
                if weight.is_nan() || weight == f64::INFINITY {
                    return Err(err(format!("weight `{}` is not a log probability", cols[4])));
                }
                edges.push(Edge {
                    source: state(cols[0]).map_err(err)?,
                    target: state(cols[1]).map_err(err)?,
                    input: sym(cols[2]).map_err(err)?,
                    output: sym(cols[3]).map_err(err)?,
                    weight: LogWeight::new(weight),
                });
            }
        }
    }
    let missing = |what: &str| TextError { line: 0, message: format!("missing `{what}` header") };
    Ok(Transducer::from_parts(
        states.ok_or_else(|| missing("states"))?,
        start.ok_or_else(|| missing("start"))?,
        finals.ok_or_else(|| missing("final"))?,
        edges,
    ))
}

fn parse_one<'a, T: core::str::FromStr>(
    mut fields: impl Iterator<Item = &'a str>,
    what: &str,
) -> Result<T, String> {
    let v = fields.next().ok_or_else(|| format!("missing {what}"))?;
    if fields.next().is_some() {
        return Err(format!("trailing fields after {what}"));
    }
    v.parse().map_err(|_| format!("bad {what} `{v}`"))
}
