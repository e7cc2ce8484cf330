//! Grammar documents:
//!
//! ```json
//! { "states": 3, "start": 0, "final": [2],
//!   "edges": [{"from": 0, "to": 1, "label": "a"}, {"from": 1, "to": 2, "label": "b"}] }
//! ```
//!
//! `states` may instead list state names, which `start`, `final` and the
//! edges then refer to. `{"allow_any": true}` is the universal grammar.

use dynsig_core::{Grammar, LabelSet};
use serde::Deserialize;

use super::{FormatError, Location};

#[derive(Deserialize)]
#[serde(untagged)]
enum States {
    Count(usize),
    Names(Vec<String>),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum StateRef {
    Index(usize),
    Name(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeDoc {
    from: StateRef,
    to: StateRef,
    label: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    #[serde(default)]
    allow_any: bool,
    states: Option<States>,
    start: Option<StateRef>,
    #[serde(rename = "final", default)]
    finals: Vec<StateRef>,
    #[serde(default)]
    edges: Vec<EdgeDoc>,
}

/// Parses a grammar. With `labels`, every edge label must be one of them.
pub fn parse_grammar(text: &str, labels: Option<&LabelSet>) -> Result<Grammar, FormatError> {
    let doc: Document = serde_json::from_str(text).map_err(FormatError::from_json)?;
    if doc.allow_any {
        if doc.states.is_some() || !doc.edges.is_empty() {
            return Err(FormatError::parse(Location::field("allow_any"), "a universal grammar takes no states or edges"));
        }
        return Ok(Grammar::allow_any());
    }
    let names: Vec<String> = match doc.states {
        Some(States::Count(n)) => (0..n).map(|i| i.to_string()).collect(),
        Some(States::Names(v)) => v,
        None => return Err(FormatError::parse(Location::field("states"), "missing")),
    };
    let resolve = |r: &StateRef, field: String| -> Result<usize, FormatError> {
        let found = match r {
            StateRef::Index(i) => (*i < names.len()).then_some(*i),
            StateRef::Name(n) => names.iter().position(|s| s == n),
        };
        found.ok_or_else(|| FormatError::parse(Location::field(field), "no such state"))
    };
    let start = match &doc.start {
        Some(r) => resolve(r, "start".into())?,
        None => return Err(FormatError::parse(Location::field("start"), "missing")),
    };
    let finals = doc
        .finals
        .iter()
        .enumerate()
        .map(|(i, r)| resolve(r, format!("final[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    let mut edges = Vec::with_capacity(doc.edges.len());
    for (i, e) in doc.edges.iter().enumerate() {
        edges.push((resolve(&e.from, format!("edges[{i}].from"))?, resolve(&e.to, format!("edges[{i}].to"))?, e.label.as_str()));
    }
    let vocab: Option<Vec<String>> = labels.map(|l| l.labels().map(String::from).collect());
    Grammar::from_named_edges(names.len(), start, &finals, &edges, vocab.as_deref())
        .map_err(|source| FormatError::Invalid { at: Location::field("edges"), source })
}
