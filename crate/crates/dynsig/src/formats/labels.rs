//! Frame label files for `eval`: either one label per line (blank lines and
//! `#` comments skipped) or a labeling document written by `decode`.

use serde_json::Value;

use super::{FormatError, Location};

pub fn parse_frame_labels(text: &str) -> Result<Vec<String>, FormatError> {
    if text.trim_start().starts_with('{') {
        return from_document(text);
    }
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(String::from)
        .collect())
}

fn from_document(text: &str) -> Result<Vec<String>, FormatError> {
    let doc: Value = serde_json::from_str(text).map_err(FormatError::from_json)?;
    let segments = doc
        .pointer("/result/segments")
        .and_then(Value::as_array)
        .ok_or_else(|| FormatError::parse(Location::field("result.segments"), "missing"))?;
    let mut out = Vec::new();
    for (i, seg) in segments.iter().enumerate() {
        let field = |name: &str| format!("result.segments[{i}].{name}");
        let label = seg
            .get("label")
            .and_then(Value::as_str)
            .ok_or_else(|| FormatError::parse(Location::field(field("label")), "expected a string"))?;
        let duration = seg
            .get("duration")
            .and_then(Value::as_u64)
            .ok_or_else(|| FormatError::parse(Location::field(field("duration")), "expected a count"))?;
        out.extend(std::iter::repeat_n(label.to_string(), duration as usize));
    }
    Ok(out)
}
