//! Signature documents:
//!
//! ```json
//! { "attributes": ["person", "vehicle"],
//!   "labels": { "enter": { "person": 3, "vehicle": 1 } } }
//! ```
//!
//! Pattern codes are `0` absence, `1` persistence, `2` start, `3` end; the
//! lower-case names are accepted too. `attributes` is optional.

use std::fmt;
use std::marker::PhantomData;

use dynsig_core::{DynamicPattern, LabelSet, SignatureSpec};
use serde::de::{Deserialize, Deserializer, MapAccess, Visitor};
use serde_json::Value;

use super::{FormatError, Location};

/// JSON object kept as ordered entries, duplicates included.
pub(crate) struct Entries<T>(pub Vec<(String, T)>);

impl<'de, T: Deserialize<'de>> Deserialize<'de> for Entries<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V<T>(PhantomData<T>);
        impl<'de, T: Deserialize<'de>> Visitor<'de> for V<T> {
            type Value = Entries<T>;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an object")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Self::Value, A::Error> {
                let mut out = Vec::new();
                while let Some((k, v)) = map.next_entry()? {
                    out.push((k, v));
                }
                Ok(Entries(out))
            }
        }
        d.deserialize_map(V(PhantomData))
    }
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    attributes: Option<Vec<String>>,
    labels: Entries<Entries<Value>>,
}

fn pattern(label: &str, attribute: &str, v: &Value) -> Result<DynamicPattern, FormatError> {
    let found = match v {
        Value::Number(n) => n.as_u64().and_then(|c| u8::try_from(c).ok()).and_then(DynamicPattern::from_code),
        Value::String(s) => DynamicPattern::ALL.into_iter().find(|p| p.name().eq_ignore_ascii_case(s)),
        _ => None,
    };
    found.ok_or_else(|| FormatError::UnknownPatternCode {
        label: label.to_string(),
        attribute: attribute.to_string(),
        code: v.to_string(),
    })
}

pub fn parse_signatures(text: &str) -> Result<LabelSet, FormatError> {
    let doc: Document = serde_json::from_str(text).map_err(FormatError::from_json)?;
    let mut specs: Vec<SignatureSpec> = Vec::with_capacity(doc.labels.0.len());
    for (label, attrs) in &doc.labels.0 {
        if specs.iter().any(|s| s.label() == label) {
            return Err(FormatError::DuplicateLabel(label.clone()));
        }
        let mut pairs = Vec::with_capacity(attrs.0.len());
        for (attr, v) in &attrs.0 {
            pairs.push((attr.clone(), pattern(label, attr, v)?));
        }
        let spec = SignatureSpec::new(label.clone(), pairs)
            .map_err(|source| FormatError::Invalid { at: Location::field(format!("labels.{label}")), source })?;
        specs.push(spec);
    }
    LabelSet::new(specs, doc.attributes)
        .map_err(|source| FormatError::Invalid { at: Location::field("labels"), source })
}

/// Serializes a label set back to the document format, with numeric codes.
pub fn write_signatures(labels: &LabelSet) -> String {
    let mut root = serde_json::Map::new();
    root.insert("attributes".into(), labels.vocabulary().into());
    let mut body = serde_json::Map::new();
    for spec in labels.specs() {
        let attrs = spec.attributes().iter().map(|(a, p)| (a.clone(), Value::from(p.code()))).collect();
        body.insert(spec.label().to_string(), Value::Object(attrs));
    }
    root.insert("labels".into(), Value::Object(body));
    let mut s = serde_json::to_string_pretty(&Value::Object(root)).expect("serializable");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_codes_and_names() {
        let l = parse_signatures(r#"{"labels": {"enter": {"person": 2, "vehicle": "persistence"}}}"#).unwrap();
        let s = l.get("enter").unwrap();
        assert_eq!(s.pattern("person"), Some(DynamicPattern::Start));
        assert_eq!(s.pattern("vehicle"), Some(DynamicPattern::Persistence));
    }

    #[test]
    fn duplicate_label_is_reported() {
        let e = parse_signatures(r#"{"labels": {"a": {"x": 1}, "a": {"x": 0}}}"#).unwrap_err();
        assert_eq!(e, FormatError::DuplicateLabel("a".into()));
    }

    #[test]
    fn duplicate_attribute_is_reported() {
        let e = parse_signatures(r#"{"labels": {"a": {"x": 1, "x": 0}}}"#).unwrap_err();
        assert!(matches!(e, FormatError::Invalid { source: dynsig_core::Error::DuplicateAttribute(_), .. }));
    }

    #[test]
    fn unknown_code() {
        let e = parse_signatures(r#"{"labels": {"a": {"x": 7}}}"#).unwrap_err();
        assert!(matches!(e, FormatError::UnknownPatternCode { ref code, .. } if code == "7"));
    }

    #[test]
    fn syntax_error_carries_line() {
        let e = parse_signatures("{\n\"labels\": {\n\"a\": {\"x\" 1}}}").unwrap_err();
        assert!(matches!(e, FormatError::Parse { at: Location { line: Some(3), .. }, .. }), "{e:?}");
    }

    #[test]
    fn attribute_outside_vocabulary() {
        let e = parse_signatures(r#"{"attributes": ["x"], "labels": {"a": {"y": 1}}}"#).unwrap_err();
        assert!(matches!(e, FormatError::Invalid { source: dynsig_core::Error::UnknownAttribute(_), .. }));
    }

    #[test]
    fn round_trip() {
        let text = r#"{"attributes": ["x", "y"], "labels": {"b": {"y": 3}, "a": {"x": 0, "y": 2}}}"#;
        let l = parse_signatures(text).unwrap();
        assert_eq!(parse_signatures(&write_signatures(&l)).unwrap(), l);
    }
}
