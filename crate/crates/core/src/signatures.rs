//! Dynamic action signatures.
//!
//! A signature assigns each attribute one of four temporal patterns. Each
//! pattern compiles to a length-agnostic acceptor over the two attribute
//! values, built from self-loops so it accepts traces of any length.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::fst::{Symbol, Transducer, TransducerBuilder};
use crate::semiring::LogWeight;

/// Symbol for "attribute not detected". Symbol 0 is reserved for epsilon.
pub const ABSENT: Symbol = 1;
/// Symbol for "attribute detected".
pub const PRESENT: Symbol = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum DynamicPattern {
    /// Never present: `0+`.
    Absence = 0,
    /// Present throughout: `1+`.
    Persistence = 1,
    /// Present, then gone: `1+0+`.
    Start = 2,
    /// Absent, then present: `0+1+`.
    End = 3,
}

impl DynamicPattern {
    pub const ALL: [DynamicPattern; 4] = [Self::Absence, Self::Persistence, Self::Start, Self::End];

    pub fn from_code(code: u8) -> Option<Self> {
        Self::ALL.get(code as usize).copied()
    }

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn is_dynamic(self) -> bool {
        matches!(self, Self::Start | Self::End)
    }

    /// The nearest static pattern: transitions collapse to absence.
    pub fn staticized(self) -> Self {
        match self {
            Self::Start | Self::End => Self::Absence,
            p => p,
        }
    }

    /// Fewest frames a matching sequence can have.
    pub fn min_frames(self) -> usize {
        if self.is_dynamic() {
            2
        } else {
            1
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Absence => "absence",
            Self::Persistence => "persistence",
            Self::Start => "start",
            Self::End => "end",
        }
    }
}

impl fmt::Display for DynamicPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}):{}", self.code(), self.name())
    }
}

/// Compiles `pattern` into its logic acceptor. Every edge has weight one.
pub fn compile_pattern(pattern: DynamicPattern) -> Transducer<LogWeight> {
    let (first, second) = match pattern {
        DynamicPattern::Absence => (ABSENT, None),
        DynamicPattern::Persistence => (PRESENT, None),
        DynamicPattern::Start => (PRESENT, Some(ABSENT)),
        DynamicPattern::End => (ABSENT, Some(PRESENT)),
    };
    let mut b = TransducerBuilder::new();
    let s0 = b.add_state();
    let s1 = b.add_state();
    b.set_start(s0);
    b.add_arc(s0, first, LogWeight::ONE, s1);
    b.add_arc(s1, first, LogWeight::ONE, s1);
    match second {
        None => {
            b.set_final(s1);
        }
        Some(sym) => {
            let s2 = b.add_state();
            b.add_arc(s1, sym, LogWeight::ONE, s2);
            b.add_arc(s2, sym, LogWeight::ONE, s2);
            b.set_final(s2);
        }
    }
    b.build()
}

/// A label and its per-attribute patterns, in declaration order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignatureSpec {
    label: String,
    attributes: Vec<(String, DynamicPattern)>,
}

impl SignatureSpec {
    pub fn new<S: Into<String>>(
        label: impl Into<String>,
        attributes: impl IntoIterator<Item = (S, DynamicPattern)>,
    ) -> Result<Self> {
        let label = label.into();
        let attributes: Vec<(String, DynamicPattern)> =
            attributes.into_iter().map(|(n, p)| (n.into(), p)).collect();
        if attributes.is_empty() {
            return Err(Error::EmptySignature(label));
        }
        for (i, (name, _)) in attributes.iter().enumerate() {
            if attributes[..i].iter().any(|(n, _)| n == name) {
                return Err(Error::DuplicateAttribute(name.clone()));
            }
        }
        Ok(Self { label, attributes })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn attributes(&self) -> &[(String, DynamicPattern)] {
        &self.attributes
    }

    pub fn pattern(&self, attribute: &str) -> Option<DynamicPattern> {
        self.attributes.iter().find(|(n, _)| n == attribute).map(|(_, p)| *p)
    }

    /// Shortest segment any trace of this signature can occupy.
    pub fn min_frames(&self) -> usize {
        self.attributes.iter().map(|(_, p)| p.min_frames()).max().unwrap_or(1)
    }

    /// Maps Start and End to Absence, keeping keys and order.
    pub fn staticize(&self) -> Self {
        Self {
            label: self.label.clone(),
            attributes: self.attributes.iter().map(|(n, p)| (n.clone(), p.staticized())).collect(),
        }
    }
}

/// The candidate labels with their shared attribute vocabulary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelSet {
    specs: Vec<SignatureSpec>,
    vocabulary: Vec<String>,
}

impl LabelSet {
    /// With `vocabulary = None` the vocabulary is the attributes in order of
    /// first use. A declared vocabulary must cover every attribute.
    pub fn new(specs: Vec<SignatureSpec>, vocabulary: Option<Vec<String>>) -> Result<Self> {
        for (i, s) in specs.iter().enumerate() {
            if specs[..i].iter().any(|o| o.label == s.label) {
                return Err(Error::DuplicateLabel(s.label.clone()));
            }
        }
        let vocabulary = match vocabulary {
            Some(v) => {
                for (i, name) in v.iter().enumerate() {
                    if v[..i].contains(name) {
                        return Err(Error::DuplicateAttribute(name.clone()));
                    }
                }
                for s in &specs {
                    for (name, _) in &s.attributes {
                        if !v.contains(name) {
                            return Err(Error::UnknownAttribute(name.clone()));
                        }
                    }
                }
                v
            }
            None => {
                let mut v: Vec<String> = Vec::new();
                for s in &specs {
                    for (name, _) in &s.attributes {
                        if !v.contains(name) {
                            v.push(name.to_string());
                        }
                    }
                }
                v
            }
        };
        Ok(Self { specs, vocabulary })
    }

    pub fn specs(&self) -> &[SignatureSpec] {
        &self.specs
    }

    pub fn vocabulary(&self) -> &[String] {
        &self.vocabulary
    }

    pub fn len(&self) -> usize {
        self.specs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.specs.is_empty()
    }

    pub fn get(&self, label: &str) -> Option<&SignatureSpec> {
        self.specs.iter().find(|s| s.label == label)
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.specs.iter().position(|s| s.label == label)
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.specs.iter().map(|s| s.label.as_str())
    }

    pub fn staticize(&self) -> Self {
        Self {
            specs: self.specs.iter().map(SignatureSpec::staticize).collect(),
            vocabulary: self.vocabulary.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use DynamicPattern::*;

    fn accepts(p: DynamicPattern, bits: &[u8]) -> bool {
        let syms: Vec<Symbol> = bits.iter().map(|&b| if b == 1 { PRESENT } else { ABSENT }).collect();
        compile_pattern(p).accepts_input(&syms).unwrap()
    }

    #[test]
    fn persistence_membership() {
        assert!(accepts(Persistence, &[1, 1, 1]));
        assert!(!accepts(Persistence, &[1, 0, 1]));
    }

    #[test]
    fn start_requires_the_transition() {
        assert!(accepts(Start, &[1, 0]));
        assert!(!accepts(Start, &[0, 1]));
        assert!(accepts(Start, &[1, 1, 0, 0, 0]));
        assert!(!accepts(Start, &[1, 1, 1]));
        assert!(!accepts(Start, &[]));
    }

    #[test]
    fn compiled_machines_are_unweighted_acceptors() {
        for p in DynamicPattern::ALL {
            let t = compile_pattern(p);
            assert!(t.is_acceptor());
            assert!(t.edges().iter().all(|e| e.weight == LogWeight::ONE));
            assert!(t.validate().is_empty());
        }
    }

    #[test]
    fn codes_roundtrip() {
        for p in DynamicPattern::ALL {
            assert_eq!(DynamicPattern::from_code(p.code()), Some(p));
        }
        assert_eq!(DynamicPattern::from_code(4), None);
    }

    #[test]
    fn staticize_rules() {
        let s = SignatureSpec::new("enter", [("person", Start), ("ball", Persistence), ("car", End)]).unwrap();
        let st = s.staticize();
        assert_eq!(
            st.attributes(),
            &[
                ("person".to_string(), Absence),
                ("ball".to_string(), Persistence),
                ("car".to_string(), Absence)
            ]
        );
        assert_eq!(st.staticize(), st);
    }

    #[test]
    fn spec_validation() {
        assert_eq!(
            SignatureSpec::new("x", Vec::<(String, DynamicPattern)>::new()),
            Err(Error::EmptySignature("x".into()))
        );
        assert_eq!(
            SignatureSpec::new("x", [("a", Start), ("a", End)]),
            Err(Error::DuplicateAttribute("a".into()))
        );
    }

    #[test]
    fn label_set_validation() {
        let a = SignatureSpec::new("enter", [("person", Start), ("vehicle", Persistence)]).unwrap();
        let b = SignatureSpec::new("exit", [("person", End), ("vehicle", Persistence)]).unwrap();
        let set = LabelSet::new(vec![a.clone(), b], None).unwrap();
        assert_eq!(set.len(), 2);
        assert_eq!(set.vocabulary(), &["person".to_string(), "vehicle".to_string()]);
        assert_eq!(
            LabelSet::new(vec![a.clone(), a.clone()], None),
            Err(Error::DuplicateLabel("enter".into()))
        );
        assert_eq!(
            LabelSet::new(vec![a], Some(vec!["person".into()])),
            Err(Error::UnknownAttribute("vehicle".into()))
        );
    }
}
