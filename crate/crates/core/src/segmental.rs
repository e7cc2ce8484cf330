//! Joint segmentation and labeling under an action grammar.
//!
//! A labeling tiles the trace with segments; each segment is scored exactly
//! like [`score_label`](crate::classifier::score_label) on the frames it
//! covers (patterns restart at every boundary), and the labeling's score is
//! the sum of its segment scores. [`decode`] finds the best labeling whose
//! label sequence the grammar accepts, with a semi-Markov Viterbi pass over
//! (frame, grammar edge).

use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::classifier::ScoreMode;
use crate::error::{Error, Result};
use crate::fst::{Edge, StateId, Symbol, SymbolTable, Transducer, EPSILON};
use crate::observation::{EpsilonPolicy, ObservationTrace};
use crate::semiring::{LogWeight, Semiring, TropicalWeight};
use crate::signatures::{DynamicPattern, LabelSet, SignatureSpec};

/// An unweighted acceptor over action labels, or the universal grammar.
#[derive(Clone, Debug, PartialEq)]
pub struct Grammar {
    machine: Transducer<LogWeight>,
    symbols: Arc<SymbolTable>,
    allow_any: bool,
}

impl Grammar {
    /// Any label sequence without immediate repeats.
    pub fn allow_any() -> Self {
        Self {
            machine: Transducer::empty(),
            symbols: Arc::new(SymbolTable::new()),
            allow_any: true,
        }
    }

    /// Wraps an acceptor whose symbols name labels in `symbols`.
    pub fn new(machine: Transducer<LogWeight>, symbols: Arc<SymbolTable>) -> Result<Self> {
        machine.ensure_well_formed()?;
        for (i, e) in machine.edges().iter().enumerate() {
            if e.input == EPSILON || e.output == EPSILON {
                return Err(Error::EpsilonInGrammar(i));
            }
            if e.input != e.output {
                return Err(Error::InvariantViolation(format!("grammar edge {i} is not an acceptor edge")));
            }
            if symbols.name(e.input).is_none() {
                return Err(Error::UnknownLabel(format!("#{}", e.input)));
            }
        }
        let machine = machine.with_symbols(Some(symbols.clone()), Some(symbols.clone()));
        Ok(Self { machine, symbols, allow_any: false })
    }

    /// Builds a grammar from `(from, to, label)` edges. When `vocabulary` is
    /// given, labels outside it are rejected and symbol ids follow its order.
    pub fn from_named_edges(
        state_count: usize,
        start: StateId,
        finals: &[StateId],
        edges: &[(StateId, StateId, &str)],
        vocabulary: Option<&[String]>,
    ) -> Result<Self> {
        let mut symbols = SymbolTable::new();
        if let Some(v) = vocabulary {
            for name in v {
                symbols.intern(name);
            }
        }
        let mut built = Vec::with_capacity(edges.len());
        for &(from, to, label) in edges {
            let sym = match vocabulary {
                Some(_) => symbols.find(label).ok_or_else(|| Error::UnknownLabel(label.to_string()))?,
                None => symbols.intern(label),
            };
            built.push(Edge { source: from, input: sym, output: sym, weight: LogWeight::ONE, target: to });
        }
        let machine = Transducer::from_parts(state_count, start, finals.iter().copied(), built);
        Self::new(machine, Arc::new(symbols))
    }

    /// The universal grammar spelled out for `labels`: one state per last
    /// label, every label reachable from every other.
    pub fn universal(labels: &LabelSet) -> Self {
        let n = labels.len();
        let mut symbols = SymbolTable::new();
        for l in labels.labels() {
            symbols.intern(l);
        }
        let mut edges = Vec::with_capacity(n * n);
        for j in 0..n {
            let sym = (j + 1) as Symbol;
            edges.push(Edge { source: 0, input: sym, output: sym, weight: LogWeight::ONE, target: j + 1 });
        }
        for i in 0..n {
            for j in (0..n).filter(|&j| j != i) {
                let sym = (j + 1) as Symbol;
                edges.push(Edge { source: i + 1, input: sym, output: sym, weight: LogWeight::ONE, target: j + 1 });
            }
        }
        let symbols = Arc::new(symbols);
        let machine = Transducer::from_parts(n + 1, 0, 1..=n, edges)
            .with_symbols(Some(symbols.clone()), Some(symbols.clone()));
        Self { machine, symbols, allow_any: false }
    }

    pub fn is_universal(&self) -> bool {
        self.allow_any
    }

    pub fn machine(&self) -> &Transducer<LogWeight> {
        &self.machine
    }

    pub fn symbols(&self) -> &SymbolTable {
        &self.symbols
    }

    /// Whether the grammar accepts `labels` as a segment label sequence.
    /// Immediate repeats are never accepted.
    pub fn accepts(&self, labels: &[&str]) -> bool {
        if labels.is_empty() || labels.windows(2).any(|w| w[0] == w[1]) {
            return false;
        }
        if self.allow_any {
            return true;
        }
        let syms: Option<Vec<Symbol>> = labels.iter().map(|l| self.symbols.find(l)).collect();
        match syms {
            Some(s) => self.machine.accepts_input(&s).unwrap_or(false),
            None => false,
        }
    }

    fn resolve(&self, labels: &LabelSet) -> Result<Resolved> {
        let grammar = if self.allow_any { Self::universal(labels) } else { self.clone() };
        let mut edges = Vec::with_capacity(grammar.machine.edges().len());
        for e in grammar.machine.edges() {
            let name = grammar.symbols.name(e.input).unwrap_or_default();
            let label = labels
                .index_of(name)
                .ok_or_else(|| Error::UnknownLabelInGrammar(name.to_string()))?;
            edges.push(GrammarEdge { source: e.source, target: e.target, label });
        }
        let mut incoming = vec![Vec::new(); grammar.machine.state_count()];
        for (i, e) in edges.iter().enumerate() {
            incoming[e.target].push(i);
        }
        Ok(Resolved { start: grammar.machine.start(), finals: grammar.machine.finals().to_vec(), edges, incoming })
    }
}

#[derive(Clone, Copy, Debug)]
struct GrammarEdge {
    source: StateId,
    target: StateId,
    label: usize,
}

struct Resolved {
    start: StateId,
    finals: Vec<StateId>,
    edges: Vec<GrammarEdge>,
    incoming: Vec<Vec<usize>>,
}

/// Per-label segment duration limits, in frames.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DurationBounds {
    min: usize,
    max: Option<usize>,
    per_label: Vec<(String, usize, Option<usize>)>,
}

impl Default for DurationBounds {
    fn default() -> Self {
        Self { min: 1, max: None, per_label: Vec::new() }
    }
}

impl DurationBounds {
    /// Bounds for every label. `max = None` means the trace length.
    pub fn new(min: usize, max: Option<usize>) -> Result<Self> {
        check_bounds(min, max)?;
        Ok(Self { min, max, per_label: Vec::new() })
    }

    pub fn with_label(mut self, label: impl Into<String>, min: usize, max: Option<usize>) -> Result<Self> {
        check_bounds(min, max)?;
        let label = label.into();
        self.per_label.retain(|(l, _, _)| *l != label);
        self.per_label.push((label, min, max));
        Ok(self)
    }

    /// `(min, max)` for `label` on a trace of `frames` frames.
    pub fn resolve(&self, label: &str, frames: usize) -> (usize, usize) {
        let (min, max) = self
            .per_label
            .iter()
            .find(|(l, _, _)| l == label)
            .map(|(_, a, b)| (*a, *b))
            .unwrap_or((self.min, self.max));
        (min, max.unwrap_or(frames).min(frames))
    }

    /// Largest duration any label may take on a trace of `frames` frames.
    pub fn window(&self, frames: usize) -> usize {
        let global = self.max.unwrap_or(frames).min(frames);
        self.per_label.iter().map(|(_, _, m)| m.unwrap_or(frames).min(frames)).fold(global, usize::max)
    }
}

fn check_bounds(min: usize, max: Option<usize>) -> Result<()> {
    if min == 0 {
        return Err(Error::InvalidBounds("minimum duration must be at least 1".into()));
    }
    if let Some(max) = max {
        if max < min {
            return Err(Error::InvalidBounds(format!("maximum {max} is below minimum {min}")));
        }
    }
    Ok(())
}

/// One segment; `start` is a 1-based frame position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub label: String,
    pub start: usize,
    pub duration: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SegmentLabeling {
    pub segments: Vec<Segment>,
    pub score: f64,
}

impl SegmentLabeling {
    pub fn label_sequence(&self) -> Vec<&str> {
        self.segments.iter().map(|s| s.label.as_str()).collect()
    }

    /// One label per frame.
    pub fn frame_labels(&self) -> Vec<&str> {
        self.segments
            .iter()
            .flat_map(|s| core::iter::repeat_n(s.label.as_str(), s.duration))
            .collect()
    }

    pub fn frame_count(&self) -> usize {
        self.segments.iter().map(|s| s.duration).sum()
    }

    /// Checks that segments tile `1..=frames` with distinct neighbouring labels.
    pub fn check_tiling(&self, frames: usize) -> Result<()> {
        let mut next = 1;
        for (i, s) in self.segments.iter().enumerate() {
            if s.start != next || s.duration == 0 {
                return Err(Error::InvariantViolation(format!("segment {i} does not continue the tiling")));
            }
            if i > 0 && self.segments[i - 1].label == s.label {
                return Err(Error::InvariantViolation(format!("segments {} and {i} share a label", i - 1)));
            }
            next += s.duration;
        }
        if self.segments.is_empty() || next != frames + 1 {
            return Err(Error::InvariantViolation(format!("segments cover {} of {frames} frames", next - 1)));
        }
        Ok(())
    }
}

/// Scores of every span of a trace for one signature: `get(start, len)`
/// equals the label's raw score on rows `start..start + len`.
#[derive(Clone, Debug)]
pub struct SpanTable {
    window: usize,
    scores: Vec<LogWeight>,
}

impl SpanTable {
    pub fn build(
        trace: &ObservationTrace,
        spec: &SignatureSpec,
        mode: ScoreMode,
        policy: &EpsilonPolicy,
        window: usize,
    ) -> Result<Self> {
        match mode {
            ScoreMode::BestPath => span_table::<TropicalWeight>(trace, spec, policy, window),
            ScoreMode::SumPaths => span_table::<LogWeight>(trace, spec, policy, window),
        }
    }

    pub fn window(&self) -> usize {
        self.window
    }

    /// `len` must be in `1..=window`.
    pub fn get(&self, start: usize, len: usize) -> LogWeight {
        debug_assert!(len >= 1 && len <= self.window);
        self.scores[start * self.window + len - 1]
    }
}

trait SpanWeight: Semiring {
    fn from_log(w: LogWeight) -> Self;
    fn to_log(self) -> LogWeight;
}

impl SpanWeight for LogWeight {
    fn from_log(w: LogWeight) -> Self {
        w
    }
    fn to_log(self) -> LogWeight {
        self
    }
}

impl SpanWeight for TropicalWeight {
    fn from_log(w: LogWeight) -> Self {
        w.into()
    }
    fn to_log(self) -> LogWeight {
        self.into()
    }
}

/// Forward pass over a pattern's (at most two) phases, restarted at every
/// span start: O(T * window * K) per label.
fn span_table<W: SpanWeight>(
    trace: &ObservationTrace,
    spec: &SignatureSpec,
    policy: &EpsilonPolicy,
    window: usize,
) -> Result<SpanTable> {
    let frames = trace.frame_count();
    let window = window.clamp(1, frames.max(1));
    let columns: Vec<(usize, DynamicPattern)> = spec
        .attributes()
        .iter()
        .map(|(name, p)| {
            trace.attribute_index(name).map(|k| (k, *p)).ok_or_else(|| Error::UnknownAttribute(name.clone()))
        })
        .collect::<Result<_>>()?;
    // (log p, log(1 - p)) per frame and column
    let logs: Vec<Vec<(W, W)>> = columns
        .iter()
        .map(|&(k, _)| {
            trace
                .column(k)
                .map(|p| {
                    let (present, absent) = policy.log_pair(p);
                    (W::from_log(present), W::from_log(absent))
                })
                .collect()
        })
        .collect();

    let mut scores = vec![LogWeight::ZERO; frames * window];
    let mut phases = vec![(W::zero(), W::zero()); columns.len()];
    for start in 0..frames {
        for len in 1..=window.min(frames - start) {
            let t = start + len - 1;
            let mut total = W::one();
            for (c, &(_, pattern)) in columns.iter().enumerate() {
                let (present, absent) = logs[c][t];
                let (first, second) = phases[c];
                let (hold, enter) = match pattern {
                    DynamicPattern::Absence | DynamicPattern::End => (absent, present),
                    DynamicPattern::Persistence | DynamicPattern::Start => (present, absent),
                };
                let next = if len == 1 {
                    (hold, W::zero())
                } else {
                    (first.times(hold), first.plus(second).times(enter))
                };
                phases[c] = next;
                let accept = if pattern.is_dynamic() { next.1 } else { next.0 };
                total = total.times(accept);
            }
            scores[start * window + len - 1] = total.to_log();
        }
    }
    Ok(SpanTable { window, scores })
}

/// Best grammar-conformant labeling of `trace`.
pub fn decode(
    trace: &ObservationTrace,
    labels: &LabelSet,
    grammar: &Grammar,
    bounds: &DurationBounds,
    mode: ScoreMode,
    policy: &EpsilonPolicy,
) -> Result<SegmentLabeling> {
    let frames = trace.frame_count();
    if frames == 0 {
        return Err(Error::EmptyTrace);
    }
    if labels.is_empty() {
        return Err(Error::EmptyLabelSet);
    }
    let g = grammar.resolve(labels)?;
    let window = bounds.window(frames);
    let mut used = vec![false; labels.len()];
    for e in &g.edges {
        used[e.label] = true;
    }
    let mut tables: Vec<Option<SpanTable>> = Vec::with_capacity(labels.len());
    let mut limits = Vec::with_capacity(labels.len());
    for (spec, &u) in labels.specs().iter().zip(&used) {
        tables.push(if u { Some(SpanTable::build(trace, spec, mode, policy, window)?) } else { None });
        limits.push(bounds.resolve(spec.label(), frames));
    }

    // best[t][e]: best score tiling frames 1..=t whose last segment used edge e
    let n_edges = g.edges.len();
    let mut best = vec![f64::NEG_INFINITY; (frames + 1) * n_edges];
    let mut back: Vec<(usize, Option<usize>)> = vec![(0, None); (frames + 1) * n_edges];
    for t in 1..=frames {
        for (ei, e) in g.edges.iter().enumerate() {
            let (min_d, max_d) = limits[e.label];
            let table = tables[e.label].as_ref().expect("table built for every grammar label");
            let mut top = f64::NEG_INFINITY;
            let mut arg = (0, None);
            for d in min_d..=max_d.min(t) {
                let s = t - d;
                let span = table.get(s, d).value();
                if span == f64::NEG_INFINITY {
                    continue;
                }
                if s == 0 {
                    if e.source == g.start && span > top {
                        top = span;
                        arg = (0, None);
                    }
                    continue;
                }
                for &pi in &g.incoming[e.source] {
                    if g.edges[pi].label == e.label {
                        continue;
                    }
                    let prev = best[s * n_edges + pi];
                    if prev == f64::NEG_INFINITY {
                        continue;
                    }
                    let cand = prev + span;
                    if cand > top {
                        top = cand;
                        arg = (s, Some(pi));
                    }
                }
            }
            best[t * n_edges + ei] = top;
            back[t * n_edges + ei] = arg;
        }
    }

    let mut end: Option<usize> = None;
    let mut top = f64::NEG_INFINITY;
    for (ei, e) in g.edges.iter().enumerate() {
        let v = best[frames * n_edges + ei];
        if v > top && g.finals.binary_search(&e.target).is_ok() {
            top = v;
            end = Some(ei);
        }
    }
    let Some(mut ei) = end else {
        return Err(Error::NoValidParse);
    };

    let mut segments = Vec::new();
    let mut t = frames;
    loop {
        let (s, prev) = back[t * n_edges + ei];
        segments.push(Segment {
            label: labels.specs()[g.edges[ei].label].label().to_string(),
            start: s + 1,
            duration: t - s,
        });
        match prev {
            Some(p) => {
                ei = p;
                t = s;
            }
            None => break,
        }
    }
    segments.reverse();
    let labeling = SegmentLabeling { segments, score: top };

    labeling.check_tiling(frames)?;
    if !grammar.accepts(&labeling.label_sequence()) {
        return Err(Error::InvariantViolation("decoded label sequence is rejected by the grammar".into()));
    }
    Ok(labeling)
}

/// [`decode`] under the universal grammar.
pub fn decode_unconstrained(
    trace: &ObservationTrace,
    labels: &LabelSet,
    bounds: &DurationBounds,
    mode: ScoreMode,
    policy: &EpsilonPolicy,
) -> Result<SegmentLabeling> {
    decode(trace, labels, &Grammar::allow_any(), bounds, mode, policy)
}

/// Sum of raw segment scores of an arbitrary labeling, via [`SpanTable`]s.
/// `-inf` when some segment admits no consistent attribute sequence.
pub fn labeling_score(
    trace: &ObservationTrace,
    labels: &LabelSet,
    labeling: &[Segment],
    mode: ScoreMode,
    policy: &EpsilonPolicy,
) -> Result<f64> {
    let mut total = 0.0;
    for seg in labeling {
        let spec = labels.get(&seg.label).ok_or_else(|| Error::UnknownLabel(seg.label.clone()))?;
        let sliced = trace.slice(seg.start - 1, seg.duration);
        let table = SpanTable::build(&sliced, spec, mode, policy, seg.duration)?;
        total += table.get(0, seg.duration).value();
    }
    Ok(total)
}
