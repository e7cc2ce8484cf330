//! Synthetic traces and exhaustive reference scorers.
//!
//! Generation draws, for every attribute and segment, a latent binary
//! sequence consistent with the segment label's pattern (transition point
//! uniform over the valid positions), emits `1 - saturation` where the latent
//! value is 1 and `saturation` where it is 0, and flips each entry
//! independently with probability `flip_noise`. Attributes a label does not
//! mention are latent-absent.
//!
//! The brute-force scorers enumerate attribute sequences and segmentations
//! directly and share no code with the transducer or dynamic-programming
//! paths they are used to check.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classifier::ScoreMode;
use crate::error::{Error, Result};
use crate::math;
use crate::observation::{EpsilonPolicy, ObservationTrace};
use crate::segmental::{DurationBounds, Grammar, Segment, SegmentLabeling};
use crate::semiring::LogWeight;
use crate::signatures::{DynamicPattern, LabelSet, SignatureSpec};

/// Largest trace the label-score oracle enumerates.
pub const MAX_ORACLE_FRAMES: usize = 12;
/// Largest attribute count the label-score oracle enumerates.
pub const MAX_ORACLE_ATTRIBUTES: usize = 3;
/// Largest trace the decoding oracle enumerates.
pub const MAX_DECODE_ORACLE_FRAMES: usize = 10;
const MAX_LABEL_STRINGS: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq)]
pub enum SynthTarget {
    /// One label over the whole trace.
    Label(String),
    /// `(label, duration)` segments in order.
    Sequence(Vec<(String, usize)>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthConfig {
    pub frames: usize,
    pub target: SynthTarget,
    /// Per-entry flip probability, in `[0, 0.5)`.
    pub flip_noise: f64,
    /// Emitted probability for latent-absent entries; present entries get
    /// `1 - saturation`. In `[0, 0.5)`.
    pub saturation: f64,
    pub seed: u64,
}

impl SynthConfig {
    pub const DEFAULT_SATURATION: f64 = 1e-6;

    pub fn label(label: impl Into<String>, frames: usize) -> Self {
        Self {
            frames,
            target: SynthTarget::Label(label.into()),
            flip_noise: 0.0,
            saturation: Self::DEFAULT_SATURATION,
            seed: 0,
        }
    }

    pub fn sequence<S: Into<String>>(plan: impl IntoIterator<Item = (S, usize)>) -> Self {
        let plan: Vec<(String, usize)> = plan.into_iter().map(|(l, d)| (l.into(), d)).collect();
        Self {
            frames: plan.iter().map(|(_, d)| d).sum(),
            target: SynthTarget::Sequence(plan),
            flip_noise: 0.0,
            saturation: Self::DEFAULT_SATURATION,
            seed: 0,
        }
    }

    pub fn with_noise(mut self, flip_noise: f64) -> Self {
        self.flip_noise = flip_noise;
        self
    }

    pub fn with_saturation(mut self, saturation: f64) -> Self {
        self.saturation = saturation;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn plan(&self) -> Result<Vec<(String, usize)>> {
        if !(0.0..0.5).contains(&self.flip_noise) {
            return Err(Error::InvalidConfig(format!("flip noise {} is outside [0, 0.5)", self.flip_noise)));
        }
        if !(0.0..0.5).contains(&self.saturation) {
            return Err(Error::InvalidConfig(format!("saturation {} is outside [0, 0.5)", self.saturation)));
        }
        let plan = match &self.target {
            SynthTarget::Label(l) => vec![(l.clone(), self.frames)],
            SynthTarget::Sequence(p) => p.clone(),
        };
        let total: usize = plan.iter().map(|(_, d)| d).sum();
        if plan.is_empty() || total == 0 {
            return Err(Error::InfeasiblePlan("plan covers no frames".into()));
        }
        if total != self.frames {
            return Err(Error::InfeasiblePlan(format!(
                "segments cover {total} frames but the trace has {}",
                self.frames
            )));
        }
        if let Some(w) = plan.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::InfeasiblePlan(format!("consecutive segments share label `{}`", w[0].0)));
        }
        Ok(plan)
    }
}

/// Per-trial seed: `base + trial`, wrapping.
pub fn trial_seed(base: u64, trial: u64) -> u64 {
    base.wrapping_add(trial)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroundTruth {
    /// The generating segments; `score` is 0.
    pub labeling: SegmentLabeling,
    /// Latent attribute values per vocabulary attribute, one per frame.
    pub latent: Vec<(String, Vec<bool>)>,
}

impl GroundTruth {
    /// The label of a single-segment (classification) plan.
    pub fn label(&self) -> Option<&str> {
        match self.labeling.segments.as_slice() {
            [only] => Some(&only.label),
            _ => None,
        }
    }
}

fn latent_run(pattern: DynamicPattern, len: usize, rng: &mut ChaCha8Rng) -> Vec<bool> {
    match pattern {
        DynamicPattern::Absence => vec![false; len],
        DynamicPattern::Persistence => vec![true; len],
        DynamicPattern::Start | DynamicPattern::End => {
            let switch = rng.random_range(1..len);
            let lead = pattern == DynamicPattern::Start;
            (0..len).map(|i| if i < switch { lead } else { !lead }).collect()
        }
    }
}

pub fn generate_trace(labels: &LabelSet, config: &SynthConfig) -> Result<(ObservationTrace, GroundTruth)> {
    let plan = config.plan()?;
    let mut specs: Vec<&SignatureSpec> = Vec::with_capacity(plan.len());
    for (label, duration) in &plan {
        let spec = labels.get(label).ok_or_else(|| Error::UnknownLabel(label.clone()))?;
        if *duration < spec.min_frames() {
            return Err(Error::InfeasiblePlan(format!(
                "segment `{label}` lasts {duration} frames but its patterns need {}",
                spec.min_frames()
            )));
        }
        specs.push(spec);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let vocab = labels.vocabulary();
    let mut latent: Vec<(String, Vec<bool>)> =
        vocab.iter().map(|a| (a.clone(), Vec::with_capacity(config.frames))).collect();
    for (spec, (_, duration)) in specs.iter().zip(&plan) {
        for (name, column) in latent.iter_mut() {
            let pattern = spec.pattern(name).unwrap_or(DynamicPattern::Absence);
            column.extend(latent_run(pattern, *duration, &mut rng));
        }
    }

    let high = 1.0 - config.saturation;
    let low = config.saturation;
    let rows = (0..config.frames)
        .map(|t| {
            let row = latent
                .iter()
                .map(|(_, column)| {
                    let flip = config.flip_noise > 0.0 && rng.random_bool(config.flip_noise);
                    if column[t] != flip {
                        high
                    } else {
                        low
                    }
                })
                .collect();
            (t as u64 + 1, row)
        })
        .collect();
    let trace = ObservationTrace::new(vocab.to_vec(), rows)?;

    let mut segments = Vec::with_capacity(plan.len());
    let mut start = 1;
    for (label, duration) in plan {
        segments.push(Segment { label, start, duration });
        start += duration;
    }
    Ok((trace, GroundTruth { labeling: SegmentLabeling { segments, score: 0.0 }, latent }))
}

/// Direct membership test for a pattern on a binary sequence.
fn consistent(pattern: DynamicPattern, bits: &[bool]) -> bool {
    let mut runs: Vec<bool> = Vec::new();
    for &b in bits {
        if runs.last() != Some(&b) {
            runs.push(b);
        }
    }
    match pattern {
        DynamicPattern::Absence => runs == [false],
        DynamicPattern::Persistence => runs == [true],
        DynamicPattern::Start => runs == [true, false],
        DynamicPattern::End => runs == [false, true],
    }
}

fn log_sum(values: &[f64]) -> f64 {
    let m = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + math::ln(values.iter().map(|v| math::exp(v - m)).sum::<f64>())
}

/// Label score by enumerating every binary sequence of every attribute.
pub fn brute_force_label_score(
    trace: &ObservationTrace,
    spec: &SignatureSpec,
    mode: ScoreMode,
    policy: &EpsilonPolicy,
) -> Result<LogWeight> {
    let frames = trace.frame_count();
    if frames > MAX_ORACLE_FRAMES || spec.attributes().len() > MAX_ORACLE_ATTRIBUTES {
        return Err(Error::EnumerationTooLarge(format!(
            "{frames} frames x {} attributes exceeds {MAX_ORACLE_FRAMES} x {MAX_ORACLE_ATTRIBUTES}",
            spec.attributes().len()
        )));
    }
    let mut total = 0.0;
    for (name, pattern) in spec.attributes() {
        let k = trace.attribute_index(name).ok_or_else(|| Error::UnknownAttribute(name.clone()))?;
        let logs: Vec<(f64, f64)> = trace
            .column(k)
            .map(|p| {
                let (present, absent) = policy.log_pair(p);
                (present.value(), absent.value())
            })
            .collect();
        let mut values = Vec::new();
        let mut bits = vec![false; frames];
        for mask in 0u32..(1 << frames) {
            for (t, b) in bits.iter_mut().enumerate() {
                *b = mask & (1 << t) != 0;
            }
            if !consistent(*pattern, &bits) {
                continue;
            }
            values.push(bits.iter().zip(&logs).map(|(&b, &(lp, la))| if b { lp } else { la }).sum::<f64>());
        }
        let score = match mode {
            ScoreMode::BestPath => values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            ScoreMode::SumPaths => log_sum(&values),
        };
        total += score;
    }
    Ok(LogWeight::new(total))
}

/// All label-index strings of length `1..=max_len` the grammar accepts,
/// without immediate repeats.
fn grammar_strings(grammar: &Grammar, labels: &LabelSet, max_len: usize) -> Result<BTreeSet<Vec<usize>>> {
    let mut out = BTreeSet::new();
    if grammar.is_universal() {
        let n = labels.len();
        let mut count = 0usize;
        for len in 1..=max_len {
            count = count.saturating_add(n.saturating_mul((n.saturating_sub(1)).saturating_pow(len as u32 - 1)));
        }
        if count > MAX_LABEL_STRINGS {
            return Err(Error::EnumerationTooLarge(format!("{count} label strings")));
        }
        let mut stack: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        while let Some(s) = stack.pop() {
            if s.len() < max_len {
                for j in (0..n).filter(|&j| Some(&j) != s.last()) {
                    let mut next = s.clone();
                    next.push(j);
                    stack.push(next);
                }
            }
            out.insert(s);
        }
        return Ok(out);
    }

    let machine = grammar.machine();
    let mut symbol_label = Vec::new();
    for (sym, name) in grammar.symbols().iter() {
        if sym == 0 {
            symbol_label.push(usize::MAX);
            continue;
        }
        symbol_label.push(labels.index_of(name).unwrap_or(usize::MAX));
    }
    for e in machine.edges() {
        if symbol_label[e.input as usize] == usize::MAX {
            let name = grammar.symbols().name(e.input).unwrap_or_default();
            return Err(Error::UnknownLabelInGrammar(name.to_string()));
        }
    }
    let mut stack: Vec<(usize, Vec<usize>)> = vec![(machine.start(), Vec::new())];
    let mut visited = 0usize;
    while let Some((state, s)) = stack.pop() {
        visited += 1;
        if visited > MAX_LABEL_STRINGS {
            return Err(Error::EnumerationTooLarge("grammar paths".into()));
        }
        if !s.is_empty() && machine.is_final(state) {
            out.insert(s.clone());
        }
        if s.len() == max_len {
            continue;
        }
        for e in machine.edges().iter().filter(|e| e.source == state) {
            let label = symbol_label[e.input as usize];
            if s.last() == Some(&label) {
                continue;
            }
            let mut next = s.clone();
            next.push(label);
            stack.push((e.target, next));
        }
    }
    Ok(out)
}

/// All ways to write `total` as an ordered sum of `parts` positive integers.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in 1..=total.saturating_sub(parts - 1) {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Best labeling by enumerating every segmentation and every label string
/// the grammar accepts.
pub fn brute_force_decode(
    trace: &ObservationTrace,
    labels: &LabelSet,
    grammar: &Grammar,
    bounds: &DurationBounds,
    mode: ScoreMode,
    policy: &EpsilonPolicy,
) -> Result<SegmentLabeling> {
    let frames = trace.frame_count();
    if frames > MAX_DECODE_ORACLE_FRAMES {
        return Err(Error::EnumerationTooLarge(format!(
            "{frames} frames exceeds {MAX_DECODE_ORACLE_FRAMES}"
        )));
    }
    let strings = grammar_strings(grammar, labels, frames)?;

    // span[label][start][len - 1]
    let mut span = vec![vec![vec![f64::NEG_INFINITY; frames]; frames]; labels.len()];
    for (table, spec) in span.iter_mut().zip(labels.specs()) {
        for (start, row) in table.iter_mut().enumerate() {
            for len in 1..=frames - start {
                row[len - 1] = brute_force_label_score(&trace.slice(start, len), spec, mode, policy)?.value();
            }
        }
    }

    let mut best: Option<(f64, Vec<usize>, Vec<usize>)> = None;
    let mut by_len: Vec<Vec<&Vec<usize>>> = vec![Vec::new(); frames + 1];
    for s in &strings {
        by_len[s.len()].push(s);
    }
    for (m, group) in by_len.iter().enumerate().skip(1) {
        if group.is_empty() {
            continue;
        }
        for durations in compositions(frames, m) {
            for labels_seq in group {
                let mut score = 0.0;
                let mut start = 0;
                let mut ok = true;
                for (&li, &d) in labels_seq.iter().zip(&durations) {
                    let (lo, hi) = bounds.resolve(labels.specs()[li].label(), frames);
                    if d < lo || d > hi {
                        ok = false;
                        break;
                    }
                    score += span[li][start][d - 1];
                    start += d;
                }
                if !ok || score == f64::NEG_INFINITY {
                    continue;
                }
                if best.as_ref().is_none_or(|(b, _, _)| score > *b) {
                    best = Some((score, (*labels_seq).clone(), durations.clone()));
                }
            }
        }
    }
    let (score, seq, durations) = best.ok_or(Error::NoValidParse)?;
    let mut segments = Vec::with_capacity(seq.len());
    let mut start = 1;
    for (li, d) in seq.into_iter().zip(durations) {
        segments.push(Segment { label: labels.specs()[li].label().to_string(), start, duration: d });
        start += d;
    }
    Ok(SegmentLabeling { segments, score })
}
