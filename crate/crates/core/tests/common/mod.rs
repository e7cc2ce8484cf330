//! Random machines and path-enumeration oracles shared by the integration
//! and acceptance suites.
#![allow(dead_code)]

use std::collections::BTreeMap;

use dynsig_core::fst::{Edge, Symbol, Transducer};
use dynsig_core::{DynamicPattern, Grammar, LabelSet, LogWeight, ObservationTrace, SignatureSpec};
use rand::Rng;

/// Random acyclic machine: edges only go from lower to higher state ids.
/// Symbols are drawn from `{0 (epsilon), 1, 2}`.
pub fn random_acyclic(rng: &mut impl Rng, max_states: usize) -> Transducer {
    let n = rng.random_range(2..=max_states);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(0.4) {
                for _ in 0..rng.random_range(1..=2) {
                    edges.push(Edge {
                        source: i,
                        target: j,
                        input: rng.random_range(0..3),
                        output: rng.random_range(0..3),
                        weight: LogWeight::new(rng.random_range(-2.5..0.3)),
                    });
                }
            }
        }
    }
    let mut finals: Vec<usize> = (1..n).filter(|_| rng.random_bool(0.4)).collect();
    if finals.is_empty() {
        finals.push(n - 1);
    }
    Transducer::from_parts(n, 0, finals, edges)
}

#[derive(Clone, Debug)]
pub struct EnumPath {
    pub edges: Vec<usize>,
    pub input: Vec<Symbol>,
    pub output: Vec<Symbol>,
    pub weight: f64,
}

/// Every accepting path of an acyclic machine, by depth-first search.
pub fn enumerate_paths(t: &Transducer) -> Vec<EnumPath> {
    let mut out = Vec::new();
    let mut stack = vec![(t.start(), EnumPath { edges: vec![], input: vec![], output: vec![], weight: 0.0 })];
    while let Some((s, p)) = stack.pop() {
        if t.is_final(s) {
            out.push(p.clone());
        }
        for (i, e) in t.edges().iter().enumerate().filter(|(_, e)| e.source == s) {
            let mut q = p.clone();
            q.edges.push(i);
            if e.input != 0 {
                q.input.push(e.input);
            }
            if e.output != 0 {
                q.output.push(e.output);
            }
            q.weight += e.weight.value();
            stack.push((e.target, q));
        }
    }
    out
}

pub fn log_sum_exp(values: &[f64]) -> f64 {
    let m = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + values.iter().map(|v| (v - m).exp()).sum::<f64>().ln()
}

pub type Relation = BTreeMap<(Vec<Symbol>, Vec<Symbol>), f64>;

/// Weighted relation realized by a machine: log-sum over paths per
/// (input string, output string) pair.
pub fn relation(t: &Transducer) -> Relation {
    let mut groups: BTreeMap<(Vec<Symbol>, Vec<Symbol>), Vec<f64>> = BTreeMap::new();
    for p in enumerate_paths(t) {
        groups.entry((p.input, p.output)).or_default().push(p.weight);
    }
    groups.into_iter().map(|(k, v)| (k, log_sum_exp(&v))).collect()
}

/// Relational composition of two weighted relations.
pub fn compose_relations(a: &Relation, b: &Relation) -> Relation {
    let mut groups: BTreeMap<(Vec<Symbol>, Vec<Symbol>), Vec<f64>> = BTreeMap::new();
    for ((x, y), wa) in a {
        for ((y2, z), wb) in b {
            if y == y2 {
                groups.entry((x.clone(), z.clone())).or_default().push(wa + wb);
            }
        }
    }
    groups.into_iter().map(|(k, v)| (k, log_sum_exp(&v))).collect()
}

pub fn relations_close(a: &Relation, b: &Relation, tol: f64) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|((ka, wa), (kb, wb))| ka == kb && (wa - wb).abs() <= tol)
}

pub fn random_trace(rng: &mut impl Rng, frames: usize, attributes: &[String]) -> ObservationTrace {
    let columns = attributes
        .iter()
        .map(|a| (a.clone(), (0..frames).map(|_| rng.random::<f64>()).collect()))
        .collect();
    ObservationTrace::from_columns(columns).unwrap()
}

pub fn random_pattern(rng: &mut impl Rng) -> DynamicPattern {
    DynamicPattern::ALL[rng.random_range(0..4)]
}

pub fn random_spec(rng: &mut impl Rng, label: &str, attributes: &[String]) -> SignatureSpec {
    SignatureSpec::new(label, attributes.iter().map(|a| (a.clone(), random_pattern(rng)))).unwrap()
}

pub fn names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol
}

/// Seven suturing gestures over five attributes, pairwise differing in at
/// least two attribute patterns.
pub fn suturing_labels() -> LabelSet {
    use DynamicPattern::*;
    let attrs = ["left_grip", "right_grip", "needle_in_tissue", "thread_taut", "tool_moving"];
    let rows: [(&str, [DynamicPattern; 5]); 7] = [
        ("G1", [Absence, End, Absence, Absence, Start]),
        ("G5", [Absence, Persistence, Absence, Absence, End]),
        ("G2", [Absence, Persistence, End, Absence, Absence]),
        ("G3", [End, Start, Persistence, Absence, Absence]),
        ("G6", [Persistence, Absence, Start, End, Persistence]),
        ("G4", [Start, End, Absence, Absence, Absence]),
        ("G11", [Start, Absence, Absence, Start, Start]),
    ];
    let specs = rows
        .iter()
        .map(|(label, pats)| SignatureSpec::new(*label, attrs.iter().copied().zip(pats.iter().copied())).unwrap())
        .collect();
    LabelSet::new(specs, None).unwrap()
}

/// The ideal suturing sequence: G1 G5 G2 G3 G6, then either G11 or G4 and
/// another G2 G3 G6 round.
pub fn suturing_grammar(labels: &LabelSet) -> Grammar {
    let vocab: Vec<String> = labels.labels().map(String::from).collect();
    Grammar::from_named_edges(
        7,
        0,
        &[6],
        &[
            (0, 1, "G1"),
            (1, 2, "G5"),
            (2, 3, "G2"),
            (3, 4, "G3"),
            (4, 5, "G6"),
            (5, 2, "G4"),
            (5, 6, "G11"),
        ],
        Some(&vocab),
    )
    .unwrap()
}

/// Gesture sequence with `loops` extra G4 G2 G3 G6 rounds.
pub fn suturing_sequence(loops: usize) -> Vec<&'static str> {
    let mut seq = vec!["G1", "G5", "G2", "G3", "G6"];
    for _ in 0..loops {
        seq.extend(["G4", "G2", "G3", "G6"]);
    }
    seq.push("G11");
    seq
}

/// Random signatures for the suturing gesture names, over one or two
/// attributes and mostly static, so that short traces still admit parses.
pub fn random_suturing_signatures(rng: &mut impl Rng) -> LabelSet {
    use DynamicPattern::*;
    let attrs = names("a", rng.random_range(1..=2));
    let specs = suturing_labels()
        .labels()
        .map(|l| {
            let pats: Vec<(String, DynamicPattern)> = attrs
                .iter()
                .map(|a| {
                    let p = if rng.random_bool(0.8) {
                        [Absence, Persistence][rng.random_range(0..2)]
                    } else {
                        [Start, End][rng.random_range(0..2)]
                    };
                    (a.clone(), p)
                })
                .collect();
            SignatureSpec::new(l, pats).unwrap()
        })
        .collect();
    LabelSet::new(specs, None).unwrap()
}

/// One random decoding case: trace, labels, grammar, bounds.
pub fn random_decode_case(
    rng: &mut impl Rng,
    fig3: bool,
) -> (ObservationTrace, LabelSet, Grammar, dynsig_core::DurationBounds) {
    use dynsig_core::DurationBounds;
    let (labels, grammar, frames) = if fig3 {
        let labels = random_suturing_signatures(rng);
        let grammar = suturing_grammar(&labels);
        (labels, grammar, rng.random_range(6..=10))
    } else {
        let attrs = names("a", rng.random_range(1..=3));
        let n = rng.random_range(1..=3);
        let labels = LabelSet::new((0..n).map(|i| random_spec(rng, &format!("l{i}"), &attrs)).collect(), None).unwrap();
        let grammar = Grammar::universal(&labels);
        (labels, grammar, rng.random_range(1..=10))
    };
    let trace = random_trace(rng, frames, labels.vocabulary());
    let mut bounds = DurationBounds::default();
    if rng.random_bool(0.3) {
        let min = rng.random_range(1..=2);
        bounds = DurationBounds::new(min, Some(rng.random_range(min..=min + 4))).unwrap();
    }
    (trace, labels, grammar, bounds)
}

/// Compares `decode` against the brute-force decoder: equal scores within
/// `tol` and identical labelings unless the oracle's labeling ties.
pub fn check_decode(
    trace: &ObservationTrace,
    labels: &LabelSet,
    grammar: &Grammar,
    bounds: &dynsig_core::DurationBounds,
    mode: dynsig_core::ScoreMode,
    tol: f64,
) -> Result<(), String> {
    use dynsig_core::segmental::labeling_score;
    use dynsig_core::synthbench::brute_force_decode;
    use dynsig_core::{decode, EpsilonPolicy};
    let policy = EpsilonPolicy::default();
    let got = decode(trace, labels, grammar, bounds, mode, &policy);
    let want = brute_force_decode(trace, labels, grammar, bounds, mode, &policy);
    match (got, want) {
        (Err(a), Err(b)) if a == b => Ok(()),
        (Ok(a), Ok(b)) => {
            if !close(a.score, b.score, tol) {
                return Err(format!("score {} vs oracle {}", a.score, b.score));
            }
            if a.segments != b.segments {
                let rescored = labeling_score(trace, labels, &a.segments, mode, &policy).map_err(|e| e.to_string())?;
                let seq = a.label_sequence();
                if !close(rescored, b.score, tol) || !grammar.accepts(&seq) {
                    return Err(format!("labeling {:?} differs from oracle {:?}", a.segments, b.segments));
                }
            }
            a.check_tiling(trace.frame_count()).map_err(|e| e.to_string())
        }
        (a, b) => Err(format!("decode {a:?} vs oracle {b:?}")),
    }
}

/// Eight labels over three attributes, each attribute Start or End. All of
/// them staticize to the same all-present signature.
pub fn start_end_labels() -> LabelSet {
    let attrs = ["x", "y", "z"];
    let specs = (0..8u32)
        .map(|code| {
            let pats = (0..3).map(|bit| {
                if code >> bit & 1 == 1 { DynamicPattern::End } else { DynamicPattern::Start }
            });
            SignatureSpec::new(format!("s{code}"), attrs.iter().copied().zip(pats)).unwrap()
        })
        .collect();
    LabelSet::new(specs, None).unwrap()
}

/// Dynamic and static accuracy (percent) on `trials` noisy single-label traces.
pub fn dynamic_vs_static(trials: u64, noise: f64, frames: usize, seed: u64) -> (f64, f64) {
    use dynsig_core::synthbench::{generate_trace, trial_seed, SynthConfig};
    use dynsig_core::{classify, classify_static, EpsilonPolicy, ScoreMode};
    let labels = start_end_labels();
    let policy = EpsilonPolicy::default();
    let (mut dynamic, mut stat) = (0u64, 0u64);
    for trial in 0..trials {
        let label = labels.specs()[(trial % 8) as usize].label();
        let cfg = SynthConfig::label(label, frames).with_noise(noise).with_seed(trial_seed(seed, trial));
        let (trace, _) = generate_trace(&labels, &cfg).unwrap();
        dynamic += (classify(&trace, &labels, ScoreMode::BestPath, &policy).unwrap().winner == label) as u64;
        stat += (classify_static(&trace, &labels, ScoreMode::BestPath, &policy).unwrap().winner == label) as u64;
    }
    (100.0 * dynamic as f64 / trials as f64, 100.0 * stat as f64 / trials as f64)
}

pub struct GrammarComparison {
    pub grammar_edit: f64,
    pub free_edit: f64,
    /// Descriptions of tiling or grammar-membership failures.
    pub violations: Vec<String>,
}

/// Mean edit scores of grammar-constrained and unconstrained decoding over
/// `sequences` noisy suturing sequences.
pub fn grammar_vs_unconstrained(sequences: u64, noise: f64, seed: u64) -> GrammarComparison {
    use dynsig_core::metrics::edit_score;
    use dynsig_core::synthbench::{generate_trace, trial_seed, SynthConfig};
    use dynsig_core::{decode, decode_unconstrained, DurationBounds, EpsilonPolicy, ScoreMode};
    use rand::SeedableRng;
    let labels = suturing_labels();
    let grammar = suturing_grammar(&labels);
    let policy = EpsilonPolicy::default();
    let bounds = DurationBounds::new(1, Some(12)).unwrap();
    let mut out = GrammarComparison { grammar_edit: 0.0, free_edit: 0.0, violations: Vec::new() };
    for i in 0..sequences {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(trial_seed(seed, i));
        let truth = suturing_sequence(rng.random_range(0..=1));
        let plan: Vec<(&str, usize)> = truth.iter().map(|l| (*l, rng.random_range(3..=8))).collect();
        let frames: usize = plan.iter().map(|p| p.1).sum();
        let cfg = SynthConfig::sequence(plan).with_noise(noise).with_seed(trial_seed(seed ^ 0x5eed, i));
        let (trace, _) = generate_trace(&labels, &cfg).unwrap();
        for (constrained, acc) in [(true, &mut out.grammar_edit), (false, &mut out.free_edit)] {
            let result = if constrained {
                decode(&trace, &labels, &grammar, &bounds, ScoreMode::BestPath, &policy)
            } else {
                decode_unconstrained(&trace, &labels, &bounds, ScoreMode::BestPath, &policy)
            };
            match result {
                Ok(l) => {
                    if let Err(e) = l.check_tiling(frames) {
                        out.violations.push(format!("sequence {i}: {e}"));
                    }
                    if constrained && !grammar.accepts(&l.label_sequence()) {
                        out.violations.push(format!("sequence {i}: grammar rejects output"));
                    }
                    *acc += edit_score(&l.label_sequence(), &truth);
                }
                Err(e) => out.violations.push(format!("sequence {i}: {e}")),
            }
        }
    }
    out.grammar_edit /= sequences as f64;
    out.free_edit /= sequences as f64;
    out
}
