mod common;

use common::*;
use dynsig_core::synthbench::{generate_trace, SynthConfig};
use dynsig_core::{
    decode, decode_unconstrained, DurationBounds, EpsilonPolicy, Grammar, ObservationTrace, ScoreMode,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn universal_grammar_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for i in 0..80 {
        let (trace, labels, grammar, bounds) = random_decode_case(&mut rng, false);
        let mode = if i % 2 == 0 { ScoreMode::BestPath } else { ScoreMode::SumPaths };
        check_decode(&trace, &labels, &grammar, &bounds, mode, 1e-9).unwrap();
    }
}

#[test]
fn suturing_grammar_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for i in 0..40 {
        let (trace, labels, grammar, bounds) = random_decode_case(&mut rng, true);
        let mode = if i % 2 == 0 { ScoreMode::BestPath } else { ScoreMode::SumPaths };
        check_decode(&trace, &labels, &grammar, &bounds, mode, 1e-9).unwrap();
    }
}

#[test]
fn constraining_never_raises_the_score() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let policy = EpsilonPolicy::default();
    for _ in 0..40 {
        let (trace, labels, grammar, bounds) = random_decode_case(&mut rng, true);
        let free = decode_unconstrained(&trace, &labels, &bounds, ScoreMode::BestPath, &policy);
        let held = decode(&trace, &labels, &grammar, &bounds, ScoreMode::BestPath, &policy);
        match (free, held) {
            (Ok(f), Ok(h)) => assert!(h.score <= f.score + 1e-12),
            (Err(_), h) => assert!(h.is_err()),
            (Ok(_), Err(_)) => {}
        }
    }
}

#[test]
fn noise_free_suturing_sequence_is_recovered() {
    let labels = suturing_labels();
    let grammar = suturing_grammar(&labels);
    let truth = suturing_sequence(0);
    let cfg = SynthConfig::sequence(truth.iter().map(|l| (*l, 5))).with_seed(3);
    let (trace, _) = generate_trace(&labels, &cfg).unwrap();
    let out = decode(&trace, &labels, &grammar, &DurationBounds::default(), ScoreMode::BestPath, &EpsilonPolicy::default())
        .unwrap();
    assert_eq!(out.label_sequence(), truth);
    out.check_tiling(30).unwrap();
}

#[test]
fn single_frame_of_dynamic_labels_has_no_parse() {
    let labels = suturing_labels();
    let trace = ObservationTrace::from_columns(
        labels.vocabulary().iter().map(|a| (a.clone(), vec![0.2])).collect(),
    )
    .unwrap();
    // every gesture has a dynamic pattern, so one frame cannot be parsed
    let err = decode_unconstrained(&trace, &labels, &DurationBounds::default(), ScoreMode::BestPath, &EpsilonPolicy::default());
    assert_eq!(err.unwrap_err(), dynsig_core::Error::NoValidParse);
}

#[test]
fn grammar_rejects_repeats_and_out_of_order_labels() {
    let labels = suturing_labels();
    let g = suturing_grammar(&labels);
    assert!(g.accepts(&suturing_sequence(0)));
    assert!(g.accepts(&suturing_sequence(2)));
    assert!(!g.accepts(&["G1", "G5", "G2", "G3", "G6"]));
    assert!(!g.accepts(&["G5", "G2", "G3", "G6", "G11"]));
    assert!(Grammar::universal(&labels).accepts(&["G11", "G1"]));
}
