mod common;

use common::*;
use dynsig_core::synthbench::{generate_trace, trial_seed, SynthConfig};
use dynsig_core::{classify, EpsilonPolicy, ScoreMode};

fn accuracy(noise: f64, trials: u64) -> f64 {
    let labels = suturing_labels();
    let policy = EpsilonPolicy::default();
    let mut hits = 0;
    for t in 0..trials {
        let label = labels.specs()[(t % 7) as usize].label();
        let cfg = SynthConfig::label(label, 8).with_noise(noise).with_seed(trial_seed(7, t));
        let (trace, _) = generate_trace(&labels, &cfg).unwrap();
        hits += (classify(&trace, &labels, ScoreMode::BestPath, &policy).unwrap().winner == label) as u32;
    }
    100.0 * hits as f64 / trials as f64
}

#[test]
fn accuracy_degrades_with_noise() {
    let levels = [0.0, 0.1, 0.2, 0.3, 0.4];
    let acc: Vec<f64> = levels.iter().map(|&p| accuracy(p, 500)).collect();
    assert_eq!(acc[0], 100.0);
    for w in acc.windows(2) {
        assert!(w[1] <= w[0] + 2.0, "{acc:?}");
    }
    assert!(acc[4] < acc[0], "{acc:?}");
}

#[test]
fn dynamic_signatures_separate_what_static_ones_cannot() {
    let (dynamic, stat) = dynamic_vs_static(200, 0.1, 48, 1);
    eprintln!("dynamic {dynamic} static {stat}");
    assert!(dynamic >= 95.0);
    assert!(dynamic - stat >= 30.0);
}

#[test]
fn grammar_helps_on_noisy_sequences() {
    let cmp = grammar_vs_unconstrained(20, 0.15, 2);
    eprintln!("grammar {} free {}", cmp.grammar_edit, cmp.free_edit);
    assert!(cmp.violations.is_empty(), "{:?}", cmp.violations);
    assert!(cmp.grammar_edit >= cmp.free_edit + 10.0);
}

#[test]
fn same_seed_same_trace() {
    let labels = suturing_labels();
    let cfg = SynthConfig::sequence(suturing_sequence(1).into_iter().map(|l| (l, 4))).with_noise(0.2).with_seed(9);
    assert_eq!(generate_trace(&labels, &cfg).unwrap(), generate_trace(&labels, &cfg).unwrap());
}
