//! Subcommands. Every input is read and validated before any scoring.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use dynsig_core::fst::to_text;
use dynsig_core::metrics::{evaluate, harmonic_mean, mean_per_class_accuracy};
use dynsig_core::synthbench::{generate_trace, SynthConfig};
use dynsig_core::{
    classify, classify_static, compile_pattern, decode, decode_unconstrained, DurationBounds, DynamicPattern,
    EpsilonPolicy, Grammar, LabelSet, ObservationTrace, ScoreMode,
};
use log::info;
use serde_json::{json, Map, Value};

use crate::error::{CliError, CliResult};
use crate::formats::grammar::parse_grammar;
use crate::formats::labels::parse_frame_labels;
use crate::formats::signatures::parse_signatures;
use crate::formats::trace::{parse_trace, write_csv, TraceFormat};
use crate::report::{emit, render, Manifest};

#[derive(Debug, Parser)]
#[command(name = "dynsig", version, about = "Zero-shot activity recognition with dynamic action signatures")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score every label against a trace and report the best one.
    Classify(ClassifyArgs),
    /// Jointly segment and label a trace.
    Decode(DecodeArgs),
    /// Compare predicted frame labels against ground truth.
    Eval(EvalArgs),
    /// Generate a synthetic trace and its ground truth.
    Synth(SynthArgs),
    /// Dump compiled machines in text form.
    Inspect(InspectArgs),
}

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
pub enum Mode {
    #[default]
    Bestpath,
    Sumpaths,
}

impl From<Mode> for ScoreMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Bestpath => ScoreMode::BestPath,
            Mode::Sumpaths => ScoreMode::SumPaths,
        }
    }
}

#[derive(Debug, Args)]
pub struct ScoringArgs {
    /// Trace file (CSV, or JSON-lines with a .jsonl extension).
    #[arg(long)]
    pub trace: PathBuf,
    /// Signature document.
    #[arg(long)]
    pub signatures: PathBuf,
    #[arg(long, value_enum, default_value_t)]
    pub mode: Mode,
    /// Replace every dynamic pattern by its static counterpart.
    #[arg(long = "static")]
    pub static_only: bool,
    /// Probability floor applied before taking logs.
    #[arg(long, default_value_t = 1e-6)]
    pub epsilon: f64,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub scoring: ScoringArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    #[command(flatten)]
    pub scoring: ScoringArgs,
    /// Grammar document restricting label sequences.
    #[arg(long, required_unless_present = "no_grammar", conflicts_with = "no_grammar")]
    pub grammar: Option<PathBuf>,
    /// Allow any label sequence.
    #[arg(long)]
    pub no_grammar: bool,
    #[arg(long, default_value_t = 1)]
    pub min_dur: usize,
    #[arg(long)]
    pub max_dur: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Predicted frame labels: one per line, or a decode document.
    #[arg(long)]
    pub pred: PathBuf,
    /// Ground-truth frame labels, same formats.
    #[arg(long)]
    pub gt: PathBuf,
    /// Comma-separated seen classes; adds seen, unseen and harmonic-mean accuracy.
    #[arg(long, value_delimiter = ',')]
    pub seen: Option<Vec<String>>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub signatures: PathBuf,
    /// Single label to render for `--frames` frames.
    #[arg(long, conflicts_with = "sequence", requires = "frames")]
    pub label: Option<String>,
    /// Segment plan such as `G1:5,G5:4`.
    #[arg(long, required_unless_present = "label")]
    pub sequence: Option<String>,
    #[arg(long)]
    pub frames: Option<usize>,
    /// Per-entry flip probability.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long, default_value_t = SynthConfig::DEFAULT_SATURATION)]
    pub saturation: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Trace output (CSV); stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Ground-truth document output.
    #[arg(long)]
    pub truth: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InspectArgs {
    /// Dump every pattern machine of a signature document.
    #[arg(long, conflicts_with_all = ["grammar", "pattern"])]
    pub signatures: Option<PathBuf>,
    /// Only this label of the signature document.
    #[arg(long, requires = "signatures")]
    pub label: Option<String>,
    /// Dump a grammar document.
    #[arg(long, conflicts_with = "pattern")]
    pub grammar: Option<PathBuf>,
    /// Dump one pattern machine: absence, persistence, start or end.
    #[arg(long, required_unless_present_any = ["signatures", "grammar"])]
    pub pattern: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Classify(a) => cmd_classify(a),
        Command::Decode(a) => cmd_decode(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Synth(a) => cmd_synth(a),
        Command::Inspect(a) => cmd_inspect(a),
    }
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn load_signatures(path: &Path) -> CliResult<LabelSet> {
    parse_signatures(&read(path)?).map_err(|e| CliError::input(path, e))
}

pub fn load_trace(path: &Path) -> CliResult<ObservationTrace> {
    parse_trace(&read(path)?, TraceFormat::from_path(path)).map_err(|e| CliError::input(path, e))
}

pub fn load_grammar(path: &Path, labels: Option<&LabelSet>) -> CliResult<Grammar> {
    parse_grammar(&read(path)?, labels).map_err(|e| CliError::input(path, e))
}

struct Scoring {
    trace: ObservationTrace,
    labels: LabelSet,
    mode: ScoreMode,
    policy: EpsilonPolicy,
}

fn load_scoring(a: &ScoringArgs) -> CliResult<Scoring> {
    let policy = EpsilonPolicy::new(a.epsilon)?;
    let labels = load_signatures(&a.signatures)?;
    let trace = load_trace(&a.trace)?;
    info!("trace: {} frames, {} attributes; {} labels", trace.frame_count(), trace.attribute_count(), labels.len());
    Ok(Scoring { trace, labels, mode: a.mode.into(), policy })
}

fn scoring_manifest(sub: &str, a: &ScoringArgs) -> Manifest {
    Manifest::new(sub)
        .input("trace", &a.trace)
        .input("signatures", &a.signatures)
        .flag("mode", ScoreMode::from(a.mode).name())
        .flag("static", a.static_only)
        .flag("epsilon", a.epsilon)
}

fn cmd_classify(a: &ClassifyArgs) -> CliResult<()> {
    let s = load_scoring(&a.scoring)?;
    let c = if a.scoring.static_only {
        classify_static(&s.trace, &s.labels, s.mode, &s.policy)?
    } else {
        classify(&s.trace, &s.labels, s.mode, &s.policy)?
    };
    info!("winner {}{}", c.winner, if c.tie { " (tie)" } else { "" });
    let scores: Vec<Value> = c
        .scores
        .iter()
        .map(|l| json!({ "label": l.label, "raw_log_score": l.raw_log_score.value(), "normalized_score": l.normalized_score }))
        .collect();
    let diagnostics: Vec<Value> = c
        .diagnostics
        .iter()
        .map(|d| json!({ "label": d.label, "missing_attribute": d.missing_attribute }))
        .collect();
    let result = json!({
        "frames": s.trace.frame_count(),
        "winner": c.winner,
        "tie": c.tie,
        "tied_labels": c.tied_labels,
        "scores": scores,
        "diagnostics": diagnostics,
    });
    let manifest = scoring_manifest("classify", &a.scoring).out(a.out.as_deref());
    emit(a.out.as_deref(), &render(&manifest, result))
}

fn cmd_decode(a: &DecodeArgs) -> CliResult<()> {
    let s = load_scoring(&a.scoring)?;
    let grammar = match &a.grammar {
        Some(p) => Some(load_grammar(p, Some(&s.labels))?),
        None => None,
    };
    let bounds = DurationBounds::new(a.min_dur, a.max_dur)?;
    let labels = if a.scoring.static_only { s.labels.staticize() } else { s.labels.clone() };
    let labeling = match &grammar {
        Some(g) => decode(&s.trace, &labels, g, &bounds, s.mode, &s.policy)?,
        None => decode_unconstrained(&s.trace, &labels, &bounds, s.mode, &s.policy)?,
    };
    info!("{} segments", labeling.segments.len());
    let segments: Vec<Value> = labeling
        .segments
        .iter()
        .map(|g| json!({ "label": g.label, "start": g.start, "duration": g.duration }))
        .collect();
    let result = json!({
        "frames": s.trace.frame_count(),
        "score": labeling.score,
        "segments": segments,
    });
    let mut manifest = scoring_manifest("decode", &a.scoring)
        .flag("no_grammar", a.no_grammar)
        .flag("min_dur", a.min_dur)
        .flag("max_dur", a.max_dur)
        .out(a.out.as_deref());
    if let Some(p) = &a.grammar {
        manifest = manifest.input("grammar", p);
    }
    emit(a.out.as_deref(), &render(&manifest, result))
}

fn load_labels(path: &Path) -> CliResult<Vec<String>> {
    parse_frame_labels(&read(path)?).map_err(|e| CliError::input(path, e))
}

fn cmd_eval(a: &EvalArgs) -> CliResult<()> {
    let pred = load_labels(&a.pred)?;
    let gt = load_labels(&a.gt)?;
    let p: Vec<&str> = pred.iter().map(String::as_str).collect();
    let g: Vec<&str> = gt.iter().map(String::as_str).collect();
    let report = evaluate(&p, &g)?;
    let per_class: Map<String, Value> = report.per_class.iter().map(|(c, v)| (c.clone(), Value::from(*v))).collect();
    let mut result = json!({
        "frames": g.len(),
        "accuracy": report.accuracy,
        "edit_score": report.edit_score,
        "mean_class_accuracy": report.mean_class_accuracy,
        "per_class": per_class,
        "flags": report.flags,
    });
    if let Some(seen) = &a.seen {
        let seen: Vec<&str> = seen.iter().map(String::as_str).collect();
        let mut unseen: Vec<&str> = g.iter().copied().filter(|c| !seen.contains(c)).collect();
        unseen.sort_unstable();
        unseen.dedup();
        if unseen.is_empty() || seen.is_empty() {
            return Err(CliError::Usage("--seen must leave both seen and unseen ground-truth classes".into()));
        }
        // recall over the frames whose ground truth falls in `classes`
        let subset = |classes: &[&str]| -> CliResult<f64> {
            let (sp, sg): (Vec<&str>, Vec<&str>) = p.iter().zip(&g).filter(|(_, t)| classes.contains(t)).unzip();
            Ok(mean_per_class_accuracy(&sp, &sg, classes)?.mean)
        };
        let s = subset(&seen)?;
        let u = subset(&unseen)?;
        result["seen_accuracy"] = s.into();
        result["unseen_accuracy"] = u.into();
        result["harmonic_mean"] = harmonic_mean(s, u).into();
    }
    let manifest = Manifest::new("eval")
        .input("pred", &a.pred)
        .input("gt", &a.gt)
        .flag("seen", a.seen.clone())
        .out(a.out.as_deref());
    emit(a.out.as_deref(), &render(&manifest, result))
}

fn parse_plan(spec: &str) -> CliResult<Vec<(String, usize)>> {
    spec.split(',')
        .map(|part| {
            let (label, n) = part
                .split_once(':')
                .ok_or_else(|| CliError::Usage(format!("segment `{part}` is not LABEL:FRAMES")))?;
            let n = n.trim().parse().map_err(|_| CliError::Usage(format!("bad frame count in `{part}`")))?;
            Ok((label.trim().to_string(), n))
        })
        .collect()
}

fn cmd_synth(a: &SynthArgs) -> CliResult<()> {
    let labels = load_signatures(&a.signatures)?;
    let config = match (&a.label, &a.sequence) {
        (Some(l), _) => SynthConfig::label(l.clone(), a.frames.unwrap_or_default()),
        (None, Some(s)) => SynthConfig::sequence(parse_plan(s)?),
        (None, None) => return Err(CliError::Usage("need --label or --sequence".into())),
    }
    .with_noise(a.noise)
    .with_saturation(a.saturation)
    .with_seed(a.seed);
    let (trace, truth) = generate_trace(&labels, &config)?;
    let manifest = Manifest::new("synth")
        .input("signatures", &a.signatures)
        .flag("label", a.label.clone())
        .flag("sequence", a.sequence.clone())
        .flag("frames", trace.frame_count())
        .flag("noise", a.noise)
        .flag("saturation", a.saturation)
        .flag("seed", a.seed)
        .out(a.out.as_deref());
    emit(a.out.as_deref(), &write_csv(&trace))?;
    if let Some(path) = &a.truth {
        let segments: Vec<Value> = truth
            .labeling
            .segments
            .iter()
            .map(|g| json!({ "label": g.label, "start": g.start, "duration": g.duration }))
            .collect();
        let latent: Map<String, Value> = truth
            .latent
            .iter()
            .map(|(a, bits)| (a.clone(), bits.iter().map(|&b| u8::from(b)).collect::<Vec<_>>().into()))
            .collect();
        let result = json!({ "label": truth.label(), "segments": segments, "latent": latent });
        emit(Some(path), &render(&manifest, result))?;
    }
    Ok(())
}

fn cmd_inspect(a: &InspectArgs) -> CliResult<()> {
    let mut manifest = Manifest::new("inspect").flag("label", a.label.clone()).flag("pattern", a.pattern.clone());
    let mut body = String::new();
    if let Some(name) = &a.pattern {
        let p = DynamicPattern::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(name))
            .ok_or_else(|| CliError::Usage(format!("unknown pattern `{name}`")))?;
        body.push_str(&to_text(&compile_pattern(p)));
    } else if let Some(path) = &a.signatures {
        let labels = load_signatures(path)?;
        manifest = manifest.input("signatures", path);
        let specs: Vec<_> = match &a.label {
            Some(l) => vec![labels.get(l).ok_or_else(|| CliError::Core(dynsig_core::Error::UnknownLabel(l.clone())))?],
            None => labels.specs().iter().collect(),
        };
        for (i, spec) in specs.iter().enumerate() {
            for (j, (attr, p)) in spec.attributes().iter().enumerate() {
                if i + j > 0 {
                    body.push('\n');
                }
                body.push_str(&format!("# label {}, attribute {attr}: {}\n", spec.label(), p.name()));
                body.push_str(&to_text(&compile_pattern(*p)));
            }
        }
    } else if let Some(path) = &a.grammar {
        let grammar = load_grammar(path, None)?;
        manifest = manifest.input("grammar", path);
        if grammar.is_universal() {
            body.push_str("# universal grammar\n");
        } else {
            for (sym, name) in grammar.symbols().iter().skip(1) {
                body.push_str(&format!("# symbol {sym} {name}\n"));
            }
            body.push_str(&to_text(grammar.machine()));
        }
    }
    manifest = manifest.out(a.out.as_deref());
    emit(a.out.as_deref(), &format!("{}{body}", manifest.comment_header()))
}
