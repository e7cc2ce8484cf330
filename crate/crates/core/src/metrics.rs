//! Evaluation metrics for classification and segmentation. All values are
//! percentages in `[0, 100]`.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Share of frames whose labels agree. Two empty sequences score 100.
pub fn frame_accuracy<L: PartialEq>(pred: &[L], gt: &[L]) -> Result<f64> {
    if pred.len() != gt.len() {
        return Err(Error::LengthMismatch { left: pred.len(), right: gt.len() });
    }
    if gt.is_empty() {
        return Ok(100.0);
    }
    let hits = pred.iter().zip(gt).filter(|(p, g)| p == g).count();
    Ok(100.0 * hits as f64 / gt.len() as f64)
}

/// Collapses runs of equal neighbours: `AABBA -> ABA`.
pub fn collapse_runs<L: PartialEq + Clone>(labels: &[L]) -> Vec<L> {
    let mut out: Vec<L> = Vec::new();
    for l in labels {
        if out.last() != Some(l) {
            out.push(l.clone());
        }
    }
    out
}

/// Unit-cost edit distance.
pub fn levenshtein<L: PartialEq>(a: &[L], b: &[L]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(x != y);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        core::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Segmental edit score: runs are collapsed first, then
/// `100 * (1 - lev / max(|pred|, |gt|))`. Both empty scores 100.
pub fn edit_score<L: PartialEq + Clone>(pred: &[L], gt: &[L]) -> f64 {
    let p = collapse_runs(pred);
    let g = collapse_runs(gt);
    let longest = p.len().max(g.len());
    if longest == 0 {
        return 100.0;
    }
    100.0 * (1.0 - levenshtein(&p, &g) as f64 / longest as f64)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassAccuracy<L> {
    /// Unweighted mean recall over classes present in the ground truth.
    pub mean: f64,
    /// Recall per class present in the ground truth, in class-set order.
    pub per_class: Vec<(L, f64)>,
    /// Classes of the class set that never occur in the ground truth.
    pub excluded: Vec<L>,
}

pub fn mean_per_class_accuracy<L: PartialEq + Clone>(
    preds: &[L],
    gts: &[L],
    classes: &[L],
) -> Result<ClassAccuracy<L>> {
    if classes.is_empty() {
        return Err(Error::EmptyClassSet);
    }
    if preds.len() != gts.len() {
        return Err(Error::LengthMismatch { left: preds.len(), right: gts.len() });
    }
    if gts.iter().any(|g| !classes.contains(g)) {
        return Err(Error::UnknownClass);
    }
    let mut per_class = Vec::new();
    let mut excluded = Vec::new();
    for c in classes {
        let total = gts.iter().filter(|g| *g == c).count();
        if total == 0 {
            excluded.push(c.clone());
            continue;
        }
        let hits = preds.iter().zip(gts).filter(|(p, g)| *g == c && *p == c).count();
        per_class.push((c.clone(), 100.0 * hits as f64 / total as f64));
    }
    let mean = if per_class.is_empty() {
        0.0
    } else {
        per_class.iter().map(|(_, a)| a).sum::<f64>() / per_class.len() as f64
    };
    Ok(ClassAccuracy { mean, per_class, excluded })
}

/// `2ab / (a + b)`; zero when either argument is zero.
pub fn harmonic_mean(seen: f64, unseen: f64) -> f64 {
    if seen <= 0.0 || unseen <= 0.0 {
        return 0.0;
    }
    2.0 * seen * unseen / (seen + unseen)
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport {
    pub accuracy: f64,
    pub edit_score: f64,
    pub mean_class_accuracy: f64,
    pub per_class: Vec<(String, f64)>,
    pub harmonic_mean: Option<f64>,
    pub flags: Vec<String>,
}

/// Frame accuracy, edit score and per-class recall of two frame labelings.
pub fn evaluate(pred: &[&str], gt: &[&str]) -> Result<EvalReport> {
    let accuracy = frame_accuracy(pred, gt)?;
    let mut flags = Vec::new();
    if pred.is_empty() && gt.is_empty() {
        flags.push("both sequences are empty; edit score set to 100".to_string());
    }
    let classes: Vec<&str> = pred.iter().chain(gt).copied().collect::<BTreeSet<_>>().into_iter().collect();
    let (mean_class_accuracy, per_class) = if classes.is_empty() {
        (100.0, Vec::new())
    } else {
        let pc = mean_per_class_accuracy(pred, gt, &classes)?;
        for c in &pc.excluded {
            flags.push(format!("class `{c}` never occurs in the ground truth; excluded from the class mean"));
        }
        (pc.mean, pc.per_class.into_iter().map(|(c, a)| (c.to_string(), a)).collect())
    };
    Ok(EvalReport {
        accuracy,
        edit_score: edit_score(pred, gt),
        mean_class_accuracy,
        per_class,
        harmonic_mean: None,
        flags,
    })
}
