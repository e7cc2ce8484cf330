//! Per-frame attribute probability traces and their observation transducers.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fst::{Symbol, Transducer, TransducerBuilder};
use crate::math;
use crate::semiring::LogWeight;
use crate::signatures::{ABSENT, PRESENT};

/// A `T x K` matrix of detection probabilities with named columns.
///
/// Frame indices are kept as loaded (1-based, strictly increasing); they are
/// not required to be contiguous, e.g. after [`ObservationTrace::downsample`].
#[derive(Clone, Debug, PartialEq)]
pub struct ObservationTrace {
    attributes: Vec<String>,
    frames: Vec<u64>,
    probs: Vec<f64>,
}

impl ObservationTrace {
    /// Builds a trace from `(frame index, row)` pairs.
    pub fn new(attributes: Vec<String>, rows: Vec<(u64, Vec<f64>)>) -> Result<Self> {
        if attributes.is_empty() {
            return Err(Error::NoAttributes);
        }
        for (i, name) in attributes.iter().enumerate() {
            if attributes[..i].contains(name) {
                return Err(Error::DuplicateAttribute(name.clone()));
            }
        }
        if rows.is_empty() {
            return Err(Error::EmptyTrace);
        }
        let k = attributes.len();
        let mut frames = Vec::with_capacity(rows.len());
        let mut probs = Vec::with_capacity(rows.len() * k);
        for (row, (frame, values)) in rows.into_iter().enumerate() {
            if values.len() != k {
                return Err(Error::RowWidth { row, found: values.len(), expected: k });
            }
            if frames.last().is_some_and(|&prev| frame <= prev) {
                return Err(Error::NonMonotonicFrames { frame });
            }
            for (a, &v) in values.iter().enumerate() {
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::OutOfRangeProbability {
                        frame,
                        attribute: attributes[a].clone(),
                        value: v,
                    });
                }
            }
            frames.push(frame);
            probs.extend(values);
        }
        Ok(Self { attributes, frames, probs })
    }

    /// Builds a trace from columns, numbering frames 1..=T.
    pub fn from_columns(columns: Vec<(String, Vec<f64>)>) -> Result<Self> {
        let t = columns.first().map_or(0, |(_, c)| c.len());
        let attributes: Vec<String> = columns.iter().map(|(n, _)| n.clone()).collect();
        let rows = (0..t)
            .map(|i| {
                let row = columns.iter().map(|(_, c)| c.get(i).copied().unwrap_or(f64::NAN)).collect();
                (i as u64 + 1, row)
            })
            .collect();
        for (_, c) in &columns {
            if c.len() != t {
                return Err(Error::RowWidth { row: c.len().min(t), found: c.len(), expected: t });
            }
        }
        Self::new(attributes, rows)
    }

    pub fn frame_count(&self) -> usize {
        self.frames.len()
    }

    pub fn attribute_count(&self) -> usize {
        self.attributes.len()
    }

    pub fn attributes(&self) -> &[String] {
        &self.attributes
    }

    pub fn frame_indices(&self) -> &[u64] {
        &self.frames
    }

    pub fn attribute_index(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a == name)
    }

    /// Probability of attribute `k` at 0-based row `t`.
    pub fn prob(&self, t: usize, k: usize) -> f64 {
        self.probs[t * self.attributes.len() + k]
    }

    pub fn row(&self, t: usize) -> &[f64] {
        let k = self.attributes.len();
        &self.probs[t * k..(t + 1) * k]
    }

    pub fn column(&self, k: usize) -> impl Iterator<Item = f64> + '_ {
        (0..self.frame_count()).map(move |t| self.prob(t, k))
    }

    /// Rows `start..start + len` (0-based). Panics when out of bounds.
    pub fn slice(&self, start: usize, len: usize) -> Self {
        let k = self.attributes.len();
        assert!(len >= 1 && start + len <= self.frame_count(), "slice out of bounds");
        Self {
            attributes: self.attributes.clone(),
            frames: self.frames[start..start + len].to_vec(),
            probs: self.probs[start * k..(start + len) * k].to_vec(),
        }
    }

    /// Keeps every `stride`-th row starting with the first.
    pub fn downsample(&self, stride: usize) -> Result<Self> {
        if stride == 0 {
            return Err(Error::InvalidStride);
        }
        let k = self.attributes.len();
        let keep: Vec<usize> = (0..self.frame_count()).step_by(stride).collect();
        Ok(Self {
            attributes: self.attributes.clone(),
            frames: keep.iter().map(|&t| self.frames[t]).collect(),
            probs: keep.iter().flat_map(|&t| self.probs[t * k..(t + 1) * k].iter().copied()).collect(),
        })
    }
}

/// Clamping applied to probabilities before taking logs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpsilonPolicy {
    floor: f64,
}

impl Default for EpsilonPolicy {
    fn default() -> Self {
        Self { floor: Self::DEFAULT_FLOOR }
    }
}

impl EpsilonPolicy {
    pub const DEFAULT_FLOOR: f64 = 1e-6;

    pub fn new(floor: f64) -> Result<Self> {
        if floor > 0.0 && floor < 0.5 {
            Ok(Self { floor })
        } else {
            Err(Error::InvalidEpsilon(floor))
        }
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }

    pub fn clamp(&self, p: f64) -> f64 {
        p.max(self.floor).min(1.0 - self.floor)
    }

    /// `(log p, log(1 - p))` of the clamped probability.
    pub fn log_pair(&self, p: f64) -> (LogWeight, LogWeight) {
        let p = self.clamp(p);
        (LogWeight::new(math::ln(p)), LogWeight::new(math::ln_1p(-p)))
    }
}

/// Linear chain over `T + 1` states. Between states `t - 1` and `t` sit two
/// edges reading the frame position `t` (1-based): one writing
/// [`PRESENT`] with weight `log p`, one writing [`ABSENT`] with weight
/// `log(1 - p)`.
pub fn observation_transducer(
    trace: &ObservationTrace,
    attribute: &str,
    policy: &EpsilonPolicy,
) -> Result<Transducer<LogWeight>> {
    let k = trace
        .attribute_index(attribute)
        .ok_or_else(|| Error::UnknownAttribute(attribute.into()))?;
    let mut b = TransducerBuilder::new();
    let mut prev = b.add_state();
    b.set_start(prev);
    for (t, p) in trace.column(k).enumerate() {
        let next = b.add_state();
        let (present, absent) = policy.log_pair(p);
        let sym = (t + 1) as Symbol;
        b.add_edge(prev, sym, PRESENT, present, next);
        b.add_edge(prev, sym, ABSENT, absent, next);
        prev = next;
    }
    b.set_final(prev);
    Ok(b.build())
}

/// Number of output frames after downsampling `frames` rows by `stride`.
pub fn downsampled_len(frames: usize, stride: usize) -> usize {
    math::ceil(frames as f64 / stride as f64) as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn person(ps: &[f64]) -> ObservationTrace {
        ObservationTrace::from_columns(vec![("person".into(), ps.to_vec())]).unwrap()
    }

    #[test]
    fn chain_weights() {
        let t = observation_transducer(&person(&[0.9, 0.2]), "person", &EpsilonPolicy::default()).unwrap();
        assert_eq!(t.state_count(), 3);
        assert_eq!(t.finals(), &[2]);
        let w: Vec<f64> = t.edges().iter().map(|e| e.weight.value()).collect();
        let want = [0.9f64.ln(), 0.1f64.ln(), 0.2f64.ln(), 0.8f64.ln()];
        for (a, b) in w.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(t.edges()[0].input, 1);
        assert_eq!(t.edges()[2].input, 2);
    }

    #[test]
    fn saturated_probability_is_clamped() {
        let t = observation_transducer(&person(&[1.0]), "person", &EpsilonPolicy::default()).unwrap();
        assert!((t.edges()[0].weight.value() - (1.0f64 - 1e-6).ln()).abs() < 1e-12);
        assert!((t.edges()[1].weight.value() - 1e-6f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn unknown_attribute() {
        assert_eq!(
            observation_transducer(&person(&[0.5]), "car", &EpsilonPolicy::default()),
            Err(Error::UnknownAttribute("car".into()))
        );
    }

    #[test]
    fn trace_validation() {
        assert!(matches!(
            ObservationTrace::new(vec!["a".into()], vec![(1, vec![1.3])]),
            Err(Error::OutOfRangeProbability { .. })
        ));
        assert_eq!(
            ObservationTrace::new(vec!["a".into()], vec![(2, vec![0.1]), (1, vec![0.1])]),
            Err(Error::NonMonotonicFrames { frame: 1 })
        );
        assert_eq!(ObservationTrace::new(vec!["a".into()], vec![]), Err(Error::EmptyTrace));
        assert!(EpsilonPolicy::new(0.5).is_err());
        assert!(EpsilonPolicy::new(0.0).is_err());
    }

    #[test]
    fn downsampling() {
        let tr = person(&[0.1; 10]);
        assert_eq!(tr.downsample(1).unwrap(), tr);
        assert_eq!(tr.downsample(5).unwrap().frame_indices(), &[1, 6]);
        assert_eq!(tr.downsample(11).unwrap().frame_count(), 1);
        assert_eq!(tr.downsample(3).unwrap().frame_count(), downsampled_len(10, 3));
        assert_eq!(tr.downsample(0), Err(Error::InvalidStride));
    }
}
