use alloc::collections::{BTreeMap, VecDeque};
use alloc::format;
use alloc::vec::Vec;

use super::{Edge, StateId, Transducer, EPSILON};
use crate::error::{Error, Result};
use crate::semiring::Semiring;

/// Epsilon-sequencing filter state. Prevents the same pair of epsilon moves
/// from being counted along several interleavings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Filter {
    /// Free: no pending epsilon run.
    Any,
    /// The left machine moved alone on an output epsilon.
    LeftOnly,
    /// The right machine moved alone on an input epsilon.
    RightOnly,
}

type Triple = (StateId, StateId, Filter);

/// Composes `left` with `right`: a path reading `x` and writing `y` in `left`
/// pairs with a path reading `y` and writing `z` in `right`, and the result
/// reads `x`, writes `z` and carries the product of both weights.
///
/// Only the accessible, co-accessible part of the product is returned; if no
/// accepting path exists the result is [`Transducer::empty`].
pub fn compose<W: Semiring>(left: &Transducer<W>, right: &Transducer<W>) -> Result<Transducer<W>> {
    left.ensure_well_formed()?;
    right.ensure_well_formed()?;
    if let (Some(out), Some(inp)) = (left.output_symbols(), right.input_symbols()) {
        if !out.is_subset_of(inp) {
            return Err(Error::AlphabetMismatch(format!(
                "left output table ({} symbols) is not contained in right input table ({} symbols)",
                out.len(),
                inp.len()
            )));
        }
    }

    let ladj = left.adjacency();
    let radj = right.adjacency();

    let mut index: BTreeMap<Triple, StateId> = BTreeMap::new();
    let mut queue: VecDeque<Triple> = VecDeque::new();
    let mut edges: Vec<Edge<W>> = Vec::new();
    let mut finals = Vec::new();

    let start = (left.start(), right.start(), Filter::Any);
    index.insert(start, 0);
    queue.push_back(start);

    let intern = |t: Triple, index: &mut BTreeMap<Triple, StateId>, queue: &mut VecDeque<Triple>| {
        let next = index.len();
        *index.entry(t).or_insert_with(|| {
            queue.push_back(t);
            next
        })
    };

    while let Some(triple @ (q1, q2, filter)) = queue.pop_front() {
        let src = index[&triple];
        if left.is_final(q1) && right.is_final(q2) {
            finals.push(src);
        }
        for &i in &ladj[q1] {
            let e1 = &left.edges()[i];
            if e1.output == EPSILON {
                // left advances alone
                if filter != Filter::RightOnly {
                    let dst = intern((e1.target, q2, Filter::LeftOnly), &mut index, &mut queue);
                    edges.push(Edge {
                        source: src,
                        input: e1.input,
                        output: EPSILON,
                        weight: e1.weight,
                        target: dst,
                    });
                }
                // both advance on epsilon
                if filter == Filter::Any {
                    for &j in &radj[q2] {
                        let e2 = &right.edges()[j];
                        if e2.input == EPSILON {
                            let dst = intern((e1.target, e2.target, Filter::Any), &mut index, &mut queue);
                            edges.push(Edge {
                                source: src,
                                input: e1.input,
                                output: e2.output,
                                weight: e1.weight.times(e2.weight),
                                target: dst,
                            });
                        }
                    }
                }
            } else {
                for &j in &radj[q2] {
                    let e2 = &right.edges()[j];
                    if e2.input == e1.output {
                        let dst = intern((e1.target, e2.target, Filter::Any), &mut index, &mut queue);
                        edges.push(Edge {
                            source: src,
                            input: e1.input,
                            output: e2.output,
                            weight: e1.weight.times(e2.weight),
                            target: dst,
                        });
                    }
                }
            }
        }
        // right advances alone
        if filter != Filter::LeftOnly {
            for &j in &radj[q2] {
                let e2 = &right.edges()[j];
                if e2.input == EPSILON {
                    let dst = intern((q1, e2.target, Filter::RightOnly), &mut index, &mut queue);
                    edges.push(Edge {
                        source: src,
                        input: EPSILON,
                        output: e2.output,
                        weight: e2.weight,
                        target: dst,
                    });
                }
            }
        }
    }

    Transducer::from_parts(index.len(), 0, finals, edges)
        .with_symbols(left.input_symbols().cloned(), right.output_symbols().cloned())
        .trim()
}
