use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use super::{StateId, Transducer};
use crate::error::{Error, Result};
use crate::semiring::Semiring;

/// An accepting path: edge indices into [`Transducer::edges`] and the product
/// of their weights.
#[derive(Clone, Debug, PartialEq)]
pub struct Path<W> {
    pub edges: Vec<usize>,
    pub weight: W,
}

/// Topological order of the states on accepting paths, or `None` when those
/// states contain a cycle. Dead states are left out.
pub fn topological_order<W: Semiring>(t: &Transducer<W>) -> Result<Option<Vec<StateId>>> {
    t.ensure_well_formed()?;
    let live = t.live_states();
    Ok(live_topological_order(t, &live))
}

fn live_topological_order<W: Semiring>(t: &Transducer<W>, live: &[bool]) -> Option<Vec<StateId>> {
    let n = t.state_count();
    let mut indegree = vec![0usize; n];
    let mut adj = vec![Vec::new(); n];
    for e in t.edges() {
        if live[e.source] && live[e.target] {
            indegree[e.target] += 1;
            adj[e.source].push(e.target);
        }
    }
    let mut queue: VecDeque<StateId> = (0..n).filter(|&s| live[s] && indegree[s] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(s) = queue.pop_front() {
        order.push(s);
        for &d in &adj[s] {
            indegree[d] -= 1;
            if indegree[d] == 0 {
                queue.push_back(d);
            }
        }
    }
    let live_count = live.iter().filter(|l| **l).count();
    (order.len() == live_count).then_some(order)
}

/// Per-state sum (in the semiring) of all path weights from the start state.
/// Requires the live part of the machine to be acyclic.
pub fn shortest_distance<W: Semiring>(t: &Transducer<W>) -> Result<Vec<W>> {
    t.ensure_well_formed()?;
    let live = t.live_states();
    let order = live_topological_order(t, &live).ok_or(Error::CyclicMachine)?;
    let adj = t.adjacency();
    let mut dist = vec![W::zero(); t.state_count()];
    if live[t.start()] {
        dist[t.start()] = W::one();
    }
    for s in order {
        if dist[s].is_zero() {
            continue;
        }
        for &i in &adj[s] {
            let e = &t.edges()[i];
            if live[e.target] {
                dist[e.target] = dist[e.target].plus(dist[s].times(e.weight));
            }
        }
    }
    Ok(dist)
}

/// Semiring sum over all accepting paths (the forward score in the log
/// semiring). Semiring zero when no path is accepted.
pub fn total_weight<W: Semiring>(t: &Transducer<W>) -> Result<W> {
    let dist = shortest_distance(t)?;
    Ok(t.finals().iter().fold(W::zero(), |acc, &f| acc.plus(dist[f])))
}

/// The accepting path of maximal weight (Viterbi).
///
/// Acyclic machines are solved in topological order. Cyclic ones fall back to
/// Bellman-Ford and fail with [`Error::DivergentWeights`] if some cycle has
/// weight above one. With no accepting path the result is an empty path of
/// weight zero.
pub fn best_path<W: Semiring + PartialOrd>(t: &Transducer<W>) -> Result<Path<W>> {
    t.ensure_well_formed()?;
    let live = t.live_states();
    let n = t.state_count();
    let mut dist = vec![W::zero(); n];
    let mut back: Vec<Option<usize>> = vec![None; n];
    if !live[t.start()] {
        return Ok(Path { edges: Vec::new(), weight: W::zero() });
    }
    dist[t.start()] = W::one();

    match live_topological_order(t, &live) {
        Some(order) => {
            let adj = t.adjacency();
            for s in order {
                if dist[s].is_zero() {
                    continue;
                }
                for &i in &adj[s] {
                    let e = &t.edges()[i];
                    if !live[e.target] {
                        continue;
                    }
                    let cand = dist[s].times(e.weight);
                    if cand > dist[e.target] {
                        dist[e.target] = cand;
                        back[e.target] = Some(i);
                    }
                }
            }
        }
        None => {
            let live_count = live.iter().filter(|l| **l).count();
            let mut round = 0;
            loop {
                let mut changed = false;
                for (i, e) in t.edges().iter().enumerate() {
                    if !live[e.source] || !live[e.target] || dist[e.source].is_zero() {
                        continue;
                    }
                    let cand = dist[e.source].times(e.weight);
                    if cand > dist[e.target] {
                        dist[e.target] = cand;
                        back[e.target] = Some(i);
                        changed = true;
                    }
                }
                if !changed {
                    break;
                }
                round += 1;
                if round >= live_count {
                    return Err(Error::DivergentWeights);
                }
            }
        }
    }

    let mut best: Option<StateId> = None;
    for &f in t.finals() {
        if dist[f].is_zero() {
            continue;
        }
        if best.is_none_or(|b| dist[f] > dist[b]) {
            best = Some(f);
        }
    }
    let Some(end) = best else {
        return Ok(Path { edges: Vec::new(), weight: W::zero() });
    };
    let mut edges = Vec::new();
    let mut s = end;
    while let Some(i) = back[s] {
        edges.push(i);
        s = t.edges()[i].source;
        if edges.len() > t.edges().len() {
            return Err(Error::InvariantViolation("best-path backpointers loop".into()));
        }
    }
    edges.reverse();
    Ok(Path { edges, weight: dist[end] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fst::TransducerBuilder;
    use crate::semiring::LogWeight;

    fn parallel(a: f64, b: f64) -> Transducer {
        let mut bld = TransducerBuilder::new();
        let s0 = bld.add_state();
        let s1 = bld.add_state();
        bld.set_start(s0).set_final(s1);
        bld.add_arc(s0, 1, LogWeight::from_prob(a), s1);
        bld.add_arc(s0, 2, LogWeight::from_prob(b), s1);
        bld.build()
    }

    #[test]
    fn best_of_two_arms() {
        let p = best_path(&parallel(0.3, 0.7)).unwrap();
        assert_eq!(p.edges, vec![1]);
        assert!((p.weight.value() - 0.7f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn total_of_two_arms() {
        let w = total_weight(&parallel(0.3, 0.7)).unwrap();
        assert!(w.value().abs() < 1e-15);
    }

    #[test]
    fn start_final_gives_empty_path_of_weight_one() {
        let t: Transducer = Transducer::from_parts(1, 0, [0], Vec::new());
        let p = best_path(&t).unwrap();
        assert!(p.edges.is_empty());
        assert_eq!(p.weight, LogWeight::ONE);
        assert_eq!(total_weight(&t).unwrap(), LogWeight::ONE);
    }

    #[test]
    fn no_accepting_path() {
        let t: Transducer = Transducer::empty();
        let p = best_path(&t).unwrap();
        assert_eq!(p.weight, LogWeight::ZERO);
        assert!(p.edges.is_empty());
    }

    #[test]
    fn non_positive_cycles_are_fine_for_best_path() {
        let mut b = TransducerBuilder::new();
        let s0 = b.add_state();
        let s1 = b.add_state();
        b.set_start(s0).set_final(s1);
        b.add_arc(s0, 1, LogWeight::from_prob(0.5), s1);
        b.add_arc(s1, 1, LogWeight::ONE, s1);
        let t = b.build();
        let p = best_path(&t).unwrap();
        assert_eq!(p.edges, vec![0]);
        assert_eq!(total_weight(&t), Err(Error::CyclicMachine));
    }

    #[test]
    fn positive_cycle_diverges() {
        let mut b = TransducerBuilder::new();
        let s0 = b.add_state();
        let s1 = b.add_state();
        b.set_start(s0).set_final(s1);
        b.add_arc(s0, 1, LogWeight::from_prob(0.5), s1);
        b.add_arc(s1, 1, LogWeight::new(0.1), s1);
        assert_eq!(best_path(&b.build()), Err(Error::DivergentWeights));
    }

    #[test]
    fn dead_cycle_does_not_block_total_weight() {
        let mut b = TransducerBuilder::new();
        let s: Vec<_> = (0..3).map(|_| b.add_state()).collect();
        b.set_start(s[0]).set_final(s[1]);
        b.add_arc(s[0], 1, LogWeight::from_prob(0.25), s[1]);
        b.add_arc(s[0], 2, LogWeight::ONE, s[2]);
        b.add_arc(s[2], 2, LogWeight::ONE, s[2]);
        let w = total_weight(&b.build()).unwrap();
        assert!((w.value() - 0.25f64.ln()).abs() < 1e-15);
    }
}
