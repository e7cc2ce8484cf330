//! Weighted finite-state transducers over dense integer alphabets.
//!
//! Symbol `0` is [`EPSILON`]. An acceptor is a transducer whose every edge has
//! equal input and output symbols. Machines are immutable once built; use
//! [`TransducerBuilder`] or [`Transducer::from_parts`] to make one.

mod compose;
mod paths;
mod text;

use alloc::collections::VecDeque;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::semiring::{LogWeight, Semiring};

pub use compose::compose;
pub use paths::{best_path, shortest_distance, topological_order, total_weight, Path};
pub use text::{from_text, to_text, TextError};

pub type Symbol = u32;
pub type StateId = usize;

pub const EPSILON: Symbol = 0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge<W = LogWeight> {
    pub source: StateId,
    pub input: Symbol,
    pub output: Symbol,
    pub weight: W,
    pub target: StateId,
}

/// Reversible mapping between symbol ids and names. Id 0 is always epsilon.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolTable {
    names: Vec<String>,
}

impl Default for SymbolTable {
    fn default() -> Self {
        Self::new()
    }
}

impl SymbolTable {
    pub const EPSILON_NAME: &'static str = "<eps>";

    pub fn new() -> Self {
        Self { names: vec![Self::EPSILON_NAME.to_string()] }
    }

    /// Returns the id of `name`, adding it if absent.
    pub fn intern(&mut self, name: &str) -> Symbol {
        if let Some(id) = self.find(name) {
            return id;
        }
        self.names.push(name.to_string());
        (self.names.len() - 1) as Symbol
    }

    pub fn find(&self, name: &str) -> Option<Symbol> {
        self.names.iter().position(|n| n == name).map(|i| i as Symbol)
    }

    pub fn name(&self, id: Symbol) -> Option<&str> {
        self.names.get(id as usize).map(String::as_str)
    }

    /// Number of symbols including epsilon.
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.len() <= 1
    }

    pub fn iter(&self) -> impl Iterator<Item = (Symbol, &str)> {
        self.names.iter().enumerate().map(|(i, n)| (i as Symbol, n.as_str()))
    }

    /// True when every symbol of `self` has the same id in `other`.
    pub fn is_subset_of(&self, other: &SymbolTable) -> bool {
        self.iter().all(|(id, name)| other.name(id) == Some(name))
    }
}

/// Structural problems reported by [`Transducer::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Defect {
    DanglingState { edge: usize, state: StateId },
    InvalidStart(StateId),
    InvalidFinal(StateId),
    UnreachableState(StateId),
    NoFinalState,
}

impl fmt::Display for Defect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Defect::DanglingState { edge, state } => {
                write!(f, "edge {edge} references state {state}, which does not exist")
            }
            Defect::InvalidStart(s) => write!(f, "start state {s} does not exist"),
            Defect::InvalidFinal(s) => write!(f, "final state {s} does not exist"),
            Defect::UnreachableState(s) => write!(f, "state {s} is unreachable from the start"),
            Defect::NoFinalState => f.write_str("machine has no final state"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Transducer<W = LogWeight> {
    state_count: usize,
    start: StateId,
    finals: Vec<StateId>,
    edges: Vec<Edge<W>>,
    input_symbols: Option<Arc<SymbolTable>>,
    output_symbols: Option<Arc<SymbolTable>>,
}

impl<W: Semiring> Transducer<W> {
    /// Builds a machine without checking state ids; see [`Self::validate`].
    pub fn from_parts(
        state_count: usize,
        start: StateId,
        finals: impl IntoIterator<Item = StateId>,
        edges: Vec<Edge<W>>,
    ) -> Self {
        let mut finals: Vec<StateId> = finals.into_iter().collect();
        finals.sort_unstable();
        finals.dedup();
        Self { state_count, start, finals, edges, input_symbols: None, output_symbols: None }
    }

    /// A single-state machine with no final state and no edges.
    pub fn empty() -> Self {
        Self::from_parts(1, 0, [], Vec::new())
    }

    pub fn with_symbols(
        mut self,
        input: Option<Arc<SymbolTable>>,
        output: Option<Arc<SymbolTable>>,
    ) -> Self {
        self.input_symbols = input;
        self.output_symbols = output;
        self
    }

    pub fn state_count(&self) -> usize {
        self.state_count
    }

    pub fn start(&self) -> StateId {
        self.start
    }

    pub fn finals(&self) -> &[StateId] {
        &self.finals
    }

    pub fn is_final(&self, state: StateId) -> bool {
        self.finals.binary_search(&state).is_ok()
    }

    pub fn edges(&self) -> &[Edge<W>] {
        &self.edges
    }

    pub fn input_symbols(&self) -> Option<&Arc<SymbolTable>> {
        self.input_symbols.as_ref()
    }

    pub fn output_symbols(&self) -> Option<&Arc<SymbolTable>> {
        self.output_symbols.as_ref()
    }

    pub fn is_acceptor(&self) -> bool {
        self.edges.iter().all(|e| e.input == e.output)
    }

    /// Swaps input and output labels on every edge.
    pub fn inverted(&self) -> Self {
        let edges = self
            .edges
            .iter()
            .map(|e| Edge { input: e.output, output: e.input, ..*e })
            .collect();
        Self {
            state_count: self.state_count,
            start: self.start,
            finals: self.finals.clone(),
            edges,
            input_symbols: self.output_symbols.clone(),
            output_symbols: self.input_symbols.clone(),
        }
    }

    pub fn map_weights<V: Semiring>(&self, f: impl Fn(W) -> V) -> Transducer<V> {
        Transducer {
            state_count: self.state_count,
            start: self.start,
            finals: self.finals.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| Edge {
                    source: e.source,
                    input: e.input,
                    output: e.output,
                    weight: f(e.weight),
                    target: e.target,
                })
                .collect(),
            input_symbols: self.input_symbols.clone(),
            output_symbols: self.output_symbols.clone(),
        }
    }

    /// Lists structural defects. An empty list means the machine is well formed.
    pub fn validate(&self) -> Vec<Defect> {
        let mut defects = Vec::new();
        if self.start >= self.state_count {
            defects.push(Defect::InvalidStart(self.start));
        }
        for &f in &self.finals {
            if f >= self.state_count {
                defects.push(Defect::InvalidFinal(f));
            }
        }
        for (i, e) in self.edges.iter().enumerate() {
            if e.source >= self.state_count {
                defects.push(Defect::DanglingState { edge: i, state: e.source });
            }
            if e.target >= self.state_count {
                defects.push(Defect::DanglingState { edge: i, state: e.target });
            }
        }
        if self.finals.is_empty() {
            defects.push(Defect::NoFinalState);
        }
        if self.start < self.state_count {
            let reachable = self.accessible();
            defects.extend(
                reachable
                    .iter()
                    .enumerate()
                    .filter(|(_, r)| !**r)
                    .map(|(s, _)| Defect::UnreachableState(s)),
            );
        }
        defects
    }

    /// Fails on the defects that make algorithms unsound (bad state ids).
    pub(crate) fn ensure_well_formed(&self) -> Result<()> {
        let fatal = self.validate().into_iter().find(|d| {
            matches!(
                d,
                Defect::DanglingState { .. } | Defect::InvalidStart(_) | Defect::InvalidFinal(_)
            )
        });
        match fatal {
            Some(d) => Err(Error::Malformed(d)),
            None => Ok(()),
        }
    }

    /// Outgoing edge indices per state. Assumes a well-formed machine.
    pub(crate) fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.state_count];
        for (i, e) in self.edges.iter().enumerate() {
            adj[e.source].push(i);
        }
        adj
    }

    fn accessible(&self) -> Vec<bool> {
        let mut seen = vec![false; self.state_count];
        let mut adj = vec![Vec::new(); self.state_count];
        for e in &self.edges {
            if e.source < self.state_count && e.target < self.state_count {
                adj[e.source].push(e.target);
            }
        }
        let mut queue = VecDeque::new();
        seen[self.start] = true;
        queue.push_back(self.start);
        while let Some(s) = queue.pop_front() {
            for &n in &adj[s] {
                if !seen[n] {
                    seen[n] = true;
                    queue.push_back(n);
                }
            }
        }
        seen
    }

    fn coaccessible(&self) -> Vec<bool> {
        let mut seen = vec![false; self.state_count];
        let mut radj = vec![Vec::new(); self.state_count];
        for e in &self.edges {
            radj[e.target].push(e.source);
        }
        let mut queue: VecDeque<StateId> = self.finals.iter().copied().collect();
        for &f in &self.finals {
            seen[f] = true;
        }
        while let Some(s) = queue.pop_front() {
            for &p in &radj[s] {
                if !seen[p] {
                    seen[p] = true;
                    queue.push_back(p);
                }
            }
        }
        seen
    }

    /// States lying on at least one accepting path. Assumes a well-formed machine.
    pub(crate) fn live_states(&self) -> Vec<bool> {
        let acc = self.accessible();
        let coacc = self.coaccessible();
        acc.iter().zip(&coacc).map(|(a, c)| *a && *c).collect()
    }

    /// Removes states that are unreachable or cannot reach a final state.
    /// A machine with no accepting path collapses to [`Self::empty`].
    pub fn trim(&self) -> Result<Self> {
        self.ensure_well_formed()?;
        let live = self.live_states();
        if !live[self.start] {
            return Ok(Self::empty().with_symbols(
                self.input_symbols.clone(),
                self.output_symbols.clone(),
            ));
        }
        let mut remap = vec![usize::MAX; self.state_count];
        let mut next = 0;
        for (s, &l) in live.iter().enumerate() {
            if l {
                remap[s] = next;
                next += 1;
            }
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| live[e.source] && live[e.target])
            .map(|e| Edge { source: remap[e.source], target: remap[e.target], ..*e })
            .collect();
        let finals: Vec<StateId> =
            self.finals.iter().filter(|&&f| live[f]).map(|&f| remap[f]).collect();
        Ok(Self::from_parts(next, remap[self.start], finals, edges)
            .with_symbols(self.input_symbols.clone(), self.output_symbols.clone()))
    }

    /// Whether the input sequence `symbols` (no epsilons) reaches a final
    /// state, following epsilon-input edges freely.
    pub fn accepts_input(&self, symbols: &[Symbol]) -> Result<bool> {
        self.ensure_well_formed()?;
        let adj = self.adjacency();
        let closure = |set: &mut Vec<bool>| {
            let mut stack: Vec<StateId> =
                set.iter().enumerate().filter(|(_, b)| **b).map(|(s, _)| s).collect();
            while let Some(s) = stack.pop() {
                for &i in &adj[s] {
                    let e = &self.edges[i];
                    if e.input == EPSILON && !e.weight.is_zero() && !set[e.target] {
                        set[e.target] = true;
                        stack.push(e.target);
                    }
                }
            }
        };
        let mut current = vec![false; self.state_count];
        current[self.start] = true;
        closure(&mut current);
        for &sym in symbols {
            let mut next = vec![false; self.state_count];
            for (s, _) in current.iter().enumerate().filter(|(_, b)| **b) {
                for &i in &adj[s] {
                    let e = &self.edges[i];
                    if e.input == sym && !e.weight.is_zero() {
                        next[e.target] = true;
                    }
                }
            }
            closure(&mut next);
            current = next;
        }
        Ok(self.finals.iter().any(|&f| current[f]))
    }
}

/// Incremental construction of a [`Transducer`].
#[derive(Debug)]
pub struct TransducerBuilder<W = LogWeight> {
    state_count: usize,
    start: StateId,
    finals: Vec<StateId>,
    edges: Vec<Edge<W>>,
}

impl<W: Semiring> Default for TransducerBuilder<W> {
    fn default() -> Self {
        Self::new()
    }
}

impl<W: Semiring> TransducerBuilder<W> {
    pub fn new() -> Self {
        Self { state_count: 0, start: 0, finals: Vec::new(), edges: Vec::new() }
    }

    pub fn add_state(&mut self) -> StateId {
        self.state_count += 1;
        self.state_count - 1
    }

    pub fn set_start(&mut self, s: StateId) -> &mut Self {
        self.start = s;
        self
    }

    pub fn set_final(&mut self, s: StateId) -> &mut Self {
        self.finals.push(s);
        self
    }

    pub fn add_edge(
        &mut self,
        source: StateId,
        input: Symbol,
        output: Symbol,
        weight: W,
        target: StateId,
    ) -> &mut Self {
        self.edges.push(Edge { source, input, output, weight, target });
        self
    }

    /// Adds an acceptor edge (input == output).
    pub fn add_arc(&mut self, source: StateId, symbol: Symbol, weight: W, target: StateId) -> &mut Self {
        self.add_edge(source, symbol, symbol, weight, target)
    }

    pub fn build(self) -> Transducer<W> {
        Transducer::from_parts(self.state_count, self.start, self.finals, self.edges)
    }
}
