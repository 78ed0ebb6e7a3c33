//! Empirical problems as truth-labelled automata.
//!
//! A problem fixes an observation alphabet, a set of competing hypotheses and
//! a finite automaton over the alphabet. Each infinite stream of observations
//! (a possible world) drives the automaton into some strongly connected
//! component that it never leaves; the label of that component is the
//! hypothesis true in the world. Worlds excluded by the background assumption
//! simply have no run that ends in a component carrying their label.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{self, Sccs};

pub type StateId = usize;

/// An observation, as an index into the problem's alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Symbol(pub usize);

/// A competing hypothesis, as an index into the problem's hypothesis list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HypothesisId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabet {
    symbols: Vec<String>,
}

impl Alphabet {
    /// Builds an alphabet; rejects empty or repeated symbol lists.
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = S>) -> Result<Self> {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(Error::Invalid("alphabet is empty".into()));
        }
        let mut seen = HashSet::new();
        for s in &symbols {
            if !seen.insert(s.as_str()) {
                return Err(Error::Invalid(format!("duplicate symbol `{s}`")));
            }
        }
        Ok(Self { symbols })
    }

    pub(crate) fn new_unchecked(symbols: Vec<String>) -> Self {
        Self { symbols }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbol(&self, name: &str) -> Option<Symbol> {
        self.symbols.iter().position(|s| s == name).map(Symbol)
    }

    pub fn name(&self, symbol: Symbol) -> &str {
        &self.symbols[symbol.0]
    }

    pub fn names(&self) -> &[String] {
        &self.symbols
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> {
        (0..self.symbols.len()).map(Symbol)
    }

    /// Resolves a sequence of symbol names into evidence.
    pub fn evidence<S: AsRef<str>>(&self, names: &[S]) -> Result<Evidence> {
        names
            .iter()
            .map(|n| {
                self.symbol(n.as_ref())
                    .ok_or_else(|| Error::UnknownSymbol(n.as_ref().to_string()))
            })
            .collect::<Result<Vec<_>>>()
            .map(Evidence)
    }

    pub fn check(&self, evidence: &[Symbol]) -> Result<()> {
        match evidence.iter().find(|s| s.0 >= self.len()) {
            Some(s) => Err(Error::SymbolOutOfRange {
                index: s.0,
                size: self.len(),
            }),
            None => Ok(()),
        }
    }

    pub fn render(&self, evidence: &[Symbol]) -> Vec<String> {
        evidence.iter().map(|&s| self.name(s).to_string()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub label: String,
    pub display: String,
}

impl Hypothesis {
    pub fn new(label: impl Into<String>, display: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            display: display.into(),
        }
    }

    /// A hypothesis whose display name is its label.
    pub fn bare(label: impl Into<String>) -> Self {
        let label = label.into();
        Self {
            display: label.clone(),
            label,
        }
    }
}

/// A finite body of evidence; the empty sequence is the root of inquiry.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Evidence(pub Vec<Symbol>);

impl Evidence {
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn extended(&self, symbol: Symbol) -> Self {
        let mut items = self.0.clone();
        items.push(symbol);
        Self(items)
    }
}

impl Deref for Evidence {
    type Target = [Symbol];
    fn deref(&self) -> &[Symbol] {
        &self.0
    }
}

impl From<Vec<Symbol>> for Evidence {
    fn from(v: Vec<Symbol>) -> Self {
        Self(v)
    }
}

/// An ultimately periodic world: `prefix · cycle · cycle · …`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct World {
    prefix: Evidence,
    cycle: Evidence,
}

impl World {
    pub fn new(prefix: impl Into<Evidence>, cycle: impl Into<Evidence>) -> Result<Self> {
        let cycle = cycle.into();
        if cycle.is_empty() {
            return Err(Error::EmptyCycle);
        }
        Ok(Self {
            prefix: prefix.into(),
            cycle,
        })
    }

    /// The world repeating `cycle` from the root.
    pub fn constant(cycle: impl Into<Evidence>) -> Result<Self> {
        Self::new(Evidence::empty(), cycle)
    }

    pub fn prefix(&self) -> &Evidence {
        &self.prefix
    }

    pub fn cycle(&self) -> &Evidence {
        &self.cycle
    }

    /// The observation made at step `t` (0-based).
    pub fn symbol_at(&self, t: usize) -> Symbol {
        if t < self.prefix.len() {
            self.prefix[t]
        } else {
            self.cycle[(t - self.prefix.len()) % self.cycle.len()]
        }
    }

    /// The evidence available after `n` observations.
    pub fn take(&self, n: usize) -> Evidence {
        Evidence((0..n).map(|t| self.symbol_at(t)).collect())
    }

    /// The same world with one copy of the cycle moved into the prefix.
    pub fn unrolled(&self) -> Self {
        let mut prefix = self.prefix.0.clone();
        prefix.extend_from_slice(&self.cycle);
        Self {
            prefix: Evidence(prefix),
            cycle: self.cycle.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruthAutomaton {
    pub states: Vec<String>,
    pub initial: StateId,
    /// `transitions[state][symbol]`.
    pub transitions: Vec<Vec<StateId>>,
    pub labels: Vec<HypothesisId>,
}

impl TruthAutomaton {
    pub fn step(&self, state: StateId, symbol: Symbol) -> StateId {
        self.transitions[state][symbol.0]
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state_index(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmpiricalProblem {
    pub name: String,
    pub alphabet: Alphabet,
    pub hypotheses: Vec<Hypothesis>,
    pub truth: TruthAutomaton,
}

/// A broken invariant of a problem definition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Violation {
    EmptyAlphabet,
    DuplicateSymbol { symbol: String },
    TooFewHypotheses { count: usize },
    DuplicateHypothesis { label: String },
    NoStates,
    InitialOutOfRange { initial: usize },
    IncompleteTransitions { state: String },
    TargetOutOfRange { state: String, symbol: String },
    UnknownLabel { state: String },
    MixedScc { states: Vec<String>, labels: Vec<String> },
    UnreachableState { state: String },
    WrongProblem { expected: String, found: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyAlphabet => write!(f, "alphabet is empty"),
            Violation::DuplicateSymbol { symbol } => write!(f, "symbol `{symbol}` declared twice"),
            Violation::TooFewHypotheses { count } => {
                write!(f, "at least two hypotheses are required, found {count}")
            }
            Violation::DuplicateHypothesis { label } => {
                write!(f, "hypothesis `{label}` declared twice")
            }
            Violation::NoStates => write!(f, "automaton has no states"),
            Violation::InitialOutOfRange { initial } => {
                write!(f, "initial state {initial} does not exist")
            }
            Violation::IncompleteTransitions { state } => {
                write!(f, "state `{state}` does not have one transition per symbol")
            }
            Violation::TargetOutOfRange { state, symbol } => {
                write!(f, "transition `{state}` --{symbol}--> leads to a missing state")
            }
            Violation::UnknownLabel { state } => {
                write!(f, "state `{state}` is labelled with an undeclared hypothesis")
            }
            Violation::MixedScc { states, labels } => write!(
                f,
                "strongly connected states {{{}}} carry different labels {{{}}}",
                states.join(", "),
                labels.join(", ")
            ),
            Violation::UnreachableState { state } => {
                write!(f, "state `{state}` is unreachable from the initial state")
            }
            Violation::WrongProblem { expected, found } => {
                write!(f, "method targets problem `{expected}`, not `{found}`")
            }
        }
    }
}

impl EmpiricalProblem {
    /// Checks every structural invariant; an empty list means the problem is
    /// well posed. Never panics on malformed input.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let names = self.alphabet.names();
        if names.is_empty() {
            out.push(Violation::EmptyAlphabet);
        }
        let mut seen = HashSet::new();
        for s in names {
            if !seen.insert(s) {
                out.push(Violation::DuplicateSymbol { symbol: s.clone() });
            }
        }
        if self.hypotheses.len() < 2 {
            out.push(Violation::TooFewHypotheses {
                count: self.hypotheses.len(),
            });
        }
        let mut seen = HashSet::new();
        for h in &self.hypotheses {
            if !seen.insert(&h.label) {
                out.push(Violation::DuplicateHypothesis {
                    label: h.label.clone(),
                });
            }
        }

        let t = &self.truth;
        let n = t.states.len();
        if n == 0 {
            out.push(Violation::NoStates);
            return out;
        }
        if t.initial >= n {
            out.push(Violation::InitialOutOfRange { initial: t.initial });
        }
        let mut table_ok = t.transitions.len() == n;
        for (q, name) in t.states.iter().enumerate() {
            match t.transitions.get(q) {
                Some(row) if row.len() == names.len() => {
                    for (sym, &target) in row.iter().enumerate() {
                        if target >= n {
                            table_ok = false;
                            out.push(Violation::TargetOutOfRange {
                                state: name.clone(),
                                symbol: names[sym].clone(),
                            });
                        }
                    }
                }
                _ => {
                    table_ok = false;
                    out.push(Violation::IncompleteTransitions {
                        state: name.clone(),
                    });
                }
            }
            match t.labels.get(q) {
                Some(h) if h.0 < self.hypotheses.len() => {}
                _ => out.push(Violation::UnknownLabel {
                    state: name.clone(),
                }),
            }
        }
        if !table_ok || t.initial >= n || t.labels.len() != n {
            return out;
        }

        let sccs = graph::tarjan(&t.transitions);
        for comp in &sccs.members {
            let labels: BTreeSet<HypothesisId> = comp.iter().map(|&q| t.labels[q]).collect();
            if labels.len() > 1 {
                out.push(Violation::MixedScc {
                    states: comp.iter().map(|&q| t.states[q].clone()).collect(),
                    labels: labels
                        .iter()
                        .map(|h| self.hypotheses[h.0].label.clone())
                        .collect(),
                });
            }
        }
        let reach = graph::reachable(&t.transitions, [t.initial]);
        for (q, ok) in reach.iter().enumerate() {
            if !ok {
                out.push(Violation::UnreachableState {
                    state: t.states[q].clone(),
                });
            }
        }
        out
    }

    /// Returns the problem if it is well posed, or the list of violations.
    pub fn validated(self) -> std::result::Result<Self, Vec<Violation>> {
        let v = self.validate();
        if v.is_empty() {
            Ok(self)
        } else {
            Err(v)
        }
    }

    pub fn hypothesis(&self, id: HypothesisId) -> &Hypothesis {
        &self.hypotheses[id.0]
    }

    pub fn hypothesis_id(&self, label: &str) -> Option<HypothesisId> {
        self.hypotheses
            .iter()
            .position(|h| h.label == label)
            .map(HypothesisId)
    }

    /// The automaton state reached after reading `evidence` from the root.
    pub fn run_state(&self, evidence: &[Symbol]) -> Result<StateId> {
        self.alphabet.check(evidence)?;
        Ok(evidence
            .iter()
            .fold(self.truth.initial, |q, &s| self.truth.step(q, s)))
    }

    /// The hypothesis true in `world`.
    ///
    /// After the prefix, the run is sampled at cycle boundaries. Those states
    /// form a deterministic sequence over at most `|states|` values, so a
    /// repeat appears within `|states|` iterations; from then on the run loops
    /// through a fixed set of states that all lie in one strongly connected
    /// component, whose (uniform) label is the truth.
    pub fn truth_of_world(&self, world: &World) -> Result<HypothesisId> {
        self.alphabet.check(world.prefix())?;
        self.alphabet.check(world.cycle())?;
        let mut q = self.run_state(world.prefix())?;
        let mut boundary = vec![usize::MAX; self.truth.len()];
        let mut k = 0;
        while boundary[q] == usize::MAX {
            boundary[q] = k;
            k += 1;
            q = world.cycle().iter().fold(q, |q, &s| self.truth.step(q, s));
        }
        Ok(self.truth.labels[q])
    }

    /// Hypotheses that are still possibly true after `evidence`: the labels of
    /// cyclic components reachable from the current state.
    pub fn possible_truths(&self, evidence: &[Symbol]) -> Result<BTreeSet<HypothesisId>> {
        let q = self.run_state(evidence)?;
        Ok(self.analysis().possible[q].clone())
    }

    /// Strongly connected structure of the truth automaton. Assumes a valid
    /// problem.
    pub fn analysis(&self) -> TruthAnalysis {
        TruthAnalysis::new(self)
    }

    /// Resolves symbol names against this problem's alphabet.
    pub fn evidence<S: AsRef<str>>(&self, names: &[S]) -> Result<Evidence> {
        self.alphabet.evidence(names)
    }

    pub fn world<S: AsRef<str>>(&self, prefix: &[S], cycle: &[S]) -> Result<World> {
        World::new(self.evidence(prefix)?, self.evidence(cycle)?)
    }
}

/// Per-state facts derived from the component structure of a truth automaton.
#[derive(Debug, Clone)]
pub struct TruthAnalysis {
    pub sccs: Sccs,
    /// Labels of the cyclic components reachable from each state.
    pub possible: Vec<BTreeSet<HypothesisId>>,
    /// `Some(h)` when every cyclic component reachable from the state is
    /// labelled `h`: the truth is already determined there.
    pub settled: Vec<Option<HypothesisId>>,
}

impl TruthAnalysis {
    fn new(p: &EmpiricalProblem) -> Self {
        let t = &p.truth;
        let sccs = graph::tarjan(&t.transitions);
        // Components come out successors-first, so one ascending pass suffices.
        let mut by_comp: Vec<BTreeSet<HypothesisId>> = vec![BTreeSet::new(); sccs.len()];
        for c in 0..sccs.len() {
            let mut set = BTreeSet::new();
            if sccs.cyclic[c] {
                set.insert(t.labels[sccs.members[c][0]]);
            }
            for &q in &sccs.members[c] {
                for &r in &t.transitions[q] {
                    let d = sccs.component[r];
                    if d != c {
                        set.extend(by_comp[d].iter().copied());
                    }
                }
            }
            by_comp[c] = set;
        }
        let possible: Vec<_> = (0..t.len())
            .map(|q| by_comp[sccs.component[q]].clone())
            .collect();
        let settled = possible
            .iter()
            .map(|set| {
                if set.len() == 1 {
                    set.iter().next().copied()
                } else {
                    None
                }
            })
            .collect();
        Self {
            sccs,
            possible,
            settled,
        }
    }

    pub fn is_cyclic(&self, state: StateId) -> bool {
        self.sccs.is_cyclic_node(state)
    }
}

/// Builds a problem from state names, labels and a transition table given by
/// names. Used by the built-in problems and tests.
pub fn build_problem(
    name: &str,
    alphabet: &[&str],
    hypotheses: Vec<Hypothesis>,
    states: &[(&str, &str)],
    initial: &str,
    edges: &[(&str, &str, &str)],
) -> Result<EmpiricalProblem> {
    let alphabet = Alphabet::new(alphabet.iter().copied())?;
    let state_names: Vec<String> = states.iter().map(|(s, _)| s.to_string()).collect();
    let index = |s: &str| {
        state_names
            .iter()
            .position(|n| n == s)
            .ok_or_else(|| Error::Invalid(format!("unknown state `{s}`")))
    };
    let labels = states
        .iter()
        .map(|(_, l)| {
            hypotheses
                .iter()
                .position(|h| h.label == *l)
                .map(HypothesisId)
                .ok_or_else(|| Error::Invalid(format!("unknown hypothesis `{l}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = vec![vec![usize::MAX; alphabet.len()]; states.len()];
    for &(from, sym, to) in edges {
        let q = index(from)?;
        let r = index(to)?;
        if sym == "*" {
            for slot in table[q].iter_mut().filter(|s| **s == usize::MAX) {
                *slot = r;
            }
        } else {
            let s = alphabet
                .symbol(sym)
                .ok_or_else(|| Error::UnknownSymbol(sym.to_string()))?;
            table[q][s.0] = r;
        }
    }
    if table.iter().flatten().any(|&t| t == usize::MAX) {
        return Err(Error::Invalid("transition table is not total".into()));
    }
    let initial = index(initial)?;
    Ok(EmpiricalProblem {
        name: name.to_string(),
        alphabet,
        hypotheses,
        truth: TruthAutomaton {
            states: state_names,
            initial,
            transitions: table,
            labels,
        },
    })
}

pub const BLACK: Symbol = Symbol(0);
pub const NONBLACK: Symbol = Symbol(1);
pub const YES: HypothesisId = HypothesisId(0);
pub const NO: HypothesisId = HypothesisId(1);

/// The raven problem: `yes` (all ravens are black) against `no`, observing
/// raven colours one at a time, under the assumption that a nonblack raven
/// would eventually turn up if one exists.
pub fn raven_problem() -> EmpiricalProblem {
    build_problem(
        "raven",
        &["black", "nonblack"],
        vec![
            Hypothesis::new("yes", "All ravens are black"),
            Hypothesis::new("no", "Not all ravens are black"),
        ],
        &[("q0", "yes"), ("q1", "no")],
        "q0",
        &[("q0", "black", "q0"), ("q0", "nonblack", "q1"), ("q1", "*", "q1")],
    )
    .expect("raven problem is well formed")
}

/// A problem whose truth is fixed by the first observation: `yes` after a
/// first black raven, `no` after a first nonblack one.
pub fn first_observation_problem() -> EmpiricalProblem {
    build_problem(
        "first_observation",
        &["black", "nonblack"],
        vec![Hypothesis::bare("yes"), Hypothesis::bare("no")],
        &[("r", "yes"), ("a", "yes"), ("b", "no")],
        "r",
        &[
            ("r", "black", "a"),
            ("r", "nonblack", "b"),
            ("a", "*", "a"),
            ("b", "*", "b"),
        ],
    )
    .expect("first-observation problem is well formed")
}

/// Problems available by name without a declaration.
pub fn builtin_problem(name: &str) -> Option<EmpiricalProblem> {
    match name {
        "raven" => Some(raven_problem()),
        "first_observation" => Some(first_observation_problem()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(hs: &[HypothesisId]) -> BTreeSet<HypothesisId> {
        hs.iter().copied().collect()
    }

    #[test]
    fn raven_is_valid() {
        let p = raven_problem();
        assert_eq!(p.validate(), vec![]);
        assert_eq!(p.truth.len(), 2);
        assert_eq!(p.truth.transitions[1], vec![1, 1]);
    }

    #[test]
    fn mixed_scc_is_reported() {
        let p = build_problem(
            "mixed",
            &["a"],
            vec![Hypothesis::bare("yes"), Hypothesis::bare("no")],
            &[("s", "yes"), ("t", "no")],
            "s",
            &[("s", "a", "t"), ("t", "a", "s")],
        )
        .unwrap();
        let v = p.validate();
        assert_eq!(v.len(), 1);
        assert!(matches!(&v[0], Violation::MixedScc { states, .. } if states.len() == 2));
    }

    #[test]
    fn unreachable_state_is_reported() {
        let p = build_problem(
            "orphan",
            &["a"],
            vec![Hypothesis::bare("yes"), Hypothesis::bare("no")],
            &[("s", "yes"), ("t", "no")],
            "s",
            &[("s", "a", "s"), ("t", "a", "t")],
        )
        .unwrap();
        assert_eq!(
            p.validate(),
            vec![Violation::UnreachableState { state: "t".into() }]
        );
    }

    #[test]
    fn malformed_tables_do_not_panic() {
        let mut p = raven_problem();
        p.truth.transitions[0].pop();
        p.truth.transitions[1][0] = 7;
        p.truth.labels[1] = HypothesisId(9);
        let v = p.validate();
        assert!(v.contains(&Violation::IncompleteTransitions { state: "q0".into() }));
        assert!(v.contains(&Violation::TargetOutOfRange {
            state: "q1".into(),
            symbol: "black".into()
        }));
        assert!(v.contains(&Violation::UnknownLabel { state: "q1".into() }));
    }

    #[test]
    fn run_state_examples() {
        let p = raven_problem();
        assert_eq!(p.run_state(&[BLACK, BLACK]).unwrap(), 0);
        assert_eq!(p.run_state(&[BLACK, NONBLACK]).unwrap(), 1);
        assert_eq!(p.run_state(&[]).unwrap(), 0);
        assert!(matches!(
            p.run_state(&[Symbol(2)]),
            Err(Error::SymbolOutOfRange { index: 2, size: 2 })
        ));
        assert!(p.evidence(&["purple"]).is_err());
    }

    #[test]
    fn truth_of_world_examples() {
        let p = raven_problem();
        let all_black = p.world::<&str>(&[], &["black"]).unwrap();
        assert_eq!(p.truth_of_world(&all_black).unwrap(), YES);
        let late = p
            .world(&["black", "black", "nonblack"], &["black"])
            .unwrap();
        assert_eq!(p.truth_of_world(&late).unwrap(), NO);
        let refuted = p.world(&["nonblack"], &["nonblack"]).unwrap();
        assert_eq!(p.truth_of_world(&refuted).unwrap(), NO);
        // a counterexample inside the repeating block
        let periodic = p.world::<&str>(&[], &["black", "nonblack"]).unwrap();
        assert_eq!(p.truth_of_world(&periodic).unwrap(), NO);
    }

    #[test]
    fn possible_truths_examples() {
        let p = raven_problem();
        assert_eq!(p.possible_truths(&[BLACK]).unwrap(), set(&[YES, NO]));
        assert_eq!(p.possible_truths(&[NONBLACK]).unwrap(), set(&[NO]));
        assert_eq!(p.possible_truths(&[]).unwrap(), set(&[YES, NO]));
    }

    #[test]
    fn settled_states() {
        let a = raven_problem().analysis();
        assert_eq!(a.settled, vec![None, Some(NO)]);
        let a = first_observation_problem().analysis();
        assert_eq!(a.settled, vec![None, Some(YES), Some(NO)]);
        assert!(!a.is_cyclic(0));
    }

    #[test]
    fn empty_cycle_rejected() {
        assert_eq!(World::new(vec![BLACK], vec![]), Err(Error::EmptyCycle));
    }

    #[test]
    fn world_indexing() {
        let w = World::new(vec![BLACK], vec![NONBLACK, BLACK]).unwrap();
        assert_eq!(
            w.take(5).0,
            vec![BLACK, NONBLACK, BLACK, NONBLACK, BLACK]
        );
        assert_eq!(w.unrolled().prefix().0, vec![BLACK, NONBLACK, BLACK]);
    }
}
