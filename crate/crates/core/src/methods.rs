//! Inference methods as finite-state transducers.
//!
//! A method reads evidence one observation at a time and, at every node of
//! inquiry, outputs one of the problem's hypotheses or suspends judgement.
//! The output at evidence `e` is the output of the state reached after `e`;
//! the output at the root is the output of the initial state.

use std::collections::hash_map::Entry;
use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph;
use crate::problem::{EmpiricalProblem, Evidence, HypothesisId, StateId, Symbol, Violation, NO, YES};
use crate::product::ProductGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MethodOutput {
    Hypothesis(HypothesisId),
    Suspend,
}

impl MethodOutput {
    pub fn hypothesis(self) -> Option<HypothesisId> {
        match self {
            MethodOutput::Hypothesis(h) => Some(h),
            MethodOutput::Suspend => None,
        }
    }

    pub fn is(self, h: HypothesisId) -> bool {
        self == MethodOutput::Hypothesis(h)
    }

    /// Label used in reports and the DSL: the hypothesis label, or `?`.
    pub fn render(self, problem: &EmpiricalProblem) -> String {
        match self {
            MethodOutput::Hypothesis(h) => problem.hypothesis(h).label.clone(),
            MethodOutput::Suspend => "?".to_string(),
        }
    }
}

impl fmt::Display for MethodOutput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MethodOutput::Hypothesis(h) => write!(f, "h{}", h.0),
            MethodOutput::Suspend => f.write_str("?"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InferenceMethod {
    pub name: String,
    /// Name of the problem this method answers.
    pub problem: String,
    pub states: Vec<String>,
    pub initial: StateId,
    /// `transitions[state][symbol]`.
    pub transitions: Vec<Vec<StateId>>,
    pub outputs: Vec<MethodOutput>,
}

impl InferenceMethod {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn run_state(&self, evidence: &[Symbol]) -> Result<StateId> {
        let width = self.transitions.first().map_or(0, Vec::len);
        evidence.iter().try_fold(self.initial, |q, &s| {
            self.transitions[q]
                .get(s.0)
                .copied()
                .ok_or(Error::SymbolOutOfRange {
                    index: s.0,
                    size: width,
                })
        })
    }

    /// The method's output at the node reached by `evidence`.
    pub fn apply(&self, evidence: &[Symbol]) -> Result<MethodOutput> {
        Ok(self.outputs[self.run_state(evidence)?])
    }

    /// Outputs at every depth `0..=evidence.len()` along `evidence`.
    pub fn trace(&self, evidence: &[Symbol]) -> Result<Vec<MethodOutput>> {
        let mut q = self.initial;
        let mut out = Vec::with_capacity(evidence.len() + 1);
        out.push(self.outputs[q]);
        for &s in evidence {
            q = *self.transitions[q].get(s.0).ok_or(Error::SymbolOutOfRange {
                index: s.0,
                size: self.transitions[q].len(),
            })?;
            out.push(self.outputs[q]);
        }
        Ok(out)
    }

    /// Checks the method against the problem it targets.
    pub fn validate(&self, problem: &EmpiricalProblem) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.problem != problem.name {
            out.push(Violation::WrongProblem {
                expected: self.problem.clone(),
                found: problem.name.clone(),
            });
        }
        let n = self.states.len();
        if n == 0 {
            out.push(Violation::NoStates);
            return out;
        }
        if self.initial >= n {
            out.push(Violation::InitialOutOfRange {
                initial: self.initial,
            });
        }
        let k = problem.alphabet.len();
        let mut table_ok = self.transitions.len() == n;
        for (q, name) in self.states.iter().enumerate() {
            match self.transitions.get(q) {
                Some(row) if row.len() == k => {
                    for (s, &t) in row.iter().enumerate() {
                        if t >= n {
                            table_ok = false;
                            out.push(Violation::TargetOutOfRange {
                                state: name.clone(),
                                symbol: problem.alphabet.names()[s].clone(),
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
            match self.outputs.get(q) {
                Some(MethodOutput::Suspend) => {}
                Some(MethodOutput::Hypothesis(h)) if h.0 < problem.hypotheses.len() => {}
                _ => out.push(Violation::UnknownLabel {
                    state: name.clone(),
                }),
            }
        }
        if table_ok && self.initial < n {
            let reach = graph::reachable(&self.transitions, [self.initial]);
            for (q, ok) in reach.iter().enumerate() {
                if !ok {
                    out.push(Violation::UnreachableState {
                        state: self.states[q].clone(),
                    });
                }
            }
        }
        out
    }

    /// Drops unreachable states and renumbers the rest in discovery order.
    pub fn trimmed(mut self) -> Self {
        let mut order = vec![self.initial];
        let mut index: HashMap<StateId, StateId> = HashMap::from([(self.initial, 0)]);
        let mut i = 0;
        while i < order.len() {
            for &t in &self.transitions[order[i]] {
                if let Entry::Vacant(e) = index.entry(t) {
                    e.insert(order.len());
                    order.push(t);
                }
            }
            i += 1;
        }
        self.states = order.iter().map(|&q| self.states[q].clone()).collect();
        self.outputs = order.iter().map(|&q| self.outputs[q]).collect();
        self.transitions = order
            .iter()
            .map(|&q| self.transitions[q].iter().map(|t| index[t]).collect())
            .collect();
        self.initial = 0;
        self
    }
}

fn raven_method(name: &str, states: Vec<String>, transitions: Vec<Vec<StateId>>, outputs: Vec<MethodOutput>) -> InferenceMethod {
    InferenceMethod {
        name: name.to_string(),
        problem: "raven".to_string(),
        states,
        initial: 0,
        transitions,
        outputs,
    }
}

/// Conjecture that all ravens are black until a nonblack raven shows up, then
/// conjecture the negation forever.
pub fn ordinary_induction() -> InferenceMethod {
    raven_method(
        "ordinary_induction",
        vec!["s0".into(), "s1".into()],
        vec![vec![0, 1], vec![1, 1]],
        vec![MethodOutput::Hypothesis(YES), MethodOutput::Hypothesis(NO)],
    )
}

/// Ordinary induction, except that on all-black evidence of a length listed in
/// `flip_depths` it outputs `no`.
///
/// States `c0..=c(d+1)` count all-black evidence up to one past the deepest
/// flip `d`; the last state `r` is entered on the first nonblack raven.
pub fn occasional_counterinduction(flip_depths: &BTreeSet<usize>) -> Result<InferenceMethod> {
    let deepest = *flip_depths
        .iter()
        .next_back()
        .ok_or_else(|| Error::Parameter("flip depths must be nonempty".into()))?;
    let counting = deepest + 2;
    let refuted = counting;
    let mut states: Vec<String> = (0..counting).map(|k| format!("c{k}")).collect();
    states.push("r".into());
    let mut transitions: Vec<Vec<StateId>> = (0..counting)
        .map(|k| vec![(k + 1).min(counting - 1), refuted])
        .collect();
    transitions.push(vec![refuted, refuted]);
    let mut outputs: Vec<MethodOutput> = (0..counting)
        .map(|k| {
            MethodOutput::Hypothesis(if flip_depths.contains(&k) { NO } else { YES })
        })
        .collect();
    outputs.push(MethodOutput::Hypothesis(NO));
    let suffix: Vec<String> = flip_depths.iter().map(|d| d.to_string()).collect();
    Ok(raven_method(
        &format!("occasional_counterinduction_{}", suffix.join("_")),
        states,
        transitions,
        outputs,
    ))
}

/// Suspends judgement everywhere.
pub fn skeptic() -> InferenceMethod {
    raven_method(
        "skeptic",
        vec!["s".into()],
        vec![vec![0, 0]],
        vec![MethodOutput::Suspend],
    )
}

/// Suspends on all-black evidence shorter than `k`, then behaves as ordinary
/// induction; outputs `no` after any counterexample.
pub fn delayed_induction(k: usize) -> InferenceMethod {
    let waiting = k;
    let believing = k;
    let refuted = k + 1;
    let mut states: Vec<String> = (0..waiting).map(|i| format!("w{i}")).collect();
    states.push("y".into());
    states.push("r".into());
    let mut transitions: Vec<Vec<StateId>> = (0..waiting).map(|i| vec![i + 1, refuted]).collect();
    transitions.push(vec![believing, refuted]);
    transitions.push(vec![refuted, refuted]);
    let mut outputs = vec![MethodOutput::Suspend; waiting];
    outputs.push(MethodOutput::Hypothesis(YES));
    outputs.push(MethodOutput::Hypothesis(NO));
    raven_method(&format!("delayed_induction_{k}"), states, transitions, outputs)
}

/// Resolves a built-in method name: `ordinary_induction`, `skeptic`,
/// `delayed_induction:K` or `occasional_counterinduction:D1,D2,...`.
pub fn builtin_method(spec: &str) -> Result<Option<InferenceMethod>> {
    let (name, arg) = match spec.split_once(':') {
        Some((n, a)) => (n, Some(a)),
        None => (spec, None),
    };
    let number = |s: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|_| Error::Parameter(format!("`{s}` is not a nonnegative integer")))
    };
    Ok(match (name, arg) {
        ("ordinary_induction", None) => Some(ordinary_induction()),
        ("skeptic", None) => Some(skeptic()),
        ("delayed_induction", Some(a)) => Some(delayed_induction(number(a)?)),
        ("occasional_counterinduction", Some(a)) => {
            let depths = a.split(',').map(number).collect::<Result<BTreeSet<_>>>()?;
            Some(occasional_counterinduction(&depths)?)
        }
        _ => None,
    })
}

/// A product node at which the method counterinduces, with the shortest
/// evidence that reaches it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OffendingNode {
    pub method_state: StateId,
    pub truth_state: StateId,
    pub output: HypothesisId,
    pub shortest: Evidence,
}

/// Exact description of where counterinduction happens at any depth.
///
/// Evidence `e` is counterinductive exactly when the product node it reaches
/// is one of `offending`, so the set of counterinductive nodes is the regular
/// language of paths into those product nodes. In particular it is empty at
/// every depth iff `offending` is empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterinductionCertificate {
    pub product_nodes: usize,
    pub offending: Vec<OffendingNode>,
}

impl CounterinductionCertificate {
    pub fn never_counterinductive(&self) -> bool {
        self.offending.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterinductionScan {
    /// Every counterinductive evidence sequence up to the depth bound, in
    /// length-then-lexicographic order.
    pub nodes: Vec<Evidence>,
    pub certificate: CounterinductionCertificate,
}

/// Finds the evidence at which `method` counterinduces on `problem`.
///
/// The method counterinduces at `e` when the truth state after `e` lies on a
/// cycle of a component labelled `h` (uniform experience so far points to
/// `h`) and the method outputs some other hypothesis that is still possibly
/// true.
pub fn counterinductive_nodes(
    method: &InferenceMethod,
    problem: &EmpiricalProblem,
    depth_bound: usize,
) -> Result<CounterinductionScan> {
    let g = ProductGraph::build(method, problem)?;
    let offending_flags: Vec<bool> = (0..g.len())
        .map(|u| {
            let ts = g.nodes[u].1;
            match g.output[u] {
                MethodOutput::Hypothesis(h) => {
                    g.truth.is_cyclic(ts)
                        && h != problem.truth.labels[ts]
                        && g.truth.possible[ts].contains(&h)
                }
                MethodOutput::Suspend => false,
            }
        })
        .collect();
    let offending = (0..g.len())
        .filter(|&u| offending_flags[u])
        .map(|u| OffendingNode {
            method_state: g.nodes[u].0,
            truth_state: g.nodes[u].1,
            output: g.output[u].hypothesis().expect("offending nodes output a hypothesis"),
            shortest: Evidence(g.path_to(u)),
        })
        .collect();

    // Enumerate only through nodes that can still lead to an offending one.
    let useful = g.can_reach(|u| offending_flags[u]);
    let mut nodes = Vec::new();
    let mut frontier: Vec<(usize, Evidence)> = Vec::new();
    if useful[0] {
        frontier.push((0, Evidence::empty()));
    }
    for depth in 0..=depth_bound {
        let mut next = Vec::new();
        for (u, e) in frontier {
            if offending_flags[u] {
                nodes.push(e.clone());
            }
            if depth < depth_bound {
                for (s, &v) in g.succ[u].iter().enumerate() {
                    if useful[v] {
                        next.push((v, e.extended(Symbol(s))));
                    }
                }
            }
        }
        frontier = next;
    }
    Ok(CounterinductionScan {
        nodes,
        certificate: CounterinductionCertificate {
            product_nodes: g.len(),
            offending,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{raven_problem, BLACK, NONBLACK};

    fn depths(ds: &[usize]) -> BTreeSet<usize> {
        ds.iter().copied().collect()
    }

    #[test]
    fn ordinary_induction_examples() {
        let m = ordinary_induction();
        assert_eq!(m.apply(&[]).unwrap(), MethodOutput::Hypothesis(YES));
        assert_eq!(m.apply(&[BLACK, NONBLACK]).unwrap(), MethodOutput::Hypothesis(NO));
        assert_eq!(m.apply(&[BLACK; 3]).unwrap(), MethodOutput::Hypothesis(YES));
        assert_eq!(m.apply(&[NONBLACK, BLACK]).unwrap(), MethodOutput::Hypothesis(NO));
    }

    #[test]
    fn skeptic_always_suspends() {
        let m = skeptic();
        for e in [vec![], vec![BLACK], vec![NONBLACK, BLACK, BLACK]] {
            assert_eq!(m.apply(&e).unwrap(), MethodOutput::Suspend);
        }
    }

    #[test]
    fn counterinduction_examples() {
        let m = occasional_counterinduction(&depths(&[2])).unwrap();
        assert_eq!(m.len(), 5);
        assert_eq!(m.apply(&[BLACK, BLACK]).unwrap(), MethodOutput::Hypothesis(NO));
        assert_eq!(m.apply(&[BLACK; 3]).unwrap(), MethodOutput::Hypothesis(YES));
        assert_eq!(m.apply(&[BLACK; 9]).unwrap(), MethodOutput::Hypothesis(YES));
        assert_eq!(m.apply(&[BLACK, NONBLACK]).unwrap(), MethodOutput::Hypothesis(NO));
        assert!(occasional_counterinduction(&BTreeSet::new()).is_err());
    }

    #[test]
    fn delayed_induction_examples() {
        let m = delayed_induction(2);
        assert_eq!(m.len(), 4);
        assert_eq!(m.apply(&[BLACK]).unwrap(), MethodOutput::Suspend);
        assert_eq!(m.apply(&[BLACK; 3]).unwrap(), MethodOutput::Hypothesis(YES));
        assert_eq!(m.apply(&[NONBLACK]).unwrap(), MethodOutput::Hypothesis(NO));
        assert_eq!(delayed_induction(0).apply(&[]).unwrap(), MethodOutput::Hypothesis(YES));
    }

    #[test]
    fn builtins_are_valid() {
        let p = raven_problem();
        let methods = [
            ordinary_induction(),
            skeptic(),
            delayed_induction(0),
            delayed_induction(3),
            occasional_counterinduction(&depths(&[0])).unwrap(),
            occasional_counterinduction(&depths(&[1, 3])).unwrap(),
        ];
        for m in methods {
            assert_eq!(m.validate(&p), vec![], "{}", m.name);
        }
    }

    #[test]
    fn builtin_specs() {
        let m = builtin_method("occasional_counterinduction:1,3").unwrap().unwrap();
        assert_eq!(m.name, "occasional_counterinduction_1_3");
        assert!(builtin_method("delayed_induction:x").is_err());
        assert_eq!(builtin_method("nonesuch").unwrap(), None);
    }

    #[test]
    fn apply_rejects_foreign_symbols() {
        assert!(matches!(
            ordinary_induction().apply(&[Symbol(5)]),
            Err(Error::SymbolOutOfRange { index: 5, .. })
        ));
    }

    #[test]
    fn validate_reports_wrong_problem_and_orphans() {
        let mut m = ordinary_induction();
        m.problem = "elsewhere".into();
        m.states.push("orphan".into());
        m.transitions.push(vec![2, 2]);
        m.outputs.push(MethodOutput::Suspend);
        let v = m.validate(&raven_problem());
        assert!(v.iter().any(|x| matches!(x, Violation::WrongProblem { .. })));
        assert!(v.contains(&Violation::UnreachableState { state: "orphan".into() }));
        assert_eq!(m.trimmed().len(), 2);
    }

    #[test]
    fn counterinductive_node_examples() {
        let p = raven_problem();
        let scan = counterinductive_nodes(&ordinary_induction(), &p, 10).unwrap();
        assert!(scan.nodes.is_empty());
        assert!(scan.certificate.never_counterinductive());

        let m = occasional_counterinduction(&depths(&[2])).unwrap();
        let scan = counterinductive_nodes(&m, &p, 10).unwrap();
        assert_eq!(scan.nodes, vec![Evidence(vec![BLACK, BLACK])]);
        assert_eq!(scan.certificate.offending.len(), 1);

        let scan = counterinductive_nodes(&skeptic(), &p, 10).unwrap();
        assert!(scan.nodes.is_empty());
    }

    #[test]
    fn refuted_hypothesis_is_not_counterinduction() {
        // outputs yes after a counterexample: wrong, but not counterinductive
        let mut m = ordinary_induction();
        m.outputs[1] = MethodOutput::Hypothesis(YES);
        let scan = counterinductive_nodes(&m, &raven_problem(), 6).unwrap();
        assert!(scan.nodes.is_empty());
    }

    #[test]
    fn ordinary_induction_exhaustive_to_depth_12() {
        let m = ordinary_induction();
        for len in 0..=12usize {
            for bits in 0..(1u32 << len) {
                let e: Vec<Symbol> = (0..len).map(|i| Symbol(((bits >> i) & 1) as usize)).collect();
                let expected = if e.contains(&NONBLACK) { NO } else { YES };
                assert_eq!(m.apply(&e).unwrap(), MethodOutput::Hypothesis(expected));
            }
        }
    }
}
