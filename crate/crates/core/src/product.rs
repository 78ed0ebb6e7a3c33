//! The joint automaton of an inference method and a truth automaton.
//!
//! A node pairs the method's state with the truth state after the same
//! evidence. Every property of a method on a problem that the checkers
//! decide is a property of this finite graph.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::{self, Sccs};
use crate::methods::{InferenceMethod, MethodOutput};
use crate::problem::{EmpiricalProblem, HypothesisId, StateId, Symbol, TruthAnalysis};

#[derive(Debug, Clone)]
pub struct ProductGraph {
    /// `(method state, truth state)` per node, in breadth-first discovery
    /// order from the root, so node indices never decrease with depth.
    pub nodes: Vec<(StateId, StateId)>,
    pub succ: Vec<Vec<usize>>,
    pub output: Vec<MethodOutput>,
    /// Label of the node's truth state. Meaningful for nodes on a cycle,
    /// where it is the label of the component that traps the run.
    pub truth_label: Vec<HypothesisId>,
    pub sccs: Sccs,
    pub truth: TruthAnalysis,
    parent: Vec<Option<(usize, Symbol)>>,
}

impl ProductGraph {
    pub fn build(method: &InferenceMethod, problem: &EmpiricalProblem) -> Result<Self> {
        check_target(method, problem)?;
        let k = problem.alphabet.len();
        let root = (method.initial, problem.truth.initial);
        let mut index: HashMap<(StateId, StateId), usize> = HashMap::new();
        let mut nodes = vec![root];
        let mut parent = vec![None];
        index.insert(root, 0);
        let mut succ: Vec<Vec<usize>> = Vec::new();
        let mut i = 0;
        while i < nodes.len() {
            let (ms, ts) = nodes[i];
            let mut row = Vec::with_capacity(k);
            for s in 0..k {
                let next = (method.transitions[ms][s], problem.truth.transitions[ts][s]);
                let id = *index.entry(next).or_insert_with(|| {
                    nodes.push(next);
                    parent.push(Some((i, Symbol(s))));
                    nodes.len() - 1
                });
                row.push(id);
            }
            succ.push(row);
            i += 1;
        }
        let output = nodes.iter().map(|&(ms, _)| method.outputs[ms]).collect();
        let truth_label = nodes
            .iter()
            .map(|&(_, ts)| problem.truth.labels[ts])
            .collect();
        let sccs = graph::tarjan(&succ);
        Ok(Self {
            nodes,
            succ,
            output,
            truth_label,
            sccs,
            truth: problem.analysis(),
            parent,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn is_cyclic(&self, node: usize) -> bool {
        self.sccs.is_cyclic_node(node)
    }

    /// Settled label of the node's truth state, if any.
    pub fn settled(&self, node: usize) -> Option<HypothesisId> {
        self.truth.settled[self.nodes[node].1]
    }

    pub fn possible(&self, node: usize) -> &std::collections::BTreeSet<HypothesisId> {
        &self.truth.possible[self.nodes[node].1]
    }

    /// A shortest evidence sequence leading from the root to `node`.
    pub fn path_to(&self, node: usize) -> Vec<Symbol> {
        let mut path = Vec::new();
        let mut cur = node;
        while let Some((p, s)) = self.parent[cur] {
            path.push(s);
            cur = p;
        }
        path.reverse();
        path
    }

    /// Shortest path from `from` (at least `min_steps` long) to a goal node.
    pub fn path_from(
        &self,
        from: usize,
        min_steps: usize,
        goal: impl Fn(usize) -> bool,
    ) -> Option<(usize, Vec<Symbol>)> {
        graph::shortest_path(&self.succ, from, min_steps, goal)
    }

    /// A shortest nonempty loop through a node on a cycle.
    pub fn cycle_through(&self, node: usize) -> Vec<Symbol> {
        self.path_from(node, 1, |v| v == node)
            .map(|(_, p)| p)
            .expect("node lies on a cycle")
    }

    /// Nodes that can reach some node in `targets` in zero or more steps.
    pub fn can_reach(&self, targets: impl Fn(usize) -> bool) -> Vec<bool> {
        let pred = graph::reverse(&self.succ);
        let starts: Vec<usize> = (0..self.len()).filter(|&v| targets(v)).collect();
        graph::reachable(&pred, starts)
    }

    /// Nodes with a path of one or more steps into `targets`.
    pub fn can_reach_strictly(&self, targets: &[bool]) -> Vec<bool> {
        let pred = graph::reverse(&self.succ);
        let starts: Vec<usize> = (0..self.len())
            .filter(|&v| targets[v])
            .flat_map(|v| pred[v].iter().copied())
            .collect();
        graph::reachable(&pred, starts)
    }
}

pub(crate) fn check_target(method: &InferenceMethod, problem: &EmpiricalProblem) -> Result<()> {
    if method.problem != problem.name {
        return Err(Error::ProblemMismatch {
            method: method.name.clone(),
            expected: method.problem.clone(),
            found: problem.name.clone(),
        });
    }
    let width = method.transitions.first().map_or(0, Vec::len);
    if width != problem.alphabet.len() {
        return Err(Error::AlphabetMismatch {
            method: width,
            problem: problem.alphabet.len(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::methods::{occasional_counterinduction, ordinary_induction};
    use crate::problem::{raven_problem, BLACK, NONBLACK};

    #[test]
    fn ordinary_induction_product_mirrors_raven() {
        let g = ProductGraph::build(&ordinary_induction(), &raven_problem()).unwrap();
        assert_eq!(g.nodes, vec![(0, 0), (1, 1)]);
        assert!(g.is_cyclic(0) && g.is_cyclic(1));
        assert_eq!(g.path_to(1), vec![NONBLACK]);
        assert_eq!(g.cycle_through(0), vec![BLACK]);
    }

    #[test]
    fn counterinduction_product_counts_depth() {
        let m = occasional_counterinduction(&[2].into_iter().collect()).unwrap();
        let g = ProductGraph::build(&m, &raven_problem()).unwrap();
        // c0..c3 paired with q0, and the refuted state paired with q1
        assert_eq!(g.len(), 5);
        let deep = g.nodes.iter().position(|&n| n == (3, 0)).unwrap();
        assert_eq!(g.path_to(deep), vec![BLACK; 3]);
        assert!(!g.is_cyclic(0));
    }
}
