//! Graph routines over deterministic, total automata.
//!
//! Every automaton in this crate is stored as a dense successor table
//! `succ[node][symbol]`, so the same helpers serve truth automata, inference
//! methods and their product.

use std::collections::VecDeque;

use crate::problem::Symbol;

/// Strongly connected components of a successor table.
#[derive(Debug, Clone)]
pub struct Sccs {
    /// Component index of each node.
    pub component: Vec<usize>,
    /// Members of each component, in reverse topological order: edges only
    /// lead from a component to itself or to one with a smaller index.
    pub members: Vec<Vec<usize>>,
    /// Whether the component contains a cycle (more than one node, or a
    /// self-loop). Only cyclic components can trap an infinite run.
    pub cyclic: Vec<bool>,
}

impl Sccs {
    pub fn is_cyclic_node(&self, node: usize) -> bool {
        self.cyclic[self.component[node]]
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Iterative Tarjan. Successor indices must be in range.
pub fn tarjan(succ: &[Vec<usize>]) -> Sccs {
    const UNVISITED: usize = usize::MAX;
    let n = succ.len();
    let mut index = vec![UNVISITED; n];
    let mut lowlink = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut component = vec![UNVISITED; n];
    let mut members: Vec<Vec<usize>> = Vec::new();
    let mut next_index = 0;

    // (node, next successor position)
    let mut call: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if index[root] != UNVISITED {
            continue;
        }
        call.push((root, 0));
        index[root] = next_index;
        lowlink[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if *pos < succ[v].len() {
                let w = succ[v][*pos];
                *pos += 1;
                if index[w] == UNVISITED {
                    index[w] = next_index;
                    lowlink[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    lowlink[v] = lowlink[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                lowlink[parent] = lowlink[parent].min(lowlink[v]);
            }
            if lowlink[v] == index[v] {
                let id = members.len();
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    component[w] = id;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                members.push(comp);
            }
        }
    }

    let cyclic = members
        .iter()
        .map(|comp| comp.len() > 1 || succ[comp[0]].contains(&comp[0]))
        .collect();
    Sccs {
        component,
        members,
        cyclic,
    }
}

/// Nodes reachable (in zero or more steps) from any of `starts`.
pub fn reachable(succ: &[Vec<usize>], starts: impl IntoIterator<Item = usize>) -> Vec<bool> {
    let mut seen = vec![false; succ.len()];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for s in starts {
        if !seen[s] {
            seen[s] = true;
            queue.push_back(s);
        }
    }
    while let Some(v) = queue.pop_front() {
        for &w in &succ[v] {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    seen
}

/// Predecessor lists (deduplicated).
pub fn reverse(succ: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut pred = vec![Vec::new(); succ.len()];
    for (v, row) in succ.iter().enumerate() {
        for &w in row {
            if pred[w].last() != Some(&v) {
                pred[w].push(v);
            }
        }
    }
    pred
}

/// Shortest labelled path from `from` to a node satisfying `goal`.
///
/// With `min_steps == 0` the start node itself may satisfy the goal. With
/// `min_steps == 1` the path is nonempty, which is how cycles through a node
/// are found.
pub fn shortest_path(
    succ: &[Vec<usize>],
    from: usize,
    min_steps: usize,
    goal: impl Fn(usize) -> bool,
) -> Option<(usize, Vec<Symbol>)> {
    if min_steps == 0 && goal(from) {
        return Some((from, Vec::new()));
    }
    let n = succ.len();
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    for (sym, &w) in succ[from].iter().enumerate() {
        if !seen[w] {
            seen[w] = true;
            parent[w] = Some((from, sym));
            queue.push_back(w);
        }
    }
    while let Some(v) = queue.pop_front() {
        if goal(v) {
            let mut path = Vec::new();
            let mut cur = v;
            // `from` may itself carry a parent (cycle search), so stop at the
            // first edge leaving it rather than at a missing parent.
            loop {
                let (p, sym) = parent[cur].expect("bfs parent");
                path.push(Symbol(sym));
                if p == from {
                    break;
                }
                cur = p;
            }
            path.reverse();
            return Some((v, path));
        }
        for (sym, &w) in succ[v].iter().enumerate() {
            if !seen[w] {
                seen[w] = true;
                parent[w] = Some((v, sym));
                queue.push_back(w);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tarjan_finds_components_in_reverse_topological_order() {
        // 0 -> 1 <-> 2 -> 3 (self loop), 0 has no loop
        let succ = vec![vec![1], vec![2], vec![1, 3], vec![3]];
        let sccs = tarjan(&succ);
        assert_eq!(sccs.len(), 3);
        assert_eq!(sccs.component[1], sccs.component[2]);
        assert!(sccs.component[3] < sccs.component[1]);
        assert!(sccs.component[1] < sccs.component[0]);
        assert!(!sccs.is_cyclic_node(0));
        assert!(sccs.is_cyclic_node(1));
        assert!(sccs.is_cyclic_node(3));
    }

    #[test]
    fn shortest_cycle_through_node() {
        let succ = vec![vec![1, 0], vec![2, 2], vec![0, 1]];
        let (end, path) = shortest_path(&succ, 0, 1, |v| v == 0).unwrap();
        assert_eq!(end, 0);
        assert_eq!(path, vec![Symbol(1)]);
        let (end, path) = shortest_path(&succ, 1, 1, |v| v == 1).unwrap();
        assert_eq!(end, 1);
        assert_eq!(path.len(), 2);
    }

    #[test]
    fn zero_step_path() {
        let succ = vec![vec![1], vec![1]];
        assert_eq!(shortest_path(&succ, 0, 0, |v| v == 0), Some((0, vec![])));
        assert_eq!(shortest_path(&succ, 0, 1, |v| v == 0), None);
    }
}
