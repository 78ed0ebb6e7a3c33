use crate::error::Result;
use crate::methods::InferenceMethod;
use crate::problem::{EmpiricalProblem, Evidence, World};
use crate::product::ProductGraph;

use super::{ConvergenceVerdict, Mode};

/// Runs the checker for `mode`.
pub fn check(
    method: &InferenceMethod,
    problem: &EmpiricalProblem,
    mode: Mode,
) -> Result<ConvergenceVerdict> {
    let g = ProductGraph::build(method, problem)?;
    Ok(match mode {
        Mode::Uniform => uniform(&g),
        Mode::Pointwise => pointwise(&g),
        Mode::Stable => stability(&g),
        Mode::StablePointwise => stable_pointwise(&g),
    })
}

pub fn check_pointwise(m: &InferenceMethod, p: &EmpiricalProblem) -> Result<ConvergenceVerdict> {
    check(m, p, Mode::Pointwise)
}

pub fn check_stability(m: &InferenceMethod, p: &EmpiricalProblem) -> Result<ConvergenceVerdict> {
    check(m, p, Mode::Stable)
}

pub fn check_uniform(m: &InferenceMethod, p: &EmpiricalProblem) -> Result<ConvergenceVerdict> {
    check(m, p, Mode::Uniform)
}

pub fn check_stable_pointwise(
    m: &InferenceMethod,
    p: &EmpiricalProblem,
) -> Result<ConvergenceVerdict> {
    check(m, p, Mode::StablePointwise)
}

fn concat(parts: &[&[crate::problem::Symbol]]) -> Evidence {
    Evidence(parts.concat())
}

/// Pointwise convergence.
///
/// Every branch ends up looping forever inside one cyclic component of the
/// product graph, visiting some of its nodes infinitely often, and its truth
/// is the label of the truth states there. Conversely, every node `u` on a
/// cycle is visited infinitely often by the lasso world "path to `u`, then a
/// loop through `u` forever". So the method converges on every branch iff
/// every product node on a cycle outputs its own truth label.
pub(crate) fn pointwise(g: &ProductGraph) -> ConvergenceVerdict {
    // Node order is breadth-first, so the first offender is a shallowest one.
    let offender = (0..g.len()).find(|&u| g.is_cyclic(u) && !g.output[u].is(g.truth_label[u]));
    match offender {
        None => ConvergenceVerdict::pass(Mode::Pointwise),
        Some(u) => {
            let prefix = g.path_to(u);
            let cycle = g.cycle_through(u);
            let times = (prefix.len(), prefix.len() + cycle.len());
            let world = World::new(prefix, cycle).expect("cycle is nonempty");
            ConvergenceVerdict::fail(Mode::Pointwise, world, times)
        }
    }
}

/// Stability.
///
/// A violation is a branch with truth `t` along which the method outputs `t`
/// at some node `u` and later something else at `v`. The branch's truth is
/// `t` iff it ends in a cyclic product component whose truth label is `t`,
/// and any such component reachable from `v` can be entered and looped in.
/// So stability fails iff some `u` outputting `t` has a path of one or more
/// steps to a node `v` that outputs something other than `t` and can still
/// reach a cyclic node labelled `t`.
pub(crate) fn stability(g: &ProductGraph) -> ConvergenceVerdict {
    let hypotheses: std::collections::BTreeSet<_> =
        g.output.iter().filter_map(|o| o.hypothesis()).collect();
    let mut best: Option<(usize, crate::problem::HypothesisId, Vec<bool>)> = None;
    for &t in &hypotheses {
        let reaches_t = g.can_reach(|w| g.is_cyclic(w) && g.truth_label[w] == t);
        let abandon: Vec<bool> = (0..g.len())
            .map(|v| reaches_t[v] && !g.output[v].is(t))
            .collect();
        let before_abandon = g.can_reach_strictly(&abandon);
        if let Some(u) = (0..g.len()).find(|&u| g.output[u].is(t) && before_abandon[u]) {
            if best.as_ref().is_none_or(|(b, _, _)| u < *b) {
                best = Some((u, t, abandon));
            }
        }
    }
    let Some((u, t, abandon)) = best else {
        return ConvergenceVerdict::pass(Mode::Stable);
    };
    let to_u = g.path_to(u);
    let (v, u_to_v) = g
        .path_from(u, 1, |v| abandon[v])
        .expect("abandon node is reachable");
    let (w, v_to_w) = g
        .path_from(v, 0, |w| g.is_cyclic(w) && g.truth_label[w] == t)
        .expect("truth component is reachable");
    let cycle = g.cycle_through(w);
    let i = to_u.len();
    let j = i + u_to_v.len();
    let world = World::new(concat(&[&to_u, &u_to_v, &v_to_w]), cycle).expect("cycle is nonempty");
    ConvergenceVerdict::fail(Mode::Stable, world, (i, j))
}

/// Pointwise convergence and stability together; reports the pointwise
/// failure first.
pub(crate) fn stable_pointwise(g: &ProductGraph) -> ConvergenceVerdict {
    let p = pointwise(g);
    if !p.passed() {
        return p.relabel(Mode::StablePointwise);
    }
    stability(g).relabel(Mode::StablePointwise)
}

/// Uniform convergence.
///
/// Call a node good when its truth state is settled and the method outputs
/// the settled label: the output is then the truth of every branch through
/// it. A node reachable from a cycle occurs at unboundedly many depths (pump
/// the cycle), so all such nodes must be good. Every other node lies on the
/// acyclic lead-in from the root, whose paths are simple and hence shorter
/// than the number of product nodes; bad nodes there only delay the modulus.
/// So the method converges uniformly iff every node reachable from a cycle is
/// good, and the least modulus is one more than the longest lead-in path to a
/// bad node (zero if there is none).
pub(crate) fn uniform(g: &ProductGraph) -> ConvergenceVerdict {
    let recurring = pointwise(g);
    if !recurring.passed() {
        return recurring.relabel(Mode::Uniform);
    }
    let good: Vec<bool> = (0..g.len())
        .map(|u| matches!(g.settled(u), Some(h) if g.output[u].is(h)))
        .collect();
    let cyclic: Vec<usize> = (0..g.len()).filter(|&u| g.is_cyclic(u)).collect();
    let after_cycle = crate::graph::reachable(&g.succ, cyclic.iter().copied());

    if let Some(u) = (0..g.len()).find(|&u| after_cycle[u] && !good[u]) {
        // A cyclic node that reaches `u`; pointwise passed, so `u` itself is
        // not on a cycle, but some ancestor is.
        let pred = crate::graph::reverse(&g.succ);
        let ancestors = crate::graph::reachable(&pred, [u]);
        let c = (0..g.len())
            .find(|&c| ancestors[c] && g.is_cyclic(c))
            .expect("node after a cycle has a cyclic ancestor");
        let to_c = g.path_to(c);
        let pump = g.cycle_through(c);
        let (_, c_to_u) = g.path_from(c, 0, |v| v == u).expect("u is reachable from c");
        let wrong = g.output[u];
        let (w, u_to_w) = g
            .path_from(u, 0, |w| g.is_cyclic(w) && !wrong.is(g.truth_label[w]))
            .expect("a bad node can reach a component it misjudges");
        let tail = g.cycle_through(w);
        let i = to_c.len() + pump.len() + c_to_u.len();
        let witness = World::new(concat(&[&to_c, &pump, &c_to_u, &u_to_w]), tail.clone())
            .expect("cycle is nonempty");
        let pumped = World::new(concat(&[&to_c, &pump, &pump, &c_to_u, &u_to_w]), tail)
            .expect("cycle is nonempty");
        let mut verdict = ConvergenceVerdict::fail(Mode::Uniform, witness, (i, i + pump.len()));
        verdict.alternate_witness = Some(pumped);
        return verdict;
    }

    // Longest path from the root to each lead-in node; the lead-in is acyclic
    // and closed under predecessors.
    let lead_in: Vec<bool> = after_cycle.iter().map(|r| !r).collect();
    let mut indegree = vec![0usize; g.len()];
    for u in (0..g.len()).filter(|&u| lead_in[u]) {
        for &v in &g.succ[u] {
            if lead_in[v] {
                indegree[v] += 1;
            }
        }
    }
    let mut depth = vec![0usize; g.len()];
    let mut ready: Vec<usize> = (0..g.len()).filter(|&u| lead_in[u] && indegree[u] == 0).collect();
    let mut modulus = 0;
    while let Some(u) = ready.pop() {
        if !good[u] {
            modulus = modulus.max(depth[u] + 1);
        }
        for &v in &g.succ[u] {
            if lead_in[v] {
                depth[v] = depth[v].max(depth[u] + 1);
                indegree[v] -= 1;
                if indegree[v] == 0 {
                    ready.push(v);
                }
            }
        }
    }
    let mut verdict = ConvergenceVerdict::pass(Mode::Uniform);
    verdict.modulus = Some(modulus);
    verdict
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convergence::Verdict;
    use crate::methods::MethodOutput;
    use crate::methods::{delayed_induction, occasional_counterinduction, ordinary_induction, skeptic};
    use crate::problem::{first_observation_problem, raven_problem, BLACK, NO, NONBLACK, YES};

    fn flips(ds: &[usize]) -> InferenceMethod {
        occasional_counterinduction(&ds.iter().copied().collect()).unwrap()
    }

    /// Copies the label fixed by the first observation; suspends at the root.
    fn first_copier() -> InferenceMethod {
        InferenceMethod {
            name: "copier".into(),
            problem: "first_observation".into(),
            states: vec!["r".into(), "a".into(), "b".into()],
            initial: 0,
            transitions: vec![vec![1, 2], vec![1, 1], vec![2, 2]],
            outputs: vec![
                MethodOutput::Suspend,
                MethodOutput::Hypothesis(YES),
                MethodOutput::Hypothesis(NO),
            ],
        }
    }

    #[test]
    fn ordinary_induction_passes_pointwise_and_stability() {
        let p = raven_problem();
        let m = ordinary_induction();
        for mode in [Mode::Pointwise, Mode::Stable, Mode::StablePointwise] {
            assert!(check(&m, &p, mode).unwrap().passed(), "{mode}");
        }
        assert!(!check_uniform(&m, &p).unwrap().passed());
    }

    #[test]
    fn skeptic_fails_pointwise_on_all_black() {
        let p = raven_problem();
        let v = check_pointwise(&skeptic(), &p).unwrap();
        assert_eq!(v.verdict, Verdict::Fail);
        assert_eq!(v.witness, Some(World::constant(vec![BLACK]).unwrap()));
        assert_eq!(v.witness_times, Some((0, 1)));
        assert!(check_stability(&skeptic(), &p).unwrap().passed());
        assert!(!check_uniform(&skeptic(), &p).unwrap().passed());
    }

    #[test]
    fn counterinduction_converges_but_is_unstable() {
        let p = raven_problem();
        let m = flips(&[2]);
        assert!(check_pointwise(&m, &p).unwrap().passed());
        let v = check_stability(&m, &p).unwrap();
        assert_eq!(v.verdict, Verdict::Fail);
        let w = v.witness.clone().unwrap();
        let (i, j) = v.witness_times.unwrap();
        let truth = p.truth_of_world(&w).unwrap();
        assert!(m.apply(&w.take(i)).unwrap().is(truth));
        assert!(!m.apply(&w.take(j)).unwrap().is(truth));
        assert!(i < j);
        // shallowest violation: yes at the root, no at depth two, all black
        assert_eq!((i, j), (0, 2));
        assert_eq!(truth, YES);
        assert!(!check_stable_pointwise(&m, &p).unwrap().passed());
    }

    #[test]
    fn late_counterexample_world_also_violates_stability() {
        // the no-truth violation: no at depth 2, yes at depth 3, then refuted
        let p = raven_problem();
        let m = flips(&[2]);
        let w = World::new(vec![BLACK, BLACK, BLACK, NONBLACK], vec![NONBLACK]).unwrap();
        assert_eq!(p.truth_of_world(&w).unwrap(), NO);
        assert!(m.apply(&w.take(2)).unwrap().is(NO));
        assert!(m.apply(&w.take(3)).unwrap().is(YES));
    }

    #[test]
    fn delayed_induction_passes_stable_pointwise() {
        let p = raven_problem();
        for k in 0..5 {
            assert!(check_stable_pointwise(&delayed_induction(k), &p).unwrap().passed());
        }
    }

    #[test]
    fn first_observation_copier_is_uniform_with_modulus_one() {
        let p = first_observation_problem();
        let v = check_uniform(&first_copier(), &p).unwrap();
        assert!(v.passed());
        assert_eq!(v.modulus, Some(1));
    }

    #[test]
    fn uniform_failure_is_pumpable() {
        let p = raven_problem();
        let m = ordinary_induction();
        let v = check_uniform(&m, &p).unwrap();
        let (i, j) = v.witness_times.unwrap();
        let w = v.witness.unwrap();
        let w2 = v.alternate_witness.unwrap();
        assert!(!m.apply(&w.take(i)).unwrap().is(p.truth_of_world(&w).unwrap()));
        assert!(!m.apply(&w2.take(j)).unwrap().is(p.truth_of_world(&w2).unwrap()));
        assert!(j > i);
    }

    #[test]
    fn uniform_does_not_imply_stability() {
        // yes at the root, no at depth one, correct from depth two on
        let p = first_observation_problem();
        let m = InferenceMethod {
            name: "wobbly".into(),
            problem: "first_observation".into(),
            states: vec!["r".into(), "x".into(), "a".into(), "b".into()],
            initial: 0,
            transitions: vec![vec![1, 3], vec![2, 2], vec![2, 2], vec![3, 3]],
            outputs: vec![
                MethodOutput::Hypothesis(YES),
                MethodOutput::Hypothesis(NO),
                MethodOutput::Hypothesis(YES),
                MethodOutput::Hypothesis(NO),
            ],
        };
        assert_eq!(m.validate(&p), vec![]);
        let u = check_uniform(&m, &p).unwrap();
        assert!(u.passed());
        assert_eq!(u.modulus, Some(2));
        assert!(!check_stability(&m, &p).unwrap().passed());
    }
}
