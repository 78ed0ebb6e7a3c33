//! Random problems and methods, and the counterinduction property test.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graph;
use crate::methods::{counterinductive_nodes, InferenceMethod, MethodOutput};
use crate::problem::{raven_problem, Alphabet, EmpiricalProblem, Hypothesis, HypothesisId, TruthAutomaton};
use crate::product::ProductGraph;
use crate::rng::{self, PRNG_ID};

use super::oracle::{brute_force_oracle, replay, OracleConfig};
use super::{check, checks, ConvergenceVerdict, Mode, WorldRecord};

/// A well-posed random problem with hypotheses `yes`/`no` over the alphabet
/// `a, b, …`. Each strongly connected component gets one uniformly drawn
/// label; unreachable states are dropped.
pub fn random_problem<R: Rng>(rng: &mut R, max_states: usize, alphabet_size: usize) -> EmpiricalProblem {
    let n = rng.random_range(1..=max_states.max(1));
    let k = alphabet_size.max(1);
    let table: Vec<Vec<usize>> = (0..n)
        .map(|_| (0..k).map(|_| rng.random_range(0..n)).collect())
        .collect();
    // keep states reachable from 0, renumbered in discovery order
    let mut order = vec![0usize];
    let mut index = vec![usize::MAX; n];
    index[0] = 0;
    let mut i = 0;
    while i < order.len() {
        for &t in &table[order[i]] {
            if index[t] == usize::MAX {
                index[t] = order.len();
                order.push(t);
            }
        }
        i += 1;
    }
    let transitions: Vec<Vec<usize>> = order
        .iter()
        .map(|&q| table[q].iter().map(|&t| index[t]).collect())
        .collect();
    let sccs = graph::tarjan(&transitions);
    let comp_labels: Vec<HypothesisId> = (0..sccs.len())
        .map(|_| HypothesisId(rng.random_range(0..2)))
        .collect();
    let labels = (0..transitions.len())
        .map(|q| comp_labels[sccs.component[q]])
        .collect();
    let symbols = (0..k).map(|i| ((b'a' + i as u8) as char).to_string()).collect();
    EmpiricalProblem {
        name: "random".into(),
        alphabet: Alphabet::new_unchecked(symbols),
        hypotheses: vec![Hypothesis::bare("yes"), Hypothesis::bare("no")],
        truth: TruthAutomaton {
            states: (0..transitions.len()).map(|q| format!("q{q}")).collect(),
            initial: 0,
            transitions,
            labels,
        },
    }
}

/// A random method for `problem` with at most `max_states` states, outputs
/// drawn uniformly from the hypotheses and suspension. Unreachable states
/// are dropped.
pub fn random_method<R: Rng>(rng: &mut R, problem: &EmpiricalProblem, max_states: usize) -> InferenceMethod {
    let n = rng.random_range(1..=max_states.max(1));
    let k = problem.alphabet.len();
    let choices = problem.hypotheses.len() + 1;
    let transitions = (0..n)
        .map(|_| (0..k).map(|_| rng.random_range(0..n)).collect())
        .collect();
    let outputs = (0..n)
        .map(|_| {
            let c = rng.random_range(0..choices);
            if c == 0 {
                MethodOutput::Suspend
            } else {
                MethodOutput::Hypothesis(HypothesisId(c - 1))
            }
        })
        .collect();
    InferenceMethod {
        name: "random".into(),
        problem: problem.name.clone(),
        states: (0..n).map(|q| format!("m{q}")).collect(),
        initial: 0,
        transitions,
        outputs,
    }
    .trimmed()
}

/// Verdicts relevant to the counterinduction claim for one method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoremInstance {
    pub stable_pointwise: bool,
    pub counterinductive: bool,
    pub uniform: bool,
}

impl TheoremInstance {
    /// Stable pointwise convergence rules out counterinduction.
    pub fn holds(&self) -> bool {
        !(self.stable_pointwise && self.counterinductive)
    }
}

pub fn theorem_instance(method: &InferenceMethod, problem: &EmpiricalProblem) -> Result<TheoremInstance> {
    let g = ProductGraph::build(method, problem)?;
    let scan = counterinductive_nodes(method, problem, 0)?;
    Ok(TheoremInstance {
        stable_pointwise: checks::stable_pointwise(&g).passed(),
        counterinductive: !scan.certificate.never_counterinductive(),
        uniform: checks::uniform(&g).passed(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub trials: usize,
    pub seed: u64,
    pub prng: String,
    /// Trials whose method converges pointwise and stably.
    pub stable_pointwise: usize,
    /// Trials whose method counterinduces somewhere.
    pub counterinductive: usize,
    pub uniform_passes: usize,
    pub counterexamples: Vec<InferenceMethod>,
}

/// Draws `trials` random methods with up to five states on the raven problem
/// and collects every method that converges stably yet counterinduces.
pub fn theorem_property_test(trials: usize, seed: u64) -> Result<TheoremReport> {
    let p = raven_problem();
    let results = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng::stream(seed, t as u64);
            let m = random_method(&mut rng, &p, 5);
            theorem_instance(&m, &p).map(|inst| (m, inst))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = TheoremReport {
        trials,
        seed,
        prng: PRNG_ID.to_string(),
        stable_pointwise: 0,
        counterinductive: 0,
        uniform_passes: 0,
        counterexamples: Vec::new(),
    };
    for (m, inst) in results {
        report.stable_pointwise += usize::from(inst.stable_pointwise);
        report.counterinductive += usize::from(inst.counterinductive);
        report.uniform_passes += usize::from(inst.uniform);
        if !inst.holds() {
            report.counterexamples.push(m);
        }
    }
    Ok(report)
}

/// One random pair of the agreement corpus.
pub fn corpus_pair(seed: u64, index: u64) -> (EmpiricalProblem, InferenceMethod) {
    let mut rng = rng::stream(seed, index);
    let p = random_problem(&mut rng, 4, 2);
    let m = random_method(&mut rng, &p, 4);
    (p, m)
}

/// A disagreement between the exact checker and the brute-force oracle, or a
/// failure of one of the checks made on a pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub index: u64,
    pub mode: Mode,
    pub kind: String,
    pub method: InferenceMethod,
    pub problem: EmpiricalProblem,
    pub witness: Option<WorldRecord>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AgreementReport {
    pub pairs: u64,
    pub seed: u64,
    pub prng: String,
    /// Per mode in [`Mode::ALL`] order: pairs the checker passes.
    pub passes: [u64; 4],
    /// The oracle saw a violation the checker denies, or missed a checker
    /// witness inside its enumerated family.
    pub contradictions: Vec<Discrepancy>,
    /// Failing verdicts whose witness does not replay.
    pub replay_failures: Vec<Discrepancy>,
    /// Pairs passing uniform but failing stable pointwise convergence.
    pub uniform_not_stable: Vec<Discrepancy>,
    /// Pairs passing stable pointwise but failing pointwise convergence.
    pub stable_pointwise_not_pointwise: Vec<Discrepancy>,
    /// Oracle runs cut short by the resource cap.
    pub partial_oracle_runs: u64,
}

fn in_family(w: &crate::problem::World, config: &OracleConfig) -> bool {
    w.prefix().len() <= config.depth && w.cycle().len() <= config.max_period
}

/// Runs every exact check and the brute-force oracle on `pairs` random
/// (problem, method) pairs with up to four states each.
pub fn checker_oracle_agreement(pairs: u64, seed: u64, config: OracleConfig) -> Result<AgreementReport> {
    let outcomes = (0..pairs)
        .into_par_iter()
        .map(|i| -> Result<AgreementReport> {
            let (p, m) = corpus_pair(seed, i);
            let mut r = AgreementReport::default();
            let oracle = brute_force_oracle(&m, &p, config)?;
            r.partial_oracle_runs += u64::from(!oracle.complete);
            let mut verdicts: Vec<ConvergenceVerdict> = Vec::new();
            for (k, mode) in Mode::ALL.into_iter().enumerate() {
                let v = check(&m, &p, mode)?;
                let discrepancy = |kind: &str| Discrepancy {
                    index: i,
                    mode,
                    kind: kind.to_string(),
                    method: m.clone(),
                    problem: p.clone(),
                    witness: v.witness.as_ref().map(|w| WorldRecord::new(w, &p.alphabet)),
                };
                if v.passed() {
                    r.passes[k] += 1;
                    if oracle.violated(mode) {
                        r.contradictions.push(discrepancy("oracle found a violation the checker denies"));
                    }
                } else {
                    if !replay(&m, &p, &v)? {
                        r.replay_failures.push(discrepancy("witness does not replay"));
                    }
                    let w = v.witness.as_ref().expect("failing verdicts carry a witness");
                    if oracle.complete && in_family(w, &config) && !oracle.violated(mode) {
                        r.contradictions.push(discrepancy("oracle missed a witness inside its family"));
                    }
                }
                verdicts.push(v);
            }
            let passed = |mode: Mode| verdicts[Mode::ALL.iter().position(|&x| x == mode).unwrap()].passed();
            let record = |mode: Mode, kind: &str| Discrepancy {
                index: i,
                mode,
                kind: kind.to_string(),
                method: m.clone(),
                problem: p.clone(),
                witness: None,
            };
            if passed(Mode::Uniform) && !passed(Mode::StablePointwise) {
                r.uniform_not_stable.push(record(Mode::Uniform, "uniform without stable pointwise convergence"));
            }
            if passed(Mode::StablePointwise) && !passed(Mode::Pointwise) {
                r.stable_pointwise_not_pointwise.push(record(Mode::StablePointwise, "stable pointwise without pointwise"));
            }
            Ok(r)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut total = AgreementReport {
        pairs,
        seed,
        prng: PRNG_ID.to_string(),
        ..Default::default()
    };
    for r in outcomes {
        for k in 0..4 {
            total.passes[k] += r.passes[k];
        }
        total.contradictions.extend(r.contradictions);
        total.replay_failures.extend(r.replay_failures);
        total.uniform_not_stable.extend(r.uniform_not_stable);
        total.stable_pointwise_not_pointwise.extend(r.stable_pointwise_not_pointwise);
        total.partial_oracle_runs += r.partial_oracle_runs;
    }
    Ok(total)
}
