//! Bounded brute-force verification by simulation.
//!
//! The oracle never looks at the product graph or its components. It
//! enumerates ultimately periodic worlds, runs the method and the truth
//! automaton side by side, and looks for the defining pattern of each
//! violation within a horizon long enough to see the run become periodic.
//! Every violation it reports is real; a clean report only covers the
//! enumerated family of worlds.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::methods::{InferenceMethod, MethodOutput};
use crate::problem::{EmpiricalProblem, HypothesisId, Symbol, World};
use crate::product::check_target;

use super::{ConvergenceVerdict, Mode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleConfig {
    /// Longest world prefix enumerated.
    pub depth: usize,
    /// Longest repeating block enumerated.
    pub max_period: usize,
    /// Stop after this many worlds; the report is then marked partial.
    pub max_worlds: usize,
    /// Violation examples kept per mode.
    pub keep_examples: usize,
}

impl OracleConfig {
    pub fn new(depth: usize, max_period: usize) -> Self {
        Self {
            depth,
            max_period,
            max_worlds: 5_000_000,
            keep_examples: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleViolation {
    pub mode: Mode,
    pub world: World,
    /// Same convention as [`super::ConvergenceVerdict::witness_times`]; for
    /// uniform the second time refers to the world with the repeated segment
    /// `[start, start + period)` pumped once more.
    pub times: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleReport {
    pub worlds_examined: usize,
    pub worlds_total: u128,
    /// False when the resource cap cut the enumeration short.
    pub complete: bool,
    pub pointwise_violations: usize,
    pub stability_violations: usize,
    pub uniform_violations: usize,
    pub examples: Vec<OracleViolation>,
}

impl OracleReport {
    /// Whether some violation of `mode` was observed.
    pub fn violated(&self, mode: Mode) -> bool {
        match mode {
            Mode::Pointwise => self.pointwise_violations > 0,
            Mode::Stable => self.stability_violations > 0,
            Mode::StablePointwise => self.pointwise_violations + self.stability_violations > 0,
            Mode::Uniform => self.uniform_violations > 0,
        }
    }

    pub fn example(&self, mode: Mode) -> Option<&OracleViolation> {
        self.examples.iter().find(|v| v.mode == mode)
    }
}

/// Truth of a world by plain simulation: after the prefix and `|states|`
/// copies of the cycle, the run has entered the loop it repeats forever, so
/// the state reached after a further `|states|` copies lies in the trapped
/// component.
pub fn simulated_truth(problem: &EmpiricalProblem, world: &World) -> HypothesisId {
    let steps = world.prefix().len() + 2 * problem.truth.len() * world.cycle().len();
    let q = (0..steps).fold(problem.truth.initial, |q, t| {
        problem.truth.transitions[q][world.symbol_at(t).0]
    });
    problem.truth.labels[q]
}

struct Run {
    outputs: Vec<MethodOutput>,
    truth: HypothesisId,
    /// Start of the periodic regime and its period.
    periodic_from: usize,
    period: usize,
    /// First time the joint state repeats, and its earlier occurrence.
    first_repeat: Option<(usize, usize)>,
}

fn simulate(method: &InferenceMethod, problem: &EmpiricalProblem, world: &World) -> Run {
    let truth = simulated_truth(problem, world);
    let plen = world.prefix().len();
    let clen = world.cycle().len();
    let mut ms = method.initial;
    let mut ts = problem.truth.initial;
    let mut outputs = vec![method.outputs[ms]];
    let mut seen_at: HashMap<(usize, usize), usize> = HashMap::from([((ms, ts), 0)]);
    let mut first_repeat = None;
    let mut boundary: HashMap<(usize, usize), usize> = HashMap::new();
    let mut periodic: Option<(usize, usize)> = None;
    let mut t = 0;
    let mut horizon = usize::MAX;
    while t < horizon {
        if t >= plen && (t - plen).is_multiple_of(clen) && periodic.is_none() {
            if let Some(&earlier) = boundary.get(&(ms, ts)) {
                let period = t - earlier;
                periodic = Some((earlier, period));
                horizon = t + period;
            } else {
                boundary.insert((ms, ts), t);
            }
        }
        if t >= horizon {
            break;
        }
        let s: Symbol = world.symbol_at(t);
        ms = method.transitions[ms][s.0];
        ts = problem.truth.transitions[ts][s.0];
        t += 1;
        outputs.push(method.outputs[ms]);
        match seen_at.get(&(ms, ts)) {
            Some(&earlier) if first_repeat.is_none() => first_repeat = Some((earlier, t)),
            Some(_) => {}
            None => {
                seen_at.insert((ms, ts), t);
            }
        }
    }
    let (periodic_from, period) = periodic.expect("joint run becomes periodic");
    Run {
        outputs,
        truth,
        periodic_from,
        period,
        first_repeat,
    }
}

/// Enumerates all worlds with prefix length `<= depth` and cycle length in
/// `1..=max_period` and reports the violations observed.
pub fn brute_force_oracle(
    method: &InferenceMethod,
    problem: &EmpiricalProblem,
    config: OracleConfig,
) -> Result<OracleReport> {
    check_target(method, problem)?;
    let k = problem.alphabet.len();
    let words = |max_len: usize, min_len: usize| -> u128 {
        (min_len..=max_len).map(|l| (k as u128).pow(l as u32)).sum()
    };
    let total = words(config.depth, 0) * words(config.max_period, 1);
    let mut report = OracleReport {
        worlds_examined: 0,
        worlds_total: total,
        complete: true,
        pointwise_violations: 0,
        stability_violations: 0,
        uniform_violations: 0,
        examples: Vec::new(),
    };
    let mut kept = HashMap::<Mode, usize>::new();
    let mut keep = |report: &mut OracleReport, v: OracleViolation| {
        let n = kept.entry(v.mode).or_insert(0);
        if *n < config.keep_examples {
            *n += 1;
            report.examples.push(v);
        }
    };

    'outer: for plen in 0..=config.depth {
        for prefix in all_words(k, plen) {
            for clen in 1..=config.max_period.max(1) {
                for cycle in all_words(k, clen) {
                    if report.worlds_examined >= config.max_worlds {
                        report.complete = false;
                        break 'outer;
                    }
                    report.worlds_examined += 1;
                    let world = World::new(prefix.clone(), cycle).expect("nonempty cycle");
                    let run = simulate(method, problem, &world);
                    let wrong = |t: usize| !run.outputs[t].is(run.truth);

                    let periodic = run.periodic_from..run.periodic_from + run.period;
                    if let Some(t) = periodic.clone().find(|&t| wrong(t)) {
                        report.pointwise_violations += 1;
                        keep(&mut report, OracleViolation {
                            mode: Mode::Pointwise,
                            world: world.clone(),
                            times: (t, t + run.period),
                        });
                    }

                    let last = run.outputs.len();
                    if let Some(i) = (0..last).find(|&i| run.outputs[i].is(run.truth)) {
                        if let Some(j) = (i + 1..last).find(|&j| wrong(j)) {
                            report.stability_violations += 1;
                            keep(&mut report, OracleViolation {
                                mode: Mode::Stable,
                                world: world.clone(),
                                times: (i, j),
                            });
                        }
                    }

                    if let Some((start, again)) = run.first_repeat {
                        if let Some(i) = (again..last).find(|&i| wrong(i)) {
                            report.uniform_violations += 1;
                            keep(&mut report, OracleViolation {
                                mode: Mode::Uniform,
                                world,
                                times: (i, i + (again - start)),
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(report)
}

/// Joint (method, truth) states along the first `steps` observations.
fn joint_run(method: &InferenceMethod, problem: &EmpiricalProblem, world: &World, steps: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(steps + 1);
    let (mut ms, mut ts) = (method.initial, problem.truth.initial);
    out.push((ms, ts));
    for t in 0..steps {
        let s = world.symbol_at(t).0;
        ms = method.transitions[ms][s];
        ts = problem.truth.transitions[ts][s];
        out.push((ms, ts));
    }
    out
}

/// Replays a failing verdict by simulation alone and reports whether the
/// witness shows what it claims. Passing verdicts replay trivially.
pub fn replay(method: &InferenceMethod, problem: &EmpiricalProblem, verdict: &ConvergenceVerdict) -> Result<bool> {
    check_target(method, problem)?;
    if verdict.passed() {
        return Ok(true);
    }
    let (Some(w), Some((i, j))) = (&verdict.witness, verdict.witness_times) else {
        return Ok(false);
    };
    if j <= i {
        return Ok(false);
    }
    let truth = simulated_truth(problem, w);
    let run = joint_run(method, problem, w, j);
    let out = |t: usize| method.outputs[run[t].0];
    let recurring = |run: &[(usize, usize)]| {
        // same joint state at the same phase of the world: the stretch
        // between i and j repeats forever
        let plen = w.prefix().len();
        i >= plen && (j - i) % w.cycle().len() == 0 && run[i] == run[j] && !out(i).is(truth)
    };
    Ok(match verdict.mode {
        Mode::Pointwise => recurring(&run),
        Mode::Stable => out(i).is(truth) && !out(j).is(truth),
        Mode::StablePointwise => recurring(&run) || (out(i).is(truth) && !out(j).is(truth)),
        Mode::Uniform => match &verdict.alternate_witness {
            None => recurring(&run),
            Some(alt) => {
                let len = j - i;
                if len > i {
                    return Ok(false);
                }
                let base = joint_run(method, problem, w, i);
                let alt_truth = simulated_truth(problem, alt);
                let alt_run = joint_run(method, problem, alt, j);
                // the alternate inserts one more copy of a loop [a, a + len)
                let pumped = (0..=i - len).any(|a| {
                    base[a] == base[a + len]
                        && (0..j).all(|t| {
                            let src = if t < a + len { t } else { t - len };
                            alt.symbol_at(t) == w.symbol_at(src)
                        })
                });
                pumped
                    && !method.outputs[base[i].0].is(truth)
                    && !method.outputs[alt_run[j].0].is(alt_truth)
            }
        },
    })
}

/// All words of length `len` in length-lexicographic order.
fn all_words(k: usize, len: usize) -> impl Iterator<Item = Vec<Symbol>> {
    let count = k.checked_pow(len as u32).unwrap_or(usize::MAX);
    (0..count).map(move |mut code| {
        let mut w = vec![Symbol(0); len];
        for slot in w.iter_mut().rev() {
            *slot = Symbol(code % k);
            code /= k;
        }
        w
    })
}
