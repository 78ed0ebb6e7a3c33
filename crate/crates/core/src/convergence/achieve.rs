use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::methods::{InferenceMethod, MethodOutput};
use crate::problem::{EmpiricalProblem, HypothesisId};

use super::{check, Mode};

/// Outputs the label of the current truth state: ordinary induction
/// generalised to any problem.
pub fn canonical_induction(problem: &EmpiricalProblem) -> InferenceMethod {
    let t = &problem.truth;
    InferenceMethod {
        name: format!("canonical_induction_{}", problem.name),
        problem: problem.name.clone(),
        states: t.states.clone(),
        initial: t.initial,
        transitions: t.transitions.clone(),
        outputs: t.labels.iter().map(|&h| MethodOutput::Hypothesis(h)).collect(),
    }
}

/// Outputs a hypothesis only once the truth is settled, and suspends before.
pub fn settled_induction(problem: &EmpiricalProblem) -> InferenceMethod {
    let t = &problem.truth;
    let a = problem.analysis();
    InferenceMethod {
        name: format!("settled_induction_{}", problem.name),
        problem: problem.name.clone(),
        states: t.states.clone(),
        initial: t.initial,
        transitions: t.transitions.clone(),
        outputs: a
            .settled
            .iter()
            .map(|s| s.map_or(MethodOutput::Suspend, MethodOutput::Hypothesis))
            .collect(),
    }
}

/// An ordered list of modes, strongest first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hierarchy {
    pub levels: Vec<Mode>,
}

impl Default for Hierarchy {
    fn default() -> Self {
        Self {
            levels: vec![Mode::Uniform, Mode::StablePointwise, Mode::Pointwise],
        }
    }
}

/// Why uniform convergence is out of reach: a state on a cycle from which
/// differently labelled components are still reachable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImpossibilityCertificate {
    pub state: String,
    pub possible: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Achievability {
    Achievable {
        method: InferenceMethod,
        modulus: Option<usize>,
    },
    Unachievable {
        certificate: ImpossibilityCertificate,
    },
    Unknown {
        reason: String,
    },
}

impl Achievability {
    pub fn is_achievable(&self) -> bool {
        matches!(self, Achievability::Achievable { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeAchievability {
    pub mode: Mode,
    #[serde(flatten)]
    pub status: Achievability,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AchievabilityReport {
    pub problem: String,
    pub levels: Vec<ModeAchievability>,
    pub highest_achievable: Option<Mode>,
}

impl AchievabilityReport {
    pub fn status(&self, mode: Mode) -> Option<&Achievability> {
        self.levels.iter().find(|l| l.mode == mode).map(|l| &l.status)
    }

    /// One-line human summary.
    pub fn summary(&self) -> String {
        match self.highest_achievable {
            None => format!("{}: no mode in the hierarchy is known to be achievable", self.problem),
            Some(mode) => {
                let mut s = format!("{}: highest achievable: {}", self.problem, mode.description());
                if let Some(Achievability::Achievable { method, modulus }) = self.status(mode) {
                    if let Some(n) = modulus {
                        s.push_str(&format!(", modulus {n}"));
                    }
                    s.push_str(&format!(" (witness method: {})", method.name));
                }
                s
            }
        }
    }
}

/// Evaluates the default hierarchy.
pub fn achievability(problem: &EmpiricalProblem) -> Result<AchievabilityReport> {
    achievability_with(problem, &Hierarchy::default())
}

/// Decides, for each mode of the hierarchy, whether some method achieves it
/// on `problem`.
///
/// Uniform convergence is decided exactly: it is achievable iff every truth
/// state on a cycle is settled, since unsettled cyclic states recur at every
/// depth and no single output there is right in all their continuations.
/// Other modes are established constructively by candidate methods; when no
/// candidate passes, the mode is reported as unknown.
pub fn achievability_with(
    problem: &EmpiricalProblem,
    hierarchy: &Hierarchy,
) -> Result<AchievabilityReport> {
    let analysis = problem.analysis();
    let unsettled_cycle = (0..problem.truth.len())
        .find(|&q| analysis.is_cyclic(q) && analysis.settled[q].is_none());
    let uniform = match unsettled_cycle {
        Some(q) => Achievability::Unachievable {
            certificate: ImpossibilityCertificate {
                state: problem.truth.states[q].clone(),
                possible: analysis.possible[q]
                    .iter()
                    .map(|&h: &HypothesisId| problem.hypothesis(h).label.clone())
                    .collect(),
            },
        },
        None => {
            let method = settled_induction(problem);
            let v = check(&method, problem, Mode::Uniform)?;
            debug_assert!(v.passed());
            Achievability::Achievable {
                method,
                modulus: v.modulus,
            }
        }
    };
    let uniform_ok = uniform.is_achievable();

    let mut levels = Vec::new();
    for &mode in &hierarchy.levels {
        let status = if mode == Mode::Uniform {
            uniform.clone()
        } else {
            let mut candidates = vec![canonical_induction(problem)];
            if uniform_ok {
                candidates.push(settled_induction(problem));
            }
            let mut found = None;
            for m in candidates {
                let v = check(&m, problem, mode)?;
                if v.passed() {
                    found = Some(Achievability::Achievable {
                        method: m,
                        modulus: None,
                    });
                    break;
                }
            }
            found.unwrap_or_else(|| Achievability::Unknown {
                reason: "no candidate method achieves this mode".into(),
            })
        };
        levels.push(ModeAchievability { mode, status });
    }
    let highest_achievable = levels
        .iter()
        .find(|l| l.status.is_achievable())
        .map(|l| l.mode);
    Ok(AchievabilityReport {
        problem: problem.name.clone(),
        levels,
        highest_achievable,
    })
}
