//! Modes of convergence to the truth, decided exactly on the product graph.
//!
//! All three standards quantify over uncountably many infinite branches. For
//! finite-state methods and problems each one reduces to a reachability or
//! cycle condition on the product graph; the reductions are spelled out next
//! to each checker in [`checks`].

mod achieve;
mod checks;
mod oracle;
pub mod random;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::problem::{Alphabet, World};

pub use achieve::{
    achievability, achievability_with, canonical_induction, settled_induction, Achievability,
    AchievabilityReport, Hierarchy, ImpossibilityCertificate, ModeAchievability,
};
pub use checks::{check, check_pointwise, check_stability, check_stable_pointwise, check_uniform};
pub use oracle::{brute_force_oracle, replay, simulated_truth, OracleConfig, OracleReport, OracleViolation};
pub use random::{
    checker_oracle_agreement, corpus_pair, random_method, random_problem, theorem_instance, theorem_property_test,
    AgreementReport, Discrepancy, TheoremInstance, TheoremReport,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Uniform,
    Pointwise,
    Stable,
    StablePointwise,
}

impl Mode {
    pub const ALL: [Mode; 4] = [
        Mode::Uniform,
        Mode::StablePointwise,
        Mode::Pointwise,
        Mode::Stable,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Uniform => "uniform",
            Mode::Pointwise => "pointwise",
            Mode::Stable => "stable",
            Mode::StablePointwise => "stable_pointwise",
        }
    }

    /// Long name used in human summaries.
    pub fn description(self) -> &'static str {
        match self {
            Mode::Uniform => "uniform convergence",
            Mode::Pointwise => "pointwise convergence",
            Mode::Stable => "stability",
            Mode::StablePointwise => "pointwise convergence with stability",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uniform" => Ok(Mode::Uniform),
            "pointwise" => Ok(Mode::Pointwise),
            "stable" | "stability" => Ok(Mode::Stable),
            "stable_pointwise" | "stable-pointwise" => Ok(Mode::StablePointwise),
            other => Err(format!("unknown mode `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

/// Outcome of one mode check.
///
/// On failure `witness` is a world exhibiting the violation and
/// `witness_times = (i, j)` locate it:
///
/// * pointwise: the method errs at `i` and again at `j`, and the error keeps
///   recurring with period `j - i`;
/// * stability: the method outputs the witness's truth at `i` and something
///   else at `j > i`;
/// * uniform: the method errs at `i` in `witness` and at `j` in
///   `alternate_witness`, which repeats a loop of the witness prefix once
///   more. Repeating it further pushes the error arbitrarily late, so no
///   single amount of evidence works. When the failure is a recurring error
///   the pointwise witness is reused and there is no alternate.
///
/// A uniform pass carries the modulus: the least `n` such that the method
/// outputs the truth from `n` observations on, in every world.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvergenceVerdict {
    pub mode: Mode,
    pub verdict: Verdict,
    pub witness: Option<World>,
    pub witness_times: Option<(usize, usize)>,
    pub alternate_witness: Option<World>,
    pub modulus: Option<usize>,
}

impl ConvergenceVerdict {
    pub(crate) fn pass(mode: Mode) -> Self {
        Self {
            mode,
            verdict: Verdict::Pass,
            witness: None,
            witness_times: None,
            alternate_witness: None,
            modulus: None,
        }
    }

    pub(crate) fn fail(mode: Mode, witness: World, times: (usize, usize)) -> Self {
        Self {
            mode,
            verdict: Verdict::Fail,
            witness: Some(witness),
            witness_times: Some(times),
            alternate_witness: None,
            modulus: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub(crate) fn relabel(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    /// Serializable form with symbols spelled out.
    pub fn record(&self, alphabet: &Alphabet) -> VerdictRecord {
        VerdictRecord {
            mode: self.mode,
            verdict: self.verdict,
            witness: self.witness.as_ref().map(|w| WorldRecord::new(w, alphabet)),
            times: self.witness_times,
            alternate_witness: self
                .alternate_witness
                .as_ref()
                .map(|w| WorldRecord::new(w, alphabet)),
            modulus: self.modulus,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorldRecord {
    pub prefix: Vec<String>,
    pub cycle: Vec<String>,
}

impl WorldRecord {
    pub fn new(world: &World, alphabet: &Alphabet) -> Self {
        Self {
            prefix: alphabet.render(world.prefix()),
            cycle: alphabet.render(world.cycle()),
        }
    }

    pub fn to_world(&self, alphabet: &Alphabet) -> crate::Result<World> {
        World::new(alphabet.evidence(&self.prefix)?, alphabet.evidence(&self.cycle)?)
    }

    /// `a b (c d)^ω` written as `a.b(c.d)`.
    pub fn compact(&self) -> String {
        format!("{}({})", self.prefix.join("."), self.cycle.join("."))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictRecord {
    pub mode: Mode,
    pub verdict: Verdict,
    pub witness: Option<WorldRecord>,
    pub times: Option<(usize, usize)>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub alternate_witness: Option<WorldRecord>,
    pub modulus: Option<usize>,
}
