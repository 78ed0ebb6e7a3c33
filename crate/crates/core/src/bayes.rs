//! Bayesian agents on the raven problem with deterministic likelihoods.
//!
//! The support consists of the all-black world, the worlds whose first
//! nonblack raven is observation `k` for `k = 1..=K`, and a tail element for
//! a first counterexample later than `K`. A counterexample world says nothing
//! about observations after its counterexample.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::convergence::WorldRecord;
use crate::error::{Error, Result};
use crate::numeric::{parse_rational, to_f64};
use crate::problem::{raven_problem, HypothesisId, Symbol, World, BLACK, NO, YES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WorldHypothesis {
    AllBlack,
    /// First nonblack raven at observation `k` (1-based).
    CxAt(usize),
    /// First nonblack raven after the truncation point.
    Tail,
}

impl WorldHypothesis {
    pub fn truth(self) -> HypothesisId {
        match self {
            WorldHypothesis::AllBlack => YES,
            _ => NO,
        }
    }

    /// Whether `symbol` at 1-based position `t` is possible.
    fn allows(self, t: usize, symbol: Symbol, truncation: usize) -> bool {
        let black = symbol == BLACK;
        match self {
            WorldHypothesis::AllBlack => black,
            WorldHypothesis::CxAt(k) if t < k => black,
            WorldHypothesis::CxAt(k) if t == k => !black,
            WorldHypothesis::CxAt(_) => true,
            WorldHypothesis::Tail => t > truncation || black,
        }
    }
}

/// Credences over the support, together with how many observations they
/// already reflect.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscretePrior {
    pub all_black: BigRational,
    /// Keys `1..=truncation`; missing keys carry no mass.
    pub cx_at: BTreeMap<usize, BigRational>,
    pub tail: BigRational,
    pub truncation: usize,
    pub observed: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PriorJson {
    all_black: String,
    #[serde(default)]
    cx_at: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tail: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    truncation: Option<usize>,
    #[serde(default, skip_serializing_if = "is_zero")]
    observed: usize,
}

fn is_zero(n: &usize) -> bool {
    *n == 0
}

fn pow2(e: usize) -> BigRational {
    BigRational::from_integer(BigInt::one() << e)
}

impl DiscretePrior {
    /// Checks the masses and returns the prior.
    pub fn new(
        all_black: BigRational,
        cx_at: BTreeMap<usize, BigRational>,
        tail: BigRational,
        truncation: usize,
    ) -> Result<Self> {
        let p = Self {
            all_black,
            cx_at,
            tail,
            truncation,
            observed: 0,
        };
        p.check()?;
        Ok(p)
    }

    fn check(&self) -> Result<()> {
        if self.cx_at.keys().any(|&k| k == 0 || k > self.truncation) {
            return Err(Error::Parameter(format!(
                "counterexample positions must lie in 1..={}",
                self.truncation
            )));
        }
        if self.elements().any(|(_, m)| m.is_negative()) {
            return Err(Error::Parameter("prior masses must be nonnegative".into()));
        }
        let total = self.total();
        if !total.is_one() {
            return Err(Error::Parameter(format!("prior masses sum to {total}, not 1")));
        }
        Ok(())
    }

    /// `P(all black) = 1/2`, `P(first counterexample at k) = 2^-(k+1)` for
    /// `k <= K`, and the remaining `2^-(K+1)` on the tail.
    pub fn geometric(truncation: usize) -> Self {
        let half = BigRational::new(1.into(), 2.into());
        let cx_at = (1..=truncation).map(|k| (k, pow2(k + 1).recip())).collect();
        Self {
            all_black: half,
            cx_at,
            tail: pow2(truncation + 1).recip(),
            truncation,
            observed: 0,
        }
    }

    /// Equal mass on the counterexample positions `1..=K` and nothing on the
    /// all-black world.
    pub fn uniform_counterexamples(truncation: usize) -> Self {
        let m = BigRational::new(1.into(), BigInt::from(truncation.max(1)));
        Self {
            all_black: BigRational::zero(),
            cx_at: (1..=truncation).map(|k| (k, m.clone())).collect(),
            tail: BigRational::zero(),
            truncation,
            observed: 0,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let j: PriorJson = serde_json::from_str(text).map_err(|e| Error::Parameter(format!("prior: {e}")))?;
        let mut cx_at = BTreeMap::new();
        for (k, v) in &j.cx_at {
            let k: usize = k
                .parse()
                .map_err(|_| Error::Parameter(format!("prior: bad counterexample position `{k}`")))?;
            cx_at.insert(k, parse_rational(v)?);
        }
        let truncation = j
            .truncation
            .unwrap_or_else(|| cx_at.keys().next_back().copied().unwrap_or(0));
        let tail = j.tail.as_deref().map(parse_rational).transpose()?.unwrap_or_default();
        let p = Self {
            all_black: parse_rational(&j.all_black)?,
            cx_at,
            tail,
            truncation,
            observed: j.observed,
        };
        p.check()?;
        Ok(p)
    }

    pub fn to_json(&self) -> String {
        let j = PriorJson {
            all_black: self.all_black.to_string(),
            cx_at: self.cx_at.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
            tail: Some(self.tail.to_string()),
            truncation: Some(self.truncation),
            observed: self.observed,
        };
        serde_json::to_string_pretty(&j).expect("serializable")
    }

    pub fn elements(&self) -> impl Iterator<Item = (WorldHypothesis, &BigRational)> {
        std::iter::once((WorldHypothesis::AllBlack, &self.all_black))
            .chain(self.cx_at.iter().map(|(&k, m)| (WorldHypothesis::CxAt(k), m)))
            .chain(std::iter::once((WorldHypothesis::Tail, &self.tail)))
    }

    pub fn total(&self) -> BigRational {
        self.elements().map(|(_, m)| m).sum()
    }

    /// Credence in `yes` or `no`.
    pub fn mass_on(&self, h: HypothesisId) -> BigRational {
        self.elements().filter(|(w, _)| w.truth() == h).map(|(_, m)| m).sum()
    }

    fn mass_mut(&mut self, w: WorldHypothesis) -> &mut BigRational {
        match w {
            WorldHypothesis::AllBlack => &mut self.all_black,
            WorldHypothesis::CxAt(k) => self.cx_at.get_mut(&k).expect("element of the support"),
            WorldHypothesis::Tail => &mut self.tail,
        }
    }
}

/// Conditions on `evidence`, read as the observations following those the
/// credences already reflect.
pub fn conditionalize(prior: &DiscretePrior, evidence: &[Symbol]) -> Result<DiscretePrior> {
    let mut post = prior.clone();
    let support: Vec<WorldHypothesis> = prior.elements().map(|(w, _)| w).collect();
    for w in support {
        let t0 = prior.observed;
        if !evidence
            .iter()
            .enumerate()
            .all(|(i, &s)| w.allows(t0 + i + 1, s, prior.truncation))
        {
            *post.mass_mut(w) = BigRational::zero();
        }
    }
    let total = post.total();
    if total.is_zero() {
        return Err(Error::NullConditioning);
    }
    for w in prior.elements().map(|(w, _)| w).collect::<Vec<_>>() {
        let m = post.mass_mut(w);
        *m = &*m / &total;
    }
    post.observed += evidence.len();
    Ok(post)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub length: usize,
    pub mass_numerator: String,
    pub mass_denominator: String,
    pub decimal: f64,
}

impl TracePoint {
    fn new(length: usize, mass: &BigRational) -> Self {
        Self {
            length,
            mass_numerator: mass.numer().to_string(),
            mass_denominator: mass.denom().to_string(),
            decimal: to_f64(mass),
        }
    }

    pub fn mass(&self) -> BigRational {
        BigRational::new(
            self.mass_numerator.parse().expect("integer"),
            self.mass_denominator.parse().expect("integer"),
        )
    }
}

/// Credence in the true hypothesis after each amount of evidence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorTrace {
    pub world: WorldRecord,
    pub truth: String,
    pub points: Vec<TracePoint>,
    /// Prior mass beyond the truncation point; bounds the effect of
    /// truncating the support on every point of the trace.
    pub truncation_tail: String,
    /// Set when conditioning reached evidence the prior rules out.
    pub error: Option<String>,
}

impl PosteriorTrace {
    pub fn last_mass(&self) -> Option<BigRational> {
        self.points.last().map(TracePoint::mass)
    }
}

/// Credence in the truth of `world` for evidence lengths `0..=horizon`.
/// Conditioning on null evidence ends the trace with `error` set.
pub fn bayes_consistency_sim(prior: &DiscretePrior, world: &World, horizon: usize) -> Result<PosteriorTrace> {
    let raven = raven_problem();
    let truth = raven.truth_of_world(world)?;
    let mut credences = prior.clone();
    let mut points = vec![TracePoint::new(0, &credences.mass_on(truth))];
    let mut error = None;
    for t in 0..horizon {
        match conditionalize(&credences, &[world.symbol_at(t)]) {
            Ok(next) => {
                credences = next;
                points.push(TracePoint::new(t + 1, &credences.mass_on(truth)));
            }
            Err(e) => {
                error = Some(e.to_string());
                break;
            }
        }
    }
    Ok(PosteriorTrace {
        world: WorldRecord::new(world, &raven.alphabet),
        truth: raven.hypothesis(truth).label.clone(),
        points,
        truncation_tail: prior.tail.to_string(),
        error,
    })
}

pub fn traces_csv(traces: &[PosteriorTrace]) -> String {
    let mut out = String::from("world,length,mass_numerator,mass_denominator,decimal\n");
    for tr in traces {
        let w = tr.world.compact();
        for p in &tr.points {
            writeln!(out, "{w},{},{},{},{}", p.length, p.mass_numerator, p.mass_denominator, p.decimal).unwrap();
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BayesFailure {
    pub world: WorldRecord,
    pub reason: String,
    pub trace: PosteriorTrace,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BayesVerdict {
    pub pass: bool,
    pub threshold: String,
    pub horizon: usize,
    pub max_prefix: usize,
    pub max_period: usize,
    /// Worlds that differ in their first `horizon` observations or in truth.
    pub worlds_checked: usize,
    pub failure_count: usize,
    /// The first few failures, in enumeration order.
    pub failures: Vec<BayesFailure>,
    pub note: String,
}

/// Failures kept in a verdict.
const KEEP_FAILURES: usize = 16;

/// Passes iff in every raven world with prefix `<= max_prefix` and period
/// `<= max_period` the credence in the truth is at least `threshold` after
/// `horizon` observations. A world the prior rules out fails.
pub fn consistency_verdict(
    prior: &DiscretePrior,
    horizon: usize,
    threshold: &BigRational,
    max_prefix: usize,
    max_period: usize,
) -> Result<BayesVerdict> {
    let raven = raven_problem();
    let mut worlds = Vec::new();
    let mut seen = HashMap::new();
    for plen in 0..=max_prefix {
        for prefix in words(plen) {
            for clen in 1..=max_period.max(1) {
                for cycle in words(clen) {
                    let w = World::new(prefix.clone(), cycle)?;
                    let key = (w.take(horizon).0, raven.truth_of_world(&w)?);
                    if seen.insert(key, ()).is_none() {
                        worlds.push(w);
                    }
                }
            }
        }
    }
    let outcomes = worlds
        .par_iter()
        .map(|w| {
            let trace = bayes_consistency_sim(prior, w, horizon)?;
            let reason = match (&trace.error, trace.last_mass()) {
                (Some(e), _) => Some(format!("prior rules out this world: {e}")),
                (None, Some(m)) if m < *threshold => Some(format!(
                    "credence in the truth is {:.6} after {horizon} observations",
                    to_f64(&m)
                )),
                _ => None,
            };
            Ok(reason.map(|reason| BayesFailure {
                world: trace.world.clone(),
                reason,
                trace,
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    let failures: Vec<BayesFailure> = outcomes.into_iter().flatten().collect();
    Ok(BayesVerdict {
        pass: failures.is_empty(),
        threshold: threshold.to_string(),
        horizon,
        max_prefix,
        max_period,
        worlds_checked: worlds.len(),
        failure_count: failures.len(),
        failures: failures.into_iter().take(KEEP_FAILURES).collect(),
        note: "worlds are quantified universally: every enumerated world must reach the threshold".into(),
    })
}

fn words(len: usize) -> impl Iterator<Item = Vec<Symbol>> {
    (0..1usize << len).map(move |bits| (0..len).map(|i| Symbol((bits >> (len - 1 - i)) & 1)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::NONBLACK;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn geometric_prior_is_normalised() {
        for k in [0, 1, 5, 64] {
            assert!(DiscretePrior::geometric(k).check().is_ok());
        }
    }

    #[test]
    fn one_black_raven() {
        let post = conditionalize(&DiscretePrior::geometric(64), &[BLACK]).unwrap();
        assert_eq!(post.all_black, q(2, 3));
        assert!(post.total().is_one());
    }

    #[test]
    fn counterexample_singles_out_its_position() {
        let post = conditionalize(&DiscretePrior::geometric(64), &[BLACK, BLACK, NONBLACK]).unwrap();
        assert!(post.cx_at[&3].is_one());
    }

    #[test]
    fn zero_stays_zero() {
        let p = DiscretePrior::uniform_counterexamples(5);
        let post = conditionalize(&p, &[NONBLACK]).unwrap();
        assert!(post.all_black.is_zero());
        assert!(matches!(conditionalize(&p, &[BLACK; 5]), Err(Error::NullConditioning)));
    }

    #[test]
    fn all_black_trace_matches_closed_form() {
        let w = World::constant(vec![BLACK]).unwrap();
        let tr = bayes_consistency_sim(&DiscretePrior::geometric(64), &w, 10).unwrap();
        for p in &tr.points {
            let m = p.length;
            let closed = q(1, 2) / (q(1, 2) + pow2(m + 1).recip());
            assert_eq!(p.mass(), closed, "length {m}");
        }
        assert_eq!(tr.points[10].mass(), q(1024, 1025));
        assert!(tr.points[10].decimal >= 0.99);
    }

    #[test]
    fn json_round_trip() {
        let p = DiscretePrior::geometric(4);
        assert_eq!(DiscretePrior::from_json(&p.to_json()).unwrap(), p);
        let short = r#"{"all_black": "1/2", "cx_at": {"1": "1/4", "2": "0.25"}}"#;
        let p = DiscretePrior::from_json(short).unwrap();
        assert_eq!(p.truncation, 2);
        assert!(DiscretePrior::from_json(r#"{"all_black": "1/2"}"#).is_err());
        assert!(DiscretePrior::from_json(r#"{"all_black": "1/2", "cx_at": {"0": "1/2"}}"#).is_err());
    }

    #[test]
    fn verdicts() {
        let t = q(99, 100);
        let v = consistency_verdict(&DiscretePrior::geometric(64), 12, &t, 8, 2).unwrap();
        assert!(v.pass, "{:?}", v.failures.first());
        let bad = consistency_verdict(&DiscretePrior::uniform_counterexamples(16), 12, &t, 8, 2).unwrap();
        assert!(!bad.pass);
        assert!(bad.failures.iter().any(|f| f.world.prefix.is_empty() && f.world.cycle == ["black"]));
    }
}
