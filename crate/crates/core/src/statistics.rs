//! The white-ball urn: sampling, the frequency estimator, consistency
//! certification and progressiveness curves for tests.

use std::fmt::Write;

use num_rational::Ratio;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{parse_ratio_u64, ratio_f64};
use crate::rng::{self, PRNG_ID};

/// An urn with a known proportion `p` of white balls; draws are independent
/// and with replacement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Urn {
    p: Ratio<u64>,
}

impl Urn {
    pub fn new(p: Ratio<u64>) -> Result<Self> {
        if p > Ratio::from_integer(1) {
            return Err(Error::Parameter(format!("urn proportion {p} exceeds 1")));
        }
        Ok(Self { p })
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::new(parse_ratio_u64(s)?)
    }

    pub fn p(&self) -> Ratio<u64> {
        self.p
    }

    /// One draw: white with chance exactly `p`.
    fn draw<R: Rng>(&self, rng: &mut R) -> bool {
        rng.random_range(0..*self.p.denom()) < *self.p.numer()
    }

    fn sample_with<R: Rng>(&self, n: u64, rng: &mut R) -> u64 {
        (0..n).filter(|_| self.draw(rng)).count() as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sample {
    pub n: u64,
    pub whites: u64,
    /// Master seed and stream the draws came from.
    pub seed: u64,
    pub stream: u64,
}

/// `n` draws from stream 0 of `seed`.
pub fn draw_sample(urn: &Urn, n: u64, seed: u64) -> Sample {
    draw_sample_stream(urn, n, seed, 0)
}

pub fn draw_sample_stream(urn: &Urn, n: u64, seed: u64, stream: u64) -> Sample {
    let mut rng = rng::stream(seed, stream);
    Sample {
        n,
        whites: urn.sample_with(n, &mut rng),
        seed,
        stream,
    }
}

/// The observed frequency of white, exactly.
pub fn frequency_estimate(sample: &Sample) -> Result<Ratio<u64>> {
    if sample.n == 0 {
        return Err(Error::UndefinedEstimate);
    }
    Ok(Ratio::new(sample.whites, sample.n))
}

/// Closeness `epsilon` and error probability `delta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConsistencySpec {
    pub epsilon: Ratio<u64>,
    pub delta: Ratio<u64>,
}

impl ConsistencySpec {
    pub fn new(epsilon: Ratio<u64>, delta: Ratio<u64>) -> Result<Self> {
        if epsilon == Ratio::from_integer(0) {
            return Err(Error::Parameter("epsilon must be positive".into()));
        }
        if delta == Ratio::from_integer(0) || delta >= Ratio::from_integer(1) {
            return Err(Error::Parameter("delta must lie strictly between 0 and 1".into()));
        }
        Ok(Self { epsilon, delta })
    }

    pub fn parse(epsilon: &str, delta: &str) -> Result<Self> {
        Self::new(parse_ratio_u64(epsilon)?, parse_ratio_u64(delta)?)
    }
}

/// Smallest `n` with `n >= ln(2/delta) / (2 epsilon^2)`. By Hoeffding's
/// inequality the frequency estimator is then within `epsilon` of `p` with
/// probability at least `1 - delta`, whatever `p` is.
pub fn hoeffding_sample_size(spec: &ConsistencySpec) -> u64 {
    let eps = ratio_f64(spec.epsilon);
    let delta = ratio_f64(spec.delta);
    let bound = (2.0 / delta).ln() / (2.0 * eps * eps);
    bound.ceil() as u64
}

/// A point estimator of `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    /// whites / n
    Frequency,
    /// Returns the true proportion regardless of the sample.
    TrueProportion,
}

impl Estimator {
    pub fn estimate(self, sample: &Sample, urn: &Urn) -> Result<Ratio<u64>> {
        match self {
            Estimator::Frequency => frequency_estimate(sample),
            Estimator::TrueProportion => Ok(urn.p()),
        }
    }
}

/// `|a - b| < eps`, exactly.
fn within(a: Ratio<u64>, b: Ratio<u64>, eps: Ratio<u64>) -> bool {
    let (a, b, e) = (wide(a), wide(b), wide(eps));
    let diff = if a > b { a - b } else { b - a };
    diff < e
}

fn wide(r: Ratio<u64>) -> Ratio<u128> {
    Ratio::new(u128::from(*r.numer()), u128::from(*r.denom()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageRow {
    pub p: String,
    pub n: u64,
    pub replicates: u64,
    pub covered: u64,
    pub coverage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub estimator: Estimator,
    pub epsilon: String,
    pub delta: String,
    /// The Hoeffding sample size for the spec.
    pub analytic_n: u64,
    pub n: u64,
    pub replicates: u64,
    pub seed: u64,
    pub prng: String,
    pub rows: Vec<CoverageRow>,
    pub min_coverage: f64,
}

impl ConsistencyReport {
    pub fn csv(&self) -> String {
        let mut out = String::from("p,n,replicates,coverage,seed,prng\n");
        for r in &self.rows {
            writeln!(out, "{},{},{},{},{},{}", r.p, r.n, r.replicates, r.coverage, self.seed, self.prng).unwrap();
        }
        out
    }
}

/// Estimates, for each `p` in the grid, the chance that the estimator lands
/// within `epsilon` of `p` from `n` draws. Replicate `r` at grid point `i`
/// uses its own stream, so the result does not depend on scheduling.
pub fn monte_carlo_consistency(
    estimator: Estimator,
    p_grid: &[Ratio<u64>],
    spec: &ConsistencySpec,
    n: u64,
    replicates: u64,
    master_seed: u64,
) -> Result<ConsistencyReport> {
    if replicates == 0 || n == 0 {
        return Err(Error::Parameter("n and replicates must be at least 1".into()));
    }
    check_replicates(replicates)?;
    let mut rows = Vec::with_capacity(p_grid.len());
    for (i, &p) in p_grid.iter().enumerate() {
        let urn = Urn::new(p)?;
        let covered = (0..replicates)
            .into_par_iter()
            .map(|r| {
                let mut rng = rng::stream2(master_seed, i as u32, r as u32);
                let sample = Sample {
                    n,
                    whites: urn.sample_with(n, &mut rng),
                    seed: master_seed,
                    stream: ((i as u64) << 32) | r,
                };
                estimator
                    .estimate(&sample, &urn)
                    .map(|est| u64::from(within(est, p, spec.epsilon)))
            })
            .sum::<Result<u64>>()?;
        rows.push(CoverageRow {
            p: ratio_f64(p).to_string(),
            n,
            replicates,
            covered,
            coverage: covered as f64 / replicates as f64,
        });
    }
    let min_coverage = rows.iter().map(|r| r.coverage).fold(1.0, f64::min);
    Ok(ConsistencyReport {
        estimator,
        epsilon: spec.epsilon.to_string(),
        delta: spec.delta.to_string(),
        analytic_n: hoeffding_sample_size(spec),
        n,
        replicates,
        seed: master_seed,
        prng: PRNG_ID.to_string(),
        rows,
        min_coverage,
    })
}

/// Stream ids pack the replicate into 32 bits.
fn check_replicates(replicates: u64) -> Result<()> {
    if replicates > u64::from(u32::MAX) {
        return Err(Error::Parameter("at most 2^32 - 1 replicates".into()));
    }
    Ok(())
}

/// `p = 0.1, 0.2, …, 0.9`.
pub fn decile_grid() -> Vec<Ratio<u64>> {
    (1..=9).map(|k| Ratio::new(k, 10)).collect()
}

/// The two hypotheses of a threshold testing problem: `p > t` and `p <= t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestAnswer {
    Above,
    AtMost,
    Suspend,
}

impl TestAnswer {
    pub fn truth(urn: &Urn, threshold: Ratio<u64>) -> TestAnswer {
        if urn.p() > threshold {
            TestAnswer::Above
        } else {
            TestAnswer::AtMost
        }
    }

    fn negation(self) -> TestAnswer {
        match self {
            TestAnswer::Above => TestAnswer::AtMost,
            TestAnswer::AtMost => TestAnswer::Above,
            TestAnswer::Suspend => TestAnswer::Suspend,
        }
    }
}

/// A test of `p > t` against `p <= t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestMethod {
    /// `Above` iff whites / n > t.
    FrequencyThreshold,
    /// Always answers the true hypothesis.
    AlwaysTrue,
    /// Frequency threshold at even n, the false hypothesis at odd n.
    OddAdversary,
}

impl TestMethod {
    pub fn description(self) -> &'static str {
        match self {
            TestMethod::FrequencyThreshold => "answer p > t iff the observed frequency exceeds t",
            TestMethod::AlwaysTrue => "always answer the true hypothesis",
            TestMethod::OddAdversary => "frequency threshold at even n, the wrong answer at odd n",
        }
    }

    pub fn decide(self, sample: &Sample, threshold: Ratio<u64>, truth: TestAnswer) -> TestAnswer {
        let frequency = || {
            if sample.n > 0 && Ratio::new(sample.whites, sample.n) > threshold {
                TestAnswer::Above
            } else {
                TestAnswer::AtMost
            }
        };
        match self {
            TestMethod::FrequencyThreshold => frequency(),
            TestMethod::AlwaysTrue => truth,
            TestMethod::OddAdversary if sample.n % 2 == 1 => truth.negation(),
            TestMethod::OddAdversary => frequency(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub n: u64,
    pub replicates: u64,
    pub hits: u64,
    pub chance_of_truth: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProgressivenessReport {
    pub test: TestMethod,
    pub description: String,
    pub p: String,
    pub threshold: String,
    pub replicates: u64,
    pub seed: u64,
    pub prng: String,
    pub points: Vec<CurvePoint>,
    /// Largest `chance[i] - chance[j]` over `i < j`, or 0.
    pub max_drop: f64,
    /// Sample sizes realising the largest drop.
    pub drop_between: Option<(u64, u64)>,
    pub drop_tolerance: f64,
    pub progressive: bool,
}

impl ProgressivenessReport {
    pub fn csv(&self) -> String {
        let mut out = String::from("p,n,replicates,chance_of_truth,seed,prng\n");
        for pt in &self.points {
            writeln!(out, "{},{},{},{},{},{}", self.p, pt.n, pt.replicates, pt.chance_of_truth, self.seed, self.prng).unwrap();
        }
        out
    }
}

pub const DEFAULT_DROP_TOLERANCE: f64 = 0.02;

/// Chance that `test` answers truly at each sample size of `n_grid`, with
/// the largest observed drop. The test problem is `p > threshold`.
pub fn progressiveness_curve(
    test: TestMethod,
    urn: &Urn,
    threshold: Ratio<u64>,
    n_grid: &[u64],
    replicates: u64,
    master_seed: u64,
    drop_tolerance: f64,
) -> Result<ProgressivenessReport> {
    if n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Parameter("sample sizes must be strictly increasing".into()));
    }
    if replicates == 0 {
        return Err(Error::Parameter("replicates must be at least 1".into()));
    }
    check_replicates(replicates)?;
    let truth = TestAnswer::truth(urn, threshold);
    let points: Vec<CurvePoint> = n_grid
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let hits = (0..replicates)
                .into_par_iter()
                .filter(|&r| {
                    let mut rng = rng::stream2(master_seed, i as u32, r as u32);
                    let sample = Sample {
                        n,
                        whites: urn.sample_with(n, &mut rng),
                        seed: master_seed,
                        stream: ((i as u64) << 32) | r,
                    };
                    test.decide(&sample, threshold, truth) == truth
                })
                .count() as u64;
            CurvePoint {
                n,
                replicates,
                hits,
                chance_of_truth: hits as f64 / replicates as f64,
            }
        })
        .collect();
    // exact on hit counts: all points share the replicate count
    let mut best: Option<(i64, u64, u64)> = None;
    let mut peak: Option<&CurvePoint> = None;
    for pt in &points {
        if let Some(pk) = peak {
            let drop = pk.hits as i64 - pt.hits as i64;
            if drop > 0 && best.is_none_or(|(b, _, _)| drop > b) {
                best = Some((drop, pk.n, pt.n));
            }
        }
        if peak.is_none_or(|pk| pt.hits > pk.hits) {
            peak = Some(pt);
        }
    }
    let max_drop = best.map_or(0.0, |(d, _, _)| d as f64 / replicates as f64);
    Ok(ProgressivenessReport {
        test,
        description: test.description().to_string(),
        p: ratio_f64(urn.p()).to_string(),
        threshold: threshold.to_string(),
        replicates,
        seed: master_seed,
        prng: PRNG_ID.to_string(),
        points,
        max_drop,
        drop_between: best.map(|(_, a, b)| (a, b)),
        drop_tolerance,
        progressive: max_drop <= drop_tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: u64, d: u64) -> Ratio<u64> {
        Ratio::new(n, d)
    }

    #[test]
    fn degenerate_urns() {
        for seed in 0..5 {
            assert_eq!(draw_sample(&Urn::new(r(0, 1)).unwrap(), 100, seed).whites, 0);
            assert_eq!(draw_sample(&Urn::new(r(1, 1)).unwrap(), 50, seed).whites, 50);
        }
        assert!(Urn::new(r(3, 2)).is_err());
    }

    #[test]
    fn fair_urn_regression() {
        let s = draw_sample(&Urn::new(r(1, 2)).unwrap(), 10_000, 1);
        assert!((4800..=5200).contains(&s.whites));
        assert_eq!(s, draw_sample(&Urn::new(r(1, 2)).unwrap(), 10_000, 1));
        assert_eq!(s.whites, FROZEN_FAIR_WHITES);
    }

    // value produced by the generator at seed 1, frozen
    const FROZEN_FAIR_WHITES: u64 = 4979;

    #[test]
    fn frequency_estimates() {
        let s = |n, whites| Sample { n, whites, seed: 0, stream: 0 };
        assert_eq!(frequency_estimate(&s(4, 1)).unwrap(), r(1, 4));
        assert_eq!(frequency_estimate(&s(185, 0)).unwrap(), r(0, 1));
        assert_eq!(frequency_estimate(&s(3, 3)).unwrap(), r(1, 1));
        assert!(matches!(frequency_estimate(&s(0, 0)), Err(Error::UndefinedEstimate)));
    }

    #[test]
    fn spec_domains() {
        assert!(ConsistencySpec::parse("0", "0.1").is_err());
        assert!(ConsistencySpec::parse("0.1", "1").is_err());
        assert!(ConsistencySpec::parse("0.1", "0").is_err());
        assert!(ConsistencySpec::parse("0.1", "0.05").is_ok());
    }

    #[test]
    fn sample_size_monotone_in_epsilon() {
        for d in ["0.01", "0.05", "0.2"] {
            for e in ["0.01", "0.05", "0.1", "0.2"] {
                let spec = ConsistencySpec::parse(e, d).unwrap();
                let double = ConsistencySpec::new(spec.epsilon * 2, spec.delta).unwrap();
                assert!(hoeffding_sample_size(&spec) >= hoeffding_sample_size(&double));
            }
        }
    }

    #[test]
    fn one_draw_never_gets_close_to_a_half() {
        let spec = ConsistencySpec::parse("0.1", "0.05").unwrap();
        let rep = monte_carlo_consistency(Estimator::Frequency, &[r(1, 2)], &spec, 1, 500, 3).unwrap();
        assert_eq!(rep.rows[0].coverage, 0.0);
        let cheat = monte_carlo_consistency(Estimator::TrueProportion, &decile_grid(), &spec, 1, 50, 3).unwrap();
        assert_eq!(cheat.min_coverage, 1.0);
    }

    #[test]
    fn closeness_is_strict_and_exact() {
        assert!(!within(r(3, 5), r(1, 2), r(1, 10)));
        assert!(within(r(59, 100), r(1, 2), r(1, 10)));
    }

    #[test]
    fn always_true_curve_is_flat() {
        let urn = Urn::new(r(3, 5)).unwrap();
        let rep = progressiveness_curve(TestMethod::AlwaysTrue, &urn, r(1, 2), &[1, 2, 3], 100, 0, 0.02).unwrap();
        assert!(rep.points.iter().all(|p| p.chance_of_truth == 1.0));
        assert_eq!(rep.max_drop, 0.0);
        assert!(rep.progressive);
    }

    #[test]
    fn adversary_drops() {
        let urn = Urn::new(r(3, 5)).unwrap();
        let grid: Vec<u64> = (10..=20).collect();
        let rep = progressiveness_curve(TestMethod::OddAdversary, &urn, r(1, 2), &grid, 2000, 5, 0.02).unwrap();
        assert!(rep.max_drop >= 0.1);
        assert!(!rep.progressive);
        assert_eq!(rep.points[1].hits, 0);
    }

    #[test]
    fn rejects_unsorted_grid() {
        let urn = Urn::new(r(3, 5)).unwrap();
        assert!(progressiveness_curve(TestMethod::AlwaysTrue, &urn, r(1, 2), &[2, 2], 1, 0, 0.02).is_err());
    }
}
