//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p convlab-cli --test acceptance`. The process fails
//! when a criterion fails, except for those listed in `KNOWN_FAILURES`,
//! whose failure is reported but expected (see the README).

use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use convlab::bayes::{bayes_consistency_sim, consistency_verdict, DiscretePrior};
use convlab::convergence::{checker_oracle_agreement, theorem_property_test, AgreementReport, Mode, OracleConfig};
use convlab::dsl::{compile, parse, print, random_document, DiagnosticCode};
use convlab::numeric::parse_rational;
use convlab::problem::{World, BLACK, NONBLACK};
use convlab::rng;
use convlab::statistics::{
    decile_grid, hoeffding_sample_size, monte_carlo_consistency, progressiveness_curve, ConsistencySpec, Estimator,
    TestMethod, Urn,
};
use num_rational::Ratio;
use num_traits::One;
use serde_json::Value;

/// Uniform convergence does not entail stability: a method can give the
/// truth, retract it, and return to it for good within a bounded time.
const KNOWN_FAILURES: &[u32] = &[4];

const SEED: u64 = 1;

type Outcome = Result<String, String>;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_convlab"))
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn convlab(args: &[&str], out: &Path) -> Output {
    bin()
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("CONVLAB_SEED")
        .env_remove("CONVLAB_CONFIG")
        .output()
        .expect("convlab runs")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).expect("report exists")).expect("report is JSON")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {:.2} s, limit {:.0} s", t.as_secs_f64(), limit.as_secs_f64()))
}

fn raven_case_study() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let start = Instant::now();
    let run = |args: &[&str]| {
        let out = convlab(args, dir.path());
        let report = read_json(&dir.path().join("check.json"));
        (out.status.code(), report)
    };
    let (code, _) = run(&["check", "--method", "ordinary_induction", "--mode", "pointwise,stable,stable_pointwise"]);
    ensure(code == Some(0), || format!("ordinary induction: exit {code:?}"))?;
    for m in ["occasional_counterinduction:2", "occasional_counterinduction:1,3"] {
        let (code, report) = run(&["check", "--method", m, "--mode", "stable_pointwise"]);
        ensure(code == Some(1), || format!("{m}: exit {code:?}"))?;
        let rec = &report["report"][0];
        ensure(rec["verdict"] == "fail" && rec["replayed"] == true && rec["witness"].is_object(), || {
            format!("{m}: witness missing or not replayed: {rec}")
        })?;
    }
    let (code, _) = run(&["check", "--method", "skeptic", "--mode", "pointwise"]);
    ensure(code == Some(1), || format!("skeptic pointwise: exit {code:?}"))?;
    let all = [
        "ordinary_induction",
        "occasional_counterinduction:2",
        "occasional_counterinduction:1,3",
        "skeptic",
        "delayed_induction:2",
    ];
    for m in all {
        let (code, report) = run(&["check", "--method", m, "--mode", "uniform"]);
        ensure(code == Some(1) && report["report"][0]["replayed"] == true, || {
            format!("{m} uniform: exit {code:?}")
        })?;
    }
    let out = convlab(&["achieve", "raven"], dir.path());
    let stdout = String::from_utf8_lossy(&out.stdout);
    let report = read_json(&dir.path().join("achieve.json"));
    ensure(
        out.status.code() == Some(0)
            && stdout.contains("highest achievable: pointwise convergence with stability")
            && report["report"][0]["highest_achievable"] == "stable_pointwise",
        || format!("achieve raven: {stdout}"),
    )?;
    within(Duration::from_secs(1), start)?;
    Ok(format!("{} methods checked, highest = stable_pointwise, {:.2} s", all.len(), start.elapsed().as_secs_f64()))
}

fn theorem_replication() -> Outcome {
    let start = Instant::now();
    let r = theorem_property_test(10_000, SEED).map_err(|e| e.to_string())?;
    ensure(r.counterexamples.is_empty(), || format!("{} counterexamples", r.counterexamples.len()))?;
    ensure(r.stable_pointwise > 0, || "no stable pointwise method was generated".into())?;
    within(Duration::from_secs(30), start)?;
    Ok(format!(
        "{} methods, {} stable+pointwise, 0 counterexamples, {:.1} s",
        r.trials,
        r.stable_pointwise,
        start.elapsed().as_secs_f64()
    ))
}

fn agreement(report: &AgreementReport, elapsed: Duration) -> Outcome {
    ensure(report.pairs >= 1000, || format!("only {} pairs", report.pairs))?;
    ensure(report.contradictions.is_empty(), || {
        format!("{} contradictions, first {:?}", report.contradictions.len(), report.contradictions[0])
    })?;
    ensure(report.replay_failures.is_empty(), || {
        format!("{} witnesses fail to replay", report.replay_failures.len())
    })?;
    ensure(elapsed < Duration::from_secs(120), || format!("took {:.1} s", elapsed.as_secs_f64()))?;
    let passes: Vec<String> = Mode::ALL
        .iter()
        .zip(report.passes)
        .map(|(m, n)| format!("{m} {n}"))
        .collect();
    Ok(format!(
        "{} pairs, 0 contradictions, 0 replay failures, passes: {}, {:.1} s",
        report.pairs,
        passes.join(", "),
        elapsed.as_secs_f64()
    ))
}

fn hierarchy(report: &AgreementReport) -> Outcome {
    let u = &report.uniform_not_stable;
    let s = &report.stable_pointwise_not_pointwise;
    if u.is_empty() && s.is_empty() {
        return Ok(format!("{} pairs, no violations", report.pairs));
    }
    let mut msg = format!(
        "{} pairs: {} uniform but not stable_pointwise, {} stable_pointwise but not pointwise",
        report.pairs,
        u.len(),
        s.len()
    );
    if let Some(d) = u.first().or(s.first()) {
        let (m, p) = (&d.method, &d.problem);
        let states: Vec<String> = (0..m.len())
            .map(|q| {
                let next: Vec<&str> = m.transitions[q].iter().map(|&r| m.states[r].as_str()).collect();
                format!("{} [{}] -> {}", m.states[q], m.outputs[q].render(p), next.join("/"))
            })
            .collect();
        msg.push_str(&format!("; first: pair {} ({}): method {}", d.index, d.kind, states.join(", ")));
        if let Some(w) = &d.witness {
            msg.push_str(&format!(", witness {}", w.compact()));
        }
    }
    Err(msg)
}

fn statistical_consistency() -> Outcome {
    let start = Instant::now();
    let spec = ConsistencySpec::parse("0.1", "0.05").map_err(|e| e.to_string())?;
    let n = hoeffding_sample_size(&spec);
    ensure(n == 185, || format!("Hoeffding n = {n}"))?;
    let run = || monte_carlo_consistency(Estimator::Frequency, &decile_grid(), &spec, n, 10_000, SEED);
    let a = run().map_err(|e| e.to_string())?;
    let b = run().map_err(|e| e.to_string())?;
    ensure(a == b, || "reruns differ".into())?;
    let worst = a.rows.iter().min_by(|x, y| x.coverage.total_cmp(&y.coverage)).unwrap();
    ensure(a.min_coverage >= 0.94, || format!("coverage {} at p = {}", worst.coverage, worst.p))?;
    within(Duration::from_secs(60), start)?;
    Ok(format!(
        "n = 185, min coverage {:.4} (p = {}), deterministic, {:.1} s",
        a.min_coverage,
        worst.p,
        start.elapsed().as_secs_f64()
    ))
}

fn bayesian_consistency() -> Outcome {
    let prior = DiscretePrior::geometric(64);
    let black = World::constant(vec![BLACK]).unwrap();
    let tr = bayes_consistency_sim(&prior, &black, 10).map_err(|e| e.to_string())?;
    let m10 = tr.points[10].mass();
    let closed = parse_rational("1024/1025").unwrap();
    ensure(m10 == closed, || format!("all-black credence at 10 is {m10}"))?;
    ensure(m10 >= parse_rational("0.99").unwrap(), || format!("{m10} < 0.99"))?;
    for k in 1..=8 {
        let mut prefix = vec![BLACK; k - 1];
        prefix.push(NONBLACK);
        let w = World::new(prefix, vec![BLACK]).unwrap();
        let tr = bayes_consistency_sim(&prior, &w, k).map_err(|e| e.to_string())?;
        ensure(tr.points[k].mass().is_one(), || format!("cx at {k}: credence {}", tr.points[k].decimal))?;
    }
    let mut zero = DiscretePrior::geometric(64);
    zero.tail += &zero.all_black;
    zero.all_black = parse_rational("0").unwrap();
    let v = consistency_verdict(&zero, 10, &parse_rational("0.99").unwrap(), 6, 3).map_err(|e| e.to_string())?;
    ensure(!v.pass, || "zero prior on the all-black world was not flagged".into())?;
    Ok(format!(
        "all-black credence at 10 = 1024/1025 = {:.5}, certainty at k for k = 1..8, zero-prior prior flagged",
        tr.points[10].decimal
    ))
}

fn progressiveness() -> Outcome {
    let start = Instant::now();
    let urn = Urn::parse("0.6").unwrap();
    let half = Ratio::new(1, 2);
    let grid: Vec<u64> = (10..=200).step_by(10).collect();
    let f = progressiveness_curve(TestMethod::FrequencyThreshold, &urn, half, &grid, 20_000, SEED, 0.02)
        .map_err(|e| e.to_string())?;
    ensure(f.max_drop <= 0.02, || format!("frequency test max drop {}", f.max_drop))?;
    // the spec grid has only even sizes, where the adversary is the frequency test
    let odd_grid: Vec<u64> = (10..=200).step_by(5).collect();
    let adv = progressiveness_curve(TestMethod::OddAdversary, &urn, half, &odd_grid, 20_000, SEED, 0.02)
        .map_err(|e| e.to_string())?;
    ensure(adv.max_drop >= 0.1 && !adv.progressive, || format!("adversary max drop {}", adv.max_drop))?;
    Ok(format!(
        "frequency test max drop {:.4}, odd-n adversary max drop {:.4} (flagged), {:.1} s",
        f.max_drop,
        adv.max_drop,
        start.elapsed().as_secs_f64()
    ))
}

fn dsl() -> Outcome {
    let dir = fixtures();
    let read = |name: &str| std::fs::read_to_string(dir.join(name)).unwrap();
    for name in ["raven.cvl", "raven_methods.cvl", "first_observation.cvl"] {
        let text = read(name);
        let doc = parse(&text).map_err(|d| format!("{name}: {d:?}"))?;
        ensure(print(&doc) == text, || format!("{name} is not in canonical form"))?;
        compile(&text).map_err(|d| format!("{name}: {d:?}"))?;
    }
    let compact = parse(&read("raven_compact.cvl")).map_err(|d| format!("{d:?}"))?;
    ensure(print(&compact) == read("raven.cvl"), || "raven_compact.cvl does not print as raven.cvl".into())?;
    for i in 0..500 {
        let doc = random_document(&mut rng::stream(SEED, i), 6);
        let text = print(&doc);
        let back = parse(&text).map_err(|d| format!("random document {i}: {d:?}"))?;
        ensure(back == doc, || format!("random document {i} does not round-trip"))?;
    }
    let mut covered = std::collections::BTreeSet::new();
    for entry in std::fs::read_dir(dir.join("invalid")).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        let diags = compile(&text).err().unwrap_or_default();
        let expected = text
            .lines()
            .next()
            .and_then(|l| l.strip_prefix("# expect: "))
            .and_then(DiagnosticCode::parse);
        ensure(expected.is_some_and(|c| diags.iter().any(|d| d.code == c)), || {
            format!("{} does not raise its expected diagnostic", path.display())
        })?;
        covered.extend(diags.iter().map(|d| d.code));
    }
    let missing: Vec<_> = DiagnosticCode::ALL.iter().filter(|c| !covered.contains(c)).collect();
    ensure(missing.is_empty(), || format!("codes without a negative fixture: {missing:?}"))?;
    Ok(format!(
        "fixtures canonical, 500 random documents round-trip, {} codes covered",
        DiagnosticCode::ALL.len()
    ))
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap())
        })
        .collect();
    out.sort();
    out
}

fn reproducibility() -> Outcome {
    let fixture = fixtures().join("raven_methods.cvl");
    let fixture = fixture.to_str().unwrap();
    let steps: Vec<Vec<&str>> = vec![
        vec!["check", fixture],
        vec!["achieve", "raven"],
        vec!["simulate", "consistency", "--seed", "1", "--replicates", "2000", "--format", "json,csv,svg"],
        vec!["simulate", "progressiveness", "--seed", "1", "--replicates", "2000", "--format", "json,csv,svg"],
        vec!["simulate", "bayes", "--seed", "1", "--format", "json,csv,svg"],
        vec!["report", "out/consistency.json"],
        vec!["report", "out/progressiveness.json"],
        vec!["report", "out/bayes.json"],
    ];
    let run = |root: &Path| -> Vec<(Option<i32>, Vec<u8>)> {
        steps
            .iter()
            .map(|args| {
                let o = bin()
                    .args(args)
                    .args(["--out", "out"])
                    .current_dir(root)
                    .env_remove("CONVLAB_SEED")
                    .env_remove("CONVLAB_CONFIG")
                    .output()
                    .expect("convlab runs");
                (o.status.code(), o.stdout)
            })
            .collect()
    };
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let (ra, rb) = (run(a.path()), run(b.path()));
    for (i, (x, y)) in ra.iter().zip(&rb).enumerate() {
        ensure(x == y, || format!("`{}`: exit code or summary differs", steps[i].join(" ")))?;
        ensure(matches!(x.0, Some(0 | 1)), || format!("`{}` exited with {:?}", steps[i].join(" "), x.0))?;
    }
    let (fa, fb) = (files(&a.path().join("out")), files(&b.path().join("out")));
    ensure(fa.len() >= 14, || format!("only {} output files", fa.len()))?;
    for ((na, ba), (nb, bb)) in fa.iter().zip(&fb) {
        ensure(na == nb && ba == bb, || format!("{na} differs between reruns"))?;
    }
    Ok(format!("{} commands rerun, {} output files byte-identical", steps.len(), fa.len()))
}

fn main() {
    let mut unexpected = Vec::new();
    let mut agreement_report = None;
    let criteria: Vec<(u32, &str)> = vec![
        (1, "raven case study"),
        (2, "theorem replication"),
        (3, "checker/oracle agreement"),
        (4, "hierarchy monotonicity"),
        (5, "statistical consistency"),
        (6, "Bayesian consistency"),
        (7, "progressiveness"),
        (8, "DSL round-trip and diagnostics"),
        (9, "reproducibility"),
    ];
    for (id, name) in criteria {
        let outcome = match id {
            1 => raven_case_study(),
            2 => theorem_replication(),
            3 => {
                let start = Instant::now();
                let r = checker_oracle_agreement(1000, SEED, OracleConfig::new(8, 3));
                let elapsed = start.elapsed();
                match r {
                    Ok(r) => {
                        let o = agreement(&r, elapsed);
                        agreement_report = Some(r);
                        o
                    }
                    Err(e) => Err(e.to_string()),
                }
            }
            4 => match &agreement_report {
                Some(r) => hierarchy(r),
                None => Err("no corpus".into()),
            },
            5 => statistical_consistency(),
            6 => bayesian_consistency(),
            7 => progressiveness(),
            8 => dsl(),
            _ => reproducibility(),
        };
        let known = KNOWN_FAILURES.contains(&id);
        match outcome {
            Ok(detail) => {
                println!("PASS {id} {name}: {detail}");
                if known {
                    println!("     note: criterion {id} is listed as a known failure but passed");
                }
            }
            Err(detail) => {
                println!("FAIL {id} {name}: {detail}");
                if known {
                    println!("     known failure, see the README");
                } else {
                    unexpected.push(id);
                }
            }
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
