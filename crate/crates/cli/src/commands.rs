use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use convlab::bayes::{bayes_consistency_sim, consistency_verdict, traces_csv, BayesVerdict, DiscretePrior, PosteriorTrace};
use convlab::convergence::{self, achievability, replay, Mode, VerdictRecord};
use convlab::dsl::{compile, Elaborated};
use convlab::methods::builtin_method;
use convlab::numeric::{parse_rational, parse_ratio_u64};
use convlab::problem::{builtin_problem, EmpiricalProblem, World, BLACK, NONBLACK};
use convlab::statistics::{
    decile_grid, hoeffding_sample_size, monte_carlo_consistency, progressiveness_curve, ConsistencyReport,
    ConsistencySpec, Estimator, ProgressivenessReport, TestMethod, Urn, DEFAULT_DROP_TOLERANCE,
};
use convlab::InferenceMethod;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::args::{Cli, Command, Format, SimulateKind};
use crate::output::{csv_field, line_chart, Envelope, Outputs};
use crate::settings::{RunConfig, Settings};
use crate::{Exit, Failure};

pub fn dispatch(cli: Cli) -> Result<Exit, Failure> {
    let settings = Settings::resolve(cli.common)?;
    match cli.command {
        Command::Check { files, methods, modes } => check(&settings, &files, methods, modes),
        Command::Achieve { target, problem } => achieve(&settings, &target, problem.as_deref()),
        Command::Simulate { kind } => match kind {
            SimulateKind::Consistency { n, estimator, margin } => consistency(&settings, n, estimator, margin),
            SimulateKind::Progressiveness {
                test,
                p,
                n_grid,
                drop_tolerance,
            } => progressiveness(&settings, test, p, n_grid, drop_tolerance),
            SimulateKind::Bayes {
                prior,
                horizon,
                max_prefix,
                max_period,
                cx_max,
            } => bayes(&settings, prior, horizon, max_prefix, max_period, cx_max),
        },
        Command::Report { inputs } => report(&settings, &inputs),
    }
}

/// Compiles every file, printing diagnostics to stderr.
fn load(files: &[PathBuf], config: &mut RunConfig) -> Result<Elaborated, Failure> {
    let mut all = Elaborated {
        problems: Vec::new(),
        methods: Vec::new(),
    };
    let mut errors = 0;
    for path in files {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
        config.input(path, text.as_bytes());
        match compile(&text) {
            Ok(e) => {
                all.problems.extend(e.problems);
                all.methods.extend(e.methods);
            }
            Err(diags) => {
                for d in &diags {
                    eprint!("{}", d.render(&text, &path.display().to_string()));
                }
                errors += diags.len();
            }
        }
    }
    if errors > 0 {
        return Err(Failure::Invalid(format!("{errors} error(s) in the input")));
    }
    Ok(all)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub method: String,
    pub problem: String,
    #[serde(flatten)]
    pub verdict: VerdictRecord,
    /// For failures: whether an independent simulation confirms the witness.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub replayed: Option<bool>,
}

fn check(settings: &Settings, files: &[PathBuf], names: Vec<String>, modes: Vec<Mode>) -> Result<Exit, Failure> {
    let outputs = Outputs::new(settings.out.clone(), settings.formats(&[Format::Json], &[Format::Json], "check")?);
    let mut config = RunConfig::new("check");
    let doc = load(files, &mut config)?;
    let names = if names.is_empty() {
        settings.file.list("method")?.unwrap_or_default()
    } else {
        names
    };
    let modes = match (modes.is_empty(), settings.file.list("mode")?) {
        (false, _) => modes,
        (true, Some(list)) => list
            .iter()
            .map(|m| m.parse::<Mode>().map_err(Failure::Usage))
            .collect::<Result<_, _>>()?,
        (true, None) => Mode::ALL.to_vec(),
    };
    let methods: Vec<InferenceMethod> = if names.is_empty() {
        if doc.methods.is_empty() {
            return Err(Failure::Usage("nothing to check: give --method or files with methods".into()));
        }
        doc.methods.clone()
    } else {
        names
            .iter()
            .map(|n| match doc.method(n) {
                Some(m) => Ok(m.clone()),
                None => builtin_method(n)?.ok_or_else(|| Failure::Usage(format!("unknown method `{n}`"))),
            })
            .collect::<Result<_, _>>()?
    };
    config.set("methods", methods.iter().map(|m| m.name.clone()).collect::<Vec<_>>());
    config.set("modes", modes.iter().map(|m| m.as_str()).collect::<Vec<_>>());

    let mut exit = Exit::Pass;
    let mut records = Vec::new();
    for m in &methods {
        let problem = doc.problem(&m.problem).ok_or_else(|| {
            Failure::Invalid(format!("method `{}` targets unknown problem `{}`", m.name, m.problem))
        })?;
        for &mode in &modes {
            let v = convergence::check(m, &problem, mode)?;
            let record = v.record(&problem.alphabet);
            let replayed = if v.passed() {
                None
            } else {
                Some(replay(m, &problem, &v)?)
            };
            let mut line = format!("{} on {}: {} ", m.name, problem.name, mode);
            match (&record.witness, record.times) {
                (Some(w), Some((i, j))) => {
                    line.push_str(&format!("fail, witness {} at times {i} and {j}", w.compact()));
                    if let Some(alt) = &record.alternate_witness {
                        line.push_str(&format!(" (and {})", alt.compact()));
                    }
                }
                _ if v.passed() => {
                    line.push_str("pass");
                    if let Some(n) = record.modulus {
                        line.push_str(&format!(", modulus {n}"));
                    }
                }
                _ => line.push_str("fail"),
            }
            println!("{line}");
            if replayed == Some(false) {
                return Err(Failure::Invalid(format!(
                    "internal error: the {mode} witness for {} does not replay",
                    m.name
                )));
            }
            exit = exit.and(Exit::from_pass(v.passed()));
            records.push(CheckRecord {
                method: m.name.clone(),
                problem: problem.name.clone(),
                verdict: record,
                replayed,
            });
        }
    }
    let env = Envelope::new("check", None, &config, serde_json::to_value(&records).expect("serializable"));
    outputs.write("check", Some(&env), None, None)?;
    Ok(exit)
}

fn achieve(settings: &Settings, target: &str, only: Option<&str>) -> Result<Exit, Failure> {
    let outputs = Outputs::new(settings.out.clone(), settings.formats(&[Format::Json], &[Format::Json], "achieve")?);
    let mut config = RunConfig::new("achieve");
    let path = Path::new(target);
    let problems: Vec<EmpiricalProblem> = if path.is_file() {
        load(&[path.to_path_buf()], &mut config)?.problems
    } else if let Some(p) = builtin_problem(target) {
        config.set("problem", target);
        vec![p]
    } else {
        return Err(Failure::Usage(format!("`{target}` is neither a file nor a built-in problem")));
    };
    let problems: Vec<_> = problems.into_iter().filter(|p| only.is_none_or(|n| p.name == n)).collect();
    if problems.is_empty() {
        return Err(Failure::Usage(match only {
            Some(n) => format!("no problem named `{n}` in {target}"),
            None => format!("{target} declares no problems"),
        }));
    }
    if let Some(n) = only {
        config.set("only", n);
    }
    let mut reports = Vec::new();
    for p in &problems {
        let r = achievability(p)?;
        println!("{}", r.summary());
        reports.push(r);
    }
    let env = Envelope::new("achieve", None, &config, serde_json::to_value(&reports).expect("serializable"));
    outputs.write("achieve", Some(&env), None, None)?;
    Ok(Exit::Pass)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyRun {
    pub consistency: ConsistencyReport,
    pub margin: f64,
    /// `1 - delta - margin`.
    pub target_coverage: f64,
    pub pass: bool,
}

fn simulate_outputs(settings: &Settings) -> Result<Outputs, Failure> {
    let formats = settings.formats(&[Format::Json, Format::Csv], &[Format::Json, Format::Csv, Format::Svg], "simulate")?;
    Ok(Outputs::new(settings.out.clone(), formats))
}

fn consistency(settings: &Settings, n: Option<String>, estimator: Option<String>, margin: Option<f64>) -> Result<Exit, Failure> {
    let outputs = simulate_outputs(settings)?;
    let seed = settings.require_seed()?;
    let file = &settings.file;
    let epsilon = settings.epsilon.clone().unwrap_or_else(|| "0.1".into());
    let delta = settings.delta.clone().unwrap_or_else(|| "0.05".into());
    let spec = ConsistencySpec::parse(&epsilon, &delta)?;
    let replicates = settings.replicates.unwrap_or(10_000);
    let estimator_name = estimator.or(file.text("estimator")?).unwrap_or_else(|| "frequency".into());
    let estimator: Estimator = serde_json::from_value(Value::String(estimator_name.clone()))
        .map_err(|_| Failure::Usage(format!("unknown estimator `{estimator_name}`")))?;
    let margin = margin.or(file.f64("margin")?).unwrap_or(0.01);
    if !(0.0..1.0).contains(&margin) {
        return Err(Failure::Usage("margin must lie in [0, 1)".into()));
    }
    let n_text = n.or(file.text("n")?).unwrap_or_else(|| "auto".into());
    let n = match n_text.as_str() {
        "auto" => hoeffding_sample_size(&spec),
        s => s.parse().map_err(|_| Failure::Usage(format!("--n must be `auto` or an integer, not `{s}`")))?,
    };

    let mut config = RunConfig::new("simulate consistency");
    config.set("seed", seed);
    config.set("replicates", replicates);
    config.set("epsilon", spec.epsilon.to_string());
    config.set("delta", spec.delta.to_string());
    config.set("estimator", estimator_name);
    config.set("margin", margin);
    config.set("n", n);

    let report = monte_carlo_consistency(estimator, &decile_grid(), &spec, n, replicates, seed)?;
    let delta_f = *spec.delta.numer() as f64 / *spec.delta.denom() as f64;
    let target = 1.0 - delta_f - margin;
    let pass = report.min_coverage >= target;
    println!(
        "consistency: n = {} (Hoeffding bound {}), {} replicates per p, min coverage {:.4} vs target {:.4}: {}",
        report.n,
        report.analytic_n,
        replicates,
        report.min_coverage,
        target,
        if pass { "pass" } else { "fail" }
    );
    let run = ConsistencyRun {
        consistency: report,
        margin,
        target_coverage: target,
        pass,
    };
    let csv = run.consistency.csv();
    let svg = outputs.wants(Format::Svg).then(|| consistency_chart(&[("", &run)]));
    let env = Envelope::new("consistency", Some(seed), &config, serde_json::to_value(&run).expect("serializable"));
    outputs.write("consistency", Some(&env), Some(&csv), svg.as_deref())?;
    Ok(Exit::from_pass(pass))
}

fn parse_grid(s: &str) -> Result<Vec<u64>, Failure> {
    let bad = || Failure::Usage(format!("bad sample-size grid `{s}`: use start:stop:step or a comma list"));
    let parts: Vec<&str> = s.split(':').collect();
    let grid: Vec<u64> = match parts.as_slice() {
        [a, b, c] => {
            let (a, b, c): (u64, u64, u64) = (
                a.trim().parse().map_err(|_| bad())?,
                b.trim().parse().map_err(|_| bad())?,
                c.trim().parse().map_err(|_| bad())?,
            );
            if c == 0 {
                return Err(bad());
            }
            (a..=b).step_by(c as usize).collect()
        }
        [list] => list
            .split(',')
            .map(|x| x.trim().parse().map_err(|_| bad()))
            .collect::<Result<_, _>>()?,
        _ => return Err(bad()),
    };
    if grid.is_empty() || grid.contains(&0) {
        return Err(bad());
    }
    Ok(grid)
}

fn progressiveness(
    settings: &Settings,
    test: Option<String>,
    p: Option<String>,
    n_grid: Option<String>,
    drop_tolerance: Option<f64>,
) -> Result<Exit, Failure> {
    let outputs = simulate_outputs(settings)?;
    let seed = settings.require_seed()?;
    let file = &settings.file;
    let test_name = test.or(file.text("test")?).unwrap_or_else(|| "frequency_threshold".into());
    let test: TestMethod = serde_json::from_value(Value::String(test_name.clone()))
        .map_err(|_| Failure::Usage(format!("unknown test `{test_name}`")))?;
    let p = p.or(file.text("p")?).unwrap_or_else(|| "0.6".into());
    let urn = Urn::parse(&p)?;
    let threshold = parse_ratio_u64(settings.threshold.as_deref().unwrap_or("1/2"))?;
    let grid_text = n_grid.or(file.text("n_grid")?).unwrap_or_else(|| "10:200:10".into());
    let grid = parse_grid(&grid_text)?;
    let replicates = settings.replicates.unwrap_or(20_000);
    let tolerance = drop_tolerance.or(file.f64("drop_tolerance")?).unwrap_or(DEFAULT_DROP_TOLERANCE);

    let mut config = RunConfig::new("simulate progressiveness");
    config.set("seed", seed);
    config.set("replicates", replicates);
    config.set("test", test_name);
    config.set("p", urn.p().to_string());
    config.set("threshold", threshold.to_string());
    config.set("n_grid", grid.clone());
    config.set("drop_tolerance", tolerance);

    let report = progressiveness_curve(test, &urn, threshold, &grid, replicates, seed, tolerance)?;
    let mut line = format!(
        "progressiveness: {} at p = {}, threshold {}: max drop {:.4}",
        report.description, report.p, report.threshold, report.max_drop
    );
    if let Some((a, b)) = report.drop_between {
        line.push_str(&format!(" (n = {a} to {b})"));
    }
    line.push_str(&format!(
        ", tolerance {}: {}",
        tolerance,
        if report.progressive { "pass" } else { "fail" }
    ));
    println!("{line}");
    let csv = report.csv();
    let svg = outputs.wants(Format::Svg).then(|| progressiveness_chart(&[("", &report)]));
    let env = Envelope::new("progressiveness", Some(seed), &config, serde_json::to_value(&report).expect("serializable"));
    outputs.write("progressiveness", Some(&env), Some(&csv), svg.as_deref())?;
    Ok(Exit::from_pass(report.progressive))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BayesRun {
    pub prior: String,
    pub verdict: BayesVerdict,
    /// The all-black world and the first-counterexample worlds.
    pub traces: Vec<PosteriorTrace>,
}

fn load_prior(spec: &str, config: &mut RunConfig) -> Result<DiscretePrior, Failure> {
    let size = |k: &str| {
        k.parse::<usize>()
            .map_err(|_| Failure::Usage(format!("bad truncation in prior `{spec}`")))
    };
    if let Some(k) = spec.strip_prefix("geometric:") {
        return Ok(DiscretePrior::geometric(size(k)?));
    }
    if let Some(k) = spec.strip_prefix("uniform:") {
        return Ok(DiscretePrior::uniform_counterexamples(size(k)?));
    }
    let path = Path::new(spec);
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("prior `{spec}` is not geometric:K, uniform:K or a readable file: {e}")))?;
    config.input(path, text.as_bytes());
    DiscretePrior::from_json(&text).map_err(|e| Failure::Invalid(format!("{spec}: {e}")))
}

fn bayes(
    settings: &Settings,
    prior: Option<String>,
    horizon: Option<usize>,
    max_prefix: Option<usize>,
    max_period: Option<usize>,
    cx_max: Option<usize>,
) -> Result<Exit, Failure> {
    let outputs = simulate_outputs(settings)?;
    let seed = settings.require_seed()?;
    let file = &settings.file;
    let mut config = RunConfig::new("simulate bayes");
    let prior_spec = prior.or(file.text("prior")?).unwrap_or_else(|| "geometric:64".into());
    let prior_dist = load_prior(&prior_spec, &mut config)?;
    let threshold_text = settings.threshold.clone().unwrap_or_else(|| "0.99".into());
    let threshold = parse_rational(&threshold_text)?;
    if threshold < parse_rational("0")? || threshold > parse_rational("1")? {
        return Err(Failure::Usage("the credence threshold must lie in [0, 1]".into()));
    }
    let horizon = horizon.or(file.usize("horizon")?).unwrap_or(10);
    let max_prefix = max_prefix.or(file.usize("max_prefix")?).unwrap_or(6);
    let max_period = max_period.or(file.usize("max_period")?).unwrap_or(3);
    let cx_max = cx_max.or(file.usize("cx_max")?).unwrap_or(8);
    if max_prefix + max_period > 20 {
        return Err(Failure::Usage("max_prefix + max_period is capped at 20".into()));
    }
    config.set("seed", seed);
    config.set("prior", prior_spec.clone());
    config.set("threshold", threshold.to_string());
    config.set("horizon", horizon);
    config.set("max_prefix", max_prefix);
    config.set("max_period", max_period);
    config.set("cx_max", cx_max);

    let verdict = consistency_verdict(&prior_dist, horizon, &threshold, max_prefix, max_period)?;
    let trace_len = horizon.max(cx_max);
    let mut worlds = vec![World::constant(vec![BLACK])?];
    for k in 1..=cx_max {
        let mut prefix = vec![BLACK; k - 1];
        prefix.push(NONBLACK);
        worlds.push(World::new(prefix, vec![BLACK])?);
    }
    let traces = worlds
        .iter()
        .map(|w| bayes_consistency_sim(&prior_dist, w, trace_len))
        .collect::<convlab::Result<Vec<_>>>()?;

    println!(
        "bayes: prior {prior_spec}, credence in the truth >= {threshold_text} after {horizon} observations in {} of {} worlds: {}",
        verdict.worlds_checked - verdict.failure_count,
        verdict.worlds_checked,
        if verdict.pass { "pass" } else { "fail" }
    );
    for f in &verdict.failures {
        println!("  {}: {}", f.world.compact(), f.reason);
    }
    eprintln!(
        "warning: worlds enumerated up to prefix length {max_prefix} and period {max_period}; longer worlds were not checked"
    );
    let pass = verdict.pass;
    let run = BayesRun {
        prior: prior_spec,
        verdict,
        traces,
    };
    let csv = traces_csv(&run.traces);
    let svg = outputs.wants(Format::Svg).then(|| bayes_chart(&[("", &run)]));
    let env = Envelope::new("bayes", Some(seed), &config, serde_json::to_value(&run).expect("serializable"));
    outputs.write("bayes", Some(&env), Some(&csv), svg.as_deref())?;
    Ok(Exit::from_pass(pass))
}

fn labelled(source: &str, name: &str) -> String {
    if source.is_empty() {
        name.to_string()
    } else {
        format!("{source}: {name}")
    }
}

fn consistency_chart(runs: &[(&str, &ConsistencyRun)]) -> String {
    let mut by_p: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for (_, run) in runs {
        for row in &run.consistency.rows {
            by_p.entry(row.p.clone()).or_default().push((row.n as f64, row.coverage));
        }
    }
    let mut series: Vec<(String, Vec<(f64, f64)>)> = by_p
        .into_iter()
        .map(|(p, mut pts)| {
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            (format!("p = {p}"), pts)
        })
        .collect();
    series.sort_by(|a, b| a.0.cmp(&b.0));
    line_chart("Coverage against sample size", "n", "coverage", &series)
}

fn progressiveness_chart(reports: &[(&str, &ProgressivenessReport)]) -> String {
    let series: Vec<(String, Vec<(f64, f64)>)> = reports
        .iter()
        .map(|(src, r)| {
            let test = serde_json::to_value(r.test).expect("serializable");
            let name = format!("{} p = {}", test.as_str().unwrap_or_default(), r.p);
            (labelled(src, &name), r.points.iter().map(|pt| (pt.n as f64, pt.chance_of_truth)).collect())
        })
        .collect();
    line_chart("Chance of a true answer against sample size", "n", "chance of truth", &series)
}

fn bayes_chart(runs: &[(&str, &BayesRun)]) -> String {
    let series: Vec<(String, Vec<(f64, f64)>)> = runs
        .iter()
        .flat_map(|(src, run)| {
            run.traces.iter().map(move |t| {
                (
                    labelled(src, &t.world.compact()),
                    t.points.iter().map(|p| (p.length as f64, p.decimal)).collect(),
                )
            })
        })
        .collect();
    line_chart("Credence in the truth against evidence length", "observations", "posterior", &series)
}

fn schema<T: for<'de> Deserialize<'de>>(path: &Path, env: &Envelope) -> Result<T, Failure> {
    serde_json::from_value(env.report.clone())
        .map_err(|e| Failure::Usage(format!("{}: not a {} report: {e}", path.display(), env.kind)))
}

fn report(settings: &Settings, inputs: &[PathBuf]) -> Result<Exit, Failure> {
    let outputs = Outputs::new(
        settings.out.clone(),
        settings.formats(&[Format::Csv, Format::Svg], &[Format::Csv, Format::Svg], "report")?,
    );
    let mut config = RunConfig::new("report");
    let mut envs = Vec::new();
    for path in inputs {
        let bytes = std::fs::read(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
        config.input(path, &bytes);
        envs.push((path.display().to_string(), Envelope::read(path)?));
    }
    let kind = envs[0].1.kind.clone();
    if let Some((p, e)) = envs.iter().find(|(_, e)| e.kind != kind) {
        return Err(Failure::Usage(format!(
            "cannot merge reports of different kinds: {} is {kind}, {p} is {}",
            envs[0].0, e.kind
        )));
    }
    let (csv, svg, rows) = match kind.as_str() {
        "consistency" => {
            let runs: Vec<(String, ConsistencyRun)> = envs
                .iter()
                .map(|(p, e)| Ok((p.clone(), schema(Path::new(p), e)?)))
                .collect::<Result<_, Failure>>()?;
            let mut csv = String::from("source,estimator,p,n,replicates,coverage,seed,prng\n");
            let mut rows = 0;
            for (src, run) in &runs {
                let r = &run.consistency;
                let est = serde_json::to_value(r.estimator).expect("serializable");
                for row in &r.rows {
                    csv.push_str(&format!(
                        "{},{},{},{},{},{},{},{}\n",
                        csv_field(src),
                        est.as_str().unwrap_or_default(),
                        row.p,
                        row.n,
                        row.replicates,
                        row.coverage,
                        r.seed,
                        r.prng
                    ));
                    rows += 1;
                }
            }
            let refs: Vec<(&str, &ConsistencyRun)> = runs.iter().map(|(s, r)| (s.as_str(), r)).collect();
            (csv, consistency_chart(&refs), rows)
        }
        "progressiveness" => {
            let reps: Vec<(String, ProgressivenessReport)> = envs
                .iter()
                .map(|(p, e)| Ok((p.clone(), schema(Path::new(p), e)?)))
                .collect::<Result<_, Failure>>()?;
            let mut csv = String::from("source,test,p,n,replicates,chance_of_truth,seed,prng\n");
            let mut rows = 0;
            for (src, r) in &reps {
                let test = serde_json::to_value(r.test).expect("serializable");
                for pt in &r.points {
                    csv.push_str(&format!(
                        "{},{},{},{},{},{},{},{}\n",
                        csv_field(src),
                        test.as_str().unwrap_or_default(),
                        r.p,
                        pt.n,
                        pt.replicates,
                        pt.chance_of_truth,
                        r.seed,
                        r.prng
                    ));
                    rows += 1;
                }
            }
            let refs: Vec<(&str, &ProgressivenessReport)> = reps.iter().map(|(s, r)| (s.as_str(), r)).collect();
            (csv, progressiveness_chart(&refs), rows)
        }
        "bayes" => {
            let runs: Vec<(String, BayesRun)> = envs
                .iter()
                .map(|(p, e)| Ok((p.clone(), schema(Path::new(p), e)?)))
                .collect::<Result<_, Failure>>()?;
            let mut csv = String::from("source,world,length,mass_numerator,mass_denominator,decimal\n");
            let mut rows = 0;
            for (src, run) in &runs {
                for t in &run.traces {
                    for p in &t.points {
                        csv.push_str(&format!(
                            "{},{},{},{},{},{}\n",
                            csv_field(src),
                            t.world.compact(),
                            p.length,
                            p.mass_numerator,
                            p.mass_denominator,
                            p.decimal
                        ));
                        rows += 1;
                    }
                }
            }
            let single = runs.len() == 1;
            let refs: Vec<(&str, &BayesRun)> = runs
                .iter()
                .map(|(s, r)| (if single { "" } else { s.as_str() }, r))
                .collect();
            (csv, bayes_chart(&refs), rows)
        }
        other => return Err(Failure::Usage(format!("reports of kind `{other}` have no tabular form"))),
    };
    let stem = format!("report-{kind}");
    let written = outputs.write(&stem, None, Some(&csv), Some(&svg))?;
    println!("merged {} {kind} report(s), {rows} rows", envs.len());
    for p in written {
        println!("  wrote {}", p.display());
    }
    Ok(Exit::Pass)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("10:50:10").unwrap(), vec![10, 20, 30, 40, 50]);
        assert_eq!(parse_grid("3, 5,8").unwrap(), vec![3, 5, 8]);
        assert!(parse_grid("0:10:5").is_err());
        assert!(parse_grid("1:10:0").is_err());
        assert!(parse_grid("a").is_err());
    }
}
