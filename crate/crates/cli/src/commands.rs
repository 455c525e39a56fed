//! One function per subcommand. Each returns the records to print plus any
//! invariant violations it detected; the caller prints first and fails after.

use std::fs::File;
use std::time::Instant;

use glab_core::bounds;
use glab_core::counting::{self, Branch, CountingEstimate, Regime};
use glab_core::reproduce::{self, CriterionResult};
use glab_core::rng;
use glab_core::search::{self, Backend, SearchOutcome, Searcher, TrialSummary, UnknownTConfig};
use glab_core::simulator::OracleSpec;
use glab_core::ProblemShape;
use clap::ValueEnum;
use rayon::prelude::*;
use serde_json::Value;

use crate::record::{num, Fields, RunRecord};
use crate::solutions::SolutionSpec;
use crate::{AnalyzeArgs, BackendKind, BoundsArgs, CliError, CountArgs, ReproduceArgs, SearchArgs, Strategy};

/// Largest table the statevector backend is allowed to allocate.
const MAX_STATEVECTOR_DIM: usize = 1 << 22;

#[derive(Debug, Default)]
pub struct Report {
    pub records: Vec<RunRecord>,
    /// Human-readable rendering used when no `--format` is given.
    pub table: Option<String>,
    pub violations: Vec<String>,
}

fn params(pairs: &[(&str, Value)]) -> Fields {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn usage<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Usage(msg.into()))
}

fn table_size(n: u64) -> Result<usize, CliError> {
    usize::try_from(n).or_else(|_| usage(format!("N={n} does not fit in memory indices")))
}

pub fn analyze(a: &AnalyzeArgs) -> Result<Report, CliError> {
    let start = Instant::now();
    if a.t == 0 {
        return usage("t must be ≥ 1");
    }
    let shape = ProblemShape::new(a.n, a.t)?;
    let optimal = shape.optimal_iterations()?;
    let j_end = a.j_end.unwrap_or(optimal);
    if a.j_start > j_end {
        return usage(format!("empty range: j-start {} > j-end {j_end}", a.j_start));
    }
    let step = a.j_step.unwrap_or(((j_end - a.j_start) / 32).max(1));
    if step == 0 {
        return usage("j-step must be ≥ 1");
    }
    let seed = a.common.seed;
    let p = params(&[
        ("n", a.n.into()),
        ("t", a.t.into()),
        ("j_start", a.j_start.into()),
        ("j_end", j_end.into()),
        ("j_step", step.into()),
    ]);

    let mut report = Report::default();
    for j in (a.j_start..=j_end).step_by(step as usize) {
        let amps = shape.amplitudes(j)?;
        let mut r = RunRecord::new("analyze", "row", &p, seed);
        r.set("j", j)
            .set_num("k", amps.k)
            .set_num("l", amps.l)
            .set_num("success_probability", shape.success_probability(j));
        report.records.push(r);
    }

    let mut s = RunRecord::new("analyze", "summary", &p, seed);
    let failure = 1.0 - shape.success_probability(optimal);
    s.set_num("theta", shape.theta())
        .set("optimal_iterations", optimal)
        .set_num("success_at_optimal", 1.0 - failure)
        .set_num("failure_at_optimal", failure);
    if a.t < a.n {
        let plan = shape.optimal_stopping()?;
        s.set_num("critical_scale", shape.critical_scale()?)
            .set("stopping_j_star", plan.j_star)
            .set_num("stopping_success_probability", plan.success_prob)
            .set_num("stopping_expected_iterations", plan.expected_iterations)
            .set("stopping_expected_iterations_rounded", plan.expected_iterations.round() as u64);
    }
    if failure > a.t as f64 / a.n as f64 + 1e-12 {
        report
            .violations
            .push(format!("failure {failure} after {optimal} iterations exceeds t/N"));
    }
    if a.common.timing {
        s.wall_time_ms = Some(elapsed_ms(start));
    }
    report.records.push(s);
    Ok(report)
}

pub fn search(a: &SearchArgs) -> Result<Report, CliError> {
    let start = Instant::now();
    if a.trials == 0 {
        return usage("trials must be ≥ 1");
    }
    let n = table_size(a.n)?;
    let seed = a.common.seed;
    let spec = match (&a.solutions, a.t) {
        (Some(spec), None) => spec.clone(),
        (None, Some(t)) => SolutionSpec::Random(t),
        _ => return usage("give exactly one of --solutions or --t"),
    };
    let oracle = spec.build(n, seed)?;
    let t = oracle.solution_count();

    let backend = match a.backend {
        BackendKind::Collapsed => Backend::Collapsed,
        BackendKind::Statevector if n > MAX_STATEVECTOR_DIM => {
            return usage(format!("statevector backend is limited to N ≤ {MAX_STATEVECTOR_DIM}"));
        }
        BackendKind::Statevector => Backend::statevector_for(n)?,
    };
    let searcher = Searcher::new(backend);
    let mut config = UnknownTConfig::for_dimension(n);
    if let Some(factor) = a.timeout_factor {
        config = config.with_timeout_factor(n, factor);
    }
    config.validate()?;

    let strategy = a.strategy.to_possible_value().map(|v| v.get_name().to_string());
    let backend_name = a.backend.to_possible_value().map(|v| v.get_name().to_string());
    let mut p = params(&[
        ("n", a.n.into()),
        ("solutions", spec.to_string().into()),
        ("t", t.into()),
        ("strategy", strategy.into()),
        ("backend", backend_name.into()),
        ("trials", a.trials.into()),
    ]);
    match a.strategy {
        Strategy::Known => {}
        Strategy::Restart => {
            p.insert("max_restarts".into(), a.max_restarts.into());
        }
        Strategy::Unknown => {
            p.insert("lambda".into(), num(config.lambda));
            p.insert("m_cap".into(), num(config.m_cap));
            p.insert("classical_presamples".into(), config.classical_presample_count.into());
            p.insert("timeout_iterations".into(), config.timeout_total_iterations.into());
        }
    }

    let timed = search::run_trials(&oracle, seed, a.trials, |o, s| {
        let began = Instant::now();
        let outcome = match a.strategy {
            Strategy::Known => searcher.known_t(o, t, s)?,
            Strategy::Restart => searcher.restart_optimal(o, t, s, a.max_restarts)?,
            Strategy::Unknown => searcher.unknown_t(o, &config, s)?,
        };
        Ok((outcome, elapsed_ms(began)))
    })?;

    let mut report = Report::default();
    for (i, (outcome, ms)) in timed.iter().enumerate() {
        let mut r = RunRecord::new("search", "trial", &p, outcome.seed).trial(i as u64);
        r.outputs_from(outcome)?;
        r.outputs.remove("seed");
        if a.common.timing {
            r.wall_time_ms = Some(*ms);
        }
        check_outcome(i, outcome, &oracle, &mut report.violations);
        report.records.push(r);
    }

    let outcomes: Vec<SearchOutcome> = timed.into_iter().map(|(o, _)| o).collect();
    let summary = TrialSummary::from_outcomes(&outcomes, &oracle);
    let mut agg = RunRecord::new("search", "aggregate", &p, seed);
    agg.outputs_from(&summary)?;
    if t >= 1 && t < n {
        let m0 = oracle.shape().critical_scale()?;
        agg.set_num("critical_scale", m0);
    }
    if a.common.timing {
        agg.wall_time_ms = Some(elapsed_ms(start));
    }
    report.records.push(agg);
    Ok(report)
}

fn check_outcome(i: usize, o: &SearchOutcome, oracle: &OracleSpec, violations: &mut Vec<String>) {
    if o.success != o.found_index.is_some_and(|x| oracle.contains(x)) {
        violations.push(format!("trial {i}: reported {:?} but the table disagrees", o.found_index));
    }
    if o.oracle_lookups_used != 2 * o.grover_iterations_used + o.classical_probes_used {
        violations.push(format!("trial {i}: lookup count does not add up"));
    }
}

pub fn count(a: &CountArgs) -> Result<Report, CliError> {
    let start = Instant::now();
    if a.trials == 0 {
        return usage("trials must be ≥ 1");
    }
    let shape = ProblemShape::new(a.n, a.t)?;
    let regime = a.regime;
    let c = a.c.unwrap_or(if regime == Regime::Exact { counting::EXACT_MIN_C } else { 1.0 });
    if a.p.is_some() && regime != Regime::Fixed {
        return usage("--p only applies to the fixed regime");
    }
    let seed = a.common.seed;
    let mut p = params(&[
        ("n", a.n.into()),
        ("t", a.t.into()),
        ("regime", regime.to_string().into()),
        ("trials", a.trials.into()),
    ]);
    match a.p {
        Some(sample_len) => p.insert("p".into(), sample_len.into()),
        None => p.insert("c".into(), num(c)),
    };

    let runs: Vec<(Vec<CountingEstimate>, f64)> = (0..a.trials)
        .into_par_iter()
        .map(|i| {
            let began = Instant::now();
            let mut r = rng::trial_rng(seed, i);
            let stages = match a.p {
                Some(sample_len) => vec![counting::estimate_t(&shape, sample_len, &mut r)?],
                None => counting::count_with_regime_staged(&shape, regime, c, &mut r)?,
            };
            Ok((stages, elapsed_ms(began)))
        })
        .collect::<Result<_, glab_core::GroverError>>()?;

    let mut report = Report::default();
    let (mut resolved, mut all_resolved, mut exact, mut exact_given_resolved) = (0u64, 0u64, 0u64, 0u64);
    let mut t_tilde_sum = 0.0;
    let mut bound_violations = 0u64;
    for (i, (stages, ms)) in runs.iter().enumerate() {
        let est = stages.last().expect("every regime runs at least once");
        let is_resolved = est.frequency_resolved(&shape);
        let every_stage = stages.iter().all(|s| s.frequency_resolved(&shape));
        let abs_error = (a.t as f64 - est.t_tilde).abs();
        let true_bound = counting::error_bound_for(a.n, a.t as f64, est.p);
        let within = abs_error < true_bound;
        let recovered = est.t_rounded == a.t;

        resolved += is_resolved as u64;
        all_resolved += every_stage as u64;
        exact += recovered as u64;
        exact_given_resolved += (every_stage && recovered) as u64;
        t_tilde_sum += est.t_tilde;
        if is_resolved && !within {
            bound_violations += 1;
            report
                .violations
                .push(format!("trial {i}: |t - t~| = {abs_error} breaks the bound {true_bound}"));
        }
        if regime == Regime::Exact && every_stage && !recovered {
            report
                .violations
                .push(format!("trial {i}: exact regime returned {} for t={}", est.t_rounded, a.t));
        }

        let mut r = RunRecord::new("count", "trial", &p, rng::trial_seed(seed, i as u64)).trial(i as u64);
        r.outputs_from(est)?;
        r.set("stages", stages.len())
            .set("resolved", is_resolved)
            .set("all_stages_resolved", every_stage)
            .set_num("true_frequency", counting::true_frequency(&shape, est.p))
            .set_num("abs_error", abs_error)
            .set_num("true_error_bound", true_bound)
            .set("within_bound", within)
            .set("exact_recovery", recovered);
        if a.common.timing {
            r.wall_time_ms = Some(*ms);
        }
        report.records.push(r);
    }

    let n_trials = a.trials as f64;
    let mut agg = RunRecord::new("count", "aggregate", &p, seed);
    agg.set("trials", a.trials)
        .set_num("resolved_rate", resolved as f64 / n_trials)
        .set_num("all_stages_resolved_rate", all_resolved as f64 / n_trials)
        .set_num("exact_recovery_rate", exact as f64 / n_trials)
        .set("bound_violations", bound_violations)
        .set_num("mean_t_tilde", t_tilde_sum / n_trials);
    let conditional = if all_resolved == 0 {
        Value::Null
    } else {
        num(exact_given_resolved as f64 / all_resolved as f64)
    };
    agg.set("exact_recovery_given_resolved", conditional);
    if a.common.timing {
        agg.wall_time_ms = Some(elapsed_ms(start));
    }
    report.records.push(agg);

    if let Some(path) = &a.spectrum {
        let sample_len = a.p.unwrap_or(runs[0].0.last().expect("non-empty").p);
        write_spectrum(&shape, sample_len, File::create(path)?)?;
    }
    Ok(report)
}

/// `nu,probability,solution_branch,non_solution_branch`: the observed
/// distribution of the measured frequency and its two conditional parts.
fn write_spectrum<W: std::io::Write>(shape: &ProblemShape, p: usize, out: W) -> Result<(), CliError> {
    let weight = if shape.t() == 0 {
        0.0
    } else if shape.t() == shape.n() {
        1.0
    } else {
        counting::solution_branch_probability(shape, p)
    };
    let zeros = || vec![0.0; p];
    let sol = if weight > 0.0 { counting::spectrum(shape, p, Branch::Solution)? } else { zeros() };
    let non = if weight < 1.0 { counting::spectrum(shape, p, Branch::NonSolution)? } else { zeros() };

    let mut w = csv::Writer::from_writer(out);
    w.write_record(["nu", "probability", "solution_branch", "non_solution_branch"])?;
    for nu in 0..p {
        let mixed = weight * sol[nu] + (1.0 - weight) * non[nu];
        w.write_record([nu.to_string(), mixed.to_string(), sol[nu].to_string(), non[nu].to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn bounds(a: &BoundsArgs) -> Result<Report, CliError> {
    let start = Instant::now();
    let seed = a.common.seed;
    let sizes = &a.n.0;
    if let Some(&n) = sizes.iter().find(|&&n| a.t == 0 || a.t > n) {
        return usage(format!("need 1 ≤ t ≤ N, got t={} with N={n}", a.t));
    }
    let sizes_value: Vec<Value> = sizes.iter().map(|&n| n.into()).collect();
    let p = params(&[("n", Value::Array(sizes_value)), ("t", a.t.into())]);

    let mut report = Report::default();
    for &n in sizes {
        let row = bounds::compare_grover_to_bound(n, a.t)?;
        if row.grover_queries_50pct < row.lower_bound_queries as f64 {
            report
                .violations
                .push(format!("N={n}: Grover beats the lower bound ({row:?})"));
        }
        let mut r = RunRecord::new("bounds", "row", &p, seed);
        r.outputs_from(&row)?;
        r.set_num("ratio", row.ratio);
        report.records.push(r);
    }

    let mut s = RunRecord::new("bounds", "summary", &p, seed);
    s.set_num("asymptotic_ratio", bounds::asymptotic_ratio());
    if let Some(trials) = a.trials {
        let hold = bounds::proposition_checks(&mut rng::seeded(seed), trials);
        s.set("inequality_trials", trials).set("inequalities_hold", hold);
        if !hold {
            report.violations.push("a supporting inequality failed".into());
        }
    }
    if a.common.timing {
        s.wall_time_ms = Some(elapsed_ms(start));
    }
    report.records.push(s);
    Ok(report)
}

pub fn reproduce(a: &ReproduceArgs) -> Result<Report, CliError> {
    let seed = a.common.seed;
    let ids: Vec<u32> = if a.criteria.is_empty() {
        (1..=reproduce::CRITERIA).collect()
    } else {
        a.criteria.clone()
    };
    if let Some(bad) = ids.iter().find(|&&id| id == 0 || id > reproduce::CRITERIA) {
        return usage(format!("no criterion {bad}; valid ids are 1..={}", reproduce::CRITERIA));
    }
    let p = params(&[("criteria", ids.clone().into())]);

    let mut report = Report::default();
    let mut results: Vec<(CriterionResult, f64)> = Vec::new();
    for &id in &ids {
        let began = Instant::now();
        let result = reproduce::run_seeded(id, seed).unwrap_or_else(|e| CriterionResult {
            id,
            name: "error".into(),
            passed: false,
            detail: e.to_string(),
        });
        results.push((result, elapsed_ms(began)));
    }

    let mut table = format!("{:>3}  {:<26} {:<6} {}\n", "id", "criterion", "result", "detail");
    for (result, ms) in &results {
        let verdict = if result.passed { "PASS" } else { "FAIL" };
        table.push_str(&format!("{:>3}  {:<26} {:<6} {}\n", result.id, result.name, verdict, result.detail));
        if !result.passed {
            report.violations.push(format!("criterion {} ({}) failed", result.id, result.name));
        }
        let mut r = RunRecord::new("reproduce-paper", "criterion", &p, seed);
        r.outputs_from(result)?;
        if a.common.timing {
            r.wall_time_ms = Some(*ms);
        }
        report.records.push(r);
    }
    let passed = results.iter().filter(|(r, _)| r.passed).count();
    table.push_str(&format!("{passed}/{} criteria passed\n", results.len()));
    report.table = Some(table);
    Ok(report)
}
