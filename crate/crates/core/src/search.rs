//! End-to-end search strategies.
//!
//! * [`Searcher::known_t`]: `⌊π/4θ⌋` iterations, one measurement.
//! * [`Searcher::restart_optimal`]: stop early at the expected-cost optimum
//!   and restart on failure.
//! * [`Searcher::unknown_t`]: no knowledge of `t`. A few classical probes,
//!   then rounds with a random iteration count below a geometrically growing
//!   bound `m`, and a cumulative time-out that declares "no solution".
//!
//! Every measured index is checked with one classical lookup before it is
//! reported, so a successful outcome is always a true solution.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::analytics::ProblemShape;
use crate::rng::{self, GroverRng};
use crate::simulator::{self, DiffusionOperator, OracleSpec, LOOKUPS_PER_ITERATION};
use crate::{GroverError, Result};

/// Flat record of one search run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub found_index: Option<usize>,
    pub success: bool,
    pub grover_iterations_used: u64,
    pub oracle_lookups_used: u64,
    pub classical_probes_used: u64,
    pub rounds: u64,
    pub seed: u64,
}

/// Parameters of the unknown-`t` algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnknownTConfig {
    pub lambda: f64,
    pub m_cap: f64,
    pub classical_presample_count: u64,
    pub timeout_total_iterations: u64,
}

impl UnknownTConfig {
    pub const DEFAULT_LAMBDA: f64 = 6.0 / 5.0;
    pub const DEFAULT_PRESAMPLES: u64 = 10;
    /// Time-out budget in units of `√N`.
    pub const DEFAULT_TIMEOUT_FACTOR: f64 = 4.5;

    /// Defaults for table size `n`: λ = 6/5, cap `√N`, 10 classical probes,
    /// time-out `⌈4.5·√N⌉` iterations.
    pub fn for_dimension(n: usize) -> Self {
        let root = (n as f64).sqrt();
        UnknownTConfig {
            lambda: Self::DEFAULT_LAMBDA,
            m_cap: root,
            classical_presample_count: Self::DEFAULT_PRESAMPLES,
            timeout_total_iterations: (Self::DEFAULT_TIMEOUT_FACTOR * root).ceil() as u64,
        }
    }

    pub fn with_timeout_factor(mut self, n: usize, factor: f64) -> Self {
        self.timeout_total_iterations = (factor * (n as f64).sqrt()).ceil() as u64;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 1.0 && self.lambda < 4.0 / 3.0) {
            return Err(GroverError::InvalidArgument(format!(
                "lambda must be in (1, 4/3), got {}",
                self.lambda
            )));
        }
        if self.m_cap.is_nan() || self.m_cap < 1.0 {
            return Err(GroverError::InvalidArgument(format!(
                "m_cap must be >= 1, got {}",
                self.m_cap
            )));
        }
        if self.timeout_total_iterations == 0 {
            return Err(GroverError::InvalidArgument("timeout must be positive".into()));
        }
        Ok(())
    }

    /// Values of `m` on successive rounds: `1, λ, λ², …` capped at `m_cap`.
    pub fn m_schedule(&self) -> impl Iterator<Item = f64> + '_ {
        std::iter::successors(Some(1.0f64), move |m| Some((m * self.lambda).min(self.m_cap)))
    }
}

/// How a run of `j` iterations followed by a measurement is simulated.
#[derive(Debug, Clone)]
pub enum Backend {
    /// Samples from the exact outcome distribution using the two-amplitude
    /// recurrence. O(j) time, O(1) memory.
    Collapsed,
    /// Full statevector with the given diffusion operator.
    Statevector(DiffusionOperator),
}

impl Backend {
    pub fn statevector_for(n: usize) -> Result<Self> {
        Ok(Backend::Statevector(DiffusionOperator::for_dimension(n)?))
    }

    fn run_and_measure<R: Rng + ?Sized>(
        &self,
        oracle: &mut OracleSpec,
        j: u64,
        rng: &mut R,
    ) -> Result<usize> {
        match self {
            Backend::Collapsed => Ok(simulator::sample_collapsed(oracle, j, rng)),
            Backend::Statevector(op) => {
                let state = simulator::run_grover(oracle, op, j)?;
                state.measure(rng)
            }
        }
    }
}

/// Bookkeeping shared by the strategies.
struct Run<'a> {
    oracle: &'a mut OracleSpec,
    start_lookups: u64,
    iterations: u64,
    probes: u64,
    rounds: u64,
    seed: u64,
}

impl<'a> Run<'a> {
    fn new(oracle: &'a mut OracleSpec, seed: u64) -> Self {
        let start_lookups = oracle.query_count();
        Run {
            oracle,
            start_lookups,
            iterations: 0,
            probes: 0,
            rounds: 0,
            seed,
        }
    }

    fn attempt(&mut self, backend: &Backend, j: u64, rng: &mut GroverRng) -> Result<Option<usize>> {
        self.rounds += 1;
        self.iterations += j;
        let i = backend.run_and_measure(self.oracle, j, rng)?;
        Ok(self.probe(i).then_some(i))
    }

    fn probe(&mut self, i: usize) -> bool {
        self.probes += 1;
        self.oracle.probe(i)
    }

    fn finish(self, found: Option<usize>) -> SearchOutcome {
        let lookups = self.oracle.query_count() - self.start_lookups;
        debug_assert_eq!(lookups, LOOKUPS_PER_ITERATION * self.iterations + self.probes);
        SearchOutcome {
            found_index: found,
            success: found.is_some(),
            grover_iterations_used: self.iterations,
            oracle_lookups_used: lookups,
            classical_probes_used: self.probes,
            rounds: self.rounds,
            seed: self.seed,
        }
    }
}

/// Runs strategies on a chosen backend.
#[derive(Debug, Clone)]
pub struct Searcher {
    backend: Backend,
}

impl Default for Searcher {
    fn default() -> Self {
        Searcher {
            backend: Backend::Collapsed,
        }
    }
}

impl Searcher {
    pub const DEFAULT_MAX_RESTARTS: u64 = 64;

    pub fn new(backend: Backend) -> Self {
        Searcher { backend }
    }

    pub fn backend(&self) -> &Backend {
        &self.backend
    }

    fn check_t(oracle: &OracleSpec, t: usize) -> Result<ProblemShape> {
        if t == 0 {
            return Err(GroverError::InvalidArgument(
                "known-t strategies need t >= 1".into(),
            ));
        }
        ProblemShape::new(oracle.dimension() as u64, t as u64)
    }

    /// `⌊π/4θ⌋` iterations from uniform, then a single measurement. `t` is
    /// trusted, not checked against the oracle.
    pub fn known_t(&self, oracle: &mut OracleSpec, t: usize, seed: u64) -> Result<SearchOutcome> {
        let shape = Self::check_t(oracle, t)?;
        let iterations = shape.optimal_iterations()?;
        let mut rng = rng::seeded(seed);
        let mut run = Run::new(oracle, seed);
        let found = run.attempt(&self.backend, iterations, &mut rng)?;
        Ok(run.finish(found))
    }

    /// Measure after the expected-cost-optimal `j*` iterations and restart on
    /// failure, for at most `max_restarts` attempts.
    pub fn restart_optimal(
        &self,
        oracle: &mut OracleSpec,
        t: usize,
        seed: u64,
        max_restarts: u64,
    ) -> Result<SearchOutcome> {
        let shape = Self::check_t(oracle, t)?;
        let j = if shape.t() == shape.n() {
            0
        } else {
            shape.optimal_stopping()?.j_star
        };
        let mut rng = rng::seeded(seed);
        let mut run = Run::new(oracle, seed);
        for _ in 0..max_restarts {
            if let Some(i) = run.attempt(&self.backend, j, &mut rng)? {
                return Ok(run.finish(Some(i)));
            }
        }
        Ok(run.finish(None))
    }

    /// Search without knowing `t`.
    ///
    /// Classical pre-sampling covers `t > 3N/4`. Each round then draws `j`
    /// uniformly from `0..⌈m⌉`, runs `j` iterations from uniform, measures and
    /// checks; on failure `m ← min(λm, m_cap)`. A round that would push the
    /// cumulative iteration count past the time-out is not started and the
    /// run reports no solution.
    pub fn unknown_t(
        &self,
        oracle: &mut OracleSpec,
        config: &UnknownTConfig,
        seed: u64,
    ) -> Result<SearchOutcome> {
        config.validate()?;
        let n = oracle.dimension();
        let mut rng = rng::seeded(seed);
        let mut run = Run::new(oracle, seed);

        for _ in 0..config.classical_presample_count {
            let i = rng.random_range(0..n);
            if run.probe(i) {
                return Ok(run.finish(Some(i)));
            }
        }

        for m in config.m_schedule() {
            let j = rng.random_range(0..m.ceil() as u64);
            if run.iterations + j > config.timeout_total_iterations {
                break;
            }
            if let Some(i) = run.attempt(&self.backend, j, &mut rng)? {
                return Ok(run.finish(Some(i)));
            }
        }
        Ok(run.finish(None))
    }
}

pub fn search_known_t(oracle: &mut OracleSpec, t: usize, seed: u64) -> Result<SearchOutcome> {
    Searcher::default().known_t(oracle, t, seed)
}

pub fn search_restart_optimal(
    oracle: &mut OracleSpec,
    t: usize,
    seed: u64,
    max_restarts: u64,
) -> Result<SearchOutcome> {
    Searcher::default().restart_optimal(oracle, t, seed, max_restarts)
}

pub fn search_unknown_t(
    oracle: &mut OracleSpec,
    config: &UnknownTConfig,
    seed: u64,
) -> Result<SearchOutcome> {
    Searcher::default().unknown_t(oracle, config, seed)
}

/// Monte Carlo estimate of the averaged success probability: draw `j`
/// uniformly from `0..m`, iterate, measure, test.
pub fn average_success_check<R: Rng + ?Sized>(
    shape: &ProblemShape,
    m: u64,
    rng: &mut R,
    trials: u64,
) -> Result<f64> {
    if shape.t() == 0 || shape.t() == shape.n() {
        return Err(GroverError::Undefined {
            op: "average_success_check",
            n: shape.n(),
            t: shape.t(),
            reason: "needs 1 <= t < N",
        });
    }
    if m == 0 || trials == 0 {
        return Err(GroverError::InvalidArgument("m and trials must be >= 1".into()));
    }
    let mut oracle = OracleSpec::first(shape.n() as usize, shape.t() as usize)?;
    let mut hits = 0u64;
    for _ in 0..trials {
        let j = rng.random_range(0..m);
        let i = simulator::sample_collapsed(&mut oracle, j, rng);
        if oracle.contains(i) {
            hits += 1;
        }
    }
    Ok(hits as f64 / trials as f64)
}

/// Summary over many seeded runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub trials: u64,
    pub successes: u64,
    pub false_positives: u64,
    pub mean_iterations: f64,
    pub stddev_iterations: f64,
    pub mean_lookups: f64,
    pub success_rate: f64,
}

impl TrialSummary {
    pub fn from_outcomes(outcomes: &[SearchOutcome], oracle: &OracleSpec) -> Self {
        let n = outcomes.len().max(1) as f64;
        let iters: Vec<f64> = outcomes.iter().map(|o| o.grover_iterations_used as f64).collect();
        let mean = iters.iter().sum::<f64>() / n;
        let var = if outcomes.len() > 1 {
            iters.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        let successes = outcomes.iter().filter(|o| o.success).count() as u64;
        let false_positives = outcomes
            .iter()
            .filter(|o| o.success && !o.found_index.is_some_and(|i| oracle.contains(i)))
            .count() as u64;
        TrialSummary {
            trials: outcomes.len() as u64,
            successes,
            false_positives,
            mean_iterations: mean,
            stddev_iterations: var.sqrt(),
            mean_lookups: outcomes.iter().map(|o| o.oracle_lookups_used as f64).sum::<f64>() / n,
            success_rate: successes as f64 / n,
        }
    }
}

/// Runs `trials` independent seeded searches in parallel; results are in
/// trial order. Trial `i` gets a fresh copy of the oracle and seed
/// `rng::trial_seed(master_seed, i)`.
pub fn run_trials<T, F>(oracle: &OracleSpec, master_seed: u64, trials: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut OracleSpec, u64) -> Result<T> + Sync,
{
    use rayon::prelude::*;
    (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut local = oracle.clone();
            local.reset_count();
            f(&mut local, rng::trial_seed(master_seed, i))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use approx::assert_abs_diff_eq;

    fn lookup_identity(o: &SearchOutcome) -> bool {
        o.oracle_lookups_used == 2 * o.grover_iterations_used + o.classical_probes_used
    }

    #[test]
    fn known_t_quarter_is_certain() {
        let sv = Searcher::new(Backend::statevector_for(4).unwrap());
        for seed in 0..50 {
            let mut oracle = OracleSpec::new(4, [2]).unwrap();
            let out = sv.known_t(&mut oracle, 1, seed).unwrap();
            assert!(out.success);
            assert_eq!(out.found_index, Some(2));
            assert_eq!(out.grover_iterations_used, 1);
            assert_eq!(out.oracle_lookups_used - out.classical_probes_used, 2);
            assert!(lookup_identity(&out));
        }
    }

    #[test]
    fn known_t_large_table_iteration_count() {
        let mut oracle = OracleSpec::new(1 << 20, [123_456]).unwrap();
        let out = search_known_t(&mut oracle, 1, 5).unwrap();
        assert_eq!(out.grover_iterations_used, 804);
        assert!(lookup_identity(&out));
    }

    #[test]
    fn known_t_quarter_of_1024_by_full_simulation() {
        let sv = Searcher::new(Backend::statevector_for(1024).unwrap());
        let mut oracle = OracleSpec::random(1024, 256, &mut seeded(8)).unwrap();
        for seed in 0..20 {
            let out = sv.known_t(&mut oracle, 256, seed).unwrap();
            assert!(out.success);
            assert_eq!(out.grover_iterations_used, 1);
        }
        assert!(search_known_t(&mut oracle, 0, 1).is_err());
    }

    #[test]
    fn restart_everything_is_solution() {
        let mut oracle = OracleSpec::first(9, 9).unwrap();
        let out = search_restart_optimal(&mut oracle, 9, 1, 64).unwrap();
        assert!(out.success);
        assert_eq!(out.grover_iterations_used, 0);
        assert_eq!(out.rounds, 1);
    }

    #[test]
    fn restart_mean_matches_expected_cost() {
        let oracle = OracleSpec::new(1 << 20, [77]).unwrap();
        let outcomes = run_trials(&oracle, 2024, 1000, |o, s| search_restart_optimal(o, 1, s, 64)).unwrap();
        let summary = TrialSummary::from_outcomes(&outcomes, &oracle);
        assert_eq!(summary.success_rate, 1.0);
        assert!((summary.mean_iterations / 706.0 - 1.0).abs() <= 0.05, "{summary:?}");
        assert!(outcomes.iter().all(lookup_identity));
    }

    #[test]
    fn restart_small_table_cost_ratio() {
        let oracle = OracleSpec::new(4096, [1000]).unwrap();
        let outcomes = run_trials(&oracle, 99, 1000, |o, s| search_restart_optimal(o, 1, s, 64)).unwrap();
        let summary = TrialSummary::from_outcomes(&outcomes, &oracle);
        let ratio = summary.mean_iterations / 64.0;
        assert!((ratio / 0.69003 - 1.0).abs() <= 0.03, "ratio {ratio}");
    }

    #[test]
    fn restart_gives_up_after_max_restarts() {
        // t = 1 in N = 2^20 with j* = 596: three attempts all fail for some seed.
        let mut oracle = OracleSpec::new(1 << 20, [5]).unwrap();
        let failed = (0..200)
            .map(|s| search_restart_optimal(&mut oracle, 1, s, 1).unwrap())
            .find(|o| !o.success)
            .expect("with p=0.84 some single attempt fails");
        assert_eq!(failed.rounds, 1);
        assert_eq!(failed.found_index, None);
    }

    #[test]
    fn unknown_t_no_solution_always_times_out() {
        let oracle = OracleSpec::new(1024, []).unwrap();
        let config = UnknownTConfig::for_dimension(1024);
        assert_eq!(config.timeout_total_iterations, 144);
        let outcomes = run_trials(&oracle, 3, 300, |o, s| search_unknown_t(o, &config, s)).unwrap();
        for o in &outcomes {
            assert!(!o.success);
            assert_eq!(o.found_index, None);
            assert!(o.grover_iterations_used <= config.timeout_total_iterations);
            assert_eq!(o.classical_probes_used, 10 + o.rounds);
            assert!(lookup_identity(o));
        }
    }

    #[test]
    fn unknown_t_dense_table_found_classically() {
        let mut oracle = OracleSpec::first(100, 90).unwrap();
        let config = UnknownTConfig::for_dimension(100);
        let out = search_unknown_t(&mut oracle, &config, 4).unwrap();
        assert!(out.success);
        assert_eq!(out.grover_iterations_used, 0);
        assert_eq!(out.rounds, 0);
    }

    #[test]
    fn unknown_t_deterministic_per_seed() {
        let mut oracle = OracleSpec::new(4096, [10, 20, 30]).unwrap();
        let config = UnknownTConfig::for_dimension(4096);
        let a = search_unknown_t(&mut oracle, &config, 17).unwrap();
        let b = search_unknown_t(&mut oracle, &config, 17).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn unknown_t_on_statevector_backend() {
        let sv = Searcher::new(Backend::statevector_for(256).unwrap());
        let mut oracle = OracleSpec::new(256, [3, 200]).unwrap();
        let config = UnknownTConfig::for_dimension(256);
        let mut found = 0;
        for seed in 0..40 {
            let out = sv.unknown_t(&mut oracle, &config, seed).unwrap();
            if let Some(i) = out.found_index {
                assert!(oracle.contains(i));
                found += 1;
            }
        }
        assert!(found >= 30);
    }

    #[test]
    fn config_validation() {
        let mut c = UnknownTConfig::for_dimension(64);
        c.lambda = 4.0 / 3.0;
        assert!(c.validate().is_err());
        c.lambda = 1.0;
        assert!(c.validate().is_err());
        c.lambda = 1.3;
        assert!(c.validate().is_ok());
        c.timeout_total_iterations = 0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn critical_stage_round_bound() {
        let config = UnknownTConfig::for_dimension(1 << 16);
        for t in [1u64, 2, 3, 5, 16, 100, 1000, 10_000, 40_000] {
            let m0 = ProblemShape::new(1 << 16, t).unwrap().critical_scale().unwrap();
            let before = config.m_schedule().take_while(|&m| m <= m0).count() as f64;
            let bound = (m0.ln() / config.lambda.ln()).ceil();
            if (m0.ln() / config.lambda.ln()).fract() != 0.0 {
                assert!(before <= bound, "t={t} rounds={before} bound={bound}");
            }
        }
    }

    #[test]
    fn average_success_examples() {
        let s = ProblemShape::new(16, 1).unwrap();
        let est = average_success_check(&s, 4, &mut seeded(1), 100_000).unwrap();
        assert_abs_diff_eq!(est, 0.601, epsilon = 0.005);

        let s = ProblemShape::new(40, 3).unwrap();
        let trials = 20_000;
        let est = average_success_check(&s, 1, &mut seeded(2), trials).unwrap();
        let p = 3.0 / 40.0;
        assert!((est - p).abs() <= 3.0 * (p * (1.0 - p) / trials as f64).sqrt());

        let s = ProblemShape::new(256, 2).unwrap();
        let m = (1.0 / (2.0 * s.theta()).sin()).ceil() as u64;
        let est = average_success_check(&s, m, &mut seeded(3), trials).unwrap();
        assert!(est >= 0.25 - 3.0 * (0.25 * 0.75 / trials as f64).sqrt());

        assert!(average_success_check(&ProblemShape::new(8, 0).unwrap(), 2, &mut seeded(0), 10).is_err());
    }
}
