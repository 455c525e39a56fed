use glab_core::rng;
use glab_core::search::{self, Backend, Searcher, TrialSummary, UnknownTConfig};
use glab_core::simulator::OracleSpec;

#[test]
fn unknown_t_cost_scales_like_sqrt_n_over_t() {
    // The spread is ~1.18 in expectation, so the sample must be large enough
    // that noise stays well under the remaining margin.
    let n = 1usize << 16;
    let config = UnknownTConfig::for_dimension(n);
    let scaled: Vec<f64> = [1usize, 4, 16, 64]
        .iter()
        .map(|&t| {
            let oracle = OracleSpec::random(n, t, &mut rng::seeded(t as u64)).unwrap();
            let outcomes = search::run_trials(&oracle, 31 + t as u64, 8000, |o, s| {
                search::search_unknown_t(o, &config, s)
            })
            .unwrap();
            let summary = TrialSummary::from_outcomes(&outcomes, &oracle);
            summary.mean_iterations / (n as f64 / t as f64).sqrt()
        })
        .collect();
    let lo = scaled.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = scaled.iter().cloned().fold(0.0, f64::max);
    assert!(hi / lo <= 1.2, "scaled means {scaled:?}");
}

#[test]
fn unknown_t_backends_agree_statistically() {
    // Same seeds drive both backends; their success rates and mean iteration
    // counts must agree within Monte Carlo noise.
    let n = 512;
    let oracle = OracleSpec::new(n, [7, 300, 301]).unwrap();
    let config = UnknownTConfig::for_dimension(n);
    let full = Searcher::new(Backend::statevector_for(n).unwrap());
    let collapsed = Searcher::default();
    let a = search::run_trials(&oracle, 5, 400, |o, s| full.unknown_t(o, &config, s)).unwrap();
    let b = search::run_trials(&oracle, 6, 400, |o, s| collapsed.unknown_t(o, &config, s)).unwrap();
    let (sa, sb) = (
        TrialSummary::from_outcomes(&a, &oracle),
        TrialSummary::from_outcomes(&b, &oracle),
    );
    let se = ((sa.stddev_iterations.powi(2) + sb.stddev_iterations.powi(2)) / 400.0).sqrt();
    assert!((sa.mean_iterations - sb.mean_iterations).abs() <= 4.0 * se, "{sa:?} vs {sb:?}");
    assert_eq!(sa.false_positives + sb.false_positives, 0);
}

#[test]
fn outcomes_are_reproducible_and_ordered() {
    let oracle = OracleSpec::new(4096, [1, 2, 3, 4]).unwrap();
    let config = UnknownTConfig::for_dimension(4096);
    let run = || search::run_trials(&oracle, 77, 64, |o, s| search::search_unknown_t(o, &config, s)).unwrap();
    let (a, b) = (run(), run());
    assert_eq!(a, b);
    for (i, o) in a.iter().enumerate() {
        assert_eq!(o.seed, rng::trial_seed(77, i as u64));
        assert_eq!(o.oracle_lookups_used, 2 * o.grover_iterations_used + o.classical_probes_used);
        // Replaying one trial from its recorded seed gives the same record.
        let mut fresh = oracle.clone();
        assert_eq!(&search::search_unknown_t(&mut fresh, &config, o.seed).unwrap(), o);
    }
}

#[test]
fn timeout_budget_trades_false_negatives() {
    // Smaller budgets miss more often; the budget is a knob, not a guarantee.
    let n = 1usize << 14;
    let oracle = OracleSpec::new(n, [99]).unwrap();
    let rate = |factor: f64| {
        let config = UnknownTConfig::for_dimension(n).with_timeout_factor(n, factor);
        let outcomes = search::run_trials(&oracle, 3, 600, |o, s| search::search_unknown_t(o, &config, s)).unwrap();
        1.0 - TrialSummary::from_outcomes(&outcomes, &oracle).success_rate
    };
    let (tight, default) = (rate(1.0), rate(4.5));
    assert!(tight > default, "tight {tight} default {default}");
    assert!(default < 0.05);
}
