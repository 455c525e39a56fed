//! Query lower bounds for bounded-error search and the two vector
//! inequalities their proof rests on.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::analytics::ProblemShape;
use crate::{GroverError, Result};

/// `sin(π/8)`.
pub fn sin_pi_over_8() -> f64 {
    (PI / 8.0).sin()
}

/// `⌊sin(π/8)·√N⌋` queries are needed to find a unique marked item with
/// probability at least 1/2.
pub fn lower_bound_unique(n: u64) -> u64 {
    (sin_pi_over_8() * (n as f64).sqrt()).floor() as u64
}

/// `⌊sin(π/8)·√⌊N/t⌋⌋`.
pub fn lower_bound_multi(n: u64, t: u64) -> Result<u64> {
    if t == 0 || t > n {
        return Err(GroverError::InvalidArgument(format!(
            "lower bound needs 1 <= t <= N, got t={t}, N={n}"
        )));
    }
    Ok(lower_bound_unique(n / t))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    #[serde(rename = "N")]
    pub n: u64,
    pub t: u64,
    pub lower_bound_queries: u64,
    /// Lookups (two per iteration) for the first `j` with success ≥ 1/2.
    pub grover_queries_50pct: f64,
    /// `grover_queries_50pct / lower_bound_queries`; infinite when the bound
    /// is zero.
    pub ratio: f64,
    /// Set when the bound floors to zero.
    pub degenerate: bool,
}

/// Smallest `j` with `sin²((2j+1)θ) ≥ 1/2`.
pub fn iterations_for_half(shape: &ProblemShape) -> Result<u64> {
    if shape.t() == 0 {
        return Err(GroverError::InvalidArgument("t must be >= 1".into()));
    }
    if shape.success_probability(0) >= 0.5 {
        return Ok(0);
    }
    // (2j+1)θ ≥ π/4 on the first rising edge.
    let mut j = ((PI / 4.0 / shape.theta() - 1.0) / 2.0).ceil().max(0.0) as u64;
    while j > 0 && shape.success_probability(j - 1) >= 0.5 {
        j -= 1;
    }
    while shape.success_probability(j) < 0.5 {
        j += 1;
    }
    Ok(j)
}

pub fn compare_grover_to_bound(n: u64, t: u64) -> Result<BoundReport> {
    let shape = ProblemShape::new(n, t)?;
    let bound = lower_bound_multi(n, t)?;
    let j = iterations_for_half(&shape)?;
    let queries = 2.0 * j as f64;
    let ratio = if bound == 0 {
        f64::INFINITY
    } else {
        queries / bound as f64
    };
    Ok(BoundReport {
        n,
        t,
        lower_bound_queries: bound,
        grover_queries_50pct: queries,
        ratio,
        degenerate: bound == 0,
    })
}

/// `(π/4) / sin(π/8)`, the large-`N` limit of the `t = 1` ratio.
pub fn asymptotic_ratio() -> f64 {
    (PI / 4.0) / sin_pi_over_8()
}

/// Slack of `‖αa − βb‖² ≥ |α|² + |β|² − 2|α||β|` for unit `a`, `b`
/// (non-negative when the inequality holds).
pub fn difference_norm_slack(alpha: Complex64, a: &[Complex64], beta: Complex64, b: &[Complex64]) -> f64 {
    let lhs: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| (alpha * x - beta * y).norm_sqr())
        .sum();
    let (ma, mb) = (alpha.norm(), beta.norm());
    lhs - (ma * ma + mb * mb - 2.0 * ma * mb)
}

/// Slack of `(Σ|x_i|)² ≤ r Σ|x_i|²`.
pub fn cauchy_schwarz_slack(x: &[Complex64]) -> f64 {
    let r = x.len() as f64;
    let l1: f64 = x.iter().map(|c| c.norm()).sum();
    let l2: f64 = x.iter().map(|c| c.norm_sqr()).sum();
    r * l2 - l1 * l1
}

fn random_unit<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0))
            .collect();
        let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-3 {
            return v.into_iter().map(|c| c / norm).collect();
        }
    }
}

/// Checks both inequalities on `trials` random instances of dimension
/// `1..=64`. Returns `true` iff no slack is below `−1e−12` (relative to the
/// magnitude of the terms).
pub fn proposition_checks<R: Rng + ?Sized>(rng: &mut R, trials: u64) -> bool {
    for _ in 0..trials {
        let dim = rng.random_range(1..=64);
        let a = random_unit(dim, rng);
        let b = random_unit(dim, rng);
        let scale = rng.random::<f64>() * 4.0;
        let alpha = Complex64::from_polar(scale * rng.random::<f64>(), rng.random::<f64>() * 2.0 * PI);
        let beta = Complex64::from_polar(scale * rng.random::<f64>(), rng.random::<f64>() * 2.0 * PI);
        let mag = (alpha.norm() + beta.norm()).powi(2).max(1.0);
        if difference_norm_slack(alpha, &a, beta, &b) < -1e-12 * mag {
            return false;
        }
        let x: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0) * scale)
            .collect();
        let l2: f64 = x.iter().map(|c| c.norm_sqr()).sum();
        if cauchy_schwarz_slack(&x) < -1e-12 * (dim as f64 * l2).max(1.0) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use approx::assert_abs_diff_eq;

    #[test]
    fn unique_bound_values() {
        assert_eq!(lower_bound_unique(1), 0);
        assert_eq!(lower_bound_unique(1 << 20), 391);
        assert_eq!(lower_bound_unique(100), 3);
    }

    #[test]
    fn multi_bound_values() {
        assert_eq!(lower_bound_multi(77, 77).unwrap(), 0);
        assert_eq!(lower_bound_multi(1 << 20, 4).unwrap(), 195);
        assert_eq!(lower_bound_multi(1 << 20, 1).unwrap(), 391);
        assert!(lower_bound_multi(10, 0).is_err());
        for n in 1..2000 {
            assert_eq!(lower_bound_multi(n, 1).unwrap(), lower_bound_unique(n));
        }
    }

    #[test]
    fn half_success_iterations_is_minimal() {
        for (n, t) in [(4u64, 1u64), (1 << 10, 1), (1000, 7), (64, 40), (1 << 20, 3)] {
            let s = ProblemShape::new(n, t).unwrap();
            let j = iterations_for_half(&s).unwrap();
            assert!(s.success_probability(j) >= 0.5);
            assert!((0..j).all(|i| s.success_probability(i) < 0.5));
        }
    }

    #[test]
    fn comparison_examples() {
        let r = compare_grover_to_bound(1 << 20, 1).unwrap();
        assert_eq!(r.lower_bound_queries, 391);
        assert_abs_diff_eq!(r.ratio, 2.05, epsilon = 0.05);
        assert_abs_diff_eq!(asymptotic_ratio(), 2.0524, epsilon = 1e-4);

        let r = compare_grover_to_bound(4, 1).unwrap();
        assert_eq!(r.grover_queries_50pct, 2.0);
        assert_eq!(r.lower_bound_queries, 0);
        assert!(r.degenerate && r.ratio.is_infinite());
    }

    #[test]
    fn ratio_converges() {
        let errs: Vec<f64> = (10..=20)
            .map(|e| (compare_grover_to_bound(1 << e, 1).unwrap().ratio - asymptotic_ratio()).abs())
            .collect();
        assert!(errs.last().unwrap() < errs.first().unwrap());
        assert!(*errs.last().unwrap() < 0.05);
    }

    #[test]
    fn grover_never_beats_bound() {
        for n in (1..=4096u64).step_by(7) {
            for t in [1, 2, 3, n / 3 + 1, n] {
                if t == 0 || t > n {
                    continue;
                }
                let r = compare_grover_to_bound(n, t).unwrap();
                assert!(r.grover_queries_50pct >= r.lower_bound_queries as f64, "N={n} t={t}");
            }
        }
    }

    #[test]
    fn inequality_equality_cases() {
        let a = vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
        let alpha = Complex64::new(0.3, 0.4);
        assert!(difference_norm_slack(alpha, &a, alpha, &a) >= 0.0);
        assert_abs_diff_eq!(difference_norm_slack(alpha, &a, alpha, &a), 0.0, epsilon = 1e-15);
        let x = vec![Complex64::new(0.5, -0.5); 7];
        assert_abs_diff_eq!(cauchy_schwarz_slack(&x), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn inequalities_hold_on_random_instances() {
        assert!(proposition_checks(&mut seeded(8), 10_000));
    }
}
