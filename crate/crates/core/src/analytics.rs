//! Closed-form amplitude evolution for Grover iterations.
//!
//! With `t` marked indices out of `N`, the state after `j` iterations from the
//! uniform superposition lies in the span of "uniform over solutions" and
//! "uniform over non-solutions". Writing `sin²θ = t/N`, the per-index
//! amplitudes are
//!
//! ```text
//! k_j = sin((2j+1)θ) / √t        ℓ_j = cos((2j+1)θ) / √(N−t)
//! ```
//!
//! so the probability of observing a solution is `sin²((2j+1)θ)`. Everything
//! in this module is a pure function of `(N, t)`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use serde::{Deserialize, Serialize};

use crate::tolerance;
use crate::{GroverError, Result};

/// Search-space geometry: table size, number of solutions and the angle θ
/// with `sin²θ = t/N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemShape {
    n: u64,
    t: u64,
    theta: f64,
}

/// Common amplitude on every solution index (`k`) and on every non-solution
/// index (`l`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplitudePair {
    pub k: f64,
    pub l: f64,
}

impl AmplitudePair {
    /// `t·k² + (N−t)·ℓ²`, which is 1 for any state reachable from uniform.
    pub fn norm_sqr(&self, shape: &ProblemShape) -> f64 {
        let t = shape.t as f64;
        let rest = (shape.n - shape.t) as f64;
        t * self.k * self.k + rest * self.l * self.l
    }
}

/// Measure-and-restart plan: iterate `j_star` times, measure, start over on
/// failure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StoppingPlan {
    pub j_star: u64,
    pub success_prob: f64,
    /// `j_star / success_prob`, the expected total iteration count.
    pub expected_iterations: f64,
    /// Real-valued stationary point of `j / sin²((2j+1)θ)`, when one exists.
    pub j_real: Option<f64>,
}

impl ProblemShape {
    pub fn new(n: u64, t: u64) -> Result<Self> {
        if n < 1 {
            return Err(GroverError::InvalidShape("N must be >= 1".into()));
        }
        if t > n {
            return Err(GroverError::InvalidShape(format!(
                "t must be in [0, N], got t={t} with N={n}"
            )));
        }
        let theta = ((t as f64) / (n as f64)).sqrt().asin();
        Ok(ProblemShape { n, t, theta })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    fn undefined(&self, op: &'static str, reason: &'static str) -> GroverError {
        GroverError::Undefined {
            op,
            n: self.n,
            t: self.t,
            reason,
        }
    }

    fn require_solutions(&self, op: &'static str) -> Result<()> {
        if self.t == 0 {
            return Err(self.undefined(op, "t must be >= 1"));
        }
        Ok(())
    }

    fn require_proper(&self, op: &'static str) -> Result<()> {
        self.require_solutions(op)?;
        if self.t == self.n {
            return Err(self.undefined(op, "t must be < N"));
        }
        Ok(())
    }

    /// Phase `(2j+1)θ` after `j` iterations.
    pub fn phase(&self, j: u64) -> f64 {
        (2.0 * j as f64 + 1.0) * self.theta
    }

    /// Closed-form `(k_j, ℓ_j)`. For `t = N`, `ℓ` is reported as 0.
    pub fn amplitudes(&self, j: u64) -> Result<AmplitudePair> {
        self.require_solutions("amplitudes")?;
        let phase = self.phase(j);
        let k = phase.sin() / (self.t as f64).sqrt();
        let l = if self.t == self.n {
            0.0
        } else {
            phase.cos() / ((self.n - self.t) as f64).sqrt()
        };
        Ok(AmplitudePair { k, l })
    }

    /// Probability of observing a solution after `j` iterations.
    pub fn success_probability(&self, j: u64) -> f64 {
        let s = self.phase(j).sin();
        s * s
    }

    /// `⌊π/4θ⌋`; after that many iterations the failure probability is at
    /// most `t/N`.
    pub fn optimal_iterations(&self) -> Result<u64> {
        self.require_solutions("optimal_iterations")?;
        Ok((FRAC_PI_4 / self.theta).floor() as u64)
    }

    /// `m₀ = 1/sin 2θ = N / (2√((N−t)t))`.
    pub fn critical_scale(&self) -> Result<f64> {
        self.require_proper("critical_scale")?;
        Ok(1.0 / (2.0 * self.theta).sin())
    }

    /// Success probability when the iteration count is drawn uniformly from
    /// `0..m`: `1/2 − sin(4mθ) / (4m sin 2θ)`.
    pub fn averaged_success(&self, m: u64) -> Result<f64> {
        self.require_proper("averaged_success")?;
        if m == 0 {
            return Err(GroverError::InvalidArgument("m must be >= 1".into()));
        }
        let m = m as f64;
        Ok(0.5 - (4.0 * m * self.theta).sin() / (4.0 * m * (2.0 * self.theta).sin()))
    }

    /// Expected iterations `j / sin²((2j+1)θ)` of the restart strategy that
    /// measures after `j` iterations.
    pub fn restart_cost(&self, j: f64) -> f64 {
        let s = ((2.0 * j + 1.0) * self.theta).sin();
        j / (s * s)
    }

    /// Expected-iteration-optimal stopping point for measure-and-restart.
    ///
    /// The stationary condition `4θj = tan((2j+1)θ)` is solved by bisection
    /// on the first branch `(2j+1)θ < π/2`. There `g(j) = 4θj − tan((2j+1)θ)`
    /// peaks where `(2j+1)θ = π/4` and tends to −∞ at the pole, so the
    /// minimum of the cost is the crossing between those two points. The
    /// integer answer is the cheaper of `⌊j⌋` and `⌈j⌉` (smaller on ties).
    ///
    /// When `g` never becomes positive (roughly `t ≳ N/10`) the cost is
    /// increasing on the whole branch and the plan is to measure right away.
    pub fn optimal_stopping(&self) -> Result<StoppingPlan> {
        self.require_proper("optimal_stopping")?;
        let theta = self.theta;
        let g = |j: f64| 4.0 * theta * j - ((2.0 * j + 1.0) * theta).tan();

        let peak = (FRAC_PI_4 / theta - 1.0) / 2.0;
        let pole = (FRAC_PI_2 / theta - 1.0) / 2.0;
        if peak <= 0.0 || g(peak) <= 0.0 {
            return Ok(StoppingPlan {
                j_star: 0,
                success_prob: self.success_probability(0),
                expected_iterations: 0.0,
                j_real: None,
            });
        }

        let (mut lo, mut hi) = (peak, pole);
        while hi - lo > tolerance::STOPPING_ROOT {
            let mid = 0.5 * (lo + hi);
            if g(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let root = 0.5 * (lo + hi);

        let floor = root.floor() as u64;
        let ceil = root.ceil() as u64;
        let j_star = if self.restart_cost(ceil as f64) < self.restart_cost(floor as f64) {
            ceil
        } else {
            floor
        };
        let success_prob = self.success_probability(j_star);
        Ok(StoppingPlan {
            j_star,
            success_prob,
            expected_iterations: j_star as f64 / success_prob,
            j_real: Some(root),
        })
    }
}

/// `Σ_{j<m} cos((2j+1)α) = sin(2mα) / (2 sin α)`.
pub fn trig_sum(alpha: f64, m: u64) -> Result<f64> {
    if m == 0 {
        return Err(GroverError::InvalidArgument("m must be >= 1".into()));
    }
    let s = alpha.sin();
    if s.abs() < tolerance::SINGULAR_SIN {
        return Err(GroverError::InvalidArgument(format!(
            "alpha={alpha} is a multiple of pi"
        )));
    }
    Ok((2.0 * m as f64 * alpha).sin() / (2.0 * s))
}

/// Root of `z = tan(z/2)` in `(2, 3)`, the large-`N/t` limit of `4θj*`.
pub fn z_constant() -> f64 {
    let h = |z: f64| (z / 2.0).tan() - z;
    let (mut lo, mut hi) = (2.0_f64, 3.0_f64);
    while hi - lo > tolerance::Z_ROOT {
        let mid = 0.5 * (lo + hi);
        if h(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Limits of the restart strategy as `N/t → ∞`, in units of `√(N/t)`:
/// `(z/4, sin²(z/2), z / (4 sin²(z/2)))`.
pub fn asymptotic_stopping_constants() -> (f64, f64, f64) {
    let z = z_constant();
    let p = (z / 2.0).sin().powi(2);
    (z / 4.0, p, z / (4.0 * p))
}
