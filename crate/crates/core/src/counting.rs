//! Approximate counting of solutions by Fourier period estimation.
//!
//! Running `j` Grover iterations for every `j < P` in superposition and
//! observing the table register leaves the iteration register in
//! `Σ_j k_j |j⟩` (or `Σ_j ℓ_j |j⟩`), a sampled sinusoid with `f = Pθ/π`
//! cycles over the window. A unitary DFT concentrates it near `f` and
//! `P − f`; a measured frequency `ν` is folded to `f̃ = min(ν, P−ν)` and
//! gives `θ̃ = f̃π/P`, `t̃ = N sin²θ̃`.
//!
//! The iteration register is built in closed form (O(P) memory).
//! [`joint_state_crosscheck`] rebuilds it from the full `P·N` joint state on
//! small instances.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::analytics::ProblemShape;
use crate::simulator::{self, DiffusionOperator, OracleSpec, StateVector};
use crate::tolerance;
use crate::{GroverError, Result};

/// Smallest `c` for which the absolute regime yields the exact count.
pub const EXACT_MIN_C: f64 = 14.0;

/// Which part of the table register was observed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Solution,
    NonSolution,
}

/// How the sample length `P` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// One run with `P ≥ c√N`.
    Fixed,
    /// Double `P` from 2 until `f̃ ≥ c`.
    Relative,
    /// A fixed run, then a second with `P ≥ c√(t̃N)`.
    Absolute,
    /// Absolute with `c ≥ 14`; the rounded estimate is the count.
    Exact,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Fixed => "fixed",
            Regime::Relative => "relative",
            Regime::Absolute => "absolute",
            Regime::Exact => "exact",
        })
    }
}

impl FromStr for Regime {
    type Err = GroverError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed" => Ok(Regime::Fixed),
            "relative" => Ok(Regime::Relative),
            "absolute" => Ok(Regime::Absolute),
            "exact" => Ok(Regime::Exact),
            other => Err(GroverError::InvalidArgument(format!("unknown regime {other:?}"))),
        }
    }
}

/// One counting run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountingEstimate {
    #[serde(rename = "P")]
    pub p: usize,
    pub measured_frequency: usize,
    pub f_tilde: f64,
    pub theta_tilde: f64,
    pub t_tilde: f64,
    pub t_rounded: u64,
    /// `(2π/P)√(t̃N) + π²N/P²`: the error bound with `t̃` standing in for `t`.
    pub error_bound: f64,
    pub regime: Regime,
    pub branch: Branch,
}

impl CountingEstimate {
    /// `|f − f̃| < 1`, the condition under which [`error_bound_for`] holds.
    pub fn frequency_resolved(&self, shape: &ProblemShape) -> bool {
        (true_frequency(shape, self.p) - self.f_tilde).abs() < 1.0
    }
}

/// The collapsed iteration register `Σ_j a_j |j⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct JRegister {
    p: usize,
    amplitudes: Vec<Complex64>,
}

impl JRegister {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        check_power_of_two("P", amplitudes.len())?;
        Ok(JRegister {
            p: amplitudes.len(),
            amplitudes,
        })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `|b_ν|²` for every `ν`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Samples an index with probability `|a_ν|² / Σ|a|²`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let probs = self.probabilities();
        let total: f64 = probs.iter().sum();
        let u = rng.random::<f64>() * total;
        let mut acc = 0.0;
        for (i, p) in probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
    }

    /// Spectrum dump as CSV with header `nu,probability`.
    pub fn spectrum_csv(&self) -> String {
        let mut out = String::from("nu,probability\n");
        for (nu, p) in self.probabilities().iter().enumerate() {
            out.push_str(&format!("{nu},{p:e}\n"));
        }
        out
    }
}

fn check_power_of_two(what: &'static str, p: usize) -> Result<()> {
    if p < 2 || !p.is_power_of_two() {
        return Err(GroverError::NotPowerOfTwo(what, p));
    }
    Ok(())
}

/// Smallest power of two `≥ max(x, 2)`.
pub fn next_power_of_two(x: f64) -> usize {
    let need = x.ceil().max(2.0) as usize;
    need.next_power_of_two()
}

/// `f = Pθ/π`, the number of periods of `k_j` over `0 ≤ j < P`.
pub fn true_frequency(shape: &ProblemShape, p: usize) -> f64 {
    p as f64 * shape.theta() / PI
}

/// `(2π/P)√(tN) + π²N/P²`.
pub fn error_bound_for(n: u64, t: f64, p: usize) -> f64 {
    let (n, p) = (n as f64, p as f64);
    2.0 * PI / p * (t.max(0.0) * n).sqrt() + PI * PI * n / (p * p)
}

/// Probability that observing the table register yields a solution:
/// `(1/P) Σ_j sin²((2j+1)θ)`.
pub fn solution_branch_probability(shape: &ProblemShape, p: usize) -> f64 {
    (0..p as u64).map(|j| shape.success_probability(j)).sum::<f64>() / p as f64
}

/// Samples which branch the table-register observation lands in.
pub fn sample_branch<R: Rng + ?Sized>(shape: &ProblemShape, p: usize, rng: &mut R) -> Branch {
    if shape.t() == 0 {
        return Branch::NonSolution;
    }
    if shape.t() == shape.n() {
        return Branch::Solution;
    }
    if rng.random::<f64>() < solution_branch_probability(shape, p) {
        Branch::Solution
    } else {
        Branch::NonSolution
    }
}

/// Closed-form collapsed iteration register for the given branch,
/// renormalized.
pub fn build_j_register(shape: &ProblemShape, p: usize, branch: Branch) -> Result<JRegister> {
    check_power_of_two("P", p)?;
    let impossible = match branch {
        Branch::Solution => shape.t() == 0,
        Branch::NonSolution => shape.t() == shape.n(),
    };
    if impossible {
        return Err(GroverError::InvalidArgument(format!(
            "{branch:?} branch cannot be observed with N={}, t={}",
            shape.n(),
            shape.t()
        )));
    }
    // Common 1/√t or 1/√(N−t) factors cancel on renormalization.
    let raw: Vec<f64> = (0..p as u64)
        .map(|j| match branch {
            Branch::Solution => shape.phase(j).sin(),
            Branch::NonSolution => shape.phase(j).cos(),
        })
        .collect();
    let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(GroverError::InvalidArgument(format!(
            "{branch:?} branch has zero amplitude for P={p}"
        )));
    }
    JRegister::new(raw.into_iter().map(|x| Complex64::new(x / norm, 0.0)).collect())
}

/// Unitary DFT `b_ν = (1/√P) Σ_j a_j e^{2πi jν/P}`.
pub fn dft(register: &JRegister) -> JRegister {
    transform(register, false)
}

/// Inverse of [`dft`].
pub fn inverse_dft(register: &JRegister) -> JRegister {
    transform(register, true)
}

fn transform(register: &JRegister, inverse: bool) -> JRegister {
    let p = register.p;
    let mut planner = FftPlanner::new();
    // rustfft's "inverse" direction carries the e^{+2πi} kernel used here.
    let fft = if inverse {
        planner.plan_fft_forward(p)
    } else {
        planner.plan_fft_inverse(p)
    };
    let mut buf = register.amplitudes.clone();
    fft.process(&mut buf);
    let scale = 1.0 / (p as f64).sqrt();
    for b in buf.iter_mut() {
        *b *= scale;
    }
    JRegister { p, amplitudes: buf }
}

fn estimate_from_frequency(
    shape: &ProblemShape,
    p: usize,
    nu: usize,
    regime: Regime,
    branch: Branch,
) -> CountingEstimate {
    let f_tilde = nu.min(p - nu) as f64;
    let theta_tilde = f_tilde * PI / p as f64;
    let t_tilde = shape.n() as f64 * theta_tilde.sin().powi(2);
    CountingEstimate {
        p,
        measured_frequency: nu,
        f_tilde,
        theta_tilde,
        t_tilde,
        t_rounded: t_tilde.round() as u64,
        error_bound: error_bound_for(shape.n(), t_tilde, p),
        regime,
        branch,
    }
}

/// Spectrum `|b_ν|²` for a forced branch.
pub fn spectrum(shape: &ProblemShape, p: usize, branch: Branch) -> Result<Vec<f64>> {
    Ok(dft(&build_j_register(shape, p, branch)?).probabilities())
}

/// One counting run with sample length `P`: sample the branch, build the
/// register, transform, sample `ν`, fold and estimate.
pub fn estimate_t<R: Rng + ?Sized>(shape: &ProblemShape, p: usize, rng: &mut R) -> Result<CountingEstimate> {
    check_power_of_two("P", p)?;
    let branch = sample_branch(shape, p, rng);
    let spectrum = dft(&build_j_register(shape, p, branch)?);
    let nu = spectrum.sample(rng);
    Ok(estimate_from_frequency(shape, p, nu, Regime::Fixed, branch))
}

/// Runs a regime and returns every stage's estimate; the last is the answer.
pub fn count_with_regime_staged<R: Rng + ?Sized>(
    shape: &ProblemShape,
    regime: Regime,
    c: f64,
    rng: &mut R,
) -> Result<Vec<CountingEstimate>> {
    if c.is_nan() || c <= 0.0 {
        return Err(GroverError::InvalidArgument(format!("c must be > 0, got {c}")));
    }
    if regime == Regime::Exact && c < EXACT_MIN_C {
        return Err(GroverError::InvalidArgument(format!(
            "exact regime needs c >= {EXACT_MIN_C}, got {c}"
        )));
    }
    let root_n = (shape.n() as f64).sqrt();
    let tag = |mut e: CountingEstimate| {
        e.regime = regime;
        e
    };
    let stages = match regime {
        Regime::Fixed => vec![tag(estimate_t(shape, next_power_of_two(c * root_n), rng)?)],
        Regime::Relative => {
            // Without a solution f̃ stays 0; stop once P has passed what t = 1
            // would need (cπ√N).
            let cap = next_power_of_two(4.0 * c * root_n);
            let mut stages = Vec::new();
            let mut p = 2;
            loop {
                let e = tag(estimate_t(shape, p, rng)?);
                stages.push(e);
                if e.f_tilde >= c || p >= cap {
                    break;
                }
                p *= 2;
            }
            stages
        }
        Regime::Absolute | Regime::Exact => {
            let first = tag(estimate_t(shape, next_power_of_two(c * root_n), rng)?);
            let p2 = next_power_of_two(c * (first.t_tilde * shape.n() as f64).sqrt());
            let second = tag(estimate_t(shape, p2, rng)?);
            vec![first, second]
        }
    };
    Ok(stages)
}

pub fn count_with_regime<R: Rng + ?Sized>(
    shape: &ProblemShape,
    regime: Regime,
    c: f64,
    rng: &mut R,
) -> Result<CountingEstimate> {
    let stages = count_with_regime_staged(shape, regime, c, rng)?;
    Ok(*stages.last().expect("every regime runs at least once"))
}

/// Builds the joint state `Σ_j |j⟩ G^j |Ψ₀⟩ / √P` with the real simulator,
/// collapses it on every table index, and checks the iteration register
/// against [`build_j_register`] for each observable branch. Also checks the
/// branch probability. Limited to `N, P ≤ 64`.
pub fn joint_state_crosscheck(oracle: &OracleSpec, p: usize) -> Result<bool> {
    let n = oracle.dimension();
    check_power_of_two("P", p)?;
    if n > tolerance::MAX_MATRIX_DIM || p > tolerance::MAX_MATRIX_DIM {
        return Err(GroverError::InvalidArgument(format!(
            "joint state limited to N, P <= {}",
            tolerance::MAX_MATRIX_DIM
        )));
    }
    let shape = oracle.shape();
    let op = DiffusionOperator::for_dimension(n)?;
    let mut counter = oracle.clone();
    let mut state = StateVector::uniform(n)?;
    let scale = 1.0 / (p as f64).sqrt();
    // joint[j][i] = amplitude of |j, i⟩
    let mut joint = Vec::with_capacity(p);
    for _ in 0..p {
        joint.push(state.amplitudes().iter().map(|a| a * scale).collect::<Vec<_>>());
        simulator::grover_iterate(&mut state, &mut counter, &op)?;
    }

    let solution_mass: f64 = joint
        .iter()
        .map(|row| oracle.solutions().iter().map(|&i| row[i].norm_sqr()).sum::<f64>())
        .sum();
    if (solution_mass - solution_branch_probability(&shape, p)).abs() > tolerance::MATRIX {
        return Ok(false);
    }

    for i in 0..n {
        let branch = if oracle.contains(i) {
            Branch::Solution
        } else {
            Branch::NonSolution
        };
        let column: Vec<Complex64> = joint.iter().map(|row| row[i]).collect();
        let norm = column.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < tolerance::MATRIX {
            // This outcome has zero probability; nothing to collapse onto.
            continue;
        }
        let expected = build_j_register(&shape, p, branch)?;
        let matches = column
            .iter()
            .zip(expected.amplitudes())
            .all(|(a, e)| (a / norm - e).norm() <= tolerance::MATRIX);
        if !matches {
            return Ok(false);
        }
    }
    Ok(true)
}
