//! Exact statevector simulation of Grover iterations for any `N`.
//!
//! One iteration is the oracle phase flip `S_A` followed by inversion about
//! the average. The leading minus of `G = −T S₀ T S_A` is folded into the
//! diffusion step, so amplitudes stay real and match the closed form of
//! [`crate::analytics`] term by term rather than up to a global phase.
//!
//! Oracle accounting follows the two-lookup convention: each iteration costs
//! one lookup to compute the predicate into the phase and one to uncompute it.

mod diffusion;
mod oracle;
pub mod snapshot;

use num_complex::Complex64;
use rand::Rng;

pub use diffusion::{DiffusionKind, DiffusionOperator};
pub use oracle::OracleSpec;

use crate::analytics::{AmplitudePair, ProblemShape};
use crate::tolerance;
use crate::{GroverError, Result};

/// Lookups charged per Grover iteration (compute + uncompute).
pub const LOOKUPS_PER_ITERATION: u64 = 2;

/// Length-`N` complex amplitude vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// `(1/√N) Σ |i⟩`.
    pub fn uniform(dimension: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(GroverError::InvalidShape("N must be >= 1".into()));
        }
        let a = Complex64::new(1.0 / (dimension as f64).sqrt(), 0.0);
        Ok(StateVector {
            amplitudes: vec![a; dimension],
        })
    }

    /// Basis state `|index⟩`.
    pub fn basis(dimension: usize, index: usize) -> Result<Self> {
        if index >= dimension {
            return Err(GroverError::IndexOutOfRange {
                index,
                dim: dimension,
            });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dimension];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { amplitudes })
    }

    /// Wraps raw amplitudes as given; normalization is checked only when
    /// measuring.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(GroverError::InvalidShape("N must be >= 1".into()));
        }
        Ok(StateVector { amplitudes })
    }

    pub fn dimension(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probability(&self, index: usize) -> f64 {
        self.amplitudes[index].norm_sqr()
    }

    /// Total probability mass on the oracle's solution set.
    pub fn solution_probability(&self, oracle: &OracleSpec) -> f64 {
        oracle.solutions().iter().map(|&i| self.probability(i)).sum()
    }

    /// Negates the amplitudes at `indices`. Not counted as an oracle lookup;
    /// see [`OracleSpec::phase_flip`] for the counted version.
    pub fn apply_phase_flip(&mut self, indices: &[usize]) -> Result<()> {
        let dim = self.dimension();
        if let Some(&index) = indices.iter().find(|&&i| i >= dim) {
            return Err(GroverError::IndexOutOfRange { index, dim });
        }
        for &i in indices {
            self.amplitudes[i] = -self.amplitudes[i];
        }
        Ok(())
    }

    /// Inversion about the average, `a_i ↦ 2μ − a_i`.
    pub fn apply_diffusion(&mut self, op: &DiffusionOperator) -> Result<()> {
        op.apply_fast(&mut self.amplitudes)
    }

    /// Samples an index with probability `|a_i|²`.
    pub fn measure<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<usize> {
        let norm = self.norm_sqr();
        if (norm - 1.0).abs() > tolerance::MEASURE_NORM {
            return Err(GroverError::Unnormalized(norm));
        }
        let u = rng.random::<f64>() * norm;
        let mut acc = 0.0;
        let mut last_nonzero = 0;
        for (i, a) in self.amplitudes.iter().enumerate() {
            let p = a.norm_sqr();
            if p > 0.0 {
                last_nonzero = i;
            }
            acc += p;
            if u < acc {
                return Ok(i);
            }
        }
        Ok(last_nonzero)
    }

    /// Largest `|a_i − a_j|` within the solution set and within its
    /// complement; zero for any state reachable from uniform by iterations.
    pub fn subspace_spread(&self, oracle: &OracleSpec) -> (f64, f64) {
        let mut inside: Option<Complex64> = None;
        let mut outside: Option<Complex64> = None;
        let (mut spread_in, mut spread_out) = (0.0f64, 0.0f64);
        for (i, &a) in self.amplitudes.iter().enumerate() {
            let (slot, spread) = if oracle.contains(i) {
                (&mut inside, &mut spread_in)
            } else {
                (&mut outside, &mut spread_out)
            };
            match slot {
                Some(first) => *spread = spread.max((a - *first).norm()),
                None => *slot = Some(a),
            }
        }
        (spread_in, spread_out)
    }
}

impl OracleSpec {
    /// `S_A` on `state`, charged as one lookup.
    pub fn phase_flip(&mut self, state: &mut StateVector) -> Result<()> {
        if state.dimension() != self.dimension() {
            return Err(GroverError::DimensionMismatch {
                expected: self.dimension(),
                actual: state.dimension(),
            });
        }
        state.apply_phase_flip(self.solutions())?;
        self.record_lookups(1);
        Ok(())
    }
}

/// Which realisation of the diffusion step an iteration uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiffusionRoute {
    /// `2μ − a_i`, O(N).
    Mean,
    /// `−T′ S₀ T′⁻¹` via fast Walsh–Hadamard or FFT.
    Transform,
    /// Explicit matrix product, `N ≤ 64`.
    Matrix,
}

/// One Grover iteration: phase flip on the oracle's solutions, then
/// inversion about the average. Charges two lookups.
pub fn grover_iterate(
    state: &mut StateVector,
    oracle: &mut OracleSpec,
    op: &DiffusionOperator,
) -> Result<()> {
    grover_iterate_via(state, oracle, op, DiffusionRoute::Mean)
}

pub fn grover_iterate_via(
    state: &mut StateVector,
    oracle: &mut OracleSpec,
    op: &DiffusionOperator,
    route: DiffusionRoute,
) -> Result<()> {
    if op.dimension() != oracle.dimension() {
        return Err(GroverError::DimensionMismatch {
            expected: oracle.dimension(),
            actual: op.dimension(),
        });
    }
    oracle.phase_flip(state)?;
    oracle.record_lookups(LOOKUPS_PER_ITERATION - 1);
    let amps = state.amplitudes_mut();
    match route {
        DiffusionRoute::Mean => op.apply_fast(amps),
        DiffusionRoute::Transform => op.apply_transform(amps),
        DiffusionRoute::Matrix => op.apply_matrix(amps),
    }
}

/// Uniform state followed by `iterations` Grover iterations.
pub fn run_grover(
    oracle: &mut OracleSpec,
    op: &DiffusionOperator,
    iterations: u64,
) -> Result<StateVector> {
    let mut state = StateVector::uniform(oracle.dimension())?;
    for _ in 0..iterations {
        grover_iterate(&mut state, oracle, op)?;
    }
    Ok(state)
}

/// Iterates the two-amplitude recurrence `j` times from `k₀ = ℓ₀ = 1/√N`.
///
/// O(1) memory; equivalent to the full simulator because the state never
/// leaves the span of the two uniform sub-superpositions.
pub fn collapsed_simulate(shape: &ProblemShape, j: u64) -> Result<AmplitudePair> {
    if shape.t() == 0 {
        return Err(GroverError::Undefined {
            op: "collapsed_simulate",
            n: shape.n(),
            t: 0,
            reason: "t must be >= 1",
        });
    }
    let n = shape.n() as f64;
    let t = shape.t() as f64;
    let keep = (n - 2.0 * t) / n;
    let to_k = 2.0 * (n - t) / n;
    let to_l = 2.0 * t / n;
    let mut k = 1.0 / n.sqrt();
    let mut l = if shape.t() == shape.n() { 0.0 } else { k };
    for _ in 0..j {
        let next_k = keep * k + to_k * l;
        l = keep * l - to_l * k;
        k = next_k;
    }
    Ok(AmplitudePair { k, l })
}

/// Samples the measurement outcome of `j` iterations from uniform without
/// materialising the state: a solution with probability `t·k_j²`, uniform
/// within the solution set or its complement. Charges `2j` lookups.
pub fn sample_collapsed<R: Rng + ?Sized>(
    oracle: &mut OracleSpec,
    j: u64,
    rng: &mut R,
) -> usize {
    let n = oracle.dimension();
    let t = oracle.solution_count();
    oracle.record_lookups(LOOKUPS_PER_ITERATION * j);
    let p_solution = match t {
        0 => 0.0,
        _ if t == n => 1.0,
        _ => {
            let amps = collapsed_simulate(&oracle.shape(), j).expect("t >= 1");
            (t as f64 * amps.k * amps.k).clamp(0.0, 1.0)
        }
    };
    if rng.random::<f64>() < p_solution {
        oracle.solutions()[rng.random_range(0..t)]
    } else {
        let r = rng.random_range(0..n - t);
        oracle.nth_non_solution(r).expect("r < N - t")
    }
}
