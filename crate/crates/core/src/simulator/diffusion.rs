//! Inversion about the average and the transforms that realise it.
//!
//! For any unitary `T′` with `T′|0⟩ = (1/√N) Σ|i⟩` the operator
//! `−T′ S₀ T′⁻¹` equals `2|u⟩⟨u| − I` with `u` the uniform vector, i.e.
//! `a_i ↦ 2μ − a_i`. The simulator always applies that O(N) form; the
//! transform and matrix routes exist so tests can check it against each
//! concrete choice of `T′`.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::tolerance;
use crate::{GroverError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiffusionKind {
    WalshHadamard,
    ExactDft,
    Custom,
}

#[derive(Clone)]
enum Repr {
    WalshHadamard,
    ExactDft {
        forward: Arc<dyn Fft<f64>>,
        inverse: Arc<dyn Fft<f64>>,
    },
    Custom(DMatrix<Complex64>),
}

/// A choice of `T′` for dimension `N`.
#[derive(Clone)]
pub struct DiffusionOperator {
    dimension: usize,
    repr: Repr,
}

impl fmt::Debug for DiffusionOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DiffusionOperator")
            .field("dimension", &self.dimension)
            .field("kind", &self.kind())
            .finish()
    }
}

impl DiffusionOperator {
    /// Walsh–Hadamard transform; `N` must be a power of two.
    pub fn walsh_hadamard(dimension: usize) -> Result<Self> {
        if !dimension.is_power_of_two() {
            return Err(GroverError::InvalidOperator(format!(
                "Walsh-Hadamard needs a power-of-two dimension, got {dimension}"
            )));
        }
        Ok(DiffusionOperator {
            dimension,
            repr: Repr::WalshHadamard,
        })
    }

    /// Unitary DFT `T′_{ij} = e^{2πi·ij/N} / √N`, valid for every `N`.
    pub fn exact_dft(dimension: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(GroverError::InvalidShape("N must be >= 1".into()));
        }
        let mut planner = FftPlanner::new();
        Ok(DiffusionOperator {
            dimension,
            repr: Repr::ExactDft {
                forward: planner.plan_fft_forward(dimension),
                inverse: planner.plan_fft_inverse(dimension),
            },
        })
    }

    /// Walsh–Hadamard when `N` is a power of two, exact DFT otherwise.
    pub fn for_dimension(dimension: usize) -> Result<Self> {
        if dimension.is_power_of_two() {
            Self::walsh_hadamard(dimension)
        } else {
            Self::exact_dft(dimension)
        }
    }

    /// Arbitrary `T′`, checked for unitarity and `T′|0⟩ = uniform`.
    pub fn custom(matrix: DMatrix<Complex64>) -> Result<Self> {
        let n = matrix.nrows();
        if n == 0 || matrix.ncols() != n {
            return Err(GroverError::InvalidOperator(format!(
                "expected a non-empty square matrix, got {}x{}",
                n,
                matrix.ncols()
            )));
        }
        let op = DiffusionOperator {
            dimension: n,
            repr: Repr::Custom(matrix),
        };
        let (unitary, column) = op.validity_error();
        if unitary > tolerance::ROUTE {
            return Err(GroverError::InvalidOperator(format!(
                "not unitary (max |T†T - I| = {unitary:e})"
            )));
        }
        if column > tolerance::ROUTE {
            return Err(GroverError::InvalidOperator(format!(
                "T|0> is not uniform (max deviation {column:e})"
            )));
        }
        Ok(op)
    }

    /// A random unitary whose first column is uniform, built by Gram–Schmidt
    /// from the uniform vector followed by random complex columns.
    pub fn random_custom<R: Rng + ?Sized>(dimension: usize, rng: &mut R) -> Result<Self> {
        if dimension == 0 {
            return Err(GroverError::InvalidShape("N must be >= 1".into()));
        }
        let n = dimension;
        let mut m = DMatrix::<Complex64>::zeros(n, n);
        let u = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
        for i in 0..n {
            m[(i, 0)] = u;
        }
        let mut col = 1;
        while col < n {
            let mut v: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect();
            // Two passes of modified Gram-Schmidt keep orthogonality at ~1e-15.
            for _ in 0..2 {
                for prev in 0..col {
                    let dot: Complex64 = (0..n).map(|i| m[(i, prev)].conj() * v[i]).sum();
                    for (i, vi) in v.iter_mut().enumerate() {
                        *vi -= dot * m[(i, prev)];
                    }
                }
            }
            let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-6 {
                continue;
            }
            for (i, vi) in v.iter().enumerate() {
                m[(i, col)] = vi / norm;
            }
            col += 1;
        }
        Self::custom(m)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn kind(&self) -> DiffusionKind {
        match self.repr {
            Repr::WalshHadamard => DiffusionKind::WalshHadamard,
            Repr::ExactDft { .. } => DiffusionKind::ExactDft,
            Repr::Custom(_) => DiffusionKind::Custom,
        }
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.dimension {
            return Err(GroverError::DimensionMismatch {
                expected: self.dimension,
                actual: len,
            });
        }
        Ok(())
    }

    /// `a_i ↦ 2μ − a_i` in place.
    pub fn apply_fast(&self, amps: &mut [Complex64]) -> Result<()> {
        self.check_len(amps.len())?;
        invert_about_mean(amps);
        Ok(())
    }

    /// `−T′ S₀ T′⁻¹` applied through the transform itself (fast Walsh–Hadamard
    /// or FFT), or the explicit matrix for custom operators.
    pub fn apply_transform(&self, amps: &mut [Complex64]) -> Result<()> {
        self.check_len(amps.len())?;
        let scale = 1.0 / (self.dimension as f64).sqrt();
        match &self.repr {
            Repr::WalshHadamard => {
                fwht(amps);
                amps[0] = -amps[0];
                fwht(amps);
                for a in amps.iter_mut() {
                    *a *= -scale * scale;
                }
            }
            Repr::ExactDft { forward, inverse } => {
                // T′⁻¹ = T′† uses e^{-2πi ij/N}: rustfft's forward direction.
                forward.process(amps);
                amps[0] = -amps[0];
                inverse.process(amps);
                for a in amps.iter_mut() {
                    *a *= -scale * scale;
                }
            }
            Repr::Custom(_) => self.apply_matrix(amps)?,
        }
        Ok(())
    }

    /// Explicit `T′` as an `N×N` matrix.
    pub fn matrix(&self) -> DMatrix<Complex64> {
        let n = self.dimension;
        let scale = 1.0 / (n as f64).sqrt();
        match &self.repr {
            Repr::WalshHadamard => DMatrix::from_fn(n, n, |i, j| {
                let sign = if (i & j).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                Complex64::new(sign * scale, 0.0)
            }),
            Repr::ExactDft { .. } => DMatrix::from_fn(n, n, |i, j| {
                // Reduce ij mod N before scaling to keep the angle small.
                let k = ((i as u128 * j as u128) % n as u128) as f64;
                Complex64::from_polar(scale, 2.0 * std::f64::consts::PI * k / n as f64)
            }),
            Repr::Custom(m) => m.clone(),
        }
    }

    /// `−T′ S₀ T′⁻¹` as an explicit matrix.
    pub fn diffusion_matrix(&self) -> DMatrix<Complex64> {
        let t = self.matrix();
        let mut s0 = DMatrix::<Complex64>::identity(self.dimension, self.dimension);
        s0[(0, 0)] = Complex64::new(-1.0, 0.0);
        -(&t * s0 * t.adjoint())
    }

    /// Matrix-vector route; `O(N²)` memory, intended for `N ≤ 64`.
    pub fn apply_matrix(&self, amps: &mut [Complex64]) -> Result<()> {
        self.check_len(amps.len())?;
        if self.dimension > tolerance::MAX_MATRIX_DIM && !matches!(self.repr, Repr::Custom(_)) {
            return Err(GroverError::InvalidArgument(format!(
                "explicit matrices are limited to N <= {}",
                tolerance::MAX_MATRIX_DIM
            )));
        }
        let v = nalgebra::DVector::from_column_slice(amps);
        let out = self.diffusion_matrix() * v;
        amps.copy_from_slice(out.as_slice());
        Ok(())
    }

    /// `(max |T′†T′ − I|, max |T′|0⟩ − 1/√N|)` over all entries.
    pub fn validity_error(&self) -> (f64, f64) {
        let n = self.dimension;
        let t = self.matrix();
        let gram = t.adjoint() * &t;
        let mut unitary = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                unitary = unitary.max((gram[(i, j)] - Complex64::new(target, 0.0)).norm());
            }
        }
        let u = 1.0 / (n as f64).sqrt();
        let column = (0..n)
            .map(|i| (t[(i, 0)] - Complex64::new(u, 0.0)).norm())
            .fold(0.0, f64::max);
        (unitary, column)
    }
}

pub(crate) fn invert_about_mean(amps: &mut [Complex64]) {
    let n = amps.len() as f64;
    let mean: Complex64 = amps.iter().sum::<Complex64>() / n;
    let twice = 2.0 * mean;
    for a in amps.iter_mut() {
        *a = twice - *a;
    }
}

/// Unnormalised in-place fast Walsh–Hadamard transform.
fn fwht(amps: &mut [Complex64]) {
    let n = amps.len();
    let mut h = 1;
    while h < n {
        for block in (0..n).step_by(2 * h) {
            for i in block..block + h {
                let (x, y) = (amps[i], amps[i + h]);
                amps[i] = x + y;
                amps[i + h] = x - y;
            }
        }
        h *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    fn random_state(n: usize, seed: u64) -> Vec<Complex64> {
        let mut rng = seeded(seed);
        let v: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        v.into_iter().map(|c| c / norm).collect()
    }

    fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn equal_amplitudes_are_fixed() {
        let mut v = vec![Complex64::new(0.25, 0.1); 9];
        let before = v.clone();
        DiffusionOperator::exact_dft(9).unwrap().apply_fast(&mut v).unwrap();
        assert!(max_diff(&v, &before) < 1e-15);
    }

    #[test]
    fn operators_are_valid() {
        for n in [1, 2, 3, 6, 7, 8, 16, 31] {
            let dft = DiffusionOperator::exact_dft(n).unwrap();
            let (u, c) = dft.validity_error();
            assert!(u < 1e-10 && c < 1e-10, "dft n={n}");
            let custom = DiffusionOperator::random_custom(n, &mut seeded(n as u64)).unwrap();
            let (u, c) = custom.validity_error();
            assert!(u < 1e-10 && c < 1e-10, "custom n={n}");
        }
        for n in [1, 2, 4, 32] {
            let (u, c) = DiffusionOperator::walsh_hadamard(n).unwrap().validity_error();
            assert!(u < 1e-10 && c < 1e-10);
        }
        assert!(DiffusionOperator::walsh_hadamard(6).is_err());
    }

    #[test]
    fn custom_rejects_bad_matrices() {
        let bad = DMatrix::<Complex64>::identity(4, 4);
        assert!(DiffusionOperator::custom(bad).is_err());
        let scaled = DiffusionOperator::exact_dft(4).unwrap().matrix() * Complex64::new(1.1, 0.0);
        assert!(DiffusionOperator::custom(scaled).is_err());
        assert!(DiffusionOperator::custom(DMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn fast_transform_and_matrix_routes_agree() {
        for n in [2usize, 3, 4, 5, 7, 8, 12, 16, 33, 64] {
            let mut ops = vec![
                DiffusionOperator::exact_dft(n).unwrap(),
                DiffusionOperator::random_custom(n, &mut seeded(99)).unwrap(),
            ];
            if n.is_power_of_two() {
                ops.push(DiffusionOperator::walsh_hadamard(n).unwrap());
            }
            for op in ops {
                let state = random_state(n, n as u64);
                let mut fast = state.clone();
                op.apply_fast(&mut fast).unwrap();
                let mut via_t = state.clone();
                op.apply_transform(&mut via_t).unwrap();
                let mut via_m = state.clone();
                op.apply_matrix(&mut via_m).unwrap();
                assert!(max_diff(&fast, &via_t) < 1e-9, "{:?} n={n}", op.kind());
                assert!(max_diff(&fast, &via_m) < 1e-9, "{:?} n={n}", op.kind());
            }
        }
    }

    #[test]
    fn transform_route_scales_beyond_matrix_limit() {
        let n = 1000;
        let op = DiffusionOperator::exact_dft(n).unwrap();
        let state = random_state(n, 5);
        let mut fast = state.clone();
        op.apply_fast(&mut fast).unwrap();
        let mut via_t = state;
        op.apply_transform(&mut via_t).unwrap();
        assert!(max_diff(&fast, &via_t) < 1e-10);
        assert!(op.apply_matrix(&mut via_t).is_err());
    }

    #[test]
    fn dimension_mismatch() {
        let op = DiffusionOperator::exact_dft(5).unwrap();
        let mut v = vec![Complex64::new(0.5, 0.0); 4];
        assert!(matches!(
            op.apply_fast(&mut v),
            Err(GroverError::DimensionMismatch { expected: 5, actual: 4 })
        ));
    }
}
