use std::sync::Arc;

use rand::Rng;

use crate::analytics::ProblemShape;
use crate::{GroverError, Result};

/// Membership oracle over `0..N` with an explicit solution set.
///
/// The solution set is shared (`Arc`), the lookup counter is not: cloning an
/// oracle gives an independent counter over the same table, which is how
/// parallel trials keep per-run accounting. Counts are merged with
/// [`OracleSpec::absorb`].
#[derive(Debug, Clone)]
pub struct OracleSpec {
    dimension: usize,
    solutions: Arc<[usize]>,
    query_count: u64,
}

impl OracleSpec {
    pub fn new(dimension: usize, solutions: impl IntoIterator<Item = usize>) -> Result<Self> {
        if dimension == 0 {
            return Err(GroverError::InvalidShape("N must be >= 1".into()));
        }
        let mut set: Vec<usize> = solutions.into_iter().collect();
        set.sort_unstable();
        set.dedup();
        if let Some(&bad) = set.iter().find(|&&i| i >= dimension) {
            return Err(GroverError::IndexOutOfRange {
                index: bad,
                dim: dimension,
            });
        }
        Ok(OracleSpec {
            dimension,
            solutions: set.into(),
            query_count: 0,
        })
    }

    /// `t` distinct solutions placed uniformly at random.
    pub fn random<R: Rng + ?Sized>(dimension: usize, t: usize, rng: &mut R) -> Result<Self> {
        if t > dimension {
            return Err(GroverError::InvalidShape(format!(
                "t={t} exceeds N={dimension}"
            )));
        }
        let picked = rand::seq::index::sample(rng, dimension, t);
        Self::new(dimension, picked)
    }

    /// Solutions `0..t`; handy when placement does not matter.
    pub fn first(dimension: usize, t: usize) -> Result<Self> {
        Self::new(dimension, 0..t)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn solutions(&self) -> &[usize] {
        &self.solutions
    }

    pub fn solution_count(&self) -> usize {
        self.solutions.len()
    }

    pub fn shape(&self) -> ProblemShape {
        ProblemShape::new(self.dimension as u64, self.solutions.len() as u64)
            .expect("oracle solution set is within its dimension")
    }

    pub fn query_count(&self) -> u64 {
        self.query_count
    }

    pub fn reset_count(&mut self) {
        self.query_count = 0;
    }

    /// Adds another counter's lookups to this one.
    pub fn absorb(&mut self, other: &OracleSpec) {
        self.query_count += other.query_count;
    }

    /// Membership test without touching the counter.
    pub fn contains(&self, index: usize) -> bool {
        self.solutions.binary_search(&index).is_ok()
    }

    /// A counted classical lookup `T[i] = x`.
    pub fn probe(&mut self, index: usize) -> bool {
        self.query_count += 1;
        self.contains(index)
    }

    pub(crate) fn record_lookups(&mut self, n: u64) {
        self.query_count += n;
    }

    /// The `r`-th index (in increasing order) that is not a solution.
    pub fn nth_non_solution(&self, r: usize) -> Option<usize> {
        if r >= self.dimension - self.solutions.len() {
            return None;
        }
        // Smallest i with i - #{solutions < i} > r, found by bisection on i.
        let (mut lo, mut hi) = (r, self.dimension - 1);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            let below = self.solutions.partition_point(|&s| s <= mid);
            if mid + 1 - below > r {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        Some(lo)
    }
}
