//! Toolkit for amplitude-amplification search.
//!
//! * [`analytics`]: closed-form amplitudes, success probabilities and
//!   optimal iteration counts.
//! * [`simulator`]: exact statevector simulation for any table size, with
//!   oracle lookup accounting.
//! * [`search`]: end-to-end strategies for known and unknown solution counts.
//! * [`counting`]: solution counting by Fourier period estimation.
//! * [`bounds`]: query lower bounds and the inequalities behind them.
//! * [`reproduce`]: the numeric reproduction suite shared by the `acceptance`
//!   test target and the `glab reproduce-paper` command.

pub mod analytics;
pub mod bounds;
pub mod counting;
mod error;
pub mod reproduce;
pub mod rng;
pub mod search;
pub mod simulator;
pub mod tolerance;

pub use analytics::{AmplitudePair, ProblemShape, StoppingPlan};
pub use error::{GroverError, Result};
