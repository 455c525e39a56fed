//! `--solutions` specifications.

use std::fmt;
use std::str::FromStr;

use glab_core::rng;
use glab_core::simulator::OracleSpec;

use crate::CliError;

/// Which table entries are marked.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolutionSpec {
    /// `3,17,42` or `list:3,17,42`.
    List(Vec<usize>),
    /// `random:K`: `K` distinct indices placed by the seed.
    Random(usize),
    /// `none`: no entry is marked.
    None,
    /// `all`: every entry is marked.
    All,
    /// `mod:K:R`: indices `i` with `i mod K = R`.
    Residue { modulus: usize, residue: usize },
}

impl FromStr for SolutionSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let int = |x: &str| {
            x.trim()
                .parse::<usize>()
                .map_err(|_| format!("not a non-negative integer: {x:?}"))
        };
        match s {
            "none" => return Ok(SolutionSpec::None),
            "all" => return Ok(SolutionSpec::All),
            _ => {}
        }
        if let Some(k) = s.strip_prefix("random:") {
            return Ok(SolutionSpec::Random(int(k)?));
        }
        if let Some(rest) = s.strip_prefix("mod:") {
            let (k, r) = rest.split_once(':').ok_or("expected mod:K:R")?;
            let (modulus, residue) = (int(k)?, int(r)?);
            if modulus == 0 || residue >= modulus {
                return Err(format!("need 0 <= R < K in mod:K:R, got mod:{modulus}:{residue}"));
            }
            return Ok(SolutionSpec::Residue { modulus, residue });
        }
        let list = s.strip_prefix("list:").unwrap_or(s);
        if list.is_empty() {
            return Err("empty solution list; use `none` for no solutions".into());
        }
        list.split(',').map(int).collect::<Result<_, _>>().map(SolutionSpec::List)
    }
}

impl fmt::Display for SolutionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolutionSpec::List(ix) => {
                let parts: Vec<String> = ix.iter().map(|i| i.to_string()).collect();
                write!(f, "list:{}", parts.join(","))
            }
            SolutionSpec::Random(k) => write!(f, "random:{k}"),
            SolutionSpec::None => f.write_str("none"),
            SolutionSpec::All => f.write_str("all"),
            SolutionSpec::Residue { modulus, residue } => write!(f, "mod:{modulus}:{residue}"),
        }
    }
}

impl SolutionSpec {
    /// Builds the oracle for a table of size `n`. Random placement draws from
    /// a stream of `seed` that no trial uses.
    pub fn build(&self, n: usize, seed: u64) -> Result<OracleSpec, CliError> {
        let oracle = match self {
            SolutionSpec::List(ix) => OracleSpec::new(n, ix.iter().copied())?,
            SolutionSpec::Random(k) => {
                if *k > n {
                    return Err(CliError::Usage(format!("cannot place {k} solutions in N={n}")));
                }
                OracleSpec::random(n, *k, &mut rng::trial_rng(seed, u64::MAX))?
            }
            SolutionSpec::None => OracleSpec::new(n, [])?,
            SolutionSpec::All => OracleSpec::new(n, 0..n)?,
            SolutionSpec::Residue { modulus, residue } => {
                OracleSpec::new(n, (*residue..n).step_by(*modulus))?
            }
        };
        Ok(oracle)
    }
}
