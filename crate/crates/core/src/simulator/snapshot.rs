//! Binary statevector snapshots.
//!
//! Layout (all little-endian):
//!
//! | offset | size | content              |
//! |--------|------|----------------------|
//! | 0      | 4    | magic `b"GLAB"`      |
//! | 4      | 4    | version, `u32` = 1   |
//! | 8      | 8    | `N`, `u64`           |
//! | 16     | 16·N | `(re, im)` as `f64`  |

use std::io::{Read, Write};

use num_complex::Complex64;

use super::StateVector;
use crate::{GroverError, Result};

pub const MAGIC: [u8; 4] = *b"GLAB";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 16;

pub fn write_snapshot<W: Write>(state: &StateVector, mut out: W) -> Result<()> {
    out.write_all(&MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    out.write_all(&(state.dimension() as u64).to_le_bytes())?;
    for a in state.amplitudes() {
        out.write_all(&a.re.to_le_bytes())?;
        out.write_all(&a.im.to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

pub fn to_bytes(state: &StateVector) -> Vec<u8> {
    let mut buf = Vec::with_capacity(HEADER_LEN + 16 * state.dimension());
    write_snapshot(state, &mut buf).expect("writing to a Vec cannot fail");
    buf
}

pub fn read_snapshot<R: Read>(mut input: R) -> Result<StateVector> {
    let mut header = [0u8; HEADER_LEN];
    input.read_exact(&mut header)?;
    if header[..4] != MAGIC {
        return Err(GroverError::BadSnapshot("wrong magic".into()));
    }
    let version = u32::from_le_bytes(header[4..8].try_into().unwrap());
    if version != VERSION {
        return Err(GroverError::BadSnapshot(format!("unsupported version {version}")));
    }
    let n = u64::from_le_bytes(header[8..16].try_into().unwrap());
    if n == 0 {
        return Err(GroverError::BadSnapshot("zero dimension".into()));
    }
    let mut amps = Vec::with_capacity(n.min(1 << 24) as usize);
    let mut pair = [0u8; 16];
    for _ in 0..n {
        input.read_exact(&mut pair)?;
        let re = f64::from_le_bytes(pair[..8].try_into().unwrap());
        let im = f64::from_le_bytes(pair[8..].try_into().unwrap());
        amps.push(Complex64::new(re, im));
    }
    StateVector::from_amplitudes(amps)
}
