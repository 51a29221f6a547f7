//! Binary checkpoint container for long operator runs.
//!
//! All integers and floats are little-endian:
//!
//! | offset | size | field                                          |
//! |-------:|-----:|------------------------------------------------|
//! | 0      | 8    | magic `SUMLVLCK`                               |
//! | 8      | 4    | format version (`1`)                           |
//! | 12     | 4    | engine tag (`0` grid, `1` induced)             |
//! | 16     | 4    | basis tag (`0` d, `1` h)                       |
//! | 20     | 4    | reserved, zero                                 |
//! | 24     | 8    | grid size `M` (grid) or Chebyshev degree       |
//! | 32     | 8    | discretisation fingerprint                     |
//! | 40     | 8    | iterations completed `n`                       |
//! | 48     | 8    | number of values                               |
//! | 56     | 8·k  | values as `f64`                                |

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"SUMLVLCK";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub engine: u32,
    pub basis: u32,
    pub m: u64,
    pub layout: u64,
    pub n: u64,
    pub values: Vec<f64>,
}

impl Checkpoint {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(56 + 8 * self.values.len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
        out.extend_from_slice(&self.engine.to_le_bytes());
        out.extend_from_slice(&self.basis.to_le_bytes());
        out.extend_from_slice(&0u32.to_le_bytes());
        for v in [self.m, self.layout, self.n, self.values.len() as u64] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        for v in &self.values {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let bad = |msg: &str| Error::Checkpoint(msg.to_string());
        if bytes.len() < 56 || &bytes[..8] != MAGIC {
            return Err(bad("not a checkpoint file"));
        }
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
        let u64_at = |o: usize| u64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
        let version = u32_at(8);
        if version != CHECKPOINT_VERSION {
            return Err(Error::Checkpoint(format!("unsupported version {version}")));
        }
        let len = u64_at(48) as usize;
        if bytes.len() != 56 + 8 * len {
            return Err(bad("truncated or oversized value block"));
        }
        let values = bytes[56..]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Ok(Self {
            engine: u32_at(12),
            basis: u32_at(16),
            m: u64_at(24),
            layout: u64_at(32),
            n: u64_at(40),
            values,
        })
    }

    /// Writes through a temporary file and a rename so an interrupted
    /// write never leaves a torn checkpoint.
    pub fn save(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("tmp");
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(&self.to_bytes())?;
            f.sync_all()?;
        }
        fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_bytes(&fs::read(path)?)
    }
}
