//! Dynamic 6-bit S-box: first-occurrence dedup of a chaotic stream, a keyed
//! scramble, then an 8×8 zigzag read-out.

use std::fmt;

use crate::chaos::{real_to_integer, Modulus, PositionSequence};
use crate::{Error, Result};

/// A bijection on `0..64`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct SBox64([u8; 64]);

impl SBox64 {
    pub fn new(table: [u8; 64]) -> Result<Self> {
        let mut seen = 0u64;
        for &v in &table {
            if v >= 64 {
                return Err(Error::ValueOutOfRange(v));
            }
            seen |= 1 << v;
        }
        if seen != u64::MAX {
            return Err(Error::NotBijective);
        }
        Ok(Self(table))
    }

    pub fn identity() -> Self {
        Self(std::array::from_fn(|i| i as u8))
    }

    pub fn table(&self) -> &[u8; 64] {
        &self.0
    }

    pub fn substitute(&self, v: u8) -> Result<u8> {
        self.0.get(v as usize).copied().ok_or(Error::ValueOutOfRange(v))
    }

    /// Unchecked lookup for the hot path; `v` is masked to six bits.
    #[inline]
    pub(crate) fn lookup(&self, v: u16) -> u16 {
        self.0[(v & 0x3F) as usize] as u16
    }

    pub fn inverse(&self) -> Self {
        let mut inv = [0u8; 64];
        for (i, &v) in self.0.iter().enumerate() {
            inv[v as usize] = i as u8;
        }
        Self(inv)
    }
}

impl fmt::Debug for SBox64 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("SBox64").field(&&self.0[..]).finish()
    }
}

/// Eight rows of eight decimal entries.
impl fmt::Display for SBox64 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.0.chunks(8) {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

/// Scans `values[start..]`, keeping the first occurrence of each 6-bit value
/// until all 64 have appeared. Returns the table and how many reals were read.
pub fn collect_unique_mod64(values: &[f64], start: usize) -> Result<(SBox64, usize)> {
    let mut table = [0u8; 64];
    let mut seen = 0u64;
    let mut found = 0;
    let tail = values.get(start..).unwrap_or(&[]);
    for (i, &v) in tail.iter().enumerate() {
        let z = real_to_integer(v, Modulus::M64).ok_or(Error::NonFiniteValue(start + i))?;
        if seen & (1 << z) == 0 {
            seen |= 1 << z;
            table[found] = z;
            found += 1;
            if found == 64 {
                return Ok((SBox64(table), i + 1));
            }
        }
    }
    Err(Error::SequenceExhausted { consumed: tail.len(), found })
}

/// `S2[i] = S1[t1[i]]`.
pub fn scramble(s1: &SBox64, t1: &PositionSequence) -> Result<SBox64> {
    let out = t1.apply(&s1.0)?;
    Ok(SBox64(out.try_into().expect("length checked by apply")))
}

/// Row-major cell indices of an 8×8 matrix in JPEG zigzag order: start at the
/// top-left, step right, then sweep the anti-diagonals alternately down-left
/// and up-right.
pub const ZIGZAG_8X8: [usize; 64] = zigzag_order();

const fn zigzag_order() -> [usize; 64] {
    let mut out = [0usize; 64];
    let mut k = 0;
    let mut s = 0;
    while s < 15 {
        let lo = if s > 7 { s - 7 } else { 0 };
        let hi = if s < 7 { s } else { 7 };
        let mut i = 0;
        while i <= hi - lo {
            // Odd diagonals run top to bottom, even ones bottom to top.
            let row = if s % 2 == 1 { lo + i } else { hi - i };
            out[k] = row * 8 + (s - row);
            k += 1;
            i += 1;
        }
        s += 1;
    }
    out
}

pub fn zigzag_scan(s2: &SBox64) -> SBox64 {
    SBox64(std::array::from_fn(|k| s2.0[ZIGZAG_8X8[k]]))
}

/// The full construction: dedup from `start`, scramble by `t1`, zigzag.
pub fn build_sbox(values: &[f64], start: usize, t1: &PositionSequence) -> Result<(SBox64, usize)> {
    let (s1, consumed) = collect_unique_mod64(values, start)?;
    let s = zigzag_scan(&scramble(&s1, t1)?);
    debug_assert!(SBox64::new(s.0).is_ok());
    Ok((s, consumed))
}
