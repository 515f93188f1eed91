//! Key material: plaintext-dependent initial values, the round-key schedule,
//! and the bundle a receiver needs to decrypt.

use std::fmt;

use rand::Rng;
use sha2::{Digest as _, Sha256};

use crate::chaos::{ChaosParams, ChaosState, IntegerSequence, PositionSequence};
use crate::trigram::{zy_encrypt_word, DigitKey};
use crate::{Error, Result};

pub const DEFAULT_ROUNDS: usize = 8;
pub const DEFAULT_SIZE: u32 = 240;
/// Base initial values before the digest perturbation.
pub const BASE_STATE: ChaosState = ChaosState::new(0.2, 0.4, 0.1);

/// A SHA-256 output, bytes `m1..m32` in order.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Digest(pub [u8; 32]);

impl Digest {
    pub fn of(data: &[u8]) -> Self {
        Self(Sha256::digest(data).into())
    }

    /// Digest of the ASCII decimal form of `sum`.
    pub fn of_sum(sum: u64) -> Self {
        Self::of(sum.to_string().as_bytes())
    }

    /// SHA-256 of the digest bytes themselves.
    pub fn rehash(&self) -> Self {
        Self::of(&self.0)
    }

    pub fn to_hex(&self) -> String {
        self.0.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn from_hex(s: &str) -> Result<Self> {
        if s.len() != 64 {
            return Err(Error::Format(format!("digest must be 64 hex digits, got {}", s.len())));
        }
        let mut out = [0u8; 32];
        for (i, chunk) in s.as_bytes().chunks(2).enumerate() {
            let text = std::str::from_utf8(chunk).map_err(|e| Error::Format(e.to_string()))?;
            out[i] = u8::from_str_radix(text, 16)
                .map_err(|_| Error::Format(format!("invalid hex in digest: {text:?}")))?;
        }
        Ok(Self(out))
    }

    fn mean(&self) -> f64 {
        self.0.iter().map(|&m| m as f64).sum::<f64>() / 32.0
    }
}

impl fmt::Debug for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digest({})", self.to_hex())
    }
}

/// Perturbs `base` with the digest:
/// `x' = x + mod((m_i ⊕ … ⊕ m_{i+7} + mean) / 256, 1)`, for the three
/// consecutive 8-byte runs `m1..m8`, `m9..m16` and `m17..m24`, then reduces
/// each component into `[0, 1)`.
pub fn initial_values_from_digest(digest: &Digest, base: ChaosState) -> ChaosState {
    let mean = digest.mean();
    let perturb = |run: usize| {
        let xor = digest.0[run * 8..run * 8 + 8].iter().fold(0u8, |a, &m| a ^ m);
        ((xor as f64 + mean) / 256.0).rem_euclid(1.0)
    };
    ChaosState {
        x: (base.x + perturb(0)).rem_euclid(1.0),
        y: (base.y + perturb(1)).rem_euclid(1.0),
        z: (base.z + perturb(2)).rem_euclid(1.0),
    }
}

pub fn derive_initial_values(sum: u64, base: ChaosState) -> (ChaosState, Digest) {
    let digest = Digest::of_sum(sum);
    (initial_values_from_digest(&digest, base), digest)
}

/// Ordered 12-bit subkeys, two per round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundKeySchedule(Vec<u16>);

impl RoundKeySchedule {
    pub fn new(subkeys: Vec<u16>) -> Result<Self> {
        if subkeys.len() % 2 != 0 {
            return Err(Error::BadScheduleLength { actual: subkeys.len() });
        }
        Ok(Self(subkeys.into_iter().map(|k| k & 0xFFF).collect()))
    }

    pub fn subkeys(&self) -> &[u16] {
        &self.0
    }

    pub fn rounds(&self) -> usize {
        self.0.len() / 2
    }
}

pub const fn hex_digits_for(rounds: usize) -> usize {
    rounds * 6
}

pub const fn key_bits_for(rounds: usize) -> usize {
    rounds * 24
}

fn hex_to_bits(hex_key: &str) -> Result<Vec<bool>> {
    let mut bits = Vec::with_capacity(hex_key.len() * 4);
    for c in hex_key.chars() {
        let v = c.to_digit(16).ok_or(Error::InvalidHexKey(c))?;
        bits.extend((0..4).rev().map(|i| (v >> i) & 1 == 1));
    }
    Ok(bits)
}

/// hex → bits (MSB first) → scramble by `t2` → trigram rule per 6 bits →
/// 12-bit subkeys.
pub fn build_round_keys(
    hex_key: &str,
    t2: &PositionSequence,
    rounds: usize,
    zy_enabled: bool,
) -> Result<RoundKeySchedule> {
    let expected = hex_digits_for(rounds);
    let actual = hex_key.chars().count();
    if actual != expected {
        return Err(Error::BadKeyLength { expected, actual });
    }
    if t2.len() != key_bits_for(rounds) {
        return Err(Error::BadPermutationLength {
            expected: key_bits_for(rounds),
            actual: t2.len(),
        });
    }
    let bits = t2.apply(&hex_to_bits(hex_key)?)?;
    let subkeys = bits
        .chunks_exact(12)
        .map(|c| {
            let w = c.iter().fold(0u16, |acc, &b| acc << 1 | b as u16);
            if zy_enabled {
                zy_encrypt_word(w)
            } else {
                w
            }
        })
        .collect();
    RoundKeySchedule::new(subkeys)
}

/// Big-endian concatenation of `z[offset..offset + 6]`.
pub fn derive_iv(z: &IntegerSequence, offset: usize) -> Result<u64> {
    let bytes = z
        .values
        .get(offset..offset + 6)
        .ok_or(Error::InsufficientSequence {
            needed: offset + 6,
            available: z.values.len(),
        })?;
    Ok(bytes.iter().fold(0u64, |acc, &b| acc << 8 | b as u64))
}

/// Everything the receiver needs: map parameters, base initial values, the
/// three per-channel digests, both secret keys, and the geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct KeyBundle {
    pub params: ChaosParams,
    pub base: ChaosState,
    /// R, G, B. `None` until encryption fills them in.
    pub digests: [Option<Digest>; 3],
    pub hex_key: String,
    pub digit_key: DigitKey,
    pub rounds: usize,
    pub width: u32,
    pub height: u32,
    pub zy_enabled: bool,
}

impl KeyBundle {
    pub fn new(hex_key: impl Into<String>, digit_key: DigitKey) -> Self {
        Self {
            params: ChaosParams::default(),
            base: BASE_STATE,
            digests: [None; 3],
            hex_key: hex_key.into(),
            digit_key,
            rounds: DEFAULT_ROUNDS,
            width: DEFAULT_SIZE,
            height: DEFAULT_SIZE,
            zy_enabled: true,
        }
    }

    /// Random keys of the right length for `rounds`.
    pub fn generate<R: Rng + ?Sized>(rng: &mut R, rounds: usize, zy_enabled: bool) -> Self {
        const HEX: &[u8; 16] = b"0123456789ABCDEF";
        let hex_key: String = (0..hex_digits_for(rounds))
            .map(|_| HEX[rng.random_range(0..16)] as char)
            .collect();
        let digits = (0..24).map(|_| rng.random_range(0..8u8)).collect();
        let mut bundle = Self::new(hex_key, DigitKey::from_digits(digits).expect("digits < 8"));
        bundle.rounds = rounds;
        bundle.zy_enabled = zy_enabled;
        bundle
    }

    pub fn validate(&self) -> Result<()> {
        let expected = hex_digits_for(self.rounds);
        let actual = self.hex_key.chars().count();
        if actual != expected {
            return Err(Error::BadKeyLength { expected, actual });
        }
        hex_to_bits(&self.hex_key)?;
        Ok(())
    }

    pub fn without_digests(&self) -> Self {
        Self { digests: [None; 3], ..self.clone() }
    }
}
