//! 48-bit Feistel-like block cipher.
//!
//! A block is four 12-bit quarters `L1 ‖ L2 ‖ R1 ‖ R2`. Bit 0 is the most
//! significant bit of `L1`; the same MSB-first numbering is used for the QF
//! permutation and the outer bit permutations.
//!
//! Each round runs two independent branches, `R1' = L1 ^ F(R1, k_2j)` and
//! `R2' = L2 ^ F(R2, k_2j+1)`, followed by the usual half swap. The last round
//! skips the swap and instead rotates the quarters to `L2, R1, R2, L1`.

use crate::chaos::PositionSequence;
use crate::keymat::RoundKeySchedule;
use crate::sbox::SBox64;
use crate::trigram::zy_encrypt_word;
use crate::{Error, Result};

const MASK48: u64 = (1 << 48) - 1;
const MASK12: u16 = 0xFFF;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Block48(u64);

impl Block48 {
    pub const fn new(v: u64) -> Self {
        Self(v & MASK48)
    }

    pub const fn value(self) -> u64 {
        self.0
    }

    pub fn from_quarters([l1, l2, r1, r2]: [u16; 4]) -> Self {
        Self(
            ((l1 & MASK12) as u64) << 36
                | ((l2 & MASK12) as u64) << 24
                | ((r1 & MASK12) as u64) << 12
                | (r2 & MASK12) as u64,
        )
    }

    pub fn quarters(self) -> [u16; 4] {
        [36, 24, 12, 0].map(|s| ((self.0 >> s) as u16) & MASK12)
    }

    pub fn from_bytes(b: &[u8; 6]) -> Self {
        Self(b.iter().fold(0u64, |acc, &x| acc << 8 | x as u64))
    }

    pub fn to_bytes(self) -> [u8; 6] {
        std::array::from_fn(|i| (self.0 >> (40 - 8 * i)) as u8)
    }

    /// Bit `i`, numbered from the most significant end.
    pub fn bit(self, i: usize) -> bool {
        (self.0 >> (47 - i)) & 1 == 1
    }
}

impl std::ops::BitXor for Block48 {
    type Output = Block48;

    fn bitxor(self, rhs: Self) -> Self {
        Self(self.0 ^ rhs.0)
    }
}

/// Source position of each output bit of the 12-bit QF permutation.
pub const QF_TABLE: [u8; 12] = [5, 2, 10, 6, 7, 4, 0, 1, 3, 8, 9, 11];

/// Output bit `i` takes input bit `QF_TABLE[i]`, both counted from the MSB.
pub fn qf_permute(w: u16) -> u16 {
    QF_TABLE
        .iter()
        .fold(0u16, |acc, &src| acc << 1 | ((w >> (11 - src)) & 1))
}

/// XOR with the subkey, S-box both 6-bit halves, QF, then the trigram rule on
/// both halves.
pub fn round_function(w: u16, subkey: u16, sbox: &SBox64, zy_enabled: bool) -> u16 {
    let t = (w ^ subkey) & MASK12;
    let substituted = sbox.lookup(t >> 6) << 6 | sbox.lookup(t & 0x3F);
    let mixed = qf_permute(substituted);
    if zy_enabled {
        zy_encrypt_word(mixed)
    } else {
        mixed
    }
}

fn check_schedule(ks: &RoundKeySchedule) -> Result<()> {
    if ks.subkeys().len() % 2 != 0 {
        return Err(Error::BadScheduleLength { actual: ks.subkeys().len() });
    }
    Ok(())
}

pub fn feistel_encrypt_block(
    b: Block48,
    ks: &RoundKeySchedule,
    sbox: &SBox64,
    zy_enabled: bool,
) -> Result<Block48> {
    check_schedule(ks)?;
    Ok(encrypt_unchecked(b, ks.subkeys(), sbox, zy_enabled))
}

pub fn feistel_decrypt_block(
    b: Block48,
    ks: &RoundKeySchedule,
    sbox: &SBox64,
    zy_enabled: bool,
) -> Result<Block48> {
    check_schedule(ks)?;
    Ok(decrypt_unchecked(b, ks.subkeys(), sbox, zy_enabled))
}

fn encrypt_unchecked(b: Block48, keys: &[u16], sbox: &SBox64, zy: bool) -> Block48 {
    let rounds = keys.len() / 2;
    if rounds == 0 {
        return b;
    }
    let [mut l1, mut l2, mut r1, mut r2] = b.quarters();
    for j in 0..rounds {
        let n1 = l1 ^ round_function(r1, keys[2 * j], sbox, zy);
        let n2 = l2 ^ round_function(r2, keys[2 * j + 1], sbox, zy);
        if j + 1 < rounds {
            (l1, l2, r1, r2) = (r1, r2, n1, n2);
        } else {
            (l1, l2) = (n1, n2);
        }
    }
    Block48::from_quarters([l2, r1, r2, l1])
}

fn decrypt_unchecked(b: Block48, keys: &[u16], sbox: &SBox64, zy: bool) -> Block48 {
    let rounds = keys.len() / 2;
    if rounds == 0 {
        return b;
    }
    let [a, bb, c, d] = b.quarters();
    let (mut l1, mut l2, mut r1, mut r2) = (d, a, bb, c);
    for j in (0..rounds).rev() {
        if j + 1 < rounds {
            // Undo the swap: (l1, l2, r1, r2) = (R1, R2, n1, n2).
            (l1, l2, r1, r2) = (r1, r2, l1, l2);
        }
        l1 ^= round_function(r1, keys[2 * j], sbox, zy);
        l2 ^= round_function(r2, keys[2 * j + 1], sbox, zy);
    }
    Block48::from_quarters([l1, l2, r1, r2])
}

/// Schedule, S-box and mode flag for one channel.
#[derive(Debug, Clone)]
pub struct BlockCipher {
    schedule: RoundKeySchedule,
    sbox: SBox64,
    zy_enabled: bool,
}

impl BlockCipher {
    pub fn new(schedule: RoundKeySchedule, sbox: SBox64, zy_enabled: bool) -> Result<Self> {
        check_schedule(&schedule)?;
        Ok(Self { schedule, sbox, zy_enabled })
    }

    pub fn encrypt_block(&self, b: Block48) -> Block48 {
        encrypt_unchecked(b, self.schedule.subkeys(), &self.sbox, self.zy_enabled)
    }

    pub fn decrypt_block(&self, b: Block48) -> Block48 {
        decrypt_unchecked(b, self.schedule.subkeys(), &self.sbox, self.zy_enabled)
    }
}

/// A permutation of the 48 bit positions of a block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BitPermutation48([u8; 48]);

impl BitPermutation48 {
    pub fn new(perm: [u8; 48]) -> Result<Self> {
        let mut seen = 0u64;
        for &p in &perm {
            if p >= 48 || seen & (1 << p) != 0 {
                return Err(Error::InvalidPermutation(format!("bad bit index {p}")));
            }
            seen |= 1 << p;
        }
        Ok(Self(perm))
    }

    pub fn identity() -> Self {
        Self(std::array::from_fn(|i| i as u8))
    }

    pub fn from_positions(t: &PositionSequence) -> Result<Self> {
        if t.len() != 48 {
            return Err(Error::BadPermutationLength { expected: 48, actual: t.len() });
        }
        Self::new(std::array::from_fn(|i| t.as_slice()[i] as u8))
    }

    pub fn as_array(&self) -> &[u8; 48] {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        let mut inv = [0u8; 48];
        for (i, &p) in self.0.iter().enumerate() {
            inv[p as usize] = i as u8;
        }
        Self(inv)
    }

    /// Output bit `i` = input bit `perm[i]`.
    pub fn apply(&self, b: Block48) -> Block48 {
        let v = self
            .0
            .iter()
            .fold(0u64, |acc, &src| acc << 1 | b.bit(src as usize) as u64);
        Block48(v)
    }
}

pub fn outer_permutation(b: Block48, p: &BitPermutation48, inverse: bool) -> Block48 {
    if inverse {
        p.inverse().apply(b)
    } else {
        p.apply(b)
    }
}

/// `C_0 = E(P_0 ^ IV)`, `C_i = E(P_i ^ C_{i-1})`.
pub fn cbc_encrypt(blocks: &[Block48], iv: u64, encrypt_one: impl Fn(Block48) -> Block48) -> Vec<Block48> {
    let mut prev = Block48::new(iv);
    blocks
        .iter()
        .map(|&p| {
            prev = encrypt_one(p ^ prev);
            prev
        })
        .collect()
}

/// `P_i = D(C_i) ^ C_{i-1}` with `C_{-1} = IV`.
pub fn cbc_decrypt(blocks: &[Block48], iv: u64, decrypt_one: impl Fn(Block48) -> Block48) -> Vec<Block48> {
    let mut prev = Block48::new(iv);
    blocks
        .iter()
        .map(|&c| {
            let p = decrypt_one(c) ^ prev;
            prev = c;
            p
        })
        .collect()
}
