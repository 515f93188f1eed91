//! Hexagram algebra and the trigram obfuscation layer.
//!
//! A [`Hexagram`] is six yin/yang lines stored in the low six bits of a byte.
//! The most significant of those bits is the *top* line, so the textual form
//! `101100` reads top line first.

use std::fmt;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Hexagram(u8);

impl Hexagram {
    pub const MASK: u8 = 0b11_1111;

    /// Keeps the low six bits of `bits`.
    pub const fn new(bits: u8) -> Self {
        Self(bits & Self::MASK)
    }

    pub const fn bits(self) -> u8 {
        self.0
    }

    /// Line `n` counted from the bottom, `1..=6`.
    fn line(self, n: u8) -> u8 {
        (self.0 >> (n - 1)) & 1
    }

    /// Hu: lines 5,4,3 become the upper trigram, lines 4,3,2 the lower one.
    pub fn hu(self) -> Self {
        let l = |n| self.line(n);
        Self(l(5) << 5 | l(4) << 4 | l(3) << 3 | l(4) << 2 | l(3) << 1 | l(2))
    }

    /// Zong: the hexagram turned upside down.
    pub fn zong(self) -> Self {
        Self(self.0.reverse_bits() >> 2)
    }

    /// Cuo: every line flipped.
    pub fn cuo(self) -> Self {
        Self(!self.0 & Self::MASK)
    }

    /// The trigram cipher rule, `hu(h) ^ cuo(h)`.
    ///
    /// Exactly two inputs map to every reachable output, so this is only used
    /// where no inverse is needed (round function, key schedule).
    pub fn zy_encrypt(self) -> Self {
        Self(self.hu().0 ^ self.cuo().0)
    }
}

impl fmt::Display for Hexagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:06b}", self.0)
    }
}

/// Applies [`Hexagram::zy_encrypt`] to both 6-bit halves of a 12-bit word.
pub fn zy_encrypt_word(w: u16) -> u16 {
    let hi = Hexagram::new((w >> 6) as u8).zy_encrypt().bits() as u16;
    let lo = Hexagram::new(w as u8).zy_encrypt().bits() as u16;
    hi << 6 | lo
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Trigram {
    Qian,
    Kun,
    Zhen,
    Xun,
    Kan,
    Li,
    Gen,
    Dui,
}

impl Trigram {
    pub const ALL: [Trigram; 8] = [
        Trigram::Qian,
        Trigram::Kun,
        Trigram::Zhen,
        Trigram::Xun,
        Trigram::Kan,
        Trigram::Li,
        Trigram::Gen,
        Trigram::Dui,
    ];

    pub const fn bits(self) -> u8 {
        match self {
            Trigram::Qian => 0b111,
            Trigram::Xun => 0b110,
            Trigram::Li => 0b101,
            Trigram::Gen => 0b100,
            Trigram::Dui => 0b011,
            Trigram::Kan => 0b010,
            Trigram::Zhen => 0b001,
            Trigram::Kun => 0b000,
        }
    }

    pub fn from_bits(bits: u8) -> Self {
        Self::ALL
            .into_iter()
            .find(|t| t.bits() == bits & 0b111)
            .expect("every 3-bit pattern names a trigram")
    }

    /// The obfuscation image of a 3-bit XOR result. Listing the table in value
    /// order gives Qian, Xun, Li, Gen, Dui, Kan, Zhen, Kun, whose bit patterns
    /// are exactly `7 - v`.
    pub fn obfuscation_of(xor_result: u8) -> Self {
        Self::from_bits(7 - (xor_result & 0b111))
    }

    pub const fn name(self) -> &'static str {
        match self {
            Trigram::Qian => "Qian",
            Trigram::Kun => "Kun",
            Trigram::Zhen => "Zhen",
            Trigram::Xun => "Xun",
            Trigram::Kan => "Kan",
            Trigram::Li => "Li",
            Trigram::Gen => "Gen",
            Trigram::Dui => "Dui",
        }
    }
}

/// Octal digit string used by the obfuscation layer, cycled over the data.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DigitKey(Vec<u8>);

impl DigitKey {
    pub fn parse(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::EmptyKey);
        }
        s.chars()
            .map(|c| match c.to_digit(10) {
                Some(d) if d < 8 => Ok(d as u8),
                _ => Err(Error::InvalidKeyDigit(c)),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }

    pub fn from_digits(digits: Vec<u8>) -> Result<Self> {
        if digits.is_empty() {
            return Err(Error::EmptyKey);
        }
        if let Some(&d) = digits.iter().find(|&&d| d > 7) {
            return Err(Error::InvalidKeyDigit(char::from(b'0' + d.min(9))));
        }
        Ok(Self(digits))
    }

    pub fn digits(&self) -> &[u8] {
        &self.0
    }

    fn key3(&self, group: usize) -> u8 {
        self.0[group % self.0.len()]
    }

    fn key_bit(&self, bit_index: usize) -> bool {
        (self.key3(bit_index / 3) >> (2 - bit_index % 3)) & 1 == 1
    }
}

impl fmt::Display for DigitKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|d| write!(f, "{d}"))
    }
}

/// Per 3-bit group: `NOT(data3 ^ key3)`, i.e. the trigram that the XOR result
/// maps to.
pub fn obfuscate_bits(data: &[bool], key: &DigitKey) -> Result<Vec<bool>> {
    if data.len() % 3 != 0 {
        return Err(Error::LengthNotDivisibleBy3(data.len()));
    }
    Ok(data
        .chunks_exact(3)
        .enumerate()
        .flat_map(|(g, chunk)| {
            let d = (chunk[0] as u8) << 2 | (chunk[1] as u8) << 1 | chunk[2] as u8;
            let out = Trigram::obfuscation_of(d ^ key.key3(g)).bits();
            [out & 4 != 0, out & 2 != 0, out & 1 != 0]
        })
        .collect())
}

pub fn deobfuscate_bits(data: &[bool], key: &DigitKey) -> Result<Vec<bool>> {
    if data.len() % 3 != 0 {
        return Err(Error::LengthNotDivisibleBy3(data.len()));
    }
    Ok(data
        .chunks_exact(3)
        .enumerate()
        .flat_map(|(g, chunk)| {
            let d = (chunk[0] as u8) << 2 | (chunk[1] as u8) << 1 | chunk[2] as u8;
            let out = (!d & 0b111) ^ key.key3(g);
            [out & 4 != 0, out & 2 != 0, out & 1 != 0]
        })
        .collect())
}

/// Byte-level obfuscation of an MSB-first bitstream.
///
/// Each bit becomes `NOT(data ^ key)`, which is the same map as
/// [`obfuscate_bits`] and is its own inverse given the same key alignment.
pub fn obfuscate_bytes(data: &[u8], key: &DigitKey) -> Result<Vec<u8>> {
    if (data.len() * 8) % 3 != 0 {
        return Err(Error::LengthNotDivisibleBy3(data.len() * 8));
    }
    Ok(data
        .iter()
        .enumerate()
        .map(|(i, &byte)| {
            let mask = (0..8).fold(0u8, |acc, b| acc << 1 | key.key_bit(i * 8 + b) as u8);
            !(byte ^ mask)
        })
        .collect())
}

pub fn deobfuscate_bytes(data: &[u8], key: &DigitKey) -> Result<Vec<u8>> {
    obfuscate_bytes(data, key)
}

pub fn bytes_to_bits(bytes: &[u8]) -> Vec<bool> {
    bytes
        .iter()
        .flat_map(|&b| (0..8).rev().map(move |i| (b >> i) & 1 == 1))
        .collect()
}

/// Packs MSB-first; a trailing partial byte is padded with zeros.
pub fn bits_to_bytes(bits: &[bool]) -> Vec<u8> {
    bits.chunks(8)
        .map(|c| {
            c.iter()
                .chain(std::iter::repeat(&false))
                .take(8)
                .fold(0u8, |acc, &b| acc << 1 | b as u8)
        })
        .collect()
}
