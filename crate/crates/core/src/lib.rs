//! Image cipher built on the lag-complex logistic map (LCLM) and the
//! I Ching hexagram transforms.
//!
//! The crate is organised bottom-up:
//!
//! - [`chaos`]: the three-variable map, real trajectories, and the integer and
//!   position sequences derived from them.
//! - [`trigram`]: hexagram algebra (Hu, Zong, Cuo), the trigram cipher rule and
//!   the 3-bit obfuscation layer.
//! - [`keymat`]: plaintext-dependent initial values from SHA-256, the round-key
//!   schedule, IV derivation and the [`KeyBundle`](keymat::KeyBundle).
//! - [`sbox`]: the dynamic 6-bit S-box (dedup, scramble, zigzag).
//! - [`cipher`]: the 48-bit Feistel-like block cipher, outer bit permutations
//!   and CBC chaining.
//! - [`pipeline`]: whole-image encryption and decryption plus every file format.
//! - [`analysis`]: entropy, correlation, NPCR/UACI, PSNR and attack simulation.
//! - [`selftest`]: built-in golden vectors.

pub mod analysis;
pub mod chaos;
pub mod cipher;
mod error;
pub mod keymat;
pub mod pipeline;
pub mod sbox;
pub mod selftest;
pub mod trigram;

pub use error::{Error, Result};
