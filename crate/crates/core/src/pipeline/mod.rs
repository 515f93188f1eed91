//! Whole-image encryption and decryption.
//!
//! Per channel:
//!
//! 1. obfuscate the plane as an MSB-first bitstream with the digit key (`Pt1`);
//! 2. hash the decimal byte sum of `Pt1` and perturb the base initial values;
//! 3. iterate the map and carve the orbit into the windows listed in
//!    [`ConsumptionMap`];
//! 4. scramble `Pt1` bytewise with `T3` then `T4`, split into 48-bit blocks;
//! 5. pre-permute each block, CBC-encrypt with the Feistel cipher,
//!    post-permute, and emit the bytes.
//!
//! Decryption needs the per-channel digest, which is why it travels in the
//! [`KeyBundle`].

mod bundle;
mod io;

use std::thread;

pub use bundle::{parse_bundle, serialize_bundle, BUNDLE_MAGIC};
pub use io::{
    parse_cipher_file, read_ppm, read_raw_rgb, write_cipher_file, write_ppm, write_raw_rgb,
    CIPHER_MAGIC,
};

use crate::chaos::{
    generate_sequences, to_integer_sequence, to_position_sequence, ChaosState, Modulus,
    PositionSequence, Sequences, DEFAULT_BURN_IN,
};
use crate::cipher::{cbc_decrypt, cbc_encrypt, BitPermutation48, Block48, BlockCipher};
use crate::keymat::{
    build_round_keys, derive_iv, initial_values_from_digest, key_bits_for, Digest, KeyBundle,
    RoundKeySchedule,
};
use crate::sbox::{build_sbox, SBox64};
use crate::trigram::{deobfuscate_bytes, obfuscate_bytes};
use crate::{Error, Result};

/// Orbit values generated per sequence at the default geometry.
pub const DEFAULT_SEQUENCE_LEN: usize = 120_000;
/// Re-hash attempts when the digest-derived start point escapes to infinity.
pub const MAX_RESEEDS: usize = 64;
/// Extra orbit values reserved past the T2 window for the S-box scan.
const SBOX_SCAN_RESERVE: usize = 8192;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    R,
    G,
    B,
}

impl Channel {
    pub const ALL: [Channel; 3] = [Channel::R, Channel::G, Channel::B];

    pub const fn index(self) -> usize {
        match self {
            Channel::R => 0,
            Channel::G => 1,
            Channel::B => 2,
        }
    }

    pub const fn name(self) -> &'static str {
        match self {
            Channel::R => "R",
            Channel::G => "G",
            Channel::B => "B",
        }
    }
}

/// Three 8-bit planes, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    pub planes: [Vec<u8>; 3],
}

impl Raster {
    pub fn new(width: usize, height: usize, planes: [Vec<u8>; 3]) -> Result<Self> {
        let n = width * height;
        if planes.iter().any(|p| p.len() != n) {
            return Err(Error::BadLength(format!("every plane must hold {width}x{height} samples")));
        }
        Ok(Self { width, height, planes })
    }

    pub fn from_interleaved(width: usize, height: usize, rgb: &[u8]) -> Result<Self> {
        if rgb.len() != width * height * 3 {
            return Err(Error::BadLength(format!(
                "expected {} interleaved bytes, got {}",
                width * height * 3,
                rgb.len()
            )));
        }
        let plane = |c: usize| rgb.iter().skip(c).step_by(3).copied().collect();
        Ok(Self { width, height, planes: [plane(0), plane(1), plane(2)] })
    }

    pub fn to_interleaved(&self) -> Vec<u8> {
        let n = self.width * self.height;
        let mut out = Vec::with_capacity(n * 3);
        for i in 0..n {
            out.extend(self.planes.iter().map(|p| p[i]));
        }
        out
    }

    pub fn plane(&self, c: Channel) -> &[u8] {
        &self.planes[c.index()]
    }
}

/// Per-channel ciphertext, each `width × height` bytes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CipherImage {
    pub width: usize,
    pub height: usize,
    pub channels: [Vec<u8>; 3],
}

impl CipherImage {
    /// The ciphertext viewed as an image.
    pub fn as_raster(&self) -> Raster {
        Raster {
            width: self.width,
            height: self.height,
            planes: self.channels.clone(),
        }
    }

    pub fn from_raster(r: Raster) -> Self {
        Self { width: r.width, height: r.height, channels: r.planes }
    }
}

/// Nearest-neighbour resample to `width × height`.
pub fn compress_image(input: &Raster, width: usize, height: usize) -> Result<Raster> {
    if input.width == 0 || input.height == 0 || width == 0 || height == 0 {
        return Err(Error::EmptyImage);
    }
    if input.width == width && input.height == height {
        return Ok(input.clone());
    }
    let resample = |src: &Vec<u8>| {
        let mut out = Vec::with_capacity(width * height);
        for r in 0..height {
            let sr = r * input.height / height;
            for c in 0..width {
                out.push(src[sr * input.width + c * input.width / width]);
            }
        }
        out
    };
    Ok(Raster {
        width,
        height,
        planes: [resample(&input.planes[0]), resample(&input.planes[1]), resample(&input.planes[2])],
    })
}

/// Which orbit window feeds which consumer. All offsets are post burn-in.
///
/// | role            | source | window                         |
/// |-----------------|--------|--------------------------------|
/// | T3 (bytes)      | X2     | `[0, n)`                       |
/// | T1 (S-box)      | X2     | `[n, n+64)`                    |
/// | T2 (key bits)   | X2     | `[n+64, n+64+24·rounds)`       |
/// | S-box scan      | X2     | from `n+64+24·rounds`          |
/// | T4 (bytes)      | X1     | `[0, n)`                       |
/// | IV              | X3     | `[0, 6)` as bytes              |
/// | pre-permutation | X3     | `[6, 54)`                      |
/// | post-permutation| X3     | `[54, 102)`                    |
///
/// `n` is the number of samples per plane (57600 at 240×240).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConsumptionMap {
    pub plane_len: usize,
    pub t1_start: usize,
    pub t2_start: usize,
    pub t2_len: usize,
    pub sbox_scan_start: usize,
    pub iv_start: usize,
    pub pre_perm_start: usize,
    pub post_perm_start: usize,
    pub sequence_len: usize,
}

impl ConsumptionMap {
    pub fn new(plane_len: usize, rounds: usize) -> Self {
        let t1_start = plane_len;
        let t2_start = t1_start + 64;
        let t2_len = key_bits_for(rounds);
        let sbox_scan_start = t2_start + t2_len;
        Self {
            plane_len,
            t1_start,
            t2_start,
            t2_len,
            sbox_scan_start,
            iv_start: 0,
            pre_perm_start: 6,
            post_perm_start: 54,
            sequence_len: DEFAULT_SEQUENCE_LEN.max(sbox_scan_start + SBOX_SCAN_RESERVE),
        }
    }
}

/// Everything derived from one channel's digest.
#[derive(Debug, Clone)]
pub struct ChannelContext {
    pub digest: Digest,
    /// Extra SHA-256 applications needed to reach a bounded orbit.
    pub reseeds: usize,
    pub init: ChaosState,
    pub sequences: Sequences,
    pub t1: PositionSequence,
    pub t2: PositionSequence,
    pub t3: PositionSequence,
    pub t4: PositionSequence,
    pub sbox: SBox64,
    pub schedule: RoundKeySchedule,
    pub iv: u64,
    pub pre: BitPermutation48,
    pub post: BitPermutation48,
}

fn check_geometry(bundle: &KeyBundle) -> Result<usize> {
    let n = bundle.width as usize * bundle.height as usize;
    if n == 0 {
        return Err(Error::EmptyImage);
    }
    if n % 6 != 0 {
        return Err(Error::Unsupported(format!(
            "{}x{} has {n} samples per plane, which is not a whole number of 48-bit blocks",
            bundle.width, bundle.height
        )));
    }
    Ok(n)
}

/// Sum of the obfuscated plane bytes and its digest.
pub fn plane_digest(plane: &[u8], bundle: &KeyBundle) -> Result<(u64, Digest)> {
    let pt1 = obfuscate_bytes(plane, &bundle.digit_key)?;
    let sum: u64 = pt1.iter().map(|&b| b as u64).sum();
    Ok((sum, Digest::of_sum(sum)))
}

impl ChannelContext {
    /// Rebuilds every keyed component from a channel digest.
    ///
    /// If the start point derived from the digest lies outside the map's basin
    /// of attraction the orbit blows up; the digest is then re-hashed and the
    /// attempt repeated, which the receiver reproduces from the same digest.
    pub fn from_digest(digest: Digest, bundle: &KeyBundle) -> Result<Self> {
        bundle.validate()?;
        let n = check_geometry(bundle)?;
        let map = ConsumptionMap::new(n, bundle.rounds);

        let mut seed = digest;
        let mut provisioned = None;
        for reseeds in 0..MAX_RESEEDS {
            let init = initial_values_from_digest(&seed, bundle.base);
            match generate_sequences(init, bundle.params, DEFAULT_BURN_IN, map.sequence_len) {
                Ok(seqs) => {
                    provisioned = Some((reseeds, init, seqs));
                    break;
                }
                Err(Error::NonFiniteState { .. }) => seed = seed.rehash(),
                Err(e) => return Err(e),
            }
        }
        let (reseeds, init, sequences) = provisioned.ok_or(Error::NoBoundedOrbit(MAX_RESEEDS))?;

        let x1 = &sequences.x1.values;
        let x2 = &sequences.x2.values;
        let x3 = &sequences.x3.values;
        let t3 = to_position_sequence(x2, 0, n)?;
        let t1 = to_position_sequence(x2, map.t1_start, 64)?;
        let t2 = to_position_sequence(x2, map.t2_start, map.t2_len)?;
        let (sbox, _) = build_sbox(x2, map.sbox_scan_start, &t1)?;
        let t4 = to_position_sequence(x1, 0, n)?;
        let z1 = to_integer_sequence(&x3[map.iv_start..map.iv_start + 6], Modulus::M256)?;
        let iv = derive_iv(&z1, 0)?;
        let pre = BitPermutation48::from_positions(&to_position_sequence(x3, map.pre_perm_start, 48)?)?;
        let post = BitPermutation48::from_positions(&to_position_sequence(x3, map.post_perm_start, 48)?)?;
        let schedule = build_round_keys(&bundle.hex_key, &t2, bundle.rounds, bundle.zy_enabled)?;

        Ok(Self {
            digest,
            reseeds,
            init,
            sequences,
            t1,
            t2,
            t3,
            t4,
            sbox,
            schedule,
            iv,
            pre,
            post,
        })
    }

    fn block_cipher(&self, bundle: &KeyBundle) -> Result<BlockCipher> {
        BlockCipher::new(self.schedule.clone(), self.sbox, bundle.zy_enabled)
    }
}

pub fn build_channel_context(plane: &[u8], bundle: &KeyBundle) -> Result<ChannelContext> {
    let n = check_geometry(bundle)?;
    if plane.len() != n {
        return Err(Error::BadLength(format!("plane has {} samples, expected {n}", plane.len())));
    }
    let (_, digest) = plane_digest(plane, bundle)?;
    ChannelContext::from_digest(digest, bundle)
}

fn to_blocks(bytes: &[u8]) -> Vec<Block48> {
    bytes
        .chunks_exact(6)
        .map(|c| Block48::from_bytes(c.try_into().expect("6-byte chunk")))
        .collect()
}

fn from_blocks(blocks: &[Block48]) -> Vec<u8> {
    blocks.iter().flat_map(|b| b.to_bytes()).collect()
}

pub fn encrypt_channel(plane: &[u8], ctx: &ChannelContext, bundle: &KeyBundle) -> Result<Vec<u8>> {
    let n = check_geometry(bundle)?;
    if plane.len() != n {
        return Err(Error::BadLength(format!("plane has {} samples, expected {n}", plane.len())));
    }
    // P1 is Pt1; 8-bit data already lies in 0..=255.
    let p1 = obfuscate_bytes(plane, &bundle.digit_key)?;
    let p2 = ctx.t3.apply(&p1)?;
    let p3 = ctx.t4.apply(&p2)?;
    let blocks: Vec<Block48> = to_blocks(&p3).into_iter().map(|b| ctx.pre.apply(b)).collect();
    let cipher = ctx.block_cipher(bundle)?;
    let ct: Vec<Block48> = cbc_encrypt(&blocks, ctx.iv, |b| cipher.encrypt_block(b))
        .into_iter()
        .map(|b| ctx.post.apply(b))
        .collect();
    Ok(from_blocks(&ct))
}

pub fn decrypt_channel_with(ciphertext: &[u8], ctx: &ChannelContext, bundle: &KeyBundle) -> Result<Vec<u8>> {
    let n = check_geometry(bundle)?;
    if ciphertext.len() != n {
        return Err(Error::BadLength(format!(
            "ciphertext has {} bytes, expected {n}",
            ciphertext.len()
        )));
    }
    let post_inv = ctx.post.inverse();
    let pre_inv = ctx.pre.inverse();
    let blocks: Vec<Block48> = to_blocks(ciphertext).into_iter().map(|b| post_inv.apply(b)).collect();
    let cipher = ctx.block_cipher(bundle)?;
    let plain: Vec<Block48> = cbc_decrypt(&blocks, ctx.iv, |b| cipher.decrypt_block(b))
        .into_iter()
        .map(|b| pre_inv.apply(b))
        .collect();
    let p3 = from_blocks(&plain);
    let p2 = ctx.t4.unapply(&p3)?;
    let p1 = ctx.t3.unapply(&p2)?;
    deobfuscate_bytes(&p1, &bundle.digit_key)
}

pub fn decrypt_channel(ciphertext: &[u8], bundle: &KeyBundle, channel: Channel) -> Result<Vec<u8>> {
    let digest = bundle.digests[channel.index()].ok_or(Error::MissingDigest(channel.name()))?;
    let ctx = ChannelContext::from_digest(digest, bundle)?;
    decrypt_channel_with(ciphertext, &ctx, bundle)
}

fn per_channel<T: Send>(f: impl Fn(Channel) -> Result<T> + Sync) -> Result<[T; 3]> {
    let [r, g, b] = thread::scope(|s| {
        let handles = Channel::ALL.map(|c| {
            let f = &f;
            s.spawn(move || f(c))
        });
        handles.map(|h| h.join().expect("channel worker panicked"))
    });
    Ok([r?, g?, b?])
}

/// Resamples to the bundle geometry, encrypts all three channels, and returns
/// the bundle with the channel digests filled in.
pub fn encrypt_image(img: &Raster, bundle: &KeyBundle) -> Result<(CipherImage, KeyBundle)> {
    bundle.validate()?;
    check_geometry(bundle)?;
    let (w, h) = (bundle.width as usize, bundle.height as usize);
    let img = compress_image(img, w, h)?;
    let results = per_channel(|c| {
        let plane = img.plane(c);
        let ctx = build_channel_context(plane, bundle)?;
        Ok((ctx.digest, encrypt_channel(plane, &ctx, bundle)?))
    })?;
    let mut completed = bundle.clone();
    let [(dr, cr), (dg, cg), (db, cb)] = results;
    completed.digests = [Some(dr), Some(dg), Some(db)];
    Ok((CipherImage { width: w, height: h, channels: [cr, cg, cb] }, completed))
}

pub fn decrypt_image(c: &CipherImage, bundle: &KeyBundle) -> Result<Raster> {
    if c.width != bundle.width as usize || c.height != bundle.height as usize {
        return Err(Error::BadLength(format!(
            "cipher image is {}x{} but the bundle says {}x{}",
            c.width, c.height, bundle.width, bundle.height
        )));
    }
    for ch in Channel::ALL {
        if bundle.digests[ch.index()].is_none() {
            return Err(Error::MissingDigest(ch.name()));
        }
    }
    let planes = per_channel(|ch| decrypt_channel(&c.channels[ch.index()], bundle, ch))?;
    Raster::new(c.width, c.height, planes)
}
