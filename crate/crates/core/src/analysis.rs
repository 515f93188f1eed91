//! Statistical evaluation: histograms, entropy, adjacent-pixel correlation,
//! differential metrics, PSNR, and noise/cropping attacks on cipher planes.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::keymat::KeyBundle;
use crate::pipeline::{compress_image, decrypt_image, encrypt_image, CipherImage, Channel, Raster};
use crate::{Error, Result};

/// Sample count used for correlation unless the caller says otherwise.
pub const DEFAULT_CORRELATION_SAMPLES: usize = 8000;

pub fn histogram(plane: &[u8]) -> [u64; 256] {
    let mut h = [0u64; 256];
    for &v in plane {
        h[v as usize] += 1;
    }
    h
}

/// Shannon entropy in bits over the 256 grey levels.
pub fn entropy(plane: &[u8]) -> Result<f64> {
    if plane.is_empty() {
        return Err(Error::EmptyPlane);
    }
    let n = plane.len() as f64;
    Ok(histogram(plane)
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Horizontal,
    Vertical,
    Diagonal,
}

impl Direction {
    pub const ALL: [Direction; 3] = [Direction::Horizontal, Direction::Vertical, Direction::Diagonal];

    fn offset(self) -> (usize, usize) {
        match self {
            Direction::Horizontal => (0, 1),
            Direction::Vertical => (1, 0),
            Direction::Diagonal => (1, 1),
        }
    }

    pub const fn name(self) -> &'static str {
        match self {
            Direction::Horizontal => "horizontal",
            Direction::Vertical => "vertical",
            Direction::Diagonal => "diagonal",
        }
    }
}

/// Correlation coefficient of `n` seeded adjacent pairs, with population
/// (1/N) moments. Anchors are drawn with replacement from the positions whose
/// neighbour exists. `None` when either sample has zero variance.
pub fn adjacent_correlation(
    plane: &[u8],
    width: usize,
    height: usize,
    direction: Direction,
    n: usize,
    seed: u64,
) -> Result<Option<f64>> {
    if plane.len() != width * height {
        return Err(Error::DimensionMismatch(format!(
            "plane has {} samples, expected {width}x{height}",
            plane.len()
        )));
    }
    let (dr, dc) = direction.offset();
    if height <= dr || width <= dc || n == 0 {
        return Err(Error::PlaneTooSmall);
    }
    let (rows, cols) = (height - dr, width - dc);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut us = Vec::with_capacity(n);
    let mut vs = Vec::with_capacity(n);
    for _ in 0..n {
        let r = rng.random_range(0..rows);
        let c = rng.random_range(0..cols);
        us.push(plane[r * width + c] as f64);
        vs.push(plane[(r + dr) * width + c + dc] as f64);
    }
    Ok(pearson(&us, &vs))
}

fn pearson(u: &[f64], v: &[f64]) -> Option<f64> {
    let n = u.len() as f64;
    let eu = u.iter().sum::<f64>() / n;
    let ev = v.iter().sum::<f64>() / n;
    let du = u.iter().map(|x| (x - eu).powi(2)).sum::<f64>() / n;
    let dv = v.iter().map(|y| (y - ev).powi(2)).sum::<f64>() / n;
    let cov = u.iter().zip(v).map(|(x, y)| (x - eu) * (y - ev)).sum::<f64>() / n;
    if du == 0.0 || dv == 0.0 {
        return None;
    }
    Some((cov / (du.sqrt() * dv.sqrt())).clamp(-1.0, 1.0))
}

fn same_len(a: &[u8], b: &[u8]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(format!("{} vs {} samples", a.len(), b.len())));
    }
    if a.is_empty() {
        return Err(Error::EmptyPlane);
    }
    Ok(())
}

/// `(NPCR, UACI)` in percent.
pub fn npcr_uaci(c1: &[u8], c2: &[u8]) -> Result<(f64, f64)> {
    same_len(c1, c2)?;
    let n = c1.len() as f64;
    let changed = c1.iter().zip(c2).filter(|(a, b)| a != b).count() as f64;
    let abs: u64 = c1.iter().zip(c2).map(|(&a, &b)| a.abs_diff(b) as u64).sum();
    Ok((100.0 * changed / n, 100.0 * abs as f64 / (n * 255.0)))
}

pub fn mse(reference: &[u8], test: &[u8]) -> Result<f64> {
    same_len(reference, test)?;
    let sq: u64 = reference.iter().zip(test).map(|(&a, &b)| (a.abs_diff(b) as u64).pow(2)).sum();
    Ok(sq as f64 / reference.len() as f64)
}

/// PSNR in dB against a peak of 255; `f64::INFINITY` for identical planes.
pub fn psnr(reference: &[u8], test: &[u8]) -> Result<f64> {
    let m = mse(reference, test)?;
    if m == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (255.0f64 * 255.0 / m).log10())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseKind {
    /// Each sample becomes 0 or 255 with the given probability.
    SaltPepper,
    /// Additive zero-mean noise with variance `level` on the unit scale.
    Gaussian,
    /// Multiplicative `p·(1 + n)`, `n` zero-mean with variance `level`.
    Speckle,
}

impl NoiseKind {
    pub const fn name(self) -> &'static str {
        match self {
            NoiseKind::SaltPepper => "sp",
            NoiseKind::Gaussian => "gaussian",
            NoiseKind::Speckle => "speckle",
        }
    }
}

/// Seeded noise on one plane. Levels follow the usual imaging-toolbox
/// conventions: density for salt & pepper, variance (unit intensity scale)
/// for Gaussian and speckle.
pub fn add_noise(plane: &[u8], kind: NoiseKind, level: f64, seed: u64) -> Result<Vec<u8>> {
    if !(level >= 0.0 && level.is_finite()) {
        return Err(Error::Unsupported(format!("noise level must be finite and >= 0, got {level}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let clamp = |v: f64| v.round().clamp(0.0, 255.0) as u8;
    Ok(match kind {
        NoiseKind::SaltPepper => plane
            .iter()
            .map(|&p| {
                if rng.random_bool(level.min(1.0)) {
                    if rng.random_bool(0.5) { 255 } else { 0 }
                } else {
                    p
                }
            })
            .collect(),
        NoiseKind::Gaussian => {
            let dist = Normal::new(0.0, level.sqrt() * 255.0).expect("finite sigma");
            plane.iter().map(|&p| clamp(p as f64 + dist.sample(&mut rng))).collect()
        }
        NoiseKind::Speckle => {
            let dist = Normal::new(0.0, level.sqrt()).expect("finite sigma");
            plane.iter().map(|&p| clamp(p as f64 * (1.0 + dist.sample(&mut rng)))).collect()
        }
    })
}

/// Zeroes a `w × h` region whose top-left corner is `(x, y)`.
pub fn crop_attack(
    plane: &[u8],
    width: usize,
    height: usize,
    (x, y, w, h): (usize, usize, usize, usize),
) -> Result<Vec<u8>> {
    if plane.len() != width * height {
        return Err(Error::DimensionMismatch(format!(
            "plane has {} samples, expected {width}x{height}",
            plane.len()
        )));
    }
    if x + w > width || y + h > height {
        return Err(Error::RegionOutOfBounds { x, y, w, h, width, height });
    }
    let mut out = plane.to_vec();
    for r in y..y + h {
        out[r * width + x..r * width + x + w].fill(0);
    }
    Ok(out)
}

/// An attack applied to every channel of a cipher image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Attack {
    Noise { kind: NoiseKind, level: f64 },
    Crop { x: usize, y: usize, w: usize, h: usize },
}

pub fn attack_cipher(c: &CipherImage, attack: Attack, seed: u64) -> Result<CipherImage> {
    let mut channels = c.channels.clone();
    for (i, ch) in channels.iter_mut().enumerate() {
        *ch = match attack {
            Attack::Noise { kind, level } => add_noise(ch, kind, level, seed.wrapping_add(i as u64))?,
            Attack::Crop { x, y, w, h } => crop_attack(ch, c.width, c.height, (x, y, w, h))?,
        };
    }
    Ok(CipherImage { width: c.width, height: c.height, channels })
}

/// Attacks the ciphertext, decrypts, and returns per-channel PSNR against
/// `plain`.
pub fn attack_psnr(
    plain: &Raster,
    cipher: &CipherImage,
    bundle: &KeyBundle,
    attack: Attack,
    seed: u64,
) -> Result<[f64; 3]> {
    let attacked = attack_cipher(cipher, attack, seed)?;
    let recovered = decrypt_image(&attacked, bundle)?;
    let p = |c: Channel| psnr(plain.plane(c), recovered.plane(c));
    Ok([p(Channel::R)?, p(Channel::G)?, p(Channel::B)?])
}

/// Encrypts `img` and a copy with one seeded pixel incremented by 1 (mod 256)
/// in every channel, and compares the two ciphertexts.
pub fn plaintext_sensitivity(img: &Raster, bundle: &KeyBundle, seed: u64) -> Result<[(f64, f64); 3]> {
    let base = compress_image(img, bundle.width as usize, bundle.height as usize)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pos = rng.random_range(0..base.width * base.height);
    let mut tweaked = base.clone();
    for p in &mut tweaked.planes {
        p[pos] = p[pos].wrapping_add(1);
    }
    let (c1, _) = encrypt_image(&base, bundle)?;
    let (c2, _) = encrypt_image(&tweaked, bundle)?;
    let d = |i: usize| npcr_uaci(&c1.channels[i], &c2.channels[i]);
    Ok([d(0)?, d(1)?, d(2)?])
}

/// Per-channel metrics, printed as `metric.channel[.direction] = value`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MetricReport {
    pub label: Option<String>,
    pub entropy: [f64; 3],
    /// Indexed by channel, then by [`Direction::ALL`] order.
    pub correlation: [[Option<f64>; 3]; 3],
    pub npcr_uaci: Option<[(f64, f64); 3]>,
    pub psnr: Option<[f64; 3]>,
    pub notes: Vec<String>,
}

impl MetricReport {
    /// Entropy and correlation of each plane of `img`.
    pub fn of_image(img: &Raster, samples: usize, seed: u64) -> Result<Self> {
        let mut report = Self::default();
        for ch in Channel::ALL {
            let plane = img.plane(ch);
            let i = ch.index();
            report.entropy[i] = entropy(plane)?;
            for (j, dir) in Direction::ALL.into_iter().enumerate() {
                report.correlation[i][j] =
                    adjacent_correlation(plane, img.width, img.height, dir, samples, seed)?;
            }
        }
        Ok(report)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }
}

fn num(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.6}")
    }
}

impl fmt::Display for MetricReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for note in &self.notes {
            writeln!(f, "# {note}")?;
        }
        let prefix = self.label.as_ref().map(|l| format!("{l}.")).unwrap_or_default();
        for ch in Channel::ALL {
            writeln!(f, "{prefix}entropy.{} = {}", ch.name(), num(self.entropy[ch.index()]))?;
        }
        for ch in Channel::ALL {
            for (j, dir) in Direction::ALL.into_iter().enumerate() {
                let v = self.correlation[ch.index()][j].map(num).unwrap_or_else(|| "undefined".into());
                writeln!(f, "{prefix}correlation.{}.{} = {v}", ch.name(), dir.name())?;
            }
        }
        if let Some(d) = &self.npcr_uaci {
            for ch in Channel::ALL {
                writeln!(f, "{prefix}npcr.{} = {}", ch.name(), num(d[ch.index()].0))?;
                writeln!(f, "{prefix}uaci.{} = {}", ch.name(), num(d[ch.index()].1))?;
            }
        }
        if let Some(p) = &self.psnr {
            for ch in Channel::ALL {
                writeln!(f, "{prefix}psnr.{} = {}", ch.name(), num(p[ch.index()]))?;
            }
        }
        Ok(())
    }
}

/// CSV with one row per grey level and one count column per channel.
pub fn histogram_csv(img: &Raster) -> String {
    let h = img.planes.each_ref().map(|p| histogram(p));
    let mut out = String::from("level,R,G,B\n");
    for v in 0..256 {
        out.push_str(&format!("{v},{},{},{}\n", h[0][v], h[1][v], h[2][v]));
    }
    out
}

/// Cipher-image metrics plus plaintext sensitivity for one bundle
/// configuration, and whether the round trip was exact.
pub fn evaluate_configuration(
    img: &Raster,
    bundle: &KeyBundle,
    samples: usize,
    seed: u64,
) -> Result<(MetricReport, bool)> {
    let plain = compress_image(img, bundle.width as usize, bundle.height as usize)?;
    let (cipher, completed) = encrypt_image(&plain, bundle)?;
    let exact = decrypt_image(&cipher, &completed)? == plain;
    let mut report = MetricReport::of_image(&cipher.as_raster(), samples, seed)?;
    report.npcr_uaci = Some(plaintext_sensitivity(&plain, bundle, seed)?);
    Ok((report, exact))
}

/// Runs [`evaluate_configuration`] with the hexagram layer on and off.
pub fn ablation(img: &Raster, bundle: &KeyBundle, samples: usize, seed: u64) -> Result<[(MetricReport, bool); 2]> {
    let mut zy = bundle.without_digests();
    zy.zy_enabled = true;
    let mut nzy = zy.clone();
    nzy.zy_enabled = false;
    let (a, ea) = evaluate_configuration(img, &zy, samples, seed)?;
    let (b, eb) = evaluate_configuration(img, &nzy, samples, seed)?;
    Ok([(a.with_label("zy"), ea), (b.with_label("nzy"), eb)])
}
