//! `lclmzy`: encrypt, decrypt and evaluate RGB images with the chaotic cipher.
//!
//! Exit codes: 0 success, 2 usage error, 3 I/O error, 4 format or data error,
//! 5 selftest failure.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lclmzy::analysis::{
    ablation, attack_cipher, histogram_csv, psnr, Attack, MetricReport, NoiseKind,
    DEFAULT_CORRELATION_SAMPLES,
};
use lclmzy::chaos::{generate_sequences, ChaosParams, DEFAULT_BURN_IN};
use lclmzy::keymat::{KeyBundle, BASE_STATE, DEFAULT_ROUNDS};
use lclmzy::pipeline::{
    compress_image, decrypt_image, encrypt_image, parse_bundle, parse_cipher_file, read_ppm,
    read_raw_rgb, serialize_bundle, write_cipher_file, write_ppm, write_raw_rgb, Channel,
    CipherImage, Raster, CIPHER_MAGIC,
};
use lclmzy::selftest;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser, Debug)]
#[command(name = "lclmzy", version, about = "Chaotic RGB image cipher")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Encrypt a PPM (or raw RGB) image and write the completed key bundle.
    Encrypt(EncryptArgs),
    /// Decrypt a cipher file with its key bundle.
    Decrypt(DecryptArgs),
    /// Print entropy, correlation and (with --ablation) differential metrics.
    Analyze(AnalyzeArgs),
    /// Apply noise or cropping to a cipher file, decrypt, and report PSNR.
    Attack(AttackArgs),
    /// Write the chaotic orbit as CSV.
    DumpTrajectory(DumpArgs),
    /// Check the built-in golden vectors.
    Selftest,
}

#[derive(Args, Debug)]
struct EncryptArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Read keys from here (unless --fresh-keys) and write the completed bundle back.
    #[arg(long)]
    bundle: PathBuf,
    /// Generate random keys instead of reading them from --bundle.
    #[arg(long)]
    fresh_keys: bool,
    /// Seed for --fresh-keys; without it keys come from the OS generator.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    rounds: Option<usize>,
    /// Disable the hexagram layer inside the round function.
    #[arg(long)]
    no_zy: bool,
    /// Input is raw interleaved RGB at the bundle's dimensions.
    #[arg(long)]
    raw: bool,
}

#[derive(Args, Debug)]
struct DecryptArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    bundle: PathBuf,
    /// Write raw interleaved RGB instead of PPM.
    #[arg(long)]
    raw: bool,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    /// A cipher file or a PPM image.
    #[arg(long = "in")]
    input: PathBuf,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Required with --ablation.
    #[arg(long)]
    bundle: Option<PathBuf>,
    /// Encrypt the input with and without the hexagram layer and report both.
    #[arg(long)]
    ablation: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_CORRELATION_SAMPLES)]
    samples: usize,
    /// Also write a per-channel histogram CSV.
    #[arg(long)]
    histogram_csv: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum NoiseArg {
    Gaussian,
    Sp,
    Speckle,
}

impl From<NoiseArg> for NoiseKind {
    fn from(n: NoiseArg) -> Self {
        match n {
            NoiseArg::Gaussian => NoiseKind::Gaussian,
            NoiseArg::Sp => NoiseKind::SaltPepper,
            NoiseArg::Speckle => NoiseKind::Speckle,
        }
    }
}

#[derive(Args, Debug)]
struct AttackArgs {
    /// Cipher file to attack.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    bundle: PathBuf,
    /// Original plain image; PSNR is measured against its resampled form.
    #[arg(long)]
    reference: PathBuf,
    /// Optional PPM of the decrypted attacked image.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, requires = "level", conflicts_with = "crop")]
    noise: Option<NoiseArg>,
    #[arg(long, requires = "noise")]
    level: Option<f64>,
    /// Region to zero, as X,Y,W,H.
    #[arg(long, value_parser = parse_crop)]
    crop: Option<(usize, usize, usize, usize)>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct DumpArgs {
    /// Take the map parameters and start point from this bundle.
    #[arg(long)]
    bundle: Option<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    steps: usize,
    #[arg(long, default_value_t = DEFAULT_BURN_IN)]
    burn_in: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_crop(s: &str) -> Result<(usize, usize, usize, usize), String> {
    let parts: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|_| format!("not a number: {p:?}")))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [x, y, w, h] => Ok((x, y, w, h)),
        _ => Err("expected X,Y,W,H".into()),
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Io(PathBuf, std::io::Error),
    Data(lclmzy::Error),
    Selftest(usize),
}

impl From<lclmzy::Error> for Failure {
    fn from(e: lclmzy::Error) -> Self {
        Failure::Data(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Io(..) => 3,
            Failure::Data(lclmzy::Error::Io(_)) => 3,
            Failure::Data(_) => 4,
            Failure::Selftest(_) => 5,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage: {m}"),
            Failure::Io(p, e) => write!(f, "{}: {e}", p.display()),
            Failure::Data(e) => write!(f, "{e}"),
            Failure::Selftest(n) => write!(f, "{n} selftest check(s) failed"),
        }
    }
}

type Outcome<T = ()> = Result<T, Failure>;

fn read(path: &Path) -> Outcome<Vec<u8>> {
    fs::read(path).map_err(|e| Failure::Io(path.to_owned(), e))
}

fn write(path: &Path, data: impl AsRef<[u8]>) -> Outcome {
    fs::write(path, data).map_err(|e| Failure::Io(path.to_owned(), e))
}

fn load_bundle(path: &Path) -> Outcome<KeyBundle> {
    let text = String::from_utf8(read(path)?)
        .map_err(|_| Failure::Data(lclmzy::Error::Format(format!("{}: not UTF-8", path.display()))))?;
    Ok(parse_bundle(&text)?)
}

fn encrypt(a: EncryptArgs) -> Outcome {
    let mut bundle = if a.fresh_keys {
        let rounds = a.rounds.unwrap_or(DEFAULT_ROUNDS);
        if rounds == 0 {
            return Err(Failure::Usage("--rounds must be at least 1".into()));
        }
        match a.seed {
            Some(s) => KeyBundle::generate(&mut ChaCha8Rng::seed_from_u64(s), rounds, !a.no_zy),
            None => KeyBundle::generate(&mut rand::rng(), rounds, !a.no_zy),
        }
    } else {
        if a.seed.is_some() {
            return Err(Failure::Usage("--seed only applies with --fresh-keys".into()));
        }
        let mut b = load_bundle(&a.bundle)?;
        if let Some(r) = a.rounds {
            b.rounds = r;
        }
        if a.no_zy {
            b.zy_enabled = false;
        }
        b.without_digests()
    };
    bundle.validate()?;

    let data = read(&a.input)?;
    let img = if a.raw {
        read_raw_rgb(&data, bundle.width as usize, bundle.height as usize)?
    } else {
        read_ppm(&data)?
    };
    let (cipher, completed) = encrypt_image(&img, &bundle)?;
    bundle = completed;
    let cipher_bytes = write_cipher_file(&cipher)?;
    write(&a.out, cipher_bytes)?;
    write(&a.bundle, serialize_bundle(&bundle))
}

fn decrypt(a: DecryptArgs) -> Outcome {
    let bundle = load_bundle(&a.bundle)?;
    let cipher = parse_cipher_file(&read(&a.input)?)?;
    let img = decrypt_image(&cipher, &bundle)?;
    let bytes = if a.raw { write_raw_rgb(&img) } else { write_ppm(&img) };
    write(&a.out, bytes)
}

fn load_image_or_cipher(path: &Path) -> Outcome<Raster> {
    let data = read(path)?;
    if data.starts_with(CIPHER_MAGIC) {
        Ok(parse_cipher_file(&data)?.as_raster())
    } else {
        Ok(read_ppm(&data)?)
    }
}

fn analyze(a: AnalyzeArgs) -> Outcome {
    let img = load_image_or_cipher(&a.input)?;
    if a.samples == 0 {
        return Err(Failure::Usage("--samples must be positive".into()));
    }
    let mut text = String::new();
    if a.ablation {
        let path = a.bundle.as_ref().ok_or_else(|| Failure::Usage("--ablation needs --bundle".into()))?;
        let bundle = load_bundle(path)?;
        for (report, exact) in ablation(&img, &bundle, a.samples, a.seed)? {
            let label = report.label.clone().unwrap_or_default();
            text.push_str(&report.to_string());
            let _ = writeln!(text, "{label}.roundtrip = {}", if exact { "exact" } else { "mismatch" });
        }
    } else {
        text = MetricReport::of_image(&img, a.samples, a.seed)?.to_string();
    }
    let csv = a.histogram_csv.as_ref().map(|_| histogram_csv(&img));
    match &a.out {
        Some(p) => write(p, &text)?,
        None => print!("{text}"),
    }
    if let (Some(p), Some(csv)) = (&a.histogram_csv, csv) {
        write(p, csv)?;
    }
    Ok(())
}

fn attack(a: AttackArgs) -> Outcome {
    let attack = match (a.noise, a.level, a.crop) {
        (Some(kind), Some(level), None) => Attack::Noise { kind: kind.into(), level },
        (None, None, Some((x, y, w, h))) => Attack::Crop { x, y, w, h },
        _ => return Err(Failure::Usage("give either --noise with --level, or --crop".into())),
    };
    let bundle = load_bundle(&a.bundle)?;
    let cipher = parse_cipher_file(&read(&a.input)?)?;
    let reference = read_ppm(&read(&a.reference)?)?;
    let reference = compress_image(&reference, cipher.width, cipher.height)?;
    let attacked: CipherImage = attack_cipher(&cipher, attack, a.seed)?;
    let recovered = decrypt_image(&attacked, &bundle)?;

    let mut text = String::new();
    if let Attack::Noise { kind: NoiseKind::Speckle, .. } = attack {
        text.push_str("# speckle level is the variance of the multiplicative term\n");
    }
    for ch in Channel::ALL {
        let p = psnr(reference.plane(ch), recovered.plane(ch))?;
        let _ = writeln!(text, "psnr.{} = {}", ch.name(), fmt_db(p));
    }
    let whole = psnr(&reference.to_interleaved(), &recovered.to_interleaved())?;
    let _ = writeln!(text, "psnr.all = {}", fmt_db(whole));
    if let Some(p) = &a.out {
        write(p, write_ppm(&recovered))?;
    }
    print!("{text}");
    Ok(())
}

fn fmt_db(v: f64) -> String {
    if v.is_infinite() { "inf".into() } else { format!("{v:.4}") }
}

fn dump_trajectory(a: DumpArgs) -> Outcome {
    let (init, params) = match &a.bundle {
        Some(p) => {
            let b = load_bundle(p)?;
            (b.base, b.params)
        }
        None => (BASE_STATE, ChaosParams::default()),
    };
    if a.steps == 0 {
        return Err(Failure::Usage("--steps must be positive".into()));
    }
    let seqs = generate_sequences(init, params, a.burn_in, a.steps)?;
    let mut csv = String::from("step,x,y,z\n");
    for i in 0..a.steps {
        let _ = writeln!(
            csv,
            "{i},{},{},{}",
            seqs.x1.values[i], seqs.x2.values[i], seqs.x3.values[i]
        );
    }
    match &a.out {
        Some(p) => write(p, csv),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

fn run_selftest() -> Outcome {
    let checks = selftest::run();
    let failed = checks.iter().filter(|c| !c.passed).count();
    for c in &checks {
        println!("{} {}: {}", if c.passed { "ok  " } else { "FAIL" }, c.name, c.detail);
    }
    if failed > 0 {
        Err(Failure::Selftest(failed))
    } else {
        Ok(())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Encrypt(a) => encrypt(a),
        Command::Decrypt(a) => decrypt(a),
        Command::Analyze(a) => analyze(a),
        Command::Attack(a) => attack(a),
        Command::DumpTrajectory(a) => dump_trajectory(a),
        Command::Selftest => run_selftest(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("lclmzy: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
