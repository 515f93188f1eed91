//! Line-oriented `key = value` text format for [`KeyBundle`].

use std::fmt::Write as _;

use crate::chaos::{ChaosParams, ChaosState};
use crate::keymat::{Digest, KeyBundle};
use crate::trigram::DigitKey;
use crate::{Error, Result};

pub const BUNDLE_MAGIC: &str = "LCLMZY 1";

const KEYS: [&str; 15] = [
    "magic", "a", "b", "x1", "x2", "x3", "rounds", "zy", "width", "height", "hexkey", "digitkey",
    "digest_r", "digest_g", "digest_b",
];

/// Reals use Rust's shortest round-trip formatting. Digests that have not been
/// filled in yet are written as an empty value.
pub fn serialize_bundle(b: &KeyBundle) -> String {
    let digest = |d: &Option<Digest>| d.map(|d| d.to_hex()).unwrap_or_default();
    let mut out = String::new();
    let mut line = |k: &str, v: String| {
        let _ = if v.is_empty() { writeln!(out, "{k} =") } else { writeln!(out, "{k} = {v}") };
    };
    line("magic", BUNDLE_MAGIC.to_owned());
    line("a", b.params.a.to_string());
    line("b", b.params.b.to_string());
    line("x1", b.base.x.to_string());
    line("x2", b.base.y.to_string());
    line("x3", b.base.z.to_string());
    line("rounds", b.rounds.to_string());
    line("zy", u8::from(b.zy_enabled).to_string());
    line("width", b.width.to_string());
    line("height", b.height.to_string());
    line("hexkey", b.hex_key.clone());
    line("digitkey", b.digit_key.to_string());
    line("digest_r", digest(&b.digests[0]));
    line("digest_g", digest(&b.digests[1]));
    line("digest_b", digest(&b.digests[2]));
    out
}

fn perr(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn number<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| perr(line, format!("{key}: cannot parse {v:?}")))
}

/// Parses the text form. Blank lines and `#` comments are skipped; every key
/// must appear exactly once and `magic` must come first.
pub fn parse_bundle(text: &str) -> Result<KeyBundle> {
    let mut values: [Option<(usize, String)>; 15] = Default::default();
    let mut first_key = true;
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let n = i + 1;
        last_line = n;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (k, v) = trimmed
            .split_once('=')
            .ok_or_else(|| perr(n, format!("expected `key = value`, got {trimmed:?}")))?;
        let (k, v) = (k.trim(), v.trim());
        let idx = KEYS
            .iter()
            .position(|&key| key == k)
            .ok_or_else(|| perr(n, format!("unknown key {k:?}")))?;
        if first_key {
            if idx != 0 || v != BUNDLE_MAGIC {
                return Err(perr(n, format!("bad magic: expected `magic = {BUNDLE_MAGIC}`")));
            }
            first_key = false;
        }
        if values[idx].is_some() {
            return Err(perr(n, format!("duplicate key {k:?}")));
        }
        values[idx] = Some((n, v.to_owned()));
    }
    if first_key {
        return Err(perr(last_line.max(1), "empty bundle"));
    }

    let get = |key: &str| -> Result<(usize, &str)> {
        let idx = KEYS.iter().position(|&k| k == key).expect("known key");
        values[idx]
            .as_ref()
            .map(|(n, v)| (*n, v.as_str()))
            .ok_or_else(|| perr(last_line + 1, format!("missing key {key:?}")))
    };
    let real = |key: &str| -> Result<f64> {
        let (n, v) = get(key)?;
        number(n, key, v)
    };
    let digest = |key: &str| -> Result<Option<Digest>> {
        let (n, v) = get(key)?;
        if v.is_empty() {
            return Ok(None);
        }
        if v.chars().any(|c| c.is_ascii_uppercase()) {
            return Err(perr(n, format!("{key}: digests are lowercase hex")));
        }
        Digest::from_hex(v).map(Some).map_err(|e| perr(n, format!("{key}: {e}")))
    };

    let params = ChaosParams { a: real("a")?, b: real("b")? };
    let base = ChaosState::new(real("x1")?, real("x2")?, real("x3")?);
    let (n, v) = get("rounds")?;
    let rounds: usize = number(n, "rounds", v)?;
    let (n, v) = get("zy")?;
    let zy_enabled = match v {
        "0" => false,
        "1" => true,
        _ => return Err(perr(n, format!("zy must be 0 or 1, got {v:?}"))),
    };
    let (n, v) = get("width")?;
    let width: u32 = number(n, "width", v)?;
    let (n, v) = get("height")?;
    let height: u32 = number(n, "height", v)?;
    let (n, hex) = get("hexkey")?;
    if let Some(c) = hex.chars().find(|c| !c.is_ascii_hexdigit()) {
        return Err(perr(n, format!("hexkey: invalid character {c:?}")));
    }
    let (n, v) = get("digitkey")?;
    let digit_key = DigitKey::parse(v).map_err(|e| perr(n, format!("digitkey: {e}")))?;
    let digests = [digest("digest_r")?, digest("digest_g")?, digest("digest_b")?];

    Ok(KeyBundle {
        params,
        base,
        digests,
        hex_key: hex.to_owned(),
        digit_key,
        rounds,
        width,
        height,
        zy_enabled,
    })
}
