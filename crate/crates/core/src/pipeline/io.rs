//! Binary PPM, raw interleaved RGB, and the cipher-image container.

use super::{CipherImage, Raster};
use crate::{Error, Result};

/// Eight bytes at the start of every cipher file.
pub const CIPHER_MAGIC: &[u8; 8] = b"LCLMZY\x00\x01";

/// Reads a binary `P6` PPM with maxval 255. Bytes after the raster are ignored.
pub fn read_ppm(data: &[u8]) -> Result<Raster> {
    let mut pos = 0;
    let mut token = || -> Result<String> {
        loop {
            match data.get(pos) {
                Some(b'#') => {
                    while data.get(pos).is_some_and(|&c| c != b'\n') {
                        pos += 1;
                    }
                }
                Some(c) if c.is_ascii_whitespace() => pos += 1,
                Some(_) => break,
                None => return Err(Error::Format("truncated PPM header".into())),
            }
        }
        let start = pos;
        while data.get(pos).is_some_and(|c| !c.is_ascii_whitespace() && *c != b'#') {
            pos += 1;
        }
        Ok(String::from_utf8_lossy(&data[start..pos]).into_owned())
    };
    if token()? != "P6" {
        return Err(Error::Format("not a binary PPM (expected P6)".into()));
    }
    let mut dim = |what: &str| -> Result<usize> {
        let t = token()?;
        t.parse().map_err(|_| Error::Format(format!("bad PPM {what}: {t:?}")))
    };
    let width = dim("width")?;
    let height = dim("height")?;
    let maxval = dim("maxval")?;
    if maxval != 255 {
        return Err(Error::Unsupported(format!("PPM maxval {maxval}; only 255 is supported")));
    }
    if width == 0 || height == 0 {
        return Err(Error::EmptyImage);
    }
    // Exactly one whitespace byte separates the header from the raster.
    let start = pos + 1;
    let len = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(3))
        .ok_or_else(|| Error::Format("PPM dimensions overflow".into()))?;
    let raster = data
        .get(start..start + len)
        .ok_or_else(|| Error::Format(format!("PPM raster truncated: need {len} bytes")))?;
    Raster::from_interleaved(width, height, raster)
}

pub fn write_ppm(img: &Raster) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend(img.to_interleaved());
    out
}

pub fn read_raw_rgb(data: &[u8], width: usize, height: usize) -> Result<Raster> {
    Raster::from_interleaved(width, height, data)
}

pub fn write_raw_rgb(img: &Raster) -> Vec<u8> {
    img.to_interleaved()
}

pub fn write_cipher_file(c: &CipherImage) -> Result<Vec<u8>> {
    let w = u32::try_from(c.width).map_err(|_| Error::Format("width exceeds u32".into()))?;
    let h = u32::try_from(c.height).map_err(|_| Error::Format("height exceeds u32".into()))?;
    let mut out = Vec::with_capacity(16 + c.channels.iter().map(Vec::len).sum::<usize>());
    out.extend_from_slice(CIPHER_MAGIC);
    out.extend_from_slice(&w.to_be_bytes());
    out.extend_from_slice(&h.to_be_bytes());
    for ch in &c.channels {
        out.extend_from_slice(ch);
    }
    Ok(out)
}

pub fn parse_cipher_file(data: &[u8]) -> Result<CipherImage> {
    if data.len() < 16 || &data[..8] != CIPHER_MAGIC {
        return Err(Error::Format("not a cipher file (bad magic)".into()));
    }
    let width = u32::from_be_bytes(data[8..12].try_into().expect("4 bytes")) as usize;
    let height = u32::from_be_bytes(data[12..16].try_into().expect("4 bytes")) as usize;
    let n = width * height;
    let payload = &data[16..];
    if payload.len() != 3 * n {
        return Err(Error::BadLength(format!(
            "cipher payload is {} bytes, expected {} for {width}x{height}",
            payload.len(),
            3 * n
        )));
    }
    let ch = |i: usize| payload[i * n..(i + 1) * n].to_vec();
    Ok(CipherImage { width, height, channels: [ch(0), ch(1), ch(2)] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ppm_round_trip_and_comments() {
        let img = Raster::from_interleaved(2, 1, &[1, 2, 3, 4, 5, 6]).unwrap();
        let bytes = write_ppm(&img);
        assert_eq!(&bytes[..11], b"P6\n2 1\n255\n");
        assert_eq!(read_ppm(&bytes).unwrap(), img);

        let commented = b"P6 # a comment\n# another\n2\t1 255\n\x01\x02\x03\x04\x05\x06";
        assert_eq!(read_ppm(commented).unwrap(), img);
    }

    #[test]
    fn ppm_rejections() {
        assert!(matches!(read_ppm(b"P3\n1 1\n255\n0 0 0"), Err(Error::Format(_))));
        assert!(matches!(read_ppm(b"P6\n1 1\n65535\n"), Err(Error::Unsupported(_))));
        assert!(matches!(read_ppm(b"P6\n2 2\n255\n\x00\x00"), Err(Error::Format(_))));
        assert!(matches!(read_ppm(b"P6\n2"), Err(Error::Format(_))));
        assert!(matches!(read_ppm(b"P6\nx 2\n255\n"), Err(Error::Format(_))));
    }

    #[test]
    fn raw_round_trip() {
        let data: Vec<u8> = (0..24).collect();
        let img = read_raw_rgb(&data, 4, 2).unwrap();
        assert_eq!(write_raw_rgb(&img), data);
        assert!(read_raw_rgb(&data, 4, 3).is_err());
    }

    #[test]
    fn cipher_file_layout() {
        let c = CipherImage { width: 2, height: 3, channels: [vec![1; 6], vec![2; 6], vec![3; 6]] };
        let bytes = write_cipher_file(&c).unwrap();
        assert_eq!(&bytes[..8], b"LCLMZY\x00\x01");
        assert_eq!(&bytes[8..16], &[0, 0, 0, 2, 0, 0, 0, 3]);
        assert_eq!(bytes.len(), 16 + 18);
        assert_eq!(parse_cipher_file(&bytes).unwrap(), c);
        assert!(matches!(parse_cipher_file(&bytes[..bytes.len() - 1]), Err(Error::BadLength(_))));
        let mut bad = bytes.clone();
        bad[7] = 2;
        assert!(matches!(parse_cipher_file(&bad), Err(Error::Format(_))));
    }

    proptest! {
        #[test]
        fn cipher_file_round_trip(w in 1usize..20, h in 1usize..20, seed in any::<u8>()) {
            let n = w * h;
            let gen = |k: u8| (0..n).map(|i| (i as u8).wrapping_mul(31).wrapping_add(seed ^ k)).collect();
            let c = CipherImage { width: w, height: h, channels: [gen(1), gen(2), gen(3)] };
            prop_assert_eq!(parse_cipher_file(&write_cipher_file(&c).unwrap()).unwrap(), c);
        }
    }
}
