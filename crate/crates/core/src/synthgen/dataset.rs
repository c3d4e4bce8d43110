//! Labeled patches and the `BGDS` dataset file format.
//!
//! Layout: ASCII magic `BGDS0001`, little-endian `u32` sample count, width and
//! height, then per sample one label byte followed by `width×height` row-major
//! pixels.

use std::path::Path;

use crate::image::GrayImage;
use crate::{Error, Result};

pub const DATASET_MAGIC: &[u8; 8] = b"BGDS0001";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Label {
    NoText = 0,
    Text = 1,
}

impl Label {
    pub fn from_byte(b: u8) -> Result<Self> {
        match b {
            0 => Ok(Label::NoText),
            1 => Ok(Label::Text),
            other => Err(Error::InvalidLabel(other)),
        }
    }

    pub fn is_text(self) -> bool {
        self == Label::Text
    }

    /// Class index used by the networks.
    pub fn class(self) -> usize {
        self as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sample {
    pub patch: GrayImage,
    pub label: Label,
}

impl Sample {
    pub fn width(&self) -> usize {
        self.patch.width
    }

    pub fn height(&self) -> usize {
        self.patch.height
    }
}

pub fn encode_dataset(samples: &[Sample]) -> Result<Vec<u8>> {
    let (w, h) = samples.first().map_or((0, 0), |s| (s.width(), s.height()));
    for (i, s) in samples.iter().enumerate() {
        if (s.width(), s.height()) != (w, h) {
            return Err(Error::DimensionMismatch(format!(
                "sample {i} is {}x{}, expected {w}x{h}",
                s.width(),
                s.height()
            )));
        }
    }
    let u32_of = |v: usize, what: &str| {
        u32::try_from(v).map_err(|_| Error::InvalidConfig(format!("{what} {v} does not fit in u32")))
    };
    let mut out = Vec::with_capacity(20 + samples.len() * (1 + w * h));
    out.extend_from_slice(DATASET_MAGIC);
    out.extend_from_slice(&u32_of(samples.len(), "sample count")?.to_le_bytes());
    out.extend_from_slice(&u32_of(w, "width")?.to_le_bytes());
    out.extend_from_slice(&u32_of(h, "height")?.to_le_bytes());
    for s in samples {
        out.push(s.label as u8);
        out.extend_from_slice(&s.patch.pixels);
    }
    Ok(out)
}

pub fn decode_dataset(bytes: &[u8]) -> Result<Vec<Sample>> {
    if bytes.len() < 8 || &bytes[..8] != DATASET_MAGIC {
        return Err(Error::BadMagic {
            expected: "BGDS0001",
        });
    }
    if bytes.len() < 20 {
        return Err(Error::Truncated(format!("dataset header needs 20 bytes, file has {}", bytes.len())));
    }
    let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().expect("4-byte slice")) as usize;
    let (count, w, h) = (word(8), word(12), word(16));
    let record = 1 + w * h;
    let need = count
        .checked_mul(record)
        .and_then(|n| n.checked_add(20))
        .ok_or_else(|| Error::Truncated(format!("header declares {count} samples of {w}x{h}")))?;
    if bytes.len() < need {
        return Err(Error::Truncated(format!(
            "header declares {count} samples of {w}x{h} ({need} bytes), file has {}",
            bytes.len()
        )));
    }
    if bytes.len() > need {
        return Err(Error::TrailingData(bytes.len() - need));
    }
    bytes[20..]
        .chunks_exact(record)
        .map(|rec| {
            Ok(Sample {
                label: Label::from_byte(rec[0])?,
                patch: GrayImage::new(w, h, rec[1..].to_vec())?,
            })
        })
        .collect()
}

pub fn write_dataset(samples: &[Sample], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode_dataset(samples)?;
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn read_dataset(path: impl AsRef<Path>) -> Result<Vec<Sample>> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_dataset(&bytes)
}
