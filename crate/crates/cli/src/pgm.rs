//! Binary PGM (P5, 8-bit) reading and writing.
//!
//! Parse errors carry the file path and the byte offset where parsing
//! stopped.

use std::fs;
use std::path::Path;

use ddsam2_core::metrics::BinaryMask;
use ddsam2_core::synth::GrayImage;

use crate::error::{CliError, Result};

pub fn write_pgm(path: &Path, img: &GrayImage) -> Result<()> {
    let mut bytes = format!("P5\n{} {}\n255\n", img.width, img.height).into_bytes();
    bytes.extend_from_slice(&img.data);
    fs::write(path, bytes)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

/// Masks are stored as PGM with values exactly 0 or 255.
pub fn write_mask(path: &Path, mask: &BinaryMask) -> Result<()> {
    let data: Vec<u8> = mask.bits().iter().map(|&b| if b { 255 } else { 0 }).collect();
    let img = GrayImage::new(mask.width(), mask.height(), data).expect("sizes agree");
    write_pgm(path, &img)
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    path: &'a Path,
}

impl<'a> Parser<'a> {
    fn fail(&self, what: &str) -> CliError {
        CliError::Input(format!(
            "{}: {what} at byte {}",
            self.path.display(),
            self.pos
        ))
    }

    /// Skip whitespace and '#' comment lines.
    fn skip_space(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b' ' | b'\t' | b'\r' | b'\n' => self.pos += 1,
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                _ => break,
            }
        }
    }

    fn number(&mut self) -> std::result::Result<usize, CliError> {
        self.skip_space();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.fail("expected decimal number"));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| self.fail("number out of range"))
    }
}

pub fn read_pgm(path: &Path) -> Result<GrayImage> {
    let bytes =
        fs::read(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let mut p = Parser {
        bytes: &bytes,
        pos: 0,
        path,
    };
    if !bytes.starts_with(b"P5") {
        return Err(p.fail("not a binary PGM (missing P5 magic)"));
    }
    p.pos = 2;
    let width = p.number()?;
    let height = p.number()?;
    let maxval = p.number()?;
    if maxval != 255 {
        return Err(p.fail("maxval must be 255"));
    }
    // exactly one whitespace byte separates the header from the raster
    if p.pos >= bytes.len() || !bytes[p.pos].is_ascii_whitespace() {
        return Err(p.fail("expected whitespace before raster"));
    }
    p.pos += 1;
    let need = width
        .checked_mul(height)
        .ok_or_else(|| p.fail("image dimensions overflow"))?;
    if bytes.len() - p.pos < need {
        return Err(p.fail("truncated raster"));
    }
    let data = bytes[p.pos..p.pos + need].to_vec();
    GrayImage::new(width, height, data).map_err(|e| CliError::Input(e.to_string()))
}

pub fn read_mask(path: &Path) -> Result<BinaryMask> {
    let img = read_pgm(path)?;
    for (i, &b) in img.data.iter().enumerate() {
        if b != 0 && b != 255 {
            return Err(CliError::Input(format!(
                "{}: mask value {b} (must be 0 or 255) at pixel {i}",
                path.display()
            )));
        }
    }
    let bits = img.data.iter().map(|&b| b == 255).collect();
    BinaryMask::new(img.width, img.height, bits).map_err(|e| CliError::Input(e.to_string()))
}
