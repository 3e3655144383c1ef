//! Minimal PPM (P3/P6, 8-bit) reader/writer and conversion of images to
//! 5D point clouds (R, G, B, x, y), channels and coordinates scaled to [0,1].

use std::io::Read;
use std::path::Path;

use crate::clustering::PointCloud;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PpmImage {
    pub width: usize,
    pub height: usize,
    pub maxval: u16,
    /// Row-major RGB triples.
    pub pixels: Vec<u8>,
}

impl PpmImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Parse("image must have at least one pixel".into()));
        }
        if pixels.len() != width * height * 3 {
            return Err(Error::Shape(format!(
                "{} bytes for a {width}x{height} RGB image",
                pixels.len()
            )));
        }
        Ok(PpmImage {
            width,
            height,
            maxval: 255,
            pixels,
        })
    }
}

struct Tokenizer<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Tokenizer<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Tokenizer { bytes, pos: 0 }
    }

    /// Next whitespace-separated token, skipping `#` comments.
    fn token(&mut self) -> Result<&'a [u8]> {
        loop {
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            if self.pos < self.bytes.len() && self.bytes[self.pos] == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
                continue;
            }
            break;
        }
        if self.pos >= self.bytes.len() {
            return Err(Error::Parse("unexpected end of image header".into()));
        }
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        Ok(&self.bytes[start..self.pos])
    }

    fn number(&mut self) -> Result<usize> {
        let tok = self.token()?;
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse::<usize>().ok())
            .ok_or_else(|| Error::Parse(format!("bad numeric field {:?}", String::from_utf8_lossy(tok))))
    }
}

/// Read a binary (P6) or ASCII (P3) 8-bit PPM file.
pub fn read_ppm(path: &Path) -> Result<PpmImage> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    parse_ppm(&bytes)
}

pub fn parse_ppm(bytes: &[u8]) -> Result<PpmImage> {
    let mut t = Tokenizer::new(bytes);
    let magic = t.token()?;
    let binary = match magic {
        b"P6" => true,
        b"P3" => false,
        other => {
            return Err(Error::Parse(format!(
                "unsupported image format {:?} (only P3/P6 PPM)",
                String::from_utf8_lossy(other)
            )))
        }
    };
    let width = t.number()?;
    let height = t.number()?;
    let maxval = t.number()?;
    if width == 0 || height == 0 {
        return Err(Error::Parse("image must have at least one pixel".into()));
    }
    if maxval == 0 || maxval > 255 {
        return Err(Error::Parse(format!(
            "only 8-bit images supported, maxval {maxval}"
        )));
    }
    let count = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(3))
        .ok_or_else(|| Error::Parse("image dimensions overflow".into()))?;
    // A raster cannot be larger than the file that claims to hold it.
    if count > bytes.len() {
        return Err(Error::Parse("truncated pixel data".into()));
    }
    let pixels = if binary {
        // Exactly one whitespace byte separates the header from the raster.
        let start = t.pos + 1;
        if bytes.len() < start + count {
            return Err(Error::Parse("truncated pixel data".into()));
        }
        bytes[start..start + count].to_vec()
    } else {
        let mut pixels = Vec::with_capacity(count);
        for _ in 0..count {
            let v = t.number()?;
            if v > maxval {
                return Err(Error::Parse(format!(
                    "sample {v} exceeds maxval {maxval}"
                )));
            }
            pixels.push(v as u8);
        }
        pixels
    };
    Ok(PpmImage {
        width,
        height,
        maxval: maxval as u16,
        pixels,
    })
}

/// Write a binary (P6) PPM file.
pub fn write_ppm(path: &Path, img: &PpmImage) -> Result<()> {
    let mut out = format!("P6\n{} {}\n{}\n", img.width, img.height, img.maxval).into_bytes();
    out.extend_from_slice(&img.pixels);
    std::fs::write(path, out)?;
    Ok(())
}

/// One row per pixel in row-major order: (R, G, B, x, y) with channels
/// divided by maxval and coordinates divided by (width-1)/(height-1); a
/// single column or row maps to coordinate 0.
pub fn cloud_from_image(img: &PpmImage) -> Result<PointCloud> {
    let mut data = Vec::with_capacity(img.width * img.height * 5);
    let maxval = img.maxval as f64;
    let xdiv = (img.width.max(2) - 1) as f64;
    let ydiv = (img.height.max(2) - 1) as f64;
    for row in 0..img.height {
        for col in 0..img.width {
            let base = (row * img.width + col) * 3;
            data.push(img.pixels[base] as f64 / maxval);
            data.push(img.pixels[base + 1] as f64 / maxval);
            data.push(img.pixels[base + 2] as f64 / maxval);
            data.push(col as f64 / xdiv);
            data.push(row as f64 / ydiv);
        }
    }
    PointCloud::new(5, data)
}

/// Read an image file straight into its 5D point cloud.
pub fn ingest_image(path: &Path) -> Result<PointCloud> {
    cloud_from_image(&read_ppm(path)?)
}
