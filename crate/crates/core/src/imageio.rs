//! Reading and writing targets, sources, phase maps, patterns and
//! reconstructions.
//!
//! Grayscale files map linearly onto `[0, 1]` by dividing by the format's
//! maximum sample value. Patterns are stored as binary PBM (`P4`) with bit 1
//! meaning "mirror on"; this inverts the usual PBM reading of 1 as black.
//! Every writer goes through [`write_atomic`], so a failed run never leaves a
//! truncated file behind.

use std::f64::consts::TAU;
use std::fs;
use std::io::Cursor;
use std::path::{Path, PathBuf};

use image::{ImageBuffer, ImageFormat, Luma};

use crate::error::{Error, Result};
use crate::field::{BinaryPattern, PhaseMap, RealImage};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFileFormat {
    /// 8- or 16-bit grayscale, binary `P5` (ASCII `P2` is accepted on read).
    Pgm,
    /// 8- or 16-bit grayscale PNG.
    Png,
    /// 1-bit bitmap, binary `P4` (ASCII `P1` is accepted on read).
    Pbm,
    /// Comma-separated floating-point grid, one image row per line.
    CsvFloat,
}

impl ImageFileFormat {
    /// Guesses the format from the file extension.
    pub fn from_path(path: &Path) -> Result<Self> {
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(|e| e.to_ascii_lowercase());
        match ext.as_deref() {
            Some("pgm") => Ok(Self::Pgm),
            Some("png") => Ok(Self::Png),
            Some("pbm") => Ok(Self::Pbm),
            Some("csv") | Some("txt") => Ok(Self::CsvFloat),
            _ => Err(Error::MalformedHeader {
                path: path.to_path_buf(),
                reason: "unrecognized file extension".into(),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum BitDepth {
    #[default]
    Eight,
    Sixteen,
}

impl BitDepth {
    pub fn max_value(self) -> u32 {
        match self {
            BitDepth::Eight => 255,
            BitDepth::Sixteen => 65535,
        }
    }
}

/// Grayscale samples as stored on disk.
#[derive(Debug, Clone, PartialEq, Eq)]
struct GraySamples {
    width: usize,
    height: usize,
    maxval: u32,
    samples: Vec<u16>,
}

impl GraySamples {
    fn unit_values(&self) -> Vec<f64> {
        let m = self.maxval as f64;
        self.samples.iter().map(|&s| s as f64 / m).collect()
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

/// Writes `bytes` to a sibling temporary file, then renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let name = path.file_name().ok_or_else(|| {
        Error::io(
            path,
            std::io::Error::new(std::io::ErrorKind::InvalidInput, "no file name"),
        )
    })?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::io(path, e)
    })
}

// ---------------------------------------------------------------------------
// netpbm

/// Cursor over a netpbm header: whitespace separated ASCII tokens with `#`
/// comments running to end of line.
struct PnmHeader<'a> {
    bytes: &'a [u8],
    pos: usize,
    path: &'a Path,
}

impl<'a> PnmHeader<'a> {
    fn new(bytes: &'a [u8], path: &'a Path) -> Self {
        Self {
            bytes,
            pos: 0,
            path,
        }
    }

    fn malformed(&self, reason: impl Into<String>) -> Error {
        Error::MalformedHeader {
            path: self.path.to_path_buf(),
            reason: reason.into(),
        }
    }

    fn skip_space_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                c if c.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn token(&mut self) -> Result<&'a [u8]> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len()
            && !self.bytes[self.pos].is_ascii_whitespace()
            && self.bytes[self.pos] != b'#'
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.malformed("unexpected end of header"));
        }
        Ok(&self.bytes[start..self.pos])
    }

    fn number(&mut self, what: &str) -> Result<u32> {
        let tok = self.token()?;
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse::<u32>().ok())
            .ok_or_else(|| self.malformed(format!("invalid {what}")))
    }

    /// Consumes the single whitespace byte that ends a binary header.
    fn binary_payload(&mut self) -> Result<&'a [u8]> {
        match self.bytes.get(self.pos) {
            Some(c) if c.is_ascii_whitespace() => Ok(&self.bytes[self.pos + 1..]),
            _ => Err(self.malformed("missing whitespace before raster")),
        }
    }
}

fn read_dims(header: &mut PnmHeader<'_>) -> Result<(usize, usize)> {
    let w = header.number("width")? as usize;
    let h = header.number("height")? as usize;
    if w == 0 || h == 0 {
        return Err(header.malformed("zero width or height"));
    }
    Ok((w, h))
}

fn malformed_data(path: &Path, reason: impl Into<String>) -> Error {
    Error::MalformedData {
        path: path.to_path_buf(),
        reason: reason.into(),
    }
}

fn decode_pgm(bytes: &[u8], path: &Path) -> Result<GraySamples> {
    let mut header = PnmHeader::new(bytes, path);
    let magic = header.token()?;
    let binary = match magic {
        b"P5" => true,
        b"P2" => false,
        _ => return Err(header.malformed("expected P5 or P2 magic")),
    };
    let (width, height) = read_dims(&mut header)?;
    let maxval = header.number("maxval")?;
    if maxval == 0 || maxval > 65535 {
        return Err(Error::UnsupportedBitDepth {
            path: path.to_path_buf(),
            maxval,
        });
    }
    let n = width * height;
    let samples: Vec<u16> = if binary {
        let payload = header.binary_payload()?;
        let wide = maxval > 255;
        let need = if wide { 2 * n } else { n };
        if payload.len() < need {
            return Err(malformed_data(
                path,
                format!("expected {need} raster bytes, found {}", payload.len()),
            ));
        }
        if wide {
            payload[..need]
                .chunks_exact(2)
                .map(|b| u16::from_be_bytes([b[0], b[1]]))
                .collect()
        } else {
            payload[..need].iter().map(|&b| b as u16).collect()
        }
    } else {
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let v = header
                .number("sample")
                .map_err(|_| malformed_data(path, "truncated or invalid ASCII raster"))?;
            out.push(v as u16);
        }
        out
    };
    if let Some(i) = samples.iter().position(|&s| s as u32 > maxval) {
        return Err(malformed_data(
            path,
            format!("sample {} exceeds maxval {maxval} at index {i}", samples[i]),
        ));
    }
    Ok(GraySamples {
        width,
        height,
        maxval,
        samples,
    })
}

fn encode_pgm(g: &GraySamples) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n{}\n", g.width, g.height, g.maxval).into_bytes();
    if g.maxval > 255 {
        for s in &g.samples {
            out.extend_from_slice(&s.to_be_bytes());
        }
    } else {
        out.extend(g.samples.iter().map(|&s| s as u8));
    }
    out
}

fn decode_pbm(bytes: &[u8], path: &Path) -> Result<BinaryPattern> {
    let mut header = PnmHeader::new(bytes, path);
    let binary = match header.token()? {
        b"P4" => true,
        b"P1" => false,
        _ => return Err(header.malformed("expected P4 or P1 magic")),
    };
    let (width, height) = read_dims(&mut header)?;
    let mut data = Vec::with_capacity(width * height);
    if binary {
        let payload = header.binary_payload()?;
        let stride = width.div_ceil(8);
        if payload.len() < stride * height {
            return Err(malformed_data(
                path,
                format!(
                    "expected {} raster bytes, found {}",
                    stride * height,
                    payload.len()
                ),
            ));
        }
        for row in payload[..stride * height].chunks_exact(stride) {
            for x in 0..width {
                data.push((row[x / 8] >> (7 - x % 8)) & 1);
            }
        }
    } else {
        // P1 digits may run together without separators
        let mut rest = &bytes[header.pos..];
        while data.len() < width * height {
            match rest.first() {
                Some(b'0') => data.push(0),
                Some(b'1') => data.push(1),
                Some(b'#') => {
                    let nl = rest.iter().position(|&c| c == b'\n').unwrap_or(rest.len());
                    rest = &rest[nl..];
                    continue;
                }
                Some(c) if c.is_ascii_whitespace() => {}
                Some(_) => return Err(malformed_data(path, "invalid P1 raster character")),
                None => return Err(malformed_data(path, "truncated P1 raster")),
            }
            rest = &rest[1..];
        }
    }
    BinaryPattern::new(width, height, data)
}

/// `P4` bytes for a pattern; bit 1 = mirror on, rows padded with zero bits.
pub fn encode_pattern(p: &BinaryPattern) -> Vec<u8> {
    let (w, h) = p.dims();
    let stride = w.div_ceil(8);
    let mut out = format!("P4\n{w} {h}\n").into_bytes();
    let header_len = out.len();
    out.resize(header_len + stride * h, 0);
    for (y, row) in p.data().chunks_exact(w).enumerate() {
        for (x, &bit) in row.iter().enumerate() {
            out[header_len + y * stride + x / 8] |= bit << (7 - x % 8);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// PNG

fn decode_png(bytes: &[u8], path: &Path) -> Result<GraySamples> {
    let img = image::load_from_memory_with_format(bytes, ImageFormat::Png)
        .map_err(|e| malformed_data(path, e.to_string()))?;
    let (width, height) = (img.width() as usize, img.height() as usize);
    match img {
        image::DynamicImage::ImageLuma8(buf) => Ok(GraySamples {
            width,
            height,
            maxval: 255,
            samples: buf.into_raw().into_iter().map(u16::from).collect(),
        }),
        image::DynamicImage::ImageLuma16(buf) => Ok(GraySamples {
            width,
            height,
            maxval: 65535,
            samples: buf.into_raw(),
        }),
        other => Err(malformed_data(
            path,
            format!("expected 8/16-bit grayscale, found {:?}", other.color()),
        )),
    }
}

fn encode_png(g: &GraySamples, path: &Path) -> Result<Vec<u8>> {
    let (w, h) = (g.width as u32, g.height as u32);
    let mut out = Cursor::new(Vec::new());
    let result = if g.maxval > 255 {
        ImageBuffer::<Luma<u16>, _>::from_raw(w, h, g.samples.clone())
            .expect("sample count matches dimensions")
            .write_to(&mut out, ImageFormat::Png)
    } else {
        ImageBuffer::<Luma<u8>, _>::from_raw(
            w,
            h,
            g.samples.iter().map(|&s| s as u8).collect::<Vec<u8>>(),
        )
        .expect("sample count matches dimensions")
        .write_to(&mut out, ImageFormat::Png)
    };
    result.map_err(|e| malformed_data(path, e.to_string()))?;
    Ok(out.into_inner())
}

// ---------------------------------------------------------------------------
// CSV grids

fn read_csv_grid(path: &Path) -> Result<(usize, usize, Vec<f64>)> {
    let bytes = read_file(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(bytes.as_slice());
    let mut width = 0;
    let mut height = 0;
    let mut values = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| match e.kind() {
            csv::ErrorKind::UnequalLengths {
                expected_len, len, ..
            } => Error::RaggedCsv {
                path: path.to_path_buf(),
                row: row + 1,
                expected: *expected_len as usize,
                found: *len as usize,
            },
            _ => malformed_data(path, e.to_string()),
        })?;
        if row == 0 {
            width = record.len();
        }
        for (col, field) in record.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| {
                malformed_data(
                    path,
                    format!(
                        "row {}, column {}: not a number: {field:?}",
                        row + 1,
                        col + 1
                    ),
                )
            })?;
            if !v.is_finite() {
                return Err(malformed_data(
                    path,
                    format!("row {}, column {}: non-finite value", row + 1, col + 1),
                ));
            }
            values.push(v);
        }
        height += 1;
    }
    if height == 0 || width == 0 {
        return Err(malformed_data(path, "empty grid"));
    }
    Ok((width, height, values))
}

/// CSV text for a grid; values use the shortest exact decimal form.
pub fn encode_csv_grid(width: usize, values: &[f64]) -> String {
    let mut out = String::new();
    for row in values.chunks(width) {
        let line: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

// ---------------------------------------------------------------------------
// public operations

fn load_gray(path: &Path, format: ImageFileFormat) -> Result<GraySamples> {
    let bytes = read_file(path)?;
    match format {
        ImageFileFormat::Pgm => decode_pgm(&bytes, path),
        ImageFileFormat::Png => decode_png(&bytes, path),
        _ => unreachable!("not a grayscale format"),
    }
}

/// Loads an intensity image with values in `[0, 1]` (CSV values are taken as is).
pub fn load_intensity(path: &Path, format: ImageFileFormat) -> Result<RealImage> {
    match format {
        ImageFileFormat::Pgm | ImageFileFormat::Png => {
            let g = load_gray(path, format)?;
            RealImage::new(g.width, g.height, g.unit_values())
        }
        ImageFileFormat::Pbm => {
            let p = decode_pbm(&read_file(path)?, path)?;
            RealImage::new(
                p.width(),
                p.height(),
                p.data().iter().map(|&b| b as f64).collect(),
            )
        }
        ImageFileFormat::CsvFloat => {
            let (w, h, values) = read_csv_grid(path)?;
            if let Some(i) = values.iter().position(|&v| v < 0.0) {
                return Err(malformed_data(
                    path,
                    format!("negative intensity at index {i}"),
                ));
            }
            RealImage::new(w, h, values)
        }
    }
}

/// Quantizes `img` to the format's sample range and writes it.
///
/// With `normalize`, `[0, max(img)]` maps to full scale (an all-zero image
/// stays zero); otherwise values are clamped to `[0, 1]`. Rounding is half-up.
/// `depth` applies to PGM and PNG; PBM thresholds at one half and CSV stores
/// the (optionally normalized) values exactly.
pub fn save_intensity(
    img: &RealImage,
    path: &Path,
    format: ImageFileFormat,
    normalize: bool,
    depth: BitDepth,
) -> Result<()> {
    let bytes = encode_intensity(img, path, format, normalize, depth)?;
    write_atomic(path, &bytes)
}

fn unit_scaled(img: &RealImage, normalize: bool) -> Vec<f64> {
    let scale = if normalize {
        let max = img.max();
        if max > 0.0 {
            1.0 / max
        } else {
            0.0
        }
    } else {
        1.0
    };
    img.data()
        .iter()
        .map(|&v| (v * scale).clamp(0.0, 1.0))
        .collect()
}

/// Round-half-up quantization of a unit value.
fn quantize(v: f64, maxval: u32) -> u16 {
    (v * maxval as f64 + 0.5).floor().min(maxval as f64) as u16
}

pub fn encode_intensity(
    img: &RealImage,
    path: &Path,
    format: ImageFileFormat,
    normalize: bool,
    depth: BitDepth,
) -> Result<Vec<u8>> {
    let unit = unit_scaled(img, normalize);
    let (w, h) = img.dims();
    match format {
        ImageFileFormat::Pgm | ImageFileFormat::Png => {
            let maxval = depth.max_value();
            let g = GraySamples {
                width: w,
                height: h,
                maxval,
                samples: unit.iter().map(|&v| quantize(v, maxval)).collect(),
            };
            if format == ImageFileFormat::Pgm {
                Ok(encode_pgm(&g))
            } else {
                encode_png(&g, path)
            }
        }
        ImageFileFormat::Pbm => {
            let bits = unit.iter().map(|&v| (v >= 0.5) as u8).collect();
            Ok(encode_pattern(&BinaryPattern::new(w, h, bits)?))
        }
        ImageFileFormat::CsvFloat => {
            let values = if normalize { unit } else { img.data().to_vec() };
            Ok(encode_csv_grid(w, &values).into_bytes())
        }
    }
}

/// Loads a phase map from a CSV grid of radians or from a grayscale image
/// where full scale corresponds to 2π. Values are wrapped to `[0, 2π)`.
pub fn load_phase_map(path: &Path) -> Result<PhaseMap> {
    match ImageFileFormat::from_path(path)? {
        ImageFileFormat::CsvFloat => {
            let (w, h, values) = read_csv_grid(path)?;
            PhaseMap::new(w, h, values)
        }
        format @ (ImageFileFormat::Pgm | ImageFileFormat::Png) => {
            let g = load_gray(path, format)?;
            PhaseMap::new(
                g.width,
                g.height,
                g.unit_values().into_iter().map(|v| v * TAU).collect(),
            )
        }
        ImageFileFormat::Pbm => Err(Error::MalformedHeader {
            path: path.to_path_buf(),
            reason: "phase maps must be CSV or grayscale".into(),
        }),
    }
}

/// Writes a phase map as an exact CSV grid of radians.
pub fn save_phase_map(map: &PhaseMap, path: &Path) -> Result<()> {
    write_atomic(path, encode_csv_grid(map.width(), map.data()).as_bytes())
}

pub fn save_pattern(p: &BinaryPattern, path: &Path) -> Result<()> {
    write_atomic(path, &encode_pattern(p))
}

pub fn load_pattern(path: &Path) -> Result<BinaryPattern> {
    decode_pbm(&read_file(path)?, path)
}

/// Resolves `path` against the current directory without requiring it to exist.
pub fn absolute(path: &Path) -> Result<PathBuf> {
    std::path::absolute(path).map_err(|e| Error::io(path, e))
}
