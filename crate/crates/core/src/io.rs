//! Byte-exact file formats for images, masks and sweep results.
//!
//! Complex images (`.cplx`):
//!
//! ```text
//! CPLX1\n
//! rows=<R>\n
//! cols=<C>\n
//! \n
//! <R * C * 16 bytes: little-endian f64 (re, im) pairs, row-major>
//! ```
//!
//! Sampling masks (`.mask`):
//!
//! ```text
//! MASK1\n
//! 0 1 1 0 ...\n        one 0/1 token per phase-encode line
//! ```
//!
//! Magnitude previews are binary PGM (P5), 8- or 16-bit, the largest
//! magnitude mapped to full scale. Sweep results append to a CSV with the
//! fixed header [`CSV_HEADER`]; all floats are written with Rust's shortest
//! round-trip formatting, so files are reproducible byte for byte apart from
//! the wall-clock `seconds` column.

use num_complex::Complex64;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::image::{ComplexImage, SamplingMask};

const CPLX_MAGIC: &str = "CPLX1";
const MASK_MAGIC: &str = "MASK1";

/// Header of every sweep CSV, one reconstruction per row.
pub const CSV_HEADER: &str = "h,rate,seed,lambda,beta,rlne,iters,seconds";

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn format_err(path: &Path, detail: impl Into<String>) -> Error {
    Error::Format {
        path: path.to_path_buf(),
        detail: detail.into(),
    }
}

fn read_header_line(reader: &mut impl BufRead, path: &Path) -> Result<String> {
    let mut line = String::new();
    let n = reader.read_line(&mut line).map_err(|e| io_err(path, e))?;
    if n == 0 {
        return Err(format_err(path, "unexpected end of file in header"));
    }
    if !line.ends_with('\n') {
        return Err(format_err(path, "header line missing newline"));
    }
    line.pop();
    Ok(line)
}

fn parse_dim(line: &str, key: &str, path: &Path) -> Result<usize> {
    let value = line
        .strip_prefix(key)
        .ok_or_else(|| format_err(path, format!("expected `{key}<number>`, got `{line}`")))?;
    value
        .parse::<usize>()
        .map_err(|_| format_err(path, format!("invalid dimension `{value}` after `{key}`")))
}

pub fn write_complex_image(path: impl AsRef<Path>, img: &ComplexImage) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    write!(w, "{CPLX_MAGIC}\nrows={}\ncols={}\n\n", img.rows(), img.cols())
        .map_err(|e| io_err(path, e))?;
    for z in img.data() {
        w.write_all(&z.re.to_le_bytes()).map_err(|e| io_err(path, e))?;
        w.write_all(&z.im.to_le_bytes()).map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

pub fn read_complex_image(path: impl AsRef<Path>) -> Result<ComplexImage> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    let mut r = BufReader::new(file);
    let magic = read_header_line(&mut r, path)?;
    if magic != CPLX_MAGIC {
        return Err(format_err(path, format!("bad magic `{magic}`, expected `{CPLX_MAGIC}`")));
    }
    let rows = parse_dim(&read_header_line(&mut r, path)?, "rows=", path)?;
    let cols = parse_dim(&read_header_line(&mut r, path)?, "cols=", path)?;
    let blank = read_header_line(&mut r, path)?;
    if !blank.is_empty() {
        return Err(format_err(path, "expected blank line before payload"));
    }
    let count = rows
        .checked_mul(cols)
        .ok_or_else(|| format_err(path, "dimensions overflow"))?;
    let expected = count
        .checked_mul(16)
        .ok_or_else(|| format_err(path, "payload size overflows"))?;
    let mut payload = Vec::new();
    r.read_to_end(&mut payload).map_err(|e| io_err(path, e))?;
    if payload.len() != expected {
        return Err(format_err(
            path,
            format!("payload holds {} bytes, expected {expected}", payload.len()),
        ));
    }
    let data: Vec<Complex64> = payload
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().expect("8-byte chunk"));
            let im = f64::from_le_bytes(c[8..].try_into().expect("8-byte chunk"));
            Complex64::new(re, im)
        })
        .collect();
    ComplexImage::new(rows, cols, data)
}

pub fn write_mask(path: impl AsRef<Path>, mask: &SamplingMask) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    let tokens: Vec<&str> = mask
        .selected()
        .iter()
        .map(|&s| if s { "1" } else { "0" })
        .collect();
    write!(w, "{MASK_MAGIC}\n{}\n", tokens.join(" ")).map_err(|e| io_err(path, e))?;
    w.flush().map_err(|e| io_err(path, e))
}

/// Reads a mask written by [`write_mask`]. The generating seed is not stored
/// in the format, so the result reports seed 0.
pub fn read_mask(path: impl AsRef<Path>) -> Result<SamplingMask> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    let mut r = BufReader::new(file);
    let magic = read_header_line(&mut r, path)?;
    if magic != MASK_MAGIC {
        return Err(format_err(path, format!("bad magic `{magic}`, expected `{MASK_MAGIC}`")));
    }
    let line = read_header_line(&mut r, path)?;
    let mut rest = String::new();
    r.read_to_string(&mut rest).map_err(|e| io_err(path, e))?;
    if !rest.is_empty() {
        return Err(format_err(path, "trailing content after mask line"));
    }
    let mut selected = Vec::new();
    for token in line.split_whitespace() {
        match token {
            "0" => selected.push(false),
            "1" => selected.push(true),
            other => {
                return Err(format_err(path, format!("mask token `{other}` is not 0 or 1")));
            }
        }
    }
    if selected.is_empty() {
        return Err(format_err(path, "mask line holds no tokens"));
    }
    SamplingMask::new(selected, 0)
}

/// Writes the magnitude of `img` as a binary PGM (P5). `bit_depth` is 8 or
/// 16; 16-bit samples are big-endian per the format. The largest magnitude
/// maps to full scale, an all-zero image to all-zero pixels.
pub fn write_pgm_magnitude(path: impl AsRef<Path>, img: &ComplexImage, bit_depth: u8) -> Result<()> {
    let path = path.as_ref();
    let max_value: u32 = match bit_depth {
        8 => 255,
        16 => 65535,
        other => {
            return Err(Error::InvalidInput(format!(
                "PGM bit depth must be 8 or 16, got {other}"
            )));
        }
    };
    let peak = img.data().iter().map(|z| z.norm()).fold(0.0f64, f64::max);
    let scale = if peak > 0.0 { max_value as f64 / peak } else { 0.0 };
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    write!(w, "P5\n{} {}\n{max_value}\n", img.cols(), img.rows()).map_err(|e| io_err(path, e))?;
    for z in img.data() {
        let level = (z.norm() * scale).round().min(max_value as f64) as u32;
        if bit_depth == 8 {
            w.write_all(&[level as u8]).map_err(|e| io_err(path, e))?;
        } else {
            w.write_all(&(level as u16).to_be_bytes()).map_err(|e| io_err(path, e))?;
        }
    }
    w.flush().map_err(|e| io_err(path, e))
}

/// One sweep cell: the parameters of a reconstruction and its outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRecord {
    pub h: f64,
    pub rate: f64,
    pub seed: u64,
    pub lambda: f64,
    pub beta: f64,
    pub rlne: f64,
    pub iters: usize,
    pub seconds: f64,
}

impl SweepRecord {
    fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.h, self.rate, self.seed, self.lambda, self.beta, self.rlne, self.iters, self.seconds
        )
    }
}

/// Appends one record to a sweep CSV, creating the file (with [`CSV_HEADER`])
/// when absent. An existing file must start with the exact header.
pub fn append_csv_row(path: impl AsRef<Path>, record: &SweepRecord) -> Result<()> {
    let path = path.as_ref();
    let exists = path.exists();
    if exists {
        let file = File::open(path).map_err(|e| io_err(path, e))?;
        let mut first = String::new();
        BufReader::new(file)
            .read_line(&mut first)
            .map_err(|e| io_err(path, e))?;
        if first.trim_end_matches('\n') != CSV_HEADER {
            return Err(format_err(
                path,
                format!("existing file header `{}` does not match `{CSV_HEADER}`", first.trim_end()),
            ));
        }
    }
    let mut file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| io_err(path, e))?;
    if !exists {
        writeln!(file, "{CSV_HEADER}").map_err(|e| io_err(path, e))?;
    }
    writeln!(file, "{}", record.csv_row()).map_err(|e| io_err(path, e))
}
