//! Shared containers: complex images, k-space arrays and phase-encode masks.
//!
//! Images and k-space arrays are dense row-major `Complex64` buffers. The
//! phase-encode direction is always axis 0 (rows), so a "line" of k-space is
//! one row of the array and a sampling mask holds one flag per row.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense 2-D complex array, row-major. Entries are finite by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexImage {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexImage {
    /// Wraps a row-major buffer, checking dimensions and finiteness.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidInput(format!(
                "image dimensions must be positive, got {rows}x{cols}"
            )));
        }
        let expected = rows
            .checked_mul(cols)
            .ok_or_else(|| Error::InvalidInput("image dimensions overflow".into()))?;
        if data.len() != expected {
            return Err(Error::InvalidInput(format!(
                "buffer length {} does not match {rows}x{cols}",
                data.len()
            )));
        }
        if !data.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite("image data"));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Self::new(rows, cols, vec![Complex64::new(0.0, 0.0); rows * cols])
    }

    /// Builds an image by evaluating `f(row, col)` at every pixel.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self::new(rows, cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [Complex64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.cols + c]
    }

    /// Euclidean norm of the pixel vector.
    pub fn norm(&self) -> f64 {
        image_norm(self)
    }

    pub(crate) fn same_shape(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols
    }
}

/// `sqrt(sum |pixel|^2)` over the whole array.
pub fn image_norm(img: &ComplexImage) -> f64 {
    img.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Which phase-encode lines (rows of k-space) were acquired.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingMask {
    selected: Vec<bool>,
    seed: u64,
}

impl SamplingMask {
    /// Wraps a per-line selection vector. At least one line must be selected.
    /// `seed` records the RNG seed that generated the mask (0 for masks that
    /// were loaded from a file or built by hand).
    pub fn new(selected: Vec<bool>, seed: u64) -> Result<Self> {
        if selected.is_empty() {
            return Err(Error::InvalidInput("mask must have at least one line".into()));
        }
        if !selected.iter().any(|&s| s) {
            return Err(Error::InvalidInput("mask selects no lines".into()));
        }
        Ok(Self { selected, seed })
    }

    /// Mask selecting every line.
    pub fn full(len: usize) -> Result<Self> {
        Self::new(vec![true; len], 0)
    }

    pub fn len(&self) -> usize {
        self.selected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.selected.is_empty()
    }

    pub fn is_selected(&self, line: usize) -> bool {
        self.selected[line]
    }

    pub fn selected(&self) -> &[bool] {
        &self.selected
    }

    pub fn selected_count(&self) -> usize {
        self.selected.iter().filter(|&&s| s).count()
    }

    /// Indices of the selected lines, ascending.
    pub fn selected_lines(&self) -> Vec<usize> {
        (0..self.len()).filter(|&k| self.selected[k]).collect()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Acquired k-space: a dense array whose unsampled rows are identically zero,
/// together with the mask that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct KSpaceData {
    rows: usize,
    cols: usize,
    samples: Vec<Complex64>,
    mask: SamplingMask,
}

impl KSpaceData {
    /// Validates that the buffer matches the mask: unselected rows must be
    /// exactly zero and every entry finite.
    pub fn new(rows: usize, cols: usize, samples: Vec<Complex64>, mask: SamplingMask) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidInput(format!(
                "k-space dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if samples.len() != rows * cols {
            return Err(Error::InvalidInput(format!(
                "buffer length {} does not match {rows}x{cols}",
                samples.len()
            )));
        }
        if mask.len() != rows {
            return Err(Error::ShapeMismatch {
                context: "k-space mask",
                expected: (rows, 1),
                found: (mask.len(), 1),
            });
        }
        if !samples.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite("k-space data"));
        }
        for r in 0..rows {
            // Compare components directly: norm_sqr of a tiny value can
            // underflow to zero and hide nonzero data.
            if !mask.is_selected(r) && samples[r * cols..(r + 1) * cols].iter().any(|z| z.re != 0.0 || z.im != 0.0) {
                return Err(Error::InvalidInput(format!(
                    "unsampled k-space line {r} contains nonzero data"
                )));
            }
        }
        Ok(Self { rows, cols, samples, mask })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.samples[r * self.cols..(r + 1) * self.cols]
    }

    pub fn mask(&self) -> &SamplingMask {
        &self.mask
    }

    /// The underlying array reinterpreted as a plain complex image
    /// (used when serializing k-space to disk).
    pub fn to_image(&self) -> ComplexImage {
        ComplexImage {
            rows: self.rows,
            cols: self.cols,
            data: self.samples.clone(),
        }
    }
}
