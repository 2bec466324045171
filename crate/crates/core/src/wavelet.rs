//! Undecimated (a trous) 2-D wavelet frame.
//!
//! Classic orthonormal filter pairs applied without subsampling, so every
//! band has the size of the input and the transform commutes with circular
//! shifts. Each filter application carries an extra 1/sqrt(2), which makes
//! the analysis operator Psi^H a tight frame with constant 1:
//!
//! * ||analyze(x)|| = ||x||                      (Parseval)
//! * synthesize(analyze(x)) = x                  (Psi Psi^H = I)
//! * synthesize is the exact adjoint of analyze
//!
//! The reverse composition analyze(synthesize(c)) is only an orthogonal
//! projection; the frame is redundant, which is the point: sparsity of the
//! coefficients does not depend on where an edge happens to fall.
//!
//! Boundaries are periodic. Filters are the standard orthonormal Daubechies
//! pairs; "Db4" is the 4-tap filter with two vanishing moments.

use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::image::ComplexImage;

/// Orthonormal filter pair used by the frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveletFilter {
    /// 2-tap Haar pair.
    Haar,
    /// 4-tap Daubechies pair (two vanishing moments).
    Db4,
    /// 8-tap Daubechies pair (four vanishing moments).
    Db8,
}

impl WaveletFilter {
    /// Orthonormal lowpass taps: sum h = sqrt(2), sum h^2 = 1.
    pub fn lowpass(&self) -> &'static [f64] {
        match self {
            WaveletFilter::Haar => &[FRAC_1_SQRT_2, FRAC_1_SQRT_2],
            WaveletFilter::Db4 => &[
                0.48296291314453414,
                0.8365163037378079,
                0.22414386804201338,
                -0.12940952255126038,
            ],
            WaveletFilter::Db8 => &[
                0.23037781330885523,
                0.7148465705525415,
                0.6308807679295904,
                -0.02798376941698385,
                -0.18703481171888114,
                0.030841381835986965,
                0.032883011666982945,
                -0.010597401784997278,
            ],
        }
    }

    /// Quadrature mirror
    /// highpass: g[k] = (-1)^k h[L-1-k], so sum g = 0.
    pub fn highpass(&self) -> Vec<f64> {
        let h = self.lowpass();
        let l = h.len();
        (0..l)
            .map(|k| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                sign * h[l - 1 - k]
            })
            .collect()
    }

    fn scaled_pair(&self) -> (Vec<f64>, Vec<f64>) {
        let lo = self.lowpass().iter().map(|t| t * FRAC_1_SQRT_2).collect();
        let hi = self.highpass().iter().map(|t| t * FRAC_1_SQRT_2).collect();
        (lo, hi)
    }
}

/// Frame configuration: filter pair and decomposition depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WaveletConfig {
    pub filter: WaveletFilter,
    pub levels: usize,
}

impl Default for WaveletConfig {
    fn default() -> Self {
        WaveletConfig {
            filter: WaveletFilter::Db4,
            levels: 3,
        }
    }
}

impl WaveletConfig {
    /// Depth must satisfy 2^levels <= min(rows, cols).
    pub fn validate_for(&self, rows: usize, cols: usize) -> Result<()> {
        if self.levels == 0 {
            return Err(Error::InvalidInput("wavelet depth must be at least 1".into()));
        }
        let side = rows.min(cols);
        if self.levels >= usize::BITS as usize || (1usize << self.levels) > side {
            return Err(Error::InvalidInput(format!(
                "wavelet depth {} too deep for a {rows}x{cols} image",
                self.levels
            )));
        }
        Ok(())
    }
}

/// Coefficients of a depth-L decomposition of a rows x cols image:
/// 3L + 1 bands of full image size, stored flat as
/// [level-1 LH, HL, HH, level-2 LH, HL, HH, ..., approximation].
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletCoefficients {
    rows: usize,
    cols: usize,
    levels: usize,
    filter: WaveletFilter,
    data: Vec<Complex64>,
}

impl WaveletCoefficients {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn filter(&self) -> WaveletFilter {
        self.filter
    }

    pub fn band_count(&self) -> usize {
        3 * self.levels + 1
    }

    fn block_len(&self) -> usize {
        self.rows * self.cols
    }

    /// One band as a rows x cols row-major slice; bands are indexed in
    /// storage order, the approximation band last.
    pub fn band(&self, index: usize) -> &[Complex64] {
        let len = self.block_len();
        &self.data[index * len..(index + 1) * len]
    }

    /// The coarsest approximation band.
    pub fn approx(&self) -> &[Complex64] {
        self.band(3 * self.levels)
    }

    /// Detail bands (LH, HL, HH) of a zero-based level.
    pub fn details(&self, level: usize) -> (&[Complex64], &[Complex64], &[Complex64]) {
        (self.band(3 * level), self.band(3 * level + 1), self.band(3 * level + 2))
    }

    /// All coefficients as one flat vector.
    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn zeros_like(&self) -> Self {
        WaveletCoefficients {
            rows: self.rows,
            cols: self.cols,
            levels: self.levels,
            filter: self.filter,
            data: vec![Complex64::new(0.0, 0.0); self.data.len()],
        }
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn l1_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).sum()
    }

    /// self += factor * other. Panics on mismatched layouts; that is a
    /// programming error, not a data error.
    pub fn add_scaled(&mut self, other: &Self, factor: f64) {
        assert_eq!(
            (self.rows, self.cols, self.levels, self.filter),
            (other.rows, other.cols, other.levels, other.filter),
            "coefficient layouts differ"
        );
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * factor;
        }
    }
}

/// Periodic correlation along axis 0 with taps spaced `step` apart.
/// With `adjoint` the index offsets are negated, which is exactly the
/// transpose of the forward pass for real taps.
fn filter_axis0(
    src: &[Complex64],
    rows: usize,
    cols: usize,
    taps: &[f64],
    step: usize,
    adjoint: bool,
) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); rows * cols];
    for (k, &t) in taps.iter().enumerate() {
        let mut off = (k * step) % rows;
        if adjoint && off != 0 {
            off = rows - off;
        }
        for i in 0..rows {
            let mut s = i + off;
            if s >= rows {
                s -= rows;
            }
            let src_row = &src[s * cols..(s + 1) * cols];
            let out_row = &mut out[i * cols..(i + 1) * cols];
            for c in 0..cols {
                out_row[c] += src_row[c] * t;
            }
        }
    }
    out
}

/// Periodic correlation along axis 1; see [`filter_axis0`].
fn filter_axis1(
    src: &[Complex64],
    rows: usize,
    cols: usize,
    taps: &[f64],
    step: usize,
    adjoint: bool,
) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); rows * cols];
    for (k, &t) in taps.iter().enumerate() {
        let mut off = (k * step) % cols;
        if adjoint && off != 0 {
            off = cols - off;
        }
        let split = cols - off;
        for r in 0..rows {
            let src_row = &src[r * cols..(r + 1) * cols];
            let out_row = &mut out[r * cols..(r + 1) * cols];
            for j in 0..split {
                out_row[j] += src_row[j + off] * t;
            }
            for j in split..cols {
                out_row[j] += src_row[j + off - cols] * t;
            }
        }
    }
    out
}

fn accumulate(mut a: Vec<Complex64>, b: Vec<Complex64>) -> Vec<Complex64> {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
    a
}

/// Psi^H: image to coefficients.
pub fn analyze(img: &ComplexImage, config: &WaveletConfig) -> Result<WaveletCoefficients> {
    config.validate_for(img.rows(), img.cols())?;
    let (rows, cols) = (img.rows(), img.cols());
    let (lo, hi) = config.filter.scaled_pair();
    let mut data = Vec::with_capacity((3 * config.levels + 1) * rows * cols);
    let mut approx = img.data().to_vec();
    for level in 0..config.levels {
        let step = 1usize << level;
        let lo_rows = filter_axis0(&approx, rows, cols, &lo, step, false);
        let hi_rows = filter_axis0(&approx, rows, cols, &hi, step, false);
        let ll = filter_axis1(&lo_rows, rows, cols, &lo, step, false);
        data.extend(filter_axis1(&lo_rows, rows, cols, &hi, step, false));
        data.extend(filter_axis1(&hi_rows, rows, cols, &lo, step, false));
        data.extend(filter_axis1(&hi_rows, rows, cols, &hi, step, false));
        approx = ll;
    }
    data.extend(approx);
    Ok(WaveletCoefficients {
        rows,
        cols,
        levels: config.levels,
        filter: config.filter,
        data,
    })
}

/// Psi: coefficients to image, the adjoint of [`analyze`]. Because the frame
/// is tight, this is also a left inverse: synthesize(analyze(x)) = x.
pub fn synthesize(coeffs: &WaveletCoefficients, config: &WaveletConfig) -> Result<ComplexImage> {
    if coeffs.levels != config.levels || coeffs.filter != config.filter {
        return Err(Error::InvalidInput(format!(
            "coefficients were produced with depth {} / {:?}, config asks for {} / {:?}",
            coeffs.levels, coeffs.filter, config.levels, config.filter
        )));
    }
    let (rows, cols) = (coeffs.rows, coeffs.cols);
    config.validate_for(rows, cols)?;
    let (lo, hi) = config.filter.scaled_pair();
    let mut approx = coeffs.approx().to_vec();
    for level in (0..config.levels).rev() {
        let step = 1usize << level;
        let (lh, hl, hh) = coeffs.details(level);
        let lo_rows = accumulate(
            filter_axis1(&approx, rows, cols, &lo, step, true),
            filter_axis1(lh, rows, cols, &hi, step, true),
        );
        let hi_rows = accumulate(
            filter_axis1(hl, rows, cols, &lo, step, true),
            filter_axis1(hh, rows, cols, &hi, step, true),
        );
        approx = accumulate(
            filter_axis0(&lo_rows, rows, cols, &lo, step, true),
            filter_axis0(&hi_rows, rows, cols, &hi, step, true),
        );
    }
    ComplexImage::new(rows, cols, approx)
}
