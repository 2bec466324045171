//! Acquisition model: s = U F Phi rho.
//!
//! Phi is the diagonal chirp modulation applied per phase-encode line (one
//! factor per row), F the unitary 2-D Fourier transform and U keeps the
//! sampled k-space lines and zeroes the rest. The adjoint runs the chain
//! backwards with each factor conjugated; because every factor is unitary or
//! a diagonal projection, the pair passes an exact dot test.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::fft::fft2_unitary;
use crate::image::{ComplexImage, KSpaceData, SamplingMask};
use crate::modulation::{nyquist_scan_count, sequence_phase_profile, PhaseModulation, SequenceParams};
use crate::sampling::in_centered_band;

/// The fixed triple (modulation, mask, geometry) describing one acquisition.
#[derive(Debug, Clone)]
pub struct EncodingOperator {
    modulation: PhaseModulation,
    mask: SamplingMask,
    rows: usize,
    cols: usize,
}

impl EncodingOperator {
    /// The modulation and mask must agree on the number of phase-encode
    /// lines; that count is the row dimension of every image it acts on.
    pub fn new(modulation: PhaseModulation, mask: SamplingMask, cols: usize) -> Result<Self> {
        if modulation.n_lines() != mask.len() {
            return Err(Error::ShapeMismatch {
                context: "encoding operator",
                expected: (modulation.n_lines(), 1),
                found: (mask.len(), 1),
            });
        }
        if cols == 0 {
            return Err(Error::InvalidInput("encoding operator needs cols >= 1".into()));
        }
        let rows = modulation.n_lines();
        Ok(Self { modulation, mask, rows, cols })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn modulation(&self) -> &PhaseModulation {
        &self.modulation
    }

    pub fn mask(&self) -> &SamplingMask {
        &self.mask
    }
}

/// Multiplies row n of the image by the modulation entry phi[n].
pub fn apply_modulation(img: &ComplexImage, modulation: &PhaseModulation) -> Result<ComplexImage> {
    modulated(img, modulation, false)
}

/// Multiplies row n by conj(phi[n]), undoing [`apply_modulation`].
pub fn remove_modulation(img: &ComplexImage, modulation: &PhaseModulation) -> Result<ComplexImage> {
    modulated(img, modulation, true)
}

fn modulated(img: &ComplexImage, modulation: &PhaseModulation, conjugate: bool) -> Result<ComplexImage> {
    if img.rows() != modulation.n_lines() {
        return Err(Error::ShapeMismatch {
            context: "modulation",
            expected: (modulation.n_lines(), img.cols()),
            found: (img.rows(), img.cols()),
        });
    }
    let mut out = img.clone();
    for r in 0..out.rows() {
        let mut p = modulation.phase(r);
        if conjugate {
            p = p.conj();
        }
        for z in out.row_mut(r) {
            *z *= p;
        }
    }
    Ok(out)
}

/// Forward acquisition: modulate, Fourier transform, keep the sampled lines.
pub fn forward(img: &ComplexImage, op: &EncodingOperator) -> Result<KSpaceData> {
    if img.rows() != op.rows || img.cols() != op.cols {
        return Err(Error::ShapeMismatch {
            context: "forward",
            expected: (op.rows, op.cols),
            found: (img.rows(), img.cols()),
        });
    }
    let mut buf = apply_modulation(img, &op.modulation)?;
    fft2_unitary(buf.data_mut(), op.rows, op.cols, false);
    for r in 0..op.rows {
        if !op.mask.is_selected(r) {
            for z in buf.row_mut(r) {
                *z = Complex64::new(0.0, 0.0);
            }
        }
    }
    let (rows, cols) = (op.rows, op.cols);
    KSpaceData::new(rows, cols, buf.data().to_vec(), op.mask.clone())
}

/// Adjoint of [`forward`]: zero-fill, inverse Fourier transform, conjugate
/// modulation. The k-space mask must be the operator's own mask.
pub fn adjoint(ks: &KSpaceData, op: &EncodingOperator) -> Result<ComplexImage> {
    if ks.rows() != op.rows || ks.cols() != op.cols {
        return Err(Error::ShapeMismatch {
            context: "adjoint",
            expected: (op.rows, op.cols),
            found: (ks.rows(), ks.cols()),
        });
    }
    if ks.mask().selected() != op.mask.selected() {
        return Err(Error::InvalidInput(
            "k-space was sampled with a different mask than the operator's".into(),
        ));
    }
    let mut buf = ks.samples().to_vec();
    fft2_unitary(&mut buf, op.rows, op.cols, true);
    let img = ComplexImage::new(op.rows, op.cols, buf)?;
    remove_modulation(&img, &op.modulation)
}

/// Adds independent complex Gaussian noise (std `sigma` per component) to the
/// sampled entries. Unsampled lines stay exactly zero. Deterministic in
/// `seed`; `sigma` = 0 returns the input unchanged.
pub fn add_noise(ks: &KSpaceData, sigma: f64, seed: u64) -> Result<KSpaceData> {
    if !sigma.is_finite() || sigma < 0.0 {
        return Err(Error::InvalidInput(format!(
            "noise level must be finite and non-negative, got {sigma}"
        )));
    }
    if sigma == 0.0 {
        return Ok(ks.clone());
    }
    let normal = Normal::new(0.0, sigma).expect("finite positive sigma");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = ks.samples().to_vec();
    let cols = ks.cols();
    for r in 0..ks.rows() {
        if !ks.mask().is_selected(r) {
            continue;
        }
        for z in &mut samples[r * cols..(r + 1) * cols] {
            let re: f64 = normal.sample(&mut rng);
            let im: f64 = normal.sample(&mut rng);
            *z += Complex64::new(re, im);
        }
    }
    KSpaceData::new(ks.rows(), ks.cols(), samples, ks.mask().clone())
}

/// Fraction of total k-space energy on the phase-encode lines outside the
/// centered band holding floor(band_fraction * rows) lines. Zero-energy data
/// counts as fully concentrated (returns 0).
pub fn spectrum_spread(ks: &KSpaceData, band_fraction: f64) -> Result<f64> {
    if !(band_fraction > 0.0 && band_fraction < 1.0) {
        return Err(Error::InvalidInput(format!(
            "band_fraction {band_fraction} outside (0, 1)"
        )));
    }
    let band = (band_fraction * ks.rows() as f64).floor() as usize;
    if band == 0 {
        return Err(Error::InvalidInput(format!(
            "band_fraction {band_fraction} covers no lines of {}",
            ks.rows()
        )));
    }
    let mut total = 0.0;
    let mut inside = 0.0;
    for r in 0..ks.rows() {
        let line: f64 = ks.row(r).iter().map(|z| z.norm_sqr()).sum();
        total += line;
        if in_centered_band(r, ks.rows(), band) {
            inside += line;
        }
    }
    if total == 0.0 {
        return Ok(0.0);
    }
    Ok((total - inside) / total)
}

/// Riemann-sum reference for the continuous acquisition integral
///
/// ```text
/// s(m) = integral_0^L rho(y) exp(i phi(y, m)) dy
/// ```
///
/// evaluated with left endpoints on an (oversample * N)-point grid, N being
/// the scan count of `params`. With oversample = 1 the grid coincides with
/// the discrete model's pixel grid, so the sum reproduces the 1-D forward
/// operator exactly (up to the fixed dy * sqrt(N) discretization factor).
/// Larger oversampling approximates the true integral and bounds the
/// discretization error of the operator itself.
pub fn continuous_signal_oracle(
    profile: impl Fn(f64) -> Complex64,
    m_index: i64,
    params: &SequenceParams,
    oversample: usize,
) -> Result<Complex64> {
    if oversample == 0 {
        return Err(Error::InvalidInput("oversample must be at least 1".into()));
    }
    let n = nyquist_scan_count(params)?;
    let total = n
        .checked_mul(oversample)
        .ok_or_else(|| Error::InvalidInput("oversampled grid overflows".into()))?;
    let dy = params.l_y / total as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..total {
        let y = j as f64 * params.l_y / total as f64;
        let phi = sequence_phase_profile(y, m_index, params)?;
        acc += profile(y) * Complex64::from_polar(1.0, phi);
    }
    Ok(acc * dy)
}
