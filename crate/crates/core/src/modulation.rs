//! Quadratic phase modulation produced by a chirped RF pulse.
//!
//! A linear frequency sweep omega(t) = O_0 + R t played together with the
//! encoding gradient leaves each phase-encode position with a quadratic phase.
//! On the discrete grid of N lines the modulation is diagonal with entries
//!
//! ```text
//! phi[n] = exp(-i * (c/(2 N^2) * n^2 + c/8 + pi/2)),    n = 0..N-1
//! ```
//!
//! where c = h * N and h is the modulation intensity, the single knob that
//! controls how far the chirp spreads image energy across k-space. h = 0
//! collapses to the constant -i, i.e. a plain unmodulated acquisition. The
//! physical helpers relate h to sequence quantities (sweep bandwidth, encoding
//! time, field of view) but the simulator itself only ever needs h.

use num_complex::Complex64;
use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

/// Chirp pulse and gradient timing for one spread-spectrum acquisition.
/// All quantities are in self-consistent units; nothing below assumes SI.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SequenceParams {
    /// Gyromagnetic ratio.
    pub gamma: f64,
    /// Encoding gradient amplitude.
    pub g_enco: f64,
    /// Encoding (chirp) duration.
    pub t_enco: f64,
    /// Field of view along the phase-encode axis.
    pub l_y: f64,
    /// Decoding gradient increment per scan.
    pub delta_g_deco: f64,
    /// Decoding gradient duration per scan.
    pub t_deco: f64,
    /// Chirp start frequency.
    pub o_0: f64,
    /// Chirp sweep rate.
    pub chirp_rate: f64,
}

impl SequenceParams {
    /// Builds parameters with the symmetric sweep convention: the chirp starts
    /// at -gamma*G*L/2 and ends at +gamma*G*L/2, so the sweep exactly covers
    /// the frequency band of the field of view.
    pub fn symmetric_sweep(
        gamma: f64,
        g_enco: f64,
        t_enco: f64,
        l_y: f64,
        delta_g_deco: f64,
        t_deco: f64,
    ) -> Result<Self> {
        let bandwidth = gamma * g_enco * l_y;
        let params = SequenceParams {
            gamma,
            g_enco,
            t_enco,
            l_y,
            delta_g_deco,
            t_deco,
            o_0: -0.5 * bandwidth,
            chirp_rate: bandwidth / t_enco,
        };
        params.validate()?;
        Ok(params)
    }

    /// Checks that every physical quantity is positive and finite. The chirp
    /// start and rate may have either sign.
    pub fn validate(&self) -> Result<()> {
        let positives = [
            ("gamma", self.gamma),
            ("g_enco", self.g_enco),
            ("t_enco", self.t_enco),
            ("l_y", self.l_y),
            ("delta_g_deco", self.delta_g_deco),
            ("t_deco", self.t_deco),
        ];
        for (name, value) in positives {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::InvalidInput(format!(
                    "sequence parameter {name} must be positive and finite, got {value}"
                )));
            }
        }
        if !self.o_0.is_finite() || !self.chirp_rate.is_finite() {
            return Err(Error::NonFinite("chirp start or rate"));
        }
        Ok(())
    }
}

/// Diagonal unit-modulus modulation over N phase-encode lines.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseModulation {
    n_lines: usize,
    h: f64,
    c: f64,
    phases: Vec<Complex64>,
}

impl PhaseModulation {
    pub fn n_lines(&self) -> usize {
        self.n_lines
    }

    /// Modulation intensity h.
    pub fn h(&self) -> f64 {
        self.h
    }

    /// Total chirp phase budget c = h * N.
    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn phases(&self) -> &[Complex64] {
        &self.phases
    }

    pub fn phase(&self, n: usize) -> Complex64 {
        self.phases[n]
    }
}

/// Modulation intensity h = delta_o * t_enco / n_lines.
pub fn modulation_intensity(delta_o: f64, t_enco: f64, n_lines: usize) -> Result<f64> {
    if n_lines == 0 {
        return Err(Error::InvalidInput("modulation intensity needs n_lines >= 1".into()));
    }
    if !t_enco.is_finite() || t_enco <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "encoding time must be positive, got {t_enco}"
        )));
    }
    if !delta_o.is_finite() {
        return Err(Error::NonFinite("sweep bandwidth"));
    }
    Ok(delta_o * t_enco / n_lines as f64)
}

/// Builds the diagonal modulation for intensity `h` over `n_lines` lines.
pub fn build_modulation(h: f64, n_lines: usize) -> Result<PhaseModulation> {
    if n_lines == 0 {
        return Err(Error::InvalidInput("modulation needs at least one line".into()));
    }
    if !h.is_finite() || h < 0.0 {
        return Err(Error::InvalidInput(format!(
            "modulation intensity must be finite and non-negative, got {h}"
        )));
    }
    let n = n_lines as f64;
    let c = h * n;
    let quad = c / (2.0 * n * n);
    let offset = c / 8.0 + FRAC_PI_2;
    let phases = (0..n_lines)
        .map(|i| {
            let i = i as f64;
            Complex64::from_polar(1.0, -(quad * i * i + offset))
        })
        .collect();
    Ok(PhaseModulation { n_lines, h, c, phases })
}

/// Instantaneous chirp frequency O_0 + R t inside the encoding window.
pub fn chirp_frequency(t: f64, params: &SequenceParams) -> Result<f64> {
    params.validate()?;
    if !(0.0..=params.t_enco).contains(&t) {
        return Err(Error::InvalidInput(format!(
            "time {t} outside encoding window [0, {}]",
            params.t_enco
        )));
    }
    Ok(params.o_0 + params.chirp_rate * t)
}

/// Total frequency band swept by the chirp over the field of view,
/// delta_o = gamma * g_enco * l_y.
pub fn chirp_bandwidth(params: &SequenceParams) -> f64 {
    params.gamma * params.g_enco * params.l_y
}

/// Number of scans needed to cover k-space at the decoding increment,
/// n = g_enco * t_enco / (delta_g_deco * t_deco). The ratio must be an
/// integer; anything further than 1e-9 from one is a timing inconsistency.
pub fn nyquist_scan_count(params: &SequenceParams) -> Result<usize> {
    params.validate()?;
    let ratio = params.g_enco * params.t_enco / (params.delta_g_deco * params.t_deco);
    let rounded = ratio.round();
    if (ratio - rounded).abs() > 1e-9 {
        return Err(Error::InvalidInput(format!(
            "scan count {ratio} is not an integer; check gradient timing"
        )));
    }
    if rounded < 1.0 {
        return Err(Error::InvalidInput(format!("scan count {rounded} must be at least 1")));
    }
    Ok(rounded as usize)
}

/// Accumulated phase at position y for scan index m in [-N/2, N/2):
///
/// ```text
/// phi(y, m) = -(dO T)/(2 L^2) y^2 + (m/N)(dO T / L) y - (dO T)/8 - pi/2
/// ```
///
/// with dO the chirp bandwidth and T the encoding time. Sampled at
/// y_n = n L / N with m = 0 this reproduces the arguments of
/// [`build_modulation`] up to the scan-dependent linear term.
pub fn sequence_phase_profile(y: f64, m_index: i64, params: &SequenceParams) -> Result<f64> {
    let n = nyquist_scan_count(params)? as i64;
    if !(0.0..=params.l_y).contains(&y) {
        return Err(Error::InvalidInput(format!(
            "position {y} outside field of view [0, {}]",
            params.l_y
        )));
    }
    if m_index < -(n / 2) || m_index >= n - n / 2 {
        return Err(Error::InvalidInput(format!(
            "scan index {m_index} outside [-{}, {})",
            n / 2,
            n - n / 2
        )));
    }
    let c = chirp_bandwidth(params) * params.t_enco;
    let l = params.l_y;
    let quad = -c / (2.0 * l * l) * y * y;
    let lin = (m_index as f64 / n as f64) * (c / l) * y;
    Ok(quad + lin - c / 8.0 - FRAC_PI_2)
}
