//! Synthetic head phantom built from ellipses.
//!
//! The default spec is the familiar ten-ellipse head phantom, stated here in
//! fractions of the image side so any size renders the same object. Pixel
//! (r, c) of an N x N image maps to coordinates y = (r + 0.5)/N,
//! x = (c + 0.5)/N in [0, 1]. Amplitudes of overlapping ellipses add and the
//! sum is clipped to [0, 1], so the brightest tissue (the skull rim) sits at
//! exactly 1.0. An optional smooth quadratic phase ramp makes the phantom
//! genuinely complex, which is what a real coil sees.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::image::ComplexImage;

/// One ellipse of a phantom. Center and semi-axes are fractions of the image
/// side, the angle is radians (rotation in pixel coordinates), the amplitude
/// is added to every pixel inside the ellipse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ellipse {
    pub center_y: f64,
    pub center_x: f64,
    pub axis_y: f64,
    pub axis_x: f64,
    pub angle: f64,
    pub amplitude: f64,
}

/// Description of a phantom: image side, ellipse list and the peak of the
/// quadratic background phase in radians (0 disables the phase ramp).
#[derive(Debug, Clone, PartialEq)]
pub struct PhantomSpec {
    pub size: usize,
    pub ellipses: Vec<Ellipse>,
    pub phase_amplitude: f64,
}

impl PhantomSpec {
    /// The standard ten-ellipse head phantom with a mild 0.3 rad background
    /// phase. This is the object used throughout the acceptance runs.
    pub fn head(size: usize) -> Self {
        let e = |center_y, center_x, axis_y, axis_x, angle, amplitude| Ellipse {
            center_y,
            center_x,
            axis_y,
            axis_x,
            angle,
            amplitude,
        };
        PhantomSpec {
            size,
            ellipses: vec![
                e(0.5, 0.5, 0.46, 0.345, 0.0, 1.0),
                e(0.5092, 0.5, 0.437, 0.3312, 0.0, -0.8),
                e(0.5, 0.61, 0.155, 0.055, 0.3141592653589793, -0.2),
                e(0.5, 0.39, 0.205, 0.08, -0.3141592653589793, -0.2),
                e(0.325, 0.5, 0.125, 0.105, 0.0, 0.1),
                e(0.45, 0.5, 0.023, 0.023, 0.0, 0.1),
                e(0.55, 0.5, 0.023, 0.023, 0.0, 0.1),
                e(0.8025, 0.46, 0.0115, 0.023, 0.0, 0.1),
                e(0.803, 0.5, 0.0115, 0.0115, 0.0, 0.1),
                e(0.8025, 0.53, 0.023, 0.0115, 0.0, 0.1),
            ],
            phase_amplitude: 0.3,
        }
    }
}

/// Renders a phantom spec to a complex image. Deterministic: same spec, same
/// pixels, no RNG anywhere.
pub fn generate_phantom(spec: &PhantomSpec) -> Result<ComplexImage> {
    if spec.size < 8 {
        return Err(Error::InvalidInput(format!(
            "phantom size must be at least 8, got {}",
            spec.size
        )));
    }
    if spec.ellipses.is_empty() {
        return Err(Error::InvalidInput("phantom needs at least one ellipse".into()));
    }
    if !spec.phase_amplitude.is_finite() {
        return Err(Error::NonFinite("phantom phase amplitude"));
    }

    let n = spec.size;
    let inv_n = 1.0 / n as f64;
    // Precompute the rotation of each ellipse once.
    let rotations: Vec<(f64, f64)> = spec.ellipses.iter().map(|e| (e.angle.cos(), e.angle.sin())).collect();

    ComplexImage::from_fn(n, n, |r, c| {
        let y = (r as f64 + 0.5) * inv_n;
        let x = (c as f64 + 0.5) * inv_n;
        let mut value = 0.0;
        for (e, &(cos_a, sin_a)) in spec.ellipses.iter().zip(&rotations) {
            let dy = y - e.center_y;
            let dx = x - e.center_x;
            let u = cos_a * dx + sin_a * dy;
            let w = -sin_a * dx + cos_a * dy;
            let d = (u / e.axis_x).powi(2) + (w / e.axis_y).powi(2);
            if d <= 1.0 {
                value += e.amplitude;
            }
        }
        let magnitude = value.clamp(0.0, 1.0);
        if spec.phase_amplitude == 0.0 {
            Complex64::new(magnitude, 0.0)
        } else {
            let yc = 2.0 * y - 1.0;
            let xc = 2.0 * x - 1.0;
            let phase = spec.phase_amplitude * 0.5 * (yc * yc + xc * xc);
            Complex64::from_polar(magnitude, phase)
        }
    })
}
