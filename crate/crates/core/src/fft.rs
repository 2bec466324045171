//! Unitary 2-D FFT on row-major buffers, phase-encode axis first.
//!
//! Forward and inverse are exact adjoints of each other: both use the same
//! 1/sqrt(rows*cols) scaling, so F^H F = F F^H = I up to rounding.

use num_complex::Complex64;
use rustfft::FftPlanner;

pub(crate) fn fft2_unitary(data: &mut [Complex64], rows: usize, cols: usize, inverse: bool) {
    debug_assert_eq!(data.len(), rows * cols);
    let mut planner = FftPlanner::new();
    let row_fft = if inverse {
        planner.plan_fft_inverse(cols)
    } else {
        planner.plan_fft_forward(cols)
    };
    let col_fft = if inverse {
        planner.plan_fft_inverse(rows)
    } else {
        planner.plan_fft_forward(rows)
    };

    // Transform along axis 1 (within each row).
    if cols > 1 {
        for r in 0..rows {
            row_fft.process(&mut data[r * cols..(r + 1) * cols]);
        }
    }

    // Transform along axis 0 (down each column) via a gather/scatter buffer.
    if rows > 1 {
        let mut column = vec![Complex64::new(0.0, 0.0); rows];
        for c in 0..cols {
            for r in 0..rows {
                column[r] = data[r * cols + c];
            }
            col_fft.process(&mut column);
            for r in 0..rows {
                data[r * cols + c] = column[r];
            }
        }
    }

    let scale = 1.0 / ((rows * cols) as f64).sqrt();
    for z in data.iter_mut() {
        *z *= scale;
    }
}
