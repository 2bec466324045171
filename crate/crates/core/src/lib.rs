//! Spread-spectrum MRI simulation and compressed-sensing reconstruction.
//!
//! The acquisition chain modulates each phase-encode line of a complex image
//! with a quadratic (chirp) phase, applies the unitary 2-D Fourier transform
//! and keeps a random subset of k-space lines. The chirp spreads every
//! image feature across the phase-encode spectrum, so the kept lines carry
//! information about all of them; an alternating-direction solver with a
//! redundant wavelet prior then recovers the image from the undersampled
//! data.
//!
//! The crate is organized around that pipeline:
//!
//! * [`phantom`]: analytic test images,
//! * [`modulation`]: the chirp phase profile and its pulse-sequence origins,
//! * [`sampling`]: randomized phase-encode line masks,
//! * [`encoding`]: the forward/adjoint acquisition operator, noise and
//!   spectrum diagnostics,
//! * [`wavelet`]: the undecimated wavelet frame used as the sparsity prior,
//! * [`solver`]: the alternating-direction reconstruction,
//! * [`metrics`]: reconstruction error and sensing-coherence measures,
//! * [`io`]: byte-exact file formats for images, masks and sweep results.

pub mod encoding;
pub mod error;
mod fft;
pub mod image;
pub mod io;
pub mod metrics;
pub mod modulation;
pub mod phantom;
pub mod sampling;
pub mod solver;
pub mod wavelet;

pub use encoding::{
    add_noise, adjoint, apply_modulation, continuous_signal_oracle, forward, remove_modulation,
    spectrum_spread, EncodingOperator,
};
pub use error::{Error, Result};
pub use image::{image_norm, ComplexImage, KSpaceData, SamplingMask};
pub use io::{
    append_csv_row, read_complex_image, read_mask, write_complex_image, write_mask,
    write_pgm_magnitude, SweepRecord, CSV_HEADER,
};
pub use metrics::{mutual_coherence, rlne, Dictionary, MAX_COHERENCE_N};
pub use modulation::{
    build_modulation, chirp_bandwidth, chirp_frequency, modulation_intensity, nyquist_scan_count,
    sequence_phase_profile, PhaseModulation, SequenceParams,
};
pub use phantom::{generate_phantom, Ellipse, PhantomSpec};
pub use sampling::{mask_rate, random_line_mask};
pub use solver::{
    objective_value, reconstruct, rho_update, rho_update_from_prior, soft_threshold,
    IterationRecord, ReconResult, SolverConfig,
};
pub use wavelet::{analyze, synthesize, WaveletCoefficients, WaveletConfig, WaveletFilter};
