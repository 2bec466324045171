//! Reconstruction quality and sensing-incoherence measures.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::image::{ComplexImage, SamplingMask};
use crate::modulation::PhaseModulation;
use crate::wavelet::WaveletFilter;

/// Relative l2 norm error ||reference - estimate|| / ||reference||.
pub fn rlne(reference: &ComplexImage, estimate: &ComplexImage) -> Result<f64> {
    if reference.rows() != estimate.rows() || reference.cols() != estimate.cols() {
        return Err(Error::ShapeMismatch {
            context: "rlne",
            expected: (reference.rows(), reference.cols()),
            found: (estimate.rows(), estimate.cols()),
        });
    }
    let denom = reference.norm();
    if denom == 0.0 {
        return Err(Error::InvalidInput(
            "rlne needs a nonzero reference image".into(),
        ));
    }
    let num: f64 = reference
        .data()
        .iter()
        .zip(estimate.data())
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    Ok(num / denom)
}

/// A dense n x n sparsifying dictionary, columns being the atoms. Meant for
/// the small sizes where coherence is computed exactly; large-scale code uses
/// the implicit wavelet transforms instead.
#[derive(Debug, Clone)]
pub struct Dictionary {
    n: usize,
    // column j occupies data[j * n .. (j + 1) * n]
    data: Vec<Complex64>,
}

impl Dictionary {
    pub fn from_columns(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("dictionary needs n >= 1".into()));
        }
        if data.len() != n * n {
            return Err(Error::ShapeMismatch {
                context: "dictionary",
                expected: (n, n),
                found: (data.len() / n.max(1), n),
            });
        }
        if !data.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite("dictionary entries"));
        }
        Ok(Self { n, data })
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for j in 0..n {
            data[j * n + j] = Complex64::new(1.0, 0.0);
        }
        Self::from_columns(n, data)
    }

    /// Columns of the inverse decimated wavelet transform (periodic,
    /// orthonormal filters), the orthonormal basis counterpart of the
    /// redundant frame used for reconstruction. Every level halves the
    /// signal, so the length entering each split must be even; that is the
    /// only requirement, because periodization folds the filter without
    /// disturbing the even-lag orthogonality relations.
    pub fn orthonormal_wavelet(n: usize, filter: WaveletFilter, levels: usize) -> Result<Self> {
        if levels == 0 {
            return Err(Error::InvalidInput("wavelet dictionary needs levels >= 1".into()));
        }
        let mut m = n;
        for _ in 0..levels {
            if m % 2 != 0 {
                return Err(Error::InvalidInput(format!(
                    "dictionary size {n} is not divisible by 2^{levels}"
                )));
            }
            m /= 2;
        }
        let h = filter.lowpass();
        let g = filter.highpass();
        // Column j of the analysis matrix W is the transform of e_j; the
        // dictionary is W^T, so its column c collects entry c of every
        // transformed basis vector.
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        let mut basis = vec![0.0f64; n];
        for j in 0..n {
            basis[j] = 1.0;
            let w = dwt_analysis(&basis, h, &g, levels);
            basis[j] = 0.0;
            for (c, &value) in w.iter().enumerate() {
                data[c * n + j] = Complex64::new(value, 0.0);
            }
        }
        Self::from_columns(n, data)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn column(&self, j: usize) -> &[Complex64] {
        &self.data[j * self.n..(j + 1) * self.n]
    }
}

/// Periodic decimated analysis cascade; output layout
/// [approx_L | detail_L | ... | detail_1].
fn dwt_analysis(x: &[f64], h: &[f64], g: &[f64], levels: usize) -> Vec<f64> {
    let mut out = x.to_vec();
    let mut m = x.len();
    for _ in 0..levels {
        let half = m / 2;
        let mut split = vec![0.0; m];
        for k in 0..half {
            let mut lo = 0.0;
            let mut hi = 0.0;
            for (t, (&hc, &gc)) in h.iter().zip(g).enumerate() {
                let v = out[(2 * k + t) % m];
                lo += hc * v;
                hi += gc * v;
            }
            split[k] = lo;
            split[half + k] = hi;
        }
        out[..m].copy_from_slice(&split);
        m = half;
    }
    out
}

/// Largest dense problem size accepted by [`mutual_coherence`].
pub const MAX_COHERENCE_N: usize = 64;

/// Mutual coherence sqrt(n) * max |<a_k, d_j>| between the selected rows a_k
/// of the 1-D sensing matrix U F Phi and the dictionary atoms d_j. Lies in
/// [1, sqrt(n)] whenever the dictionary is orthonormal: 1 is maximally
/// incoherent, sqrt(n) means some atom is measured by a single row.
pub fn mutual_coherence(
    mask: &SamplingMask,
    modulation: &PhaseModulation,
    dict: &Dictionary,
) -> Result<f64> {
    let n = dict.n();
    if mask.len() != n || modulation.n_lines() != n {
        return Err(Error::ShapeMismatch {
            context: "mutual coherence",
            expected: (n, n),
            found: (mask.len(), modulation.n_lines()),
        });
    }
    if n > MAX_COHERENCE_N {
        return Err(Error::InvalidInput(format!(
            "coherence is evaluated densely; n = {n} exceeds the limit of {MAX_COHERENCE_N}"
        )));
    }
    for j in 0..n {
        let norm: f64 = dict.column(j).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-8 {
            return Err(Error::InvalidInput(format!(
                "dictionary atom {j} has norm {norm}, expected 1"
            )));
        }
    }
    let scale = 1.0 / (n as f64).sqrt();
    let mut max_inner = 0.0f64;
    for k in mask.selected_lines() {
        for j in 0..n {
            // <a_k, d_j> with a_k[t] = scale * exp(-2 pi i k t / n) * phi_t
            let mut acc = Complex64::new(0.0, 0.0);
            for (t, d) in dict.column(j).iter().enumerate() {
                let a = Complex64::from_polar(scale, -2.0 * PI * (k * t) as f64 / n as f64)
                    * modulation.phase(t);
                acc += a.conj() * d;
            }
            max_inner = max_inner.max(acc.norm());
        }
    }
    Ok((n as f64).sqrt() * max_inner)
}
