//! Artefact removal by complex averaging of the diagonal stack.
//!
//! Each row is lifted to its analytic signal with a one-sided-spectrum
//! Hilbert transform, the rows are summed with Kaiser weights (beta = 6
//! by default) and normalized by the weight sum, and the averaged complex
//! spectrum is Fourier transformed into an A-scan. Artefact fringes carry
//! a phase rotating with the row's central frequency, so the weighted sum
//! cancels them while structural fringes add coherently.
//!
//! Also houses the two design-rule calculators: the minimum layer
//! thickness for complete suppression and the diagonal count needed to
//! match the full-spectrum transform.

use crate::fft::{fft_in_place, ifft_in_place};
use crate::stack::DiagonalStack;
use crate::{Error, Result};
use num_complex::Complex64;

/// Which pipeline produced an A-scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgorithmId {
    /// FFT of a single diagonal (no artefact removal).
    SingleDiagonal,
    /// Kaiser-weighted complex averaging of the diagonal stack.
    ComplexAverage,
    /// Diagonal of the 2D transform of the full joint spectrum.
    Fft2JointDiagonal,
    /// Middle row of the 2D transform of the diagonal stack.
    Fft2StackMiddleRow,
}

impl AlgorithmId {
    pub fn as_str(&self) -> &'static str {
        match self {
            AlgorithmId::SingleDiagonal => "single-diagonal",
            AlgorithmId::ComplexAverage => "complex-average",
            AlgorithmId::Fft2JointDiagonal => "fft2-joint-diagonal",
            AlgorithmId::Fft2StackMiddleRow => "fft2-stack-middle-row",
        }
    }
}

/// Provenance attached to an A-scan.
#[derive(Debug, Clone)]
pub struct AScanMeta {
    pub algorithm: AlgorithmId,
    /// Diagonal count used, where applicable.
    pub k_used: Option<usize>,
    /// Central-wavelength span covered by the diagonals (m), where
    /// applicable.
    pub lambda0_span: Option<f64>,
}

/// One-dimensional depth profile: optical-length axis starting at zero
/// and nonnegative amplitudes.
#[derive(Debug, Clone)]
pub struct AScan {
    pub depth_axis: Vec<f64>,
    pub amplitude: Vec<f64>,
    pub meta: AScanMeta,
}

impl AScan {
    /// Depth pixel (m).
    pub fn pixel(&self) -> f64 {
        if self.depth_axis.len() > 1 {
            self.depth_axis[1] - self.depth_axis[0]
        } else {
            0.0
        }
    }

    /// Largest amplitude.
    pub fn max_amplitude(&self) -> f64 {
        self.amplitude.iter().fold(0.0f64, |m, &v| m.max(v))
    }
}

/// Zeroth-order modified Bessel function of the first kind, by its power
/// series; converges quickly for the beta values used in Kaiser windows.
pub fn bessel_i0(x: f64) -> f64 {
    let half = x / 2.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..64 {
        term *= (half / k as f64) * (half / k as f64);
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    sum
}

/// Symmetric Kaiser window of the given length and shape parameter.
pub fn kaiser_window(len: usize, beta: f64) -> Vec<f64> {
    if len == 1 {
        return vec![1.0];
    }
    let denom = bessel_i0(beta);
    (0..len)
        .map(|k| {
            let r = 2.0 * k as f64 / (len as f64 - 1.0) - 1.0;
            bessel_i0(beta * (1.0 - r * r).sqrt()) / denom
        })
        .collect()
}

/// Row weighting for [`complex_average`].
#[derive(Debug, Clone)]
pub enum Weighting {
    /// Kaiser window with this shape parameter (default beta = 6).
    Kaiser { beta: f64 },
    /// All-ones window.
    Uniform,
    /// Explicit weights; length must equal the stack's row count.
    Custom(Vec<f64>),
}

impl Default for Weighting {
    fn default() -> Self {
        Weighting::Kaiser { beta: 6.0 }
    }
}

impl Weighting {
    fn resolve(&self, rows: usize) -> Result<Vec<f64>> {
        match self {
            Weighting::Kaiser { beta } => Ok(kaiser_window(rows, *beta)),
            Weighting::Uniform => Ok(vec![1.0; rows]),
            Weighting::Custom(w) => {
                if w.len() != rows {
                    Err(Error::WindowMismatch {
                        window: w.len(),
                        rows,
                    })
                } else {
                    Ok(w.clone())
                }
            }
        }
    }
}

/// Analytic signal of a real row: the complex signal whose real part is
/// the input and whose spectrum is one-sided (negative-frequency bins
/// zeroed, positive doubled, DC and Nyquist kept).
pub fn analytic_signal(row: &[f64]) -> Result<Vec<Complex64>> {
    let l = row.len();
    if l < 4 {
        return Err(Error::InputTooShort { len: l, min: 4 });
    }
    let mut buf: Vec<Complex64> = row.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fft_in_place(&mut buf);
    let half = l / 2;
    for (m, v) in buf.iter_mut().enumerate() {
        if m == 0 {
            // DC kept
        } else if l % 2 == 0 && m == half {
            // Nyquist kept
        } else if m < half || (l % 2 == 1 && m == half) {
            *v *= 2.0;
        } else {
            *v = Complex64::new(0.0, 0.0);
        }
    }
    ifft_in_place(&mut buf);
    Ok(buf)
}

/// Weighted mean of the analytic signals of all stack rows:
/// sum_k w_k a_k / sum_k w_k.
///
/// The summation runs in ascending row order so the result is
/// bit-reproducible.
pub fn complex_average(stack: &DiagonalStack, window: &Weighting) -> Result<Vec<Complex64>> {
    let w = window.resolve(stack.k)?;
    let wsum: f64 = w.iter().sum();
    let mut acc = vec![Complex64::new(0.0, 0.0); stack.len];
    for r in 0..stack.k {
        let a = analytic_signal(stack.row(r))?;
        let wk = w[r];
        for (dst, src) in acc.iter_mut().zip(&a) {
            *dst += wk * src;
        }
    }
    for v in &mut acc {
        *v /= wsum;
    }
    Ok(acc)
}

/// A-scan from a complex detuning spectrum: FFT magnitude over the
/// positive-depth half, with the axis calibrated so a fringe
/// exp(i 2 z w') lands at depth z. The maximum depth is the imaging
/// range of the sampling.
pub fn ascan_from_spectrum(
    spectrum: &[Complex64],
    delta_omega: f64,
    meta: AScanMeta,
) -> AScan {
    let l = spectrum.len();
    let half = l / 2;
    let mut buf = spectrum.to_vec();
    fft_in_place(&mut buf);
    let amplitude: Vec<f64> = buf[..half].iter().map(|c| c.norm()).collect();
    let px = crate::SPEED_OF_LIGHT * std::f64::consts::PI / (l as f64 * delta_omega);
    AScan {
        depth_axis: (0..half).map(|m| m as f64 * px).collect(),
        amplitude,
        meta,
    }
}

/// Convenience pipeline: complex-average a stack and transform the result
/// into an A-scan.
pub fn average_ascan(stack: &DiagonalStack, window: &Weighting) -> Result<AScan> {
    let spectrum = complex_average(stack, window)?;
    let algorithm = if stack.k == 1 {
        AlgorithmId::SingleDiagonal
    } else {
        AlgorithmId::ComplexAverage
    };
    Ok(ascan_from_spectrum(
        &spectrum,
        stack.delta_omega,
        AScanMeta {
            algorithm,
            k_used: Some(stack.k),
            lambda0_span: Some(stack.lambda0_span),
        },
    ))
}

/// Minimum layer thickness for complete artefact suppression:
/// 2 S lambda_0c^2 / (delta_lambda_0 n), with S the required number of
/// artefact oscillations across the covered central-wavelength range.
pub fn min_layer_thickness(
    oscillations: f64,
    lambda0_center: f64,
    lambda0_range: f64,
    refractive_index: f64,
) -> Result<f64> {
    if oscillations < 0.0 {
        return Err(Error::NonPositive("oscillation count"));
    }
    if lambda0_center <= 0.0 {
        return Err(Error::NonPositive("central wavelength"));
    }
    if lambda0_range <= 0.0 {
        return Err(Error::NonPositive("wavelength range"));
    }
    if refractive_index <= 0.0 {
        return Err(Error::NonPositive("refractive index"));
    }
    Ok(2.0 * oscillations * lambda0_center * lambda0_center
        / (lambda0_range * refractive_index))
}

/// Number of diagonals needed so that complex averaging matches the
/// full-spectrum 2D transform: the central-wavelength span must cover the
/// anti-diagonal FWHM. Rounds up to the next odd integer >= fwhm / step.
pub fn required_diagonal_count(fwhm_lambda0: f64, delta_lambda: f64) -> Result<usize> {
    if fwhm_lambda0 <= 0.0 {
        return Err(Error::NonPositive("anti-diagonal FWHM"));
    }
    if delta_lambda <= 0.0 {
        return Err(Error::NonPositive("spectral step"));
    }
    let ratio = fwhm_lambda0 / delta_lambda;
    let mut k = ratio.ceil() as usize;
    if k % 2 == 0 {
        k += 1;
    }
    Ok(k.max(1))
}
