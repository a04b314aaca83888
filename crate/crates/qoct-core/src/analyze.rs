//! Peak detection, artefact-position prediction, suppression metrics and
//! brute-force DFT oracles.

use crate::algo_avg::AScan;
use crate::model::{optical_depths, ObjectSpec};
use crate::{Error, Result};
use num_complex::Complex64;

/// A detected A-scan peak with sub-pixel refinement.
#[derive(Debug, Clone, Copy)]
pub struct Peak {
    /// Interpolated position (optical length, m).
    pub position: f64,
    /// Interpolated height.
    pub height: f64,
    /// Full width at half maximum of the local Gaussian model (m),
    /// measured on amplitude.
    pub fwhm: f64,
}

/// Peaks sorted by ascending position.
#[derive(Debug, Clone, Default)]
pub struct PeakList {
    pub peaks: Vec<Peak>,
}

impl PeakList {
    /// The highest peak.
    pub fn tallest(&self) -> Option<&Peak> {
        self.peaks
            .iter()
            .max_by(|a, b| a.height.partial_cmp(&b.height).unwrap())
    }

    /// The peak nearest to `position`, if any.
    pub fn nearest(&self, position: f64) -> Option<&Peak> {
        self.peaks.iter().min_by(|a, b| {
            (a.position - position)
                .abs()
                .partial_cmp(&(b.position - position).abs())
                .unwrap()
        })
    }
}

/// Finds interior local maxima above `rel_threshold` times the largest
/// interior local maximum (the zero-depth bin is not a candidate, so the
/// zero-OPD ridge does not set the bar). Sub-pixel position and FWHM come
/// from a parabola fitted to the log-amplitudes of the three samples
/// around each maximum, which is exact for Gaussian-shaped peaks.
pub fn find_peaks(ascan: &AScan, rel_threshold: f64) -> Result<PeakList> {
    if ascan.amplitude.is_empty() || ascan.depth_axis.is_empty() {
        return Err(Error::EmptyInput("A-scan"));
    }
    if rel_threshold <= 0.0 || rel_threshold >= 1.0 {
        return Err(Error::NonPositive("relative threshold (must be in (0, 1))"));
    }
    let a = &ascan.amplitude;
    let n = a.len();
    let px = ascan.pixel();

    let mut candidates = Vec::new();
    for i in 1..n.saturating_sub(1) {
        if a[i] > a[i - 1] && a[i] >= a[i + 1] && a[i] > 0.0 {
            candidates.push(i);
        }
    }
    let bar = candidates
        .iter()
        .map(|&i| a[i])
        .fold(0.0f64, |m, v| m.max(v))
        * rel_threshold;
    if bar == 0.0 {
        return Err(Error::ZeroAmplitude);
    }

    let mut peaks = Vec::new();
    for &i in &candidates {
        if a[i] < bar {
            continue;
        }
        let (delta, height, fwhm_bins) = refine_log_parabola(a[i - 1], a[i], a[i + 1]);
        peaks.push(Peak {
            position: (i as f64 + delta) * px,
            height,
            fwhm: fwhm_bins * px,
        });
    }
    Ok(PeakList { peaks })
}

/// Log-parabolic refinement on three samples around a maximum. Returns
/// (sub-pixel offset, interpolated height, FWHM in bins). Falls back to a
/// plain parabola on the amplitudes when a neighbor is nonpositive.
fn refine_log_parabola(prev: f64, center: f64, next: f64) -> (f64, f64, f64) {
    const FWHM_PER_SIGMA: f64 = 2.354_820_045_030_949_4; // 2 sqrt(2 ln 2)
    if prev > 0.0 && next > 0.0 {
        let (lm, l0, lp) = (prev.ln(), center.ln(), next.ln());
        let curv = lm - 2.0 * l0 + lp;
        if curv < 0.0 {
            let delta = 0.5 * (lm - lp) / curv;
            let height = (l0 - 0.25 * (lm - lp) * delta).exp();
            let sigma = (-1.0 / curv).sqrt();
            return (delta.clamp(-0.5, 0.5), height, FWHM_PER_SIGMA * sigma);
        }
    }
    // amplitude-domain fallback
    let curv = prev - 2.0 * center + next;
    if curv < 0.0 {
        let delta = 0.5 * (prev - next) / curv;
        let height = center - 0.25 * (prev - next) * delta;
        // half-max crossing of the fitted parabola
        let half_width = (height / (-curv)).sqrt();
        (delta.clamp(-0.5, 0.5), height, 2.0 * half_width)
    } else {
        (0.0, center, 1.0)
    }
}

/// Predicted A-scan feature positions for an object, all as optical
/// lengths (m).
///
/// `structural` holds the interface depths; `instationary` the pairwise
/// midpoints, which is where those artefacts land on the depth axis.
/// `stationary` holds the pairwise separations — the artefact's distance
/// from zero optical path difference. On the halved depth axis shared by
/// all A-scans, a stationary artefact therefore appears at half its
/// listed value; see [`ArtefactPrediction::stationary_axis_positions`].
#[derive(Debug, Clone)]
pub struct ArtefactPrediction {
    /// Interface optical depths, ascending.
    pub structural: Vec<f64>,
    /// Pairwise separations (OPD positions), one per interface pair.
    pub stationary: Vec<f64>,
    /// Pairwise midpoints, one per interface pair.
    pub instationary: Vec<f64>,
}

impl ArtefactPrediction {
    /// Where the stationary artefacts land on the halved depth axis.
    pub fn stationary_axis_positions(&self) -> Vec<f64> {
        self.stationary.iter().map(|s| 0.5 * s).collect()
    }

    /// All artefact positions on the depth axis (stationary mapped to
    /// axis coordinates, instationary as-is).
    pub fn artefact_axis_positions(&self) -> Vec<(ArtefactKind, f64)> {
        let mut out: Vec<(ArtefactKind, f64)> = self
            .stationary_axis_positions()
            .into_iter()
            .map(|p| (ArtefactKind::Stationary, p))
            .collect();
        out.extend(
            self.instationary
                .iter()
                .map(|&p| (ArtefactKind::Instationary, p)),
        );
        out
    }
}

/// Class of a predicted artefact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArtefactKind {
    Stationary,
    Instationary,
}

impl ArtefactKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ArtefactKind::Stationary => "stationary",
            ArtefactKind::Instationary => "instationary",
        }
    }
}

/// Enumerates the structural peaks and both artefact families of an
/// object: structural at the interface depths, stationary at the pairwise
/// separations (measured from zero OPD), instationary at the pairwise
/// midpoints.
pub fn predict_artefacts(object: &ObjectSpec) -> Result<ArtefactPrediction> {
    if object.is_empty() {
        return Err(Error::EmptyInput("object has no interfaces"));
    }
    let depths = optical_depths(object);
    let mut stationary = Vec::new();
    let mut instationary = Vec::new();
    for n in 0..depths.len() {
        for u in (n + 1)..depths.len() {
            stationary.push(depths[u] - depths[n]);
            instationary.push(0.5 * (depths[n] + depths[u]));
        }
    }
    Ok(ArtefactPrediction {
        structural: depths,
        stationary,
        instationary,
    })
}

/// Suppression measurement at one predicted artefact position.
#[derive(Debug, Clone)]
pub struct ArtefactResidual {
    pub kind: ArtefactKind,
    /// Predicted value (separation for stationary, midpoint otherwise).
    pub predicted: f64,
    /// Where the artefact lives on the depth axis.
    pub axis_position: f64,
    /// Peak amplitude near the position in the raw A-scan.
    pub raw_amplitude: f64,
    /// Peak amplitude near the position in the cleaned A-scan, rescaled
    /// to the raw A-scan's structural level.
    pub cleaned_amplitude: f64,
    /// 20 log10(cleaned / raw).
    pub residual_db: f64,
    /// True when the position is within 2 pixels of a structural peak;
    /// suppression is unmeasurable there and the entry is skipped in the
    /// summary.
    pub excluded: bool,
}

/// Per-structural-peak fidelity of the cleaned A-scan.
#[derive(Debug, Clone)]
pub struct StructuralDelta {
    pub predicted: f64,
    /// Peak position error (m) between cleaned and raw.
    pub position_delta: f64,
    /// 20 log10(cleaned height / raw height) after structural
    /// renormalization.
    pub height_db: f64,
}

/// Artefact-suppression report comparing a cleaned A-scan against the raw
/// single-diagonal one.
#[derive(Debug, Clone)]
pub struct SuppressionReport {
    pub artefacts: Vec<ArtefactResidual>,
    pub structural: Vec<StructuralDelta>,
    /// Worst (largest) non-excluded artefact residual (dB).
    pub worst_artefact_db: f64,
    /// Scale applied to the cleaned amplitudes so the mean structural
    /// height matches the raw A-scan's.
    pub normalization: f64,
}

fn window_max(ascan: &AScan, center: f64, halfwidth: f64) -> f64 {
    ascan
        .depth_axis
        .iter()
        .zip(&ascan.amplitude)
        .filter(|(&d, _)| (d - center).abs() <= halfwidth)
        .map(|(_, &a)| a)
        .fold(0.0f64, |m, v| m.max(v))
}

fn window_argmax(ascan: &AScan, center: f64, halfwidth: f64) -> Option<(f64, f64)> {
    ascan
        .depth_axis
        .iter()
        .zip(&ascan.amplitude)
        .filter(|(&d, _)| (d - center).abs() <= halfwidth)
        .map(|(&d, &a)| (d, a))
        .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
}

/// Quantifies artefact suppression: the residual ratio at every predicted
/// artefact position (peak amplitude within 3 pixels, cleaned over raw)
/// and the structural position/height fidelity.
///
/// The cleaned A-scan is first rescaled so its mean structural peak
/// height matches the raw one, making the ratios meaningful across
/// pipelines with different absolute gain. Artefact positions within 2
/// pixels of a structural peak are flagged `excluded` and skipped in the
/// summary. Both A-scans must share one depth axis.
pub fn suppression_report(
    raw: &AScan,
    cleaned: &AScan,
    prediction: &ArtefactPrediction,
) -> Result<SuppressionReport> {
    if raw.depth_axis.len() != cleaned.depth_axis.len()
        || raw
            .depth_axis
            .iter()
            .zip(&cleaned.depth_axis)
            .any(|(a, b)| (a - b).abs() > 1e-9 * a.abs().max(1e-12))
    {
        return Err(Error::AxisMismatch);
    }
    let px = raw.pixel();
    let whalf = 3.0 * px;

    // structural renormalization
    let mut raw_struct = 0.0;
    let mut cleaned_struct = 0.0;
    for &s in &prediction.structural {
        raw_struct += window_max(raw, s, whalf);
        cleaned_struct += window_max(cleaned, s, whalf);
    }
    let normalization = if cleaned_struct > 0.0 {
        raw_struct / cleaned_struct
    } else {
        1.0
    };

    let mut artefacts = Vec::new();
    let mut worst = f64::NEG_INFINITY;
    for (kind, axis_pos) in prediction.artefact_axis_positions() {
        let predicted = match kind {
            ArtefactKind::Stationary => axis_pos * 2.0,
            ArtefactKind::Instationary => axis_pos,
        };
        let excluded = prediction
            .structural
            .iter()
            .any(|&s| (s - axis_pos).abs() < 2.0 * px);
        let raw_amp = window_max(raw, axis_pos, whalf);
        let cleaned_amp = window_max(cleaned, axis_pos, whalf) * normalization;
        let residual_db = 20.0 * (cleaned_amp.max(1e-300) / raw_amp.max(1e-300)).log10();
        if !excluded {
            worst = worst.max(residual_db);
        }
        artefacts.push(ArtefactResidual {
            kind,
            predicted,
            axis_position: axis_pos,
            raw_amplitude: raw_amp,
            cleaned_amplitude: cleaned_amp,
            residual_db,
            excluded,
        });
    }

    let mut structural = Vec::new();
    for &s in &prediction.structural {
        let (rp, rh) = window_argmax(raw, s, whalf).unwrap_or((s, 0.0));
        let (cp, ch) = window_argmax(cleaned, s, whalf).unwrap_or((s, 0.0));
        structural.push(StructuralDelta {
            predicted: s,
            position_delta: cp - rp,
            height_db: 20.0
                * ((ch * normalization).max(1e-300) / rh.max(1e-300)).log10(),
        });
    }

    Ok(SuppressionReport {
        artefacts,
        structural,
        worst_artefact_db: worst,
        normalization,
    })
}

/// Linearly resamples an A-scan onto a new depth axis (clamping outside
/// the source range to the edge samples), so reports can compare
/// pipelines with different native sampling.
pub fn resample_ascan(ascan: &AScan, depth_axis: &[f64]) -> AScan {
    let amplitude = depth_axis
        .iter()
        .map(|&d| interp_clamped(&ascan.depth_axis, &ascan.amplitude, d))
        .collect();
    AScan {
        depth_axis: depth_axis.to_vec(),
        amplitude,
        meta: ascan.meta.clone(),
    }
}

fn interp_clamped(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[xs.len() - 1] {
        return ys[ys.len() - 1];
    }
    let i = xs.partition_point(|&v| v <= x) - 1;
    let t = (x - xs[i]) / (xs[i + 1] - xs[i]);
    ys[i] * (1.0 - t) + ys[i + 1] * t
}

/// Size cap of the brute-force oracles.
pub const DFT_ORACLE_CAP: usize = 512;

/// Direct-summation forward DFT (unnormalized), for validating FFT-based
/// paths. O(N^2); input length capped at [`DFT_ORACLE_CAP`].
pub fn dft_oracle_1d(signal: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = signal.len();
    if n > DFT_ORACLE_CAP {
        return Err(Error::SizeCap {
            len: n,
            cap: DFT_ORACLE_CAP,
        });
    }
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let mut acc = Complex64::new(0.0, 0.0);
        for (t, &x) in signal.iter().enumerate() {
            let phase = -2.0 * std::f64::consts::PI * (k as f64) * (t as f64) / n as f64;
            acc += x * Complex64::new(phase.cos(), phase.sin());
        }
        out.push(acc);
    }
    Ok(out)
}

/// Direct-summation 2D forward DFT of a row-major matrix. O(N^4); each
/// side capped at 128.
pub fn dft_oracle_2d(matrix: &[Complex64], rows: usize, cols: usize) -> Result<Vec<Complex64>> {
    const SIDE_CAP: usize = 128;
    if matrix.len() != rows * cols {
        return Err(Error::GridMismatch {
            expected: rows * cols,
            got: matrix.len(),
        });
    }
    if rows > SIDE_CAP || cols > SIDE_CAP {
        return Err(Error::SizeCap {
            len: rows.max(cols),
            cap: SIDE_CAP,
        });
    }
    let mut out = vec![Complex64::new(0.0, 0.0); rows * cols];
    for p in 0..rows {
        for q in 0..cols {
            let mut acc = Complex64::new(0.0, 0.0);
            for r in 0..rows {
                for c in 0..cols {
                    let phase = -2.0
                        * std::f64::consts::PI
                        * ((p * r) as f64 / rows as f64 + (q * c) as f64 / cols as f64);
                    acc += matrix[r * cols + c] * Complex64::new(phase.cos(), phase.sin());
                }
            }
            out[p * cols + q] = acc;
        }
    }
    Ok(out)
}
