//! Coordinate transform from photon frequencies (w_a, w_b) to central
//! frequency / detuning (w_0, w'): anti-diagonal extraction into a stack
//! of diagonals, and the per-row FFT stack.
//!
//! Only anti-diagonals with the same index parity as the main one are
//! extracted (matrix offset 2 per row), so every row shares one exact w'
//! sampling grid with step `delta_omega` and the w_0 spacing between
//! rows equals `delta_omega` as well. Rows are cropped to the common
//! central length L = N - (K - 1); no resampling, no zero padding.

use crate::fft::fft_real;
use crate::synth::JointSpectrum;
use crate::{Error, Result};

/// K x L stack of joint-spectrum anti-diagonals over (w_0, w').
#[derive(Debug, Clone)]
pub struct DiagonalStack {
    /// Row-major samples, one row per central frequency.
    rows: Vec<f64>,
    /// Number of rows K (odd; center row is the main anti-diagonal).
    pub k: usize,
    /// Samples per row, L = N - (K - 1).
    pub len: usize,
    /// Central frequency of each row (rad/s), ascending.
    pub omega0_axis: Vec<f64>,
    /// Detuning of each column (rad/s), ascending, step = delta_omega.
    pub omega_prime_axis: Vec<f64>,
    /// Wavelength span covered by the row centers (m).
    pub lambda0_span: f64,
    /// The w' grid step (rad/s).
    pub delta_omega: f64,
}

impl DiagonalStack {
    /// Row `r` (ascending w_0 order).
    pub fn row(&self, r: usize) -> &[f64] {
        &self.rows[r * self.len..(r + 1) * self.len]
    }

    /// All rows as one row-major slice.
    pub fn data(&self) -> &[f64] {
        &self.rows
    }

    /// Index of the main-diagonal row.
    pub fn center_row(&self) -> usize {
        self.k / 2
    }
}

/// Extracts the K most central anti-diagonals of the joint spectrum.
///
/// Row index r covers signed offset k = r - (K-1)/2 from the main
/// anti-diagonal; its central frequency is w_c + k * delta_omega. K must
/// be odd with 1 <= K <= N/2.
pub fn extract_diagonals(js: &JointSpectrum, k: usize) -> Result<DiagonalStack> {
    let n = js.n;
    if k % 2 == 0 || k == 0 || k > n / 2 {
        return Err(Error::InvalidDiagonalCount { k, n });
    }
    let half = (k - 1) / 2;
    let len = n - (k - 1);
    let mut rows = vec![0.0; k * len];
    for r in 0..k {
        let off = r as isize - half as isize;
        for t in 0..len {
            // matrix cell (i, j) on the anti-diagonal i + j = N - 1 + 2k
            let i = (t + half) as isize + off;
            let j = (n - 1 - half - t) as isize + off;
            rows[r * len + t] = js.at(i as usize, j as usize);
        }
    }
    let dw = js.grid.delta_omega;
    let wc = js.grid.center_omega;
    let omega0_axis = (0..k)
        .map(|r| wc + (r as isize - half as isize) as f64 * dw)
        .collect();
    let omega_prime_axis = (0..len)
        .map(|t| (t as f64 - (len as f64 - 1.0) / 2.0) * dw)
        .collect();
    let lambda0_span = js.grid.delta_lambda * (k as f64 - 1.0);
    Ok(DiagonalStack {
        rows,
        k,
        len,
        omega0_axis,
        omega_prime_axis,
        lambda0_span,
        delta_omega: dw,
    })
}

/// Row window applied before the per-row FFT.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RowWindow {
    /// No tapering (default).
    #[default]
    Rect,
    /// Hann taper, for display-oriented sidelobe suppression.
    Hann,
}

/// K x L/2 matrix of per-row FFT magnitudes over (w_0, depth).
#[derive(Debug, Clone)]
pub struct FftStack {
    /// Row-major magnitudes, one row per central frequency.
    rows: Vec<f64>,
    pub k: usize,
    pub len: usize,
    /// Optical-length depth axis (m); a fringe exp(i 2 z w') lands at z.
    pub depth_axis: Vec<f64>,
    /// Central frequency of each row (rad/s).
    pub omega0_axis: Vec<f64>,
}

impl FftStack {
    pub fn row(&self, r: usize) -> &[f64] {
        &self.rows[r * self.len..(r + 1) * self.len]
    }

    pub fn data(&self) -> &[f64] {
        &self.rows
    }
}

/// FFT of every stack row with the default rectangular window.
pub fn fft_stack(stack: &DiagonalStack) -> FftStack {
    fft_stack_windowed(stack, RowWindow::Rect)
}

/// FFT of every stack row; magnitudes over the positive-depth half with
/// the depth axis calibrated so structural fringes land at their true
/// optical depths.
pub fn fft_stack_windowed(stack: &DiagonalStack, window: RowWindow) -> FftStack {
    let l = stack.len;
    let half = l / 2;
    let taper: Option<Vec<f64>> = match window {
        RowWindow::Rect => None,
        RowWindow::Hann => Some(
            (0..l)
                .map(|i| {
                    let x = std::f64::consts::PI * i as f64 / (l as f64 - 1.0);
                    x.sin() * x.sin()
                })
                .collect(),
        ),
    };
    let mut rows = vec![0.0; stack.k * half];
    for r in 0..stack.k {
        let src = stack.row(r);
        let spectrum = match &taper {
            None => fft_real(src),
            Some(w) => {
                let tapered: Vec<f64> = src.iter().zip(w).map(|(&s, &wi)| s * wi).collect();
                fft_real(&tapered)
            }
        };
        for t in 0..half {
            rows[r * half + t] = spectrum[t].norm();
        }
    }
    // bin m <-> delay 2 pi m / (L dw), displayed at half that in length
    let px = crate::SPEED_OF_LIGHT * std::f64::consts::PI / (l as f64 * stack.delta_omega);
    FftStack {
        rows,
        k: stack.k,
        len: half,
        depth_axis: (0..half).map(|m| m as f64 * px).collect(),
        omega0_axis: stack.omega0_axis.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ObjectSpec, SourceSpec};
    use crate::synth::{synthesize_joint_spectrum, SynthOptions};
    use crate::SPEED_OF_LIGHT;

    fn synth(depths: &[f64], refl: &[f64]) -> JointSpectrum {
        let obj = ObjectSpec::from_vacuum_depths(depths, refl).unwrap();
        synthesize_joint_spectrum(&obj, &SourceSpec::default(), &SynthOptions::default()).unwrap()
    }

    #[test]
    fn k1_is_the_main_antidiagonal() {
        let js = synth(&[200e-6, 340e-6], &[0.5, 0.5]);
        let stack = extract_diagonals(&js, 1).unwrap();
        assert_eq!(stack.k, 1);
        assert_eq!(stack.len, js.n);
        for t in 0..js.n {
            assert_eq!(stack.row(0)[t], js.at(t, js.n - 1 - t));
        }
        assert_eq!(stack.omega0_axis[0], js.grid.center_omega);
    }

    #[test]
    fn k51_covers_about_35_nm() {
        let js = synth(&[200e-6], &[1.0]);
        let stack = extract_diagonals(&js, 51).unwrap();
        assert_eq!(stack.len, 256 - 50);
        let span_nm = stack.lambda0_span * 1e9;
        assert!((span_nm - 35.29).abs() < 0.1, "span {span_nm} nm");
    }

    #[test]
    fn even_or_oversized_k_is_rejected() {
        let js = synth(&[200e-6], &[1.0]);
        assert!(matches!(
            extract_diagonals(&js, 50),
            Err(crate::Error::InvalidDiagonalCount { .. })
        ));
        assert!(extract_diagonals(&js, 129).is_err());
        assert!(extract_diagonals(&js, 0).is_err());
    }

    #[test]
    fn rows_share_omega_prime_axis_and_spacing() {
        let js = synth(&[200e-6, 340e-6], &[0.5, 0.5]);
        let stack = extract_diagonals(&js, 21).unwrap();
        let dw = js.grid.delta_omega;
        assert_eq!(stack.omega_prime_axis.len(), stack.len);
        for w in stack.omega_prime_axis.windows(2) {
            assert!((w[1] - w[0] - dw).abs() < 1e-12 * dw);
        }
        for w in stack.omega0_axis.windows(2) {
            assert!((w[1] - w[0] - dw).abs() < 1e-12 * dw);
        }
    }

    #[test]
    fn every_row_is_even_under_detuning_flip() {
        // The joint spectrum is swap-symmetric, which makes each extracted
        // row an even function of w' on its half-integer grid; this is the
        // mirror relation the (w_0, w') geometry guarantees.
        let js = synth(&[200e-6, 340e-6, 480e-6], &[0.5, 0.5, 0.5]);
        let stack = extract_diagonals(&js, 31).unwrap();
        for r in 0..stack.k {
            let row = stack.row(r);
            for t in 0..stack.len {
                assert_eq!(row[t], row[stack.len - 1 - t], "row {r} slot {t}");
            }
        }
    }

    #[test]
    fn single_mirror_peak_position_is_stationary_across_rows() {
        let depth = 300e-6;
        let js = synth(&[depth], &[1.0]);
        let stack = extract_diagonals(&js, 51).unwrap();
        let fs = fft_stack(&stack);
        let px = fs.depth_axis[1];
        let expected_bin = depth / px;
        for r in 0..fs.k {
            let row = fs.row(r);
            // skip the zero-OPD region when locating the structural peak
            let (bin, _) = row
                .iter()
                .enumerate()
                .skip(8)
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .unwrap();
            assert!(
                (bin as f64 - expected_bin).abs() <= 1.0,
                "row {r} peak at bin {bin}, expected {expected_bin}"
            );
        }
    }

    #[test]
    fn single_mirror_height_is_constant_over_a_narrow_stack() {
        // Rows scale with the pump profile, so "constant height" holds on
        // a stack whose w_0 span is small against the anti-diagonal FWHM.
        let depth = 300e-6;
        let js = synth(&[depth], &[1.0]);
        let stack = extract_diagonals(&js, 11).unwrap();
        let fs = fft_stack(&stack);
        let px = fs.depth_axis[1];
        let bin = (depth / px).round() as usize;
        let heights: Vec<f64> = (0..fs.k).map(|r| fs.row(r)[bin]).collect();
        let hmax = heights.iter().fold(0.0f64, |m, &v| m.max(v));
        let hmin = heights.iter().fold(f64::INFINITY, |m, &v| m.min(v));
        assert!(
            (hmax - hmin) / hmax < 0.05,
            "structural height not stationary: {hmin} .. {hmax}"
        );
    }

    #[test]
    fn single_layer_artefact_oscillates_along_omega0() {
        // Layer of optical thickness dz: the artefact height follows
        // |cos(dz_delay * w_0)|, whose fundamental sits at delay
        // 2 dz_delay; under the halved depth calibration an FFT along the
        // column therefore peaks at dz.
        let dz = 140e-6;
        let js = synth(&[250e-6, 250e-6 + dz], &[0.5, 0.5]);
        let k = 101;
        let stack = extract_diagonals(&js, k).unwrap();
        let fs = fft_stack(&stack);
        let px = fs.depth_axis[1];
        // instationary artefact at the midpoint
        let mid_bin = ((250e-6 + dz / 2.0) / px).round() as usize;
        let column: Vec<f64> = (0..fs.k).map(|r| fs.row(r)[mid_bin]).collect();
        let spectrum = crate::fft::fft_real(&column);
        let mags: Vec<f64> = spectrum[..k / 2].iter().map(|c| c.norm()).collect();
        let (peak_bin, _) = mags
            .iter()
            .enumerate()
            .skip(4)
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap();
        let expected = 2.0 * (dz / SPEED_OF_LIGHT) * (k as f64 * stack.delta_omega)
            / (2.0 * std::f64::consts::PI);
        assert!(
            (peak_bin as f64 - expected).abs() <= 1.0,
            "oscillation at bin {peak_bin}, expected {expected}"
        );
    }

    #[test]
    fn artefact_height_variation_dominates_structural_variation() {
        let dz = 140e-6;
        let js = synth(&[250e-6, 250e-6 + dz], &[0.5, 0.5]);
        let stack = extract_diagonals(&js, 101).unwrap();
        let fs = fft_stack(&stack);
        let px = fs.depth_axis[1];
        let cv = |bin: usize| {
            let vals: Vec<f64> = (0..fs.k).map(|r| fs.row(r)[bin]).collect();
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            let var =
                vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / vals.len() as f64;
            var.sqrt() / mean
        };
        let struct_bin = (250e-6 / px).round() as usize;
        let art_bin = ((250e-6 + dz / 2.0) / px).round() as usize;
        // structural rows vary only through the pump dome; artefact rows
        // additionally carry the |cos| oscillation
        assert!(cv(art_bin) > 0.5, "artefact cv {}", cv(art_bin));
        assert!(
            cv(struct_bin) < 0.5 * cv(art_bin),
            "structural cv {} vs artefact cv {}",
            cv(struct_bin),
            cv(art_bin)
        );
    }

    #[test]
    fn zero_stack_gives_zero_fft_stack() {
        let js = synthesize_joint_spectrum(
            &ObjectSpec::empty(),
            &SourceSpec::default(),
            &SynthOptions::default(),
        )
        .unwrap();
        let stack = extract_diagonals(&js, 11).unwrap();
        let fs = fft_stack(&stack);
        assert!(fs.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn per_row_energy_matches_full_fft_energy() {
        // Parseval: sum |x|^2 == (1/L) sum |X|^2 over the full complex FFT.
        let js = synth(&[200e-6, 340e-6], &[0.5, 0.5]);
        let stack = extract_diagonals(&js, 21).unwrap();
        for r in 0..stack.k {
            let row = stack.row(r);
            let time_energy: f64 = row.iter().map(|v| v * v).sum();
            let spec = crate::fft::fft_real(row);
            let spec_energy: f64 =
                spec.iter().map(|c| c.norm_sqr()).sum::<f64>() / row.len() as f64;
            let rel = (time_energy - spec_energy).abs() / time_energy;
            assert!(rel < 1e-9, "row {r} Parseval violation {rel:e}");
        }
    }

    #[test]
    fn hann_window_reduces_far_sidelobes() {
        let js = synth(&[400e-6], &[1.0]);
        let stack = extract_diagonals(&js, 1).unwrap();
        let rect = fft_stack(&stack);
        let hann = fft_stack_windowed(&stack, RowWindow::Hann);
        let px = rect.depth_axis[1];
        let probe = (150e-6 / px).round() as usize; // far from DC and the peak
        let peak_bin = (400e-6 / px).round() as usize;
        let rect_rel = rect.row(0)[probe] / rect.row(0)[peak_bin];
        let hann_rel = hann.row(0)[probe] / hann.row(0)[peak_bin];
        assert!(hann_rel < rect_rel);
    }
}
