//! Object transfer function and synthesis of the two-dimensional joint
//! spectrum.
//!
//! The coincidence-rate model for photon frequencies (w_a, w_b) is
//!
//! ```text
//! C(w_a, w_b) = |phi(w_a, w_b)|^2 (|f(w_a)|^2 + |f(w_b)|^2 - 2 Re{f(w_a) f*(w_b)})
//! ```
//!
//! where `|phi|^2` is the joint spectral profile and `f` the object
//! transfer function. The parenthesis equals `|f(w_a) - f(w_b)|^2`, which
//! makes the matrix nonnegative with an exact zero on the w_a = w_b
//! diagonal; synthesis evaluates the three-term form and tests cross-check
//! the squared-difference form.

use crate::fft::pool;
use crate::model::{
    effective_reflectance, optical_delays, FrequencyGrid, ObjectSpec, SourceSpec,
};
use crate::{Error, Result};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

/// Per-interface term of the factored transfer function: effective
/// reflectance, cumulative group delay, and cumulative dispersion
/// coefficients of all traversed segments.
#[derive(Debug, Clone, Copy)]
pub struct InterfaceTerm {
    /// S_n, the attenuated reflectivity.
    pub effective_reflectance: f64,
    /// Cumulative group delay ztilde_n (s).
    pub delay: f64,
    /// Cumulative second-order dispersion sum_m z_m beta2_m (s^2).
    pub disp2: f64,
    /// Cumulative third-order dispersion sum_m z_m beta3_m (s^3).
    pub disp3: f64,
}

/// Object transfer function sampled on a frequency grid:
/// `f(w) = sum_n S_n exp(i ztilde_n w) exp(i phi_n^D(w))`.
#[derive(Debug, Clone)]
pub struct TransferFunction {
    /// f evaluated at each grid frequency.
    pub values: Vec<Complex64>,
    /// Per-interface phase decomposition.
    pub terms: Vec<InterfaceTerm>,
    /// Expansion origin of the dispersion phases (rad/s).
    pub center_omega: f64,
}

impl TransferFunction {
    /// Linear phase ztilde_n * w of interface `n` at frequency `omega`.
    pub fn linear_phase(&self, n: usize, omega: f64) -> f64 {
        self.terms[n].delay * omega
    }

    /// Dispersion phase phi_n^D(w) of interface `n` at frequency `omega`.
    pub fn dispersion_phase(&self, n: usize, omega: f64) -> f64 {
        let d = omega - self.center_omega;
        self.terms[n].disp2 * d * d + self.terms[n].disp3 * d * d * d
    }

    /// Upper bound sum_n S_n on |f| (triangle inequality).
    pub fn modulus_bound(&self) -> f64 {
        self.terms.iter().map(|t| t.effective_reflectance).sum()
    }
}

/// Evaluates the transfer function of an object on a grid.
pub fn transfer_function(object: &ObjectSpec, grid: &FrequencyGrid) -> TransferFunction {
    let s = effective_reflectance(object);
    let delays = optical_delays(object);
    let mut terms = Vec::with_capacity(object.len());
    let mut disp2 = 0.0;
    let mut disp3 = 0.0;
    for (n, iface) in object.interfaces.iter().enumerate() {
        disp2 += iface.segment.thickness * iface.segment.beta2;
        disp3 += iface.segment.thickness * iface.segment.beta3;
        terms.push(InterfaceTerm {
            effective_reflectance: s[n],
            delay: delays[n],
            disp2,
            disp3,
        });
    }

    let wc = grid.center_omega;
    let values = grid
        .omega
        .iter()
        .map(|&w| {
            let d = w - wc;
            let mut acc = Complex64::new(0.0, 0.0);
            for t in &terms {
                let phase = t.delay * w + t.disp2 * d * d + t.disp3 * d * d * d;
                acc += t.effective_reflectance * Complex64::new(phase.cos(), phase.sin());
            }
            acc
        })
        .collect();

    TransferFunction {
        values,
        terms,
        center_omega: wc,
    }
}

/// Joint spectral profile |phi|^2 at a single frequency pair: separable
/// Gaussians in the rotated coordinates w_0 = (w_a + w_b)/2 and
/// w' = (w_a - w_b)/2, peak-normalized to 1.
pub fn profile_at(source: &SourceSpec, omega_alpha: f64, omega_beta: f64) -> f64 {
    let conv = source.omega_per_wavelength();
    let g0_fwhm = conv * source.antidiagonal_fwhm;
    let gp_fwhm = conv * source.diagonal_bandwidth;
    let w0 = 0.5 * (omega_alpha + omega_beta) - source.center_omega();
    let wp = 0.5 * (omega_alpha - omega_beta);
    let ln2x4 = 4.0 * std::f64::consts::LN_2;
    (-ln2x4 * (w0 / g0_fwhm).powi(2)).exp() * (-ln2x4 * (wp / gp_fwhm).powi(2)).exp()
}

/// Joint spectral profile sampled on the grid, row-major over
/// (w_a index, w_b index).
pub fn joint_spectral_profile(source: &SourceSpec, grid: &FrequencyGrid) -> Vec<f64> {
    let n = grid.len();
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            out[i * n + j] = profile_at(source, grid.omega[i], grid.omega[j]);
        }
    }
    out
}

/// Seeded additive-noise request; amplitude is scaled so that the peak
/// of the noiseless spectrum sits `peak_snr_db` above the noise sigma.
#[derive(Debug, Clone, Copy)]
pub struct NoiseSpec {
    pub seed: u64,
    pub peak_snr_db: f64,
}

/// Synthesis options; noise defaults to off so the model invariants hold
/// exactly.
#[derive(Debug, Clone, Copy, Default)]
pub struct SynthOptions {
    pub noise: Option<NoiseSpec>,
}

/// Real N x N joint spectrum over (w_a index, w_b index) plus its grid.
#[derive(Debug, Clone)]
pub struct JointSpectrum {
    /// Row-major samples, row = w_a index.
    pub data: Vec<f64>,
    /// Samples per axis.
    pub n: usize,
    /// The frequency grid both axes share.
    pub grid: FrequencyGrid,
}

impl JointSpectrum {
    /// Value at (w_a index i, w_b index j).
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Largest absolute value.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, &v| m.max(v.abs()))
    }

    /// Checks the noiseless-model invariants: nonnegativity, symmetry and
    /// a zero w_a = w_b diagonal, all relative to the matrix maximum.
    pub fn validate(&self) -> Result<()> {
        let max = self.max_abs();
        if max == 0.0 {
            return Ok(());
        }
        let tol = 1e-12 * max;
        for i in 0..self.n {
            if self.at(i, i).abs() > tol {
                return Err(Error::InvalidObject(format!(
                    "joint spectrum diagonal not zero at {i}"
                )));
            }
            for j in 0..i {
                if (self.at(i, j) - self.at(j, i)).abs() > tol {
                    return Err(Error::InvalidObject(format!(
                        "joint spectrum not symmetric at ({i}, {j})"
                    )));
                }
                if self.at(i, j) < -tol {
                    return Err(Error::InvalidObject(format!(
                        "joint spectrum negative at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Synthesizes the joint spectrum of an object for a source.
///
/// Builds the grid and transfer function internally; see
/// [`synthesize_with_transfer`] for the variant taking a precomputed
/// transfer function.
pub fn synthesize_joint_spectrum(
    object: &ObjectSpec,
    source: &SourceSpec,
    opts: &SynthOptions,
) -> Result<JointSpectrum> {
    object.validate()?;
    let grid = crate::model::build_frequency_grid(source)?;
    let tf = transfer_function(object, &grid);
    synthesize_with_transfer(&tf, source, &grid, opts)
}

/// Synthesizes the joint spectrum from a precomputed transfer function.
///
/// Rows are evaluated in parallel into disjoint slices, so the output is
/// bit-identical for any thread count. Rejects a transfer function whose
/// sampling does not match the grid.
pub fn synthesize_with_transfer(
    tf: &TransferFunction,
    source: &SourceSpec,
    grid: &FrequencyGrid,
    opts: &SynthOptions,
) -> Result<JointSpectrum> {
    if tf.values.len() != grid.len() {
        return Err(Error::GridMismatch {
            expected: grid.len(),
            got: tf.values.len(),
        });
    }
    let n = grid.len();
    let f = &tf.values;
    let f_sq: Vec<f64> = f.iter().map(|v| v.norm_sqr()).collect();

    let mut data = vec![0.0; n * n];
    pool().install(|| {
        use rayon::prelude::*;
        data.par_chunks_exact_mut(n).enumerate().for_each(|(i, row)| {
            let fa = f[i];
            let fa_sq = f_sq[i];
            let wa = grid.omega[i];
            for (j, cell) in row.iter_mut().enumerate() {
                let fb = f[j];
                // Re{f(w_a) f*(w_b)}
                let cross = fa.re * fb.re + fa.im * fb.im;
                let fringe = fa_sq + f_sq[j] - 2.0 * cross;
                *cell = profile_at(source, wa, grid.omega[j]) * fringe;
            }
        });
    });

    if let Some(noise) = opts.noise {
        let peak = data.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
        let sigma = peak / 10f64.powf(noise.peak_snr_db / 20.0);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(noise.seed);
        for cell in &mut data {
            let g: f64 = StandardNormal.sample(&mut rng);
            *cell += sigma * g;
        }
    }

    Ok(JointSpectrum {
        data,
        n,
        grid: grid.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::build_frequency_grid;

    fn grid() -> FrequencyGrid {
        build_frequency_grid(&SourceSpec::default()).unwrap()
    }

    /// Literal evaluation of the generalized product-form transfer
    /// function: each interface contributes its own reflection term times
    /// the transmission/propagation factors of every shallower interface.
    /// Kept independent of the factored implementation it checks.
    fn transfer_oracle(object: &ObjectSpec, grid: &FrequencyGrid) -> Vec<Complex64> {
        let wc = grid.center_omega;
        let beta_z = |seg: &crate::model::LayerSegment, w: f64| -> f64 {
            let d = w - wc;
            seg.thickness * (seg.group_index_coeff * w + seg.beta2 * d * d + seg.beta3 * d * d * d)
        };
        grid.omega
            .iter()
            .map(|&w| {
                let mut f = Complex64::new(0.0, 0.0);
                for n in 0..object.len() {
                    let head = &object.interfaces[n];
                    let mut term =
                        Complex64::from_polar(head.reflectivity, beta_z(&head.segment, w));
                    for shallower in &object.interfaces[..n] {
                        term *= Complex64::from_polar(
                            1.0 - shallower.reflectivity,
                            beta_z(&shallower.segment, w),
                        );
                    }
                    f += term;
                }
                f
            })
            .collect()
    }

    #[test]
    fn empty_object_gives_zero_transfer() {
        let g = grid();
        let tf = transfer_function(&ObjectSpec::empty(), &g);
        assert!(tf.values.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn single_unit_mirror_has_unit_modulus_and_linear_phase() {
        let g = grid();
        let obj = ObjectSpec::from_vacuum_depths(&[100e-6], &[1.0]).unwrap();
        let tf = transfer_function(&obj, &g);
        let delay = 100e-6 / crate::SPEED_OF_LIGHT;
        for (k, v) in tf.values.iter().enumerate() {
            assert!((v.norm() - 1.0).abs() < 1e-12);
            let expected = Complex64::from_polar(1.0, delay * g.omega[k]);
            assert!((v - expected).norm() < 1e-9);
        }
        assert!((tf.linear_phase(0, g.omega[0]) - delay * g.omega[0]).abs() < 1e-12);
    }

    #[test]
    fn two_interface_transfer_matches_product_form_oracle() {
        let g = grid();
        let obj = ObjectSpec::from_vacuum_depths(&[100e-6, 150e-6], &[0.5, 0.5]).unwrap();
        let tf = transfer_function(&obj, &g);
        let oracle = transfer_oracle(&obj, &g);
        for (a, b) in tf.values.iter().zip(&oracle) {
            assert!(
                (a - b).norm() <= 1e-12 * a.norm().max(1.0),
                "factored vs product form differ: {a} vs {b}"
            );
        }
    }

    #[test]
    fn dispersive_transfer_matches_product_form_oracle() {
        let g = grid();
        let obj = ObjectSpec::new(vec![
            crate::model::Interface {
                reflectivity: 0.4,
                segment: crate::model::LayerSegment::vacuum(150e-6),
            },
            crate::model::Interface {
                reflectivity: 0.7,
                segment: crate::model::LayerSegment {
                    thickness: 200e-6,
                    group_index_coeff: 1.45 / crate::SPEED_OF_LIGHT,
                    beta2: 1e-24,
                    beta3: 1e-39,
                },
            },
        ])
        .unwrap();
        let tf = transfer_function(&obj, &g);
        let oracle = transfer_oracle(&obj, &g);
        for (a, b) in tf.values.iter().zip(&oracle) {
            assert!((a - b).norm() <= 1e-12 * a.norm().max(1.0));
        }
    }

    #[test]
    fn modulus_never_exceeds_reflectance_sum() {
        let g = grid();
        let obj = ObjectSpec::from_vacuum_depths(&[50e-6, 220e-6, 470e-6], &[0.3, 0.9, 0.8])
            .unwrap();
        let tf = transfer_function(&obj, &g);
        let bound = tf.modulus_bound();
        for v in &tf.values {
            assert!(v.norm() <= bound + 1e-12);
        }
    }

    #[test]
    fn profile_peaks_at_center_pair() {
        let src = SourceSpec::default();
        let wc = src.center_omega();
        assert!((profile_at(&src, wc, wc) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn profile_is_swap_symmetric() {
        let src = SourceSpec::default();
        let g = grid();
        for &(i, j) in &[(0usize, 10usize), (3, 200), (100, 101), (255, 0)] {
            let a = profile_at(&src, g.omega[i], g.omega[j]);
            let b = profile_at(&src, g.omega[j], g.omega[i]);
            assert_eq!(a, b);
        }
    }

    #[test]
    fn profile_fwhm_along_antidiagonal_matches_bandwidth() {
        // Numerically measure the half-max points of the profile along the
        // main anti-diagonal in wavelength-equivalent units.
        let src = SourceSpec::default();
        let g = grid();
        let wc = g.center_omega;
        let target = 0.5;
        // profile(w_c + x, w_c - x) = exp(-4 ln2 (x / gp)^2 ); solve for x.
        let conv = src.omega_per_wavelength();
        let mut lo = 0.0;
        let mut hi = conv * 200e-9;
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if profile_at(&src, wc + mid, wc - mid) > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let fwhm_lambda = g.lambda_equivalent(2.0 * lo);
        assert!(
            (fwhm_lambda - 180e-9).abs() < 1e-12,
            "measured FWHM {fwhm_lambda:e}"
        );
    }

    #[test]
    fn empty_object_synthesizes_zero_matrix() {
        let js = synthesize_joint_spectrum(
            &ObjectSpec::empty(),
            &SourceSpec::default(),
            &SynthOptions::default(),
        )
        .unwrap();
        assert!(js.data.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn diagonal_is_exactly_zero() {
        let obj = ObjectSpec::from_vacuum_depths(&[200e-6, 340e-6], &[0.5, 0.5]).unwrap();
        let js = synthesize_joint_spectrum(&obj, &SourceSpec::default(), &SynthOptions::default())
            .unwrap();
        for i in 0..js.n {
            assert_eq!(js.at(i, i), 0.0);
        }
    }

    #[test]
    fn three_term_form_matches_squared_difference_oracle() {
        let obj =
            ObjectSpec::from_vacuum_depths(&[200e-6, 340e-6, 480e-6], &[0.5, 0.5, 0.5]).unwrap();
        let src = SourceSpec::default();
        let js =
            synthesize_joint_spectrum(&obj, &src, &SynthOptions::default()).unwrap();
        let g = &js.grid;
        let tf = transfer_function(&obj, g);
        let max = js.max_abs();
        for i in (0..js.n).step_by(7) {
            for j in (0..js.n).step_by(11) {
                let diff = tf.values[i] - tf.values[j];
                let oracle = profile_at(&src, g.omega[i], g.omega[j]) * diff.norm_sqr();
                assert!(
                    (js.at(i, j) - oracle).abs() <= 1e-12 * max,
                    "forms differ at ({i},{j}): {} vs {oracle}",
                    js.at(i, j)
                );
            }
        }
    }

    #[test]
    fn synthesis_invariants_hold_for_mixed_object() {
        let obj = ObjectSpec::new(vec![
            crate::model::Interface {
                reflectivity: 0.8,
                segment: crate::model::LayerSegment::vacuum(120e-6),
            },
            crate::model::Interface {
                reflectivity: 0.6,
                segment: crate::model::LayerSegment {
                    thickness: 180e-6,
                    group_index_coeff: 1.33 / crate::SPEED_OF_LIGHT,
                    beta2: 5e-25,
                    beta3: 0.0,
                },
            },
        ])
        .unwrap();
        let js = synthesize_joint_spectrum(&obj, &SourceSpec::default(), &SynthOptions::default())
            .unwrap();
        js.validate().unwrap();
    }

    #[test]
    fn grid_mismatch_is_rejected() {
        let src = SourceSpec::default();
        let g = grid();
        let mut small_src = src.clone();
        small_src.grid_size = 128;
        let small_grid = build_frequency_grid(&small_src).unwrap();
        let obj = ObjectSpec::from_vacuum_depths(&[100e-6], &[1.0]).unwrap();
        let tf = transfer_function(&obj, &small_grid);
        let err = synthesize_with_transfer(&tf, &src, &g, &SynthOptions::default());
        assert!(matches!(err, Err(Error::GridMismatch { .. })));
    }

    #[test]
    fn noise_is_deterministic_for_fixed_seed() {
        let obj = ObjectSpec::from_vacuum_depths(&[200e-6], &[0.5]).unwrap();
        let opts = SynthOptions {
            noise: Some(NoiseSpec {
                seed: 42,
                peak_snr_db: 30.0,
            }),
        };
        let a = synthesize_joint_spectrum(&obj, &SourceSpec::default(), &opts).unwrap();
        let b = synthesize_joint_spectrum(&obj, &SourceSpec::default(), &opts).unwrap();
        assert_eq!(a.data, b.data);
        let clean =
            synthesize_joint_spectrum(&obj, &SourceSpec::default(), &SynthOptions::default())
                .unwrap();
        assert_ne!(a.data, clean.data);
    }
}
