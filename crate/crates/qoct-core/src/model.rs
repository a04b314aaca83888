//! Domain types, unit conventions and frequency-grid construction shared
//! by all other modules.
//!
//! # Units
//!
//! SI throughout: lengths in metres, angular frequency in rad/s,
//! dispersion coefficients in s^2/m and s^3/m. Optical depth is carried
//! internally as a group delay in seconds and reported as an optical
//! length (delay times c). Depth axes everywhere use optical length.

use crate::{Error, Result};

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Photon-pair source parameters.
///
/// `diagonal_bandwidth` is the FWHM of the joint spectral profile along
/// the diagonal (detuning) direction and also fixes the wavelength span
/// of the sampling grid. `antidiagonal_fwhm` is the FWHM of the pump
/// (central-frequency) distribution.
#[derive(Debug, Clone)]
pub struct SourceSpec {
    /// Center wavelength (m).
    pub center_wavelength: f64,
    /// FWHM of the single-photon spectrum / grid wavelength span (m).
    pub diagonal_bandwidth: f64,
    /// FWHM of the central-frequency (pump) distribution (m).
    pub antidiagonal_fwhm: f64,
    /// Number of samples per spectral axis; must be even and >= 8.
    pub grid_size: usize,
}

impl Default for SourceSpec {
    fn default() -> Self {
        Self {
            center_wavelength: 1560e-9,
            diagonal_bandwidth: 180e-9,
            antidiagonal_fwhm: 70e-9,
            grid_size: 256,
        }
    }
}

impl SourceSpec {
    /// Checks the field invariants.
    pub fn validate(&self) -> Result<()> {
        if !(self.center_wavelength > 0.0) {
            return Err(Error::InvalidSource("center_wavelength must be > 0".into()));
        }
        if !(self.diagonal_bandwidth > 0.0 && self.diagonal_bandwidth < self.center_wavelength) {
            return Err(Error::InvalidSource(
                "diagonal_bandwidth must satisfy 0 < bandwidth < center_wavelength".into(),
            ));
        }
        if !(self.antidiagonal_fwhm > 0.0) {
            return Err(Error::InvalidSource("antidiagonal_fwhm must be > 0".into()));
        }
        if self.grid_size < 8 || self.grid_size % 2 != 0 {
            return Err(Error::InvalidSource(format!(
                "grid_size must be even and >= 8, got {}",
                self.grid_size
            )));
        }
        Ok(())
    }

    /// Center angular frequency 2*pi*c / lambda_c (rad/s).
    pub fn center_omega(&self) -> f64 {
        2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / self.center_wavelength
    }

    /// |d omega / d lambda| evaluated at the center wavelength.
    pub fn omega_per_wavelength(&self) -> f64 {
        2.0 * std::f64::consts::PI * SPEED_OF_LIGHT
            / (self.center_wavelength * self.center_wavelength)
    }
}

/// Uniform angular-frequency sampling grid, symmetric about the center
/// frequency.
///
/// The wavelength span `diagonal_bandwidth` is mapped to an omega span
/// through the first-order conversion at the center wavelength, so
/// `delta_lambda` is exactly `span / (N - 1)` and
/// `omega[i] + omega[N-1-i] = 2 omega_c` holds to machine precision.
#[derive(Debug, Clone)]
pub struct FrequencyGrid {
    /// Sample frequencies (rad/s), ascending.
    pub omega: Vec<f64>,
    /// Grid step (rad/s).
    pub delta_omega: f64,
    /// Wavelength-equivalent grid step at the center frequency (m).
    pub delta_lambda: f64,
    /// Center frequency (rad/s); not itself a sample point (N is even).
    pub center_omega: f64,
}

impl FrequencyGrid {
    /// Number of samples.
    pub fn len(&self) -> usize {
        self.omega.len()
    }

    /// True if the grid has no samples (never, for a validated source).
    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    /// Converts an angular-frequency interval (rad/s) to its
    /// wavelength-equivalent (m) at the grid center.
    pub fn lambda_equivalent(&self, domega: f64) -> f64 {
        let lam_c = 2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / self.center_omega;
        domega * lam_c * lam_c / (2.0 * std::f64::consts::PI * SPEED_OF_LIGHT)
    }

    /// Depth-axis pixel (optical length, m) of an FFT over `len` samples
    /// spaced by `delta_omega`, under the convention that a fringe
    /// exp(i 2 z w') lands at depth z.
    pub fn depth_pixel(&self, len: usize) -> f64 {
        SPEED_OF_LIGHT * 2.0 * std::f64::consts::PI / (len as f64 * self.delta_omega) / 2.0
    }
}

/// Builds the sampling grid implied by a source spec.
///
/// N uniformly spaced omega samples centered on omega_c, spanning the
/// omega-equivalent of the source's wavelength span.
pub fn build_frequency_grid(source: &SourceSpec) -> Result<FrequencyGrid> {
    source.validate()?;
    let n = source.grid_size;
    let delta_lambda = source.diagonal_bandwidth / (n as f64 - 1.0);
    let delta_omega = source.omega_per_wavelength() * delta_lambda;
    let center = source.center_omega();
    let half = (n as f64 - 1.0) / 2.0;
    let omega = (0..n)
        .map(|i| center + (i as f64 - half) * delta_omega)
        .collect();
    Ok(FrequencyGrid {
        omega,
        delta_omega,
        delta_lambda,
        center_omega: center,
    })
}

/// One homogeneous segment of the object, preceding an interface.
///
/// The wavenumber of the segment is modeled as
/// `beta(w) = beta1 * w + beta2 * (w - w_c)^2 + beta3 * (w - w_c)^3`
/// with the constant term dropped (it only shifts the global fringe
/// phase). `beta1` is the inverse group velocity; dispersion orders are
/// expanded in the detuning from the grid center.
#[derive(Debug, Clone, Copy)]
pub struct LayerSegment {
    /// Geometric thickness (m), >= 0.
    pub thickness: f64,
    /// Inverse group velocity beta^(1) (s/m).
    pub group_index_coeff: f64,
    /// Second-order dispersion beta^(2) (s^2/m).
    pub beta2: f64,
    /// Third-order dispersion beta^(3) (s^3/m).
    pub beta3: f64,
}

impl LayerSegment {
    /// A vacuum segment of the given thickness.
    pub fn vacuum(thickness: f64) -> Self {
        Self {
            thickness,
            group_index_coeff: 1.0 / SPEED_OF_LIGHT,
            beta2: 0.0,
            beta3: 0.0,
        }
    }

    /// A dispersion-free segment with the given group index.
    pub fn with_group_index(thickness: f64, group_index: f64) -> Self {
        Self {
            thickness,
            group_index_coeff: group_index / SPEED_OF_LIGHT,
            beta2: 0.0,
            beta3: 0.0,
        }
    }
}

/// One reflective interface together with the segment traversed before
/// reaching it.
#[derive(Debug, Clone, Copy)]
pub struct Interface {
    /// Reflectivity R in [0, 1].
    pub reflectivity: f64,
    /// Segment between the previous interface (or the source side) and
    /// this one.
    pub segment: LayerSegment,
}

/// Ordered list of interfaces; the zero-depth boundary R_0 = 0 is built
/// in. An empty list is the vacuum object.
#[derive(Debug, Clone, Default)]
pub struct ObjectSpec {
    pub interfaces: Vec<Interface>,
}

impl ObjectSpec {
    /// Validating constructor.
    pub fn new(interfaces: Vec<Interface>) -> Result<Self> {
        let spec = Self { interfaces };
        spec.validate()?;
        Ok(spec)
    }

    /// The empty (vacuum) object.
    pub fn empty() -> Self {
        Self::default()
    }

    /// Dispersion-free object in vacuum: interfaces at the given
    /// cumulative optical depths (m) with the given reflectivities.
    pub fn from_vacuum_depths(depths: &[f64], reflectivities: &[f64]) -> Result<Self> {
        if depths.len() != reflectivities.len() {
            return Err(Error::InvalidObject(
                "depths and reflectivities must have equal length".into(),
            ));
        }
        let mut prev = 0.0;
        let mut interfaces = Vec::with_capacity(depths.len());
        for (&d, &r) in depths.iter().zip(reflectivities) {
            if d < prev {
                return Err(Error::InvalidObject("depths must be non-decreasing".into()));
            }
            interfaces.push(Interface {
                reflectivity: r,
                segment: LayerSegment::vacuum(d - prev),
            });
            prev = d;
        }
        Self::new(interfaces)
    }

    /// Checks the field invariants.
    pub fn validate(&self) -> Result<()> {
        for (n, iface) in self.interfaces.iter().enumerate() {
            if !(0.0..=1.0).contains(&iface.reflectivity) {
                return Err(Error::InvalidObject(format!(
                    "reflectivity of interface {n} out of [0, 1]"
                )));
            }
            if iface.segment.thickness < 0.0 {
                return Err(Error::InvalidObject(format!(
                    "segment {n} has negative thickness"
                )));
            }
        }
        Ok(())
    }

    /// Number of interfaces.
    pub fn len(&self) -> usize {
        self.interfaces.len()
    }

    /// True for the vacuum object.
    pub fn is_empty(&self) -> bool {
        self.interfaces.is_empty()
    }
}

/// Effective reflectance of each interface: S_n = R_n * prod_{m<=n} (1 - R_{m-1})
/// with R_0 = 0, i.e. the reflectivity attenuated by all shallower
/// interfaces on the way in.
pub fn effective_reflectance(object: &ObjectSpec) -> Vec<f64> {
    let mut out = Vec::with_capacity(object.len());
    let mut attenuation = 1.0;
    for (n, iface) in object.interfaces.iter().enumerate() {
        if n > 0 {
            attenuation *= 1.0 - object.interfaces[n - 1].reflectivity;
        }
        out.push(iface.reflectivity * attenuation);
    }
    out
}

/// Cumulative group delay of each interface (s):
/// ztilde_n = sum_{m<=n} z_m * beta1_m.
pub fn optical_delays(object: &ObjectSpec) -> Vec<f64> {
    let mut out = Vec::with_capacity(object.len());
    let mut acc = 0.0;
    for iface in &object.interfaces {
        acc += iface.segment.thickness * iface.segment.group_index_coeff;
        out.push(acc);
    }
    out
}

/// Cumulative optical depth of each interface expressed as a length (m):
/// c times the group delay.
pub fn optical_depths(object: &ObjectSpec) -> Vec<f64> {
    optical_delays(object)
        .into_iter()
        .map(|d| d * SPEED_OF_LIGHT)
        .collect()
}
