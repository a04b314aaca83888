//! Artefact removal by a two-dimensional Fourier transform of the joint
//! spectrum.
//!
//! In the transformed plane (z_a, z_b) every interface pair (n, u)
//! produces a peak at (z_n, -z_u): structural peaks (n = u) sit on the
//! z_b = -z_a diagonal, artefacts away from it, so sampling that diagonal
//! yields an artefact-suppressed A-scan. The diagonal's geometric
//! coordinate sqrt(2) z is multiplied by sqrt(2) and halved per the
//! shared depth convention, landing structural peaks at their true
//! optical depths.
//!
//! The transform of the (w_0, w') diagonal stack is the same map rotated
//! by 45 degrees; its middle row is the stack-based A-scan.

use crate::algo_avg::{AScan, AScanMeta, AlgorithmId};
use crate::fft::fft2_in_place;
use crate::stack::DiagonalStack;
use crate::synth::JointSpectrum;
use crate::{Error, Result};
use num_complex::Complex64;

/// Orientation of a [`FourierMap`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    /// Axes conjugate to (w_a, w_b).
    AxisAligned,
    /// Axes conjugate to (w', w_0); a 45-degree rotation of the above.
    Rotated,
}

/// Complex 2D Fourier transform with centered (fftshifted) storage so
/// both axes are monotone ascending; the DC bin sits at index
/// (rows/2, cols/2).
#[derive(Debug, Clone)]
pub struct FourierMap {
    data: Vec<Complex64>,
    pub rows: usize,
    pub cols: usize,
    /// Optical-length coordinate of each row (m), ascending.
    pub axis_row: Vec<f64>,
    /// Optical-length coordinate of each column (m), ascending.
    pub axis_col: Vec<f64>,
    pub frame: Frame,
}

impl FourierMap {
    /// Complex value at (row, col).
    pub fn at(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.cols + c]
    }

    /// Magnitude at (row, col).
    pub fn magnitude(&self, r: usize, c: usize) -> f64 {
        self.at(r, c).norm()
    }

    /// Row-major magnitudes.
    pub fn magnitudes(&self) -> Vec<f64> {
        self.data.iter().map(|c| c.norm()).collect()
    }

    /// Largest magnitude.
    pub fn max_magnitude(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, c| m.max(c.norm()))
    }
}

fn fftshift_axis(len: usize, bin: f64) -> Vec<f64> {
    (0..len)
        .map(|i| (i as isize - (len / 2) as isize) as f64 * bin)
        .collect()
}

fn shift2(data: &[Complex64], rows: usize, cols: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::default(); data.len()];
    for r in 0..rows {
        let sr = (r + rows / 2) % rows;
        for c in 0..cols {
            let sc = (c + cols / 2) % cols;
            out[sr * cols + sc] = data[r * cols + c];
        }
    }
    out
}

/// Optional zero padding of the transform, for smoother maps. Acceptance
/// numbers hold without padding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Padding {
    #[default]
    None,
    /// Pad both axes to twice their length.
    Twice,
}

impl Padding {
    fn factor(&self) -> usize {
        match self {
            Padding::None => 1,
            Padding::Twice => 2,
        }
    }
}

/// 2D Fourier transform of the joint spectrum over (w_a, w_b).
///
/// A fringe exp(i z w_a) lands at z_a = z (optical length, no halving:
/// these axes live in one-way delay space). The unshifted transform puts
/// the z_b = -z_a diagonal onto the matrix anti-diagonal through the
/// origin; storage is fftshifted so the axes read monotonically.
pub fn fft2_joint(js: &JointSpectrum) -> FourierMap {
    fft2_joint_padded(js, Padding::None)
}

/// [`fft2_joint`] with optional zero padding.
pub fn fft2_joint_padded(js: &JointSpectrum, padding: Padding) -> FourierMap {
    let n = js.n;
    let m = n * padding.factor();
    let mut buf = vec![Complex64::default(); m * m];
    for i in 0..n {
        for j in 0..n {
            buf[i * m + j] = Complex64::new(js.at(i, j), 0.0);
        }
    }
    fft2_in_place(&mut buf, m, m);
    let data = shift2(&buf, m, m);
    let bin = crate::SPEED_OF_LIGHT * 2.0 * std::f64::consts::PI
        / (m as f64 * js.grid.delta_omega);
    FourierMap {
        data,
        rows: m,
        cols: m,
        axis_row: fftshift_axis(m, bin),
        axis_col: fftshift_axis(m, bin),
        frame: Frame::AxisAligned,
    }
}

/// Samples the z_b = -z_a diagonal of an axis-aligned map into an A-scan.
///
/// Walks t = 0 .. rows/2 - 1 over cells (z_a, z_b) = (t, -t) bins; the
/// depth of step t is t times the map bin, which places structural peaks
/// at their true optical depths with doubled resolving power.
pub fn extract_diagonal_ascan(map: &FourierMap) -> Result<AScan> {
    if map.frame != Frame::AxisAligned {
        return Err(Error::WrongFrame);
    }
    let half = map.rows / 2;
    let bin = map.axis_row[half + 1] - map.axis_row[half];
    let mut amplitude = Vec::with_capacity(half);
    for t in 0..half {
        let r = half + t;
        let c = half - t;
        amplitude.push(map.magnitude(r, c));
    }
    Ok(AScan {
        depth_axis: (0..half).map(|t| t as f64 * bin).collect(),
        amplitude,
        meta: AScanMeta {
            algorithm: AlgorithmId::Fft2JointDiagonal,
            k_used: None,
            lambda0_span: None,
        },
    })
}

/// 2D Fourier transform of the diagonal stack over (w_0, w') — the
/// rotated-frame map — together with its middle-row A-scan.
///
/// The middle row (zero offset along the axis conjugate to w_0) is the
/// coherent uniform sum of all rows, transformed over w'; its depth axis
/// uses the same halved calibration as the averaging pipeline.
pub fn fft2_stack(stack: &DiagonalStack) -> (FourierMap, AScan) {
    let k = stack.k;
    let l = stack.len;
    let mut buf: Vec<Complex64> = stack
        .data()
        .iter()
        .map(|&x| Complex64::new(x, 0.0))
        .collect();
    fft2_in_place(&mut buf, k, l);

    // middle row = zero frequency along w_0, i.e. row 0 of the unshifted
    // transform; positive-depth half under the halved depth convention
    let half = l / 2;
    let px = crate::SPEED_OF_LIGHT * std::f64::consts::PI / (l as f64 * stack.delta_omega);
    let amplitude: Vec<f64> = (0..half).map(|t| buf[t].norm()).collect();
    let ascan = AScan {
        depth_axis: (0..half).map(|t| t as f64 * px).collect(),
        amplitude,
        meta: AScanMeta {
            algorithm: AlgorithmId::Fft2StackMiddleRow,
            k_used: Some(k),
            lambda0_span: Some(stack.lambda0_span),
        },
    };

    let data = shift2(&buf, k, l);
    // parallel axis: conjugate to w', halved like every depth axis;
    // perpendicular axis: conjugate to w_0, plain delay-to-length
    let bin_par = px;
    let bin_perp =
        crate::SPEED_OF_LIGHT * 2.0 * std::f64::consts::PI / (k as f64 * stack.delta_omega);
    let map = FourierMap {
        data,
        rows: k,
        cols: l,
        axis_row: fftshift_axis(k, bin_perp),
        axis_col: fftshift_axis(l, bin_par),
        frame: Frame::Rotated,
    };
    (map, ascan)
}
