//! Line-of-sight geometry for the carrier emitter (PanA), the reader (PanB)
//! and the backscatter device (BSD).
//!
//! Both panels are uniform linear arrays laid out along the y-axis and
//! centered on their panel position, so a panel looks broadside along the
//! x-axis baseline. Channels use the far-field planar-wavefront model: each
//! link is a path-loss amplitude times unit-modulus steering vectors, which
//! makes the panel-to-panel channel exactly rank one.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{config, domain, Result};
use crate::linalg::{CMatrix, CVector};

/// A point in the plane, in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Position) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Unit vector along which both arrays are laid out.
const ARRAY_AXIS: (f64, f64) = (0.0, 1.0);

#[derive(Debug, Clone, PartialEq)]
pub struct SceneConfig {
    pub pan_a_center: Position,
    pub pan_b_center: Position,
    pub bsd_pos: Position,
    /// Antenna count at PanA (M).
    pub pan_a_antennas: usize,
    /// Antenna count at PanB (N).
    pub pan_b_antennas: usize,
    pub element_spacing: f64,
    pub wavelength: f64,
}

impl Default for SceneConfig {
    fn default() -> Self {
        Self {
            pan_a_center: Position::new(0.0, 0.0),
            pan_b_center: Position::new(6.0, 0.0),
            bsd_pos: Position::new(3.0, 3.0),
            pan_a_antennas: 16,
            pan_b_antennas: 16,
            element_spacing: 0.05,
            wavelength: 0.1,
        }
    }
}

impl SceneConfig {
    pub fn with_bsd(&self, bsd_pos: Position) -> Self {
        Self { bsd_pos, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.pan_a_antennas == 0 || self.pan_b_antennas == 0 {
            return Err(config("antenna counts must be at least 1"));
        }
        if !(self.element_spacing > 0.0) {
            return Err(config("element spacing must be positive"));
        }
        if !(self.wavelength > 0.0) {
            return Err(config("wavelength must be positive"));
        }
        let pts = [self.pan_a_center, self.pan_b_center, self.bsd_pos];
        if pts.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(config("positions must be finite"));
        }
        for (i, a) in pts.iter().enumerate() {
            for b in &pts[i + 1..] {
                if !(a.distance(b) > 0.0) {
                    return Err(config("PanA, PanB and BSD positions must be pairwise distinct"));
                }
            }
        }
        Ok(())
    }

    pub fn d_ab(&self) -> f64 {
        self.pan_a_center.distance(&self.pan_b_center)
    }

    pub fn d_ac(&self) -> f64 {
        self.pan_a_center.distance(&self.bsd_pos)
    }

    pub fn d_cb(&self) -> f64 {
        self.bsd_pos.distance(&self.pan_b_center)
    }
}

/// The deterministic channels of one scene.
///
/// Reverse-direction channels follow from reciprocity and are exposed as
/// views rather than stored: `G_BA = G_ABᵀ`, `g_CA = g_AC`, `g_BC = g_CB`.
#[derive(Debug, Clone)]
pub struct ChannelSet {
    /// PanA → PanB, N×M.
    pub g_ab: CMatrix,
    /// PanA → BSD, length M (enters the model transposed).
    pub g_ac: CVector,
    /// BSD → PanB, length N.
    pub g_cb: CVector,
    pub beta_ab: f64,
    pub beta_ac: f64,
    pub beta_cb: f64,
}

impl ChannelSet {
    pub fn pan_a_antennas(&self) -> usize {
        self.g_ab.ncols()
    }

    pub fn pan_b_antennas(&self) -> usize {
        self.g_ab.nrows()
    }

    /// PanB → PanA, M×N.
    pub fn g_ba(&self) -> CMatrix {
        self.g_ab.transpose()
    }

    /// The two-hop backscatter channel `g_CB · g_ACᵀ`, N×M.
    pub fn backscatter(&self) -> CMatrix {
        crate::linalg::outer_t(&self.g_cb, &self.g_ac)
    }
}

/// Free-space path-loss coefficient `1/d²`.
pub fn path_loss(d: f64) -> Result<f64> {
    if !(d > 0.0) || !d.is_finite() {
        return Err(domain(format!("path loss needs a positive finite distance, got {d}")));
    }
    Ok(1.0 / (d * d))
}

/// Far-field response of a ULA centered at `center` toward `target`.
///
/// Element `i` sits at offset `(i − (n−1)/2)·spacing` along the array axis
/// and contributes `exp(−j·2π·(r̂·p_i)/λ)`.
pub fn steering_vector(
    center: Position,
    n_elems: usize,
    spacing: f64,
    wavelength: f64,
    target: Position,
) -> Result<CVector> {
    let dist = center.distance(&target);
    if !(dist > 0.0) {
        return Err(domain("steering target coincides with the array center"));
    }
    if !(wavelength > 0.0) {
        return Err(domain("wavelength must be positive"));
    }
    let (ux, uy) = ((target.x - center.x) / dist, (target.y - center.y) / dist);
    let cos_axis = ux * ARRAY_AXIS.0 + uy * ARRAY_AXIS.1;
    let mid = (n_elems as f64 - 1.0) / 2.0;
    Ok(CVector::from_fn(n_elems, |i, _| {
        let offset = (i as f64 - mid) * spacing;
        Complex64::from_polar(1.0, -2.0 * PI * offset * cos_axis / wavelength)
    }))
}

pub fn build_channels(scene: &SceneConfig) -> Result<ChannelSet> {
    scene.validate()?;
    let m = scene.pan_a_antennas;
    let n = scene.pan_b_antennas;
    let (a, b, c) = (scene.pan_a_center, scene.pan_b_center, scene.bsd_pos);
    let sv = |center, count, target| {
        steering_vector(center, count, scene.element_spacing, scene.wavelength, target)
    };

    let beta_ab = path_loss(scene.d_ab())?;
    let beta_ac = path_loss(scene.d_ac())?;
    let beta_cb = path_loss(scene.d_cb())?;

    let rx_b_from_a = sv(b, n, a)?;
    let tx_a_to_b = sv(a, m, b)?;
    let g_ab = crate::linalg::outer_t(&rx_b_from_a, &tx_a_to_b) * Complex64::from(beta_ab.sqrt());
    let g_ac = sv(a, m, c)? * Complex64::from(beta_ac.sqrt());
    let g_cb = sv(b, n, c)? * Complex64::from(beta_cb.sqrt());

    Ok(ChannelSet { g_ab, g_ac, g_cb, beta_ab, beta_ac, beta_cb })
}
