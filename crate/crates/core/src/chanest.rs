//! Phase I: pilot reception at PanA and least-squares estimation of the
//! PanB → PanA channel.

use crate::error::{Result, SimError};
use crate::linalg::CMatrix;
use crate::noise::NoiseSource;

/// Pilot block received at PanA in one Phase I slot (M×τ_p).
#[derive(Debug, Clone, PartialEq)]
pub struct PilotObservation {
    pub y: CMatrix,
    pub slot: usize,
}

/// `Y_p = G_BA·Φ + W` with the BSD silent.
pub fn receive_pilots(
    g_ba: &CMatrix,
    phi: &CMatrix,
    slot: usize,
    noise: &mut impl NoiseSource,
) -> Result<PilotObservation> {
    if g_ba.ncols() != phi.nrows() {
        return Err(SimError::Config(format!(
            "channel has {} columns but the pilot has {} rows",
            g_ba.ncols(),
            phi.nrows()
        )));
    }
    let mut y = g_ba * phi;
    noise.add_to(&mut y);
    Ok(PilotObservation { y, slot })
}

/// Least-squares estimator for a fixed pilot matrix.
///
/// Holds `Φᴴ(ΦΦᴴ)⁻¹` so repeated estimates cost one product per slot.
#[derive(Debug, Clone)]
pub struct LsEstimator {
    right_inverse: CMatrix,
}

impl LsEstimator {
    pub fn new(phi: &CMatrix) -> Result<Self> {
        let gram = phi * phi.adjoint();
        let inv =
            gram.try_inverse().ok_or_else(|| SimError::Config("pilot Gram matrix is singular".into()))?;
        Ok(Self { right_inverse: phi.adjoint() * inv })
    }

    /// `Ĝ_BA = (1/J_p)·Σ_j Y_j·Φᴴ(ΦΦᴴ)⁻¹`.
    pub fn estimate(&self, observations: &[PilotObservation]) -> Result<CMatrix> {
        let first = observations
            .first()
            .ok_or_else(|| SimError::Usage("least-squares estimate needs at least one pilot slot".into()))?;
        let tau = self.right_inverse.nrows();
        let rows = first.y.nrows();
        let mut sum = CMatrix::zeros(rows, tau);
        for obs in observations {
            if obs.y.shape() != (rows, tau) {
                return Err(SimError::Config(format!(
                    "pilot observation in slot {} has shape {:?}, expected ({rows}, {tau})",
                    obs.slot,
                    obs.y.shape()
                )));
            }
            sum += &obs.y;
        }
        sum /= num_complex::Complex64::from(observations.len() as f64);
        Ok(sum * &self.right_inverse)
    }
}

pub fn ls_estimate(observations: &[PilotObservation], phi: &CMatrix) -> Result<CMatrix> {
    LsEstimator::new(phi)?.estimate(observations)
}

/// Runs all Phase I slots and returns the estimate of `G_AB` (N×M) by reciprocity.
pub fn estimate_g_ab(
    g_ab: &CMatrix,
    estimator: &LsEstimator,
    phi: &CMatrix,
    pilot_slots: usize,
    noise: &mut impl NoiseSource,
) -> Result<CMatrix> {
    let g_ba = g_ab.transpose();
    let obs = (0..pilot_slots).map(|j| receive_pilots(&g_ba, phi, j, noise)).collect::<Result<Vec<_>>>()?;
    Ok(estimator.estimate(&obs)?.transpose())
}
