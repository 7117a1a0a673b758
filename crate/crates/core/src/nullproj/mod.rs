//! Nullspace projection beamforming at PanA.
//!
//! PanA takes the SVD of its estimate of the direct channel, removes the top
//! `K` right singular directions from its transmit space, and rescales so the
//! radiated energy is unchanged:
//!
//! ```text
//! P   = I − V_K·V_Kᴴ
//! P_s = √(M/(M−K)) · P
//! ```

mod svd;

pub use svd::{complex_svd, SvdResult};

use num_complex::Complex64;

use crate::error::{config, Result};
use crate::linalg::CMatrix;

/// Orthogonal projector `P` (M×M) and the energy-preserving scale.
///
/// `removed == 0` is the no-projection baseline: `P = I`, scale 1.
#[derive(Debug, Clone)]
pub struct Projector {
    pub p: CMatrix,
    /// Number of removed directions K.
    pub removed: usize,
    /// `√(M/(M−K))`.
    pub scale: f64,
}

impl Projector {
    pub fn identity(m: usize) -> Self {
        Self { p: CMatrix::identity(m, m), removed: 0, scale: 1.0 }
    }

    pub fn dim(&self) -> usize {
        self.p.nrows()
    }

    /// The scaled projector `P_s`.
    pub fn scaled(&self) -> CMatrix {
        &self.p * Complex64::from(self.scale)
    }
}

/// Builds `P = I − V_K·V_Kᴴ` from the estimated direct channel `Ĝ_AB` (N×M).
pub fn make_projector(g_ab_hat: &CMatrix, k: usize) -> Result<Projector> {
    let m = g_ab_hat.ncols();
    if k == 0 {
        return Err(config(
            "projection must remove at least one direction; use Projector::identity for none",
        ));
    }
    if k >= m {
        return Err(config(format!("cannot remove {k} of {m} transmit directions")));
    }
    let svd = complex_svd(g_ab_hat);
    if k > svd.rank() {
        return Err(config(format!("estimated channel has numerical rank {} < K = {k}", svd.rank())));
    }
    let vk = svd.v.columns(0, k);
    let p = CMatrix::identity(m, m) - vk * vk.adjoint();
    Ok(Projector { p, removed: k, scale: (m as f64 / (m - k) as f64).sqrt() })
}

/// `P_s·Ψ = √(M/(M−K))·P·Ψ`.
///
/// # Panics
/// If `psi` does not have `proj.dim()` rows.
pub fn apply_scaled(proj: &Projector, psi: &CMatrix) -> CMatrix {
    assert_eq!(psi.nrows(), proj.dim(), "probe rows must match projector size");
    (&proj.p * psi) * Complex64::from(proj.scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{fro2, max_abs_diff};
    use crate::scene::{build_channels, Position, SceneConfig};
    use crate::waveform::probe_matrix;

    #[test]
    fn perfect_rank_one_is_fully_nulled() {
        let ch = build_channels(&SceneConfig::default()).unwrap();
        let proj = make_projector(&ch.g_ab, 1).unwrap();
        let residual = &ch.g_ab * &proj.p;
        assert!(fro2(&residual).sqrt() < 1e-10 * fro2(&ch.g_ab).sqrt());
        let tr: f64 = proj.p.trace().re;
        assert!((tr - 15.0).abs() < 1e-8);
        assert!((proj.scale - (16.0f64 / 15.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn perfect_projection_removes_direct_energy() {
        let ch = build_channels(&SceneConfig::default().with_bsd(Position::new(3.0, 10.0))).unwrap();
        let proj = make_projector(&ch.g_ab, 1).unwrap();
        let psi = probe_matrix(16, 16, 3.0, 5e-6).unwrap();
        let x = apply_scaled(&proj, &psi);
        assert!(fro2(&(&ch.g_ab * &x)) < 1e-20 * fro2(&ch.g_ab) * fro2(&psi));
    }

    #[test]
    fn energy_preserved() {
        let ch = build_channels(&SceneConfig::default()).unwrap();
        let proj = make_projector(&ch.g_ab, 1).unwrap();
        let psi = probe_matrix(16, 24, 1.0, 1.0).unwrap();
        let x = apply_scaled(&proj, &psi);
        assert!((fro2(&x) / fro2(&psi) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn identity_projector_passes_through() {
        let psi = probe_matrix(4, 4, 1.0, 1.0).unwrap();
        let out = apply_scaled(&Projector::identity(4), &psi);
        assert_eq!(out, psi);
    }

    #[test]
    fn columns_in_removed_span_vanish() {
        let ch = build_channels(&SceneConfig::default()).unwrap();
        let proj = make_projector(&ch.g_ab, 1).unwrap();
        let v1 = complex_svd(&ch.g_ab).v.column(0).into_owned();
        let psi = CMatrix::from_fn(16, 3, |i, j| v1[i] * Complex64::new(j as f64 + 1.0, 0.5));
        assert!(fro2(&apply_scaled(&proj, &psi)) < 1e-24);
    }

    #[test]
    fn k_bounds_enforced() {
        let ch = build_channels(&SceneConfig::default()).unwrap();
        assert!(make_projector(&ch.g_ab, 0).is_err());
        assert!(make_projector(&ch.g_ab, 16).is_err());
        // The LoS channel has rank one.
        assert!(make_projector(&ch.g_ab, 2).is_err());
    }

    #[test]
    fn projector_ignores_complex_rescaling() {
        let ch = build_channels(&SceneConfig::default().with_bsd(Position::new(3.0, 5.0))).unwrap();
        let noisy = &ch.g_ab
            + CMatrix::from_fn(16, 16, |i, j| {
                Complex64::new(((i * 7 + j * 3) % 5) as f64 * 0.01, ((i + 2 * j) % 3) as f64 * 0.01)
            });
        let a = make_projector(&noisy, 2).unwrap();
        let b = make_projector(&(&noisy * Complex64::new(-3.0, 1.7)), 2).unwrap();
        assert!(max_abs_diff(&a.p, &b.p) < 1e-10);
    }
}
