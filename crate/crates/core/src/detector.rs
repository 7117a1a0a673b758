//! Phase II: reception at PanB and Neyman-Pearson detection of the BSD.
//!
//! With perfect channel knowledge at the reader, the log-likelihood ratio
//! reduces to the linear statistic
//!
//! ```text
//! L′ = Σ_j Re{Tr(A_j·(Y_j − D)ᴴ)},   A_j = γ_j·g_CB·g_ACᵀ·P_s·Ψ,   D = G_AB·P_s·Ψ
//! ```
//!
//! which is Gaussian with variance `½·Σ‖A_j‖²` under both hypotheses and mean
//! `Σ‖A_j‖²` (H1) or 0 (H0).

use num_complex::Complex64;

use crate::error::{domain, Result, SimError};
use crate::linalg::{fro2, CMatrix};
use crate::noise::NoiseSource;
use crate::nullproj::{apply_scaled, Projector};
use crate::qfunc::{q_func, q_inv};
use crate::scene::ChannelSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Hypothesis {
    /// BSD absent.
    H0,
    /// BSD present.
    H1,
}

impl Hypothesis {
    pub fn present(self) -> bool {
        self == Hypothesis::H1
    }
}

/// Block received at PanB in one Phase II slot (N×τ_d).
#[derive(Debug, Clone)]
pub struct Phase2Observation {
    pub y: CMatrix,
    pub slot: usize,
    pub hypothesis: Hypothesis,
}

/// What the reader knows: the direct term and each slot's backscatter term.
#[derive(Debug, Clone)]
pub struct DetectorSideInfo {
    /// `A_j`, one per Phase II slot; zero where `γ_j = 0`.
    pub a_list: Vec<CMatrix>,
    /// `D = G_AB·P_s·Ψ`.
    pub direct: CMatrix,
    /// `Σ_j ‖A_j‖²`.
    pub sum_a2: f64,
}

/// `g_CB·(g_ACᵀ·X)`, the backscatter contribution for reflecting slots.
fn backscatter_term(channels: &ChannelSet, x: &CMatrix) -> CMatrix {
    let row = channels.g_ac.transpose() * x;
    &channels.g_cb * row
}

/// `Y_j = G_AB·X + [present]·γ_j·g_CB·g_ACᵀ·X + W`, where `X = P_s·Ψ`.
pub fn receive_phase2(
    channels: &ChannelSet,
    x: &CMatrix,
    gamma: bool,
    hypothesis: Hypothesis,
    slot: usize,
    noise: &mut impl NoiseSource,
) -> Phase2Observation {
    let mut y = &channels.g_ab * x;
    if hypothesis.present() && gamma {
        y += backscatter_term(channels, x);
    }
    noise.add_to(&mut y);
    Phase2Observation { y, slot, hypothesis }
}

/// Side information from the true channels and the projector PanA actually used.
pub fn side_info(
    channels: &ChannelSet,
    proj: &Projector,
    psi: &CMatrix,
    gamma_schedule: &[bool],
) -> DetectorSideInfo {
    let x = apply_scaled(proj, psi);
    let direct = &channels.g_ab * &x;
    let bs = backscatter_term(channels, &x);
    let zero = CMatrix::zeros(bs.nrows(), bs.ncols());
    let a_list: Vec<CMatrix> =
        gamma_schedule.iter().map(|&g| if g { bs.clone() } else { zero.clone() }).collect();
    let sum_a2 = a_list.iter().map(fro2).sum();
    DetectorSideInfo { a_list, direct, sum_a2 }
}

/// `L′ = Σ_j Re{Tr(A_j·(Y_j − D)ᴴ)}`.
pub fn np_statistic(observations: &[Phase2Observation], info: &DetectorSideInfo) -> Result<f64> {
    if observations.len() != info.a_list.len() {
        return Err(SimError::Usage(format!(
            "{} observations for a {}-slot schedule",
            observations.len(),
            info.a_list.len()
        )));
    }
    let mut stat = 0.0;
    for (obs, a) in observations.iter().zip(&info.a_list) {
        if obs.y.shape() != a.shape() {
            return Err(SimError::Usage(format!(
                "observation in slot {} has shape {:?}, expected {:?}",
                obs.slot,
                obs.y.shape(),
                a.shape()
            )));
        }
        for ((y, d), a) in obs.y.iter().zip(info.direct.iter()).zip(a.iter()) {
            stat += (a * (y - d).conj()).re;
        }
    }
    Ok(stat)
}

/// `η′ = √(Σ‖A_j‖²/2)·Q⁻¹(P_FA)`.
pub fn threshold_for_pfa(p_fa: f64, sum_a2: f64) -> Result<f64> {
    if !(sum_a2 > 0.0) {
        return Err(SimError::DegenerateTest);
    }
    if !(p_fa > 0.0 && p_fa < 1.0) {
        return Err(domain(format!("false-alarm probability must lie in (0, 1), got {p_fa}")));
    }
    Ok((sum_a2 / 2.0).sqrt() * q_inv(p_fa)?)
}

/// Closed-form ROC: `P_D = Q(Q⁻¹(P_FA) − √(2·Σ‖A_j‖²))`.
pub fn theoretical_pd(p_fa: f64, sum_a2: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&p_fa) && sum_a2 >= 0.0);
    if p_fa <= 0.0 {
        return 0.0;
    }
    if p_fa >= 1.0 {
        return 1.0;
    }
    let x = q_inv(p_fa).expect("p_fa checked to lie in (0, 1)");
    q_func(x - (2.0 * sum_a2.max(0.0)).sqrt())
}

/// Allocation-free Phase II trial runner.
///
/// Produces exactly the statistic that [`receive_phase2`] followed by
/// [`np_statistic`] would, drawing noise in the same order.
#[derive(Debug, Clone)]
pub struct Phase2Simulator {
    direct: CMatrix,
    backscatter: CMatrix,
    schedule: Vec<bool>,
}

impl Phase2Simulator {
    pub fn new(channels: &ChannelSet, x: &CMatrix, schedule: &[bool]) -> Self {
        Self {
            direct: &channels.g_ab * x,
            backscatter: backscatter_term(channels, x),
            schedule: schedule.to_vec(),
        }
    }

    pub fn statistic(&self, hypothesis: Hypothesis, noise: &mut impl NoiseSource) -> f64 {
        let present = hypothesis.present();
        let mut stat = 0.0;
        for &gamma in &self.schedule {
            let add = present && gamma;
            for (d, b) in self.direct.iter().zip(self.backscatter.iter()) {
                let mut y: Complex64 = *d;
                if add {
                    y += b;
                }
                y += noise.draw();
                if gamma {
                    stat += (b * (y - d).conj()).re;
                }
            }
        }
        stat
    }
}
