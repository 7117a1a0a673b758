//! SNR-to-power calibration and the dynamic-range figure of merit ζ.

use crate::chanest::{estimate_g_ab, LsEstimator};
use crate::error::{domain, Result};
use crate::exec::Exec;
use crate::linalg::{fro2, norm2, CMatrix};
use crate::noise::StreamFamily;
use crate::nullproj::{apply_scaled, make_projector, Projector};
use crate::scene::{build_channels, ChannelSet, SceneConfig};
use crate::waveform::{pilot_matrix, probe_matrix, PhaseParams};

/// Backscatter power below this fraction of its unprojected reference is
/// treated as exactly zero, making ζ undefined.
const UNDEFINED_REL: f64 = 1e-20;

/// Operating point, in dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrSpec {
    /// Phase I (channel estimation) SNR.
    pub snr_p_db: f64,
    /// Phase II (detection) SNR.
    pub snr_d_db: f64,
}

impl Default for SnrSpec {
    fn default() -> Self {
        Self { snr_p_db: 30.0, snr_d_db: -10.0 }
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

fn require_positive(factors: &[(&str, f64)]) -> Result<()> {
    for (name, v) in factors {
        if !(*v > 0.0) || !v.is_finite() {
            return Err(domain(format!("{name} must be positive and finite, got {v}")));
        }
    }
    Ok(())
}

/// Phase I transmit power from `SNR_p = β_BA·p_t·J_p·τ_p·L`.
pub fn power_from_snr_p(
    snr_p: f64,
    beta_ba: f64,
    pilot_slots: usize,
    pilot_len: usize,
    symbol_length: f64,
) -> Result<f64> {
    require_positive(&[
        ("SNR_p", snr_p),
        ("beta_BA", beta_ba),
        ("J_p", pilot_slots as f64),
        ("tau_p", pilot_len as f64),
        ("L", symbol_length),
    ])?;
    Ok(snr_p / (beta_ba * pilot_slots as f64 * pilot_len as f64 * symbol_length))
}

/// Phase II transmit power from `SNR_d = β_CB·β_AC·p_t·J_d·τ_d·L·γ̄`.
pub fn power_from_snr_d(
    snr_d: f64,
    beta_cb: f64,
    beta_ac: f64,
    probe_slots: usize,
    probe_len: usize,
    symbol_length: f64,
    gamma_mean: f64,
) -> Result<f64> {
    require_positive(&[
        ("SNR_d", snr_d),
        ("beta_CB", beta_cb),
        ("beta_AC", beta_ac),
        ("J_d", probe_slots as f64),
        ("tau_d", probe_len as f64),
        ("L", symbol_length),
        ("gamma_mean", gamma_mean),
    ])?;
    if gamma_mean > 1.0 {
        return Err(domain(format!("mean reflection coefficient must be <= 1, got {gamma_mean}")));
    }
    Ok(snr_d / (beta_cb * beta_ac * probe_slots as f64 * probe_len as f64 * symbol_length * gamma_mean))
}

/// One realisation of the power ratio inside ζ, linear.
///
/// `None` when the projected backscatter power is zero (the ratio is undefined).
pub fn dynamic_range_sample(channels: &ChannelSet, proj: &Projector, psi: &CMatrix) -> Option<f64> {
    let x = apply_scaled(proj, psi);
    let direct = fro2(&(&channels.g_ab * &x));
    let row = channels.g_ac.transpose() * &x;
    let bs = norm2(&channels.g_cb) * fro2(&row);
    let reference = norm2(&channels.g_cb) * norm2(&channels.g_ac) * fro2(psi);
    if !(bs > UNDEFINED_REL * reference) {
        return None;
    }
    Some((direct + bs) / bs)
}

/// Monte-Carlo estimate of ζ in dB for a projector built from noisy Phase I
/// estimates at `snr_p_db`.
///
/// Trial `t` draws its pilot noise from `streams.stream(t)`. Samples are
/// averaged in the linear domain. Any undefined sample makes the result
/// undefined.
pub fn dynamic_range_mc(
    scene: &SceneConfig,
    phase: &PhaseParams,
    removed: usize,
    snr_p_db: f64,
    trials: u64,
    streams: &StreamFamily,
    exec: Exec,
) -> Result<Option<f64>> {
    if trials == 0 {
        return Err(domain("dynamic range needs at least one trial"));
    }
    let channels = build_channels(scene)?;
    let (m, n) = (scene.pan_a_antennas, scene.pan_b_antennas);
    phase.validate(m, n)?;
    let pilot_power = power_from_snr_p(
        db_to_linear(snr_p_db),
        channels.beta_ab,
        phase.pilot_slots,
        phase.pilot_len,
        phase.symbol_length,
    )?;
    let phi = pilot_matrix(n, phase.pilot_len, pilot_power, phase.symbol_length)?;
    // ζ is a power ratio, so the probe power cancels.
    let psi = probe_matrix(m, phase.probe_len, 1.0, phase.symbol_length)?;
    let estimator = LsEstimator::new(&phi)?;

    let samples = exec.map_trials(trials, |t| -> Result<Option<f64>> {
        let mut noise = streams.stream(t);
        let g_hat = estimate_g_ab(&channels.g_ab, &estimator, &phi, phase.pilot_slots, &mut noise)?;
        let proj = make_projector(&g_hat, removed)?;
        Ok(dynamic_range_sample(&channels, &proj, &psi))
    });
    let mut sum = 0.0;
    for s in samples {
        match s? {
            Some(z) => sum += z,
            None => return Ok(None),
        }
    }
    Ok(Some(linear_to_db(sum / trials as f64)))
}
