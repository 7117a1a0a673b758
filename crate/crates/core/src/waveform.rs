//! Orthogonal pilot (Phase I) and probing (Phase II) waveforms.
//!
//! Both are built from the leading rows of a unitary DFT matrix, scaled so
//! that the Gram matrix is `p_t·τ·L/rows · I`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{config, Result};
use crate::linalg::{fro2, CMatrix};

/// Slot structure of the two protocol phases.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseParams {
    /// Pilot slots in Phase I (J_p).
    pub pilot_slots: usize,
    /// Probing slots in Phase II (J_d).
    pub probe_slots: usize,
    /// Symbols per pilot slot (τ_p).
    pub pilot_len: usize,
    /// Symbols per probing slot (τ_d).
    pub probe_len: usize,
    /// Symbol length L in seconds.
    pub symbol_length: f64,
    /// BSD reflection state per Phase II slot.
    pub gamma_schedule: Vec<bool>,
}

impl Default for PhaseParams {
    fn default() -> Self {
        Self {
            pilot_slots: 1,
            probe_slots: 2,
            pilot_len: 16,
            probe_len: 16,
            symbol_length: 5e-6,
            gamma_schedule: alternating_schedule(2),
        }
    }
}

/// `[1, 0, 1, 0, …]` of the given length.
pub fn alternating_schedule(len: usize) -> Vec<bool> {
    (0..len).map(|j| j % 2 == 0).collect()
}

impl PhaseParams {
    pub fn validate(&self, pan_a_antennas: usize, pan_b_antennas: usize) -> Result<()> {
        if self.pilot_slots == 0 || self.probe_slots == 0 {
            return Err(config("slot counts must be at least 1"));
        }
        if self.pilot_len < pan_b_antennas {
            return Err(config(format!(
                "pilot length {} is shorter than the PanB antenna count {}",
                self.pilot_len, pan_b_antennas
            )));
        }
        if self.probe_len < pan_a_antennas {
            return Err(config(format!(
                "probe length {} is shorter than the PanA antenna count {}",
                self.probe_len, pan_a_antennas
            )));
        }
        if !(self.symbol_length > 0.0) || !self.symbol_length.is_finite() {
            return Err(config("symbol length must be positive"));
        }
        if self.gamma_schedule.len() != self.probe_slots {
            return Err(config(format!(
                "reflection schedule has {} entries but there are {} probing slots",
                self.gamma_schedule.len(),
                self.probe_slots
            )));
        }
        Ok(())
    }

    /// Mean reflection coefficient γ̄ over Phase II.
    pub fn gamma_mean(&self) -> f64 {
        if self.gamma_schedule.is_empty() {
            return 0.0;
        }
        self.gamma_schedule.iter().filter(|&&g| g).count() as f64 / self.gamma_schedule.len() as f64
    }

    /// Total slot count J = J_p + J_d.
    pub fn total_slots(&self) -> usize {
        self.pilot_slots + self.probe_slots
    }
}

fn scaled_dft_rows(rows: usize, len: usize, power: f64, symbol_length: f64) -> CMatrix {
    let scale = (power * len as f64 * symbol_length / rows as f64).sqrt() / (len as f64).sqrt();
    CMatrix::from_fn(rows, len, |k, l| {
        // Reduce k·l mod len before the float conversion to keep the phase exact.
        let idx = (k * l) % len;
        Complex64::from_polar(scale, -2.0 * PI * idx as f64 / len as f64)
    })
}

/// Pilot matrix Φ (N×τ_p) with `ΦΦᴴ = (p_t·τ_p·L/N)·I_N`.
pub fn pilot_matrix(n: usize, pilot_len: usize, power: f64, symbol_length: f64) -> Result<CMatrix> {
    if n == 0 || pilot_len < n {
        return Err(config(format!("pilot length {pilot_len} must be >= antenna count {n} >= 1")));
    }
    Ok(scaled_dft_rows(n, pilot_len, power, symbol_length))
}

/// Probing matrix Ψ (M×τ_d) with `ΨΨᴴ = α·I_M`, `α = p_t·τ_d·L/M`.
pub fn probe_matrix(m: usize, probe_len: usize, power: f64, symbol_length: f64) -> Result<CMatrix> {
    if m == 0 || probe_len < m {
        return Err(config(format!("probe length {probe_len} must be >= antenna count {m} >= 1")));
    }
    Ok(scaled_dft_rows(m, probe_len, power, symbol_length))
}

/// The Gram scale α of a probe built with these parameters.
pub fn probe_alpha(m: usize, probe_len: usize, power: f64, symbol_length: f64) -> f64 {
    power * probe_len as f64 * symbol_length / m as f64
}

/// Energy radiated over `slots` repetitions of `x`: `J·‖X‖²`.
pub fn signal_energy(x: &CMatrix, slots: usize) -> f64 {
    slots as f64 * fro2(x)
}
