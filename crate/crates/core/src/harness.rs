//! Experiment drivers for the ROC and dynamic-range sweeps.
//!
//! Channels are fixed per scenario; only noise is redrawn per trial. Every
//! random draw comes from a stream keyed by `(seed, label, trial)` so output
//! is byte-identical across runs and worker counts.

use std::fmt;
use std::io::Write;

use crate::chanest::{estimate_g_ab, LsEstimator};
use crate::detector::{side_info, theoretical_pd, threshold_for_pfa, Hypothesis, Phase2Simulator};
use crate::error::{config, Result, SimError};
use crate::exec::Exec;
use crate::metrics::{
    db_to_linear, dynamic_range_mc, dynamic_range_sample, linear_to_db, power_from_snr_d, power_from_snr_p,
    SnrSpec,
};
use crate::noise::StreamFamily;
use crate::nullproj::{apply_scaled, make_projector, Projector};
use crate::scene::{build_channels, ChannelSet, Position, SceneConfig};
use crate::waveform::{pilot_matrix, probe_matrix, PhaseParams};

pub use crate::noise::derive_stream;

pub const ROC_HEADER: [&str; 5] = ["scenario", "p_fa", "p_d_sim", "p_d_theory", "n_trials"];
pub const DYNRANGE_HEADER: [&str; 4] = ["y_m", "snr_p_db", "zeta_db", "n_trials"];

/// How PanA shapes its probe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scenario {
    NoProjection,
    PerfectProjection,
    /// Projector built from a noisy Phase I estimate at this SNR_p (dB).
    Estimated(f64),
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scenario::NoProjection => f.write_str("no_projection"),
            Scenario::PerfectProjection => f.write_str("perfect_projection"),
            Scenario::Estimated(db) => write!(f, "estimated({})", fmt_sig6(*db)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RocPoint {
    pub scenario: Scenario,
    pub p_fa: f64,
    pub p_d_sim: f64,
    pub p_d_theory: f64,
    /// Empirical false-alarm rate at the same threshold; not written to CSV.
    pub p_fa_sim: f64,
    pub n_trials: u64,
}

/// Projection column of the dynamic-range table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SnrLabel {
    None,
    Perfect,
    Db(f64),
}

impl fmt::Display for SnrLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SnrLabel::None => f.write_str("none"),
            SnrLabel::Perfect => f.write_str("perfect"),
            SnrLabel::Db(db) => f.write_str(&fmt_sig6(*db)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DynRangePoint {
    pub y: f64,
    pub snr_p: SnrLabel,
    /// `None` where ζ is undefined.
    pub zeta_db: Option<f64>,
    pub n_trials: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub scene: SceneConfig,
    pub phase: PhaseParams,
    /// `snr_p_db` selects the estimated ROC scenario; `snr_d_db` sets Phase II power.
    pub snr: SnrSpec,
    /// Directions removed by the projector (K).
    pub removed_directions: usize,
    pub pfa_grid: Vec<f64>,
    pub roc_trials: u64,
    pub roc_estimated: bool,
    pub y_grid: Vec<f64>,
    pub dynrange_snr_p_db: Vec<f64>,
    pub dynrange_trials: u64,
    pub seed: u64,
}

/// `count` log-spaced points from `min` up to (excluding) 1.
pub fn log_pfa_grid(min: f64, count: usize) -> Vec<f64> {
    let lo = min.log10();
    (0..count).map(|i| 10f64.powf(lo - lo * i as f64 / count as f64)).collect()
}

/// `count` evenly spaced points on `[0, max]`.
pub fn linear_grid(max: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![0.0],
        _ => (0..count).map(|i| max * i as f64 / (count - 1) as f64).collect(),
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            scene: SceneConfig::default(),
            phase: PhaseParams::default(),
            snr: SnrSpec { snr_p_db: 15.0, snr_d_db: -10.0 },
            removed_directions: 1,
            pfa_grid: log_pfa_grid(1e-3, 50),
            roc_trials: 100_000,
            roc_estimated: true,
            y_grid: linear_grid(20.0, 21),
            dynrange_snr_p_db: vec![0.0, 15.0, 30.0],
            dynrange_trials: 1_000,
            seed: 0,
        }
    }
}

fn is_sorted(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[0] < w[1])
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.scene.validate()?;
        let m = self.scene.pan_a_antennas;
        self.phase.validate(m, self.scene.pan_b_antennas)?;
        if self.removed_directions == 0 || self.removed_directions >= m {
            return Err(config(format!(
                "projection rank K = {} must satisfy 1 <= K < M = {m}",
                self.removed_directions
            )));
        }
        if self.pfa_grid.is_empty() || !is_sorted(&self.pfa_grid) {
            return Err(config("false-alarm grid must be non-empty and strictly increasing"));
        }
        if self.pfa_grid.iter().any(|&p| !(p > 0.0 && p < 1.0)) {
            return Err(config("false-alarm grid values must lie in (0, 1)"));
        }
        if self.y_grid.is_empty() || !is_sorted(&self.y_grid) || self.y_grid[0] < 0.0 {
            return Err(config("y grid must be non-empty, strictly increasing and non-negative"));
        }
        if self.roc_trials == 0 || self.dynrange_trials == 0 {
            return Err(config("trial counts must be at least 1"));
        }
        let snrs = [self.snr.snr_p_db, self.snr.snr_d_db];
        if snrs.iter().chain(&self.dynrange_snr_p_db).any(|s| !s.is_finite()) {
            return Err(config("SNR values must be finite"));
        }
        if self.phase.gamma_mean() == 0.0 {
            return Err(config("reflection schedule must contain at least one reflecting slot"));
        }
        Ok(())
    }

    pub fn roc_scenarios(&self) -> Vec<Scenario> {
        let mut s = vec![Scenario::NoProjection, Scenario::PerfectProjection];
        if self.roc_estimated {
            s.push(Scenario::Estimated(self.snr.snr_p_db));
        }
        s
    }

    /// Phase II transmit power for the configured SNR_d.
    pub fn probe_power(&self, channels: &ChannelSet) -> Result<f64> {
        power_from_snr_d(
            db_to_linear(self.snr.snr_d_db),
            channels.beta_cb,
            channels.beta_ac,
            self.phase.probe_slots,
            self.phase.probe_len,
            self.phase.symbol_length,
            self.phase.gamma_mean(),
        )
    }

    /// Projector PanA uses in a scenario. The estimated case draws one
    /// Phase I realisation and keeps it fixed.
    pub fn projector(&self, channels: &ChannelSet, scenario: Scenario) -> Result<Projector> {
        let m = channels.pan_a_antennas();
        match scenario {
            Scenario::NoProjection => Ok(Projector::identity(m)),
            Scenario::PerfectProjection => make_projector(&channels.g_ab, self.removed_directions),
            Scenario::Estimated(snr_p_db) => {
                let n = channels.pan_b_antennas();
                let p = &self.phase;
                let power = power_from_snr_p(
                    db_to_linear(snr_p_db),
                    channels.beta_ab,
                    p.pilot_slots,
                    p.pilot_len,
                    p.symbol_length,
                )?;
                let phi = pilot_matrix(n, p.pilot_len, power, p.symbol_length)?;
                let est = LsEstimator::new(&phi)?;
                let label = format!("roc/{scenario}/phase1");
                let mut noise = StreamFamily::new(self.seed, &label).stream(0);
                let g_hat = estimate_g_ab(&channels.g_ab, &est, &phi, p.pilot_slots, &mut noise)?;
                make_projector(&g_hat, self.removed_directions)
            }
        }
    }
}

/// Empirical and theoretical ROC for one fixed projector.
///
/// `bsd_reflects = false` keeps the BSD physically silent under H1 while the
/// reader still uses its side information, which must yield `P_D ≈ P_FA`.
#[allow(clippy::too_many_arguments)]
pub fn roc_curve(
    channels: &ChannelSet,
    proj: &Projector,
    psi: &crate::linalg::CMatrix,
    schedule: &[bool],
    pfa_grid: &[f64],
    trials: u64,
    seed: u64,
    scenario: Scenario,
    bsd_reflects: bool,
    exec: Exec,
) -> Result<Vec<RocPoint>> {
    let info = side_info(channels, proj, psi, schedule);
    let x = apply_scaled(proj, psi);
    let sim = Phase2Simulator::new(channels, &x, schedule);
    let h0 = StreamFamily::new(seed, &format!("roc/{scenario}/h0"));
    let h1 = StreamFamily::new(seed, &format!("roc/{scenario}/h1"));
    let h1_hyp = if bsd_reflects { Hypothesis::H1 } else { Hypothesis::H0 };

    let stats = exec.map_trials(trials, |t| {
        (sim.statistic(Hypothesis::H0, &mut h0.stream(t)), sim.statistic(h1_hyp, &mut h1.stream(t)))
    });
    let (mut s0, mut s1): (Vec<f64>, Vec<f64>) = stats.into_iter().unzip();
    s0.sort_by(f64::total_cmp);
    s1.sort_by(f64::total_cmp);
    let exceed = |sorted: &[f64], eta: f64| sorted.len() - sorted.partition_point(|&v| v <= eta);

    pfa_grid
        .iter()
        .map(|&p_fa| {
            let eta = threshold_for_pfa(p_fa, info.sum_a2)?;
            Ok(RocPoint {
                scenario,
                p_fa,
                p_d_sim: exceed(&s1, eta) as f64 / trials as f64,
                p_d_theory: theoretical_pd(p_fa, info.sum_a2),
                p_fa_sim: exceed(&s0, eta) as f64 / trials as f64,
                n_trials: trials,
            })
        })
        .collect()
}

pub fn run_roc(cfg: &ExperimentConfig) -> Result<Vec<RocPoint>> {
    run_roc_with(cfg, Exec::default())
}

pub fn run_roc_with(cfg: &ExperimentConfig, exec: Exec) -> Result<Vec<RocPoint>> {
    cfg.validate()?;
    let channels = build_channels(&cfg.scene)?;
    let psi = probe_matrix(
        cfg.scene.pan_a_antennas,
        cfg.phase.probe_len,
        cfg.probe_power(&channels)?,
        cfg.phase.symbol_length,
    )?;
    let mut out = Vec::new();
    for scenario in cfg.roc_scenarios() {
        let proj = cfg.projector(&channels, scenario)?;
        out.extend(roc_curve(
            &channels,
            &proj,
            &psi,
            &cfg.phase.gamma_schedule,
            &cfg.pfa_grid,
            cfg.roc_trials,
            cfg.seed,
            scenario,
            true,
            exec,
        )?);
    }
    Ok(out)
}

pub fn run_dynrange(cfg: &ExperimentConfig) -> Result<Vec<DynRangePoint>> {
    run_dynrange_with(cfg, Exec::default())
}

pub fn run_dynrange_with(cfg: &ExperimentConfig, exec: Exec) -> Result<Vec<DynRangePoint>> {
    cfg.validate()?;
    let mut out = Vec::new();
    for &y in &cfg.y_grid {
        let scene = cfg.scene.with_bsd(Position::new(cfg.scene.bsd_pos.x, y));
        let channels = build_channels(&scene)?;
        let psi = probe_matrix(scene.pan_a_antennas, cfg.phase.probe_len, 1.0, cfg.phase.symbol_length)?;
        let deterministic = |proj: Projector| dynamic_range_sample(&channels, &proj, &psi).map(linear_to_db);

        out.push(DynRangePoint {
            y,
            snr_p: SnrLabel::None,
            zeta_db: deterministic(Projector::identity(scene.pan_a_antennas)),
            n_trials: 1,
        });
        for &snr_p_db in &cfg.dynrange_snr_p_db {
            let label = format!("dynrange/y={y}/snr_p={snr_p_db}");
            let zeta_db = dynamic_range_mc(
                &scene,
                &cfg.phase,
                cfg.removed_directions,
                snr_p_db,
                cfg.dynrange_trials,
                &StreamFamily::new(cfg.seed, &label),
                exec,
            )?;
            out.push(DynRangePoint {
                y,
                snr_p: SnrLabel::Db(snr_p_db),
                zeta_db,
                n_trials: cfg.dynrange_trials,
            });
        }
        out.push(DynRangePoint {
            y,
            snr_p: SnrLabel::Perfect,
            zeta_db: deterministic(make_projector(&channels.g_ab, cfg.removed_directions)?),
            n_trials: 1,
        });
    }
    Ok(out)
}

/// `%g`-style formatting with six significant digits.
pub fn fmt_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        let m = trim_zeros(mantissa.to_string());
        format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn write_roc_csv(w: impl Write, points: &[RocPoint]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(ROC_HEADER)?;
    for p in points {
        wr.write_record([
            p.scenario.to_string(),
            fmt_sig6(p.p_fa),
            fmt_sig6(p.p_d_sim),
            fmt_sig6(p.p_d_theory),
            p.n_trials.to_string(),
        ])?;
    }
    wr.flush().map_err(SimError::Io)
}

pub fn write_dynrange_csv(w: impl Write, points: &[DynRangePoint]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(DYNRANGE_HEADER)?;
    for p in points {
        wr.write_record([
            fmt_sig6(p.y),
            p.snr_p.to_string(),
            p.zeta_db.map(fmt_sig6).unwrap_or_default(),
            p.n_trials.to_string(),
        ])?;
    }
    wr.flush().map_err(SimError::Io)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig6_formatting() {
        assert_eq!(fmt_sig6(0.0), "0");
        assert_eq!(fmt_sig6(25.198_765), "25.1988");
        assert_eq!(fmt_sig6(0.1), "0.1");
        assert_eq!(fmt_sig6(1e-3), "0.001");
        assert_eq!(fmt_sig6(1.5e-7), "1.5e-07");
        assert_eq!(fmt_sig6(100000.0), "100000");
        assert_eq!(fmt_sig6(1234567.0), "1.23457e+06");
        assert_eq!(fmt_sig6(-10.0), "-10");
        assert_eq!(fmt_sig6(0.999_999_7), "1");
        assert_eq!(fmt_sig6(9.999_996e-5), "0.0001");
    }

    #[test]
    fn default_grids() {
        let g = log_pfa_grid(1e-3, 50);
        assert_eq!(g.len(), 50);
        assert!((g[0] - 1e-3).abs() < 1e-18);
        assert!(*g.last().unwrap() < 1.0);
        assert!(is_sorted(&g));
        let y = linear_grid(20.0, 21);
        assert_eq!((y[0], y[10], y[20]), (0.0, 10.0, 20.0));
    }

    #[test]
    fn default_config_is_valid() {
        let c = ExperimentConfig::default();
        c.validate().unwrap();
        assert_eq!(c.roc_scenarios().len(), 3);
    }

    #[test]
    fn invalid_configs_rejected() {
        let bad = [
            ExperimentConfig { removed_directions: 16, ..Default::default() },
            ExperimentConfig { pfa_grid: vec![0.5, 0.1], ..Default::default() },
            ExperimentConfig { pfa_grid: vec![], ..Default::default() },
            ExperimentConfig { y_grid: vec![-1.0, 2.0], ..Default::default() },
            ExperimentConfig { roc_trials: 0, ..Default::default() },
        ];
        for c in bad {
            assert!(matches!(run_roc(&c), Err(SimError::Config(_))));
        }
    }

    #[test]
    fn silent_bsd_gives_blind_detector() {
        let cfg = ExperimentConfig::default();
        let ch = build_channels(&cfg.scene).unwrap();
        let psi = probe_matrix(16, 16, cfg.probe_power(&ch).unwrap(), 5e-6).unwrap();
        let trials = 20_000;
        let pts = roc_curve(
            &ch,
            &Projector::identity(16),
            &psi,
            &cfg.phase.gamma_schedule,
            &[0.01, 0.1, 0.3, 0.7],
            trials,
            4,
            Scenario::NoProjection,
            false,
            Exec::default(),
        )
        .unwrap();
        for p in pts {
            let sd = (p.p_fa * (1.0 - p.p_fa) / trials as f64).sqrt();
            assert!((p.p_d_sim - p.p_fa).abs() < 3.0 * sd, "{p:?}");
        }
    }

    #[test]
    fn false_alarm_calibration() {
        let cfg = ExperimentConfig {
            pfa_grid: vec![0.01, 0.1, 0.5],
            roc_trials: 100_000,
            roc_estimated: false,
            ..Default::default()
        };
        for p in run_roc(&cfg).unwrap() {
            let sd = (p.p_fa * (1.0 - p.p_fa) / p.n_trials as f64).sqrt();
            assert!((p.p_fa_sim - p.p_fa).abs() < 3.0 * sd, "{p:?}");
        }
    }

    #[test]
    fn dynrange_rows_and_on_axis_behaviour() {
        let cfg = ExperimentConfig { y_grid: vec![0.0, 10.0], dynrange_trials: 20, ..Default::default() };
        let rows = run_dynrange(&cfg).unwrap();
        assert_eq!(rows.len(), 10);
        let on_axis: Vec<_> = rows.iter().filter(|r| r.y == 0.0).collect();
        let none = on_axis[0].zeta_db.unwrap();
        for r in &on_axis[1..4] {
            assert!((r.zeta_db.unwrap() - none).abs() < 1e-6);
        }
        assert_eq!(on_axis[4].snr_p, SnrLabel::Perfect);
        assert_eq!(on_axis[4].zeta_db, None);

        let mut buf = Vec::new();
        write_dynrange_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("y_m,snr_p_db,zeta_db,n_trials\n0,none,"));
        assert!(text.contains("0,perfect,,1\n"));
    }

    #[test]
    fn roc_csv_shape() {
        let cfg = ExperimentConfig { pfa_grid: vec![0.1], roc_trials: 100, ..Default::default() };
        let pts = run_roc(&cfg).unwrap();
        let mut buf = Vec::new();
        write_roc_csv(&mut buf, &pts).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "scenario,p_fa,p_d_sim,p_d_theory,n_trials");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("no_projection,0.1,"));
        assert!(lines[3].starts_with("estimated(15),0.1,"));
    }
}
