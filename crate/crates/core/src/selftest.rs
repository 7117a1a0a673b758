//! Quick built-in consistency checks run by `bscsim selftest`.
//!
//! Each check covers an exact or limiting-case identity, so none of them
//! depend on Monte-Carlo tolerances.

use num_complex::Complex64;

use crate::chanest::{ls_estimate, receive_pilots};
use crate::detector::{
    np_statistic, receive_phase2, side_info, theoretical_pd, threshold_for_pfa, Hypothesis,
};
use crate::linalg::{fro2, max_abs_diff, CMatrix};
use crate::metrics::{dynamic_range_sample, power_from_snr_p};
use crate::noise::{derive_stream, NoiseSource, Silent};
use crate::nullproj::{apply_scaled, complex_svd, make_projector, Projector};
use crate::qfunc::{q_func, q_inv};
use crate::scene::{build_channels, path_loss, steering_vector, Position, SceneConfig};
use crate::waveform::{pilot_matrix, probe_matrix, signal_energy};

type Check = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn path_loss_unit() -> Check {
    let b = path_loss(1.0).map_err(err)?;
    ensure(b == 1.0, || format!("path_loss(1) = {b}"))
}

fn steering_broadside() -> Check {
    let v = steering_vector(Position::new(0.0, 0.0), 16, 0.05, 0.1, Position::new(6.0, 0.0)).map_err(err)?;
    ensure(v.iter().all(|z| (z - Complex64::new(1.0, 0.0)).norm() < 1e-14), || "not all ones".into())
}

fn steering_single() -> Check {
    let v = steering_vector(Position::new(0.0, 0.0), 1, 0.05, 0.1, Position::new(2.0, 5.0)).map_err(err)?;
    ensure((v[0] - Complex64::new(1.0, 0.0)).norm() < 1e-15, || format!("got {}", v[0]))
}

fn scalar_waveforms() -> Check {
    let phi = pilot_matrix(1, 1, 1.0, 1.0).map_err(err)?;
    let psi = probe_matrix(1, 1, 1.0, 1.0).map_err(err)?;
    ensure((phi[(0, 0)] - 1.0).norm() < 1e-15 && (psi[(0, 0)] - 1.0).norm() < 1e-15, || {
        "scalar waveform is not [1]".into()
    })
}

fn zero_energy() -> Check {
    ensure(signal_energy(&CMatrix::zeros(4, 4), 3) == 0.0, || "nonzero".into())
}

fn noiseless_ls() -> Check {
    let ch = build_channels(&SceneConfig::default()).map_err(err)?;
    let phi = pilot_matrix(16, 16, 450_000.0, 5e-6).map_err(err)?;
    let obs = receive_pilots(&ch.g_ba(), &phi, 0, &mut Silent).map_err(err)?;
    ensure(max_abs_diff(&obs.y, &(ch.g_ba() * &phi)) < 1e-12, || "noiseless pilots differ".into())?;
    let est = ls_estimate(&[obs], &phi).map_err(err)?;
    ensure(max_abs_diff(&est, &ch.g_ba()) < 1e-10, || "LS estimate not exact".into())
}

fn svd_identity() -> Check {
    let s = complex_svd(&CMatrix::identity(2, 2));
    ensure(s.sigma.len() == 2 && s.sigma.iter().all(|x| (x - 1.0).abs() < 1e-14), || format!("{:?}", s.sigma))
}

fn svd_rank_one() -> Check {
    let u = CMatrix::from_column_slice(2, 1, &[Complex64::new(2.0, 0.0), Complex64::new(0.0, 0.0)]);
    let v = CMatrix::from_column_slice(2, 1, &[Complex64::new(0.0, 0.0), Complex64::new(3.0, 0.0)]);
    let s = complex_svd(&(u * v.adjoint()));
    ensure(s.sigma.len() == 1 && (s.sigma[0] - 6.0).abs() < 1e-13, || format!("{:?}", s.sigma))
}

fn projector_checks() -> Check {
    let psi = probe_matrix(16, 16, 1.0, 1.0).map_err(err)?;
    ensure(apply_scaled(&Projector::identity(16), &psi) == psi, || "identity changed the probe".into())?;
    let ch = build_channels(&SceneConfig::default()).map_err(err)?;
    let proj = make_projector(&ch.g_ab, 1).map_err(err)?;
    let resid = fro2(&(&ch.g_ab * &proj.p)).sqrt();
    ensure(resid < 1e-10 * fro2(&ch.g_ab).sqrt(), || format!("residual {resid}"))?;
    let v1 = complex_svd(&ch.g_ab).v.column(0).into_owned();
    let in_span = CMatrix::from_fn(16, 2, |i, j| v1[i] * Complex64::new(1.0 + j as f64, 0.0));
    ensure(fro2(&apply_scaled(&proj, &in_span)) < 1e-24, || "span(V_K) not annihilated".into())
}

fn noiseless_detection() -> Check {
    let ch = build_channels(&SceneConfig::default()).map_err(err)?;
    let psi = probe_matrix(16, 16, 1e4, 5e-6).map_err(err)?;
    let proj = make_projector(&ch.g_ab, 1).map_err(err)?;
    let sched = [true, false];
    let info = side_info(&ch, &proj, &psi, &sched);
    let x = apply_scaled(&proj, &psi);
    let run = |h| -> Result<f64, String> {
        let obs: Vec<_> =
            sched.iter().enumerate().map(|(j, &g)| receive_phase2(&ch, &x, g, h, j, &mut Silent)).collect();
        np_statistic(&obs, &info).map_err(err)
    };
    let (l1, l0) = (run(Hypothesis::H1)?, run(Hypothesis::H0)?);
    ensure((l1 - info.sum_a2).abs() < 1e-9 * info.sum_a2, || format!("H1: {l1} vs {}", info.sum_a2))?;
    ensure(l0.abs() < 1e-9 * info.sum_a2, || format!("H0: {l0}"))?;
    let silent = side_info(&ch, &proj, &psi, &[false, false]);
    ensure(silent.sum_a2 == 0.0, || "all-silent schedule has energy".into())
}

fn thresholds_and_roc() -> Check {
    ensure(threshold_for_pfa(0.5, 2.0).map_err(err)? == 0.0, || "η′(0.5) != 0".into())?;
    ensure((theoretical_pd(0.37, 0.0) - 0.37).abs() < 1e-12, || "blind detector P_D != P_FA".into())?;
    ensure(theoretical_pd(1.0 - 1e-12, 1.0) > 1.0 - 1e-9, || "P_D does not tend to 1".into())
}

fn q_function() -> Check {
    ensure((q_func(0.0) - 0.5).abs() < 1e-16, || "Q(0) != 0.5".into())?;
    for x in [0.1, 0.9, 2.5, 5.0] {
        ensure((q_func(x) + q_func(-x) - 1.0).abs() < 1e-15, || format!("symmetry at {x}"))?;
    }
    ensure(q_inv(0.5).map_err(err)? == 0.0, || "Q⁻¹(0.5) != 0".into())
}

fn power_scaling() -> Check {
    let a = power_from_snr_p(1.0, 1.0 / 36.0, 1, 16, 5e-6).map_err(err)?;
    let b = power_from_snr_p(1.0, 1.0 / 36.0, 2, 16, 5e-6).map_err(err)?;
    ensure((a - 2.0 * b).abs() < 1e-9 * a, || format!("{a} vs {b}"))?;
    let back = a * 16.0 * 5e-6 / 36.0;
    ensure((back - 1.0).abs() < 1e-12, || format!("round trip {back}"))
}

fn stream_determinism() -> Check {
    let draw = |seed, label: &str, t| {
        let mut s = derive_stream(seed, label, t);
        (0..100).map(|_| s.draw()).collect::<Vec<_>>()
    };
    ensure(draw(7, "a", 1) == draw(7, "a", 1), || "stream not reproducible".into())?;
    ensure(draw(7, "a", 1) != draw(7, "b", 1), || "labels share a stream".into())
}

fn no_projection_is_snr_independent() -> Check {
    let ch = build_channels(&SceneConfig::default().with_bsd(Position::new(3.0, 10.0))).map_err(err)?;
    let a =
        dynamic_range_sample(&ch, &Projector::identity(16), &probe_matrix(16, 16, 1.0, 5e-6).map_err(err)?);
    let b =
        dynamic_range_sample(&ch, &Projector::identity(16), &probe_matrix(16, 16, 1e6, 5e-6).map_err(err)?);
    match (a, b) {
        (Some(a), Some(b)) => ensure((a - b).abs() < 1e-9 * a, || format!("{a} vs {b}")),
        _ => Err("undefined ζ without projection".into()),
    }
}

type NamedCheck = (&'static str, fn() -> Check);

pub const CHECKS: &[NamedCheck] = &[
    ("path_loss_unit_distance", path_loss_unit),
    ("steering_broadside_all_ones", steering_broadside),
    ("steering_single_element", steering_single),
    ("scalar_waveforms", scalar_waveforms),
    ("zero_matrix_energy", zero_energy),
    ("noiseless_ls_exact", noiseless_ls),
    ("svd_identity", svd_identity),
    ("svd_rank_one_norm_product", svd_rank_one),
    ("projector_identity_and_nulling", projector_checks),
    ("noiseless_np_statistic", noiseless_detection),
    ("threshold_and_roc_limits", thresholds_and_roc),
    ("q_function_identities", q_function),
    ("power_scaling", power_scaling),
    ("stream_determinism", stream_determinism),
    ("no_projection_snr_independent", no_projection_is_snr_independent),
];

/// Runs all checks, returning `(name, outcome)` pairs in order.
pub fn run_all() -> Vec<(&'static str, Check)> {
    CHECKS.iter().map(|(name, f)| (*name, f())).collect()
}

#[cfg(test)]
mod tests {
    #[test]
    fn all_checks_pass() {
        for (name, res) in super::run_all() {
            assert!(res.is_ok(), "{name}: {res:?}");
        }
    }
}
