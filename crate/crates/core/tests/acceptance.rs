//! Acceptance criteria A1–A7. Runs as a plain binary and prints one
//! PASS/FAIL line per criterion (and per A7 sub-check).

use std::time::{Duration, Instant};

use bsc_core::chanest::{ls_estimate, receive_pilots};
use bsc_core::detector::{side_info, theoretical_pd, Hypothesis, Phase2Simulator};
use bsc_core::harness::{
    run_dynrange, run_roc, write_dynrange_csv, write_roc_csv, ExperimentConfig, Scenario, SnrLabel,
};
use bsc_core::linalg::{fro2, max_abs_diff, CMatrix};
use bsc_core::noise::{derive_stream, NoiseSource, Silent, StreamFamily};
use bsc_core::nullproj::{apply_scaled, make_projector};
use bsc_core::qfunc::{q_func, q_inv};
use bsc_core::scene::build_channels;
use bsc_core::waveform::{pilot_matrix, probe_alpha, probe_matrix};
use bsc_core::Exec;
use num_complex::Complex64;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn within_time(start: Instant, limit: Duration, detail: String) -> Outcome {
    let took = start.elapsed();
    if took < limit {
        Ok(format!("{detail}; {:.2?} < {limit:?}", took))
    } else {
        Err(format!("{detail}; runtime {took:.2?} exceeds {limit:?}"))
    }
}

fn dynrange_at(y: Vec<f64>, snr_p: Vec<f64>) -> Vec<bsc_core::harness::DynRangePoint> {
    let cfg = ExperimentConfig { y_grid: y, dynrange_snr_p_db: snr_p, ..Default::default() };
    run_dynrange(&cfg).expect("dynrange")
}

fn a1() -> Outcome {
    let t = Instant::now();
    let rows = dynrange_at(vec![10.0], vec![]);
    let none = rows.iter().find(|r| r.snr_p == SnrLabel::None).unwrap();
    let z = none.zeta_db.ok_or("undefined")?;
    // 1 + d_AC²·d_CB²/d_AB² with d_AC² = d_CB² = 109, d_AB² = 36
    let analytic = 10.0 * (1.0 + 109.0f64 * 109.0 / 36.0).log10();
    if (z - 25.19).abs() > 0.1 || (z - analytic).abs() > 1e-9 {
        return Err(format!("ζ = {z:.4} dB (analytic {analytic:.4})"));
    }
    within_time(t, Duration::from_secs(1), format!("ζ = {z:.4} dB"))
}

fn a2() -> Outcome {
    let t = Instant::now();
    let rows = dynrange_at(ExperimentConfig::default().y_grid, vec![]);
    let mut worst: f64 = 0.0;
    for r in rows.iter().filter(|r| r.snr_p == SnrLabel::Perfect) {
        match (r.y > 0.0, r.zeta_db) {
            (true, Some(z)) => worst = worst.max(z.abs()),
            (true, None) => return Err(format!("undefined at y = {}", r.y)),
            (false, Some(z)) => return Err(format!("y = 0 should be undefined, got {z}")),
            (false, None) => {}
        }
    }
    if worst > 1e-9 {
        return Err(format!("max |ζ| = {worst:e} dB"));
    }
    within_time(t, Duration::from_secs(1), format!("max |ζ| = {worst:.1e} dB for y > 0, undefined at y = 0"))
}

fn a3() -> Outcome {
    let t = Instant::now();
    let rows = dynrange_at(vec![10.0], vec![0.0, 15.0, 30.0]);
    let mut detail = Vec::new();
    let mut ok = true;
    for (snr, target) in [(0.0, 23.95), (15.0, 10.34), (30.0, 1.17)] {
        let r = rows.iter().find(|r| r.snr_p == SnrLabel::Db(snr)).unwrap();
        let z = r.zeta_db.ok_or("undefined")?;
        ok &= (z - target).abs() <= 1.0 && r.n_trials == 1000;
        detail.push(format!("{snr} dB: {z:.2} (target {target})"));
    }
    let detail = detail.join(", ");
    if !ok {
        return Err(detail);
    }
    within_time(t, Duration::from_secs(60), detail)
}

fn a4() -> Outcome {
    let t = Instant::now();
    let cfg = ExperimentConfig::default();
    assert_eq!(cfg.roc_trials, 100_000);
    let pts = run_roc(&cfg).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    let mut bad = Vec::new();
    for p in &pts {
        let sd = (p.p_d_theory * (1.0 - p.p_d_theory) / p.n_trials as f64).sqrt();
        let z = (p.p_d_sim - p.p_d_theory).abs() / sd;
        worst = worst.max(z);
        if z > 3.0 {
            bad.push(format!("{} @ {:.4}: {:.2}σ", p.scenario, p.p_fa, z));
        }
    }
    if !bad.is_empty() {
        return Err(bad.join("; "));
    }
    within_time(t, Duration::from_secs(300), format!("{} points, worst deviation {worst:.2}σ", pts.len()))
}

/// Independent Gaussian tail by composite Simpson integration.
fn tail_quadrature(x: f64) -> f64 {
    let pdf = |u: f64| (-0.5 * u * u).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let (a, b, n) = (x, x.max(0.0) + 14.0, 40_000);
    let h = (b - a) / n as f64;
    let mut s = pdf(a) + pdf(b);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * pdf(a + i as f64 * h);
    }
    s * h / 3.0
}

fn tail_inverse_quadrature(p: f64) -> f64 {
    let (mut lo, mut hi) = (-10.0, 10.0);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if tail_quadrature(mid) > p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn sum_a2(scenario: Scenario) -> f64 {
    let cfg = ExperimentConfig::default();
    let ch = build_channels(&cfg.scene).unwrap();
    let psi = probe_matrix(16, 16, cfg.probe_power(&ch).unwrap(), cfg.phase.symbol_length).unwrap();
    let proj = cfg.projector(&ch, scenario).unwrap();
    side_info(&ch, &proj, &psi, &cfg.phase.gamma_schedule).sum_a2
}

fn a5() -> Outcome {
    let s = sum_a2(Scenario::NoProjection);
    if (s - 1.6).abs() > 1e-9 {
        return Err(format!("sumA2 = {s}, expected N·SNR_d = 1.6"));
    }
    let pd = theoretical_pd(0.1, s);
    let oracle = tail_quadrature(tail_inverse_quadrature(0.1) - (2.0 * s).sqrt());
    if (pd - 0.694).abs() > 1e-3 || (oracle - 0.694).abs() > 1e-3 || (pd - oracle).abs() > 1e-9 {
        return Err(format!("P_D = {pd:.6}, quadrature oracle {oracle:.6}"));
    }
    Ok(format!("sumA2 = {s:.6}, P_D = {pd:.6}, oracle {oracle:.6}"))
}

fn a6() -> Outcome {
    let none = theoretical_pd(0.1, sum_a2(Scenario::NoProjection));
    let perfect = theoretical_pd(0.1, sum_a2(Scenario::PerfectProjection));
    let gain = perfect - none;

    let cfg = ExperimentConfig { pfa_grid: vec![0.1], roc_estimated: false, ..Default::default() };
    let pts = run_roc(&cfg).map_err(|e| e.to_string())?;
    let sim_gain = pts[1].p_d_sim - pts[0].p_d_sim;
    let detail = format!("ΔP_D theory {gain:.4}, simulated {sim_gain:.4}");
    if (gain - 0.02).abs() > 0.01 {
        return Err(detail);
    }
    Ok(detail)
}

// ---- A7 sub-checks ----

fn random_estimate(seed: u64) -> CMatrix {
    let ch = build_channels(&ExperimentConfig::default().scene).unwrap();
    let mut noise = CMatrix::zeros(16, 16);
    derive_stream(seed, "a7-estimate", 0).add_to(&mut noise);
    &ch.g_ab + noise * Complex64::from(0.05 * (seed as f64 + 1.0))
}

fn a7_projector() -> Outcome {
    let mut worst: f64 = 0.0;
    for seed in 0..20 {
        for k in [1, 3, 8, 15] {
            let p = make_projector(&random_estimate(seed), k).map_err(|e| e.to_string())?.p;
            let idem = max_abs_diff(&(&p * &p), &p);
            let herm = max_abs_diff(&p.adjoint(), &p);
            let tr = (p.trace().re - (16 - k) as f64).abs();
            worst = worst.max(idem).max(herm).max(tr);
        }
    }
    if worst > 1e-10 {
        return Err(format!("worst deviation {worst:e}"));
    }
    Ok(format!("80 projectors, worst deviation {worst:.1e}"))
}

fn a7_energy() -> Outcome {
    let mut worst: f64 = 0.0;
    for seed in 0..20 {
        let proj = make_projector(&random_estimate(seed), 1 + seed as usize % 4).unwrap();
        for tau in [16, 20, 32] {
            let psi = probe_matrix(16, tau, 0.7 + seed as f64, 5e-6).unwrap();
            let rel = (fro2(&apply_scaled(&proj, &psi)) / fro2(&psi) - 1.0).abs();
            worst = worst.max(rel);
        }
    }
    if worst > 1e-10 {
        return Err(format!("worst relative error {worst:e}"));
    }
    Ok(format!("worst relative error {worst:.1e}"))
}

fn a7_gram() -> Outcome {
    let mut worst: f64 = 0.0;
    for rows in 1..=32 {
        for len in [rows, rows + 1, 32, 37] {
            let (power, l) = (3.5, 5e-6);
            let x = pilot_matrix(rows, len, power, l).unwrap();
            let c = probe_alpha(rows, len, power, l);
            let target = CMatrix::identity(rows, rows) * Complex64::from(c);
            worst = worst.max(max_abs_diff(&(&x * x.adjoint()), &target) / c);
            let y = probe_matrix(rows, len, power, l).unwrap();
            worst = worst.max(max_abs_diff(&(&y * y.adjoint()), &target) / c);
        }
    }
    if worst > 1e-12 {
        return Err(format!("worst relative Gram error {worst:e}"));
    }
    Ok(format!("worst relative Gram error {worst:.1e}"))
}

fn a7_ls() -> Outcome {
    let ch = build_channels(&ExperimentConfig::default().scene).unwrap();
    let phi = pilot_matrix(16, 16, 450_000.0, 5e-6).unwrap();
    let obs: Vec<_> = (0..3).map(|j| receive_pilots(&ch.g_ba(), &phi, j, &mut Silent).unwrap()).collect();
    let err = max_abs_diff(&ls_estimate(&obs, &phi).unwrap(), &ch.g_ba());
    if err > 1e-10 {
        return Err(format!("max error {err:e}"));
    }
    Ok(format!("max error {err:.1e}"))
}

fn a7_moments() -> Outcome {
    let cfg = ExperimentConfig::default();
    let ch = build_channels(&cfg.scene).unwrap();
    let psi = probe_matrix(16, 16, cfg.probe_power(&ch).unwrap(), cfg.phase.symbol_length).unwrap();
    let proj = make_projector(&ch.g_ab, 1).unwrap();
    let info = side_info(&ch, &proj, &psi, &cfg.phase.gamma_schedule);
    let sim = Phase2Simulator::new(&ch, &apply_scaled(&proj, &psi), &cfg.phase.gamma_schedule);
    let n = 100_000u64;
    let var_theory = info.sum_a2 / 2.0;
    let mut detail = Vec::new();
    let mut ok = true;
    for (hyp, mean_theory) in [(Hypothesis::H0, 0.0), (Hypothesis::H1, info.sum_a2)] {
        let fam = StreamFamily::new(2024, &format!("a7-moments/{hyp:?}"));
        let xs = Exec::default().map_trials(n, |t| sim.statistic(hyp, &mut fam.stream(t)));
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let se_mean = (var_theory / n as f64).sqrt();
        let se_var = var_theory * (2.0 / (n - 1) as f64).sqrt();
        let (zm, zv) = ((mean - mean_theory) / se_mean, (var - var_theory) / se_var);
        ok &= zm.abs() <= 3.0 && zv.abs() <= 3.0;
        detail.push(format!("{hyp:?}: mean {zm:+.2}SE, var {zv:+.2}SE"));
    }
    let detail = detail.join(", ");
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn a7_q_round_trip() -> Outcome {
    let mut worst = (0.0, 0.0f64);
    for i in 0..=12_000 {
        let x = -6.0 + i as f64 * 1e-3;
        let err = (q_inv(q_func(x)).map_err(|e| e.to_string())? - x).abs();
        if err > worst.1 {
            worst = (x, err);
        }
    }
    let detail = format!("|x| <= 6, worst error {:.2e} at x = {:.3}", worst.1, worst.0);
    if worst.1 > 1e-9 {
        return Err(detail);
    }
    Ok(detail)
}

fn a7_reruns() -> Outcome {
    let roc_cfg = ExperimentConfig { roc_trials: 2_000, seed: 99, ..Default::default() };
    let dyn_cfg = ExperimentConfig {
        y_grid: vec![0.0, 5.0, 10.0],
        dynrange_trials: 50,
        seed: 99,
        ..Default::default()
    };
    let render = |exec: Exec| {
        let mut roc = Vec::new();
        write_roc_csv(&mut roc, &bsc_core::harness::run_roc_with(&roc_cfg, exec).unwrap()).unwrap();
        let mut dynr = Vec::new();
        write_dynrange_csv(&mut dynr, &bsc_core::harness::run_dynrange_with(&dyn_cfg, exec).unwrap())
            .unwrap();
        (roc, dynr)
    };
    let first = render(Exec::default());
    let second = render(Exec::default());
    let sequential = render(Exec::Sequential);
    if first != second || first != sequential {
        return Err("CSV output differs between reruns".into());
    }
    Ok(format!(
        "roc.csv {} bytes, dynrange.csv {} bytes identical across 3 runs",
        first.0.len(),
        first.1.len()
    ))
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("A1 no-projection dynamic range", a1),
        ("A2 perfect-projection dynamic range", a2),
        ("A3 estimated-projection dynamic range", a3),
        ("A4 ROC theory/simulation agreement", a4),
        ("A5 ROC anchor point", a5),
        ("A6 projection gain", a6),
        ("A7a projector idempotent/Hermitian/trace", a7_projector),
        ("A7b energy conservation", a7_energy),
        ("A7c pilot/probe Gram identities", a7_gram),
        ("A7d LS noiseless exactness", a7_ls),
        ("A7e L' moment match", a7_moments),
        ("A7f Q/Q^-1 round trip", a7_q_round_trip),
        ("A7g byte-identical reruns", a7_reruns),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        match f() {
            Ok(d) => println!("PASS  {name}: {d}"),
            Err(d) => {
                failed += 1;
                println!("FAIL  {name}: {d}");
            }
        }
    }
    println!("acceptance: {failed} failing");
    if failed > 0 {
        std::process::exit(1);
    }
}
