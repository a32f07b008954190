mod common;

use proptest::prelude::*;
use superengine::analysis::{sweep, SweepAxis};
use superengine::cycle::{
    efficiency_of, run_cycle, run_engine, run_ignition, window_integral, CyclePlan, StrokeKind, StrokeWindow,
};
use superengine::Error;

fn small_plan() -> CyclePlan<f64> {
    let mut p = CyclePlan::new(4, 1.0, 0.5, 0.02, 3.5);
    p.sample_stride = 100;
    p.n_cycles = 3;
    p
}

fn csv_columns(bytes: &[u8]) -> Vec<Vec<f64>> {
    let text = std::str::from_utf8(bytes).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "t,jz,jpjm,jmjp,trace,energy");
    lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

fn trapezoid(rows: &[(f64, f64)]) -> f64 {
    rows.windows(2)
        .map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1))
        .sum()
}

#[test]
fn work_integrals_match_hand_trapezoid_on_exported_samples() {
    let plan = small_plan();
    let resolved = plan.resolve().unwrap();
    let rho = run_ignition(&plan).unwrap();
    let (_, rec) = run_cycle(&rho, &plan, 1).unwrap();
    let mut abs_csv = Vec::new();
    rec.absorption.write_csv(&mut abs_csv).unwrap();
    let mut em_csv = Vec::new();
    rec.emission.write_csv(&mut em_csv).unwrap();
    let abs = csv_columns(&abs_csv);
    let em = csv_columns(&em_csv);
    assert!(abs.len() <= 50 && em.len() <= 50, "{} {}", abs.len(), em.len());

    let g = plan.gamma_down;
    let sched = resolved.absorption_schedule(1).unwrap();
    let pump: Vec<(f64, f64)> = abs.iter().map(|r| (r[0], sched.pump_rate(r[0]) * r[3])).collect();
    let leak: Vec<(f64, f64)> = abs.iter().map(|r| (r[0], g * r[2])).collect();
    let emitted: Vec<(f64, f64)> = em.iter().map(|r| (r[0], g * r[2])).collect();
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1e-300);
    assert!(rel(rec.w_pump(), trapezoid(&pump)) < 1e-9);
    assert!(rel(rec.w_leak(), trapezoid(&leak)) < 1e-9);
    assert!(rel(rec.w_em(), trapezoid(&emitted)) < 1e-9);
}

#[test]
fn sech2_window_integral_gives_pulse_area() {
    let (i0, tau, td) = (3.7, 0.8, 2.0);
    let t: Vec<f64> = (0..=20000)
        .map(|k| td - 10.0 * tau + k as f64 * 20.0 * tau / 20000.0)
        .collect();
    let v: Vec<f64> = t.iter().map(|&x| i0 / ((x - td) / tau).cosh().powi(2)).collect();
    let area = window_integral(&t, &v, t[0], t[20000]).unwrap();
    assert!((area - 2.0 * tau * i0).abs() < 1e-6 * area);
}

#[test]
fn ignition_approaches_ground_state_as_cold_bath_vanishes() {
    let plan = CyclePlan::new(6, 1.0, 0.02, 0.01, 3.5);
    let rho = run_ignition(&plan).unwrap();
    assert!(rho.populations()[0] > 1.0 - 1e-15);
    let oracle = common::gibbs_populations(6, 1.0, 0.5);
    let warm = run_ignition(&CyclePlan::new(6, 1.0, 0.5, 0.01, 3.5)).unwrap();
    for (p, q) in warm.populations().iter().zip(&oracle) {
        assert!((p - q).abs() < 1e-14);
    }
}

#[test]
fn limit_cycle_settles() {
    let mut plan = CyclePlan::new(40, 1.0, 0.5, 0.01, 3.5);
    plan.n_cycles = 6;
    let report = run_engine(&plan).unwrap();
    let changes: Vec<f64> = report.records.iter().filter_map(|r| r.state_change).collect();
    assert_eq!(changes.len(), 5);
    for w in changes[1..].windows(2) {
        assert!(w[1] <= w[0] * (1.0 + 1e-6) + 1e-12, "{changes:?}");
    }
    for r in &report.records {
        assert!(r.audit_residual < 1e-3);
        let eta = r.eta.unwrap();
        assert!(eta > 0.0 && eta < 1.05);
        assert!(r.w_pump() > 0.0 && r.w_em() > 0.0 && r.w_leak() >= 0.0);
    }
    let etas = report.etas();
    let last = etas[5].unwrap();
    assert!((etas[4].unwrap() - last).abs() < 1e-3 * last);
}

#[test]
fn doubling_n_quadruples_power() {
    let power = |n: usize| {
        let mut p = CyclePlan::new(n, 1.0, 0.5, 0.01, 3.5);
        p.n_cycles = 3;
        run_engine(&p).unwrap().average_power
    };
    let ratio: f64 = power(60) / power(30);
    assert!((ratio - 4.0).abs() < 0.3, "{ratio}");
}

#[test]
fn tau_switch_sweep_has_interior_optimum() {
    let mut template = CyclePlan::new(40, 1.0, 0.5, 0.01, 3.5);
    template.n_cycles = 4;
    let sa = template.resolve().unwrap().absorption_duration;
    let grid: Vec<f64> = (0..10).map(|k| sa * 1e-4 * 10f64.powf(k as f64 * 3.5 / 9.0)).collect();
    let result = sweep(&template, SweepAxis::TauSwitch, &grid).unwrap();
    assert!(result.errors.iter().all(Option::is_none));
    let k = result.interior_eta_maximum();
    assert!(matches!(k, Some(4..=6)), "{:?}", result.eta);
    let again = sweep(&template, SweepAxis::TauSwitch, &grid).unwrap();
    assert_eq!(result.eta, again.eta);
}

#[test]
fn cycle_error_paths() {
    assert!(matches!(efficiency_of(1.0, 0.0), Err(Error::NoSuppliedEnergy)));
    assert!(StrokeWindow::new(StrokeKind::Absorption, 2.0, 1.0).is_err());
    let bad = CyclePlan::new(4, 1.0, 0.5, 0.02, 1.0);
    assert!(bad.resolve().is_err());
    let mut neg = small_plan();
    neg.gamma_down = -1.0;
    assert!(run_engine(&neg).is_err());
    let wide = CyclePlan::new(4, 1.0, 0.5, 0.05, 3.5);
    assert!(wide.outside_validity());
    assert!(!wide.warnings().is_empty());
}

proptest! {
    #[test]
    fn window_integral_is_exact_for_constants(
        g in -10.0f64..10.0,
        steps in proptest::collection::vec(0.01f64..1.0, 2..40),
        fa in 0.0f64..1.0,
        fb in 0.0f64..1.0,
    ) {
        let mut t = vec![0.0];
        for s in &steps {
            t.push(t.last().unwrap() + s);
        }
        let end = *t.last().unwrap();
        let (a, b) = if fa <= fb { (fa * end, fb * end) } else { (fb * end, fa * end) };
        let v = vec![g; t.len()];
        let w = window_integral(&t, &v, a, b).unwrap();
        prop_assert!((w - g * (b - a)).abs() < 1e-12 * (1.0 + g.abs() * end));
    }

    #[test]
    fn efficiency_is_ratio(em in 0.0f64..10.0, pump in 1e-6f64..10.0) {
        prop_assert!((efficiency_of(em, pump).unwrap() - em / pump).abs() < 1e-15);
    }
}
