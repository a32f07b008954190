mod common;

use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use superengine::dicke::{build_collective_operators, expectation, thermal_state, DensityMatrix, DickeBasis};

#[test]
fn thermal_state_matches_brute_force_gibbs() {
    for n in 1..=6 {
        let b = DickeBasis::new(n).unwrap();
        for t in [-3.0, -0.5, -0.1, 0.1, 0.5, 2.0] {
            let rho = thermal_state(b, 1.0, t).unwrap();
            let oracle = common::gibbs_populations(n, 1.0, t);
            for (p, q) in rho.populations().iter().zip(&oracle) {
                assert_abs_diff_eq!(*p, *q, epsilon = 1e-14);
            }
            assert!(rho.elements().is_diagonal());
        }
    }
}

#[test]
fn four_emitter_gibbs_state_has_five_terms() {
    let rho = thermal_state(DickeBasis::new(4).unwrap(), 1.0, 0.5).unwrap();
    let w: Vec<f64> = [-2.0f64, -1.0, 0.0, 1.0, 2.0]
        .iter()
        .map(|m| (-2.0 * m).exp())
        .collect();
    let z: f64 = w.iter().sum();
    for (p, wi) in rho.populations().iter().zip(&w) {
        assert_abs_diff_eq!(*p, wi / z, epsilon = 1e-15);
    }
}

#[test]
fn collective_operators_match_nalgebra_commutators() {
    for n in [3usize, 6] {
        let [jx, jy, jz, jp, jm] = common::na_ops(n);
        let i = num_complex::Complex64::new(0.0, 1.0);
        let c = |a: &nalgebra::DMatrix<_>, b: &nalgebra::DMatrix<_>| a * b - b * a;
        assert!((c(&jx, &jy) - &jz * i).norm() < 1e-12);
        assert!((c(&jp, &jm) - &jz * num_complex::Complex64::new(2.0, 0.0)).norm() < 1e-12);
        assert!((&jm - jp.adjoint()).norm() < 1e-15);
    }
}

proptest! {
    #[test]
    fn thermal_populations_normalized_and_mirrored(n in 1usize..40, t in 0.05f64..20.0) {
        let b = DickeBasis::new(n).unwrap();
        let hot = thermal_state(b, 1.0, t).unwrap();
        let inv = thermal_state(b, 1.0, -t).unwrap();
        let p = hot.populations();
        let q = inv.populations();
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for k in 0..=n {
            prop_assert!((p[k] - q[n - k]).abs() < 1e-12);
        }
        let jz = build_collective_operators::<f64>(b).jz;
        prop_assert!(expectation(&jz, &hot).unwrap().re <= 1e-12);
    }

    #[test]
    fn dicke_states_are_jz_eigenstates(n in 1usize..30, k in 0usize..30) {
        prop_assume!(k <= n);
        let b = DickeBasis::new(n).unwrap();
        let rho = DensityMatrix::<f64>::dicke_state(b, k).unwrap();
        let o = build_collective_operators::<f64>(b);
        let m = k as f64 - n as f64 / 2.0;
        prop_assert!((expectation(&o.jz, &rho).unwrap().re - m).abs() < 1e-12);
        let j = n as f64 / 2.0;
        let jpjm = o.jp.compose(&o.jm).unwrap();
        prop_assert!((expectation(&jpjm, &rho).unwrap().re - (j * (j + 1.0) - m * (m - 1.0))).abs() < 1e-9);
    }
}
