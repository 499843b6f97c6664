//! Invariants of the model, the drift matrix, the Lyapunov solver and the
//! entanglement measures.

mod support;

use std::f64::consts::PI;

use num_complex::Complex;
use optomech::dynamics::{build_drift, routh_hurwitz_stable, stability_scaled, X1, X2, Y1, Y2};
use optomech::entanglement::{
    log_negativity, partial_transpose_mode1, partial_transpose_mode2, symplectic_eigenvalues_2mode,
};
use optomech::experiments::{linspace, sweep_theta, Settings};
use optomech::lyapunov::solve_lyapunov;
use optomech::model::{
    derive_constants, solve_steady_state, steady_amplitude_exact, steady_amplitude_unconjugated, thermal_occupation,
    AmplitudeModel, Detunings,
};
use optomech::{Matrix4, Matrix6, Params, SquareMatrix};
use proptest::prelude::*;
use support::oracles;

fn params_strategy() -> impl Strategy<Value = Params> {
    (
        1e-13..1e-10f64,  // mass
        1e6..1e8f64,      // ωm/2π
        1e3..1e6f64,      // Q
        1e-3..2e-2f64,    // L
        1e3..1e6f64,      // F
        0.0..0.2f64,      // P1
        0.0..0.2f64,      // P2
        -2.0..2.0f64,     // Δ1/ωm
        -2.0..2.0f64,     // Δ2/ωm
        0.0..3.0f64,      // G/κ
        0.0..(2.0 * PI),  // θ
        0.0..2.0f64,      // T
    )
        .prop_map(|(mass, fm, q, l, f, p1, p2, d1, d2, g, theta, t)| {
            let omega_m = 2.0 * PI * fm;
            let kappa = PI * 299_792_458.0 / (2.0 * f * l);
            Params {
                mass,
                omega_m,
                gamma_m: omega_m / q,
                cavity_length: l,
                finesse: f,
                wavelength_1: 1064e-9,
                wavelength_2: 1064e-9,
                power_1: p1,
                power_2: p2,
                detunings: Detunings::Effective {
                    delta_1: d1 * omega_m,
                    delta_2: d2 * omega_m,
                },
                opa_gain: g * kappa,
                opa_phase: theta,
                temperature: t,
            }
        })
}

fn rotation(t: f64) -> [[f64; 2]; 2] {
    [[t.cos(), t.sin()], [-t.sin(), t.cos()]]
}

fn local_rotation(a: f64, b: f64) -> Matrix4 {
    let (r1, r2) = (rotation(a), rotation(b));
    Matrix4::from_fn(|i, j| match (i / 2, j / 2) {
        (0, 0) => r1[i % 2][j % 2],
        (1, 1) => r2[i % 2][j % 2],
        _ => 0.0,
    })
}

fn two_mode_state() -> impl Strategy<Value = Matrix4> {
    (
        0.5..4.0f64,
        0.5..4.0f64,
        -1.0..1.0f64,
        -1.0..1.0f64,
        0.0..1.5f64,
        0.0..PI,
        prop::array::uniform4(0.0..(2.0 * PI)),
    )
        .prop_map(|(n1, n2, s1, s2, tms, bs, ph)| {
            let v = oracles::random_two_mode_state([n1, n2], [s1, s2], tms, bs, ph);
            Matrix4::from_fn(|i, j| v[i][j])
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn drift_trace_is_fixed(p in params_strategy()) {
        let d = derive_constants(&p).unwrap();
        let s = solve_steady_state(&p, &d, AmplitudeModel::Unconjugated);
        prop_assume!(s.is_ok());
        let s = s.unwrap();
        let a = build_drift(&s, &d, p.opa_gain, p.opa_phase, p.omega_m, p.gamma_m);
        let want = -p.gamma_m - 4.0 * d.kappa;
        prop_assert!(((a.trace() - want) / want).abs() < 1e-12);
    }

    #[test]
    fn drift_is_symmetric_under_mode_exchange(p in params_strategy()) {
        let d = derive_constants(&p).unwrap();
        let s = solve_steady_state(&p, &d, AmplitudeModel::Unconjugated);
        prop_assume!(s.is_ok());
        let s = s.unwrap();
        let a = build_drift(&s, &d, p.opa_gain, p.opa_phase, p.omega_m, p.gamma_m);
        let mut swapped = s;
        swapped.delta_1 = s.delta_2;
        swapped.delta_2 = s.delta_1;
        swapped.coupling_1 = s.coupling_2;
        swapped.coupling_2 = s.coupling_1;
        let b = build_drift(&swapped, &d, p.opa_gain, p.opa_phase, p.omega_m, p.gamma_m);
        let perm = [0, 1, X2, Y2, X1, Y1];
        prop_assert_eq!(b, a.submatrix(perm));
    }

    #[test]
    fn routh_hurwitz_matches_eigenvalues(p in params_strategy()) {
        let d = derive_constants(&p).unwrap();
        let s = solve_steady_state(&p, &d, AmplitudeModel::Unconjugated);
        prop_assume!(s.is_ok());
        let a = build_drift(&s.unwrap(), &d, p.opa_gain, p.opa_phase, p.omega_m, p.gamma_m);
        let st = stability_scaled(&a, p.omega_m).unwrap();
        prop_assume!(st.abscissa.abs() > st.margin);
        prop_assert_eq!(routh_hurwitz_stable(&a), st.is_stable());
    }

    #[test]
    fn lyapunov_is_scale_invariant_and_linear(
        seed in prop::array::uniform32(-1.0..1.0f64),
        shift in 0.5..3.0f64,
        s in 1e-3..1e3f64,
        d1 in prop::array::uniform6(0.0..2.0f64),
        d2 in prop::array::uniform6(0.0..2.0f64),
    ) {
        let a = Matrix6::from_fn(|i, j| seed[(i * 6 + j) % 32] * 0.3 - if i == j { shift } else { 0.0 });
        prop_assume!(stability_scaled(&a, 1.0).unwrap().abscissa < -1e-3);
        let (dm1, dm2) = (Matrix6::from_diagonal(&d1), Matrix6::from_diagonal(&d2));
        let v = solve_lyapunov(&a, &dm1).unwrap().v;
        let vs = solve_lyapunov(&a.scale(1.0 / s), &dm1.scale(1.0 / s)).unwrap().v;
        prop_assert!(oracles::max_rel_diff(&vs.0, &v.0) < 1e-10);

        let v2 = solve_lyapunov(&a, &dm2).unwrap().v;
        let v12 = solve_lyapunov(&a, &(dm1 + dm2)).unwrap().v;
        prop_assert!(oracles::max_rel_diff(&(v + v2).0, &v12.0) < 1e-10);
    }

    #[test]
    fn negativity_ignores_which_mode_is_transposed(m in two_mode_state()) {
        let (a, _) = symplectic_eigenvalues_2mode(&partial_transpose_mode2(&m)).unwrap();
        let (b, _) = symplectic_eigenvalues_2mode(&partial_transpose_mode1(&m)).unwrap();
        prop_assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn negativity_is_invariant_under_local_rotations(m in two_mode_state(), t1 in 0.0..(2.0 * PI), t2 in 0.0..(2.0 * PI)) {
        let r = local_rotation(t1, t2);
        let rotated = r * m * r.transpose();
        let e0 = log_negativity(&m).unwrap().e_n;
        let e1 = log_negativity(&rotated).unwrap().e_n;
        prop_assert!((e0 - e1).abs() < 1e-9);
    }

    #[test]
    fn product_states_are_separable(a in two_mode_state(), b in two_mode_state()) {
        // Take mode 1 of one random state and mode 2 of another.
        let m = Matrix4::from_fn(|i, j| match (i / 2, j / 2) {
            (0, 0) => a[(i, j)],
            (1, 1) => b[(i, j)],
            _ => 0.0,
        });
        prop_assert_eq!(log_negativity(&m).unwrap().e_n, 0.0);
    }

    #[test]
    fn amplitude_is_odd_in_drive(
        eps in 1.0..1e12f64, kappa in 1e3..1e7f64, delta in -1e8..1e8f64, g in 0.0..0.45f64, theta in 0.0..(2.0 * PI)
    ) {
        let gain = g * kappa;
        for f in [steady_amplitude_unconjugated::<f64>, steady_amplitude_exact::<f64>] {
            let a = f(Complex::new(eps, 0.0), kappa, delta, gain, theta).unwrap();
            let b = f(Complex::new(-eps, 0.0), kappa, delta, gain, theta).unwrap();
            prop_assert!((a + b).norm() <= 1e-12 * a.norm());
            prop_assert_eq!(a.norm(), b.norm());
        }
    }

    #[test]
    fn models_coincide_without_gain(eps in 1.0..1e12f64, kappa in 1e3..1e7f64, delta in -1e8..1e8f64, theta in 0.0..(2.0 * PI)) {
        let e = Complex::new(eps, 0.0);
        let a = steady_amplitude_unconjugated(e, kappa, delta, 0.0, theta).unwrap();
        let b = steady_amplitude_exact(e, kappa, delta, 0.0, theta).unwrap();
        prop_assert!((a - b).norm() <= 1e-12 * a.norm());
    }

    #[test]
    fn thermal_occupation_increases_with_temperature(w in 1e5..1e9f64, t1 in 1e-4..10.0f64, dt in 1e-4..1.0f64) {
        prop_assert!(thermal_occupation(w, t1 + dt) > thermal_occupation(w, t1));
        prop_assert!(thermal_occupation(w, t1) >= 0.0);
    }

    #[test]
    fn bare_mode_fixed_point_balances_forces(p in params_strategy(), d1 in -2.0..2.0f64, d2 in -2.0..2.0f64) {
        let p = Params {
            detunings: Detunings::Bare { delta_01: d1 * p.omega_m, delta_02: d2 * p.omega_m },
            ..p
        };
        let d = derive_constants(&p).unwrap();
        if let Ok(s) = solve_steady_state(&p, &d, AmplitudeModel::Unconjugated) {
            prop_assert!(s.displacement_residual(&d, p.omega_m) < 1e-10);
            prop_assert_eq!(s.p_s, 0.0);
        }
    }

    #[test]
    fn physical_states_have_symplectic_eigenvalues_above_half(m in two_mode_state()) {
        let (nm, np) = symplectic_eigenvalues_2mode(&m).unwrap();
        prop_assert!(nm >= 0.5 - 1e-9 && np >= nm);
    }
}

#[test]
fn separable_diagonal_block_has_zero_negativity() {
    let mut m = SquareMatrix::<f64, 4>::identity().scale(0.5);
    m[(0, 0)] = 2.0;
    m[(1, 1)] = 0.125;
    assert_eq!(log_negativity(&m).unwrap().e_n, 0.0);
}

#[test]
fn sweeps_do_not_depend_on_thread_count() {
    let base = Params::reference();
    let kappa = derive_constants(&base).unwrap().kappa;
    let base = base.with_opa(3.0 * kappa, 0.0);
    let grid = linspace(0.0, PI, 41);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| sweep_theta(&base, &grid, &Settings::default()).unwrap())
    };
    let one = run(1);
    let many = run(8);
    assert_eq!(format!("{one:?}"), format!("{many:?}"));
}
