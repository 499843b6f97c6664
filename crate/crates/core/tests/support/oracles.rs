//! Independent reference computations for tests. Nothing here calls into the
//! solvers under test; eigenvalues come from nalgebra.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector, Matrix4, Matrix6};

pub type Mat6 = [[f64; 6]; 6];

/// Eigenvalues (re, im) via nalgebra's real Schur decomposition.
pub fn eigenvalues<const N: usize>(m: &[[f64; N]; N]) -> Vec<(f64, f64)> {
    let dm = DMatrix::from_fn(N, N, |i, j| m[i][j]);
    dm.complex_eigenvalues().iter().map(|z| (z.re, z.im)).collect()
}

pub fn spectral_abscissa<const N: usize>(m: &[[f64; N]; N]) -> f64 {
    eigenvalues(m).iter().map(|z| z.0).fold(f64::NEG_INFINITY, f64::max)
}

/// Symplectic eigenvalues as the sorted moduli of eig(iΩV), both members of
/// each ± pair kept.
pub fn symplectic_moduli<const N: usize>(v: &[[f64; N]; N]) -> Vec<f64> {
    let omega = DMatrix::from_fn(N, N, |i, j| {
        if i % 2 == 0 && j == i + 1 {
            1.0
        } else if i % 2 == 1 && j + 1 == i {
            -1.0
        } else {
            0.0
        }
    });
    let vm = DMatrix::from_fn(N, N, |i, j| v[i][j]);
    // eig(iΩV) = i·eig(ΩV); moduli agree.
    let mut m: Vec<f64> = (omega * vm).complex_eigenvalues().iter().map(|z| z.norm()).collect();
    m.sort_by(|a, b| a.partial_cmp(b).unwrap());
    m
}

pub fn min_symplectic_eigenvalue<const N: usize>(v: &[[f64; N]; N]) -> f64 {
    symplectic_moduli(v)[0]
}

/// `AV + VAᵀ + D` computed entry by entry.
fn lyapunov_rhs(a: &Matrix6<f64>, v: &Matrix6<f64>, d: &Matrix6<f64>) -> Matrix6<f64> {
    a * v + v * a.transpose() + d
}

/// Steady state of `dV/dt = AV + VAᵀ + D` by explicit RK4 from `V(0) = 0`
/// with step `h = 10⁻³ / max|A|`.
///
/// One RK4 step is an affine map `vec V ↦ S vec V + c`. It is assembled by
/// stepping the 36 basis matrices, then composed with itself by repeated
/// squaring, which reproduces `2^k` consecutive RK4 steps exactly.
pub fn lyapunov_by_time_stepping(a: &Mat6, d: &Mat6) -> Mat6 {
    let am = Matrix6::from_fn(|i, j| a[i][j]);
    let dm = Matrix6::from_fn(|i, j| d[i][j]);
    let h = 1e-3 / am.amax();

    let rk4 = |v: &Matrix6<f64>, source: &Matrix6<f64>| -> Matrix6<f64> {
        let k1 = lyapunov_rhs(&am, v, source);
        let k2 = lyapunov_rhs(&am, &(v + k1 * (h / 2.0)), source);
        let k3 = lyapunov_rhs(&am, &(v + k2 * (h / 2.0)), source);
        let k4 = lyapunov_rhs(&am, &(v + k3 * h), source);
        v + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)
    };

    let zero = Matrix6::zeros();
    let c0 = rk4(&zero, &dm);
    let mut step = DMatrix::<f64>::zeros(36, 36);
    for col in 0..36 {
        let mut basis = Matrix6::zeros();
        basis[(col / 6, col % 6)] = 1.0;
        let image = rk4(&basis, &zero);
        for row in 0..36 {
            step[(row, col)] = image[(row / 6, row % 6)];
        }
    }
    let mut offset = DVector::from_fn(36, |k, _| c0[(k / 6, k % 6)]);

    // After k squarings: V(2^k h) = offset. Stop once the homogeneous part has decayed.
    for _ in 0..200 {
        offset = &step * &offset + &offset;
        step = &step * &step;
        if step.amax() < 1e-18 {
            break;
        }
    }
    let mut out = [[0.0; 6]; 6];
    for k in 0..36 {
        out[k / 6][k % 6] = offset[k];
    }
    out
}

/// Plain RK4 integration for a fixed number of steps; slow but literal.
pub fn lyapunov_rk4_steps(a: &Mat6, d: &Mat6, steps: usize) -> Mat6 {
    let am = Matrix6::from_fn(|i, j| a[i][j]);
    let dm = Matrix6::from_fn(|i, j| d[i][j]);
    let h = 1e-3 / am.amax();
    let mut v = Matrix6::zeros();
    for _ in 0..steps {
        let k1 = lyapunov_rhs(&am, &v, &dm);
        let k2 = lyapunov_rhs(&am, &(v + k1 * (h / 2.0)), &dm);
        let k3 = lyapunov_rhs(&am, &(v + k2 * (h / 2.0)), &dm);
        let k4 = lyapunov_rhs(&am, &(v + k3 * h), &dm);
        v += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
    let mut out = [[0.0; 6]; 6];
    for i in 0..6 {
        for j in 0..6 {
            out[i][j] = v[(i, j)];
        }
    }
    out
}

/// Largest entrywise difference relative to the largest entry of `reference`.
pub fn max_rel_diff<const N: usize>(x: &[[f64; N]; N], reference: &[[f64; N]; N]) -> f64 {
    let scale = reference.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut worst = 0.0f64;
    for i in 0..N {
        for j in 0..N {
            worst = worst.max((x[i][j] - reference[i][j]).abs());
        }
    }
    worst / scale
}

/// Two-mode Gaussian state built from symplectic generators acting on a
/// thermal state with the given occupations (ν = n + 1/2).
pub fn random_two_mode_state(nu: [f64; 2], squeeze: [f64; 2], tms: f64, bs: f64, phases: [f64; 4]) -> [[f64; 4]; 4] {
    let rot = |t: f64, k: usize| {
        let mut m = Matrix4::identity();
        let (c, s) = (t.cos(), t.sin());
        m[(2 * k, 2 * k)] = c;
        m[(2 * k, 2 * k + 1)] = s;
        m[(2 * k + 1, 2 * k)] = -s;
        m[(2 * k + 1, 2 * k + 1)] = c;
        m
    };
    let sq = Matrix4::from_diagonal(&nalgebra::Vector4::new(
        squeeze[0].exp(),
        (-squeeze[0]).exp(),
        squeeze[1].exp(),
        (-squeeze[1]).exp(),
    ));
    let (ch, sh) = (tms.cosh(), tms.sinh());
    let two_mode = Matrix4::new(
        ch, 0.0, sh, 0.0, //
        0.0, ch, 0.0, -sh, //
        sh, 0.0, ch, 0.0, //
        0.0, -sh, 0.0, ch,
    );
    let (c, s) = (bs.cos(), bs.sin());
    let splitter = Matrix4::new(
        c, 0.0, s, 0.0, //
        0.0, c, 0.0, s, //
        -s, 0.0, c, 0.0, //
        0.0, -s, 0.0, c,
    );
    let s_total = rot(phases[0], 0) * rot(phases[1], 1) * splitter * two_mode * sq * rot(phases[2], 0) * rot(phases[3], 1);
    let thermal = Matrix4::from_diagonal(&nalgebra::Vector4::new(nu[0], nu[0], nu[1], nu[1]));
    let v = s_total * thermal * s_total.transpose();
    let v = (v + v.transpose()) * 0.5;
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = v[(i, j)];
        }
    }
    out
}
