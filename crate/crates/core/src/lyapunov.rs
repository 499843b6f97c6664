//! Steady-state covariance from the continuous Lyapunov equation
//! `A V + V Aᵀ = −D`.
//!
//! The equation is vectorized, `(A ⊗ I + I ⊗ A) vec(V) = −vec(D)`, and the
//! `N²×N²` system is solved densely. For `N = 6` that is 36 unknowns.

use serde::{Deserialize, Serialize};

use crate::dynamics::stability_scaled;
use crate::linalg::{lu_solve, SquareMatrix};
use crate::{Error, Real, Result};

/// Accepted relative residual `‖AV + VAᵀ + D‖_F / ‖D‖_F`.
pub const RESIDUAL_TOLERANCE: f64 = 1e-8;
/// Accepted pre-symmetrization asymmetry, relative to `max|V|`.
pub const ASYMMETRY_TOLERANCE: f64 = 1e-9;

/// Symmetric steady-state covariance with its solve diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovarianceMatrix<T: Real, const N: usize = 6> {
    pub v: SquareMatrix<T, N>,
    /// `‖AV + VAᵀ + D‖_F / ‖D‖_F` after symmetrization.
    pub residual_norm: T,
    /// `max|V − Vᵀ| / max|V|` before symmetrization.
    pub asymmetry: T,
}

impl<T: Real, const N: usize> CovarianceMatrix<T, N> {
    /// Residual and asymmetry are both inside tolerance.
    pub fn is_trustworthy(&self) -> bool {
        self.residual_norm < T::lit(RESIDUAL_TOLERANCE) && self.asymmetry <= T::lit(ASYMMETRY_TOLERANCE)
    }
}

/// `‖AV + VAᵀ + D‖_F / ‖D‖_F`.
pub fn lyapunov_residual<T: Real, const N: usize>(
    a: &SquareMatrix<T, N>,
    d: &SquareMatrix<T, N>,
    v: &SquareMatrix<T, N>,
) -> T {
    let r = *a * *v + *v * a.transpose() + *d;
    let dn = d.frobenius_norm();
    if dn > T::zero() {
        r.frobenius_norm() / dn
    } else {
        r.frobenius_norm()
    }
}

/// Solves `AV + VAᵀ = −D` for stable `A`.
///
/// Both matrices are divided by `max|A|` first; the solution is unchanged by
/// that rescaling.
pub fn solve_lyapunov<T: Real, const N: usize>(
    a: &SquareMatrix<T, N>,
    d: &SquareMatrix<T, N>,
) -> Result<CovarianceMatrix<T, N>> {
    let scale = a.max_abs();
    solve_lyapunov_scaled(a, d, scale)
}

/// As [`solve_lyapunov`], nondimensionalizing by a caller-chosen rate (e.g. ωm).
pub fn solve_lyapunov_scaled<T: Real, const N: usize>(
    a: &SquareMatrix<T, N>,
    d: &SquareMatrix<T, N>,
    scale: T,
) -> Result<CovarianceMatrix<T, N>> {
    let stability = stability_scaled(a, scale)?;
    if !stability.is_stable() {
        return Err(Error::Unstable {
            abscissa: stability.abscissa.to_f64().unwrap_or(f64::NAN),
        });
    }
    let inv = if scale > T::zero() { T::one() / scale } else { T::one() };
    let (a_s, d_s) = (a.scale(inv), d.scale(inv));

    // Row-major vec: index (i, j) -> i·N + j.
    // (AV)_ij = Σ_k A_ik V_kj, (VAᵀ)_ij = Σ_k V_ik A_jk.
    let n2 = N * N;
    let mut k = vec![vec![T::zero(); n2]; n2];
    for i in 0..N {
        for j in 0..N {
            let row = &mut k[i * N + j];
            for m in 0..N {
                row[m * N + j] = row[m * N + j] + a_s[(i, m)];
                row[i * N + m] = row[i * N + m] + a_s[(j, m)];
            }
        }
    }
    let rhs: Vec<T> = d_s.0.iter().flatten().map(|&x| -x).collect();
    let x = lu_solve(k, rhs)?;

    let raw = SquareMatrix::<T, N>::from_fn(|i, j| x[i * N + j]);
    let vmax = raw.max_abs();
    let asymmetry = if vmax > T::zero() { raw.asymmetry() / vmax } else { T::zero() };
    let v = raw.symmetrized();
    let residual_norm = lyapunov_residual(a, d, &v);
    if asymmetry > T::lit(ASYMMETRY_TOLERANCE) {
        log::warn!("Lyapunov solution asymmetry {asymmetry:e} exceeds tolerance");
    }
    Ok(CovarianceMatrix {
        v,
        residual_norm,
        asymmetry,
    })
}
