//! Linearized fluctuation dynamics `u̇ = A u + n` in the ordering
//! `(δq, δp, δX1, δY1, δX2, δY2)`, and stability of the drift matrix.

use serde::{Deserialize, Serialize};

use crate::linalg::{characteristic_polynomial, SquareMatrix};
use crate::model::{DerivedParams, PhysicalParams, SteadyState};
use crate::{Error, Real, Result};

pub type DriftMatrix<T> = SquareMatrix<T, 6>;

/// Relative width of the marginal-stability band, in units of `max|A|`.
pub const STABILITY_MARGIN: f64 = 1e-9;

pub const Q: usize = 0;
pub const P: usize = 1;
pub const X1: usize = 2;
pub const Y1: usize = 3;
pub const X2: usize = 4;
pub const Y2: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearModel<T: Real> {
    pub drift: DriftMatrix<T>,
    pub diffusion: DriftMatrix<T>,
    pub steady: SteadyState<T>,
    pub derived: DerivedParams<T>,
    /// Mechanical frequency, used to nondimensionalize before eigen and Lyapunov work.
    pub omega_m: T,
}

impl<T: Real> LinearModel<T> {
    pub fn new(params: &PhysicalParams<T>, steady: SteadyState<T>, derived: DerivedParams<T>) -> Self {
        let drift = build_drift(
            &steady,
            &derived,
            params.opa_gain,
            params.opa_phase,
            params.omega_m,
            params.gamma_m,
        );
        let diffusion = build_diffusion(derived.kappa, params.gamma_m, derived.n_bar);
        Self {
            drift,
            diffusion,
            steady,
            derived,
            omega_m: params.omega_m,
        }
    }

    pub fn stability(&self) -> Result<Stability<T>> {
        stability_scaled(&self.drift, self.omega_m)
    }
}

pub fn build_drift<T: Real>(
    steady: &SteadyState<T>,
    derived: &DerivedParams<T>,
    gain: T,
    theta: T,
    omega_m: T,
    gamma_m: T,
) -> DriftMatrix<T> {
    let kappa = derived.kappa;
    let two_g = T::lit(2.0) * gain;
    let (gc, gs) = (two_g * theta.cos(), two_g * theta.sin());

    let mut a = DriftMatrix::zeros();
    a[(Q, P)] = omega_m;
    a[(P, Q)] = -omega_m;
    a[(P, P)] = -gamma_m;
    a[(P, X1)] = steady.coupling_1;
    a[(P, X2)] = steady.coupling_2;
    for (x, y, delta, coupling) in [
        (X1, Y1, steady.delta_1, steady.coupling_1),
        (X2, Y2, steady.delta_2, steady.coupling_2),
    ] {
        a[(x, x)] = -kappa + gc;
        a[(x, y)] = delta + gs;
        a[(y, x)] = -delta + gs;
        a[(y, y)] = -kappa - gc;
        a[(y, Q)] = coupling;
    }
    a
}

/// `diag[0, γm(2n̄+1), κ, κ, κ, κ]`.
pub fn build_diffusion<T: Real>(kappa: T, gamma_m: T, n_bar: T) -> DriftMatrix<T> {
    let thermal = gamma_m * (T::lit(2.0) * n_bar + T::one());
    DriftMatrix::from_diagonal(&[T::zero(), thermal, kappa, kappa, kappa, kappa])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stability<T> {
    /// `max Re λ(A)`, rad/s.
    pub abscissa: T,
    /// `10⁻⁹ · max|A|`.
    pub margin: T,
}

impl<T: Real> Stability<T> {
    /// Strictly inside the stable region; marginal points count as unstable.
    pub fn is_stable(&self) -> bool {
        self.abscissa < -self.margin
    }

    pub fn is_marginal(&self) -> bool {
        self.abscissa.abs() <= self.margin
    }
}

/// Eigenvalues of `A/scale`, abscissa rescaled back to the units of `A`.
pub fn stability_scaled<T: Real, const N: usize>(a: &SquareMatrix<T, N>, scale: T) -> Result<Stability<T>> {
    if !a.is_finite() {
        return Err(Error::EigenNonConvergence);
    }
    let scale = if scale > T::zero() { scale } else { T::one() };
    let ev = a.scale(T::one() / scale).eigenvalues()?;
    let abscissa = ev.iter().fold(T::neg_infinity(), |m, z| m.max(z.re)) * scale;
    Ok(Stability {
        abscissa,
        margin: T::lit(STABILITY_MARGIN) * a.max_abs(),
    })
}

/// Largest real part over the eigenvalues of `A`.
pub fn spectral_abscissa<T: Real, const N: usize>(a: &SquareMatrix<T, N>) -> Result<T> {
    Ok(stability_scaled(a, a.max_abs())?.abscissa)
}

pub fn is_stable<T: Real, const N: usize>(a: &SquareMatrix<T, N>) -> Result<bool> {
    Ok(stability_scaled(a, a.max_abs())?.is_stable())
}

/// Routh–Hurwitz test on `det(sI − A)`.
///
/// Returns `true` only when every entry of the first column of the Routh
/// array is strictly positive; a vanishing entry (marginal case) gives `false`.
pub fn routh_hurwitz_stable<T: Real, const N: usize>(a: &SquareMatrix<T, N>) -> bool {
    let scale = a.max_abs();
    if scale == T::zero() || !a.is_finite() {
        return false;
    }
    let mut coeffs = characteristic_polynomial(&a.scale(T::one() / scale));
    coeffs.reverse(); // descending powers, leading coefficient 1
    routh_first_column(&coeffs).iter().all(|&c| c > T::zero())
}

/// First column of the Routh array for a polynomial given in descending powers.
pub fn routh_first_column<T: Real>(descending: &[T]) -> Vec<T> {
    let degree = descending.len() - 1;
    let width = degree / 2 + 1;
    let row = |start: usize| -> Vec<T> {
        (0..width)
            .map(|k| descending.get(start + 2 * k).copied().unwrap_or_else(T::zero))
            .collect()
    };
    let mut prev = row(0);
    let mut cur = row(1);
    let mut first = vec![prev[0], cur[0]];
    // Rounding noise relative to the coefficient size.
    let noise = descending.iter().fold(T::zero(), |m, c| m.max(c.abs())) * T::epsilon() * T::lit(16.0);
    for _ in 2..=degree {
        let pivot = cur[0];
        if pivot.abs() <= noise {
            first.push(T::zero());
            return first;
        }
        let next: Vec<T> = (0..width)
            .map(|k| {
                let a = prev.get(k + 1).copied().unwrap_or_else(T::zero);
                let b = cur.get(k + 1).copied().unwrap_or_else(T::zero);
                (pivot * a - prev[0] * b) / pivot
            })
            .collect();
        first.push(next[0]);
        prev = cur;
        cur = next;
    }
    first
}
