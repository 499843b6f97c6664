//! Two-mode Gaussian entanglement and single-mode squeezing diagnostics.
//!
//! Vacuum variance is 1/2: a covariance matrix is physical iff every
//! symplectic eigenvalue is at least 1/2.

use serde::{Deserialize, Serialize};

use crate::dynamics::{X1, X2, Y1, Y2};
use crate::linalg::SquareMatrix;
use crate::{Error, Real, Result};

pub type Matrix4<T> = SquareMatrix<T, 4>;

/// Tolerance for the two-mode invariant discriminant and for ± pairing.
pub const SYMPLECTIC_TOLERANCE: f64 = 1e-9;
/// `2ν̃₋` this close to 1 counts as separable.
pub const SEPARABILITY_CLAMP: f64 = 1e-12;

/// `Ωₙ = ⊕ [[0, 1], [−1, 0]]`.
pub fn symplectic_form<T: Real, const N: usize>() -> SquareMatrix<T, N> {
    SquareMatrix::from_fn(|i, j| {
        if i % 2 == 0 && j == i + 1 {
            T::one()
        } else if i % 2 == 1 && j + 1 == i {
            -T::one()
        } else {
            T::zero()
        }
    })
}

/// The optical 4×4 block, rows/columns `(X1, Y1, X2, Y2)`.
pub fn cavity_block<T: Real>(v: &SquareMatrix<T, 6>) -> Matrix4<T> {
    v.submatrix([X1, Y1, X2, Y2])
}

/// `P Vc P` with `P = diag(1, 1, 1, −1)`: flips the sign of mode 2's phase quadrature.
pub fn partial_transpose_mode2<T: Real>(vc: &Matrix4<T>) -> Matrix4<T> {
    flip_signs(vc, [false, false, false, true])
}

/// `P Vc P` with `P = diag(1, −1, 1, 1)`.
pub fn partial_transpose_mode1<T: Real>(vc: &Matrix4<T>) -> Matrix4<T> {
    flip_signs(vc, [false, true, false, false])
}

fn flip_signs<T: Real>(vc: &Matrix4<T>, flip: [bool; 4]) -> Matrix4<T> {
    Matrix4::from_fn(|i, j| {
        if flip[i] != flip[j] {
            -vc[(i, j)]
        } else {
            vc[(i, j)]
        }
    })
}

fn det2<T: Real>(m: &Matrix4<T>, r: usize, c: usize) -> T {
    m[(r, c)] * m[(r + 1, c + 1)] - m[(r, c + 1)] * m[(r + 1, c)]
}

/// Determinant of a 4×4 by Laplace expansion along 2×2 minors of the first two rows.
fn det4<T: Real>(m: &Matrix4<T>) -> T {
    let minor = |r: [usize; 2], c: [usize; 2]| m[(r[0], c[0])] * m[(r[1], c[1])] - m[(r[0], c[1])] * m[(r[1], c[0])];
    let pairs = [
        ([0, 1], [2, 3], T::one()),
        ([0, 2], [1, 3], -T::one()),
        ([0, 3], [1, 2], T::one()),
        ([1, 2], [0, 3], T::one()),
        ([1, 3], [0, 2], -T::one()),
        ([2, 3], [0, 1], T::one()),
    ];
    pairs.iter().fold(T::zero(), |acc, &(top, bottom, sign)| {
        acc + sign * minor([0, 1], top) * minor([2, 3], bottom)
    })
}

/// Symplectic eigenvalues `(ν₋, ν₊)` of a two-mode covariance matrix from its
/// local invariants `det A`, `det B`, `det C` and `det M`.
///
/// Pass the partially transposed matrix to obtain `ν̃∓`.
pub fn symplectic_eigenvalues_2mode<T: Real>(m: &Matrix4<T>) -> Result<(T, T)> {
    let det_m = det4(m);
    if !(det_m > T::zero()) {
        return Err(Error::Unphysical(format!("determinant {det_m:e} is not positive")));
    }
    let delta = det2(m, 0, 0) + det2(m, 2, 2) + T::lit(2.0) * det2(m, 0, 2);
    let four_det = T::lit(4.0) * det_m;
    let mut disc = delta * delta - four_det;
    if disc < T::zero() {
        if -disc > T::lit(SYMPLECTIC_TOLERANCE) * (delta * delta).max(four_det) {
            return Err(Error::Unphysical(format!(
                "symplectic invariants give complex eigenvalues (Δ² − 4 det = {disc:e})"
            )));
        }
        disc = T::zero();
    }
    let half = T::lit(0.5);
    let root = disc.sqrt();
    let plus = half * (delta + root);
    // ν₋² ν₊² = det M avoids cancellation in Δ − √disc.
    let minus = if plus > T::zero() { det_m / plus } else { half * (delta - root) };
    if !(minus > T::zero()) {
        return Err(Error::Unphysical(format!("ν₋² = {minus:e} is not positive")));
    }
    Ok((minus.sqrt(), plus.sqrt()))
}

/// The `n` symplectic eigenvalues of a `2n×2n` covariance matrix, ascending:
/// moduli of the eigenvalues of `iΩₙV`, which come in ± pairs.
pub fn symplectic_spectrum<T: Real, const N: usize>(v: &SquareMatrix<T, N>) -> Result<Vec<T>> {
    if !N.is_multiple_of(2) {
        return Err(Error::Unphysical(format!("dimension {N} is odd")));
    }
    let omega_v = symplectic_form::<T, N>() * *v;
    // Eigenvalues of ΩV are ±iν; those of iΩV are ∓ν.
    let mut moduli: Vec<T> = omega_v.eigenvalues()?.iter().map(|z| z.norm()).collect();
    moduli.sort_by(|a, b| a.partial_cmp(b).expect("finite moduli"));
    let tol = T::lit(SYMPLECTIC_TOLERANCE);
    moduli
        .chunks_exact(2)
        .map(|pair| {
            let (a, b) = (pair[0], pair[1]);
            if (a - b).abs() > tol * a.max(b).max(T::one()) {
                Err(Error::Unphysical(format!("eigenvalues {a:e} and {b:e} do not pair")))
            } else {
                Ok(T::lit(0.5) * (a + b))
            }
        })
        .collect()
}

/// Logarithmic negativity of a two-mode state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogNegativity<T> {
    pub e_n: T,
    /// Smallest symplectic eigenvalue of the partially transposed matrix.
    pub nu_minus_tilde: T,
}

/// `E_N = max(0, −ln 2ν̃₋)`.
pub fn log_negativity<T: Real>(vc: &Matrix4<T>) -> Result<LogNegativity<T>> {
    let (nu_minus_tilde, _) = symplectic_eigenvalues_2mode(&partial_transpose_mode2(vc))?;
    Ok(LogNegativity {
        e_n: negativity_from_nu(nu_minus_tilde),
        nu_minus_tilde,
    })
}

pub fn negativity_from_nu<T: Real>(nu_minus_tilde: T) -> T {
    let x = T::lit(2.0) * nu_minus_tilde;
    if (x - T::one()).abs() < T::lit(SEPARABILITY_CLAMP) {
        return T::zero();
    }
    (-x.ln()).max(T::zero())
}

/// `(⟨δX1²⟩/⟨δY1²⟩, ⟨δY2²⟩/⟨δX2²⟩)`.
pub fn squeezing_ratios<T: Real>(v: &SquareMatrix<T, 6>) -> Result<(T, T)> {
    for i in [X1, Y1, X2, Y2] {
        if !(v[(i, i)] > T::zero()) {
            return Err(Error::Unphysical(format!("variance V[{i}][{i}] = {} is not positive", v[(i, i)])));
        }
    }
    Ok((v[(X1, X1)] / v[(Y1, Y1)], v[(Y2, Y2)] / v[(X2, X2)]))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntanglementReport<T> {
    pub e_n: T,
    pub nu_minus_tilde: T,
    /// Diagonal of the full covariance matrix.
    pub variances: [T; 6],
    pub ratio_mode1: T,
    pub ratio_mode2: T,
}

impl<T: Real> EntanglementReport<T> {
    pub fn from_covariance(v: &SquareMatrix<T, 6>) -> Result<Self> {
        let variances = v.diagonal();
        if let Some(i) = variances.iter().position(|&x| !(x > T::zero())) {
            // V[0][0] etc. must be positive for any state with finite noise.
            return Err(Error::Unphysical(format!("variance {i} = {} is not positive", variances[i])));
        }
        let LogNegativity { e_n, nu_minus_tilde } = log_negativity(&cavity_block(v))?;
        let (ratio_mode1, ratio_mode2) = squeezing_ratios(v)?;
        Ok(Self {
            e_n,
            nu_minus_tilde,
            variances,
            ratio_mode1,
            ratio_mode2,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn tmsv(r: f64) -> Matrix4<f64> {
        let (c, s) = ((2.0 * r).cosh() / 2.0, (2.0 * r).sinh() / 2.0);
        SquareMatrix([[c, 0.0, s, 0.0], [0.0, c, 0.0, -s], [s, 0.0, c, 0.0], [0.0, -s, 0.0, c]])
    }

    #[test]
    fn symplectic_form_properties() {
        let o = symplectic_form::<f64, 6>();
        assert_eq!(o.transpose(), -o);
        assert_eq!(o * o, -SquareMatrix::identity());
    }

    #[test]
    fn cavity_block_slices_optical_rows() {
        let v = SquareMatrix::<f64, 6>::from_fn(|i, j| (10 * i + j) as f64);
        let c = cavity_block(&v);
        assert_eq!(c[(0, 0)], 22.0);
        assert_eq!(c[(1, 3)], 35.0);
        assert_eq!(c[(3, 2)], 54.0);
        let vac = cavity_block(&SquareMatrix::<f64, 6>::identity().scale(0.5));
        assert_eq!(vac, SquareMatrix::identity().scale(0.5));
    }

    #[test]
    fn partial_transpose_is_an_involution() {
        let d = Matrix4::from_diagonal(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(partial_transpose_mode2(&d), d);
        let m = tmsv(0.4);
        assert_eq!(partial_transpose_mode2(&partial_transpose_mode2(&m)), m);
        let pt = partial_transpose_mode2(&m);
        // The coupling block's second column flips sign.
        assert_eq!(pt[(0, 2)], m[(0, 2)]);
        assert_eq!(pt[(1, 3)], -m[(1, 3)]);
        assert_eq!(pt[(3, 1)], -m[(3, 1)]);
    }

    #[test]
    fn vacuum_symplectic_values() {
        let vac = Matrix4::<f64>::identity().scale(0.5);
        assert_eq!(symplectic_eigenvalues_2mode(&vac).unwrap(), (0.5, 0.5));
        let ln = log_negativity(&vac).unwrap();
        assert_eq!(ln.e_n, 0.0);
        let s = symplectic_spectrum(&SquareMatrix::<f64, 6>::identity().scale(0.5)).unwrap();
        for x in s {
            assert_relative_eq!(x, 0.5, max_relative = 1e-14);
        }
    }

    #[test]
    fn single_mode_squeezing_preserves_spectrum() {
        for a in [0.05, 0.5, 3.0, 40.0] {
            let mut d = [0.5; 6];
            d[0] = a;
            d[1] = 1.0 / (4.0 * a);
            let v = SquareMatrix::<f64, 6>::from_diagonal(&d);
            for x in symplectic_spectrum(&v).unwrap() {
                assert_relative_eq!(x, 0.5, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn two_mode_squeezed_vacuum() {
        for r in [0.1, 0.5, 1.0] {
            let m = tmsv(r);
            let (nm, np) = symplectic_eigenvalues_2mode(&m).unwrap();
            // Pure state: the pair is degenerate, so ν∓ carry √ε rounding.
            assert_relative_eq!(nm, 0.5, max_relative = 1e-7);
            assert_relative_eq!(np, 0.5, max_relative = 1e-7);
            let ln = log_negativity(&m).unwrap();
            assert_relative_eq!(ln.nu_minus_tilde, (-2.0 * r).exp() / 2.0, max_relative = 1e-12);
            assert!((ln.e_n - 2.0 * r).abs() < 1e-9);
        }
    }

    #[test]
    fn unphysical_inputs_are_rejected() {
        let mut m = Matrix4::<f64>::identity();
        m[(3, 3)] = -1.0;
        assert!(matches!(symplectic_eigenvalues_2mode(&m), Err(Error::Unphysical(_))));
        // Indefinite, det > 0, and Δ² < 4 det: complex roots.
        let m = SquareMatrix([
            [2.0, 0.0, -1.5, 0.0],
            [0.0, -1.0, 0.5, -0.5],
            [-1.5, 0.5, -2.0, -1.5],
            [0.0, -0.5, -1.5, 2.0],
        ]);
        assert!(matches!(symplectic_eigenvalues_2mode(&m), Err(Error::Unphysical(_))));
        let v = SquareMatrix::<f64, 3>::identity();
        assert!(matches!(symplectic_spectrum(&v), Err(Error::Unphysical(_))));
    }

    #[test]
    fn near_unity_clamps_to_zero() {
        assert_eq!(negativity_from_nu(0.5 - 1e-14), 0.0);
        assert_eq!(negativity_from_nu(0.7), 0.0);
        assert!(negativity_from_nu(0.4) > 0.0);
    }

    #[test]
    fn ratios() {
        let v = SquareMatrix::<f64, 6>::identity().scale(0.5);
        assert_eq!(squeezing_ratios(&v).unwrap(), (1.0, 1.0));
        let v = SquareMatrix::<f64, 6>::from_diagonal(&[3.0, 3.0, 2.0, 0.5, 0.25, 1.0]);
        assert_eq!(squeezing_ratios(&v).unwrap(), (4.0, 4.0));
        let mut bad = v;
        bad[(Y1, Y1)] = 0.0;
        assert!(squeezing_ratios(&bad).is_err());
    }
}
