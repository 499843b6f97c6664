//! Small dense linear algebra over a generic [`Real`] scalar.
//!
//! Everything here works on matrices of at most a few dozen rows: the 6×6
//! drift matrix, its 36×36 Kronecker sum and 4×4 covariance blocks.

// The eigenvalue routines keep the index arithmetic of their textbook form.
#![allow(clippy::needless_range_loop)]

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::{Error, Real, Result};

/// Row-major `N×N` matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquareMatrix<T, const N: usize>(pub [[T; N]; N]);

impl<T: Real, const N: usize> SquareMatrix<T, N> {
    pub fn zeros() -> Self {
        Self([[T::zero(); N]; N])
    }

    pub fn identity() -> Self {
        Self::from_diagonal(&[T::one(); N])
    }

    pub fn from_diagonal(d: &[T; N]) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = d[i];
        }
        m
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = f(i, j);
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(|i, j| self.0[j][i])
    }

    pub fn trace(&self) -> T {
        (0..N).fold(T::zero(), |acc, i| acc + self.0[i][i])
    }

    pub fn diagonal(&self) -> [T; N] {
        let mut d = [T::zero(); N];
        for (i, x) in d.iter_mut().enumerate() {
            *x = self.0[i][i];
        }
        d
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> T {
        self.0
            .iter()
            .flatten()
            .fold(T::zero(), |acc, &x| acc.max(x.abs()))
    }

    pub fn frobenius_norm(&self) -> T {
        self.0
            .iter()
            .flatten()
            .fold(T::zero(), |acc, &x| acc + x * x)
            .sqrt()
    }

    pub fn scale(&self, s: T) -> Self {
        Self::from_fn(|i, j| self.0[i][j] * s)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|x| x.is_finite())
    }

    /// `max |M − Mᵀ|` over all entries.
    pub fn asymmetry(&self) -> T {
        let mut worst = T::zero();
        for i in 0..N {
            for j in (i + 1)..N {
                worst = worst.max((self.0[i][j] - self.0[j][i]).abs());
            }
        }
        worst
    }

    /// `(M + Mᵀ)/2`.
    pub fn symmetrized(&self) -> Self {
        let half = T::lit(0.5);
        Self::from_fn(|i, j| (self.0[i][j] + self.0[j][i]) * half)
    }

    /// Principal submatrix on the given rows/columns, in that order.
    pub fn submatrix<const M: usize>(&self, idx: [usize; M]) -> SquareMatrix<T, M> {
        SquareMatrix::from_fn(|i, j| self.0[idx[i]][idx[j]])
    }

    /// Eigenvalues, in no particular order.
    pub fn eigenvalues(&self) -> Result<Vec<Complex<T>>> {
        let rows: Vec<Vec<T>> = self.0.iter().map(|r| r.to_vec()).collect();
        eigenvalues(&rows)
    }
}

/// Coefficients of `det(sI − M)` in ascending powers, via Faddeev–LeVerrier.
pub fn characteristic_polynomial<T: Real, const N: usize>(m: &SquareMatrix<T, N>) -> Vec<T> {
    let mut coeffs = vec![T::zero(); N + 1];
    coeffs[N] = T::one();
    let mut aux = SquareMatrix::<T, N>::zeros();
    for k in 1..=N {
        let mut next = *m * aux;
        for i in 0..N {
            next.0[i][i] = next.0[i][i] + coeffs[N - k + 1];
        }
        aux = next;
        let t = (*m * aux).trace();
        coeffs[N - k] = -t / T::from_usize(k).unwrap();
    }
    coeffs
}

impl<T, const N: usize> Default for SquareMatrix<T, N>
where
    T: Real,
{
    fn default() -> Self {
        Self::zeros()
    }
}

impl<T, const N: usize> Index<(usize, usize)> for SquareMatrix<T, N> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.0[i][j]
    }
}

impl<T, const N: usize> IndexMut<(usize, usize)> for SquareMatrix<T, N> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.0[i][j]
    }
}

impl<T: Real, const N: usize> Mul for SquareMatrix<T, N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::zeros();
        for i in 0..N {
            for k in 0..N {
                let a = self.0[i][k];
                if a == T::zero() {
                    continue;
                }
                for j in 0..N {
                    out.0[i][j] = out.0[i][j] + a * rhs.0[k][j];
                }
            }
        }
        out
    }
}

impl<T: Real, const N: usize> Add for SquareMatrix<T, N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.0[i][j] + rhs.0[i][j])
    }
}

impl<T: Real, const N: usize> Sub for SquareMatrix<T, N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.0[i][j] - rhs.0[i][j])
    }
}

impl<T: Real, const N: usize> Neg for SquareMatrix<T, N> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::from_fn(|i, j| -self.0[i][j])
    }
}

impl<T: Real + Serialize, const N: usize> Serialize for SquareMatrix<T, N> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<T>> = self.0.iter().map(|r| r.to_vec()).collect();
        rows.serialize(s)
    }
}

impl<'de, T: Real + Deserialize<'de>, const N: usize> Deserialize<'de> for SquareMatrix<T, N> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<T>> = Vec::deserialize(d)?;
        if rows.len() != N || rows.iter().any(|r| r.len() != N) {
            return Err(serde::de::Error::custom(format!("expected a {N}×{N} matrix")));
        }
        Ok(Self::from_fn(|i, j| rows[i][j]))
    }
}

/// Solves `K x = b` for a dense square `K` by LU with partial pivoting.
///
/// Fails with [`Error::Singular`] when a pivot falls below
/// `n · ε · max|K|`.
pub fn lu_solve<T: Real>(mut k: Vec<Vec<T>>, mut b: Vec<T>) -> Result<Vec<T>> {
    let n = b.len();
    debug_assert!(k.len() == n && k.iter().all(|r| r.len() == n));
    let scale = k
        .iter()
        .flatten()
        .fold(T::zero(), |acc, &x| acc.max(x.abs()));
    if scale == T::zero() || !scale.is_finite() {
        return Err(Error::Singular);
    }
    let tiny = T::from_usize(n).unwrap() * T::epsilon() * scale;

    for col in 0..n {
        let (pivot_row, pivot) = (col..n)
            .map(|r| (r, k[r][col].abs()))
            .fold((col, T::zero()), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot <= tiny {
            return Err(Error::Singular);
        }
        k.swap(col, pivot_row);
        b.swap(col, pivot_row);
        let (upper, lower) = k.split_at_mut(col + 1);
        let prow = &upper[col];
        for (r, row) in lower.iter_mut().enumerate() {
            let f = row[col] / prow[col];
            if f == T::zero() {
                continue;
            }
            row[col] = T::zero();
            for j in (col + 1)..n {
                row[j] = row[j] - f * prow[j];
            }
            b[col + 1 + r] = b[col + 1 + r] - f * b[col];
        }
    }

    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let s = ((i + 1)..n).fold(b[i], |acc, j| acc - k[i][j] * x[j]);
        x[i] = s / k[i][i];
    }
    Ok(x)
}

const MAX_QR_ITERATIONS: usize = 30;

/// Eigenvalues of a dense real matrix: balancing, reduction to upper
/// Hessenberg form by stabilized elimination, then the shifted double-step
/// Francis QR iteration.
pub fn eigenvalues<T: Real>(m: &[Vec<T>]) -> Result<Vec<Complex<T>>> {
    let n = m.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    if m.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::EigenNonConvergence);
    }
    // 1-based working copy keeps the index arithmetic of the QR sweep readable.
    let mut a = vec![vec![T::zero(); n + 1]; n + 1];
    for i in 0..n {
        for j in 0..n {
            a[i + 1][j + 1] = m[i][j];
        }
    }
    balance(&mut a, n);
    to_hessenberg(&mut a, n);
    for i in 1..=n {
        for j in 1..i.saturating_sub(1) {
            a[i][j] = T::zero();
        }
    }
    hessenberg_qr(&mut a, n)
}

fn balance<T: Real>(a: &mut [Vec<T>], n: usize) {
    let radix = T::lit(2.0);
    let sqrdx = radix * radix;
    let mut done = false;
    while !done {
        done = true;
        for i in 1..=n {
            let mut r = T::zero();
            let mut c = T::zero();
            for j in 1..=n {
                if j != i {
                    c = c + a[j][i].abs();
                    r = r + a[i][j].abs();
                }
            }
            if c != T::zero() && r != T::zero() {
                let mut g = r / radix;
                let mut f = T::one();
                let s = c + r;
                while c < g {
                    f = f * radix;
                    c = c * sqrdx;
                }
                g = r * radix;
                while c > g {
                    f = f / radix;
                    c = c / sqrdx;
                }
                if (c + r) / f < T::lit(0.95) * s {
                    done = false;
                    let g = T::one() / f;
                    for j in 1..=n {
                        a[i][j] = a[i][j] * g;
                    }
                    for row in a.iter_mut().skip(1) {
                        row[i] = row[i] * f;
                    }
                }
            }
        }
    }
}

fn to_hessenberg<T: Real>(a: &mut [Vec<T>], n: usize) {
    for m in 2..n {
        let mut x = T::zero();
        let mut i = m;
        for j in m..=n {
            if a[j][m - 1].abs() > x.abs() {
                x = a[j][m - 1];
                i = j;
            }
        }
        if i != m {
            for j in (m - 1)..=n {
                let t = a[i][j];
                a[i][j] = a[m][j];
                a[m][j] = t;
            }
            for row in a.iter_mut().skip(1) {
                row.swap(i, m);
            }
        }
        if x != T::zero() {
            for i in (m + 1)..=n {
                let mut y = a[i][m - 1];
                if y != T::zero() {
                    y = y / x;
                    a[i][m - 1] = y;
                    for j in m..=n {
                        a[i][j] = a[i][j] - y * a[m][j];
                    }
                    for j in 1..=n {
                        a[j][m] = a[j][m] + y * a[j][i];
                    }
                }
            }
        }
    }
}

fn sign<T: Real>(a: T, b: T) -> T {
    if b >= T::zero() {
        a.abs()
    } else {
        -a.abs()
    }
}

fn hessenberg_qr<T: Real>(a: &mut [Vec<T>], n: usize) -> Result<Vec<Complex<T>>> {
    let zero = T::zero();
    let mut wr = vec![zero; n + 1];
    let mut wi = vec![zero; n + 1];

    let mut anorm = zero;
    for i in 1..=n {
        for j in i.saturating_sub(1).max(1)..=n {
            anorm = anorm + a[i][j].abs();
        }
    }

    let mut nn = n;
    let mut t = zero;
    let (mut x, mut y, mut z, mut w);
    let (mut p, mut q, mut r, mut s);
    while nn >= 1 {
        let mut its = 0;
        loop {
            // Look for a single small subdiagonal element.
            let mut l = nn;
            while l >= 2 {
                s = a[l - 1][l - 1].abs() + a[l][l].abs();
                if s == zero {
                    s = anorm;
                }
                if a[l][l - 1].abs() + s == s {
                    a[l][l - 1] = zero;
                    break;
                }
                l -= 1;
            }
            x = a[nn][nn];
            if l == nn {
                // One root found.
                wr[nn] = x + t;
                wi[nn] = zero;
                nn -= 1;
                break;
            }
            y = a[nn - 1][nn - 1];
            w = a[nn][nn - 1] * a[nn - 1][nn];
            if l == nn - 1 {
                // A pair of roots.
                p = T::lit(0.5) * (y - x);
                q = p * p + w;
                z = q.abs().sqrt();
                x = x + t;
                if q >= zero {
                    z = p + sign(z, p);
                    wr[nn - 1] = x + z;
                    wr[nn] = x + z;
                    if z != zero {
                        wr[nn] = x - w / z;
                    }
                    wi[nn - 1] = zero;
                    wi[nn] = zero;
                } else {
                    wr[nn - 1] = x + p;
                    wr[nn] = x + p;
                    wi[nn - 1] = -z;
                    wi[nn] = z;
                }
                nn = nn.saturating_sub(2);
                break;
            }

            if its == MAX_QR_ITERATIONS {
                return Err(Error::EigenNonConvergence);
            }
            if its == 10 || its == 20 {
                // Exceptional shift.
                t = t + x;
                for i in 1..=nn {
                    a[i][i] = a[i][i] - x;
                }
                s = a[nn][nn - 1].abs() + a[nn - 1][nn - 2].abs();
                x = T::lit(0.75) * s;
                y = x;
                w = T::lit(-0.4375) * s * s;
            }
            its += 1;

            // Form the shift and look for two consecutive small subdiagonal elements.
            let mut m = nn - 2;
            loop {
                z = a[m][m];
                r = x - z;
                s = y - z;
                p = (r * s - w) / a[m + 1][m] + a[m][m + 1];
                q = a[m + 1][m + 1] - z - r - s;
                r = a[m + 2][m + 1];
                s = p.abs() + q.abs() + r.abs();
                p = p / s;
                q = q / s;
                r = r / s;
                if m == l {
                    break;
                }
                let u = a[m][m - 1].abs() * (q.abs() + r.abs());
                let v = p.abs() * (a[m - 1][m - 1].abs() + z.abs() + a[m + 1][m + 1].abs());
                if u + v == v {
                    break;
                }
                m -= 1;
            }
            for i in (m + 2)..=nn {
                a[i][i - 2] = zero;
                if i != m + 2 {
                    a[i][i - 3] = zero;
                }
            }

            // Double QR step on rows l..nn and columns m..nn.
            let mut k = m;
            while k < nn {
                if k != m {
                    p = a[k][k - 1];
                    q = a[k + 1][k - 1];
                    r = zero;
                    if k != nn - 1 {
                        r = a[k + 2][k - 1];
                    }
                    x = p.abs() + q.abs() + r.abs();
                    if x != zero {
                        p = p / x;
                        q = q / x;
                        r = r / x;
                    }
                }
                s = sign((p * p + q * q + r * r).sqrt(), p);
                if s != zero {
                    if k == m {
                        if l != m {
                            a[k][k - 1] = -a[k][k - 1];
                        }
                    } else {
                        a[k][k - 1] = -s * x;
                    }
                    p = p + s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q = q / p;
                    r = r / p;
                    for j in k..=nn {
                        p = a[k][j] + q * a[k + 1][j];
                        if k != nn - 1 {
                            p = p + r * a[k + 2][j];
                            a[k + 2][j] = a[k + 2][j] - p * z;
                        }
                        a[k + 1][j] = a[k + 1][j] - p * y;
                        a[k][j] = a[k][j] - p * x;
                    }
                    let mmin = if nn < k + 3 { nn } else { k + 3 };
                    for i in l..=mmin {
                        p = x * a[i][k] + y * a[i][k + 1];
                        if k != nn - 1 {
                            p = p + z * a[i][k + 2];
                            a[i][k + 2] = a[i][k + 2] - p * r;
                        }
                        a[i][k + 1] = a[i][k + 1] - p * q;
                        a[i][k] = a[i][k] - p;
                    }
                }
                k += 1;
            }
            if l + 1 >= nn {
                break;
            }
        }
    }

    Ok((1..=n).map(|i| Complex::new(wr[i], wi[i])).collect())
}
