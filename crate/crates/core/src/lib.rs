//! Steady-state quantum covariance of a two-mode optomechanical cavity that
//! contains a degenerate optical parametric amplifier (OPA), and the
//! logarithmic negativity between the two optical modes.
//!
//! The pipeline for one parameter point is
//!
//! 1. [`model`]: lab parameters to rates, and the classical fixed point;
//! 2. [`dynamics`]: the 6×6 drift and diffusion matrices and a stability test;
//! 3. [`lyapunov`]: the steady-state covariance `V` from `AV + VAᵀ = −D`;
//! 4. [`entanglement`]: symplectic spectra, log-negativity and squeezing ratios.
//!
//! [`experiments`] sweeps that pipeline over phase, gain and temperature grids.
//!
//! All numerics are generic over a [`Real`] scalar (`f32` or `f64`). The
//! quadrature ordering `(δq, δp, δX1, δY1, δX2, δY2)` is fixed everywhere and
//! the vacuum quadrature variance is `1/2`.

pub mod constants;
pub mod dynamics;
pub mod entanglement;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod lyapunov;
pub mod model;
pub mod optimize;

use std::fmt::{Debug, Display, LowerExp};

pub use error::{Error, Result};

/// Scalar type the whole pipeline is generic over.
pub trait Real:
    num_traits::Float
    + num_traits::FromPrimitive
    + num_traits::FloatConst
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal. Every `f64` is representable (possibly rounded) in `f32`.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal converts to the target float type")
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub use dynamics::{DriftMatrix, LinearModel};
pub use entanglement::EntanglementReport;
pub use experiments::{OptimalGainResult, SweepRecord};
pub use linalg::SquareMatrix;
pub use lyapunov::CovarianceMatrix;
pub use model::{AmplitudeModel, DerivedParams, Detunings, PhysicalParams, SteadyState};

/// Double-precision aliases used by the command-line tool.
pub type Params = PhysicalParams<f64>;
pub type Derived = DerivedParams<f64>;
pub type Steady = SteadyState<f64>;
pub type Model = LinearModel<f64>;
pub type Covariance = CovarianceMatrix<f64>;
pub type Report = EntanglementReport<f64>;
pub type Record = SweepRecord<f64>;
pub type OptimalGain = OptimalGainResult<f64>;
pub type Matrix6 = SquareMatrix<f64, 6>;
pub type Matrix4 = SquareMatrix<f64, 4>;

/// Single-precision aliases.
pub type Params32 = PhysicalParams<f32>;
pub type Matrix6f32 = SquareMatrix<f32, 6>;
