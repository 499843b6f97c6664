//! Lab parameters, derived rates and the classical steady state.
//!
//! All rates and detunings are angular frequencies (rad/s). The cavity decay
//! rate comes straight from `κ = πc/(2FL)`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::constants::{BOLTZMANN, HBAR, SPEED_OF_LIGHT};
use crate::{Error, Real, Result};

/// Below this mechanical quality factor the Markovian bath model is suspect.
pub const MIN_QUALITY_FACTOR: f64 = 100.0;

/// Cavity detunings, either bare (`Δ0i = ωCi − ωLi`) or already including
/// the radiation-pressure shift (`Δi = Δ0i − gi·qs`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Detunings<T> {
    Bare { delta_01: T, delta_02: T },
    Effective { delta_1: T, delta_2: T },
}

/// Which closed form to use for the intracavity amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmplitudeModel {
    /// `α = ε / [(κ − 2G cos θ) + i(Δ − 2G sin θ)]`, which solves
    /// `(κ + iΔ)α − 2G e^{iθ} α = ε`. This is the form that reproduces the
    /// reference results.
    #[default]
    Unconjugated,
    /// Solution of `(κ + iΔ)α − 2G e^{iθ} α* = ε`.
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams<T> {
    /// Effective mass of the mechanical mode, kg.
    pub mass: T,
    pub omega_m: T,
    pub gamma_m: T,
    /// m
    pub cavity_length: T,
    pub finesse: T,
    /// m
    pub wavelength_1: T,
    /// m
    pub wavelength_2: T,
    /// W
    pub power_1: T,
    /// W
    pub power_2: T,
    pub detunings: Detunings<T>,
    /// OPA gain `G`, rad/s. Both optical modes share it.
    pub opa_gain: T,
    /// OPA pump phase `θ`, rad.
    pub opa_phase: T,
    /// K
    pub temperature: T,
}

impl<T: Real> PhysicalParams<T> {
    /// Checks the hard invariants. Returns the mechanical quality factor.
    pub fn validate(&self) -> Result<T> {
        positive("mass", self.mass)?;
        positive("omega_m", self.omega_m)?;
        positive("gamma_m", self.gamma_m)?;
        positive("cavity_length", self.cavity_length)?;
        positive("finesse", self.finesse)?;
        positive("wavelength_1", self.wavelength_1)?;
        positive("wavelength_2", self.wavelength_2)?;
        non_negative("power_1", self.power_1)?;
        non_negative("power_2", self.power_2)?;
        non_negative("opa_gain", self.opa_gain)?;
        non_negative("temperature", self.temperature)?;
        finite("opa_phase", self.opa_phase)?;
        match self.detunings {
            Detunings::Bare { delta_01, delta_02 } => {
                finite("delta_01", delta_01)?;
                finite("delta_02", delta_02)?;
            }
            Detunings::Effective { delta_1, delta_2 } => {
                finite("delta_1", delta_1)?;
                finite("delta_2", delta_2)?;
            }
        }
        Ok(self.omega_m / self.gamma_m)
    }

    pub fn with_opa(mut self, gain: T, phase: T) -> Self {
        self.opa_gain = gain;
        self.opa_phase = phase;
        self
    }

    pub fn with_temperature(mut self, temperature: T) -> Self {
        self.temperature = temperature;
        self
    }
}

impl PhysicalParams<f64> {
    /// The parameter set of the reference setup: 5 ng mirror at 10 MHz with
    /// Q = 10⁵, a 5 mm cavity of finesse 10⁵ driven at 1064 nm with 100 mW and
    /// 80 mW on the red and blue mechanical sidebands, θ = π/2, T = 10 mK, OPA off.
    pub fn reference() -> Self {
        let two_pi = 2.0 * std::f64::consts::PI;
        let omega_m = two_pi * 10e6;
        Self {
            mass: 5e-12,
            omega_m,
            gamma_m: two_pi * 100.0,
            cavity_length: 5e-3,
            finesse: 1e5,
            wavelength_1: 1064e-9,
            wavelength_2: 1064e-9,
            power_1: 0.1,
            power_2: 0.08,
            detunings: Detunings::Effective {
                delta_1: omega_m,
                delta_2: -omega_m,
            },
            opa_gain: 0.0,
            opa_phase: std::f64::consts::FRAC_PI_2,
            temperature: 0.01,
        }
    }
}

fn positive<T: Real>(field: &'static str, v: T) -> Result<()> {
    if v.is_finite() && v > T::zero() {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must be finite and > 0, got {v}")))
    }
}

fn non_negative<T: Real>(field: &'static str, v: T) -> Result<()> {
    if v.is_finite() && v >= T::zero() {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must be finite and >= 0, got {v}")))
    }
}

fn finite<T: Real>(field: &'static str, v: T) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must be finite, got {v}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams<T> {
    /// Cavity amplitude decay rate, rad/s.
    pub kappa: T,
    pub omega_l1: T,
    pub omega_l2: T,
    pub omega_c1: T,
    pub omega_c2: T,
    pub g_1: T,
    pub g_2: T,
    pub eps_1: T,
    pub eps_2: T,
    /// Mean thermal phonon number.
    pub n_bar: T,
    /// Free spectral range `πc/L`, rad/s. Diagnostic only.
    pub fsr: T,
    pub quality_factor: T,
}

/// Bose–Einstein occupation of a mode at `omega` (rad/s) and `temperature` (K).
pub fn thermal_occupation<T: Real>(omega: T, temperature: T) -> T {
    if temperature <= T::zero() {
        return T::zero();
    }
    let x = T::lit(HBAR) * omega / (T::lit(BOLTZMANN) * temperature);
    // exp_m1 overflows to +inf for huge x, giving exactly 0.
    T::one() / x.exp_m1()
}

pub fn derive_constants<T: Real>(params: &PhysicalParams<T>) -> Result<DerivedParams<T>> {
    let quality_factor = params.validate()?;
    if quality_factor < T::lit(MIN_QUALITY_FACTOR) {
        log::warn!(
            "mechanical quality factor {quality_factor} is below {MIN_QUALITY_FACTOR}; \
             the white-noise bath approximation is poor"
        );
    }

    let c = T::lit(SPEED_OF_LIGHT);
    let hbar = T::lit(HBAR);
    let two = T::lit(2.0);
    let pi = T::PI();

    let kappa = pi * c / (two * params.finesse * params.cavity_length);
    let omega_l1 = two * pi * c / params.wavelength_1;
    let omega_l2 = two * pi * c / params.wavelength_2;
    let (omega_c1, omega_c2) = match params.detunings {
        Detunings::Bare { delta_01, delta_02 } => (omega_l1 + delta_01, omega_l2 + delta_02),
        Detunings::Effective { .. } => (omega_l1, omega_l2),
    };
    let zpf = (hbar / (params.mass * params.omega_m)).sqrt();
    let g_1 = omega_c1 / params.cavity_length * zpf;
    let g_2 = omega_c2 / params.cavity_length * zpf;
    let eps_1 = (two * kappa * params.power_1 / (hbar * omega_l1)).sqrt();
    let eps_2 = (two * kappa * params.power_2 / (hbar * omega_l2)).sqrt();

    Ok(DerivedParams {
        kappa,
        omega_l1,
        omega_l2,
        omega_c1,
        omega_c2,
        g_1,
        g_2,
        eps_1,
        eps_2,
        n_bar: thermal_occupation(params.omega_m, params.temperature),
        fsr: pi * c / params.cavity_length,
        quality_factor,
    })
}

const SINGULAR_RTOL: f64 = 1e-12;

/// Intracavity amplitude `ε / [(κ − 2G cos θ) + i(Δ − 2G sin θ)]`.
pub fn steady_amplitude_unconjugated<T: Real>(
    eps: Complex<T>,
    kappa: T,
    delta: T,
    gain: T,
    theta: T,
) -> Result<Complex<T>> {
    let two_g = T::lit(2.0) * gain;
    let den = Complex::new(kappa - two_g * theta.cos(), delta - two_g * theta.sin());
    let scale = kappa.max(delta.abs()).max(two_g);
    if den.norm() < T::lit(SINGULAR_RTOL) * scale || den.norm() == T::zero() {
        return Err(Error::Threshold {
            magnitude: den.norm().to_f64().unwrap_or(0.0),
        });
    }
    Ok(eps / den)
}

/// Fixed point of `(κ + iΔ)α − 2G e^{iθ} α* = ε`:
/// `α = [ε(κ − iΔ) + 2G e^{iθ} ε*] / (κ² + Δ² − 4G²)`.
pub fn steady_amplitude_exact<T: Real>(
    eps: Complex<T>,
    kappa: T,
    delta: T,
    gain: T,
    theta: T,
) -> Result<Complex<T>> {
    let two_g = T::lit(2.0) * gain;
    let den = kappa * kappa + delta * delta - two_g * two_g;
    let scale = kappa * kappa + delta * delta + two_g * two_g;
    if den.abs() < T::lit(SINGULAR_RTOL) * scale || den == T::zero() {
        return Err(Error::Threshold {
            magnitude: den.abs().to_f64().unwrap_or(0.0),
        });
    }
    let pump = Complex::from_polar(two_g, theta);
    Ok((eps * Complex::new(kappa, -delta) + pump * eps.conj()) / den)
}

impl AmplitudeModel {
    pub fn amplitude<T: Real>(self, eps: T, kappa: T, delta: T, gain: T, theta: T) -> Result<Complex<T>> {
        let eps = Complex::new(eps, T::zero());
        match self {
            AmplitudeModel::Unconjugated => steady_amplitude_unconjugated(eps, kappa, delta, gain, theta),
            AmplitudeModel::Exact => steady_amplitude_exact(eps, kappa, delta, gain, theta),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyState<T> {
    /// Dimensionless mechanical displacement.
    pub q_s: T,
    /// Always zero.
    pub p_s: T,
    pub alpha_1: Complex<T>,
    pub alpha_2: Complex<T>,
    /// Effective detunings, rad/s.
    pub delta_1: T,
    pub delta_2: T,
    /// Effective optomechanical couplings `√2·gi·|αi|`, rad/s.
    pub coupling_1: T,
    pub coupling_2: T,
    /// Fixed-point iterations used (0 in effective-detuning mode).
    pub iterations: usize,
}

impl<T: Real> SteadyState<T> {
    /// `|qs·ωm − g1|α1|² − g2|α2|²| / max(1, qs·ωm)`.
    pub fn displacement_residual(&self, derived: &DerivedParams<T>, omega_m: T) -> T {
        let lhs = self.q_s * omega_m;
        let rhs = derived.g_1 * self.alpha_1.norm_sqr() + derived.g_2 * self.alpha_2.norm_sqr();
        (lhs - rhs).abs() / T::one().max(lhs.abs())
    }
}

/// Fixed-point iteration settings for bare-detuning solves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointOptions {
    pub damping: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for FixedPointOptions {
    fn default() -> Self {
        Self {
            damping: 0.5,
            tolerance: 1e-12,
            max_iterations: 10_000,
        }
    }
}

pub fn solve_steady_state<T: Real>(
    params: &PhysicalParams<T>,
    derived: &DerivedParams<T>,
    model: AmplitudeModel,
) -> Result<SteadyState<T>> {
    solve_steady_state_with(params, derived, model, FixedPointOptions::default())
}

pub fn solve_steady_state_with<T: Real>(
    params: &PhysicalParams<T>,
    derived: &DerivedParams<T>,
    model: AmplitudeModel,
    opts: FixedPointOptions,
) -> Result<SteadyState<T>> {
    if !(opts.damping > 0.0 && opts.damping <= 1.0) {
        return Err(Error::invalid("damping", format!("must lie in (0, 1], got {}", opts.damping)));
    }
    let (gain, theta, kappa) = (params.opa_gain, params.opa_phase, derived.kappa);
    let amplitudes = |d1: T, d2: T| -> Result<(Complex<T>, Complex<T>)> {
        Ok((
            model.amplitude(derived.eps_1, kappa, d1, gain, theta)?,
            model.amplitude(derived.eps_2, kappa, d2, gain, theta)?,
        ))
    };
    let displacement = |a1: Complex<T>, a2: Complex<T>| {
        (derived.g_1 * a1.norm_sqr() + derived.g_2 * a2.norm_sqr()) / params.omega_m
    };

    let (q_s, delta_1, delta_2, alpha_1, alpha_2, iterations) = match params.detunings {
        Detunings::Effective { delta_1, delta_2 } => {
            let (a1, a2) = amplitudes(delta_1, delta_2)?;
            (displacement(a1, a2), delta_1, delta_2, a1, a2, 0)
        }
        Detunings::Bare { delta_01, delta_02 } => {
            let lambda = T::lit(opts.damping);
            let tol = T::lit(opts.tolerance);
            let mut q = T::zero();
            let mut last_change = f64::INFINITY;
            let mut converged = None;
            for it in 1..=opts.max_iterations {
                let (a1, a2) = amplitudes(delta_01 - derived.g_1 * q, delta_02 - derived.g_2 * q)?;
                let next = (T::one() - lambda) * q + lambda * displacement(a1, a2);
                let change = (next - q).abs();
                last_change = (change / next.abs().max(T::min_positive_value()))
                    .to_f64()
                    .unwrap_or(f64::INFINITY);
                q = next;
                if change <= tol * q.abs() || change == T::zero() {
                    converged = Some(it);
                    break;
                }
            }
            let Some(iterations) = converged else {
                return Err(Error::FixedPointNonConvergence {
                    iterations: opts.max_iterations,
                    last_change,
                });
            };
            let (d1, d2) = (delta_01 - derived.g_1 * q, delta_02 - derived.g_2 * q);
            let (a1, a2) = amplitudes(d1, d2)?;
            (q, d1, d2, a1, a2, iterations)
        }
    };

    let sqrt2 = T::SQRT_2();
    Ok(SteadyState {
        q_s,
        p_s: T::zero(),
        alpha_1,
        alpha_2,
        delta_1,
        delta_2,
        coupling_1: sqrt2 * derived.g_1 * alpha_1.norm(),
        coupling_2: sqrt2 * derived.g_2 * alpha_2.norm(),
        iterations,
    })
}
