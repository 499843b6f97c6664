//! Parameter sweeps over the full pipeline: phase, gain and temperature scans,
//! and the optimal OPA gain.
//!
//! Grid points are independent and evaluated on the rayon pool; results are
//! assembled in grid order, so output does not depend on thread count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::LinearModel;
use crate::entanglement::{symplectic_spectrum, EntanglementReport};
use crate::lyapunov::{solve_lyapunov_scaled, CovarianceMatrix};
use crate::model::{derive_constants, solve_steady_state_with, AmplitudeModel, FixedPointOptions, PhysicalParams};
use crate::optimize::golden_section_max;
use crate::{Error, Real, Result};

/// Lowest symplectic eigenvalue accepted as physical.
pub const PHYSICALITY_FLOOR: f64 = 0.5 - 1e-9;

pub const DEFAULT_THETA_POINTS: usize = 201;
pub const DEFAULT_GAIN_POINTS: usize = 141;
pub const DEFAULT_GAIN_MAX_IN_KAPPA: f64 = 7.0;
pub const DEFAULT_TEMPERATURE_POINTS: usize = 25;
pub const DEFAULT_TEMPERATURE_MIN: f64 = 5e-3;
pub const DEFAULT_TEMPERATURE_MAX: f64 = 2.0;

/// Coarse gain step of [`optimal_gain`], in units of κ.
pub const COARSE_GAIN_STEP_IN_KAPPA: f64 = 0.05;
/// Golden-section bracket tolerance of [`optimal_gain`], in units of κ.
pub const REFINE_TOLERANCE_IN_KAPPA: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Settings {
    pub model: AmplitudeModel,
    pub fixed_point: FixedPointOptions,
}

/// Outcome of the pipeline at one grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord<T: Real> {
    pub sweep_value: T,
    pub stable: bool,
    pub spectral_abscissa: Option<T>,
    /// Present iff the point is stable and every later stage succeeded.
    pub report: Option<EntanglementReport<T>>,
    pub covariance: Option<CovarianceMatrix<T>>,
    pub min_symplectic_eigenvalue: Option<T>,
    /// Error that stopped the pipeline, if any. Instability is not a failure.
    pub failure: Option<String>,
}

impl<T: Real> SweepRecord<T> {
    fn empty(sweep_value: T) -> Self {
        Self {
            sweep_value,
            stable: false,
            spectral_abscissa: None,
            report: None,
            covariance: None,
            min_symplectic_eigenvalue: None,
            failure: None,
        }
    }

    pub fn e_n(&self) -> Option<T> {
        self.report.map(|r| r.e_n)
    }

    pub fn nu_minus_tilde(&self) -> Option<T> {
        self.report.map(|r| r.nu_minus_tilde)
    }

    pub fn ratios(&self) -> Option<(T, T)> {
        self.report.map(|r| (r.ratio_mode1, r.ratio_mode2))
    }

    /// Objective for the gain optimizer: unstable or failed points score −∞.
    fn objective(&self) -> T {
        self.e_n().unwrap_or_else(T::neg_infinity)
    }
}

/// Runs derive → steady state → drift/diffusion → stability → Lyapunov →
/// negativity at one parameter point. Never panics on numerical trouble; the
/// error lands in [`SweepRecord::failure`].
pub fn evaluate_point<T: Real>(params: &PhysicalParams<T>, settings: &Settings) -> SweepRecord<T> {
    evaluate_at(params, settings, T::zero())
}

fn evaluate_at<T: Real>(params: &PhysicalParams<T>, settings: &Settings, sweep_value: T) -> SweepRecord<T> {
    let mut record = SweepRecord::empty(sweep_value);
    if let Err(e) = run_pipeline(params, settings, &mut record) {
        record.report = None;
        record.failure = Some(e.to_string());
    }
    record
}

fn run_pipeline<T: Real>(params: &PhysicalParams<T>, settings: &Settings, record: &mut SweepRecord<T>) -> Result<()> {
    let derived = derive_constants(params)?;
    let steady = solve_steady_state_with(params, &derived, settings.model, settings.fixed_point)?;
    let model = LinearModel::new(params, steady, derived);
    let stability = model.stability()?;
    record.spectral_abscissa = Some(stability.abscissa);
    record.stable = stability.is_stable();
    if !record.stable {
        return Ok(());
    }

    let cov = solve_lyapunov_scaled(&model.drift, &model.diffusion, model.omega_m)?;
    record.covariance = Some(cov);
    if !cov.is_trustworthy() {
        return Err(Error::Unphysical(format!(
            "Lyapunov solve flagged (residual {:e}, asymmetry {:e})",
            cov.residual_norm, cov.asymmetry
        )));
    }
    let spectrum = symplectic_spectrum(&cov.v)?;
    let min_nu = spectrum[0];
    record.min_symplectic_eigenvalue = Some(min_nu);
    if min_nu < T::lit(PHYSICALITY_FLOOR) {
        return Err(Error::Unphysical(format!("minimum symplectic eigenvalue {min_nu:e} < 1/2")));
    }
    record.report = Some(EntanglementReport::from_covariance(&cov.v)?);
    Ok(())
}

fn sweep<T: Real>(
    grid: &[T],
    settings: &Settings,
    point: impl Fn(T) -> PhysicalParams<T> + Sync,
) -> Vec<SweepRecord<T>> {
    grid.par_iter()
        .map(|&x| evaluate_at(&point(x), settings, x))
        .collect()
}

fn check_increasing<T: Real>(grid: &[T], what: &str) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidGrid(format!("{what} grid is empty")));
    }
    if grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidGrid(format!("{what} grid has non-finite values")));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid(format!("{what} grid is not strictly increasing")));
    }
    Ok(())
}

/// One record per OPA phase θ (rad).
pub fn sweep_theta<T: Real>(base: &PhysicalParams<T>, theta_grid: &[T], settings: &Settings) -> Result<Vec<SweepRecord<T>>> {
    check_increasing(theta_grid, "theta")?;
    Ok(sweep(theta_grid, settings, |theta| base.with_opa(base.opa_gain, theta)))
}

/// One record per OPA gain G (rad/s).
pub fn sweep_gain<T: Real>(base: &PhysicalParams<T>, gain_grid: &[T], settings: &Settings) -> Result<Vec<SweepRecord<T>>> {
    if gain_grid.is_empty() {
        return Err(Error::InvalidGrid("gain grid is empty".into()));
    }
    if let Some(g) = gain_grid.iter().find(|g| !(**g >= T::zero()) || !g.is_finite()) {
        return Err(Error::InvalidGrid(format!("gain {g} is negative or not finite")));
    }
    Ok(sweep(gain_grid, settings, |g| base.with_opa(g, base.opa_phase)))
}

/// Same records as [`sweep_gain`]; the squeezing ratios live in each record's report.
pub fn sweep_ratios<T: Real>(base: &PhysicalParams<T>, gain_grid: &[T], settings: &Settings) -> Result<Vec<SweepRecord<T>>> {
    sweep_gain(base, gain_grid, settings)
}

/// One record per temperature (K).
pub fn sweep_temperature<T: Real>(
    base: &PhysicalParams<T>,
    temperature_grid: &[T],
    settings: &Settings,
) -> Result<Vec<SweepRecord<T>>> {
    check_increasing(temperature_grid, "temperature")?;
    Ok(sweep(temperature_grid, settings, |t| base.with_temperature(t)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimalGainResult<T> {
    pub temperature: T,
    pub kappa: T,
    /// rad/s
    pub g_opt: T,
    pub g_opt_in_kappa: T,
    pub e_n_opt: T,
    /// Coarse-grid bracket handed to the golden-section refinement, rad/s.
    pub bracket: (T, T),
    /// E_N at G = 0; `None` if that point is unstable or fails.
    pub baseline_e_n: Option<T>,
    /// `100·(E_N,opt − baseline)/baseline`; `None` without a positive baseline.
    pub enhancement_percent: Option<T>,
    /// The coarse maximum sits on a bound of the search interval.
    pub boundary_maximum: bool,
    pub evaluations: usize,
}

/// Maximizes E_N over G at fixed θ: a coarse scan with step κ/20 brackets the
/// best grid point, then golden-section search refines to 10⁻³κ.
pub fn optimal_gain<T: Real>(base: &PhysicalParams<T>, bounds: (T, T), settings: &Settings) -> Result<OptimalGainResult<T>> {
    let kappa = derive_constants(base)?.kappa;
    let (lo, hi) = bounds;
    if !(lo >= T::zero() && hi > lo && hi.is_finite()) {
        return Err(Error::InvalidGrid(format!("gain bounds ({lo}, {hi}) must satisfy 0 <= lo < hi")));
    }
    let step = T::lit(COARSE_GAIN_STEP_IN_KAPPA) * kappa;
    let intervals = ((hi - lo) / step).ceil().to_usize().unwrap_or(1).max(1);
    let coarse: Vec<T> = (0..=intervals)
        .map(|i| if i == intervals { hi } else { lo + step * T::from_usize(i).unwrap() })
        .collect();

    let at_gain = |g: T| base.with_opa(g, base.opa_phase);
    let records = sweep(&coarse, settings, at_gain);
    let scores: Vec<T> = records.iter().map(SweepRecord::objective).collect();
    let (best, best_score) = scores
        .iter()
        .enumerate()
        .fold((0, T::neg_infinity()), |acc, (i, &s)| if s > acc.1 { (i, s) } else { acc });
    if best_score == T::neg_infinity() {
        return Err(Error::NoStablePoint {
            lo: lo.to_f64().unwrap_or(f64::NAN),
            hi: hi.to_f64().unwrap_or(f64::NAN),
        });
    }

    let last = coarse.len() - 1;
    let bracket = (coarse[best.saturating_sub(1)], coarse[(best + 1).min(last)]);
    let refined = golden_section_max(
        |g| evaluate_at(&at_gain(g), settings, g).objective(),
        bracket.0,
        bracket.1,
        T::lit(REFINE_TOLERANCE_IN_KAPPA) * kappa,
    );
    let (g_opt, e_n_opt) = if refined.value >= best_score {
        (refined.x, refined.value)
    } else {
        (coarse[best], best_score)
    };

    let baseline_e_n = evaluate_at(&at_gain(T::zero()), settings, T::zero()).e_n();
    let enhancement_percent = baseline_e_n
        .filter(|b| *b > T::zero())
        .map(|b| T::lit(100.0) * (e_n_opt - b) / b);

    Ok(OptimalGainResult {
        temperature: base.temperature,
        kappa,
        g_opt,
        g_opt_in_kappa: g_opt / kappa,
        e_n_opt,
        bracket,
        baseline_e_n,
        enhancement_percent,
        boundary_maximum: best == 0 || best == last,
        evaluations: coarse.len() + refined.evaluations + 1,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TemperatureScan<T: Real> {
    pub points: Vec<(T, Result<OptimalGainResult<T>>)>,
}

impl<T: Real> TemperatureScan<T> {
    /// Adjacent pairs (among successful points) where G_opt increases with T.
    pub fn g_opt_increases(&self) -> usize {
        self.count_rises(|r| Some(r.g_opt))
    }

    /// Adjacent pairs where the enhancement increases with T.
    pub fn enhancement_increases(&self) -> usize {
        self.count_rises(|r| r.enhancement_percent)
    }

    fn count_rises(&self, key: impl Fn(&OptimalGainResult<T>) -> Option<T>) -> usize {
        let values: Vec<T> = self
            .points
            .iter()
            .filter_map(|(_, r)| r.as_ref().ok().and_then(&key))
            .collect();
        values.windows(2).filter(|w| w[1] > w[0]).count()
    }
}

/// [`optimal_gain`] at each temperature (K, positive, non-decreasing).
pub fn optimal_gain_vs_temperature<T: Real>(
    base: &PhysicalParams<T>,
    temperature_grid: &[T],
    bounds: (T, T),
    settings: &Settings,
) -> Result<TemperatureScan<T>> {
    if temperature_grid.is_empty() {
        return Err(Error::InvalidGrid("temperature grid is empty".into()));
    }
    if temperature_grid.iter().any(|t| !(*t > T::zero()) || !t.is_finite()) {
        return Err(Error::InvalidGrid("temperatures must be positive and finite".into()));
    }
    if temperature_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidGrid("temperature grid is not ascending".into()));
    }
    let points = temperature_grid
        .par_iter()
        .map(|&t| (t, optimal_gain(&base.with_temperature(t), bounds, settings)))
        .collect();
    Ok(TemperatureScan { points })
}

/// `n` evenly spaced points from `start` to `end` inclusive.
pub fn linspace<T: Real>(start: T, end: T, n: usize) -> Vec<T> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (end - start) / T::from_usize(n - 1).unwrap();
            (0..n)
                .map(|i| if i == n - 1 { end } else { start + step * T::from_usize(i).unwrap() })
                .collect()
        }
    }
}

/// `n` log-spaced points from `start` to `end` inclusive (both positive).
pub fn logspace<T: Real>(start: T, end: T, n: usize) -> Vec<T> {
    let mut v: Vec<T> = linspace(start.ln(), end.ln(), n).into_iter().map(T::exp).collect();
    if let Some(first) = v.first_mut() {
        *first = start;
    }
    if let Some(last) = v.last_mut() {
        *last = end;
    }
    v
}

pub fn default_theta_grid<T: Real>() -> Vec<T> {
    linspace(T::zero(), T::PI(), DEFAULT_THETA_POINTS)
}

/// `[0, 7κ]` with 141 points, rad/s.
pub fn default_gain_grid<T: Real>(kappa: T) -> Vec<T> {
    linspace(T::zero(), T::lit(DEFAULT_GAIN_MAX_IN_KAPPA) * kappa, DEFAULT_GAIN_POINTS)
}

pub fn default_temperature_grid<T: Real>() -> Vec<T> {
    logspace(
        T::lit(DEFAULT_TEMPERATURE_MIN),
        T::lit(DEFAULT_TEMPERATURE_MAX),
        DEFAULT_TEMPERATURE_POINTS,
    )
}
