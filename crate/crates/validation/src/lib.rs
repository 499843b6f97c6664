//! The three reference curves of the phase and gain studies: temperature,
//! operating OPA gain and the enhancement of E_N at the optimal gain.

use optomech::model::derive_constants;
use optomech::Params;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Curve {
    /// K
    pub temperature: f64,
    pub gain_in_kappa: f64,
    /// Percent increase of E_N at the optimal gain over G = 0.
    pub enhancement_percent: f64,
}

pub const CURVES: [Curve; 3] = [
    Curve {
        temperature: 0.01,
        gain_in_kappa: 5.6,
        enhancement_percent: 104.0,
    },
    Curve {
        temperature: 0.1,
        gain_in_kappa: 5.0,
        enhancement_percent: 96.0,
    },
    Curve {
        temperature: 1.0,
        gain_in_kappa: 3.0,
        enhancement_percent: 55.0,
    },
];

/// Cavity decay rate of the reference setup, rad/s.
pub fn kappa() -> f64 {
    derive_constants(&Params::reference()).expect("reference parameters are valid").kappa
}

/// Reference parameters at temperature `t` with OPA gain `g·κ` and phase `theta`.
pub fn params(t: f64, gain_in_kappa: f64, theta: f64) -> Params {
    Params::reference().with_temperature(t).with_opa(gain_in_kappa * kappa(), theta)
}

impl Curve {
    pub fn params(&self, theta: f64) -> Params {
        params(self.temperature, self.gain_in_kappa, theta)
    }
}
