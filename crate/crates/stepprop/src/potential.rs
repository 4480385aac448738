//! Step potentials: the smooth Woods-Saxon step and the Heaviside step.

use crate::error::{Error, Result};
use crate::specfun::C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    #[serde(alias = "woods-saxon", alias = "ws", alias = "woods_saxon")]
    WoodsSaxon,
    Heaviside,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::WoodsSaxon => "woodssaxon",
            Family::Heaviside => "heaviside",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepModel {
    pub family: Family,
    pub m: f64,
    #[serde(rename = "V0")]
    pub v0: f64,
    #[serde(default = "one")]
    pub alpha: f64,
    pub hbar: f64,
}

fn one() -> f64 {
    1.0
}

pub const POLE_GUARD: f64 = 1e-8;

impl StepModel {
    pub fn woods_saxon(m: f64, v0: f64, alpha: f64, hbar: f64) -> Self {
        StepModel { family: Family::WoodsSaxon, m, v0, alpha, hbar }
    }

    pub fn heaviside(m: f64, v0: f64, hbar: f64) -> Self {
        StepModel { family: Family::Heaviside, m, v0, alpha: 0.0, hbar }
    }

    /// `V0 = 0` is accepted and reduces every family to the free particle.
    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !ok(self.m) {
            return Err(Error::Domain(format!("mass must be positive, got {}", self.m)));
        }
        if !(self.v0.is_finite() && self.v0 >= 0.0) {
            return Err(Error::Domain(format!("V0 must be non-negative, got {}", self.v0)));
        }
        if !ok(self.hbar) {
            return Err(Error::Domain(format!("hbar must be positive, got {}", self.hbar)));
        }
        if self.family == Family::WoodsSaxon && !ok(self.alpha) {
            return Err(Error::Domain(format!("alpha must be positive, got {}", self.alpha)));
        }
        Ok(())
    }

    pub fn with_hbar(&self, hbar: f64) -> Self {
        StepModel { hbar, ..*self }
    }

    pub fn is_free(&self) -> bool {
        self.v0 == 0.0
    }

    /// Threshold momentum √(2mV0).
    pub fn k_threshold(&self) -> f64 {
        (2.0 * self.m * self.v0).sqrt()
    }

    /// Real potential value.
    pub fn v(&self, x: f64) -> f64 {
        match self.family {
            Family::WoodsSaxon => self.v0 * logistic(2.0 * self.alpha * x),
            Family::Heaviside => {
                if x > 0.0 {
                    self.v0
                } else if x < 0.0 {
                    0.0
                } else {
                    0.5 * self.v0
                }
            }
        }
    }

    /// V0 − V(x) without cancellation.
    pub fn v0_minus_v(&self, x: f64) -> f64 {
        match self.family {
            Family::WoodsSaxon => self.v0 * logistic(-2.0 * self.alpha * x),
            Family::Heaviside => self.v0 - self.v(x),
        }
    }

    /// dV/dx (Woods-Saxon).
    pub fn dv(&self, x: f64) -> f64 {
        let s = logistic(2.0 * self.alpha * x);
        2.0 * self.alpha * self.v0 * s * (1.0 - s)
    }

    /// d²V/dx² (Woods-Saxon).
    pub fn d2v(&self, x: f64) -> f64 {
        let s = logistic(2.0 * self.alpha * x);
        4.0 * self.alpha * self.alpha * self.v0 * s * (1.0 - s) * (1.0 - 2.0 * s)
    }
}

/// 1/(1+e^{−y}) evaluated without overflow.
pub fn logistic(y: f64) -> f64 {
    if y >= 0.0 {
        1.0 / (1.0 + (-y).exp())
    } else {
        let e = y.exp();
        e / (1.0 + e)
    }
}

/// ln(1 + e^y) evaluated without overflow.
pub fn softplus(y: f64) -> f64 {
    if y > 0.0 {
        y + (-y).exp().ln_1p()
    } else {
        y.exp().ln_1p()
    }
}

/// Potential at complex position (real position only for Heaviside).
pub fn potential_value(model: &StepModel, x: C64) -> Result<C64> {
    match model.family {
        Family::Heaviside => {
            if x.im != 0.0 {
                return Err(Error::Domain("Heaviside potential is undefined off the real axis".into()));
            }
            Ok(C64::new(model.v(x.re), 0.0))
        }
        Family::WoodsSaxon => {
            if x.im == 0.0 {
                return Ok(C64::new(model.v(x.re), 0.0));
            }
            let a = model.alpha;
            // nearest pole on the imaginary axis
            let n = (x.im * a / PI - 0.5).round();
            let pole = C64::new(0.0, PI * (n + 0.5) / a);
            if (x - pole).norm() * a < POLE_GUARD {
                return Err(Error::Singularity(x.to_string()));
            }
            let y = x * (2.0 * a);
            let v = if y.re >= 0.0 {
                model.v0 / (1.0 + (-y).exp())
            } else {
                let e = y.exp();
                e * model.v0 / (1.0 + e)
            };
            Ok(v)
        }
    }
}

/// Poles x_s = iπ(n + 1/2)/α for n in `n_range` (inclusive).
pub fn singularity_locations(model: &StepModel, n_range: (i64, i64)) -> Result<Vec<C64>> {
    if model.family != Family::WoodsSaxon {
        return Err(Error::Unsupported("heaviside"));
    }
    Ok((n_range.0..=n_range.1)
        .map(|n| C64::new(0.0, PI * (n as f64 + 0.5) / model.alpha))
        .collect())
}

/// α → Cα, ℏ → ℏ/C, positions and time divided by C.
///
/// The propagator is a density in x1, so
/// `G(x1, x0; T) = G'(x1/C, x0/C; T/C) / C` with `G'` the rescaled model.
pub fn rescale(model: &StepModel, x0: f64, x1: f64, t: f64, c: f64) -> (StepModel, f64, f64, f64) {
    let mut out = *model;
    if out.family == Family::WoodsSaxon {
        out.alpha *= c;
    }
    out.hbar /= c;
    (out, x0 / c, x1 / c, t / c)
}
