//! Semiclassical propagator: Σ √(i·vv/(2πℏ)) e^{iS/ℏ} over relevant saddles.

use crate::classical::{
    find_caustic_saddle, heaviside_paths, solve_real_paths, topological_saddle_or_threshold, BoundarySpec,
    ClassicalSaddle,
};
use crate::error::{Error, Result};
use crate::potential::{Family, StepModel};
use crate::specfun::C64;
use std::f64::consts::PI;
use std::str::FromStr;

pub const VV_LIMIT: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SaddleSet {
    Real,
    RealCaustic,
    RealCausticTopological,
}

impl SaddleSet {
    pub fn name(&self) -> &'static str {
        match self {
            SaddleSet::Real => "real",
            SaddleSet::RealCaustic => "real+caustic",
            SaddleSet::RealCausticTopological => "real+caustic+topological",
        }
    }
}

impl FromStr for SaddleSet {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "real" => Ok(SaddleSet::Real),
            "real+caustic" => Ok(SaddleSet::RealCaustic),
            "real+caustic+topological" => Ok(SaddleSet::RealCausticTopological),
            _ => Err(Error::Domain(format!("unknown saddle set {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WkbTerm {
    pub saddle: ClassicalSaddle,
    pub amplitude: C64,
}

/// One saddle's contribution at Planck constant `hbar`.
pub fn wkb_term(saddle: &ClassicalSaddle, hbar: f64) -> Result<WkbTerm> {
    if !(hbar > 0.0 && hbar.is_finite()) {
        return Err(Error::Domain(format!("hbar must be positive, got {hbar}")));
    }
    if saddle.vv.norm() > VV_LIMIT || !saddle.vv.norm().is_finite() {
        return Err(Error::CausticProximity(saddle.vv.norm()));
    }
    let pref = (C64::i() * saddle.vv / (2.0 * PI * hbar)).sqrt() * saddle.sqrt_sign;
    let amplitude = pref * (C64::i() * saddle.s / hbar).exp();
    Ok(WkbTerm { saddle: *saddle, amplitude })
}

/// Θ(T) Σ over the saddles flagged relevant.
pub fn wkb_propagator(bvp: &BoundarySpec, saddles: &[ClassicalSaddle], hbar: f64) -> Result<C64> {
    if bvp.t <= 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let mut g = C64::new(0.0, 0.0);
    for s in saddles.iter().filter(|s| s.relevant) {
        g += wkb_term(s, hbar)?.amplitude;
    }
    Ok(g)
}

/// Saddles of the requested set.  Inside the caustic loop the three real
/// paths are complete and the complex saddles are left out.
pub fn collect_saddles(model: &StepModel, bvp: &BoundarySpec, set: SaddleSet) -> Result<Vec<ClassicalSaddle>> {
    let mut out = if model.family == Family::Heaviside || model.is_free() {
        heaviside_paths(model, bvp)?
    } else {
        solve_real_paths(model, bvp)?
    };
    if set == SaddleSet::Real || out.len() >= 3 || model.is_free() {
        return Ok(out);
    }
    match find_caustic_saddle(model, bvp) {
        Ok(s) => out.push(s),
        Err(Error::InsideCaustic) => return Ok(out),
        Err(e) => return Err(e),
    }
    if set == SaddleSet::RealCausticTopological && model.family == Family::WoodsSaxon {
        out.push(topological_saddle_or_threshold(model, bvp)?);
    }
    Ok(out)
}

/// WKB propagator for `set` at the model's own ℏ.
pub fn wkb_at(model: &StepModel, bvp: &BoundarySpec, set: SaddleSet) -> Result<C64> {
    model.validate()?;
    let saddles = collect_saddles(model, bvp, set)?;
    wkb_propagator(bvp, &saddles, model.hbar)
}
