//! Real-time and energy propagators from the spectral representation,
//! evaluated on a deformed momentum contour.

use crate::eigenstates::Basis;
use crate::error::{Error, Result};
use crate::potential::StepModel;
use crate::quadrature::{integrate, integrate_to_infinity, QuadOptions, QuadResult};
use crate::specfun::C64;
use std::f64::consts::{FRAC_PI_2, PI};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub theta: f64,
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// width of the contour panels in units of the Gaussian damping length
    pub k_max_factor: f64,
    pub max_evals: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig { theta: 0.1, abs_tol: 1e-9, rel_tol: 1e-8, k_max_factor: 2.0, max_evals: 4_000_000 }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.theta > 0.0 && self.theta < PI / 4.0) {
            return Err(Error::Domain(format!("theta must lie in (0, π/4), got {}", self.theta)));
        }
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0 && self.k_max_factor > 0.0) {
            return Err(Error::Domain("tolerances must be positive".into()));
        }
        Ok(())
    }

    fn opts(&self, parallel: bool) -> QuadOptions {
        QuadOptions {
            abs_tol: self.abs_tol,
            rel_tol: self.rel_tol,
            max_evals: self.max_evals,
            initial_panels: 4,
            parallel,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorSample {
    pub x0: f64,
    pub x1: f64,
    pub t: f64,
    pub g: C64,
    pub est_error: f64,
    pub n_evals: usize,
}

/// √(m/(2πiℏT)) e^{im(x1−x0)²/(2ℏT)}
pub fn free_propagator(m: f64, hbar: f64, x0: f64, x1: f64, t: f64) -> C64 {
    let pref = (C64::new(m, 0.0) / (C64::i() * 2.0 * PI * hbar * t)).sqrt();
    pref * C64::new(0.0, m * (x1 - x0).powi(2) / (2.0 * hbar * t)).exp()
}

/// (m/√(2mE)) e^{i√(2mE)|x1−x0|/ℏ}, retarded branch (E < 0 decays).
pub fn free_energy_propagator(m: f64, hbar: f64, x0: f64, x1: f64, e: f64) -> C64 {
    let ke = C64::new(2.0 * m * e, 0.0).sqrt();
    let ke = if e < 0.0 { C64::new(0.0, (2.0 * m * -e).sqrt()) } else { ke };
    (m / ke) * (C64::i() * ke * (x1 - x0).abs() / hbar).exp()
}

/// A point of the momentum contour: k, the threshold companion (μ or p),
/// dk/d(parameter), and the branch flag.
#[derive(Debug, Clone, Copy)]
struct ContourPoint {
    k: C64,
    q: C64,
    dk: C64,
    above: bool,
}

fn below_point(kth: f64, u: f64, dip: f64) -> ContourPoint {
    // k = k_th sin ζ, ζ = u − i·dip·sin 2u
    let zeta = C64::new(u, -dip * (2.0 * u).sin());
    let dzeta = C64::new(1.0, -2.0 * dip * (2.0 * u).cos());
    ContourPoint { k: kth * zeta.sin(), q: kth * zeta.cos(), dk: kth * zeta.cos() * dzeta, above: false }
}

fn above_point(kth: f64, q: C64, dq: C64) -> ContourPoint {
    let k = (C64::new(kth * kth, 0.0) + q * q).sqrt();
    ContourPoint { k, q, dk: q / k * dq, above: true }
}

/// Σ_b φ_b(x1; k) conj(φ_b(x0; k̄)) for every x1 in `x1s`.
fn kernel_row(model: &StepModel, pt: &ContourPoint, x0: f64, x1s: &[f64]) -> Result<Vec<C64>> {
    let basis = Basis::new(model, pt.k, pt.q, pt.above)?;
    let conj_basis = Basis::new(model, pt.k.conj(), pt.q.conj(), pt.above)?;
    let s0 = conj_basis.states(x0)?;
    let n = basis.len();
    x1s.iter()
        .map(|&x1| {
            let s1 = basis.states(x1)?;
            let mut acc = C64::new(0.0, 0.0);
            for b in 0..n {
                acc += s1[b] * s0[b].conj();
            }
            Ok(acc)
        })
        .collect()
}

fn time_factor(model: &StepModel, pt: &ContourPoint, t: f64) -> C64 {
    // e^{−ik²T/(2mℏ)} with the threshold phase split off for accuracy
    let kth2 = 2.0 * model.m * model.v0;
    let q2 = if pt.above { pt.q * pt.q } else { pt.k * pt.k - kth2 };
    (C64::new(0.0, -(kth2) * t / (2.0 * model.m * model.hbar))).exp()
        * (C64::new(0.0, -t / (2.0 * model.m * model.hbar)) * q2).exp()
}

fn damping_length(model: &StepModel, t: f64, theta: f64) -> f64 {
    (2.0 * model.m * model.hbar / (t * (2.0 * theta).sin())).sqrt()
}

/// Real-time propagator G(x1, x0; T).
pub fn propagate(model: &StepModel, x0: f64, x1: f64, t: f64, cfg: &QuadratureConfig) -> Result<PropagatorSample> {
    model.validate()?;
    cfg.validate()?;
    if !(x0.is_finite() && x1.is_finite() && t.is_finite()) {
        return Err(Error::Domain("non-finite configuration".into()));
    }
    if t <= 0.0 {
        return Ok(PropagatorSample { x0, x1, t, g: C64::new(0.0, 0.0), est_error: 0.0, n_evals: 0 });
    }
    let r = spectral_integral(model, &[x1], t, cfg, false, |pt, x1s| kernel_row(model, pt, x0, x1s))?;
    Ok(PropagatorSample { x0, x1, t, g: r.values[0], est_error: r.error, n_evals: r.n_evals })
}

/// Both contour legs of ∫ K(k) e^{−ik²T/(2mℏ)} dk for a vector kernel.
fn spectral_integral<K>(model: &StepModel, x1s: &[f64], t: f64, cfg: &QuadratureConfig, parallel: bool, kernel: K) -> Result<QuadResult>
where
    K: Fn(&ContourPoint, &[f64]) -> Result<Vec<C64>> + Sync,
{
    let n = x1s.len();
    let kth = model.k_threshold();
    let opts = cfg.opts(parallel);
    let mut values = vec![C64::new(0.0, 0.0); n];
    let mut error = 0.0;
    let mut n_evals = 0;
    let mut max_abs = 0.0_f64;
    if kth > 0.0 {
        let f = |u: f64| -> Result<Vec<C64>> {
            let pt = below_point(kth, u, 0.0);
            let w = time_factor(model, &pt, t) * pt.dk;
            Ok(kernel(&pt, x1s)?.into_iter().map(|v| v * w).collect())
        };
        let r = integrate(&f, 0.0, FRAC_PI_2, n, &opts)?;
        for i in 0..n {
            values[i] += r.values[i];
        }
        error += r.error;
        n_evals += r.n_evals;
        max_abs = max_abs.max(r.max_abs);
    }
    let rot = C64::from_polar(1.0, -cfg.theta);
    let f = |s: f64| -> Result<Vec<C64>> {
        let pt = above_point(kth, rot * s, rot);
        let w = time_factor(model, &pt, t) * pt.dk;
        Ok(kernel(&pt, x1s)?.into_iter().map(|v| v * w).collect())
    };
    let width = cfg.k_max_factor * damping_length(model, t, cfg.theta);
    let r = integrate_to_infinity(&f, 0.0, width, n, cfg.abs_tol * 1e-2, &opts)?;
    for i in 0..n {
        values[i] += r.values[i];
    }
    error += r.error;
    n_evals += r.n_evals;
    max_abs = max_abs.max(r.max_abs);
    Ok(QuadResult { values, error, n_evals, max_abs })
}

/// Evolves a sampled initial state by convolution with G:
/// ψ_T(x1) = ∫ G(x1, x0; T) ψ0(x0) dx0, with `w0` the x0 quadrature weights.
pub fn propagate_state(
    model: &StepModel,
    x0s: &[f64],
    w0: &[f64],
    psi0: &[C64],
    x1s: &[f64],
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<(Vec<C64>, f64)> {
    model.validate()?;
    cfg.validate()?;
    if x0s.len() != psi0.len() || x0s.len() != w0.len() {
        return Err(Error::Domain("x0 grid, weights and samples must have equal length".into()));
    }
    if t <= 0.0 {
        return Ok((vec![C64::new(0.0, 0.0); x1s.len()], 0.0));
    }
    let kernel = |pt: &ContourPoint, xs: &[f64]| -> Result<Vec<C64>> {
        let basis = Basis::new(model, pt.k, pt.q, pt.above)?;
        let conj_basis = Basis::new(model, pt.k.conj(), pt.q.conj(), pt.above)?;
        let n = basis.len();
        let mut coef = [C64::new(0.0, 0.0); 2];
        for j in 0..x0s.len() {
            let s0 = conj_basis.states(x0s[j])?;
            for b in 0..n {
                coef[b] += s0[b].conj() * psi0[j] * w0[j];
            }
        }
        xs.iter()
            .map(|&x1| {
                let s1 = basis.states(x1)?;
                let mut acc = C64::new(0.0, 0.0);
                for b in 0..n {
                    acc += s1[b] * coef[b];
                }
                Ok(acc)
            })
            .collect()
    };
    let r = spectral_integral(model, x1s, t, cfg, true, kernel)?;
    Ok((r.values, r.error))
}

/// Energy propagator K(x1, x0; E) = iℏ ∫ Σ φ(x1)φ(x0)* / (E − k²/2m + i0) dk.
///
/// The free-particle part is added in closed form; the remainder is
/// integrated on a contour that dips below the pole at k² = 2mE.
pub fn energy_propagator(model: &StepModel, x0: f64, x1: f64, e: f64, cfg: &QuadratureConfig) -> Result<C64> {
    model.validate()?;
    cfg.validate()?;
    if !e.is_finite() {
        return Err(Error::Domain("energy must be finite".into()));
    }
    let (m, h) = (model.m, model.hbar);
    let free = free_energy_propagator(m, h, x0, x1, e);
    if model.is_free() {
        return Ok(free);
    }
    let kth = model.k_threshold();
    let ke2 = 2.0 * m * e;
    let dx = x1 - x0;
    let opts = QuadOptions { initial_panels: 8, ..cfg.opts(false) };
    let integrand = |pt: &ContourPoint| -> Result<C64> {
        let row = kernel_row(model, pt, x0, &[x1])?[0];
        let free_row = (pt.k * dx / h).cos() / (PI * h);
        Ok((row - free_row) * 2.0 * m / (C64::new(ke2, 0.0) - pt.k * pt.k) * pt.dk)
    };
    let mut total = C64::new(0.0, 0.0);
    // below-step leg, dipping under the pole when 0 < E < V0
    let dip = if ke2 > 0.0 && ke2 < kth * kth { cfg.theta } else { 0.0 };
    let f = |u: f64| -> Result<Vec<C64>> { Ok(vec![integrand(&below_point(kth, u, dip))?]) };
    total += integrate(&f, 0.0, FRAC_PI_2, 1, &opts)?.values[0];
    // above-step leg: a dip of depth tan θ·q_E under the pole, then the real axis
    let qe2 = ke2 - kth * kth;
    let mut start = 0.0;
    if qe2 > 0.0 {
        let qe = qe2.sqrt();
        let depth = qe * cfg.theta.tan();
        let f = |s: f64| -> Result<Vec<C64>> {
            let arg = PI * s / (2.0 * qe);
            let q = C64::new(s, -depth * arg.sin());
            let dq = C64::new(1.0, -depth * arg.cos() * PI / (2.0 * qe));
            Ok(vec![integrand(&above_point(kth, q, dq))?])
        };
        total += integrate(&f, 0.0, 2.0 * qe, 1, &opts)?.values[0];
        start = 2.0 * qe;
    }
    let f = |s: f64| -> Result<Vec<C64>> {
        Ok(vec![integrand(&above_point(kth, C64::new(s, 0.0), C64::new(1.0, 0.0)))?])
    };
    let width = (kth.max(ke2.abs().sqrt())).max(1.0);
    total += integrate_to_infinity(&f, start, width, 1, cfg.abs_tol * 1e-2, &opts)?.values[0];
    Ok(free + C64::i() * h * total)
}
