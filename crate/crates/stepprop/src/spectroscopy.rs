//! Action spectroscopy: transforms of the propagator in ω = 1/ℏ.
//!
//! F(τ) = ∫_A^B √(2π/(iω)) G e^{iωτ} dω peaks at τ = −Re S for each
//! relevant saddle; L(s) = ∫_A^B √(2π/(iω)) G e^{−ωs} dω decays with the
//! imaginary parts.  Both are trapezoid sums over one cached set of G(ω)
//! samples.

use crate::classical::{BoundarySpec, ClassicalSaddle};
use crate::error::{Error, Result};
use crate::potential::StepModel;
use crate::propagator::{propagate, QuadratureConfig};
use crate::specfun::C64;
use crate::wkb::wkb_propagator;
use levenberg_marquardt::{LeastSquaresProblem, LevenbergMarquardt};
use nalgebra::{DMatrix, DVector, Dyn, Owned};
use rayon::prelude::*;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmegaWindow {
    pub a: f64,
    pub b: f64,
    pub n_omega: usize,
}

impl Default for OmegaWindow {
    fn default() -> Self {
        OmegaWindow { a: 1.0, b: 12.0, n_omega: 2048 }
    }
}

impl OmegaWindow {
    pub fn new(a: f64, b: f64, n_omega: usize) -> Result<Self> {
        let w = OmegaWindow { a, b, n_omega };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0 && self.b > self.a && self.b.is_finite()) {
            return Err(Error::Domain(format!("need 0 < A < B, got A = {}, B = {}", self.a, self.b)));
        }
        if self.n_omega < 64 {
            return Err(Error::Domain(format!("n_omega must be at least 64, got {}", self.n_omega)));
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        (self.b - self.a) / (self.n_omega - 1) as f64
    }

    pub fn omegas(&self) -> Vec<f64> {
        let h = self.step();
        (0..self.n_omega).map(|k| if k + 1 == self.n_omega { self.b } else { self.a + h * k as f64 }).collect()
    }

    /// Default τ (or s) spacing, π/(B − A): the window's resolution 2π/(B − A)
    /// sampled twice.
    pub fn tau_step(&self) -> f64 {
        PI / (self.b - self.a)
    }

    /// Uniform grid with [`Self::tau_step`] spacing covering [lo, hi].
    pub fn grid(&self, lo: f64, hi: f64) -> Vec<f64> {
        let h = self.tau_step();
        let n = ((hi - lo) / h).ceil().max(1.0) as usize;
        (0..=n).map(|j| lo + h * j as f64).collect()
    }

    fn weights(&self) -> Vec<f64> {
        let h = self.step();
        (0..self.n_omega).map(|k| if k == 0 || k + 1 == self.n_omega { 0.5 * h } else { h }).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumKind {
    Fourier,
    Laplace,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub location: f64,
    pub height: f64,
    /// full width at half maximum
    pub width: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSeries {
    pub kind: SpectrumKind,
    pub grid: Vec<f64>,
    /// |F|² or |L|²
    pub values: Vec<f64>,
    pub transform: Vec<C64>,
    /// bound on |F| or |L| from the per-sample quadrature errors
    pub err: Vec<f64>,
    pub peaks: Vec<Peak>,
}

impl SpectrumSeries {
    /// Peak locations as actions, −τ_peak.
    /// Trapezoidal integral of the series over its grid.
    pub fn total_power(&self) -> f64 {
        self.grid.windows(2).zip(self.values.windows(2)).map(|(g, v)| 0.5 * (g[1] - g[0]) * (v[0] + v[1])).sum()
    }

    pub fn peak_actions(&self) -> Vec<f64> {
        self.peaks.iter().map(|p| -p.location).collect()
    }
}

/// Cached G(ω) with weights √(2π/(iω)) and trapezoid weights folded in.
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaSamples {
    pub window: OmegaWindow,
    pub omega: Vec<f64>,
    pub g: Vec<C64>,
    pub err: Vec<f64>,
}

impl OmegaSamples {
    pub fn from_fn(window: OmegaWindow, f: impl Fn(f64) -> C64 + Sync) -> Result<Self> {
        window.validate()?;
        let omega = window.omegas();
        let g = omega.par_iter().map(|&w| f(w)).collect();
        Ok(OmegaSamples { window, err: vec![0.0; omega.len()], omega, g })
    }

    fn weighted(&self) -> Vec<C64> {
        let pref = C64::new(0.0, -PI / 4.0).exp();
        self.window
            .weights()
            .iter()
            .zip(&self.omega)
            .zip(&self.g)
            .map(|((&w, &om), &g)| g * pref * ((2.0 * PI / om).sqrt() * w))
            .collect()
    }

    fn err_weight(&self) -> Vec<f64> {
        self.window.weights().iter().zip(&self.omega).zip(&self.err).map(|((&w, &om), &e)| e * (2.0 * PI / om).sqrt() * w).collect()
    }
}

/// G(ω) = propagate with ℏ = 1/ω at each window node.
pub fn sample_propagator(model: &StepModel, bvp: &BoundarySpec, window: OmegaWindow, cfg: &QuadratureConfig) -> Result<OmegaSamples> {
    model.validate()?;
    window.validate()?;
    let omega = window.omegas();
    let samples: Vec<(C64, f64)> = omega
        .par_iter()
        .map(|&w| {
            let s = propagate(&model.with_hbar(1.0 / w), bvp.x0, bvp.x1, bvp.t, cfg)?;
            Ok((s.g, s.est_error))
        })
        .collect::<Result<_>>()?;
    let (g, err) = samples.into_iter().unzip();
    Ok(OmegaSamples { window, omega, g, err })
}

/// WKB model of G(ω) for a fixed saddle list.
pub fn sample_wkb(bvp: &BoundarySpec, window: OmegaWindow, saddles: &[ClassicalSaddle]) -> Result<OmegaSamples> {
    window.validate()?;
    let omega = window.omegas();
    let g = omega.iter().map(|&w| wkb_propagator(bvp, saddles, 1.0 / w)).collect::<Result<_>>()?;
    Ok(OmegaSamples { window, err: vec![0.0; omega.len()], omega, g })
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() || grid.iter().any(|x| !x.is_finite()) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("grid must be finite and strictly increasing".into()));
    }
    Ok(())
}

fn transform(samples: &OmegaSamples, grid: &[f64], kernel: impl Fn(f64, f64) -> C64 + Sync) -> (Vec<C64>, Vec<f64>) {
    let wg = samples.weighted();
    let we: f64 = samples.err_weight().iter().sum();
    let vals = grid
        .par_iter()
        .map(|&x| samples.omega.iter().zip(&wg).map(|(&om, &g)| g * kernel(om, x)).sum::<C64>())
        .collect();
    // |kernel| ≤ 1 for real τ; for s ≥ 0 likewise
    (vals, vec![we; grid.len()])
}

pub fn fourier_transform(samples: &OmegaSamples, tau_grid: &[f64]) -> Result<SpectrumSeries> {
    check_grid(tau_grid)?;
    let (f, err) = transform(samples, tau_grid, |om, tau| C64::new(0.0, om * tau).exp());
    let values: Vec<f64> = f.iter().map(|z| z.norm_sqr()).collect();
    let peaks = find_peaks(tau_grid, &values, samples.window.b - samples.window.a);
    Ok(SpectrumSeries { kind: SpectrumKind::Fourier, grid: tau_grid.to_vec(), values, transform: f, err, peaks })
}

pub fn laplace_transform(samples: &OmegaSamples, s_grid: &[f64]) -> Result<SpectrumSeries> {
    check_grid(s_grid)?;
    if s_grid[0] < 0.0 {
        return Err(Error::Domain("Laplace grid must be non-negative".into()));
    }
    let (l, err) = transform(samples, s_grid, |om, s| C64::new((-om * s).exp(), 0.0));
    let values: Vec<f64> = l.iter().map(|z| z.norm_sqr()).collect();
    let peaks = find_peaks(s_grid, &values, samples.window.b - samples.window.a);
    Ok(SpectrumSeries { kind: SpectrumKind::Laplace, grid: s_grid.to_vec(), values, transform: l, err, peaks })
}

pub fn fourier_spectrum(
    model: &StepModel,
    bvp: &BoundarySpec,
    window: OmegaWindow,
    tau_grid: &[f64],
    cfg: &QuadratureConfig,
) -> Result<SpectrumSeries> {
    check_grid(tau_grid)?;
    fourier_transform(&sample_propagator(model, bvp, window, cfg)?, tau_grid)
}

pub fn laplace_spectrum(
    model: &StepModel,
    bvp: &BoundarySpec,
    window: OmegaWindow,
    s_grid: &[f64],
    cfg: &QuadratureConfig,
) -> Result<SpectrumSeries> {
    check_grid(s_grid)?;
    laplace_transform(&sample_propagator(model, bvp, window, cfg)?, s_grid)
}

/// Local maxima above five times the median, refined by a parabola
/// through the three highest samples.  A window of length L = B − A leaks
/// at most 2|c|/(L·d) of a peak of height |c|²L² to distance d, so maxima
/// lying under the summed leakage envelope of stronger peaks are dropped
/// as sidelobes.
pub fn find_peaks(grid: &[f64], values: &[f64], window_length: f64) -> Vec<Peak> {
    let n = values.len();
    if n < 3 {
        return Vec::new();
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let median = sorted[n / 2];
    let mut cand = Vec::new();
    for i in 1..n - 1 {
        let v = values[i];
        if !(v > values[i - 1] && v >= values[i + 1] && v > 5.0 * median) {
            continue;
        }
        let (ym, y0, yp) = (values[i - 1], v, values[i + 1]);
        let (h0, h1) = (grid[i] - grid[i - 1], grid[i + 1] - grid[i]);
        let h = 0.5 * (h0 + h1);
        let den = ym - 2.0 * y0 + yp;
        let (dx, height) = if den < 0.0 {
            let d = 0.5 * (ym - yp) / den;
            (d * h, y0 - 0.25 * (ym - yp) * d)
        } else {
            (0.0, y0)
        };
        let half = 0.5 * height;
        let cross = |range: &mut dyn Iterator<Item = usize>, toward: isize| -> f64 {
            for j in range {
                let k = (j as isize + toward) as usize;
                if values[k] <= half {
                    let s = (values[j] - half) / (values[j] - values[k]);
                    return grid[j] + s * (grid[k] - grid[j]);
                }
            }
            f64::NAN
        };
        let left = cross(&mut (1..=i).rev(), -1);
        let right = cross(&mut (i..n - 1), 1);
        cand.push(Peak { location: grid[i] + dx, height, width: right - left });
    }
    cand.sort_by(|a, b| b.height.total_cmp(&a.height));
    let mut out: Vec<Peak> = Vec::new();
    for p in cand {
        let leak: f64 = out.iter().map(|q| 2.0 * q.height.sqrt() / (window_length * (p.location - q.location).abs()).max(2.0)).sum();
        if p.height.sqrt() > 1.5 * leak {
            out.push(p);
        }
    }
    out.sort_by(|a, b| a.location.total_cmp(&b.location));
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakMatch {
    pub saddle: usize,
    pub peak: Option<usize>,
    /// several saddles share the peak
    pub degenerate: bool,
}

/// Greedy nearest matching of Re S against the peak actions −τ_peak.
/// Saddles left without a peak within `tol` are candidates for being
/// irrelevant; a saddle whose nearest peak is already taken shares it and
/// both are flagged degenerate.
pub fn match_peaks(series: &SpectrumSeries, saddles: &[ClassicalSaddle], tol: f64) -> Vec<PeakMatch> {
    let actions = series.peak_actions();
    let mut pairs = Vec::new();
    for (i, s) in saddles.iter().enumerate() {
        for (j, &a) in actions.iter().enumerate() {
            let d = (a - s.s.re).abs();
            if d <= tol {
                pairs.push((d, i, j));
            }
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<PeakMatch> = (0..saddles.len()).map(|i| PeakMatch { saddle: i, peak: None, degenerate: false }).collect();
    let mut taken = vec![false; actions.len()];
    for &(_, i, j) in &pairs {
        if out[i].peak.is_none() && !taken[j] {
            out[i].peak = Some(j);
            taken[j] = true;
        }
    }
    for &(_, i, j) in &pairs {
        if out[i].peak.is_none() {
            out[i].peak = Some(j);
            out[i].degenerate = true;
            for o in out.iter_mut() {
                if o.peak == Some(j) {
                    o.degenerate = true;
                }
            }
        }
    }
    out
}

fn l2(grid: &[f64], f: impl Fn(usize) -> f64) -> f64 {
    let mut acc = 0.0;
    for i in 1..grid.len() {
        acc += 0.5 * (grid[i] - grid[i - 1]) * (f(i - 1).powi(2) + f(i).powi(2));
    }
    acc.sqrt()
}

/// ‖ |L_exact| − |L_model| ‖₂ over the s grid for each saddle list; the
/// model replaces G(ω) by the WKB sum inside the same ω quadrature.
pub fn residue_from_samples(exact: &OmegaSamples, bvp: &BoundarySpec, s_grid: &[f64], saddle_sets: &[Vec<ClassicalSaddle>]) -> Result<Vec<f64>> {
    let ex = laplace_transform(exact, s_grid)?;
    saddle_sets
        .iter()
        .map(|set| {
            let model = laplace_transform(&sample_wkb(bvp, exact.window, set)?, s_grid)?;
            Ok(l2(s_grid, |i| ex.transform[i].norm() - model.transform[i].norm()))
        })
        .collect()
}

/// L² norm over s of the quadrature error bound of |L_exact|.
pub fn residue_error_bound(exact: &OmegaSamples, s_grid: &[f64]) -> Result<f64> {
    let ex = laplace_transform(exact, s_grid)?;
    Ok(l2(s_grid, |i| ex.err[i]))
}

pub fn residue_against_wkb(
    model: &StepModel,
    bvp: &BoundarySpec,
    window: OmegaWindow,
    s_grid: &[f64],
    saddle_sets: &[Vec<ClassicalSaddle>],
    cfg: &QuadratureConfig,
) -> Result<Vec<f64>> {
    let exact = sample_propagator(model, bvp, window, cfg)?;
    residue_from_samples(&exact, bvp, s_grid, saddle_sets)
}

/// Trapezoid sum Σ w_k e^{ω_k z} over the window, summed as a geometric
/// series; this is the windowed single-pole model (e^{Bz} − e^{Az})/z
/// with the quadrature error of the data built in.
fn windowed_pole(window: &OmegaWindow, z: C64) -> C64 {
    let h = window.step();
    let n = window.n_omega;
    let hz = z * h;
    if hz.norm() < 1e-4 {
        let mut acc = C64::new(0.0, 0.0);
        for (k, w) in window.weights().iter().enumerate() {
            acc += (z * (window.a + h * k as f64)).exp() * *w;
        }
        return acc;
    }
    let q = hz.exp();
    let qn = (hz * (n - 1) as f64).exp();
    let geo = (C64::new(1.0, 0.0) - qn * q) / (C64::new(1.0, 0.0) - q);
    (z * window.a).exp() * h * (geo - (qn + 1.0) * 0.5)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LaplaceFit {
    pub actions: Vec<C64>,
    pub coefficients: Vec<C64>,
    /// root-mean-square misfit of log|L|
    pub rms: f64,
}

#[derive(Clone)]
struct LaplaceProblem {
    window: OmegaWindow,
    s: Vec<f64>,
    data: Vec<C64>,
    n: usize,
    /// Re S followed by Im S
    p: DVector<f64>,
}

impl LaplaceProblem {
    fn basis(&self, p: &DVector<f64>) -> DMatrix<C64> {
        DMatrix::from_fn(self.s.len(), self.n, |i, j| {
            windowed_pole(&self.window, C64::new(-p[self.n + j] - self.s[i], p[j]))
        })
    }

    // linear coefficients for fixed actions, relative (≈ log) weighting
    fn solve(&self, p: &DVector<f64>) -> Option<(DVector<C64>, DVector<C64>)> {
        let b = self.basis(p);
        let w: Vec<f64> = self.data.iter().map(|d| 1.0 / d.norm().max(1e-300)).collect();
        let bw = DMatrix::from_fn(b.nrows(), b.ncols(), |i, j| b[(i, j)] * w[i]);
        let dw = DVector::from_fn(self.data.len(), |i, _| self.data[i] * w[i]);
        let c = bw.svd(true, true).solve(&dw, 1e-14).ok()?;
        let fit = &b * &c;
        Some((c, fit))
    }
}

impl LeastSquaresProblem<f64, Dyn, Dyn> for LaplaceProblem {
    type ResidualStorage = Owned<f64, Dyn>;
    type JacobianStorage = Owned<f64, Dyn, Dyn>;
    type ParameterStorage = Owned<f64, Dyn>;

    fn set_params(&mut self, x: &DVector<f64>) {
        self.p.copy_from(x);
    }

    fn params(&self) -> DVector<f64> {
        self.p.clone()
    }

    fn residuals(&self) -> Option<DVector<f64>> {
        let (_, fit) = self.solve(&self.p)?;
        Some(DVector::from_fn(self.data.len(), |i, _| fit[i].norm().max(1e-300).ln() - self.data[i].norm().max(1e-300).ln()))
    }

    fn jacobian(&self) -> Option<DMatrix<f64>> {
        // central differences
        let mut trial = self.clone();
        let mut jac = DMatrix::zeros(self.data.len(), self.p.len());
        for k in 0..self.p.len() {
            let h = 1e-6 * self.p[k].abs().max(1.0);
            trial.p[k] = self.p[k] + h;
            let up = trial.residuals()?;
            trial.p[k] = self.p[k] - h;
            let down = trial.residuals()?;
            trial.p[k] = self.p[k];
            jac.set_column(k, &((up - down) / (2.0 * h)));
        }
        Some(jac)
    }
}

/// Fit complex actions to the Laplace transform by Levenberg-Marquardt on
/// log|L|, starting from Re S at the Fourier peaks and the given Im S
/// (coefficients eliminated by linear least squares at each step).
pub fn fit_laplace(series: &SpectrumSeries, window: OmegaWindow, re_actions: &[f64], im_guess: &[f64]) -> Result<LaplaceFit> {
    if series.kind != SpectrumKind::Laplace {
        return Err(Error::Domain("Laplace fit needs a Laplace series".into()));
    }
    if re_actions.is_empty() || re_actions.len() != im_guess.len() || 2 * re_actions.len() >= series.grid.len() {
        return Err(Error::Domain("need one Im S guess per action and more s samples than actions".into()));
    }
    let n = re_actions.len();
    let problem = LaplaceProblem {
        window,
        s: series.grid.clone(),
        data: series.transform.clone(),
        n,
        p: DVector::from_iterator(2 * n, re_actions.iter().chain(im_guess).copied()),
    };
    // coarse search over Im S; the best few starts are refined
    let levels = [0.0, 0.1, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0];
    let cost = |p: &LaplaceProblem| p.residuals().map_or(f64::INFINITY, |r| r.norm_squared());
    let mut seeds = vec![(cost(&problem), problem.p.clone())];
    if n <= 3 {
        let mut trial = problem.clone();
        for code in 0..levels.len().pow(n as u32) {
            let mut c = code;
            for j in 0..n {
                trial.p[n + j] = levels[c % levels.len()];
                c /= levels.len();
            }
            seeds.push((cost(&trial), trial.p.clone()));
        }
    }
    seeds.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut done: Option<(f64, LaplaceProblem)> = None;
    let mut last_failure = None;
    for (_, p0) in seeds.into_iter().take(8) {
        let mut start = problem.clone();
        start.p = p0;
        let (out, report) = LevenbergMarquardt::new().with_patience(200).minimize(start);
        if !report.termination.was_successful() {
            last_failure = Some(format!("{:?}", report.termination));
            continue;
        }
        let v = cost(&out);
        if done.as_ref().is_none_or(|d| v < d.0) {
            done = Some((v, out));
        }
    }
    let done = match done {
        Some((_, d)) => d,
        None => return Err(Error::NonConvergence { what: "Laplace fit", detail: last_failure.unwrap_or_default() }),
    };
    let (c, _) = done.solve(&done.p).ok_or(Error::NonConvergence { what: "Laplace fit", detail: "singular basis".into() })?;
    let r = done.residuals().unwrap_or_else(|| DVector::zeros(1));
    Ok(LaplaceFit {
        actions: (0..n).map(|j| C64::new(done.p[j], done.p[n + j])).collect(),
        coefficients: c.iter().copied().collect(),
        rms: (r.norm_squared() / r.len() as f64).sqrt(),
    })
}
