//! Single-table subcommands.

use crate::row;
use crate::table::Table;
use crate::{Command, Failure, Outcome};
use clap::Args;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use stepprop::caustics::{caustic_curve, cusps, stokes_lines};
use stepprop::classical::BoundarySpec;
use stepprop::eigenstates::rates;
use stepprop::oracle::{evolve_packet, gaussian_packet, GridSpec};
use stepprop::propagator::{energy_propagator, propagate, QuadratureConfig};
use stepprop::spectroscopy::{fourier_transform, laplace_transform, sample_propagator, sample_wkb, OmegaSamples, OmegaWindow, SpectrumSeries};
use stepprop::wkb::{collect_saddles, wkb_propagator, SaddleSet};
use stepprop::StepModel;

/// `v` or `a:b:n` (n points including both ends).
pub fn parse_range(s: &str) -> Outcome<Vec<f64>> {
    let bad = || Failure::Validation(format!("bad range {s:?}: expected v or a:b:n"));
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [v] => Ok(vec![v.trim().parse().map_err(|_| bad())?]),
        [a, b, n] => {
            let (a, b): (f64, f64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
            let n: usize = n.trim().parse().map_err(|_| bad())?;
            if n == 0 || !a.is_finite() || !b.is_finite() || (n == 1 && a != b) {
                return Err(bad());
            }
            Ok(linspace(a, b, n))
        }
        _ => Err(bad()),
    }
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|j| a + (b - a) * j as f64 / (n - 1) as f64).collect()
}

fn parse_set(s: &str) -> Outcome<SaddleSet> {
    s.parse().map_err(|e: stepprop::Error| Failure::Validation(e.to_string()))
}

fn bvp(x0: f64, x1: f64, t: f64) -> Outcome<BoundarySpec> {
    Ok(BoundarySpec::new(x0, x1, t)?)
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct QuadArgs {
    /// contour tilt angle
    #[arg(long, default_value_t = 0.1)]
    pub theta: f64,
    #[arg(long, default_value_t = 1e-9)]
    pub abs_tol: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub rel_tol: f64,
    /// integrand evaluation budget
    #[arg(long, default_value_t = 4_000_000)]
    pub max_evals: usize,
}

impl QuadArgs {
    pub fn config(&self) -> QuadratureConfig {
        QuadratureConfig { theta: self.theta, abs_tol: self.abs_tol, rel_tol: self.rel_tol, k_max_factor: 2.0, max_evals: self.max_evals }
    }
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct RatesArgs {
    /// lowest k (default: just above the threshold √(2mV0))
    #[arg(long)]
    pub k_min: Option<f64>,
    #[arg(long, default_value_t = 10.0)]
    pub k_max: f64,
    #[arg(long, default_value_t = 200)]
    pub n: usize,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct PropagateArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub x0: String,
    #[arg(long, allow_hyphen_values = true)]
    pub x1: String,
    #[arg(long)]
    pub t: f64,
    #[command(flatten)]
    pub quad: QuadArgs,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct EnergyArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub x0: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub x1: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub e: String,
    #[command(flatten)]
    pub quad: QuadArgs,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct ClassicalArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub x0: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub x1: f64,
    #[arg(long)]
    pub t: f64,
    /// real, real+caustic or real+caustic+topological
    #[arg(long, default_value = "real+caustic+topological")]
    pub saddles: String,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct CausticsArgs {
    #[arg(long)]
    pub t: f64,
    #[arg(long, allow_hyphen_values = true, default_value = "-15:0:301")]
    pub x0: String,
    /// emit cusp points instead of the caustic curve
    #[arg(long)]
    pub cusps: bool,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct StokesArgs {
    #[arg(long)]
    pub t: f64,
    #[arg(long, allow_hyphen_values = true, default_value = "-15:5:41")]
    pub x0: String,
    #[arg(long, allow_hyphen_values = true, default_value = "-15:5:41")]
    pub x1: String,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct WkbArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub x0: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub x1: String,
    #[arg(long)]
    pub t: f64,
    #[arg(long, default_value = "real+caustic")]
    pub saddles: String,
    /// add the exact propagator as extra columns
    #[arg(long)]
    pub exact: bool,
    #[command(flatten)]
    pub quad: QuadArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Fourier,
    Laplace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Exact,
    Wkb,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,
    #[arg(long, allow_hyphen_values = true)]
    pub x0: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub x1: f64,
    #[arg(long)]
    pub t: f64,
    #[arg(long = "A", default_value_t = 1.0)]
    pub a: f64,
    #[arg(long = "B", default_value_t = 12.0)]
    pub b: f64,
    #[arg(long, default_value_t = 2048)]
    pub n_omega: usize,
    /// lo:hi on the default τ spacing π/(B − A), or lo:hi:n
    #[arg(long, allow_hyphen_values = true, default_value = "-20:20")]
    pub tau_range: String,
    #[arg(long, allow_hyphen_values = true, default_value = "0:2:401")]
    pub s_range: String,
    #[arg(long, value_enum, default_value_t = Source::Exact)]
    pub source: Source,
    /// saddle set for --source wkb
    #[arg(long, default_value = "real+caustic")]
    pub saddles: String,
    /// emit the detected peaks instead of the series
    #[arg(long)]
    pub peaks: bool,
    #[command(flatten)]
    pub quad: QuadArgs,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct OracleArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub center: f64,
    #[arg(long)]
    pub width: f64,
    /// mean momentum
    #[arg(long, allow_hyphen_values = true)]
    pub p0: f64,
    #[arg(long)]
    pub t: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = -60.0)]
    pub x_min: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 60.0)]
    pub x_max: f64,
    #[arg(long, default_value_t = 12001)]
    pub n_x: usize,
    #[arg(long, default_value_t = 0.005)]
    pub dt: f64,
    /// default: 10% of the domain
    #[arg(long)]
    pub absorbing_width: Option<f64>,
}

/// Grid for a spectrum axis: `lo:hi` on the window's default spacing, or
/// `lo:hi:n`.
pub fn spectrum_grid(s: &str, window: &OmegaWindow) -> Outcome<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() == 2 {
        let bad = || Failure::Validation(format!("bad range {s:?}"));
        let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        if !(lo < hi) {
            return Err(bad());
        }
        return Ok(window.grid(lo, hi));
    }
    parse_range(s)
}

pub fn spectrum_samples(model: &StepModel, a: &SpectrumArgs) -> Outcome<(OmegaWindow, OmegaSamples)> {
    let window = OmegaWindow::new(a.a, a.b, a.n_omega)?;
    let b = bvp(a.x0, a.x1, a.t)?;
    let samples = match a.source {
        Source::Exact => sample_propagator(model, &b, window, &a.quad.config())?,
        Source::Wkb => sample_wkb(&b, window, &collect_saddles(model, &b, parse_set(&a.saddles)?)?)?,
    };
    Ok((window, samples))
}

pub fn spectrum_series(model: &StepModel, a: &SpectrumArgs) -> Outcome<SpectrumSeries> {
    let (window, samples) = spectrum_samples(model, a)?;
    Ok(match a.kind {
        Kind::Fourier => fourier_transform(&samples, &spectrum_grid(&a.tau_range, &window)?)?,
        Kind::Laplace => laplace_transform(&samples, &spectrum_grid(&a.s_range, &window)?)?,
    })
}

pub fn run(model: &StepModel, command: &Command) -> Outcome<Table> {
    match command {
        Command::Rates(a) => {
            if a.n == 0 {
                return Err(Failure::Validation("--n must be positive".into()));
            }
            let ks = match a.k_min {
                Some(lo) => linspace(lo, a.k_max, a.n),
                None => {
                    let kth = model.k_threshold();
                    (1..=a.n).map(|j| kth + (a.k_max - kth) * j as f64 / a.n as f64).collect()
                }
            };
            let mut t = Table::new("rates", &["k", "reflection", "transmission", "sum_minus_one"]);
            for k in ks {
                let (r, tr) = rates(model, k)?;
                t.push(row![k, r, tr, r + tr - 1.0]);
            }
            Ok(t)
        }
        Command::Propagate(a) => {
            let (x0s, x1s) = (parse_range(&a.x0)?, parse_range(&a.x1)?);
            let cfg = a.quad.config();
            let pts: Vec<(f64, f64)> = x0s.iter().flat_map(|&x0| x1s.iter().map(move |&x1| (x0, x1))).collect();
            let vals = pts
                .par_iter()
                .map(|&(x0, x1)| propagate(model, x0, x1, a.t, &cfg))
                .collect::<stepprop::Result<Vec<_>>>()?;
            let mut t = Table::new("propagate", &["x0", "x1", "t", "re_g", "im_g", "abs2", "err"]);
            for s in vals {
                t.push(row![s.x0, s.x1, s.t, s.g.re, s.g.im, s.g.norm_sqr(), s.est_error]);
            }
            Ok(t)
        }
        Command::Energy(a) => {
            let es = parse_range(&a.e)?;
            let cfg = a.quad.config();
            let vals = es.par_iter().map(|&e| energy_propagator(model, a.x0, a.x1, e, &cfg)).collect::<stepprop::Result<Vec<_>>>()?;
            let mut t = Table::new("energy", &["e", "re_k", "im_k"]);
            for (e, k) in es.iter().zip(vals) {
                t.push(row![*e, k.re, k.im]);
            }
            Ok(t)
        }
        Command::Classical(a) => {
            let b = bvp(a.x0, a.x1, a.t)?;
            let saddles = collect_saddles(model, &b, parse_set(&a.saddles)?)?;
            let mut t = Table::new("classical", &["kind", "re_e", "im_e", "re_s", "im_s", "re_vv", "im_vv", "relevant", "reflected"]);
            for s in saddles {
                t.push(row![s.kind.name(), s.e.re, s.e.im, s.s.re, s.s.im, s.vv.re, s.vv.im, s.relevant, s.reflected]);
            }
            Ok(t)
        }
        Command::Caustics(a) => {
            let x0s = parse_range(&a.x0)?;
            if a.cusps {
                let mut t = Table::new("cusps", &["x0", "x1"]);
                for (x0, x1) in cusps(model, a.t, &x0s)? {
                    t.push(row![x0, x1]);
                }
                return Ok(t);
            }
            let mut t = Table::new("caustics", &["x0", "x1", "v0", "jacobian"]);
            for p in caustic_curve(model, a.t, &x0s)? {
                t.push(row![p.x0, p.x1, p.v0, p.jacobian]);
            }
            Ok(t)
        }
        Command::Stokes(a) => {
            let mut t = Table::new("stokes", &["x0", "x1"]);
            for (x0, x1) in stokes_lines(model, a.t, &parse_range(&a.x0)?, &parse_range(&a.x1)?)? {
                t.push(row![x0, x1]);
            }
            Ok(t)
        }
        Command::Wkb(a) => {
            let set = parse_set(&a.saddles)?;
            let x1s = parse_range(&a.x1)?;
            let cfg = a.quad.config();
            let rows = x1s
                .par_iter()
                .map(|&x1| -> Outcome<Vec<f64>> {
                    let b = bvp(a.x0, x1, a.t)?;
                    let w = wkb_propagator(&b, &collect_saddles(model, &b, set)?, model.hbar)?;
                    let mut r = vec![x1, w.re, w.im];
                    if a.exact {
                        let g = propagate(model, a.x0, x1, a.t, &cfg)?.g;
                        r.extend([g.re, g.im]);
                    }
                    Ok(r)
                })
                .collect::<Outcome<Vec<_>>>()?;
            let cols: &[&str] = if a.exact { &["x1", "re_wkb", "im_wkb", "re_g", "im_g"] } else { &["x1", "re_wkb", "im_wkb"] };
            let mut t = Table::new("wkb", cols);
            for r in rows {
                t.push(r.into_iter().map(Into::into).collect());
            }
            Ok(t)
        }
        Command::Spectrum(a) => {
            let series = spectrum_series(model, a)?;
            if a.peaks {
                let mut t = Table::new("peaks", &["location", "action", "height", "width"]);
                for p in &series.peaks {
                    t.push(row![p.location, -p.location, p.height, p.width]);
                }
                return Ok(t);
            }
            let mut t = Table::new("spectrum", &["grid", "value", "err"]);
            for ((g, v), e) in series.grid.iter().zip(&series.values).zip(&series.err) {
                t.push(row![*g, *v, *e]);
            }
            Ok(t)
        }
        Command::Oracle(a) => {
            let mut grid = GridSpec::new(a.x_min, a.x_max, a.n_x, a.dt)?;
            if let Some(w) = a.absorbing_width {
                grid.absorbing_width = w;
                grid.validate()?;
            }
            let psi0 = gaussian_packet(&grid, a.center, a.width, a.p0, model.hbar)?;
            let psi = evolve_packet(model, &psi0, &grid, a.t)?;
            let mut t = Table::new("oracle", &["x", "re_psi", "im_psi"]);
            for (x, z) in grid.xs().iter().zip(psi) {
                t.push(row![*x, z.re, z.im]);
            }
            Ok(t)
        }
        Command::Reproduce(_) => unreachable!("handled by the recipe runner"),
    }
}
