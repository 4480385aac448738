//! Crank-Nicolson solver for iℏ ∂ψ/∂t = Ĥψ on a uniform grid, with an
//! optional polynomial imaginary potential at both ends standing in for the
//! infinite line.

use crate::error::{Error, Result};
use crate::potential::{Family, StepModel};
use crate::specfun::C64;
use rustfft::FftPlanner;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub n_x: usize,
    pub dt: f64,
    pub absorbing_width: f64,
}

impl GridSpec {
    /// Absorbing layers default to 10% of the domain at each end.
    pub fn new(x_min: f64, x_max: f64, n_x: usize, dt: f64) -> Result<Self> {
        let g = GridSpec { x_min, x_max, n_x, dt, absorbing_width: 0.1 * (x_max - x_min) };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x_min < self.x_max && self.x_min.is_finite() && self.x_max.is_finite()) {
            return Err(Error::Domain("need x_min < x_max".into()));
        }
        if self.n_x < 1024 {
            return Err(Error::Domain(format!("n_x must be at least 1024, got {}", self.n_x)));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Domain("dt must be positive".into()));
        }
        if !(self.absorbing_width >= 0.0 && 2.0 * self.absorbing_width < self.x_max - self.x_min) {
            return Err(Error::Domain("absorbing layers overlap".into()));
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_x - 1) as f64
    }

    pub fn xs(&self) -> Vec<f64> {
        let dx = self.dx();
        (0..self.n_x).map(|j| self.x_min + dx * j as f64).collect()
    }

    /// Largest momentum the grid represents, πℏ/dx.
    pub fn nyquist(&self, hbar: f64) -> f64 {
        PI * hbar / self.dx()
    }
}

use std::f64::consts::PI;

/// ψ0(x) ∝ exp(−(x−c)²/(2σ²) + i p0 x/ℏ), normalised on the grid.
pub fn gaussian_packet(grid: &GridSpec, center: f64, sigma: f64, p0: f64, hbar: f64) -> Result<Vec<C64>> {
    grid.validate()?;
    if !(sigma > 0.0 && hbar > 0.0) {
        return Err(Error::Domain("packet width and hbar must be positive".into()));
    }
    // momentum spread ℏ/(σ√2), eight standard deviations
    let reach = p0.abs() + 8.0 * hbar / (sigma * 2f64.sqrt());
    let nyq = grid.nyquist(hbar);
    if reach > nyq {
        return Err(Error::GridTooCoarse { momentum: reach, nyquist: nyq });
    }
    let psi: Vec<C64> = grid
        .xs()
        .iter()
        .map(|&x| C64::new(-(x - center).powi(2) / (2.0 * sigma * sigma), p0 * x / hbar).exp())
        .collect();
    let norm = l2_norm(&psi, grid.dx());
    Ok(psi.into_iter().map(|z| z / norm).collect())
}

pub fn l2_norm(psi: &[C64], dx: f64) -> f64 {
    (psi.iter().map(|z| z.norm_sqr()).sum::<f64>() * dx).sqrt()
}

/// Momentum below which all but `1e-10` of the spectral power lies.
pub fn momentum_content(psi: &[C64], dx: f64, hbar: f64) -> f64 {
    let n = psi.len();
    let mut buf = psi.to_vec();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let mut power: Vec<(f64, f64)> = buf
        .iter()
        .enumerate()
        .map(|(j, z)| {
            let kj = if j <= n / 2 { j as f64 } else { j as f64 - n as f64 };
            ((2.0 * PI * kj / (n as f64 * dx) * hbar).abs(), z.norm_sqr())
        })
        .collect();
    power.sort_by(|a, b| b.0.total_cmp(&a.0));
    let total: f64 = power.iter().map(|p| p.1).sum();
    let mut tail = 0.0;
    for &(p, w) in &power {
        tail += w;
        if tail > 1e-10 * total {
            return p;
        }
    }
    0.0
}

/// ⟨p²⟩ of a grid state.
pub fn mean_square_momentum(psi: &[C64], dx: f64, hbar: f64) -> f64 {
    let n = psi.len();
    let mut buf = psi.to_vec();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let (mut num, mut den) = (0.0, 0.0);
    for (j, z) in buf.iter().enumerate() {
        let kj = if j <= n / 2 { j as f64 } else { j as f64 - n as f64 };
        let p = 2.0 * PI * kj / (n as f64 * dx) * hbar;
        num += p * p * z.norm_sqr();
        den += z.norm_sqr();
    }
    if den > 0.0 { num / den } else { 0.0 }
}

fn potential_on_grid(model: &StepModel, grid: &GridSpec) -> Vec<f64> {
    let dx = grid.dx();
    grid.xs()
        .iter()
        .map(|&x| {
            if model.family == Family::Heaviside && x.abs() < 0.5 * dx {
                // cell containing the discontinuity
                0.5 * model.v0
            } else {
                model.v(x)
            }
        })
        .collect()
}

fn absorber(grid: &GridSpec, scale: f64) -> Vec<f64> {
    let w = grid.absorbing_width;
    grid.xs()
        .iter()
        .map(|&x| {
            if w == 0.0 {
                return 0.0;
            }
            let d = ((grid.x_min + w - x).max(x - (grid.x_max - w))).max(0.0) / w;
            scale * d.powi(3)
        })
        .collect()
}

/// ψ at time T by Crank-Nicolson steps of size ≤ dt with zero boundary
/// values.
pub fn evolve_packet(model: &StepModel, psi0: &[C64], grid: &GridSpec, t: f64) -> Result<Vec<C64>> {
    model.validate()?;
    grid.validate()?;
    if psi0.len() != grid.n_x {
        return Err(Error::Domain(format!("expected {} samples, got {}", grid.n_x, psi0.len())));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Domain("T must be non-negative".into()));
    }
    let hbar = model.hbar;
    let (dx, nyq) = (grid.dx(), grid.nyquist(hbar));
    let content = momentum_content(psi0, dx, hbar);
    // power in the Nyquist bin means the sampled spectrum is cut off there
    if content >= nyq {
        return Err(Error::GridTooCoarse { momentum: content, nyquist: nyq });
    }
    let steps = (t / grid.dt).ceil() as usize;
    if steps == 0 {
        return Ok(psi0.to_vec());
    }
    let dt = t / steps as f64;
    let v = potential_on_grid(model, grid);
    // ramp height a few times the mean kinetic energy
    let p2 = mean_square_momentum(psi0, dx, hbar);
    let w = absorber(grid, 4.0 * (p2 / (2.0 * model.m)).max(model.v0.abs()).max(1e-3));
    let kin = hbar * hbar / (2.0 * model.m * dx * dx);
    let n = grid.n_x;
    // (1 + iΔt H/2ℏ) ψ⁺ = (1 − iΔt H/2ℏ) ψ with H = −kin·δ² + V − iW
    let r = C64::new(0.0, dt / (2.0 * hbar));
    let off = -r * kin;
    let diag: Vec<C64> = (0..n).map(|j| C64::new(v[j] + 2.0 * kin, -w[j])).collect();
    let a_diag: Vec<C64> = diag.iter().map(|d| 1.0 + r * d).collect();
    let b_diag: Vec<C64> = diag.iter().map(|d| 1.0 - r * d).collect();
    // forward elimination coefficients are step independent
    let mut cp = vec![C64::new(0.0, 0.0); n];
    let mut denom = vec![C64::new(0.0, 0.0); n];
    denom[0] = a_diag[0];
    cp[0] = off / denom[0];
    for j in 1..n {
        denom[j] = a_diag[j] - off * cp[j - 1];
        cp[j] = off / denom[j];
    }
    let mut psi = psi0.to_vec();
    let mut rhs = vec![C64::new(0.0, 0.0); n];
    for _ in 0..steps {
        for j in 0..n {
            let left = if j > 0 { psi[j - 1] } else { C64::new(0.0, 0.0) };
            let right = if j + 1 < n { psi[j + 1] } else { C64::new(0.0, 0.0) };
            rhs[j] = b_diag[j] * psi[j] - off * (left + right);
        }
        // Thomas sweep
        psi[0] = rhs[0] / denom[0];
        for j in 1..n {
            psi[j] = (rhs[j] - off * psi[j - 1]) / denom[j];
        }
        for j in (0..n - 1).rev() {
            let next = psi[j + 1];
            psi[j] -= cp[j] * next;
        }
    }
    if psi.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonConvergence { what: "Crank-Nicolson", detail: "non-finite state".into() });
    }
    Ok(psi)
}

/// Free spreading Gaussian of [`gaussian_packet`] at time T (unnormalised
/// initial amplitude 1).
pub fn free_gaussian(m: f64, hbar: f64, center: f64, sigma: f64, p0: f64, x: f64, t: f64) -> C64 {
    // σ_t² = σ² + iℏt/m
    let s2 = C64::new(sigma * sigma, hbar * t / m);
    let xc = x - center - p0 * t / m;
    let phase = C64::new(0.0, (p0 * (x - center) - p0 * p0 * t / (2.0 * m)) / hbar + p0 * center / hbar);
    (C64::new(sigma * sigma, 0.0) / s2).sqrt() * (-(xc * xc) / (s2 * 2.0) + phase).exp()
}
