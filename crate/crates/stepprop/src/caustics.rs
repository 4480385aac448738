//! Caustics (where ∂x(T)/∂v0 vanishes) and Stokes lines in the (x0, x1)
//! plane at fixed T.

use crate::classical::{caustic_saddle_unflagged, solve_real_paths, BoundarySpec, ClassicalSaddle};
use crate::error::{Error, Result};
use crate::potential::{Family, StepModel};
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalPoint {
    pub x0: f64,
    pub v0: f64,
    pub t: f64,
    /// ∂x(T)/∂v0, zero up to the root tolerance
    pub jacobian: f64,
    pub x1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IvpResult {
    pub x: f64,
    pub v: f64,
    pub j: f64,
    pub steps: usize,
}

const RTOL: f64 = 1e-10;
const ATOL: f64 = 1e-10;

// Dormand-Prince 5(4) tableau
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] =
    [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];

type State = [f64; 4];

fn rhs(model: &StepModel, y: &State) -> State {
    let m = model.m;
    [y[1], -model.dv(y[0]) / m, y[3], -model.d2v(y[0]) * y[2] / m]
}

/// x(T), ẋ(T) and J(T) = ∂x(T)/∂v0 from x(0) = x0, ẋ(0) = v0, with
/// J̈ = −V″(x) J/m, J(0) = 0, J̇(0) = 1.
pub fn integrate_ivp(model: &StepModel, x0: f64, v0: f64, t: f64) -> Result<IvpResult> {
    model.validate()?;
    if model.family != Family::WoodsSaxon {
        return Err(Error::Unsupported("the IVP is integrated for the smooth step only"));
    }
    if !(t >= 0.0 && t.is_finite() && x0.is_finite() && v0.is_finite()) {
        return Err(Error::Domain("invalid initial data".into()));
    }
    let mut y: State = [x0, v0, 0.0, 1.0];
    let mut time = 0.0;
    // initial step from the fastest local time scale
    let scale = 1.0 / (model.alpha * (v0.abs() + (model.v0 / model.m).sqrt() + 1e-3));
    let mut h = (0.1 * scale).min(t.max(1e-300));
    let mut steps = 0usize;
    let mut k1 = rhs(model, &y);
    while time < t {
        if steps > 5_000_000 {
            return Err(Error::StepFailure(time));
        }
        // a step may not carry the particle across the wall unseen
        let reach = (0.5 * y[0].abs()).max(0.25 / model.alpha) / y[1].abs().max(1e-12);
        h = h.min(reach);
        if time + h > t {
            h = t - time;
        }
        let mut k = [[0.0; 4]; 7];
        k[0] = k1;
        for s in 1..7 {
            let mut ys = y;
            for i in 0..4 {
                let mut acc = 0.0;
                for j in 0..s {
                    acc += A[s - 1][j] * k[j][i];
                }
                ys[i] += h * acc;
            }
            k[s] = rhs(model, &ys);
        }
        let mut y5 = y;
        let mut err = 0.0_f64;
        for i in 0..4 {
            let mut d5 = 0.0;
            let mut d4 = 0.0;
            for s in 0..7 {
                d5 += B5[s] * k[s][i];
                d4 += B4[s] * k[s][i];
            }
            y5[i] += h * d5;
            let sc = ATOL + RTOL * y[i].abs().max(y5[i].abs());
            err = err.max((h * (d5 - d4)).abs() / sc);
        }
        if !err.is_finite() {
            return Err(Error::StepFailure(time));
        }
        let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        if err <= 1.0 {
            time += h;
            y = y5;
            k1 = k[6];
            steps += 1;
            if t - time <= 1e-14 * t.max(1.0) {
                break;
            }
        } else if h * fac < 1e-14 * t.max(1.0) {
            return Err(Error::StepFailure(time));
        }
        h *= fac;
    }
    Ok(IvpResult { x: y[0], v: y[1], j: y[2], steps })
}

fn v0_roots(model: &StepModel, x0: f64, t: f64) -> Result<Vec<CriticalPoint>> {
    let vmax = 5.0 * (2.0 * model.v0 / model.m).sqrt();
    let n = 400;
    let mut prev: Option<(f64, f64)> = None;
    let mut out = Vec::new();
    for i in 0..=n {
        let v0 = vmax * i as f64 / n as f64;
        let j = integrate_ivp(model, x0, v0, t)?.j;
        if let Some((pv, pj)) = prev {
            if (pj > 0.0) != (j > 0.0) {
                let (mut a, mut b, mut ja) = (pv, v0, pj);
                for _ in 0..80 {
                    let mid = 0.5 * (a + b);
                    if mid <= a || mid >= b || (b - a) < 1e-13 * vmax {
                        break;
                    }
                    let jm = integrate_ivp(model, x0, mid, t)?.j;
                    if (jm > 0.0) == (ja > 0.0) {
                        a = mid;
                        ja = jm;
                    } else {
                        b = mid;
                    }
                }
                let v = 0.5 * (a + b);
                let r = integrate_ivp(model, x0, v, t)?;
                out.push(CriticalPoint { x0, v0: v, t, jacobian: r.j, x1: r.x });
            }
        }
        prev = Some((v0, j));
    }
    Ok(out)
}

/// Caustic points (x0, x1) at fixed T for each x0 of the grid.  Heaviside
/// uses the analytic triangle with legs √(2V0/m)·T sampled on the grid.
pub fn caustic_curve(model: &StepModel, t: f64, x0_grid: &[f64]) -> Result<Vec<CriticalPoint>> {
    model.validate()?;
    if !(t > 0.0) {
        return Err(Error::Domain(format!("T must be positive, got {t}")));
    }
    if model.is_free() {
        return Ok(Vec::new());
    }
    if model.family == Family::Heaviside {
        return Ok(heaviside_triangle(model, t, x0_grid));
    }
    let rows: Vec<Vec<CriticalPoint>> = x0_grid.par_iter().map(|&x0| v0_roots(model, x0, t)).collect::<Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}

fn heaviside_triangle(model: &StepModel, t: f64, x0_grid: &[f64]) -> Vec<CriticalPoint> {
    let leg = (2.0 * model.v0 / model.m).sqrt() * t;
    let vc = (2.0 * model.v0 / model.m).sqrt();
    let mut out = Vec::new();
    for &x0 in x0_grid {
        if x0 < -leg || x0 > 0.0 {
            continue;
        }
        // hypotenuse (instantaneous bounce meets lingering) and the two legs
        out.push(CriticalPoint { x0, v0: vc, t, jacobian: 0.0, x1: -leg - x0 });
        out.push(CriticalPoint { x0, v0: vc, t, jacobian: 0.0, x1: 0.0 });
        if x0 == 0.0 || x0 == x0_grid[x0_grid.len() - 1] {
            let n = 64;
            for i in 0..=n {
                out.push(CriticalPoint { x0: 0.0, v0: vc, t, jacobian: 0.0, x1: -leg * i as f64 / n as f64 });
            }
        }
    }
    out
}

/// Cusps: x0 values where two v0 roots of J merge (the critical curve is
/// tangent to the v0 direction), refined by bisection on the root count,
/// together with their mirror images under x0 ↔ x1.
pub fn cusps(model: &StepModel, t: f64, x0_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    model.validate()?;
    if model.family == Family::Heaviside {
        let leg = (2.0 * model.v0 / model.m).sqrt() * t;
        return Ok(vec![(-leg, 0.0), (0.0, -leg)]);
    }
    let counts: Vec<Vec<CriticalPoint>> = x0_grid.par_iter().map(|&x0| v0_roots(model, x0, t)).collect::<Result<_>>()?;
    let mut out = Vec::new();
    for i in 1..x0_grid.len() {
        let (na, nb) = (counts[i - 1].len(), counts[i].len());
        if na == nb || na.min(nb) > 0 && na.abs_diff(nb) < 2 {
            continue;
        }
        let (mut a, mut b) = (x0_grid[i - 1], x0_grid[i]);
        let (mut ra, mut rb) = (counts[i - 1].clone(), counts[i].clone());
        for _ in 0..30 {
            let mid = 0.5 * (a + b);
            let rm = v0_roots(model, mid, t)?;
            if rm.len() == ra.len() {
                a = mid;
                ra = rm;
            } else {
                b = mid;
                rb = rm;
            }
        }
        // merging pair: the two roots closest in v0 on the richer side
        let rich = if ra.len() > rb.len() { &ra } else { &rb };
        if rich.len() < 2 {
            continue;
        }
        let mut best = (0, f64::INFINITY);
        for k in 1..rich.len() {
            let d = rich[k].v0 - rich[k - 1].v0;
            if d < best.1 {
                best = (k, d);
            }
        }
        let p = 0.5 * (rich[best.0].x1 + rich[best.0 - 1].x1);
        let x0 = 0.5 * (a + b);
        out.push((x0, p));
        out.push((p, x0));
    }
    Ok(out)
}

/// Zero set of Re S_caustic − Re S_real on a rectangular grid, by linear
/// interpolation along grid edges.  Heaviside: the coordinate axes outside
/// the triangle.
pub fn stokes_lines(model: &StepModel, t: f64, x0s: &[f64], x1s: &[f64]) -> Result<Vec<(f64, f64)>> {
    model.validate()?;
    if model.family == Family::Heaviside {
        let leg = (2.0 * model.v0 / model.m).sqrt() * t;
        let mut out = Vec::new();
        let in_x0 = x0s.first().zip(x0s.last()).map_or(false, |(a, b)| a.min(*b) <= 0.0 && a.max(*b) >= 0.0);
        let in_x1 = x1s.first().zip(x1s.last()).map_or(false, |(a, b)| a.min(*b) <= 0.0 && a.max(*b) >= 0.0);
        if in_x0 {
            out.extend(x1s.iter().filter(|&&x1| x1 <= -leg || x1 >= 0.0).map(|&x1| (0.0, x1)));
        }
        if in_x1 {
            out.extend(x0s.iter().filter(|&&x0| x0 <= -leg || x0 >= 0.0).map(|&x0| (x0, 0.0)));
        }
        return Ok(out);
    }
    let delta: Vec<Vec<f64>> = x1s
        .par_iter()
        .map(|&x1| {
            x0s.iter()
                .map(|&x0| stokes_discriminant(model, &BoundarySpec { x0, x1, t }).unwrap_or(f64::NAN))
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    for (r, &x1) in x1s.iter().enumerate() {
        for c in 0..x0s.len() {
            let d = delta[r][c];
            if !d.is_finite() {
                continue;
            }
            if c + 1 < x0s.len() {
                let e = delta[r][c + 1];
                if e.is_finite() && (d > 0.0) != (e > 0.0) {
                    let s = d / (d - e);
                    out.push((x0s[c] + s * (x0s[c + 1] - x0s[c]), x1));
                }
            }
            if r + 1 < x1s.len() {
                let e = delta[r + 1][c];
                if e.is_finite() && (d > 0.0) != (e > 0.0) {
                    let s = d / (d - e);
                    out.push((x0s[c], x1 + s * (x1s[r + 1] - x1)));
                }
            }
        }
    }
    Ok(out)
}

/// Re S_caustic − Re S_real at a configuration outside the caustic.
pub fn stokes_discriminant(model: &StepModel, bvp: &BoundarySpec) -> Result<f64> {
    let reals = solve_real_paths(model, bvp)?;
    if reals.len() >= 3 {
        return Err(Error::InsideCaustic);
    }
    let sc = caustic_saddle_unflagged(model, bvp)?;
    Ok(sc.s.re - reals[0].s.re)
}

/// Whether the caustic saddle contributes at `bvp`: it does on the side of
/// the Stokes set where its real action exceeds that of the real path
/// (upper-right and lower-left regions), ties counted as relevant.
pub fn relevance_flag(model: &StepModel, bvp: &BoundarySpec) -> Result<bool> {
    let s = caustic_saddle_unflagged(model, bvp)?;
    relevance_with(model, bvp, &s)
}

pub(crate) fn relevance_with(model: &StepModel, bvp: &BoundarySpec, saddle: &ClassicalSaddle) -> Result<bool> {
    if model.family == Family::Heaviside {
        let leg = (2.0 * model.v0 / model.m).sqrt() * bvp.t;
        if bvp.x0 <= 0.0 && bvp.x1 <= 0.0 && bvp.x0.abs() + bvp.x1.abs() < leg {
            return Err(Error::InsideCaustic);
        }
        return Ok(bvp.x0 * bvp.x1 >= 0.0);
    }
    let reals = solve_real_paths(model, bvp)?;
    if reals.len() >= 3 {
        return Err(Error::InsideCaustic);
    }
    let d = saddle.s.re - reals[0].s.re;
    let tol = 1e-12 * saddle.s.re.abs().max(1.0);
    Ok(d >= -tol && saddle.s.im >= -tol)
}
