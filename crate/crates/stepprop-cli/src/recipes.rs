//! Figure recipes: fixed configurations emitting plot-ready tables.

use crate::commands::linspace;
use crate::row;
use crate::table::{Cell, Table};
use crate::{Failure, Outcome};
use clap::Args;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::path::{Path, PathBuf};
use stepprop::caustics::{caustic_curve, integrate_ivp, stokes_lines};
use stepprop::classical::{
    bounce_relation, direct_relation, find_caustic_saddle, heaviside_paths, matching_point, solve_real_paths,
    topological_saddle_or_threshold, BoundarySpec, ClassicalSaddle,
};
use stepprop::eigenstates::{orthonormal_state, rates, Branch};
use stepprop::propagator::{free_propagator, propagate, QuadratureConfig};
use stepprop::spectroscopy::{fourier_transform, laplace_transform, residue_error_bound, sample_propagator, sample_wkb, OmegaWindow};
use stepprop::wkb::{collect_saddles, wkb_propagator, SaddleSet};
use stepprop::{Family, StepModel, C64};

pub const RECIPES: [&str; 18] = [
    "fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10", "fig11", "fig12", "fig13", "fig14", "fig15",
    "fig16", "fig17", "fig18",
];

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct ReproduceArgs {
    /// fig1 ... fig18
    pub recipe: String,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// points per axis for field and sweep recipes
    #[arg(long, default_value_t = 41)]
    pub resolution: usize,
    /// also write a gnuplot script stub
    #[arg(long)]
    pub gnuplot: bool,
}

fn ws(alpha: f64, v0: f64, hbar: f64) -> StepModel {
    StepModel::woods_saxon(1.0, v0, alpha, hbar)
}

fn step(v0: f64, hbar: f64) -> StepModel {
    StepModel::heaviside(1.0, v0, hbar)
}

fn status(e: &stepprop::Error) -> String {
    format!("{e:?}").split(|c: char| !c.is_alphanumeric()).next().unwrap_or("error").to_string()
}

fn hbar_tag(h: f64) -> String {
    format!("{h}").replace('.', "p")
}

/// |G|² on an (x0, x1) grid.
fn field(name: &str, model: &StepModel, t: f64, axis: &[f64]) -> Outcome<Table> {
    let cfg = QuadratureConfig::default();
    let pts: Vec<(f64, f64)> = axis.iter().flat_map(|&x0| axis.iter().map(move |&x1| (x0, x1))).collect();
    let vals = pts.par_iter().map(|&(x0, x1)| propagate(model, x0, x1, t, &cfg)).collect::<stepprop::Result<Vec<_>>>()?;
    let mut tab = Table::new(name, &["x0", "x1", "re_g", "im_g", "abs2"]);
    for s in vals {
        tab.push(row![s.x0, s.x1, s.g.re, s.g.im, s.g.norm_sqr()]);
    }
    Ok(tab)
}

fn caustic_table(name: &str, model: &StepModel, t: f64, x0s: &[f64]) -> Outcome<Table> {
    let mut tab = Table::new(name, &["x0", "x1"]);
    for p in caustic_curve(model, t, x0s)? {
        tab.push(row![p.x0, p.x1]);
    }
    Ok(tab)
}

fn stokes_table(name: &str, model: &StepModel, t: f64, axis: &[f64]) -> Outcome<Table> {
    let mut tab = Table::new(name, &["x0", "x1"]);
    for (x0, x1) in stokes_lines(model, t, axis, axis)? {
        tab.push(row![x0, x1]);
    }
    Ok(tab)
}

fn saddle_row(x: f64, s: &ClassicalSaddle) -> Vec<Cell> {
    row![x, s.kind.name(), s.e.re, s.e.im, s.s.re, s.s.im, s.relevant]
}

const SADDLE_COLS: [&str; 7] = ["x1", "kind", "re_e", "im_e", "re_s", "im_s", "relevant"];

fn fig1() -> Outcome<Vec<Table>> {
    let xs = linspace(-5.0, 5.0, 401);
    let alphas = [1.0, 3.0, 5.0, 7.0, 9.0];
    let mut cols = vec!["x".to_string()];
    cols.extend(alphas.iter().map(|a| format!("v_alpha{a}")));
    cols.push("v_heaviside".into());
    let mut tab = Table { name: "fig1_potential".into(), columns: cols, rows: Vec::new() };
    for &x in &xs {
        let mut r = vec![Cell::Num(x)];
        r.extend(alphas.iter().map(|&a| Cell::Num(ws(a, 1.0, 1.0).v(x))));
        r.push(Cell::Num(step(1.0, 1.0).v(x)));
        tab.push(r);
    }
    Ok(vec![tab])
}

fn fig2() -> Outcome<Vec<Table>> {
    let models: Vec<(String, StepModel)> = [0.1, 1.0, 2.0, 3.0, 4.0]
        .iter()
        .map(|&a| (format!("alpha{a}"), ws(a, 1.0, 1.0)))
        .chain([("heaviside".to_string(), step(1.0, 1.0))])
        .collect();
    let mut cols = vec!["k".to_string()];
    for (n, _) in &models {
        cols.push(format!("r2_{n}"));
        cols.push(format!("t2_{n}"));
    }
    let mut tab = Table { name: "fig2_rates".into(), columns: cols, rows: Vec::new() };
    let kth = 2f64.sqrt();
    for j in 1..=400 {
        let k = kth + (5.0 - kth) * j as f64 / 400.0;
        let mut r = vec![Cell::Num(k)];
        for (_, m) in &models {
            let (a, b) = rates(m, k)?;
            r.extend([Cell::Num(a), Cell::Num(b)]);
        }
        tab.push(r);
    }
    Ok(vec![tab])
}

fn field_family(prefix: &str, models: &[(String, StepModel)], res: usize, stokes: bool) -> Outcome<Vec<Table>> {
    let axis = linspace(-15.0, 5.0, res);
    let mut out = Vec::new();
    for (tag, m) in models {
        out.push(field(&format!("{prefix}_field_{tag}"), m, 10.0, &axis)?);
    }
    // caustics and Stokes lines do not depend on ℏ
    let mut seen: Vec<(f64, f64)> = Vec::new();
    for (_, m) in models {
        if seen.contains(&(m.v0, m.alpha)) {
            continue;
        }
        seen.push((m.v0, m.alpha));
        let tag = format!("v0_{}", hbar_tag(m.v0));
        out.push(caustic_table(&format!("{prefix}_caustic_{tag}"), m, 10.0, &linspace(-15.0, 0.0, 301))?);
        if stokes {
            out.push(stokes_table(&format!("{prefix}_stokes_{tag}"), m, 10.0, &axis)?);
        }
    }
    Ok(out)
}

fn fig3(res: usize) -> Outcome<Vec<Table>> {
    let models: Vec<_> = [1.0, 0.5, 0.25].iter().map(|&h| (format!("hbar{}", hbar_tag(h)), ws(1.0, 1.0, h))).collect();
    field_family("fig3", &models, res, true)
}

fn fig4(res: usize) -> Outcome<Vec<Table>> {
    let models: Vec<_> = [1.0, 0.5, 0.25].iter().map(|&h| (format!("hbar{}", hbar_tag(h)), step(1.0, h))).collect();
    field_family("fig4", &models, res, true)
}

fn fig5() -> Outcome<Vec<Table>> {
    let m = ws(1.0, 1.0, 1.0);
    let kth = m.k_threshold();
    let xs = linspace(-10.0, 10.0, 801);
    let mut out = Vec::new();
    for (name, branch, k) in [("fig5_phi_c", Branch::C, 0.95 * kth), ("fig5_phi_plus", Branch::Plus, 1.5 * kth)] {
        let mut tab = Table::new(name, &["x", "re_phi", "im_phi"]);
        for &x in &xs {
            let z = orthonormal_state(&m, branch, k, x)?;
            tab.push(row![x, z.re, z.im]);
        }
        out.push(tab);
    }
    Ok(out)
}

fn fig6() -> Outcome<Vec<Table>> {
    let cfg = QuadratureConfig::default();
    let xs = linspace(-10.0, 30.0, 801);
    let mut out = Vec::new();
    for h in [1.0, 0.5, 0.25] {
        let m = step(1.0, h);
        let g = xs.par_iter().map(|&x1| propagate(&m, 10.0, x1, 10.0, &cfg)).collect::<stepprop::Result<Vec<_>>>()?;
        let mut tab = Table::new(&format!("fig6_hbar{}", hbar_tag(h)), &["x1", "re_g", "im_g", "re_free", "im_free", "re_diff", "im_diff"]);
        for (x1, s) in xs.iter().zip(g) {
            let f = free_propagator(1.0, h, 10.0, *x1, 10.0);
            let d = s.g - f;
            tab.push(row![*x1, s.g.re, s.g.im, f.re, f.im, d.re, d.im]);
        }
        out.push(tab);
    }
    Ok(out)
}

fn fig7(res: usize) -> Outcome<Vec<Table>> {
    let hs: Vec<_> = [0.25, 0.5, 1.0].iter().map(|&v| (format!("v0_{}", hbar_tag(v)), step(v, 1.0))).collect();
    let mut out = field_family("fig7_heaviside", &hs, res, false)?;
    let smooth: Vec<_> = [1.0, 1.5, 2.0].iter().map(|&v| (format!("v0_{}", hbar_tag(v)), ws(1.0, v, 1.0))).collect();
    out.extend(field_family("fig7_smooth", &smooth, res, false)?);
    Ok(out)
}

fn trajectory(model: &StepModel, b: &BoundarySpec, s: &ClassicalSaddle, ts: &[f64]) -> Outcome<Vec<f64>> {
    if model.family == Family::Heaviside {
        if !s.reflected {
            return Ok(ts.iter().map(|&t| b.x0 + (b.x1 - b.x0) * t / b.t).collect());
        }
        let u = (b.x0.abs() + b.x1.abs()) / b.t;
        let side = b.x0.signum();
        return Ok(ts.iter().map(|&t| side * (b.x0.abs() - u * t).abs()).collect());
    }
    let ke = s.e.re - model.v(b.x0);
    let toward = if s.reflected { -b.x0.signum() } else { (b.x1 - b.x0).signum() };
    let v0 = toward * (2.0 * ke.max(0.0) / model.m).sqrt();
    ts.iter().map(|&t| Ok(if t == 0.0 { b.x0 } else { integrate_ivp(model, b.x0, v0, t)?.x })).collect()
}

fn fig8() -> Outcome<Vec<Table>> {
    let m = ws(1.0, 1.0, 1.0);
    let es = linspace(0.01, 3.0, 300);
    let x1s: Vec<f64> = (0..=6).map(|j| -2.0 + 0.5 * j as f64).collect();
    let mut cols = vec!["e".to_string()];
    for x1 in &x1s {
        cols.push(format!("t_direct_x1_{x1}"));
        cols.push(format!("t_bounce_x1_{x1}"));
    }
    let mut times = Table { name: "fig8_time_of_flight".into(), columns: cols, rows: Vec::new() };
    for &e in &es {
        let mut r = vec![Cell::Num(e)];
        for &x1 in &x1s {
            let b = BoundarySpec { x0: -5.0, x1, t: 10.0 };
            let real_t = |res: stepprop::Result<(C64, C64)>| res.ok().filter(|(t, _)| t.im.abs() < 1e-9).map_or(f64::NAN, |(t, _)| t.re);
            r.push(Cell::Num(real_t(direct_relation(&m, &b, C64::new(e, 0.0)))));
            r.push(Cell::Num(real_t(bounce_relation(&m, &b, C64::new(e, 0.0)))));
        }
        times.push(r);
    }
    let b = BoundarySpec::new(-4.0, -3.0, 10.0)?;
    let ts = linspace(0.0, 10.0, 201);
    let mut paths = Table::new("fig8_paths", &["model", "kind", "energy", "t", "x"]);
    for (tag, model) in [("alpha1", ws(1.0, 1.0, 1.0)), ("alpha5", ws(5.0, 1.0, 1.0)), ("heaviside", step(1.0, 1.0))] {
        let saddles = if model.family == Family::Heaviside { heaviside_paths(&model, &b)? } else { solve_real_paths(&model, &b)? };
        for s in &saddles {
            for (t, x) in ts.iter().zip(trajectory(&model, &b, s, &ts)?) {
                paths.push(row![tag, s.kind.name(), s.e.re, *t, x]);
            }
        }
    }
    Ok(vec![times, paths])
}

fn fig9(res: usize) -> Outcome<Vec<Table>> {
    let m = ws(5.0, 1.0, 1.0);
    let cfg = QuadratureConfig::default();
    let xs = linspace(-10.0, -8.0, res.max(2) * 5);
    let rows = xs
        .par_iter()
        .map(|&x1| -> Outcome<Vec<Cell>> {
            let b = BoundarySpec::new(-5.0, x1, 10.0)?;
            let g = propagate(&m, -5.0, x1, 10.0, &cfg)?.g;
            let real = wkb_propagator(&b, &collect_saddles(&m, &b, SaddleSet::Real)?, m.hbar)?;
            let rc = wkb_propagator(&b, &collect_saddles(&m, &b, SaddleSet::RealCaustic)?, m.hbar)?;
            Ok(row![x1, g.re, g.im, real.re, real.im, rc.re, rc.im])
        })
        .collect::<Outcome<Vec<_>>>()?;
    let mut tab = Table::new("fig9_wkb", &["x1", "re_g", "im_g", "re_wkb_real", "im_wkb_real", "re_wkb_real_caustic", "im_wkb_real_caustic"]);
    rows.into_iter().for_each(|r| tab.push(r));
    Ok(vec![tab])
}

fn fig10() -> Outcome<Vec<Table>> {
    let m = ws(1.0, 1.0, 1.0);
    let mut tab = Table::new("fig10_caustic_saddle", &["x1", "re_e", "im_e", "re_v0", "im_v0", "re_s", "im_s", "status"]);
    for j in 0..=56 {
        let x1 = -6.75 + 0.05 * j as f64;
        let b = BoundarySpec::new(-4.0, x1, 10.0)?;
        match find_caustic_saddle(&m, &b) {
            Ok(s) => {
                let v0 = ((s.e - m.v(-4.0)) * 2.0 / m.m).sqrt();
                tab.push(row![x1, s.e.re, s.e.im, v0.re, v0.im, s.s.re, s.s.im, "ok"]);
            }
            Err(e) => tab.push(row![x1, f64::NAN, f64::NAN, f64::NAN, f64::NAN, f64::NAN, f64::NAN, status(&e)]),
        }
    }
    Ok(vec![tab])
}

fn fig11(res: usize) -> Outcome<Vec<Table>> {
    let m = ws(5.0, 1.0, 1.0);
    let b = BoundarySpec::new(-5.0, -9.25, 10.0)?;
    let (re, im) = (linspace(0.6, 1.6, res), linspace(-0.4, 0.4, res));
    let pts: Vec<(f64, f64)> = re.iter().flat_map(|&a| im.iter().map(move |&c| (a, c))).collect();
    let vals: Vec<C64> = pts
        .par_iter()
        .map(|&(a, c)| bounce_relation(&m, &b, C64::new(a, c)).map_or(C64::new(f64::NAN, f64::NAN), |(t, _)| t))
        .collect();
    let mut tab = Table::new("fig11_time_plane", &["re_e", "im_e", "re_t", "im_t"]);
    for ((a, c), t) in pts.iter().zip(vals) {
        tab.push(row![*a, *c, t.re, t.im]);
    }
    let mut sad = Table::new("fig11_saddles", &["kind", "re_e", "im_e", "re_s", "im_s"]);
    for s in collect_saddles(&m, &b, SaddleSet::RealCausticTopological)? {
        sad.push(row![s.kind.name(), s.e.re, s.e.im, s.s.re, s.s.im]);
    }
    Ok(vec![tab, sad])
}

fn fig12() -> Outcome<Vec<Table>> {
    let m = ws(5.0, 1.0, 1.0);
    let mut tab = Table::new("fig12_left_reflection", &SADDLE_COLS);
    for x1 in linspace(-10.0, -8.0, 41) {
        let b = BoundarySpec::new(-5.0, x1, 10.0)?;
        tab.push(saddle_row(x1, &topological_saddle_or_threshold(&m, &b)?));
    }
    Ok(vec![tab])
}

fn fig13() -> Outcome<Vec<Table>> {
    let mut tab = Table::new("fig13_right_reflection", &["model", "x1", "kind", "re_e", "im_e", "re_s", "im_s", "relevant"]);
    for (tag, m) in [("alpha5", ws(5.0, 1.0, 1.0)), ("heaviside", step(1.0, 1.0))] {
        for x1 in linspace(3.0, 7.0, 41) {
            let b = BoundarySpec::new(5.0, x1, 10.0)?;
            let saddles = match collect_saddles(&m, &b, SaddleSet::RealCausticTopological) {
                Ok(s) => s,
                Err(_) => continue,
            };
            for s in saddles.iter().filter(|s| s.reflected) {
                tab.push(row![tag, x1, s.kind.name(), s.e.re, s.e.im, s.s.re, s.s.im, s.relevant]);
            }
        }
    }
    Ok(vec![tab])
}

/// t along C0, v = (E − V(a)) e^{iθ}/2 + (E + V(a))/2, from θ = −π
/// (x = a, t = 0).  The velocity branch is followed continuously on each
/// side of the turning point θ = 0; past it, the branch that closes the
/// segment (t = 0 again at θ = π) is kept.  θ = u|u| removes the 1/√
/// singularity at the turning point.
fn fig14() -> Outcome<Vec<Table>> {
    let m = ws(1.0, 1.0, 1.0);
    let e = 2.0;
    let a = matching_point(&m, e)?;
    let va = m.v(a);
    let r = (e - va) / 2.0;
    let v_of = |th: f64| C64::from_polar(r, th) + (e + va) / 2.0;
    // dt/du = (dx/dv)(dv/dθ)(dθ/du)/ẋ with ẋ = ±√(2(E − v)/m)
    let rate = |u: f64| {
        let th = u * u.abs();
        let v = v_of(th);
        let dxdv = m.v0 / (2.0 * m.alpha * v * (m.v0 - v));
        let dvdth = C64::new(0.0, 1.0) * C64::from_polar(r, th);
        dxdv * dvdth * 2.0 * u.abs() / ((e - v) * 2.0 / m.m).sqrt()
    };
    let half = |us: &[f64], first_sign: f64| -> Vec<(f64, C64)> {
        let mut t = C64::new(0.0, 0.0);
        let mut prev: Option<C64> = None;
        let mut out = Vec::new();
        for k in 0..us.len() - 1 {
            let nodes = stepprop::quadrature::panel_nodes(us[k], us[k + 1]);
            let weights = stepprop::quadrature::panel_weights(us[k], us[k + 1]);
            for (u, w) in nodes.iter().zip(weights) {
                let g = rate(*u);
                let f = match prev {
                    Some(p) if (g + p).norm() < (g - p).norm() => -g,
                    Some(_) => g,
                    None => g * first_sign,
                };
                prev = Some(f);
                t += f * w;
            }
            out.push((us[k + 1], t));
        }
        out
    };
    let n = 200;
    let umax = std::f64::consts::PI.sqrt();
    let left = half(&linspace(-umax, 0.0, n + 1), 1.0);
    let t0 = left[n - 1].1;
    let right_axis = linspace(0.0, umax, n + 1);
    let right = [1.0, -1.0]
        .iter()
        .map(|&sg| half(&right_axis, sg))
        .min_by(|p, q| (t0 + p[n - 1].1).norm().total_cmp(&(t0 + q[n - 1].1).norm()))
        .expect("two candidates");
    let mut tab = Table::new("fig14_c0", &["theta", "re_v", "im_v", "re_t", "im_t"]);
    tab.push(row![-std::f64::consts::PI, va, 0.0, 0.0, 0.0]);
    for (u, t) in left.into_iter().chain(right.into_iter().map(|(u, t)| (u, t + t0))) {
        let th = u * u.abs();
        let v = v_of(th);
        tab.push(row![th, v.re, v.im, t.re, t.im]);
    }
    Ok(vec![tab])
}

fn fig15() -> Outcome<Vec<Table>> {
    let m = step(1.0, 1.0);
    let b = BoundarySpec::new(5.0, 4.0, 10.0)?;
    let w = OmegaWindow::default();
    let samples = sample_propagator(&m, &b, w, &QuadratureConfig::default())?;
    let mut g = Table::new("fig15_samples", &["omega", "re_g", "im_g"]);
    for (om, z) in samples.omega.iter().zip(&samples.g) {
        g.push(row![*om, z.re, z.im]);
    }
    let f = fourier_transform(&samples, &w.grid(-20.0, 20.0))?;
    let mut spectrum = Table::new("fig15_fourier", &["tau", "value", "err"]);
    for ((t, v), e) in f.grid.iter().zip(&f.values).zip(&f.err) {
        spectrum.push(row![*t, *v, *e]);
    }
    let mut acts = Table::new("fig15_actions", &["kind", "action", "peak_action"]);
    let peaks = f.peak_actions();
    for s in collect_saddles(&m, &b, SaddleSet::RealCaustic)? {
        let near = peaks.iter().copied().min_by(|p, q| (p - s.s.re).abs().total_cmp(&(q - s.s.re).abs())).unwrap_or(f64::NAN);
        acts.push(row![s.kind.name(), s.s.re, near]);
    }
    Ok(vec![g, spectrum, acts])
}

fn fig16() -> Outcome<Vec<Table>> {
    let m = ws(5.0, 1.0, 1.0);
    let b = BoundarySpec::new(-5.0, -9.25, 10.0)?;
    let w = OmegaWindow::default();
    let s_grid = linspace(0.0, 2.0, 401);
    let exact = sample_propagator(&m, &b, w, &QuadratureConfig::default())?;
    let lex = laplace_transform(&exact, &s_grid)?;
    let sets = [SaddleSet::Real, SaddleSet::RealCaustic, SaddleSet::RealCausticTopological];
    let mut models = Vec::new();
    for set in sets {
        let saddles = collect_saddles(&m, &b, set)?;
        models.push(laplace_transform(&sample_wkb(&b, w, &saddles)?, &s_grid)?);
    }
    let mut env = Table::new("fig16_laplace", &["s", "abs_l_exact", "abs_l_real", "abs_l_real_caustic", "abs_l_real_caustic_topological"]);
    for i in 0..s_grid.len() {
        env.push(row![s_grid[i], lex.transform[i].norm(), models[0].transform[i].norm(), models[1].transform[i].norm(), models[2].transform[i].norm()]);
    }
    let bound = residue_error_bound(&exact, &s_grid)?;
    let mut res = Table::new("fig16_residues", &["saddles", "residue", "error_bound"]);
    for (set, l) in sets.iter().zip(&models) {
        let mut acc = 0.0;
        for i in 1..s_grid.len() {
            let d = |k: usize| (lex.transform[k].norm() - l.transform[k].norm()).powi(2);
            acc += 0.5 * (s_grid[i] - s_grid[i - 1]) * (d(i - 1) + d(i));
        }
        res.push(row![set.name(), acc.sqrt(), bound]);
    }
    Ok(vec![env, res])
}

fn bands(prefix: &str, model: &StepModel, n_omega: usize, n_x1: usize) -> Outcome<Vec<Table>> {
    let w = OmegaWindow::new(1.0, 12.0, n_omega)?;
    let taus = w.grid(-20.0, 20.0);
    let cfg = QuadratureConfig::default();
    let mut out = Vec::new();
    for x0 in [-5.0, 5.0] {
        let tag = if x0 < 0.0 { "left" } else { "right" };
        let mut spectrum = Table::new(&format!("{prefix}_{tag}_spectrum"), &["x1", "tau", "value"]);
        let mut acts = Table::new(&format!("{prefix}_{tag}_actions"), &SADDLE_COLS);
        for x1 in linspace(-10.0, 10.0, n_x1) {
            let b = BoundarySpec::new(x0, x1, 10.0)?;
            let f = fourier_transform(&sample_propagator(model, &b, w, &cfg)?, &taus)?;
            for (t, v) in f.grid.iter().zip(&f.values) {
                spectrum.push(row![x1, *t, *v]);
            }
            if let Ok(saddles) = collect_saddles(model, &b, SaddleSet::RealCaustic) {
                for s in &saddles {
                    acts.push(saddle_row(x1, s));
                }
            }
        }
        out.push(spectrum);
        out.push(acts);
    }
    Ok(out)
}

fn fig17(res: usize) -> Outcome<Vec<Table>> {
    bands("fig17", &step(1.0, 1.0), 1024, res)
}

fn fig18(res: usize) -> Outcome<Vec<Table>> {
    bands("fig18", &ws(5.0, 1.0, 1.0), 256, (res / 2).max(5))
}

pub fn build(recipe: &str, res: usize) -> Outcome<Vec<Table>> {
    match recipe {
        "fig1" => fig1(),
        "fig2" => fig2(),
        "fig3" => fig3(res),
        "fig4" => fig4(res),
        "fig5" => fig5(),
        "fig6" => fig6(),
        "fig7" => fig7(res),
        "fig8" => fig8(),
        "fig9" => fig9(res),
        "fig10" => fig10(),
        "fig11" => fig11(res),
        "fig12" => fig12(),
        "fig13" => fig13(),
        "fig14" => fig14(),
        "fig15" => fig15(),
        "fig16" => fig16(),
        "fig17" => fig17(res),
        "fig18" => fig18(res),
        _ => Err(Failure::Validation(format!("unknown recipe {recipe:?}; expected one of {}", RECIPES.join(", ")))),
    }
}

fn gnuplot_stub(tables: &[Table]) -> String {
    let mut s = String::from("set datafile separator ','\nset key autotitle columnhead\n");
    for t in tables {
        let file = format!("{}.csv", t.name);
        if t.name.contains("_field_") {
            s += &format!("set title '{}'\nset view map\nsplot '{file}' using 1:2:5 with pm3d\npause -1\n", t.name);
        } else {
            let last = t.columns.len();
            s += &format!("set title '{}'\nplot for [c=2:{last}] '{file}' using 1:c with lines\npause -1\n", t.name);
        }
    }
    s
}

pub fn reproduce(args: &ReproduceArgs, meta: &Value, out: Option<&Path>) -> Outcome<()> {
    if !RECIPES.contains(&args.recipe.as_str()) {
        return Err(Failure::Validation(format!("unknown recipe {:?}; expected one of {}", args.recipe, RECIPES.join(", "))));
    }
    if args.resolution < 2 {
        return Err(Failure::Validation("--resolution must be at least 2".into()));
    }
    let dir = out.unwrap_or(&args.out_dir);
    std::fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))?;
    let tables = build(&args.recipe, args.resolution)?;
    let write = |name: &str, body: String| std::fs::write(dir.join(name), body).map_err(|e| Failure::Io(format!("{name}: {e}")));
    for t in &tables {
        write(&format!("{}.csv", t.name), t.to_csv())?;
    }
    let mut meta = meta.clone();
    meta["files"] = tables.iter().map(|t| format!("{}.csv", t.name)).collect();
    write(&format!("{}.meta.json", args.recipe), serde_json::to_string_pretty(&meta).expect("serialisable") + "\n")?;
    if args.gnuplot {
        write(&format!("{}.gp", args.recipe), gnuplot_stub(&tables))?;
    }
    Ok(())
}
