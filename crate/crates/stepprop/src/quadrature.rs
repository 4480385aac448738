//! Adaptive Gauss-Kronrod (G10/K21) quadrature for vector-valued complex
//! integrands on a real parameter interval.

use crate::error::{Error, Result};
use crate::specfun::C64;
use rayon::prelude::*;
use std::collections::BinaryHeap;

const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077600525452818,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

// Gauss weights for the odd-indexed Kronrod nodes (index 1, 3, ..., 9)
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

/// Node abscissae of one 21-point panel on [a, b].
pub fn panel_nodes(a: f64, b: f64) -> [f64; 21] {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut out = [0.0; 21];
    for j in 0..10 {
        out[2 * j] = c - h * XGK[j];
        out[2 * j + 1] = c + h * XGK[j];
    }
    out[20] = c;
    out
}

/// Kronrod weights matching [`panel_nodes`].
pub fn panel_weights(a: f64, b: f64) -> [f64; 21] {
    let h = 0.5 * (b - a);
    let mut out = [0.0; 21];
    for j in 0..10 {
        out[2 * j] = h * WGK[j];
        out[2 * j + 1] = h * WGK[j];
    }
    out[20] = h * WGK[10];
    out
}

#[derive(Debug, Clone)]
pub struct QuadResult {
    pub values: Vec<C64>,
    pub error: f64,
    pub n_evals: usize,
    /// largest integrand component seen at any node
    pub max_abs: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_evals: usize,
    pub initial_panels: usize,
    pub parallel: bool,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions { abs_tol: 1e-9, rel_tol: 1e-8, max_evals: 2_000_000, initial_panels: 4, parallel: false }
    }
}

struct Panel {
    a: f64,
    b: f64,
    kronrod: Vec<C64>,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn eval_panel<F>(f: &F, a: f64, b: f64, n: usize, parallel: bool) -> Result<(Panel, f64)>
where
    F: Fn(f64) -> Result<Vec<C64>> + Sync,
{
    let xs = panel_nodes(a, b);
    let vals: Vec<Vec<C64>> = if parallel {
        xs.par_iter().map(|&x| f(x)).collect::<Result<Vec<_>>>()?
    } else {
        xs.iter().map(|&x| f(x)).collect::<Result<Vec<_>>>()?
    };
    let h = 0.5 * (b - a);
    let mut kr = vec![C64::new(0.0, 0.0); n];
    let mut ga = vec![C64::new(0.0, 0.0); n];
    let mut max_abs = 0.0_f64;
    for (idx, v) in vals.iter().enumerate() {
        if v.len() != n {
            return Err(Error::Domain("integrand returned wrong length".into()));
        }
        let (wk, wg) = if idx == 20 {
            (WGK[10], 0.0)
        } else {
            let j = idx / 2;
            let wg = if j % 2 == 1 { WG[j / 2] } else { 0.0 };
            (WGK[j], wg)
        };
        for i in 0..n {
            let val = v[i];
            if !(val.re.is_finite() && val.im.is_finite()) {
                return Err(Error::NonConvergence { what: "quadrature", detail: format!("non-finite integrand at {}", xs[idx]) });
            }
            max_abs = max_abs.max(val.norm());
            kr[i] += val * (wk * h);
            if wg != 0.0 {
                ga[i] += val * (wg * h);
            }
        }
    }
    let error = kr.iter().zip(&ga).map(|(k, g)| (k - g).norm()).fold(0.0, f64::max);
    Ok((Panel { a, b, kronrod: kr, error }, max_abs))
}

/// Adaptive integration of a vector-valued integrand over [a, b].
pub fn integrate<F>(f: &F, a: f64, b: f64, n: usize, opts: &QuadOptions) -> Result<QuadResult>
where
    F: Fn(f64) -> Result<Vec<C64>> + Sync,
{
    let mut heap = BinaryHeap::new();
    let mut evals = 0usize;
    let mut max_abs = 0.0_f64;
    let np = opts.initial_panels.max(1);
    for j in 0..np {
        let pa = a + (b - a) * j as f64 / np as f64;
        let pb = a + (b - a) * (j + 1) as f64 / np as f64;
        let (p, m) = eval_panel(f, pa, pb, n, opts.parallel)?;
        evals += 21;
        max_abs = max_abs.max(m);
        heap.push(p);
    }
    loop {
        let mut total = vec![C64::new(0.0, 0.0); n];
        let mut err = 0.0;
        for p in heap.iter() {
            for i in 0..n {
                total[i] += p.kronrod[i];
            }
            err += p.error;
        }
        let scale = total.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if err <= opts.abs_tol.max(opts.rel_tol * scale) {
            return Ok(QuadResult { values: total, error: err, n_evals: evals, max_abs });
        }
        if evals + 42 > opts.max_evals {
            return Err(Error::NonConvergence {
                what: "quadrature",
                detail: format!("error estimate {err:e} above tolerance after {evals} evaluations"),
            });
        }
        let worst = heap.pop().expect("non-empty heap");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            return Err(Error::NonConvergence { what: "quadrature", detail: "panel underflow".into() });
        }
        let (p1, m1) = eval_panel(f, worst.a, mid, n, opts.parallel)?;
        let (p2, m2) = eval_panel(f, mid, worst.b, n, opts.parallel)?;
        evals += 42;
        max_abs = max_abs.max(m1).max(m2);
        heap.push(p1);
        heap.push(p2);
    }
}

/// Integration over [a, ∞) by consecutive panels of width `width`, stopping
/// once the integrand envelope stays below `envelope_tol` on at least
/// 50 consecutive nodes.
pub fn integrate_to_infinity<F>(f: &F, a: f64, width: f64, n: usize, envelope_tol: f64, opts: &QuadOptions) -> Result<QuadResult>
where
    F: Fn(f64) -> Result<Vec<C64>> + Sync,
{
    let mut total = vec![C64::new(0.0, 0.0); n];
    let mut err = 0.0;
    let mut evals = 0;
    let mut max_abs = 0.0_f64;
    let mut quiet_nodes = 0usize;
    let mut lo = a;
    let mut panels = 0;
    while quiet_nodes < 50 {
        panels += 1;
        if panels > 4000 || evals > opts.max_evals {
            return Err(Error::NonConvergence { what: "contour truncation", detail: format!("integrand not decayed at {lo}") });
        }
        let hi = lo + width;
        let sub = QuadOptions { initial_panels: 1, max_evals: opts.max_evals.saturating_sub(evals), ..*opts };
        let r = integrate(f, lo, hi, n, &sub)?;
        for i in 0..n {
            total[i] += r.values[i];
        }
        err += r.error;
        evals += r.n_evals;
        max_abs = max_abs.max(r.max_abs);
        if r.max_abs < envelope_tol {
            quiet_nodes += r.n_evals;
        } else {
            quiet_nodes = 0;
        }
        lo = hi;
    }
    Ok(QuadResult { values: total, error: err, n_evals: evals, max_abs })
}
