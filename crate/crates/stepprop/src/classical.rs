//! Classical and complex solutions of the two-point boundary-value problem
//! m ẍ = −V′(x), x(0) = x0, x(T) = x1, parametrised by the energy.
//!
//! For the Woods-Saxon step the time and the reduced action have closed
//! antiderivatives (integration constants chosen so both vanish at the
//! turning point):
//!
//! t(x) = √m/(√2 α) [F(w, E−V0) − F(w, E)],  s(x) = √(2m)/α [G(w, E−V0) − G(w, E)]
//!
//! with w = √(E − V(x)), F(w, c) = atanh(w/√c)/√c and G(w, c) = √c atanh(w/√c).
//! A direct path has T = ±(t(x1) − t(x0)); a path reflecting at the turning
//! point has T = −(t(x0) + t(x1)).

use crate::error::{Error, Result};
use crate::potential::{logistic, potential_value, Family, StepModel};
use crate::specfun::C64;
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySpec {
    pub x0: f64,
    pub x1: f64,
    pub t: f64,
}

impl BoundarySpec {
    pub fn new(x0: f64, x1: f64, t: f64) -> Result<Self> {
        if !(x0.is_finite() && x1.is_finite()) {
            return Err(Error::Domain("endpoints must be finite".into()));
        }
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::Domain(format!("T must be positive, got {t}")));
        }
        Ok(BoundarySpec { x0, x1, t })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SaddleKind {
    Direct,
    LowBounce,
    HighBounce,
    CausticSaddle,
    TopologicalSaddle,
}

impl SaddleKind {
    pub fn name(&self) -> &'static str {
        match self {
            SaddleKind::Direct => "direct",
            SaddleKind::LowBounce => "low_bounce",
            SaddleKind::HighBounce => "high_bounce",
            SaddleKind::CausticSaddle => "caustic",
            SaddleKind::TopologicalSaddle => "topological",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalSaddle {
    pub kind: SaddleKind,
    pub e: C64,
    pub s: C64,
    /// ∂²S/∂x0∂x1
    pub vv: C64,
    pub relevant: bool,
    /// the path turns around at a turning point
    pub reflected: bool,
    /// WKB amplitude is `sqrt_sign · √(i·vv/(2πℏ))` with the principal root
    pub sqrt_sign: C64,
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn real(x: f64) -> C64 {
    c(x, 0.0)
}

/// atanh(y) given y and 1 − y² (the latter computed without cancellation).
fn atanh_split(y: C64, ln_one_minus_y2: C64) -> C64 {
    let one = real(1.0);
    let (la, lb) = if (one + y).norm() >= (one - y).norm() {
        let l = (one + y).ln();
        (l, principal(ln_one_minus_y2 - l))
    } else {
        let l = (one - y).ln();
        (principal(ln_one_minus_y2 - l), l)
    };
    0.5 * (la - lb)
}

fn principal(l: C64) -> C64 {
    let tau = 2.0 * PI;
    let mut im = l.im - tau * (l.im / tau).round();
    if im <= -PI {
        im += tau;
    }
    c(l.re, im)
}

/// (ln V, ln(V0 − V)) at complex x, finite where V itself underflows.
fn ln_v_pair(model: &StepModel, x: C64) -> (C64, C64) {
    let y = x * (2.0 * model.alpha);
    // ln(1 + e^z) without overflow
    let lp = |z: C64| if z.re > 0.0 { z + (real(1.0) + (-z).exp()).ln() } else { (real(1.0) + z.exp()).ln() };
    let l0 = model.v0.ln();
    (real(l0) - lp(-y), real(l0) - lp(y))
}

/// Values at one endpoint: t, s, dt/dE and w = √(E−V).
#[derive(Debug, Clone, Copy)]
struct EndPoint {
    t: C64,
    s: C64,
    dt: C64,
    w: C64,
}

/// (V, V0 − V) at complex x without overflow.
fn v_pair(model: &StepModel, x: C64) -> Result<(C64, C64)> {
    if x.im == 0.0 {
        let v = model.v(x.re);
        return Ok((real(v), real(model.v0_minus_v(x.re))));
    }
    potential_value(model, x)?;
    let y = x * (2.0 * model.alpha);
    let v0 = model.v0;
    Ok(if y.re >= 0.0 {
        let e = (-y).exp();
        (v0 / (1.0 + e), v0 * e / (1.0 + e))
    } else {
        let e = y.exp();
        (v0 * e / (1.0 + e), v0 / (1.0 + e))
    })
}

fn ws_endpoint(model: &StepModel, e: C64, x: C64) -> Result<EndPoint> {
    let (v, _) = v_pair(model, x)?;
    let c1 = e - model.v0;
    let c2 = e;
    if c1.norm() == 0.0 || c2.norm() == 0.0 {
        return Err(Error::BranchDegenerate(format!("E = {e} coincides with 0 or V0")));
    }
    let w = (e - v).sqrt();
    // 1 − y² = (c − w²)/c with c − w² = V − V0 and V respectively
    let (q1, q2) = (c1.sqrt(), c2.sqrt());
    let (lv, lv0mv) = ln_v_pair(model, x);
    let a1 = atanh_split(w / q1, lv0mv + c(0.0, PI) - c1.ln());
    let a2 = atanh_split(w / q2, lv - c2.ln());
    let (f1, f2) = (a1 / q1, a2 / q2);
    let (g1, g2) = (a1 * q1, a2 * q2);
    let al = model.alpha;
    let pt = (model.m / 2.0).sqrt() / al;
    let ps = (2.0 * model.m).sqrt() / al;
    // ∂F/∂E = 1/(2wc) − F/(2c)
    let df = |f: C64, cc: C64| (w * cc * 2.0).inv() - f / (cc * 2.0);
    let dt = if w.norm() == 0.0 { c(f64::INFINITY, 0.0) } else { pt * (df(f1, c1) - df(f2, c2)) };
    Ok(EndPoint { t: pt * (f1 - f2), s: ps * (g1 - g2), dt, w })
}

fn free_endpoint(model: &StepModel, e: C64, x: C64) -> Result<EndPoint> {
    if e.norm() == 0.0 {
        return Err(Error::BranchDegenerate("E = 0 for the free particle".into()));
    }
    let w = e.sqrt();
    let m = model.m;
    let t = x * (m / 2.0).sqrt() / w;
    Ok(EndPoint { t, s: x * (2.0 * m).sqrt() * w, dt: -t / (e * 2.0), w })
}

fn endpoint(model: &StepModel, e: C64, x: C64) -> Result<EndPoint> {
    if model.is_free() {
        free_endpoint(model, e, x)
    } else if model.family == Family::WoodsSaxon {
        ws_endpoint(model, e, x)
    } else {
        Err(Error::Unsupported("closed-form time relation needs the smooth step"))
    }
}

/// Turning point (1/α) atanh((2E − V0)/V0), principal branch.
pub fn turning_point(model: &StepModel, e: C64) -> Result<C64> {
    model.validate()?;
    if model.family != Family::WoodsSaxon || model.is_free() {
        return Err(Error::Unsupported("turning point needs the smooth step"));
    }
    if e.norm() == 0.0 || (e - model.v0).norm() == 0.0 {
        return Err(Error::BranchDegenerate(format!("E = {e}")));
    }
    let y = (e * 2.0 - model.v0) / model.v0;
    // 1 − y² = 4E(V0 − E)/V0²
    Ok(atanh_split(y, (e * (real(model.v0) - e) * 4.0 / (model.v0 * model.v0)).ln()) / model.alpha)
}

/// t(x) with t(x_t) = 0.
pub fn time_of_flight(model: &StepModel, e: C64, x: C64) -> Result<C64> {
    model.validate()?;
    Ok(endpoint(model, e, x)?.t)
}

/// s(x) = ∫_{x_t}^x √(2m(E−V)) dx.
pub fn reduced_action(model: &StepModel, e: C64, x: C64) -> Result<C64> {
    model.validate()?;
    Ok(endpoint(model, e, x)?.s)
}

/// Path family of the energy parametrisation.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Route {
    /// monotone, sign of x1 − x0
    Direct(f64),
    Bounce,
}

#[derive(Debug, Clone, Copy)]
struct RouteEval {
    t: C64,
    s: C64,
    dt: C64,
    vv: C64,
}

fn eval_route(model: &StepModel, bvp: &BoundarySpec, e: C64, route: Route) -> Result<RouteEval> {
    let p0 = endpoint(model, e, real(bvp.x0))?;
    let p1 = endpoint(model, e, real(bvp.x1))?;
    let (t, s, dt, sigma) = match route {
        Route::Direct(dir) => (dir * (p1.t - p0.t), dir * (p1.s - p0.s), dir * (p1.dt - p0.dt), 1.0),
        Route::Bounce => (-(p0.t + p1.t), -(p0.s + p1.s), -(p0.dt + p1.dt), -1.0),
    };
    let m = model.m;
    let mom = (2.0 * m).sqrt();
    let vv = sigma * m * m / (p0.w * mom * p1.w * mom * dt);
    Ok(RouteEval { t, s: s - e * bvp.t, dt, vv })
}

fn check_divergence(dt: C64) -> Result<()> {
    if dt.norm() < 1e-12 {
        return Err(Error::CausticDivergence(dt.norm()));
    }
    Ok(())
}

/// Maslov-style phase for the real saddles: the amplitude carries
/// e^{−iνπ/2} with ν the number of focal points passed.
fn real_sqrt_sign(vv: f64, nu: i32) -> C64 {
    // √(i vv) = e^{iπ/4}√|vv| for vv > 0, e^{−iπ/4}√|vv| otherwise; the
    // target phase is −π/4 − νπ/2
    let base = if vv > 0.0 { PI / 4.0 } else { -PI / 4.0 };
    let target = -PI / 4.0 - nu as f64 * PI / 2.0;
    C64::from_polar(1.0, target - base)
}

/// Sign ±1 bringing arg(±√(i·vv)) closest to `phase`.
fn sign_towards(vv: C64, phase: f64) -> C64 {
    let a = (C64::i() * vv).sqrt().arg();
    let d = |x: f64| {
        let r = (x - phase).rem_euclid(2.0 * PI);
        r.min(2.0 * PI - r)
    };
    if d(a) <= d(a + PI) {
        real(1.0)
    } else {
        real(-1.0)
    }
}

// ---------------------------------------------------------------- real paths

/// Sample of the concatenated real-energy curve: direct branch from high E
/// down to V_max, then the bounce branch from V_max to V0.
#[derive(Debug, Clone, Copy)]
struct CurveNode {
    param: f64,
    e: f64,
    route: Route,
    f: f64,
}

fn real_time(model: &StepModel, bvp: &BoundarySpec, e: f64, route: Route) -> Result<f64> {
    Ok(eval_route(model, bvp, real(e), route)?.t.re)
}

struct CurveMap {
    vmax: f64,
    v0: f64,
    ln_hi: f64,
    ln_lo: f64,
    dir: f64,
}

const BOUNCE_U: f64 = 30.0;

impl CurveMap {
    fn new(model: &StepModel, bvp: &BoundarySpec) -> Self {
        let vmax = model.v(bvp.x0.max(bvp.x1));
        let span = (bvp.x1 - bvp.x0).abs() + 1.0;
        let e_hi = (50.0 * model.v0).max(100.0 * model.m * span * span / (bvp.t * bvp.t));
        let dir = if bvp.x1 >= bvp.x0 { 1.0 } else { -1.0 };
        CurveMap { vmax, v0: model.v0, ln_hi: e_hi.ln(), ln_lo: (1e-13 * model.v0.max(f64::MIN_POSITIVE)).ln(), dir }
    }

    /// param ∈ [0, 1] on the direct leg, [1, 2] on the bounce leg.
    fn at(&self, param: f64) -> (f64, Route) {
        if param <= 1.0 {
            let l = self.ln_hi + (self.ln_lo - self.ln_hi) * param;
            (self.vmax + l.exp(), Route::Direct(self.dir))
        } else {
            let u = -BOUNCE_U + 2.0 * BOUNCE_U * (param - 1.0);
            (self.vmax + (self.v0 - self.vmax) * logistic(u), Route::Bounce)
        }
    }
}

fn polish_real(model: &StepModel, bvp: &BoundarySpec, map: &CurveMap, lo: CurveNode, hi: CurveNode) -> Result<(f64, Route)> {
    let (mut a, mut b) = (lo, hi);
    for _ in 0..200 {
        let mid = 0.5 * (a.param + b.param);
        if mid <= a.param || mid >= b.param {
            break;
        }
        let (e, route) = map.at(mid);
        let f = real_time(model, bvp, e, route)? - bvp.t;
        let node = CurveNode { param: mid, e, route, f };
        if (f > 0.0) == (a.f > 0.0) {
            a = node;
        } else {
            b = node;
        }
        if (a.e - b.e).abs() <= 1e-15 * a.e.abs().max(1e-300) {
            break;
        }
    }
    let best = if a.f.abs() <= b.f.abs() { a } else { b };
    // Newton polish on E when the bracket allows it
    let (mut e, route) = (best.e, best.route);
    let (lo_e, hi_e) = (a.e.min(b.e), a.e.max(b.e));
    for _ in 0..8 {
        let r = eval_route(model, bvp, real(e), route)?;
        let f = r.t.re - bvp.t;
        if f.abs() <= 1e-13 * bvp.t || !r.dt.re.is_finite() || r.dt.re == 0.0 {
            break;
        }
        let next = e - f / r.dt.re;
        if !(next >= lo_e && next <= hi_e) {
            break;
        }
        e = next;
    }
    Ok((e, route))
}

fn make_real_saddle(model: &StepModel, bvp: &BoundarySpec, e: f64, route: Route, kind: SaddleKind) -> Result<ClassicalSaddle> {
    let r = eval_route(model, bvp, real(e), route)?;
    check_divergence(r.dt)?;
    let vv = r.vv.re;
    let nu = match kind {
        SaddleKind::Direct => 0,
        SaddleKind::LowBounce => 1,
        _ => 2,
    };
    Ok(ClassicalSaddle {
        kind,
        e: real(e),
        s: real(r.s.re),
        vv: real(vv),
        relevant: true,
        reflected: route == Route::Bounce,
        sqrt_sign: real_sqrt_sign(vv, nu),
    })
}

/// The T(E) table scanned for real roots (kept for error reports).
fn scan_curve(model: &StepModel, bvp: &BoundarySpec, map: &CurveMap) -> Result<Vec<CurveNode>> {
    let n_direct = 1200;
    let n_bounce = 1200;
    let mut nodes = Vec::with_capacity(n_direct + n_bounce);
    for j in 0..=n_direct {
        let param = j as f64 / n_direct as f64;
        let (e, route) = map.at(param);
        let f = real_time(model, bvp, e, route)? - bvp.t;
        nodes.push(CurveNode { param, e, route, f });
    }
    if model.v0 > map.vmax {
        for j in 1..=n_bounce {
            let param = 1.0 + j as f64 / n_bounce as f64;
            let (e, route) = map.at(param);
            if !(e < model.v0) {
                break;
            }
            let f = real_time(model, bvp, e, route)? - bvp.t;
            if f.is_finite() {
                nodes.push(CurveNode { param, e, route, f });
            }
        }
    }
    Ok(nodes)
}

/// All real solutions: one or three.
pub fn solve_real_paths(model: &StepModel, bvp: &BoundarySpec) -> Result<Vec<ClassicalSaddle>> {
    model.validate()?;
    if model.family == Family::Heaviside || model.is_free() {
        return heaviside_paths(model, bvp);
    }
    let map = CurveMap::new(model, bvp);
    let nodes = scan_curve(model, bvp, &map)?;
    let mut roots = Vec::new();
    for pair in nodes.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if a.f == 0.0 || (a.f > 0.0) != (b.f > 0.0) {
            let (lo, hi) = if a.f == 0.0 { (a, a) } else { (a, b) };
            roots.push(if lo.param == hi.param { (lo.e, lo.route) } else { polish_real(model, bvp, &map, lo, hi)? });
        }
    }
    if roots.is_empty() {
        return Err(Error::RootNotBracketed { table: nodes.iter().map(|n| (n.e, n.f + bvp.t)).collect() });
    }
    let kinds: Vec<SaddleKind> = if roots.len() >= 3 {
        let mut k = vec![SaddleKind::Direct, SaddleKind::LowBounce, SaddleKind::HighBounce];
        k.resize(roots.len(), SaddleKind::HighBounce);
        k
    } else if roots.len() == 1 {
        let (e, route) = roots[0];
        // single root on the rising bounce leg is the lingering path
        let rising = route == Route::Bounce && eval_route(model, bvp, real(e), route)?.dt.re > 0.0;
        vec![if rising && bvp.x0 != bvp.x1 { SaddleKind::HighBounce } else { SaddleKind::Direct }]
    } else {
        // tangency at a fold: a double root resolved on the grid
        vec![SaddleKind::LowBounce, SaddleKind::HighBounce]
    };
    roots
        .iter()
        .zip(kinds)
        .map(|(&(e, route), kind)| make_real_saddle(model, bvp, e, route, kind))
        .collect()
}

/// Closed-form real paths of the Heaviside step (and the free particle).
pub fn heaviside_paths(model: &StepModel, bvp: &BoundarySpec) -> Result<Vec<ClassicalSaddle>> {
    model.validate()?;
    if model.family != Family::Heaviside && !model.is_free() {
        return Err(Error::Unsupported("closed-form paths exist for the Heaviside step only"));
    }
    let (m, v0, t) = (model.m, model.v0, bvp.t);
    let (x0, x1) = (bvp.x0, bvp.x1);
    let free = |shift: f64| {
        let d = x1 - x0;
        let vv = -m / t;
        ClassicalSaddle {
            kind: SaddleKind::Direct,
            e: real(shift + m * d * d / (2.0 * t * t)),
            s: real(m * d * d / (2.0 * t) - shift * t),
            vv: real(vv),
            relevant: true,
            reflected: false,
            sqrt_sign: real_sqrt_sign(vv, 0),
        }
    };
    if model.is_free() {
        return Ok(vec![free(0.0)]);
    }
    let left = |x: f64| x <= 0.0;
    let mut out = Vec::new();
    match (left(x0), left(x1)) {
        (true, true) => {
            out.push(free(0.0));
            let sum = x0.abs() + x1.abs();
            let vc = (2.0 * v0 / m).sqrt();
            if sum < vc * t {
                let vv = m / t;
                out.push(ClassicalSaddle {
                    kind: SaddleKind::LowBounce,
                    e: real(m * sum * sum / (2.0 * t * t)),
                    s: real(m * sum * sum / (2.0 * t)),
                    vv: real(vv),
                    relevant: true,
                    reflected: true,
                    sqrt_sign: real_sqrt_sign(vv, 2),
                });
                out.push(ClassicalSaddle {
                    kind: SaddleKind::HighBounce,
                    e: real(v0),
                    s: real((2.0 * m * v0).sqrt() * sum - v0 * t),
                    vv: real(0.0),
                    relevant: true,
                    reflected: true,
                    sqrt_sign: real(1.0),
                });
            }
        }
        (false, false) => out.push(free(v0)),
        _ => {
            let (dl, dr) = if left(x0) { (x0.abs(), x1.abs()) } else { (x1.abs(), x0.abs()) };
            // T(E) = dl·√(m/2E) + dr·√(m/2(E−V0)), decreasing on (V0, ∞)
            let time = |e: f64| dl * (m / (2.0 * e)).sqrt() + dr * (m / (2.0 * (e - v0))).sqrt();
            let (mut lo, mut hi) = (v0, 2.0 * v0);
            while time(hi) > t {
                lo = hi;
                hi = v0 + 2.0 * (hi - v0);
            }
            if dr == 0.0 {
                // endpoint on the step edge: free motion on the left
                hi = m * dl * dl / (2.0 * t * t);
                lo = hi;
            }
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if time(mid) > t {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let e = 0.5 * (lo + hi);
            let (pl, pr) = ((2.0 * m * e).sqrt(), (2.0 * m * (e - v0).max(0.0)).sqrt());
            let te = -m * m * (dl / pl.powi(3) + if dr > 0.0 { dr / pr.powi(3) } else { 0.0 });
            let (p0, p1) = if left(x0) { (pl, pr) } else { (pr, pl) };
            let vv = m * m / (p0 * p1 * te);
            out.push(ClassicalSaddle {
                kind: SaddleKind::Direct,
                e: real(e),
                s: real(pl * dl + pr * dr - e * t),
                vv: real(vv),
                relevant: true,
                reflected: false,
                sqrt_sign: real_sqrt_sign(vv, 0),
            });
        }
    }
    Ok(out)
}

/// ∂²S/∂x0∂x1 by implicit differentiation of the time relation at fixed T.
pub fn van_vleck(model: &StepModel, saddle: &ClassicalSaddle, bvp: &BoundarySpec) -> Result<C64> {
    model.validate()?;
    if model.family == Family::Heaviside && !model.is_free() {
        return Ok(saddle.vv);
    }
    let route = if saddle.reflected { Route::Bounce } else { Route::Direct(if bvp.x1 >= bvp.x0 { 1.0 } else { -1.0 }) };
    let mut e = saddle.e;
    if saddle.kind == SaddleKind::TopologicalSaddle {
        e = topological_energy_shift(model, e.re);
    }
    let r = eval_route(model, bvp, e, route)?;
    check_divergence(r.dt)?;
    Ok(if saddle.kind == SaddleKind::TopologicalSaddle { real(r.vv.re) } else { r.vv })
}

// ------------------------------------------------------------ complex saddles

/// Newton-iteration log/sqrt arguments whose crossing of the negative real
/// axis signals a principal-branch jump.
fn branch_args(model: &StepModel, bvp: &BoundarySpec, e: C64) -> Result<Vec<C64>> {
    let mut out = vec![e, e - model.v0];
    for x in [bvp.x0, bvp.x1] {
        let (v, _) = v_pair(model, real(x))?;
        let w = (e - v).sqrt();
        out.push(e - v);
        for q in [(e - model.v0).sqrt(), e.sqrt()] {
            let y = w / q;
            out.push(real(1.0) + y);
            out.push(real(1.0) - y);
        }
    }
    Ok(out)
}

fn crosses_cut(a: C64, b: C64) -> bool {
    if a.im == 0.0 || b.im == 0.0 || (a.im > 0.0) == (b.im > 0.0) {
        return false;
    }
    let s = a.im / (a.im - b.im);
    a.re + s * (b.re - a.re) < 0.0
}

/// Damped Newton on T_bounce(E) = target with step rejection at branch cuts.
fn newton_bounce(model: &StepModel, bvp: &BoundarySpec, seed: C64, target: f64) -> Result<C64> {
    let mut e = seed;
    let mut r = eval_route(model, bvp, e, Route::Bounce)?;
    let mut f = r.t - target;
    for _ in 0..200 {
        if f.norm() <= 1e-12 * target.max(1.0) {
            return Ok(e);
        }
        check_divergence(r.dt)?;
        let step = -f / r.dt;
        let args = branch_args(model, bvp, e)?;
        let mut lambda = 1.0;
        let mut accepted = false;
        let mut jumped = false;
        while lambda > 1e-10 {
            let cand = e + step * lambda;
            let cand_args = branch_args(model, bvp, cand);
            let crossing = match &cand_args {
                Ok(ca) => args.iter().zip(ca).any(|(&a, &b)| crosses_cut(a, b)),
                Err(_) => true,
            };
            if crossing {
                jumped = true;
                lambda *= 0.5;
                continue;
            }
            if let Ok(rc) = eval_route(model, bvp, cand, Route::Bounce) {
                let fc = rc.t - target;
                if fc.norm().is_finite() && fc.norm() < f.norm() * (1.0 - 1e-4 * lambda) {
                    e = cand;
                    r = rc;
                    f = fc;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            if f.norm() <= 1e-9 * target.max(1.0) {
                return Ok(e);
            }
            if jumped {
                return Err(Error::BranchJump(format!("Newton step from E = {e} crosses a branch cut")));
            }
            return Err(Error::NonConvergence { what: "complex saddle Newton", detail: format!("stalled at E = {e}, |f| = {:e}", f.norm()) });
        }
    }
    Err(Error::NonConvergence { what: "complex saddle Newton", detail: format!("no convergence from seed {seed}") })
}

fn complex_saddle_from(model: &StepModel, bvp: &BoundarySpec, e: C64, phase: f64) -> Result<ClassicalSaddle> {
    let r = eval_route(model, bvp, e, Route::Bounce)?;
    check_divergence(r.dt)?;
    Ok(ClassicalSaddle {
        kind: SaddleKind::CausticSaddle,
        e,
        s: r.s,
        vv: r.vv,
        relevant: true,
        reflected: true,
        sqrt_sign: sign_towards(r.vv, phase),
    })
}

/// Complex-energy bounce saddle reached by Newton iteration from `seed`.
/// The square-root branch is the one nearest the fold phase −π; the
/// `relevant` flag is left true and is assigned by the Stokes test in
/// [`crate::caustics::relevance_flag`].
pub fn caustic_saddle(model: &StepModel, bvp: &BoundarySpec, seed: C64) -> Result<ClassicalSaddle> {
    model.validate()?;
    if model.family != Family::WoodsSaxon || model.is_free() {
        return Err(Error::Unsupported("complex Newton needs the smooth step"));
    }
    let e = newton_bounce(model, bvp, seed, bvp.t)?;
    complex_saddle_from(model, bvp, e, -PI)
}

/// Minimum of the real bounce time over (V_max, V0): (E*, T_min, T''(E*)).
fn bounce_minimum(model: &StepModel, bvp: &BoundarySpec) -> Result<(f64, f64, f64)> {
    let map = CurveMap::new(model, bvp);
    let at = |u: f64| map.vmax + (map.v0 - map.vmax) * logistic(u);
    let f = |u: f64| real_time(model, bvp, at(u), Route::Bounce);
    let n = 600;
    let mut best = (0, f64::INFINITY);
    for j in 0..=n {
        let u = -BOUNCE_U + 2.0 * BOUNCE_U * j as f64 / n as f64;
        // nodes rounding onto V0 or V_max carry no information
        let v = f(u).unwrap_or(f64::INFINITY);
        if v < best.1 {
            best = (j, v);
        }
    }
    if best.0 == 0 || best.0 == n {
        return Err(Error::NoSolution("bounce time has no interior minimum".into()));
    }
    let h = 2.0 * BOUNCE_U / n as f64;
    let (mut a, mut b) = (-BOUNCE_U + h * (best.0 - 1) as f64, -BOUNCE_U + h * (best.0 + 1) as f64);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut x1, mut x2) = (b - g * (b - a), a + g * (b - a));
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    for _ in 0..200 {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2)?;
        }
        if (b - a).abs() < 1e-12 {
            break;
        }
    }
    let u = 0.5 * (a + b);
    let e = at(u);
    let tmin = f(u)?;
    // curvature in E from a centred difference on dT/dE
    let de = 1e-4 * (map.v0 - e).min(e - map.vmax).max(1e-14);
    let d = |ee: f64| -> Result<f64> { Ok(eval_route(model, bvp, real(ee), Route::Bounce)?.dt.re) };
    let curv = (d(e + de)? - d(e - de)?) / (2.0 * de);
    Ok((e, tmin, curv))
}

/// Complex caustic saddle located by continuation in T from the fold of the
/// bounce branch (where it is born from the merging real pair) down to the
/// requested time, with the square-root branch tracked along the way.
pub fn find_caustic_saddle(model: &StepModel, bvp: &BoundarySpec) -> Result<ClassicalSaddle> {
    let mut s = caustic_saddle_unflagged(model, bvp)?;
    s.relevant = crate::caustics::relevance_with(model, bvp, &s)?;
    Ok(s)
}

pub(crate) fn caustic_saddle_unflagged(model: &StepModel, bvp: &BoundarySpec) -> Result<ClassicalSaddle> {
    model.validate()?;
    if model.family == Family::Heaviside && !model.is_free() {
        return heaviside_reflection_saddle(model, bvp);
    }
    if model.is_free() {
        return Err(Error::NoSolution("free particle has no caustic".into()));
    }
    let (e_star, tmin, curv) = bounce_minimum(model, bvp)?;
    if bvp.t >= tmin {
        return Err(Error::InsideCaustic);
    }
    if !(curv > 0.0) {
        return Err(Error::NoSolution("bounce minimum is degenerate".into()));
    }
    // T(E) ≈ T_min + ½T''(E−E*)² ⇒ E ≈ E* + i√(2(T_min−T')/T'')
    let gap = tmin - bvp.t;
    let steps = ((gap / tmin) * 400.0).ceil().clamp(8.0, 400.0) as usize;
    let mut e = C64::new(e_star, 0.0);
    let mut phase = -PI;
    let mut last: Option<ClassicalSaddle> = None;
    for j in 1..=steps {
        let tt = tmin - gap * j as f64 / steps as f64;
        let g = tmin - tt;
        let seed = if j == 1 {
            e + C64::new(0.0, (2.0 * g / curv).sqrt())
        } else {
            // first-order predictor dE/dT = 1/T_E
            let r = eval_route(model, bvp, e, Route::Bounce)?;
            e - (gap / steps as f64) / r.dt
        };
        let step_bvp = BoundarySpec { t: tt, ..*bvp };
        e = newton_bounce(model, &step_bvp, seed, tt)?;
        let s = complex_saddle_from(model, &step_bvp, e, phase)?;
        phase = (C64::i() * s.vv).sqrt().arg() + if s.sqrt_sign.re < 0.0 { PI } else { 0.0 };
        last = Some(s);
    }
    let mut s = last.expect("at least one continuation step");
    s.e = e;
    Ok(s)
}

/// Heaviside analogue of the caustic saddle: the reflected ray with E above
/// the step (outside the triangle) or reflecting from the right.
fn heaviside_reflection_saddle(model: &StepModel, bvp: &BoundarySpec) -> Result<ClassicalSaddle> {
    let (m, v0, t) = (model.m, model.v0, bvp.t);
    let (x0, x1) = (bvp.x0, bvp.x1);
    let sum = x0.abs() + x1.abs();
    let vv = m / t;
    let (e, s) = if x0 <= 0.0 && x1 <= 0.0 {
        if sum < (2.0 * v0 / m).sqrt() * t {
            return Err(Error::InsideCaustic);
        }
        (m * sum * sum / (2.0 * t * t), m * sum * sum / (2.0 * t))
    } else {
        (v0 + m * sum * sum / (2.0 * t * t), m * sum * sum / (2.0 * t) - v0 * t)
    };
    Ok(ClassicalSaddle {
        kind: SaddleKind::CausticSaddle,
        e: real(e),
        s: real(s),
        vv: real(vv),
        relevant: x0 * x1 >= 0.0,
        reflected: true,
        sqrt_sign: real_sqrt_sign(vv, 2),
    })
}

// ------------------------------------------------------- topological saddle

const TOP_EPS: f64 = 1e-12;

fn topological_energy_shift(model: &StepModel, e: f64) -> C64 {
    real(e.max(model.v0 * (1.0 + TOP_EPS)))
}

/// Re T of the reflecting route continued to real E > V0.
fn topological_time(model: &StepModel, bvp: &BoundarySpec, e: f64) -> Result<f64> {
    real_time(model, bvp, topological_energy_shift(model, e).re, Route::Bounce)
}

fn topological_from(model: &StepModel, bvp: &BoundarySpec, e: f64) -> Result<ClassicalSaddle> {
    let r = eval_route(model, bvp, topological_energy_shift(model, e), Route::Bounce)?;
    let im = PI * (2.0 * model.m * (e - model.v0).max(0.0)).sqrt() / (2.0 * model.alpha);
    let vv = real(r.vv.re);
    Ok(ClassicalSaddle {
        kind: SaddleKind::TopologicalSaddle,
        e: real(e),
        s: c(r.s.re, im),
        vv,
        relevant: true,
        reflected: true,
        sqrt_sign: real(-1.0),
    })
}

/// Real-energy reflecting saddle above the step: Re T(E) = T for E > V0,
/// Im S = π√(2m(E−V0))/(2α).
pub fn topological_saddle(model: &StepModel, bvp: &BoundarySpec) -> Result<ClassicalSaddle> {
    model.validate()?;
    if model.family != Family::WoodsSaxon || model.is_free() {
        return Err(Error::Unsupported("topological saddle needs the smooth step"));
    }
    let v0 = model.v0;
    let t_thr = topological_time(model, bvp, v0)?;
    if t_thr < bvp.t {
        return Err(Error::NoSolution(format!(
            "minimum-energy condition fails: Re T(V0+) = {t_thr} < T = {}",
            bvp.t
        )));
    }
    // Re T decreases from its threshold value towards 0 as E → ∞
    let (mut lo, mut hi) = (v0, 2.0 * v0);
    let mut guard = 0;
    while topological_time(model, bvp, hi)? > bvp.t {
        lo = hi;
        hi = v0 + 2.0 * (hi - v0);
        guard += 1;
        if guard > 200 {
            return Err(Error::NoSolution("topological time does not fall below T".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if topological_time(model, bvp, mid)? > bvp.t {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    topological_from(model, bvp, 0.5 * (lo + hi))
}

/// The topological saddle, or its threshold member E = V0 (real action)
/// when the minimum-energy condition fails near the caustic.
pub fn topological_saddle_or_threshold(model: &StepModel, bvp: &BoundarySpec) -> Result<ClassicalSaddle> {
    match topological_saddle(model, bvp) {
        Err(Error::NoSolution(_)) => topological_from(model, bvp, model.v0),
        other => other,
    }
}

/// Real matching point a with Re t(a) = 0 for a reflecting path at E > V0.
pub fn matching_point(model: &StepModel, e: f64) -> Result<f64> {
    model.validate()?;
    if model.family != Family::WoodsSaxon || !(e > model.v0) {
        return Err(Error::Domain("matching point needs the smooth step and E > V0".into()));
    }
    let f = |x: f64| -> Result<f64> { Ok(endpoint(model, real(e), real(x))?.t.re) };
    let scale = 1.0 / model.alpha;
    let (mut lo, mut hi) = (-scale, scale);
    let mut n = 0;
    while (f(lo)? > 0.0) == (f(hi)? > 0.0) {
        lo *= 2.0;
        hi *= 2.0;
        n += 1;
        if n > 40 {
            return Err(Error::NoSolution("Re t(x) has no real zero".into()));
        }
    }
    let flo = f(lo)?;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid)? > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Time and action of the reflecting route at (complex) E, for diagnostics
/// such as T(E) curves.
pub fn bounce_relation(model: &StepModel, bvp: &BoundarySpec, e: C64) -> Result<(C64, C64)> {
    model.validate()?;
    let r = eval_route(model, bvp, e, Route::Bounce)?;
    Ok((r.t, r.s))
}

/// Time and action of the monotone route at (complex) E.
pub fn direct_relation(model: &StepModel, bvp: &BoundarySpec, e: C64) -> Result<(C64, C64)> {
    model.validate()?;
    let dir = if bvp.x1 >= bvp.x0 { 1.0 } else { -1.0 };
    let r = eval_route(model, bvp, e, Route::Direct(dir))?;
    Ok((r.t, r.s))
}
