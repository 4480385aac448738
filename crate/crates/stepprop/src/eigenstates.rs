//! Scattering eigenstates of the step potentials, their asymptotics,
//! reflection/transmission amplitudes and the orthonormal basis.

use crate::error::{Error, Result};
use crate::potential::{logistic, softplus, Family, StepModel};
use crate::specfun::{hyp2f1_split, log_gamma, C64};
use std::f64::consts::PI;

/// Beyond |αx| > X_ASYM the plane-wave asymptotics replace the closed form.
pub const X_ASYM: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    C,
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumSpec {
    pub k: f64,
    pub e: f64,
    pub p: C64,
    pub mu: f64,
}

impl MomentumSpec {
    pub fn new(model: &StepModel, k: f64) -> Self {
        let d = k * k - 2.0 * model.m * model.v0;
        let p = C64::new(d, 0.0).sqrt();
        let mu = if d < 0.0 { (-d).sqrt() } else { 0.0 };
        MomentumSpec { k, e: k * k / (2.0 * model.m), p, mu }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterAmplitudes {
    pub r: C64,
    pub t: C64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizationCoeffs {
    /// defined below the step
    pub ncc: Option<f64>,
    /// defined above the step
    pub npp: Option<f64>,
    pub npm: Option<C64>,
    /// Npp + |Npm| and Npp − |Npm| in factorized form
    pub sum_plus: Option<f64>,
    pub sum_minus: Option<f64>,
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// e^w − 1 for complex w without cancellation.
pub(crate) fn expm1(w: C64) -> C64 {
    if w.norm() < 1e-3 {
        w * (1.0 + w * (0.5 + w * (1.0 / 6.0 + w / 24.0)))
    } else {
        w.exp() - 1.0
    }
}

/// ln sinh z for Re z > 0 (branch modulo 2πi).
pub(crate) fn ln_sinh(z: C64) -> C64 {
    let zz = if z.re < 0.0 { -z } else { z };
    let v = zz + (-expm1(-2.0 * zz)).ln() - std::f64::consts::LN_2;
    if z.re < 0.0 {
        v + c(0.0, PI)
    } else {
        v
    }
}

fn lg(z: C64) -> Result<C64> {
    log_gamma(z)
}

/// One closed-form Woods-Saxon solution φ_λ with φ_λ ~ e^{λx/ℏ} as x → +∞.
///
/// φ_λ(x) = 2^{−β} e^{(ik+λ)x/(2ℏ)} sech(αx)^β ₂F₁(1+β, β; 1−λ/(αℏ); 1/(1+e^{2αx}))
/// with β = (ik − λ)/(2αℏ). λ = ip, −ip, −μ gives φ⁺, φ⁻, φᶜ.
#[derive(Debug, Clone)]
pub(crate) struct WsWave {
    k: C64,
    lambda: C64,
    alpha: f64,
    hbar: f64,
    beta: C64,
    a: C64,
    b: C64,
    cc: C64,
    ln_left_in: C64,
    ln_left_out: C64,
}

impl WsWave {
    pub(crate) fn new(model: &StepModel, k: C64, lambda: C64) -> Self {
        let ah = model.alpha * model.hbar;
        let beta = (C64::i() * k - lambda) / (2.0 * ah);
        let one = c(1.0, 0.0);
        let a = one + beta;
        let b = beta;
        let cc = one - lambda / ah;
        let ik = C64::i() * k / ah;
        let ratio = |num: [C64; 2], den: [C64; 2]| -> C64 {
            let mut acc = c(0.0, 0.0);
            for d in den {
                match lg(d) {
                    Ok(v) => acc -= v,
                    Err(_) => return c(f64::NEG_INFINITY, 0.0),
                }
            }
            for n in num {
                match lg(n) {
                    Ok(v) => acc += v,
                    Err(_) => return c(f64::NAN, f64::NAN),
                }
            }
            acc
        };
        let ln_left_in = ratio([cc, -ik], [cc - a, cc - b]);
        let ln_left_out = ratio([cc, ik], [a, b]);
        WsWave { k, lambda, alpha: model.alpha, hbar: model.hbar, beta, a, b, cc, ln_left_in, ln_left_out }
    }

    pub(crate) fn asymptotic(&self, x: f64, side: Side) -> C64 {
        let i = C64::i();
        match side {
            Side::Right => (self.lambda * x / self.hbar).exp(),
            Side::Left => {
                let mut v = c(0.0, 0.0);
                if self.ln_left_in.re.is_finite() || self.ln_left_in.re.is_nan() {
                    v += (self.ln_left_in + i * self.k * x / self.hbar).exp();
                }
                if self.ln_left_out.re.is_finite() || self.ln_left_out.re.is_nan() {
                    v += (self.ln_left_out - i * self.k * x / self.hbar).exp();
                }
                v
            }
        }
    }

    pub(crate) fn eval(&self, x: f64) -> Result<C64> {
        let y = self.alpha * x;
        if y > X_ASYM {
            return Ok(self.asymptotic(x, Side::Right));
        }
        if y < -X_ASYM {
            return Ok(self.asymptotic(x, Side::Left));
        }
        let z = logistic(-2.0 * y);
        let w = logistic(2.0 * y);
        let ln_w = -softplus(-2.0 * y);
        let f = hyp2f1_split(self.a, self.b, self.cc, z, w, ln_w)?;
        let ln_sech2 = y.abs() + softplus(-2.0 * y.abs());
        let ln_pref = -self.beta * ln_sech2 + (C64::i() * self.k + self.lambda) * x / (2.0 * self.hbar);
        Ok(ln_pref.exp() * f)
    }
}

fn require_ws(model: &StepModel) -> Result<()> {
    model.validate()?;
    if model.family != Family::WoodsSaxon {
        return Err(Error::Unsupported("heaviside"));
    }
    Ok(())
}

fn branch_lambda(model: &StepModel, branch: Branch, k: f64) -> Result<C64> {
    let kth = model.k_threshold();
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::Domain(format!("momentum must be positive, got {k}")));
    }
    let ms = MomentumSpec::new(model, k);
    match branch {
        Branch::C => {
            if k >= kth {
                return Err(Error::Domain(format!("branch c requires k < {kth}, got {k}")));
            }
            Ok(c(-ms.mu, 0.0))
        }
        Branch::Plus | Branch::Minus => {
            if k <= kth {
                return Err(Error::Domain(format!("branches ± require k > {kth}, got {k}")));
            }
            let ip = C64::i() * ms.p.re;
            Ok(if branch == Branch::Plus { ip } else { -ip })
        }
    }
}

/// Unnormalized Woods-Saxon eigenstate φᶜ, φ⁺ or φ⁻.
pub fn eigenstate_ws(model: &StepModel, branch: Branch, k: f64, x: f64) -> Result<C64> {
    require_ws(model)?;
    let lambda = branch_lambda(model, branch, k)?;
    WsWave::new(model, c(k, 0.0), lambda).eval(x)
}

/// Plane-wave/evanescent asymptotic form of [`eigenstate_ws`].
pub fn eigenstate_ws_asymptotic(model: &StepModel, branch: Branch, k: f64, x: f64, side: Side) -> Result<C64> {
    require_ws(model)?;
    let lambda = branch_lambda(model, branch, k)?;
    Ok(WsWave::new(model, c(k, 0.0), lambda).asymptotic(x, side))
}

/// Reflection and transmission amplitudes for k above the threshold.
pub fn scatter_amplitudes(model: &StepModel, k: f64) -> Result<ScatterAmplitudes> {
    model.validate()?;
    let kth = model.k_threshold();
    if !(k >= kth && k > 0.0) {
        return Err(Error::Domain(format!("energy below the step: k = {k} < {kth}")));
    }
    let p = (k * k - kth * kth).max(0.0).sqrt();
    if model.family == Family::Heaviside || model.is_free() {
        return Ok(ScatterAmplitudes { r: c((k - p) / (k + p), 0.0), t: c(2.0 * (k * p).sqrt() / (k + p), 0.0) });
    }
    let ah = model.alpha * model.hbar;
    let i = C64::i();
    let one = c(1.0, 0.0);
    let g_k = lg(one + i * k / ah)?;
    let g_kp = lg(one - i * (k + p) / (2.0 * ah))?;
    let ln_r = g_k + 2.0 * g_kp - lg(one - i * k / ah)? - 2.0 * lg(one + i * (k - p) / (2.0 * ah))?;
    let r = if k == p { c(0.0, 0.0) } else { ln_r.exp() * ((k - p) / (k + p)) };
    let t = if p == 0.0 {
        c(0.0, 0.0)
    } else {
        let ln_sh = ln_sinh(c(PI * k / ah, 0.0));
        let ln_t = c((2.0 * ah).ln() + 0.5 * (p / k).ln() - (k + p).ln() - PI.ln(), 0.0) + ln_sh + g_k + 2.0 * g_kp
            - lg(one - i * p / ah)?;
        ln_t.exp()
    };
    Ok(ScatterAmplitudes { r, t })
}

/// (|R|², |T|²) from the sinh-ratio closed forms (Woods-Saxon) or the
/// Heaviside closed forms.
pub fn rates(model: &StepModel, k: f64) -> Result<(f64, f64)> {
    model.validate()?;
    let kth = model.k_threshold();
    if !(k >= kth && k > 0.0) {
        return Err(Error::Domain(format!("energy below the step: k = {k} < {kth}")));
    }
    let p = (k * k - kth * kth).max(0.0).sqrt();
    if model.family == Family::Heaviside || model.is_free() {
        let r = (k - p) / (k + p);
        return Ok((r * r, 4.0 * k * p / ((k + p) * (k + p))));
    }
    let s = PI / (2.0 * model.alpha * model.hbar);
    let u = s * (k - p);
    let v = s * (k + p);
    // sinh u / sinh v = e^{u−v} (1 − e^{−2u}) / (1 − e^{−2v})
    let ratio = (u - v).exp() * (-(-2.0 * u).exp_m1()) / (-(-2.0 * v).exp_m1());
    let r2 = ratio * ratio;
    let t2 = (-(-4.0 * s * k).exp_m1()) * (-(-4.0 * s * p).exp_m1()) / ((-(-2.0 * v).exp_m1()).powi(2));
    Ok((r2, t2))
}

/// Small-ℏ asymptote e^{−2πp/(αℏ)} of |R|² and the action S_I = iπ√(2m(E−V0))/α.
pub fn reflection_rate_smallhbar_asymptote(model: &StepModel, k: f64) -> Result<(f64, C64)> {
    require_ws(model)?;
    let kth = model.k_threshold();
    if k < kth {
        return Err(Error::Domain(format!("energy below the step: k = {k} < {kth}")));
    }
    let p = (k * k - kth * kth).sqrt();
    Ok(((-2.0 * PI * p / (model.alpha * model.hbar)).exp(), c(0.0, PI * p / model.alpha)))
}

/// Woods-Saxon normalization helpers, analytic in complex k.
pub(crate) struct WsNorm;

impl WsNorm {
    pub(crate) fn ln_ncc(model: &StepModel, k: C64, mu: C64) -> Result<C64> {
        let ah = model.alpha * model.hbar;
        let s = 2.0 * ah;
        let one = c(1.0, 0.0);
        let i = C64::i();
        Ok((model.m * model.v0 / ah).ln() - k.ln() - ln_sinh(PI * k / ah) + 2.0 * PI.ln() + 2.0 * lg(one + mu / ah)?
            - 2.0 * lg(one + (mu + i * k) / s)?
            - 2.0 * lg(one + (mu - i * k) / s)?)
    }

    /// Φ = N^{+-}/|N^{+-}| as the gamma ratio.
    pub(crate) fn phase(model: &StepModel, k: C64, p: C64) -> Result<C64> {
        let ah = model.alpha * model.hbar;
        let s = 2.0 * ah;
        let one = c(1.0, 0.0);
        let i = C64::i();
        let v = lg(one - i * (k - p) / s)? + lg(one - i * p / ah)? + lg(one + i * (k + p) / s)?
            - lg(one + i * (k - p) / s)?
            - lg(one + i * p / ah)?
            - lg(one - i * (k + p) / s)?;
        Ok(v.exp())
    }

    /// (N^{++} + |N^{+-}|, N^{++} − |N^{+-}|) in factorized exponential form.
    pub(crate) fn sums(model: &StepModel, k: C64, p: C64) -> (C64, C64) {
        let u = PI / (model.alpha * model.hbar);
        let a = u * (k + p);
        let b = u * k;
        let cc = u * p;
        let pref = 2.0 * PI * p / k;
        let num = -expm1(-a);
        let plus = pref * num / ((1.0 + (-b).exp()) * (-expm1(-cc)));
        let minus = pref * num / ((-expm1(-b)) * (1.0 + (-cc).exp()));
        (plus, minus)
    }
}

/// N^{++} from its csch²/cosh display (moderate arguments only).
pub fn npp_display(model: &StepModel, k: f64) -> Result<f64> {
    require_ws(model)?;
    let p = MomentumSpec::new(model, k).p.re;
    let ah = model.alpha * model.hbar;
    let (b, cc) = (PI * k / ah, PI * p / ah);
    let csch2 = |x: f64| 1.0 / x.sinh().powi(2);
    let num = (b.cosh() - cc.cosh()).powi(2) * (csch2(PI * (k - p) / (2.0 * ah)) + csch2(PI * (k + p) / (2.0 * ah)));
    Ok(PI * p / k * (1.0 + num / (4.0 * b.sinh() * cc.sinh())))
}

/// N^{+-} from its gamma display.
pub fn npm_display(model: &StepModel, k: f64) -> Result<C64> {
    require_ws(model)?;
    let p = MomentumSpec::new(model, k).p.re;
    let ah = model.alpha * model.hbar;
    let s = 2.0 * ah;
    let one = c(1.0, 0.0);
    let i = C64::i();
    let v = c((model.m * model.v0 / (ah * k)).ln() + 2.0 * PI.ln(), 0.0) - ln_sinh(c(PI * k / ah, 0.0))
        + 2.0 * lg(one - i * p / ah)?
        - 2.0 * lg(one + i * (k - p) / s)?
        - 2.0 * lg(one - i * (k + p) / s)?;
    Ok(v.exp())
}

/// Inner-product coefficients of the unnormalized eigenstates.
pub fn normalization_coeffs(model: &StepModel, k: f64) -> Result<NormalizationCoeffs> {
    model.validate()?;
    if !(k > 0.0) {
        return Err(Error::Domain(format!("momentum must be positive, got {k}")));
    }
    let ms = MomentumSpec::new(model, k);
    let kth = model.k_threshold();
    let mut out = NormalizationCoeffs { ncc: None, npp: None, npm: None, sum_plus: None, sum_minus: None };
    if model.family == Family::Heaviside || model.is_free() {
        let p = ms.p.re;
        if k < kth {
            out.ncc = Some(PI * model.m * model.v0 / (k * k));
        } else {
            let npp = PI * (p / k + (k * k + p * p) / (2.0 * k * k));
            let npm = PI * model.m * model.v0 / (k * k);
            out.npp = Some(npp);
            out.npm = Some(c(npm, 0.0));
            out.sum_plus = Some(npp + npm);
            out.sum_minus = Some(npp - npm);
        }
        return Ok(out);
    }
    if k < kth {
        out.ncc = Some(WsNorm::ln_ncc(model, c(k, 0.0), c(ms.mu, 0.0))?.exp().re);
    } else {
        let p = c(ms.p.re, 0.0);
        let (sp, sm) = WsNorm::sums(model, c(k, 0.0), p);
        let phase = WsNorm::phase(model, c(k, 0.0), p)?;
        let npp = 0.5 * (sp.re + sm.re);
        let abs_npm = 0.5 * (sp.re - sm.re);
        out.npp = Some(npp);
        out.npm = Some(phase * abs_npm);
        out.sum_plus = Some(sp.re);
        out.sum_minus = Some(sm.re);
    }
    Ok(out)
}

/// Orthonormal basis at one (possibly complex) momentum on the integration
/// contour.  `q` is p above the step and μ below it.
#[derive(Debug, Clone)]
pub(crate) enum Basis {
    WsBelow { wave: WsWave, inv_sqrt_n: C64 },
    WsAbove { plus: WsWave, minus: WsWave, phase: C64, inv_sqrt_p: C64, inv_sqrt_m: C64 },
    StepBelow { k: C64, mu: C64, hbar: f64, norm: C64 },
    StepAbove { k: C64, p: C64, hbar: f64, norm_p: C64, norm_m: C64 },
}

impl Basis {
    pub(crate) fn new(model: &StepModel, k: C64, q: C64, above: bool) -> Result<Self> {
        let h = model.hbar;
        let step = model.family == Family::Heaviside || model.is_free();
        let two_mv0 = c(2.0 * model.m * model.v0, 0.0);
        Ok(match (step, above) {
            (true, false) => {
                let norm = c(PI * h * model.m * model.v0, 0.0).sqrt().inv();
                Basis::StepBelow { k, mu: q, hbar: h, norm }
            }
            (true, true) => {
                let kp = k + q;
                let norm_p = 2.0 / (PI * h * (kp * kp + two_mv0)).sqrt();
                let norm_m = 2.0 * C64::i() / (PI * h * (kp * kp - two_mv0)).sqrt();
                Basis::StepAbove { k, p: q, hbar: h, norm_p, norm_m }
            }
            (false, false) => {
                let wave = WsWave::new(model, k, -q);
                let ln_n = WsNorm::ln_ncc(model, k, q)?;
                let inv_sqrt_n = (-0.5 * (ln_n + h.ln())).exp();
                Basis::WsBelow { wave, inv_sqrt_n }
            }
            (false, true) => {
                let ip = C64::i() * q;
                let plus = WsWave::new(model, k, ip);
                let minus = WsWave::new(model, k, -ip);
                let phase = WsNorm::phase(model, k, q)?;
                let (sp, sm) = WsNorm::sums(model, k, q);
                Basis::WsAbove {
                    plus,
                    minus,
                    phase,
                    inv_sqrt_p: (2.0 * h * sp).sqrt().inv(),
                    inv_sqrt_m: (2.0 * h * sm).sqrt().inv(),
                }
            }
        })
    }

    pub(crate) fn len(&self) -> usize {
        match self {
            Basis::WsBelow { .. } | Basis::StepBelow { .. } => 1,
            _ => 2,
        }
    }

    /// Orthonormal states at x; only the first `len()` entries are meaningful.
    pub(crate) fn states(&self, x: f64) -> Result<[C64; 2]> {
        let zero = c(0.0, 0.0);
        Ok(match self {
            Basis::WsBelow { wave, inv_sqrt_n } => [wave.eval(x)? * inv_sqrt_n, zero],
            Basis::WsAbove { plus, minus, phase, inv_sqrt_p, inv_sqrt_m } => {
                let fp = plus.eval(x)?;
                let fm = minus.eval(x)? * phase;
                [(fp + fm) * inv_sqrt_p, (fp - fm) * inv_sqrt_m]
            }
            Basis::StepBelow { k, mu, hbar, norm } => {
                let v = if x <= 0.0 {
                    let a = k * x / hbar;
                    k * a.cos() - mu * a.sin()
                } else {
                    k * (-mu * x / hbar).exp()
                };
                [v * norm, zero]
            }
            Basis::StepAbove { k, p, hbar, norm_p, norm_m } => {
                if x <= 0.0 {
                    let a = k * x / hbar;
                    [k * a.cos() * norm_p, p * a.sin() * norm_m]
                } else {
                    let a = p * x / hbar;
                    [k * a.cos() * norm_p, k * a.sin() * norm_m]
                }
            }
        })
    }
}

/// Orthonormal eigenstate φᶜ, φ⁺ or φ⁻ (Heaviside: piecewise closed forms).
pub fn orthonormal_state(model: &StepModel, branch: Branch, k: f64, x: f64) -> Result<C64> {
    model.validate()?;
    let ms = MomentumSpec::new(model, k);
    let kth = model.k_threshold();
    if !(k > 0.0) {
        return Err(Error::Domain(format!("momentum must be positive, got {k}")));
    }
    match branch {
        Branch::C if k >= kth => return Err(Error::Domain(format!("branch c requires k < {kth}, got {k}"))),
        Branch::Plus | Branch::Minus if k <= kth => {
            return Err(Error::Domain(format!("branches ± require k > {kth}, got {k}")))
        }
        _ => {}
    }
    let above = branch != Branch::C;
    let q = if above { c(ms.p.re, 0.0) } else { c(ms.mu, 0.0) };
    let basis = Basis::new(model, c(k, 0.0), q, above)?;
    let s = basis.states(x)?;
    Ok(match branch {
        Branch::C | Branch::Plus => s[0],
        Branch::Minus => s[1],
    })
}
