//! Log-gamma, gamma and the Gauss hypergeometric function for complex
//! parameters and real argument in `[0, 1)`.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

pub type C64 = Complex64;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const MAX_TERMS: usize = 10_000;

// B_{2n} / (2n (2n-1)) for n = 1..=10
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
    43867.0 / 244_188.0,
    -174_611.0 / 125_400.0,
];

fn is_gamma_pole(z: C64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// log Γ(z), continuous on the right half plane; the reflection formula is
/// used for Re z < 1/2.
pub fn log_gamma(z: C64) -> Result<C64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(format!("log_gamma argument {z} is not finite")));
    }
    if is_gamma_pole(z) {
        return Err(Error::GammaPole(z.to_string()));
    }
    if z.re < 0.5 {
        let w = C64::new(1.0, 0.0) - z;
        return Ok(C64::new(PI.ln(), 0.0) - ln_sin_pi(z) - log_gamma_right(w));
    }
    Ok(log_gamma_right(z))
}

fn log_gamma_right(z: C64) -> C64 {
    let mut z = z;
    let mut shift = C64::new(0.0, 0.0);
    while z.norm() < 15.0 {
        shift += z.ln();
        z += 1.0;
    }
    let zinv = z.inv();
    let zinv2 = zinv * zinv;
    let mut acc = C64::new(0.0, 0.0);
    let mut p = zinv;
    for c in STIRLING {
        acc += p * c;
        p *= zinv2;
    }
    (z - 0.5) * z.ln() - z + LN_SQRT_2PI + acc - shift
}

/// ln sin(πz) without overflow for large |Im z| (branch modulo 2πi).
fn ln_sin_pi(z: C64) -> C64 {
    let i = C64::i();
    if z.im.abs() < 20.0 {
        return (z * PI).sin().ln();
    }
    if z.im > 0.0 {
        -i * PI * z + (C64::new(1.0, 0.0) - (i * 2.0 * PI * z).exp()).ln() + C64::new(0.5, 0.0).ln()
            + C64::new(0.0, PI / 2.0)
    } else {
        i * PI * z + (C64::new(1.0, 0.0) - (-i * 2.0 * PI * z).exp()).ln() + C64::new(0.5, 0.0).ln()
            - C64::new(0.0, PI / 2.0)
    }
}

pub fn gamma(z: C64) -> Result<C64> {
    Ok(log_gamma(z)?.exp())
}

/// 1/Γ(z), zero at the poles of Γ.
pub fn rgamma(z: C64) -> C64 {
    if is_gamma_pole(z) {
        C64::new(0.0, 0.0)
    } else {
        (-log_gamma(z).expect("finite argument")).exp()
    }
}

/// Σ ln Γ(num) − Σ ln Γ(den); `None` when a denominator sits on a pole
/// (the whole ratio vanishes).
fn log_gamma_ratio(num: &[C64], den: &[C64]) -> Result<Option<C64>> {
    let mut acc = C64::new(0.0, 0.0);
    for &d in den {
        if is_gamma_pole(d) {
            return Ok(None);
        }
        acc -= log_gamma(d)?;
    }
    for &n in num {
        acc += log_gamma(n)?;
    }
    Ok(Some(acc))
}

struct Series {
    sum: C64,
    cond: f64,
}

fn power_series(a: C64, b: C64, c: C64, z: f64) -> Result<Series> {
    let mut term = C64::new(1.0, 0.0);
    let mut sum = term;
    let mut max_term = 1.0_f64;
    let mut small = 0;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        let den = (c + nf) * (nf + 1.0);
        if den.norm() == 0.0 {
            return Err(Error::Domain(format!("hyp2f1: c = {c} is a non-positive integer")));
        }
        term = term * (a + nf) * (b + nf) / den * z;
        sum += term;
        let t = term.norm();
        max_term = max_term.max(t);
        if t == 0.0 {
            return Ok(Series { sum, cond: max_term / sum.norm().max(f64::MIN_POSITIVE) });
        }
        // tail is geometric once the term ratio has settled below one
        let ratio = ((a + nf + 1.0) * (b + nf + 1.0) / ((c + nf + 1.0) * (nf + 2.0))).norm() * z;
        if t <= 1e-17 * sum.norm() && ratio < 0.9 {
            small += 1;
            if small >= 2 {
                return Ok(Series { sum, cond: max_term / sum.norm().max(f64::MIN_POSITIVE) });
            }
        } else {
            small = 0;
        }
    }
    Err(Error::NonConvergence {
        what: "hyp2f1 series",
        detail: format!("a={a}, b={b}, c={c}, z={z}: more than {MAX_TERMS} terms"),
    })
}

/// Direct or Euler-transformed series, whichever is better conditioned.
/// `w = 1 − z`, `ln_w = ln(1 − z)` supplied for accuracy.
fn series_best(a: C64, b: C64, c: C64, z: f64, ln_w: f64) -> Result<C64> {
    let euler_first = ((c - a) * (c - b)).norm() < (a * b).norm();
    let euler = |_: ()| -> Result<(C64, f64)> {
        let s = power_series(c - a, c - b, c, z)?;
        Ok((((c - a - b) * ln_w).exp() * s.sum, s.cond))
    };
    let direct = |_: ()| -> Result<(C64, f64)> {
        let s = power_series(a, b, c, z)?;
        Ok((s.sum, s.cond))
    };
    let (first, second): (&dyn Fn(()) -> Result<(C64, f64)>, &dyn Fn(()) -> Result<(C64, f64)>) =
        if euler_first { (&euler, &direct) } else { (&direct, &euler) };
    let r1 = first(());
    if let Ok((v, cond)) = r1 {
        if cond < 1e3 {
            return Ok(v);
        }
    }
    let r2 = second(());
    let best = match (r1, r2) {
        (Ok(x), Ok(y)) => {
            if x.1 <= y.1 {
                x
            } else {
                y
            }
        }
        (Ok(x), Err(_)) => x,
        (Err(_), Ok(y)) => y,
        (Err(e), Err(_)) => return Err(e),
    };
    if best.1 > 1e8 {
        return Err(Error::NonConvergence {
            what: "hyp2f1 series",
            detail: format!("a={a}, b={b}, c={c}, z={z}: cancellation factor {:e}", best.1),
        });
    }
    Ok(best.0)
}

/// ₂F₁(a, b; c; z) for real `0 ≤ z < 1`.
pub fn hyp2f1(a: C64, b: C64, c: C64, z: f64) -> Result<C64> {
    if !(0.0..1.0).contains(&z) {
        return Err(Error::Domain(format!("hyp2f1 requires 0 <= z < 1, got {z}")));
    }
    let w = 1.0 - z;
    hyp2f1_split(a, b, c, z, w, (-z).ln_1p())
}

/// ₂F₁ with the complement `w = 1 − z` and `ln w` supplied by the caller,
/// which keeps full precision when z rounds to 1.
pub fn hyp2f1_split(a: C64, b: C64, c: C64, z: f64, w: f64, ln_w: f64) -> Result<C64> {
    if is_gamma_pole(c) {
        return Err(Error::Domain(format!("hyp2f1: c = {c} is a non-positive integer")));
    }
    for v in [a, b, c] {
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::Domain("hyp2f1: non-finite parameter".into()));
        }
    }
    if z == 0.0 {
        return Ok(C64::new(1.0, 0.0));
    }
    if z <= 0.5 {
        return series_best(a, b, c, z, ln_w);
    }
    let d = c - a - b;
    let dist = (d - C64::new(d.re.round(), 0.0)).norm();
    if dist > 0.05 {
        one_minus_z(a, b, c, d, z, w, ln_w)
    } else {
        continue_to(a, b, c, w)
    }
}

fn one_minus_z(a: C64, b: C64, c: C64, d: C64, z: f64, w: f64, ln_w: f64) -> Result<C64> {
    let ln_z = (-w).ln_1p();
    let one = C64::new(1.0, 0.0);
    let mut out = C64::new(0.0, 0.0);
    if let Some(lg) = log_gamma_ratio(&[c, d], &[c - a, c - b])? {
        out += lg.exp() * series_best(a, b, one - d, w, ln_z)?;
    }
    if let Some(lg) = log_gamma_ratio(&[c, -d], &[a, b])? {
        out += (lg + d * ln_w).exp() * series_best(c - a, c - b, one + d, w, ln_z)?;
    }
    let _ = z;
    Ok(out)
}

/// Taylor continuation of the hypergeometric ODE from z = 1/2 towards z → 1,
/// used when c − a − b is close to an integer.
fn continue_to(a: C64, b: C64, c: C64, w_target: f64) -> Result<C64> {
    let half_ln = 0.5_f64.ln();
    let mut y = series_best(a, b, c, 0.5, half_ln)?;
    let one = C64::new(1.0, 0.0);
    let mut dy = a * b / c * series_best(a + one, b + one, c + one, 0.5, half_ln)?;
    let s = a + b + one;
    let r = -a * b;
    let d = c - a - b;
    let scale = 1.0 + 0.25 * (d.norm() + (a * b).norm().sqrt());
    let mut w0 = 0.5;
    let mut steps = 0;
    while w0 > w_target {
        steps += 1;
        if steps > MAX_TERMS {
            return Err(Error::NonConvergence { what: "hyp2f1 continuation", detail: "too many steps".into() });
        }
        let h = (w0 - w_target).min(0.5 * w0 / scale);
        let z0 = 1.0 - w0;
        let p0 = z0 * w0;
        let p1 = 2.0 * w0 - 1.0;
        let q0 = c - s * z0;
        let q1 = -s;
        // y(z0 + h) = Σ c_n h^n, coefficients scaled by h^n
        let mut cm1 = y;
        let mut c0 = dy * h;
        let mut val = cm1 + c0;
        let mut der = dy;
        let mut small = 0;
        let mut n = 0usize;
        loop {
            let nf = n as f64;
            let num = (q0 * (nf + 1.0) + p1 * nf * (nf + 1.0)) * c0 * h
                + (q1 * nf - nf * (nf - 1.0) + r) * cm1 * h * h;
            let next = -num / (p0 * (nf + 2.0) * (nf + 1.0));
            val += next;
            der += next * (nf + 2.0) / h;
            let t = next.norm();
            if t <= 1e-17 * val.norm() || t == 0.0 {
                small += 1;
                if small >= 3 {
                    break;
                }
            } else {
                small = 0;
            }
            cm1 = c0;
            c0 = next;
            n += 1;
            if n > MAX_TERMS {
                return Err(Error::NonConvergence {
                    what: "hyp2f1 continuation",
                    detail: format!("Taylor series at w = {w0}"),
                });
            }
        }
        y = val;
        dy = der;
        w0 -= h;
    }
    Ok(y)
}
