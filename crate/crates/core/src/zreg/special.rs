//! Special functions backing the closed-form zeta evaluations.

use crate::error::{Error, Result};
use crate::sum::NeumaierSum;
use std::f64::consts::PI;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `ln(2*pi) / 2`.
pub const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// B_2, B_4, ..., B_30.
const BERNOULLI_2K: [f64; 15] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
    8615841276005.0 / 14322.0,
];

const STIRLING_MIN: f64 = 16.0;

fn stirling_ln_gamma(x: f64) -> f64 {
    let mut corr = 0.0;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut p = inv;
    for (k, b) in BERNOULLI_2K.iter().take(9).enumerate() {
        let n = 2.0 * (k as f64 + 1.0);
        corr += b / (n * (n - 1.0)) * p;
        p *= inv2;
    }
    (x - 0.5) * x.ln() - x + HALF_LN_2PI + corr
}

/// `ln Γ(a)` for `a > 0`.
pub fn log_gamma(a: f64) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::Domain(format!("log_gamma requires a > 0, got {a}")));
    }
    Ok(ln_gamma_pos(a))
}

fn ln_gamma_pos(a: f64) -> f64 {
    if a == 1.0 || a == 2.0 {
        return 0.0;
    }
    if a >= STIRLING_MIN {
        return stirling_ln_gamma(a);
    }
    // Shift up and divide out the product a (a+1) ... (a+n-1).
    let mut x = a;
    let mut prod = 1.0;
    while x < STIRLING_MIN {
        prod *= x;
        x += 1.0;
    }
    stirling_ln_gamma(x) - prod.ln()
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// `(ln|Γ(x)|, sign Γ(x))` for any real `x` that is not a pole.
pub fn ln_abs_gamma(x: f64) -> Result<(f64, f64)> {
    if is_nonpositive_integer(x) {
        return Err(Error::Pole(x));
    }
    if x > 0.0 {
        return Ok((ln_gamma_pos(x), 1.0));
    }
    // Reflection: Γ(x) Γ(1-x) = π / sin(πx).
    let s = (PI * x).sin();
    let val = PI.ln() - s.abs().ln() - ln_gamma_pos(1.0 - x);
    Ok((val, s.signum()))
}

pub fn gamma(x: f64) -> Result<f64> {
    let (l, sg) = ln_abs_gamma(x)?;
    Ok(sg * l.exp())
}

/// `1/Γ(x)`, entire; zero at the non-positive integers.
pub fn inv_gamma(x: f64) -> f64 {
    match ln_abs_gamma(x) {
        Ok((l, sg)) => sg * (-l).exp(),
        Err(_) => 0.0,
    }
}

pub fn digamma(x: f64) -> Result<f64> {
    if is_nonpositive_integer(x) {
        return Err(Error::Pole(x));
    }
    if x < 0.0 {
        return Ok(digamma(1.0 - x)? - PI / (PI * x).tan());
    }
    let mut acc = NeumaierSum::new();
    let mut y = x;
    while y < 12.0 {
        acc.add(-1.0 / y);
        y += 1.0;
    }
    let inv2 = 1.0 / (y * y);
    let mut p = inv2;
    let mut tail = 0.0;
    for (k, b) in BERNOULLI_2K.iter().take(8).enumerate() {
        let n = 2.0 * (k as f64 + 1.0);
        tail += b / n * p;
        p *= inv2;
    }
    acc.add(y.ln() - 0.5 / y - tail);
    Ok(acc.value())
}

/// Value and `d/ds` of the Hurwitz zeta function via Euler–Maclaurin.
fn hurwitz_em(s: f64, a: f64) -> (f64, f64) {
    let n_terms = (12.0 + s.max(0.0) - a).max(8.0).ceil() as usize;
    let mut val = NeumaierSum::new();
    let mut der = NeumaierSum::new();
    for k in 0..n_terms {
        let x = k as f64 + a;
        let lx = x.ln();
        let p = (-s * lx).exp();
        val.add(p);
        der.add(-lx * p);
    }
    let w = n_terms as f64 + a;
    let lw = w.ln();
    let w_ms = (-s * lw).exp();

    // Integral term w^{1-s}/(s-1).
    let v1 = w * w_ms / (s - 1.0);
    val.add(v1);
    der.add(-lw * v1 - v1 / (s - 1.0));

    // Boundary term.
    val.add(0.5 * w_ms);
    der.add(-0.5 * lw * w_ms);

    // Bernoulli corrections: B_{2j}/(2j)! (s)_{2j-1} w^{-s-2j+1}.
    let mut poch = s;
    let mut poch_d = 1.0;
    let mut fact = 2.0;
    let mut wp = w_ms / w;
    for (j, b) in BERNOULLI_2K.iter().enumerate() {
        let c = b / fact;
        val.add(c * poch * wp);
        der.add(c * (poch_d - lw * poch) * wp);
        let m1 = s + 2.0 * j as f64 + 1.0;
        let m2 = s + 2.0 * j as f64 + 2.0;
        poch_d = poch_d * m1 * m2 + poch * (m1 + m2);
        poch *= m1 * m2;
        fact *= (2.0 * j as f64 + 3.0) * (2.0 * j as f64 + 4.0);
        wp /= w * w;
    }
    (val.value(), der.value())
}

/// Hurwitz zeta `ζ(s, a) = Σ_{k≥0} (k+a)^{-s}` for `a > 0`, `s ≠ 1`.
pub fn hurwitz_zeta(s: f64, a: f64) -> Result<f64> {
    Ok(hurwitz_zeta_with_derivative(s, a)?.0)
}

/// `(ζ(s, a), ∂_s ζ(s, a))`.
pub fn hurwitz_zeta_with_derivative(s: f64, a: f64) -> Result<(f64, f64)> {
    if !(a > 0.0) {
        return Err(Error::Domain(format!("hurwitz_zeta requires a > 0, got {a}")));
    }
    if s == 1.0 {
        return Err(Error::Pole(1.0));
    }
    Ok(hurwitz_em(s, a))
}

pub fn riemann_zeta(s: f64) -> Result<f64> {
    Ok(riemann_zeta_with_derivative(s)?.0)
}

/// `(ζ(s), ζ'(s))`; the reflection formula is used for `s < 0`.
pub fn riemann_zeta_with_derivative(s: f64) -> Result<(f64, f64)> {
    if s == 1.0 {
        return Err(Error::Pole(1.0));
    }
    if s >= 0.0 {
        return Ok(hurwitz_em(s, 1.0));
    }
    // ζ(s) = f(s) g(s), f = 2^s π^{s-1} Γ(1-s), g = sin(πs/2) ζ(1-s).
    let t = 1.0 - s;
    let (zt, zt_d) = hurwitz_em(t, 1.0);
    let f = (s * 2f64.ln() + (s - 1.0) * PI.ln() + ln_gamma_pos(t)).exp();
    let f_d = f * (2f64.ln() + PI.ln() - digamma(t)?);
    let (sn, cs) = (0.5 * PI * s).sin_cos();
    let g = sn * zt;
    let g_d = 0.5 * PI * cs * zt - sn * zt_d;
    Ok((f * g, f_d * g + f * g_d))
}

/// Exponential integral `E_1(x)` for `x > 0`.
pub fn exp_integral_e1(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("E1 requires x > 0, got {x}")));
    }
    if x <= 1.0 {
        let mut acc = NeumaierSum::new();
        acc.add(-EULER_GAMMA);
        acc.add(-x.ln());
        let mut term = 1.0;
        for n in 1..200 {
            let nf = n as f64;
            term *= -x / nf;
            let t = -term / nf;
            acc.add(t);
            if t.abs() < 1e-18 * acc.value().abs() {
                break;
            }
        }
        Ok(acc.value())
    } else {
        Ok(lentz_upper_gamma(0.0, x)?)
    }
}

const FPMIN: f64 = 1e-300;

/// Continued fraction for `Γ(s, x)`, valid for `x > 0` and converging fast for
/// `x > s + 1`.
fn lentz_upper_gamma(s: f64, x: f64) -> Result<f64> {
    let mut b = x + 1.0 - s;
    let mut c = 1.0 / FPMIN;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -(i as f64) * (i as f64 - s);
        b += 2.0;
        d = an * d + b;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b + an / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            return Ok((-x + s * x.ln()).exp() * h);
        }
    }
    Err(Error::NonConvergence {
        what: format!("incomplete gamma continued fraction at s={s}, x={x}"),
        achieved: f64::NAN,
    })
}

/// Lower incomplete gamma `γ(s, x)` by its power series, `s > 0`.
fn lower_gamma_series(s: f64, x: f64) -> f64 {
    let mut ap = s;
    let mut del = 1.0 / s;
    let mut sum = del;
    for _ in 0..10_000 {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * 1e-17 {
            break;
        }
    }
    sum * (-x + s * x.ln()).exp()
}

/// Upper incomplete gamma `Γ(s, x) = ∫_x^∞ t^{s-1} e^{-t} dt` for real `s`, `x > 0`.
pub fn upper_incomplete_gamma(s: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("upper incomplete gamma requires x > 0, got {x}")));
    }
    if x > 700.0 + s.abs() {
        return Ok(0.0);
    }
    if s == 0.0 {
        return exp_integral_e1(x);
    }
    if x >= (s + 1.0).max(1.0) {
        return lentz_upper_gamma(s, x);
    }
    if s > 0.0 {
        return Ok(gamma(s)? - lower_gamma_series(s, x));
    }
    // Downward recurrence Γ(s, x) = (Γ(s+1, x) - x^s e^{-x}) / s from s + n ∈ [0, 1).
    let n = (-s).ceil() as i32;
    let top = s + n as f64;
    let mut g = upper_incomplete_gamma(top, x)?;
    let mut cur = top;
    for _ in 0..n {
        cur -= 1.0;
        g = (g - (cur * x.ln() - x).exp()) / cur;
    }
    Ok(g)
}
