//! Composite Gauss–Legendre quadrature with a panel-doubling error estimate.

use crate::error::{Error, Result};
use crate::sum::NeumaierSum;
use std::f64::consts::PI;
use std::sync::OnceLock;

const ORDER: usize = 20;

fn nodes() -> &'static [(f64, f64)] {
    static NODES: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    NODES.get_or_init(|| gauss_legendre(ORDER))
}

/// Nodes and weights on [-1, 1] by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

fn composite(f: &dyn Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut acc = NeumaierSum::new();
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        for &(x, w) in nodes() {
            acc.add(0.5 * h * w * f(mid + 0.5 * h * x));
        }
    }
    acc.value()
}

/// Integrate a smooth `f` over `[a, b]`; returns the value and the change
/// observed at the final panel doubling.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<(f64, f64)> {
    if a == b {
        return Ok((0.0, 0.0));
    }
    let mut panels = 4;
    let mut prev = composite(f, a, b, panels);
    let mut delta = f64::INFINITY;
    while panels < 4096 {
        panels *= 2;
        let cur = composite(f, a, b, panels);
        delta = (cur - prev).abs();
        if delta <= tol.max(1e-15 * cur.abs()) {
            return Ok((cur, delta));
        }
        prev = cur;
    }
    Err(Error::NonConvergence {
        what: "quadrature".into(),
        achieved: delta,
    })
}
