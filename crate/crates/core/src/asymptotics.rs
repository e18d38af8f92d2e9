//! Constant terms in the large-`λ` expansions attached to `√(Δ_Y + λ) ± α`.
//!
//! Harmonic-number factors are exact rationals; the heat coefficients and
//! `Γ(k/2)` carry the only floating-point error.

use crate::error::{Error, Result};
use crate::spectra::HeatExpansion;
use crate::zreg::special::log_gamma;
use num_rational::Ratio;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::f64::consts::LN_2;

type Q = Ratio<i128>;

/// `H_n = Σ_{p=1}^n 1/p`.
pub fn harmonic(n: usize) -> Q {
    (1..=n as i128).fold(Q::zero(), |acc, p| acc + Q::new(1, p))
}

/// `Σ_{p=1}^n 1/(2p-1)`.
fn odd_harmonic(n: usize) -> Q {
    (1..=n as i128).fold(Q::zero(), |acc, p| acc + Q::new(1, 2 * p - 1))
}

fn to_f64(q: Q) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

/// `c_k` as `(rational part, coefficient of ln 2)`.
fn c_k_parts(k: usize) -> (Q, i64) {
    if k.is_multiple_of(2) {
        (harmonic(k / 2 - 1), 0)
    } else {
        (odd_harmonic(k / 2) * Q::from_integer(2), -2)
    }
}

pub fn c_k(k: usize) -> Result<f64> {
    if k < 1 {
        return Err(Error::invalid("c_k is defined for k >= 1"));
    }
    let (q, l2) = c_k_parts(k);
    Ok(to_f64(q) + l2 as f64 * LN_2)
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Constant term of `ln Det(√(Δ_Y+λ) + α)` as `|λ| → ∞`.
pub fn s_alpha(heat: &HeatExpansion, alpha: f64) -> Result<f64> {
    let d = heat.cross_dim;
    let mut total = 0.0;
    for k in 1..=d {
        if !(d - k).is_multiple_of(2) {
            continue;
        }
        let a = heat.require((d - k) / 2)?;
        let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
        let inv_gamma = (-log_gamma(k as f64 / 2.0)?).exp();
        let bracket = 2.0 * to_f64(harmonic(k - 1)) - c_k(k)?;
        total += sign * a * alpha.powi(k as i32) / k as f64 * inv_gamma * bracket;
    }
    Ok(-total)
}

/// `s_α + s_{-α}` in its closed even-dimensional form.
pub fn s_alpha_pair(heat: &HeatExpansion, alpha: f64) -> Result<f64> {
    let d = heat.cross_dim;
    if d % 2 == 1 {
        return Ok(0.0);
    }
    let mut total = 0.0;
    for k in 1..=d / 2 {
        let a = heat.half_index(k)?;
        let bracket = Q::from_integer(2) * harmonic(2 * k - 1) - harmonic(k - 1);
        total += a * alpha.powi(2 * k as i32) / factorial(k) * to_f64(bracket);
    }
    Ok(-total)
}

/// `(w0, w1)`; both vanish for odd `cross_dim`.
pub fn w0_w1(heat: &HeatExpansion, alpha: f64) -> Result<(f64, f64)> {
    let d = heat.cross_dim;
    if d % 2 == 1 {
        return Ok((0.0, 0.0));
    }
    let mut w0 = heat.half_index(0)?;
    let mut w1 = 0.0;
    for k in 1..=d / 2 {
        let term = heat.half_index(k)? * alpha.powi(2 * k as i32) / factorial(k);
        w0 += 2.0 * term;
        if k >= 2 {
            w1 -= term * to_f64(harmonic(k - 1));
        }
    }
    Ok((w0, w1))
}

/// Sum over boundary components of `-ln 2 · w0 + w1`; zero when `m` is even.
pub fn a0_constant(components: &[(HeatExpansion, f64)], m: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::invalid("manifold dimension m must be >= 1"));
    }
    let mut total = 0.0;
    for (heat, alpha) in components {
        if heat.cross_dim + 1 != m {
            return Err(Error::invalid(format!(
                "component of dimension {} is inconsistent with m = {m}",
                heat.cross_dim
            )));
        }
        let (w0, w1) = w0_w1(heat, *alpha)?;
        total += -LN_2 * w0 + w1;
    }
    Ok(total)
}

/// `b0 = -Σ_i s_{α_i}`.
pub fn b0_constant(components: &[(HeatExpansion, f64)]) -> Result<f64> {
    let mut total = 0.0;
    for (heat, alpha) in components {
        total -= s_alpha(heat, *alpha)?;
    }
    Ok(total)
}

/// `ζ(0)` of `√Δ_Y - α²/√Δ_Y` over the nonzero spectrum:
/// `(a_{d/2} - q0) + 2 Σ_{k=1}^{⌊d/2⌋} a_{d/2-k} α^{2k}/k!`.
pub fn inverse_shift_zeta_zero(heat: &HeatExpansion, q0: u64, alpha: f64) -> Result<f64> {
    let d = heat.cross_dim;
    let mut total = heat.half_index(0)? - q0 as f64;
    for k in 1..=d / 2 {
        total += 2.0 * heat.half_index(k)? * alpha.powi(2 * k as i32) / factorial(k);
    }
    Ok(total)
}

/// `2 Σ_{k=1}^{⌊d/2⌋} a_{d/2-k} α^{2k}/k! (H_{2k-1} - H_{k-1})`; zero for odd `d`.
pub fn inverse_shift_harmonic_sum(heat: &HeatExpansion, alpha: f64) -> Result<f64> {
    let d = heat.cross_dim;
    if d % 2 == 1 {
        return Ok(0.0);
    }
    let mut total = 0.0;
    for k in 1..=d / 2 {
        let h = to_f64(harmonic(2 * k - 1) - harmonic(k - 1));
        total += 2.0 * heat.half_index(k)? * alpha.powi(2 * k as i32) / factorial(k) * h;
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymConstants {
    pub s_alpha: f64,
    pub s_minus_alpha: f64,
    pub w0: f64,
    pub w1: f64,
    pub a0: f64,
}

pub fn constants(heat: &HeatExpansion, alpha: f64) -> Result<AsymConstants> {
    let (w0, w1) = w0_w1(heat, alpha)?;
    Ok(AsymConstants {
        s_alpha: s_alpha(heat, alpha)?,
        s_minus_alpha: s_alpha(heat, -alpha)?,
        w0,
        w1,
        a0: -LN_2 * w0 + w1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn heat(d: usize, coeffs: &[f64]) -> HeatExpansion {
        HeatExpansion::new(d, coeffs.to_vec()).unwrap()
    }

    #[test]
    fn c_k_boundary_indices() {
        assert_abs_diff_eq!(c_k(1).unwrap(), -2.0 * LN_2, epsilon = 1e-15);
        assert_eq!(c_k(2).unwrap(), 0.0);
        assert_abs_diff_eq!(c_k(3).unwrap(), -2.0 * LN_2 + 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c_k(4).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c_k(5).unwrap(), -2.0 * LN_2 + 2.0 + 2.0 / 3.0, epsilon = 1e-15);
        assert!(c_k(0).is_err());
    }

    #[test]
    fn c_k_is_digamma_shift() {
        // c_k = γ + ψ(k/2)
        use crate::zreg::special::{digamma, EULER_GAMMA};
        for k in 1..12 {
            let v = EULER_GAMMA + digamma(k as f64 / 2.0).unwrap();
            assert_abs_diff_eq!(c_k(k).unwrap(), v, epsilon = 1e-13);
        }
    }

    #[test]
    fn harmonic_is_exact() {
        assert_eq!(harmonic(0), Q::zero());
        assert_eq!(harmonic(4), Q::new(25, 12));
        assert_eq!(odd_harmonic(2), Q::new(4, 3));
    }

    #[test]
    fn circle_and_torus_values() {
        let l = 2.0 * PI;
        let circle = heat(1, &[l / (4.0 * PI).sqrt()]);
        let a0 = circle.coeffs[0];
        assert_abs_diff_eq!(s_alpha(&circle, 0.3).unwrap(), 2.0 * LN_2 * a0 * 0.3 / PI.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(
            s_alpha(&circle, 0.3).unwrap() + s_alpha(&circle, -0.3).unwrap(),
            0.0,
            epsilon = 1e-15
        );
        assert_eq!(s_alpha_pair(&circle, 0.3).unwrap(), 0.0);
        assert_eq!(w0_w1(&circle, 0.9).unwrap(), (0.0, 0.0));

        let torus = heat(2, &[1.3, 0.0]);
        assert_abs_diff_eq!(s_alpha(&torus, 0.7).unwrap(), -1.3 * 0.49, epsilon = 1e-15);
        assert_abs_diff_eq!(s_alpha_pair(&torus, 0.7).unwrap(), -2.0 * 1.3 * 0.49, epsilon = 1e-15);
        assert_eq!(w0_w1(&torus, 0.0).unwrap(), (0.0, 0.0));
        assert_abs_diff_eq!(w0_w1(&torus, 1.0).unwrap().0, 2.0 * 1.3, epsilon = 1e-15);
        assert_eq!(w0_w1(&torus, 1.0).unwrap().1, 0.0);
        assert_abs_diff_eq!(
            a0_constant(&[(torus.clone(), 0.5)], 3).unwrap(),
            -LN_2 * 2.0 * 1.3 * 0.25,
            epsilon = 1e-15
        );
    }

    #[test]
    fn a0_vanishes_for_even_m() {
        let circle = heat(1, &[1.7]);
        assert_eq!(a0_constant(&[(circle.clone(), 0.4), (circle, -0.4)], 2).unwrap(), 0.0);
        assert!(a0_constant(&[(heat(2, &[1.0, 0.0]), 0.0)], 2).is_err());
    }

    #[test]
    fn b0_cases() {
        let point = heat(0, &[1.0]);
        assert_eq!(b0_constant(&[(point.clone(), 0.0), (point, 3.0)]).unwrap(), 0.0);
        let torus = heat(2, &[0.9, 0.0]);
        assert_eq!(b0_constant(&[(torus.clone(), 0.0)]).unwrap(), 0.0);
        assert_abs_diff_eq!(
            b0_constant(&[(torus.clone(), 0.4), (torus.clone(), 0.4)]).unwrap(),
            -2.0 * s_alpha(&torus, 0.4).unwrap(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn missing_coefficient_is_named() {
        let short = heat(6, &[1.0, 2.0]);
        assert_eq!(s_alpha(&short, 0.5), Err(Error::MissingHeatCoefficient { index: 2 }));
        assert_eq!(w0_w1(&short, 0.5), Err(Error::MissingHeatCoefficient { index: 3 }));
    }

    proptest! {
        #[test]
        fn pair_formula_matches_sum(
            d in 0usize..9,
            coeffs in proptest::collection::vec(-3.0f64..3.0, 5),
            alpha in -2.0f64..2.0,
        ) {
            let h = heat(d, &coeffs);
            let pair = s_alpha_pair(&h, alpha).unwrap();
            let sum = s_alpha(&h, alpha).unwrap() + s_alpha(&h, -alpha).unwrap();
            prop_assert!((pair - sum).abs() <= 1e-12 * (1.0 + pair.abs()));
        }

        #[test]
        fn parity_in_alpha(
            d in 0usize..9,
            coeffs in proptest::collection::vec(-3.0f64..3.0, 5),
            alpha in -2.0f64..2.0,
        ) {
            let h = heat(d, &coeffs);
            let c = constants(&h, alpha).unwrap();
            let m = constants(&h, -alpha).unwrap();
            prop_assert_eq!(c.s_minus_alpha, m.s_alpha);
            prop_assert_eq!((c.w0, c.w1, c.a0), (m.w0, m.w1, m.a0));
            if d % 2 == 1 {
                prop_assert_eq!((c.w0, c.w1, c.a0), (0.0, 0.0, 0.0));
                prop_assert!((c.s_alpha + c.s_minus_alpha).abs() < 1e-14);
            }
        }
    }
}
