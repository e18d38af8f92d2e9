//! Spectral zeta functions of `Δ_Y` and log-determinants of `Δ_Y` and `√Δ_Y + α`.

pub mod mellin;
pub mod special;

pub use mellin::MellinOptions;
pub use special::{
    digamma, exp_integral_e1, gamma, hurwitz_zeta, hurwitz_zeta_with_derivative, log_gamma, riemann_zeta,
    riemann_zeta_with_derivative, upper_incomplete_gamma, EULER_GAMMA, HALF_LN_2PI,
};

use crate::error::{Error, Result};
use crate::spectra::{heat_expansion, kernel_dim, positive_spectrum, CrossSection};
use crate::sum::{ordered_map, LogSum, LogValue, NeumaierSum};
use mellin::MellinEngine;
use serde::{Deserialize, Serialize};
use special::ln_abs_gamma;
use std::f64::consts::PI;

/// `ζ(s)` at one point: the value, or the finite part at a pole.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZetaPoint {
    pub s: f64,
    pub value: f64,
    pub residue: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegularizedDet {
    pub log_modulus: f64,
    /// Imaginary part of the log in units of `π`.
    pub phase_multiple: i64,
    pub excluded_zero_modes: u64,
    /// Bound on the numerical truncation error of `log_modulus`.
    pub tail_bound: f64,
}

impl RegularizedDet {
    pub fn log_value(&self) -> LogValue {
        LogValue::new(self.log_modulus, self.phase_multiple)
    }
}

/// Evaluation strategy: closed forms where available, otherwise the Mellin split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Backend {
    /// Use the closed forms for the point and the circle.
    pub closed_forms: bool,
    pub mellin: MellinOptions,
}

impl Default for Backend {
    fn default() -> Self {
        Self { closed_forms: true, mellin: MellinOptions::default() }
    }
}

impl Backend {
    /// Always use the Mellin split, even where a closed form exists.
    pub fn numeric(mellin: MellinOptions) -> Self {
        Self { closed_forms: false, mellin }
    }

    fn closed_form_for(&self, cs: &CrossSection) -> bool {
        self.closed_forms && matches!(cs, CrossSection::Point | CrossSection::Circle { .. })
    }

    fn options(&self) -> MellinOptions {
        self.mellin
    }
}

pub fn zeta_point(cs: &CrossSection, s: f64, include_zero: bool) -> Result<ZetaPoint> {
    zeta_point_with(cs, s, include_zero, Backend::default())
}

/// `ζ_Δ(s) = Σ_{μ>0} m μ^{-s}`; with `include_zero` the kernel contributes
/// `q0` at `s = 0` (the convention `0^0 = 1`).
pub fn zeta_point_with(cs: &CrossSection, s: f64, include_zero: bool, backend: Backend) -> Result<ZetaPoint> {
    if !s.is_finite() {
        return Err(Error::invalid(format!("s must be finite, got {s}")));
    }
    let q0 = kernel_dim(cs);
    if include_zero && q0 > 0 && s != 0.0 {
        return Err(Error::ContinuationUnsupported {
            s,
            reason: "zero modes can only be included at s = 0".into(),
        });
    }
    let mut z = if backend.closed_form_for(cs) {
        closed_zeta(cs, s)?
    } else {
        MellinEngine::new(cs, backend.options())?.zeta(s)?.0
    };
    if include_zero {
        z.value += q0 as f64;
    }
    Ok(z)
}

fn closed_zeta(cs: &CrossSection, s: f64) -> Result<ZetaPoint> {
    match cs {
        CrossSection::Point => Ok(ZetaPoint { s, value: 0.0, residue: 0.0 }),
        CrossSection::Circle { circumference } => {
            // ζ(s) = 2 c^{-2s} ζ_R(2s), c = 2π/ℓ
            let c = 2.0 * PI / circumference;
            if s == 0.5 {
                let fp = (2.0 * EULER_GAMMA - 2.0 * c.ln()) / c;
                return Ok(ZetaPoint { s, value: fp, residue: 1.0 / c });
            }
            let v = 2.0 * c.powf(-2.0 * s) * riemann_zeta(2.0 * s)?;
            Ok(ZetaPoint { s, value: v, residue: 0.0 })
        }
        _ => unreachable!("closed forms cover the point and the circle"),
    }
}

pub fn log_det_star(cs: &CrossSection) -> Result<RegularizedDet> {
    log_det_star_with(cs, Backend::default())
}

/// `ln Det* Δ_Y = -ζ'(0)` over the nonzero spectrum.
pub fn log_det_star_with(cs: &CrossSection, backend: Backend) -> Result<RegularizedDet> {
    let q0 = kernel_dim(cs);
    let (value, tail_bound) = if backend.closed_form_for(cs) {
        match cs {
            CrossSection::Point => (0.0, 0.0),
            CrossSection::Circle { circumference } => (2.0 * circumference.ln(), 0.0),
            _ => unreachable!(),
        }
    } else {
        let (_, d, b) = MellinEngine::new(cs, backend.options())?.at_zero()?;
        (-d, b)
    };
    Ok(RegularizedDet {
        log_modulus: value,
        phase_multiple: 0,
        excluded_zero_modes: q0,
        tail_bound,
    })
}

/// `ln Det` of `{c (k + a)}_{k ≥ 0}`: `(1/2 - a) ln c - ln Γ(a) + ln(2π)/2`,
/// with one unit of phase per negative member.
pub fn log_det_progression(c: f64, a: f64) -> Result<LogValue> {
    let (lg, _) = ln_abs_gamma(a).map_err(|_| Error::SingularShift { eigenvalue: c * c * a * a })?;
    let phase = if a < 0.0 { (-a).ceil() as i64 } else { 0 };
    Ok(LogValue::new((0.5 - a) * c.ln() - lg + HALF_LN_2PI, phase))
}

fn near_integer(x: f64) -> bool {
    (x - x.round()).abs() <= 1e-12 * x.abs().max(1.0)
}

pub fn log_det_shifted(cs: &CrossSection, alpha: f64) -> Result<RegularizedDet> {
    log_det_shifted_with(cs, alpha, Backend::default())
}

/// `ln Det(√Δ_Y + α)`, zero modes of `Δ_Y` contributing the eigenvalue `α`.
pub fn log_det_shifted_with(cs: &CrossSection, alpha: f64, backend: Backend) -> Result<RegularizedDet> {
    if !alpha.is_finite() {
        return Err(Error::invalid(format!("alpha must be finite, got {alpha}")));
    }
    let q0 = kernel_dim(cs);
    if q0 > 0 && alpha == 0.0 {
        return Err(Error::SingularShift { eigenvalue: 0.0 });
    }
    if backend.closed_form_for(cs) {
        let zero = LogValue::ln(alpha);
        let total = match cs {
            CrossSection::Point => zero,
            CrossSection::Circle { circumference } => {
                let c = 2.0 * PI / circumference;
                let a = 1.0 + alpha / c;
                if a <= 0.0 && near_integer(a) {
                    return Err(Error::SingularShift { eigenvalue: alpha * alpha });
                }
                let p = log_det_progression(c, a)?;
                zero.plus(p).plus(p)
            }
            _ => unreachable!(),
        };
        return Ok(RegularizedDet {
            log_modulus: total.re,
            phase_multiple: total.phase,
            excluded_zero_modes: 0,
            tail_bound: 0.0,
        });
    }
    shifted_binomial(cs, alpha, backend.options())
}

/// `Σ_{k>K} (-1)^{k+1} y^k / k`, i.e. `ln(1+y)` minus its degree-`K` Taylor polynomial.
fn log1p_taylor_tail(y: f64, order: usize) -> LogValue {
    if y.abs() < 0.5 {
        let mut acc = NeumaierSum::new();
        let mut p = y.powi(order as i32 + 1);
        let mut k = order + 1;
        loop {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            let term = sign * p / k as f64;
            acc.add(term);
            if term.abs() < 1e-20 * acc.value().abs().max(1e-300) || p == 0.0 {
                break;
            }
            p *= y;
            k += 1;
        }
        LogValue::new(acc.value(), 0)
    } else {
        let mut poly = NeumaierSum::new();
        let mut p = 1.0;
        for k in 1..=order {
            p *= y;
            poly.add(if k % 2 == 1 { p } else { -p } / k as f64);
        }
        LogValue::ln_1p(y).minus(LogValue::new(poly.value(), 0))
    }
}

/// Binomial expansion of `ζ_{√Δ+α}` around `ζ_Δ(k/2)`; see the module docs of
/// [`mellin`] for where the `ζ_Δ` data come from.
fn shifted_binomial(cs: &CrossSection, alpha: f64, opts: MellinOptions) -> Result<RegularizedDet> {
    let heat = heat_expansion(cs)?;
    let d = heat.cross_dim;
    let order = d + 8;
    let engine = MellinEngine::new(cs, opts)?;
    let (_, dz, mut bound) = engine.at_zero()?;
    let q0 = kernel_dim(cs);

    let mut acc = LogSum::default();
    if q0 > 0 {
        let z = LogValue::ln(alpha);
        acc.add(LogValue::new(q0 as f64 * z.re, q0 as i64 * z.phase));
    }
    acc.add(LogValue::new(-0.5 * dz, 0));

    let mut harmonic = 0.0;
    for k in 1..=order {
        let (zp, b) = engine.zeta(k as f64 / 2.0)?;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let coef = sign * alpha.powi(k as i32) / k as f64;
        acc.add(LogValue::new(-coef * (zp.value + 2.0 * zp.residue * harmonic), 0));
        bound += coef.abs() * b;
        harmonic += 1.0 / k as f64;
    }

    let weyl = cs.weyl_bound();
    let p = (order as f64 + 1.0) / 2.0;
    let tail_at = |lam: f64| {
        let r = alpha.abs() / lam.sqrt();
        if r >= 0.5 {
            return f64::INFINITY;
        }
        weyl.tail_power(p, lam) * alpha.abs().powi(order as i32 + 1) / ((order as f64 + 1.0) * (1.0 - r))
    };
    let lam = match cs {
        CrossSection::Explicit(e) => e.cutoff(),
        _ => {
            let mut lam = (4.0 * alpha * alpha).max(100.0);
            while tail_at(lam) > 1e-3 * opts.target {
                lam *= 2.0;
            }
            lam
        }
    };
    let tail = tail_at(lam);
    if tail > opts.target.max(1e-12) {
        return Err(Error::InsufficientSpectrum {
            needed: lam * (tail / opts.target).powf(1.0 / (p - d as f64 / 2.0)),
            max_cutoff: lam,
        });
    }
    bound += tail;
    let modes = positive_spectrum(cs, lam)?;
    let tol = 1e-12 * alpha.abs().max(1.0);
    let terms = ordered_map(&modes, |e| {
        let x = e.eigenvalue.sqrt();
        if (x + alpha).abs() <= tol {
            return Err(Error::SingularShift { eigenvalue: e.eigenvalue });
        }
        let v = log1p_taylor_tail(alpha / x, order);
        Ok(LogValue::new(e.multiplicity as f64 * v.re, e.multiplicity as i64 * v.phase))
    });
    for t in terms {
        acc.add(t?);
    }
    let v = acc.value();
    Ok(RegularizedDet {
        log_modulus: v.re,
        phase_multiple: v.phase,
        excluded_zero_modes: 0,
        tail_bound: bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::{ExplicitSpectrum, HeatExpansion, SpectrumEntry};
    use approx::assert_abs_diff_eq;

    fn mellin() -> Backend {
        Backend::numeric(MellinOptions::default())
    }

    pub(crate) fn explicit_circle(l: f64, kmax: u64, coeffs: usize) -> CrossSection {
        let c = 2.0 * PI / l;
        let mut entries = vec![SpectrumEntry::new(0.0, 1)];
        for k in 1..=kmax {
            entries.push(SpectrumEntry::new((c * k as f64).powi(2), 2));
        }
        let mut a = vec![0.0; coeffs];
        a[0] = l / (4.0 * PI).sqrt();
        let heat = HeatExpansion::new(1, a).unwrap();
        CrossSection::explicit(ExplicitSpectrum::new(entries, 1, Some(heat), None).unwrap())
    }

    #[test]
    fn circle_zeta_closed_values() {
        let cs = CrossSection::circle(2.0 * PI).unwrap();
        let z = zeta_point(&cs, 0.0, false).unwrap();
        assert_abs_diff_eq!(z.value, -1.0, epsilon = 1e-14);
        assert_eq!(z.residue, 0.0);
        assert_abs_diff_eq!(zeta_point(&cs, 0.0, true).unwrap().value, 0.0, epsilon = 1e-14);
        for l in [1.0, 2.0 * PI, 7.5] {
            let cs = CrossSection::circle(l).unwrap();
            let z = zeta_point(&cs, -0.5, false).unwrap();
            assert_eq!(z.residue, 0.0);
            assert_abs_diff_eq!(z.value, -PI / (3.0 * l), epsilon = 1e-13);
        }
    }

    #[test]
    fn point_zeta_is_empty() {
        let z = zeta_point(&CrossSection::Point, 0.0, false).unwrap();
        assert_eq!(z.value, 0.0);
        assert_eq!(log_det_star(&CrossSection::Point).unwrap().log_modulus, 0.0);
    }

    #[test]
    fn circle_det_star_is_length_squared() {
        for l in [0.7, 2.0 * PI, 10.0] {
            let cs = CrossSection::circle(l).unwrap();
            let d = log_det_star(&cs).unwrap();
            assert_abs_diff_eq!(d.log_modulus, 2.0 * l.ln(), epsilon = 1e-14);
            assert_eq!(d.excluded_zero_modes, 1);
            let m = log_det_star_with(&cs, mellin()).unwrap();
            assert_abs_diff_eq!(m.log_modulus, 2.0 * l.ln(), epsilon = 1e-10);
        }
    }

    #[test]
    fn mellin_circle_matches_closed_form_off_zero() {
        let cs = CrossSection::circle(2.0 * PI).unwrap();
        for s in [-0.5, 0.25, 0.5, 0.75, 1.0, 1.5, 3.0] {
            let a = zeta_point(&cs, s, false).unwrap();
            let b = zeta_point_with(&cs, s, false, mellin()).unwrap();
            assert_abs_diff_eq!(a.value, b.value, epsilon = 1e-10);
            assert_abs_diff_eq!(a.residue, b.residue, epsilon = 1e-12);
        }
    }

    #[test]
    fn mellin_is_split_independent() {
        let cs = CrossSection::flat_torus(2.0, 3.0).unwrap();
        let base = log_det_star_with(&cs, mellin()).unwrap().log_modulus;
        for split in [0.3, 0.5, 2.0, 4.0] {
            let b = Backend::numeric(MellinOptions { split, ..Default::default() });
            assert_abs_diff_eq!(log_det_star_with(&cs, b).unwrap().log_modulus, base, epsilon = 1e-10);
        }
        let ex = explicit_circle(2.0 * PI, 120, 3);
        for split in [0.5, 1.0, 2.0] {
            let b = Backend::numeric(MellinOptions { split, ..Default::default() });
            let v = log_det_star_with(&ex, b).unwrap().log_modulus;
            assert_abs_diff_eq!(v, 2.0 * (2.0 * PI).ln(), epsilon = 1e-9);
        }
    }

    #[test]
    fn explicit_circle_matches_closed_form() {
        let ex = explicit_circle(2.0 * PI, 120, 3);
        let closed = CrossSection::circle(2.0 * PI).unwrap();
        assert_abs_diff_eq!(
            log_det_star(&ex).unwrap().log_modulus,
            log_det_star(&closed).unwrap().log_modulus,
            epsilon = 1e-8
        );
        let z = zeta_point(&ex, -0.5, false).unwrap();
        assert_abs_diff_eq!(z.value, -1.0 / 6.0, epsilon = 1e-8);
        assert_abs_diff_eq!(z.residue, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn explicit_without_enough_heat_data_is_unsupported() {
        let ex = explicit_circle(2.0 * PI, 120, 1);
        assert!(matches!(
            zeta_point(&ex, -0.5, false),
            Err(Error::ContinuationUnsupported { .. })
        ));
        assert!(matches!(
            zeta_point(&ex, -1.0, false),
            Err(Error::ContinuationUnsupported { .. })
        ));
    }

    #[test]
    fn zeta_above_dimension_matches_direct_sum() {
        let cs = CrossSection::flat_torus(2.0 * PI, 4.0).unwrap();
        let s = 2.5;
        let direct: f64 = positive_spectrum(&cs, 4e6)
            .unwrap()
            .iter()
            .map(|e| e.multiplicity as f64 * e.eigenvalue.powf(-s))
            .collect::<NeumaierSum>()
            .value();
        // The omitted tail is below 3e-9 (∫ 2π r r^{-5} dr beyond r = 2000 with unit-area cells scaled).
        let z = zeta_point(&cs, s, false).unwrap();
        assert_abs_diff_eq!(z.value, direct, epsilon = 1e-8);
        let circle = CrossSection::circle(3.0).unwrap();
        let c = 2.0 * PI / 3.0;
        let direct: f64 = (1..200_000).map(|k| 2.0 * (c * k as f64).powf(-3.0)).collect::<NeumaierSum>().value();
        assert_abs_diff_eq!(zeta_point(&circle, 1.5, false).unwrap().value, direct, epsilon = 1e-10);
    }

    #[test]
    fn shifted_point_and_circle() {
        assert_abs_diff_eq!(log_det_shifted(&CrossSection::Point, 2.5).unwrap().log_modulus, 2.5f64.ln());
        let p = log_det_shifted(&CrossSection::Point, -2.0).unwrap();
        assert_eq!(p.phase_multiple, 1);
        let tiny = log_det_shifted(&CrossSection::Point, 1e-8).unwrap();
        assert_abs_diff_eq!(tiny.log_modulus, 1e-8f64.ln(), epsilon = 1e-6);
        let cs = CrossSection::circle(2.0 * PI).unwrap();
        assert_abs_diff_eq!(
            log_det_shifted(&cs, 1.0).unwrap().log_modulus,
            (2.0 * PI).ln(),
            epsilon = 1e-13
        );
        assert!(matches!(log_det_shifted(&cs, -1.0), Err(Error::SingularShift { .. })));
        assert!(matches!(log_det_shifted(&cs, 0.0), Err(Error::SingularShift { .. })));
    }

    #[test]
    fn shifted_numeric_matches_closed_form() {
        for l in [2.0 * PI, 3.0] {
            let cs = CrossSection::circle(l).unwrap();
            for alpha in [0.3, 1.7, -0.4, -2.5] {
                let a = log_det_shifted(&cs, alpha).unwrap();
                let b = log_det_shifted_with(&cs, alpha, mellin()).unwrap();
                assert_abs_diff_eq!(a.log_modulus, b.log_modulus, epsilon = 1e-9);
                assert_eq!(a.phase_multiple, b.phase_multiple, "l={l} alpha={alpha}");
            }
        }
        let ex = explicit_circle(2.0 * PI, 200, 3);
        let closed = log_det_shifted(&CrossSection::circle(2.0 * PI).unwrap(), 0.3).unwrap();
        assert_abs_diff_eq!(log_det_shifted(&ex, 0.3).unwrap().log_modulus, closed.log_modulus, epsilon = 1e-8);
    }

    #[test]
    fn shifted_torus_derivative_in_alpha() {
        // d/dα ln Det(√Δ+α) = Fp_{s=1} Σ (√μ+α)^{-s}
        //   = 1/α + ζ_Δ(1/2) − α (Fp ζ_Δ(1) + 2 a0) + Σ_{μ>0} α² / (μ (√μ+α)).
        let cs = CrossSection::flat_torus(2.0 * PI, 2.0 * PI).unwrap();
        let a0 = heat_expansion(&cs).unwrap().coeffs[0];
        let (a, h) = (0.6, 1e-4);
        let plus = log_det_shifted(&cs, a + h).unwrap().log_modulus;
        let minus = log_det_shifted(&cs, a - h).unwrap().log_modulus;
        let deriv = (plus - minus) / (2.0 * h);

        let z_half = zeta_point(&cs, 0.5, false).unwrap();
        let z_one = zeta_point(&cs, 1.0, false).unwrap();
        assert_abs_diff_eq!(z_one.residue, a0, epsilon = 1e-12);
        let lam = 1e5;
        let rem: f64 = positive_spectrum(&cs, lam)
            .unwrap()
            .iter()
            .map(|e| e.multiplicity as f64 * a * a / (e.eigenvalue * (e.eigenvalue.sqrt() + a)))
            .collect::<NeumaierSum>()
            .value();
        // Weyl density a0 dμ beyond the cutoff.
        let tail = 2.0 * a0 * a * a / lam.sqrt() - a0 * a.powi(3) / lam;
        let expected = 1.0 / a + z_half.value - a * (z_one.value + 2.0 * a0) + rem + tail;
        assert_abs_diff_eq!(deriv, expected, epsilon = 1e-5);
    }

    #[test]
    fn progression_matches_hurwitz() {
        for (c, a) in [(1.0f64, 0.3), (2.0, 2.5), (0.5, 1.0)] {
            let (_, dz) = hurwitz_zeta_with_derivative(0.0, a).unwrap();
            let z0 = 0.5 - a;
            let expected = c.ln() * z0 - dz;
            assert_abs_diff_eq!(log_det_progression(c, a).unwrap().re, expected, epsilon = 1e-13);
        }
        let neg = log_det_progression(1.0, -1.5).unwrap();
        assert_eq!(neg.phase, 2);
        assert!(matches!(log_det_progression(1.0, -2.0), Err(Error::SingularShift { .. })));
    }
}
