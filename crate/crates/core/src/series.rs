//! Convergent sums `Σ_{μ>0} m f(√μ)` over the cross-section spectrum with
//! exponentially decaying terms, and the shared precision settings.

use crate::error::{Error, Result};
use crate::spectra::{positive_spectrum, CrossSection};
use crate::sum::{ordered_map, LogSum, LogValue};
use crate::zreg::{Backend, MellinOptions};
use serde::{Deserialize, Serialize};

/// Accuracy knobs shared by every spectral computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Precision {
    /// Absolute accuracy target for regularized quantities.
    pub target: f64,
    /// Every adaptively chosen spectral cutoff is multiplied by this factor.
    pub cutoff_scale: f64,
    /// Mellin split point `T`.
    pub split: f64,
}

impl Default for Precision {
    fn default() -> Self {
        Self { target: 1e-10, cutoff_scale: 1.0, split: 1.0 }
    }
}

impl Precision {
    pub fn with_target(target: f64) -> Self {
        Self { target, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.target > 0.0) || !self.target.is_finite() {
            return Err(Error::invalid(format!("target must be positive, got {}", self.target)));
        }
        if !(self.cutoff_scale >= 1.0) || !self.cutoff_scale.is_finite() {
            return Err(Error::invalid(format!("cutoff scale must be >= 1, got {}", self.cutoff_scale)));
        }
        if !(self.split > 0.0) || !self.split.is_finite() {
            return Err(Error::invalid(format!("split point must be positive, got {}", self.split)));
        }
        Ok(())
    }

    pub fn mellin(&self) -> MellinOptions {
        MellinOptions {
            split: self.split,
            target: self.target,
            cutoff_scale: self.cutoff_scale,
        }
    }

    pub fn backend(&self) -> Backend {
        Backend { closed_forms: true, mellin: self.mellin() }
    }
}

/// A summed series with its certified truncation bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub value: f64,
    pub phase: i64,
    pub tail_bound: f64,
    /// Spectral cutoff `Λ` actually used.
    pub cutoff: f64,
}

impl SeriesValue {
    pub fn log_value(&self) -> LogValue {
        LogValue::new(self.value, self.phase)
    }
}

/// Envelope `|f(x)| ≤ c e^{-βx}` valid for `x ≥ x_min`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decay {
    pub beta: f64,
    pub c: f64,
    pub x_min: f64,
}

impl Decay {
    /// Envelope of `ln(1 - r(x) e^{-βx})` given `|r| ≤ r_max` for `x ≥ x0`.
    pub fn log1m_ratio(beta: f64, r_max: f64, x0: f64) -> Self {
        // |ln(1 - y)| ≤ 2|y| for |y| ≤ 1/2
        let x_min = x0.max((2.0 * r_max).ln() / beta).max(0.0);
        Self { beta, c: 2.0 * r_max, x_min }
    }
}

/// `Σ_{μ>0} m f(√μ)` with an adaptive cutoff; `f` returns `None` at a
/// singular term.
pub fn exp_series<F>(cs: &CrossSection, decay: Decay, prec: &Precision, f: F) -> Result<SeriesValue>
where
    F: Fn(f64) -> std::result::Result<LogValue, f64> + Sync + Send,
{
    if !(decay.beta > 0.0) {
        return Err(Error::invalid(format!("series decay rate must be positive, got {}", decay.beta)));
    }
    let weyl = cs.weyl_bound();
    let bound_at = |lam: f64| decay.c * weyl.tail_exp_sqrt(decay.beta, lam);
    let mut needed = (decay.x_min * decay.x_min).max(1.0);
    while bound_at(needed) > 1e-3 * prec.target {
        needed *= 2.0;
    }
    let mut lam = needed * prec.cutoff_scale;
    let max_cutoff = cs.max_cutoff();
    if lam > max_cutoff {
        lam = max_cutoff;
        if lam < decay.x_min * decay.x_min || bound_at(lam) > prec.target {
            return Err(Error::InsufficientSpectrum { needed, max_cutoff });
        }
    }
    let modes = positive_spectrum(cs, lam)?;
    let terms = ordered_map(&modes, |e| {
        f(e.eigenvalue.sqrt())
            .map(|v| LogValue::new(e.multiplicity as f64 * v.re, e.multiplicity as i64 * v.phase))
            .map_err(|_| e.eigenvalue)
    });
    let mut acc = LogSum::default();
    for t in terms {
        acc.add(t.map_err(|mu| Error::SingularSeriesTerm { mu })?);
    }
    let v = acc.value();
    Ok(SeriesValue {
        value: v.re,
        phase: v.phase,
        tail_bound: bound_at(lam),
        cutoff: lam,
    })
}

/// Relative tolerance under which a would-be vanishing factor counts as zero.
pub const SINGULAR_RTOL: f64 = 1e-7;

pub(crate) fn is_singular(value: f64, scale: f64) -> bool {
    value.abs() <= SINGULAR_RTOL * scale.abs().max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn circle_log1m_exp_matches_direct_sum() {
        let cs = CrossSection::circle(2.0 * PI).unwrap();
        let l = 1.0;
        let s = exp_series(&cs, Decay::log1m_ratio(2.0 * l, 1.0, 0.0), &Precision::default(), |x| {
            Ok(LogValue::ln_1p(-(-2.0 * l * x).exp()))
        })
        .unwrap();
        let direct: f64 = (1..200).map(|k| 2.0 * (-(-2.0 * k as f64).exp()).ln_1p()).sum();
        assert!((s.value - direct).abs() < 1e-15);
        assert!(s.tail_bound < 1e-12);
        assert_eq!(s.phase, 0);
    }

    #[test]
    fn explicit_spectrum_reports_shortfall() {
        let cs = CrossSection::from_explicit_json(
            r#"{"dim": 1, "entries": [[0, 1], [1, 2], [4, 2]], "heat": {"coeffs": [1.0]}}"#,
        )
        .unwrap();
        let r = exp_series(&cs, Decay::log1m_ratio(0.1, 1.0, 0.0), &Precision::default(), |x| {
            Ok(LogValue::ln_1p(-(-0.1 * x).exp()))
        });
        assert!(matches!(r, Err(Error::InsufficientSpectrum { .. })));
    }

    #[test]
    fn singular_term_is_reported() {
        let cs = CrossSection::circle(2.0 * PI).unwrap();
        let r = exp_series(&cs, Decay::log1m_ratio(2.0, 1.0, 0.0), &Precision::default(), |x| {
            if (x - 2.0).abs() < 1e-9 {
                Err(x)
            } else {
                Ok(LogValue::default())
            }
        });
        assert_eq!(r, Err(Error::SingularSeriesTerm { mu: 4.0 }));
    }
}
