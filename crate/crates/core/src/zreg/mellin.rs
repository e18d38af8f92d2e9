//! Mellin-split evaluation of `ζ_Δ(s)` from heat data and the spectrum.
//!
//! `Γ(s) ζ(s) = P(s) + G(s)` with
//! `P(s) = Σ_j a_j T^{s+j-d/2}/(s+j-d/2) - q0 T^s/s` continued in closed form and
//! `G(s) = ∫_0^T t^{s-1} R(t) dt + Σ_{μ>0} m μ^{-s} Γ(s, μT)`, `R = K - H`.

use super::special::{digamma, inv_gamma, upper_incomplete_gamma, EULER_GAMMA};
use super::ZetaPoint;
use crate::error::{Error, Result};
use crate::quad::integrate;
use crate::spectra::{
    flat_heat_and_remainder, heat_expansion, kernel_dim, positive_spectrum, CrossSection, HeatExpansion,
    SpectrumEntry,
};
use crate::sum::{ordered_map, NeumaierSum};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MellinOptions {
    /// Split point `T` between the heat-model and spectral regions.
    pub split: f64,
    /// Absolute accuracy target.
    pub target: f64,
    /// Multiplier on the adaptively chosen spectral cutoff (model manifolds only).
    pub cutoff_scale: f64,
}

impl Default for MellinOptions {
    fn default() -> Self {
        Self { split: 1.0, target: 1e-10, cutoff_scale: 1.0 }
    }
}

/// Largest tolerated truncation estimate before the backend gives up.
const MAX_TRUNCATION: f64 = 1e-6;

/// `t_lo Λ` for explicit spectra: below `t_lo` the list is not trusted.
const EXPLICIT_TLO_SCALE: f64 = 40.0;

pub(crate) struct MellinEngine<'a> {
    cs: &'a CrossSection,
    heat: HeatExpansion,
    q0: f64,
    split: f64,
    target: f64,
    modes: Vec<SpectrumEntry>,
    cutoff: f64,
    t_lo: f64,
}

impl<'a> MellinEngine<'a> {
    pub(crate) fn new(cs: &'a CrossSection, opts: MellinOptions) -> Result<Self> {
        let split = opts.split;
        if !(split > 0.0) || !split.is_finite() {
            return Err(Error::invalid(format!("Mellin split point must be positive, got {split}")));
        }
        let heat = heat_expansion(cs)?;
        let q0 = kernel_dim(cs) as f64;
        let target = opts.target.max(1e-16);
        let (cutoff, t_lo) = match cs {
            CrossSection::Explicit(e) => {
                let t_lo = EXPLICIT_TLO_SCALE / e.cutoff();
                if t_lo >= split {
                    return Err(Error::InsufficientSpectrum {
                        needed: EXPLICIT_TLO_SCALE / split,
                        max_cutoff: e.cutoff(),
                    });
                }
                (e.cutoff(), t_lo)
            }
            _ => {
                let w = cs.weyl_bound();
                let mut lam = 50.0 / split;
                while 2.0 / (lam * split) * w.tail_exp(split, lam) > 1e-3 * target {
                    lam *= 2.0;
                }
                (lam * opts.cutoff_scale.max(1.0), flat_lower_limit(cs).min(split))
            }
        };
        let modes = positive_spectrum(cs, cutoff)?;
        Ok(Self { cs, heat, q0, split, target, modes, cutoff, t_lo })
    }

    fn d_half(&self) -> f64 {
        self.heat.cross_dim as f64 / 2.0
    }

    fn remainder(&self, t: f64) -> f64 {
        if let Some((_, r)) = flat_heat_and_remainder(self.cs, t) {
            return r;
        }
        let mut k = NeumaierSum::new();
        k.add(self.q0);
        for e in &self.modes {
            k.add(e.multiplicity as f64 * (-t * e.eigenvalue).exp());
        }
        k.value() - self.heat.evaluate(t)
    }

    /// `(G(s), truncation bound)`.
    fn g(&self, s: f64) -> Result<(f64, f64)> {
        let (lo, hi) = (self.t_lo.ln(), self.split.ln());
        let (integral, qerr) = if lo < hi {
            integrate(&|x: f64| (s * x).exp() * self.remainder(x.exp()), lo, hi, 1e-3 * self.target)?
        } else {
            (0.0, 0.0)
        };
        let t = self.split;
        let terms = ordered_map(&self.modes, |e| {
            upper_incomplete_gamma(s, e.eigenvalue * t).map(|g| e.multiplicity as f64 * e.eigenvalue.powf(-s) * g)
        });
        let mut sum = NeumaierSum::new();
        for v in terms {
            sum.add(v?);
        }
        let mut bound = qerr + 2.0 * t.powf(s - 1.0) / self.cutoff * self.cs.weyl_bound().tail_exp(t, self.cutoff);
        if let CrossSection::Explicit(_) = self.cs {
            let order = self.heat.order() as f64;
            let p = s + order + 1.0 - self.d_half();
            bound += (self.remainder(self.t_lo) * self.t_lo.powf(s) / p).abs();
            if bound > MAX_TRUNCATION {
                return Err(Error::NonConvergence {
                    what: format!("Mellin remainder at s={s} (explicit spectrum too short)"),
                    achieved: bound,
                });
            }
        }
        Ok((integral + sum.value(), bound))
    }

    fn check_supported(&self, s: f64) -> Result<()> {
        if s < 0.0 && s == s.floor() {
            return Err(Error::ContinuationUnsupported {
                s,
                reason: "negative integers are outside the supported strip".into(),
            });
        }
        if s < 0.0 && s != -0.5 {
            return Err(Error::ContinuationUnsupported {
                s,
                reason: "only s = 0, s = -1/2 and s > 0 are supported".into(),
            });
        }
        let order = self.heat.order();
        if order != usize::MAX && s + order as f64 + 1.0 - self.d_half() <= 0.0 {
            return Err(Error::ContinuationUnsupported {
                s,
                reason: format!("heat expansion of order {order} is too short"),
            });
        }
        Ok(())
    }

    /// Index `j0` with `s + j0 - d/2 = 0`, when it exists.
    fn pole_index(&self, s: f64) -> Option<usize> {
        let u = self.d_half() - s;
        if u >= 0.0 && (2.0 * u).fract() == 0.0 && u.fract() == 0.0 {
            Some(u as usize)
        } else {
            None
        }
    }

    /// `Σ_{j ≠ skip} a_j T^{s+j-d/2}/(s+j-d/2)`.
    fn heat_part(&self, s: f64, skip: Option<usize>) -> f64 {
        let t = self.split;
        self.heat
            .coeffs
            .iter()
            .enumerate()
            .filter(|(j, _)| Some(*j) != skip)
            .map(|(j, a)| {
                let e = s + j as f64 - self.d_half();
                a * t.powf(e) / e
            })
            .collect::<NeumaierSum>()
            .value()
    }

    pub(crate) fn zeta(&self, s: f64) -> Result<(ZetaPoint, f64)> {
        self.check_supported(s)?;
        if s == 0.0 {
            let (z, _, b) = self.at_zero()?;
            return Ok((ZetaPoint { s, value: z, residue: 0.0 }, b));
        }
        let t = self.split;
        let (g, bound) = self.g(s)?;
        let zero_part = -self.q0 * t.powf(s) / s;
        match self.pole_index(s) {
            Some(j0) => {
                let a = self.heat.coeff(j0).unwrap_or(0.0);
                let ig = inv_gamma(s);
                let rest = self.heat_part(s, Some(j0)) + zero_part + g;
                let fp = ig * (a * t.ln() + rest) - a * digamma(s)? * ig;
                Ok((ZetaPoint { s, value: fp, residue: a * ig }, bound * ig.abs()))
            }
            None => {
                let ig = inv_gamma(s);
                let v = ig * (self.heat_part(s, None) + zero_part + g);
                Ok((ZetaPoint { s, value: v, residue: 0.0 }, bound * ig.abs()))
            }
        }
    }

    /// `(ζ(0), ζ'(0), bound)`.
    pub(crate) fn at_zero(&self) -> Result<(f64, f64, f64)> {
        let jd = self.pole_index(0.0);
        let a_half = match jd {
            Some(j) => self.heat.require(j)?,
            None => 0.0,
        };
        let big_a = a_half - self.q0;
        let (g0, bound) = self.g(0.0)?;
        let p0 = self.heat_part(0.0, jd) + big_a * self.split.ln();
        let deriv = [EULER_GAMMA * big_a, p0, g0].into_iter().collect::<NeumaierSum>().value();
        Ok((big_a, deriv, bound))
    }
}

/// Below this `t` the flat remainder is under `e^{-100}` relative to the leading term.
fn flat_lower_limit(cs: &CrossSection) -> f64 {
    match cs {
        CrossSection::Point => 1.0,
        CrossSection::Circle { circumference } => circumference.powi(2) / 400.0,
        CrossSection::FlatTorus { l1, l2 } => l1.min(*l2).powi(2) / 400.0,
        CrossSection::Explicit(_) => unreachable!("explicit spectra use the list cutoff"),
    }
}
