//! Cross-section models: the closed manifold `Y`, its Laplace spectrum and
//! heat-trace data.

use crate::error::{Error, Result};
use crate::sum::NeumaierSum;
use crate::zreg::special::{gamma, upper_incomplete_gamma};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub eigenvalue: f64,
    pub multiplicity: u64,
}

impl SpectrumEntry {
    pub fn new(eigenvalue: f64, multiplicity: u64) -> Self {
        Self { eigenvalue, multiplicity }
    }
}

/// Coefficients of `Tr e^{-tΔ_Y} ~ Σ_j a_j t^{j - d/2}`, `d = cross_dim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatExpansion {
    pub cross_dim: usize,
    pub coeffs: Vec<f64>,
    /// All coefficients past `coeffs` vanish and the remainder is
    /// exponentially small (flat cross-sections).
    #[serde(default)]
    pub exact: bool,
}

impl HeatExpansion {
    pub fn new(cross_dim: usize, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("heat coefficients must be finite"));
        }
        Ok(Self { cross_dim, coeffs, exact: false })
    }

    fn flat(cross_dim: usize, a0: f64) -> Self {
        Self { cross_dim, coeffs: vec![a0], exact: true }
    }

    /// `a_j`, or `None` when the expansion is not known that far.
    pub fn coeff(&self, j: usize) -> Option<f64> {
        match self.coeffs.get(j) {
            Some(&c) => Some(c),
            None if self.exact => Some(0.0),
            None => None,
        }
    }

    pub fn require(&self, j: usize) -> Result<f64> {
        self.coeff(j).ok_or(Error::MissingHeatCoefficient { index: j })
    }

    /// `a_{d/2 - k}`, taken as zero when the index is half-integral.
    pub fn half_index(&self, k: usize) -> Result<f64> {
        if self.cross_dim % 2 == 1 || 2 * k > self.cross_dim {
            return Ok(0.0);
        }
        self.require(self.cross_dim / 2 - k)
    }

    /// Highest order covered (`usize::MAX` for flat data).
    pub fn order(&self) -> usize {
        if self.exact {
            usize::MAX
        } else {
            self.coeffs.len().saturating_sub(1)
        }
    }

    /// Truncated expansion `Σ_j a_j t^{j - d/2}` over the stored coefficients.
    pub fn evaluate(&self, t: f64) -> f64 {
        let half = self.cross_dim as f64 / 2.0;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(j, a)| a * t.powf(j as f64 - half))
            .collect::<NeumaierSum>()
            .value()
    }
}

/// An explicitly supplied (truncated) spectrum together with its heat data.
#[derive(Debug, Clone, PartialEq)]
pub struct ExplicitSpectrum {
    entries: Vec<SpectrumEntry>,
    dim: usize,
    heat: Option<HeatExpansion>,
    cutoff: f64,
}

impl ExplicitSpectrum {
    pub fn new(
        entries: Vec<SpectrumEntry>,
        dim: usize,
        heat: Option<HeatExpansion>,
        cutoff: Option<f64>,
    ) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::invalid("explicit spectrum has no entries"));
        }
        for (i, e) in entries.iter().enumerate() {
            if !e.eigenvalue.is_finite() || e.eigenvalue < 0.0 {
                return Err(Error::invalid(format!(
                    "eigenvalue {} at position {i} must be finite and non-negative",
                    e.eigenvalue
                )));
            }
            if e.multiplicity == 0 {
                return Err(Error::invalid(format!("multiplicity at position {i} must be >= 1")));
            }
            if i > 0 && entries[i - 1].eigenvalue >= e.eigenvalue {
                return Err(Error::invalid(format!(
                    "entries must be strictly ascending and pre-merged (position {i})"
                )));
            }
        }
        if let Some(h) = &heat {
            if h.cross_dim != dim {
                return Err(Error::invalid(format!(
                    "heat expansion dimension {} differs from spectrum dimension {dim}",
                    h.cross_dim
                )));
            }
        }
        let largest = entries.last().map(|e| e.eigenvalue).unwrap_or(0.0);
        let cutoff = match cutoff {
            Some(c) if c < largest => {
                return Err(Error::invalid(format!(
                    "declared cutoff {c} is below the largest listed eigenvalue {largest}"
                )))
            }
            Some(c) => c,
            None => largest,
        };
        Ok(Self { entries, dim, heat, cutoff })
    }

    pub fn entries(&self) -> &[SpectrumEntry] {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn heat(&self) -> Option<&HeatExpansion> {
        self.heat.as_ref()
    }

    /// Largest `Λ` up to which the list is known to be complete.
    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CrossSection {
    Point,
    Circle { circumference: f64 },
    FlatTorus { l1: f64, l2: f64 },
    Explicit(ExplicitSpectrum),
}

fn check_length(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be a positive finite length, got {v}")))
    }
}

impl CrossSection {
    pub fn point() -> Self {
        CrossSection::Point
    }

    pub fn circle(circumference: f64) -> Result<Self> {
        check_length("circumference", circumference)?;
        Ok(CrossSection::Circle { circumference })
    }

    pub fn flat_torus(l1: f64, l2: f64) -> Result<Self> {
        check_length("l1", l1)?;
        check_length("l2", l2)?;
        Ok(CrossSection::FlatTorus { l1, l2 })
    }

    pub fn explicit(spec: ExplicitSpectrum) -> Self {
        CrossSection::Explicit(spec)
    }

    /// Parse the explicit-spectrum JSON document
    /// `{"dim": d, "entries": [[mu, mult], ...], "heat": {"coeffs": [...]}}`.
    pub fn from_explicit_json(text: &str) -> Result<Self> {
        let doc: ExplicitDoc =
            serde_json::from_str(text).map_err(|e| Error::invalid(format!("explicit spectrum: {e}")))?;
        let mut entries = Vec::with_capacity(doc.entries.len());
        for (i, (mu, mult)) in doc.entries.into_iter().enumerate() {
            let mu = match mu {
                serde_json::Value::Number(n) => n.as_f64(),
                serde_json::Value::String(s) => s.trim().parse::<f64>().ok(),
                _ => None,
            }
            .ok_or_else(|| Error::invalid(format!("entry {i}: eigenvalue must be a number or decimal string")))?;
            entries.push(SpectrumEntry::new(mu, mult));
        }
        let heat = match doc.heat {
            Some(h) => Some(HeatExpansion::new(doc.dim, h.coeffs)?),
            None => None,
        };
        Ok(CrossSection::Explicit(ExplicitSpectrum::new(entries, doc.dim, heat, doc.cutoff)?))
    }

    pub fn cross_dim(&self) -> usize {
        match self {
            CrossSection::Point => 0,
            CrossSection::Circle { .. } => 1,
            CrossSection::FlatTorus { .. } => 2,
            CrossSection::Explicit(e) => e.dim,
        }
    }

    pub fn is_flat_closed_form(&self) -> bool {
        !matches!(self, CrossSection::Explicit(_))
    }

    /// Largest cutoff for which enumeration is exact (`∞` for the model manifolds).
    pub fn max_cutoff(&self) -> f64 {
        match self {
            CrossSection::Explicit(e) => e.cutoff,
            _ => f64::INFINITY,
        }
    }

    /// Upper bound `N(μ) ≤ Σ_i c_i μ^{i/2}` on the eigenvalue counting function.
    pub fn weyl_bound(&self) -> WeylBound {
        match self {
            CrossSection::Point => WeylBound(vec![1.0]),
            CrossSection::Circle { circumference } => WeylBound(vec![1.0, circumference / PI]),
            CrossSection::FlatTorus { l1, l2 } => {
                // (2√μ/c1 + 1)(2√μ/c2 + 1), c_i = 2π/l_i
                let i1 = l1 / PI;
                let i2 = l2 / PI;
                WeylBound(vec![1.0, i1 + i2, i1 * i2])
            }
            CrossSection::Explicit(e) => {
                let listed: u64 = e.entries.iter().map(|x| x.multiplicity).sum();
                let a0 = e.heat.as_ref().and_then(|h| h.coeff(0)).unwrap_or(1.0).abs();
                let d = e.dim;
                let lead = 2.0 * a0 / gamma(d as f64 / 2.0 + 1.0).unwrap_or(1.0);
                let mut c = vec![0.0; d + 1];
                c[0] = listed as f64;
                c[d] += lead;
                WeylBound(c)
            }
        }
    }
}

impl fmt::Display for CrossSection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CrossSection::Point => write!(f, "point"),
            CrossSection::Circle { circumference } => write!(f, "circle:{circumference}"),
            CrossSection::FlatTorus { l1, l2 } => write!(f, "torus:{l1},{l2}"),
            CrossSection::Explicit(e) => write!(
                f,
                "explicit(dim={}, entries={}, cutoff={})",
                e.dim,
                e.entries.len(),
                e.cutoff
            ),
        }
    }
}

#[derive(Deserialize)]
struct ExplicitDoc {
    dim: usize,
    entries: Vec<(serde_json::Value, u64)>,
    heat: Option<HeatDoc>,
    cutoff: Option<f64>,
}

#[derive(Deserialize)]
struct HeatDoc {
    coeffs: Vec<f64>,
}

/// Polynomial in `√μ` bounding the counting function from above.
#[derive(Debug, Clone, PartialEq)]
pub struct WeylBound(pub Vec<f64>);

impl WeylBound {
    pub fn count(&self, mu: f64) -> f64 {
        let x = mu.max(0.0).sqrt();
        self.0.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    /// Upper bound on `Σ_{μ>Λ} e^{-β√μ}` (with multiplicity).
    pub fn tail_exp_sqrt(&self, beta: f64, cutoff: f64) -> f64 {
        // Summation by parts: ∫_{√Λ}^∞ N(x²) β e^{-βx} dx, plus nothing at the
        // lower limit since N ≥ 0.
        let x0 = cutoff.max(0.0).sqrt();
        let y = beta * x0;
        let mut total = 0.0;
        for (i, c) in self.0.iter().enumerate() {
            if *c == 0.0 {
                continue;
            }
            // ∫_{x0}^∞ x^i β e^{-βx} dx = Γ(i+1, y) / β^i
            let g = gamma_int_upper(i, y);
            total += c * g / beta.powi(i as i32);
        }
        total
    }

    /// Upper bound on `Σ_{μ>Λ} e^{-Tμ}`.
    pub fn tail_exp(&self, t: f64, cutoff: f64) -> f64 {
        let y = t * cutoff;
        let mut total = 0.0;
        for (i, c) in self.0.iter().enumerate() {
            if *c == 0.0 {
                continue;
            }
            let h = i as f64 / 2.0;
            // ∫_Λ^∞ μ^{i/2} T e^{-Tμ} dμ = Γ(i/2 + 1, TΛ) / T^{i/2}
            let g = upper_incomplete_gamma(h + 1.0, y).unwrap_or(f64::INFINITY);
            total += c * g / t.powf(h);
        }
        total
    }

    /// Upper bound on `Σ_{μ>Λ} μ^{-p}`; requires `p` above the growth order.
    pub fn tail_power(&self, p: f64, cutoff: f64) -> f64 {
        let mut total = 0.0;
        for (i, c) in self.0.iter().enumerate() {
            if *c == 0.0 {
                continue;
            }
            let h = i as f64 / 2.0;
            if p <= h {
                return f64::INFINITY;
            }
            // ∫_Λ^∞ μ^{i/2} p μ^{-p-1} dμ
            total += c * p * cutoff.powf(h - p) / (p - h);
        }
        total
    }
}

/// `Γ(n+1, y) = n! e^{-y} Σ_{k≤n} y^k/k!`.
fn gamma_int_upper(n: usize, y: f64) -> f64 {
    let mut term = 1.0;
    let mut s = 1.0;
    for k in 1..=n {
        term *= y / k as f64;
        s += term;
    }
    let fact: f64 = (1..=n).map(|k| k as f64).product();
    fact * (-y).exp() * s
}

/// All eigenvalues `≤ cutoff` with exact multiplicities, ascending.
pub fn enumerate_spectrum(cs: &CrossSection, cutoff: f64) -> Result<Vec<SpectrumEntry>> {
    if !(cutoff > 0.0) || cutoff.is_nan() {
        return Err(Error::invalid(format!("cutoff must be positive, got {cutoff}")));
    }
    match cs {
        CrossSection::Point => Ok(vec![SpectrumEntry::new(0.0, 1)]),
        CrossSection::Circle { circumference } => {
            let c = 2.0 * PI / circumference;
            let mut out = vec![SpectrumEntry::new(0.0, 1)];
            let mut k = 1u64;
            loop {
                let mu = (c * k as f64).powi(2);
                if mu > cutoff {
                    break;
                }
                out.push(SpectrumEntry::new(mu, 2));
                k += 1;
            }
            Ok(out)
        }
        CrossSection::FlatTorus { l1, l2 } => Ok(enumerate_torus(*l1, *l2, cutoff)),
        CrossSection::Explicit(e) => {
            if cutoff > e.cutoff {
                return Err(Error::InsufficientSpectrum {
                    needed: cutoff,
                    max_cutoff: e.cutoff,
                });
            }
            Ok(e.entries.iter().copied().filter(|x| x.eigenvalue <= cutoff).collect())
        }
    }
}

/// Nonzero eigenvalues `≤ cutoff`.
pub fn positive_spectrum(cs: &CrossSection, cutoff: f64) -> Result<Vec<SpectrumEntry>> {
    Ok(enumerate_spectrum(cs, cutoff)?
        .into_iter()
        .filter(|e| e.eigenvalue > 0.0)
        .collect())
}

/// Best rational approximation `p/q` with `q ≤ max_den` via continued fractions.
fn rational_approx(x: f64, max_den: u64) -> Option<(u64, u64)> {
    let (mut h0, mut h1) = (0u64, 1u64);
    let (mut k0, mut k1) = (1u64, 0u64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a > 1e12 {
            break;
        }
        let a = a as u64;
        let h2 = a.checked_mul(h1)?.checked_add(h0)?;
        let k2 = a.checked_mul(k1)?.checked_add(k0)?;
        if k2 > max_den {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let p = h1 as f64 / k1 as f64;
        if (p - x).abs() <= 8.0 * f64::EPSILON * x.abs() {
            return Some((h1, k1));
        }
        let frac = r - r.floor();
        if frac == 0.0 {
            break;
        }
        r = 1.0 / frac;
    }
    None
}

fn enumerate_torus(l1: f64, l2: f64, cutoff: f64) -> Vec<SpectrumEntry> {
    let c1 = (2.0 * PI / l1).powi(2);
    let c2 = (2.0 * PI / l2).powi(2);
    let jmax = (cutoff / c1).sqrt().floor() as i64;
    let kmax = (cutoff / c2).sqrt().floor() as i64;
    // Degeneracies are decided on integer keys. When (l1/l2)^2 = P/Q is
    // rational, μ = c2 (P k^2 + Q j^2) / P.
    let ratio2 = (l1 / l2).powi(2);
    let commensurate = rational_approx(ratio2, 1000);
    let mut groups: BTreeMap<(u128, u128), (f64, u64)> = BTreeMap::new();
    for j in 0..=jmax {
        for k in 0..=kmax {
            let mu = c1 * (j * j) as f64 + c2 * (k * k) as f64;
            if mu > cutoff {
                continue;
            }
            let (jj, kk) = ((j * j) as u128, (k * k) as u128);
            let key = match commensurate {
                Some((p, q)) => {
                    let n = p as u128 * kk + q as u128 * jj;
                    (n, 0)
                }
                None => (jj, kk),
            };
            let mult = if j == 0 { 1 } else { 2 } * if k == 0 { 1 } else { 2 };
            let value = match commensurate {
                Some((p, _)) => c2 * key.0 as f64 / p as f64,
                None => mu,
            };
            groups.entry(key).or_insert((value, 0)).1 += mult;
        }
    }
    let mut out: Vec<SpectrumEntry> = groups
        .into_values()
        .map(|(mu, m)| SpectrumEntry::new(mu, m))
        .collect();
    out.sort_by(|a, b| a.eigenvalue.total_cmp(&b.eigenvalue));
    out
}

pub fn heat_coefficients(cs: &CrossSection, order: usize) -> Result<HeatExpansion> {
    let mut h = heat_expansion(cs)?;
    if h.exact {
        h.coeffs.resize(order + 1, 0.0);
    } else if h.coeffs.len() > order + 1 {
        h.coeffs.truncate(order + 1);
    } else if h.coeffs.len() < order + 1 {
        return Err(Error::MissingHeatCoefficient { index: h.coeffs.len() });
    }
    Ok(h)
}

/// Full stored heat expansion of the cross-section.
pub fn heat_expansion(cs: &CrossSection) -> Result<HeatExpansion> {
    match cs {
        CrossSection::Point => Ok(HeatExpansion::flat(0, 1.0)),
        CrossSection::Circle { circumference } => {
            Ok(HeatExpansion::flat(1, circumference / (4.0 * PI).sqrt()))
        }
        CrossSection::FlatTorus { l1, l2 } => Ok(HeatExpansion::flat(2, l1 * l2 / (4.0 * PI))),
        CrossSection::Explicit(e) => e.heat.clone().ok_or(Error::HeatDataRequired),
    }
}

pub fn kernel_dim(cs: &CrossSection) -> u64 {
    match cs {
        CrossSection::Explicit(e) => e
            .entries
            .first()
            .filter(|x| x.eigenvalue == 0.0)
            .map(|x| x.multiplicity)
            .unwrap_or(0),
        _ => 1,
    }
}

/// `Σ_{n≥1} e^{-π y n²}` for `y ≥ 1/2`.
fn theta_tail(y: f64) -> f64 {
    let mut acc = 0.0;
    let mut n = 1.0f64;
    loop {
        let term = (-PI * y * n * n).exp();
        acc += term;
        if term < 1e-18 * acc.max(1e-300) || term == 0.0 {
            break;
        }
        n += 1.0;
    }
    acc
}

/// `(θ(x), θ(x) - x^{-1/2})` for `θ(x) = Σ_{k∈Z} e^{-π x k²}`.
fn theta_and_remainder(x: f64) -> (f64, f64) {
    if x >= 1.0 {
        let th = 1.0 + 2.0 * theta_tail(x);
        (th, th - x.powf(-0.5))
    } else {
        let s = x.powf(-0.5);
        let dual = 2.0 * theta_tail(1.0 / x);
        (s * (1.0 + dual), s * dual)
    }
}

/// `(K(t), K(t) - a_0 t^{-d/2})` evaluated exactly for the model manifolds.
pub(crate) fn flat_heat_and_remainder(cs: &CrossSection, t: f64) -> Option<(f64, f64)> {
    match cs {
        CrossSection::Point => Some((1.0, 0.0)),
        CrossSection::Circle { circumference } => {
            Some(theta_and_remainder(4.0 * PI * t / circumference.powi(2)))
        }
        CrossSection::FlatTorus { l1, l2 } => {
            let (k1, r1) = theta_and_remainder(4.0 * PI * t / l1.powi(2));
            let (k2, r2) = theta_and_remainder(4.0 * PI * t / l2.powi(2));
            let x1 = k1 - r1;
            Some((k1 * k2, r1 * k2 + x1 * r2))
        }
        CrossSection::Explicit(_) => None,
    }
}

/// Relative accuracy promised by [`heat_trace`].
pub const HEAT_TRACE_RTOL: f64 = 1e-12;

/// `Tr e^{-tΔ_Y} = Σ m_j e^{-tμ_j}`.
pub fn heat_trace(cs: &CrossSection, t: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("heat trace needs t > 0, got {t}")));
    }
    if let Some((k, _)) = flat_heat_and_remainder(cs, t) {
        return Ok(k);
    }
    let CrossSection::Explicit(e) = cs else { unreachable!() };
    let value: f64 = e
        .entries
        .iter()
        .map(|x| x.multiplicity as f64 * (-t * x.eigenvalue).exp())
        .collect::<NeumaierSum>()
        .value();
    let tail = cs.weyl_bound().tail_exp(t, e.cutoff);
    if tail > HEAT_TRACE_RTOL * value {
        let needed = e.cutoff + (tail / (HEAT_TRACE_RTOL * value)).ln() / t;
        return Err(Error::InsufficientSpectrum {
            needed,
            max_cutoff: e.cutoff,
        });
    }
    Ok(value)
}

/// Returns the eigenvalue `μ` with `|√μ - target| ≤ rtol · max(target, 1)`, if any.
pub fn sqrt_eigenvalue_collision(cs: &CrossSection, target: f64, rtol: f64) -> Result<Option<f64>> {
    if target < 0.0 {
        return Ok(None);
    }
    let tol = rtol * target.max(1.0);
    let cutoff = (target + tol).powi(2) * (1.0 + 1e-9) + 1e-12;
    if cutoff > cs.max_cutoff() {
        return Err(Error::InsufficientSpectrum {
            needed: cutoff,
            max_cutoff: cs.max_cutoff(),
        });
    }
    Ok(enumerate_spectrum(cs, cutoff)?
        .into_iter()
        .map(|e| e.eigenvalue)
        .find(|mu| (mu.sqrt() - target).abs() <= tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn brute_torus(l1: f64, l2: f64, cutoff: f64) -> Vec<(f64, u64)> {
        let c1 = (2.0 * PI / l1).powi(2);
        let c2 = (2.0 * PI / l2).powi(2);
        let mut vals = Vec::new();
        for j in -60i64..=60 {
            for k in -60i64..=60 {
                let mu = c1 * (j * j) as f64 + c2 * (k * k) as f64;
                if mu <= cutoff {
                    vals.push(mu);
                }
            }
        }
        vals.sort_by(f64::total_cmp);
        let mut out: Vec<(f64, u64)> = Vec::new();
        for v in vals {
            match out.last_mut() {
                Some(last) if (last.0 - v).abs() <= 1e-9 * v.max(1.0) => last.1 += 1,
                _ => out.push((v, 1)),
            }
        }
        out
    }

    #[test]
    fn point_spectrum() {
        let s = enumerate_spectrum(&CrossSection::Point, 10.0).unwrap();
        assert_eq!(s, vec![SpectrumEntry::new(0.0, 1)]);
    }

    #[test]
    fn circle_spectrum() {
        let cs = CrossSection::circle(2.0 * PI).unwrap();
        let s = enumerate_spectrum(&cs, 4.5).unwrap();
        let got: Vec<(f64, u64)> = s.iter().map(|e| (e.eigenvalue, e.multiplicity)).collect();
        assert_eq!(got.len(), 3);
        for (g, w) in got.iter().zip([(0.0, 1), (1.0, 2), (4.0, 2)]) {
            assert_abs_diff_eq!(g.0, w.0, epsilon = 1e-12);
            assert_eq!(g.1, w.1);
        }
    }

    #[test]
    fn square_torus_merges_degenerate_lattice_points() {
        let cs = CrossSection::flat_torus(2.0 * PI, 2.0 * PI).unwrap();
        let s = enumerate_spectrum(&cs, 1.5).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0], SpectrumEntry::new(0.0, 1));
        assert_abs_diff_eq!(s[1].eigenvalue, 1.0, epsilon = 1e-12);
        assert_eq!(s[1].multiplicity, 4);
    }

    #[test]
    fn torus_matches_brute_force_lattice_count() {
        for &(l1, l2) in &[(2.0 * PI, 2.0 * PI), (1.0, 2.0f64.sqrt()), (1.3, 0.7), (2.0, 1.0)] {
            let cutoff = 400.0;
            let ours: Vec<(f64, u64)> = enumerate_spectrum(&CrossSection::flat_torus(l1, l2).unwrap(), cutoff)
                .unwrap()
                .into_iter()
                .map(|e| (e.eigenvalue, e.multiplicity))
                .collect();
            let brute = brute_torus(l1, l2, cutoff);
            assert_eq!(ours.len(), brute.len(), "l1={l1} l2={l2}");
            for (a, b) in ours.iter().zip(&brute) {
                assert_abs_diff_eq!(a.0, b.0, epsilon = 1e-9 * b.0.max(1.0));
                assert_eq!(a.1, b.1);
            }
        }
    }

    #[test]
    fn explicit_validation_and_kernel() {
        let cs = CrossSection::from_explicit_json(
            r#"{"dim": 1, "entries": [[0, 3], ["2.0", 5]], "heat": {"coeffs": [1.0]}}"#,
        )
        .unwrap();
        assert_eq!(kernel_dim(&cs), 3);
        assert!(matches!(
            enumerate_spectrum(&cs, 3.0),
            Err(Error::InsufficientSpectrum { max_cutoff, .. }) if max_cutoff == 2.0
        ));
        let unsorted = CrossSection::from_explicit_json(r#"{"dim": 1, "entries": [[2, 1], [1, 1]]}"#);
        assert!(unsorted.is_err());
        let dup = CrossSection::from_explicit_json(r#"{"dim": 1, "entries": [[1, 1], [1, 1]]}"#);
        assert!(dup.is_err());
        let neg = CrossSection::from_explicit_json(r#"{"dim": 1, "entries": [[-1, 1]]}"#);
        assert!(neg.is_err());
        let no_heat = CrossSection::from_explicit_json(r#"{"dim": 1, "entries": [[0, 1]]}"#).unwrap();
        assert_eq!(heat_coefficients(&no_heat, 0), Err(Error::HeatDataRequired));
    }

    #[test]
    fn heat_coefficients_of_models() {
        let h = heat_coefficients(&CrossSection::Point, 0).unwrap();
        assert_eq!((h.cross_dim, h.coeffs.clone()), (0, vec![1.0]));
        let l = 3.0;
        let h = heat_coefficients(&CrossSection::circle(l).unwrap(), 3).unwrap();
        assert_abs_diff_eq!(h.coeffs[0], l / (4.0 * PI).sqrt(), epsilon = 1e-15);
        assert!(h.coeffs[1..].iter().all(|&c| c == 0.0));
        let h = heat_coefficients(&CrossSection::flat_torus(2.0, 5.0).unwrap(), 2).unwrap();
        assert_abs_diff_eq!(h.coeffs[0], 10.0 / (4.0 * PI), epsilon = 1e-15);
        assert_eq!(&h.coeffs[1..], &[0.0, 0.0]);
    }

    #[test]
    fn circle_heat_trace_direct_sum() {
        let cs = CrossSection::circle(2.0 * PI).unwrap();
        let direct: f64 = 1.0 + 2.0 * (1..50).map(|k: i32| (-(k * k) as f64).exp()).sum::<f64>();
        assert_abs_diff_eq!(heat_trace(&cs, 1.0).unwrap(), direct, epsilon = 1e-14);
        assert_abs_diff_eq!(heat_trace(&cs, 60.0).unwrap(), 1.0, epsilon = 1e-20);
        assert_eq!(heat_trace(&CrossSection::Point, 0.3).unwrap(), 1.0);
        assert!(heat_trace(&cs, 0.0).is_err());
        // Across the theta switch-over at x = 1 (t = π for this circle).
        let t = PI;
        let direct: f64 = 1.0 + 2.0 * (1..50).map(|k: i32| (-t * (k * k) as f64).exp()).sum::<f64>();
        assert_abs_diff_eq!(heat_trace(&cs, t).unwrap(), direct, epsilon = 1e-15);
        assert_abs_diff_eq!(heat_trace(&cs, t * 0.999).unwrap(), {
            let t = t * 0.999;
            1.0 + 2.0 * (1..50).map(|k: i32| (-t * (k * k) as f64).exp()).sum::<f64>()
        }, epsilon = 1e-14);
    }

    #[test]
    fn small_time_heat_trace_approaches_leading_term() {
        let t: f64 = 1e-3;
        for cs in [
            CrossSection::circle(2.0 * PI).unwrap(),
            CrossSection::circle(1.5).unwrap(),
            CrossSection::flat_torus(2.0 * PI, 3.0).unwrap(),
        ] {
            let h = heat_expansion(&cs).unwrap();
            let lead = h.coeffs[0] * t.powf(-(h.cross_dim as f64) / 2.0);
            assert!((heat_trace(&cs, t).unwrap() - lead).abs() < 1e-8);
        }
    }

    #[test]
    fn explicit_heat_trace_reports_truncation() {
        let cs = CrossSection::from_explicit_json(
            r#"{"dim": 1, "entries": [[0, 1], [1, 2], [4, 2]], "heat": {"coeffs": [1.7724538509055159]}}"#,
        )
        .unwrap();
        assert!(matches!(heat_trace(&cs, 0.01), Err(Error::InsufficientSpectrum { .. })));
    }

    #[test]
    fn weyl_bound_dominates_counts() {
        let cs = CrossSection::flat_torus(1.0, 2.3).unwrap();
        let w = cs.weyl_bound();
        for &lam in &[10.0, 100.0, 1000.0, 5000.0] {
            let n: u64 = enumerate_spectrum(&cs, lam).unwrap().iter().map(|e| e.multiplicity).sum();
            assert!(n as f64 <= w.count(lam));
        }
    }

    proptest::proptest! {
        #[test]
        fn doubling_cutoff_gives_superset(l in 0.5f64..8.0, lam in 1.0f64..300.0) {
            let cs = CrossSection::flat_torus(l, 1.0 + l / 3.0).unwrap();
            let small = enumerate_spectrum(&cs, lam).unwrap();
            let big = enumerate_spectrum(&cs, 2.0 * lam).unwrap();
            proptest::prop_assert!(small.len() <= big.len());
            for (a, b) in small.iter().zip(big.iter()) {
                proptest::prop_assert_eq!(a, b);
            }
        }

        #[test]
        fn heat_trace_strictly_decreasing(l in 0.5f64..10.0, x in 0.01f64..5.0) {
            let t = x * l * l / (4.0 * PI);
            let cs = CrossSection::circle(l).unwrap();
            let a = heat_trace(&cs, t).unwrap();
            let b = heat_trace(&cs, t * 1.01).unwrap();
            proptest::prop_assert!(b < a);
        }
    }
}
