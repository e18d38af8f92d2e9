//! Dirichlet-to-Neumann-type operators on the product cylinder at `λ = 0`,
//! the 2×2 segment matrix `Q_D(λ) + α`, and the gluing operator `R_S(0)`.
//!
//! Every interface operator here acts diagonally on the eigenbasis of `Δ_Y`.
//! On the mode `μ = x²` each branch has the form `x tanh(cx) + s` or
//! `x coth(cx) + s`; its determinant is regularized against `√Δ_Y + s`,
//! which leaves an exponentially convergent correction series.

use crate::asymptotics::{inverse_shift_harmonic_sum, inverse_shift_zeta_zero};
use crate::error::{Error, Result};
use crate::report::{sum_terms, Term};
use crate::series::{exp_series, is_singular, Decay, Precision, SeriesValue};
use crate::spectra::{enumerate_spectrum, heat_expansion, kernel_dim, sqrt_eigenvalue_collision, CrossSection};
use crate::sum::LogValue;
use crate::zreg::{log_det_shifted_with, log_det_star_with, zeta_point_with, RegularizedDet};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::LN_2;

fn cexpm1(z: Complex64) -> Complex64 {
    if z.norm() < 1e-2 {
        let mut term = z;
        let mut acc = z;
        for k in 2..12 {
            term = term * z / k as f64;
            acc += term;
        }
        acc
    } else {
        z.exp() - 1.0
    }
}

/// `Q_D(λ) + α` on `{0} ⊕ {L}` for the segment `[0, L]`, with its determinant.
///
/// Uses the principal `√λ`; requires `Re λ ≥ 0` and `λ ≠ 0`.
pub fn qd_matrix_segment(lambda: Complex64, alpha: f64, length: f64) -> Result<([[Complex64; 2]; 2], Complex64)> {
    if lambda == Complex64::new(0.0, 0.0) {
        return Err(Error::Domain("λ = 0: use qd_det_segment_at_zero".into()));
    }
    if lambda.re < 0.0 || !lambda.re.is_finite() || !lambda.im.is_finite() {
        return Err(Error::Domain(format!("need Re λ ≥ 0, got {lambda}")));
    }
    if !(length > 0.0) || !alpha.is_finite() {
        return Err(Error::invalid("need L > 0 and finite α"));
    }
    let r = lambda.sqrt();
    let z = r * length;
    // w = e^{-2z}, 1 - w = -expm1(-2z)
    let one_minus_w = -cexpm1(-2.0 * z);
    let w = 1.0 - one_minus_w;
    let diag = r * (1.0 + w) / one_minus_w + alpha;
    let off = -2.0 * r * (-z).exp() / one_minus_w;
    let det = diag * diag - off * off;
    Ok(([[diag, off], [off, diag]], det))
}

/// `λ + α² + 2α√λ + 4α√λ/(e^{2√λL} - 1)`.
pub fn qd_det_segment(lambda: Complex64, alpha: f64, length: f64) -> Complex64 {
    let r = lambda.sqrt();
    let z = 2.0 * r * length;
    // 1/(e^z - 1) = e^{-z}/(1 - e^{-z}), finite for large Re z
    let tail = (-z).exp() / -cexpm1(-z);
    lambda + alpha * alpha + 2.0 * alpha * r + 4.0 * alpha * r * tail
}

/// `lim_{λ→0} det(Q_D(λ) + α) = 2α/L + α²`.
pub fn qd_det_segment_at_zero(alpha: f64, length: f64) -> f64 {
    2.0 * alpha / length + alpha * alpha
}

/// Which interface operator, by the piece of boundary it lives on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InterfaceGeometry {
    /// `Q_D(0) + α` on both ends of `[0, L] × Y`, Dirichlet base.
    BothEnds { length: f64 },
    /// `Q_D(0) + α` on `{0} × Y` with Dirichlet at `u = L`.
    LeftNeumannCut { length: f64 },
    /// `Q_D(0) + α` on `{L} × Y` with Neumann at `u = 0`.
    NeumannRobinEnd { length: f64 },
    /// `Q_1(0) + α` at the cut of `[0, a] × Y`, Neumann at `u = 0`.
    CutLeft { a: f64 },
    /// `Q_2(0) - α` at the cut of `[a, L] × Y`, Neumann at `u = L`; `width = L - a`.
    CutRight { width: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Branch {
    /// `x tanh(cx)`
    Tanh(f64),
    /// `x coth(cx)`
    Coth(f64),
}

impl Branch {
    fn at_zero(self) -> f64 {
        match self {
            Branch::Tanh(_) => 0.0,
            Branch::Coth(c) => 1.0 / c,
        }
    }

    fn value(self, x: f64) -> f64 {
        match self {
            Branch::Tanh(c) => x * (c * x).tanh(),
            Branch::Coth(c) => x / (c * x).tanh(),
        }
    }

    fn rate(self) -> f64 {
        match self {
            Branch::Tanh(c) | Branch::Coth(c) => 2.0 * c,
        }
    }

    /// `(x·f(cx) + s)/(x + s) - 1`, computed without cancellation.
    fn ratio_minus_one(self, x: f64, s: f64) -> f64 {
        match self {
            Branch::Tanh(c) => -2.0 * x / ((x + s) * ((2.0 * c * x).exp() + 1.0)),
            Branch::Coth(c) => 2.0 * x / ((x + s) * (2.0 * c * x).exp_m1()),
        }
    }
}

impl InterfaceGeometry {
    fn validate(&self) -> Result<()> {
        let v = match *self {
            InterfaceGeometry::BothEnds { length }
            | InterfaceGeometry::LeftNeumannCut { length }
            | InterfaceGeometry::NeumannRobinEnd { length } => length,
            InterfaceGeometry::CutLeft { a } => a,
            InterfaceGeometry::CutRight { width } => width,
        };
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::invalid(format!("interface lengths must be positive, got {v}")));
        }
        Ok(())
    }

    fn branches(&self) -> Vec<Branch> {
        match *self {
            InterfaceGeometry::BothEnds { length } => vec![Branch::Tanh(length / 2.0), Branch::Coth(length / 2.0)],
            InterfaceGeometry::LeftNeumannCut { length } => vec![Branch::Coth(length)],
            InterfaceGeometry::NeumannRobinEnd { length } => vec![Branch::Tanh(length)],
            InterfaceGeometry::CutLeft { a } => vec![Branch::Tanh(a)],
            InterfaceGeometry::CutRight { width } => vec![Branch::Tanh(width)],
        }
    }

    /// The constant added to every branch.
    fn shift(&self, alpha: f64) -> f64 {
        match self {
            InterfaceGeometry::CutRight { .. } => -alpha,
            _ => alpha,
        }
    }

    pub fn operator_name(&self) -> &'static str {
        match self {
            InterfaceGeometry::BothEnds { .. } => "Q_D(0) on both ends",
            InterfaceGeometry::LeftNeumannCut { .. } => "Q_D(0) on the Neumann end",
            InterfaceGeometry::NeumannRobinEnd { .. } => "Q_D(0) on the Robin end",
            InterfaceGeometry::CutLeft { .. } => "Q_1(0) at the cut",
            InterfaceGeometry::CutRight { .. } => "Q_2(0) at the cut",
        }
    }

    /// Formula text for the branch eigenvalues.
    pub fn formula(&self) -> &'static str {
        match self {
            InterfaceGeometry::BothEnds { .. } => {
                "{α, 2/L + α} (mult q0) ∪ {√μ tanh(L√μ/2) + α, √μ coth(L√μ/2) + α}"
            }
            InterfaceGeometry::LeftNeumannCut { .. } => "{1/L + α} (mult q0) ∪ {√μ coth(L√μ) + α}",
            InterfaceGeometry::NeumannRobinEnd { .. } => "{√μ tanh(L√μ) + α}",
            InterfaceGeometry::CutLeft { .. } => "{√μ tanh(a√μ) + α}",
            InterfaceGeometry::CutRight { .. } => "{√μ tanh((L-a)√μ) - α}",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterfaceEntry {
    pub eigenvalue: f64,
    pub multiplicity: u64,
}

/// Where an interface spectrum came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "operator", rename_all = "snake_case")]
pub enum Provenance {
    Interface { geometry: InterfaceGeometry, alpha: f64 },
    GluingCut { length: f64, a: f64, alpha: f64 },
}

/// Eigenvalues of an interface operator for all `μ ≤ cutoff`, exact zeros
/// split off into `zero_modes`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterfaceSpectrum {
    pub entries: Vec<InterfaceEntry>,
    pub zero_modes: u64,
    pub provenance: Provenance,
    /// Cutoff on `Spec(Δ_Y)` the list was built from.
    pub cutoff: f64,
}

fn finish_spectrum(mut entries: Vec<InterfaceEntry>, zero_modes: u64, provenance: Provenance, cutoff: f64) -> InterfaceSpectrum {
    entries.sort_by(|a, b| a.eigenvalue.total_cmp(&b.eigenvalue));
    InterfaceSpectrum { entries, zero_modes, provenance, cutoff }
}

pub fn spec_interface(cs: &CrossSection, geometry: InterfaceGeometry, alpha: f64, cutoff: f64) -> Result<InterfaceSpectrum> {
    geometry.validate()?;
    if !alpha.is_finite() {
        return Err(Error::invalid(format!("alpha must be finite, got {alpha}")));
    }
    let s = geometry.shift(alpha);
    let branches = geometry.branches();
    let mut entries = Vec::new();
    let mut zero_modes = 0;
    for e in enumerate_spectrum(cs, cutoff)? {
        for b in &branches {
            let v = if e.eigenvalue == 0.0 {
                b.at_zero() + s
            } else {
                b.value(e.eigenvalue.sqrt()) + s
            };
            if v == 0.0 {
                zero_modes += e.multiplicity;
            } else {
                entries.push(InterfaceEntry { eigenvalue: v, multiplicity: e.multiplicity });
            }
        }
    }
    Ok(finish_spectrum(entries, zero_modes, Provenance::Interface { geometry, alpha }, cutoff))
}

/// Rejects `α` when `-α ∈ Spec(√Δ_Y)` (`shift` is the constant added to the
/// branches; the collision is with `-shift`).
pub fn check_shift_admissible(cs: &CrossSection, shift: f64) -> Result<()> {
    if shift <= 0.0 {
        if let Some(mu) = sqrt_eigenvalue_collision(cs, -shift, crate::series::SINGULAR_RTOL)? {
            if shift != 0.0 || mu != 0.0 {
                return Err(Error::SingularRobin { alpha: shift, eigenvalue: mu, operator: "√Δ_Y + α" });
            }
        }
    }
    Ok(())
}

/// Rejects `α` when the interface operator has a (near-)zero eigenvalue that
/// the formulas need to be invertible.
pub fn check_interface_admissible(cs: &CrossSection, geometry: InterfaceGeometry, alpha: f64) -> Result<()> {
    geometry.validate()?;
    let s = geometry.shift(alpha);
    let branches = geometry.branches();
    let err = |mu: f64| Error::SingularRobin {
        alpha,
        eigenvalue: mu,
        operator: geometry.operator_name(),
    };
    if kernel_dim(cs) > 0 && s != 0.0 {
        for b in &branches {
            if is_singular(b.at_zero() + s, s) {
                return Err(err(0.0));
            }
        }
    }
    if s >= 0.0 {
        return Ok(());
    }
    // x tanh(cx) ≥ 0.76 x once cx ≥ 1, and x coth(cx) ≥ x
    let c_min = branches
        .iter()
        .map(|b| match b {
            Branch::Tanh(c) | Branch::Coth(c) => *c,
        })
        .fold(f64::INFINITY, f64::min);
    let x_max = (1.5 * s.abs()).max(1.0 / c_min);
    let lam = x_max * x_max;
    if lam > cs.max_cutoff() {
        return Err(Error::InsufficientSpectrum { needed: lam, max_cutoff: cs.max_cutoff() });
    }
    for e in enumerate_spectrum(cs, lam)? {
        if e.eigenvalue == 0.0 {
            continue;
        }
        let x = e.eigenvalue.sqrt();
        for b in &branches {
            if is_singular(b.value(x) + s, s) {
                return Err(err(e.eigenvalue));
            }
        }
    }
    Ok(())
}

/// `ln Det` of an interface operator, split as regularized base, zero-mode
/// correction and convergent series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterfaceDet {
    pub geometry: InterfaceGeometry,
    pub alpha: f64,
    pub terms: Vec<Term>,
    pub excluded_zero_modes: u64,
    pub tail_bound: f64,
    pub cutoff: f64,
}

impl InterfaceDet {
    pub fn log_value(&self) -> LogValue {
        sum_terms(&self.terms)
    }

    pub fn regularized(&self) -> RegularizedDet {
        let v = self.log_value();
        RegularizedDet {
            log_modulus: v.re,
            phase_multiple: v.phase,
            excluded_zero_modes: self.excluded_zero_modes,
            tail_bound: self.tail_bound,
        }
    }
}

/// `ln Det(Q + s)` (or `Det*` when it has a kernel) for the operator of
/// `geometry`, as `n ln Det(√Δ_Y + s)` plus zero-mode and series corrections.
pub fn log_det_interface(cs: &CrossSection, geometry: InterfaceGeometry, alpha: f64, prec: &Precision) -> Result<InterfaceDet> {
    prec.validate()?;
    check_interface_admissible(cs, geometry, alpha)?;
    let s = geometry.shift(alpha);
    check_shift_admissible(cs, s)?;
    let branches = geometry.branches();
    let n = branches.len() as f64;
    let q0 = kernel_dim(cs);
    let backend = prec.backend();
    let mut terms = Vec::new();
    let mut excluded = 0;
    let mut tail = 0.0;

    if s == 0.0 {
        let star = log_det_star_with(cs, backend)?;
        tail += n * 0.5 * star.tail_bound;
        terms.push(Term::real(
            "branches x ½ ln Det* Δ_Y",
            format!("{n} · ½ ln Det* Δ_Y"),
            n * 0.5 * star.log_modulus,
        ));
        if q0 > 0 {
            let mut zero = LogValue::default();
            for b in &branches {
                let v = b.at_zero();
                if v == 0.0 {
                    excluded += q0;
                } else {
                    zero = zero.plus(LogValue::ln(v));
                }
            }
            terms.push(Term::new(
                "kernel eigenvalues",
                "q0 Σ ln(branch limit at μ = 0)",
                LogValue::new(q0 as f64 * zero.re, q0 as i64 * zero.phase),
            ));
        }
    } else {
        let base = log_det_shifted_with(cs, s, backend)?;
        tail += n * base.tail_bound;
        terms.push(Term::new(
            "branches x ln Det(√Δ_Y + s)",
            format!("{n} · ln Det(√Δ_Y + s), s = {s}"),
            LogValue::new(n * base.log_modulus, n as i64 * base.phase_multiple),
        ));
        if q0 > 0 {
            let mut zero = LogValue::default();
            for b in &branches {
                zero = zero.plus(LogValue::ln(b.at_zero() + s)).minus(LogValue::ln(s));
            }
            terms.push(Term::new(
                "kernel correction",
                "q0 Σ ln((branch limit + s)/s)",
                LogValue::new(q0 as f64 * zero.re, q0 as i64 * zero.phase),
            ));
        }
    }

    let beta = branches.iter().map(|b| b.rate()).fold(f64::INFINITY, f64::min);
    let c_min = beta / 2.0;
    let decay = Decay::log1m_ratio(beta, 8.0 * n, (2.0 * s.abs()).max(1.0 / (2.0 * c_min)));
    let series = exp_series(cs, decay, prec, |x| {
        let mut acc = LogValue::default();
        for b in &branches {
            let y = b.ratio_minus_one(x, s);
            if is_singular(1.0 + y, 1.0) {
                return Err(x);
            }
            acc = acc.plus(LogValue::ln_1p(y));
        }
        Ok(acc)
    })?;
    tail += series.tail_bound;
    terms.push(Term::new(
        "correction series",
        format!("Σ_(μ>0) Σ_branches ln(branch/(√μ + s)), branches {}", geometry.formula()),
        series.log_value(),
    ));
    Ok(InterfaceDet {
        geometry,
        alpha,
        terms,
        excluded_zero_modes: excluded,
        tail_bound: tail,
        cutoff: series.cutoff,
    })
}

/// An eigenvalue of `R_S(0) = (Q_1(0) + α)^{-1} + (Q_2(0) - α)^{-1}` on the mode `x = √μ > 0`.
pub fn rs0_eigenvalue(x: f64, length: f64, a: f64, alpha: f64) -> f64 {
    let q1 = x * (a * x).tanh() + alpha;
    let q2 = x * ((length - a) * x).tanh() - alpha;
    1.0 / q1 + 1.0 / q2
}

/// The same eigenvalue from the factorized closed form
/// `2x/(μ - α²) · (1 - e^{-2Lx}) / ((1 - r e^{-2ax})(1 - e^{-2(L-a)x}/r))`, `r = (x-α)/(x+α)`.
pub fn rs0_eigenvalue_closed(x: f64, length: f64, a: f64, alpha: f64) -> f64 {
    let r = (x - alpha) / (x + alpha);
    let num = -(-2.0 * length * x).exp_m1();
    let d1 = 1.0 - r * (-2.0 * a * x).exp();
    let d2 = 1.0 - (-2.0 * (length - a) * x).exp() / r;
    2.0 * x / (x * x - alpha * alpha) * num / (d1 * d2)
}

fn validate_cut(length: f64, a: f64, alpha: f64) -> Result<()> {
    if !(length > 0.0) || !length.is_finite() {
        return Err(Error::invalid(format!("L must be positive, got {length}")));
    }
    if !(a > 0.0 && a < length) {
        return Err(Error::invalid(format!("cut must satisfy 0 < a < L, got a = {a}, L = {length}")));
    }
    if !alpha.is_finite() {
        return Err(Error::invalid(format!("alpha must be finite, got {alpha}")));
    }
    Ok(())
}

/// `α ∉ ±Spec(√Δ_Y)` and both cut pieces invertible.
pub fn check_cut_admissible(cs: &CrossSection, length: f64, a: f64, alpha: f64) -> Result<()> {
    validate_cut(length, a, alpha)?;
    if alpha != 0.0 {
        if let Some(mu) = sqrt_eigenvalue_collision(cs, alpha.abs(), crate::series::SINGULAR_RTOL)? {
            return Err(Error::SingularRobin { alpha, eigenvalue: mu, operator: "√Δ_Y ± α" });
        }
        check_interface_admissible(cs, InterfaceGeometry::CutLeft { a }, alpha)?;
        check_interface_admissible(cs, InterfaceGeometry::CutRight { width: length - a }, alpha)?;
    }
    Ok(())
}

/// Spectrum of `R_S(0)` (or `R_Neu(0)` at `α = 0`); the kernel modes are `μ = 0`.
pub fn spec_rs0(cs: &CrossSection, length: f64, a: f64, alpha: f64, cutoff: f64) -> Result<InterfaceSpectrum> {
    check_cut_admissible(cs, length, a, alpha)?;
    let mut entries = Vec::new();
    let mut zero_modes = 0;
    for e in enumerate_spectrum(cs, cutoff)? {
        if e.eigenvalue == 0.0 {
            zero_modes += e.multiplicity;
        } else {
            let v = rs0_eigenvalue(e.eigenvalue.sqrt(), length, a, alpha);
            entries.push(InterfaceEntry { eigenvalue: v, multiplicity: e.multiplicity });
        }
    }
    Ok(finish_spectrum(entries, zero_modes, Provenance::GluingCut { length, a, alpha }, cutoff))
}

/// `ln Det* R_S(0)` as a term list, with its truncation bound and cutoff.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rs0Det {
    pub terms: Vec<Term>,
    pub tail_bound: f64,
    pub cutoff: f64,
    pub excluded_zero_modes: u64,
}

impl Rs0Det {
    pub fn log_value(&self) -> LogValue {
        sum_terms(&self.terms)
    }
}

/// Series `Σ_(μ>0) ln(ρ(μ) (μ - α²)/(2√μ))` with `ρ` the `R_S(0)` eigenvalue.
pub fn rs0_series(cs: &CrossSection, length: f64, a: f64, alpha: f64, prec: &Precision) -> Result<SeriesValue> {
    let beta = 2.0 * a.min(length - a);
    // three factors 1 - r e^{-βx}, |r| ≤ 3 for x ≥ 2|α|
    let x_min = (2.0 * alpha.abs()).max((6.0f64).ln() / beta);
    let decay = Decay { beta, c: 14.0, x_min };
    exp_series(cs, decay, prec, |x| {
        let rho = rs0_eigenvalue(x, length, a, alpha);
        let v = rho * (x * x - alpha * alpha) / (2.0 * x);
        if !v.is_finite() || is_singular(v, 1.0) {
            return Err(x);
        }
        Ok(LogValue::ln(v))
    })
}

/// `ln Det* R_S(0)`; at `α = 0` this is `ln Det* R_Neu(0)`.
pub fn log_det_star_rs0(cs: &CrossSection, length: f64, a: f64, alpha: f64, prec: &Precision) -> Result<Rs0Det> {
    prec.validate()?;
    check_cut_admissible(cs, length, a, alpha)?;
    let q0 = kernel_dim(cs);
    let backend = prec.backend();
    let mut terms = Vec::new();
    let mut tail = 0.0;
    let star = log_det_star_with(cs, backend)?;
    if alpha == 0.0 {
        let z0 = zeta_point_with(cs, 0.0, false, backend)?;
        terms.push(Term::real("ln 2 · ζ_Δ(0)", "ln 2 · ζ_{Δ_Y}(0)", LN_2 * z0.value));
        terms.push(Term::real("-½ ln Det* Δ_Y", "-½ ln Det* Δ_Y", -0.5 * star.log_modulus));
        tail += 0.5 * star.tail_bound;
    } else {
        let heat = heat_expansion(cs)?;
        let z0 = inverse_shift_zeta_zero(&heat, q0, alpha)?;
        let plus = log_det_shifted_with(cs, alpha, backend)?;
        let minus = log_det_shifted_with(cs, -alpha, backend)?;
        let h = inverse_shift_harmonic_sum(&heat, alpha)?;
        terms.push(Term::real(
            "ln 2 · ζ(0)",
            "ln 2 · [(a_{d/2} - q0) + 2 Σ_k a_{d/2-k} α^{2k}/k!]",
            LN_2 * z0,
        ));
        terms.push(Term::new("-ln Det(√Δ_Y + α)", "-ln Det(√Δ_Y + α)", -plus.log_value()));
        terms.push(Term::new("-ln Det(√Δ_Y - α)", "-ln Det(√Δ_Y - α)", -minus.log_value()));
        terms.push(Term::new(
            "q0 ln(-α²)",
            "+q0 ln(-α²)",
            LogValue::new(q0 as f64 * (alpha * alpha).ln(), q0 as i64),
        ));
        terms.push(Term::real("½ ln Det* Δ_Y", "+½ ln Det* Δ_Y", 0.5 * star.log_modulus));
        terms.push(Term::real(
            "harmonic correction",
            "-2 Σ_k a_{d/2-k} α^{2k}/k! (H_{2k-1} - H_{k-1})",
            -h,
        ));
        tail += plus.tail_bound + minus.tail_bound + 0.5 * star.tail_bound;
    }
    let series = rs0_series(cs, length, a, alpha, prec)?;
    tail += series.tail_bound;
    terms.push(Term::new(
        "eigenvalue series",
        "Σ_(μ>0) ln(ρ_μ (μ - α²)/(2√μ)), ρ_μ = 1/(√μ tanh(a√μ) + α) + 1/(√μ tanh((L-a)√μ) - α)",
        series.log_value(),
    ));
    Ok(Rs0Det {
        terms,
        tail_bound: tail,
        cutoff: series.cutoff,
        excluded_zero_modes: q0,
    })
}
