//! Both sides of the Robin and Neumann gluing identities for the cylinder cut
//! at `u = a`, each side built from its own formulas.

use crate::asymptotics::a0_constant;
use crate::cylinder::{log_det_cylinder_with, BoundaryCondition, CylinderSpec, DetReport};
use crate::error::{Error, Result};
use crate::interface_ops::{check_cut_admissible, log_det_star_rs0};
use crate::report::{sum_terms, Term};
use crate::series::Precision;
use crate::spectra::{heat_expansion, kernel_dim, CrossSection};
use crate::sum::{phases_match, LogValue};
use serde::{Deserialize, Serialize};

/// `[0, L] × Y` with Neumann outer ends, cut at `u = a`; `α = 0` selects the
/// Neumann identity.
#[derive(Debug, Clone, PartialEq)]
pub struct GluingConfig {
    pub cross_section: CrossSection,
    pub length: f64,
    pub cut: f64,
    pub alpha: f64,
}

impl GluingConfig {
    pub fn new(cross_section: CrossSection, length: f64, cut: f64, alpha: f64) -> Result<Self> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::invalid(format!("L must be positive, got {length}")));
        }
        if !(cut > 0.0 && cut < length) {
            return Err(Error::invalid(format!("cut must satisfy 0 < a < L, got a = {cut}, L = {length}")));
        }
        if !alpha.is_finite() {
            return Err(Error::invalid(format!("alpha must be finite, got {alpha}")));
        }
        Ok(Self { cross_section, length, cut, alpha })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GluingReport {
    pub lhs_terms: Vec<Term>,
    pub rhs_terms: Vec<Term>,
    pub lhs: f64,
    pub rhs: f64,
    pub lhs_phase: i64,
    pub rhs_phase: i64,
    pub residual: f64,
    pub phase_match: bool,
    /// Combined truncation bound of both sides.
    pub truncation: f64,
    pub cutoff: f64,
}

impl GluingReport {
    fn assemble(lhs_terms: Vec<Term>, rhs_terms: Vec<Term>, truncation: f64, cutoff: f64) -> Self {
        let l = sum_terms(&lhs_terms);
        let r = sum_terms(&rhs_terms);
        GluingReport {
            lhs: l.re,
            rhs: r.re,
            lhs_phase: l.phase,
            rhs_phase: r.phase,
            residual: (l.re - r.re).abs(),
            phase_match: phases_match(l.phase, r.phase),
            lhs_terms,
            rhs_terms,
            truncation,
            cutoff,
        }
    }
}

/// Product-case values of the finite-dimensional correction determinants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrectionMatrices {
    pub log_det_c: f64,
    pub log_det_aat: Option<f64>,
    pub log_det_s1: Option<f64>,
    pub log_det_s2: Option<f64>,
    pub q0: u64,
}

/// `ln det 𝒞 = -q0 ln L`, `ln det 𝒜𝒜̄ᵀ = -q0 ln α²`.
pub fn robin_matrices(cfg: &GluingConfig) -> Result<CorrectionMatrices> {
    if cfg.alpha == 0.0 {
        return Err(Error::invalid("Robin correction matrices need α ≠ 0"));
    }
    let q0 = kernel_dim(&cfg.cross_section);
    let q = q0 as f64;
    Ok(CorrectionMatrices {
        log_det_c: -q * cfg.length.ln(),
        log_det_aat: Some(-q * (cfg.alpha * cfg.alpha).ln()),
        log_det_s1: None,
        log_det_s2: None,
        q0,
    })
}

/// `ln det 𝒞 = -q0 ln L`, `ln det 𝔖⁽¹⁾ = -q0 ln a`, `ln det 𝔖⁽²⁾ = -q0 ln(L - a)`.
pub fn neumann_matrices(cfg: &GluingConfig) -> Result<CorrectionMatrices> {
    let q0 = kernel_dim(&cfg.cross_section);
    let q = q0 as f64;
    Ok(CorrectionMatrices {
        log_det_c: -q * cfg.length.ln(),
        log_det_aat: None,
        log_det_s1: Some(-q * cfg.cut.ln()),
        log_det_s2: Some(-q * (cfg.length - cfg.cut).ln()),
        q0,
    })
}

pub fn correction_matrices(cfg: &GluingConfig) -> Result<CorrectionMatrices> {
    if cfg.alpha == 0.0 {
        neumann_matrices(cfg)
    } else {
        robin_matrices(cfg)
    }
}

fn piece(cfg: &GluingConfig, length: f64, left: BoundaryCondition, right: BoundaryCondition, prec: &Precision) -> Result<DetReport> {
    let spec = CylinderSpec::new(cfg.cross_section.clone(), length, left, right)?;
    log_det_cylinder_with(&spec, prec)
}

fn lhs_term(name: &str, source: &str, sign: f64, r: &DetReport) -> Term {
    let v = if sign < 0.0 { -r.log_value() } else { r.log_value() };
    Term::new(name, source, v)
}

fn a0_term(cfg: &GluingConfig, alpha: f64) -> Result<Term> {
    let heat = heat_expansion(&cfg.cross_section)?;
    let m = heat.cross_dim + 1;
    let a0 = a0_constant(&[(heat, alpha)], m)?;
    Ok(Term::real("a0", "a0 = -ln 2 · w0 + w1", a0))
}

/// `ln Det* Δ_{N,N}(L) - ln Det Δ_{N,R(α)}(a) - ln Det Δ_{R(-α),N}(L-a)`
/// against `a0 + ln(-1)^{q0} - ln det 𝒞 + ln det 𝒜𝒜̄ᵀ + ln Det* R_S(0)`.
pub fn glue_robin_check(cfg: &GluingConfig, prec: &Precision) -> Result<GluingReport> {
    use BoundaryCondition::*;
    prec.validate()?;
    let alpha = cfg.alpha;
    if alpha == 0.0 {
        return Err(Error::invalid("Robin gluing needs α ≠ 0; use the Neumann check"));
    }
    let (l, a) = (cfg.length, cfg.cut);
    check_cut_admissible(&cfg.cross_section, l, a, alpha)?;

    let whole = piece(cfg, l, Neumann, Neumann, prec)?;
    let left = piece(cfg, a, Neumann, Robin(alpha), prec)?;
    let right = piece(cfg, l - a, Robin(-alpha), Neumann, prec)?;
    let lhs_terms = vec![
        lhs_term("whole", "ln Det* Δ_{M,N,N}", 1.0, &whole),
        lhs_term("left piece", "-ln Det Δ_{M1,N,R(α)}", -1.0, &left),
        lhs_term("right piece", "-ln Det Δ_{M2,R(-α),N}", -1.0, &right),
    ];

    let mats = robin_matrices(cfg)?;
    let rs0 = log_det_star_rs0(&cfg.cross_section, l, a, alpha, prec)?;
    let mut rhs_terms = vec![
        a0_term(cfg, alpha)?,
        Term::new("ln(-1)^q0", "ln(-1)^{q0}", LogValue::new(0.0, mats.q0 as i64)),
        Term::real("-ln det 𝒞", "-ln det 𝒞 = q0 ln L", -mats.log_det_c),
        Term::real("ln det 𝒜𝒜̄ᵀ", "ln det 𝒜𝒜̄ᵀ = -q0 ln α²", mats.log_det_aat.unwrap_or(0.0)),
    ];
    rhs_terms.extend(rs0.terms.iter().map(|t| Term {
        name: format!("Det* R_S(0): {}", t.name),
        ..t.clone()
    }));
    let truncation = whole.truncation + left.truncation + right.truncation + rs0.tail_bound;
    let cutoff = whole.cutoff.max(left.cutoff).max(right.cutoff).max(rs0.cutoff);
    Ok(GluingReport::assemble(lhs_terms, rhs_terms, truncation, cutoff))
}

/// `ln Det* Δ_{N,N}(L) - ln Det* Δ_{N,N}(a) - ln Det* Δ_{N,N}(L-a)`
/// against `a0 - ln det 𝒞 + ln det 𝔖⁽¹⁾ + ln det 𝔖⁽²⁾ + ln Det* R_Neu(0)`.
pub fn glue_neumann_check(cfg: &GluingConfig, prec: &Precision) -> Result<GluingReport> {
    use BoundaryCondition::*;
    prec.validate()?;
    if cfg.alpha != 0.0 {
        return Err(Error::invalid("Neumann gluing needs α = 0"));
    }
    let (l, a) = (cfg.length, cfg.cut);
    let whole = piece(cfg, l, Neumann, Neumann, prec)?;
    let left = piece(cfg, a, Neumann, Neumann, prec)?;
    let right = piece(cfg, l - a, Neumann, Neumann, prec)?;
    let lhs_terms = vec![
        lhs_term("whole", "ln Det* Δ_{M,N,N}", 1.0, &whole),
        lhs_term("left piece", "-ln Det* Δ_{M1,N,N}", -1.0, &left),
        lhs_term("right piece", "-ln Det* Δ_{M2,N,N}", -1.0, &right),
    ];

    let mats = neumann_matrices(cfg)?;
    let rneu = log_det_star_rs0(&cfg.cross_section, l, a, 0.0, prec)?;
    let mut rhs_terms = vec![
        a0_term(cfg, 0.0)?,
        Term::real("-ln det 𝒞", "-ln det 𝒞 = q0 ln L", -mats.log_det_c),
        Term::real("ln det 𝔖1", "ln det 𝔖⁽¹⁾ = -q0 ln a", mats.log_det_s1.unwrap_or(0.0)),
        Term::real("ln det 𝔖2", "ln det 𝔖⁽²⁾ = -q0 ln(L - a)", mats.log_det_s2.unwrap_or(0.0)),
    ];
    rhs_terms.extend(rneu.terms.iter().map(|t| Term {
        name: format!("Det* R_Neu(0): {}", t.name),
        ..t.clone()
    }));
    let truncation = whole.truncation + left.truncation + right.truncation + rneu.tail_bound;
    let cutoff = whole.cutoff.max(left.cutoff).max(right.cutoff).max(rneu.cutoff);
    Ok(GluingReport::assemble(lhs_terms, rhs_terms, truncation, cutoff))
}

/// Dispatches on `α`.
pub fn glue_check(cfg: &GluingConfig, prec: &Precision) -> Result<GluingReport> {
    if cfg.alpha == 0.0 {
        glue_neumann_check(cfg, prec)
    } else {
        glue_robin_check(cfg, prec)
    }
}
