//! `ln Det` of `Δ = -∂_u² + Δ_Y` on `[0, L] × Y` for the supported pairs of
//! end conditions, assembled term by term.

use crate::asymptotics::s_alpha;
use crate::error::{Error, Result};
use crate::interface_ops::{check_interface_admissible, check_shift_admissible, log_det_interface, InterfaceGeometry};
use crate::report::{sum_terms, Term};
use crate::series::{exp_series, is_singular, Decay, Precision, SeriesValue};
use crate::spectra::{heat_expansion, kernel_dim, CrossSection};
use crate::sum::LogValue;
use crate::zreg::{log_det_shifted_with, log_det_star_with, zeta_point_with};
use serde::{Deserialize, Serialize};
use std::f64::consts::LN_2;
use std::fmt;

/// Outward-normal convention: Robin(α) means `∂_ν u + α u = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
    Robin(f64),
}

impl BoundaryCondition {
    /// Robin(0) is Neumann.
    pub fn robin(alpha: f64) -> Self {
        if alpha == 0.0 {
            BoundaryCondition::Neumann
        } else {
            BoundaryCondition::Robin(alpha)
        }
    }

    pub fn normalized(self) -> Self {
        match self {
            BoundaryCondition::Robin(a) => Self::robin(a),
            other => other,
        }
    }

    fn letter(&self) -> char {
        match self {
            BoundaryCondition::Dirichlet => 'D',
            BoundaryCondition::Neumann => 'N',
            BoundaryCondition::Robin(_) => 'R',
        }
    }
}

impl fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryCondition::Robin(a) => write!(f, "Robin({a})"),
            other => write!(f, "{}", other.letter()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CylinderSpec {
    pub cross_section: CrossSection,
    pub length: f64,
    pub left: BoundaryCondition,
    pub right: BoundaryCondition,
}

impl CylinderSpec {
    pub fn new(cross_section: CrossSection, length: f64, left: BoundaryCondition, right: BoundaryCondition) -> Result<Self> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::invalid(format!("length must be positive, got {length}")));
        }
        for bc in [left, right] {
            if let BoundaryCondition::Robin(a) = bc {
                if !a.is_finite() {
                    return Err(Error::invalid(format!("Robin parameter must be finite, got {a}")));
                }
            }
        }
        Ok(Self {
            cross_section,
            length,
            left: left.normalized(),
            right: right.normalized(),
        })
    }

    fn pair(&self) -> Result<Pair> {
        use BoundaryCondition::*;
        Ok(match (self.left, self.right) {
            (Dirichlet, Dirichlet) => Pair::DD,
            (Neumann, Neumann) => Pair::NN,
            (Neumann, Dirichlet) | (Dirichlet, Neumann) => Pair::ND,
            (Robin(a), Robin(b)) if a == b => Pair::RR(a),
            (Neumann, Robin(a)) | (Robin(a), Neumann) => Pair::NR(a),
            (l, r) => return Err(Error::UnsupportedBoundaryPair(format!("{l}/{r}"))),
        })
    }
}

/// Mirrored orientations are folded together (`u ↦ L - u`).
#[derive(Debug, Clone, Copy, PartialEq)]
enum Pair {
    DD,
    NN,
    ND,
    RR(f64),
    NR(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetReport {
    pub log_det: f64,
    pub phase_multiple: i64,
    pub kernel_dim: u64,
    pub terms: Vec<Term>,
    /// Sum of the truncation bounds of all series and numeric pieces.
    pub truncation: f64,
    /// Largest spectral cutoff used by any series.
    pub cutoff: f64,
    pub boundary: String,
}

impl DetReport {
    fn assemble(spec: &CylinderSpec, terms: Vec<Term>, kernel_dim: u64, truncation: f64, cutoff: f64) -> Self {
        let v = sum_terms(&terms);
        DetReport {
            log_det: v.re,
            phase_multiple: v.phase,
            kernel_dim,
            terms,
            truncation,
            cutoff,
            boundary: format!("{}/{}", spec.left, spec.right),
        }
    }

    pub fn log_value(&self) -> LogValue {
        LogValue::new(self.log_det, self.phase_multiple)
    }
}

/// The convergent sums over `μ > 0` appearing in the cylinder formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum SeriesForm {
    /// `Σ ln(1 - e^{-2L√μ})`
    Log1mExp,
    /// `Σ ln(1 + e^{-2L√μ})`
    Log1pExp,
    /// `Σ ln(1 - ((√μ-α)/(√μ+α))² e^{-2L√μ})`
    RobinRobin { alpha: f64 },
    /// `Σ ln(1 - (√μ-α)/(√μ+α) e^{-2L√μ})`
    NeumannRobin { alpha: f64 },
    /// `Σ ln[(1 - e^{-2L√μ}) / ((1 - r e^{-2a√μ})(1 - e^{-2(L-a)√μ}/r))]`, `r = (√μ-α)/(√μ+α)`
    RobinPair { alpha: f64, a: f64 },
    /// `Σ ln[(1 - e^{-2L√μ}) / ((1 - e^{-2a√μ})(1 - e^{-2(L-a)√μ}))]`
    NeumannPair { a: f64 },
}

impl SeriesForm {
    pub fn formula(&self) -> &'static str {
        match self {
            SeriesForm::Log1mExp => "Σ_(μ>0) ln(1 - e^{-2L√μ})",
            SeriesForm::Log1pExp => "Σ_(μ>0) ln(1 + e^{-2L√μ})",
            SeriesForm::RobinRobin { .. } => "Σ_(μ>0) ln(1 - (√μ-α)²/((√μ+α)² e^{2L√μ}))",
            SeriesForm::NeumannRobin { .. } => "Σ_(μ>0) ln(1 - (√μ-α)/((√μ+α) e^{2L√μ}))",
            SeriesForm::RobinPair { .. } => {
                "Σ_(μ>0) ln[(1 - e^{-2L√μ})/((1 - (√μ-α)/((√μ+α)e^{2a√μ}))(1 - (√μ+α)/((√μ-α)e^{2(L-a)√μ})))]"
            }
            SeriesForm::NeumannPair { .. } => {
                "Σ_(μ>0) ln[(1 - e^{-2L√μ})/((1 - e^{-2a√μ})(1 - e^{-2(L-a)√μ}))]"
            }
        }
    }
}

/// `ln(1 - y)` with a singularity check on `1 - y`.
fn log1m(y: f64) -> std::result::Result<LogValue, ()> {
    if !y.is_finite() || is_singular(1.0 - y, 1.0) {
        return Err(());
    }
    Ok(LogValue::ln_1p(-y))
}

pub fn bose_series(cs: &CrossSection, length: f64, form: SeriesForm, prec: &Precision) -> Result<SeriesValue> {
    prec.validate()?;
    if !(length > 0.0) || !length.is_finite() {
        return Err(Error::invalid(format!("length must be positive, got {length}")));
    }
    let l = length;
    let beta = 2.0 * l;
    if let SeriesForm::RobinPair { a, .. } | SeriesForm::NeumannPair { a } = form {
        if !(a > 0.0 && a < l) {
            return Err(Error::invalid(format!("cut must satisfy 0 < a < L, got a = {a}, L = {l}")));
        }
    }
    match form {
        SeriesForm::Log1mExp => exp_series(cs, Decay::log1m_ratio(beta, 1.0, 0.0), prec, |x| {
            log1m((-beta * x).exp()).map_err(|_| x)
        }),
        SeriesForm::Log1pExp => exp_series(cs, Decay::log1m_ratio(beta, 1.0, 0.0), prec, |x| {
            Ok(LogValue::ln_1p((-beta * x).exp()))
        }),
        SeriesForm::RobinRobin { alpha } => {
            exp_series(cs, Decay::log1m_ratio(beta, 9.0, 2.0 * alpha.abs()), prec, |x| {
                let r = (x - alpha) / (x + alpha);
                log1m(r * r * (-beta * x).exp()).map_err(|_| x)
            })
        }
        SeriesForm::NeumannRobin { alpha } => {
            exp_series(cs, Decay::log1m_ratio(beta, 3.0, 2.0 * alpha.abs()), prec, |x| {
                let r = (x - alpha) / (x + alpha);
                log1m(r * (-beta * x).exp()).map_err(|_| x)
            })
        }
        SeriesForm::RobinPair { alpha, a } => {
            let b = l - a;
            let beta = 2.0 * a.min(b);
            let x_min = (2.0 * alpha.abs()).max((6.0f64).ln() / beta);
            exp_series(cs, Decay { beta, c: 14.0, x_min }, prec, |x| {
                let r = (x - alpha) / (x + alpha);
                let num = log1m((-2.0 * l * x).exp()).map_err(|_| x)?;
                let d1 = log1m(r * (-2.0 * a * x).exp()).map_err(|_| x)?;
                let d2 = log1m((-2.0 * b * x).exp() / r).map_err(|_| x)?;
                Ok(num.minus(d1).minus(d2))
            })
        }
        SeriesForm::NeumannPair { a } => {
            let b = l - a;
            let beta = 2.0 * a.min(b);
            exp_series(cs, Decay::log1m_ratio(beta, 3.0, 0.0), prec, |x| {
                let f = |c: f64| LogValue::new((-(-2.0 * c * x).exp_m1()).ln(), 0);
                Ok(f(l).minus(f(a)).minus(f(b)))
            })
        }
    }
}

/// `-2L(ln 2 - 1)·Res` and `L·Fp` of `ζ_Δ` at `s = -1/2`.
fn res_fp_terms(cs: &CrossSection, length: f64, prec: &Precision) -> Result<[Term; 2]> {
    let z = zeta_point_with(cs, -0.5, false, prec.backend())?;
    Ok([
        Term::real(
            "Res term",
            "-2L(ln 2 - 1) · Res_{s=-1/2} ζ_{Δ_Y}(s)",
            -2.0 * length * (LN_2 - 1.0) * z.residue,
        ),
        Term::real("Fp term", "L · Fp_{s=-1/2} ζ_{Δ_Y}(s)", length * z.value),
    ])
}

fn scaled(q0: u64, v: LogValue) -> LogValue {
    LogValue::new(q0 as f64 * v.re, q0 as i64 * v.phase)
}

fn check_robin(cs: &CrossSection, pair: Pair, length: f64) -> Result<()> {
    match pair {
        Pair::RR(alpha) => {
            check_shift_admissible(cs, alpha)?;
            check_interface_admissible(cs, InterfaceGeometry::BothEnds { length }, alpha)
        }
        Pair::NR(alpha) => {
            check_shift_admissible(cs, alpha)?;
            check_interface_admissible(cs, InterfaceGeometry::NeumannRobinEnd { length }, alpha)
        }
        _ => Ok(()),
    }
}

pub fn log_det_cylinder(spec: &CylinderSpec) -> Result<DetReport> {
    log_det_cylinder_with(spec, &Precision::default())
}

/// `ln Det` (`ln Det*` for N/N) from the closed cylinder formulas.
pub fn log_det_cylinder_with(spec: &CylinderSpec, prec: &Precision) -> Result<DetReport> {
    prec.validate()?;
    let pair = spec.pair()?;
    let cs = &spec.cross_section;
    let l = spec.length;
    check_robin(cs, pair, l)?;
    if let CrossSection::Point = cs {
        return Ok(segment_report(spec, pair));
    }
    let q0 = kernel_dim(cs);
    let backend = prec.backend();
    let mut terms = Vec::new();
    let mut tail = 0.0;
    let mut kernel = 0;

    let series_form = match pair {
        Pair::DD | Pair::NN => SeriesForm::Log1mExp,
        Pair::ND => SeriesForm::Log1pExp,
        Pair::RR(alpha) => SeriesForm::RobinRobin { alpha },
        Pair::NR(alpha) => SeriesForm::NeumannRobin { alpha },
    };

    match pair {
        Pair::DD | Pair::NN => {
            terms.push(Term::real("leading", "q0 ln 2L", q0 as f64 * (2.0 * l).ln()));
            terms.extend(res_fp_terms(cs, l, prec)?);
            let star = log_det_star_with(cs, backend)?;
            tail += 0.5 * star.tail_bound;
            if pair == Pair::DD {
                terms.push(Term::real("half Det*", "-½ ln Det* Δ_Y", -0.5 * star.log_modulus));
            } else {
                terms.push(Term::real("half Det*", "+½ ln Det* Δ_Y", 0.5 * star.log_modulus));
                kernel = q0;
            }
        }
        Pair::ND => {
            terms.push(Term::real("leading", "q0 ln 2", q0 as f64 * LN_2));
            terms.extend(res_fp_terms(cs, l, prec)?);
        }
        Pair::RR(alpha) => {
            let heat = heat_expansion(cs)?;
            terms.push(Term::real("s_α", "-2 s_α", -2.0 * s_alpha(&heat, alpha)?));
            terms.push(Term::new(
                "leading",
                "q0 ln 2(L + 2/α)",
                scaled(q0, LogValue::ln(2.0 * (l + 2.0 / alpha))),
            ));
            terms.extend(res_fp_terms(cs, l, prec)?);
            let shifted = log_det_shifted_with(cs, alpha, backend)?;
            let star = log_det_star_with(cs, backend)?;
            tail += 2.0 * shifted.tail_bound + 0.5 * star.tail_bound;
            terms.push(Term::new("shifted Det", "2 ln Det(√Δ_Y + α)", scaled(2, shifted.log_value())));
            terms.push(Term::real("half Det*", "-½ ln Det* Δ_Y", -0.5 * star.log_modulus));
        }
        Pair::NR(alpha) => {
            let heat = heat_expansion(cs)?;
            terms.push(Term::real("s_α", "-s_α", -s_alpha(&heat, alpha)?));
            terms.push(Term::real("leading", "q0 ln 2", q0 as f64 * LN_2));
            let shifted = log_det_shifted_with(cs, alpha, backend)?;
            tail += shifted.tail_bound;
            terms.push(Term::new("shifted Det", "ln Det(√Δ_Y + α)", shifted.log_value()));
            terms.extend(res_fp_terms(cs, l, prec)?);
        }
    }
    let series = bose_series(cs, l, series_form, prec)?;
    tail += series.tail_bound;
    terms.push(Term::new("series", series_form.formula(), series.log_value()));
    Ok(DetReport::assemble(spec, terms, kernel, tail, series.cutoff))
}

fn segment_report(spec: &CylinderSpec, pair: Pair) -> DetReport {
    let l = spec.length;
    let (term, kernel) = match pair {
        Pair::DD => (Term::real("segment", "ln 2L", (2.0 * l).ln()), 0),
        Pair::NN => (Term::real("segment", "ln Det* = ln 2L", (2.0 * l).ln()), 1),
        Pair::ND => (Term::real("segment", "ln 2", LN_2), 0),
        Pair::RR(a) => (Term::new("segment", "ln(2α(Lα + 2))", LogValue::ln(2.0 * a * (l * a + 2.0))), 0),
        Pair::NR(a) => (Term::new("segment", "ln 2α", LogValue::ln(2.0 * a)), 0),
    };
    DetReport::assemble(spec, vec![term], kernel, 0.0, 0.0)
}

/// Second assembly: the Dirichlet determinant plus interface determinants,
/// `ln Det_B = ln Det_{D,D} - Σ s_α - ln det 𝔄 + ln Det*(Q_D(0) + S)`.
pub fn log_det_cylinder_via_dirichlet(spec: &CylinderSpec, prec: &Precision) -> Result<DetReport> {
    prec.validate()?;
    let pair = spec.pair()?;
    let cs = &spec.cross_section;
    let l = spec.length;
    check_robin(cs, pair, l)?;
    let q0 = kernel_dim(cs);
    let dd_spec = CylinderSpec::new(cs.clone(), l, BoundaryCondition::Dirichlet, BoundaryCondition::Dirichlet)?;
    let dd = log_det_cylinder_with(&dd_spec, prec)?;
    let mut terms: Vec<Term> = dd
        .terms
        .iter()
        .map(|t| Term { name: format!("D/D {}", t.name), ..t.clone() })
        .collect();
    let mut tail = dd.truncation;
    let mut cutoff = dd.cutoff;
    let mut kernel = 0;
    let mut push_interface = |terms: &mut Vec<Term>, geometry: InterfaceGeometry, alpha: f64| -> Result<()> {
        let d = log_det_interface(cs, geometry, alpha, prec)?;
        tail += d.tail_bound;
        cutoff = cutoff.max(d.cutoff);
        for t in d.terms {
            terms.push(Term {
                name: format!("{} {}", geometry.operator_name(), t.name),
                ..t
            });
        }
        Ok(())
    };
    match pair {
        Pair::DD => {}
        Pair::NN => {
            terms.push(Term::real("-ln det 𝔄", "-q0 ln(2/L)", -(q0 as f64) * (2.0 / l).ln()));
            push_interface(&mut terms, InterfaceGeometry::BothEnds { length: l }, 0.0)?;
            kernel = q0;
        }
        Pair::ND => push_interface(&mut terms, InterfaceGeometry::LeftNeumannCut { length: l }, 0.0)?,
        Pair::RR(alpha) => {
            let heat = heat_expansion(cs)?;
            terms.push(Term::real("s_α", "-2 s_α", -2.0 * s_alpha(&heat, alpha)?));
            push_interface(&mut terms, InterfaceGeometry::BothEnds { length: l }, alpha)?;
        }
        Pair::NR(alpha) => {
            push_interface(&mut terms, InterfaceGeometry::LeftNeumannCut { length: l }, 0.0)?;
            let heat = heat_expansion(cs)?;
            terms.push(Term::real("s_α", "-s_α", -s_alpha(&heat, alpha)?));
            push_interface(&mut terms, InterfaceGeometry::NeumannRobinEnd { length: l }, alpha)?;
        }
    }
    Ok(DetReport::assemble(spec, terms, kernel, tail, cutoff))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sum::phases_match;
    use std::f64::consts::PI;
    use BoundaryCondition::*;

    fn spec(cs: CrossSection, l: f64, a: BoundaryCondition, b: BoundaryCondition) -> CylinderSpec {
        CylinderSpec::new(cs, l, a, b).unwrap()
    }

    #[test]
    fn robin_zero_is_neumann() {
        assert_eq!(BoundaryCondition::robin(0.0), Neumann);
        let s = spec(CrossSection::point(), 1.0, Robin(0.0), Robin(0.0));
        assert_eq!(s.left, Neumann);
    }

    #[test]
    fn segment_specials() {
        let p = CrossSection::point;
        for &l in &[0.5, 1.0, 2.0, PI] {
            let r = log_det_cylinder(&spec(p(), l, Dirichlet, Dirichlet)).unwrap();
            assert_eq!(r.log_det, (2.0 * l).ln());
        }
        let r = log_det_cylinder(&spec(p(), 1.0, Robin(1.0), Robin(1.0))).unwrap();
        assert!((r.log_det - 6f64.ln()).abs() < 1e-15);
        let nn = log_det_cylinder(&spec(p(), 1.0, Neumann, Neumann)).unwrap();
        assert_eq!(nn.kernel_dim, 1);
    }

    #[test]
    fn segment_dd_increases_with_length() {
        let mut prev = f64::NEG_INFINITY;
        for i in 1..20 {
            let r = log_det_cylinder(&spec(CrossSection::point(), 0.3 * i as f64, Dirichlet, Dirichlet)).unwrap();
            assert!(r.log_det > prev);
            prev = r.log_det;
        }
    }

    #[test]
    fn unsupported_pairs() {
        let r = CylinderSpec::new(CrossSection::point(), 1.0, Dirichlet, Robin(1.0)).unwrap();
        assert!(matches!(log_det_cylinder(&r), Err(Error::UnsupportedBoundaryPair(_))));
        let r = CylinderSpec::new(CrossSection::point(), 1.0, Robin(1.0), Robin(2.0)).unwrap();
        assert!(matches!(log_det_cylinder(&r), Err(Error::UnsupportedBoundaryPair(_))));
    }

    #[test]
    fn general_formula_on_point_matches_specials() {
        // the point has ζ ≡ 0, Det(√Δ + α) = α and no series
        for (a, b) in [(Dirichlet, Dirichlet), (Neumann, Dirichlet), (Robin(0.7), Robin(0.7)), (Neumann, Robin(1.3))] {
            let s = spec(CrossSection::point(), 1.7, a, b);
            let closed = log_det_cylinder(&s).unwrap();
            let via = log_det_cylinder_via_dirichlet(&s, &Precision::default()).unwrap();
            assert!((closed.log_det - via.log_det).abs() < 1e-14, "{a}/{b}");
        }
    }

    #[test]
    fn two_paths_agree_on_circle() {
        let cs = CrossSection::circle(2.0 * PI).unwrap();
        let prec = Precision::default();
        for (a, b) in [
            (Dirichlet, Dirichlet),
            (Neumann, Neumann),
            (Neumann, Dirichlet),
            (Dirichlet, Neumann),
            (Robin(0.3), Robin(0.3)),
            (Robin(-0.4), Robin(-0.4)),
            (Neumann, Robin(0.9)),
            (Robin(-0.6), Neumann),
        ] {
            let s = spec(cs.clone(), 1.3, a, b);
            let closed = log_det_cylinder_with(&s, &prec).unwrap();
            let via = log_det_cylinder_via_dirichlet(&s, &prec).unwrap();
            assert!((closed.log_det - via.log_det).abs() < 1e-10, "{a}/{b}: {} vs {}", closed.log_det, via.log_det);
            assert!(phases_match(closed.phase_multiple, via.phase_multiple), "{a}/{b}");
            assert_eq!(closed.kernel_dim, via.kernel_dim);
        }
    }

    #[test]
    fn nn_minus_dd_is_det_star() {
        let cs = CrossSection::circle(3.0).unwrap();
        let dd = log_det_cylinder(&spec(cs.clone(), 1.0, Dirichlet, Dirichlet)).unwrap();
        let nn = log_det_cylinder(&spec(cs.clone(), 1.0, Neumann, Neumann)).unwrap();
        let star = crate::zreg::log_det_star(&cs).unwrap().log_modulus;
        for (d, n) in dd.terms.iter().zip(&nn.terms) {
            let diff = n.value - d.value;
            if d.name == "half Det*" {
                assert!((diff - star).abs() < 1e-14);
            } else {
                assert_eq!(diff, 0.0);
            }
        }
    }

    #[test]
    fn flat_residues_vanish() {
        for cs in [CrossSection::circle(2.0).unwrap(), CrossSection::flat_torus(1.0, 1.5).unwrap()] {
            let z = zeta_point_with(&cs, -0.5, false, Precision::default().backend()).unwrap();
            assert!(z.residue.abs() < 1e-12);
        }
    }

    #[test]
    fn bose_series_examples() {
        let cs = CrossSection::circle(2.0 * PI).unwrap();
        let prec = Precision::default();
        let m = bose_series(&cs, 1.0, SeriesForm::Log1mExp, &prec).unwrap();
        let direct: f64 = (1..100).map(|k| 2.0 * (-(-2.0 * k as f64).exp()).ln_1p()).sum();
        assert!((m.value - direct).abs() < 1e-15);
        assert!(m.value < 0.0);
        assert!(bose_series(&cs, 1.0, SeriesForm::Log1pExp, &prec).unwrap().value > 0.0);
        let far = bose_series(&cs, 50.0, SeriesForm::Log1mExp, &prec).unwrap();
        assert!(far.value.abs() < 1e-40);
        assert_eq!(bose_series(&CrossSection::point(), 1.0, SeriesForm::Log1mExp, &prec).unwrap().value, 0.0);
        let r = bose_series(&cs, 1.0, SeriesForm::RobinPair { alpha: 2.0, a: 0.5 }, &prec);
        assert!(matches!(r, Err(Error::SingularSeriesTerm { .. })));
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn inadmissible_robin_names_the_collision() {
        let cs = CrossSection::circle(6.2831853).unwrap();
        let r = log_det_cylinder(&spec(cs, 1.0, Robin(-1.0), Robin(-1.0)));
        assert!(matches!(r, Err(Error::SingularRobin { .. })), "{r:?}");
    }

    #[test]
    fn torus_two_paths_agree() {
        let cs = CrossSection::flat_torus(2.0, 2.5).unwrap();
        let prec = Precision::default();
        for (a, b) in [(Neumann, Neumann), (Robin(0.5), Robin(0.5)), (Neumann, Robin(0.5))] {
            let s = spec(cs.clone(), 0.8, a, b);
            let closed = log_det_cylinder_with(&s, &prec).unwrap();
            let via = log_det_cylinder_via_dirichlet(&s, &prec).unwrap();
            assert!((closed.log_det - via.log_det).abs() < 1e-9, "{a}/{b}: {} vs {}", closed.log_det, via.log_det);
        }
    }
}
