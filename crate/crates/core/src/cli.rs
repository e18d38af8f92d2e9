//! Command-line front end. Every command produces a [`Report`] whose
//! `terms` re-sum left to right to `value`.

use crate::cylinder::{log_det_cylinder_with, BoundaryCondition, CylinderSpec};
use crate::error::{Error, Result};
use crate::gluing::{glue_check, GluingConfig};
use crate::interface_ops::{log_det_interface, log_det_star_rs0, spec_interface, spec_rs0, InterfaceGeometry};
use crate::oracle::{oracle_log_det, relative_log_det, SecularProblem};
use crate::report::{sum_terms, Term};
use crate::series::Precision;
use crate::spectra::CrossSection;
use crate::zreg::{zeta_point_with, Backend};
use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::io::{self, Write};
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Det,
    DnSpec,
    Glue,
    Zeta,
    OracleCompare,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum GeometryKind {
    BothEnds,
    LeftNeumannCut,
    NeumannRobinEnd,
    CutLeft,
    CutRight,
    /// The gluing operator `R_S(0)` (`R_Neu(0)` at `α = 0`).
    Rs0,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    Closed,
    Mellin,
}

/// Everything a run needs. The same shape is accepted from `--config`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default = "default_cross")]
    pub cross: String,
    #[serde(default = "default_length", rename = "L")]
    pub length: f64,
    #[serde(default)]
    pub a: Option<f64>,
    #[serde(default = "default_bc")]
    pub bc: String,
    #[serde(default)]
    pub alpha: f64,
    #[serde(default = "default_target")]
    pub target: f64,
    /// Multiplier on every adaptive spectral cutoff.
    #[serde(default = "default_cutoff")]
    pub cutoff: f64,
    #[serde(default)]
    pub format: Format,
    #[serde(default)]
    pub geometry: Option<GeometryKind>,
    /// Eigenvalue cutoff on `Spec(Δ_Y)` for listed interface spectra.
    #[serde(default = "default_list_cutoff")]
    pub list_cutoff: f64,
    #[serde(default)]
    pub s: Option<f64>,
    #[serde(default)]
    pub include_zero: bool,
    #[serde(default)]
    pub backend: Option<BackendKind>,
    #[serde(default = "default_eigenvalues")]
    pub eigenvalues: usize,
}

fn default_cross() -> String {
    "point".into()
}
fn default_length() -> f64 {
    1.0
}
fn default_bc() -> String {
    "dd".into()
}
fn default_target() -> f64 {
    1e-10
}
fn default_cutoff() -> f64 {
    1.0
}
fn default_list_cutoff() -> f64 {
    100.0
}
fn default_eigenvalues() -> usize {
    10_000
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            cross: default_cross(),
            length: default_length(),
            a: None,
            bc: default_bc(),
            alpha: 0.0,
            target: default_target(),
            cutoff: default_cutoff(),
            format: Format::Json,
            geometry: None,
            list_cutoff: default_list_cutoff(),
            s: None,
            include_zero: false,
            backend: None,
            eigenvalues: default_eigenvalues(),
        }
    }

    pub fn precision(&self) -> Precision {
        Precision { target: self.target, cutoff_scale: self.cutoff, ..Precision::default() }
    }

    /// Checks every field the command reads, before any computation.
    pub fn validate(&self) -> Result<()> {
        self.precision().validate()?;
        if !(self.length > 0.0) || !self.length.is_finite() {
            return Err(Error::invalid(format!("L must be positive, got {}", self.length)));
        }
        if !self.alpha.is_finite() {
            return Err(Error::invalid("alpha must be finite"));
        }
        parse_boundary(&self.bc, self.alpha)?;
        match self.command {
            Command::Glue => {
                let a = self.cut()?;
                if !(a > 0.0 && a < self.length) {
                    return Err(Error::invalid(format!("cut a = {a} must lie in (0, L)")));
                }
            }
            Command::DnSpec => {
                let g = self.geometry.ok_or_else(|| Error::invalid("dn-spec needs --geometry"))?;
                if matches!(g, GeometryKind::CutLeft | GeometryKind::CutRight | GeometryKind::Rs0) {
                    self.cut()?;
                }
                if !(self.list_cutoff >= 0.0) || !self.list_cutoff.is_finite() {
                    return Err(Error::invalid("list cutoff must be finite and non-negative"));
                }
            }
            Command::Zeta => {
                let s = self.s.ok_or_else(|| Error::invalid("zeta needs --s"))?;
                if !s.is_finite() {
                    return Err(Error::invalid("s must be finite"));
                }
            }
            Command::OracleCompare => {
                if self.cross != "point" {
                    return Err(Error::invalid("oracle-compare runs on the segment (--cross point)"));
                }
                if self.eigenvalues < 16 {
                    return Err(Error::invalid("oracle-compare needs at least 16 eigenvalues"));
                }
            }
            Command::Det => {}
        }
        Ok(())
    }

    fn cut(&self) -> Result<f64> {
        self.a.ok_or_else(|| Error::invalid("this command needs --a"))
    }
}

/// `point`, `circle:ℓ`, `torus:ℓ1,ℓ2` or `explicit:path`.
pub fn parse_cross_section(desc: &str) -> Result<CrossSection> {
    let num = |s: &str| -> Result<f64> {
        s.trim().parse::<f64>().map_err(|_| Error::invalid(format!("not a number: {s:?}")))
    };
    let (kind, arg) = desc.split_once(':').unwrap_or((desc, ""));
    match kind {
        "point" if arg.is_empty() => Ok(CrossSection::point()),
        "circle" => CrossSection::circle(num(arg)?),
        "torus" => {
            let (a, b) = arg
                .split_once(',')
                .ok_or_else(|| Error::invalid("torus needs two lengths: torus:l1,l2"))?;
            CrossSection::flat_torus(num(a)?, num(b)?)
        }
        "explicit" => {
            let text = std::fs::read_to_string(arg).map_err(|e| Error::invalid(format!("{arg}: {e}")))?;
            CrossSection::from_explicit_json(&text)
        }
        _ => Err(Error::invalid(format!("unknown cross-section {desc:?}"))),
    }
}

/// Two letters, left end first; `r` takes the Robin parameter `alpha`.
pub fn parse_boundary(code: &str, alpha: f64) -> Result<(BoundaryCondition, BoundaryCondition)> {
    let one = |c: char| match c {
        'd' => Ok(BoundaryCondition::Dirichlet),
        'n' => Ok(BoundaryCondition::Neumann),
        'r' => Ok(BoundaryCondition::Robin(alpha)),
        _ => Err(Error::invalid(format!("unknown boundary letter {c:?}"))),
    };
    let chars: Vec<char> = code.to_ascii_lowercase().chars().collect();
    match chars.as_slice() {
        [l, r] => Ok((one(*l)?, one(*r)?)),
        _ => Err(Error::invalid(format!("boundary code must be two letters, got {code:?}"))),
    }
}

/// The serialized result of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: Command,
    /// Left-to-right sum of `terms`.
    pub value: f64,
    /// Imaginary part of `value` in units of `π`.
    pub phase: i64,
    pub terms: Vec<Term>,
    /// Bound on the numerical error of `value`.
    pub tolerance_achieved: f64,
    /// Identities and methods the value rests on.
    pub citations: Vec<String>,
    /// Command-specific fields.
    pub details: Value,
}

impl Report {
    fn new(command: Command, terms: Vec<Term>, tolerance: f64, citations: &[&str], details: Value) -> Self {
        let v = sum_terms(&terms);
        Self {
            command,
            value: v.re,
            phase: v.phase,
            terms,
            tolerance_achieved: tolerance,
            citations: citations.iter().map(|s| s.to_string()).collect(),
            details,
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

pub fn run(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let cs = parse_cross_section(&cfg.cross)?;
    let prec = cfg.precision();
    match cfg.command {
        Command::Det => {
            let (left, right) = parse_boundary(&cfg.bc, cfg.alpha)?;
            let spec = CylinderSpec::new(cs, cfg.length, left, right)?;
            let r = log_det_cylinder_with(&spec, &prec)?;
            let details = serde_json::json!({
                "log_det": r.log_det,
                "kernel_dim": r.kernel_dim,
                "boundary": r.boundary,
                "cutoff": r.cutoff,
            });
            Ok(Report::new(
                Command::Det,
                r.terms,
                r.truncation,
                &["zeta-regularized determinant of a product cylinder by separation of variables"],
                details,
            ))
        }
        Command::DnSpec => dn_spec(cfg, &cs, &prec),
        Command::Glue => {
            let g = GluingConfig::new(cs, cfg.length, cfg.cut()?, cfg.alpha)?;
            let r = glue_check(&g, &prec)?;
            let mut terms = r.lhs_terms.clone();
            terms.extend(r.rhs_terms.iter().map(Term::negated));
            let details = serde_json::json!({
                "lhs": r.lhs,
                "rhs": r.rhs,
                "lhs_phase": r.lhs_phase,
                "rhs_phase": r.rhs_phase,
                "residual": r.residual,
                "phase_match": r.phase_match,
                "cutoff": r.cutoff,
            });
            let cite = if cfg.alpha == 0.0 {
                "gluing formula across a Neumann cut"
            } else {
                "gluing formula across a Robin cut"
            };
            Ok(Report::new(Command::Glue, terms, r.truncation, &[cite], details))
        }
        Command::Zeta => {
            let s = cfg.s.expect("validated");
            let backend = match cfg.backend {
                Some(BackendKind::Mellin) => Backend::numeric(prec.mellin()),
                _ => prec.backend(),
            };
            let z = zeta_point_with(&cs, s, cfg.include_zero, backend)?;
            let name = if z.residue != 0.0 { "Fp ζ_Δ(s)" } else { "ζ_Δ(s)" };
            let terms = vec![Term::real(name, "Σ μ^(-s) over Spec(Δ_Y), continued", z.value)];
            let cite: &[&str] = if matches!(cfg.backend, Some(BackendKind::Mellin)) {
                &["Mellin transform of the heat trace split at T"]
            } else {
                &["closed-form spectral zeta function where available"]
            };
            Ok(Report::new(Command::Zeta, terms, cfg.target, cite, to_value(&z)))
        }
        Command::OracleCompare => oracle_compare(cfg, &prec),
    }
}

fn dn_spec(cfg: &RunConfig, cs: &CrossSection, prec: &Precision) -> Result<Report> {
    let l = cfg.length;
    let geom = match cfg.geometry.expect("validated") {
        GeometryKind::BothEnds => InterfaceGeometry::BothEnds { length: l },
        GeometryKind::LeftNeumannCut => InterfaceGeometry::LeftNeumannCut { length: l },
        GeometryKind::NeumannRobinEnd => InterfaceGeometry::NeumannRobinEnd { length: l },
        GeometryKind::CutLeft => InterfaceGeometry::CutLeft { a: cfg.cut()? },
        GeometryKind::CutRight => InterfaceGeometry::CutRight { width: l - cfg.cut()? },
        GeometryKind::Rs0 => {
            let a = cfg.cut()?;
            let det = log_det_star_rs0(cs, l, a, cfg.alpha, prec)?;
            let spectrum = spec_rs0(cs, l, a, cfg.alpha, cfg.list_cutoff)?;
            let details = serde_json::json!({ "spectrum": spectrum, "excluded_zero_modes": det.excluded_zero_modes });
            return Ok(Report::new(
                Command::DnSpec,
                det.terms,
                det.tail_bound,
                &["sum of the Dirichlet-to-Neumann maps of the two pieces at the cut"],
                details,
            ));
        }
    };
    let det = log_det_interface(cs, geom, cfg.alpha, prec)?;
    let spectrum = spec_interface(cs, geom, cfg.alpha, cfg.list_cutoff)?;
    let details = serde_json::json!({
        "operator": geom.operator_name(),
        "eigenvalue_formula": geom.formula(),
        "spectrum": spectrum,
        "excluded_zero_modes": det.excluded_zero_modes,
    });
    Ok(Report::new(
        Command::DnSpec,
        det.terms,
        det.tail_bound,
        &["Dirichlet-to-Neumann operator diagonalized in the eigenbasis of the cross-section"],
        details,
    ))
}

fn oracle_compare(cfg: &RunConfig, prec: &Precision) -> Result<Report> {
    let (left, right) = parse_boundary(&cfg.bc, cfg.alpha)?;
    let spec = CylinderSpec::new(CrossSection::point(), cfg.length, left, right)?;
    let closed = log_det_cylinder_with(&spec, prec)?;
    let p = SecularProblem::new(cfg.length, left, right)?;
    let n = cfg.eigenvalues;
    let oracle = oracle_log_det(&p, n)?;
    let dd = SecularProblem::new(cfg.length, BoundaryCondition::Dirichlet, BoundaryCondition::Dirichlet)?;
    let rel = relative_log_det(&p, &dd, n)?;
    let terms = vec![
        Term::real("ln Det (closed form)", "closed-form segment determinant", closed.log_det),
        Term::real(
            "-ln Det (eigenvalue oracle)",
            "-[ln Det(model) + Σ ln(μ_n / model_n)], Richardson-extrapolated",
            -oracle.log_det,
        ),
    ];
    let closed_dd = (2.0 * cfg.length).ln();
    let details = serde_json::json!({
        "closed": closed.log_det,
        "oracle": oracle,
        "relative_to_dirichlet": rel,
        "closed_relative_to_dirichlet": closed.log_det - closed_dd,
        "relative_discrepancy": (rel.value - (closed.log_det - closed_dd)).abs(),
    });
    Ok(Report::new(
        Command::OracleCompare,
        terms,
        oracle.error_estimate + closed.truncation,
        &["secular-equation eigenvalues regularized against a Hurwitz model spectrum"],
        details,
    ))
}

/// JSON with every float written to 17 significant digits.
struct FixedFloats;

impl serde_json::ser::Formatter for FixedFloats {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }
}

pub fn to_json(report: &Report) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FixedFloats);
    report.serialize(&mut ser).expect("report types serialize");
    String::from_utf8(out).expect("JSON is UTF-8")
}

pub fn to_table(report: &Report) -> String {
    let width = report.terms.iter().map(|t| t.name.chars().count()).max().unwrap_or(0).max(5);
    let mut s = String::new();
    for t in &report.terms {
        let phase = if t.phase != 0 { format!("  {:+}iπ", t.phase) } else { String::new() };
        s += &format!("{:<width$}  {:>24.16e}{phase}\n", t.name, t.value);
    }
    s += &format!("{:-<w$}\n", "", w = width + 26);
    let phase = if report.phase != 0 { format!("  {:+}iπ", report.phase) } else { String::new() };
    s += &format!("{:<width$}  {:>24.16e}{phase}\n", "value", report.value);
    s += &format!("{:<width$}  {:>24.3e}\n", "tol", report.tolerance_achieved);
    if let Some(r) = report.details.get("residual") {
        s += &format!("{:<width$}  {:>24}\n", "residual", r.to_string());
    }
    s
}

#[derive(Debug, Parser)]
#[command(name = "zetaglue", version, about = "Zeta-regularized determinants on [0, L] × Y and gluing checks")]
pub struct Cli {
    /// det, dn-spec, glue, zeta or oracle-compare; may come from --config.
    #[arg(value_enum)]
    pub command: Option<Command>,
    /// point | circle:ℓ | torus:ℓ1,ℓ2 | explicit:path.json
    #[arg(long)]
    pub cross: Option<String>,
    #[arg(long = "L", alias = "length")]
    pub length: Option<f64>,
    #[arg(long)]
    pub a: Option<f64>,
    /// dd | nn | nd | dn | rr | nr | rn (left end first)
    #[arg(long)]
    pub bc: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub target: Option<f64>,
    /// Multiplier on every spectral cutoff.
    #[arg(long)]
    pub cutoff: Option<f64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long, value_enum)]
    pub geometry: Option<GeometryKind>,
    #[arg(long)]
    pub list_cutoff: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<f64>,
    #[arg(long)]
    pub include_zero: bool,
    #[arg(long, value_enum)]
    pub backend: Option<BackendKind>,
    #[arg(long)]
    pub eigenvalues: Option<usize>,
    /// JSON file with RunConfig fields; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl Cli {
    pub fn into_config(self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::invalid(format!("{}: {e}", path.display())))?;
                let mut v: Value =
                    serde_json::from_str(&text).map_err(|e| Error::invalid(format!("config: {e}")))?;
                if let (Some(c), Value::Object(m)) = (self.command, &mut v) {
                    m.insert("command".into(), to_value(&c));
                }
                serde_json::from_value::<RunConfig>(v).map_err(|e| Error::invalid(format!("config: {e}")))?
            }
            None => RunConfig::new(self.command.ok_or_else(|| Error::invalid("missing command"))?),
        };
        if let Some(c) = self.command {
            cfg.command = c;
        }
        macro_rules! take {
            ($($f:ident),*) => { $( if let Some(v) = self.$f { cfg.$f = v; } )* };
        }
        take!(cross, length, bc, alpha, target, cutoff, format, list_cutoff, eigenvalues);
        if self.a.is_some() {
            cfg.a = self.a;
        }
        if self.geometry.is_some() {
            cfg.geometry = self.geometry;
        }
        if self.s.is_some() {
            cfg.s = self.s;
        }
        if self.backend.is_some() {
            cfg.backend = self.backend;
        }
        cfg.include_zero |= self.include_zero;
        Ok(cfg)
    }
}

/// Caps the global thread pool from `ZETAGLUE_THREADS`.
pub fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("ZETAGLUE_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::invalid(format!("ZETAGLUE_THREADS must be a positive integer, got {v:?}")))?;
    // a second call finds the pool already built, which is fine
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Parses `args`, runs, writes the report to `out`; returns the exit code.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = write!(err, "{e}");
            return code;
        }
    };
    let result = configure_threads().and_then(|_| cli.into_config()).and_then(|cfg| {
        let report = run(&cfg)?;
        Ok((cfg.format, report))
    });
    match result {
        Ok((format, report)) => {
            let text = match format {
                Format::Json => to_json(&report) + "\n",
                Format::Table => to_table(&report),
            };
            if out.write_all(text.as_bytes()).is_err() {
                return 1;
            }
            0
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = main_with_args(std::iter::once("zetaglue").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn point_dirichlet_is_ln2() {
        let (code, out, _) = run_args(&["det", "--cross", "point", "--L", "1", "--bc", "dd"]);
        assert_eq!(code, 0);
        let r: Report = serde_json::from_str(&out).unwrap();
        assert!((r.value - 2f64.ln()).abs() < 1e-15);
        assert!((r.details["log_det"].as_f64().unwrap() - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn parsers() {
        assert_eq!(parse_cross_section("point").unwrap(), CrossSection::point());
        assert_eq!(parse_cross_section("circle:2").unwrap(), CrossSection::circle(2.0).unwrap());
        assert!(parse_cross_section("torus:1").is_err());
        assert!(parse_cross_section("sphere:1").is_err());
        assert_eq!(
            parse_boundary("NR", 0.5).unwrap(),
            (BoundaryCondition::Neumann, BoundaryCondition::Robin(0.5))
        );
        assert!(parse_boundary("dx", 0.0).is_err());
    }

    #[test]
    fn json_floats_have_17_digits_and_round_trip() {
        let mut cfg = RunConfig::new(Command::Det);
        cfg.cross = "circle:1".into();
        cfg.bc = "nn".into();
        let r = run(&cfg).unwrap();
        let text = to_json(&r);
        assert!(text.contains(&format!("{:.16e}", r.value)));
        let back: Report = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
        assert_eq!(sum_terms(&back.terms).re.to_bits(), back.value.to_bits());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_args(&["det", "--bc", "xx"]).0, 2);
        assert_eq!(run_args(&["det", "--L", "-1"]).0, 2);
        assert_eq!(run_args(&["frobnicate"]).0, 2);
        assert_eq!(run_args(&["glue", "--L", "2"]).0, 2);
        assert_eq!(run_args(&["det", "--bc", "rr", "--alpha", "-1", "--cross", "circle:6.2831853"]).0, 4);
    }

    #[test]
    fn config_round_trips_and_flags_override() {
        let mut cfg = RunConfig::new(Command::Glue);
        cfg.a = Some(0.7);
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(serde_json::from_str::<RunConfig>(&text).unwrap(), cfg);
        let minimal: RunConfig = serde_json::from_str(r#"{"command": "det"}"#).unwrap();
        assert_eq!(minimal, RunConfig::new(Command::Det));
        assert!(serde_json::from_str::<RunConfig>(r#"{"command": "det", "bogus": 1}"#).is_err());
    }

    #[test]
    fn table_output() {
        let (code, out, _) = run_args(&["det", "--bc", "nd", "--format", "table"]);
        assert_eq!(code, 0);
        assert!(out.contains("value"));
    }
}
