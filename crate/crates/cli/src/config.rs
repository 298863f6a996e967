//! Scenario configuration: TOML with one section per subcommand.
//!
//! Complex amplitudes are written as `"re,im"` strings or plain numbers.
//! Every key has a built-in default, listed in `configs/default.toml`.

use std::ops::Range;

use num_complex::Complex64;
use serde::Deserialize;
use toml::Spanned;
use weakecho::analysis::{Parametrization, DEFAULT_ECHO_THRESHOLD};
use weakecho::{GridSpec, MeasuredObservable, PointerFamily, PulseConjugate, SystemState};

use crate::error::CliError;
use crate::joint::JointConfig;

pub const DEFAULT_CONFIG: &str = include_str!("../configs/default.toml");

/// Squared-norm slack accepted for hand-written states before renormalizing.
const STATE_NORM_SLACK: f64 = 1e-6;
const MAX_SWEEP_POINTS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    Gaussian,
    Pulse,
    Qubit,
}

impl FamilyKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Gaussian => "gaussian",
            Self::Pulse => "pulse",
            Self::Qubit => "qubit",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Strength {
    Value(f64),
    /// The zero crossing of `Re D_10` nearest the nominal strong strength.
    Strong,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub pointer: PointerParams,
    pub observable: MeasuredObservable,
    /// Line and column of the eigenvalue list, for errors found at run time.
    pub eigenvalues_at: (usize, usize),
    pub psi: SystemState,
    pub f: SystemState,
    pub grid: GridSpec,
    pub distinguishability: DistinguishabilityConfig,
    pub shift_sweep: ShiftSweepConfig,
    pub echo_scan: EchoScanConfig,
    pub verify_conditions: VerifyConfig,
    pub aav_convergence: AavConfig,
    pub oracle_check: OracleConfig,
    pub joint: Option<JointConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointerParams {
    pub sigma: f64,
    pub omega: f64,
    pub cep: f64,
    pub conjugate: PulseConjugate,
}

impl PointerParams {
    pub fn family(&self, kind: FamilyKind) -> weakecho::Result<PointerFamily> {
        match kind {
            FamilyKind::Gaussian => PointerFamily::gaussian(self.sigma),
            FamilyKind::Pulse => {
                PointerFamily::optical_pulse_with(self.sigma, self.omega, self.cep, self.conjugate)
            }
            FamilyKind::Qubit => Ok(PointerFamily::qubit()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistinguishabilityConfig {
    pub families: Vec<FamilyKind>,
    pub etas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftSweepConfig {
    pub family: FamilyKind,
    pub strengths: Vec<Strength>,
    pub sweeps: Vec<(Parametrization, Vec<f64>)>,
    pub eta_eff: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EchoScanConfig {
    pub families: Vec<FamilyKind>,
    pub range: (f64, f64),
    pub exclude_origin: f64,
    pub step: f64,
    pub threshold: f64,
    pub include_boundary: bool,
    pub eta_bar: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub families: Vec<FamilyKind>,
    pub etas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AavConfig {
    pub family: FamilyKind,
    /// Post-selection for this run; differs from `f` by default so the weak
    /// value is anomalous.
    pub f: SystemState,
    pub eta_start: f64,
    pub eta_end: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleConfig {
    pub families: Vec<FamilyKind>,
    pub etas: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub tolerance: f64,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    pointer: RawPointer,
    #[serde(default)]
    system: RawSystem,
    #[serde(default)]
    grid: RawGrid,
    #[serde(default)]
    distinguishability: RawFamiliesEtas,
    #[serde(default, rename = "shift-sweep")]
    shift_sweep: RawShiftSweep,
    #[serde(default, rename = "echo-scan")]
    echo_scan: RawEchoScan,
    #[serde(default, rename = "verify-conditions")]
    verify_conditions: RawFamiliesEtas,
    #[serde(default, rename = "aav-convergence")]
    aav_convergence: RawAav,
    #[serde(default, rename = "oracle-check")]
    oracle_check: RawOracle,
    joint: Option<RawJoint>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawJoint {
    amplitudes: String,
    pointer_dim: Option<Spanned<i64>>,
    chi: Option<Spanned<String>>,
    mu: Option<Spanned<String>>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawPointer {
    sigma: Option<Spanned<f64>>,
    omega: Option<Spanned<f64>>,
    cep: Option<Spanned<f64>>,
    conjugate: Option<Spanned<String>>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    eigenvalues: Option<Spanned<Vec<f64>>>,
    psi: Option<Spanned<Vec<RawComplex>>>,
    f: Option<Spanned<Vec<RawComplex>>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawComplex {
    Real(f64),
    Pair(String),
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    points: Option<Spanned<i64>>,
    half_width: Option<Spanned<f64>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawValues {
    List(Vec<f64>),
    Range {
        start: f64,
        stop: f64,
        step: Option<f64>,
        count: Option<i64>,
    },
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawFamiliesEtas {
    families: Option<Spanned<Vec<Spanned<String>>>>,
    eta: Option<Spanned<RawValues>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawStrength {
    Value(f64),
    Named(String),
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawShiftSweep {
    family: Option<Spanned<String>>,
    eta: Option<Spanned<Vec<Spanned<RawStrength>>>>,
    theta: Option<Spanned<RawValues>>,
    phi: Option<Spanned<RawValues>>,
    eta_eff: Option<Spanned<f64>>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawEchoScan {
    families: Option<Spanned<Vec<Spanned<String>>>>,
    range: Option<Spanned<Vec<f64>>>,
    exclude_origin: Option<Spanned<f64>>,
    step: Option<Spanned<f64>>,
    threshold: Option<Spanned<f64>>,
    include_boundary: Option<bool>,
    eta_bar: Option<Spanned<f64>>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawAav {
    family: Option<Spanned<String>>,
    f: Option<Spanned<Vec<RawComplex>>>,
    eta_start: Option<Spanned<f64>>,
    eta_end: Option<Spanned<f64>>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawOracle {
    families: Option<Spanned<Vec<Spanned<String>>>>,
    eta: Option<Spanned<RawValues>>,
    trials: Option<Spanned<i64>>,
    seed: Option<u64>,
    tolerance: Option<Spanned<f64>>,
}

/// Turns byte spans into 1-based line and column numbers.
struct Source<'a> {
    text: &'a str,
}

impl Source<'_> {
    fn position(&self, span: Option<Range<usize>>) -> (usize, usize) {
        let Some(span) = span else { return (1, 1) };
        let before = &self.text[..span.start.min(self.text.len())];
        let line = before.matches('\n').count() + 1;
        let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
        (line, column)
    }

    fn error(&self, span: Option<Range<usize>>, message: impl Into<String>) -> CliError {
        let (line, column) = self.position(span);
        CliError::Config {
            line,
            column,
            message: message.into(),
        }
    }

    fn at<T>(&self, value: &Spanned<T>, message: impl Into<String>) -> CliError {
        self.error(Some(value.span()), message)
    }
}

fn finite(src: &Source, v: &Spanned<f64>, name: &str) -> Result<f64, CliError> {
    let x = *v.get_ref();
    if !x.is_finite() {
        return Err(src.at(v, format!("{name} must be finite")));
    }
    Ok(x)
}

fn positive(src: &Source, v: &Spanned<f64>, name: &str) -> Result<f64, CliError> {
    let x = finite(src, v, name)?;
    if x <= 0.0 {
        return Err(src.at(v, format!("{name} must be positive, got {x}")));
    }
    Ok(x)
}

fn opt_f64(
    src: &Source,
    v: &Option<Spanned<f64>>,
    default: f64,
    check: fn(&Source, &Spanned<f64>, &str) -> Result<f64, CliError>,
    name: &str,
) -> Result<f64, CliError> {
    v.as_ref().map_or(Ok(default), |v| check(src, v, name))
}

fn family_kind(src: &Source, v: &Spanned<String>) -> Result<FamilyKind, CliError> {
    match v.get_ref().as_str() {
        "gaussian" => Ok(FamilyKind::Gaussian),
        "pulse" => Ok(FamilyKind::Pulse),
        "qubit" => Ok(FamilyKind::Qubit),
        other => Err(src.at(
            v,
            format!("unknown pointer family `{other}` (expected gaussian, pulse or qubit)"),
        )),
    }
}

fn families(
    src: &Source,
    v: &Option<Spanned<Vec<Spanned<String>>>>,
    default: &[FamilyKind],
) -> Result<Vec<FamilyKind>, CliError> {
    let Some(list) = v else {
        return Ok(default.to_vec());
    };
    if list.get_ref().is_empty() {
        return Err(src.at(list, "family list is empty"));
    }
    list.get_ref().iter().map(|f| family_kind(src, f)).collect()
}

fn values(src: &Source, v: &Spanned<RawValues>, name: &str) -> Result<Vec<f64>, CliError> {
    let out = match v.get_ref() {
        RawValues::List(list) => list.clone(),
        RawValues::Range {
            start,
            stop,
            step,
            count,
        } => {
            if !(start.is_finite() && stop.is_finite()) || stop < start {
                return Err(src.at(v, format!("{name} range needs finite start <= stop")));
            }
            let n = match (step, count) {
                (Some(step), None) => {
                    if !(step.is_finite() && *step > 0.0) {
                        return Err(src.at(v, format!("{name} step must be positive")));
                    }
                    ((stop - start) / step + 1e-9).floor() as usize + 1
                }
                (None, Some(count)) if *count >= 1 => *count as usize,
                (None, Some(_)) => {
                    return Err(src.at(v, format!("{name} count must be at least 1")))
                }
                _ => {
                    return Err(src.at(
                        v,
                        format!("{name} range needs exactly one of step or count"),
                    ))
                }
            };
            if n > MAX_SWEEP_POINTS {
                return Err(src.at(
                    v,
                    format!("{name} range has {n} points, limit {MAX_SWEEP_POINTS}"),
                ));
            }
            match step {
                Some(step) => (0..n).map(|k| start + k as f64 * step).collect(),
                None if n == 1 => vec![*start],
                None => (0..n)
                    .map(|k| start + (stop - start) * k as f64 / (n - 1) as f64)
                    .collect(),
            }
        }
    };
    if out.is_empty() {
        return Err(src.at(v, format!("{name} list is empty")));
    }
    if out.iter().any(|x| !x.is_finite()) {
        return Err(src.at(v, format!("{name} values must be finite")));
    }
    Ok(out)
}

fn opt_values(
    src: &Source,
    v: &Option<Spanned<RawValues>>,
    default: Vec<f64>,
    name: &str,
) -> Result<Vec<f64>, CliError> {
    v.as_ref().map_or(Ok(default), |v| values(src, v, name))
}

fn complex(
    src: &Source,
    v: &Spanned<Vec<RawComplex>>,
    entry: &RawComplex,
) -> Result<Complex64, CliError> {
    match entry {
        RawComplex::Real(x) => Ok(Complex64::new(*x, 0.0)),
        RawComplex::Pair(s) => {
            let parse = |t: &str| t.trim().parse::<f64>().ok();
            let parsed = match s.split_once(',') {
                Some((re, im)) => parse(re).zip(parse(im)),
                None => parse(s).map(|re| (re, 0.0)),
            };
            parsed
                .map(|(re, im)| Complex64::new(re, im))
                .ok_or_else(|| {
                    src.at(
                        v,
                        format!("cannot read `{s}` as a complex number \"re,im\""),
                    )
                })
        }
    }
}

fn state(
    src: &Source,
    v: &Option<Spanned<Vec<RawComplex>>>,
    default: SystemState,
    dim: usize,
    name: &str,
) -> Result<SystemState, CliError> {
    let Some(v) = v else {
        if default.dim() != dim {
            return Err(src.error(None, format!("{name} must be given for dimension {dim}")));
        }
        return Ok(default);
    };
    let amps = v
        .get_ref()
        .iter()
        .map(|e| complex(src, v, e))
        .collect::<Result<Vec<_>, _>>()?;
    if amps.len() != dim {
        return Err(src.at(
            v,
            format!("{name} has {} amplitudes, expected {dim}", amps.len()),
        ));
    }
    let norm_sq: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    if !norm_sq.is_finite() || (norm_sq - 1.0).abs() > STATE_NORM_SLACK {
        return Err(src.at(
            v,
            format!("{name} is not normalized (squared norm {norm_sq})"),
        ));
    }
    SystemState::new(amps.clone())
        .or_else(|_| SystemState::normalized(amps))
        .map_err(|e| src.at(v, format!("{name}: {e}")))
}

fn strength_list(
    src: &Source,
    v: &Option<Spanned<Vec<Spanned<RawStrength>>>>,
) -> Result<Vec<Strength>, CliError> {
    let Some(list) = v else {
        return Ok(vec![
            Strength::Value(0.12),
            Strength::Strong,
            Strength::Value(0.75),
        ]);
    };
    if list.get_ref().is_empty() {
        return Err(src.at(list, "strength list is empty"));
    }
    list.get_ref()
        .iter()
        .map(|s| match s.get_ref() {
            RawStrength::Value(x) if x.is_finite() => Ok(Strength::Value(*x)),
            RawStrength::Value(_) => Err(src.at(s, "strength must be finite")),
            RawStrength::Named(n) if n == "strong" => Ok(Strength::Strong),
            RawStrength::Named(n) => Err(src.at(
                s,
                format!("unknown strength `{n}` (use a number or \"strong\")"),
            )),
        })
        .collect()
}

fn default_etas() -> Vec<f64> {
    vec![
        0.01,
        0.12,
        0.39,
        0.75,
        std::f64::consts::PI + 0.05,
        2.0 * std::f64::consts::PI + 0.05,
    ]
}

fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|k| start + (stop - start) * k as f64 / (count - 1) as f64)
        .collect()
}

fn steps(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
    (0..n).map(|k| start + k as f64 * step).collect()
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let src = Source { text };
        let raw: RawConfig = toml::from_str(text)
            .map_err(|e| src.error(e.span(), e.message().trim_end().to_string()))?;
        let all = [FamilyKind::Gaussian, FamilyKind::Pulse, FamilyKind::Qubit];

        let p = &raw.pointer;
        let conjugate = match &p.conjugate {
            None => PulseConjugate::Generator,
            Some(c) => match c.get_ref().as_str() {
                "generator" => PulseConjugate::Generator,
                "envelope" => PulseConjugate::Envelope,
                other => {
                    return Err(src.at(
                        c,
                        format!(
                            "unknown conjugate readout `{other}` (expected generator or envelope)"
                        ),
                    ))
                }
            },
        };
        let pointer = PointerParams {
            sigma: opt_f64(&src, &p.sigma, 1.0, positive, "sigma")?,
            omega: opt_f64(&src, &p.omega, 4.0, positive, "omega")?,
            cep: opt_f64(&src, &p.cep, 0.0, finite, "cep")?,
            conjugate,
        };
        if conjugate == PulseConjugate::Envelope && pointer.cep != 0.0 {
            let at = p.conjugate.as_ref().map(|c| c.span());
            return Err(src.error(at, "the envelope conjugate readout requires cep = 0"));
        }

        let s = &raw.system;
        let observable = match &s.eigenvalues {
            None => MeasuredObservable::qubit_projector(),
            Some(v) => MeasuredObservable::new(v.get_ref().clone())
                .map_err(|e| src.at(v, format!("eigenvalues: {e}")))?,
        };
        let dim = observable.dim();
        let eigenvalues_at = src.position(s.eigenvalues.as_ref().map(|v| v.span()));
        let plus = SystemState::from_real(&[1.0, 1.0]).expect("valid state");
        let psi = state(&src, &s.psi, plus.clone(), dim, "psi")?;
        let f = state(&src, &s.f, plus, dim, "f")?;

        let g = &raw.grid;
        let points = match &g.points {
            None => weakecho::pointer::DEFAULT_GRID_POINTS,
            Some(v) => {
                let n = *v.get_ref();
                if n < weakecho::grid::MIN_POINTS as i64 || n % 2 == 0 {
                    return Err(src.at(
                        v,
                        format!(
                            "grid points must be odd and at least {}, got {n}",
                            weakecho::grid::MIN_POINTS
                        ),
                    ));
                }
                n as usize
            }
        };
        let half_width = g
            .half_width
            .as_ref()
            .map(|v| positive(&src, v, "half_width"))
            .transpose()?;
        let grid = GridSpec { points, half_width };

        let d = &raw.distinguishability;
        let distinguishability = DistinguishabilityConfig {
            families: families(&src, &d.families, &all)?,
            etas: opt_values(&src, &d.eta, steps(0.0, 3.0, 0.01), "eta")?,
        };

        let ss = &raw.shift_sweep;
        let mut sweeps = Vec::new();
        if ss.theta.is_some() || ss.phi.is_none() {
            sweeps.push((
                Parametrization::Linear,
                opt_values(
                    &src,
                    &ss.theta,
                    linspace(0.0, std::f64::consts::PI, 181),
                    "theta",
                )?,
            ));
        }
        if ss.phi.is_some() || ss.theta.is_none() {
            sweeps.push((
                Parametrization::Equatorial,
                opt_values(
                    &src,
                    &ss.phi,
                    linspace(0.0, 2.0 * std::f64::consts::PI, 181),
                    "phi",
                )?,
            ));
        }
        let shift_sweep = ShiftSweepConfig {
            family: ss
                .family
                .as_ref()
                .map_or(Ok(FamilyKind::Pulse), |f| family_kind(&src, f))?,
            strengths: strength_list(&src, &ss.eta)?,
            sweeps,
            eta_eff: ss
                .eta_eff
                .as_ref()
                .map(|v| {
                    let x = finite(&src, v, "eta_eff")?;
                    if x == 0.0 {
                        return Err(src.at(v, "eta_eff must be non-zero"));
                    }
                    Ok(x)
                })
                .transpose()?,
        };
        let e = &raw.echo_scan;
        let range = match &e.range {
            None => (0.0, 7.0),
            Some(v) => match v.get_ref().as_slice() {
                [lo, hi] if lo.is_finite() && hi.is_finite() && lo < hi => (*lo, *hi),
                _ => return Err(src.at(v, "range must be [low, high] with low < high")),
            },
        };
        let echo_scan = EchoScanConfig {
            families: families(&src, &e.families, &[FamilyKind::Pulse, FamilyKind::Qubit])?,
            range,
            exclude_origin: opt_f64(&src, &e.exclude_origin, 0.1, finite, "exclude_origin")?.abs(),
            step: opt_f64(&src, &e.step, 0.01, positive, "step")?,
            threshold: opt_f64(
                &src,
                &e.threshold,
                DEFAULT_ECHO_THRESHOLD,
                finite,
                "threshold",
            )?,
            include_boundary: e.include_boundary.unwrap_or(false),
            eta_bar: e
                .eta_bar
                .as_ref()
                .map(|v| finite(&src, v, "eta_bar"))
                .transpose()?,
        };

        let v = &raw.verify_conditions;
        let verify_conditions = VerifyConfig {
            families: families(&src, &v.families, &all)?,
            etas: opt_values(
                &src,
                &v.eta,
                vec![0.0, 0.01, 0.05, 0.1, 0.2, 0.39, 0.75],
                "eta",
            )?,
        };

        let a = &raw.aav_convergence;
        let eta_start = opt_f64(&src, &a.eta_start, 0.04, positive, "eta_start")?;
        let eta_end = opt_f64(&src, &a.eta_end, 0.0025, positive, "eta_end")?;
        if eta_end > eta_start {
            let at = a.eta_end.as_ref().map(|v| v.span());
            return Err(src.error(at, "eta_end must not exceed eta_start"));
        }
        let aav_f = if dim == 2 {
            SystemState::linear(-std::f64::consts::FRAC_PI_8)
        } else {
            f.clone()
        };
        let aav_convergence = AavConfig {
            family: a
                .family
                .as_ref()
                .map_or(Ok(FamilyKind::Gaussian), |f| family_kind(&src, f))?,
            f: state(&src, &a.f, aav_f, dim, "f")?,
            eta_start,
            eta_end,
        };

        let o = &raw.oracle_check;
        let trials = match &o.trials {
            None => 20,
            Some(t) if *t.get_ref() >= 1 => *t.get_ref() as usize,
            Some(t) => return Err(src.at(t, "trials must be at least 1")),
        };
        let oracle_check = OracleConfig {
            families: families(&src, &o.families, &all)?,
            etas: opt_values(&src, &o.eta, default_etas(), "eta")?,
            trials,
            seed: o.seed.unwrap_or(1),
            tolerance: opt_f64(&src, &o.tolerance, 1e-8, positive, "tolerance")?,
        };

        let joint = match &raw.joint {
            None => None,
            Some(j) => {
                let pointer_dim = match &j.pointer_dim {
                    None => None,
                    Some(d) if *d.get_ref() >= 1 => Some(*d.get_ref() as usize),
                    Some(d) => return Err(src.at(d, "pointer_dim must be at least 1")),
                };
                let readouts = match (&j.chi, &j.mu) {
                    (None, None) => None,
                    (Some(chi), Some(mu)) => Some((chi.get_ref().into(), mu.get_ref().into())),
                    (Some(v), None) | (None, Some(v)) => {
                        return Err(src.at(v, "chi and mu readout files go together"))
                    }
                };
                Some(JointConfig {
                    amplitudes: j.amplitudes.clone().into(),
                    pointer_dim,
                    readouts,
                })
            }
        };

        Ok(Self {
            pointer,
            observable,
            eigenvalues_at,
            psi,
            f,
            grid,
            distinguishability,
            shift_sweep,
            echo_scan,
            verify_conditions,
            aav_convergence,
            oracle_check,
            joint,
        })
    }

    /// Makes relative data-file paths relative to `base` (the config file's
    /// directory).
    pub fn resolve_paths(&mut self, base: &std::path::Path) {
        if let Some(j) = &mut self.joint {
            j.resolve(base);
        }
    }

    pub fn builtin() -> Self {
        Self::parse(DEFAULT_CONFIG).expect("built-in configuration is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_of(err: CliError) -> usize {
        match err {
            CliError::Config { line, .. } => line,
            other => panic!("not a config error: {other}"),
        }
    }

    #[test]
    fn default_file_matches_built_in_defaults() {
        let mut from_file = Config::parse(DEFAULT_CONFIG).unwrap();
        from_file.eigenvalues_at = (1, 1);
        assert_eq!(from_file, Config::parse("").unwrap());
    }

    #[test]
    fn complex_amplitudes() {
        let c = Config::parse("[system]\npsi = [\"0.6,0\", \"0, 0.8\"]\nf = [1, 0]\n").unwrap();
        assert_eq!(c.psi.amps()[1], Complex64::new(0.0, 0.8));
        assert_eq!(c.f.amps()[0], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn slightly_off_state_is_renormalized() {
        let c = Config::parse("[system]\npsi = [0.7071068, 0.7071068]\n").unwrap();
        let n: f64 = c.psi.amps().iter().map(|a| a.norm_sqr()).sum();
        assert!((n - 1.0).abs() < 1e-15);
    }

    #[test]
    fn errors_point_at_the_offending_line() {
        let text = "[pointer]\nsigma = 1.0\n\n[system]\npsi = [\"1,0\", \"1,0\"]\n";
        assert_eq!(line_of(Config::parse(text).unwrap_err()), 5);
        assert_eq!(
            line_of(Config::parse("[pointer]\nsigma = -1.0\n").unwrap_err()),
            2
        );
        assert_eq!(
            line_of(Config::parse("\n\n[grid]\npoints = 100\n").unwrap_err()),
            4
        );
        assert_eq!(
            line_of(Config::parse("[pointer]\nsigmaa = 1.0\n").unwrap_err()),
            2
        );
        assert_eq!(line_of(Config::parse("[pointer\n").unwrap_err()), 1);
        let fam = "[distinguishability]\nfamilies = [\n  \"gaussian\",\n  \"laser\",\n]\n";
        assert_eq!(line_of(Config::parse(fam).unwrap_err()), 4);
        assert_eq!(
            line_of(Config::parse("[system]\nf = [\"1;0\", 0]\n").unwrap_err()),
            2
        );
    }

    #[test]
    fn ranges_expand() {
        let c =
            Config::parse("[distinguishability]\neta = { start = 0.0, stop = 1.0, step = 0.25 }\n")
                .unwrap();
        assert_eq!(c.distinguishability.etas, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let c = Config::parse("[shift-sweep]\ntheta = { start = 0.0, stop = 1.0, count = 3 }\n")
            .unwrap();
        assert_eq!(
            c.shift_sweep.sweeps,
            vec![(Parametrization::Linear, vec![0.0, 0.5, 1.0])]
        );
        assert!(
            Config::parse("[distinguishability]\neta = { start = 0.0, stop = 1.0 }\n").is_err()
        );
    }

    #[test]
    fn strengths_accept_strong_keyword() {
        let c = Config::parse("[shift-sweep]\neta = [0.1, \"strong\"]\n").unwrap();
        assert_eq!(
            c.shift_sweep.strengths,
            vec![Strength::Value(0.1), Strength::Strong]
        );
        assert_eq!(
            line_of(Config::parse("[shift-sweep]\neta = [\"weak\"]\n").unwrap_err()),
            2
        );
    }

    #[test]
    fn envelope_needs_zero_cep() {
        let text = "[pointer]\ncep = 0.5\nconjugate = \"envelope\"\n";
        assert_eq!(line_of(Config::parse(text).unwrap_err()), 3);
    }
}
