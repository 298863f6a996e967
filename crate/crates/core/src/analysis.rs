//! Sweeps over strength and input state, echo location and convergence.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::entangler::von_neumann_entangle;
use crate::error::{Error, Result};
use crate::hilbert::{expectation, weak_value, MeasuredObservable, SystemState};
use crate::pointer::{
    condition_residuals, pointer_matrices, ConditionResiduals, GridSpec, PointerFamily,
};
use crate::readout::{full_readout, readout_from_matrices};

/// Default `|D_10|` below which a local maximum is not reported as an echo.
pub const DEFAULT_ECHO_THRESHOLD: f64 = 0.5;

/// Nominal strength near which the strong point is searched for.
pub const STRONG_STRENGTH_GUESS: f64 = 0.39;

const SCAN_STEP: f64 = 0.01;
const ZERO_SEARCH_RADIUS: f64 = 5.0;
const ROOT_TOLERANCE: f64 = 1e-13;
const GOLDEN_TOLERANCE: f64 = 1e-10;

/// `D_10 = <xi_1|xi_0>` for the first two eigenvalues of `observable`.
pub fn d10(
    family: &PointerFamily,
    observable: &MeasuredObservable,
    eta: f64,
    spec: &GridSpec,
) -> Result<Complex64> {
    let alphas = observable.eigenvalues();
    let grid = family.grid(eta, alphas, spec)?;
    let xi0 = family.state(eta, alphas[0], grid.as_ref())?;
    let xi1 = family.state(eta, alphas[1], grid.as_ref())?;
    xi1.overlap(&xi0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistinguishabilityRow {
    pub eta: f64,
    pub d10: Complex64,
}

pub fn distinguishability_sweep(
    family: &PointerFamily,
    observable: &MeasuredObservable,
    etas: &[f64],
    spec: &GridSpec,
) -> Result<Vec<DistinguishabilityRow>> {
    etas.par_iter()
        .map(|&eta| {
            Ok(DistinguishabilityRow {
                eta,
                d10: d10(family, observable, eta, spec)?,
            })
        })
        .collect()
}

/// Zero crossing of `Re D_10` nearest `near`, by outward stepping and bisection.
pub fn strong_strength(
    family: &PointerFamily,
    observable: &MeasuredObservable,
    near: f64,
    spec: &GridSpec,
) -> Result<f64> {
    let re = |eta: f64| d10(family, observable, eta, spec).map(|d| d.re);
    let f_near = re(near)?;
    if f_near == 0.0 {
        return Ok(near);
    }
    let steps = (ZERO_SEARCH_RADIUS / SCAN_STEP).ceil() as usize;
    let (mut up, mut f_up) = (near, f_near);
    let (mut down, mut f_down) = (near, f_near);
    for _ in 0..steps {
        let next_up = up + SCAN_STEP;
        let f_next_up = re(next_up)?;
        let next_down = down - SCAN_STEP;
        let f_next_down = re(next_down)?;
        let hit_up = f_up * f_next_up <= 0.0;
        let hit_down = f_down * f_next_down <= 0.0;
        match (hit_up, hit_down) {
            (false, false) => {}
            (true, false) => return bisect(&re, up, next_up, f_up),
            (false, true) => return bisect(&re, next_down, down, f_next_down),
            (true, true) => {
                let a = bisect(&re, up, next_up, f_up)?;
                let b = bisect(&re, next_down, down, f_next_down)?;
                return Ok(if (a - near).abs() <= (b - near).abs() {
                    a
                } else {
                    b
                });
            }
        }
        (up, f_up) = (next_up, f_next_up);
        (down, f_down) = (next_down, f_next_down);
    }
    Err(Error::InvalidParameter(format!(
        "no zero crossing of D_10 within {ZERO_SEARCH_RADIUS} of eta = {near}"
    )))
}

fn bisect(f: &dyn Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64, mut f_lo: f64) -> Result<f64> {
    while hi - lo > ROOT_TOLERANCE * hi.abs().max(1.0) {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_lo * f_mid < 0.0 {
            hi = mid;
        } else {
            (lo, f_lo) = (mid, f_mid);
        }
    }
    Ok(0.5 * (lo + hi))
}

fn golden_max(f: &dyn Fn(f64) -> Result<f64>, mut a: f64, mut b: f64) -> Result<f64> {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while (b - a).abs() > GOLDEN_TOLERANCE {
        if fc >= fd {
            b = d;
            (d, fd) = (c, fc);
            c = b - r * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            (c, fc) = (d, fd);
            d = a + r * (b - a);
            fd = f(d)?;
        }
    }
    Ok(0.5 * (a + b))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EchoPoint {
    pub eta_star: f64,
    pub d_value: Complex64,
    pub eta_bar: f64,
    pub flipped: bool,
    /// The maximum sits on an end of the scanned interval.
    pub at_boundary: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EchoScanOptions {
    pub threshold: f64,
    pub step: f64,
    pub include_boundary: bool,
    pub spec: GridSpec,
}

impl Default for EchoScanOptions {
    fn default() -> Self {
        Self {
            threshold: DEFAULT_ECHO_THRESHOLD,
            step: SCAN_STEP,
            include_boundary: false,
            spec: GridSpec::default(),
        }
    }
}

/// Local maxima of `|D_10|` on `range` with `|D_10| >= threshold`.
pub fn echo_scan(
    family: &PointerFamily,
    observable: &MeasuredObservable,
    range: (f64, f64),
    exclude_origin_radius: f64,
    options: &EchoScanOptions,
) -> Result<Vec<EchoPoint>> {
    let (mut lo, hi) = range;
    if !(lo.is_finite() && hi.is_finite() && options.step > 0.0) {
        return Err(Error::InvalidParameter(
            "echo scan range and step must be finite".into(),
        ));
    }
    if lo.abs() < exclude_origin_radius {
        lo = exclude_origin_radius;
    }
    if lo >= hi {
        return Err(Error::InvalidParameter(format!(
            "empty echo scan range [{lo}, {hi}]"
        )));
    }
    let n = ((hi - lo) / options.step).ceil() as usize + 1;
    let etas: Vec<f64> = (0..n)
        .map(|i| {
            if i + 1 == n {
                hi
            } else {
                lo + i as f64 * options.step
            }
        })
        .collect();
    let rows = distinguishability_sweep(family, observable, &etas, &options.spec)?;
    let mags: Vec<f64> = rows.iter().map(|r| r.d10.norm()).collect();
    let magnitude = |eta: f64| d10(family, observable, eta, &options.spec).map(|d| d.norm());

    let mut candidates = Vec::new();
    for i in 1..n.saturating_sub(1) {
        if mags[i] > mags[i - 1] && mags[i] >= mags[i + 1] {
            candidates.push((golden_max(&magnitude, etas[i - 1], etas[i + 1])?, false));
        }
    }
    if options.include_boundary && n >= 2 {
        if mags[0] > mags[1] {
            candidates.push((etas[0], true));
        }
        if mags[n - 1] > mags[n - 2] {
            candidates.push((etas[n - 1], true));
        }
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut points = Vec::new();
    for (eta_star, at_boundary) in candidates {
        let d_value = d10(family, observable, eta_star, &options.spec)?;
        if d_value.norm() < options.threshold {
            continue;
        }
        let eta_bar = reduced_echo_strength(family, observable, eta_star, &options.spec);
        points.push(EchoPoint {
            eta_star,
            d_value,
            eta_bar,
            flipped: d_value.re < 0.0,
            at_boundary,
        });
    }
    Ok(points)
}

/// Qubit: `eta` reduced modulo `pi`. Continuous pointers: distance from the
/// nearest zero crossing of `Re D_10`, or `eta` itself when there is none.
pub fn reduced_echo_strength(
    family: &PointerFamily,
    observable: &MeasuredObservable,
    eta: f64,
    spec: &GridSpec,
) -> f64 {
    match family {
        PointerFamily::Qubit => family.reduced_strength(eta),
        _ => strong_strength(family, observable, eta, spec).map_or(eta, |z| eta - z),
    }
}

/// Weak value for `f`, or for `sigma_z f` when `flipped`.
pub fn echo_weak_value(
    psi: &SystemState,
    f: &SystemState,
    observable: &MeasuredObservable,
    flipped: bool,
) -> Result<Complex64> {
    if flipped {
        weak_value(psi, &f.flipped()?, observable)
    } else {
        weak_value(psi, f, observable)
    }
}

/// Input-state family swept by [`shift_sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parametrization {
    /// `cos(theta)|0> + sin(theta)|1>`
    Linear,
    /// `(|0> + e^{i phi}|1>)/sqrt(2)`
    Equatorial,
}

impl Parametrization {
    pub fn state(&self, param: f64) -> SystemState {
        match self {
            Self::Linear => SystemState::linear(param),
            Self::Equatorial => SystemState::equatorial(param),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Linear => "theta",
            Self::Equatorial => "phi",
        }
    }
}

/// Which reference curve a strength is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `D_10` near one: weak value of `f`.
    Weak,
    /// `|D_10|` below the echo threshold: expectation value of `psi`.
    Strong,
    /// `D_10` near minus one: weak value of `sigma_z f`.
    FlippedEcho,
}

impl Regime {
    pub fn classify(d10: Complex64, threshold: f64) -> Self {
        if d10.norm() < threshold {
            Self::Strong
        } else if d10.re > 0.0 {
            Self::Weak
        } else {
            Self::FlippedEcho
        }
    }

    pub fn reference(
        &self,
        psi: &SystemState,
        f: &SystemState,
        observable: &MeasuredObservable,
    ) -> Result<Complex64> {
        match self {
            Self::Weak => weak_value(psi, f, observable),
            Self::Strong => expectation(psi, observable).map(|e| Complex64::new(e, 0.0)),
            Self::FlippedEcho => echo_weak_value(psi, f, observable, true),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowStatus {
    Ok,
    /// The pointer-assisted post-selection has zero probability.
    ZeroPostSelection,
    /// Shifts are defined but the reference curve is singular.
    ReferenceUndefined,
}

impl RowStatus {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Ok => "ok",
            Self::ZeroPostSelection => "zero_post_selection",
            Self::ReferenceUndefined => "reference_undefined",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftValues {
    pub prob: f64,
    pub chi: f64,
    pub mu: f64,
    pub norm_chi: f64,
    pub norm_mu: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub param: f64,
    pub shifts: Option<ShiftValues>,
    pub reference: Option<Complex64>,
    pub status: RowStatus,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    pub spec: GridSpec,
    /// Replaces the family's effective strength as the shift normalization.
    pub eta_eff: Option<f64>,
    pub echo_threshold: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            spec: GridSpec::default(),
            eta_eff: None,
            echo_threshold: DEFAULT_ECHO_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftSweep {
    pub eta: f64,
    pub eta_eff: f64,
    pub d10: Complex64,
    pub regime: Regime,
    pub rows: Vec<SweepRow>,
}

/// Conditional shifts for input states `param -> psi(param)` at fixed `eta` and `f`.
pub fn shift_sweep(
    family: &PointerFamily,
    observable: &MeasuredObservable,
    eta: f64,
    parametrization: Parametrization,
    params: &[f64],
    f: &SystemState,
    options: &SweepOptions,
) -> Result<ShiftSweep> {
    observable.check_dim(2)?;
    if f.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: f.dim(),
        });
    }
    let eta_eff = options.eta_eff.unwrap_or(family.effective_strength(eta));
    if eta_eff == 0.0 || !eta_eff.is_finite() {
        return Err(Error::ZeroEffectiveStrength(eta));
    }
    let base = von_neumann_entangle(
        &parametrization.state(0.0),
        observable,
        family,
        eta,
        &options.spec,
    )?
    .with_strength(eta, eta_eff);
    let matrices = base.matrices()?;
    let regime = Regime::classify(matrices.d10(), options.echo_threshold);

    let rows = params
        .par_iter()
        .map(|&param| {
            let psi = parametrization.state(param);
            let state = base.with_system_state(&psi)?;
            let reference = regime.reference(&psi, f, observable);
            let readout = match readout_from_matrices(&matrices, &state, f, observable, &psi) {
                Ok(r) => r,
                Err(Error::ZeroPostSelection { .. }) => {
                    return Ok(SweepRow {
                        param,
                        shifts: None,
                        reference: reference.ok(),
                        status: RowStatus::ZeroPostSelection,
                    })
                }
                Err(e) => return Err(e),
            };
            let shifts = ShiftValues {
                prob: readout.prob,
                chi: readout.chi_val,
                mu: readout.mu_val,
                norm_chi: readout.complex_shift.re,
                norm_mu: readout.complex_shift.im,
            };
            Ok(match reference {
                Ok(r) => SweepRow {
                    param,
                    shifts: Some(shifts),
                    reference: Some(r),
                    status: RowStatus::Ok,
                },
                Err(Error::ZeroPostSelection { .. }) => SweepRow {
                    param,
                    shifts: Some(shifts),
                    reference: None,
                    status: RowStatus::ReferenceUndefined,
                },
                Err(e) => return Err(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ShiftSweep {
        eta,
        eta_eff,
        d10: matrices.d10(),
        regime,
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub eta: f64,
    pub shift: Complex64,
    pub weak_value: Complex64,
    pub error: f64,
}

/// `|complex_shift - weak value|` along a decreasing strength sequence.
pub fn aav_convergence(
    family: &PointerFamily,
    observable: &MeasuredObservable,
    psi: &SystemState,
    f: &SystemState,
    etas: &[f64],
    spec: &GridSpec,
) -> Result<Vec<ConvergenceRow>> {
    let w = weak_value(psi, f, observable)?;
    etas.par_iter()
        .map(|&eta| {
            let state = von_neumann_entangle(psi, observable, family, eta, spec)?;
            let r = full_readout(&state, f, observable, psi)?;
            Ok(ConvergenceRow {
                eta,
                shift: r.complex_shift,
                weak_value: w,
                error: (r.complex_shift - w).norm(),
            })
        })
        .collect()
}

/// `log(e_{k-1}/e_k) / log(eta_{k-1}/eta_k)`; `None` for the first row or
/// when an error vanishes.
pub fn convergence_orders(rows: &[ConvergenceRow]) -> Vec<Option<f64>> {
    let mut orders = vec![None];
    for pair in rows.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let order = (a.error > 0.0 && b.error > 0.0 && a.eta != b.eta)
            .then(|| (a.error / b.error).ln() / (a.eta / b.eta).ln());
        orders.push(order.filter(|o| o.is_finite()));
    }
    orders.truncate(rows.len());
    orders
}

/// `start, start/2, ...` down to and including the first value `<= end`.
pub fn halving_sequence(start: f64, end: f64) -> Vec<f64> {
    let mut etas = vec![start];
    let mut eta = start;
    while eta > end && etas.len() < 64 {
        eta /= 2.0;
        etas.push(eta);
    }
    etas
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionRow {
    pub eta: f64,
    pub residuals: ConditionResiduals,
}

pub fn condition_sweep(
    family: &PointerFamily,
    observable: &MeasuredObservable,
    etas: &[f64],
    spec: &GridSpec,
) -> Result<Vec<ConditionRow>> {
    etas.par_iter()
        .map(|&eta| {
            let m = pointer_matrices(family, eta, observable, spec)?;
            Ok(ConditionRow {
                eta,
                residuals: condition_residuals(&m),
            })
        })
        .collect()
}
