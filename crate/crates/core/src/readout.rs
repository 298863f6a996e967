//! Pointer expectation values conditioned on a system post-selection.
//!
//! With `a_n = conj(f_n) c_n` the projected pointer state is
//! `|phi> = <f|Psi> = sum_n a_n |xi_n>`, and
//!
//! ```text
//! <O>_f = sum_nm a_n conj(a_m) O_mn / sum_nm a_n conj(a_m) D_mn
//! ```
//!
//! [`conditional_expectation`] evaluates this from the pointer matrices;
//! [`brute_force_oracle`] builds `|phi>` explicitly and never touches them.

use num_complex::Complex64;

use crate::entangler::EntangledState;
use crate::error::{Error, Result};
use crate::hilbert::{weak_value, MeasuredObservable, SystemState, ZERO_POST_SELECTION};
use crate::pointer::{PointerMatrices, PointerObservable, PointerState};

/// Largest tolerated imaginary part of a Hermitian expectation value.
pub const HERMITICITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalReadout {
    pub f: SystemState,
    /// `<phi|phi>`.
    pub prob: f64,
    pub chi_val: f64,
    pub mu_val: f64,
    /// `(chi_val + i mu_val) / eta_eff`.
    pub complex_shift: Complex64,
    /// `None` when `<f|psi> = 0` even though the pointer-assisted
    /// post-selection succeeds.
    pub reference_weak_value: Option<Complex64>,
    pub eta_eff: f64,
}

fn projected_weights(state: &EntangledState, f: &SystemState) -> Result<Vec<Complex64>> {
    if f.dim() != state.dim() {
        return Err(Error::DimensionMismatch {
            expected: state.dim(),
            found: f.dim(),
        });
    }
    Ok(f.amps()
        .iter()
        .zip(state.coeffs())
        .zip(state.branches())
        .map(|((fa, c), xi)| {
            if xi.is_some() {
                fa.conj() * c
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect())
}

fn contract(weights: &[Complex64], m: &nalgebra::DMatrix<Complex64>) -> Complex64 {
    let mut total = Complex64::new(0.0, 0.0);
    for (n, an) in weights.iter().enumerate() {
        for (k, ak) in weights.iter().enumerate() {
            total += an * ak.conj() * m[(k, n)];
        }
    }
    total
}

fn real_ratio(num: Complex64, den: Complex64, quantity: &'static str) -> Result<f64> {
    if den.norm() < ZERO_POST_SELECTION {
        return Err(Error::ZeroPostSelection {
            overlap: den.norm(),
        });
    }
    let value = num / den;
    if !value.re.is_finite() || !value.im.is_finite() {
        return Err(Error::NonFinite(quantity));
    }
    if value.im.abs() > HERMITICITY_TOLERANCE {
        return Err(Error::HermiticityViolation {
            quantity,
            residue: value.im.abs(),
        });
    }
    Ok(value.re)
}

/// Conditional expectation from precomputed pointer matrices.
pub fn conditional_from_matrices(
    matrices: &PointerMatrices,
    state: &EntangledState,
    f: &SystemState,
    observable: PointerObservable,
) -> Result<f64> {
    let weights = projected_weights(state, f)?;
    let num = contract(&weights, matrices.readout(observable));
    let den = contract(&weights, &matrices.d);
    real_ratio(num, den, observable.name())
}

/// `<phi|phi>` from the Gram matrix.
pub fn post_selection_probability(
    matrices: &PointerMatrices,
    state: &EntangledState,
    f: &SystemState,
) -> Result<f64> {
    let weights = projected_weights(state, f)?;
    let den = contract(&weights, &matrices.d);
    if den.im.abs() > HERMITICITY_TOLERANCE {
        return Err(Error::HermiticityViolation {
            quantity: "post-selection probability",
            residue: den.im.abs(),
        });
    }
    Ok(den.re)
}

pub fn conditional_expectation(
    state: &EntangledState,
    f: &SystemState,
    observable: PointerObservable,
) -> Result<f64> {
    conditional_from_matrices(&state.matrices()?, state, f, observable)
}

/// Rayleigh quotient on the explicitly projected joint state.
pub fn brute_force_oracle(
    state: &EntangledState,
    f: &SystemState,
    observable: PointerObservable,
) -> Result<f64> {
    if f.dim() != state.dim() {
        return Err(Error::DimensionMismatch {
            expected: state.dim(),
            found: f.dim(),
        });
    }
    let template = state
        .branches()
        .iter()
        .flatten()
        .next()
        .ok_or(Error::ZeroPostSelection { overlap: 0.0 })?;
    let (width, wave_grid) = match template {
        PointerState::Wave(g) => (g.values().len(), Some(*g.grid())),
        PointerState::Discrete(v) => (v.len(), None),
    };

    // joint[n * width + j] = c_n xi_n(j)
    let mut joint = vec![Complex64::new(0.0, 0.0); state.dim() * width];
    for (n, (c, xi)) in state.coeffs().iter().zip(state.branches()).enumerate() {
        let Some(xi) = xi else { continue };
        let samples = match xi {
            PointerState::Wave(g) => {
                if Some(*g.grid()) != wave_grid {
                    return Err(Error::GridMismatch);
                }
                g.values()
            }
            PointerState::Discrete(v) => v.as_slice(),
        };
        if samples.len() != width {
            return Err(Error::PointerMismatch);
        }
        for (slot, s) in joint[n * width..(n + 1) * width].iter_mut().zip(samples) {
            *slot = c * s;
        }
    }

    // (<f| (x) 1) |Psi>
    let mut phi = vec![Complex64::new(0.0, 0.0); width];
    for (n, fa) in f.amps().iter().enumerate() {
        let fc = fa.conj();
        for (p, j) in phi.iter_mut().zip(&joint[n * width..(n + 1) * width]) {
            *p += fc * j;
        }
    }
    let phi = match wave_grid {
        Some(grid) => PointerState::Wave(crate::grid::GridFunction::new(grid, phi)?),
        None => PointerState::Discrete(phi),
    };
    let o_phi = state.readouts()?.apply(observable, &phi)?;
    real_ratio(phi.overlap(&o_phi)?, phi.overlap(&phi)?, observable.name())
}

/// Unconditioned `<Psi| 1 (x) O |Psi>`.
pub fn pointer_expectation(state: &EntangledState, observable: PointerObservable) -> Result<f64> {
    let readouts = state.readouts()?;
    let mut total = Complex64::new(0.0, 0.0);
    for (c, xi) in state.coeffs().iter().zip(state.branches()) {
        if let Some(xi) = xi {
            total += xi.overlap(&readouts.apply(observable, xi)?)? * c.norm_sqr();
        }
    }
    if total.im.abs() > HERMITICITY_TOLERANCE {
        return Err(Error::HermiticityViolation {
            quantity: observable.name(),
            residue: total.im.abs(),
        });
    }
    Ok(total.re)
}

/// Both readouts, the complex shift and the reference weak value of `psi`.
pub fn full_readout(
    state: &EntangledState,
    f: &SystemState,
    observable: &MeasuredObservable,
    psi: &SystemState,
) -> Result<ConditionalReadout> {
    readout_from_matrices(&state.matrices()?, state, f, observable, psi)
}

pub fn readout_from_matrices(
    matrices: &PointerMatrices,
    state: &EntangledState,
    f: &SystemState,
    observable: &MeasuredObservable,
    psi: &SystemState,
) -> Result<ConditionalReadout> {
    let eta = state.eta().ok_or(Error::UnknownStrength)?;
    let eta_eff = state.eta_eff().ok_or(Error::UnknownStrength)?;
    let prob = post_selection_probability(matrices, state, f)?;
    let chi_val = conditional_from_matrices(matrices, state, f, PointerObservable::Canonical)?;
    let mu_val = conditional_from_matrices(matrices, state, f, PointerObservable::Conjugate)?;
    if eta_eff == 0.0 {
        return Err(Error::ZeroEffectiveStrength(eta));
    }
    let reference_weak_value = match weak_value(psi, f, observable) {
        Ok(w) => Some(w),
        Err(Error::ZeroPostSelection { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(ConditionalReadout {
        f: f.clone(),
        prob,
        chi_val,
        mu_val,
        complex_shift: Complex64::new(chi_val, mu_val) / eta_eff,
        reference_weak_value,
        eta_eff,
    })
}
