//! Pure states and diagonal observables on small discrete system spaces.
//!
//! Basis index `n` always refers to the eigenbasis of the measured
//! observable. Units have hbar = 1.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Normalization tolerance on the squared norm of a [`SystemState`].
pub const NORM_TOLERANCE: f64 = 1e-12;

/// Below this magnitude of `<f|psi>` a post-selection is treated as impossible.
pub const ZERO_POST_SELECTION: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SystemState {
    amps: Vec<Complex64>,
}

impl SystemState {
    /// Wraps amplitudes that are already unit-normalized.
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        Self::check_shape(&amps)?;
        let norm_sq = norm_sq(&amps);
        if (norm_sq - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(Self { amps })
    }

    /// Rescales arbitrary non-zero amplitudes to unit norm.
    pub fn normalized(amps: Vec<Complex64>) -> Result<Self> {
        Self::check_shape(&amps)?;
        let norm = norm_sq(&amps).sqrt();
        if norm == 0.0 {
            return Err(Error::NotNormalized { norm_sq: 0.0 });
        }
        Ok(Self {
            amps: amps.into_iter().map(|a| a / norm).collect(),
        })
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::normalized(amps.iter().map(|&a| Complex64::new(a, 0.0)).collect())
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: index + 1,
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Self::new(amps)
    }

    /// Linear polarization `cos(theta)|0> + sin(theta)|1>`.
    pub fn linear(theta: f64) -> Self {
        Self {
            amps: vec![
                Complex64::new(theta.cos(), 0.0),
                Complex64::new(theta.sin(), 0.0),
            ],
        }
    }

    /// Equatorial state `(|0> + e^{i phi}|1>)/sqrt(2)`.
    pub fn equatorial(phi: f64) -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            amps: vec![Complex64::new(s, 0.0), Complex64::from_polar(s, phi)],
        }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn with_global_phase(&self, gamma: f64) -> Self {
        let phase = Complex64::from_polar(1.0, gamma);
        Self {
            amps: self.amps.iter().map(|a| a * phase).collect(),
        }
    }

    /// `sigma_z |self>` for a two-level system.
    pub fn flipped(&self) -> Result<Self> {
        if self.dim() != 2 {
            return Err(Error::FlipUnsupported(self.dim()));
        }
        Ok(Self {
            amps: vec![self.amps[0], -self.amps[1]],
        })
    }

    fn check_shape(amps: &[Complex64]) -> Result<()> {
        if amps.len() < 2 {
            return Err(Error::DimensionTooSmall(amps.len()));
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFinite("system amplitudes"));
        }
        Ok(())
    }
}

/// `A = sum_n alpha_n |a_n><a_n|`, diagonal in the system basis.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasuredObservable {
    eigenvalues: Vec<f64>,
}

impl MeasuredObservable {
    pub fn new(eigenvalues: Vec<f64>) -> Result<Self> {
        if eigenvalues.len() < 2 {
            return Err(Error::DimensionTooSmall(eigenvalues.len()));
        }
        if eigenvalues.iter().any(|a| !a.is_finite()) {
            return Err(Error::NonFinite("eigenvalues"));
        }
        Ok(Self { eigenvalues })
    }

    /// The projector `|1><1|` on a qubit, eigenvalues (0, 1).
    pub fn qubit_projector() -> Self {
        Self {
            eigenvalues: vec![0.0, 1.0],
        }
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::new(vec![1.0; dim])
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn max_abs(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |m, a| m.max(a.abs()))
    }

    pub(crate) fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: self.dim(),
            });
        }
        Ok(())
    }
}

fn norm_sq(amps: &[Complex64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum()
}

fn check_same_dim(u: &SystemState, v: &SystemState) -> Result<()> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            found: v.dim(),
        });
    }
    Ok(())
}

/// `<u|v>`.
pub fn inner(u: &SystemState, v: &SystemState) -> Result<Complex64> {
    check_same_dim(u, v)?;
    Ok(u.amps.iter().zip(&v.amps).map(|(a, b)| a.conj() * b).sum())
}

/// `<f|A|psi> / <f|psi>`.
pub fn weak_value(
    psi: &SystemState,
    f: &SystemState,
    observable: &MeasuredObservable,
) -> Result<Complex64> {
    check_same_dim(psi, f)?;
    observable.check_dim(psi.dim())?;
    let mut numerator = Complex64::new(0.0, 0.0);
    let mut overlap = Complex64::new(0.0, 0.0);
    for ((fa, pa), alpha) in f.amps.iter().zip(&psi.amps).zip(&observable.eigenvalues) {
        let w = fa.conj() * pa;
        numerator += w * *alpha;
        overlap += w;
    }
    if overlap.norm() < ZERO_POST_SELECTION {
        return Err(Error::ZeroPostSelection {
            overlap: overlap.norm(),
        });
    }
    Ok(numerator / overlap)
}

/// `<psi|A|psi>`.
pub fn expectation(psi: &SystemState, observable: &MeasuredObservable) -> Result<f64> {
    observable.check_dim(psi.dim())?;
    Ok(psi
        .amps
        .iter()
        .zip(&observable.eigenvalues)
        .map(|(a, alpha)| a.norm_sqr() * alpha)
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_8};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn plus() -> SystemState {
        SystemState::from_real(&[1.0, 1.0]).unwrap()
    }

    #[test]
    fn inner_products() {
        let e0 = SystemState::basis(2, 0).unwrap();
        let e1 = SystemState::basis(2, 1).unwrap();
        assert_eq!(inner(&e0, &e0).unwrap(), c(1.0, 0.0));
        assert_eq!(inner(&e0, &e1).unwrap(), c(0.0, 0.0));
        let minus = SystemState::from_real(&[1.0, -1.0]).unwrap();
        assert!(inner(&plus(), &minus).unwrap().norm() < 1e-15);
    }

    #[test]
    fn inner_rejects_dimension_mismatch() {
        let a = SystemState::basis(2, 0).unwrap();
        let b = SystemState::basis(3, 0).unwrap();
        assert!(matches!(
            inner(&a, &b),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn construction_validates() {
        assert!(matches!(
            SystemState::new(vec![c(1.0, 0.0)]),
            Err(Error::DimensionTooSmall(1))
        ));
        assert!(matches!(
            SystemState::new(vec![c(1.0, 0.0), c(1.0, 0.0)]),
            Err(Error::NotNormalized { .. })
        ));
        assert!(SystemState::new(vec![c(FRAC_1_SQRT_2, 0.0), c(0.0, FRAC_1_SQRT_2)]).is_ok());
        assert!(MeasuredObservable::new(vec![0.0, f64::NAN]).is_err());
    }

    #[test]
    fn weak_value_of_eigenstate_post_selection() {
        let a = MeasuredObservable::qubit_projector();
        let f1 = SystemState::basis(2, 1).unwrap();
        let f0 = SystemState::basis(2, 0).unwrap();
        assert!((weak_value(&plus(), &f1, &a).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        assert!(weak_value(&plus(), &f0, &a).unwrap().norm() < 1e-15);
    }

    #[test]
    fn weak_value_anomalous_example() {
        let a = MeasuredObservable::qubit_projector();
        let theta = -FRAC_PI_8;
        let f = SystemState::linear(theta);
        let w = weak_value(&plus(), &f, &a).unwrap();
        // sin(theta)/(cos(theta)+sin(theta)) evaluated by hand
        let expected = theta.sin() / (theta.cos() + theta.sin());
        assert!((w.re - expected).abs() < 1e-14);
        assert!((w.re + FRAC_1_SQRT_2).abs() < 1e-12);
        assert!(w.im.abs() < 1e-15);
    }

    #[test]
    fn weak_value_zero_post_selection() {
        let a = MeasuredObservable::qubit_projector();
        let psi = SystemState::basis(2, 0).unwrap();
        let f = SystemState::basis(2, 1).unwrap();
        assert!(matches!(
            weak_value(&psi, &f, &a),
            Err(Error::ZeroPostSelection { .. })
        ));
    }

    #[test]
    fn expectation_examples() {
        let a = MeasuredObservable::qubit_projector();
        assert_eq!(
            expectation(&SystemState::basis(2, 0).unwrap(), &a).unwrap(),
            0.0
        );
        assert!((expectation(&plus(), &a).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(
            expectation(&SystemState::basis(2, 1).unwrap(), &a).unwrap(),
            1.0
        );
    }

    #[test]
    fn flip_is_two_level_only() {
        let f = SystemState::linear(0.3).flipped().unwrap();
        assert!((f.amps()[1].re + 0.3f64.sin()).abs() < 1e-15);
        let three = SystemState::basis(3, 0).unwrap();
        assert!(matches!(three.flipped(), Err(Error::FlipUnsupported(3))));
    }
}
