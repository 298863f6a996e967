//! Entangled system-pointer states `sum_n c_n |a_n> (x) |xi_n>`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{MeasuredObservable, SystemState};
use crate::pointer::{GridSpec, PointerFamily, PointerMatrices, PointerState, Readouts};

/// Tolerance on the squared norm of ingested joint amplitudes.
pub const JOINT_NORM_TOLERANCE: f64 = 1e-8;

/// Branches with `|c_n|` at or below this carry no pointer state.
pub const EMPTY_BRANCH: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct EntangledState {
    coeffs: Vec<Complex64>,
    branches: Vec<Option<PointerState>>,
    readouts: Option<Readouts>,
    eta: Option<f64>,
    eta_eff: Option<f64>,
    alphas: Option<Vec<f64>>,
}

impl EntangledState {
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Pointer states; `None` marks an empty branch (`c_n = 0`).
    pub fn branches(&self) -> &[Option<PointerState>] {
        &self.branches
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn readouts(&self) -> Result<&Readouts> {
        self.readouts.as_ref().ok_or(Error::MissingReadout)
    }

    pub fn with_readouts(mut self, readouts: Readouts) -> Self {
        self.readouts = Some(readouts);
        self
    }

    pub fn eta(&self) -> Option<f64> {
        self.eta
    }

    pub fn eta_eff(&self) -> Option<f64> {
        self.eta_eff
    }

    pub fn with_strength(mut self, eta: f64, eta_eff: f64) -> Self {
        self.eta = Some(eta);
        self.eta_eff = Some(eta_eff);
        self
    }

    /// Same pointer branches, new system amplitudes.
    pub fn with_system_state(&self, psi: &SystemState) -> Result<Self> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: psi.dim(),
            });
        }
        if psi
            .amps()
            .iter()
            .zip(&self.branches)
            .any(|(c, xi)| xi.is_none() && c.norm() > EMPTY_BRANCH)
        {
            return Err(Error::InvalidParameter(
                "amplitude on a branch without pointer state".into(),
            ));
        }
        Ok(Self {
            coeffs: psi.amps().to_vec(),
            ..self.clone()
        })
    }

    /// `<Psi|Psi>`; cross terms vanish because the system labels are orthogonal.
    pub fn norm_sq(&self) -> f64 {
        self.coeffs
            .iter()
            .zip(&self.branches)
            .map(|(c, xi)| c.norm_sqr() * xi.as_ref().map_or(0.0, PointerState::norm_sq))
            .sum()
    }

    /// Eigenvalues that generated the branches, when known.
    pub fn alphas(&self) -> Option<&[f64]> {
        self.alphas.as_deref()
    }

    /// Pointer matrices evaluated on the actual branch states. Ingested
    /// states carry no eigenvalues; their matrices get NaN placeholders.
    pub fn matrices(&self) -> Result<PointerMatrices> {
        let alphas = self
            .alphas
            .clone()
            .unwrap_or_else(|| vec![f64::NAN; self.dim()]);
        let eta = self.eta.unwrap_or(f64::NAN);
        let eta_eff = self.eta_eff.unwrap_or(f64::NAN);
        PointerMatrices::from_states(self.readouts()?, eta, eta_eff, &alphas, &self.branches)
    }

    /// `gamma_nm = c_n <b_m|xi_n>` for finite pointer bases.
    pub fn joint_amplitudes(&self) -> Result<DMatrix<Complex64>> {
        let width = self
            .branches
            .iter()
            .flatten()
            .map(|b| match b {
                PointerState::Discrete(v) => Ok(v.len()),
                PointerState::Wave(_) => Err(Error::PointerMismatch),
            })
            .next()
            .unwrap_or(Ok(0))?;
        let mut gamma = DMatrix::from_element(self.dim(), width, Complex64::new(0.0, 0.0));
        for (n, (c, xi)) in self.coeffs.iter().zip(&self.branches).enumerate() {
            if let Some(PointerState::Discrete(v)) = xi {
                for (m, a) in v.iter().enumerate() {
                    gamma[(n, m)] = c * a;
                }
            }
        }
        Ok(gamma)
    }
}

/// Applies `sum_n Pi_n (x) exp(-i eta alpha_n mu)` to `|psi> (x) |xi_0>` exactly.
pub fn von_neumann_entangle(
    psi: &SystemState,
    observable: &MeasuredObservable,
    family: &PointerFamily,
    eta: f64,
    spec: &GridSpec,
) -> Result<EntangledState> {
    if psi.dim() != observable.dim() {
        return Err(Error::DimensionMismatch {
            expected: psi.dim(),
            found: observable.dim(),
        });
    }
    let grid = family.grid(eta, observable.eigenvalues(), spec)?;
    let branches = observable
        .eigenvalues()
        .iter()
        .map(|&alpha| family.state(eta, alpha, grid.as_ref()).map(Some))
        .collect::<Result<Vec<_>>>()?;
    Ok(EntangledState {
        coeffs: psi.amps().to_vec(),
        branches,
        readouts: Some(Readouts::Family(*family)),
        eta: Some(eta),
        eta_eff: Some(family.effective_strength(eta)),
        alphas: Some(observable.eigenvalues().to_vec()),
    })
}

/// Factors `|Psi> = sum_nm gamma_nm |a_n> (x) |b_m>` into `c_n` and `xi_n`.
///
/// Each `xi_n` is phased so its largest-magnitude component (first on ties)
/// is real positive; the remaining phase goes into `c_n`. Two-dimensional
/// pointer spaces get the qubit readouts; other sizes need
/// [`EntangledState::with_readouts`].
pub fn ingest_joint_amplitudes(
    gamma: &DMatrix<Complex64>,
    pointer_basis_dim: usize,
) -> Result<EntangledState> {
    if gamma.ncols() != pointer_basis_dim {
        return Err(Error::DimensionMismatch {
            expected: pointer_basis_dim,
            found: gamma.ncols(),
        });
    }
    if gamma.nrows() < 2 {
        return Err(Error::DimensionTooSmall(gamma.nrows()));
    }
    if gamma.iter().any(|g| !g.re.is_finite() || !g.im.is_finite()) {
        return Err(Error::NonFinite("joint amplitudes"));
    }
    let norm_sq: f64 = gamma.iter().map(|g| g.norm_sqr()).sum();
    if (norm_sq - 1.0).abs() > JOINT_NORM_TOLERANCE {
        return Err(Error::NotNormalized { norm_sq });
    }

    let mut coeffs = Vec::with_capacity(gamma.nrows());
    let mut branches = Vec::with_capacity(gamma.nrows());
    for row in gamma.row_iter() {
        let weight = row.iter().map(|g| g.norm_sqr()).sum::<f64>().sqrt();
        if weight <= EMPTY_BRANCH {
            coeffs.push(Complex64::new(0.0, 0.0));
            branches.push(None);
            continue;
        }
        let mut peak = row[0];
        for g in row.iter() {
            if g.norm() > peak.norm() {
                peak = *g;
            }
        }
        let c = Complex64::from_polar(weight, peak.arg());
        coeffs.push(c);
        branches.push(Some(PointerState::Discrete(
            row.iter().map(|g| g / c).collect(),
        )));
    }
    let readouts = (pointer_basis_dim == 2).then_some(Readouts::Family(PointerFamily::Qubit));
    Ok(EntangledState {
        coeffs,
        branches,
        readouts,
        eta: None,
        eta_eff: None,
        alphas: None,
    })
}
