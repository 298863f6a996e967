//! Exact von Neumann pointer measurements with post-selection.
//!
//! A system state `|psi>` is coupled to a pointer through
//! `exp(-i eta A (x) mu)`, post-selected on `<f|`, and the pointer readouts
//! are evaluated without any weak-coupling expansion. Comparing them with
//! the weak value `<f|A|psi>/<f|psi>` shows where the weak value
//! approximation holds, where it fails, and where it returns (weak echoes).

pub mod analysis;
pub mod entangler;
pub mod error;
pub mod grid;
pub mod hilbert;
pub mod pointer;
pub mod readout;

pub use entangler::{ingest_joint_amplitudes, von_neumann_entangle, EntangledState};
pub use error::{Error, Result};
pub use grid::{Grid, GridFunction};
pub use hilbert::{expectation, inner, weak_value, MeasuredObservable, SystemState};
pub use pointer::{
    closed_form_matrices, condition_residuals, pointer_matrices, ConditionResiduals, GridSpec,
    PointerFamily, PointerMatrices, PointerObservable, PointerState, PulseConjugate, Readouts,
};
pub use readout::{brute_force_oracle, conditional_expectation, full_readout, ConditionalReadout};
