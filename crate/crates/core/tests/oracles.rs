use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_8, PI};
use weakecho::analysis::{d10, strong_strength};
use weakecho::{
    condition_residuals, conditional_expectation, ingest_joint_amplitudes, pointer_matrices,
    von_neumann_entangle, Error, Grid, GridSpec, MeasuredObservable, PointerFamily,
    PointerObservable, PointerState, PulseConjugate, Readouts, SystemState,
};

fn projector() -> MeasuredObservable {
    MeasuredObservable::qubit_projector()
}

/// Overlap of two unit-normalized `exp(-t^2/4s^2) cos(w t + cep)` pulses
/// whose centres differ by `2d`, from the Gaussian integrals of
/// `cos(a) cos(b) = (cos(a-b) + cos(a+b))/2`.
fn pulse_gram(d: f64, sigma: f64, omega: f64, cep: f64) -> f64 {
    let damp = (-2.0 * omega * omega * sigma * sigma).exp();
    (-d * d / (2.0 * sigma * sigma)).exp() * ((2.0 * omega * d).cos() + damp * (2.0 * cep).cos())
        / (1.0 + damp * (2.0 * cep).cos())
}

#[test]
fn pulse_gram_matches_closed_form() {
    for (sigma, omega, cep) in [
        (1.0, 4.0, 0.0),
        (1.0, 4.0, 0.7),
        (0.6, 1.0, 1.2),
        (1.3, 0.5, 0.0),
    ] {
        let fam = PointerFamily::optical_pulse_with(sigma, omega, cep, PulseConjugate::Generator)
            .unwrap();
        for eta in [0.0, 0.05, 0.12, 0.39, 0.75, 1.7, 3.0] {
            let got = d10(&fam, &projector(), eta, &GridSpec::default()).unwrap();
            let want = pulse_gram(eta / 2.0, sigma, omega, cep);
            assert!(
                (got.re - want).abs() < 1e-10,
                "{sigma} {omega} {cep} {eta}: {got} vs {want}"
            );
            assert!(got.im.abs() < 1e-15);
        }
    }
}

#[test]
fn frozen_pulse_landmarks() {
    let fam = PointerFamily::optical_pulse(1.0, 4.0).unwrap();
    let d = d10(&fam, &projector(), 0.75, &GridSpec::default()).unwrap();
    // exp(-0.375^2/2) cos(3) = -0.9227745
    assert!((d.re - (-0.140625f64 / 2.0).exp() * 3.0f64.cos()).abs() < 1e-10);
    assert!((d.re + 0.9227745).abs() < 1e-6);
    let z = strong_strength(&fam, &projector(), 0.39, &GridSpec::default()).unwrap();
    assert!((z - FRAC_PI_8).abs() < 1e-10);
}

#[test]
fn gaussian_matrices_match_closed_form_for_three_levels() {
    let a = MeasuredObservable::new(vec![-1.0, 0.5, 2.0]).unwrap();
    for sigma in [0.7, 1.0, 1.6] {
        let fam = PointerFamily::gaussian(sigma).unwrap();
        for eta in [0.01, 0.3, 1.1] {
            let m = pointer_matrices(&fam, eta, &a, &GridSpec::default()).unwrap();
            let al = a.eigenvalues();
            for r in 0..3 {
                for c in 0..3 {
                    let g = (-(eta * (al[r] - al[c])).powi(2) / (8.0 * sigma * sigma)).exp();
                    assert!((m.d[(r, c)].re - g).abs() < 1e-12);
                    assert!((m.chi[(r, c)].re - eta * (al[r] + al[c]) / 2.0 * g).abs() < 1e-10);
                    assert!((m.mu[(r, c)].im - eta * (al[r] - al[c]) / 2.0 * g).abs() < 1e-7);
                }
            }
        }
    }
}

fn mu_ratio(fam: &PointerFamily, eta: f64) -> Complex64 {
    let m = pointer_matrices(fam, eta, &projector(), &GridSpec::default()).unwrap();
    m.mu[(1, 0)] / (Complex64::new(0.0, eta / 2.0) * m.d[(1, 0)])
}

#[test]
fn generator_readout_ratio_drifts_with_eta() {
    let fam = PointerFamily::optical_pulse(1.0, 4.0).unwrap();
    let weak = mu_ratio(&fam, 0.01);
    let echo = mu_ratio(&fam, 0.75);
    assert!((weak - 1.0).norm() < 1e-3, "{weak}");
    assert!((echo - weak).norm() > 0.1, "{echo}");
}

#[test]
fn envelope_readout_ratio_is_constant() {
    let fam = PointerFamily::optical_pulse_with(1.0, 4.0, 0.0, PulseConjugate::Envelope).unwrap();
    for eta in [0.01, 0.12, 0.3, 0.6, 0.75, 1.0] {
        let r = mu_ratio(&fam, eta);
        assert!((r - 1.0).norm() < 1e-6, "eta {eta}: {r}");
    }
    let m = pointer_matrices(&fam, 0.75, &projector(), &GridSpec::default()).unwrap();
    let res = condition_residuals(&m);
    assert!(res.chi < 1e-6 && res.mu < 1e-6, "{res:?}");
    assert!(PointerFamily::optical_pulse_with(1.0, 4.0, 0.3, PulseConjugate::Envelope).is_err());
}

#[test]
fn envelope_readout_vanishes_at_strong_point() {
    let fam = PointerFamily::optical_pulse_with(1.0, 4.0, 0.0, PulseConjugate::Envelope).unwrap();
    let m = pointer_matrices(&fam, FRAC_PI_8, &projector(), &GridSpec::default()).unwrap();
    assert!(m.mu.iter().all(|v| v.norm() < 1e-8), "{}", m.mu);
    let gen = PointerFamily::optical_pulse(1.0, 4.0).unwrap();
    let m = pointer_matrices(&gen, FRAC_PI_8, &projector(), &GridSpec::default()).unwrap();
    assert!(m.mu[(1, 0)].norm() > 1e-3);
}

#[test]
fn sampled_gaussian_round_trip() {
    let spec = GridSpec {
        points: 257,
        half_width: Some(11.0),
    };
    let grid = Grid::symmetric(11.0, 257).unwrap();
    let weights = grid.simpson_weights();
    let fam = PointerFamily::gaussian(1.0).unwrap();
    let psi = SystemState::from_real(&[0.6, 0.8]).unwrap();
    let eta = 0.9;
    let state = von_neumann_entangle(&psi, &projector(), &fam, eta, &spec).unwrap();

    let mut gamma = DMatrix::from_element(2, grid.len(), Complex64::new(0.0, 0.0));
    for (n, (c, xi)) in state.coeffs().iter().zip(state.branches()).enumerate() {
        let Some(PointerState::Wave(g)) = xi else {
            panic!()
        };
        for (m, v) in g.values().iter().enumerate() {
            gamma[(n, m)] = c * v * weights[m].sqrt();
        }
    }
    let ingested = ingest_joint_amplitudes(&gamma, grid.len()).unwrap();
    let f = SystemState::linear(-0.3);
    assert!(matches!(
        conditional_expectation(&ingested, &f, PointerObservable::Canonical),
        Err(Error::MissingReadout)
    ));
    let x = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        grid.len(),
        grid.nodes().map(|x| Complex64::new(x, 0.0)),
    ));
    let zero = DMatrix::from_element(grid.len(), grid.len(), Complex64::new(0.0, 0.0));
    let ingested = ingested.with_readouts(Readouts::matrices(x, zero).unwrap());

    let m = ingested.matrices().unwrap();
    assert!((m.d10().re - (-eta * eta / 8.0f64).exp()).abs() < 1e-10);
    let direct = conditional_expectation(&state, &f, PointerObservable::Canonical).unwrap();
    let round = conditional_expectation(&ingested, &f, PointerObservable::Canonical).unwrap();
    assert!((direct - round).abs() < 1e-10, "{direct} vs {round}");
}

#[test]
fn qubit_echo_equals_small_strength() {
    let psi = SystemState::from_real(&[1.0, 2.0]).unwrap();
    let f =
        SystemState::normalized(vec![Complex64::new(1.0, 0.2), Complex64::new(-0.4, 0.9)]).unwrap();
    let q = PointerFamily::qubit();
    let spec = GridSpec::default();
    for k in 1..=3 {
        let a = von_neumann_entangle(&psi, &projector(), &q, 0.05, &spec).unwrap();
        let b = von_neumann_entangle(&psi, &projector(), &q, 0.05 + 2.0 * PI * k as f64, &spec)
            .unwrap();
        let ra = weakecho::full_readout(&a, &f, &projector(), &psi).unwrap();
        let rb = weakecho::full_readout(&b, &f, &projector(), &psi).unwrap();
        assert!((ra.complex_shift - rb.complex_shift).norm() < 1e-12);
        assert!((ra.prob - rb.prob).abs() < 1e-12);
    }
}
