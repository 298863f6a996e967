#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use weakecho::{PointerFamily, SystemState};

pub fn random_state<R: Rng>(rng: &mut R, dim: usize) -> SystemState {
    let amps = (0..dim)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    SystemState::normalized(amps).unwrap()
}

pub fn families() -> Vec<PointerFamily> {
    vec![
        PointerFamily::gaussian(1.0).unwrap(),
        PointerFamily::optical_pulse(1.0, 4.0).unwrap(),
        PointerFamily::qubit(),
    ]
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}
