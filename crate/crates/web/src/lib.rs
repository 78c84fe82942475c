//! Browser bindings. Arguments: total duration `tau`, `area = tau * Omega0`
//! of the undivided pulse (1 inverts on resonance), half count `N` of the
//! `2N + 1` train, alternation phase in radians.

use resmetro::{fisher_report, fwhm, FisherMethod, ProbabilityProfile, PulseParams, SequenceSpec};
use wasm_bindgen::prelude::*;

fn train(
    tau: f64,
    area: f64,
    n_half: u32,
    phase: f64,
    detuning: f64,
) -> Result<SequenceSpec, String> {
    let base = PulseParams::from_detuning(area / tau, tau, detuning).map_err(|e| e.to_string())?;
    SequenceSpec::new(n_half as usize, phase, base).map_err(|e| e.to_string())
}

pub fn ground_profile(
    tau: f64,
    area: f64,
    n_half: u32,
    phase: f64,
    detunings: &[f64],
) -> Result<Vec<f64>, String> {
    let seq = train(tau, area, n_half, phase, 0.0)?;
    detunings
        .iter()
        .map(|&d| {
            resmetro::sequence_probabilities(&seq.with_detuning(d))
                .map(|(p0, _)| p0)
                .map_err(|e| e.to_string())
        })
        .collect()
}

/// Classical values followed by quantum values, each `detunings.len()` long.
pub fn fisher_curves(
    tau: f64,
    area: f64,
    n_half: u32,
    phase: f64,
    detunings: &[f64],
) -> Result<Vec<f64>, String> {
    let seq = train(tau, area, n_half, phase, 0.0)?;
    let mut cfi = Vec::with_capacity(2 * detunings.len());
    let mut qfi = Vec::with_capacity(detunings.len());
    for &d in detunings {
        let r = fisher_report(&seq.with_detuning(d), FisherMethod::AnalyticDerivative, 1)
            .map_err(|e| e.to_string())?;
        cfi.push(r.cfi);
        qfi.push(r.qfi);
    }
    cfi.extend(qfi);
    Ok(cfi)
}

pub fn dip_width(tau: f64, area: f64, n_half: u32, phase: f64) -> Result<f64, String> {
    let seq = train(tau, area, n_half, phase, 0.0)?;
    let half_span = 4.0 * seq.pulse_count() as f64 / tau;
    let points = 401;
    let omega = (0..points)
        .map(|i| -half_span + 2.0 * half_span * i as f64 / (points - 1) as f64)
        .collect();
    let profile = ProbabilityProfile::sample(seq, omega).map_err(|e| e.to_string())?;
    fwhm(&profile).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn profile(
    tau: f64,
    area: f64,
    n_half: u32,
    phase: f64,
    detunings: &[f64],
) -> Result<Vec<f64>, JsError> {
    ground_profile(tau, area, n_half, phase, detunings).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn fisher(
    tau: f64,
    area: f64,
    n_half: u32,
    phase: f64,
    detunings: &[f64],
) -> Result<Vec<f64>, JsError> {
    fisher_curves(tau, area, n_half, phase, detunings).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn width(tau: f64, area: f64, n_half: u32, phase: f64) -> Result<f64, JsError> {
    dip_width(tau, area, n_half, phase).map_err(|e| JsError::new(&e))
}
