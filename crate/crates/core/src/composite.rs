//! Phase-alternated trains of `2N+1` sech pulses sharing a fixed total
//! duration.
//!
//! Two independent routes are provided: the literal matrix product
//! `U (D U D^dag U)^N` with `D = exp(i phi sigma_z / 2)`, and closed forms in
//! the third and fourth Chebyshev kinds for `phi` in `{0, pi}`.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::ode::{integrate_sequence, IntegrationConfig};
use crate::propagator::{
    cayley_klein, cayley_klein_jet, PropagatorJet, PulseParams, Su2Propagator,
};
use crate::special::{chebyshev_angle, ChebyshevKind};

/// Phases within this distance of 0 or pi (mod 2 pi) use the closed forms.
const PHASE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnalyticPhase {
    Zero,
    Pi,
}

impl AnalyticPhase {
    pub fn classify(phase: f64) -> Option<AnalyticPhase> {
        let r = phase.rem_euclid(2.0 * PI);
        if r < PHASE_TOL || 2.0 * PI - r < PHASE_TOL {
            Some(AnalyticPhase::Zero)
        } else if (r - PI).abs() < PHASE_TOL {
            Some(AnalyticPhase::Pi)
        } else {
            None
        }
    }

    pub fn radians(self) -> f64 {
        match self {
            AnalyticPhase::Zero => 0.0,
            AnalyticPhase::Pi => PI,
        }
    }
}

/// A train of `2N+1` pulses whose total duration is `base.width`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SequenceSpec {
    /// `N`; the train has `2N+1` pulses.
    pub half_count: usize,
    /// Phase shift applied to every second pulse.
    pub phase: f64,
    /// Single pulse spanning the whole duration, before rescaling.
    pub base: PulseParams,
}

impl SequenceSpec {
    pub fn new(half_count: usize, phase: f64, base: PulseParams) -> Result<Self> {
        base.validate()?;
        if !phase.is_finite() {
            return Err(Error::InvalidConfig("sequence phase must be finite".into()));
        }
        Ok(SequenceSpec {
            half_count,
            phase,
            base,
        })
    }

    pub fn single(base: PulseParams) -> Self {
        SequenceSpec {
            half_count: 0,
            phase: 0.0,
            base,
        }
    }

    /// Train of pi-pulses (unit area each) with total duration `tau`.
    pub fn pi_train(half_count: usize, phase: f64, tau: f64, detuning: f64) -> Result<Self> {
        Self::new(half_count, phase, PulseParams::pi_pulse(tau, detuning)?)
    }

    pub fn pulse_count(&self) -> usize {
        2 * self.half_count + 1
    }

    /// The rescaled pulse used for every element of the train.
    pub fn pulse(&self) -> PulseParams {
        rescale_pulse(&self.base, self.half_count)
    }

    pub fn total_duration(&self) -> f64 {
        self.pulse().width * self.pulse_count() as f64
    }

    pub fn detuning(&self) -> f64 {
        self.base.detuning()
    }

    pub fn with_detuning(mut self, detuning: f64) -> Self {
        self.base = self.base.with_detuning(detuning);
        self
    }

    pub fn with_drive(mut self, drive: f64) -> Self {
        self.base.drive = drive;
        self
    }

    pub fn with_resonance(mut self, resonance: f64) -> Self {
        let detuning = self.base.detuning();
        self.base.resonance = resonance;
        self.base.drive = resonance + detuning;
        self
    }

    pub fn analytic_phase(&self) -> Option<AnalyticPhase> {
        if self.half_count == 0 {
            return Some(AnalyticPhase::classify(self.phase).unwrap_or(AnalyticPhase::Zero));
        }
        AnalyticPhase::classify(self.phase)
    }
}

/// Divide the width by `2N+1` and multiply the amplitude by `2N+1`; the
/// area and detuning are unchanged.
pub fn rescale_pulse(base: &PulseParams, half_count: usize) -> PulseParams {
    let k = (2 * half_count + 1) as f64;
    PulseParams {
        width: base.width / k,
        amplitude: base.amplitude * k,
        ..*base
    }
}

/// `u^n` through first- and second-kind Chebyshev polynomials of `re(a)`.
pub fn same_phase_power(u: &Su2Propagator, n: usize) -> Su2Propagator {
    if n == 0 {
        return Su2Propagator::identity();
    }
    let a_re = u.a.re;
    let sin_theta = (u.a.im * u.a.im + u.b.norm_sqr()).sqrt();
    let theta = sin_theta.atan2(a_re);
    let t_n = chebyshev_angle(ChebyshevKind::First, n, theta);
    let u_prev = chebyshev_angle(ChebyshevKind::Second, n - 1, theta);
    Su2Propagator {
        a: num_complex::Complex64::new(t_n, u.a.im * u_prev),
        b: u.b * u_prev,
    }
}

fn alternating_product<T, F>(
    single: T,
    half_count: usize,
    phase: f64,
    shift: F,
    compose: fn(&T, &T) -> T,
) -> T
where
    F: Fn(&T, f64) -> T,
{
    let pair = compose(&shift(&single, phase), &single);
    let mut total = single;
    for _ in 0..half_count {
        total = compose(&total, &pair);
    }
    total
}

/// Literal product of the `2N+1` phase-alternated pulse propagators.
pub fn sequence_propagator_direct(seq: &SequenceSpec) -> Result<Su2Propagator> {
    let u = cayley_klein(&seq.pulse())?;
    Ok(alternating_product(
        u,
        seq.half_count,
        seq.phase,
        |p, phi| p.phase_shifted(phi),
        Su2Propagator::compose,
    ))
}

/// Direct product carrying the analytic detuning derivative along.
pub fn sequence_jet_direct(seq: &SequenceSpec) -> Result<PropagatorJet> {
    let jet = cayley_klein_jet(&seq.pulse())?;
    Ok(alternating_product(
        jet,
        seq.half_count,
        seq.phase,
        |p, phi| p.phase_shifted(phi),
        PropagatorJet::compose,
    ))
}

/// Half angle and the pair `(V_N, W_N)` for the closed-form trains.
fn chebyshev_pair(u: &Su2Propagator, n: usize, phase: AnalyticPhase) -> (f64, f64) {
    // cos(theta) = 1 - 2 a_I^2 for phi = pi and 2 a_R^2 - 1 for phi = 0
    let theta = match phase {
        AnalyticPhase::Pi => 2.0 * u.a.im.abs().min(1.0).asin(),
        AnalyticPhase::Zero => 2.0 * u.a.re.abs().min(1.0).acos(),
    };
    (
        chebyshev_angle(ChebyshevKind::Third, n, theta),
        chebyshev_angle(ChebyshevKind::Fourth, n, theta),
    )
}

/// Closed-form train propagator for `phi` in `{0, pi}`.
pub fn sequence_propagator_chebyshev(seq: &SequenceSpec) -> Result<Su2Propagator> {
    let phase = seq
        .analytic_phase()
        .ok_or(Error::UnsupportedPhase(seq.phase))?;
    let u = cayley_klein(&seq.pulse())?;
    let (v, w) = chebyshev_pair(&u, seq.half_count, phase);
    let a = num_complex::Complex64::new(u.a.re * v, u.a.im * w);
    let b = match phase {
        AnalyticPhase::Pi => u.b * v,
        AnalyticPhase::Zero => u.b * w,
    };
    Ok(Su2Propagator::new(a, b))
}

/// `(P0, P1)` after the train; closed form when the phase allows it,
/// direct product otherwise.
pub fn sequence_probabilities(seq: &SequenceSpec) -> Result<(f64, f64)> {
    let p1 = match seq.analytic_phase() {
        Some(phase) => {
            let u = cayley_klein(&seq.pulse())?;
            let (v, w) = chebyshev_pair(&u, seq.half_count, phase);
            let poly = match phase {
                AnalyticPhase::Pi => v,
                AnalyticPhase::Zero => w,
            };
            u.b.norm_sqr() * poly * poly
        }
        None => sequence_propagator_direct(seq)?.excited_probability(),
    };
    Ok((1.0 - p1, p1))
}

/// How a train propagator is evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Backend {
    /// Chebyshev closed form (falls back to the direct product for other
    /// phases).
    Analytic,
    Direct,
    Ode(IntegrationConfig),
}

pub fn sequence_propagator(seq: &SequenceSpec, backend: Backend) -> Result<Su2Propagator> {
    match backend {
        Backend::Analytic => match seq.analytic_phase() {
            Some(_) => sequence_propagator_chebyshev(seq),
            None => sequence_propagator_direct(seq),
        },
        Backend::Direct => sequence_propagator_direct(seq),
        Backend::Ode(cfg) => integrate_sequence(seq, &cfg),
    }
}
