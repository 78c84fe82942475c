//! Classical and quantum Fisher information for the resonance frequency,
//! the Cramér–Rao variance bound, and the width and curvature of the
//! resonance dip.
//!
//! Everything is computed with respect to the detuning `Delta = omega -
//! omega0`. Since `d/d omega0 = -d/d Delta` and every quantity here is
//! quadratic in the derivative, the values are the Fisher information for
//! `omega0`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::composite::{
    sequence_jet_direct, sequence_probabilities, sequence_propagator_chebyshev, AnalyticPhase,
    SequenceSpec,
};
use crate::error::{Error, Result};
use crate::ode::{integrate_sequence, IntegrationConfig};
use crate::propagator::{
    cayley_klein_jet, richardson_derivative, PropagatorJet, PulseParams, Su2Propagator,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FisherMethod {
    ClosedForm,
    FiniteDifference,
    AnalyticDerivative,
}

impl FisherMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            FisherMethod::ClosedForm => "closed_form",
            FisherMethod::FiniteDifference => "finite_difference",
            FisherMethod::AnalyticDerivative => "analytic_derivative",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FisherReport {
    pub detuning: f64,
    pub cfi: f64,
    pub qfi: f64,
    pub repetitions: u64,
    /// `1 / (repetitions * cfi)`; infinite where the CFI vanishes.
    pub crb_variance: f64,
    pub method: FisherMethod,
}

/// Binary-outcome Fisher information `dP1^2 / (P1 (1 - P1))`.
///
/// At `P1` in `{0, 1}` with `dP1 = 0` the value is the limit `2 |c|`, where
/// `c` is the second derivative of `P1` there; pass it as `curvature`.
pub fn classical_fisher_binary(p1: f64, dp1: f64, curvature: Option<f64>) -> Result<f64> {
    if !(0.0..=1.0).contains(&p1) || !dp1.is_finite() {
        return Err(Error::Domain(format!(
            "probability {p1} with derivative {dp1}"
        )));
    }
    if p1 > 0.0 && p1 < 1.0 {
        return Ok(dp1 * dp1 / (p1 * (1.0 - p1)));
    }
    match curvature {
        Some(c) if dp1 == 0.0 => Ok(2.0 * c.abs()),
        _ => Err(Error::Domain(format!(
            "fisher information undefined at P1 = {p1} with derivative {dp1} and no curvature"
        ))),
    }
}

/// Closed-form classical Fisher information of a single sech pulse,
/// `2 pi^2 tau^2 sin^2(pi A/2) tanh^2(x) / (cos(pi A) + cosh(2x))` with
/// `A = tau Omega0` and `x = pi tau Delta / 2`.
pub fn classical_fisher_single_closed(p: &PulseParams) -> f64 {
    let tau = p.width;
    let x = 0.5 * PI * tau * p.detuning();
    let s = (0.5 * PI * p.area()).sin();
    let c = (0.5 * PI * p.area()).cos();
    // cos(pi A) + cosh(2x) = 2 (sinh^2 x + cos^2(pi A / 2))
    let scale = PI * PI * tau * tau * s * s;
    if x == 0.0 {
        return if c * c <= f64::EPSILON * f64::EPSILON {
            scale
        } else {
            0.0
        };
    }
    let t = x.tanh();
    let sh = x.sinh();
    scale * t * t / (sh * sh + c * c)
}

/// `4 (<dpsi|dpsi> - |<dpsi|psi>|^2)` for `psi = (a, b)`.
pub fn quantum_fisher_pure(state: (C64, C64), dstate: (C64, C64)) -> Result<f64> {
    let (a, b) = state;
    let (da, db) = dstate;
    let norm = a.norm_sqr() + b.norm_sqr();
    if !((norm - 1.0).abs() <= 1e-8) {
        return Err(Error::Normalization(norm));
    }
    let overlap = a.conj() * da + b.conj() * db;
    let qfi = 4.0 * (da.norm_sqr() + db.norm_sqr() - overlap.norm_sqr());
    Ok(qfi.max(0.0))
}

/// Populations below this are roundoff; the amplitude phase carries no
/// information there and the zero-population limit is used instead.
const ZERO_POPULATION: f64 = 1e-20;

/// Classical Fisher information of the ground/excited measurement from the
/// final state and its detuning derivative.
///
/// The derivative of the smaller population is used, which stays accurate
/// near full inversion; at a zero of one amplitude the limit
/// `4 |d amplitude|^2 / P_other` is returned.
pub fn classical_fisher_from_state(state: (C64, C64), dstate: (C64, C64)) -> f64 {
    let (a, b) = state;
    let (da, db) = dstate;
    let p0 = a.norm_sqr();
    let p1 = b.norm_sqr();
    if p0 <= ZERO_POPULATION {
        return 4.0 * da.norm_sqr() / p1;
    }
    if p1 <= ZERO_POPULATION {
        return 4.0 * db.norm_sqr() / p0;
    }
    let dp1 = if p0 <= p1 {
        -2.0 * (a.conj() * da).re
    } else {
        2.0 * (b.conj() * db).re
    };
    dp1 * dp1 / (p0 * p1)
}

/// `(cfi, qfi)` from a propagator jet acting on the ground state.
pub fn fisher_from_jet(jet: &PropagatorJet) -> Result<(f64, f64)> {
    let state = (jet.value.a, jet.value.b);
    let dstate = (jet.derivative.a, jet.derivative.b);
    let qfi = quantum_fisher_pure(state, dstate)?;
    let cfi = classical_fisher_from_state(state, dstate);
    Ok((cfi, qfi))
}

/// `1 / (M F)`.
pub fn crb_variance(cfi: f64, repetitions: u64) -> Result<f64> {
    if !(cfi > 0.0 && cfi.is_finite()) {
        return Err(Error::Domain(format!(
            "Cramér–Rao bound needs positive information, got {cfi}"
        )));
    }
    if repetitions == 0 {
        return Err(Error::Domain("at least one repetition required".into()));
    }
    Ok(1.0 / (repetitions as f64 * cfi))
}

/// Closed-form on-resonance classical Fisher information of a pi-pulse
/// train: `pi^2 tau^2` for alternating phase, `pi^2 tau^2 / (2N+1)^2` for
/// equal phases.
pub fn fisher_on_resonance_composite(half_count: usize, phase: AnalyticPhase, tau: f64) -> f64 {
    let base = PI * PI * tau * tau;
    match phase {
        AnalyticPhase::Pi => base,
        AnalyticPhase::Zero => {
            let k = (2 * half_count + 1) as f64;
            base / (k * k)
        }
    }
}

fn jet_by_finite_difference<F>(f: F, detuning: f64, tau: f64) -> Result<PropagatorJet>
where
    F: Fn(f64) -> Result<Su2Propagator>,
{
    let value = f(detuning)?;
    let derivative = richardson_derivative(&f, detuning, 1e-5 * tau)?;
    Ok(PropagatorJet { value, derivative })
}

/// Fisher information of a pulse train at its configured detuning.
///
/// * `AnalyticDerivative`: direct product carrying Gamma/digamma
///   derivatives.
/// * `ClosedForm`: single pulses use the closed-form CFI (QFI from the
///   analytic derivative); trains use the Chebyshev closed form with
///   finite-difference derivatives.
/// * `FiniteDifference`: finite differences of the ODE-integrated train.
pub fn fisher_report(
    seq: &SequenceSpec,
    method: FisherMethod,
    repetitions: u64,
) -> Result<FisherReport> {
    let tau = seq.base.width;
    let detuning = seq.detuning();
    let (cfi, qfi) = match method {
        FisherMethod::AnalyticDerivative => fisher_from_jet(&sequence_jet_direct(seq)?)?,
        FisherMethod::ClosedForm => {
            if seq.half_count == 0 && seq.base.carrier_phase == 0.0 {
                let (_, qfi) = fisher_from_jet(&cayley_klein_jet(&seq.base)?)?;
                (classical_fisher_single_closed(&seq.base), qfi)
            } else {
                let jet = jet_by_finite_difference(
                    |d| sequence_propagator_chebyshev(&seq.with_detuning(d)),
                    detuning,
                    tau,
                )?;
                fisher_from_jet(&jet)?
            }
        }
        FisherMethod::FiniteDifference => {
            let cfg = IntegrationConfig::precise();
            let jet = jet_by_finite_difference(
                |d| integrate_sequence(&seq.with_detuning(d), &cfg),
                detuning,
                tau,
            )?;
            fisher_from_jet(&jet)?
        }
    };
    let crb = if cfi > 0.0 && repetitions > 0 {
        crb_variance(cfi, repetitions)?
    } else {
        f64::INFINITY
    };
    Ok(FisherReport {
        detuning,
        cfi,
        qfi,
        repetitions,
        crb_variance: crb,
        method,
    })
}

/// Sampled ground-state probability against drive frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityProfile {
    pub omega: Vec<f64>,
    pub p0: Vec<f64>,
    pub generator: SequenceSpec,
}

impl ProbabilityProfile {
    pub fn sample(generator: SequenceSpec, omega: Vec<f64>) -> Result<Self> {
        if omega.is_empty() {
            return Err(Error::InvalidConfig("empty frequency grid".into()));
        }
        if omega.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidConfig(
                "frequency grid must be strictly increasing".into(),
            ));
        }
        let p0 = omega
            .iter()
            .map(|&w| ground_probability_at(&generator, w))
            .collect::<Result<Vec<_>>>()?;
        Ok(ProbabilityProfile {
            omega,
            p0,
            generator,
        })
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    pub fn detunings(&self) -> impl Iterator<Item = f64> + '_ {
        self.omega
            .iter()
            .map(move |w| w - self.generator.base.resonance)
    }
}

fn ground_probability_at(seq: &SequenceSpec, omega: f64) -> Result<f64> {
    Ok(sequence_probabilities(&seq.with_drive(omega))?
        .0
        .clamp(0.0, 1.0))
}

pub(crate) fn golden_section_min<F: Fn(f64) -> f64>(
    f: F,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

/// Bisection for a sign change of `g` in `[lo, hi]`.
fn bisect<F: Fn(f64) -> Result<f64>>(g: F, mut lo: f64, mut hi: f64) -> Result<f64> {
    let mut g_lo = g(lo)?;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let g_mid = g(mid)?;
        if (g_mid > 0.0) == (g_lo > 0.0) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Full width of the dip at half depth, `P0 = (1 + P0_min) / 2`.
///
/// The grid only brackets the minimum and the two crossings; both are then
/// located on the continuous model.
pub fn fwhm(profile: &ProbabilityProfile) -> Result<f64> {
    let n = profile.len();
    if n < 3 {
        return Err(Error::NoMinimum);
    }
    let (imin, _) = profile
        .p0
        .iter()
        .enumerate()
        .fold(
            (0, f64::INFINITY),
            |best, (i, &v)| if v < best.1 { (i, v) } else { best },
        );
    if imin == 0 || imin == n - 1 {
        return Err(Error::NoMinimum);
    }
    let model = |w: f64| ground_probability_at(&profile.generator, w);
    let omega = &profile.omega;
    let span = omega[n - 1] - omega[0];
    let w_min = golden_section_min(
        |w| model(w).unwrap_or(f64::INFINITY),
        omega[imin - 1],
        omega[imin + 1],
        1e-12 * span,
    );
    let level = 0.5 * (1.0 + model(w_min)?);
    let excess = |w: f64| -> Result<f64> { Ok(model(w)? - level) };

    let right = (imin + 1..n)
        .find(|&i| profile.p0[i] >= level)
        .ok_or(Error::NoCrossing)?;
    let left = (0..imin)
        .rev()
        .find(|&i| profile.p0[i] >= level)
        .ok_or(Error::NoCrossing)?;
    let w_right = bisect(excess, omega[right - 1], omega[right])?;
    let w_left = bisect(excess, omega[left], omega[left + 1])?;
    Ok(w_right - w_left)
}

/// Second derivative of the ground-state probability at resonance (the
/// curvature of the dip, positive), from a five-point stencil with step
/// `1e-3 tau`.
pub fn curvature_on_resonance(seq: &SequenceSpec) -> Result<f64> {
    let h = 1e-3 / seq.base.width;
    let p0 = |d: f64| -> Result<f64> { Ok(sequence_probabilities(&seq.with_detuning(d))?.0) };
    let stencil = -p0(2.0 * h)? + 16.0 * p0(h)? - 30.0 * p0(0.0)? + 16.0 * p0(-h)? - p0(-2.0 * h)?;
    Ok(stencil / (12.0 * h * h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagator::sech;

    #[test]
    fn binary_fisher_basic() {
        assert!((classical_fisher_binary(0.5, 0.1, None).unwrap() - 0.04).abs() < 1e-15);
        assert!((classical_fisher_binary(1.0, 0.0, Some(-4.9)).unwrap() - 9.8).abs() < 1e-15);
        assert!(matches!(
            classical_fisher_binary(1.0, 0.1, Some(1.0)),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            classical_fisher_binary(0.0, 0.0, None),
            Err(Error::Domain(_))
        ));
        assert!(classical_fisher_binary(1.2, 0.0, None).is_err());
    }

    #[test]
    fn closed_form_single_pulse() {
        let on = PulseParams::pi_pulse(1.0, 0.0).unwrap();
        assert!((classical_fisher_single_closed(&on) - PI * PI).abs() < 1e-12);
        let tiny = PulseParams::pi_pulse(1.0, 1e-9).unwrap();
        assert!((classical_fisher_single_closed(&tiny) - PI * PI).abs() < 1e-9);
        let off = PulseParams::pi_pulse(1.0, 1.0).unwrap();
        assert!((classical_fisher_single_closed(&off) - 1.567_604_991_081_987_5).abs() < 1e-12);
        // equals pi^2 tau^2 sech^2(pi tau Delta / 2) for pi-pulses
        let tau = 1.7;
        let p = PulseParams::pi_pulse(tau, 0.4).unwrap();
        let expected = (PI * tau * sech(0.5 * PI * tau * 0.4)).powi(2);
        assert!((classical_fisher_single_closed(&p) - expected).abs() < 1e-12 * expected);
        let undriven = PulseParams::from_detuning(0.0, 1.0, 0.5).unwrap();
        assert_eq!(classical_fisher_single_closed(&undriven), 0.0);
    }

    #[test]
    fn qfi_ignores_global_phase_motion() {
        let s = (C64::new(0.6, 0.0), C64::new(0.0, 0.8));
        let c = 2.3;
        let ds = (s.0 * C64::new(0.0, c), s.1 * C64::new(0.0, c));
        assert!(quantum_fisher_pure(s, ds).unwrap().abs() < 1e-14);
    }

    #[test]
    fn qfi_rejects_unnormalized() {
        let s = (C64::new(0.6, 0.0), C64::new(0.7, 0.0));
        assert!(matches!(
            quantum_fisher_pure(s, s),
            Err(Error::Normalization(_))
        ));
    }

    #[test]
    fn resonance_single_pulse_cfi_equals_qfi() {
        let seq = SequenceSpec::pi_train(0, 0.0, 1.0, 0.0).unwrap();
        let r = fisher_report(&seq, FisherMethod::AnalyticDerivative, 1).unwrap();
        assert!((r.cfi - PI * PI).abs() < 1e-12);
        assert!((r.qfi - PI * PI).abs() < 1e-12);
        assert!((r.crb_variance - 1.0 / (PI * PI)).abs() < 1e-14);
    }

    #[test]
    fn on_resonance_constants() {
        assert!((fisher_on_resonance_composite(1, AnalyticPhase::Pi, 1.0) - PI * PI).abs() < 1e-15);
        assert!(
            (fisher_on_resonance_composite(1, AnalyticPhase::Zero, 1.0) - PI * PI / 9.0).abs()
                < 1e-15
        );
        for phase in [AnalyticPhase::Pi, AnalyticPhase::Zero] {
            assert!((fisher_on_resonance_composite(0, phase, 2.0) - 4.0 * PI * PI).abs() < 1e-14);
        }
    }

    #[test]
    fn crb_examples() {
        assert!((crb_variance(PI * PI, 1).unwrap() - 0.101_321_183_642_337_77).abs() < 1e-15);
        assert!((crb_variance(PI * PI, 100).unwrap() - 1.013_211_836_423_377_7e-3).abs() < 1e-17);
        let f = classical_fisher_single_closed(&PulseParams::pi_pulse(1.0, 1.0).unwrap());
        assert!((crb_variance(f, 1).unwrap() - 0.637_915_805_122_426_3).abs() < 1e-12);
        assert!(crb_variance(0.0, 1).is_err());
        assert!(crb_variance(1.0, 0).is_err());
    }

    #[test]
    fn single_pulse_fwhm() {
        let seq = SequenceSpec::pi_train(0, 0.0, 1.0, 0.0).unwrap();
        let grid: Vec<f64> = (0..121).map(|i| -3.0 + 0.05 * i as f64).collect();
        let profile = ProbabilityProfile::sample(seq, grid).unwrap();
        let w = fwhm(&profile).unwrap();
        let expected = 4.0 * 1f64.asinh() / PI;
        assert!((w - expected).abs() < 1e-8 * expected, "{w} vs {expected}");
    }

    #[test]
    fn fwhm_errors() {
        let seq = SequenceSpec::pi_train(0, 0.0, 1.0, 0.0).unwrap();
        let narrow: Vec<f64> = (0..11).map(|i| -0.2 + 0.04 * i as f64).collect();
        let p = ProbabilityProfile::sample(seq, narrow).unwrap();
        assert_eq!(fwhm(&p), Err(Error::NoCrossing));
        let one_sided: Vec<f64> = (0..11).map(|i| 0.5 + 0.1 * i as f64).collect();
        let p = ProbabilityProfile::sample(seq, one_sided).unwrap();
        assert_eq!(fwhm(&p), Err(Error::NoMinimum));
        assert!(ProbabilityProfile::sample(seq, vec![]).is_err());
        assert!(ProbabilityProfile::sample(seq, vec![0.0, 0.0, 1.0]).is_err());
    }

    #[test]
    fn curvature_single_pulse() {
        let seq = SequenceSpec::pi_train(0, PI, 1.0, 0.0).unwrap();
        let c = curvature_on_resonance(&seq).unwrap();
        assert!((c - PI * PI / 2.0).abs() < 1e-4 * PI * PI / 2.0);
    }
}
