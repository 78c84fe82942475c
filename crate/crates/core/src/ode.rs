//! Numerical integration of the rotating-frame two-level equation
//! `i d/dt psi = -(Delta sigma_z + Omega(t) sigma_x) psi / 2`.
//!
//! Used as an independent check of the Gamma-function propagator. The
//! equation is integrated in the interaction picture of the detuning term
//! over a symmetric window `[-T, T]` with an adaptive Dormand–Prince 5(4)
//! pair. Both columns of the propagator are carried.
//!
//! The Gamma-function propagator corresponds to the complex conjugate of
//! this evolution (opposite sign convention for the detuning) with `b`
//! rotated by a constant phase; [`to_cayley_klein_frame`] applies that map.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

use crate::composite::SequenceSpec;
use crate::error::{Error, Result};
use crate::propagator::{sech, PulseParams, Su2Propagator};

/// Largest envelope value allowed at the window edges.
pub const TRUNCATION_LIMIT: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrationConfig {
    /// Half width of the integration window in units of the pulse width.
    pub window_half_width: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
}

impl Default for IntegrationConfig {
    fn default() -> Self {
        IntegrationConfig {
            window_half_width: 25.0,
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_steps: 1_000_000,
        }
    }
}

impl IntegrationConfig {
    /// Tighter tolerances for finite differences of integrated
    /// probabilities.
    pub fn precise() -> Self {
        IntegrationConfig {
            rel_tol: 1e-13,
            abs_tol: 1e-15,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::InvalidConfig(
                "integration tolerances must be positive".into(),
            ));
        }
        if self.max_steps == 0 {
            return Err(Error::InvalidConfig("max_steps must be positive".into()));
        }
        let tail = sech(self.window_half_width);
        if !(tail <= TRUNCATION_LIMIT) {
            return Err(Error::Truncation {
                half_width: self.window_half_width,
                tail,
            });
        }
        Ok(())
    }
}

/// Raw interaction-picture propagator as a full matrix, before any
/// renormalization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawPropagator {
    pub matrix: [[C64; 2]; 2],
    pub steps: usize,
}

impl RawPropagator {
    /// Largest deviation of `U^dag U` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        let m = &self.matrix;
        let n0 = m[0][0].norm_sqr() + m[1][0].norm_sqr();
        let n1 = m[0][1].norm_sqr() + m[1][1].norm_sqr();
        let overlap = m[0][0].conj() * m[0][1] + m[1][0].conj() * m[1][1];
        (n0 - 1.0).abs().max((n1 - 1.0).abs()).max(overlap.norm())
    }

    /// Gram–Schmidt on the columns, then projection onto the
    /// `[[a, -b*], [b, a*]]` form.
    pub fn unitarized(&self) -> Su2Propagator {
        let m = &self.matrix;
        let mut c0 = [m[0][0], m[1][0]];
        let mut c1 = [m[0][1], m[1][1]];
        let n0 = (c0[0].norm_sqr() + c0[1].norm_sqr()).sqrt();
        c0 = [c0[0] / n0, c0[1] / n0];
        let proj = c0[0].conj() * c1[0] + c0[1].conj() * c1[1];
        c1 = [c1[0] - proj * c0[0], c1[1] - proj * c0[1]];
        let n1 = (c1[0].norm_sqr() + c1[1].norm_sqr()).sqrt();
        c1 = [c1[0] / n1, c1[1] / n1];
        let a = 0.5 * (c0[0] + c1[1].conj());
        let b = 0.5 * (c0[1] - c1[0].conj());
        let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
        Su2Propagator::new(a / norm, b / norm)
    }
}

/// `dU/dt = -i H_I(t) U` with
/// `H_I[0][1] = -Omega(t)/2 exp(-i (Delta t + phase))`.
struct InteractionRhs {
    amplitude: f64,
    width: f64,
    detuning: f64,
    phase: f64,
}

type State = [C64; 4];

impl InteractionRhs {
    fn eval(&self, t: f64, y: &State) -> State {
        let omega = self.amplitude * sech(t / self.width);
        // -i * H_I[0][1] and -i * H_I[1][0]
        let up =
            C64::new(0.0, 0.5 * omega) * C64::from_polar(1.0, -(self.detuning * t + self.phase));
        let down =
            C64::new(0.0, 0.5 * omega) * C64::from_polar(1.0, self.detuning * t + self.phase);
        // y = [U00, U10, U01, U11]
        [up * y[1], down * y[0], up * y[3], down * y[2]]
    }
}

// Dormand–Prince 5(4) tableau
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth-order minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy(y: &State, terms: &[(f64, &State)], h: f64) -> State {
    let mut out = *y;
    for (coef, k) in terms {
        for i in 0..4 {
            out[i] += k[i] * (h * coef);
        }
    }
    out
}

fn dormand_prince(
    rhs: &InteractionRhs,
    t0: f64,
    t1: f64,
    y0: State,
    cfg: &IntegrationConfig,
) -> Result<(State, usize)> {
    let span = t1 - t0;
    let h_max = span / 20.0;
    let mut h = 1e-3 * rhs.width;
    let mut t = t0;
    let mut y = y0;
    let mut k1 = rhs.eval(t, &y);
    let mut steps = 0usize;
    while t < t1 {
        if steps >= cfg.max_steps {
            return Err(Error::Convergence {
                max_steps: cfg.max_steps,
            });
        }
        steps += 1;
        let last = t + h >= t1;
        if last {
            h = t1 - t;
        }
        let k2 = rhs.eval(t + C2 * h, &axpy(&y, &[(A21, &k1)], h));
        let k3 = rhs.eval(t + C3 * h, &axpy(&y, &[(A31, &k1), (A32, &k2)], h));
        let k4 = rhs.eval(
            t + C4 * h,
            &axpy(&y, &[(A41, &k1), (A42, &k2), (A43, &k3)], h),
        );
        let k5 = rhs.eval(
            t + C5 * h,
            &axpy(&y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], h),
        );
        let k6 = rhs.eval(
            t + h,
            &axpy(
                &y,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
                h,
            ),
        );
        let y_new = axpy(
            &y,
            &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
            h,
        );
        let k7 = rhs.eval(t + h, &y_new);

        let mut err_sq = 0.0;
        for i in 0..4 {
            let e =
                (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * h;
            let scale = cfg.abs_tol + cfg.rel_tol * y[i].norm().max(y_new[i].norm());
            err_sq += (e.re / scale).powi(2) + (e.im / scale).powi(2);
        }
        let err = (err_sq / 8.0).sqrt();

        if err <= 1.0 {
            t = if last { t1 } else { t + h };
            y = y_new;
            k1 = k7;
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h = (h * factor).min(h_max);
    }
    Ok((y, steps))
}

/// Interaction-picture propagator of a single pulse over
/// `[-T, T]`, `T = window_half_width * tau`, without renormalization.
pub fn integrate_pulse_raw(p: &PulseParams, cfg: &IntegrationConfig) -> Result<RawPropagator> {
    p.validate()?;
    cfg.validate()?;
    let rhs = InteractionRhs {
        amplitude: p.amplitude,
        width: p.width,
        detuning: p.detuning(),
        phase: p.carrier_phase,
    };
    let half = cfg.window_half_width * p.width;
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let (y, steps) = dormand_prince(&rhs, -half, half, [one, zero, zero, one], cfg)?;
    Ok(RawPropagator {
        matrix: [[y[0], y[2]], [y[1], y[3]]],
        steps,
    })
}

/// Map an interaction-picture propagator into the frame of
/// [`crate::cayley_klein`]: complex conjugation and `b -> i b`.
pub fn to_cayley_klein_frame(u: &Su2Propagator) -> Su2Propagator {
    Su2Propagator::new(u.a.conj(), u.b.conj()).phase_shifted(-FRAC_PI_2)
}

/// Single-pulse propagator from direct integration, in the Cayley–Klein
/// frame.
pub fn integrate_pulse(p: &PulseParams, cfg: &IntegrationConfig) -> Result<Su2Propagator> {
    let raw = integrate_pulse_raw(p, cfg)?;
    let defect = raw.unitarity_defect();
    let u = raw.unitarized();
    if !(u.unitarity_defect() <= 10.0 * cfg.rel_tol) {
        return Err(Error::Numerical(format!(
            "unitarized propagator still has defect {defect:e}"
        )));
    }
    Ok(to_cayley_klein_frame(&u))
}

/// Integrates the `2N+1` rescaled pulses one after another, every second
/// pulse carrying the sequence phase, and multiplies the results.
pub fn integrate_sequence(seq: &SequenceSpec, cfg: &IntegrationConfig) -> Result<Su2Propagator> {
    let pulse = seq.pulse();
    let plain = integrate_pulse(&pulse, cfg)?;
    let shifted = if seq.half_count > 0 {
        integrate_pulse(
            &pulse.with_carrier_phase(pulse.carrier_phase + seq.phase),
            cfg,
        )?
    } else {
        plain
    };
    let mut total = plain;
    for _ in 0..seq.half_count {
        total = total.compose(&shifted).compose(&plain);
    }
    Ok(total)
}
