//! Exact single-pulse propagator for the hyperbolic-secant drive.
//!
//! The propagator of a sech pulse with constant detuning is written through
//! Gamma functions of the parameters `lambda = tau*Omega0/2`,
//! `mu = -lambda` and `nu = (1 - i tau Delta)/2`. All Gamma factors that sit
//! in a denominator go through [`reciprocal_gamma`], so the resonant
//! odd-area case (a pole of those factors) is an ordinary point.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::special::{
    complex_digamma, complex_gamma, reciprocal_gamma, reciprocal_gamma_derivative,
};

/// Physical parameters of one sech pulse.
///
/// Angular frequencies throughout; `width` is the time unit of the problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseParams {
    /// Peak Rabi frequency `Omega0`.
    pub amplitude: f64,
    /// Characteristic time `tau` of the sech envelope.
    pub width: f64,
    /// Drive frequency `omega`.
    pub drive: f64,
    /// Atomic resonance frequency `omega0`.
    pub resonance: f64,
    /// Carrier phase, applied as a z-rotation conjugation of the propagator.
    #[serde(default)]
    pub carrier_phase: f64,
}

impl PulseParams {
    pub fn new(amplitude: f64, width: f64, drive: f64, resonance: f64) -> Result<Self> {
        let p = PulseParams {
            amplitude,
            width,
            drive,
            resonance,
            carrier_phase: 0.0,
        };
        p.validate()?;
        Ok(p)
    }

    /// Pulse with resonance at zero, so that `drive` is the detuning.
    pub fn from_detuning(amplitude: f64, width: f64, detuning: f64) -> Result<Self> {
        Self::new(amplitude, width, detuning, 0.0)
    }

    /// A pulse of unit area (`tau * Omega0 = 1`, full inversion on
    /// resonance).
    pub fn pi_pulse(width: f64, detuning: f64) -> Result<Self> {
        Self::from_detuning(1.0 / width, width, detuning)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width > 0.0 && self.width.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "pulse width must be positive, got {}",
                self.width
            )));
        }
        if !(self.amplitude >= 0.0 && self.amplitude.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "pulse amplitude must be non-negative, got {}",
                self.amplitude
            )));
        }
        if !(self.drive.is_finite() && self.resonance.is_finite() && self.carrier_phase.is_finite())
        {
            return Err(Error::InvalidConfig("non-finite frequency or phase".into()));
        }
        Ok(())
    }

    pub fn detuning(&self) -> f64 {
        self.drive - self.resonance
    }

    /// Pulse area `tau * Omega0`.
    pub fn area(&self) -> f64 {
        self.width * self.amplitude
    }

    pub fn with_detuning(mut self, detuning: f64) -> Self {
        self.drive = self.resonance + detuning;
        self
    }

    pub fn with_carrier_phase(mut self, phase: f64) -> Self {
        self.carrier_phase = phase;
        self
    }
}

/// A 2x2 complex matrix of the Cayley–Klein form `[[a, -b*], [b, a*]]`.
///
/// Unitary propagators have `|a|^2 + |b|^2 = 1`. Derivatives of such
/// propagators with respect to a real parameter share the same form, so
/// this type also carries those.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Su2Propagator {
    pub a: C64,
    pub b: C64,
}

impl Su2Propagator {
    pub fn new(a: C64, b: C64) -> Self {
        Su2Propagator { a, b }
    }

    pub fn identity() -> Self {
        Su2Propagator::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0))
    }

    pub fn zero() -> Self {
        Su2Propagator::new(C64::new(0.0, 0.0), C64::new(0.0, 0.0))
    }

    /// Diagonal `exp(i alpha sigma_z)`.
    pub fn z_rotation(alpha: f64) -> Self {
        Su2Propagator::new(C64::from_polar(1.0, alpha), C64::new(0.0, 0.0))
    }

    /// Matrix product `self * rhs`; `rhs` acts first.
    pub fn compose(&self, rhs: &Su2Propagator) -> Su2Propagator {
        Su2Propagator {
            a: self.a * rhs.a - self.b.conj() * rhs.b,
            b: self.b * rhs.a + self.a.conj() * rhs.b,
        }
    }

    /// `exp(i phi sigma_z / 2) U exp(-i phi sigma_z / 2)`.
    pub fn phase_shifted(&self, phi: f64) -> Su2Propagator {
        if phi == 0.0 {
            return *self;
        }
        Su2Propagator {
            a: self.a,
            b: self.b * C64::from_polar(1.0, -phi),
        }
    }

    pub fn adjoint(&self) -> Su2Propagator {
        Su2Propagator {
            a: self.a.conj(),
            b: -self.b,
        }
    }

    pub fn matrix(&self) -> [[C64; 2]; 2] {
        [[self.a, -self.b.conj()], [self.b, self.a.conj()]]
    }

    pub fn scale(&self, s: f64) -> Su2Propagator {
        Su2Propagator::new(self.a * s, self.b * s)
    }

    /// `| |a|^2 + |b|^2 - 1 |`
    pub fn unitarity_defect(&self) -> f64 {
        (self.a.norm_sqr() + self.b.norm_sqr() - 1.0).abs()
    }

    /// Ground-state population after acting on `|0>`.
    pub fn ground_probability(&self) -> f64 {
        self.a.norm_sqr()
    }

    pub fn excited_probability(&self) -> f64 {
        self.b.norm_sqr()
    }

    pub fn max_elementwise_diff(&self, other: &Su2Propagator) -> f64 {
        (self.a - other.a).norm().max((self.b - other.b).norm())
    }
}

impl Mul for Su2Propagator {
    type Output = Su2Propagator;
    fn mul(self, rhs: Su2Propagator) -> Su2Propagator {
        self.compose(&rhs)
    }
}

impl Add for Su2Propagator {
    type Output = Su2Propagator;
    fn add(self, rhs: Su2Propagator) -> Su2Propagator {
        Su2Propagator::new(self.a + rhs.a, self.b + rhs.b)
    }
}

impl Sub for Su2Propagator {
    type Output = Su2Propagator;
    fn sub(self, rhs: Su2Propagator) -> Su2Propagator {
        Su2Propagator::new(self.a - rhs.a, self.b - rhs.b)
    }
}

impl Neg for Su2Propagator {
    type Output = Su2Propagator;
    fn neg(self) -> Su2Propagator {
        Su2Propagator::new(-self.a, -self.b)
    }
}

/// A propagator together with its derivative with respect to the detuning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorJet {
    pub value: Su2Propagator,
    pub derivative: Su2Propagator,
}

impl PropagatorJet {
    pub fn identity() -> Self {
        PropagatorJet {
            value: Su2Propagator::identity(),
            derivative: Su2Propagator::zero(),
        }
    }

    /// Product rule for `self * rhs`.
    pub fn compose(&self, rhs: &PropagatorJet) -> PropagatorJet {
        PropagatorJet {
            value: self.value.compose(&rhs.value),
            derivative: self.derivative.compose(&rhs.value) + self.value.compose(&rhs.derivative),
        }
    }

    pub fn phase_shifted(&self, phi: f64) -> PropagatorJet {
        PropagatorJet {
            value: self.value.phase_shifted(phi),
            derivative: self.derivative.phase_shifted(phi),
        }
    }
}

/// Dimensionless Rosen–Zener parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RosenZenerParams {
    pub lambda: f64,
    pub mu: f64,
    pub nu: C64,
}

impl RosenZenerParams {
    pub fn from_pulse(p: &PulseParams) -> Self {
        let lambda = 0.5 * p.width * p.amplitude;
        RosenZenerParams {
            lambda,
            mu: -lambda,
            nu: C64::new(0.5, -0.5 * p.width * p.detuning()),
        }
    }
}

/// Gamma-function pieces shared by the propagator and its derivative.
struct GammaFactors {
    rz: RosenZenerParams,
    gamma_nu: C64,
    gamma_nu_lm: C64,
    rgamma_nu_l: C64,
    rgamma_nu_m: C64,
    b_prefactor: C64,
}

impl GammaFactors {
    fn new(p: &PulseParams) -> Result<Self> {
        let rz = RosenZenerParams::from_pulse(p);
        let RosenZenerParams { lambda, mu, nu } = rz;
        let gamma_nu = complex_gamma(nu)?;
        let gamma_nu_lm = complex_gamma(nu - lambda - mu)?;
        let one = C64::new(1.0, 0.0);
        let b_prefactor = (-lambda * mu).sqrt() / (one - nu)
            * complex_gamma(2.0 - nu)?
            * gamma_nu_lm
            * reciprocal_gamma(one - lambda)
            * reciprocal_gamma(one - mu);
        Ok(GammaFactors {
            rz,
            gamma_nu,
            gamma_nu_lm,
            rgamma_nu_l: reciprocal_gamma(nu - lambda),
            rgamma_nu_m: reciprocal_gamma(nu - mu),
            b_prefactor,
        })
    }

    fn propagator(&self) -> Su2Propagator {
        Su2Propagator {
            a: self.gamma_nu * self.gamma_nu_lm * self.rgamma_nu_l * self.rgamma_nu_m,
            b: self.b_prefactor,
        }
    }

    fn derivative(&self, width: f64) -> Result<Su2Propagator> {
        let RosenZenerParams { lambda, mu, nu } = self.rz;
        let dnu = C64::new(0.0, -0.5 * width);
        let psi_nu = complex_digamma(nu)?;
        let psi_nu_lm = complex_digamma(nu - lambda - mu)?;
        let da = dnu
            * self.gamma_nu
            * self.gamma_nu_lm
            * ((psi_nu + psi_nu_lm) * self.rgamma_nu_l * self.rgamma_nu_m
                + reciprocal_gamma_derivative(nu - lambda) * self.rgamma_nu_m
                + self.rgamma_nu_l * reciprocal_gamma_derivative(nu - mu));
        let one = C64::new(1.0, 0.0);
        let db =
            self.b_prefactor * dnu * (one / (one - nu) - complex_digamma(2.0 - nu)? + psi_nu_lm);
        Ok(Su2Propagator::new(da, db))
    }
}

/// Unitarity defects above this are reported as numerical failures.
const UNITARITY_LIMIT: f64 = 1e-8;

/// Cayley–Klein pair `(a, b)` of the single-pulse propagator.
///
/// `a = G(nu) G(nu-lambda-mu) / (G(nu-lambda) G(nu-mu))` and
/// `b = sqrt(-lambda mu)/(1-nu) * G(2-nu) G(nu-lambda-mu) / (G(1-lambda) G(1-mu))`.
/// `b` is real for a carrier phase of zero and `b = 1` for a resonant
/// pi-pulse.
pub fn cayley_klein(p: &PulseParams) -> Result<Su2Propagator> {
    p.validate()?;
    let u = GammaFactors::new(p)?.propagator();
    let defect = u.unitarity_defect();
    if !(defect <= UNITARITY_LIMIT) {
        return Err(Error::Numerical(format!(
            "propagator unitarity defect {defect:e} at area {} and tau*detuning {}",
            p.area(),
            p.width * p.detuning()
        )));
    }
    Ok(u.phase_shifted(p.carrier_phase))
}

/// Propagator and its analytic detuning derivative.
pub fn cayley_klein_jet(p: &PulseParams) -> Result<PropagatorJet> {
    p.validate()?;
    let factors = GammaFactors::new(p)?;
    let value = factors.propagator();
    let defect = value.unitarity_defect();
    if !(defect <= UNITARITY_LIMIT) {
        return Err(Error::Numerical(format!(
            "propagator unitarity defect {defect:e}"
        )));
    }
    let jet = PropagatorJet {
        value,
        derivative: factors.derivative(p.width)?,
    };
    Ok(jet.phase_shifted(p.carrier_phase))
}

/// Closed-form `(P0, P1)` after a single pulse starting in the ground state.
pub fn transition_probabilities(p: &PulseParams) -> (f64, f64) {
    let excited =
        sech(0.5 * PI * p.width * p.detuning()).powi(2) * (0.5 * PI * p.area()).sin().powi(2);
    (1.0 - excited, excited)
}

pub(crate) fn sech(x: f64) -> f64 {
    1.0 / x.cosh()
}

/// Central difference with one level of Richardson extrapolation.
pub fn richardson_derivative<F>(f: F, x: f64, h: f64) -> Result<Su2Propagator>
where
    F: Fn(f64) -> Result<Su2Propagator>,
{
    let central = |step: f64| -> Result<Su2Propagator> {
        Ok((f(x + step)? - f(x - step)?).scale(0.5 / step))
    };
    let coarse = central(h)?;
    let fine = central(0.5 * h)?;
    Ok((fine.scale(4.0) - coarse).scale(1.0 / 3.0))
}

/// Finite-difference detuning derivative of [`cayley_klein`] with step
/// `1e-5 * tau`.
pub fn finite_difference_detuning_derivative(p: &PulseParams) -> Result<Su2Propagator> {
    let h = 1e-5 * p.width;
    richardson_derivative(|d| cayley_klein(&p.with_detuning(d)), p.detuning(), h)
}

/// Analytic `(da/dDelta, db/dDelta)`, cross-checked against finite
/// differences.
pub fn propagator_detuning_derivative(p: &PulseParams) -> Result<(C64, C64)> {
    let analytic = cayley_klein_jet(p)?.derivative;
    let numeric = finite_difference_detuning_derivative(p)?;
    let scale = analytic.a.norm().max(analytic.b.norm()) + p.width;
    let diff = analytic.max_elementwise_diff(&numeric);
    if diff > 1e-5 * scale {
        return Err(Error::Numerical(format!(
            "analytic and finite-difference detuning derivatives differ by {diff:e}"
        )));
    }
    Ok((analytic.a, analytic.b))
}
