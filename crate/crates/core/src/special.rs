//! Complex Gamma, reciprocal Gamma and digamma, plus the four Chebyshev
//! polynomial families evaluated through their trigonometric forms.

use num_complex::Complex64 as C64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];
const SQRT_TWO_PI: f64 = 2.506_628_274_631_000_5;

/// Arguments of `acos` may overshoot `[-1, 1]` by this much before being
/// rejected.
pub const CLAMP_TOL: f64 = 1e-12;

fn is_pole(z: C64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

fn parity_sign(n: f64) -> f64 {
    if n.rem_euclid(2.0) == 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// `sin(pi z)` with the integer part of `re(z)` removed exactly, so that the
/// result vanishes identically at the integers.
pub fn sin_pi(z: C64) -> C64 {
    let n = z.re.round();
    let r = z.re - n;
    C64::new(PI * r, PI * z.im).sin() * parity_sign(n)
}

pub fn cos_pi(z: C64) -> C64 {
    let n = z.re.round();
    let r = z.re - n;
    C64::new(PI * r, PI * z.im).cos() * parity_sign(n)
}

/// Lanczos series split into `exp(log_factor) * sum` for `re(z) >= 0.5`.
fn lanczos_parts(z: C64) -> (C64, C64) {
    let x = z - 1.0;
    let mut sum = C64::new(LANCZOS_COEF[0], 0.0);
    for (i, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        sum += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    let log_factor = (x + 0.5) * t.ln() - t;
    (log_factor, sum * SQRT_TWO_PI)
}

fn gamma_right(z: C64) -> C64 {
    let (log_factor, sum) = lanczos_parts(z);
    log_factor.exp() * sum
}

fn rgamma_right(z: C64) -> C64 {
    let (log_factor, sum) = lanczos_parts(z);
    (-log_factor).exp() / sum
}

/// Complex Gamma function.
///
/// Lanczos (g = 7, nine coefficients) for `re(z) >= 0.5`, reflection below.
pub fn complex_gamma(z: C64) -> Result<C64> {
    if is_pole(z) {
        return Err(Error::Pole(z.re));
    }
    if z.re < 0.5 {
        Ok(PI / (sin_pi(z) * gamma_right(1.0 - z)))
    } else {
        Ok(gamma_right(z))
    }
}

/// `1/Gamma(z)`, an entire function. Exactly zero at the non-positive
/// integers.
pub fn reciprocal_gamma(z: C64) -> C64 {
    if is_pole(z) {
        return C64::new(0.0, 0.0);
    }
    if z.re < 0.5 {
        sin_pi(z) * gamma_right(1.0 - z) / PI
    } else {
        rgamma_right(z)
    }
}

/// Derivative of `1/Gamma(z)`; equals `(-1)^n n!` at `z = -n`.
pub fn reciprocal_gamma_derivative(z: C64) -> C64 {
    if z.re < 0.5 {
        let w = 1.0 - z;
        gamma_right(w) / PI * (PI * cos_pi(z) - sin_pi(z) * digamma_right(w))
    } else {
        -digamma_right(z) * rgamma_right(z)
    }
}

// B_{2k} / (2k), k = 1..7
const DIGAMMA_ASYMPTOTIC: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
];

fn digamma_right(mut z: C64) -> C64 {
    let mut shift = C64::new(0.0, 0.0);
    while z.re < 10.0 {
        shift -= 1.0 / z;
        z += 1.0;
    }
    let inv2 = 1.0 / (z * z);
    let mut series = C64::new(0.0, 0.0);
    let mut pow = inv2;
    for &c in DIGAMMA_ASYMPTOTIC.iter() {
        series += c * pow;
        pow *= inv2;
    }
    shift + z.ln() - 0.5 / z - series
}

/// Complex digamma `psi(z) = Gamma'(z)/Gamma(z)`.
pub fn complex_digamma(z: C64) -> Result<C64> {
    if is_pole(z) {
        return Err(Error::Pole(z.re));
    }
    if z.re < 0.5 {
        Ok(digamma_right(1.0 - z) - PI * cos_pi(z) / sin_pi(z))
    } else {
        Ok(digamma_right(z))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChebyshevKind {
    /// `T_n(cos t) = cos(n t)`
    First,
    /// `U_n(cos t) = sin((n+1) t) / sin t`
    Second,
    /// `V_n(cos t) = cos((n+1/2) t) / cos(t/2)`
    Third,
    /// `W_n(cos t) = sin((n+1/2) t) / sin(t/2)`
    Fourth,
}

/// Below this distance from a removable singularity the quotient is
/// replaced by its series.
const SERIES_CUTOFF: f64 = 1e-6;

/// `sin(k x) / sin(x)` for `|x|` small.
fn sine_ratio_series(k: f64, x: f64) -> f64 {
    k * (1.0 - (k * k - 1.0) * x * x / 6.0)
}

fn sine_ratio(k: f64, x: f64) -> f64 {
    if x.abs() < SERIES_CUTOFF {
        sine_ratio_series(k, x)
    } else {
        (k * x).sin() / x.sin()
    }
}

/// Chebyshev polynomial of the given kind at `x = cos(theta)`, with
/// `theta` in `[0, pi]`.
///
/// Taking the angle directly avoids the loss of precision in `acos` near
/// `x = +-1` when the caller already knows the half angle.
pub fn chebyshev_angle(kind: ChebyshevKind, n: usize, theta: f64) -> f64 {
    let nf = n as f64;
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let eps = PI - theta;
    match kind {
        ChebyshevKind::First => (nf * theta).cos(),
        ChebyshevKind::Second => {
            if eps < SERIES_CUTOFF {
                sign * sine_ratio_series(nf + 1.0, eps)
            } else {
                sine_ratio(nf + 1.0, theta)
            }
        }
        ChebyshevKind::Third => {
            if eps < SERIES_CUTOFF {
                sign * sine_ratio_series(2.0 * nf + 1.0, 0.5 * eps)
            } else {
                ((nf + 0.5) * theta).cos() / (0.5 * theta).cos()
            }
        }
        ChebyshevKind::Fourth => sine_ratio(2.0 * nf + 1.0, 0.5 * theta),
    }
}

/// Chebyshev polynomial of the given kind, evaluated through
/// `theta = acos(x)`.
pub fn chebyshev(kind: ChebyshevKind, n: usize, x: f64) -> Result<f64> {
    if !(x.abs() <= 1.0 + CLAMP_TOL) {
        return Err(Error::Domain(format!(
            "chebyshev argument {x} outside [-1, 1]"
        )));
    }
    Ok(chebyshev_angle(kind, n, x.clamp(-1.0, 1.0).acos()))
}
