use num_complex::Complex64 as C64;
use proptest::prelude::*;
use resmetro::special::{
    chebyshev, chebyshev_angle, complex_digamma, complex_gamma, reciprocal_gamma,
    reciprocal_gamma_derivative, ChebyshevKind,
};
use resmetro::Error;
use std::f64::consts::PI;

const KINDS: [ChebyshevKind; 4] = [
    ChebyshevKind::First,
    ChebyshevKind::Second,
    ChebyshevKind::Third,
    ChebyshevKind::Fourth,
];

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm()
}

/// Gamma by shifting the argument up `k` steps and using the Stirling
/// series there, then dividing out the rising factorial.
fn gamma_stirling_shift(z: C64, k: usize) -> C64 {
    let w = z + k as f64;
    let inv = w.inv();
    let inv2 = inv * inv;
    let series = inv
        * (1.0 / 12.0
            - inv2
                * (1.0 / 360.0
                    - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 * (1.0 / 1188.0)))));
    let ln_gamma_w = (w - 0.5) * w.ln() - w + 0.5 * (2.0 * PI).ln() + series;
    let ln_rising: C64 = (0..k).map(|j| (z + j as f64).ln()).sum();
    (ln_gamma_w - ln_rising).exp()
}

#[test]
fn gamma_matches_stirling_shift_oracle() {
    for &(re, im) in &[
        (0.5, 0.5),
        (0.5, -3.0),
        (1.3, 7.0),
        (2.7, -0.2),
        (0.9, 12.0),
    ] {
        let z = C64::new(re, im);
        let ours = complex_gamma(z).unwrap();
        let oracle = gamma_stirling_shift(z, 50);
        assert!(rel(ours, oracle) < 1e-12, "z = {z}: {ours} vs {oracle}");
    }
}

#[test]
fn gamma_frozen_reference() {
    let g = complex_gamma(C64::new(0.5, 0.5)).unwrap();
    let expected = C64::new(0.818_163_999_541_747_4, -0.763_313_828_713_982_6);
    assert!(rel(g, expected) < 1e-13, "{g}");
}

#[test]
fn gamma_real_values() {
    assert!((complex_gamma(C64::new(0.5, 0.0)).unwrap().re - PI.sqrt()).abs() < 1e-14);
    assert!((complex_gamma(C64::new(5.0, 0.0)).unwrap().re - 24.0).abs() < 1e-12);
    let g = complex_gamma(C64::new(-0.5, 0.0)).unwrap();
    assert!((g.re + 2.0 * PI.sqrt()).abs() < 1e-13 && g.im.abs() < 1e-15);
}

#[test]
fn gamma_poles() {
    for n in 0..6 {
        assert!(matches!(
            complex_gamma(C64::new(-(n as f64), 0.0)),
            Err(Error::Pole(_))
        ));
        assert_eq!(
            reciprocal_gamma(C64::new(-(n as f64), 0.0)),
            C64::new(0.0, 0.0)
        );
    }
}

#[test]
fn digamma_frozen_reference() {
    let psi = complex_digamma(C64::new(0.5, 1.0)).unwrap();
    let expected = C64::new(-0.051_761_650_994_412_54, 1.564_940_517_815_879_3);
    assert!((psi - expected).norm() < 1e-13, "{psi}");
    let euler = 0.577_215_664_901_532_9;
    assert!((complex_digamma(C64::new(1.0, 0.0)).unwrap().re + euler).abs() < 1e-14);
    let half = complex_digamma(C64::new(0.5, 0.0)).unwrap();
    assert!((half.re + 1.963_510_026_021_423_5).abs() < 1e-14);
}

#[test]
fn digamma_matches_finite_difference_of_gamma() {
    for &(re, im) in &[(0.5, 1.0), (2.2, -0.7), (-1.3, 0.4), (0.1, 5.0), (4.0, 2.0)] {
        let z = C64::new(re, im);
        let central = |h: f64| {
            (complex_gamma(z + h).unwrap() - complex_gamma(z - h).unwrap())
                / (2.0 * h)
                / complex_gamma(z).unwrap()
        };
        let h = 1e-3;
        let fd = (central(0.5 * h) * 4.0 - central(h)) / 3.0;
        let psi = complex_digamma(z).unwrap();
        assert!(
            (psi - fd).norm() < 1e-8 * (1.0 + psi.norm()),
            "z = {z}: {psi} vs {fd}"
        );
    }
}

#[test]
fn digamma_poles() {
    assert!(matches!(
        complex_digamma(C64::new(-2.0, 0.0)),
        Err(Error::Pole(_))
    ));
}

#[test]
fn reciprocal_gamma_derivative_matches_difference() {
    for &(re, im) in &[(-2.0, 0.0), (-0.4, 0.3), (0.7, -1.2), (3.0, 2.5)] {
        let z = C64::new(re, im);
        let h = 1e-4;
        let fd = (reciprocal_gamma(z + h) - reciprocal_gamma(z - h)) / (2.0 * h);
        let d = reciprocal_gamma_derivative(z);
        assert!(
            (d - fd).norm() < 1e-7 * (1.0 + d.norm()),
            "z = {z}: {d} vs {fd}"
        );
    }
}

fn away_from_poles(z: C64) -> bool {
    z.re > 0.0 || z.im.abs() > 0.05 || (z.re - z.re.round()).abs() > 0.05
}

proptest! {
    #[test]
    fn gamma_recurrence(re in -4.5f64..6.0, im in -5.0f64..5.0) {
        let z = C64::new(re, im);
        prop_assume!(away_from_poles(z) && away_from_poles(z + 1.0));
        let lhs = complex_gamma(z + 1.0).unwrap();
        let rhs = z * complex_gamma(z).unwrap();
        prop_assert!(rel(lhs, rhs) < 1e-12, "z = {}: {} vs {}", z, lhs, rhs);
    }

    #[test]
    fn gamma_reflection(re in -3.0f64..3.0, im in -3.0f64..3.0) {
        let z = C64::new(re, im);
        prop_assume!(away_from_poles(z) && away_from_poles(C64::new(1.0, 0.0) - z));
        let lhs = complex_gamma(z).unwrap() * complex_gamma(1.0 - z).unwrap();
        let rhs = PI / (z * PI).sin();
        prop_assert!(rel(lhs, rhs) < 1e-11);
    }

    #[test]
    fn gamma_conjugate_symmetry(re in -3.0f64..6.0, im in -8.0f64..8.0) {
        let z = C64::new(re, im);
        prop_assume!(away_from_poles(z));
        let g = complex_gamma(z).unwrap();
        prop_assert!(rel(complex_gamma(z.conj()).unwrap(), g.conj()) < 1e-14);
    }

    #[test]
    fn gamma_half_line_modulus(y in -10.0f64..10.0) {
        let g = complex_gamma(C64::new(0.5, y)).unwrap();
        let expected = PI / (PI * y).cosh();
        prop_assert!((g.norm_sqr() - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn digamma_recurrence(re in -4.5f64..6.0, im in -5.0f64..5.0) {
        let z = C64::new(re, im);
        prop_assume!(away_from_poles(z) && away_from_poles(z + 1.0));
        let lhs = complex_digamma(z + 1.0).unwrap();
        let rhs = complex_digamma(z).unwrap() + z.inv();
        prop_assert!((lhs - rhs).norm() < 1e-11 * (1.0 + lhs.norm()));
    }

    #[test]
    fn reciprocal_gamma_inverts_gamma(re in -4.5f64..6.0, im in -5.0f64..5.0) {
        let z = C64::new(re, im);
        prop_assume!(away_from_poles(z));
        let prod = reciprocal_gamma(z) * complex_gamma(z).unwrap();
        prop_assert!((prod - 1.0).norm() < 1e-12);
    }

    #[test]
    fn chebyshev_third_times_fourth_is_second(n in 0usize..40, x in -1.0f64..1.0) {
        let v = chebyshev(ChebyshevKind::Third, n, x).unwrap();
        let w = chebyshev(ChebyshevKind::Fourth, n, x).unwrap();
        let u = chebyshev(ChebyshevKind::Second, 2 * n, x).unwrap();
        prop_assert!((v * w - u).abs() < 1e-9 * (1.0 + u.abs()));
    }
}

fn recurrence(kind: ChebyshevKind, n: usize, x: f64) -> f64 {
    let first = match kind {
        ChebyshevKind::First => x,
        ChebyshevKind::Second => 2.0 * x,
        ChebyshevKind::Third => 2.0 * x - 1.0,
        ChebyshevKind::Fourth => 2.0 * x + 1.0,
    };
    let (mut prev, mut cur) = (1.0, first);
    if n == 0 {
        return prev;
    }
    for _ in 1..n {
        let next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

#[test]
fn chebyshev_recurrence_agrees_with_trigonometric_form() {
    for kind in KINDS {
        for n in 0..=50 {
            for i in 0..=200 {
                let x = -1.0 + 2.0 * i as f64 / 200.0;
                let direct = recurrence(kind, n, x);
                let trig = chebyshev(kind, n, x).unwrap();
                let scale = 1.0 + direct.abs().max((2 * n + 1) as f64 * 1e-3);
                assert!(
                    (direct - trig).abs() < 1e-10 * scale * (n as f64 + 1.0),
                    "{kind:?} n={n} x={x}: {direct} vs {trig}"
                );
            }
        }
    }
}

#[test]
fn chebyshev_endpoint_values() {
    for n in 0..20usize {
        let k = n as f64;
        assert!((chebyshev(ChebyshevKind::First, n, 1.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((chebyshev(ChebyshevKind::Second, n, 1.0).unwrap() - (k + 1.0)).abs() < 1e-10);
        assert!((chebyshev(ChebyshevKind::Third, n, 1.0).unwrap() - 1.0).abs() < 1e-12);
        assert!(
            (chebyshev(ChebyshevKind::Fourth, n, 1.0).unwrap() - (2.0 * k + 1.0)).abs() < 1e-10
        );
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        assert!(
            (chebyshev(ChebyshevKind::Third, n, -1.0).unwrap() - sign * (2.0 * k + 1.0)).abs()
                < 1e-10
        );
        assert!((chebyshev(ChebyshevKind::Fourth, n, -1.0).unwrap() - sign).abs() < 1e-12);
    }
}

#[test]
fn chebyshev_angle_form() {
    let theta = 0.37;
    for n in 0..10usize {
        let half = (n as f64 + 0.5) * theta;
        let v = chebyshev_angle(ChebyshevKind::Third, n, theta);
        assert!((v - half.cos() / (0.5 * theta).cos()).abs() < 1e-13);
        let w = chebyshev_angle(ChebyshevKind::Fourth, n, theta);
        assert!((w - half.sin() / (0.5 * theta).sin()).abs() < 1e-12);
    }
}

#[test]
fn chebyshev_domain() {
    assert!(matches!(
        chebyshev(ChebyshevKind::First, 3, 1.5),
        Err(Error::Domain(_))
    ));
    assert!(chebyshev(ChebyshevKind::First, 3, 1.0 + 1e-13).is_ok());
    assert!(chebyshev(ChebyshevKind::Third, 3, f64::NAN).is_err());
}
