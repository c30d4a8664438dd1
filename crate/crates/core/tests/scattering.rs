use std::f64::consts::PI;

use num_complex::Complex64;
use toboggan::potential::PowerLawPotential;
use toboggan::propagate::StepControl;
use toboggan::rational::Rational;
use toboggan::riemann_path::{Edge, SheetPoint};
use toboggan::scattering::*;
use toboggan::specfun::{gamma, kummer_series, SeriesControl};

#[test]
fn pt_mirror_amplitudes_are_conjugate_numerically() {
    let alpha = 0.42;
    let v = PowerLawPotential::from_alpha(alpha);
    let ctl = StepControl::default();
    for (n, edge) in [(0, Edge::LowerEdge), (1, Edge::UpperEdge)] {
        let prob = ScatterProblem::new(alpha, 1.7, n, edge);
        let c = prob.contour().unwrap();
        let a = numerical_amplitudes_on(&v, &c, &prob, &ctl).unwrap();
        let b = numerical_amplitudes_on(&v, &pt_mirror(&c), &prob, &ctl).unwrap();
        assert!(
            (a.backward.conj() - b.backward).norm() < 1e-6,
            "{:?} vs {:?}",
            a.backward,
            b.backward
        );
        assert!((a.forward.conj() - b.forward).norm() < 1e-6);
    }
}

/// `chi` at negative `r` from the Kummer-transformed series must agree with
/// its large-|r| form built from the connection coefficients.
#[test]
fn chi_connection_on_both_rays() {
    let (alpha, mu) = (0.3, 1.1);
    let a = (alpha + 1.0 - mu) / 2.0;
    let b = alpha + 1.0;
    let gb = gamma(Complex64::new(b, 0.0)).unwrap();
    let ga = gamma(Complex64::new(a, 0.0)).unwrap();
    let gba = gamma(Complex64::new(b - a, 0.0)).unwrap();
    for r in [25.0f64, -25.0, 900.0, -900.0] {
        let chi = chi_solution(alpha, mu, r).unwrap();
        // M(a, b, -ir) with -ir = |r| e^{i phi}, phi = -+pi/2
        let phi = if r > 0.0 { -PI / 2.0 } else { PI / 2.0 };
        let z = Complex64::from_polar(r.abs(), phi);
        let i = Complex64::new(0.0, 1.0);
        let mut s_plus = Complex64::new(0.0, 0.0);
        let mut s_minus = Complex64::new(0.0, 0.0);
        let (mut tp, mut tm) = (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0));
        for k in 0..12 {
            s_plus += tp;
            s_minus += tm;
            let kf = k as f64;
            tp *= (a + kf) * (a - b + 1.0 + kf) / ((kf + 1.0) * -z);
            tm *= (1.0 - a + kf) * (b - a + kf) / ((kf + 1.0) * z);
        }
        let sigma = phi.signum();
        let lnz = Complex64::new(r.abs().ln(), phi);
        let m = gb * ((z + (a - b) * lnz).exp() * s_minus / ga + (sigma * i * PI * a - a * lnz).exp() * s_plus / gba);
        let arg_r = if r < 0.0 { -PI } else { 0.0 };
        let p = 0.25 + alpha / 2.0;
        let expect = Complex64::from_polar(r.abs().powf(p), p * arg_r) * Complex64::from_polar(1.0, r / 2.0) * m;
        let tol = if r.abs() < 100.0 { 1e-5 } else { 1e-10 };
        assert!(
            (chi - expect).norm() <= tol * expect.norm(),
            "r = {r}: {chi} vs {expect}"
        );
    }
}

#[test]
fn series_and_asymptotic_form_agree_at_moderate_radius() {
    let (a, b) = (Complex64::new(0.1, 0.0), Complex64::new(1.3, 0.0));
    for z in [Complex64::new(0.0, 25.0), Complex64::new(0.0, -25.0)] {
        let series = kummer_series(a, b, z, &SeriesControl::default()).unwrap();
        let ctl = SeriesControl {
            asymptotic_crossover: 1.0,
            ..SeriesControl::default()
        };
        let asym = toboggan::specfun::kummer_m(a, b, z, &ctl).unwrap();
        assert!((series - asym).norm() < 1e-6 * series.norm(), "{series} vs {asym}");
    }
}

#[test]
fn radial_variable_sign_follows_the_ray() {
    let rho = 4.0;
    for (theta, sign) in [
        (-0.75 * PI, -1.0),
        (-0.25 * PI, 1.0),
        (0.75 * PI, 1.0),
        (-1.25 * PI, 1.0),
        (1.25 * PI, -1.0),
    ] {
        let r = radial_variable(SheetPoint::new(rho, theta).unwrap()).unwrap();
        assert_eq!(r, sign * rho * rho);
    }
}

#[test]
fn anharmonic_perturbation_keeps_extraction_trusted() {
    let alpha = 0.6;
    let v = PowerLawPotential::from_alpha(alpha).with_term(Rational::new(1, 2).unwrap(), 0.05);
    let prob = ScatterProblem {
        extraction_radius: 12.0,
        ..ScatterProblem::new(alpha, 2.4, 0, Edge::LowerEdge)
    };
    let r = numerical_amplitudes(&v, &prob, &StepControl::default()).unwrap();
    assert!(r.trusted, "{:?}", r.flags);
    let far = ScatterProblem {
        extraction_radius: 20.0,
        ..prob
    };
    let s = numerical_amplitudes(&v, &far, &StepControl::default()).unwrap();
    assert!(
        (r.backward - s.backward).norm() < 1e-5 && (r.forward - s.forward).norm() < 1e-5,
        "{:?} {:?}",
        r,
        s
    );
}

#[test]
fn small_extraction_radius_is_flagged() {
    let prob = ScatterProblem {
        extraction_radius: 2.5,
        ..ScatterProblem::new(0.3, 5.0, 0, Edge::LowerEdge)
    };
    let r = numerical_amplitudes(&PowerLawPotential::from_alpha(0.3), &prob, &StepControl::default()).unwrap();
    assert!(!r.trusted && r.flags.iter().any(|f| f.contains("ill-conditioned")));
}

#[test]
fn mismatched_alpha_rejected() {
    let prob = ScatterProblem::new(0.3, 2.0, 0, Edge::LowerEdge);
    assert!(numerical_amplitudes(&PowerLawPotential::from_alpha(0.4), &prob, &StepControl::default()).is_err());
}

#[test]
fn weak_linear_perturbation_moves_amplitudes_continuously() {
    let alpha = 0.3;
    let ctl = StepControl::default();
    let prob = ScatterProblem::new(alpha, 2.2, 0, Edge::LowerEdge);
    let base = numerical_amplitudes(&PowerLawPotential::from_alpha(alpha), &prob, &ctl).unwrap();
    let shift = |g: f64| {
        let v = PowerLawPotential::from_alpha(alpha).with_term(Rational::integer(1), g);
        let r = numerical_amplitudes(&v, &prob, &ctl).unwrap();
        assert!(r.trusted, "{:?}", r.flags);
        (r.backward - base.backward)
            .norm()
            .max((r.forward - base.forward).norm())
    };
    let (d1, d2) = (shift(0.01), shift(0.005));
    assert!(d1 > 0.0 && d1 < 0.5, "{d1}");
    // first order in g
    assert!((d1 / d2 - 2.0).abs() < 0.1, "{d1} {d2}");
}

#[test]
fn resonance_lists() {
    assert_eq!(resonance_energies(0.5, 4), Vec::<f64>::new());
    let e = resonance_energies(5.1, 3);
    let expect = [8.2, 4.2, 0.2];
    assert_eq!(e.len(), 3);
    for (a, b) in e.iter().zip(expect) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn terminating_chi() {
    // a = 0: 1F1 = 1
    let (alpha, r) = (0.4, 3.7);
    let chi = chi_solution(alpha, alpha + 1.0, r).unwrap();
    let expect = Complex64::from_polar(r.powf(0.25 + alpha / 2.0), r / 2.0);
    assert!((chi - expect).norm() < 1e-14);
}
