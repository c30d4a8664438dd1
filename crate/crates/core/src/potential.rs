//! Spiked power-law potentials evaluated on the covering surface.
//!
//! Anharmonic terms are stored as `g (i x)^beta` with real `g`, which makes
//! each of them PT-symmetric by construction.

use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::riemann_path::SheetPoint;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerTerm {
    pub beta: Rational,
    pub g: f64,
}

/// Second-order pole `strength / (x - location)^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pole {
    pub location: Complex64,
    pub strength: Complex64,
}

/// `V(x) = centrifugal / x^2 + harmonic x^2 + sum g (i x)^beta + sum G / (x - c)^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerLawPotential {
    pub centrifugal: f64,
    pub harmonic: f64,
    pub terms: Vec<PowerTerm>,
    pub poles: Vec<Pole>,
}

impl Default for PowerLawPotential {
    fn default() -> Self {
        PowerLawPotential {
            centrifugal: 0.0,
            harmonic: 1.0,
            terms: Vec::new(),
            poles: Vec::new(),
        }
    }
}

/// Leading large-|x| behaviour of a potential, `coefficient * (i x)^exponent`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DominantTerm {
    pub exponent: f64,
    pub coefficient: f64,
}

impl PowerLawPotential {
    /// Harmonic oscillator with centrifugal coupling `l (l + 1)`.
    pub fn spiked_oscillator(ell: f64) -> Self {
        PowerLawPotential {
            centrifugal: ell * (ell + 1.0),
            ..Default::default()
        }
    }

    /// Harmonic oscillator with centrifugal coupling `alpha^2 - 1/4`.
    pub fn from_alpha(alpha: f64) -> Self {
        PowerLawPotential {
            centrifugal: alpha * alpha - 0.25,
            ..Default::default()
        }
    }

    pub fn with_term(mut self, beta: Rational, g: f64) -> Self {
        self.terms.push(PowerTerm { beta, g });
        self
    }

    pub fn with_pole(mut self, location: Complex64, strength: Complex64) -> Self {
        self.poles.push(Pole { location, strength });
        self
    }

    /// `alpha = l + 1/2 = sqrt(centrifugal + 1/4)` when that is real.
    pub fn alpha(&self) -> Option<f64> {
        let a2 = self.centrifugal + 0.25;
        (a2 >= 0.0).then(|| a2.sqrt())
    }

    /// Enforces the asymptotically harmonic spiked class: every anharmonic
    /// exponent strictly between -2 and 2 and a positive harmonic coefficient.
    pub fn validate_spiked(&self) -> Result<()> {
        if !(self.harmonic > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "harmonic coefficient must be positive, got {}",
                self.harmonic
            )));
        }
        for t in &self.terms {
            let b = t.beta.value();
            if !(b > -2.0 && b < 2.0) {
                return Err(Error::InvalidParameter(format!("exponent {} outside (-2, 2)", t.beta)));
            }
        }
        Ok(())
    }

    pub fn dominant(&self) -> Option<DominantTerm> {
        let mut best: Option<DominantTerm> = (self.harmonic != 0.0).then_some(DominantTerm {
            exponent: 2.0,
            // x^2 = -(i x)^2
            coefficient: -self.harmonic,
        });
        for t in self.terms.iter().filter(|t| t.g != 0.0) {
            let e = t.beta.value();
            match best {
                Some(b) if b.exponent > e => {}
                Some(b) if b.exponent == e => {
                    best = Some(DominantTerm {
                        exponent: e,
                        coefficient: b.coefficient + t.g,
                    });
                }
                _ => {
                    best = Some(DominantTerm {
                        exponent: e,
                        coefficient: t.g,
                    })
                }
            }
        }
        best
    }

    /// Whether the dominant behaviour is exactly the harmonic `x^2` term.
    pub fn is_asymptotically_harmonic(&self) -> bool {
        self.harmonic > 0.0 && self.terms.iter().all(|t| t.g == 0.0 || t.beta.value() < 2.0)
    }

    pub fn eval(&self, p: SheetPoint) -> Result<Complex64> {
        let x = p.embedded();
        let mut v = Complex64::new(self.harmonic, 0.0) * x * x;
        if p.modulus == 0.0 {
            if self.centrifugal != 0.0 {
                return Err(Error::Singularity {
                    term: format!("{}/x^2", self.centrifugal),
                    at: "0".into(),
                });
            }
            if let Some(t) = self.terms.iter().find(|t| t.g != 0.0 && t.beta.value() < 0.0) {
                return Err(Error::Singularity {
                    term: format!("{} (ix)^({})", t.g, t.beta),
                    at: "0".into(),
                });
            }
        } else if self.centrifugal != 0.0 {
            v += self.centrifugal / (x * x);
        }
        let ix = p.times_i();
        for t in &self.terms {
            if t.g != 0.0 {
                v += t.g * ix.powf(t.beta.value());
            }
        }
        for pole in &self.poles {
            let d = x - pole.location;
            if d.norm() == 0.0 {
                return Err(Error::Singularity {
                    term: format!("({})/(x - {})^2", pole.strength, pole.location),
                    at: format!("{x}"),
                });
            }
            v += pole.strength / (d * d);
        }
        Ok(v)
    }

    /// `dV/dx`, used for the WKB boundary correction.
    pub fn derivative(&self, p: SheetPoint) -> Result<Complex64> {
        let x = p.embedded();
        if p.modulus == 0.0 {
            return Err(Error::Singularity {
                term: "dV/dx".into(),
                at: "0".into(),
            });
        }
        let mut d = 2.0 * self.harmonic * x - 2.0 * self.centrifugal / (x * x * x);
        let ix = p.times_i();
        let i = Complex64::new(0.0, 1.0);
        for t in &self.terms {
            if t.g != 0.0 {
                let b = t.beta.value();
                d += t.g * b * i * ix.powf(b - 1.0);
            }
        }
        for pole in &self.poles {
            let dd = x - pole.location;
            d += -2.0 * pole.strength / (dd * dd * dd);
        }
        Ok(d)
    }

    pub fn is_pt_symmetric(&self) -> bool {
        const TOL: f64 = 1e-12;
        self.poles.iter().all(|p| {
            let self_paired = p.location.re.abs() <= TOL * (1.0 + p.location.norm())
                && p.strength.im.abs() <= TOL * (1.0 + p.strength.norm());
            self_paired
                || self.poles.iter().any(|q| {
                    (q.location + p.location.conj()).norm() <= TOL * (1.0 + p.location.norm())
                        && (q.strength - p.strength.conj()).norm() <= TOL * (1.0 + p.strength.norm())
                })
        })
    }

    /// Config text in the `key = value` / `term { .. }` / `pole { .. }` grammar.
    pub fn to_config(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "centrifugal = {:.17e}", self.centrifugal);
        let _ = writeln!(s, "harmonic = {:.17e}", self.harmonic);
        for t in &self.terms {
            let _ = writeln!(s, "term {{ beta = \"{}\", g = {:.17e} }}", t.beta, t.g);
        }
        for p in &self.poles {
            let _ = writeln!(
                s,
                "pole {{ re = {:.17e}, im = {:.17e}, G_re = {:.17e}, G_im = {:.17e} }}",
                p.location.re, p.location.im, p.strength.re, p.strength.im
            );
        }
        s
    }
}

/// Decaying wedge number `k` of the harmonic asymptotics: the open interval of
/// `theta` with `k pi + theta in (-pi/4, pi/4)`.
pub fn harmonic_wedge(k: i64) -> (f64, f64) {
    let c = -(k as f64) * PI;
    (c - FRAC_PI_4, c + FRAC_PI_4)
}

/// Decaying wedges `k in ks` for the dominant `x^2` behaviour of `v`.
pub fn asymptotic_wedges(v: &PowerLawPotential, ks: impl IntoIterator<Item = i64>) -> Result<Vec<(f64, f64)>> {
    if v.harmonic == 0.0 {
        return Err(Error::InvalidParameter("harmonic coefficient is zero".into()));
    }
    Ok(ks.into_iter().map(harmonic_wedge).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, TAU};

    fn pt(m: f64, a: f64) -> SheetPoint {
        SheetPoint::new(m, a).unwrap()
    }

    #[test]
    fn harmonic_and_centrifugal_values() {
        let v = PowerLawPotential::default();
        let x = pt(2f64.sqrt(), -FRAC_PI_4);
        assert!((v.eval(x).unwrap() - Complex64::new(0.0, -2.0)).norm() < 1e-14);
        let c = PowerLawPotential {
            centrifugal: 2.0,
            harmonic: 0.0,
            ..Default::default()
        };
        assert!((c.eval(pt(1.0, -FRAC_PI_2)).unwrap() - Complex64::new(-2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn square_root_term_changes_sign_between_sheets() {
        let v = PowerLawPotential {
            harmonic: 0.0,
            ..Default::default()
        }
        .with_term(Rational::new(1, 2).unwrap(), 1.0);
        let a = v.eval(pt(1.0, 0.0)).unwrap();
        let b = v.eval(pt(1.0, TAU)).unwrap();
        assert!((a + b).norm() < 1e-14);
    }

    #[test]
    fn homogeneity_ratio() {
        let beta = Rational::new(2, 3).unwrap();
        let v = PowerLawPotential {
            harmonic: 0.0,
            ..Default::default()
        }
        .with_term(beta, 0.7);
        let a = v.eval(pt(1.3, 0.4)).unwrap();
        let b = v.eval(pt(1.3, 0.4 + TAU)).unwrap();
        let expect = Complex64::from_polar(1.0, TAU * beta.value());
        assert!((b / a - expect).norm() < 1e-14);
    }

    #[test]
    fn singularities_are_reported() {
        let v = PowerLawPotential::spiked_oscillator(1.0);
        assert!(matches!(v.eval(pt(0.0, 0.0)), Err(Error::Singularity { .. })));
        let w = PowerLawPotential::default().with_pole(Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.0));
        assert!(matches!(w.eval(pt(1.0, 0.0)), Err(Error::Singularity { .. })));
    }

    #[test]
    fn pt_symmetry_checks() {
        assert!(PowerLawPotential::spiked_oscillator(0.3).is_pt_symmetric());
        let lone = PowerLawPotential::default().with_pole(Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0));
        assert!(!lone.is_pt_symmetric());
        let g = Complex64::new(0.1, 0.2);
        let pair = PowerLawPotential::default()
            .with_pole(Complex64::new(1.0, 0.0), g)
            .with_pole(Complex64::new(-1.0, 0.0), g.conj());
        assert!(pair.is_pt_symmetric());
    }

    #[test]
    fn pt_functional_identity() {
        let v = PowerLawPotential::spiked_oscillator(0.37)
            .with_term(Rational::new(1, 3).unwrap(), 0.2)
            .with_term(Rational::integer(1), -0.4)
            .with_pole(Complex64::new(1.0, -0.2), Complex64::new(0.1, 0.2))
            .with_pole(Complex64::new(-1.0, -0.2), Complex64::new(0.1, -0.2));
        assert!(v.is_pt_symmetric());
        for (m, a) in [(0.7, -0.3), (2.0, -2.5), (3.3, 4.0), (1.1, -7.0)] {
            let p = pt(m, a);
            let lhs = v.eval(p.pt_image()).unwrap();
            let rhs = v.eval(p).unwrap().conj();
            assert!((lhs - rhs).norm() < 1e-12 * (1.0 + rhs.norm()));
        }
    }

    #[test]
    fn wedges() {
        let v = PowerLawPotential::default();
        let w = asymptotic_wedges(&v, [0, 1, -2]).unwrap();
        assert_eq!(w[0], (-FRAC_PI_4, FRAC_PI_4));
        assert!((w[1].0 + 1.25 * PI).abs() < 1e-15 && (w[1].1 + 0.75 * PI).abs() < 1e-15);
        assert!((w[2].0 - 1.75 * PI).abs() < 1e-15 && (w[2].1 - 2.25 * PI).abs() < 1e-15);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let v = PowerLawPotential::spiked_oscillator(0.2)
            .with_term(Rational::new(3, 2).unwrap(), 0.3)
            .with_pole(Complex64::new(1.0, 0.0), Complex64::new(0.2, 0.1));
        let p = pt(1.7, -0.9);
        let h = 1e-6;
        let x = p.embedded();
        let shift = |dx: Complex64| {
            let y = x + dx;
            // stay on the same sheet: argument continues from p
            pt(y.norm(), p.argument + (y / x).arg())
        };
        let fd = (v.eval(shift(Complex64::new(h, 0.0))).unwrap() - v.eval(shift(Complex64::new(-h, 0.0))).unwrap())
            / (2.0 * h);
        let d = v.derivative(p).unwrap();
        assert!((fd - d).norm() < 1e-6 * (1.0 + d.norm()));
    }
}
