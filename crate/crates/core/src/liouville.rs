//! The power change of variables `i x = (i y)^tau`, `psi(x) = y^{(tau-1)/2} Psi(y)`.
//!
//! A term `c (i x)^gamma` of `V - E` becomes `tau^2 c (i y)^{2 tau - 2 + tau gamma}`,
//! so the energy turns into the coupling of `(i y)^{2 tau - 2}` and the source
//! coupling at `gamma = -2 + 2/tau` turns into the new energy. The Jacobian of
//! the wavefunction rescaling adds `(tau^2 - 1)/(4 y^2)` to the centrifugal term.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::{PowerLawPotential, PowerTerm};
use crate::propagate::Weight;
use crate::rational::Rational;
use crate::riemann_path::power_image;
use crate::spectrum::{EigenProblem, EigenResult};
use crate::Complex64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiouvilleMap {
    pub tau: Rational,
    pub source_winding: u32,
    pub target_winding: u32,
    pub source_centrifugal: f64,
    /// `L (L + 1)` of the target.
    pub target_centrifugal: f64,
    /// `L = tau (l + 1/2) - 1/2`, when `l` is real.
    pub target_l: Option<f64>,
    /// Exponent of `(i y)` whose coupling carries the source energy.
    pub energy_slot: Rational,
    /// Source exponent whose coupling becomes the target energy.
    pub inverse_energy_source: Rational,
    /// `-tau^2 g` for the source coupling at `inverse_energy_source`.
    pub target_energy: f64,
    /// Every target exponent is an even integer.
    pub canonical: bool,
    /// Target potential without the constant that became `target_energy`.
    pub target_potential: PowerLawPotential,
}

impl LiouvilleMap {
    /// Coupling `kappa` of `(i y)^{2 tau - 2}` produced by source energy `e`.
    pub fn energy_coupling(&self, e: Complex64) -> Complex64 {
        -self.tau_squared() * e
    }

    /// The same coupling in powers of `y`: `G = kappa i^{2 tau - 2}`, equal to
    /// `(-1)^tau tau^2 E` for integer `tau`.
    pub fn y_power_coupling(&self, e: Complex64) -> Complex64 {
        self.energy_coupling(e) * self.energy_slot.i_power()
    }

    pub fn source_energy(&self, kappa: Complex64) -> Result<Complex64> {
        let t2 = self.tau_squared();
        if t2 == 0.0 {
            return Err(Error::InvalidParameter("zero Jacobian on the energy slot".into()));
        }
        Ok(-kappa / t2)
    }

    fn tau_squared(&self) -> f64 {
        let t = self.tau.value();
        t * t
    }
}

/// `2 tau - 2 + tau beta`.
pub fn map_exponent(beta: Rational, tau: Rational) -> Rational {
    Rational::integer(2) * tau - Rational::integer(2) + tau * beta
}

/// Source exponents `beta` with nonzero coupling for which `beta tau` is not
/// an even integer.
pub fn failing_exponents(v: &PowerLawPotential, tau: Rational) -> Vec<Rational> {
    v.terms
        .iter()
        .filter(|t| t.g != 0.0 && !(t.beta * tau).is_even_integer())
        .map(|t| t.beta)
        .collect()
}

/// Smallest `tau` in `{1/2, 1, 3/2, ...}` with `beta tau` even for every term.
pub fn minimal_tau(v: &PowerLawPotential) -> Rational {
    // h = 4 lcm(q) always works, so the search terminates
    (1..)
        .map(|h| Rational::new(h, 2).expect("nonzero denominator"))
        .find(|&tau| failing_exponents(v, tau).is_empty())
        .expect("unbounded search")
}

/// `N' = floor(((2N + 1)/tau - 1)/2)`, clamped at zero: the winding of the
/// image of a contour spanning `(2N + 1) pi` between its asymptotic wedges.
pub fn target_winding(winding: u32, tau: Rational) -> u32 {
    let span = (2 * winding + 1) as f64 / tau.value();
    ((span - 1.0) / 2.0 + 1e-12).floor().max(0.0) as u32
}

/// Maps every term of `v` (harmonic, centrifugal and anharmonic) to the
/// `y` problem. Exponent-2 and exponent-(-2) images are folded back into the
/// harmonic and centrifugal slots.
pub fn map_potential(v: &PowerLawPotential, tau: Rational) -> Result<PowerLawPotential> {
    if tau <= Rational::ZERO {
        return Err(Error::InvalidParameter(format!("tau must be positive, got {tau}")));
    }
    if !v.poles.is_empty() {
        return Err(Error::InvalidParameter(
            "the power change of variables needs the spike at the origin only".into(),
        ));
    }
    let t2 = tau.value() * tau.value();
    let mut out = PowerLawPotential {
        centrifugal: t2 * (v.centrifugal + 0.25) - 0.25,
        harmonic: 0.0,
        terms: Vec::new(),
        poles: Vec::new(),
    };
    // x^2 = -(i x)^2
    let source = std::iter::once(PowerTerm {
        beta: Rational::integer(2),
        g: -v.harmonic,
    })
    .chain(v.terms.iter().copied())
    .filter(|t| t.g != 0.0);
    for t in source {
        let beta = map_exponent(t.beta, tau);
        let g = t.g * t2;
        if beta == Rational::integer(2) {
            out.harmonic -= g;
        } else if beta == Rational::integer(-2) {
            out.centrifugal -= g;
        } else {
            out.terms.push(PowerTerm { beta, g });
        }
    }
    Ok(out)
}

/// Maps a spiked tobogganic problem to its `y` image. The target problem's
/// spectral parameter is the coupling `kappa = -tau^2 E` of `(i y)^{2 tau - 2}`.
pub fn transform(prob: &EigenProblem, tau: Rational) -> Result<(EigenProblem, LiouvilleMap)> {
    let v = &prob.potential;
    if prob.weight.is_some() {
        return Err(Error::InvalidParameter(
            "source problem already carries a spectral weight".into(),
        ));
    }
    if !v.is_asymptotically_harmonic() {
        return Err(Error::InvalidParameter("source must be asymptotically harmonic".into()));
    }
    let failing = failing_exponents(v, tau);
    if !failing.is_empty() {
        return Err(Error::InadmissibleTau {
            tau: tau.to_string(),
            failing: failing.iter().map(|b| b.to_string()).collect(),
        });
    }
    let target_v = map_potential(v, tau)?;
    let beta_tau = Rational::integer(-2) + Rational::integer(2) / tau;
    let t2 = tau.value() * tau.value();
    let g_beta_tau: f64 = v.terms.iter().filter(|t| t.beta == beta_tau).map(|t| t.g).sum();
    let mut canonical_v = target_v.clone();
    canonical_v.terms.retain(|t| !t.beta.is_zero());
    let canonical = target_v.terms.iter().all(|t| t.beta.is_even_integer());
    let n_prime = target_winding(prob.contour.winding, tau);
    let energy_slot = Rational::integer(2) * tau - Rational::integer(2);
    let map = LiouvilleMap {
        tau,
        source_winding: prob.contour.winding,
        target_winding: n_prime,
        source_centrifugal: v.centrifugal,
        target_centrifugal: target_v.centrifugal,
        target_l: v.alpha().map(|a| tau.value() * a - 0.5),
        energy_slot,
        inverse_energy_source: beta_tau,
        target_energy: -t2 * g_beta_tau,
        canonical,
        target_potential: canonical_v,
    };
    let (a, b) = prob.search_window;
    let target = EigenProblem {
        potential: target_v,
        contour: power_image(&prob.contour, tau.value(), n_prime),
        // q = V_y + kappa (i y)^{2 tau - 2}
        weight: Some(Weight {
            exponent: energy_slot.value(),
            coefficient: -1.0,
        }),
        search_window: (-t2 * b, -t2 * a),
        grid_points: prob.grid_points,
        refine_tolerance: prob.refine_tolerance,
        step_control: prob.step_control,
    };
    Ok((target, map))
}

/// Converts target spectral parameters back to source energies, sorted by
/// the real part.
pub fn pull_back_energy(map: &LiouvilleMap, target_results: &[EigenResult]) -> Result<Vec<EigenResult>> {
    let mut out = target_results
        .iter()
        .map(|r| {
            Ok(EigenResult {
                energy: map.source_energy(r.energy)?,
                labels: None,
                ..r.clone()
            })
        })
        .collect::<Result<Vec<_>>>()?;
    out.sort_by(|x, y| x.energy.re.total_cmp(&y.energy.re));
    for (i, r) in out.iter_mut().enumerate() {
        r.index_hint = i;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::riemann_path::make_straight;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn minimal_tau_examples() {
        let v = PowerLawPotential::default();
        assert_eq!(minimal_tau(&v.clone().with_term(r("1"), 0.1)), r("2"));
        assert_eq!(minimal_tau(&v), r("1/2"));
        assert_eq!(minimal_tau(&v.clone().with_term(r("2/3"), 1.0)), r("3"));
        assert_eq!(
            minimal_tau(&v.clone().with_term(r("1/2"), 1.0).with_term(r("-1"), 1.0)),
            r("4")
        );
    }

    #[test]
    fn tau_two_by_hand() {
        // l = 0: L + 1/2 = 2 (1/2); x^2 -> -4 (iy)^6 = 4 y^6; 0.1 (ix) -> 0.4 (iy)^4 = 0.4 y^4
        let v = PowerLawPotential::spiked_oscillator(0.0).with_term(r("1"), 0.1);
        let c = make_straight(0.5, 8.0, 11).unwrap();
        let (target, map) = transform(&EigenProblem::new(v, c, (0.0, 10.0)), r("2")).unwrap();
        assert!((map.target_l.unwrap() - 0.5).abs() < 1e-15);
        assert!((map.target_centrifugal - 0.75).abs() < 1e-15);
        let mut terms: Vec<(Rational, f64)> = target.potential.terms.iter().map(|t| (t.beta, t.g)).collect();
        terms.sort_by_key(|t| t.0);
        assert_eq!(terms.len(), 2);
        assert_eq!(terms[0].0, r("4"));
        assert!((terms[0].1 - 0.4).abs() < 1e-15);
        assert_eq!(terms[1], (r("6"), -4.0));
        assert_eq!(r("6").i_power() * terms[1].1, Complex64::new(4.0, 0.0));
        assert_eq!(map.energy_slot, r("2"));
        assert_eq!(map.inverse_energy_source, r("-1"));
        assert_eq!(map.target_energy, 0.0);
        // G_1 = (-1)^2 4 E
        let g = map.y_power_coupling(Complex64::new(1.5, 0.0));
        assert!((g - Complex64::new(6.0, 0.0)).norm() < 1e-14);
        assert_eq!(map.target_winding, 0);
        assert!(map.canonical);
        assert_eq!(target.search_window, (-40.0, -0.0));
    }

    #[test]
    fn identity_at_tau_one() {
        let v = PowerLawPotential::from_alpha(0.3);
        let m = map_potential(&v, Rational::ONE).unwrap();
        assert!((m.centrifugal - v.centrifugal).abs() < 1e-15);
        assert_eq!(m.harmonic, v.harmonic);
        assert!(m.terms.is_empty());
    }

    #[test]
    fn inadmissible_tau_lists_exponents() {
        let v = PowerLawPotential::default()
            .with_term(r("1"), 0.1)
            .with_term(r("1/3"), 0.2);
        let c = make_straight(0.5, 8.0, 11).unwrap();
        let err = transform(&EigenProblem::new(v, c, (0.0, 1.0)), r("2")).unwrap_err();
        match err {
            Error::InadmissibleTau { failing, .. } => assert_eq!(failing, vec!["1/3".to_string()]),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn winding_reduction() {
        assert_eq!(target_winding(1, r("2")), 0);
        assert_eq!(target_winding(3, r("1")), 3);
        assert_eq!(target_winding(3, r("3/2")), 1);
        for n in 0..6 {
            let mut last = u32::MAX;
            for h in 1..40 {
                let w = target_winding(n, Rational::new(h, 2).unwrap());
                assert!(w <= last);
                last = w;
            }
            assert_eq!(last, 0);
        }
    }

    #[test]
    fn involution() {
        let v = PowerLawPotential::from_alpha(0.8)
            .with_term(r("1"), 0.1)
            .with_term(r("-1/2"), -0.3);
        let tau = r("4");
        let back = map_potential(&map_potential(&v, tau).unwrap(), tau.recip().unwrap()).unwrap();
        assert!((back.centrifugal - v.centrifugal).abs() < 1e-12);
        assert!((back.harmonic - v.harmonic).abs() < 1e-12);
        let mut a: Vec<Rational> = back.terms.iter().map(|t| t.beta).collect();
        let mut b: Vec<Rational> = v.terms.iter().map(|t| t.beta).collect();
        a.sort();
        b.sort();
        assert_eq!(a, b);
    }
}
