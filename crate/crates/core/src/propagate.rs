//! Transport of solutions of `-psi'' + V psi = E rho psi` along contours.
//!
//! The working representation is the logarithmic derivative `u = psi'/psi`
//! together with `log psi`. Near a node of `psi` the state switches to
//! `v = psi/psi'` and `log psi'`, and back once the node has been passed.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use crate::dopri::StepControl;
use crate::dopri::{integrate, OdeSystem};
use crate::error::{Error, Result};
use crate::potential::PowerLawPotential;
use crate::riemann_path::{in_wedge, nearest_wedge, Contour, End, EndCondition, Geometry, SheetPoint};

/// Smallest admissible modulus for asymptotic initialization.
pub const DEFAULT_R_MIN: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropagationState {
    pub position: SheetPoint,
    pub log_amplitude: Complex64,
    /// `psi_x / psi`, derivative with respect to `x`.
    pub log_derivative: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AsymptoticKind {
    Decaying,
    Growing,
}

/// Spectral weight `rho(x) = coefficient (i x)^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Weight {
    pub exponent: f64,
    pub coefficient: f64,
}

/// `-psi'' + V psi = energy rho psi`, with `rho = 1` when no weight is set.
#[derive(Debug, Clone, Copy)]
pub struct Equation<'a> {
    pub potential: &'a PowerLawPotential,
    pub energy: Complex64,
    pub weight: Option<Weight>,
}

impl<'a> Equation<'a> {
    pub fn new(potential: &'a PowerLawPotential, energy: Complex64) -> Self {
        Equation {
            potential,
            energy,
            weight: None,
        }
    }

    /// `V(x) - energy rho(x)`.
    pub fn q(&self, p: SheetPoint) -> Result<Complex64> {
        let v = self.potential.eval(p)?;
        Ok(match self.weight {
            None => v - self.energy,
            Some(w) => v - self.energy * w.coefficient * p.times_i().powf(w.exponent),
        })
    }

    pub fn dq(&self, p: SheetPoint) -> Result<Complex64> {
        let d = self.potential.derivative(p)?;
        Ok(match self.weight {
            None => d,
            Some(w) => {
                let i = Complex64::new(0.0, 1.0);
                d - self.energy * w.coefficient * w.exponent * i * p.times_i().powf(w.exponent - 1.0)
            }
        })
    }

    fn pure_harmonic(&self) -> bool {
        let v = self.potential;
        self.weight.is_none() && v.harmonic > 0.0 && v.terms.iter().all(|t| t.g == 0.0) && v.poles.is_empty()
    }

    fn harmonic_wedges(&self) -> bool {
        self.potential.is_asymptotically_harmonic()
            && self.weight.is_none_or(|w| w.exponent < 2.0 || w.coefficient == 0.0)
    }
}

/// Asymptotic state at `p` for the requested solution type.
pub fn initial_state(
    v: &PowerLawPotential,
    e: Complex64,
    p: SheetPoint,
    kind: AsymptoticKind,
) -> Result<PropagationState> {
    initial_state_for(&Equation::new(v, e), p, kind, DEFAULT_R_MIN)
}

pub fn initial_state_for(eq: &Equation, p: SheetPoint, kind: AsymptoticKind, r_min: f64) -> Result<PropagationState> {
    if !(p.modulus >= r_min) {
        return Err(Error::InvalidParameter(format!(
            "asymptotic start needs |x| >= {r_min}, got {}",
            p.modulus
        )));
    }
    let e = eq.energy;
    if !(e.re.is_finite() && e.im.is_finite()) {
        return Err(Error::InvalidParameter(format!("energy must be finite, got {e}")));
    }
    let x = p.embedded();
    let sign = match kind {
        AsymptoticKind::Decaying => -1.0,
        AsymptoticKind::Growing => 1.0,
    };
    let kind_name = match kind {
        AsymptoticKind::Decaying => "decaying",
        AsymptoticKind::Growing => "growing",
    };
    let log_derivative = if eq.harmonic_wedges() {
        let k = nearest_wedge(p.argument);
        if !in_wedge(k, p.argument) {
            return Err(Error::WedgeViolation {
                kind: kind_name,
                angle: p.argument,
                admissible: "k pi + theta in (-pi/4, pi/4) for integer k".into(),
            });
        }
        if eq.pure_harmonic() {
            let w = eq.potential.harmonic.sqrt();
            let mu = e / (2.0 * w);
            // e^{-w x^2/2} behaves the same in every wedge k, the sign of x absorbs k
            sign * w * x - sign * (mu + 0.5 * sign) / x
        } else {
            wkb_log_derivative(eq, p, sign, kind_name)?
        }
    } else {
        wkb_log_derivative(eq, p, sign, kind_name)?
    };
    Ok(PropagationState {
        position: p,
        log_amplitude: Complex64::new(0.0, 0.0),
        log_derivative,
    })
}

/// `psi'/psi = -+ sqrt(q) - q'/(4 q)` with the branch of the root chosen so
/// that the decaying solution decreases outward.
fn wkb_log_derivative(eq: &Equation, p: SheetPoint, sign: f64, kind: &'static str) -> Result<Complex64> {
    let x = p.embedded();
    let q = eq.q(p)?;
    let dq = eq.dq(p)?;
    let mut s = q.sqrt();
    if (s * x).re < 0.0 {
        s = -s;
    }
    if (s * x).re.abs() < 0.1 * (s * x).norm() {
        return Err(Error::WedgeViolation {
            kind,
            angle: p.argument,
            admissible: "away from the anti-Stokes directions of the dominant term".into(),
        });
    }
    Ok(sign * s - dq / (4.0 * q))
}

/// Regular solution `x^{l+1}(1 - E x^2 / (2(2l+3)) + ...)` near the origin.
pub fn regular_state(eq: &Equation, p: SheetPoint) -> Result<PropagationState> {
    let alpha = eq
        .potential
        .alpha()
        .ok_or_else(|| Error::InvalidParameter("regular start needs a real centrifugal index".into()))?;
    let ell = alpha - 0.5;
    let x = p.embedded();
    let correction = if eq.weight.is_none() {
        eq.energy * x / (2.0 * ell + 3.0)
    } else {
        Complex64::new(0.0, 0.0)
    };
    Ok(PropagationState {
        position: p,
        log_amplitude: (ell + 1.0) * Complex64::new(p.modulus.ln(), p.argument),
        log_derivative: (ell + 1.0) / x - correction,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    /// `[log psi, psi'/psi]`
    Direct,
    /// `[log psi', psi/psi']`
    Flipped,
}

struct Riccati<'a> {
    eq: &'a Equation<'a>,
    geometry: &'a Geometry,
    mode: Mode,
    node_limit: f64,
}

impl OdeSystem<2> for Riccati<'_> {
    fn rhs(&self, t: f64, y: &[Complex64; 2]) -> Result<[Complex64; 2]> {
        let zeta = self.geometry.velocity(t);
        let q = self.eq.q(self.geometry.point(t))?;
        Ok(match self.mode {
            Mode::Direct => [zeta * y[1], zeta * (q - y[1] * y[1])],
            Mode::Flipped => [zeta * q * y[1], zeta * (1.0 - q * y[1] * y[1])],
        })
    }

    fn after_step(&mut self, t: f64, y: &mut [Complex64; 2]) -> Result<()> {
        let s = 1.0 + self.eq.q(self.geometry.point(t))?.norm().sqrt();
        match self.mode {
            Mode::Direct if y[1].norm() > 4.0 * s => {
                *y = [y[0] + y[1].ln(), 1.0 / y[1]];
                self.mode = Mode::Flipped;
            }
            Mode::Flipped if y[1].norm() * s > 4.0 => {
                let u = 1.0 / y[1];
                *y = [y[0] - u.ln(), u];
                self.mode = Mode::Direct;
            }
            _ => {}
        }
        if y[1].norm() > self.node_limit || !y[1].is_finite() {
            return Err(Error::NodeCrossing {
                t,
                magnitude: y[1].norm(),
            });
        }
        Ok(())
    }
}

fn to_direct(mode: Mode, y: [Complex64; 2], t: f64) -> Result<(Complex64, Complex64)> {
    match mode {
        Mode::Direct => Ok((y[0], y[1])),
        Mode::Flipped => {
            if y[1].norm() == 0.0 {
                return Err(Error::NodeCrossing {
                    t,
                    magnitude: f64::INFINITY,
                });
            }
            Ok((y[0] + y[1].ln(), 1.0 / y[1]))
        }
    }
}

/// Transports a state along `geometry` from `t0` through every parameter in
/// `stops` (monotone, in the direction of travel), returning the state at each.
pub fn transport(
    eq: &Equation,
    geometry: &Geometry,
    t0: f64,
    start: PropagationState,
    stops: &[f64],
    ctl: &StepControl,
) -> Result<Vec<PropagationState>> {
    ctl.validate()?;
    let mut sys = Riccati {
        eq,
        geometry,
        mode: Mode::Direct,
        node_limit: 1.0 / ctl.absolute_tolerance,
    };
    let mut y = [start.log_amplitude, start.log_derivative];
    let mut t = t0;
    let mut out = Vec::with_capacity(stops.len());
    for &t1 in stops {
        y = integrate(&mut sys, t, y, t1, ctl)?.0;
        t = t1;
        let (log_amplitude, log_derivative) = to_direct(sys.mode, y, t)?;
        out.push(PropagationState {
            position: geometry.point(t),
            log_amplitude,
            log_derivative,
        });
    }
    Ok(out)
}

/// Starting state at one end of the contour.
pub fn end_state(eq: &Equation, c: &Contour, end: End) -> Result<PropagationState> {
    let p = c.point(c.end_parameter(end));
    if end == End::In && c.in_condition == EndCondition::RegularAtOrigin {
        return regular_state(eq, p);
    }
    let k = match end {
        End::In => c.wedge_in,
        End::Out => c.wedge_out,
    };
    if eq.harmonic_wedges() && !in_wedge(k, p.argument) {
        return Err(Error::WedgeViolation {
            kind: "decaying",
            angle: p.argument,
            admissible: format!("k pi + theta in (-pi/4, pi/4) with k = {k}"),
        });
    }
    initial_state_for(eq, p, AsymptoticKind::Decaying, c.truncation_radius.min(DEFAULT_R_MIN))
}

/// Decaying solution from `from_end` transported to the contour vertex.
pub fn propagate(
    v: &PowerLawPotential,
    e: Complex64,
    c: &Contour,
    from_end: End,
    ctl: &StepControl,
) -> Result<PropagationState> {
    propagate_equation(&Equation::new(v, e), c, from_end, ctl)
}

pub fn propagate_equation(eq: &Equation, c: &Contour, from_end: End, ctl: &StepControl) -> Result<PropagationState> {
    let start = end_state(eq, c, from_end)?;
    let t0 = c.end_parameter(from_end);
    let states = transport(eq, &c.geometry, t0, start, &[c.t_match], ctl)?;
    Ok(states[0])
}

/// `left.log_derivative - right.log_derivative`.
pub fn wronskian_mismatch(left: &PropagationState, right: &PropagationState) -> Result<Complex64> {
    if !left.position.same_as(&right.position, 1e-10) {
        return Err(Error::PositionMismatch {
            left: format!("{:?}", left.position),
            right: format!("{:?}", right.position),
        });
    }
    Ok(left.log_derivative - right.log_derivative)
}

/// Decaying solution sampled at the parameters `ts`, normalized so that
/// `psi(vertex) = 1`, with each half taken from its own end.
pub fn wavefunction(eq: &Equation, c: &Contour, ts: &[f64], ctl: &StepControl) -> Result<Vec<(f64, Complex64)>> {
    let mut out = Vec::with_capacity(ts.len());
    for end in [End::In, End::Out] {
        let t0 = c.end_parameter(end);
        let inward = (c.t_match - t0).signum();
        let mut stops: Vec<f64> = ts
            .iter()
            .copied()
            .filter(|&t| match end {
                End::In => t < c.t_match,
                End::Out => t >= c.t_match,
            })
            .filter(|&t| (t - t0) * inward >= 0.0)
            .collect();
        stops.sort_by(|a, b| ((a - t0) * inward).total_cmp(&((b - t0) * inward)));
        stops.push(c.t_match);
        let start = end_state(eq, c, end)?;
        let states = transport(eq, &c.geometry, t0, start, &stops, ctl)?;
        let at_vertex = states.last().map(|s| s.log_amplitude).unwrap_or_default();
        for (t, s) in stops.iter().zip(&states).take(stops.len() - 1) {
            out.push((*t, (s.log_amplitude - at_vertex).exp()));
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(out)
}

struct Linear<'a> {
    eq: &'a Equation<'a>,
    geometry: &'a Geometry,
}

impl OdeSystem<2> for Linear<'_> {
    fn rhs(&self, t: f64, y: &[Complex64; 2]) -> Result<[Complex64; 2]> {
        let zeta = self.geometry.velocity(t);
        let q = self.eq.q(self.geometry.point(t))?;
        Ok([zeta * y[1], zeta * q * y[0]])
    }
}

/// `(psi, psi_x)` transported linearly from `t0` to `t1`.
pub fn propagate_linear(
    eq: &Equation,
    geometry: &Geometry,
    t0: f64,
    y0: [Complex64; 2],
    t1: f64,
    ctl: &StepControl,
) -> Result<[Complex64; 2]> {
    ctl.validate()?;
    let mut sys = Linear { eq, geometry };
    Ok(integrate(&mut sys, t0, y0, t1, ctl)?.0)
}

/// `psi_1 psi_2' - psi_2 psi_1'` for two linear states.
pub fn wronskian(a: &[Complex64; 2], b: &[Complex64; 2]) -> Complex64 {
    a[0] * b[1] - b[0] * a[1]
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_2, PI};

    use super::*;
    use crate::riemann_path::{make_straight, make_toboggan};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn decaying_start_on_real_axis() {
        let v = PowerLawPotential::default();
        let p = SheetPoint::new(6.0, 0.0).unwrap();
        let s = initial_state(&v, c(2.0, 0.0), p, AsymptoticKind::Decaying).unwrap();
        assert!((s.log_derivative - c(-6.0 + 0.5 / 6.0, 0.0)).norm() < 1e-15);
        let g = initial_state(&v, c(2.0, 0.0), p, AsymptoticKind::Growing).unwrap();
        assert!((g.log_derivative - c(6.0 - 1.5 / 6.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn wedge_admissibility() {
        let v = PowerLawPotential::default();
        let left = SheetPoint::new(8.0, PI).unwrap();
        assert!(initial_state(&v, c(1.0, 0.0), left, AsymptoticKind::Decaying).is_ok());
        let up = SheetPoint::new(8.0, FRAC_PI_2).unwrap();
        let err = initial_state(&v, c(1.0, 0.0), up, AsymptoticKind::Decaying).unwrap_err();
        assert!(matches!(err, Error::WedgeViolation { .. }));
        assert!(err.to_string().contains("pi/4"));
    }

    #[test]
    fn free_particle_constant_solution() {
        let v = PowerLawPotential {
            harmonic: 0.0,
            ..Default::default()
        };
        let contour = make_straight(0.5, 8.0, 11).unwrap();
        let p = contour.point(contour.t_in);
        let start = PropagationState {
            position: p,
            log_amplitude: c(0.0, 0.0),
            log_derivative: c(0.0, 0.0),
        };
        let out = transport(
            &Equation::new(&v, c(0.0, 0.0)),
            &contour.geometry,
            contour.t_in,
            start,
            &[0.0],
            &StepControl::default(),
        )
        .unwrap();
        assert_eq!(out[0].log_derivative, c(0.0, 0.0));
        assert_eq!(out[0].log_amplitude, c(0.0, 0.0));
    }

    #[test]
    fn vertex_log_derivative_matches_ground_state() {
        // alpha = 1/2, q = -: psi = e^{-x^2/2} with E = 1, psi'/psi = -x
        let v = PowerLawPotential::from_alpha(0.5);
        let eps = 0.5;
        let contour = make_straight(eps, 8.0, 11).unwrap();
        let ctl = StepControl::default();
        for end in [End::In, End::Out] {
            let s = propagate(&v, c(1.0, 0.0), &contour, end, &ctl).unwrap();
            assert!((s.log_derivative - c(0.0, eps)).norm() < 1e-8, "{:?}", s.log_derivative);
        }
        // q = +, E = 3: psi = x e^{-x^2/2}, psi'/psi = 1/x - x
        let x = c(0.0, -eps);
        let s = propagate(&v, c(3.0, 0.0), &contour, End::In, &ctl).unwrap();
        assert!((s.log_derivative - (1.0 / x - x)).norm() < 1e-8);
    }

    #[test]
    fn mismatch_off_eigenvalue() {
        let v = PowerLawPotential::from_alpha(0.5);
        let contour = make_straight(0.5, 8.0, 11).unwrap();
        let ctl = StepControl::default();
        let l = propagate(&v, c(2.0, 0.0), &contour, End::In, &ctl).unwrap();
        let r = propagate(&v, c(2.0, 0.0), &contour, End::Out, &ctl).unwrap();
        assert!(wronskian_mismatch(&l, &r).unwrap().norm() > 1e-2);
        assert_eq!(wronskian_mismatch(&l, &l).unwrap(), c(0.0, 0.0));
        let far = PropagationState {
            position: contour.point(1.0),
            ..l
        };
        assert!(wronskian_mismatch(&l, &far).is_err());
    }

    #[test]
    fn excited_state_through_nodes_on_toboggan() {
        // n = 2, q = -, alpha = 0.3: E = 8 + 2 - 0.6, several contour nodes
        let v = PowerLawPotential::from_alpha(0.3);
        let contour = make_toboggan(1, 0.5, 8.0, 64).unwrap();
        let ctl = StepControl::default();
        let e = c(9.4, 0.0);
        let l = propagate(&v, e, &contour, End::In, &ctl).unwrap();
        let r = propagate(&v, e, &contour, End::Out, &ctl).unwrap();
        assert!(wronskian_mismatch(&l, &r).unwrap().norm() < 1e-7);
    }

    #[test]
    fn linear_wronskian_constant() {
        let v = PowerLawPotential::from_alpha(0.3);
        let contour = make_straight(0.5, 8.0, 11).unwrap();
        let ctl = StepControl::default();
        let e = c(2.0, 0.5);
        let a0 = [c(1.0, 0.0), c(0.0, 0.0)];
        let b0 = [c(0.0, 0.0), c(1.0, 0.0)];
        let w0 = wronskian(&a0, &b0);
        for t1 in [1.0, 2.5, -2.0] {
            let a = propagate_linear(&Equation::new(&v, e), &contour.geometry, 0.0, a0, t1, &ctl).unwrap();
            let b = propagate_linear(&Equation::new(&v, e), &contour.geometry, 0.0, b0, t1, &ctl).unwrap();
            assert!((wronskian(&a, &b) - w0).norm() < 1e-8);
        }
    }
}
