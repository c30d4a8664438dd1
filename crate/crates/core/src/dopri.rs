//! Dormand-Prince 5(4) embedded Runge-Kutta pair for complex systems.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepControl {
    pub absolute_tolerance: f64,
    pub relative_tolerance: f64,
    /// Largest step in the contour parameter.
    pub max_step: f64,
    pub max_steps: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            absolute_tolerance: 1e-12,
            relative_tolerance: 1e-12,
            max_step: 0.25,
            max_steps: 500_000,
        }
    }
}

impl StepControl {
    pub fn validate(&self) -> Result<()> {
        if !(self.absolute_tolerance >= 1e-14 && self.relative_tolerance >= 1e-14) {
            return Err(Error::InvalidParameter(format!(
                "tolerances must be at least 1e-14, got ({}, {})",
                self.absolute_tolerance, self.relative_tolerance
            )));
        }
        if !(self.max_step > 0.0) || self.max_steps == 0 {
            return Err(Error::InvalidParameter(
                "max_step and max_steps must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn scaled(&self, factor: f64) -> StepControl {
        StepControl {
            absolute_tolerance: (self.absolute_tolerance * factor).max(1e-14),
            relative_tolerance: (self.relative_tolerance * factor).max(1e-14),
            ..*self
        }
    }
}

/// A first-order system `dy/dt = f(t, y)` with an optional hook that may
/// re-express the state after every accepted step.
pub trait OdeSystem<const N: usize> {
    fn rhs(&self, t: f64, y: &[Complex64; N]) -> Result<[Complex64; N]>;

    fn after_step(&mut self, _t: f64, _y: &mut [Complex64; N]) -> Result<()> {
        Ok(())
    }
}

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

fn comb<const N: usize>(y: &[Complex64; N], h: f64, terms: &[(f64, &[Complex64; N])]) -> [Complex64; N] {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        for (c, k) in terms {
            *o += h * c * k[i];
        }
    }
    out
}

/// Integrates from `t0` to `t1` (either direction). Returns the final state
/// and the number of accepted steps.
pub fn integrate<const N: usize, S: OdeSystem<N>>(
    sys: &mut S,
    t0: f64,
    y0: [Complex64; N],
    t1: f64,
    ctl: &StepControl,
) -> Result<([Complex64; N], usize)> {
    let span = t1 - t0;
    if span == 0.0 {
        return Ok((y0, 0));
    }
    let dir = span.signum();
    let mut t = t0;
    let mut y = y0;
    let mut h = (span.abs() / 64.0).min(ctl.max_step).min(1e-2);
    let mut k1 = sys.rhs(t, &y)?;
    let mut accepted = 0usize;
    let mut attempts = 0usize;
    loop {
        let remaining = (t1 - t) * dir;
        if remaining <= 1e-15 * (1.0 + t1.abs()) {
            break;
        }
        attempts += 1;
        if attempts > ctl.max_steps {
            return Err(Error::StepExhausted {
                steps: ctl.max_steps,
                t,
            });
        }
        let last = h >= remaining;
        let hs = if last { remaining } else { h } * dir;

        let k2 = sys.rhs(t + C2 * hs, &comb(&y, hs, &[(A21, &k1)]))?;
        let k3 = sys.rhs(t + C3 * hs, &comb(&y, hs, &[(A31, &k1), (A32, &k2)]))?;
        let k4 = sys.rhs(t + C4 * hs, &comb(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]))?;
        let k5 = sys.rhs(
            t + C5 * hs,
            &comb(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        )?;
        let t_new = if last { t1 } else { t + hs };
        let k6 = sys.rhs(
            t_new,
            &comb(&y, hs, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        )?;
        let y_new = comb(&y, hs, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        let k7 = sys.rhs(t_new, &y_new)?;

        let mut err: f64 = 0.0;
        for i in 0..N {
            let e = hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let scale = ctl.absolute_tolerance + ctl.relative_tolerance * y[i].norm().max(y_new[i].norm());
            err = err.max(e.norm() / scale);
        }
        if !err.is_finite() {
            h *= 0.2;
        } else if err <= 1.0 {
            t = t_new;
            y = y_new;
            accepted += 1;
            let before = y;
            sys.after_step(t, &mut y)?;
            k1 = if before == y { k7 } else { sys.rhs(t, &y)? };
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            if !last {
                h = (h * factor).min(ctl.max_step);
            }
        } else {
            h *= (0.9 * err.powf(-0.25)).clamp(0.1, 0.9);
        }
        if h < 1e-14 * (1.0 + t.abs()) {
            return Err(Error::StepUnderflow { t });
        }
    }
    Ok((y, accepted))
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Oscillator;

    impl OdeSystem<2> for Oscillator {
        fn rhs(&self, _t: f64, y: &[Complex64; 2]) -> Result<[Complex64; 2]> {
            Ok([y[1], -y[0]])
        }
    }

    struct Exponential(Complex64);

    impl OdeSystem<1> for Exponential {
        fn rhs(&self, _t: f64, y: &[Complex64; 1]) -> Result<[Complex64; 1]> {
            Ok([self.0 * y[0]])
        }
    }

    #[test]
    fn harmonic_motion() {
        let one = Complex64::new(1.0, 0.0);
        let (y, _) = integrate(
            &mut Oscillator,
            0.0,
            [one, Complex64::new(0.0, 0.0)],
            10.0,
            &StepControl::default(),
        )
        .unwrap();
        assert!((y[0] - 10f64.cos()).norm() < 1e-10);
        assert!((y[1] + 10f64.sin()).norm() < 1e-10);
    }

    #[test]
    fn backward_complex_exponential() {
        let lam = Complex64::new(0.3, 2.0);
        let one = Complex64::new(1.0, 0.0);
        let (y, _) = integrate(&mut Exponential(lam), 2.0, [one], -1.0, &StepControl::default()).unwrap();
        assert!((y[0] - (-3.0 * lam).exp()).norm() < 1e-10);
    }

    #[test]
    fn step_budget() {
        let ctl = StepControl {
            max_steps: 3,
            ..Default::default()
        };
        let one = Complex64::new(1.0, 0.0);
        let r = integrate(&mut Oscillator, 0.0, [one, one], 100.0, &ctl);
        assert!(matches!(r, Err(Error::StepExhausted { .. })));
    }
}
