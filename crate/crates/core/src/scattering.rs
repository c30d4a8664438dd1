//! Scattering along anti-Stokes contours.
//!
//! On the rays of an anti-Stokes contour `r = i x^2` is real and both
//! asymptotic solutions oscillate. The basis waves are
//!
//! `f_plus  = e^{+ir/2} |r|^{+mu/2 - 1/4} S_plus`,
//! `f_minus = e^{-ir/2} |r|^{-mu/2 - 1/4} S_minus`,
//!
//! with `mu = E/2` and `S_plus`, `S_minus` the asymptotic series of the
//! oscillator solution. Multiplying by `|r|^{1/4}` gives the distorted waves
//! `e^{+-ir/2} |r|^{+-mu/2}` of the normal form in the variable `r`. A
//! scattering solution is `f_plus + B f_minus` on the in ray and
//! `(1 + F) f_plus` on the out ray.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::PowerLawPotential;
use crate::propagate::{propagate_linear, Equation, StepControl};
use crate::riemann_path::{make_anti_stokes_with_join, AntiStokesContour, Edge, End, SheetPoint, DEFAULT_JOIN_RADIUS};
use crate::specfun::{gamma, kummer_asymptotic_series, kummer_m, reciprocal_gamma, SeriesControl};

pub const DEFAULT_EXTRACTION_RADIUS: f64 = 20.0;
pub const DEFAULT_WINDOW_SAMPLES: usize = 64;
/// The window runs from the extraction radius to this multiple of it.
pub const WINDOW_SPAN: f64 = 1.5;
pub const CONDITIONING_LIMIT: f64 = 1e8;
pub const SERIES_ERROR_LIMIT: f64 = 1e-8;
const RESONANCE_GAP: f64 = 1e-14;
const MAX_SERIES_TERMS: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatterProblem {
    pub alpha: f64,
    pub energy: f64,
    pub winding: u32,
    pub branch: Edge,
    /// Smallest ray radius `|x|` used for extraction.
    pub extraction_radius: f64,
    pub window_samples: usize,
}

impl ScatterProblem {
    pub fn new(alpha: f64, energy: f64, winding: u32, branch: Edge) -> Self {
        ScatterProblem {
            alpha,
            energy,
            winding,
            branch,
            extraction_radius: DEFAULT_EXTRACTION_RADIUS,
            window_samples: DEFAULT_WINDOW_SAMPLES,
        }
    }

    pub fn mu(&self) -> f64 {
        self.energy / 2.0
    }

    pub fn validate(&self) -> Result<()> {
        if !self.alpha.is_finite() || !self.energy.is_finite() {
            return Err(Error::InvalidParameter("alpha and energy must be finite".into()));
        }
        if (self.alpha - self.alpha.round()).abs() < 1e-8 {
            return Err(Error::DegenerateAlpha(self.alpha));
        }
        if !(self.extraction_radius > DEFAULT_JOIN_RADIUS) {
            return Err(Error::InvalidParameter(format!(
                "extraction radius must exceed the join radius {DEFAULT_JOIN_RADIUS}, got {}",
                self.extraction_radius
            )));
        }
        if self.window_samples < 8 {
            return Err(Error::InvalidParameter("window needs at least 8 samples".into()));
        }
        Ok(())
    }

    pub fn contour(&self) -> Result<AntiStokesContour> {
        make_anti_stokes_with_join(
            self.winding,
            self.branch,
            self.extraction_radius * WINDOW_SPAN,
            DEFAULT_JOIN_RADIUS,
        )
    }

    fn window(&self) -> Vec<f64> {
        let (lo, hi) = (self.extraction_radius, self.extraction_radius * WINDOW_SPAN);
        let n = self.window_samples;
        (0..n).map(|j| lo + (hi - lo) * j as f64 / (n - 1) as f64).collect()
    }
}

/// Coefficients of a solution on `f_plus` and `f_minus` on both rays.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasisCoefficients {
    pub in_plus: Complex64,
    pub in_minus: Complex64,
    pub out_plus: Complex64,
    pub out_minus: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatterResult {
    pub backward: Complex64,
    pub forward: Complex64,
    pub basis_coefficients: BasisCoefficients,
    /// Condition estimate of the extraction (1 for the closed form).
    pub conditioning: f64,
    /// Truncation error of the asymptotic series at the smallest radius used.
    pub series_error: f64,
    /// Some `1/Gamma` in the connection coefficients vanishes.
    pub resonance: bool,
    /// Smallest `|1/Gamma|` among the connection coefficients.
    pub resonance_proximity: f64,
    pub trusted: bool,
    pub flags: Vec<String>,
}

/// `r` with `x^2 = -i r`; defined on anti-Stokes rays only.
pub fn radial_variable(p: SheetPoint) -> Result<f64> {
    // 2 theta + pi/2 must be a multiple of pi
    let phase = 2.0 * p.argument + FRAC_PI_2;
    let k = (phase / PI).round();
    if (phase - k * PI).abs() > 1e-9 * (1.0 + phase.abs()) {
        return Err(Error::InvalidParameter(format!(
            "arg x = {} is not an anti-Stokes direction (pi/4 mod pi/2)",
            p.argument
        )));
    }
    let sign = if (k as i64).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    Ok(sign * p.modulus * p.modulus)
}

/// `r^{1/4 + alpha/2} e^{ir/2} 1F1((alpha + 1 - mu)/2, alpha + 1; -i r)`,
/// with `arg r = -pi` for negative `r`.
pub fn chi_solution(alpha: f64, mu: f64, r: f64) -> Result<Complex64> {
    let b = alpha + 1.0;
    if b <= 0.0 && b == b.round() {
        return Err(Error::GammaPole(format!("alpha + 1 = {b}")));
    }
    let a = (alpha + 1.0 - mu) / 2.0;
    let arg_r = if r < 0.0 { -PI } else { 0.0 };
    let p = 0.25 + alpha / 2.0;
    let power = Complex64::from_polar(r.abs().powf(p), p * arg_r);
    let m = kummer_m(
        Complex64::new(a, 0.0),
        Complex64::new(b, 0.0),
        Complex64::new(0.0, -r),
        &SeriesControl::default(),
    )?;
    Ok(power * Complex64::from_polar(1.0, r / 2.0) * m)
}

/// Energies `E = 2 mu_k`, `mu_k = alpha - 1 - 2k > 0`, at which `1/Gamma((1 - alpha + mu)/2)`
/// vanishes, largest first.
pub fn resonance_energies(alpha: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|k| alpha - 1.0 - 2.0 * k as f64)
        .take_while(|&mu| mu > 0.0)
        .map(|mu| 2.0 * mu)
        .collect()
}

/// Basis waves at `p` on a ray, with the anharmonic phase `phi`.
fn basis(alpha: f64, mu: f64, p: SheetPoint, correction: (Complex64, Complex64)) -> ([Complex64; 2], f64) {
    let (phi, amplitude) = correction;
    let x = p.embedded();
    let z = x * x;
    let r = (Complex64::new(0.0, 1.0) * z).re;
    let a = Complex64::new((alpha + 1.0 - mu) / 2.0, 0.0);
    let b = Complex64::new(alpha + 1.0, 0.0);
    let (splus, sminus, err) = kummer_asymptotic_series(a, b, z, MAX_SERIES_TERMS);
    let ar = r.abs();
    let fp = amplitude * Complex64::from_polar(ar.powf(mu / 2.0 - 0.25), r / 2.0) * splus * (-phi).exp();
    let fm = amplitude * Complex64::from_polar(ar.powf(-mu / 2.0 - 0.25), -r / 2.0) * sminus * phi.exp();
    ([fp, fm], err)
}

/// Coefficients of `x^{alpha + 1/2} e^{-x^2/2} M(a, alpha + 1, x^2)` on
/// `(f_plus, f_minus)` along the ray at unwound angle `theta`.
fn connection(alpha: f64, mu: f64, theta: f64) -> Result<([Complex64; 2], [f64; 2])> {
    let a = (alpha + 1.0 - mu) / 2.0;
    let b = alpha + 1.0;
    let gb = gamma(Complex64::new(b, 0.0))?;
    let arg_z = Complex64::from_polar(1.0, 2.0 * theta).arg();
    let sigma = if arg_z > 0.0 { 1.0 } else { -1.0 };
    let rg_ba = reciprocal_gamma(Complex64::new(b - a, 0.0));
    let rg_a = reciprocal_gamma(Complex64::new(a, 0.0));
    let s = alpha + 0.5;
    let plus = gb * rg_ba * Complex64::from_polar(1.0, sigma * PI * a + s * theta - a * arg_z);
    let minus = gb * rg_a * Complex64::from_polar(1.0, s * theta + (a - b) * arg_z);
    Ok(([plus, minus], [rg_ba.norm(), rg_a.norm()]))
}

struct Amplitudes {
    backward: Complex64,
    forward: Complex64,
    coefficients: BasisCoefficients,
    determinant_scale: f64,
}

/// Given two solutions with ray coefficients `s1`, `s2` (each `[in+, in-, out+, out-]`),
/// forms the combination with no `f_minus` on the out ray and unit `f_plus` on the in ray.
fn combine(s1: [Complex64; 4], s2: [Complex64; 4]) -> Result<Amplitudes> {
    // A s1[3] + C s2[3] = 0, A s1[0] + C s2[0] = 1
    let det = s2[3] * s1[0] - s1[3] * s2[0];
    let scale = (s1[3].norm() * s2[0].norm()).max(s2[3].norm() * s1[0].norm());
    if det.norm() <= 1e-300 || det.norm() <= 1e-15 * scale {
        return Err(Error::Resonance {
            argument: "no combination has unit incident wave and no reflected out wave".into(),
        });
    }
    let a = s2[3] / det;
    let c = -s1[3] / det;
    let coefficients = BasisCoefficients {
        in_plus: a * s1[0] + c * s2[0],
        in_minus: a * s1[1] + c * s2[1],
        out_plus: a * s1[2] + c * s2[2],
        out_minus: a * s1[3] + c * s2[3],
    };
    Ok(Amplitudes {
        backward: coefficients.in_minus,
        forward: coefficients.out_plus - 1.0,
        coefficients,
        determinant_scale: if scale > 0.0 { scale / det.norm() } else { 1.0 },
    })
}

/// Closed-form amplitudes for `x^2 + (alpha^2 - 1/4)/x^2` from the
/// connection coefficients of `psi_alpha` and `psi_{-alpha}`.
pub fn analytic_amplitudes(prob: &ScatterProblem) -> Result<ScatterResult> {
    prob.validate()?;
    analytic_amplitudes_on(&prob.contour()?, prob.alpha, prob.mu())
}

pub fn analytic_amplitudes_on(contour: &AntiStokesContour, alpha: f64, mu: f64) -> Result<ScatterResult> {
    let mut solutions = [[Complex64::new(0.0, 0.0); 4]; 2];
    let mut proximity = f64::INFINITY;
    for (k, sign) in [1.0, -1.0].into_iter().enumerate() {
        let (cin, pin) = connection(sign * alpha, mu, contour.theta_in)?;
        let (cout, _) = connection(sign * alpha, mu, contour.theta_out)?;
        solutions[k] = [cin[0], cin[1], cout[0], cout[1]];
        proximity = proximity.min(pin[0]).min(pin[1]);
    }
    let amp = combine(solutions[0], solutions[1])?;
    let resonance = proximity < RESONANCE_GAP;
    let mut flags = Vec::new();
    if resonance {
        flags.push("resonance: a connection coefficient 1/Gamma vanishes".to_string());
    }
    Ok(ScatterResult {
        backward: amp.backward,
        forward: amp.forward,
        basis_coefficients: amp.coefficients,
        conditioning: amp.determinant_scale,
        series_error: 0.0,
        resonance,
        resonance_proximity: proximity,
        trusted: amp.determinant_scale <= CONDITIONING_LIMIT,
        flags,
    })
}

/// Second-order WKB correction from the non-constant power terms `P`: the
/// phase `Phi` with `f_plus e^{-Phi}`, `f_minus e^{+Phi}`, and the common
/// amplitude factor `(1 + P / x^2)^{-1/4}`.
fn anharmonic_correction(v: &PowerLawPotential, p: SheetPoint, energy: f64) -> (Complex64, Complex64) {
    let ix = p.times_i();
    let x = p.embedded();
    let terms: Vec<(f64, f64)> = v
        .terms
        .iter()
        .filter(|t| t.g != 0.0 && !t.beta.is_zero())
        .map(|t| (t.beta.value(), t.g))
        .collect();
    let mut phi = Complex64::new(0.0, 0.0);
    let mut pert = Complex64::new(0.0, 0.0);
    for &(b, g) in &terms {
        pert += g * ix.powf(b);
        phi += g * (ix.powf(b) / (2.0 * b) + energy * ix.powf(b - 2.0) / (4.0 * (2.0 - b)));
        for &(b2, g2) in &terms {
            let s = b + b2;
            phi += g
                * g2
                * if (s - 2.0).abs() < 1e-12 {
                    Complex64::new(ix.modulus.ln(), ix.argument) / 8.0
                } else {
                    ix.powf(s - 2.0) / (8.0 * (s - 2.0))
                };
        }
    }
    let amplitude = (1.0 + pert / (x * x)).powf(-0.25);
    (phi, amplitude)
}

fn effective_mu(v: &PowerLawPotential, energy: f64) -> f64 {
    let shift: f64 = v.terms.iter().filter(|t| t.beta.is_zero()).map(|t| t.g).sum();
    (energy - shift) / 2.0
}

/// Least-squares fit of `psi` samples onto the basis; returns the two
/// coefficients and the condition number of the column-normalized design.
fn fit(rows: &[[Complex64; 2]], values: &[Complex64]) -> Result<([Complex64; 2], f64)> {
    let mut g = [[Complex64::new(0.0, 0.0); 2]; 2];
    let mut rhs = [Complex64::new(0.0, 0.0); 2];
    for (row, y) in rows.iter().zip(values) {
        for i in 0..2 {
            for j in 0..2 {
                g[i][j] += row[i].conj() * row[j];
            }
            rhs[i] += row[i].conj() * y;
        }
    }
    let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    if det.norm() == 0.0 {
        return Err(Error::SingularSystem(
            "extraction basis is degenerate on the window".into(),
        ));
    }
    let c0 = (g[1][1] * rhs[0] - g[0][1] * rhs[1]) / det;
    let c1 = (g[0][0] * rhs[1] - g[1][0] * rhs[0]) / det;
    let cos = (g[0][1].norm() / (g[0][0].re * g[1][1].re).sqrt()).min(1.0);
    let cond = if cos >= 1.0 {
        f64::INFINITY
    } else {
        ((1.0 + cos) / (1.0 - cos)).sqrt()
    };
    Ok(([c0, c1], cond))
}

/// Samples of the two vertex solutions `(1, 0)` and `(0, 1)` at radii `rhos`
/// on the ray of `end`.
fn ray_samples(
    eq: &Equation,
    contour: &AntiStokesContour,
    end: End,
    rhos: &[f64],
    ctl: &StepControl,
) -> Result<[Vec<Complex64>; 2]> {
    let segments = contour.path_to(end, rhos.last().copied().unwrap_or(contour.join_radius));
    let mut out = [Vec::with_capacity(rhos.len()), Vec::with_capacity(rhos.len())];
    let starts = [
        [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
    ];
    for (k, y0) in starts.into_iter().enumerate() {
        let arc = &segments[0];
        let mut y = propagate_linear(eq, &arc.geometry, arc.t0, y0, arc.t1, ctl)?;
        let ray = &segments[1];
        let mut t = ray.t0;
        for &rho in rhos {
            y = propagate_linear(eq, &ray.geometry, t, y, rho, ctl)?;
            t = rho;
            out[k].push(y[0]);
        }
    }
    Ok(out)
}

struct Extraction {
    /// Ray coefficients `[in+, in-, out+, out-]` of the vertex solutions `(1, 0)` and `(0, 1)`.
    coefficients: [[Complex64; 4]; 2],
    conditioning: f64,
    series_error: f64,
}

fn extract(
    v: &PowerLawPotential,
    contour: &AntiStokesContour,
    prob: &ScatterProblem,
    ctl: &StepControl,
) -> Result<Extraction> {
    if v.harmonic != 1.0 || !v.is_asymptotically_harmonic() {
        return Err(Error::InvalidParameter(
            "scattering needs an x^2-dominated potential with unit coefficient".into(),
        ));
    }
    if !v.poles.is_empty() {
        return Err(Error::InvalidParameter(
            "scattering does not support off-origin poles".into(),
        ));
    }
    match v.alpha() {
        Some(a) if (a - prob.alpha.abs()).abs() < 1e-9 => {}
        _ => {
            return Err(Error::InvalidParameter(format!(
                "potential centrifugal term does not match alpha = {}",
                prob.alpha
            )))
        }
    }
    let eq = Equation::new(v, Complex64::new(prob.energy, 0.0));
    let mu = effective_mu(v, prob.energy);
    let rhos = prob.window();
    let mut ex = Extraction {
        coefficients: [[Complex64::new(0.0, 0.0); 4]; 2],
        conditioning: 1.0,
        series_error: 0.0,
    };
    for (slot, end) in [(0usize, End::In), (2usize, End::Out)] {
        let samples = ray_samples(&eq, contour, end, &rhos, ctl)?;
        let rows: Vec<[Complex64; 2]> = rhos
            .iter()
            .map(|&rho| {
                let p = contour.ray_point(end, rho);
                let (row, err) = basis(prob.alpha, mu, p, anharmonic_correction(v, p, 2.0 * mu));
                ex.series_error = ex.series_error.max(err);
                row
            })
            .collect();
        for (k, s) in samples.iter().enumerate() {
            let (c, cond) = fit(&rows, s)?;
            ex.conditioning = ex.conditioning.max(cond);
            ex.coefficients[k][slot] = c[0];
            ex.coefficients[k][slot + 1] = c[1];
        }
    }
    Ok(ex)
}

/// Amplitudes by direct integration of `-psi'' + V psi = E psi` along the
/// anti-Stokes contour and least-squares projection on the basis waves.
pub fn numerical_amplitudes(v: &PowerLawPotential, prob: &ScatterProblem, ctl: &StepControl) -> Result<ScatterResult> {
    prob.validate()?;
    numerical_amplitudes_on(v, &prob.contour()?, prob, ctl)
}

pub fn numerical_amplitudes_on(
    v: &PowerLawPotential,
    contour: &AntiStokesContour,
    prob: &ScatterProblem,
    ctl: &StepControl,
) -> Result<ScatterResult> {
    let ex = extract(v, contour, prob, ctl)?;
    let amp = combine(ex.coefficients[0], ex.coefficients[1])?;
    let conditioning = ex.conditioning.max(amp.determinant_scale);
    let series_error = ex.series_error;
    let mut flags = Vec::new();
    if conditioning > CONDITIONING_LIMIT {
        flags.push(format!(
            "ill-conditioned extraction: condition estimate {conditioning:.3e}"
        ));
    }
    if series_error > SERIES_ERROR_LIMIT {
        flags.push(format!(
            "ill-conditioned extraction: asymptotic series error {series_error:.3e} at radius {}",
            prob.extraction_radius
        ));
    }
    let trusted = flags.is_empty();
    let mu = effective_mu(v, prob.energy);
    let proximity = [1.0, -1.0]
        .iter()
        .flat_map(|s| {
            let a = (s * prob.alpha + 1.0 - mu) / 2.0;
            let b = s * prob.alpha + 1.0;
            [
                reciprocal_gamma(Complex64::new(a, 0.0)).norm(),
                reciprocal_gamma(Complex64::new(b - a, 0.0)).norm(),
            ]
        })
        .fold(f64::INFINITY, f64::min);
    let resonance = proximity < RESONANCE_GAP;
    if resonance {
        flags.push("resonance: a connection coefficient 1/Gamma vanishes".to_string());
    }
    Ok(ScatterResult {
        backward: amp.backward,
        forward: amp.forward,
        basis_coefficients: amp.coefficients,
        conditioning,
        series_error,
        resonance,
        resonance_proximity: proximity,
        trusted,
        flags,
    })
}

/// Slope of `log(|r|^{1/4} |psi|)` against `log |r|` for the scattering
/// solution on the out ray over `|x|` in `[rho_lo, rho_hi]`.
pub fn distortion_exponent(
    v: &PowerLawPotential,
    prob: &ScatterProblem,
    rho_lo: f64,
    rho_hi: f64,
    samples: usize,
    ctl: &StepControl,
) -> Result<f64> {
    prob.validate()?;
    if !(rho_hi > rho_lo && rho_lo > DEFAULT_JOIN_RADIUS) || samples < 2 {
        return Err(Error::InvalidParameter(format!("bad fit window [{rho_lo}, {rho_hi}]")));
    }
    let contour = prob.contour()?;
    let ex = extract(v, &contour, prob, ctl)?;
    let (s1, s2) = (ex.coefficients[0], ex.coefficients[1]);
    let det = s2[3] * s1[0] - s1[3] * s2[0];
    let (wa, wc) = (s2[3] / det, -s1[3] / det);
    let eq = Equation::new(v, Complex64::new(prob.energy, 0.0));
    let rhos: Vec<f64> = (0..samples)
        .map(|j| rho_lo + (rho_hi - rho_lo) * j as f64 / (samples - 1) as f64)
        .collect();
    let data = ray_samples(&eq, &contour, End::Out, &rhos, ctl)?;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for (j, rho) in rhos.iter().enumerate() {
        let psi = wa * data[0][j] + wc * data[1][j];
        let lr = (rho * rho).ln();
        let ly = psi.norm().ln() + 0.25 * lr;
        sx += lr;
        sy += ly;
        sxx += lr * lr;
        sxy += lr * ly;
    }
    let n = samples as f64;
    Ok((n * sxy - sx * sy) / (n * sxx - sx * sx))
}

/// PT image of the contour: rays `theta -> -pi - theta`, with the in and out
/// labels kept.
pub fn pt_mirror(contour: &AntiStokesContour) -> AntiStokesContour {
    let mirror = |ps: &[SheetPoint]| ps.iter().map(|p| p.pt_image()).collect();
    AntiStokesContour {
        theta_in: -PI - contour.theta_in,
        theta_out: -PI - contour.theta_out,
        in_samples: mirror(&contour.in_samples),
        out_samples: mirror(&contour.out_samples),
        ..contour.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ho(alpha: f64) -> PowerLawPotential {
        PowerLawPotential::from_alpha(alpha)
    }

    #[test]
    fn resonance_list() {
        assert_eq!(resonance_energies(3.5, 5), vec![5.0, 1.0]);
        assert!(resonance_energies(0.7, 3).is_empty());
    }

    #[test]
    fn resonance_raises_flag() {
        let r = analytic_amplitudes(&ScatterProblem::new(3.5, 5.0, 0, Edge::LowerEdge)).unwrap();
        assert!(r.resonance);
        assert!(r.resonance_proximity < 1e-14);
    }

    #[test]
    fn radial_variable_on_rays() {
        let p = SheetPoint::new(3.0, -0.75 * PI).unwrap();
        assert!((radial_variable(p).unwrap() + 9.0).abs() < 1e-12);
        let q = SheetPoint::new(3.0, -0.25 * PI).unwrap();
        assert!((radial_variable(q).unwrap() - 9.0).abs() < 1e-12);
        assert!(radial_variable(SheetPoint::new(1.0, 0.1).unwrap()).is_err());
    }

    #[test]
    fn analytic_matches_numerical() {
        let prob = ScatterProblem::new(0.3, 2.2, 0, Edge::LowerEdge);
        let a = analytic_amplitudes(&prob).unwrap();
        let n = numerical_amplitudes(&ho(0.3), &prob, &StepControl::default()).unwrap();
        assert!(n.trusted, "{:?}", n.flags);
        assert!(
            (a.backward - n.backward).norm() < 1e-6,
            "{:?} {:?}",
            a.backward,
            n.backward
        );
        assert!((a.forward - n.forward).norm() < 1e-6, "{:?} {:?}", a.forward, n.forward);
    }

    #[test]
    fn pt_mirror_conjugates() {
        let prob = ScatterProblem::new(0.4, 1.3, 1, Edge::UpperEdge);
        let c = prob.contour().unwrap();
        let a = analytic_amplitudes_on(&c, 0.4, 0.65).unwrap();
        let b = analytic_amplitudes_on(&pt_mirror(&c), 0.4, 0.65).unwrap();
        assert!((a.backward.conj() - b.backward).norm() < 1e-10, "{:?} {:?}", a, b);
        assert!((a.forward.conj() - b.forward).norm() < 1e-10);
    }

    #[test]
    fn chi_matches_connection_form() {
        // chi is a linear combination of the two oscillatory waves; check its
        // large-r envelope is bounded between the two power laws
        let (alpha, mu) = (0.3, 1.1);
        for r in [400.0, 900.0] {
            let c = chi_solution(alpha, mu, r).unwrap();
            assert!(c.is_finite());
            assert!(c.norm() < 10.0 * r.powf(mu / 2.0 + 0.25));
        }
    }
}
