//! Bound states by two-sided shooting, and the exact oscillator spectra.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::PowerLawPotential;
use crate::propagate::{end_state, transport, Equation, PropagationState, StepControl, Weight};
use crate::riemann_path::{Contour, End, EndCondition, SheetPoint};
use crate::specfun::laguerre;

pub const DEFAULT_GRID_POINTS: usize = 200;
pub const DEFAULT_REFINE_TOLERANCE: f64 = 1e-9;
const INTEGER_ALPHA_GAP: f64 = 1e-8;
const MAX_SECANT_ITERATIONS: usize = 60;
const MATCH_RADIUS: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quasiparity {
    Plus,
    Minus,
}

impl Quasiparity {
    pub fn sign(self) -> f64 {
        match self {
            Quasiparity::Plus => 1.0,
            Quasiparity::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Labels {
    pub n: usize,
    pub quasiparity: Quasiparity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenProblem {
    pub potential: PowerLawPotential,
    pub contour: Contour,
    /// Spectral weight; `None` is the ordinary energy.
    pub weight: Option<Weight>,
    pub search_window: (f64, f64),
    pub grid_points: usize,
    pub refine_tolerance: f64,
    pub step_control: StepControl,
}

impl EigenProblem {
    pub fn new(potential: PowerLawPotential, contour: Contour, search_window: (f64, f64)) -> Self {
        EigenProblem {
            potential,
            contour,
            weight: None,
            search_window,
            grid_points: DEFAULT_GRID_POINTS,
            refine_tolerance: DEFAULT_REFINE_TOLERANCE,
            step_control: StepControl::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (a, b) = self.search_window;
        if !(b > a) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidParameter(format!("empty search window [{a}, {b}]")));
        }
        if self.grid_points < 8 {
            return Err(Error::InvalidParameter(format!(
                "grid_points must be at least 8, got {}",
                self.grid_points
            )));
        }
        if !(self.refine_tolerance > 0.0) {
            return Err(Error::InvalidParameter("refine_tolerance must be positive".into()));
        }
        if self.weight.is_none() {
            if let Some(alpha) = self.potential.alpha() {
                if (alpha - alpha.round()).abs() < INTEGER_ALPHA_GAP {
                    return Err(Error::DegenerateAlpha(alpha));
                }
            }
        }
        self.step_control.validate()?;
        if self.weight.is_none() && self.potential.is_asymptotically_harmonic() {
            self.contour.check_wedges()?;
        }
        Ok(())
    }

    fn equation(&self, e: Complex64) -> Equation<'_> {
        Equation {
            potential: &self.potential,
            energy: e,
            weight: self.weight,
        }
    }

    /// Contour parameter where the two shots are compared: the vertex, or the
    /// point at `|x| = 1` past it when the vertex is closer to the origin.
    pub fn matching_parameter(&self) -> f64 {
        let c = &self.contour;
        if c.in_condition != EndCondition::Decaying || c.vertex().modulus >= MATCH_RADIUS {
            return c.t_match;
        }
        let (mut lo, mut hi) = (c.t_match, c.t_out);
        if c.point(hi).modulus <= MATCH_RADIUS {
            return c.t_match;
        }
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if c.point(mid).modulus < MATCH_RADIUS {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// States from both ends at the matching point for spectral parameter `e`.
    fn shoot(&self, e: Complex64) -> Result<Shot> {
        let eq = self.equation(e);
        let t = self.matching_parameter();
        let run = |end: End| -> Result<PropagationState> {
            let start = end_state(&eq, &self.contour, end)?;
            let t0 = self.contour.end_parameter(end);
            Ok(transport(&eq, &self.contour.geometry, t0, start, &[t], &self.step_control)?[0])
        };
        let (l, r) = (run(End::In)?, run(End::Out)?);
        let (ul, ur) = (l.log_derivative, r.log_derivative);
        let phase = Complex64::from_polar(1.0, l.log_amplitude.im + r.log_amplitude.im);
        Ok(Shot {
            mismatch: ul - ur,
            projective: phase * (ur - ul) / ((1.0 + ul.norm_sqr()) * (1.0 + ur.norm_sqr())).sqrt(),
        })
    }

    /// `u_L - u_R` at the matching point.
    pub fn mismatch(&self, e: Complex64) -> Result<Complex64> {
        Ok(self.shoot(e)?.mismatch)
    }
}

#[derive(Debug, Clone, Copy)]
struct Shot {
    mismatch: Complex64,
    /// Wronskian over the norms of both `(psi, psi')` vectors; bounded and
    /// continuous in `E`, real on the real axis for PT-symmetric problems.
    projective: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenResult {
    pub energy: Complex64,
    pub residual: f64,
    /// `|mismatch|` at the grid point that seeded the refinement.
    pub seed_residual: f64,
    pub index_hint: usize,
    pub labels: Option<Labels>,
    pub converged: bool,
}

/// Eigenvalues on the half-line: `4n + 2l + 3`.
pub fn oracle_tqm(n: usize, ell: usize) -> f64 {
    (4 * n + 2 * ell + 3) as f64
}

/// `4n + 2 +- 2 alpha`.
pub fn oracle_ptsqm(n: usize, alpha: f64, q: Quasiparity) -> f64 {
    4.0 * n as f64 + 2.0 + 2.0 * q.sign() * alpha
}

/// `x^{1/2 +- alpha} e^{-x^2/2} L_n^{(+-alpha)}(x^2)`, with the power
/// continued along the sheet of `p`.
pub fn oracle_wavefunction(n: usize, alpha: f64, q: Quasiparity, p: SheetPoint) -> Complex64 {
    let a = q.sign() * alpha;
    let x = p.embedded();
    let z = x * x;
    p.powf(0.5 + a) * (-0.5 * z).exp() * laguerre(n, a, z)
}

/// `psi'/psi` of [`oracle_wavefunction`].
pub fn oracle_log_derivative(n: usize, alpha: f64, q: Quasiparity, p: SheetPoint) -> Complex64 {
    let a = q.sign() * alpha;
    let x = p.embedded();
    let z = x * x;
    let dl = if n == 0 {
        Complex64::new(0.0, 0.0)
    } else {
        -laguerre(n - 1, a + 1.0, z)
    };
    (0.5 + a) / x - x + 2.0 * x * dl / laguerre(n, a, z)
}

/// Oracle levels `4n + 2 +- 2 alpha` inside `[lo, hi]`, sorted.
pub fn oracle_levels(alpha: f64, lo: f64, hi: f64) -> Vec<(f64, Labels)> {
    let mut out = Vec::new();
    for q in [Quasiparity::Plus, Quasiparity::Minus] {
        for n in 0.. {
            let e = oracle_ptsqm(n, alpha, q);
            if e > hi {
                break;
            }
            if e >= lo {
                out.push((e, Labels { n, quasiparity: q }));
            }
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

fn assign_labels(p: &EigenProblem, e: Complex64) -> Option<Labels> {
    let v = &p.potential;
    if p.weight.is_some() || v.harmonic != 1.0 || !v.poles.is_empty() || v.terms.iter().any(|t| t.g != 0.0) {
        return None;
    }
    let alpha = v.alpha()?;
    oracle_levels(alpha, e.re - 1.0, e.re + 1.0)
        .into_iter()
        .find(|(level, _)| (Complex64::new(*level, 0.0) - e).norm() < 1e-6)
        .map(|(_, l)| l)
}

fn grid<T: Send>(energies: &[f64], f: impl Fn(f64) -> T + Sync + Send) -> Vec<T> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        energies.par_iter().map(|&e| f(e)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        energies.iter().map(|&e| f(e)).collect()
    }
}

struct Refined {
    energy: Complex64,
    residual: f64,
    converged: bool,
}

fn secant(p: &EigenProblem, seed: f64, spacing: f64) -> Refined {
    let mut x0 = Complex64::new(seed, 0.0);
    let mut x1 = Complex64::new(seed + 0.05 * spacing, 0.01 * spacing);
    let (Ok(mut f0), Ok(mut f1)) = (p.mismatch(x0), p.mismatch(x1)) else {
        return Refined {
            energy: x0,
            residual: f64::INFINITY,
            converged: false,
        };
    };
    let tol = p.refine_tolerance;
    let width = p.search_window.1 - p.search_window.0;
    for _ in 0..MAX_SECANT_ITERATIONS {
        if f1.norm() <= tol {
            break;
        }
        let denom = f1 - f0;
        if denom.norm() == 0.0 {
            break;
        }
        let mut x2 = x1 - f1 * (x1 - x0) / denom;
        // damp wild jumps near poles of the mismatch
        let jump = x2 - x1;
        if jump.norm() > spacing * 4.0 {
            x2 = x1 + jump * (spacing * 4.0 / jump.norm());
        }
        if (x2 - Complex64::new(seed, 0.0)).norm() > width {
            return Refined {
                energy: x2,
                residual: f1.norm(),
                converged: false,
            };
        }
        match p.mismatch(x2) {
            Ok(f2) => {
                x0 = x1;
                f0 = f1;
                x1 = x2;
                f1 = f2;
            }
            Err(_) => {
                return Refined {
                    energy: x1,
                    residual: f1.norm(),
                    converged: false,
                }
            }
        }
        if (x1 - x0).norm() < 1e-15 * (1.0 + x1.norm()) {
            break;
        }
    }
    Refined {
        energy: x1,
        residual: f1.norm(),
        converged: f1.norm() <= tol,
    }
}

/// Real-axis scan of the shooting mismatch followed by complex secant
/// refinement of every sign change and local minimum.
pub fn find_eigenvalues(prob: &EigenProblem) -> Result<Vec<EigenResult>> {
    prob.validate()?;
    let (a, b) = prob.search_window;
    let m = prob.grid_points;
    let spacing = (b - a) / (m - 1) as f64;
    let energies: Vec<f64> = (0..m).map(|j| a + spacing * j as f64).collect();
    let shots = grid(&energies, |e| prob.shoot(Complex64::new(e, 0.0)).ok());

    let mut seeds: Vec<(f64, f64)> = Vec::new();
    for j in 0..m {
        let Some(s) = shots[j] else { continue };
        if j + 1 < m {
            if let Some(t) = shots[j + 1] {
                let (fa, fb) = (s.projective.re, t.projective.re);
                if fa == 0.0 || fa.signum() != fb.signum() {
                    let w = if fa == fb { 0.0 } else { fa / (fa - fb) };
                    let seed = energies[j] + w * spacing;
                    let near = if w < 0.5 { s } else { t };
                    seeds.push((seed, near.mismatch.norm()));
                }
            }
        }
        if j > 0 && j + 1 < m {
            if let (Some(l), Some(r)) = (shots[j - 1], shots[j + 1]) {
                let here = s.projective.norm();
                if here < l.projective.norm() && here < r.projective.norm() {
                    seeds.push((energies[j], s.mismatch.norm()));
                }
            }
        }
    }

    let refined = grid(&seeds.iter().map(|s| s.0).collect::<Vec<_>>(), |seed| {
        secant(prob, seed, spacing)
    });

    let mut results: Vec<EigenResult> = Vec::new();
    for ((_, seed_residual), r) in seeds.iter().zip(refined) {
        let e = r.energy;
        if !(e.re >= a - 1e-9 && e.re <= b + 1e-9) {
            continue;
        }
        if !r.converged && r.residual > 1e3 * prob.refine_tolerance.max(1e-6) {
            // seeds at projective minima that are not roots
            continue;
        }
        let dup_tol = (1e3 * prob.refine_tolerance).max(1e-7) * (1.0 + e.norm());
        if let Some(existing) = results.iter_mut().find(|x| (x.energy - e).norm() < dup_tol) {
            if r.residual < existing.residual {
                existing.energy = e;
                existing.residual = r.residual;
                existing.converged = r.converged;
            }
            existing.seed_residual = existing.seed_residual.max(*seed_residual);
            continue;
        }
        results.push(EigenResult {
            energy: e,
            residual: r.residual,
            seed_residual: *seed_residual,
            index_hint: 0,
            labels: assign_labels(prob, e),
            converged: r.converged,
        });
    }
    results.sort_by(|x, y| x.energy.re.total_cmp(&y.energy.re));
    for (i, r) in results.iter_mut().enumerate() {
        r.index_hint = i;
    }
    Ok(results)
}

/// Affine map `E -> scale E + shift` applied to the first list before pairing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyMap {
    pub scale: f64,
    pub shift: f64,
}

impl EnergyMap {
    pub const IDENTITY: EnergyMap = EnergyMap { scale: 1.0, shift: 0.0 };

    pub fn apply(&self, e: Complex64) -> Complex64 {
        self.scale * e + self.shift
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    /// `(index in a, index in b, |map(a) - b|)`
    pub matched: Vec<(usize, usize, f64)>,
    pub unmatched_a: Vec<usize>,
    pub unmatched_b: Vec<usize>,
}

impl CompareReport {
    pub fn all_matched(&self) -> bool {
        self.unmatched_a.is_empty() && self.unmatched_b.is_empty()
    }

    pub fn max_deviation(&self) -> f64 {
        self.matched.iter().map(|m| m.2).fold(0.0, f64::max)
    }
}

/// Pairs eigenvalues of `a` (after `map`) with those of `b` within `tol`,
/// closest pairs first.
pub fn spectrum_compare(a: &[EigenResult], b: &[EigenResult], map: EnergyMap, tol: f64) -> CompareReport {
    let mut pairs: Vec<(usize, usize, f64)> = Vec::new();
    for (i, x) in a.iter().enumerate() {
        let mx = map.apply(x.energy);
        for (j, y) in b.iter().enumerate() {
            let d = (mx - y.energy).norm();
            if d <= tol {
                pairs.push((i, j, d));
            }
        }
    }
    pairs.sort_by(|p, q| p.2.total_cmp(&q.2));
    let mut used_a = vec![false; a.len()];
    let mut used_b = vec![false; b.len()];
    let mut matched = Vec::new();
    for (i, j, d) in pairs {
        if !used_a[i] && !used_b[j] {
            used_a[i] = true;
            used_b[j] = true;
            matched.push((i, j, d));
        }
    }
    matched.sort_by_key(|m| (m.0, m.1));
    CompareReport {
        matched,
        unmatched_a: (0..a.len()).filter(|&i| !used_a[i]).collect(),
        unmatched_b: (0..b.len()).filter(|&j| !used_b[j]).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::riemann_path::make_straight;

    #[test]
    fn oracle_arithmetic() {
        assert_eq!(oracle_tqm(0, 0), 3.0);
        assert_eq!(oracle_tqm(2, 1), 13.0);
        assert_eq!(oracle_tqm(0, 5), 13.0);
        assert_eq!(oracle_ptsqm(0, 0.5, Quasiparity::Plus), 3.0);
        assert_eq!(oracle_ptsqm(0, 0.5, Quasiparity::Minus), 1.0);
        assert!((oracle_ptsqm(1, 0.3, Quasiparity::Plus) - 6.6).abs() < 1e-12);
        assert!((oracle_ptsqm(1, 0.3, Quasiparity::Minus) - 5.4).abs() < 1e-12);
        assert_eq!(
            oracle_ptsqm(3, 0.0, Quasiparity::Plus),
            oracle_ptsqm(3, 0.0, Quasiparity::Minus)
        );
    }

    #[test]
    fn oracle_wavefunction_simple_cases() {
        let x = 1.3;
        let p = SheetPoint::new(x, 0.0).unwrap();
        let plus = oracle_wavefunction(0, 0.5, Quasiparity::Plus, p);
        assert!((plus - x * (-x * x / 2.0f64).exp()).norm() < 1e-15);
        let minus = oracle_wavefunction(0, 0.5, Quasiparity::Minus, p);
        assert!((minus - (-x * x / 2.0f64).exp()).norm() < 1e-15);
    }

    #[test]
    fn oracle_log_derivative_by_differences() {
        let p = SheetPoint::new(1.1, -0.7).unwrap();
        let h = 1e-5;
        for (n, q) in [(0, Quasiparity::Plus), (2, Quasiparity::Minus), (3, Quasiparity::Plus)] {
            let f = |r: f64| oracle_wavefunction(n, 0.3, q, SheetPoint::new(r, p.argument).unwrap());
            let dpsi = (f(p.modulus + h) - f(p.modulus - h)) / (2.0 * h) / Complex64::from_polar(1.0, p.argument);
            let u = oracle_log_derivative(n, 0.3, q, p);
            assert!((dpsi / f(p.modulus) - u).norm() < 1e-8);
        }
    }

    #[test]
    fn rejects_integer_alpha() {
        let c = make_straight(0.5, 8.0, 11).unwrap();
        let p = EigenProblem::new(PowerLawPotential::from_alpha(1.0), c, (0.0, 5.0));
        assert!(matches!(find_eigenvalues(&p), Err(Error::DegenerateAlpha(_))));
    }

    #[test]
    fn shifted_oscillator_levels() {
        let c = make_straight(0.5, 8.0, 11).unwrap();
        let p = EigenProblem::new(PowerLawPotential::from_alpha(0.3), c, (0.0, 8.0));
        let found = find_eigenvalues(&p).unwrap();
        let expect = [1.4, 2.6, 5.4, 6.6];
        assert_eq!(found.len(), expect.len(), "{found:?}");
        for (r, e) in found.iter().zip(expect) {
            assert!(r.converged);
            assert!((r.energy - Complex64::new(e, 0.0)).norm() < 1e-6, "{r:?}");
            assert!(r.residual <= r.seed_residual);
        }
        assert_eq!(
            found[0].labels,
            Some(Labels {
                n: 0,
                quasiparity: Quasiparity::Minus
            })
        );
    }

    #[test]
    fn compare_identity() {
        let r = |e: f64| EigenResult {
            energy: Complex64::new(e, 0.0),
            residual: 0.0,
            seed_residual: 0.0,
            index_hint: 0,
            labels: None,
            converged: true,
        };
        let a = vec![r(1.0), r(3.0)];
        let rep = spectrum_compare(&a, &a, EnergyMap::IDENTITY, 1e-9);
        assert!(rep.all_matched());
        let rep = spectrum_compare(&a, &[r(1.0)], EnergyMap::IDENTITY, 1e-9);
        assert_eq!(rep.unmatched_a, vec![1]);
    }
}
