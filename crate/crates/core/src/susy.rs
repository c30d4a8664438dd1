//! Superpotentials and supersymmetric partner potentials.

use std::fmt;

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::PowerLawPotential;
use crate::rational::Rational;
use crate::spectrum::Quasiparity;

/// Coefficients below this fraction of the largest one are dropped.
pub const PRUNE_TOLERANCE: f64 = 1e-12;
const ROOT_CLUSTER: f64 = 1e-5;
const CHECK_TOLERANCE: f64 = 1e-8;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Polynomial in `x`, coefficients in ascending order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        let mut p = Polynomial { coeffs };
        p.prune();
        p
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Polynomial::new(coeffs.iter().map(|&a| c(a)).collect())
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(a: Complex64) -> Self {
        Polynomial::new(vec![a])
    }

    /// `x^k`.
    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![c(0.0); k + 1];
        coeffs[k] = c(1.0);
        Polynomial { coeffs }
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial at 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs.last().copied().unwrap_or(c(0.0))
    }

    fn prune(&mut self) {
        let scale = self.coeffs.iter().map(|a| a.norm()).fold(0.0, f64::max);
        for a in &mut self.coeffs {
            if a.re.abs() <= PRUNE_TOLERANCE * scale {
                a.re = 0.0;
            }
            if a.im.abs() <= PRUNE_TOLERANCE * scale {
                a.im = 0.0;
            }
        }
        while self.coeffs.last().is_some_and(|a| a.norm() == 0.0) {
            self.coeffs.pop();
        }
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(c(0.0), |acc, &a| acc * x + a)
    }

    pub fn derivative(&self) -> Self {
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &a)| a * k as f64)
                .collect(),
        )
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Polynomial::new(self.coeffs.iter().map(|&a| a * s).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Polynomial::new(
            (0..n)
                .map(|k| self.coeffs.get(k).copied().unwrap_or(c(0.0)) + other.coeffs.get(k).copied().unwrap_or(c(0.0)))
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(c(-1.0)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![c(0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }

    /// Quotient and remainder.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self)> {
        if divisor.is_zero() {
            return Err(Error::InvalidParameter("division by the zero polynomial".into()));
        }
        let mut rem = self.coeffs.clone();
        let d = divisor.coeffs.len();
        if rem.len() < d {
            return Ok((Polynomial::zero(), self.clone()));
        }
        let lead = divisor.leading();
        let mut quot = vec![c(0.0); rem.len() - d + 1];
        for k in (0..quot.len()).rev() {
            let f = rem[k + d - 1] / lead;
            quot[k] = f;
            for (j, &b) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= f * b;
            }
            rem[k + d - 1] = c(0.0);
        }
        rem.truncate(d - 1);
        // remainder is judged against the dividend's scale
        let scale = self.coeffs.iter().map(|a| a.norm()).fold(0.0, f64::max);
        for a in &mut rem {
            if a.norm() <= 1e-11 * scale {
                *a = c(0.0);
            }
        }
        Ok((Polynomial::new(quot), Polynomial::new(rem)))
    }

    fn monic(&self) -> Self {
        self.scale(self.leading().inv())
    }

    /// Monic greatest common divisor, with remainders below `1e-9` of the
    /// operands treated as zero.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        if a.is_zero() {
            return if b.is_zero() {
                Polynomial::constant(c(1.0))
            } else {
                b.monic()
            };
        }
        while !b.is_zero() {
            let (_, r) = match a.monic().div_rem(&b.monic()) {
                Ok(qr) => qr,
                Err(_) => break,
            };
            let r_scale = r.coeffs.iter().map(|x| x.norm()).fold(0.0, f64::max);
            let a_scale = a.monic().coeffs.iter().map(|x| x.norm()).fold(0.0, f64::max);
            a = b;
            b = if r_scale <= 1e-9 * a_scale {
                Polynomial::zero()
            } else {
                r
            };
        }
        a.monic()
    }

    /// Roots with multiplicity. Zero roots are split off exactly; the rest
    /// come from the eigenvalues of the companion matrix, polished by Newton steps.
    pub fn roots(&self) -> Vec<Complex64> {
        let zeros = self.coeffs.iter().take_while(|a| a.norm() == 0.0).count();
        let rest = Polynomial {
            coeffs: self.coeffs[zeros..].to_vec(),
        };
        let mut out = vec![c(0.0); zeros];
        let n = rest.degree();
        if n == 0 {
            return out;
        }
        let lead = rest.leading();
        let mut m = DMatrix::<Complex64>::zeros(n, n);
        for i in 1..n {
            m[(i, i - 1)] = c(1.0);
        }
        for i in 0..n {
            m[(i, n - 1)] = -rest.coeffs[i] / lead;
        }
        let eigen: Vec<Complex64> = match Schur::try_new(m, f64::EPSILON, 100 * n.max(10)) {
            Some(schur) => {
                let (_, t) = schur.unpack();
                (0..n).map(|i| t[(i, i)]).collect()
            }
            None => rest.aberth(),
        };
        let dp = rest.derivative();
        out.extend(eigen.into_iter().map(|mut z| {
            for _ in 0..3 {
                let d = dp.eval(z);
                if d.norm() == 0.0 {
                    break;
                }
                let step = rest.eval(z) / d;
                if !step.is_finite() || step.norm() > 1e-3 * (1.0 + z.norm()) {
                    break;
                }
                z -= step;
            }
            z
        }));
        out
    }

    /// Simultaneous root iteration, used when the eigenvalue solver does not settle.
    fn aberth(&self) -> Vec<Complex64> {
        let n = self.degree();
        let radius = 1.0
            + self.coeffs[..n]
                .iter()
                .map(|a| (a / self.leading()).norm())
                .fold(0.0, f64::max);
        let mut z: Vec<Complex64> = (0..n)
            .map(|k| Complex64::from_polar(radius, 0.4 + std::f64::consts::TAU * k as f64 / n as f64))
            .collect();
        let dp = self.derivative();
        for _ in 0..500 {
            let mut moved: f64 = 0.0;
            for i in 0..n {
                let ratio = self.eval(z[i]) / dp.eval(z[i]);
                let repulsion: Complex64 = (0..n).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
                let step = ratio / (c(1.0) - ratio * repulsion);
                if step.is_finite() {
                    z[i] -= step;
                    moved = moved.max(step.norm());
                }
            }
            if moved < 1e-15 * radius {
                break;
            }
        }
        z
    }

    /// `L_n^{(a)}(x^2)` as a polynomial in `x`.
    pub fn laguerre_in_square(n: usize, a: f64) -> Self {
        // L_n^{(a)}(z) = sum_k (-1)^k binom(n + a, n - k) z^k / k!
        let mut coeffs = vec![c(0.0); 2 * n + 1];
        let mut term = 1.0;
        for k in 0..n {
            term *= (a + (k + 1) as f64) / (k + 1) as f64;
        }
        // term = binom(n + a, n); walk k upwards
        for k in 0..=n {
            coeffs[2 * k] = c(term);
            if k < n {
                term *= -((n - k) as f64) / ((a + (k + 1) as f64) * (k + 1) as f64);
            }
        }
        Polynomial::new(coeffs)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, a) in self.coeffs.iter().enumerate().rev() {
            if a.norm() == 0.0 {
                continue;
            }
            let (sign, mag) = if a.im == 0.0 {
                (if a.re < 0.0 { "-" } else { "+" }, format_real(a.re.abs(), k))
            } else {
                (
                    "+",
                    format!("({} {} {}i)", a.re, if a.im < 0.0 { "-" } else { "+" }, a.im.abs()),
                )
            };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            write!(f, "{mag}")?;
            match k {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{k}")?,
            }
        }
        Ok(())
    }
}

fn format_real(v: f64, power: usize) -> String {
    if v == 1.0 && power > 0 {
        String::new()
    } else if power > 0 {
        format!("{v}*")
    } else {
        format!("{v}")
    }
}

/// Quotient of two polynomials, kept with common factors cancelled and a
/// monic denominator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalExpression {
    pub numerator: Polynomial,
    pub denominator: Polynomial,
}

impl RationalExpression {
    pub fn new(numerator: Polynomial, denominator: Polynomial) -> Result<Self> {
        if denominator.is_zero() {
            return Err(Error::InvalidParameter("zero denominator".into()));
        }
        Ok(RationalExpression { numerator, denominator }.reduced())
    }

    pub fn polynomial(p: Polynomial) -> Self {
        RationalExpression {
            numerator: p,
            denominator: Polynomial::constant(c(1.0)),
        }
    }

    fn reduced(self) -> Self {
        if self.numerator.is_zero() {
            return RationalExpression::polynomial(Polynomial::zero());
        }
        let g = self.numerator.gcd(&self.denominator);
        let (mut num, mut den) = (self.numerator, self.denominator);
        if g.degree() > 0 {
            num = num.div_rem(&g).map(|q| q.0).unwrap_or(num);
            den = den.div_rem(&g).map(|q| q.0).unwrap_or(den);
        }
        let lead = den.leading();
        RationalExpression {
            numerator: num.scale(lead.inv()),
            denominator: den.monic(),
        }
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        self.numerator.eval(x) / self.denominator.eval(x)
    }

    pub fn add(&self, other: &Self) -> Self {
        RationalExpression {
            numerator: self
                .numerator
                .mul(&other.denominator)
                .add(&other.numerator.mul(&self.denominator)),
            denominator: self.denominator.mul(&other.denominator),
        }
        .reduced()
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(c(-1.0)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        RationalExpression {
            numerator: self.numerator.mul(&other.numerator),
            denominator: self.denominator.mul(&other.denominator),
        }
        .reduced()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        RationalExpression {
            numerator: self.numerator.scale(s),
            denominator: self.denominator.clone(),
        }
    }

    pub fn derivative(&self) -> Self {
        let (n, d) = (&self.numerator, &self.denominator);
        RationalExpression {
            numerator: n.derivative().mul(d).sub(&n.mul(&d.derivative())),
            denominator: d.mul(d),
        }
        .reduced()
    }

    /// Coefficientwise comparison of `a_num b_den - b_num a_den` with zero.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        let diff = self
            .numerator
            .mul(&other.denominator)
            .sub(&other.numerator.mul(&self.denominator));
        diff.coefficients().iter().all(|a| a.norm() <= tol)
    }
}

impl fmt::Display for RationalExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denominator.degree() == 0 {
            write!(f, "{}", self.numerator)
        } else {
            write!(f, "({}) / ({})", self.numerator, self.denominator)
        }
    }
}

/// Input state `x^{1/2 + a} e^{-x^2/2} L_n^{(a)}(x^2)`, `a = +-alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateDescriptor {
    pub n: usize,
    pub alpha: f64,
    pub quasiparity: Quasiparity,
}

impl StateDescriptor {
    pub fn index(&self) -> f64 {
        self.quasiparity.sign() * self.alpha
    }

    /// `4n + 2 + 2a`.
    pub fn energy(&self) -> f64 {
        4.0 * self.n as f64 + 2.0 + 2.0 * self.index()
    }

    /// The oscillator `x^2 + (alpha^2 - 1/4)/x^2` the state solves.
    pub fn generating_potential(&self) -> RationalExpression {
        let g = self.alpha * self.alpha - 0.25;
        RationalExpression {
            numerator: Polynomial::from_real(&[g, 0.0, 0.0, 0.0, 1.0]),
            denominator: Polynomial::monomial(2),
        }
        .reduced()
    }
}

/// `W = -psi'/psi` for `psi = P(x) x^power e^{-x^2/2}`: `x - power/x - P'/P`.
pub fn superpotential_from_form(polynomial: &Polynomial, power: f64) -> Result<RationalExpression> {
    if polynomial.is_zero() {
        return Err(Error::InvalidParameter("input state polynomial is zero".into()));
    }
    let p = polynomial;
    let x = Polynomial::monomial(1);
    // (x^2 P - power P - x P') / (x P)
    let numerator = x.mul(&x).mul(p).sub(&p.scale(c(power))).sub(&x.mul(&p.derivative()));
    RationalExpression::new(numerator, x.mul(p))
}

pub fn superpotential(state: &StateDescriptor) -> Result<RationalExpression> {
    let a = state.index();
    superpotential_from_form(&Polynomial::laguerre_in_square(state.n, a), 0.5 + a)
}

/// `(V_plus, V_minus) = (W^2 + W', W^2 - W')`.
pub fn partners(w: &RationalExpression) -> (RationalExpression, RationalExpression) {
    let w2 = w.mul(w);
    let dw = w.derivative();
    (w2.add(&dw), w2.sub(&dw))
}

/// A rational potential split into a solver potential and a constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerLawDecomposition {
    pub potential: PowerLawPotential,
    /// Constant part of `V`; levels of `V` are the solver levels plus this.
    pub energy_offset: f64,
}

/// Laurent coefficients `(c_{-2}, c_{-1})` of `n/d` at a root `x0` of `d` of multiplicity `m`.
fn laurent(num: &Polynomial, den: &Polynomial, x0: Complex64, m: usize) -> Result<(Complex64, Complex64)> {
    let mut q = den.clone();
    let root = Polynomial::new(vec![-x0, c(1.0)]);
    for _ in 0..m {
        q = q.div_rem(&root)?.0;
    }
    let f0 = num.eval(x0) / q.eval(x0);
    let f1 =
        (num.derivative().eval(x0) * q.eval(x0) - num.eval(x0) * q.derivative().eval(x0)) / (q.eval(x0) * q.eval(x0));
    Ok(match m {
        1 => (c(0.0), f0),
        _ => (f0, f1),
    })
}

fn newton(p: &Polynomial, mut z: Complex64) -> Complex64 {
    let dp = p.derivative();
    for _ in 0..8 {
        let step = p.eval(z) / dp.eval(z);
        if !step.is_finite() {
            break;
        }
        z -= step;
        if step.norm() <= 1e-16 * (1.0 + z.norm()) {
            break;
        }
    }
    z
}

/// Zeroes components below the pruning level.
fn snap(z: Complex64) -> Complex64 {
    let scale = PRUNE_TOLERANCE * (1.0 + z.norm());
    let clean = |a: f64| if a.abs() <= scale { 0.0 } else { a };
    Complex64::new(clean(z.re), clean(z.im))
}

fn real_coefficient(z: Complex64, what: &str) -> Result<f64> {
    if z.im.abs() > CHECK_TOLERANCE * (1.0 + z.norm()) {
        return Err(Error::NotDecomposable(format!("{what} has complex coefficient {z}")));
    }
    Ok(z.re)
}

/// Partial-fraction split into harmonic, linear, centrifugal, `1/x` and
/// off-origin second-order pole terms plus a constant offset.
pub fn to_power_law(v: &RationalExpression) -> Result<PowerLawDecomposition> {
    let (quot, rem) = v.numerator.div_rem(&v.denominator)?;
    if quot.degree() > 2 {
        return Err(Error::NotDecomposable(format!(
            "polynomial part of degree {} (at most 2 allowed): {quot}",
            quot.degree()
        )));
    }
    let q = |k: usize| quot.coefficients().get(k).copied().unwrap_or(c(0.0));
    let mut out = PowerLawPotential {
        centrifugal: 0.0,
        harmonic: real_coefficient(q(2), "x^2 term")?,
        terms: Vec::new(),
        poles: Vec::new(),
    };
    // c x = g (ix)^1 with g = -i c
    let g1 = real_coefficient(q(1) * Complex64::new(0.0, -1.0), "x term")?;
    if g1 != 0.0 {
        out = out.with_term(Rational::integer(1), g1);
    }
    let offset = real_coefficient(q(0), "constant term")?;

    let mut roots = v.denominator.roots();
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let mut clusters: Vec<(Complex64, usize)> = Vec::new();
    for r in roots {
        match clusters
            .iter_mut()
            .find(|(z, _)| (*z - r).norm() <= ROOT_CLUSTER * (1.0 + z.norm()))
        {
            Some((z, m)) => {
                *z = (*z * *m as f64 + r) / (*m as f64 + 1.0);
                *m += 1;
            }
            None => clusters.push((r, 1)),
        }
    }
    for (mut x0, m) in clusters {
        if m > 2 {
            return Err(Error::NotDecomposable(format!("pole of order {m} at x = {x0}")));
        }
        if x0.norm() <= ROOT_CLUSTER {
            x0 = c(0.0);
        } else if m == 2 {
            // a double root is a simple root of the derivative
            x0 = newton(&v.denominator.derivative(), x0);
        }
        x0 = snap(x0);
        let (c2, c1) = laurent(&rem, &v.denominator, x0, m)?;
        let (c2, c1) = (snap(c2), snap(c1));
        if x0.norm() == 0.0 {
            out.centrifugal = real_coefficient(c2, "1/x^2 term")?;
            // d/x = g (ix)^{-1} with g = i d
            let g = real_coefficient(c1 * Complex64::new(0.0, 1.0), "1/x term")?;
            if g != 0.0 {
                out = out.with_term(Rational::integer(-1), g);
            }
        } else {
            if c1.norm() > CHECK_TOLERANCE * (1.0 + c2.norm()) {
                return Err(Error::NotDecomposable(format!("simple pole term {c1}/(x - {x0})")));
            }
            if m == 2 {
                out = out.with_pole(x0, c2);
            }
        }
    }
    let decomposition = PowerLawDecomposition {
        potential: out,
        energy_offset: offset,
    };
    verify(v, &decomposition)?;
    Ok(decomposition)
}

fn verify(v: &RationalExpression, d: &PowerLawDecomposition) -> Result<()> {
    use crate::riemann_path::SheetPoint;
    for (m, a) in [(1.3, -0.4), (0.7, -2.1), (2.2, 0.9)] {
        let p = SheetPoint::new(m, a)?;
        let lhs = v.eval(p.embedded());
        let rhs = d.potential.eval(p)? + d.energy_offset;
        if (lhs - rhs).norm() > 1e-7 * (1.0 + lhs.norm()) {
            return Err(Error::NotDecomposable(format!(
                "residual {:.3e} after partial fractions",
                (lhs - rhs).norm()
            )));
        }
    }
    Ok(())
}
