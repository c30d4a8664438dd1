//! Complex gamma function, Kummer's confluent hypergeometric function and
//! generalized Laguerre polynomials.
//!
//! The Taylor series of `1F1` is summed in double-double arithmetic: for
//! `z = -i r` the terms peak near `e^{|r|}` while the sum stays of order one,
//! so plain doubles would lose about `|r| / ln 10` digits.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesControl {
    pub max_terms: usize,
    pub relative_tolerance: f64,
    /// `|z|` at and above which the asymptotic expansion replaces the series.
    pub asymptotic_crossover: f64,
}

impl Default for SeriesControl {
    fn default() -> Self {
        SeriesControl {
            max_terms: 2000,
            relative_tolerance: 1e-13,
            asymptotic_crossover: 30.0,
        }
    }
}

impl SeriesControl {
    pub fn validate(&self) -> Result<()> {
        if self.relative_tolerance < 100.0 * f64::EPSILON {
            return Err(Error::InvalidParameter(format!(
                "relative tolerance {} is below the attainable precision",
                self.relative_tolerance
            )));
        }
        Ok(())
    }
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
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

fn is_nonpositive_integer(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// `ln Gamma(z)` for `Re z >= 1/2` by the Lanczos sum.
fn ln_gamma_right(z: Complex64) -> Complex64 {
    let z = z - 1.0;
    let mut sum = Complex64::new(LANCZOS[0], 0.0);
    for (k, c) in LANCZOS.iter().enumerate().skip(1) {
        sum += c / (z + k as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + sum.ln()
}

pub fn gamma(z: Complex64) -> Result<Complex64> {
    if is_nonpositive_integer(z) {
        return Err(Error::GammaPole(format!("{z}")));
    }
    if z.re < 0.5 {
        // reflection
        let s = (PI * z).sin();
        return Ok(PI / (s * ln_gamma_right(1.0 - z).exp()));
    }
    Ok(ln_gamma_right(z).exp())
}

/// `1 / Gamma(z)`, entire; exactly zero at the poles of Gamma.
pub fn reciprocal_gamma(z: Complex64) -> Complex64 {
    if is_nonpositive_integer(z) {
        return Complex64::new(0.0, 0.0);
    }
    if z.re < 0.5 {
        return (PI * z).sin() * ln_gamma_right(1.0 - z).exp() / PI;
    }
    (-ln_gamma_right(z)).exp()
}

// ---------------------------------------------------------------------------
// double-double arithmetic, just enough for the Taylor series

#[derive(Debug, Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    fn from(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }

    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.add(o.mul(Dd::from(q1)).neg());
        let q2 = r.hi / o.hi;
        let r = r.add(o.mul(Dd::from(q2)).neg());
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }.add(Dd::from(q3))
    }

    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

#[derive(Debug, Clone, Copy)]
struct CDd {
    re: Dd,
    im: Dd,
}

impl CDd {
    fn from(z: Complex64) -> CDd {
        CDd {
            re: Dd::from(z.re),
            im: Dd::from(z.im),
        }
    }

    /// `z + k` with the integer shift carried exactly.
    fn shifted(z: Complex64, k: f64) -> CDd {
        let (hi, lo) = two_sum(z.re, k);
        CDd {
            re: Dd { hi, lo },
            im: Dd::from(z.im),
        }
    }

    fn add(self, o: CDd) -> CDd {
        CDd {
            re: self.re.add(o.re),
            im: self.im.add(o.im),
        }
    }

    fn mul(self, o: CDd) -> CDd {
        CDd {
            re: self.re.mul(o.re).add(self.im.mul(o.im).neg()),
            im: self.re.mul(o.im).add(self.im.mul(o.re)),
        }
    }

    fn div(self, o: CDd) -> CDd {
        let den = o.re.mul(o.re).add(o.im.mul(o.im));
        let conj = CDd {
            re: o.re,
            im: o.im.neg(),
        };
        let n = self.mul(conj);
        CDd {
            re: n.re.div(den),
            im: n.im.div(den),
        }
    }

    fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    fn norm(self) -> f64 {
        self.to_c64().norm()
    }
}

/// Taylor series of `M(a, b, z)` in double-double precision.
pub fn kummer_series(a: Complex64, b: Complex64, z: Complex64, ctl: &SeriesControl) -> Result<Complex64> {
    if is_nonpositive_integer(b) {
        return Err(Error::InvalidParameter(format!("b = {b} is a nonpositive integer")));
    }
    let zz = CDd::from(z);
    let mut term = CDd::from(Complex64::new(1.0, 0.0));
    let mut sum = term;
    let mut k = 0usize;
    loop {
        if k >= ctl.max_terms {
            return Err(Error::PrecisionLoss {
                terms: k,
                partial: format!("{}", sum.to_c64()),
            });
        }
        let kf = k as f64;
        let num = CDd::shifted(a, kf).mul(zz);
        let den = CDd::shifted(b, kf).mul(CDd {
            re: Dd::from(kf + 1.0),
            im: Dd::ZERO,
        });
        term = term.mul(num).div(den);
        sum = sum.add(term);
        k += 1;
        let tn = term.norm();
        if tn == 0.0 {
            break;
        }
        // past the peak of the terms, stop once they no longer matter
        if kf + 1.0 > z.norm() + a.norm() && tn <= ctl.relative_tolerance * 1e-3 * sum.norm() {
            break;
        }
    }
    Ok(sum.to_c64())
}

/// The two asymptotic series of `1F1` for large `|z|`, summed up to their
/// smallest term:
///
/// `S_plus(z)  = sum_s (a)_s (a-b+1)_s / s! (-z)^{-s}` (multiplies `z^{-a}`)
/// `S_minus(z) = sum_s (1-a)_s (b-a)_s / s! z^{-s}` (multiplies `e^z z^{a-b}`)
///
/// Returns `(S_plus, S_minus, estimated truncation error)`.
pub fn kummer_asymptotic_series(
    a: Complex64,
    b: Complex64,
    z: Complex64,
    max_terms: usize,
) -> (Complex64, Complex64, f64) {
    let sum = |p: Complex64, q: Complex64, w: Complex64| -> (Complex64, f64) {
        let mut term = Complex64::new(1.0, 0.0);
        let mut total = term;
        let mut last = 1.0f64;
        for s in 0..max_terms {
            let sf = s as f64;
            let next = term * (p + sf) * (q + sf) / ((sf + 1.0) * w);
            let n = next.norm();
            if n == 0.0 {
                return (total, 0.0);
            }
            if n > last && s > 0 {
                // divergent tail: stop at the smallest term
                return (total, last);
            }
            total += next;
            term = next;
            last = n;
            if n < 1e-17 * total.norm() {
                return (total, n);
            }
        }
        (total, last)
    };
    let (splus, e1) = sum(a, a - b + 1.0, -z);
    let (sminus, e2) = sum(1.0 - a, b - a, z);
    (splus, sminus, e1.max(e2))
}

/// Two-exponential large-`|z|` form of `M(a, b, z)`:
///
/// `M ~ Gamma(b) [ e^z z^{a-b} S_minus / Gamma(a) + e^{+-i pi a} z^{-a} S_plus / Gamma(b-a) ]`
///
/// with principal powers and the upper sign for `arg z > 0`.
pub fn kummer_asymptotic(a: Complex64, b: Complex64, z: Complex64, ctl: &SeriesControl) -> Result<Complex64> {
    let gb = gamma(b)?;
    let (splus, sminus, _) = kummer_asymptotic_series(a, b, z, ctl.max_terms);
    let sigma = if z.arg() > 0.0 { 1.0 } else { -1.0 };
    let i = Complex64::new(0.0, 1.0);
    let lnz = z.ln();
    let first = reciprocal_gamma(a) * (z + (a - b) * lnz).exp() * sminus;
    let second = reciprocal_gamma(b - a) * (sigma * i * PI * a - a * lnz).exp() * splus;
    Ok(gb * (first + second))
}

/// Kummer's `M(a, b, z) = 1F1(a; b; z)`.
pub fn kummer_m(a: Complex64, b: Complex64, z: Complex64, ctl: &SeriesControl) -> Result<Complex64> {
    ctl.validate()?;
    if is_nonpositive_integer(b) {
        return Err(Error::InvalidParameter(format!("b = {b} is a nonpositive integer")));
    }
    if is_nonpositive_integer(a) {
        kummer_series(a, b, z, ctl)
    } else if z.norm() < ctl.asymptotic_crossover {
        if z.re < 0.0 {
            // Kummer transformation keeps the series free of sign alternation
            Ok(z.exp() * kummer_series(b - a, b, -z, ctl)?)
        } else {
            kummer_series(a, b, z, ctl)
        }
    } else {
        kummer_asymptotic(a, b, z, ctl)
    }
}

/// Generalized Laguerre polynomial `L_n^{(a)}(z)` by the three-term recurrence.
pub fn laguerre(n: usize, a: f64, z: Complex64) -> Complex64 {
    let mut prev = Complex64::new(1.0, 0.0);
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + a - z;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + a - z) * cur - (kf + a) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `binom(n + a, n)`.
pub fn binomial_shifted(n: usize, a: f64) -> f64 {
    (1..=n).map(|k| (a + k as f64) / k as f64).product()
}
