//! Exact rational numbers for exponents and the Liouville parameter.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A rational number stored in lowest terms with a positive denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Rational {
    num: i64,
    den: i64,
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

impl Rational {
    pub const ZERO: Rational = Rational { num: 0, den: 1 };
    pub const ONE: Rational = Rational { num: 1, den: 1 };

    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidParameter("zero denominator".into()));
        }
        let g = gcd(num, den).max(1);
        let sign = if den < 0 { -1 } else { 1 };
        Ok(Rational {
            num: sign * num / g,
            den: sign * den / g,
        })
    }

    pub fn integer(n: i64) -> Self {
        Rational { num: n, den: 1 }
    }

    pub fn numerator(self) -> i64 {
        self.num
    }

    pub fn denominator(self) -> i64 {
        self.den
    }

    pub fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn is_integer(self) -> bool {
        self.den == 1
    }

    pub fn is_even_integer(self) -> bool {
        self.den == 1 && self.num % 2 == 0
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    pub fn recip(self) -> Result<Self> {
        Rational::new(self.den, self.num)
    }

    /// Exact `i^self` as a unit complex number, using `i = e^{i pi/2}`.
    pub fn i_power(self) -> num_complex::Complex64 {
        // i^(p/q) = exp(i pi p / (2q)); reduce the integer part exactly
        let four_den = 4 * self.den;
        let rem = self.num.rem_euclid(four_den);
        if rem % self.den == 0 {
            return match rem / self.den {
                0 => num_complex::Complex64::new(1.0, 0.0),
                1 => num_complex::Complex64::new(0.0, 1.0),
                2 => num_complex::Complex64::new(-1.0, 0.0),
                _ => num_complex::Complex64::new(0.0, -1.0),
            };
        }
        let angle = std::f64::consts::FRAC_PI_2 * rem as f64 / self.den as f64;
        num_complex::Complex64::from_polar(1.0, angle)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidParameter(format!("not a rational number: `{s}`"));
        match s.split_once('/') {
            Some((n, d)) => {
                let n: i64 = n.trim().parse().map_err(|_| bad())?;
                let d: i64 = d.trim().parse().map_err(|_| bad())?;
                Rational::new(n, d)
            }
            None => s.parse::<i64>().map(Rational::integer).map_err(|_| bad()),
        }
    }
}

impl TryFrom<String> for Rational {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Rational> for String {
    fn from(r: Rational) -> String {
        r.to_string()
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        ((self.num as i128) * (other.den as i128)).cmp(&((other.num as i128) * (self.den as i128)))
    }
}

impl Add for Rational {
    type Output = Rational;
    fn add(self, o: Rational) -> Rational {
        Rational::new(self.num * o.den + o.num * self.den, self.den * o.den).unwrap()
    }
}

impl Sub for Rational {
    type Output = Rational;
    fn sub(self, o: Rational) -> Rational {
        self + (-o)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational {
            num: -self.num,
            den: self.den,
        }
    }
}

impl Mul for Rational {
    type Output = Rational;
    fn mul(self, o: Rational) -> Rational {
        Rational::new(self.num * o.num, self.den * o.den).unwrap()
    }
}

impl Div for Rational {
    type Output = Rational;
    fn div(self, o: Rational) -> Rational {
        Rational::new(self.num * o.den, self.den * o.num).expect("division by zero rational")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lowest_terms() {
        let r = Rational::new(4, -6).unwrap();
        assert_eq!((r.numerator(), r.denominator()), (-2, 3));
        assert_eq!("6/4".parse::<Rational>().unwrap().to_string(), "3/2");
        assert!(Rational::new(1, 0).is_err());
    }

    #[test]
    fn i_powers() {
        let close = |a: num_complex::Complex64, b: num_complex::Complex64| (a - b).norm() < 1e-15;
        assert_eq!(Rational::integer(6).i_power(), num_complex::Complex64::new(-1.0, 0.0));
        assert_eq!(Rational::integer(-1).i_power(), num_complex::Complex64::new(0.0, -1.0));
        let half = Rational::new(1, 2).unwrap().i_power();
        assert!(close(
            half,
            num_complex::Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)
        ));
    }

    #[test]
    fn arithmetic() {
        let a = Rational::new(2, 3).unwrap();
        let b = Rational::integer(3);
        assert_eq!(a * b, Rational::integer(2));
        assert_eq!(a + b, Rational::new(11, 3).unwrap());
        assert!(a < b);
    }
}
