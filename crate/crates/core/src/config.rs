//! Text format for potentials.
//!
//! ```text
//! # spiked oscillator with a linear perturbation
//! ell = 0.3
//! harmonic = 1
//! term { beta = "1", g = 0.1 }
//! pole { re = 1, im = 0, G_re = 0.1, G_im = 0.2 }
//! ```
//!
//! Scalar keys: `ell` (centrifugal `ell (ell + 1)`), `centrifugal`, `alpha`
//! (centrifugal `alpha^2 - 1/4`), at most one of them, and `harmonic`
//! (default 1). `term` and `pole` blocks may repeat and sit on one line.
//! `#` starts a comment.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::potential::PowerLawPotential;
use crate::rational::Rational;

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn number(line: usize, key: &str, raw: &str) -> Result<f64> {
    let v: f64 = raw
        .trim()
        .parse()
        .map_err(|_| err(line, format!("`{key}` expects a number, got `{}`", raw.trim())))?;
    if !v.is_finite() {
        return Err(err(line, format!("`{key}` is not finite")));
    }
    Ok(v)
}

fn unquote(raw: &str) -> &str {
    let t = raw.trim();
    t.strip_prefix('"').and_then(|s| s.strip_suffix('"')).unwrap_or(t)
}

/// `key = value` pairs of a block body separated by commas.
fn block_fields(line: usize, body: &str) -> Result<HashMap<String, String>> {
    let mut out = HashMap::new();
    for part in body.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| err(line, format!("expected `key = value`, got `{part}`")))?;
        if out.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
            return Err(err(line, format!("duplicate field `{}`", k.trim())));
        }
    }
    Ok(out)
}

fn take(line: usize, block: &str, fields: &mut HashMap<String, String>, key: &str) -> Result<String> {
    fields
        .remove(key)
        .ok_or_else(|| err(line, format!("`{block}` block is missing `{key}`")))
}

pub fn parse_potential(text: &str) -> Result<PowerLawPotential> {
    let mut v = PowerLawPotential::default();
    let mut centrifugal_key: Option<&str> = None;
    let mut harmonic_seen = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let mut rest = raw.split('#').next().unwrap_or("").trim();
        while !rest.is_empty() {
            let block = ["term", "pole"]
                .into_iter()
                .find(|b| rest.starts_with(b) && rest[b.len()..].trim_start().starts_with('{'));
            if let Some(name) = block {
                let open = rest.find('{').unwrap_or(0);
                let close = rest
                    .find('}')
                    .ok_or_else(|| err(line, format!("unterminated `{name}` block")))?;
                let mut fields = block_fields(line, &rest[open + 1..close])?;
                match name {
                    "term" => {
                        let beta_raw = take(line, name, &mut fields, "beta")?;
                        let beta: Rational = unquote(&beta_raw)
                            .parse()
                            .map_err(|e| err(line, format!("bad exponent `{beta_raw}`: {e}")))?;
                        let g = number(line, "g", &take(line, name, &mut fields, "g")?)?;
                        v = v.with_term(beta, g);
                    }
                    _ => {
                        let mut get = |k: &str| -> Result<f64> { number(line, k, &take(line, name, &mut fields, k)?) };
                        let location = Complex64::new(get("re")?, get("im")?);
                        let strength = Complex64::new(get("G_re")?, get("G_im")?);
                        v = v.with_pole(location, strength);
                    }
                }
                if let Some(k) = fields.keys().next() {
                    return Err(err(line, format!("unknown field `{k}` in `{name}` block")));
                }
                rest = rest[close + 1..].trim();
                continue;
            }
            let (key, value) = rest
                .split_once('=')
                .ok_or_else(|| err(line, format!("expected `key = value` or a block, got `{rest}`")))?;
            let key = key.trim();
            let x = number(line, key, unquote(value))?;
            match key {
                "ell" | "centrifugal" | "alpha" => {
                    if let Some(prev) = centrifugal_key {
                        return Err(err(line, format!("`{key}` conflicts with earlier `{prev}`")));
                    }
                    centrifugal_key = Some(match key {
                        "ell" => "ell",
                        "centrifugal" => "centrifugal",
                        _ => "alpha",
                    });
                    v.centrifugal = match key {
                        "ell" => x * (x + 1.0),
                        "centrifugal" => x,
                        _ => x * x - 0.25,
                    };
                }
                "harmonic" => {
                    if harmonic_seen {
                        return Err(err(line, "`harmonic` given twice"));
                    }
                    harmonic_seen = true;
                    v.harmonic = x;
                }
                _ => return Err(err(line, format!("unknown key `{key}`"))),
            }
            rest = "";
        }
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_forms() {
        let text = "# comment\nell = 0.3\nharmonic = 1\nterm { beta = \"1/2\", g = 0.1 } term { beta = \"-1\", g = -2 }\npole { re = 1, im = 0, G_re = 0.1, G_im = 0.2 }\n";
        let v = parse_potential(text).unwrap();
        assert!((v.centrifugal - 0.39).abs() < 1e-15);
        assert_eq!(v.terms.len(), 2);
        assert_eq!(v.terms[0].beta, Rational::new(1, 2).unwrap());
        assert_eq!(v.poles[0].strength, Complex64::new(0.1, 0.2));
    }

    #[test]
    fn round_trips_through_config() {
        let v = PowerLawPotential::from_alpha(0.37)
            .with_term(Rational::new(3, 2).unwrap(), 0.25)
            .with_pole(Complex64::new(-1.0, 0.5), Complex64::new(0.3, -0.1));
        assert_eq!(parse_potential(&v.to_config()).unwrap(), v);
    }

    #[test]
    fn reports_line_numbers() {
        match parse_potential("harmonic = 1\nterm { beta = \"1\" }\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(parse_potential("ell = 1\nalpha = 2\n").is_err());
        assert!(parse_potential("spin = 1\n").is_err());
    }
}
