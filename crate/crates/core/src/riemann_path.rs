//! Contours on the universal cover of the punctured complex plane.
//!
//! Points carry an unwound argument, so `rho e^{i phi}` and `rho e^{i(phi + 2 pi)}`
//! are different points. Every contour is generated from an analytic
//! [`Geometry`], which the integrator evaluates directly; the stored samples
//! only describe the shape for output and plotting.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_TRUNCATION_RADIUS: f64 = 8.0;
pub const DEFAULT_SAMPLES_PER_TURN: usize = 512;

/// A point on the covering surface: modulus plus unwound argument.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SheetPoint {
    pub modulus: f64,
    pub argument: f64,
}

impl SheetPoint {
    pub fn new(modulus: f64, argument: f64) -> Result<Self> {
        if !(modulus >= 0.0) || !argument.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "sheet point needs modulus >= 0 and finite argument, got ({modulus}, {argument})"
            )));
        }
        Ok(SheetPoint { modulus, argument })
    }

    /// Unchecked constructor for values produced internally.
    pub(crate) fn polar(modulus: f64, argument: f64) -> Self {
        SheetPoint { modulus, argument }
    }

    /// The position in the ordinary complex plane.
    pub fn embedded(&self) -> Complex64 {
        Complex64::from_polar(self.modulus, self.argument)
    }

    /// `x^p` continued along the sheet: `modulus^p e^{i p argument}`.
    pub fn powf(&self, p: f64) -> Complex64 {
        if self.modulus == 0.0 {
            return if p == 0.0 {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            };
        }
        Complex64::from_polar(self.modulus.powf(p), p * self.argument)
    }

    /// `i x` on the same sheet (argument advanced by pi/2).
    pub fn times_i(&self) -> SheetPoint {
        SheetPoint::polar(self.modulus, self.argument + FRAC_PI_2)
    }

    pub fn rotated(&self, angle: f64) -> SheetPoint {
        SheetPoint::polar(self.modulus, self.argument + angle)
    }

    /// PT image `x -> -x*`, realized on the cover as `phi -> -pi - phi`.
    pub fn pt_image(&self) -> SheetPoint {
        SheetPoint::polar(self.modulus, -PI - self.argument)
    }

    /// Same point on the cover, within tolerance on both coordinates.
    pub fn same_as(&self, other: &SheetPoint, tol: f64) -> bool {
        (self.modulus - other.modulus).abs() <= tol * (1.0 + self.modulus)
            && (self.argument - other.argument).abs() <= tol * (1.0 + self.argument.abs())
    }
}

/// Analytic description of a path `x(t)` on the covering surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Geometry {
    /// `x = eps rho(phi, N) e^{i phi}` parametrized by `t = phi + pi/2`.
    Spiral { winding: u32, offset: f64 },
    /// `x = t - i eps`.
    Straight { offset: f64 },
    /// The positive real half-line, `x = t`.
    HalfLine,
    /// Ray at fixed unwound angle, parametrized by the radius.
    Ray { angle: f64 },
    /// Circle arc of fixed radius, parametrized by the unwound angle.
    Arc { radius: f64 },
    /// Image of `inner` under `i y = (i x)^{1/tau}`.
    Mapped { inner: Box<Geometry>, tau: f64 },
    /// PT image of `inner`, traversed so that `t -> -t`.
    Reflected { inner: Box<Geometry> },
    /// `inner` rotated rigidly by `angle` on the cover.
    Rotated { inner: Box<Geometry>, angle: f64 },
}

impl Geometry {
    pub fn point(&self, t: f64) -> SheetPoint {
        match self {
            Geometry::Spiral { winding, offset } => {
                let k = (2 * winding + 1) as f64;
                SheetPoint::polar(offset / (t / k).cos(), t - FRAC_PI_2)
            }
            Geometry::Straight { offset } => {
                // atan2 with a strictly negative imaginary part stays in (-pi, 0)
                SheetPoint::polar(t.hypot(*offset), (-offset).atan2(t))
            }
            Geometry::HalfLine => SheetPoint::polar(t, 0.0),
            Geometry::Ray { angle } => SheetPoint::polar(t, *angle),
            Geometry::Arc { radius } => SheetPoint::polar(*radius, t),
            Geometry::Mapped { inner, tau } => {
                let x = inner.point(t);
                SheetPoint::polar(x.modulus.powf(1.0 / tau), (x.argument + FRAC_PI_2) / tau - FRAC_PI_2)
            }
            Geometry::Reflected { inner } => inner.point(-t).pt_image(),
            Geometry::Rotated { inner, angle } => inner.point(t).rotated(*angle),
        }
    }

    /// `dx/dt` in the embedded plane.
    pub fn velocity(&self, t: f64) -> Complex64 {
        match self {
            Geometry::Spiral { winding, .. } => {
                let k = (2 * winding + 1) as f64;
                let x = self.point(t).embedded();
                x * Complex64::new((t / k).tan() / k, 1.0)
            }
            Geometry::Straight { .. } | Geometry::HalfLine => Complex64::new(1.0, 0.0),
            Geometry::Ray { angle } => Complex64::from_polar(1.0, *angle),
            Geometry::Arc { radius } => Complex64::new(0.0, 1.0) * Complex64::from_polar(*radius, t),
            Geometry::Mapped { inner, tau } => {
                // dx/dy = tau (i y)^{tau - 1}
                let y = self.point(t);
                inner.velocity(t) / (tau * y.times_i().powf(tau - 1.0))
            }
            Geometry::Reflected { inner } => inner.velocity(-t).conj(),
            Geometry::Rotated { inner, angle } => inner.velocity(t) * Complex64::from_polar(1.0, *angle),
        }
    }
}

/// Which side of the matching point a propagation starts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum End {
    In,
    Out,
}

/// Boundary behaviour imposed at a contour end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndCondition {
    /// The solution decays into the asymptotic wedge.
    Decaying,
    /// The solution is the regular Frobenius branch at the origin.
    RegularAtOrigin,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourSample {
    pub t: f64,
    pub point: SheetPoint,
}

/// A sampled path with its wedge bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contour {
    pub winding: u32,
    pub offset: f64,
    pub truncation_radius: f64,
    pub wedge_in: i64,
    pub wedge_out: i64,
    pub t_in: f64,
    pub t_out: f64,
    /// Parameter of the matching point (the PT vertex when there is one).
    pub t_match: f64,
    pub in_condition: EndCondition,
    pub geometry: Geometry,
    pub samples: Vec<ContourSample>,
}

/// The `k` for which `k pi + theta` lies closest to zero.
pub fn nearest_wedge(theta: f64) -> i64 {
    -(theta / PI).round() as i64
}

/// Whether `k pi + theta` is inside the open wedge `(-pi/4, pi/4)`.
pub fn in_wedge(k: i64, theta: f64) -> bool {
    (k as f64 * PI + theta).abs() < FRAC_PI_4
}

fn sample_range(geometry: &Geometry, t0: f64, t1: f64, intervals: usize) -> Vec<ContourSample> {
    (0..=intervals)
        .map(|j| {
            let t = t0 + (t1 - t0) * j as f64 / intervals as f64;
            ContourSample {
                t,
                point: geometry.point(t),
            }
        })
        .collect()
}

impl Contour {
    pub fn point(&self, t: f64) -> SheetPoint {
        self.geometry.point(t)
    }

    pub fn end_parameter(&self, end: End) -> f64 {
        match end {
            End::In => self.t_in,
            End::Out => self.t_out,
        }
    }

    pub fn vertex(&self) -> SheetPoint {
        self.geometry.point(self.t_match)
    }

    /// Checks both end angles against the declared wedges.
    pub fn check_wedges(&self) -> Result<()> {
        for (end, k) in [(End::In, self.wedge_in), (End::Out, self.wedge_out)] {
            if end == End::In && self.in_condition == EndCondition::RegularAtOrigin {
                continue;
            }
            let theta = self.point(self.end_parameter(end)).argument;
            if !in_wedge(k, theta) {
                return Err(Error::WedgeViolation {
                    kind: "decaying",
                    angle: theta,
                    admissible: format!("k pi + theta in (-pi/4, pi/4) with k = {k}"),
                });
            }
        }
        Ok(())
    }

    /// Same contour with a new sampling density, keeping the geometry.
    pub fn resampled(&self, intervals: usize) -> Contour {
        let mut c = self.clone();
        c.samples = sample_range(&self.geometry, self.t_in, self.t_out, intervals.max(2));
        c
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,modulus,argument,re,im\n");
        for smp in &self.samples {
            let x = smp.point.embedded();
            let _ = writeln!(
                s,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                smp.t, smp.point.modulus, smp.point.argument, x.re, x.im
            );
        }
        s
    }

    pub fn to_json(&self) -> serde_json::Value {
        let samples: Vec<_> = self
            .samples
            .iter()
            .map(|smp| {
                let x = smp.point.embedded();
                serde_json::json!({
                    "t": smp.t,
                    "modulus": smp.point.modulus,
                    "argument": smp.point.argument,
                    "re": x.re,
                    "im": x.im,
                })
            })
            .collect();
        serde_json::json!({
            "schema": 1,
            "N": self.winding,
            "eps": self.offset,
            "R_max": self.truncation_radius,
            "wedge_in": self.wedge_in,
            "wedge_out": self.wedge_out,
            "samples": samples,
        })
    }
}

fn check_offset_radius(eps: f64, r_max: f64) -> Result<()> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "offset eps must be positive, got {eps}"
        )));
    }
    if !(r_max > eps) || !r_max.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "truncation radius {r_max} must exceed the offset {eps}"
        )));
    }
    Ok(())
}

/// The spiral `x = eps rho(phi, N) e^{i phi}` winding `N` times around the
/// origin, truncated where `|x| = r_max`.
pub fn make_toboggan(winding: u32, eps: f64, r_max: f64, samples_per_turn: usize) -> Result<Contour> {
    check_offset_radius(eps, r_max)?;
    if samples_per_turn < 16 {
        return Err(Error::InvalidParameter(format!(
            "samples_per_turn must be at least 16, got {samples_per_turn}"
        )));
    }
    let k = (2 * winding + 1) as f64;
    let t_max = k * (eps / r_max).acos();
    let per_side = ((t_max / TAU) * samples_per_turn as f64).ceil().max(1.0) as usize;
    let geometry = Geometry::Spiral { winding, offset: eps };
    let contour = Contour {
        winding,
        offset: eps,
        truncation_radius: r_max,
        wedge_in: winding as i64 + 1,
        wedge_out: -(winding as i64),
        t_in: -t_max,
        t_out: t_max,
        t_match: 0.0,
        in_condition: EndCondition::Decaying,
        samples: sample_range(&geometry, -t_max, t_max, 2 * per_side),
        geometry,
    };
    contour.check_wedges().map_err(|_| {
        Error::InvalidParameter(format!(
            "eps/R_max = {} too large: truncated ends leave the asymptotic wedges",
            eps / r_max
        ))
    })?;
    Ok(contour)
}

/// The straight line `x = t - i eps` cut at `|x| = r_max`.
pub fn make_straight(eps: f64, r_max: f64, n_samples: usize) -> Result<Contour> {
    check_offset_radius(eps, r_max)?;
    let t_max = (r_max * r_max - eps * eps).sqrt();
    let geometry = Geometry::Straight { offset: eps };
    let intervals = (n_samples.max(3) - 1) / 2 * 2;
    let contour = Contour {
        winding: 0,
        offset: eps,
        truncation_radius: r_max,
        wedge_in: 1,
        wedge_out: 0,
        t_in: -t_max,
        t_out: t_max,
        t_match: 0.0,
        in_condition: EndCondition::Decaying,
        samples: sample_range(&geometry, -t_max, t_max, intervals),
        geometry,
    };
    contour
        .check_wedges()
        .map_err(|_| Error::InvalidParameter(format!("eps/R_max = {} too large for the wedges", eps / r_max)))?;
    Ok(contour)
}

/// The real half-line `(x_min, r_max)` with the regular solution imposed at the origin.
pub fn make_half_line(x_min: f64, r_max: f64, n_samples: usize) -> Result<Contour> {
    if !(x_min > 0.0) || !(r_max > x_min) {
        return Err(Error::InvalidParameter(format!(
            "half-line needs 0 < x_min < r_max, got ({x_min}, {r_max})"
        )));
    }
    let geometry = Geometry::HalfLine;
    Ok(Contour {
        winding: 0,
        offset: 0.0,
        truncation_radius: r_max,
        wedge_in: 0,
        wedge_out: 0,
        t_in: x_min,
        t_out: r_max,
        t_match: (0.25 * r_max).max(x_min + 0.5 * (r_max - x_min) * 0.1),
        in_condition: EndCondition::RegularAtOrigin,
        samples: sample_range(&geometry, x_min, r_max, n_samples.max(2) - 1),
        geometry,
    })
}

/// Image of `c` under `i y = (i x)^{1/tau}`, declared with winding `winding`.
pub fn power_image(c: &Contour, tau: f64, winding: u32) -> Contour {
    let geometry = Geometry::Mapped {
        inner: Box::new(c.geometry.clone()),
        tau,
    };
    let samples = c
        .samples
        .iter()
        .map(|s| ContourSample {
            t: s.t,
            point: geometry.point(s.t),
        })
        .collect();
    Contour {
        winding,
        offset: c.offset.powf(1.0 / tau),
        truncation_radius: c.truncation_radius.powf(1.0 / tau),
        wedge_in: c.wedge_in,
        wedge_out: c.wedge_out,
        t_in: c.t_in,
        t_out: c.t_out,
        t_match: c.t_match,
        in_condition: c.in_condition,
        geometry,
        samples,
    }
}

/// PT reflection `(rho, phi) -> (rho, -pi - phi)`, re-parametrized by `t -> -t`.
pub fn pt_reflect(c: &Contour) -> Contour {
    let geometry = Geometry::Reflected {
        inner: Box::new(c.geometry.clone()),
    };
    let mut samples: Vec<ContourSample> = c
        .samples
        .iter()
        .map(|s| ContourSample {
            t: -s.t,
            point: s.point.pt_image(),
        })
        .collect();
    samples.reverse();
    Contour {
        winding: c.winding,
        offset: c.offset,
        truncation_radius: c.truncation_radius,
        wedge_in: 1 - c.wedge_out,
        wedge_out: 1 - c.wedge_in,
        t_in: -c.t_out,
        t_out: -c.t_in,
        t_match: -c.t_match,
        in_condition: c.in_condition,
        geometry,
        samples,
    }
}

/// Whether the PT image of `c` covers the same sample set (embedded positions
/// and sheets) within `tol`.
pub fn is_pt_closed(c: &Contour, tol: f64) -> bool {
    let image = pt_reflect(c);
    if image.samples.len() != c.samples.len() {
        return false;
    }
    image.samples.iter().zip(&c.samples).all(|(a, b)| {
        (a.point.embedded() - b.point.embedded()).norm() <= tol * (1.0 + b.point.modulus)
            && (a.point.argument - b.point.argument).abs() <= tol * (1.0 + b.point.argument.abs())
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rotation {
    Plus,
    Minus,
}

/// Conjugate partner of a toboggan: all arguments rotated rigidly by `+-pi`.
pub fn conjugate_toboggan(c: &Contour, direction: Rotation) -> Contour {
    let angle = match direction {
        Rotation::Plus => PI,
        Rotation::Minus => -PI,
    };
    let shift = match direction {
        Rotation::Plus => -1,
        Rotation::Minus => 1,
    };
    let mut out = c.clone();
    out.geometry = match &c.geometry {
        Geometry::Rotated { inner, angle: a } if (a + angle).abs() < 1e-15 => (**inner).clone(),
        Geometry::Rotated { inner, angle: a } => Geometry::Rotated {
            inner: inner.clone(),
            angle: a + angle,
        },
        g => Geometry::Rotated {
            inner: Box::new(g.clone()),
            angle,
        },
    };
    for s in &mut out.samples {
        s.point = s.point.rotated(angle);
    }
    out.wedge_in += shift;
    out.wedge_out += shift;
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Edge {
    LowerEdge,
    UpperEdge,
}

/// Asymptotic ray angles `(theta_in, theta_out)` of the anti-Stokes contours.
pub fn anti_stokes_angles(winding: u32, branch: Edge) -> (f64, f64) {
    let n = winding as f64;
    match branch {
        Edge::LowerEdge => (-(n + 0.75) * PI, (n - 0.25) * PI),
        Edge::UpperEdge => (-(n + 1.25) * PI, (n + 0.25) * PI),
    }
}

/// One analytic piece of a piecewise path, traversed from `t0` to `t1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub geometry: Geometry,
    pub t0: f64,
    pub t1: f64,
}

/// Scattering contour: two anti-Stokes rays joined by a circle arc through the
/// PT vertex `phi = -pi/2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AntiStokesContour {
    pub winding: u32,
    pub branch: Edge,
    pub theta_in: f64,
    pub theta_out: f64,
    pub join_radius: f64,
    pub ray_radius: f64,
    pub in_samples: Vec<SheetPoint>,
    pub out_samples: Vec<SheetPoint>,
}

pub const DEFAULT_JOIN_RADIUS: f64 = 2.0;

impl AntiStokesContour {
    pub fn vertex(&self) -> SheetPoint {
        SheetPoint::polar(self.join_radius, -FRAC_PI_2)
    }

    /// Pieces leading from the vertex out to radius `rho` on the chosen ray.
    pub fn path_to(&self, end: End, rho: f64) -> Vec<Segment> {
        let theta = match end {
            End::In => self.theta_in,
            End::Out => self.theta_out,
        };
        vec![
            Segment {
                geometry: Geometry::Arc {
                    radius: self.join_radius,
                },
                t0: -FRAC_PI_2,
                t1: theta,
            },
            Segment {
                geometry: Geometry::Ray { angle: theta },
                t0: self.join_radius,
                t1: rho,
            },
        ]
    }

    pub fn ray_point(&self, end: End, rho: f64) -> SheetPoint {
        match end {
            End::In => SheetPoint::polar(rho, self.theta_in),
            End::Out => SheetPoint::polar(rho, self.theta_out),
        }
    }
}

pub fn make_anti_stokes(winding: u32, branch: Edge, r_max: f64) -> Result<AntiStokesContour> {
    make_anti_stokes_with_join(winding, branch, r_max, DEFAULT_JOIN_RADIUS)
}

pub fn make_anti_stokes_with_join(
    winding: u32,
    branch: Edge,
    r_max: f64,
    join_radius: f64,
) -> Result<AntiStokesContour> {
    if !(join_radius > 0.0) || !(r_max > join_radius) {
        return Err(Error::InvalidParameter(format!(
            "anti-Stokes contour needs 0 < join radius ({join_radius}) < R_max ({r_max})"
        )));
    }
    let (theta_in, theta_out) = anti_stokes_angles(winding, branch);
    let ray = |theta: f64| -> Vec<SheetPoint> {
        (0..=32)
            .map(|j| SheetPoint::polar(join_radius + (r_max - join_radius) * j as f64 / 32.0, theta))
            .collect()
    };
    Ok(AntiStokesContour {
        winding,
        branch,
        theta_in,
        theta_out,
        join_radius,
        ray_radius: r_max,
        in_samples: ray(theta_in),
        out_samples: ray(theta_out),
    })
}
