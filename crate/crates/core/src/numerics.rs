//! Model constants, the tolerance policy, and the general-parameter solver.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ellipse major semi-axis squared for the constant-width body.
pub const BODY_A_SQ: f64 = 1.5;

/// Scalar data of a focally embedded simplex.
///
/// The ellipse is `z^2 = (a^2-1)(1 - x^2/a^2)` in the `xz`-plane with foci
/// `(+-1, 0, 0, 0)`; the hyperboloid is `y^2 + w^2 = (a^2-1)(x^2-1)` in the
/// `xyw`-space with foci `(+-a, 0, 0, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelConstants {
    pub a_sq: f64,
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub z1: f64,
    /// Edge length of the simplex, `2 z1`.
    pub width: f64,
    /// Focal distance of the ellipse (always 1).
    pub focus_e: f64,
    /// Focal distance of the hyperboloid, `a`.
    pub focus_h: f64,
    /// Radius of the circle about `f_e` through `p1, p2`.
    pub r_splus_e: f64,
    /// Radius of the sphere about `f_h` through the circumcircle of `p3 p4 p5`.
    pub r_splus_h: f64,
}

impl ModelConstants {
    /// Closed-form constants of the body (`a^2 = 3/2`).
    pub fn body() -> Self {
        let s10 = 10f64.sqrt();
        let x0 = ((41.0 - 4.0 * s10) / 27.0).sqrt();
        let y0 = ((7.0 - 2.0 * s10) / 27.0).sqrt();
        let x1 = ((11.0 + 2.0 * s10) / 12.0).sqrt();
        Self::from_parts(BODY_A_SQ, x0, x1, y0)
    }

    /// Constants for any `a^2 > 1`, via [`solve_focal_embedding`].
    pub fn general(a_sq: f64) -> Result<Self> {
        let e = solve_focal_embedding(a_sq)?;
        Ok(Self::from_parts(a_sq, e.x0, e.x1, e.y0))
    }

    fn from_parts(a_sq: f64, x0: f64, x1: f64, y0: f64) -> Self {
        let a = a_sq.sqrt();
        let z1 = 0.5 * 3f64.sqrt() * y0;
        ModelConstants {
            a_sq,
            x0,
            x1,
            y0,
            z1,
            width: 2.0 * z1,
            focus_e: 1.0,
            focus_h: a,
            r_splus_e: a - x1 / a,
            r_splus_h: a * x0 - 1.0,
        }
    }

    pub fn a(&self) -> f64 {
        self.a_sq.sqrt()
    }

    /// `b^2 = a^2 - 1`, shared by both quadrics.
    pub fn b_sq(&self) -> f64 {
        self.a_sq - 1.0
    }

    pub fn is_body(&self) -> bool {
        self.a_sq == BODY_A_SQ
    }

    /// Radical forms of the body constants, for reports.
    pub fn exact_forms() -> BTreeMap<&'static str, &'static str> {
        BTreeMap::from([
            ("a_sq", "3/2"),
            ("x0", "sqrt((41 - 4 sqrt(10))/27)"),
            ("y0", "sqrt((7 - 2 sqrt(10))/27)"),
            ("x1", "sqrt((11 + 2 sqrt(10))/12)"),
            ("z1", "sqrt(3)/2 * y0"),
            ("width", "sqrt(7 - 2 sqrt(10))/3"),
            ("focus_e", "1"),
            ("focus_h", "sqrt(3/2)"),
            ("r_splus_e", "sqrt(3/2) - x1/sqrt(3/2)"),
            ("r_splus_h", "sqrt(3/2) x0 - 1"),
        ])
    }
}

/// Simplex coordinates returned by the general-parameter solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Embedding {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub z1: f64,
}

impl Embedding {
    /// Residuals of the four defining conditions: `p1` on the ellipse, `p3` on
    /// the hyperboloid, `z1 = (sqrt3/2) y0`, and `|p1 p3| = 2 z1`.
    pub fn residuals(&self, a_sq: f64) -> [f64; 4] {
        let b_sq = a_sq - 1.0;
        let Embedding { x0, x1, y0, z1 } = *self;
        [
            z1 * z1 - b_sq * (1.0 - x1 * x1 / a_sq),
            y0 * y0 - b_sq * (x0 * x0 - 1.0),
            z1 - 0.5 * 3f64.sqrt() * y0,
            ((x1 - x0).powi(2) + y0 * y0 + z1 * z1).sqrt() - 2.0 * z1,
        ]
    }
}

/// Finds `1 < x0 < x1 < a` so that the simplex with vertices
/// `(x1, 0, +-z1, 0)` and the equilateral triangle of circumradius `y0` at
/// `x = x0` is regular, with `p1, p2` on the ellipse and `p3, p4, p5` on the
/// hyperboloid.
///
/// Eliminating `y0`, `z1` and `x1` leaves one monotone equation in `x0`,
/// solved by bisection.
pub fn solve_focal_embedding(a_sq: f64) -> Result<Embedding> {
    if !(a_sq.is_finite() && a_sq > 1.0) {
        return Err(Error::InvalidParameter(format!("a^2 = {a_sq} must exceed 1")));
    }
    let a = a_sq.sqrt();
    let b_sq = a_sq - 1.0;
    let half_sqrt5 = 0.5 * 5f64.sqrt();
    let y0_of = |x0: f64| (b_sq * (x0 * x0 - 1.0)).max(0.0).sqrt();
    let x1_of = |x0: f64| a * (1.0 - 0.75 * (x0 * x0 - 1.0)).max(0.0).sqrt();
    let f = |x0: f64| x0 + half_sqrt5 * y0_of(x0) - x1_of(x0);

    // x1 is real only while x0^2 <= 7/3.
    let (mut lo, mut hi) = (1.0, a_sq.min(7.0 / 3.0).sqrt());
    let (f_lo, f_hi) = (f(lo), f(hi));
    if !(f_lo < 0.0 && f_hi > 0.0) {
        return Err(Error::NoConvergence(format!("no sign change on [{lo}, {hi}]: f = ({f_lo:e}, {f_hi:e})")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x0 = 0.5 * (lo + hi);
    let y0 = y0_of(x0);
    let emb = Embedding { x0, x1: x1_of(x0), y0, z1: 0.5 * 3f64.sqrt() * y0 };
    let worst = emb.residuals(a_sq).iter().fold(0.0f64, |m, r| m.max(r.abs()));
    if !(worst <= 1e-12) || !(1.0 < emb.x0 && emb.x0 < emb.x1 && emb.x1 < a) {
        return Err(Error::NoConvergence(format!("a^2 = {a_sq}: residual {worst:e}")));
    }
    Ok(emb)
}

/// Classes of numeric checks, each with one default absolute tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckClass {
    AlgebraicIdentity,
    GeometricResidual,
    SampledWidth,
    Diameter,
}

impl CheckClass {
    pub const ALL: [CheckClass; 4] =
        [CheckClass::AlgebraicIdentity, CheckClass::GeometricResidual, CheckClass::SampledWidth, CheckClass::Diameter];

    pub fn default_tolerance(self) -> f64 {
        match self {
            CheckClass::AlgebraicIdentity => 1e-12,
            CheckClass::GeometricResidual => 1e-10,
            CheckClass::SampledWidth => 1e-3,
            CheckClass::Diameter => 1e-9,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CheckClass::AlgebraicIdentity => "algebraic-identity",
            CheckClass::GeometricResidual => "geometric-residual",
            CheckClass::SampledWidth => "sampled-width",
            CheckClass::Diameter => "diameter",
        }
    }
}

impl fmt::Display for CheckClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CheckClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "algebraic-identity" | "algebraic" => Ok(CheckClass::AlgebraicIdentity),
            "geometric-residual" | "geometric" => Ok(CheckClass::GeometricResidual),
            "sampled-width" | "width" => Ok(CheckClass::SampledWidth),
            "diameter" => Ok(CheckClass::Diameter),
            _ => Err(Error::UnknownKind(s.to_string())),
        }
    }
}

/// Default tolerance for a check class given by name.
pub fn tolerance_policy(kind: &str) -> Result<f64> {
    Ok(kind.parse::<CheckClass>()?.default_tolerance())
}

/// Tolerance table with optional per-class overrides.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    overrides: BTreeMap<CheckClass, f64>,
}

impl Tolerances {
    pub fn get(&self, class: CheckClass) -> f64 {
        self.overrides.get(&class).copied().unwrap_or_else(|| class.default_tolerance())
    }

    pub fn set(&mut self, class: CheckClass, value: f64) -> Result<()> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::InvalidParameter(format!("tolerance {class} = {value}")));
        }
        self.overrides.insert(class, value);
        Ok(())
    }

    /// Applies a `name=value` override.
    pub fn apply_override(&mut self, spec: &str) -> Result<()> {
        let (name, value) = spec
            .split_once('=')
            .ok_or_else(|| Error::InvalidParameter(format!("expected name=value, got `{spec}`")))?;
        let value: f64 =
            value.trim().parse().map_err(|_| Error::InvalidParameter(format!("bad tolerance value `{value}`")))?;
        self.set(name.parse()?, value)
    }

    pub fn table(&self) -> BTreeMap<String, f64> {
        CheckClass::ALL.iter().map(|c| (c.name().to_string(), self.get(*c))).collect()
    }
}
