//! Focal pairs of an ellipse and a hyperboloid, the two focal distance
//! identities, and the Steiner-chain radius functions built on them.

use crate::error::{Error, Result};
use crate::geometry::{dist, Point4, Quadric, QuadricKind};
use crate::numerics::ModelConstants;

/// An ellipse and a hyperboloid of revolution with a common focal axis,
/// orthogonal carriers, and each one passing through the foci of the other.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FocalPair {
    pub ellipse: Quadric,
    pub hyperboloid: Quadric,
    pub axis_point: Point4,
    pub axis_dir: Point4,
}

const PAIR_TOL: f64 = 1e-12;

impl FocalPair {
    pub fn new(ellipse: Quadric, hyperboloid: Quadric) -> Result<Self> {
        if ellipse.kind != QuadricKind::Ellipse || hyperboloid.kind != QuadricKind::Hyperboloid {
            return Err(Error::NotFocal("expected an ellipse and a hyperboloid".into()));
        }
        let axis_point = ellipse.origin;
        let axis_dir = ellipse.axis(0);
        let off_axis = |p: &Point4| {
            let d = p - axis_point;
            (d - d.dot(&axis_dir) * axis_dir).norm()
        };
        if off_axis(&hyperboloid.origin) > PAIR_TOL || (1.0 - axis_dir.dot(&hyperboloid.axis(0)).abs()) > PAIR_TOL {
            return Err(Error::NotFocal("principal axes are not collinear".into()));
        }
        // The ellipse plane meets the hyperboloid 3-space only in the axis.
        if (1.0 - ellipse.axis(1).dot(&hyperboloid.axis(3)).abs()) > PAIR_TOL {
            return Err(Error::NotFocal("carriers are not orthogonal".into()));
        }
        let (e1, e2) = ellipse.foci();
        let (h1, h2) = hyperboloid.foci();
        let worst = [hyperboloid.total_residual(&e1), hyperboloid.total_residual(&e2)]
            .into_iter()
            .chain([ellipse.total_residual(&h1), ellipse.total_residual(&h2)])
            .fold(0.0f64, f64::max);
        if worst > PAIR_TOL {
            return Err(Error::NotFocal(format!("foci miss the partner quadric by {worst:e}")));
        }
        Ok(FocalPair { ellipse, hyperboloid, axis_point, axis_dir })
    }

    /// The standard pair for parameter `a^2`.
    pub fn standard(a_sq: f64) -> Result<Self> {
        Self::new(Quadric::standard_ellipse(a_sq)?, Quadric::standard_hyperboloid(a_sq)?)
    }

    /// `-|f_h f_e|`, the value of the constant-sum identity.
    pub fn focal_constant(&self) -> f64 {
        -dist(&self.ellipse.foci().0, &self.hyperboloid.foci().0)
    }

    pub fn sum_residual(&self, a_e: &Point4, b_e: &Point4, a_h: &Point4, b_h: &Point4) -> Result<f64> {
        focal_sum_residual(&self.ellipse, &self.hyperboloid, a_e, b_e, a_h, b_h)
    }

    pub fn const_residual(&self, a_e: &Point4, a_h: &Point4) -> Result<f64> {
        focal_const_residual(&self.ellipse, &self.hyperboloid, a_e, a_h)
    }
}

fn sheet_sign(h: &Quadric, p: &Point4) -> f64 {
    h.local(p)[0].signum()
}

/// `(|a_e a_h| + |b_e b_h|) - (|a_h b_e| + |a_e b_h|)`; zero for focal pairs.
pub fn focal_sum_residual(
    _e: &Quadric,
    h: &Quadric,
    a_e: &Point4,
    b_e: &Point4,
    a_h: &Point4,
    b_h: &Point4,
) -> Result<f64> {
    if sheet_sign(h, a_h) != sheet_sign(h, b_h) {
        return Err(Error::NotSameComponent);
    }
    Ok((dist(a_e, a_h) + dist(b_e, b_h)) - (dist(a_h, b_e) + dist(a_e, b_h)))
}

/// `|a_e a_h| - |a_h f_h| - |a_e f_e| + |f_h f_e|`, with `f_e` the `+e1`
/// focus of the ellipse and `f_h` the `+e1` focus of the hyperboloid.
///
/// `a_h` must lie on the sheet that contains `f_e`.
pub fn focal_const_residual(e: &Quadric, h: &Quadric, a_e: &Point4, a_h: &Point4) -> Result<f64> {
    let f_e = e.foci().0;
    let f_h = h.foci().0;
    if sheet_sign(h, a_h) != sheet_sign(h, &f_e) {
        return Err(Error::WrongComponent);
    }
    Ok(dist(a_e, a_h) - dist(a_h, &f_h) - dist(a_e, &f_e) + dist(&f_h, &f_e))
}

/// Radii of the two Steiner-chain families on the base dual pair: circles
/// centred on the ellipse arc through `p1, p2` and spheres centred on the
/// hyperboloid cap bounded by the circumcircle of `p3, p4, p5`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainRadii {
    pub r_splus_e: f64,
    pub r_splus_h: f64,
    pub focus_e: Point4,
    pub focus_h: Point4,
    pub consts: ModelConstants,
    ellipse: Quadric,
    hyperboloid: Quadric,
    /// Scale applied to both radius laws; 1 except in negative controls.
    pub scale: f64,
}

/// Distance a point may sit off its quadric and still count as on it.
pub const ON_QUADRIC_TOL: f64 = 1e-9;

impl ChainRadii {
    pub fn new(c: &ModelConstants) -> Result<Self> {
        Ok(ChainRadii {
            r_splus_e: c.r_splus_e,
            r_splus_h: c.r_splus_h,
            focus_e: Point4::new(c.focus_e, 0.0, 0.0, 0.0),
            focus_h: Point4::new(c.focus_h, 0.0, 0.0, 0.0),
            consts: *c,
            ellipse: Quadric::standard_ellipse(c.a_sq)?,
            hyperboloid: Quadric::standard_hyperboloid(c.a_sq)?,
            scale: 1.0,
        })
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn ellipse(&self) -> &Quadric {
        &self.ellipse
    }

    pub fn hyperboloid(&self) -> &Quadric {
        &self.hyperboloid
    }

    /// `R_y = r_e - |y f_e|`, for `y` on the ellipse arc with `x >= x1`.
    pub fn elliptic(&self, y: &Point4) -> Result<f64> {
        let off = self.ellipse.total_residual(y);
        if off > ON_QUADRIC_TOL || y.x < self.consts.x1 - ON_QUADRIC_TOL {
            return Err(Error::OffArc(off.max(self.consts.x1 - y.x)));
        }
        Ok(self.scale * (self.r_splus_e - dist(y, &self.focus_e)).max(0.0))
    }

    /// `R_x = r_h - |x f_h|`, for `x` on the `+` sheet with `x <= x0`.
    pub fn hyperbolic(&self, x: &Point4) -> Result<f64> {
        let off = self.hyperboloid.total_residual(x);
        if off > ON_QUADRIC_TOL || x.x < 0.0 {
            return Err(Error::OffPatch(format!("hyperboloid residual {off:e}")));
        }
        if x.x > self.consts.x0 + ON_QUADRIC_TOL {
            return Err(Error::OffPatch(format!("x = {} beyond the circumcircle plane x0", x.x)));
        }
        Ok(self.scale * (self.r_splus_h - dist(x, &self.focus_h)).max(0.0))
    }

    /// The elliptic law without domain checks; negative off the arc.
    #[inline]
    pub fn elliptic_unchecked(&self, y: &Point4) -> f64 {
        self.scale * (self.r_splus_e - dist(y, &self.focus_e))
    }

    /// The hyperbolic law without domain checks; negative beyond `x0`.
    #[inline]
    pub fn hyperbolic_unchecked(&self, x: &Point4) -> f64 {
        self.scale * (self.r_splus_h - dist(x, &self.focus_h))
    }
}

pub fn steiner_radius_elliptic(chain: &ChainRadii, y: &Point4) -> Result<f64> {
    chain.elliptic(y)
}

pub fn steiner_radius_hyperbolic(chain: &ChainRadii, x: &Point4) -> Result<f64> {
    chain.hyperbolic(x)
}

/// `(|x y| + R_x + R_y) - 2 z1`.
pub fn steiner_sum_residual(chain: &ChainRadii, x: &Point4, y: &Point4) -> Result<f64> {
    Ok(dist(x, y) + chain.hyperbolic(x)? + chain.elliptic(y)? - chain.consts.width)
}

fn bisect_decreasing(mut lo: f64, mut hi: f64, g: impl Fn(f64) -> f64) -> Option<f64> {
    let (g_lo, g_hi) = (g(lo), g(hi));
    if g_lo.signum() == g_hi.signum() && g_lo != 0.0 && g_hi != 0.0 {
        return None;
    }
    let increasing = g_lo < g_hi;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (g(mid) < 0.0) == increasing {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Circle of the elliptic chain in direction `dir` (unit, in the `xz`-plane)
/// from `f_e`: internally tangent to `S+` (centre `f_e`, radius `r_e`) and
/// externally tangent to `S-` (centre `-f_e`, radius `2a - r_e`).
///
/// Found from the two tangency conditions alone. Returns `(centre, radius)`.
pub fn elliptic_chain_circle(chain: &ChainRadii, dir: &Point4) -> Option<(Point4, f64)> {
    let a = chain.consts.a();
    let (r_plus, r_minus) = (chain.r_splus_e, 2.0 * a - chain.r_splus_e);
    let f_minus = -chain.focus_e;
    let centre = |r: f64| chain.focus_e + (r_plus - r) * dir;
    let r = bisect_decreasing(0.0, r_plus, |r| dist(&centre(r), &f_minus) - (r_minus + r))?;
    Some((centre(r), r))
}

/// Sphere of the hyperbolic chain in direction `dir` (unit, in the
/// `xyw`-space) from `f_h`: internally tangent to both `S+` (centre `f_h`,
/// radius `r_h`) and `S-` (centre `-f_h`, radius `2 + r_h`).
pub fn hyperbolic_chain_sphere(chain: &ChainRadii, dir: &Point4) -> Option<(Point4, f64)> {
    let (r_plus, r_minus) = (chain.r_splus_h, 2.0 + chain.r_splus_h);
    let f_minus = -chain.focus_h;
    let centre = |r: f64| chain.focus_h + (r_plus - r) * dir;
    let r = bisect_decreasing(0.0, r_plus, |r| dist(&centre(r), &f_minus) - (r_minus - r))?;
    Some((centre(r), r))
}
