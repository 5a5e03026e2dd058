//! Points, rigid motions of 4-space, and quadrics in orthonormal frames.

use nalgebra::{Matrix4, SMatrix, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of 4-space with coordinates ordered `(x, y, z, w)`.
pub type Point4 = Vector4<f64>;

pub fn point(x: f64, y: f64, z: f64, w: f64) -> Point4 {
    Point4::new(x, y, z, w)
}

pub fn dist(a: &Point4, b: &Point4) -> f64 {
    (a - b).norm()
}

/// `x -> linear * x + translation` with orthogonal `linear`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Isometry4 {
    pub linear: Matrix4<f64>,
    pub translation: Point4,
}

impl Isometry4 {
    pub fn identity() -> Self {
        Isometry4 { linear: Matrix4::identity(), translation: Point4::zeros() }
    }

    /// The motion sending `vertices[i]` to `vertices[perm[i]]` (0-based).
    ///
    /// Solved as an orthogonal alignment of the centroid-centred vertex
    /// sets: the polar factor of the cross-covariance. Reflections are kept.
    pub fn from_vertex_permutation(vertices: &[Point4; 5], perm: [usize; 5]) -> Result<Self> {
        check_permutation(perm)?;
        let g = vertices.iter().sum::<Point4>() / 5.0;
        let src = SMatrix::<f64, 4, 5>::from_fn(|r, c| vertices[c][r] - g[r]);
        let dst = SMatrix::<f64, 4, 5>::from_fn(|r, c| vertices[perm[c]][r] - g[r]);

        let sv = src.singular_values();
        let scale = sv.max();
        if !(sv.min() > 1e-9 * scale.max(f64::MIN_POSITIVE)) {
            return Err(Error::DegenerateSimplex);
        }
        let mut lengths = Vec::with_capacity(10);
        for i in 0..5 {
            for j in i + 1..5 {
                lengths.push(dist(&vertices[i], &vertices[j]));
            }
        }
        let (lo, hi) = lengths.iter().fold((f64::MAX, 0.0f64), |(l, h), &d| (l.min(d), h.max(d)));
        if hi - lo > 1e-10 {
            return Err(Error::NotRegular(hi - lo));
        }

        let m: Matrix4<f64> = dst * src.transpose();
        let svd = m.svd(true, true);
        let (u, v_t) = (svd.u.ok_or(Error::DegenerateSimplex)?, svd.v_t.ok_or(Error::DegenerateSimplex)?);
        let linear = u * v_t;
        Ok(Isometry4 { linear, translation: g - linear * g })
    }

    pub fn apply(&self, p: &Point4) -> Point4 {
        self.linear * p + self.translation
    }

    /// Applies the linear part only (for directions and normals).
    pub fn apply_vector(&self, v: &Point4) -> Point4 {
        self.linear * v
    }

    /// `self after other`.
    pub fn compose(&self, other: &Isometry4) -> Isometry4 {
        Isometry4 {
            linear: self.linear * other.linear,
            translation: self.linear * other.translation + self.translation,
        }
    }

    pub fn inverse(&self) -> Isometry4 {
        let lt = self.linear.transpose();
        Isometry4 { linear: lt, translation: -(lt * self.translation) }
    }

    pub fn det(&self) -> f64 {
        self.linear.determinant()
    }

    /// Largest entry of `|L^T L - I|`.
    pub fn orthogonality_defect(&self) -> f64 {
        (self.linear.transpose() * self.linear - Matrix4::identity()).amax()
    }

    /// Largest entry-wise difference of linear parts and translations.
    pub fn max_entry_diff(&self, other: &Isometry4) -> f64 {
        (self.linear - other.linear).amax().max((self.translation - other.translation).amax())
    }
}

fn check_permutation(perm: [usize; 5]) -> Result<()> {
    let mut seen = [false; 5];
    for &p in &perm {
        if p >= 5 || seen[p] {
            return Err(Error::InvalidParameter(format!("{perm:?} is not a permutation of 0..5")));
        }
        seen[p] = true;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadricKind {
    /// `u1^2/a^2 + u2^2/b^2 = 1` in the plane of `e1, e2`.
    Ellipse,
    /// `u1^2/a^2 - u2^2/b^2 = 1` in the plane of `e1, e2`.
    Hyperbola,
    /// `u1^2/a^2 - (u2^2 + u3^2)/b^2 = 1` in the 3-space of `e1, e2, e3`.
    Hyperboloid,
}

/// A central conic or hyperboloid of revolution placed by an orthonormal
/// frame. Local coordinates are `u = axes^T (p - origin)`; `e1` is the
/// focal axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadric {
    pub kind: QuadricKind,
    pub origin: Point4,
    /// Orthonormal frame, one axis per column.
    pub axes: Matrix4<f64>,
    pub a_sq: f64,
    pub b_sq: f64,
}

impl Quadric {
    pub fn new(kind: QuadricKind, origin: Point4, axes: Matrix4<f64>, a_sq: f64, b_sq: f64) -> Result<Self> {
        if !(a_sq > 0.0 && b_sq > 0.0) {
            return Err(Error::InvalidParameter(format!("semi-axes a^2 = {a_sq}, b^2 = {b_sq}")));
        }
        if (axes.transpose() * axes - Matrix4::identity()).amax() > 1e-12 {
            return Err(Error::InvalidParameter("quadric frame is not orthonormal".into()));
        }
        Ok(Quadric { kind, origin, axes, a_sq, b_sq })
    }

    /// Ellipse `x^2/a^2 + z^2/(a^2-1) = 1` in the `xz`-plane, foci `(+-1,0,0,0)`.
    pub fn standard_ellipse(a_sq: f64) -> Result<Self> {
        let axes = Matrix4::from_columns(&[Point4::x(), Point4::z(), Point4::y(), Point4::w()]);
        Self::new(QuadricKind::Ellipse, Point4::zeros(), axes, a_sq, a_sq - 1.0)
    }

    /// Hyperboloid `x^2 - (y^2 + w^2)/(a^2-1) = 1` in the `xyw`-space,
    /// foci `(+-a,0,0,0)`.
    pub fn standard_hyperboloid(a_sq: f64) -> Result<Self> {
        let axes = Matrix4::from_columns(&[Point4::x(), Point4::y(), Point4::w(), Point4::z()]);
        Self::new(QuadricKind::Hyperboloid, Point4::zeros(), axes, 1.0, a_sq - 1.0)
    }

    pub fn a(&self) -> f64 {
        self.a_sq.sqrt()
    }

    pub fn axis(&self, i: usize) -> Point4 {
        self.axes.column(i).into_owned()
    }

    pub fn local(&self, p: &Point4) -> Point4 {
        self.axes.transpose() * (p - self.origin)
    }

    pub fn world(&self, u: &Point4) -> Point4 {
        self.axes * u + self.origin
    }

    /// Dimension of the carrier flat (2 for conics, 3 for the hyperboloid).
    pub fn carrier_dim(&self) -> usize {
        match self.kind {
            QuadricKind::Hyperboloid => 3,
            _ => 2,
        }
    }

    /// Normalized implicit residual in the carrier flat; zero on the quadric.
    pub fn residual(&self, p: &Point4) -> f64 {
        let u = self.local(p);
        let (a2, b2) = (self.a_sq, self.b_sq);
        match self.kind {
            QuadricKind::Ellipse => u[0] * u[0] / a2 + u[1] * u[1] / b2 - 1.0,
            QuadricKind::Hyperbola => u[0] * u[0] / a2 - u[1] * u[1] / b2 - 1.0,
            QuadricKind::Hyperboloid => u[0] * u[0] / a2 - (u[1] * u[1] + u[2] * u[2]) / b2 - 1.0,
        }
    }

    /// Distance from `p` to the carrier flat.
    pub fn carrier_distance(&self, p: &Point4) -> f64 {
        let u = self.local(p);
        u.rows(self.carrier_dim(), 4 - self.carrier_dim()).norm()
    }

    /// `residual` and `carrier_distance` combined by magnitude.
    pub fn total_residual(&self, p: &Point4) -> f64 {
        self.residual(p).abs().max(self.carrier_distance(p))
    }

    /// Half the focal separation.
    pub fn focal_distance(&self) -> f64 {
        match self.kind {
            QuadricKind::Ellipse => (self.a_sq - self.b_sq).sqrt(),
            _ => (self.a_sq + self.b_sq).sqrt(),
        }
    }

    /// Foci `(+, -)` along `e1`.
    pub fn foci(&self) -> (Point4, Point4) {
        let c = self.focal_distance() * self.axis(0);
        (self.origin + c, self.origin - c)
    }

    /// Image of the quadric under a rigid motion.
    pub fn transformed(&self, m: &Isometry4) -> Quadric {
        Quadric { origin: m.apply(&self.origin), axes: m.linear * self.axes, ..*self }
    }

    /// Ellipse point at eccentric angle `t` (`t = 0` is the `+e1` vertex).
    pub fn ellipse_point(&self, t: f64) -> Result<Point4> {
        if self.kind != QuadricKind::Ellipse {
            return Err(Error::OutOfDomain("ellipse_point on a non-ellipse".into()));
        }
        Ok(self.world(&Point4::new(self.a() * t.cos(), self.b_sq.sqrt() * t.sin(), 0.0, 0.0)))
    }

    /// Point of the `+e1` sheet with axial coordinate `x >= a`, at angle
    /// `theta` about the axis measured from `e2` toward `e3`.
    pub fn hyperboloid_point(&self, x: f64, theta: f64) -> Result<Point4> {
        if self.kind != QuadricKind::Hyperboloid {
            return Err(Error::OutOfDomain("hyperboloid_point on a non-hyperboloid".into()));
        }
        let a = self.a();
        if !(x >= a) {
            return Err(Error::OutOfDomain(format!("x = {x} is below the sheet vertex {a}")));
        }
        let r = (self.b_sq * (x * x / self.a_sq - 1.0)).sqrt();
        Ok(self.world(&Point4::new(x, r * theta.cos(), r * theta.sin(), 0.0)))
    }

    /// Local `(u2, u3)` of the `+e1` sheet point above them: `u1 = a sqrt(1 + (u2^2+u3^2)/b^2)`.
    pub fn hyperboloid_point_yw(&self, u2: f64, u3: f64) -> Point4 {
        let u1 = self.a() * (1.0 + (u2 * u2 + u3 * u3) / self.b_sq).sqrt();
        self.world(&Point4::new(u1, u2, u3, 0.0))
    }
}
