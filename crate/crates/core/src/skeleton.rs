//! The focally embedded regular simplex, its symmetry group, and the focal
//! 2-skeleton: ten ellipse arcs and ten hyperboloid triangles obtained as
//! images of one base arc and one base triangle.
//!
//! Vertex indices are 0-based in code and printed 1-based.

use std::f64::consts::{PI, TAU};
use std::fmt;

use itertools::Itertools;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::focal::{ChainRadii, FocalPair};
use crate::geometry::{dist, point, Isometry4, Point4, Quadric};
use crate::numerics::ModelConstants;

pub const BASE_EDGE: [usize; 2] = [0, 1];
pub const BASE_TRIANGLE: [usize; 3] = [2, 3, 4];

/// Motion fixing `p3` and sending `p1 -> p4`, `p2 -> p5`.
pub const PHI_PERM: [usize; 5] = [3, 4, 2, 0, 1];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Simplex4 {
    pub vertices: [Point4; 5],
}

impl Simplex4 {
    pub fn build(c: &ModelConstants) -> Self {
        let h = 0.5 * 3f64.sqrt() * c.y0;
        Simplex4 {
            vertices: [
                point(c.x1, 0.0, c.z1, 0.0),
                point(c.x1, 0.0, -c.z1, 0.0),
                point(c.x0, c.y0, 0.0, 0.0),
                point(c.x0, -c.y0 / 2.0, 0.0, -h),
                point(c.x0, -c.y0 / 2.0, 0.0, h),
            ],
        }
    }

    pub fn centroid(&self) -> Point4 {
        self.vertices.iter().sum::<Point4>() / 5.0
    }

    pub fn midpoint(&self, i: usize, j: usize) -> Point4 {
        0.5 * (self.vertices[i] + self.vertices[j])
    }

    pub fn barycenter(&self, i: usize, j: usize, k: usize) -> Point4 {
        (self.vertices[i] + self.vertices[j] + self.vertices[k]) / 3.0
    }

    pub fn edge_lengths(&self) -> Vec<f64> {
        (0..5).tuple_combinations().map(|(i, j)| dist(&self.vertices[i], &self.vertices[j])).collect()
    }

    /// Line through `p_ij` and the barycentre of the complementary triangle,
    /// as `(point, unit direction toward the barycentre)`.
    pub fn dual_axis(&self, i: usize, j: usize) -> (Point4, Point4) {
        let [k, l, m] = complement_edge([i, j]);
        let from = self.midpoint(i, j);
        let dir = (self.barycenter(k, l, m) - from).normalize();
        (from, dir)
    }
}

pub fn build_simplex(c: &ModelConstants) -> Simplex4 {
    Simplex4::build(c)
}

pub fn complement_edge(e: [usize; 2]) -> [usize; 3] {
    let v: Vec<usize> = (0..5).filter(|k| !e.contains(k)).collect();
    [v[0], v[1], v[2]]
}

pub fn complement_triangle(t: [usize; 3]) -> [usize; 2] {
    let v: Vec<usize> = (0..5).filter(|k| !t.contains(k)).collect();
    [v[0], v[1]]
}

/// All 120 vertex permutations in lexicographic order with their motions.
#[derive(Debug, Clone)]
pub struct SymmetryGroup {
    pub perms: Vec<[usize; 5]>,
    pub motions: Vec<Isometry4>,
}

impl SymmetryGroup {
    pub fn new(s: &Simplex4) -> Result<Self> {
        let perms: Vec<[usize; 5]> = (0..5).permutations(5).map(|p| [p[0], p[1], p[2], p[3], p[4]]).collect();
        let motions =
            perms.iter().map(|p| Isometry4::from_vertex_permutation(&s.vertices, *p)).collect::<Result<Vec<_>>>()?;
        Ok(SymmetryGroup { perms, motions })
    }

    pub fn len(&self) -> usize {
        self.perms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perms.is_empty()
    }

    pub fn index_of(&self, perm: &[usize; 5]) -> Option<usize> {
        self.perms.iter().position(|p| p == perm)
    }

    pub fn motion(&self, perm: &[usize; 5]) -> Option<&Isometry4> {
        self.index_of(perm).map(|k| &self.motions[k])
    }

    /// Largest entry gap between `motion(s o t)` and `motion(s) motion(t)`.
    pub fn closure_defect(&self, pairs: impl IntoIterator<Item = (usize, usize)>) -> f64 {
        pairs
            .into_iter()
            .map(|(a, b)| {
                let (s, t) = (self.perms[a], self.perms[b]);
                let st = [s[t[0]], s[t[1]], s[t[2]], s[t[3]], s[t[4]]];
                let k = self.index_of(&st).expect("group is closed");
                self.motions[k].max_entry_diff(&self.motions[a].compose(&self.motions[b]))
            })
            .fold(0.0, f64::max)
    }
}

pub fn build_symmetry_group(s: &Simplex4) -> Result<SymmetryGroup> {
    SymmetryGroup::new(s)
}

/// The ellipse arc between `p1` and `p2` through the vertex `(a, 0, 0, 0)`,
/// parametrized by eccentric angle `t in [-t1, t1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaseArc {
    pub quadric: Quadric,
    pub t1: f64,
}

impl BaseArc {
    pub fn new(c: &ModelConstants) -> Result<Self> {
        let quadric = Quadric::standard_ellipse(c.a_sq)?;
        let t1 = (c.z1 / c.b_sq().sqrt()).atan2(c.x1 / c.a());
        Ok(BaseArc { quadric, t1 })
    }

    pub fn point(&self, t: f64) -> Point4 {
        let (a, b) = (self.quadric.a(), self.quadric.b_sq.sqrt());
        point(a * t.cos(), 0.0, b * t.sin(), 0.0)
    }

    pub fn param_of(&self, p: &Point4) -> f64 {
        let (a, b) = (self.quadric.a(), self.quadric.b_sq.sqrt());
        (p.z / b).atan2(p.x / a)
    }

    pub fn tangent(&self, t: f64) -> Point4 {
        let (a, b) = (self.quadric.a(), self.quadric.b_sq.sqrt());
        point(-a * t.sin(), 0.0, b * t.cos(), 0.0)
    }

    /// Parameters of `n - 1` interior nodes splitting the arc into `n` pieces.
    pub fn interior_params(&self, n: usize) -> Vec<f64> {
        (1..n).map(|k| self.t1 * (2.0 * k as f64 / n as f64 - 1.0)).collect()
    }

    /// `n + 1` parameters including both endpoints.
    pub fn closed_params(&self, n: usize) -> Vec<f64> {
        (0..=n).map(|k| self.t1 * (2.0 * k as f64 / n as f64 - 1.0)).collect()
    }

    /// Upper bound on the distance from `p` to the arc.
    pub fn distance(&self, p: &Point4) -> f64 {
        let t = self.param_of(p).clamp(-self.t1, self.t1);
        dist(p, &self.point(t))
    }
}

/// One side of the base triangle: a plane of the `xyw`-space through two
/// corners and the barycentre of the opposite face of the simplex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutPlane {
    /// Corners it passes through (0-based).
    pub edge: [usize; 2],
    /// Unit normal with zero `z` component, pointing into the triangle.
    pub normal: Point4,
    pub anchor: Point4,
}

impl CutPlane {
    pub fn signed(&self, p: &Point4) -> f64 {
        self.normal.dot(&(p - self.anchor))
    }
}

/// The piece of the hyperboloid sheet bounded by the three cut planes,
/// parametrized conformingly by `(s, theta)`: the point at angle `theta`
/// about the axis and at `s * r_max(theta)` from it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasePatch {
    pub quadric: Quadric,
    pub cuts: [CutPlane; 3],
}

impl BasePatch {
    pub fn new(c: &ModelConstants, s: &Simplex4) -> Result<Self> {
        let quadric = Quadric::standard_hyperboloid(c.a_sq)?;
        let pole = point(quadric.a(), 0.0, 0.0, 0.0);
        let mut cuts = Vec::with_capacity(3);
        for (j, k) in BASE_TRIANGLE.iter().copied().tuple_combinations() {
            let [u, v, w] = complement_edge([j, k]);
            let (pj, pk) = (s.vertices[j], s.vertices[k]);
            let far = s.barycenter(u, v, w);
            let d1 = (pk - pj).xyz_of_xyw();
            let d2 = (far - pj).xyz_of_xyw();
            let n3 = d1.cross(&d2).normalize();
            let mut normal = point(n3.x, n3.y, 0.0, n3.z);
            if normal.dot(&(pole - pj)) < 0.0 {
                normal = -normal;
            }
            cuts.push(CutPlane { edge: [j, k], normal, anchor: pj });
        }
        Ok(BasePatch { quadric, cuts: [cuts[0], cuts[1], cuts[2]] })
    }

    pub fn pole(&self) -> Point4 {
        point(self.quadric.a(), 0.0, 0.0, 0.0)
    }

    /// Distance from the axis to the patch boundary at angle `theta`.
    pub fn r_max(&self, theta: f64) -> f64 {
        let (c, s) = (theta.cos(), theta.sin());
        self.cuts.iter().map(|cut| self.radial_limit(cut, c, s)).fold(f64::INFINITY, f64::min)
    }

    // The constraint is concave in r and positive at r = 0, so it has at most
    // one positive root; squaring admits a spurious root of the wrong sign.
    fn radial_limit(&self, cut: &CutPlane, c: f64, s: f64) -> f64 {
        let (a, b_sq) = (self.quadric.a(), self.quadric.b_sq);
        let n = cut.normal;
        let k = n.dot(&cut.anchor);
        let bb = n.y * c + n.w * s;
        let m = n.x * a;
        let qa = bb * bb - m * m / b_sq;
        let qb = -2.0 * k * bb;
        let qc = k * k - m * m;
        let roots: Vec<f64> = if qa.abs() < 1e-300 {
            if qb == 0.0 {
                vec![]
            } else {
                vec![-qc / qb]
            }
        } else {
            let disc = qb * qb - 4.0 * qa * qc;
            if disc < 0.0 {
                vec![]
            } else {
                let q = -0.5 * (qb + qb.signum() * disc.sqrt());
                let mut r = vec![q / qa];
                if q != 0.0 {
                    r.push(qc / q);
                }
                r
            }
        };
        roots.into_iter().filter(|&r| r > 0.0 && (k - r * bb) * m >= 0.0).fold(f64::INFINITY, f64::min)
    }

    pub fn point_polar(&self, s: f64, theta: f64) -> Point4 {
        let r = s * self.r_max(theta);
        self.point_yw(r * theta.cos(), r * theta.sin())
    }

    /// The sheet point above `(y, w)`.
    pub fn point_yw(&self, y: f64, w: f64) -> Point4 {
        self.quadric.hyperboloid_point_yw(y, w)
    }

    pub fn polar_of(&self, p: &Point4) -> (f64, f64) {
        let theta = p.w.atan2(p.y);
        let r = p.y.hypot(p.w);
        (r / self.r_max(theta), theta)
    }

    /// Smallest signed cut distance (negative outside).
    pub fn cut_margin(&self, p: &Point4) -> f64 {
        self.cuts.iter().map(|c| c.signed(p)).fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, p: &Point4, tol: f64) -> bool {
        self.quadric.total_residual(p) <= tol && self.cut_margin(p) >= -tol && p.x > 0.0
    }

    /// Nodes `(s, theta)`: the pole once, then `ns` rings of `nt` angles.
    pub fn grid_params(ns: usize, nt: usize) -> Vec<(f64, f64)> {
        let mut out = vec![(0.0, 0.0)];
        for i in 1..=ns {
            for j in 0..nt {
                out.push((i as f64 / ns as f64, TAU * j as f64 / nt as f64));
            }
        }
        out
    }

    /// Upper bound on the distance from `p` to the patch.
    pub fn distance(&self, p: &Point4) -> f64 {
        let (s, theta) = self.polar_of(p);
        let q = if s <= 1.0 { self.point_yw(p.y, p.w) } else { self.point_polar(1.0, theta) };
        dist(p, &q)
    }
}

trait XywProjection {
    fn xyz_of_xyw(&self) -> nalgebra::Vector3<f64>;
}

impl XywProjection for Point4 {
    fn xyz_of_xyw(&self) -> nalgebra::Vector3<f64> {
        nalgebra::Vector3::new(self.x, self.y, self.w)
    }
}

/// A cell of the skeleton: an edge arc `E_ij` or a triangle `H_ijk`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FaceId {
    Edge([usize; 2]),
    Triangle([usize; 3]),
}

impl FaceId {
    pub fn all() -> Vec<FaceId> {
        let edges = (0..5).tuple_combinations().map(|(i, j)| FaceId::Edge([i, j]));
        let tris = (0..5).tuple_combinations().map(|(i, j, k)| FaceId::Triangle([i, j, k]));
        edges.chain(tris).collect()
    }

    pub fn vertices(&self) -> &[usize] {
        match self {
            FaceId::Edge(v) => v,
            FaceId::Triangle(v) => v,
        }
    }

    pub fn dual(&self) -> FaceId {
        match *self {
            FaceId::Edge(e) => FaceId::Triangle(complement_edge(e)),
            FaceId::Triangle(t) => FaceId::Edge(complement_triangle(t)),
        }
    }

    /// Image under a vertex permutation.
    pub fn permuted(&self, perm: &[usize; 5]) -> FaceId {
        match *self {
            FaceId::Edge([i, j]) => {
                let mut v = [perm[i], perm[j]];
                v.sort_unstable();
                FaceId::Edge(v)
            }
            FaceId::Triangle([i, j, k]) => {
                let mut v = [perm[i], perm[j], perm[k]];
                v.sort_unstable();
                FaceId::Triangle(v)
            }
        }
    }
}

impl fmt::Display for FaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self {
            FaceId::Edge(_) => 'E',
            FaceId::Triangle(_) => 'H',
        };
        write!(f, "{tag}")?;
        for v in self.vertices() {
            write!(f, "{}", v + 1)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkeletonFace {
    pub id: FaceId,
    /// Lexicographically smallest permutation carrying the base face here.
    pub perm: [usize; 5],
    pub motion: Isometry4,
    pub inverse: Isometry4,
    pub quadric: Quadric,
}

impl SkeletonFace {
    pub fn to_base(&self, p: &Point4) -> Point4 {
        self.inverse.apply(p)
    }

    pub fn from_base(&self, p: &Point4) -> Point4 {
        self.motion.apply(p)
    }
}

/// The complete focal 2-skeleton with its radius laws.
#[derive(Debug, Clone)]
pub struct FocalSkeleton {
    pub consts: ModelConstants,
    pub simplex: Simplex4,
    pub group: SymmetryGroup,
    pub chain: ChainRadii,
    pub arc: BaseArc,
    pub patch: BasePatch,
    /// Ten edges, then ten triangles, each in lexicographic order.
    pub faces: Vec<SkeletonFace>,
}

/// Tolerance for a point to count as lying on a face.
pub const FACE_TOL: f64 = 1e-9;

impl FocalSkeleton {
    pub fn build(c: &ModelConstants) -> Result<Self> {
        Self::build_scaled(c, 1.0)
    }

    /// Skeleton whose Steiner radii are multiplied by `radius_scale`.
    pub fn build_scaled(c: &ModelConstants, radius_scale: f64) -> Result<Self> {
        let simplex = Simplex4::build(c);
        let group = SymmetryGroup::new(&simplex)?;
        let chain = ChainRadii::new(c)?.with_scale(radius_scale);
        let arc = BaseArc::new(c)?;
        let patch = BasePatch::new(c, &simplex)?;
        let faces = FaceId::all()
            .into_iter()
            .map(|id| {
                let (base, base_quadric) = match id {
                    FaceId::Edge(_) => (FaceId::Edge(BASE_EDGE), arc.quadric),
                    FaceId::Triangle(_) => (FaceId::Triangle(BASE_TRIANGLE), patch.quadric),
                };
                let k = group.perms.iter().position(|p| base.permuted(p) == id).expect("transitive");
                let motion = group.motions[k];
                SkeletonFace {
                    id,
                    perm: group.perms[k],
                    motion,
                    inverse: motion.inverse(),
                    quadric: base_quadric.transformed(&motion),
                }
            })
            .collect();
        Ok(FocalSkeleton { consts: *c, simplex, group, chain, arc, patch, faces })
    }

    pub fn face_index(&self, id: FaceId) -> usize {
        self.faces.iter().position(|f| f.id == id).expect("every face is present")
    }

    pub fn face(&self, id: FaceId) -> &SkeletonFace {
        &self.faces[self.face_index(id)]
    }

    pub fn is_edge(&self, face: usize) -> bool {
        matches!(self.faces[face].id, FaceId::Edge(_))
    }

    /// Face index of the dual.
    pub fn dual_index(&self, face: usize) -> usize {
        self.face_index(self.faces[face].id.dual())
    }

    /// The Steiner radius attached to a point of a face.
    pub fn radius(&self, face: usize, p: &Point4) -> Result<f64> {
        let f = &self.faces[face];
        let base = f.to_base(p);
        match f.id {
            FaceId::Edge(_) => self.chain.elliptic(&base),
            FaceId::Triangle(_) => {
                if !self.patch.contains(&base, FACE_TOL) {
                    return Err(Error::OffPatch(format!("point is not on {}", f.id)));
                }
                self.chain.hyperbolic(&base)
            }
        }
    }

    /// Upper bound on the distance from `p` to a face.
    pub fn face_distance(&self, face: usize, p: &Point4) -> f64 {
        let f = &self.faces[face];
        let base = f.to_base(p);
        let off = f.quadric.carrier_distance(p);
        let inplane = match f.id {
            FaceId::Edge(_) => self.arc.distance(&point(base.x, 0.0, base.z, 0.0)),
            FaceId::Triangle(_) => self.patch.distance(&point(base.x, base.y, 0.0, base.w)),
        };
        off.hypot(inplane)
    }

    /// Points of a face: `n + 1` closed samples of an arc, or a polar grid of
    /// `n/2` rings by `6 (n/4)` angles on a triangle.
    pub fn face_samples(&self, face: usize, n: usize) -> Vec<Point4> {
        let f = &self.faces[face];
        let base: Vec<Point4> = match f.id {
            FaceId::Edge(_) => self.arc.closed_params(n).into_iter().map(|t| self.arc.point(t)).collect(),
            FaceId::Triangle(_) => BasePatch::grid_params((n / 2).max(1), 6 * (n / 4).max(1))
                .into_iter()
                .map(|(s, th)| self.patch.point_polar(s, th))
                .collect(),
        };
        base.iter().map(|p| f.from_base(p)).collect()
    }

    /// The focal pair carried by a dual edge/triangle pair.
    pub fn focal_pair(&self, edge_face: usize) -> Result<FocalPair> {
        let e = &self.faces[edge_face];
        let h = self.face(e.id.dual());
        FocalPair::new(e.quadric, h.quadric)
    }
}

pub fn build_focal_skeleton(c: &ModelConstants) -> Result<FocalSkeleton> {
    FocalSkeleton::build(c)
}

/// Distance from `p` to the affine 2-plane through `a, b, c`.
pub fn distance_to_plane2(p: &Point4, a: &Point4, b: &Point4, c: &Point4) -> f64 {
    let u = (b - a).normalize();
    let v0 = c - a;
    let v = (v0 - v0.dot(&u) * u).normalize();
    let d = p - a;
    (d - d.dot(&u) * u - d.dot(&v) * v).norm()
}

/// Unit normal of the hyperplane through four points.
pub fn hyperplane_normal(p: [&Point4; 4]) -> Point4 {
    let m = nalgebra::Matrix3x4::from_rows(&[
        (p[1] - p[0]).transpose(),
        (p[2] - p[0]).transpose(),
        (p[3] - p[0]).transpose(),
    ]);
    // Generalized cross product by cofactor expansion.
    let cof = |skip: usize| {
        let cols: Vec<usize> = (0..4).filter(|&c| c != skip).collect();
        nalgebra::Matrix3::from_fn(|r, c| m[(r, cols[c])]).determinant()
    };
    point(-cof(0), cof(1), -cof(2), cof(3)).normalize()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosureReport {
    /// Largest `|residual|` of the hyperboloid over the sampled image arc.
    pub hyperboloid_residual: f64,
    /// Largest distance of the image arc from the cut plane through `p4 p5`.
    pub plane_distance: f64,
    pub samples: usize,
}

impl ClosureReport {
    pub fn total(&self) -> f64 {
        self.hyperboloid_residual + self.plane_distance
    }
}

/// Maps the base arc by the motion fixing `p3` with `p1 -> p4`, `p2 -> p5`
/// and measures how far the image is from lying on the hyperboloid and in
/// the plane through `p4, p5` and the barycentre of `p1 p2 p3`.
pub fn rotation_closure_check(c: &ModelConstants, samples: usize) -> Result<ClosureReport> {
    let s = Simplex4::build(c);
    let arc = BaseArc::new(c)?;
    let h = Quadric::standard_hyperboloid(c.a_sq)?;
    let phi = Isometry4::from_vertex_permutation(&s.vertices, PHI_PERM)?;
    let (p4, p5, far) = (s.vertices[3], s.vertices[4], s.barycenter(0, 1, 2));
    let mut rep = ClosureReport { hyperboloid_residual: 0.0, plane_distance: 0.0, samples };
    for t in arc.closed_params(samples.max(2) - 1) {
        let q = phi.apply(&arc.point(t));
        rep.hyperboloid_residual = rep.hyperboloid_residual.max(h.total_residual(&q));
        rep.plane_distance = rep.plane_distance.max(distance_to_plane2(&q, &p4, &p5, &far));
    }
    Ok(rep)
}

/// Intersection of the axis through `p45` and the barycentre of `p1 p2 p3`
/// with the hyperboloid, on the side away from the simplex.
pub fn axis_hyperboloid_point(c: &ModelConstants) -> Result<Point4> {
    let s = Simplex4::build(c);
    let (from, dir) = s.dual_axis(3, 4);
    // Solve x^2 - (y^2 + w^2)/b^2 = 1 along from - t dir, t > 0.
    let b_sq = c.b_sq();
    let q = |p: &Point4| p.x * p.x - (p.y * p.y + p.w * p.w) / b_sq;
    let (d, o) = (-dir, from);
    let qa = d.x * d.x - (d.y * d.y + d.w * d.w) / b_sq;
    let qb = 2.0 * (o.x * d.x - (o.y * d.y + o.w * d.w) / b_sq);
    let qc = q(&o) - 1.0;
    let disc = qb * qb - 4.0 * qa * qc;
    if disc < 0.0 {
        return Err(Error::OutOfDomain("axis misses the hyperboloid".into()));
    }
    let t = [(-qb + disc.sqrt()) / (2.0 * qa), (-qb - disc.sqrt()) / (2.0 * qa)]
        .into_iter()
        .filter(|&t| t > 0.0 && (o + t * d).x > 0.0)
        .fold(f64::INFINITY, f64::min);
    if !t.is_finite() {
        return Err(Error::OutOfDomain("no forward intersection on the + sheet".into()));
    }
    Ok(o + t * d)
}

/// Tangent slopes of the base arc at `p1` against `z` and of its image at
/// `p4` against `w`, both measured from the common axis direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AngleReport {
    pub tan_base: f64,
    pub tan_image: f64,
    pub expected: f64,
}

pub fn tangent_slopes(c: &ModelConstants) -> Result<AngleReport> {
    let s = Simplex4::build(c);
    let arc = BaseArc::new(c)?;
    let v_e = arc.tangent(arc.t1);
    let tan_base = v_e.x / v_e.z;

    let patch = BasePatch::new(c, &s)?;
    let p4 = s.vertices[3];
    let n_h = nalgebra::Vector3::new(p4.x, -p4.y / c.b_sq(), -p4.w / c.b_sq());
    let cut = patch.cuts.iter().find(|k| k.edge == [3, 4]).expect("cut through p4 p5");
    let n_g = nalgebra::Vector3::new(cut.normal.x, cut.normal.y, cut.normal.w);
    let v = n_h.cross(&n_g);
    let (_, u_l) = s.dual_axis(3, 4);
    let tan_image = (v.x * u_l.x + v.y * u_l.y + v.z * u_l.w) / v.z;
    Ok(AngleReport { tan_base, tan_image, expected: -3.0 * c.z1 / c.x1 })
}

/// `R'_x - R_x` for `x` on `E45`: the radius from the chain on the pair
/// `(H123, E45)` against the one from `(E12, H345)`.
pub fn radius_consistency_residual(skel: &FocalSkeleton, x: &Point4) -> Result<f64> {
    let e45 = skel.face_index(FaceId::Edge([3, 4]));
    let off = skel.face_distance(e45, x);
    if off > FACE_TOL {
        return Err(Error::OffArc(off));
    }
    let r_edge = skel.radius(e45, x)?;
    let r_tri = skel.chain.hyperbolic(x)?;
    Ok(r_edge - r_tri)
}

/// Signed distances of the two cap triangles on the sphere about `p1` to
/// the hyperplane through `p1, p4, p5` and the centroid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CapSeparation {
    /// Most negative signed distance over the `(345)` side (should be >= 0).
    pub min_first: f64,
    /// Most positive signed distance over the `(245)` side (should be <= 0).
    pub max_second: f64,
    /// Largest `|distance|` over the shared boundary arc.
    pub boundary: f64,
    pub samples: usize,
}

impl CapSeparation {
    pub fn violation(&self) -> f64 {
        (-self.min_first).max(self.max_second).max(0.0).max(self.boundary)
    }
}

pub fn cap_separation(skel: &FocalSkeleton, n: usize) -> CapSeparation {
    let v = &skel.simplex.vertices;
    let g = skel.simplex.centroid();
    let mut normal = hyperplane_normal([&v[0], &v[3], &v[4], &g]);
    if normal.dot(&(v[2] - v[0])) < 0.0 {
        normal = -normal;
    }
    let w = skel.consts.width;
    let project = |x: &Point4| v[0] + w * (x - v[0]).normalize();
    let signed = |x: &Point4| normal.dot(&(project(x) - v[0]));
    let side = |id: FaceId| skel.face_samples(skel.face_index(id), n);
    let first = side(FaceId::Triangle([2, 3, 4]));
    let second = side(FaceId::Triangle([1, 3, 4]));
    let shared = side(FaceId::Edge([3, 4]));
    CapSeparation {
        min_first: first.iter().map(signed).fold(f64::INFINITY, f64::min),
        max_second: second.iter().map(signed).fold(f64::NEG_INFINITY, f64::max),
        boundary: shared.iter().map(|x| signed(x).abs()).fold(0.0, f64::max),
        samples: first.len() + second.len() + shared.len(),
    }
}

/// Largest distance from the dual axis of each edge face's ellipse to
/// `p_ij` and to the barycentre of the complementary triangle.
pub fn axis_duality_residual(skel: &FocalSkeleton) -> f64 {
    let s = &skel.simplex;
    let mut worst = 0.0f64;
    for f in skel.faces.iter() {
        let FaceId::Edge([i, j]) = f.id else { continue };
        let [k, l, m] = complement_edge([i, j]);
        let (o, d) = (f.quadric.origin, f.quadric.axis(0));
        for p in [s.midpoint(i, j), s.barycenter(k, l, m)] {
            let r = p - o;
            worst = worst.max((r - r.dot(&d) * d).norm());
        }
    }
    worst
}

/// For every face and every permutation carrying the base face onto it,
/// the largest distance of the mapped base samples from the face.
pub fn well_definedness_residual(skel: &FocalSkeleton, n: usize) -> f64 {
    let base_edge = skel.face_index(FaceId::Edge(BASE_EDGE));
    let base_tri = skel.face_index(FaceId::Triangle(BASE_TRIANGLE));
    let samples = [skel.face_samples(base_edge, n), skel.face_samples(base_tri, n)];
    let mut worst = 0.0f64;
    for (k, perm) in skel.group.perms.iter().enumerate() {
        let m = &skel.group.motions[k];
        for (base, pts) in [(base_edge, &samples[0]), (base_tri, &samples[1])] {
            let target = skel.face_index(skel.faces[base].id.permuted(perm));
            for p in pts {
                worst = worst.max(skel.face_distance(target, &m.apply(p)));
            }
        }
    }
    worst
}

/// Largest distance of motion-mapped face samples from the image face, over
/// all motions and faces.
pub fn symmetry_invariance_residual(skel: &FocalSkeleton, n: usize) -> f64 {
    let samples: Vec<Vec<Point4>> = (0..skel.faces.len()).map(|f| skel.face_samples(f, n)).collect();
    let mut worst = 0.0f64;
    for (k, perm) in skel.group.perms.iter().enumerate() {
        let m = &skel.group.motions[k];
        for (f, pts) in samples.iter().enumerate() {
            let target = skel.face_index(skel.faces[f].id.permuted(perm));
            for p in pts {
                worst = worst.max(skel.face_distance(target, &m.apply(p)));
            }
        }
    }
    worst
}

/// Boundary of the base triangle against its three edge arcs, both ways.
pub fn triangle_boundary_residual(skel: &FocalSkeleton, n: usize) -> f64 {
    let ring: Vec<Point4> = (0..3 * n).map(|j| skel.patch.point_polar(1.0, TAU * j as f64 / (3 * n) as f64)).collect();
    let edges: Vec<usize> = [[2, 3], [2, 4], [3, 4]].iter().map(|e| skel.face_index(FaceId::Edge(*e))).collect();
    let tri = skel.face_index(FaceId::Triangle(BASE_TRIANGLE));
    let mut worst = 0.0f64;
    for p in &ring {
        let d = edges.iter().map(|&e| skel.face_distance(e, p)).fold(f64::INFINITY, f64::min);
        worst = worst.max(d);
    }
    for &e in &edges {
        for p in skel.face_samples(e, n) {
            worst = worst.max(skel.face_distance(tri, &p));
            worst = worst.max(skel.patch.cuts.iter().map(|c| c.signed(&p).abs()).fold(f64::INFINITY, f64::min));
        }
    }
    worst
}

/// Polar angles of the base triangle corners, indexed like `BASE_TRIANGLE`.
pub const CORNER_ANGLES: [f64; 3] = [0.0, 4.0 * PI / 3.0, 2.0 * PI / 3.0];
