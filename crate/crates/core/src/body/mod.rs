//! The body as an envelope of Steiner-chain balls: the binormal maps, a
//! discrete intersection-of-balls model, an exact envelope evaluator, and
//! boundary sampling with width and diameter checks.

mod envelope;
mod index;
mod model;
mod sampling;

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{dist, Point4};
use crate::skeleton::{FaceId, FocalSkeleton};

pub use envelope::{Envelope, ExactHit};
pub use index::PointIndex;
pub use model::{BallModel, Center, CenterOrigin, GridSpec, Hits};
pub use sampling::{
    binormal_partner, convergence_study, diameter_check, halton, piece_census, ray_cast_boundary, sample_theta,
    shoemake, width_in_direction, ConvergenceReport, DiameterReport, PhiSampler, SampleOptions,
};

/// A piece of the boundary, named by its vertex set: two digits for an
/// edge wedge, three for a triangle wedge, four for a spherical cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Piece(u8);

impl Piece {
    pub fn from_vertices(v: &[usize]) -> Self {
        Piece(v.iter().fold(0u8, |m, &k| m | (1 << k)))
    }

    /// The piece whose points lie on spheres about a centre on `face`.
    pub fn for_face(face: FaceId) -> Self {
        Piece::from_vertices(face.dual().vertices())
    }

    /// The cap on the sphere about vertex `i`.
    pub fn cap(i: usize) -> Self {
        Piece(0b11111 & !(1 << i))
    }

    pub fn vertices(&self) -> Vec<usize> {
        (0..5).filter(|k| self.0 & (1 << k) != 0).collect()
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn is_cap(&self) -> bool {
        self.len() == 4
    }

    /// All 25 pieces: ten edge wedges, ten triangle wedges, five caps.
    pub fn all() -> Vec<Piece> {
        let mut v: Vec<Piece> = (1u8..32).map(Piece).filter(|p| (2..=4).contains(&p.len())).collect();
        v.sort_by_key(|p| (p.len(), p.vertices()));
        v
    }

    pub fn image(&self, perm: &[usize; 5]) -> Piece {
        Piece::from_vertices(&self.vertices().iter().map(|&k| perm[k]).collect::<Vec<_>>())
    }
}

impl fmt::Display for Piece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in self.vertices() {
            write!(f, "{}", k + 1)?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Piece {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut v = Vec::new();
        for ch in s.chars() {
            match ch.to_digit(10) {
                Some(d @ 1..=5) if !v.contains(&(d as usize - 1)) => v.push(d as usize - 1),
                _ => return Err(Error::UnclassifiedSample(format!("bad piece label `{s}`"))),
            }
        }
        let p = Piece::from_vertices(&v);
        if !(2..=4).contains(&p.len()) {
            return Err(Error::UnclassifiedSample(format!("bad piece label `{s}`")));
        }
        Ok(p)
    }
}

impl Serialize for Piece {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A point of the boundary with the ball that certifies it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySample {
    pub point: Point4,
    pub piece: Piece,
    /// Centre of the active ball.
    pub center: Point4,
    /// Steiner radius at the centre; the ball radius is `width - radius`.
    pub radius: f64,
    pub origin: CenterOrigin,
    /// Signed slack against the body (negative outside); NaN if not computed.
    pub slack: f64,
}

impl BoundarySample {
    pub fn rho(&self, width: f64) -> f64 {
        width - self.radius
    }
}

/// `x + R_x (x - y)/|x - y|` in the base pair frame.
fn phi_base(x: &Point4, y: &Point4, r_x: f64) -> Result<Point4> {
    let d = x - y;
    let n = d.norm();
    if !(n > 0.0) {
        return Err(Error::DomainError("coincident points".into()));
    }
    Ok(x + (r_x / n) * d)
}

/// The envelope point on the sphere about `y`: `x + R_x (x - y)/|x - y|`
/// for `x` on the triangle and `y` on the dual edge arc.
pub fn phi1(skel: &FocalSkeleton, tri_face: usize, x: &Point4, y: &Point4) -> Result<Point4> {
    check_pair(skel, tri_face, x, y)?;
    phi_base(x, y, skel.radius(tri_face, x)?)
}

/// The partner point on the sphere about `x`: `y + R_y (y - x)/|y - x|`.
pub fn phi2(skel: &FocalSkeleton, tri_face: usize, x: &Point4, y: &Point4) -> Result<Point4> {
    check_pair(skel, tri_face, x, y)?;
    let edge = skel.dual_index(tri_face);
    phi_base(y, x, skel.radius(edge, y)?)
}

fn check_pair(skel: &FocalSkeleton, tri_face: usize, x: &Point4, y: &Point4) -> Result<()> {
    if skel.is_edge(tri_face) {
        return Err(Error::DomainError("first argument must be a triangle face".into()));
    }
    let edge = skel.dual_index(tri_face);
    let (dx, dy) = (skel.face_distance(tri_face, x), skel.face_distance(edge, y));
    if dx > crate::skeleton::FACE_TOL || dy > crate::skeleton::FACE_TOL {
        return Err(Error::DomainError(format!("points off the dual pair ({dx:e}, {dy:e})")));
    }
    if dist(x, y) == 0.0 {
        return Err(Error::DomainError("coincident points".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::ModelConstants;
    use crate::skeleton::BASE_TRIANGLE;

    #[test]
    fn twenty_five_pieces() {
        let all = Piece::all();
        assert_eq!(all.len(), 25);
        assert_eq!(all[0].to_string(), "12");
        assert_eq!(all[24].to_string(), "2345");
        assert_eq!(Piece::cap(0).to_string(), "2345");
        assert_eq!(Piece::for_face(FaceId::Edge([0, 1])).to_string(), "345");
        assert_eq!(Piece::for_face(FaceId::Triangle([2, 3, 4])).to_string(), "12");
        assert_eq!("345".parse::<Piece>().unwrap(), Piece::from_vertices(&[2, 3, 4]));
        assert!("1".parse::<Piece>().is_err());
        assert!("12345".parse::<Piece>().is_err());
        assert!("16".parse::<Piece>().is_err());
    }

    #[test]
    fn binormal_endpoints() {
        let skel = FocalSkeleton::build(&ModelConstants::body()).unwrap();
        let tri = skel.face_index(FaceId::Triangle(BASE_TRIANGLE));
        let w = skel.consts.width;
        let p3 = skel.simplex.vertices[2];
        let p1 = skel.simplex.vertices[0];
        let y = skel.arc.point(0.1);
        assert!(dist(&phi1(&skel, tri, &p3, &y).unwrap(), &p3) < 1e-15);
        let x = skel.patch.point_polar(0.5, 1.0);
        assert!(dist(&phi2(&skel, tri, &x, &p1).unwrap(), &p1) < 1e-15);
        assert!((dist(&phi1(&skel, tri, &x, &p1).unwrap(), &p1) - w).abs() < 1e-15);
        let edge = skel.dual_index(tri);
        assert!(phi1(&skel, edge, &x, &y).is_err());
        assert!(phi1(&skel, tri, &y, &x).is_err());
    }
}
