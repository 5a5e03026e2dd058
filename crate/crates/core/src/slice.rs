//! Three-dimensional slices of the body by hyperplanes.

use std::f64::consts::{PI, TAU};
use std::str::FromStr;

use serde::Serialize;

use crate::body::{BallModel, BoundarySample};
use crate::error::{Error, Result};
use crate::geometry::Point4;

/// Output format of slices and sample files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Off,
    Ply,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "off" => Ok(Format::Off),
            "ply" => Ok(Format::Ply),
            "csv" => Ok(Format::Csv),
            _ => Err(Error::InvalidParameter(format!("unknown format `{s}` (expected off, ply or csv)"))),
        }
    }
}

/// The hyperplane `normal . p = offset` with a sphere resolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceSpec {
    pub normal: Point4,
    pub offset: f64,
    /// Latitude bands of the ray-cast sphere; `2 * resolution` longitudes.
    pub resolution: usize,
    pub format: Format,
}

pub const MIN_RESOLUTION: usize = 8;

impl SliceSpec {
    pub fn new(normal: Point4, offset: f64, resolution: usize, format: Format) -> Result<Self> {
        let s = SliceSpec { normal, offset, resolution, format };
        s.validate()?;
        Ok(s)
    }

    /// Parses `nx,ny,nz,nw,offset`.
    pub fn parse_hyperplane(text: &str) -> Result<(Point4, f64)> {
        let v: Vec<f64> = text
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::InvalidSlice(format!("hyperplane `{text}` is not five numbers")))?;
        if v.len() != 5 {
            return Err(Error::InvalidSlice(format!("hyperplane `{text}` needs nx,ny,nz,nw,offset")));
        }
        Ok((Point4::new(v[0], v[1], v[2], v[3]), v[4]))
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.normal.norm();
        if !(n > 1e-12) || !n.is_finite() || !self.offset.is_finite() {
            return Err(Error::InvalidSlice("normal must be nonzero and finite".into()));
        }
        if self.resolution < MIN_RESOLUTION {
            return Err(Error::InvalidSlice(format!("resolution {} is below {MIN_RESOLUTION}", self.resolution)));
        }
        Ok(())
    }

    /// Unit normal and the offset rescaled to it.
    pub fn unit(&self) -> (Point4, f64) {
        let n = self.normal.norm();
        (self.normal / n, self.offset / n)
    }
}

/// A closed triangulated surface: boundary points along a UV sphere of
/// directions inside the hyperplane.
#[derive(Debug, Clone)]
pub struct Slice {
    /// Point of the hyperplane closest to the origin.
    pub origin: Point4,
    /// Orthonormal basis of the hyperplane directions.
    pub basis: [Point4; 3],
    /// Interior point the rays start from.
    pub center: Point4,
    pub samples: Vec<BoundarySample>,
    pub triangles: Vec<[usize; 3]>,
}

impl Slice {
    /// Hyperplane coordinates of a point.
    pub fn coords(&self, p: &Point4) -> [f64; 3] {
        let d = p - self.origin;
        self.basis.map(|e| e.dot(&d))
    }

    pub fn coords3(&self) -> Vec<[f64; 3]> {
        self.samples.iter().map(|s| self.coords(&s.point)).collect()
    }

    /// `max - min` of `<p, u>` over the slice vertices.
    pub fn width_along(&self, u: &Point4) -> f64 {
        let (lo, hi) = self
            .samples
            .iter()
            .map(|s| s.point.dot(u))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        hi - lo
    }
}

/// Orthonormal completion of a unit vector.
pub fn hyperplane_basis(n: &Point4) -> [Point4; 3] {
    let mut out: Vec<Point4> = Vec::with_capacity(3);
    let mut candidates: Vec<Point4> = (0..4).map(|k| Point4::ith(k, 1.0)).collect();
    // Least aligned axes first keeps the Gram-Schmidt well conditioned.
    candidates.sort_by(|a, b| a.dot(n).abs().total_cmp(&b.dot(n).abs()));
    for e in candidates {
        let mut v = e - e.dot(n) * n;
        for b in &out {
            v -= v.dot(b) * b;
        }
        if v.norm() > 1e-6 && out.len() < 3 {
            out.push(v.normalize());
        }
    }
    [out[0], out[1], out[2]]
}

const ASCENT_STEPS: usize = 400;

/// A point of the hyperplane strictly inside the model, found by projected
/// subgradient ascent on the slack from the projection of the interior point.
pub fn interior_point_in(model: &BallModel, n: &Point4, offset: f64) -> Result<Point4> {
    let g = model.interior_point;
    if (offset - n.dot(&g)).abs() > model.width {
        return Err(Error::EmptySlice);
    }
    let mut q = g + (offset - n.dot(&g)) * n;
    let (mut best_q, mut best) = (q, model.slack(&q).0);
    let mut step = 0.25 * model.width;
    for k in 0..ASCENT_STEPS {
        let (v, idx) = model.slack(&q);
        if v > best {
            best = v;
            best_q = q;
        }
        if best > 1e-3 * model.width {
            break;
        }
        let d = q - model.centers[idx].point;
        let mut grad = -d / d.norm().max(1e-300);
        grad -= grad.dot(n) * n;
        let gn = grad.norm();
        if gn < 1e-15 {
            break;
        }
        q += (step / gn) * grad;
        if k % 20 == 19 {
            step *= 0.5;
        }
    }
    if best <= 1e-12 {
        return Err(Error::EmptySlice);
    }
    Ok(best_q)
}

/// Slices the model by the hyperplane: ray casts from an interior point of
/// the hyperplane along a UV sphere of in-plane directions.
pub fn slice_model(model: &BallModel, spec: &SliceSpec) -> Result<Slice> {
    spec.validate()?;
    let (n, offset) = spec.unit();
    let center = interior_point_in(model, &n, offset)?;
    let basis = hyperplane_basis(&n);
    let dir = |polar: f64, az: f64| {
        let (sp, cp) = polar.sin_cos();
        let (sa, ca) = az.sin_cos();
        sp * ca * basis[0] + sp * sa * basis[1] + cp * basis[2]
    };
    let (stacks, slices) = (spec.resolution, 2 * spec.resolution);
    let mut dirs = vec![dir(0.0, 0.0)];
    for i in 1..stacks {
        for j in 0..slices {
            dirs.push(dir(PI * i as f64 / stacks as f64, TAU * j as f64 / slices as f64));
        }
    }
    dirs.push(dir(PI, 0.0));
    let samples = dirs
        .iter()
        .map(|u| {
            let hits = model.ray_hits(&center, u, 0.0);
            let c = &model.centers[hits.best_index];
            let point = center + hits.best * u;
            BoundarySample {
                point,
                piece: c.piece,
                center: c.point,
                radius: c.radius,
                origin: c.origin,
                slack: model.slack(&point).0,
            }
        })
        .collect();
    let ring = |i: usize, j: usize| 1 + (i - 1) * slices + j % slices;
    let south = dirs.len() - 1;
    let mut triangles = Vec::with_capacity(2 * slices * (stacks - 1));
    for j in 0..slices {
        triangles.push([0, ring(1, j), ring(1, j + 1)]);
    }
    for i in 1..stacks - 1 {
        for j in 0..slices {
            let (a, b, c, d) = (ring(i, j), ring(i, j + 1), ring(i + 1, j), ring(i + 1, j + 1));
            triangles.push([a, c, d]);
            triangles.push([a, d, b]);
        }
    }
    for j in 0..slices {
        triangles.push([south, ring(stacks - 1, j + 1), ring(stacks - 1, j)]);
    }
    Ok(Slice { origin: offset * n, basis, center, samples, triangles })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::body::GridSpec;
    use crate::numerics::ModelConstants;
    use crate::skeleton::FocalSkeleton;

    #[test]
    fn spec_parsing_and_validation() {
        let (n, o) = SliceSpec::parse_hyperplane("0,0,0,1,0.5").unwrap();
        assert_eq!(n, Point4::new(0.0, 0.0, 0.0, 1.0));
        assert_eq!(o, 0.5);
        assert!(SliceSpec::parse_hyperplane("0,0,1").is_err());
        assert!(SliceSpec::new(Point4::zeros(), 0.0, 16, Format::Off).is_err());
        assert!(SliceSpec::new(Point4::x(), 0.0, 4, Format::Off).is_err());
        assert_eq!("PLY".parse::<Format>().unwrap(), Format::Ply);
    }

    #[test]
    fn basis_is_orthonormal() {
        let n = Point4::new(1.0, 2.0, -0.5, 0.3).normalize();
        let b = hyperplane_basis(&n);
        for i in 0..3 {
            assert!(b[i].dot(&n).abs() < 1e-15);
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((b[i].dot(&b[j]) - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn closed_surface_and_empty_slice() {
        let skel = FocalSkeleton::build(&ModelConstants::body()).unwrap();
        let model = BallModel::build(&skel, GridSpec::new(8, 12).unwrap()).unwrap();
        let spec = SliceSpec::new(Point4::w(), 0.0, 8, Format::Off).unwrap();
        let s = slice_model(&model, &spec).unwrap();
        // Euler characteristic of a sphere.
        let v = s.samples.len() as i64;
        let f = s.triangles.len() as i64;
        assert_eq!(v - 3 * f / 2 + f, 2);
        assert!(s.samples.iter().all(|b| b.slack.abs() <= 1e-9 && b.point.w.abs() < 1e-15));
        let far = SliceSpec::new(Point4::x(), 3.0, 8, Format::Off).unwrap();
        assert_eq!(slice_model(&model, &far).unwrap_err(), Error::EmptySlice);
    }
}
