use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::index::PointIndex;
use super::Piece;
use crate::error::{Error, Result};
use crate::geometry::Point4;
use crate::skeleton::{BasePatch, FaceId, FocalSkeleton, SymmetryGroup};

/// Sampling density of the skeleton faces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Rings of the triangle polar grid (excluding the pole).
    pub rings: usize,
    /// Angles per ring; a multiple of 6 keeps the grid symmetric.
    pub angles: usize,
    /// Pieces each arc is split into; nodes are the interior break points.
    pub arc: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { rings: 64, angles: 96, arc: 256 }
    }
}

impl GridSpec {
    /// Triangle grid `hx x ht` with `4 hx` arc pieces.
    pub fn new(hx: usize, ht: usize) -> Result<Self> {
        let g = GridSpec { rings: hx, angles: ht, arc: 4 * hx };
        g.validate()?;
        Ok(g)
    }

    /// Grid used to seed the exact envelope search.
    pub fn coarse() -> Self {
        GridSpec { rings: 16, angles: 24, arc: 64 }
    }

    pub fn refined(&self) -> Self {
        GridSpec { rings: 2 * self.rings, angles: 2 * self.angles, arc: 2 * self.arc }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rings < 1
            || self.angles < 6
            || !self.angles.is_multiple_of(6)
            || self.arc < 2
            || !self.arc.is_multiple_of(2)
        {
            return Err(Error::InvalidParameter(format!(
                "grid {self}: need rings >= 1, angles a positive multiple of 6, even arc count"
            )));
        }
        Ok(())
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}/{}", self.rings, self.angles, self.arc)
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    /// `HXxHT`, with the arc count derived as `4 HX`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("grid `{s}` is not of the form HXxHT"));
        let (a, b) = s.trim().split_once(['x', 'X']).ok_or_else(bad)?;
        let hx = a.trim().parse().map_err(|_| bad())?;
        let ht = b.trim().parse().map_err(|_| bad())?;
        GridSpec::new(hx, ht)
    }
}

/// Where a ball centre comes from, with base-face parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum CenterOrigin {
    Vertex(usize),
    Arc { face: usize, t: f64 },
    Patch { face: usize, s: f64, theta: f64 },
}

impl CenterOrigin {
    /// One group per vertex and per face, for per-family reductions.
    pub fn group(&self) -> usize {
        match *self {
            CenterOrigin::Vertex(i) => i,
            CenterOrigin::Arc { face, .. } | CenterOrigin::Patch { face, .. } => 5 + face,
        }
    }

    pub fn piece(&self, skel: &FocalSkeleton) -> Piece {
        match *self {
            CenterOrigin::Vertex(i) => Piece::cap(i),
            CenterOrigin::Arc { face, .. } | CenterOrigin::Patch { face, .. } => Piece::for_face(skel.faces[face].id),
        }
    }

    pub fn params(&self) -> [f64; 2] {
        match *self {
            CenterOrigin::Vertex(_) => [0.0, 0.0],
            CenterOrigin::Arc { t, .. } => [t, 0.0],
            CenterOrigin::Patch { s, theta, .. } => [s, theta],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Center {
    pub point: Point4,
    /// Ball radius `width - radius`.
    pub rho: f64,
    /// Steiner radius at the centre.
    pub radius: f64,
    pub origin: CenterOrigin,
    pub piece: Piece,
}

#[derive(Debug, Clone, Copy)]
struct Tile {
    centre: Point4,
    reach: f64,
    rho_min: f64,
    start: usize,
    end: usize,
}

/// Result of a pruned scan: the minimum and every centre within `delta`.
#[derive(Debug, Clone, PartialEq)]
pub struct Hits {
    pub best: f64,
    pub best_index: usize,
    pub near: Vec<(usize, f64)>,
}

/// The body approximated by finitely many balls of the Steiner families.
#[derive(Debug, Clone)]
pub struct BallModel {
    pub centers: Vec<Center>,
    pub interior_point: Point4,
    pub width: f64,
    pub grid: GridSpec,
    /// Grid nodes that coincided with an earlier centre and were dropped.
    pub merged: usize,
    /// Largest Steiner-radius disagreement between merged nodes.
    pub merge_radius_gap: f64,
    tiles: Vec<Tile>,
}

const ARC_TILE: usize = 16;
const PATCH_TILE: usize = 8;
const MERGE_TOL: f64 = 1e-10;
const INTERIOR_MARGIN: f64 = 1e-6;

/// Exit parameter of the ray `o + t u` from the ball `(c, rho)`; `o` inside.
#[inline]
pub fn exit_time(o: &Point4, u: &Point4, c: &Point4, rho: f64) -> f64 {
    let d = o - c;
    let b = d.dot(u);
    let disc = b * b - d.norm_squared() + rho * rho;
    if disc < 0.0 {
        return 0.0;
    }
    -b + disc.sqrt()
}

impl BallModel {
    /// Only the five vertex balls: the Reuleaux simplex.
    pub fn reuleaux(skel: &FocalSkeleton) -> Result<Self> {
        Self::assemble(skel, GridSpec::default(), false)
    }

    pub fn build(skel: &FocalSkeleton, grid: GridSpec) -> Result<Self> {
        grid.validate()?;
        Self::assemble(skel, grid, true)
    }

    fn assemble(skel: &FocalSkeleton, grid: GridSpec, with_faces: bool) -> Result<Self> {
        let w = skel.consts.width;
        let mut model = BallModel {
            centers: Vec::new(),
            interior_point: skel.simplex.centroid(),
            width: w,
            grid,
            merged: 0,
            merge_radius_gap: 0.0,
            tiles: Vec::new(),
        };
        let mut index = PointIndex::new(1e-7);
        let mut push_tile = |model: &mut BallModel, nodes: Vec<(Point4, f64, CenterOrigin)>| {
            let start = model.centers.len();
            for (p, r, origin) in nodes {
                if let Some((id, _)) = index.nearest_within(&p, MERGE_TOL) {
                    model.merged += 1;
                    model.merge_radius_gap = model.merge_radius_gap.max((model.centers[id].radius - r).abs());
                    continue;
                }
                index.insert(p);
                let piece = origin.piece(skel);
                model.centers.push(Center { point: p, rho: w - r, radius: r, origin, piece });
            }
            if model.centers.len() > start {
                model.tiles.push(Tile::over(&model.centers, start));
            }
        };

        for (i, v) in skel.simplex.vertices.iter().enumerate() {
            push_tile(&mut model, vec![(*v, 0.0, CenterOrigin::Vertex(i))]);
        }
        if with_faces {
            let ts = skel.arc.interior_params(grid.arc);
            for (f, face) in skel.faces.iter().enumerate() {
                if !matches!(face.id, FaceId::Edge(_)) {
                    continue;
                }
                for chunk in ts.chunks(ARC_TILE) {
                    let nodes = chunk
                        .iter()
                        .map(|&t| {
                            let base = skel.arc.point(t);
                            Ok((face.from_base(&base), skel.chain.elliptic(&base)?, CenterOrigin::Arc { face: f, t }))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    push_tile(&mut model, nodes);
                }
            }
            for (f, face) in skel.faces.iter().enumerate() {
                if !matches!(face.id, FaceId::Triangle(_)) {
                    continue;
                }
                let node = |s: f64, theta: f64| -> Result<(Point4, f64, CenterOrigin)> {
                    let base = skel.patch.point_polar(s, theta);
                    Ok((
                        face.from_base(&base),
                        skel.chain.hyperbolic(&base)?,
                        CenterOrigin::Patch { face: f, s, theta },
                    ))
                };
                push_tile(&mut model, vec![node(0.0, 0.0)?]);
                let params = BasePatch::grid_params(grid.rings, grid.angles);
                for i0 in (0..grid.rings).step_by(PATCH_TILE) {
                    for j0 in (0..grid.angles).step_by(PATCH_TILE) {
                        let mut nodes = Vec::new();
                        for i in i0..(i0 + PATCH_TILE).min(grid.rings) {
                            for j in j0..(j0 + PATCH_TILE).min(grid.angles) {
                                let (s, theta) = params[1 + i * grid.angles + j];
                                nodes.push(node(s, theta)?);
                            }
                        }
                        push_tile(&mut model, nodes);
                    }
                }
            }
        }

        let g = model.interior_point;
        let margin = model.centers.iter().map(|c| c.rho - (g - c.point).norm()).fold(f64::INFINITY, f64::min);
        if !(margin >= INTERIOR_MARGIN) {
            return Err(Error::InteriorPointNotInterior(margin));
        }
        Ok(model)
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// Smallest `rho - |g - c|` over all centres.
    pub fn interior_margin(&self) -> f64 {
        let g = self.interior_point;
        self.centers.iter().map(|c| c.rho - (g - c.point).norm()).fold(f64::INFINITY, f64::min)
    }

    fn scan(&self, lower: impl Fn(&Tile) -> f64, value: impl Fn(&Center) -> f64, delta: f64) -> Hits {
        let mut order: Vec<(f64, usize)> = self.tiles.iter().enumerate().map(|(k, t)| (lower(t), k)).collect();
        order.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
        let mut best = f64::INFINITY;
        let mut best_index = 0;
        let mut near = Vec::new();
        for (lb, k) in order {
            if lb > best + delta {
                break;
            }
            let tile = &self.tiles[k];
            for i in tile.start..tile.end {
                let v = value(&self.centers[i]);
                if v < best {
                    best = v;
                    best_index = i;
                }
                if v <= best + delta {
                    near.push((i, v));
                }
            }
        }
        near.retain(|&(_, v)| v <= best + delta);
        Hits { best, best_index, near }
    }

    /// Exit parameters along `o + t u` (`o` interior, `|u| = 1`).
    pub fn ray_hits(&self, o: &Point4, u: &Point4, delta: f64) -> Hits {
        self.scan(
            |t| {
                let r = t.rho_min - t.reach;
                if r <= 0.0 {
                    0.0
                } else {
                    exit_time(o, u, &t.centre, r).max(0.0)
                }
            },
            |c| exit_time(o, u, &c.point, c.rho),
            delta,
        )
    }

    /// Slacks `rho - |p - c|`.
    pub fn slack_hits(&self, p: &Point4, delta: f64) -> Hits {
        self.scan(|t| t.rho_min - (p - t.centre).norm() - t.reach, |c| c.rho - (p - c.point).norm(), delta)
    }

    /// Boundary parameter and active centre along a ray from the interior point.
    pub fn ray_cast(&self, u: &Point4) -> (f64, usize) {
        let h = self.ray_hits(&self.interior_point, u, 0.0);
        (h.best, h.best_index)
    }

    /// Signed slack (negative outside) and the tightest centre.
    pub fn slack(&self, p: &Point4) -> (f64, usize) {
        let h = self.slack_hits(p, 0.0);
        (h.best, h.best_index)
    }

    /// Centres whose balls pass within `tol` of `p`.
    pub fn active_set(&self, p: &Point4, tol: f64) -> Vec<usize> {
        let h = self.slack_hits(p, 2.0 * tol);
        h.near.into_iter().filter(|&(_, v)| v.abs() <= tol).map(|(i, _)| i).collect()
    }

    /// Largest mismatch (position plus radius) between a motion-mapped centre
    /// and its nearest centre, over every motion; infinite if some image has
    /// no centre within `1e-7`.
    pub fn symmetry_defect(&self, group: &SymmetryGroup) -> f64 {
        let mut index = PointIndex::new(1e-6);
        for c in &self.centers {
            index.insert(c.point);
        }
        group
            .motions
            .par_iter()
            .map(|m| {
                self.centers
                    .iter()
                    .map(|c| match index.nearest_within(&m.apply(&c.point), 1e-7) {
                        Some((id, d)) => d + (self.centers[id].rho - c.rho).abs(),
                        None => f64::INFINITY,
                    })
                    .fold(0.0, f64::max)
            })
            .reduce(|| 0.0, f64::max)
    }
}

impl Tile {
    fn over(centers: &[Center], start: usize) -> Tile {
        let slice = &centers[start..];
        let centre = slice.iter().map(|c| c.point).sum::<Point4>() / slice.len() as f64;
        let reach = slice.iter().map(|c| (c.point - centre).norm()).fold(0.0, f64::max);
        let rho_min = slice.iter().map(|c| c.rho).fold(f64::INFINITY, f64::min);
        Tile { centre, reach: reach * (1.0 + 1e-12) + 1e-15, rho_min, start, end: centers.len() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::ModelConstants;

    fn small() -> (FocalSkeleton, BallModel) {
        let skel = FocalSkeleton::build(&ModelConstants::body()).unwrap();
        let model = BallModel::build(&skel, GridSpec::new(8, 12).unwrap()).unwrap();
        (skel, model)
    }

    #[test]
    fn grid_parsing() {
        assert_eq!("64x96".parse::<GridSpec>().unwrap(), GridSpec::default());
        assert!("64x95".parse::<GridSpec>().is_err());
        assert!("64".parse::<GridSpec>().is_err());
        assert!("0x96".parse::<GridSpec>().is_err());
    }

    #[test]
    fn pruned_scans_match_brute_force() {
        let (_, model) = small();
        let g = model.interior_point;
        for k in 0..40 {
            let a = 0.37 * k as f64;
            let u =
                Point4::new(a.cos(), a.sin() * 0.6, a.sin() * 0.8 * (2.0 * a).cos(), a.sin() * 0.8 * (2.0 * a).sin())
                    .normalize();
            let brute = model.centers.iter().map(|c| exit_time(&g, &u, &c.point, c.rho)).fold(f64::INFINITY, f64::min);
            let (t, _) = model.ray_cast(&u);
            assert_eq!(t, brute);
            let p = g + 0.9 * t * u;
            let brute = model.centers.iter().map(|c| c.rho - (p - c.point).norm()).fold(f64::INFINITY, f64::min);
            assert_eq!(model.slack(&p).0, brute);
        }
    }

    #[test]
    fn merged_nodes_agree() {
        let (_, model) = small();
        // Triangle corners and shared boundary rings coincide with earlier nodes.
        assert!(model.merged > 0);
        assert!(model.merge_radius_gap < 1e-12);
        assert!(model.interior_margin() > 0.05);
    }

    #[test]
    fn model_is_symmetric() {
        let (skel, model) = small();
        assert!(model.symmetry_defect(&skel.group) < 1e-8);
    }
}
