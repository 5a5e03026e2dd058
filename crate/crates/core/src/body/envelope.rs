use std::collections::BTreeMap;

use super::model::{exit_time, BallModel, CenterOrigin, GridSpec, Hits};
use super::{BoundarySample, Piece};
use crate::error::Result;
use crate::geometry::{Isometry4, Point4};
use crate::skeleton::{FaceId, FocalSkeleton};

/// The body as the intersection of the continuous ball families.
///
/// A coarse ball model proposes the vertex balls and faces whose discrete
/// minimum is within `delta` of the best; each proposed face is then
/// minimized over its continuous parameters.
#[derive(Debug, Clone)]
pub struct Envelope {
    pub skel: FocalSkeleton,
    pub coarse: BallModel,
    /// Candidate window; must exceed the coarse model's discretization error.
    pub delta: f64,
}

/// The extremal ball of an exact query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactHit {
    /// Exit parameter for ray casts, slack for slack queries.
    pub value: f64,
    pub center: Point4,
    /// Steiner radius at the centre.
    pub radius: f64,
    pub origin: CenterOrigin,
    pub piece: Piece,
}

const GOLDEN_ITERS: usize = 90;
const NEWTON_ITERS: usize = 40;
const FD_STEP: f64 = 1e-5;

impl Envelope {
    pub fn new(skel: &FocalSkeleton) -> Result<Self> {
        Ok(Envelope { skel: skel.clone(), coarse: BallModel::build(skel, GridSpec::coarse())?, delta: 5e-3 })
    }

    pub fn width(&self) -> f64 {
        self.skel.consts.width
    }

    pub fn interior_point(&self) -> Point4 {
        self.coarse.interior_point
    }

    /// Exact boundary parameter along `g + t u` from the interior point.
    pub fn ray_cast(&self, u: &Point4) -> ExactHit {
        self.ray_cast_from(&self.interior_point(), u)
    }

    /// Exact exit parameter along `o + t u`; `o` must be inside the body.
    pub fn ray_cast_from(&self, o: &Point4, u: &Point4) -> ExactHit {
        let g = *o;
        let hits = self.coarse.ray_hits(&g, u, self.delta);
        self.refine(&hits, |m: &Isometry4| {
            let (o, v) = (m.apply(&g), m.linear * u);
            move |c: &Point4, rho: f64| exit_time(&o, &v, c, rho)
        })
    }

    /// Exact signed slack `min (rho(c) - |p - c|)`; negative outside.
    pub fn slack(&self, p: &Point4) -> ExactHit {
        let hits = self.coarse.slack_hits(p, self.delta);
        self.refine(&hits, |m: &Isometry4| {
            let q = m.apply(p);
            move |c: &Point4, rho: f64| rho - (q - c).norm()
        })
    }

    /// Boundary point along `u`.
    pub fn boundary_point(&self, u: &Point4) -> (Point4, ExactHit) {
        let hit = self.ray_cast(u);
        (self.interior_point() + hit.value * u, hit)
    }

    /// Exact boundary sample along `u`; slack is NaN unless requested.
    pub fn boundary_sample(&self, u: &Point4, with_slack: bool) -> BoundarySample {
        let (point, hit) = self.boundary_point(u);
        let slack = if with_slack { self.slack(&point).value } else { f64::NAN };
        BoundarySample { point, piece: hit.piece, center: hit.center, radius: hit.radius, origin: hit.origin, slack }
    }

    /// Distinct tight balls at `p`: exact hits with `|slack| <= tol`, one per
    /// centre.
    pub fn active(&self, p: &Point4, tol: f64) -> Vec<ExactHit> {
        let hits = self.coarse.slack_hits(p, self.delta.max(2.0 * tol));
        let mut all = self.refine_all(&hits, |m: &Isometry4| {
            let q = m.apply(p);
            move |c: &Point4, rho: f64| rho - (q - c).norm()
        });
        // Patch boundary balls belong to the arc families, which are
        // candidates whenever these are.
        all.retain(|h| h.value.abs() <= tol && !matches!(h.origin, CenterOrigin::Patch { s, .. } if s >= 1.0 - 1e-9));
        // Arc endpoints and vertices carry the same ball.
        let mut distinct: Vec<ExactHit> = Vec::with_capacity(all.len());
        for h in all {
            if !distinct.iter().any(|k| (k.center - h.center).norm() <= 1e-9) {
                distinct.push(h);
            }
        }
        distinct
    }

    fn refine<F, G>(&self, hits: &Hits, objective: G) -> ExactHit
    where
        G: Fn(&Isometry4) -> F,
        F: Fn(&Point4, f64) -> f64,
    {
        self.refine_all(hits, objective)
            .into_iter()
            .reduce(|a, b| if b.value < a.value { b } else { a })
            .expect("the vertex balls always qualify")
    }

    // One polished hit per vertex or face among the candidates. `objective(m)`
    // builds the objective in the base frame; `m` maps world to base.
    fn refine_all<F, G>(&self, hits: &Hits, objective: G) -> Vec<ExactHit>
    where
        G: Fn(&Isometry4) -> F,
        F: Fn(&Point4, f64) -> f64,
    {
        let mut per_group: BTreeMap<usize, (usize, f64)> = BTreeMap::new();
        for &(i, v) in &hits.near {
            let g = self.coarse.centers[i].origin.group();
            let e = per_group.entry(g).or_insert((i, v));
            if v < e.1 {
                *e = (i, v);
            }
        }
        per_group
            .into_values()
            .map(|(i, v)| {
                let c = &self.coarse.centers[i];
                match c.origin {
                    CenterOrigin::Vertex(_) => {
                        ExactHit { value: v, center: c.point, radius: 0.0, origin: c.origin, piece: c.piece }
                    }
                    CenterOrigin::Arc { face, t } => {
                        self.polish_arc(face, t, &objective(&self.skel.faces[face].inverse))
                    }
                    CenterOrigin::Patch { face, s, theta } => {
                        self.polish_patch(face, s, theta, &objective(&self.skel.faces[face].inverse))
                    }
                }
            })
            .collect()
    }

    fn polish_arc(&self, face: usize, t0: f64, f: &impl Fn(&Point4, f64) -> f64) -> ExactHit {
        let (skel, w) = (&self.skel, self.width());
        let t1 = skel.arc.t1;
        let eval = |t: f64| {
            let c = skel.arc.point(t);
            f(&c, w - skel.chain.elliptic_unchecked(&c))
        };
        let h = 2.0 * t1 / self.coarse.grid.arc as f64;
        let (mut a, mut b) = ((t0 - 1.5 * h).max(-t1), (t0 + 1.5 * h).min(t1));
        let r = 0.5 * (5f64.sqrt() - 1.0);
        let (mut c, mut d) = (b - r * (b - a), a + r * (b - a));
        let (mut fc, mut fd) = (eval(c), eval(d));
        for _ in 0..GOLDEN_ITERS {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - r * (b - a);
                fc = eval(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + r * (b - a);
                fd = eval(d);
            }
        }
        let mut t = 0.5 * (a + b);
        let mut value = eval(t);
        // Golden section never evaluates the endpoints.
        for end in [-t1, t1, t0] {
            let v = eval(end);
            if v < value {
                t = end;
                value = v;
            }
        }
        let face_ref = &skel.faces[face];
        // At an endpoint the ball is the vertex ball.
        if t.abs() == t1 {
            let v = face_ref.perm[if t > 0.0 { 0 } else { 1 }];
            let center = skel.simplex.vertices[v];
            return ExactHit { value, center, radius: 0.0, origin: CenterOrigin::Vertex(v), piece: Piece::cap(v) };
        }
        let base = skel.arc.point(t);
        ExactHit {
            value,
            center: face_ref.from_base(&base),
            radius: skel.chain.elliptic_unchecked(&base).max(0.0),
            origin: CenterOrigin::Arc { face, t },
            piece: Piece::for_face(face_ref.id),
        }
    }

    fn polish_patch(&self, face: usize, s0: f64, theta0: f64, f: &impl Fn(&Point4, f64) -> f64) -> ExactHit {
        let (skel, w) = (&self.skel, self.width());
        let patch = &skel.patch;
        let clamp = |x: [f64; 2]| -> [f64; 2] {
            let r = x[0].hypot(x[1]);
            if r == 0.0 {
                return x;
            }
            let rm = patch.r_max(x[1].atan2(x[0]));
            if r > rm {
                [x[0] * rm / r, x[1] * rm / r]
            } else {
                x
            }
        };
        let eval = |x: [f64; 2]| {
            let c = patch.point_yw(x[0], x[1]);
            f(&c, w - skel.chain.hyperbolic_unchecked(&c))
        };
        let r0 = s0 * patch.r_max(theta0);
        let (x, value) = newton_2d(&eval, clamp, clamp([r0 * theta0.cos(), r0 * theta0.sin()]));
        let base = patch.point_yw(x[0], x[1]);
        let (s, theta) = patch.polar_of(&base);
        let face_ref = &skel.faces[face];
        ExactHit {
            value,
            center: face_ref.from_base(&base),
            radius: skel.chain.hyperbolic_unchecked(&base).max(0.0),
            origin: CenterOrigin::Patch { face, s: s.min(1.0), theta },
            piece: Piece::for_face(face_ref.id),
        }
    }

    /// Faces a motion carries a face to (used by symmetry checks).
    pub fn face_image(&self, face: usize, perm: &[usize; 5]) -> usize {
        let id: FaceId = self.skel.faces[face].id.permuted(perm);
        self.skel.face_index(id)
    }
}

/// Damped Newton with central-difference derivatives, projected by `clamp`.
fn newton_2d(f: &impl Fn([f64; 2]) -> f64, clamp: impl Fn([f64; 2]) -> [f64; 2], x0: [f64; 2]) -> ([f64; 2], f64) {
    let h = FD_STEP;
    let mut x = x0;
    let mut fx = f(x);
    for _ in 0..NEWTON_ITERS {
        let at = |dx: f64, dy: f64| f([x[0] + dx, x[1] + dy]);
        let (fxp, fxm, fyp, fym) = (at(h, 0.0), at(-h, 0.0), at(0.0, h), at(0.0, -h));
        let g = [(fxp - fxm) / (2.0 * h), (fyp - fym) / (2.0 * h)];
        let hxx = (fxp - 2.0 * fx + fxm) / (h * h);
        let hyy = (fyp - 2.0 * fx + fym) / (h * h);
        let hxy = (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4.0 * h * h);
        let det = hxx * hyy - hxy * hxy;
        let gn = g[0].hypot(g[1]);
        if gn == 0.0 {
            break;
        }
        let d = if hxx > 0.0 && det > 0.0 {
            [-(hyy * g[0] - hxy * g[1]) / det, -(hxx * g[1] - hxy * g[0]) / det]
        } else {
            [-10.0 * h * g[0] / gn, -10.0 * h * g[1] / gn]
        };
        let mut alpha = 1.0;
        let mut moved = false;
        for _ in 0..40 {
            let xn = clamp([x[0] + alpha * d[0], x[1] + alpha * d[1]]);
            let fnew = f(xn);
            if fnew < fx {
                let step = (xn[0] - x[0]).hypot(xn[1] - x[1]);
                x = xn;
                fx = fnew;
                moved = step > 1e-15;
                break;
            }
            alpha *= 0.5;
        }
        if !moved {
            break;
        }
    }
    (x, fx)
}
