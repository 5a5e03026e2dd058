use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::envelope::Envelope;
use super::model::{BallModel, CenterOrigin, GridSpec};
use super::{BoundarySample, Piece};
use crate::error::{Error, Result};
use crate::geometry::{dist, Point4};
use crate::skeleton::FocalSkeleton;

/// Radical inverse of `index` in `base`.
pub fn halton(index: u64, base: u64) -> f64 {
    let (mut i, mut f, mut r) = (index, 1.0, 0.0);
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// Uniform map from the unit cube to the unit 3-sphere.
pub fn shoemake(u: [f64; 3]) -> Point4 {
    let (r1, r2) = ((1.0 - u[0]).sqrt(), u[0].sqrt());
    let (a, b) = (TAU * u[1], TAU * u[2]);
    Point4::new(r1 * a.sin(), r1 * a.cos(), r2 * b.sin(), r2 * b.cos())
}

/// Generates the paired envelope points `phi1(x, y)`, `phi2(x, y)` for
/// `x` on a triangle patch and `y` on the dual edge arc.
#[derive(Debug, Clone, Copy)]
pub struct PhiSampler<'a> {
    skel: &'a FocalSkeleton,
}

impl<'a> PhiSampler<'a> {
    pub fn new(skel: &'a FocalSkeleton) -> Self {
        PhiSampler { skel }
    }

    /// The ten dual pairs as `(triangle face, edge face)` indices.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        (0..self.skel.faces.len()).filter(|&f| !self.skel.is_edge(f)).map(|f| (f, self.skel.dual_index(f))).collect()
    }

    /// `[phi1, phi2]` at patch parameters `(s, theta)` and arc parameter `t`.
    pub fn at(&self, pair: (usize, usize), s: f64, theta: f64, t: f64) -> Result<[BoundarySample; 2]> {
        let skel = self.skel;
        let (tri, edge) = pair;
        if skel.is_edge(tri) || skel.dual_index(tri) != edge {
            return Err(Error::DomainError(format!("faces {tri} and {edge} are not a dual pair")));
        }
        if !(0.0..=1.0).contains(&s) || t.abs() > skel.arc.t1 {
            return Err(Error::DomainError(format!("parameters (s={s}, t={t}) outside the faces")));
        }
        let xb = skel.patch.point_polar(s, theta);
        let yb = skel.arc.point(t);
        let (x, y) = (skel.faces[tri].from_base(&xb), skel.faces[edge].from_base(&yb));
        let (rx, ry) = (skel.chain.hyperbolic_unchecked(&xb).max(0.0), skel.chain.elliptic_unchecked(&yb).max(0.0));
        let d = x - y;
        let n = d.norm();
        if !(n > 0.0) {
            return Err(Error::DomainError("coincident points".into()));
        }
        let u = d / n;
        let first = BoundarySample {
            point: x + rx * u,
            piece: Piece::for_face(skel.faces[edge].id),
            center: y,
            radius: ry,
            origin: CenterOrigin::Arc { face: edge, t },
            slack: f64::NAN,
        };
        let second = BoundarySample {
            point: y - ry * u,
            piece: Piece::for_face(skel.faces[tri].id),
            center: x,
            radius: rx,
            origin: CenterOrigin::Patch { face: tri, s, theta },
            slack: f64::NAN,
        };
        Ok([first, second])
    }

    /// Parameters of the `k`-th low-discrepancy sample of one pair.
    pub fn halton_params(&self, k: u64, shift: [f64; 3]) -> (f64, f64, f64) {
        let h = [halton(k + 1, 2), halton(k + 1, 3), halton(k + 1, 5)];
        let h = [0, 1, 2].map(|i| (h[i] + shift[i]).fract());
        (h[0].sqrt(), TAU * h[1], self.skel.arc.t1 * (2.0 * h[2] - 1.0))
    }

    /// Uniformly random parameters.
    pub fn random_params(&self, rng: &mut impl Rng) -> (f64, f64, f64) {
        let s = rng.gen::<f64>().sqrt();
        (s, TAU * rng.gen::<f64>(), self.skel.arc.t1 * (2.0 * rng.gen::<f64>() - 1.0))
    }
}

/// Discrete-model boundary sample along `u` from the interior point.
pub fn ray_cast_boundary(model: &BallModel, u: &Point4) -> BoundarySample {
    let (t, idx) = model.ray_cast(u);
    let c = &model.centers[idx];
    let point = model.interior_point + t * u;
    BoundarySample {
        point,
        piece: c.piece,
        center: c.point,
        radius: c.radius,
        origin: c.origin,
        slack: model.slack(&point).0,
    }
}

/// What `sample_theta` produces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleOptions {
    pub n: usize,
    pub seed: u64,
    /// Fraction of the samples taken as direct envelope pairs.
    pub phi_share: f64,
    /// Compute the exact slack of every sample.
    pub slack: bool,
}

impl SampleOptions {
    pub fn new(n: usize, seed: u64) -> Self {
        SampleOptions { n, seed, phi_share: 0.5, slack: false }
    }
}

/// Boundary samples: the five vertices, envelope pairs at low-discrepancy
/// parameters over all dual pairs, and exact ray casts along
/// low-discrepancy directions. Deterministic in the options.
pub fn sample_theta(env: &Envelope, opts: &SampleOptions) -> Result<Vec<BoundarySample>> {
    if opts.n == 0 {
        return Err(Error::InvalidParameter("sample count must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&opts.phi_share) {
        return Err(Error::InvalidParameter(format!("phi share {} outside [0, 1]", opts.phi_share)));
    }
    let skel = &env.skel;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let shift_phi: [f64; 3] = rng.gen();
    let shift_dir: [f64; 3] = rng.gen();

    let mut out: Vec<BoundarySample> = (0..opts.n.min(5))
        .map(|i| {
            let j = (i + 1) % 5;
            let v = skel.simplex.vertices[i];
            BoundarySample {
                point: v,
                piece: Piece::cap(j),
                center: skel.simplex.vertices[j],
                radius: 0.0,
                origin: CenterOrigin::Vertex(j),
                slack: f64::NAN,
            }
        })
        .collect();
    let rest = opts.n - out.len();
    let n_pairs = ((rest as f64 * opts.phi_share) / 2.0).floor() as usize;
    let n_rays = rest - 2 * n_pairs;

    let sampler = PhiSampler::new(skel);
    let pairs = sampler.pairs();
    let phi: Vec<[BoundarySample; 2]> = (0..n_pairs)
        .into_par_iter()
        .map(|k| {
            let (s, theta, t) = sampler.halton_params((k / pairs.len()) as u64, shift_phi);
            sampler.at(pairs[k % pairs.len()], s, theta, t)
        })
        .collect::<Result<_>>()?;
    out.extend(phi.into_iter().flatten());

    let rays: Vec<BoundarySample> = (0..n_rays)
        .into_par_iter()
        .map(|k| {
            let h = [halton(k as u64 + 1, 2), halton(k as u64 + 1, 3), halton(k as u64 + 1, 5)];
            env.boundary_sample(&shoemake([0, 1, 2].map(|i| (h[i] + shift_dir[i]).fract())), false)
        })
        .collect();
    out.extend(rays);

    if opts.slack {
        out.par_iter_mut().for_each(|s| s.slack = env.slack(&s.point).value);
    }
    Ok(out)
}

/// The other end of the binormal through `s`: `c - r(c) (s - c)/|s - c|`,
/// at distance `rho + r = width` from `s` when `s` is on its sphere.
pub fn binormal_partner(s: &BoundarySample) -> Result<Point4> {
    let d = s.point - s.center;
    let n = d.norm();
    let consistent = match s.origin {
        CenterOrigin::Vertex(i) => s.piece == Piece::cap(i) && s.radius == 0.0,
        _ => !s.piece.is_cap() && !s.piece.is_empty(),
    };
    if !consistent || !(n > 0.0) || !n.is_finite() || !s.radius.is_finite() {
        return Err(Error::UnclassifiedSample(format!("sample at {:?} labeled {}", s.point.as_slice(), s.piece)));
    }
    Ok(s.center - (s.radius / n) * d)
}

/// `max <p, u> - min <p, u>` over the samples.
pub fn width_in_direction(samples: &[BoundarySample], u: &Point4) -> Result<f64> {
    const MIN_SAMPLES: usize = 10_000;
    if samples.len() < MIN_SAMPLES {
        return Err(Error::TooFewSamples { got: samples.len(), need: MIN_SAMPLES });
    }
    let (lo, hi) = samples
        .iter()
        .map(|s| s.point.dot(u))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    Ok(hi - lo)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiameterReport {
    pub samples: usize,
    pub pairs: usize,
    /// Largest distance over the random pairs.
    pub max_pair: f64,
    /// Smallest and largest distance from a sample to its binormal partner.
    pub partner_min: f64,
    pub partner_max: f64,
    /// Largest distance from a sample to a vertex.
    pub vertex_max: f64,
    /// Largest distance seen overall.
    pub diameter: f64,
}

impl DiameterReport {
    /// Worst deviation from `width`: any distance above it, or a partner off it.
    pub fn residual(&self, width: f64) -> f64 {
        let over = (self.max_pair.max(self.vertex_max) - width).max(0.0);
        over.max((self.partner_max - width).abs()).max((self.partner_min - width).abs())
    }
}

/// Random pair sweep plus the exact partner distance of every sample.
pub fn diameter_check(
    samples: &[BoundarySample],
    vertices: &[Point4],
    pairs: usize,
    seed: u64,
) -> Result<DiameterReport> {
    const CHUNK: usize = 1 << 14;
    let n = samples.len();
    let max_pair = if n < 2 {
        0.0
    } else {
        (0..pairs.div_ceil(CHUNK))
            .into_par_iter()
            .map(|chunk| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(chunk as u64);
                let count = CHUNK.min(pairs - chunk * CHUNK);
                (0..count)
                    .map(|_| {
                        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
                        dist(&samples[i].point, &samples[j].point)
                    })
                    .fold(0.0, f64::max)
            })
            .reduce(|| 0.0, f64::max)
    };
    let partner: Vec<f64> =
        samples.par_iter().map(|s| binormal_partner(s).map(|p| dist(&p, &s.point))).collect::<Result<_>>()?;
    let partner_min = partner.iter().copied().fold(f64::INFINITY, f64::min);
    let partner_max = partner.iter().copied().fold(0.0, f64::max);
    let vertex_max = samples
        .par_iter()
        .map(|s| vertices.iter().map(|v| dist(v, &s.point)).fold(0.0, f64::max))
        .reduce(|| 0.0, f64::max);
    Ok(DiameterReport {
        samples: n,
        pairs,
        max_pair,
        partner_min,
        partner_max,
        vertex_max,
        diameter: max_pair.max(partner_max).max(vertex_max),
    })
}

/// How far envelope samples sit inside discrete models of growing density.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub grids: Vec<String>,
    pub centers: Vec<usize>,
    /// Largest slack of the samples against each model.
    pub residuals: Vec<f64>,
    /// Smallest slack; negative values mean a sample fell outside.
    pub min_slacks: Vec<f64>,
    /// `residuals[k] / residuals[k + 1]`.
    pub ratios: Vec<f64>,
    pub samples: usize,
}

/// Slack of `pairs` random envelope pairs against models at `levels`
/// successive 2x refinements of `grid`.
pub fn convergence_study(
    skel: &FocalSkeleton,
    grid: GridSpec,
    levels: usize,
    pairs: usize,
    seed: u64,
) -> Result<ConvergenceReport> {
    let sampler = PhiSampler::new(skel);
    let faces = sampler.pairs();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(2 * pairs);
    for k in 0..pairs {
        let (s, theta, t) = sampler.random_params(&mut rng);
        points.extend(sampler.at(faces[k % faces.len()], s, theta, t)?.map(|b| b.point));
    }
    let mut report = ConvergenceReport {
        grids: Vec::new(),
        centers: Vec::new(),
        residuals: Vec::new(),
        min_slacks: Vec::new(),
        ratios: Vec::new(),
        samples: points.len(),
    };
    let mut g = grid;
    for _ in 0..levels {
        let model = BallModel::build(skel, g)?;
        let slacks: Vec<f64> = points.par_iter().map(|p| model.slack(p).0).collect();
        report.grids.push(g.to_string());
        report.centers.push(model.len());
        report.residuals.push(slacks.iter().copied().fold(f64::NEG_INFINITY, f64::max));
        report.min_slacks.push(slacks.iter().copied().fold(f64::INFINITY, f64::min));
        g = g.refined();
    }
    report.ratios = report.residuals.windows(2).map(|w| w[0] / w[1]).collect();
    Ok(report)
}

/// Sample count per piece, with every piece listed.
pub fn piece_census(samples: &[BoundarySample]) -> std::collections::BTreeMap<Piece, usize> {
    let mut m: std::collections::BTreeMap<Piece, usize> = Piece::all().into_iter().map(|p| (p, 0)).collect();
    for s in samples {
        *m.entry(s.piece).or_default() += 1;
    }
    m
}
