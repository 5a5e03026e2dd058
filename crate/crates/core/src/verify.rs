//! Verification suites and the JSON report they produce.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::body::{
    convergence_study, diameter_check, halton, piece_census, sample_theta, shoemake, width_in_direction, BallModel,
    Envelope, GridSpec, PhiSampler, SampleOptions,
};
use crate::error::{Error, Result};
use crate::focal::{elliptic_chain_circle, focal_const_residual, focal_sum_residual, hyperbolic_chain_sphere};
use crate::geometry::{dist, point, Point4, Quadric};
use crate::numerics::{solve_focal_embedding, CheckClass, ModelConstants, Tolerances, BODY_A_SQ};
use crate::skeleton::{
    axis_duality_residual, axis_hyperboloid_point, cap_separation, radius_consistency_residual, rotation_closure_check,
    symmetry_invariance_residual, tangent_slopes, triangle_boundary_residual, well_definedness_residual, FaceId,
    FocalSkeleton,
};

pub const REPORT_SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    All,
    Focal,
    Skeleton,
    Body,
}

impl Suite {
    fn includes(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::All => "all",
            Suite::Focal => "focal",
            Suite::Skeleton => "skeleton",
            Suite::Body => "body",
        })
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "all" => Ok(Suite::All),
            "focal" => Ok(Suite::Focal),
            "skeleton" => Ok(Suite::Skeleton),
            "body" => Ok(Suite::Body),
            _ => Err(Error::UnknownSuite(s.to_string())),
        }
    }
}

/// How a residual is compared with its tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Comparison {
    /// Passes when `residual <= tolerance`.
    #[serde(rename = "<=")]
    AtMost,
    /// Negative control: passes when `residual > tolerance`.
    #[serde(rename = ">")]
    Exceeds,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    /// What property of the construction the check exercises.
    pub anchor: String,
    pub class: Option<CheckClass>,
    pub residual: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub pass: bool,
    pub samples: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelMeta {
    pub a_sq: f64,
    pub width: f64,
    pub grid: String,
    pub coarse_grid: String,
    pub perturb: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub schema: u32,
    pub suite: Suite,
    pub seed: u64,
    pub samples: usize,
    pub pass: bool,
    pub model: ModelMeta,
    pub tolerances: std::collections::BTreeMap<String, f64>,
    pub checks: Vec<CheckRecord>,
}

impl VerificationReport {
    pub fn failing(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub suite: Suite,
    pub samples: usize,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub grid: GridSpec,
    pub a_sq: f64,
    /// Relative change of the radius laws; nonzero only for negative controls.
    pub perturb: f64,
    pub timings: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            suite: Suite::All,
            samples: 50_000,
            seed: 0,
            tolerances: Tolerances::default(),
            grid: GridSpec::default(),
            a_sq: BODY_A_SQ,
            perturb: 0.0,
            timings: false,
        }
    }
}

struct Runner<'a> {
    opts: &'a VerifyOptions,
    checks: Vec<CheckRecord>,
}

struct Outcome {
    residual: f64,
    samples: usize,
    detail: Option<String>,
}

impl Outcome {
    fn new(residual: f64, samples: usize) -> Result<Self> {
        Ok(Outcome { residual, samples, detail: None })
    }

    fn with_detail(mut self, detail: String) -> Result<Self> {
        self.detail = Some(detail);
        Ok(self)
    }
}

impl Runner<'_> {
    fn tol(&self, class: CheckClass) -> f64 {
        self.opts.tolerances.get(class)
    }

    fn run(
        &mut self,
        name: &str,
        anchor: &str,
        class: Option<CheckClass>,
        tolerance: f64,
        comparison: Comparison,
        f: impl FnOnce() -> Result<Outcome>,
    ) {
        let start = Instant::now();
        let (residual, samples, detail) = match f() {
            Ok(o) => (o.residual, o.samples, o.detail),
            Err(e) => (f64::NAN, 0, Some(e.to_string())),
        };
        let pass = match comparison {
            Comparison::AtMost => residual <= tolerance,
            Comparison::Exceeds => residual > tolerance,
        };
        self.checks.push(CheckRecord {
            name: name.to_string(),
            anchor: anchor.to_string(),
            class,
            residual,
            tolerance,
            comparison,
            pass,
            samples,
            seed: self.opts.seed,
            detail,
            wall_time_s: self.opts.timings.then(|| start.elapsed().as_secs_f64()),
        });
    }

    fn bound(&mut self, name: &str, anchor: &str, class: CheckClass, f: impl FnOnce() -> Result<Outcome>) {
        let t = self.tol(class);
        self.run(name, anchor, Some(class), t, Comparison::AtMost, f);
    }

    fn bound_at(&mut self, name: &str, anchor: &str, tolerance: f64, f: impl FnOnce() -> Result<Outcome>) {
        self.run(name, anchor, None, tolerance, Comparison::AtMost, f);
    }

    fn control(&mut self, name: &str, anchor: &str, threshold: f64, f: impl FnOnce() -> Result<Outcome>) {
        self.run(name, anchor, None, threshold, Comparison::Exceeds, f);
    }
}

/// Runs the selected suites. The report is a pure function of the options
/// unless `timings` is set.
pub fn run_verification(opts: &VerifyOptions) -> Result<VerificationReport> {
    opts.grid.validate()?;
    if opts.samples == 0 {
        return Err(Error::InvalidParameter("sample count must be at least 1".into()));
    }
    if !(opts.perturb.is_finite() && opts.perturb.abs() < 0.5) {
        return Err(Error::InvalidParameter(format!("perturbation {} out of range", opts.perturb)));
    }
    let consts = if opts.a_sq == BODY_A_SQ { ModelConstants::body() } else { ModelConstants::general(opts.a_sq)? };
    let mut r = Runner { opts, checks: Vec::new() };
    if opts.suite.includes(Suite::Focal) {
        focal_suite(&mut r, &consts);
    }
    if opts.suite.includes(Suite::Skeleton) {
        skeleton_suite(&mut r, &consts);
    }
    if opts.suite.includes(Suite::Body) {
        body_suite(&mut r, &consts);
    }
    let checks = r.checks;
    Ok(VerificationReport {
        schema: REPORT_SCHEMA,
        suite: opts.suite,
        seed: opts.seed,
        samples: opts.samples,
        pass: checks.iter().all(|c| c.pass),
        model: ModelMeta {
            a_sq: consts.a_sq,
            width: consts.width,
            grid: opts.grid.to_string(),
            coarse_grid: GridSpec::coarse().to_string(),
            perturb: opts.perturb,
        },
        tolerances: opts.tolerances.table(),
        checks,
    })
}

/// Random points on the `+e1` sheet and anywhere on the ellipse.
fn focal_configuration(rng: &mut ChaCha8Rng, e: &Quadric, h: &Quadric) -> Result<(Point4, Point4, Point4, Point4)> {
    let on_h = |rng: &mut ChaCha8Rng| {
        h.hyperboloid_point(h.a() * (1.0 + 2.0 * rng.gen::<f64>()), rng.gen::<f64>() * std::f64::consts::TAU)
    };
    let a_h = on_h(rng)?;
    let b_h = on_h(rng)?;
    let a_e = e.ellipse_point(rng.gen::<f64>() * std::f64::consts::TAU)?;
    let b_e = e.ellipse_point(rng.gen::<f64>() * std::f64::consts::TAU)?;
    Ok((a_e, b_e, a_h, b_h))
}

fn focal_suite(r: &mut Runner, c: &ModelConstants) {
    let n = r.opts.samples.max(500);
    let seed = r.opts.seed;
    let a_sq = c.a_sq;
    let geo = CheckClass::GeometricResidual;

    r.bound("focal-sum", "opposite focal sums agree for a focal ellipse-hyperboloid pair", geo, || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xF0);
        let mut worst = 0.0f64;
        for k in 0..n {
            let a2 = if k % 2 == 0 { a_sq } else { 1.05 + 3.0 * rng.gen::<f64>() };
            let (e, h) = (Quadric::standard_ellipse(a2)?, Quadric::standard_hyperboloid(a2)?);
            let (a_e, b_e, a_h, b_h) = focal_configuration(&mut rng, &e, &h)?;
            worst = worst.max(focal_sum_residual(&e, &h, &a_e, &b_e, &a_h, &b_h)?.abs());
        }
        Outcome::new(worst, n)
    });

    r.bound("focal-constant", "focal distance combination is constant over the pair", geo, || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xF1);
        let mut worst = 0.0f64;
        for k in 0..n {
            let a2 = if k % 2 == 0 { a_sq } else { 1.05 + 3.0 * rng.gen::<f64>() };
            let (e, h) = (Quadric::standard_ellipse(a2)?, Quadric::standard_hyperboloid(a2)?);
            let (a_e, _, a_h, _) = focal_configuration(&mut rng, &e, &h)?;
            worst = worst.max(focal_const_residual(&e, &h, &a_e, &a_h)?.abs());
        }
        Outcome::new(worst, n)
    });

    r.control("focal-sum-perturbed", "moving the hyperboloid focus breaks the sum identity", 1e-5, || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xF2);
        let e = Quadric::standard_ellipse(a_sq)?;
        let mut h = Quadric::standard_hyperboloid(a_sq)?;
        h.b_sq *= 1.0 + 1e-2;
        let mut worst = 0.0f64;
        for _ in 0..n {
            let (a_e, b_e, a_h, b_h) = focal_configuration(&mut rng, &e, &h)?;
            worst = worst.max(focal_sum_residual(&e, &h, &a_e, &b_e, &a_h, &b_h)?.abs());
        }
        Outcome::new(worst, n)
    });

    r.bound("chain-tangency", "Steiner radius laws match circles tangent to both focal spheres", geo, || {
        let skel = FocalSkeleton::build(c)?;
        let chain = &skel.chain;
        let mut worst = 0.0f64;
        let mut count = 0;
        for t in skel.arc.closed_params(64) {
            let y = skel.arc.point(t);
            let dir = (y - chain.focus_e).normalize();
            let (centre, radius) = elliptic_chain_circle(chain, &dir)
                .ok_or_else(|| Error::NoConvergence("elliptic chain circle".into()))?;
            worst = worst.max(dist(&centre, &y)).max((radius - chain.elliptic(&y)?).abs());
            count += 1;
        }
        for (s, theta) in crate::skeleton::BasePatch::grid_params(8, 24) {
            let x = skel.patch.point_polar(s, theta);
            let dir = (x - chain.focus_h).normalize();
            let (centre, radius) = hyperbolic_chain_sphere(chain, &dir)
                .ok_or_else(|| Error::NoConvergence("hyperbolic chain sphere".into()))?;
            worst = worst.max(dist(&centre, &x)).max((radius - chain.hyperbolic(&x)?).abs());
            count += 1;
        }
        Outcome::new(worst, count)
    });

    r.bound("steiner-sum", "|xy| + R_x + R_y equals the width on the base dual pair", geo, || {
        let skel = FocalSkeleton::build(c)?;
        let xs: Vec<Point4> = crate::skeleton::BasePatch::grid_params(10, 12)
            .iter()
            .map(|&(s, t)| skel.patch.point_polar(s, t))
            .collect();
        let ys: Vec<Point4> = skel.arc.closed_params(100).iter().map(|&t| skel.arc.point(t)).collect();
        let mut worst = 0.0f64;
        for x in &xs {
            for y in &ys {
                worst = worst.max(crate::focal::steiner_sum_residual(&skel.chain, x, y)?.abs());
            }
        }
        Outcome::new(worst, xs.len() * ys.len())
    });
}

fn skeleton_suite(r: &mut Runner, c: &ModelConstants) {
    let alg = CheckClass::AlgebraicIdentity;
    let geo = CheckClass::GeometricResidual;
    let diam = CheckClass::Diameter;
    let skel = match FocalSkeleton::build(c) {
        Ok(s) => s,
        Err(e) => {
            r.bound("skeleton-build", "the focal skeleton can be assembled", geo, || Err(e));
            return;
        }
    };
    let s = &skel;

    r.bound("embedding-solver", "numerical embedding reproduces the constants", alg, || {
        let e = solve_focal_embedding(c.a_sq)?;
        let worst = [e.x0 - c.x0, e.x1 - c.x1, e.y0 - c.y0, e.z1 - c.z1]
            .iter()
            .chain(e.residuals(c.a_sq).iter())
            .fold(0.0f64, |m, v| m.max(v.abs()));
        Outcome::new(worst, 1)
    });

    r.bound("simplex-regularity", "all ten edges have length equal to the width", alg, || {
        let worst = s.simplex.edge_lengths().iter().map(|l| (l - c.width).abs()).fold(0.0, f64::max);
        Outcome::new(worst, 10)
    });

    r.bound("group-closure", "the 120 vertex permutations act as a group of isometries", alg, || {
        let n = s.group.len();
        let defect = s.group.closure_defect((0..n).flat_map(|i| (0..n).map(move |j| (i, j))));
        let ortho = s.group.motions.iter().map(|m| m.orthogonality_defect()).fold(0.0, f64::max);
        Outcome::new(defect.max(ortho), n * n)
    });

    r.bound("rotation-closure", "the rotated base arc lies on the hyperboloid in the cut plane", geo, || {
        let rep = rotation_closure_check(c, 257)?;
        Outcome::new(rep.total(), rep.samples)
    });

    r.control("rotation-closure-perturbed", "rotation closure fails away from the body parameter", 1e-4, || {
        let rep = rotation_closure_check(&ModelConstants::general(1.4)?, 257)?;
        Outcome::new(rep.total(), rep.samples)
    });

    r.bound("axis-point", "distance from the edge midpoint to the hyperboloid along the dual axis", alg, || {
        let w = axis_hyperboloid_point(c)?;
        let p45 = s.simplex.midpoint(3, 4);
        Outcome::new((dist(&w, &p45) - (c.a() - c.x1)).abs(), 1)
    });

    r.bound("tangent-slopes", "the arc and its rotated image meet the cut plane at equal slopes", alg, || {
        let rep = tangent_slopes(c)?;
        let worst = (rep.tan_base - rep.expected).abs().max((rep.tan_image - rep.expected).abs());
        Outcome::new(worst, 2)
    });

    r.bound("radius-consistency", "both radius laws agree on shared arcs", geo, || {
        let e45 = s.face_index(FaceId::Edge([3, 4]));
        let pts = s.face_samples(e45, 99);
        let mut worst = 0.0f64;
        for p in &pts {
            worst = worst.max(radius_consistency_residual(s, p)?.abs());
        }
        Outcome::new(worst, pts.len())
    });

    r.bound("axis-duality", "edge-face axes pass through the complementary barycentres", alg, || {
        Outcome::new(axis_duality_residual(s), 10)
    });

    r.bound("face-well-defined", "faces do not depend on the motion chosen to build them", diam, || {
        Outcome::new(well_definedness_residual(s, 16), 120)
    });

    r.bound("skeleton-symmetry", "every motion maps the skeleton onto itself", diam, || {
        Outcome::new(symmetry_invariance_residual(s, 16), 120 * 20)
    });

    r.bound("triangle-boundary", "triangle patches are bounded by their three edge arcs", diam, || {
        Outcome::new(triangle_boundary_residual(s, 32), 3 * 96)
    });

    r.bound("cap-separation", "the hyperplane through p1, p4, p5 and g separates the two cap triangles", diam, || {
        let rep = cap_separation(s, 48);
        Outcome::new(rep.violation(), rep.samples)
    });

    r.bound("focal-pairs", "every dual edge-triangle pair is focal", geo, || {
        let mut worst = 0.0f64;
        for f in 0..s.faces.len() {
            if !s.is_edge(f) {
                continue;
            }
            let pair = s.focal_pair(f)?;
            let tri = s.dual_index(f);
            let ys = s.face_samples(f, 8);
            let xs = s.face_samples(tri, 8);
            for y in &ys {
                for x in &xs {
                    worst = worst.max(pair.const_residual(y, x)?.abs());
                }
            }
        }
        Outcome::new(worst, 10)
    });
}

fn body_suite(r: &mut Runner, c: &ModelConstants) {
    let geo = CheckClass::GeometricResidual;
    let diam = CheckClass::Diameter;
    let opts = r.opts;
    let seed = opts.seed;
    let w = c.width;
    let built =
        FocalSkeleton::build_scaled(c, 1.0 + opts.perturb).and_then(|skel| Envelope::new(&skel).map(|env| (skel, env)));
    let (skel, env) = match built {
        Ok(v) => v,
        Err(e) => {
            r.bound("body-build", "the ball families can be assembled", geo, || Err(e));
            return;
        }
    };

    r.bound_at("interior-point", "the centroid is strictly inside every ball", 0.0, || {
        let model = BallModel::build(&skel, opts.grid)?;
        Outcome::new((1e-6 - model.interior_margin()).max(0.0), model.len())
    });

    r.bound("binormal-length", "paired envelope points are at distance equal to the width", diam, || {
        let sampler = PhiSampler::new(&skel);
        let pairs = sampler.pairs();
        let n = opts.samples;
        let worst = (0..n)
            .into_par_iter()
            .map(|k| {
                let (s, theta, t) = sampler.halton_params((k / pairs.len()) as u64, [0.0; 3]);
                let [a, b] = sampler.at(pairs[k % pairs.len()], s, theta, t)?;
                Ok((dist(&a.point, &b.point) - w).abs())
            })
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        Outcome::new(worst, 2 * n)
    });

    r.bound_at(
        "representation-cross-check",
        "envelope points sit inside the discrete model by a margin shrinking 4x per refinement",
        1e-9,
        || {
            let rep = convergence_study(&skel, opts.grid, 2, 1000.min(opts.samples.max(100)), seed)?;
            let ratio = rep.ratios[0];
            let inside = (-rep.min_slacks.iter().copied().fold(f64::INFINITY, f64::min)).max(0.0);
            let ratio_miss = if (3.0..=5.0).contains(&ratio) { 0.0 } else { 1.0 };
            let detail = format!("residual(h) = {:?}, ratio {ratio:.3}, min slack {:?}", rep.residuals, rep.min_slacks);
            Outcome::new(inside.max(ratio_miss), rep.samples)?.with_detail(detail)
        },
    );

    let n_samples = opts.samples.max(10_000);
    let mut so = SampleOptions::new(n_samples, seed);
    so.slack = true;
    let samples = match sample_theta(&env, &so) {
        Ok(s) => s,
        Err(e) => {
            r.bound("boundary-samples", "boundary sampling succeeds", geo, || Err(e));
            return;
        }
    };

    r.bound("sample-slack", "every boundary sample is on the exact envelope", diam, || {
        let worst = samples.iter().map(|s| s.slack.abs()).fold(0.0, f64::max);
        Outcome::new(worst, samples.len())
    });

    r.bound_at("piece-census", "all 25 boundary pieces occur among the samples", 0.0, || {
        let census = piece_census(&samples);
        let missing: Vec<String> = census.iter().filter(|(_, &n)| n == 0).map(|(p, _)| p.to_string()).collect();
        let o = Outcome::new(missing.len() as f64, samples.len())?;
        if missing.is_empty() {
            Ok(o)
        } else {
            o.with_detail(format!("missing {}", missing.join(" ")))
        }
    });

    r.bound("diameter", "no two samples are farther apart than the width; every partner is at the width", diam, || {
        let rep = diameter_check(&samples, &skel.simplex.vertices, 10 * samples.len(), seed)?;
        let detail = format!(
            "max pair {:.17}, partners [{:.17}, {:.17}], vertex max {:.17}",
            rep.max_pair, rep.partner_min, rep.partner_max, rep.vertex_max
        );
        Outcome::new(rep.residual(w), rep.samples)?.with_detail(detail)
    });

    r.bound("constant-width", "sampled width equals the width in every direction", CheckClass::SampledWidth, || {
        let dirs = 1000;
        let mut worst = 0.0f64;
        for k in 1..=dirs as u64 {
            let u = shoemake([halton(k, 2), halton(k, 3), halton(k, 5)]);
            worst = worst.max((width_in_direction(&samples, &u)? - w).abs());
        }
        Outcome::new(worst, dirs)
    });

    r.bound("binormal-width", "width along certified binormals is at least the width", diam, || {
        let sampler = PhiSampler::new(&skel);
        let mut worst = 0.0f64;
        let mut count = 0;
        for (k, pair) in sampler.pairs().into_iter().enumerate() {
            let (s, theta, t) = sampler.halton_params(k as u64 + 7, [0.0; 3]);
            let [a, b] = sampler.at(pair, s, theta, t)?;
            let u = (a.point - b.point).normalize();
            let mut pts = samples.clone();
            pts.extend([a, b]);
            worst = worst.max((w - width_in_direction(&pts, &u)?).max(0.0));
            count += 1;
        }
        Outcome::new(worst, count)
    });

    r.bound(
        "model-symmetry",
        "every motion maps the ball centres and radii onto themselves",
        CheckClass::Diameter,
        || {
            let model = BallModel::build(&skel, GridSpec::new(16, 24)?)?;
            Outcome::new(model.symmetry_defect(&skel.group), model.len() * skel.group.len())
        },
    );

    r.bound_at("sample-symmetry", "motion images of samples stay on the envelope", 1e-8, || {
        let picked: Vec<&Point4> = samples.iter().step_by((samples.len() / 100).max(1)).map(|s| &s.point).collect();
        let worst = skel
            .group
            .motions
            .par_iter()
            .map(|m| picked.iter().map(|p| env.slack(&m.apply(p)).value.abs()).fold(0.0, f64::max))
            .reduce(|| 0.0, f64::max);
        Outcome::new(worst, picked.len() * skel.group.len())
    });

    r.bound_at("normal-uniqueness", "the balls tight at an envelope point share one outer normal", 1e-3, || {
        let picked: Vec<_> =
            samples.iter().filter(|s| !matches!(s.origin, crate::body::CenterOrigin::Vertex(_))).step_by(50).collect();
        let tol = opts.tolerances.get(CheckClass::Diameter);
        let spreads = picked
            .par_iter()
            .map(|s| {
                let normals: Vec<Point4> =
                    env.active(&s.point, tol).iter().map(|h| (s.point - h.center).normalize()).collect();
                let spread =
                    normals.iter().flat_map(|a| normals.iter().map(move |b| (a - b).norm())).fold(0.0, f64::max);
                (normals.len(), spread)
            })
            .collect::<Vec<_>>();
        let multiple = spreads.iter().filter(|(n, _)| *n > 1).count();
        let empty = spreads.iter().filter(|(n, _)| *n == 0).count();
        let worst = spreads.iter().map(|&(_, s)| s).fold(0.0, f64::max);
        let residual = if empty > 0 { f64::INFINITY } else { worst };
        Outcome::new(residual, picked.len())?
            .with_detail(format!("{multiple} samples with several tight balls, {empty} with none"))
    });

    r.bound_at(
        "axis-ray",
        "the stabilizer of the x-axis permutes the tight balls at the +x boundary point",
        0.0,
        || {
            let u = point(1.0, 0.0, 0.0, 0.0);
            let p = env.interior_point() + env.ray_cast(&u).value * u;
            let tight = env.active(&p, 1e-9);
            let mut unmatched = 0;
            for (perm, m) in skel.group.perms.iter().zip(&skel.group.motions) {
                if perm[0] >= 2 || perm[1] >= 2 {
                    continue;
                }
                unmatched +=
                    tight.iter().filter(|h| !tight.iter().any(|k| dist(&m.apply(&h.center), &k.center) < 1e-7)).count();
            }
            let detail = tight.iter().map(|h| h.piece.to_string()).collect::<Vec<_>>().join(" ");
            let residual = if tight.is_empty() { 1.0 } else { unmatched as f64 };
            Outcome::new(residual, tight.len())?.with_detail(format!("tight pieces: {detail}"))
        },
    );
}
