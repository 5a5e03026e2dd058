use std::f64::consts::TAU;
use std::sync::OnceLock;

use peabody4d::body::{binormal_partner, halton, shoemake, BallModel, Envelope, GridSpec, PhiSampler};
use peabody4d::export::write_csv;
use peabody4d::focal::{focal_const_residual, focal_sum_residual};
use peabody4d::geometry::{dist, Isometry4, Point4, Quadric};
use peabody4d::numerics::{solve_focal_embedding, ModelConstants};
use peabody4d::skeleton::FocalSkeleton;
use peabody4d::slice::SliceSpec;
use proptest::prelude::*;

fn skel() -> &'static FocalSkeleton {
    static S: OnceLock<FocalSkeleton> = OnceLock::new();
    S.get_or_init(|| FocalSkeleton::build(&ModelConstants::body()).unwrap())
}

fn envelope() -> &'static Envelope {
    static E: OnceLock<Envelope> = OnceLock::new();
    E.get_or_init(|| Envelope::new(skel()).unwrap())
}

fn unit4() -> impl Strategy<Value = Point4> {
    (0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64).prop_map(|(a, b, c)| shoemake([a, b, c]))
}

fn phi_params() -> impl Strategy<Value = (usize, f64, f64, f64)> {
    let t1 = skel().arc.t1;
    (0..10usize, 0.0..=1.0f64, 0.0..TAU, -t1..=t1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn envelope_pairs_span_the_width((k, s, theta, t) in phi_params()) {
        let sampler = PhiSampler::new(skel());
        let [a, b] = sampler.at(sampler.pairs()[k], s, theta, t).unwrap();
        prop_assert!((dist(&a.point, &b.point) - skel().consts.width).abs() < 1e-12);
    }

    #[test]
    fn partner_is_an_involution((k, s, theta, t) in phi_params()) {
        let sampler = PhiSampler::new(skel());
        let [a, b] = sampler.at(sampler.pairs()[k], s, theta, t).unwrap();
        prop_assert!(dist(&binormal_partner(&a).unwrap(), &b.point) < 1e-12);
        prop_assert!(dist(&binormal_partner(&b).unwrap(), &a.point) < 1e-12);
    }

    #[test]
    fn phi_samples_sit_on_the_exact_boundary((k, s, theta, t) in phi_params()) {
        let sampler = PhiSampler::new(skel());
        for b in sampler.at(sampler.pairs()[k], s, theta, t).unwrap() {
            prop_assert!(envelope().slack(&b.point).value.abs() < 1e-9);
        }
    }

    #[test]
    fn body_inside_reuleaux_simplex(u in unit4()) {
        let p = envelope().boundary_sample(&u, false).point;
        let w = skel().consts.width;
        for v in &skel().simplex.vertices {
            prop_assert!(dist(&p, v) <= w + 1e-12);
        }
    }

    #[test]
    fn exact_boundary_inside_discrete_models(u in unit4()) {
        static M: OnceLock<BallModel> = OnceLock::new();
        let m = M.get_or_init(|| BallModel::build(skel(), GridSpec::new(8, 12).unwrap()).unwrap());
        let p = envelope().boundary_sample(&u, false).point;
        prop_assert!(m.slack(&p).0 >= -1e-12);
        prop_assert!(BallModel::reuleaux(skel()).unwrap().slack(&p).0 >= -1e-12);
    }

    #[test]
    fn vertex_permutations_are_isometries(perm in Just([0usize, 1, 2, 3, 4]).prop_shuffle()) {
        let v = &skel().simplex.vertices;
        let perm: [usize; 5] = perm;
        let m = Isometry4::from_vertex_permutation(v, perm).unwrap();
        prop_assert!(m.orthogonality_defect() < 1e-12);
        for i in 0..5 {
            prop_assert!(dist(&m.apply(&v[i]), &v[perm[i]]) < 1e-12);
        }
        let back = m.compose(&m.inverse());
        prop_assert!(back.max_entry_diff(&Isometry4::identity()) < 1e-12);
    }

    #[test]
    fn focal_identities_hold(a_sq in 1.01..6.0f64, t in prop::array::uniform4(0.0..TAU), x in prop::array::uniform2(0.0..3.0f64)) {
        let (e, h) = (Quadric::standard_ellipse(a_sq).unwrap(), Quadric::standard_hyperboloid(a_sq).unwrap());
        let (a_e, b_e) = (e.ellipse_point(t[0]).unwrap(), e.ellipse_point(t[1]).unwrap());
        let (a_h, b_h) = (h.hyperboloid_point(1.0 + x[0], t[2]).unwrap(), h.hyperboloid_point(1.0 + x[1], t[3]).unwrap());
        prop_assert!(focal_sum_residual(&e, &h, &a_e, &b_e, &a_h, &b_h).unwrap().abs() < 1e-12);
        prop_assert!(focal_const_residual(&e, &h, &a_e, &a_h).unwrap().abs() < 1e-12);
    }

    #[test]
    fn embedding_is_regular(a_sq in 1.01..5.0f64) {
        let e = solve_focal_embedding(a_sq).unwrap();
        prop_assert!(1.0 < e.x0 && e.x0 < e.x1 && e.x1 < a_sq.sqrt());
        for r in e.residuals(a_sq) {
            prop_assert!(r.abs() < 1e-12);
        }
    }

    #[test]
    fn halton_directions_are_unit(k in 1u64..1_000_000) {
        let h = [halton(k, 2), halton(k, 3), halton(k, 5)];
        prop_assert!(h.iter().all(|v| (0.0..1.0).contains(v)));
        prop_assert!((shoemake(h).norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hyperplane_text_round_trips(v in prop::array::uniform5(-10.0..10.0f64)) {
        let text = v.map(|x| format!("{x:e}")).join(",");
        let (n, off) = SliceSpec::parse_hyperplane(&text).unwrap();
        prop_assert_eq!([n.x, n.y, n.z, n.w, off], v);
    }
}

#[test]
fn csv_round_trips_every_digit() {
    let sampler = PhiSampler::new(skel());
    let samples: Vec<_> = (0..50)
        .flat_map(|k| {
            let (s, th, t) = sampler.halton_params(k, [0.0; 3]);
            sampler.at(sampler.pairs()[k as usize % 10], s, th, t).unwrap()
        })
        .collect();
    let mut buf = Vec::new();
    write_csv(&mut buf, &samples).unwrap();
    let text = String::from_utf8(buf).unwrap();
    for (line, s) in text.lines().skip(1).zip(&samples) {
        let f: Vec<&str> = line.split(',').collect();
        let p = Point4::new(f[0].parse().unwrap(), f[1].parse().unwrap(), f[2].parse().unwrap(), f[3].parse().unwrap());
        assert_eq!(p, s.point);
        assert_eq!(f[4], s.piece.to_string());
    }
}
