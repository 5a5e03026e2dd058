//! Envelope pairs over all ten dual pairs: each pair spans a chord of the
//! body of length exactly the width.

use peabody4d::body::{binormal_partner, PhiSampler};
use peabody4d::numerics::ModelConstants;
use peabody4d::skeleton::FocalSkeleton;

fn main() -> peabody4d::Result<()> {
    let skel = FocalSkeleton::build(&ModelConstants::body())?;
    let sampler = PhiSampler::new(&skel);
    let w = skel.consts.width;
    for pair in sampler.pairs() {
        let mut worst = 0.0f64;
        for k in 0..4096 {
            let (s, theta, t) = sampler.halton_params(k, [0.0; 3]);
            let [a, b] = sampler.at(pair, s, theta, t)?;
            worst = worst.max(((a.point - b.point).norm() - w).abs());
            worst = worst.max((binormal_partner(&a)? - b.point).norm());
        }
        println!("{} x {}: {:.2e}", skel.faces[pair.0].id, skel.faces[pair.1].id, worst);
    }
    Ok(())
}
