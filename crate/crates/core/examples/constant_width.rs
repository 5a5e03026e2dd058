//! Sampled widths, the diameter sweep and binormal partners.

use peabody4d::body::{
    diameter_check, halton, piece_census, sample_theta, shoemake, width_in_direction, Envelope, SampleOptions,
};
use peabody4d::numerics::ModelConstants;
use peabody4d::skeleton::FocalSkeleton;

fn main() -> peabody4d::Result<()> {
    let skel = FocalSkeleton::build(&ModelConstants::body())?;
    let env = Envelope::new(&skel)?;
    let w = skel.consts.width;
    let samples = sample_theta(&env, &SampleOptions::new(40_000, 0))?;
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for k in 1..=500 {
        let width = width_in_direction(&samples, &shoemake([halton(k, 2), halton(k, 3), halton(k, 5)]))?;
        lo = lo.min(width);
        hi = hi.max(width);
    }
    println!("width {w:.15}; sampled range [{lo:.15}, {hi:.15}]");
    let d = diameter_check(&samples, &skel.simplex.vertices, 1_000_000, 0)?;
    println!("max pair {:.15}, partner distances [{:.15}, {:.15}]", d.max_pair, d.partner_min, d.partner_max);
    for (piece, n) in piece_census(&samples) {
        print!("{piece}:{n} ");
    }
    println!();
    Ok(())
}
