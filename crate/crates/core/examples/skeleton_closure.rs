//! Closure of the focal skeleton: the rotated arc, the axis point, the
//! matching slopes, and radius agreement on shared arcs.

use peabody4d::numerics::ModelConstants;
use peabody4d::skeleton::*;

fn main() -> peabody4d::Result<()> {
    let c = ModelConstants::body();
    let skel = FocalSkeleton::build(&c)?;
    println!("rotated arc off the hyperboloid/plane: {:.2e}", rotation_closure_check(&c, 257)?.total());
    println!(
        "same at a^2 = 1.4:                    {:.2e}",
        rotation_closure_check(&ModelConstants::general(1.4)?, 257)?.total()
    );
    let w = axis_hyperboloid_point(&c)?;
    let p45 = skel.simplex.midpoint(3, 4);
    println!("axis point {:?}, |w - p45| - (a - x1) = {:e}", w.as_slice(), (w - p45).norm() - (c.a() - c.x1));
    let ang = tangent_slopes(&c)?;
    println!("slopes {:.15} {:.15} (expected {:.15})", ang.tan_base, ang.tan_image, ang.expected);
    let e45 = skel.face_index(FaceId::Edge([3, 4]));
    let worst = skel
        .face_samples(e45, 99)
        .iter()
        .map(|p| radius_consistency_residual(&skel, p).map(f64::abs))
        .collect::<peabody4d::Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    println!("radius laws on the shared arc differ by at most {worst:.2e}");
    let sep = cap_separation(&skel, 48);
    println!(
        "cap separation: first side min {:.2e}, second side max {:.2e}, shared arc {:.2e}",
        sep.min_first, sep.max_second, sep.boundary
    );
    println!("skeleton symmetry residual {:.2e}", symmetry_invariance_residual(&skel, 16));
    Ok(())
}
