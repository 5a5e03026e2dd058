//! Discrete ball models against the exact envelope along a few rays.

use peabody4d::body::{ray_cast_boundary, shoemake, BallModel, Envelope, GridSpec};
use peabody4d::numerics::ModelConstants;
use peabody4d::skeleton::FocalSkeleton;

fn main() -> peabody4d::Result<()> {
    let skel = FocalSkeleton::build(&ModelConstants::body())?;
    let env = Envelope::new(&skel)?;
    let reuleaux = BallModel::reuleaux(&skel)?;
    let models: Vec<BallModel> = [GridSpec::new(16, 24)?, GridSpec::default()]
        .into_iter()
        .map(|g| BallModel::build(&skel, g))
        .collect::<Result<_, _>>()?;
    for m in &models {
        println!("grid {} : {} balls", m.grid, m.len());
    }
    for k in 0..6 {
        let u = shoemake([0.13 + 0.15 * k as f64, 0.37 * k as f64 % 1.0, 0.61 * k as f64 % 1.0]);
        let exact = env.boundary_sample(&u, true);
        let t = (exact.point - env.interior_point()).norm();
        print!("{:>5} t = {t:.12}", exact.piece.to_string());
        print!("  reuleaux {:+.2e}", reuleaux.ray_cast(&u).0 - t);
        for m in &models {
            let s = ray_cast_boundary(m, &u);
            print!("  {} {:+.2e}", m.grid, (s.point - env.interior_point()).norm() - t);
        }
        println!();
    }
    Ok(())
}
