//! The two focal identities on random points, and how a displaced focus
//! breaks them.

use peabody4d::focal::{focal_const_residual, focal_sum_residual};
use peabody4d::geometry::Quadric;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

fn main() -> peabody4d::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for a_sq in [1.2, 1.5, 3.0] {
        let e = Quadric::standard_ellipse(a_sq)?;
        let h = Quadric::standard_hyperboloid(a_sq)?;
        let mut bent = h;
        bent.b_sq *= 1.01;
        let (mut sum, mut cst, mut off) = (0.0f64, 0.0f64, 0.0f64);
        for _ in 0..1000 {
            let a_e = e.ellipse_point(TAU * rng.gen::<f64>())?;
            let b_e = e.ellipse_point(TAU * rng.gen::<f64>())?;
            let (x1, x2) = (1.0 + 2.0 * rng.gen::<f64>(), 1.0 + 2.0 * rng.gen::<f64>());
            let (t1, t2) = (TAU * rng.gen::<f64>(), TAU * rng.gen::<f64>());
            let (a_h, b_h) = (h.hyperboloid_point(x1, t1)?, h.hyperboloid_point(x2, t2)?);
            sum = sum.max(focal_sum_residual(&e, &h, &a_e, &b_e, &a_h, &b_h)?.abs());
            cst = cst.max(focal_const_residual(&e, &h, &a_e, &a_h)?.abs());
            let (c_h, d_h) = (bent.hyperboloid_point(x1, t1)?, bent.hyperboloid_point(x2, t2)?);
            off = off.max(focal_sum_residual(&e, &bent, &a_e, &b_e, &c_h, &d_h)?.abs());
        }
        println!("a^2 = {a_sq}: sum {sum:.2e}  constant {cst:.2e}  displaced focus {off:.2e}");
    }
    Ok(())
}
