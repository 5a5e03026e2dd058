//! The focal embedding for other values of a^2. Only a^2 = 3/2 closes the
//! skeleton, which the rotation residual shows.

use peabody4d::numerics::{solve_focal_embedding, ModelConstants};
use peabody4d::skeleton::rotation_closure_check;

fn main() -> peabody4d::Result<()> {
    println!("{:>6} {:>12} {:>12} {:>12} {:>12} {:>10}", "a^2", "x0", "x1", "y0", "width", "closure");
    for a_sq in [1.1, 1.3, 1.4, 1.5, 1.6, 2.0, 2.3] {
        let e = solve_focal_embedding(a_sq)?;
        let c = ModelConstants::general(a_sq)?;
        let closure = rotation_closure_check(&c, 129)?.total();
        println!("{a_sq:>6} {:>12.9} {:>12.9} {:>12.9} {:>12.9} {closure:>10.2e}", e.x0, e.x1, e.y0, c.width);
    }
    Ok(())
}
