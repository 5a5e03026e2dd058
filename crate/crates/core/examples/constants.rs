//! Closed-form constants of the body next to the numerically solved embedding.

use peabody4d::numerics::{solve_focal_embedding, ModelConstants};

fn main() -> peabody4d::Result<()> {
    let c = ModelConstants::body();
    let e = solve_focal_embedding(c.a_sq)?;
    println!("{:<6} {:>22} {:>22}", "", "closed form", "solver");
    for (name, a, b) in [("x0", c.x0, e.x0), ("x1", c.x1, e.x1), ("y0", c.y0, e.y0), ("z1", c.z1, e.z1)] {
        println!("{name:<6} {a:>22.17} {b:>22.17}");
    }
    println!("width  {:.17}", c.width);
    println!("x1^2 + 9/4 y0^2 - 3/2 = {:e}", c.x1 * c.x1 + 2.25 * c.y0 * c.y0 - 1.5);
    Ok(())
}
