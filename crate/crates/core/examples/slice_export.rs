//! Slices through the centroid, written as OFF and PLY next to the binary.

use std::fs::File;
use std::io::BufWriter;

use peabody4d::body::{BallModel, GridSpec};
use peabody4d::export::{write_off, write_ply};
use peabody4d::geometry::Point4;
use peabody4d::numerics::ModelConstants;
use peabody4d::skeleton::FocalSkeleton;
use peabody4d::slice::{slice_model, Format, SliceSpec};

fn main() -> peabody4d::Result<()> {
    let skel = FocalSkeleton::build(&ModelConstants::body())?;
    let model = BallModel::build(&skel, GridSpec::default())?;
    let dir = std::env::temp_dir();
    for (name, normal) in [("w0", Point4::w()), ("z0", Point4::z())] {
        let s = slice_model(&model, &SliceSpec::new(normal, 0.0, 24, Format::Off)?)?;
        let widest = (0..48)
            .map(|k| {
                let a = std::f64::consts::PI * k as f64 / 48.0;
                s.width_along(&(a.cos() * s.basis[0] + a.sin() * s.basis[1]))
            })
            .fold(0.0, f64::max);
        let off = dir.join(format!("peabody4d_{name}.off"));
        let ply = dir.join(format!("peabody4d_{name}.ply"));
        write_off(&mut BufWriter::new(File::create(&off)?), &s)?;
        write_ply(&mut BufWriter::new(File::create(&ply)?), &s)?;
        println!("{name}: {} vertices, widest in-plane width {widest:.6} -> {}", s.samples.len(), off.display());
    }
    Ok(())
}
