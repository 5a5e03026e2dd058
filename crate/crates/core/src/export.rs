//! ASCII writers for samples and slice meshes. Floats carry 17 significant
//! digits so files round-trip exactly.

use std::io::Write;

use crate::body::BoundarySample;
use crate::error::Result;
use crate::slice::Slice;

pub const CSV_HEADER: &str = "x,y,z,w,face,slack";

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// One row per sample under `CSV_HEADER`.
pub fn write_csv(out: &mut impl Write, samples: &[BoundarySample]) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for s in samples {
        let p = s.point;
        writeln!(out, "{},{},{},{},{},{}", num(p.x), num(p.y), num(p.z), num(p.w), s.piece, num(s.slack))?;
    }
    Ok(())
}

pub fn write_off(out: &mut impl Write, slice: &Slice) -> Result<()> {
    writeln!(out, "OFF")?;
    writeln!(out, "{} {} 0", slice.samples.len(), slice.triangles.len())?;
    for c in slice.coords3() {
        writeln!(out, "{} {} {}", num(c[0]), num(c[1]), num(c[2]))?;
    }
    for t in &slice.triangles {
        writeln!(out, "3 {} {} {}", t[0], t[1], t[2])?;
    }
    Ok(())
}

pub fn write_ply(out: &mut impl Write, slice: &Slice) -> Result<()> {
    writeln!(out, "ply")?;
    writeln!(out, "format ascii 1.0")?;
    writeln!(out, "element vertex {}", slice.samples.len())?;
    for axis in ["x", "y", "z"] {
        writeln!(out, "property double {axis}")?;
    }
    writeln!(out, "element face {}", slice.triangles.len())?;
    writeln!(out, "property list uchar int vertex_indices")?;
    writeln!(out, "end_header")?;
    for c in slice.coords3() {
        writeln!(out, "{} {} {}", num(c[0]), num(c[1]), num(c[2]))?;
    }
    for t in &slice.triangles {
        writeln!(out, "3 {} {} {}", t[0], t[1], t[2])?;
    }
    Ok(())
}
