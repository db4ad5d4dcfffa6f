//! OBJ mesh export of a product immersion: one ASCII mesh per factor
//! sphere plus a sidecar CSV with per-vertex invariants in the column
//! order `i, j, c1, c2, k, kperp`.

use super::{InvariantField, ProductImmersion};
use crate::error::Result;
use std::io::Write;
use std::path::Path;

/// Writes `<base>_factor1.obj`, `<base>_factor2.obj` and
/// `<base>_vertex_data.csv`. Vertices run in row-major node order, so
/// OBJ vertex `1 + i*ny + j` corresponds to CSV row `(i, j)`. Faces
/// triangulate the grid quads and wrap across periodic seams.
pub fn export_obj(base: &Path, p: &ProductImmersion, inv: &InvariantField) -> Result<()> {
    let g = *p.grid();
    for (suffix, field) in [("factor1", &p.phi1), ("factor2", &p.phi2)] {
        let path = base.with_file_name(format!(
            "{}_{suffix}.obj",
            base.file_name().and_then(|s| s.to_str()).unwrap_or("surface")
        ));
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(out, "o {suffix}")?;
        for i in 0..g.nx {
            for j in 0..g.ny {
                let v = field.get(i, j);
                writeln!(out, "v {} {} {}", v[0], v[1], v[2])?;
            }
        }
        let imax = if g.periodic_x { g.nx } else { g.nx - 1 };
        let jmax = if g.periodic_y { g.ny } else { g.ny - 1 };
        let idx = |i: usize, j: usize| 1 + (i % g.nx) * g.ny + (j % g.ny);
        for i in 0..imax {
            for j in 0..jmax {
                let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
                writeln!(out, "f {a} {b} {c}")?;
                writeln!(out, "f {a} {c} {d}")?;
            }
        }
        out.flush()?;
    }

    let path = base.with_file_name(format!(
        "{}_vertex_data.csv",
        base.file_name().and_then(|s| s.to_str()).unwrap_or("surface")
    ));
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "i,j,c1,c2,k,kperp")?;
    for i in 0..g.nx {
        for j in 0..g.ny {
            writeln!(
                out,
                "{i},{j},{},{},{},{}",
                inv.c1.get(i, j),
                inv.c2.get(i, j),
                inv.k.get(i, j),
                inv.kperp.get(i, j)
            )?;
        }
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cxgrid::ComplexGrid;

    #[test]
    fn obj_export_roundtrip_shape() {
        let dir = std::env::temp_dir().join("minsurf_obj_test");
        std::fs::create_dir_all(&dir).unwrap();
        let g = ComplexGrid::centered_square(0.5, 17).unwrap();
        let (p, _) = crate::s2xs2::diagonal(g).unwrap();
        let inv = crate::s2xs2::invariants(&p).unwrap();
        export_obj(&dir.join("diag"), &p, &inv).unwrap();
        let obj = std::fs::read_to_string(dir.join("diag_factor1.obj")).unwrap();
        let nv = obj.lines().filter(|l| l.starts_with("v ")).count();
        let nf = obj.lines().filter(|l| l.starts_with("f ")).count();
        assert_eq!(nv, 289);
        assert_eq!(nf, 2 * 16 * 16);
        let csv = std::fs::read_to_string(dir.join("diag_vertex_data.csv")).unwrap();
        assert_eq!(csv.lines().count(), 290);
        assert!(csv.lines().next().unwrap() == "i,j,c1,c2,k,kperp");
    }
}
