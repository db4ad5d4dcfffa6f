//! Field serialization: a CSV with one row per node (`i, j, x, y,
//! <channels...>`) next to a JSON header describing the grid and the
//! channel names. Floats are written with Rust's shortest round-trip
//! formatting, which is deterministic on a given platform.

use super::{ComplexGrid, Field};
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::io::Write;
use std::path::Path;

/// One named scalar channel; complex and vector fields are flattened
/// into several channels before writing.
pub enum FieldChannel<'a> {
    Real(&'a str, &'a Field<f64>),
    Complex(&'a str, &'a Field<Complex64>),
    Vector3(&'a str, &'a Field<nalgebra::Vector3<f64>>),
}

#[derive(serde::Serialize, serde::Deserialize)]
struct Header {
    format: String,
    grid: ComplexGrid,
    channels: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    example: Option<String>,
}

fn channel_names(channels: &[FieldChannel]) -> Vec<String> {
    let mut names = Vec::new();
    for ch in channels {
        match ch {
            FieldChannel::Real(n, _) => names.push((*n).to_string()),
            FieldChannel::Complex(n, _) => {
                names.push(format!("{n}_re"));
                names.push(format!("{n}_im"));
            }
            FieldChannel::Vector3(n, _) => {
                for ax in ["x", "y", "z"] {
                    names.push(format!("{n}_{ax}"));
                }
            }
        }
    }
    names
}

/// Writes `<base>.csv` and `<base>.json`. All channels must share a grid.
pub fn save_fields(base: &Path, channels: &[FieldChannel], example: Option<&str>) -> Result<()> {
    let grid = match channels.first() {
        Some(FieldChannel::Real(_, f)) => *f.grid(),
        Some(FieldChannel::Complex(_, f)) => *f.grid(),
        Some(FieldChannel::Vector3(_, f)) => *f.grid(),
        None => return Err(Error::Precondition("save_fields: no channels".into())),
    };
    for ch in channels {
        let g = match ch {
            FieldChannel::Real(_, f) => f.grid(),
            FieldChannel::Complex(_, f) => f.grid(),
            FieldChannel::Vector3(_, f) => f.grid(),
        };
        if !g.same_layout(&grid) {
            return Err(Error::GridMismatch("save_fields: channel grids differ".into()));
        }
    }

    let header = Header {
        format: "minsurf-field-v1".into(),
        grid,
        channels: channel_names(channels),
        example: example.map(str::to_string),
    };
    let json = serde_json::to_string_pretty(&header)
        .map_err(|e| Error::Parse(format!("header serialization: {e}")))?;
    std::fs::write(base.with_extension("json"), json)?;

    let mut out = std::io::BufWriter::new(std::fs::File::create(base.with_extension("csv"))?);
    write!(out, "i,j,x,y")?;
    for name in channel_names(channels) {
        write!(out, ",{name}")?;
    }
    writeln!(out)?;
    for i in 0..grid.nx {
        for j in 0..grid.ny {
            write!(out, "{i},{j},{},{}", grid.x(i), grid.y(j))?;
            for ch in channels {
                match ch {
                    FieldChannel::Real(_, f) => write!(out, ",{}", f.get(i, j))?,
                    FieldChannel::Complex(_, f) => {
                        let v = f.get(i, j);
                        write!(out, ",{},{}", v.re, v.im)?
                    }
                    FieldChannel::Vector3(_, f) => {
                        let v = f.get(i, j);
                        write!(out, ",{},{},{}", v.x, v.y, v.z)?
                    }
                }
            }
            writeln!(out)?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Loads all channels of `<base>.csv`/`<base>.json` as scalar fields in
/// header order, together with the example tag when present.
pub fn load_scalar_fields(base: &Path) -> Result<(Vec<(String, Field<f64>)>, Option<String>)> {
    let json = std::fs::read_to_string(base.with_extension("json"))?;
    let header: Header =
        serde_json::from_str(&json).map_err(|e| Error::Parse(format!("header: {e}")))?;
    let grid = ComplexGrid::new(
        header.grid.x0,
        header.grid.y0,
        header.grid.hx,
        header.grid.hy,
        header.grid.nx,
        header.grid.ny,
        header.grid.periodic_x,
        header.grid.periodic_y,
    )?;

    let csv = std::fs::read_to_string(base.with_extension("csv"))?;
    let mut lines = csv.lines();
    let first = lines.next().ok_or_else(|| Error::Parse("empty csv".into()))?;
    let cols: Vec<&str> = first.split(',').collect();
    if cols.len() != 4 + header.channels.len() {
        return Err(Error::Parse(format!(
            "csv has {} columns, header describes {}",
            cols.len(),
            4 + header.channels.len()
        )));
    }

    let mut fields: Vec<Field<f64>> =
        header.channels.iter().map(|_| Field::zeros(grid)).collect();
    let mut seen = 0usize;
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let i: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse("bad i column".into()))?;
        let j: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse("bad j column".into()))?;
        if i >= grid.nx || j >= grid.ny {
            return Err(Error::Parse(format!("node ({i},{j}) outside grid")));
        }
        parts.next();
        parts.next(); // x, y are redundant with the header
        for field in fields.iter_mut() {
            let v: f64 = parts
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Parse("bad value column".into()))?;
            field.set(i, j, v);
        }
        seen += 1;
    }
    if seen != grid.node_count() {
        return Err(Error::Parse(format!("csv rows {seen} != node count {}", grid.node_count())));
    }
    Ok((header.channels.into_iter().zip(fields).collect(), header.example))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_fields() {
        let dir = std::env::temp_dir().join("minsurf_io_test");
        std::fs::create_dir_all(&dir).unwrap();
        let base = dir.join("field");
        let g = ComplexGrid::centered_square(1.0, 6).unwrap();
        let a = Field::from_fn(g, |i, j| g.x(i) + 2.0 * g.y(j));
        let c = Field::from_fn(g, |i, j| Complex64::new(i as f64, j as f64));
        save_fields(
            &base,
            &[FieldChannel::Real("u", &a), FieldChannel::Complex("theta", &c)],
            Some("unit-test"),
        )
        .unwrap();
        let (channels, example) = load_scalar_fields(&base).unwrap();
        assert_eq!(example.as_deref(), Some("unit-test"));
        assert_eq!(channels.len(), 3);
        assert_eq!(channels[0].0, "u");
        assert_eq!(channels[0].1, a);
        assert_eq!(channels[2].0, "theta_im");
        assert_eq!(channels[2].1.get(3, 4), 4.0);
    }
}
