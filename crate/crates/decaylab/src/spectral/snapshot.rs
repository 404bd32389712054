//! Versioned textual snapshot of a spectral field.
//!
//! Layout (one item per line, floats in shortest round-trip decimal form):
//!
//! ```text
//! decaylab-field <version>
//! dim <n>
//! points_per_axis <N>
//! box_length <L>
//! dealias_fraction <f>
//! components <c>
//! <re> <im>          # lattice order, component 0 first
//! ...
//! ```

use std::io::{BufRead, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};

use super::field::SpectralField;
use super::grid::GridSpec;

pub const SNAPSHOT_VERSION: u32 = 1;
const MAGIC: &str = "decaylab-field";

pub fn write_snapshot(field: &SpectralField, mut w: impl Write) -> Result<()> {
    let g = field.grid();
    writeln!(w, "{MAGIC} {SNAPSHOT_VERSION}")?;
    writeln!(w, "dim {}", g.dim())?;
    writeln!(w, "points_per_axis {}", g.points_per_axis())?;
    writeln!(w, "box_length {}", g.box_length())?;
    writeln!(w, "dealias_fraction {}", g.dealias_fraction())?;
    writeln!(w, "components {}", field.num_components())?;
    for c in 0..field.num_components() {
        for v in field.component(c) {
            writeln!(w, "{} {}", v.re, v.im)?;
        }
    }
    Ok(())
}

pub fn read_snapshot(r: impl BufRead) -> Result<SpectralField> {
    let mut lines = r.lines();
    let mut next_line = || -> Result<String> {
        lines
            .next()
            .ok_or_else(|| Error::SnapshotFormat("unexpected end of file".into()))?
            .map_err(Error::Io)
    };

    let header = next_line()?;
    let mut parts = header.split_whitespace();
    if parts.next() != Some(MAGIC) {
        return Err(Error::SnapshotFormat("missing magic header".into()));
    }
    let version: u32 = parse(parts.next(), "version")?;
    if version != SNAPSHOT_VERSION {
        return Err(Error::SnapshotFormat(format!(
            "unsupported snapshot version {version}, expected {SNAPSHOT_VERSION}"
        )));
    }

    let dim: usize = parse_kv(&next_line()?, "dim")?;
    let n: usize = parse_kv(&next_line()?, "points_per_axis")?;
    let length: f64 = parse_kv(&next_line()?, "box_length")?;
    let frac: f64 = parse_kv(&next_line()?, "dealias_fraction")?;
    let components: usize = parse_kv(&next_line()?, "components")?;
    let grid = GridSpec::with_dealias(dim, n, length, frac)?;

    let mut data = Vec::with_capacity(components);
    for _ in 0..components {
        let mut comp = Vec::with_capacity(grid.lattice_len());
        for _ in 0..grid.lattice_len() {
            let line = next_line()?;
            let mut nums = line.split_whitespace();
            let re: f64 = parse(nums.next(), "re")?;
            let im: f64 = parse(nums.next(), "im")?;
            comp.push(Complex64::new(re, im));
        }
        data.push(comp);
    }
    SpectralField::new(grid, data)
}

fn parse<T: std::str::FromStr>(tok: Option<&str>, what: &str) -> Result<T> {
    tok.ok_or_else(|| Error::SnapshotFormat(format!("missing {what}")))?
        .parse()
        .map_err(|_| Error::SnapshotFormat(format!("malformed {what}")))
}

fn parse_kv<T: std::str::FromStr>(line: &str, key: &str) -> Result<T> {
    let mut parts = line.split_whitespace();
    if parts.next() != Some(key) {
        return Err(Error::SnapshotFormat(format!("expected key `{key}`")));
    }
    parse(parts.next(), key)
}
