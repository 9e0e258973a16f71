//! Field snapshot files.
//!
//! Binary layout (little-endian): `dim: u32, n: u32, L: f64, ncomp: u32`,
//! then `ncomp * n^dim` `f64` values, component-major and row-major within a
//! component. The CSV form carries the same header as `dim=..,n=..,length=..,ncomp=..`
//! on its first line, then one value per line.

use std::io::{self, BufRead, Read, Write};

use thiserror::Error;

use crate::grid::{Grid, GridError, ScalarField, VectorField};

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("malformed snapshot: {0}")]
    Format(String),
}

/// Raw field data as stored on disk.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldData {
    pub grid: Grid,
    pub ncomp: usize,
    pub values: Vec<f64>,
}

impl From<&ScalarField> for FieldData {
    fn from(f: &ScalarField) -> Self {
        Self {
            grid: *f.grid(),
            ncomp: 1,
            values: f.values().to_vec(),
        }
    }
}

impl From<&VectorField> for FieldData {
    fn from(v: &VectorField) -> Self {
        Self {
            grid: *v.grid(),
            ncomp: v.grid().dim(),
            values: v.values().to_vec(),
        }
    }
}

impl FieldData {
    fn check(&self) -> Result<(), SnapshotError> {
        let expected = self.ncomp * self.grid.cells();
        if self.values.len() != expected {
            return Err(GridError::Length {
                expected,
                got: self.values.len(),
            }
            .into());
        }
        Ok(())
    }

    pub fn to_scalar(&self) -> Result<ScalarField, SnapshotError> {
        if self.ncomp != 1 {
            return Err(SnapshotError::Format(format!(
                "expected 1 component, found {}",
                self.ncomp
            )));
        }
        Ok(ScalarField::new(self.grid, self.values.clone())?)
    }

    pub fn to_vector(&self) -> Result<VectorField, SnapshotError> {
        Ok(VectorField::new(self.grid, self.values.clone())?)
    }
}

pub fn write_binary<W: Write>(mut w: W, data: &FieldData) -> Result<(), SnapshotError> {
    data.check()?;
    w.write_all(&(data.grid.dim() as u32).to_le_bytes())?;
    w.write_all(&(data.grid.n() as u32).to_le_bytes())?;
    w.write_all(&data.grid.length().to_le_bytes())?;
    w.write_all(&(data.ncomp as u32).to_le_bytes())?;
    for v in &data.values {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

fn read_u32<R: Read>(r: &mut R) -> io::Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> io::Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

pub fn read_binary<R: Read>(mut r: R) -> Result<FieldData, SnapshotError> {
    let dim = read_u32(&mut r)? as usize;
    let n = read_u32(&mut r)? as usize;
    let length = read_f64(&mut r)?;
    let ncomp = read_u32(&mut r)? as usize;
    let grid = Grid::new(dim, n, length)?;
    let count = ncomp * grid.cells();
    let mut values = Vec::with_capacity(count);
    for _ in 0..count {
        values.push(read_f64(&mut r)?);
    }
    let mut rest = Vec::new();
    r.read_to_end(&mut rest)?;
    if !rest.is_empty() {
        return Err(SnapshotError::Format(format!(
            "{} trailing bytes",
            rest.len()
        )));
    }
    Ok(FieldData { grid, ncomp, values })
}

pub fn write_csv<W: Write>(mut w: W, data: &FieldData) -> Result<(), SnapshotError> {
    data.check()?;
    writeln!(
        w,
        "dim={},n={},length={:?},ncomp={}",
        data.grid.dim(),
        data.grid.n(),
        data.grid.length(),
        data.ncomp
    )?;
    for v in &data.values {
        writeln!(w, "{v:?}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: BufRead>(r: R) -> Result<FieldData, SnapshotError> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| SnapshotError::Format("empty file".into()))??;
    let (mut dim, mut n, mut length, mut ncomp) = (None, None, None, None);
    for part in header.trim().split(',') {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| SnapshotError::Format(format!("bad header entry `{part}`")))?;
        let bad = || SnapshotError::Format(format!("bad header value `{part}`"));
        match key.trim() {
            "dim" => dim = Some(value.trim().parse::<usize>().map_err(|_| bad())?),
            "n" => n = Some(value.trim().parse::<usize>().map_err(|_| bad())?),
            "length" => length = Some(value.trim().parse::<f64>().map_err(|_| bad())?),
            "ncomp" => ncomp = Some(value.trim().parse::<usize>().map_err(|_| bad())?),
            other => return Err(SnapshotError::Format(format!("unknown header key `{other}`"))),
        }
    }
    let missing = |k: &str| SnapshotError::Format(format!("header lacks `{k}`"));
    let grid = Grid::new(
        dim.ok_or_else(|| missing("dim"))?,
        n.ok_or_else(|| missing("n"))?,
        length.ok_or_else(|| missing("length"))?,
    )?;
    let ncomp = ncomp.ok_or_else(|| missing("ncomp"))?;
    let mut values = Vec::with_capacity(ncomp * grid.cells());
    for line in lines {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        values.push(
            t.parse::<f64>()
                .map_err(|_| SnapshotError::Format(format!("bad value `{t}`")))?,
        );
    }
    let data = FieldData { grid, ncomp, values };
    data.check()?;
    Ok(data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn binary_header_layout() {
        let g = Grid::new(1, 8, 2.5).unwrap();
        let f = ScalarField::from_fn(g, |x| x[0]);
        let mut buf = Vec::new();
        write_binary(&mut buf, &FieldData::from(&f)).unwrap();
        assert_eq!(buf.len(), 4 + 4 + 8 + 4 + 8 * 8);
        assert_eq!(&buf[0..4], &1u32.to_le_bytes());
        assert_eq!(&buf[4..8], &8u32.to_le_bytes());
        assert_eq!(&buf[8..16], &2.5f64.to_le_bytes());
        assert_eq!(&buf[16..20], &1u32.to_le_bytes());
        assert_eq!(&buf[20..28], &f.values()[0].to_le_bytes());
    }

    #[test]
    fn truncated_binary_is_rejected() {
        let g = Grid::new(1, 8, 1.0).unwrap();
        let mut buf = Vec::new();
        write_binary(&mut buf, &FieldData::from(&ScalarField::zeros(g))).unwrap();
        buf.pop();
        assert!(read_binary(&buf[..]).is_err());
    }

    #[test]
    fn csv_rejects_unknown_header() {
        let text = "dim=1,n=8,length=1.0,ncomp=1,extra=2\n";
        assert!(matches!(read_csv(text.as_bytes()), Err(SnapshotError::Format(_))));
    }

    proptest! {
        #[test]
        fn both_formats_round_trip(vals in prop::collection::vec(-1e6f64..1e6, 2 * 64)) {
            let g = Grid::new(2, 8, 1.25).unwrap();
            let v = VectorField::new(g, vals).unwrap();
            let data = FieldData::from(&v);
            let mut bin = Vec::new();
            write_binary(&mut bin, &data).unwrap();
            prop_assert_eq!(&read_binary(&bin[..]).unwrap(), &data);
            let mut csv = Vec::new();
            write_csv(&mut csv, &data).unwrap();
            prop_assert_eq!(&read_csv(&csv[..]).unwrap(), &data);
        }
    }
}
