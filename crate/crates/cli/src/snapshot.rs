//! Field snapshot binary format.
//!
//! Layout: magic "BSNS" (4 bytes), version as u32 LE, then d, Nx, Nz, Nt as
//! u32 LE, then a, Xmax, Zmax, T as f64 LE, then the values as interleaved
//! (re, im) f64 LE, x fastest, then z, then t. A sidecar JSON manifest
//! records the grids and provenance.

use bsns_core::field::SpaceTimeField;
use bsns_core::{CoreError, Result};
use num_complex::Complex64 as C64;
use std::io::{Read, Write};
use std::path::Path;

pub const MAGIC: &[u8; 4] = b"BSNS";
pub const VERSION: u32 = 1;

pub struct SnapshotHeader {
    pub d: u32,
    pub nx: u32,
    pub nz: u32,
    pub nt: u32,
    pub a: f64,
    pub xmax: f64,
    pub zmax: f64,
    pub t_max: f64,
}

pub fn write_snapshot(path: &Path, field: &SpaceTimeField) -> std::io::Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    out.write_all(MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    for v in [
        field.xgrid.d() as u32,
        field.xgrid.nx() as u32,
        field.zgrid.len() as u32,
        field.tgrid.len() as u32,
    ] {
        out.write_all(&v.to_le_bytes())?;
    }
    for v in [
        field.a,
        field.xgrid.xmax(),
        field.zgrid.zmax(),
        field.tgrid.t_max(),
    ] {
        out.write_all(&v.to_le_bytes())?;
    }
    // x fastest, then z, then t
    for jt in 0..field.tgrid.len() {
        for iz in 0..field.zgrid.len() {
            for ix in 0..field.xgrid.total() {
                let v = field.values[(ix, iz, jt)];
                out.write_all(&v.re.to_le_bytes())?;
                out.write_all(&v.im.to_le_bytes())?;
            }
        }
    }
    out.flush()
}

pub fn read_header(path: &Path) -> Result<SnapshotHeader> {
    let mut f = std::io::BufReader::new(
        std::fs::File::open(path)
            .map_err(|e| CoreError::Domain(format!("snapshot open {path:?}: {e}")))?,
    );
    let mut magic = [0u8; 4];
    f.read_exact(&mut magic)
        .map_err(|e| CoreError::Domain(format!("snapshot read: {e}")))?;
    if &magic != MAGIC {
        return Err(CoreError::Domain("snapshot: bad magic".into()));
    }
    let mut u32buf = [0u8; 4];
    let mut read_u32 = |f: &mut dyn Read| -> Result<u32> {
        f.read_exact(&mut u32buf)
            .map_err(|e| CoreError::Domain(format!("snapshot read: {e}")))?;
        Ok(u32::from_le_bytes(u32buf))
    };
    let version = read_u32(&mut f)?;
    if version != VERSION {
        return Err(CoreError::Domain(format!(
            "snapshot: unsupported version {version}"
        )));
    }
    let d = read_u32(&mut f)?;
    let nx = read_u32(&mut f)?;
    let nz = read_u32(&mut f)?;
    let nt = read_u32(&mut f)?;
    let mut f64buf = [0u8; 8];
    let mut read_f64 = |f: &mut dyn Read| -> Result<f64> {
        f.read_exact(&mut f64buf)
            .map_err(|e| CoreError::Domain(format!("snapshot read: {e}")))?;
        Ok(f64::from_le_bytes(f64buf))
    };
    let a = read_f64(&mut f)?;
    let xmax = read_f64(&mut f)?;
    let zmax = read_f64(&mut f)?;
    let t_max = read_f64(&mut f)?;
    Ok(SnapshotHeader {
        d,
        nx,
        nz,
        nt,
        a,
        xmax,
        zmax,
        t_max,
    })
}

/// Read the first time slice of a snapshot as initial-datum values,
/// validating the header against the expected grid shape.
pub fn read_slice0(
    path: &Path,
    d: usize,
    nx: usize,
    nz: usize,
) -> Result<ndarray::Array2<C64>> {
    let header = read_header(path)?;
    if header.d as usize != d || header.nx as usize != nx || header.nz as usize != nz {
        return Err(CoreError::GridMismatch(format!(
            "snapshot {path:?}: shape ({}, {}, {}) does not match configured ({d}, {nx}, {nz})",
            header.d, header.nx, header.nz
        )));
    }
    if header.nt < 1
        || !header.a.is_finite()
        || !(header.xmax > 0.0 && header.zmax > 0.0 && header.t_max > 0.0)
    {
        return Err(CoreError::Domain(format!(
            "snapshot {path:?}: degenerate header"
        )));
    }
    let mut f = std::io::BufReader::new(
        std::fs::File::open(path)
            .map_err(|e| CoreError::Domain(format!("snapshot open {path:?}: {e}")))?,
    );
    let header_len = 4 + 4 + 4 * 4 + 4 * 8;
    std::io::copy(
        &mut f.by_ref().take(header_len as u64),
        &mut std::io::sink(),
    )
    .map_err(|e| CoreError::Domain(format!("snapshot read: {e}")))?;
    let total = nx.pow(d as u32) * nz;
    let mut values = ndarray::Array2::zeros((nx.pow(d as u32), nz));
    let mut buf = [0u8; 16];
    for i in 0..total {
        f.read_exact(&mut buf)
            .map_err(|e| CoreError::Domain(format!("snapshot read: {e}")))?;
        let re = f64::from_le_bytes(buf[0..8].try_into().unwrap());
        let im = f64::from_le_bytes(buf[8..16].try_into().unwrap());
        // x fastest within the slice
        let ix = i % nx.pow(d as u32);
        let iz = i / nx.pow(d as u32);
        values[(ix, iz)] = C64::new(re, im);
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use bsns_core::grid::{build_radial_grid, CartesianGrid, RadialScheme, TimeGrid};

    #[test]
    fn round_trip_header_and_slice() {
        let xg = CartesianGrid::new(1, 2.0, 8).unwrap();
        let zg = build_radial_grid(0.5, 3.0, 12, RadialScheme::GaussJacobi).unwrap();
        let tg = TimeGrid::new(1.0, 4).unwrap();
        let f = SpaceTimeField::from_fn(0.5, xg, zg, tg, |x, z, t| {
            C64::new(x[0] + z, t - 0.3)
        });
        let dir = std::env::temp_dir().join("bsns_snapshot_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("u.bsns");
        write_snapshot(&path, &f).unwrap();
        let h = read_header(&path).unwrap();
        assert_eq!((h.d, h.nx, h.nz, h.nt), (1, 8, 12, 5));
        assert_eq!(h.a, 0.5);
        let s0 = read_slice0(&path, 1, 8, 12).unwrap();
        for ix in 0..8 {
            for iz in 0..12 {
                assert_eq!(s0[(ix, iz)], f.values[(ix, iz, 0)]);
            }
        }
        std::fs::remove_dir_all(&dir).ok();
    }
}
