//! Evolution operators: the transverse group S_a(t) through Hankel
//! diagonalization, the tangential free propagator S(t) as a Fourier
//! multiplier, their tensor composition, a direct kernel-quadrature path
//! used as an oracle, and the adjoint operator tying space-time data back
//! to initial values.

use crate::error::{CoreError, Result};
use crate::field::{HalfSpaceField, SpaceTimeField};
use crate::grid::{CartesianGrid, WeightedRadialGrid};
use crate::kernels::kernel_sa;
use crate::transforms::{FourierX, HankelTransform};
use ndarray::Array1;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Shared evolution machinery for one (a, d, grids) configuration.
#[derive(Debug, Clone)]
pub struct Propagator {
    a: f64,
    xplan: FourierX,
    hankel: HankelTransform,
}

impl Propagator {
    pub fn new(a: f64, xgrid: CartesianGrid, hankel: HankelTransform) -> Result<Self> {
        if (hankel.a() - a).abs() > 1e-14 {
            return Err(CoreError::mismatch(format!(
                "propagator: transform built for a = {}, requested {a}",
                hankel.a()
            )));
        }
        Ok(Propagator {
            a,
            xplan: FourierX::new(xgrid),
            hankel,
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn d(&self) -> usize {
        self.xplan.grid().d()
    }
    pub fn xgrid(&self) -> &CartesianGrid {
        self.xplan.grid()
    }
    pub fn zgrid(&self) -> &WeightedRadialGrid {
        self.hankel.grid()
    }
    pub fn hankel(&self) -> &HankelTransform {
        &self.hankel
    }

    /// Transverse evolution S_a(t) phi = H (e^{-i t zeta^2} H phi).
    pub fn propagate_z(&self, t: f64, phi: &[C64]) -> Result<Vec<C64>> {
        if t == 0.0 {
            return Ok(phi.to_vec());
        }
        let spec = self.hankel.apply(phi)?;
        let nodes = self.hankel.grid().nodes();
        let shifted: Vec<C64> = spec
            .iter()
            .zip(nodes)
            .map(|(s, &zeta)| s * C64::from_polar(1.0, -t * zeta * zeta))
            .collect();
        self.hankel.apply(&shifted)
    }

    /// Value of S_a(t) phi at z = 0 (through the band-limited interpolant
    /// when t = 0).
    pub fn propagate_z_at_zero(&self, t: f64, phi: &[C64]) -> Result<C64> {
        let spec = self.hankel.apply(phi)?;
        let nodes = self.hankel.grid().nodes();
        let shifted: Vec<C64> = spec
            .iter()
            .zip(nodes)
            .map(|(s, &zeta)| s * C64::from_polar(1.0, -t * zeta * zeta))
            .collect();
        self.hankel.apply_at_zero(&shifted)
    }

    /// Tangential evolution: multiplier e^{-4 pi^2 i t |xi|^2} on a flat
    /// x vector, in place.
    pub fn propagate_x_flat(&self, t: f64, data: &mut [C64]) {
        if t == 0.0 {
            return;
        }
        self.xplan
            .multiplier_flat(data, |xi2| C64::from_polar(1.0, -4.0 * PI * PI * t * xi2));
    }

    /// Full propagator: S(t) along x tensored with S_a(t) along z, with the
    /// z = 0 boundary layer evaluated spectrally.
    pub fn apply(&self, t: f64, u0: &HalfSpaceField) -> Result<HalfSpaceField> {
        self.check_field(u0)?;
        let nx = u0.xgrid.total();
        let nz = u0.zgrid.len();
        let mut out = u0.clone();
        // x step, one flat vector per z node
        let mut columns: Vec<Vec<C64>> = (0..nz)
            .map(|iz| out.values.column(iz).to_vec())
            .collect();
        columns.par_iter_mut().for_each(|col| {
            self.propagate_x_flat(t, col);
        });
        for (iz, col) in columns.iter().enumerate() {
            for ix in 0..nx {
                out.values[(ix, iz)] = col[ix];
            }
        }
        // z step per x point, collecting the boundary value on the way
        let nodes = self.hankel.grid().nodes();
        let rows: Vec<(Vec<C64>, C64)> = (0..nx)
            .into_par_iter()
            .map(|ix| {
                let row: Vec<C64> = (0..nz).map(|iz| out.values[(ix, iz)]).collect();
                let spec = self.hankel.apply(&row).expect("grid sizes match");
                let shifted: Vec<C64> = spec
                    .iter()
                    .zip(nodes)
                    .map(|(s, &zeta)| s * C64::from_polar(1.0, -t * zeta * zeta))
                    .collect();
                let bdry = self
                    .hankel
                    .apply_at_zero(&shifted)
                    .expect("grid sizes match");
                let evolved = self.hankel.apply(&shifted).expect("grid sizes match");
                (evolved, bdry)
            })
            .collect();
        let mut boundary = Array1::zeros(nx);
        for (ix, (row, bdry)) in rows.into_iter().enumerate() {
            for iz in 0..nz {
                out.values[(ix, iz)] = row[iz];
            }
            boundary[ix] = bdry;
        }
        out.boundary = Some(boundary);
        Ok(out)
    }

    /// Adjoint operator T_a(F) = int_0^T S_a(-t) F(., t) dt, trapezoid in t.
    pub fn adjoint_t(&self, f: &SpaceTimeField) -> Result<HalfSpaceField> {
        self.check_spacetime(f)?;
        let tw = f.tgrid.trapezoid_weights();
        let slices: Vec<HalfSpaceField> = (0..f.tgrid.len())
            .into_par_iter()
            .map(|jt| {
                let slice = f.slice_t(jt);
                self.apply(-f.tgrid.node(jt), &slice)
            })
            .collect::<Result<_>>()?;
        let mut acc = HalfSpaceField::zeros(f.a, f.xgrid.clone(), f.zgrid.clone());
        acc.boundary = Some(Array1::zeros(f.xgrid.total()));
        for (jt, mut s) in slices.into_iter().enumerate() {
            s.scale(C64::new(tw[jt], 0.0));
            acc.add_assign(&s);
        }
        Ok(acc)
    }

    /// Map (x, z) values into (xi, zeta) spectral space: Fourier along x,
    /// Hankel along z.
    pub fn spectral_forward(&self, values: &ndarray::Array2<C64>) -> Result<ndarray::Array2<C64>> {
        let nx = self.xgrid().total();
        let nz = self.hankel.len();
        if values.dim() != (nx, nz) {
            return Err(CoreError::mismatch("spectral_forward: shape"));
        }
        let mut out = values.clone();
        let mut cols: Vec<Vec<C64>> = (0..nz).map(|iz| out.column(iz).to_vec()).collect();
        cols.par_iter_mut().for_each(|col| {
            self.xplan
                .transform_flat(col, crate::transforms::FourierDirection::Forward);
        });
        for (iz, col) in cols.iter().enumerate() {
            for ix in 0..nx {
                out[(ix, iz)] = col[ix];
            }
        }
        let rows: Vec<Vec<C64>> = (0..nx)
            .into_par_iter()
            .map(|ix| {
                let row: Vec<C64> = (0..nz).map(|iz| out[(ix, iz)]).collect();
                self.hankel.apply(&row).expect("sizes match")
            })
            .collect();
        for (ix, row) in rows.into_iter().enumerate() {
            for iz in 0..nz {
                out[(ix, iz)] = row[iz];
            }
        }
        Ok(out)
    }

    /// Inverse of [`Propagator::spectral_forward`], also returning the z = 0
    /// boundary layer extracted from the zeta spectrum.
    pub fn spectral_inverse(
        &self,
        spec: &ndarray::Array2<C64>,
    ) -> Result<(ndarray::Array2<C64>, Array1<C64>)> {
        let nx = self.xgrid().total();
        let nz = self.hankel.len();
        if spec.dim() != (nx, nz) {
            return Err(CoreError::mismatch("spectral_inverse: shape"));
        }
        // boundary: evaluate the zeta spectrum at z = 0 per x frequency,
        // then bring it back to physical x
        let mut bdry: Vec<C64> = (0..nx)
            .map(|ix| {
                let row: Vec<C64> = (0..nz).map(|iz| spec[(ix, iz)]).collect();
                self.hankel.apply_at_zero(&row).expect("sizes match")
            })
            .collect();
        self.xplan
            .transform_flat(&mut bdry, crate::transforms::FourierDirection::Inverse);
        let mut out = spec.clone();
        let rows: Vec<Vec<C64>> = (0..nx)
            .into_par_iter()
            .map(|ix| {
                let row: Vec<C64> = (0..nz).map(|iz| out[(ix, iz)]).collect();
                self.hankel.apply(&row).expect("sizes match")
            })
            .collect();
        for (ix, row) in rows.into_iter().enumerate() {
            for iz in 0..nz {
                out[(ix, iz)] = row[iz];
            }
        }
        let mut cols: Vec<Vec<C64>> = (0..nz).map(|iz| out.column(iz).to_vec()).collect();
        cols.par_iter_mut().for_each(|col| {
            self.xplan
                .transform_flat(col, crate::transforms::FourierDirection::Inverse);
        });
        for (iz, col) in cols.iter().enumerate() {
            for ix in 0..nx {
                out[(ix, iz)] = col[ix];
            }
        }
        Ok((out, Array1::from_vec(bdry)))
    }

    /// Evolution phase e^{-i t (4 pi^2 |xi|^2 + zeta^2)} applied in spectral
    /// space, in place.
    pub fn spectral_phase(&self, t: f64, spec: &mut ndarray::Array2<C64>) {
        if t == 0.0 {
            return;
        }
        let nodes = self.hankel.grid().nodes();
        for ix in 0..self.xgrid().total() {
            let xi2 = self.xgrid().freq_norm_sqr(ix);
            for (iz, &zeta) in nodes.iter().enumerate() {
                let phase = -t * (4.0 * PI * PI * xi2 + zeta * zeta);
                spec[(ix, iz)] *= C64::from_polar(1.0, phase);
            }
        }
    }

    fn check_field(&self, u: &HalfSpaceField) -> Result<()> {
        if (u.a - self.a).abs() > 1e-14 {
            return Err(CoreError::mismatch("propagator: field a mismatch"));
        }
        if u.xgrid != *self.xplan.grid() || !u.zgrid.compatible(self.hankel.grid()) {
            return Err(CoreError::mismatch("propagator: field grids mismatch"));
        }
        Ok(())
    }

    fn check_spacetime(&self, u: &SpaceTimeField) -> Result<()> {
        if (u.a - self.a).abs() > 1e-14 {
            return Err(CoreError::mismatch("propagator: field a mismatch"));
        }
        if u.xgrid != *self.xplan.grid() || !u.zgrid.compatible(self.hankel.grid()) {
            return Err(CoreError::mismatch("propagator: field grids mismatch"));
        }
        Ok(())
    }
}

/// Direct kernel-quadrature path:
/// (S_a(t) phi)(z*) = sum_k S_a(z*, zeta_k, t) phi_k w_k
/// for arbitrary evaluation points z*. Serves as the independent oracle for
/// the spectral path and for near-boundary diagnostics; the source grid must
/// resolve the kernel oscillation at the requested time.
pub fn propagate_z_kernel(
    a: f64,
    t: f64,
    src: &WeightedRadialGrid,
    phi: &[C64],
    targets: &[f64],
) -> Result<Vec<C64>> {
    if t == 0.0 {
        return Err(CoreError::domain(
            "propagate_z_kernel: kernel is singular at t = 0; use the spectral path",
        ));
    }
    if phi.len() != src.len() {
        return Err(CoreError::mismatch("propagate_z_kernel: sample count"));
    }
    if (src.a() - a).abs() > 1e-14 {
        return Err(CoreError::mismatch("propagate_z_kernel: grid a mismatch"));
    }
    targets
        .par_iter()
        .map(|&zt| {
            let mut acc = C64::new(0.0, 0.0);
            for ((&zeta, &w), &ph) in src.nodes().iter().zip(src.weights()).zip(phi) {
                acc += kernel_sa(a, zt, zeta, t)? * ph * w;
            }
            Ok(acc)
        })
        .collect()
}

/// Closed-form transverse evolution of the Gaussian e^{-z^2/4}:
/// (1 + i t)^{-(a+1)/2} e^{-z^2 / (4 (1 + i t))} on the principal branch
/// continuous from t = 0. Exposed for tests and the verification harness.
pub fn gaussian_evolution(a: f64, t: f64, z: f64) -> C64 {
    let q = C64::new(1.0, t);
    q.powc(C64::new(-0.5 * (a + 1.0), 0.0)) * (-(z * z) / (4.0 * q)).exp()
}
