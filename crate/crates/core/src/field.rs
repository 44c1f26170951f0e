//! Field containers: complex values on (x, z), (x, z, t) and (x, t) grids.
//!
//! The x direction is stored flattened (row-major over the d axes). Fields
//! produced by the propagators carry an optional z = 0 boundary layer,
//! evaluated directly through the boundary kernels rather than by
//! extrapolation.

use crate::error::{CoreError, Result};
use crate::grid::{CartesianGrid, TimeGrid, WeightedRadialGrid};
use ndarray::{Array1, Array2, Array3};
use num_complex::Complex64 as C64;

/// Complex values on (x-grid x z-grid) at one time.
#[derive(Debug, Clone)]
pub struct HalfSpaceField {
    pub a: f64,
    pub xgrid: CartesianGrid,
    pub zgrid: WeightedRadialGrid,
    /// Indexed (x-flat, z-node).
    pub values: Array2<C64>,
    /// Optional z = 0 layer, indexed by x-flat.
    pub boundary: Option<Array1<C64>>,
}

impl HalfSpaceField {
    pub fn zeros(a: f64, xgrid: CartesianGrid, zgrid: WeightedRadialGrid) -> Self {
        let values = Array2::zeros((xgrid.total(), zgrid.len()));
        HalfSpaceField {
            a,
            xgrid,
            zgrid,
            values,
            boundary: None,
        }
    }

    /// Sample a function of (x, z).
    pub fn from_fn(
        a: f64,
        xgrid: CartesianGrid,
        zgrid: WeightedRadialGrid,
        mut f: impl FnMut(&[f64], f64) -> C64,
    ) -> Self {
        let mut field = Self::zeros(a, xgrid, zgrid);
        for ix in 0..field.xgrid.total() {
            let x = field.xgrid.point(ix);
            for (iz, &z) in field.zgrid.nodes().iter().enumerate() {
                field.values[(ix, iz)] = f(&x, z);
            }
        }
        field.boundary = Some(Array1::from_iter(
            (0..field.xgrid.total()).map(|ix| f(&field.xgrid.point(ix), 0.0)),
        ));
        field
    }

    pub fn check_finite(&self) -> Result<()> {
        if self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            Ok(())
        } else {
            Err(CoreError::numerical("field contains non-finite values"))
        }
    }

    /// Discrete L^2_a norm over the half-space.
    pub fn norm_l2a(&self) -> f64 {
        let vol = self.xgrid.cell_volume();
        let mut acc = 0.0;
        for (iz, &w) in self.zgrid.weights().iter().enumerate() {
            let col = self.values.column(iz);
            acc += w * col.iter().map(|v| v.norm_sqr()).sum::<f64>();
        }
        (acc * vol).sqrt()
    }

    /// Weighted inner product <self, other> with measure z^a dx dz.
    pub fn inner(&self, other: &Self) -> C64 {
        let vol = self.xgrid.cell_volume();
        let mut acc = C64::new(0.0, 0.0);
        for (iz, &w) in self.zgrid.weights().iter().enumerate() {
            let u = self.values.column(iz);
            let v = other.values.column(iz);
            acc += w * u
                .iter()
                .zip(v.iter())
                .map(|(a, b)| a * b.conj())
                .sum::<C64>();
        }
        acc * vol
    }

    pub fn scale(&mut self, c: C64) {
        self.values.mapv_inplace(|v| v * c);
        if let Some(b) = &mut self.boundary {
            b.mapv_inplace(|v| v * c);
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        self.values += &other.values;
        match (&mut self.boundary, &other.boundary) {
            (Some(b), Some(ob)) => *b += ob,
            (b @ Some(_), None) => *b = None,
            _ => {}
        }
    }
}

/// Complex values on (x-grid x z-grid x t-grid).
#[derive(Debug, Clone)]
pub struct SpaceTimeField {
    pub a: f64,
    pub xgrid: CartesianGrid,
    pub zgrid: WeightedRadialGrid,
    pub tgrid: TimeGrid,
    /// Indexed (x-flat, z-node, t-node).
    pub values: Array3<C64>,
    /// Optional z = 0 layer, indexed (x-flat, t-node).
    pub boundary: Option<Array2<C64>>,
}

impl SpaceTimeField {
    pub fn zeros(
        a: f64,
        xgrid: CartesianGrid,
        zgrid: WeightedRadialGrid,
        tgrid: TimeGrid,
    ) -> Self {
        let values = Array3::zeros((xgrid.total(), zgrid.len(), tgrid.len()));
        SpaceTimeField {
            a,
            xgrid,
            zgrid,
            tgrid,
            values,
            boundary: None,
        }
    }

    pub fn from_fn(
        a: f64,
        xgrid: CartesianGrid,
        zgrid: WeightedRadialGrid,
        tgrid: TimeGrid,
        mut f: impl FnMut(&[f64], f64, f64) -> C64,
    ) -> Self {
        let mut field = Self::zeros(a, xgrid, zgrid, tgrid);
        let mut boundary = Array2::zeros((field.xgrid.total(), field.tgrid.len()));
        for ix in 0..field.xgrid.total() {
            let x = field.xgrid.point(ix);
            for jt in 0..field.tgrid.len() {
                let t = field.tgrid.node(jt);
                for (iz, &z) in field.zgrid.nodes().iter().enumerate() {
                    field.values[(ix, iz, jt)] = f(&x, z, t);
                }
                boundary[(ix, jt)] = f(&x, 0.0, t);
            }
        }
        field.boundary = Some(boundary);
        field
    }

    /// One time slice as a half-space field (boundary layer carried along).
    pub fn slice_t(&self, jt: usize) -> HalfSpaceField {
        let values = self
            .values
            .slice(ndarray::s![.., .., jt])
            .to_owned();
        HalfSpaceField {
            a: self.a,
            xgrid: self.xgrid.clone(),
            zgrid: self.zgrid.clone(),
            values,
            boundary: self
                .boundary
                .as_ref()
                .map(|b| b.column(jt).to_owned()),
        }
    }

    pub fn set_slice_t(&mut self, jt: usize, slice: &HalfSpaceField) {
        self.values
            .slice_mut(ndarray::s![.., .., jt])
            .assign(&slice.values);
        if let (Some(b), Some(sb)) = (&mut self.boundary, &slice.boundary) {
            b.column_mut(jt).assign(sb);
        }
    }

    /// Mass profile ||U(., t_j)||_{L^2_a}^2 over the time nodes.
    pub fn mass_profile(&self) -> Vec<f64> {
        let vol = self.xgrid.cell_volume();
        (0..self.tgrid.len())
            .map(|jt| {
                let mut acc = 0.0;
                for (iz, &w) in self.zgrid.weights().iter().enumerate() {
                    acc += w
                        * self
                            .values
                            .slice(ndarray::s![.., iz, jt])
                            .iter()
                            .map(|v| v.norm_sqr())
                            .sum::<f64>();
                }
                acc * vol
            })
            .collect()
    }

    /// Space-time inner product <self, other> with measure z^a dx dz and
    /// trapezoid weights in t.
    pub fn inner(&self, other: &Self) -> C64 {
        let tw = self.tgrid.trapezoid_weights();
        let mut acc = C64::new(0.0, 0.0);
        for jt in 0..self.tgrid.len() {
            acc += tw[jt] * self.slice_t(jt).inner(&other.slice_t(jt));
        }
        acc
    }

    pub fn scale(&mut self, c: C64) {
        self.values.mapv_inplace(|v| v * c);
        if let Some(b) = &mut self.boundary {
            b.mapv_inplace(|v| v * c);
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        self.values += &other.values;
        match (&mut self.boundary, &other.boundary) {
            (Some(b), Some(ob)) => *b += ob,
            (b @ Some(_), None) => *b = None,
            _ => {}
        }
    }

    pub fn compatible(&self, other: &Self) -> bool {
        self.a == other.a
            && self.xgrid == other.xgrid
            && self.zgrid.compatible(&other.zgrid)
            && self.tgrid == other.tgrid
    }
}

/// Complex values on (x-grid x t-grid): the z -> 0+ restriction of a field,
/// or a Neumann datum.
#[derive(Debug, Clone)]
pub struct BoundaryTrace {
    pub xgrid: CartesianGrid,
    pub tgrid: TimeGrid,
    /// Indexed (x-flat, t-node).
    pub values: Array2<C64>,
}

impl BoundaryTrace {
    pub fn zeros(xgrid: CartesianGrid, tgrid: TimeGrid) -> Self {
        let values = Array2::zeros((xgrid.total(), tgrid.len()));
        BoundaryTrace {
            xgrid,
            tgrid,
            values,
        }
    }

    pub fn from_fn(
        xgrid: CartesianGrid,
        tgrid: TimeGrid,
        mut f: impl FnMut(&[f64], f64) -> C64,
    ) -> Self {
        let mut tr = Self::zeros(xgrid, tgrid);
        for ix in 0..tr.xgrid.total() {
            let x = tr.xgrid.point(ix);
            for jt in 0..tr.tgrid.len() {
                tr.values[(ix, jt)] = f(&x, tr.tgrid.node(jt));
            }
        }
        tr
    }

    /// L^r_x norm of the time slice jt.
    pub fn lr_x(&self, jt: usize, r: f64) -> f64 {
        let vol = self.xgrid.cell_volume();
        let col = self.values.column(jt);
        if r.is_infinite() {
            col.iter().map(|v| v.norm()).fold(0.0, f64::max)
        } else {
            (col.iter().map(|v| v.norm().powf(r)).sum::<f64>() * vol).powf(1.0 / r)
        }
    }

    /// Mixed L^q_t L^r_x norm with trapezoid weights over the window.
    pub fn lq_t_lr_x(&self, q: f64, r: f64) -> f64 {
        let tw = self.tgrid.trapezoid_weights();
        if q.is_infinite() {
            (0..self.tgrid.len())
                .map(|jt| self.lr_x(jt, r))
                .fold(0.0, f64::max)
        } else {
            (0..self.tgrid.len())
                .map(|jt| tw[jt] * self.lr_x(jt, r).powf(q))
                .sum::<f64>()
                .powf(1.0 / q)
        }
    }
}
