//! Shared setup helpers for the criterion benchmarks.

use bsns_core::field::{BoundaryTrace, HalfSpaceField};
use bsns_core::grid::{CartesianGrid, TimeGrid};
use bsns_core::propagators::Propagator;
use bsns_core::transforms::HankelTransform;
use num_complex::Complex64 as C64;

pub fn propagator(a: f64, nz: usize, nx: usize) -> Propagator {
    let hankel = HankelTransform::new(a, nz).expect("transform");
    let xgrid = CartesianGrid::new(1, 10.0, nx).expect("grid");
    Propagator::new(a, xgrid, hankel).expect("propagator")
}

pub fn gaussian_field(p: &Propagator) -> HalfSpaceField {
    HalfSpaceField::from_fn(p.a(), p.xgrid().clone(), p.zgrid().clone(), |x, z| {
        C64::new((-x[0] * x[0] - 0.5 * z * z).exp(), 0.0)
    })
}

pub fn gaussian_trace(p: &Propagator, tgrid: &TimeGrid) -> BoundaryTrace {
    BoundaryTrace::from_fn(p.xgrid().clone(), tgrid.clone(), |x, t| {
        C64::new((-x[0] * x[0]).exp() * (1.0 + t), 0.0)
    })
}
