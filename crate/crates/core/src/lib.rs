//! Numerical core for the linear and nonlinear Schrodinger equation on the
//! upper half-space R^d x R^+ with the Bessel operator d_zz + (a/z) d_z in
//! the transverse variable and weighted Neumann boundary data.
//!
//! The crate is organized around the objects of the continuous theory:
//! special functions ([`specfun`]), weighted grids and discrete transforms
//! ([`transforms`]), closed-form propagator kernels ([`kernels`]), the
//! evolution operators ([`propagators`]), the Duhamel representation with
//! nonzero Neumann data ([`duhamel`]), exponent arithmetic and mixed norms
//! ([`norms`]), the Picard fixed-point solver ([`nonlinear`]), and the
//! estimate-verification harness ([`verify`]).

pub mod duhamel;
pub mod error;
pub mod field;
pub mod fixture;
pub mod grid;
pub mod kernels;
pub mod nonlinear;
pub mod norms;
pub mod propagators;
mod linalg;
pub mod specfun;
pub mod transforms;
pub mod verify;

pub use error::{CoreError, Result};
pub use field::{BoundaryTrace, HalfSpaceField, SpaceTimeField};
pub use grid::{
    build_radial_grid, CartesianGrid, RadialScheme, TimeGrid, WeightedRadialGrid,
};
pub use norms::{ExponentTriple, MixedNormSpec, Regime};
pub use propagators::Propagator;
pub use transforms::HankelTransform;
