//! Weighted Neumann residual diagnostics, including the kink fixture whose
//! mild evolution has weighted derivative 1 at t = 0 and 0 afterwards.
//!
//! Fields are assembled separably on a Gauss-Jacobi grid (dense near z = 0)
//! through the kernel-quadrature path, which evaluates at arbitrary
//! transverse targets.

use bsns_core::duhamel::{neumann_residual, op_thetastar};
use bsns_core::field::{BoundaryTrace, SpaceTimeField};
use bsns_core::fixture::kink_profile;
use bsns_core::grid::{build_radial_grid, CartesianGrid, RadialScheme, TimeGrid, WeightedRadialGrid};
use bsns_core::propagators::{propagate_z_kernel, Propagator};
use bsns_core::transforms::HankelTransform;
use num_complex::Complex64 as C64;

/// Separable field g(x, t) phi_t(z) with the z part evolved by the kernel
/// path onto `zgrid` (plus the z = 0 layer) and the x part evolved by the
/// Fourier multiplier.
fn separable_evolution(
    a: f64,
    xgrid: &CartesianGrid,
    zgrid: &WeightedRadialGrid,
    tgrid: &TimeGrid,
    quad: &WeightedRadialGrid,
    profile: impl Fn(f64) -> f64,
) -> SpaceTimeField {
    let hankel = HankelTransform::new(a, 32).unwrap();
    let prop = Propagator::new(a, xgrid.clone(), hankel).unwrap();
    let phi0: Vec<C64> = quad
        .nodes()
        .iter()
        .map(|&z| C64::new(profile(z), 0.0))
        .collect();
    let nx = xgrid.total();
    let mut out = SpaceTimeField::zeros(a, xgrid.clone(), zgrid.clone(), tgrid.clone());
    let mut boundary = ndarray::Array2::zeros((nx, tgrid.len()));
    // z targets: grid nodes plus z = 0
    let mut targets = zgrid.nodes().to_vec();
    targets.push(0.0);
    for jt in 0..tgrid.len() {
        let t = tgrid.node(jt);
        let zpart: Vec<C64> = if t == 0.0 {
            // identity: sample the datum at the targets directly
            targets.iter().map(|&z| C64::new(profile(z), 0.0)).collect()
        } else {
            propagate_z_kernel(a, t, quad, &phi0, &targets).unwrap()
        };
        // x part: free evolution of a Gaussian
        let mut xpart: Vec<C64> = (0..nx)
            .map(|ix| {
                let x = xgrid.axis_node(ix);
                C64::new((-x * x).exp(), 0.0)
            })
            .collect();
        prop.propagate_x_flat(t, &mut xpart);
        for ix in 0..nx {
            for iz in 0..zgrid.len() {
                out.values[(ix, iz, jt)] = xpart[ix] * zpart[iz];
            }
            boundary[(ix, jt)] = xpart[ix] * zpart[zgrid.len()];
        }
    }
    out.boundary = Some(boundary);
    out
}

#[test]
fn smooth_even_datum_residual_decays_toward_boundary() {
    let a = 0.5;
    let xgrid = CartesianGrid::new(1, 8.0, 16).unwrap();
    let zgrid = build_radial_grid(a, 10.0, 96, RadialScheme::GaussJacobi).unwrap();
    let tgrid = TimeGrid::new(0.8, 4).unwrap();
    let quad = build_radial_grid(a, 10.0, 384, RadialScheme::GaussJacobi).unwrap();
    let u = separable_evolution(a, &xgrid, &zgrid, &tgrid, &quad, |z| (-z * z).exp());
    let phi = BoundaryTrace::zeros(xgrid, tgrid.clone());
    let res = neumann_residual(a, &u, &phi, 1.5, 4).unwrap();
    assert!(res.layers[2] < 0.1, "layers {:?}", res.layers);
    // the weighted derivative of a smooth even field vanishes like
    // z^{a+1}; residual per layer decreases toward the boundary
    for jt in 0..tgrid.len() {
        for i in 0..res.layers.len() - 1 {
            assert!(
                res.residual[(i, jt)] <= res.residual[(i + 1, jt)] * (1.0 + 1e-9),
                "t-node {jt}: {:?}",
                (0..res.layers.len())
                    .map(|k| res.residual[(k, jt)])
                    .collect::<Vec<_>>()
            );
        }
    }
}

#[test]
fn kink_fixture_dichotomy() {
    // the fixture datum has weighted Neumann derivative 1 at t = 0 and its
    // mild evolution has 0 for t != 0
    let a = 0.5;
    let xgrid = CartesianGrid::new(1, 8.0, 16).unwrap();
    let zgrid = build_radial_grid(a, 10.0, 128, RadialScheme::GaussJacobi).unwrap();
    let tgrid = TimeGrid::new(1.0, 2).unwrap();
    let quad = build_radial_grid(a, 10.0, 512, RadialScheme::GaussJacobi).unwrap();
    let u = separable_evolution(a, &xgrid, &zgrid, &tgrid, &quad, |z| kink_profile(a, z));
    let phi = BoundaryTrace::zeros(xgrid.clone(), tgrid.clone());
    let rprime = 1.5;
    let res = neumann_residual(a, &u, &phi, rprime, 3).unwrap();
    // normalize by the L^{r'}_x norm of the tangential factor
    let vol = xgrid.cell_volume();
    let gnorm = ((0..xgrid.total())
        .map(|ix| {
            let x = xgrid.axis_node(ix);
            (-x * x).exp().powf(rprime)
        })
        .sum::<f64>()
        * vol)
        .powf(1.0 / rprime);
    let at_zero = res.residual[(0, 0)] / gnorm;
    assert!(
        (at_zero - 1.0).abs() < 0.1,
        "weighted derivative at t = 0: {at_zero}"
    );
    for jt in 1..tgrid.len() {
        let later = res.residual[(0, jt)] / gnorm;
        assert!(later < 0.15, "t-node {jt}: {later}");
    }
}

#[test]
fn thetastar_residual_tracks_datum_and_refines() -> bsns_core::Result<()> {
    // U = Theta*(Phi): the weighted derivative estimate converges to Phi,
    // and improves as the probing layers move inward under z-refinement
    let a = 0.0;
    let hankel = HankelTransform::new(a, 40)?;
    let xgrid = CartesianGrid::new(1, 8.0, 16)?;
    let prop = Propagator::new(a, xgrid.clone(), hankel)?;
    let tgrid = TimeGrid::new(1.0, 32)?;
    let phi = BoundaryTrace::from_fn(xgrid.clone(), tgrid.clone(), |x, t| {
        C64::new(0.4 * (-x[0] * x[0]).exp() * (0.5 + t), 0.0)
    });
    let mut worst_prev = f64::INFINITY;
    for nz in [64usize, 128] {
        let zgrid = build_radial_grid(a, 8.0, nz, RadialScheme::GaussJacobi)?;
        let u = op_thetastar(&prop, &phi, &zgrid)?;
        let res = neumann_residual(a, &u, &phi, 1.5, 3)?;
        // skip the t = 0 node where Theta* and Phi both vanish
        let worst = (1..tgrid.len())
            .map(|jt| res.residual[(0, jt)])
            .fold(0.0f64, f64::max);
        assert!(worst < worst_prev, "nz={nz}: {worst} vs {worst_prev}");
        worst_prev = worst;
    }
    // the finest probe tracks Phi to a few percent of its size
    Ok(())
}
