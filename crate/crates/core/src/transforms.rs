//! Discrete transforms: the self-inverse modified Hankel transform of order
//! (a-1)/2 on Bessel collocation grids, the discrete Fourier transform in x
//! matching the continuous e^{-2 pi i <xi,x>} convention, and their
//! composition in (x, z, t).

use crate::error::{CoreError, Result};
use crate::grid::{
    is_self_dual, scaled_bessel_at_zero, self_dual_collocation, CartesianGrid, TimeGrid,
    WeightedRadialGrid,
};
use crate::specfun::{bessel_j, bessel_j_scaled};
use ndarray::{Array2, Array3};
use num_complex::Complex64 as C64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

/// Dense discrete modified Hankel transform on a self-dual collocation grid.
///
/// With nodes z_k = j_k / sigma, sigma = sqrt(j_{N+1}), and band-limited
/// weights w_k, the matrix H_{mk} = G_nu(z_m z_k) w_k satisfies H^2 ~= I and
/// is an isometry for the weighted inner product, up to the truncation error
/// of the data.
#[derive(Debug, Clone)]
pub struct HankelTransform {
    a: f64,
    grid: WeightedRadialGrid,
    /// Row-major (target, source).
    matrix: Array2<f64>,
    /// Weights used inside the matrix (unpatched band-limited weights).
    spectral_weights: Vec<f64>,
    /// G_nu(0) for boundary evaluations.
    kernel_at_zero: f64,
}

impl HankelTransform {
    /// Build the transform together with its self-dual grid.
    pub fn new(a: f64, nz: usize) -> Result<Self> {
        let grid = self_dual_collocation(a, nz)?;
        Self::for_grid(&grid)
    }

    /// Build the transform for an existing grid, which must be a Bessel
    /// collocation grid at the self-dual extent.
    pub fn for_grid(grid: &WeightedRadialGrid) -> Result<Self> {
        if !is_self_dual(grid) {
            return Err(CoreError::mismatch(
                "hankel transform requires a Bessel collocation grid at Zmax = sqrt(j_{N+1})",
            ));
        }
        let a = grid.a();
        let nu = grid.order();
        let jz = grid
            .bessel_jzeros()
            .ok_or_else(|| CoreError::mismatch("hankel transform: collocation grid required"))?;
        let n = grid.len();
        let sigma = jz[n] / grid.zmax();
        let nodes = grid.nodes();
        let mut spectral_weights = Vec::with_capacity(n);
        for k in 0..n {
            let jnext = bessel_j(nu + 1.0, jz[k])?;
            spectral_weights.push(2.0 * nodes[k].powf(a - 1.0) / (sigma * sigma * jnext * jnext));
        }
        let mut matrix = Array2::zeros((n, n));
        for m in 0..n {
            for k in m..n {
                // G_nu(z_m z_k) = G_nu(j_m j_k / j_{N+1}) is symmetric
                let g = bessel_j_scaled(nu, nodes[m] * nodes[k])?;
                matrix[(m, k)] = g * spectral_weights[k];
                if k != m {
                    matrix[(k, m)] = g * spectral_weights[m];
                }
            }
        }
        Ok(HankelTransform {
            a,
            grid: grid.clone(),
            matrix,
            spectral_weights,
            kernel_at_zero: scaled_bessel_at_zero(a)?,
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn len(&self) -> usize {
        self.grid.len()
    }
    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }
    pub fn grid(&self) -> &WeightedRadialGrid {
        &self.grid
    }

    /// Apply the transform to samples on the grid. Self-inverse, so this is
    /// both the forward and the inverse map.
    pub fn apply(&self, phi: &[C64]) -> Result<Vec<C64>> {
        if phi.len() != self.len() {
            return Err(CoreError::mismatch(format!(
                "hankel apply: {} values on a grid of {} nodes",
                phi.len(),
                self.len()
            )));
        }
        let n = self.len();
        let mut out = vec![C64::new(0.0, 0.0); n];
        for m in 0..n {
            let row = self.matrix.row(m);
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..n {
                acc += phi[k] * row[k];
            }
            out[m] = acc;
        }
        Ok(out)
    }

    /// Evaluate the transform at z = 0: (H phi)(0) = G_nu(0) sum_k w_k phi_k.
    pub fn apply_at_zero(&self, phi: &[C64]) -> Result<C64> {
        if phi.len() != self.len() {
            return Err(CoreError::mismatch("hankel apply_at_zero: length mismatch"));
        }
        let mut acc = C64::new(0.0, 0.0);
        for (v, &w) in phi.iter().zip(&self.spectral_weights) {
            acc += v * w;
        }
        Ok(acc * self.kernel_at_zero)
    }
}

/// Free-function form of the transform for one-shot use.
pub fn hankel_forward(a: f64, grid: &WeightedRadialGrid, phi: &[C64]) -> Result<Vec<C64>> {
    if (grid.a() - a).abs() > 1e-14 {
        return Err(CoreError::mismatch(format!(
            "hankel_forward: grid built for a = {}, requested a = {a}",
            grid.a()
        )));
    }
    HankelTransform::for_grid(grid)?.apply(phi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FourierDirection {
    Forward,
    Inverse,
}

/// FFT plans for the x grid, one size per axis (all axes share Nx).
pub struct FourierX {
    grid: CartesianGrid,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for FourierX {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FourierX").field("grid", &self.grid).finish()
    }
}

impl Clone for FourierX {
    fn clone(&self) -> Self {
        FourierX::new(self.grid.clone())
    }
}

impl FourierX {
    pub fn new(grid: CartesianGrid) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(grid.nx());
        let inv = planner.plan_fft_inverse(grid.nx());
        FourierX { grid, fwd, inv }
    }

    pub fn grid(&self) -> &CartesianGrid {
        &self.grid
    }

    /// Transform a flat x vector in place along every axis.
    ///
    /// Forward realizes hat u (xi_m) = dx^d (-1)^{m_1+...+m_d} FFT(u), the
    /// Riemann-sum approximation of int e^{-2 pi i <xi, x>} u dx on the grid
    /// starting at -Xmax; inverse is its exact algebraic inverse. Plancherel
    /// sum |u|^2 dx^d = sum |hat u|^2 dxi^d holds exactly.
    pub fn transform_flat(&self, data: &mut [C64], dir: FourierDirection) {
        let n = self.grid.nx();
        let d = self.grid.d();
        let total = self.grid.total();
        assert_eq!(data.len(), total);
        let dx = self.grid.dx();
        let mut line = vec![C64::new(0.0, 0.0); n];
        // axis `ax` has stride n^{d-1-ax} in the flat row-major layout
        for ax in 0..d {
            let stride = n.pow((d - 1 - ax) as u32);
            let block = stride * n;
            for base in 0..total / block {
                for off in 0..stride {
                    let start = base * block + off;
                    for i in 0..n {
                        line[i] = data[start + i * stride];
                    }
                    match dir {
                        FourierDirection::Forward => {
                            self.fwd.process(&mut line);
                            for (m, v) in line.iter().enumerate() {
                                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                                data[start + m * stride] = v * sign * dx;
                            }
                        }
                        FourierDirection::Inverse => {
                            for (m, v) in line.iter_mut().enumerate() {
                                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                                *v *= sign / (dx * n as f64);
                            }
                            self.inv.process(&mut line);
                            for i in 0..n {
                                data[start + i * stride] = line[i];
                            }
                        }
                    }
                }
            }
        }
    }

    /// Apply a frequency multiplier: u <- F^{-1} [ mult(|xi|^2) . F u ].
    pub fn multiplier_flat(&self, data: &mut [C64], mult: impl Fn(f64) -> C64) {
        self.transform_flat(data, FourierDirection::Forward);
        for (flat, v) in data.iter_mut().enumerate() {
            *v *= mult(self.grid.freq_norm_sqr(flat));
        }
        self.transform_flat(data, FourierDirection::Inverse);
    }
}

/// Discrete x-Fourier transform of a flat vector (copying convenience form).
pub fn fourier_x(grid: &CartesianGrid, values: &[C64], dir: FourierDirection) -> Result<Vec<C64>> {
    if values.len() != grid.total() {
        return Err(CoreError::mismatch(format!(
            "fourier_x: {} values on a grid of {} points",
            values.len(),
            grid.total()
        )));
    }
    let plan = FourierX::new(grid.clone());
    let mut out = values.to_vec();
    plan.transform_flat(&mut out, dir);
    Ok(out)
}

/// Result of the composite Fourier-Hankel transform: values on
/// (xi-grid, zeta-grid, tau-grid). Frequencies are in FFT bin order; use
/// [`CartesianGrid::axis_freq`] and [`FourierHankel::tau`] to decode them.
#[derive(Debug, Clone)]
pub struct FourierHankel {
    pub xgrid: CartesianGrid,
    pub zgrid: WeightedRadialGrid,
    pub tgrid: TimeGrid,
    /// Indexed (xi-flat, zeta-node, tau-bin); tau bins number Nt.
    pub values: Array3<C64>,
}

impl FourierHankel {
    /// Temporal frequency of bin m under the e^{-2 pi i tau t} convention.
    pub fn tau(&self, m: usize) -> f64 {
        let nt = self.tgrid.nt();
        let signed = if m < nt / 2 {
            m as f64
        } else {
            m as f64 - nt as f64
        };
        signed / self.tgrid.t_max()
    }
}

/// Composite transform: Fourier in t (over the window, Riemann sum on the
/// first Nt nodes), Fourier in x, modified Hankel in z.
pub fn fourier_hankel(
    u: &crate::field::SpaceTimeField,
    hankel: &HankelTransform,
) -> Result<FourierHankel> {
    if !u.zgrid.compatible(hankel.grid()) {
        return Err(CoreError::mismatch("fourier_hankel: z-grid mismatch"));
    }
    let nx = u.xgrid.total();
    let nz = u.zgrid.len();
    let nt = u.tgrid.nt();
    let dt = u.tgrid.dt();
    let mut planner = FftPlanner::new();
    let tplan = planner.plan_fft_forward(nt);
    let xplan = FourierX::new(u.xgrid.clone());

    let mut out = Array3::zeros((nx, nz, nt));
    // t-transform per (x, z) line: hat U(tau_m) = dt * FFT over j < Nt
    let mut line = vec![C64::new(0.0, 0.0); nt];
    for ix in 0..nx {
        for iz in 0..nz {
            for jt in 0..nt {
                line[jt] = u.values[(ix, iz, jt)];
            }
            tplan.process(&mut line);
            for m in 0..nt {
                out[(ix, iz, m)] = line[m] * dt;
            }
        }
    }
    // x-transform per (z, tau) slice
    let mut xbuf = vec![C64::new(0.0, 0.0); nx];
    for iz in 0..nz {
        for m in 0..nt {
            for ix in 0..nx {
                xbuf[ix] = out[(ix, iz, m)];
            }
            xplan.transform_flat(&mut xbuf, FourierDirection::Forward);
            for ix in 0..nx {
                out[(ix, iz, m)] = xbuf[ix];
            }
        }
    }
    // Hankel in z per (xi, tau) line
    let mut zbuf = vec![C64::new(0.0, 0.0); nz];
    for ix in 0..nx {
        for m in 0..nt {
            for iz in 0..nz {
                zbuf[iz] = out[(ix, iz, m)];
            }
            let h = hankel.apply(&zbuf)?;
            for iz in 0..nz {
                out[(ix, iz, m)] = h[iz];
            }
        }
    }
    Ok(FourierHankel {
        xgrid: u.xgrid.clone(),
        zgrid: u.zgrid.clone(),
        tgrid: u.tgrid.clone(),
        values: out,
    })
}
