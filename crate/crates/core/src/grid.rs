//! Grids: weighted radial quadrature in z for the measure z^a dz, the
//! uniform Cartesian grid in x, and the uniform time grid.

use crate::error::{CoreError, Result};
use crate::linalg::solve_dense;
use crate::specfun::{bessel_j, bessel_j_scaled, bessel_zeros, gamma_fn};

/// Node-placement scheme for the transverse quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadialScheme {
    /// Scaled zeros of J_{(a-1)/2} with band-limited quadrature weights.
    /// The scheme behind the discrete Hankel transform.
    BesselCollocation,
    /// Gauss-Jacobi nodes for the weight z^a on [0, Zmax].
    GaussJacobi,
    /// Uniform nodes with product-trapezoid weights.
    Trapezoid,
}

/// Quadrature nodes and weights representing int_0^Zmax f(z) z^a dz.
///
/// Invariants: nodes strictly increasing in (0, Zmax], weights positive,
/// and the rule integrates z^a * {1, z, z^2} over [0, Zmax] exactly up to
/// roundoff (a small moment correction is folded into the weights at
/// construction).
#[derive(Debug, Clone)]
pub struct WeightedRadialGrid {
    a: f64,
    zmax: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    scheme: RadialScheme,
    /// For the collocation scheme: j_1 .. j_{N+1}, the zeros of J_{(a-1)/2}
    /// that generated the nodes. Needed by the Hankel transform.
    jzeros: Option<Vec<f64>>,
}

impl WeightedRadialGrid {
    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn zmax(&self) -> f64 {
        self.zmax
    }
    pub fn len(&self) -> usize {
        self.nodes.len()
    }
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
    pub fn scheme(&self) -> RadialScheme {
        self.scheme
    }
    pub fn bessel_jzeros(&self) -> Option<&[f64]> {
        self.jzeros.as_deref()
    }

    /// Transverse Bessel order nu = (a-1)/2.
    pub fn order(&self) -> f64 {
        0.5 * (self.a - 1.0)
    }

    /// Quadrature of a complex-valued sample vector against z^a dz.
    pub fn integrate<T>(&self, values: &[T]) -> T
    where
        T: Copy + std::ops::Mul<f64, Output = T> + std::iter::Sum<T>,
    {
        assert_eq!(values.len(), self.len());
        values
            .iter()
            .zip(&self.weights)
            .map(|(&v, &w)| v * w)
            .sum()
    }

    /// Discrete L^2_a norm of a sample vector.
    pub fn norm_l2a(&self, values: &[num_complex::Complex64]) -> f64 {
        assert_eq!(values.len(), self.len());
        values
            .iter()
            .zip(&self.weights)
            .map(|(v, &w)| v.norm_sqr() * w)
            .sum::<f64>()
            .sqrt()
    }

    /// Grids match when parameter, extent and nodes coincide.
    pub fn compatible(&self, other: &Self) -> bool {
        self.a == other.a && self.len() == other.len() && self.zmax == other.zmax
    }
}

fn check_params(a: f64, zmax: f64, nz: usize) -> Result<()> {
    if !(a > -1.0) || !a.is_finite() {
        return Err(CoreError::domain(format!("radial grid: a = {a} <= -1")));
    }
    if !(zmax > 0.0) || !zmax.is_finite() {
        return Err(CoreError::domain(format!("radial grid: Zmax = {zmax} <= 0")));
    }
    if nz < 8 {
        return Err(CoreError::domain(format!("radial grid: Nz = {nz} < 8")));
    }
    Ok(())
}

/// Exact weighted moments int_0^Z z^{a+j} dz for j = 0, 1, 2.
fn exact_moments(a: f64, zmax: f64) -> [f64; 3] {
    [
        zmax.powf(a + 1.0) / (a + 1.0),
        zmax.powf(a + 2.0) / (a + 2.0),
        zmax.powf(a + 3.0) / (a + 3.0),
    ]
}

/// Minimal-norm additive correction over `lo..nodes.len()` making the first
/// three weighted moments exact. Returns the corrected weights, or None when
/// a weight would turn nonpositive or the correction is disproportionate.
fn try_moment_patch(
    a: f64,
    zmax: f64,
    nodes: &[f64],
    weights: &[f64],
    lo: usize,
) -> Option<Vec<f64>> {
    let exact = exact_moments(a, zmax);
    let mut defect = [0.0f64; 3];
    for j in 0..3 {
        let approx: f64 = nodes
            .iter()
            .zip(weights.iter())
            .map(|(&z, &w)| w * (z / zmax).powi(j as i32))
            .sum();
        defect[j] = exact[j] / zmax.powi(j as i32) - approx;
    }
    let set: Vec<usize> = (lo..nodes.len()).collect();
    // delta = A^T (A A^T)^{-1} defect with A_{jk} = (z_k/Z)^j
    let mut gram = vec![0.0f64; 9];
    for j in 0..3 {
        for i in 0..3 {
            gram[j * 3 + i] = set
                .iter()
                .map(|&k| (nodes[k] / zmax).powi((j + i) as i32))
                .sum();
        }
    }
    let mut rhs = defect.to_vec();
    let lambda = solve_dense(&mut gram, &mut rhs, 3)?;
    let mut out = weights.to_vec();
    let wmin = set.iter().map(|&k| weights[k]).fold(f64::INFINITY, f64::min);
    for &k in &set {
        let s = nodes[k] / zmax;
        let delta = lambda[0] + lambda[1] * s + lambda[2] * s * s;
        if delta.abs() > 0.75 * wmin {
            return None;
        }
        out[k] += delta;
    }
    if out.iter().any(|&w| w <= 0.0) {
        return None;
    }
    Some(out)
}

/// Moment correction restricted to a trailing cluster of nodes, growing the
/// cluster until the correction is small and keeps every weight positive.
/// Corrections near the truncation boundary leave quadrature of decaying
/// data untouched.
fn moment_patch_boundary(
    a: f64,
    zmax: f64,
    nodes: &[f64],
    weights: &mut [f64],
) -> Result<()> {
    let n = nodes.len();
    for m in [6usize, 8, 12, 16, 24, 32, 48] {
        if m > n {
            break;
        }
        if let Some(out) = try_moment_patch(a, zmax, nodes, weights, n - m) {
            weights.copy_from_slice(&out);
            return Ok(());
        }
    }
    // last resort: spread over all nodes
    if let Some(out) = try_moment_patch(a, zmax, nodes, weights, 0) {
        weights.copy_from_slice(&out);
        return Ok(());
    }
    Err(CoreError::numerical(
        "radial grid: moment correction failed to keep weights positive",
    ))
}

/// Moment correction spread across all nodes; used by schemes whose base
/// defect is already at the scheme's own accuracy level.
fn moment_patch_global(a: f64, zmax: f64, nodes: &[f64], weights: &mut [f64]) -> Result<()> {
    if let Some(out) = try_moment_patch(a, zmax, nodes, weights, 0) {
        weights.copy_from_slice(&out);
        return Ok(());
    }
    Err(CoreError::numerical(
        "radial grid: moment correction failed to keep weights positive",
    ))
}

/// Scaled Bessel zeros with Fourier-Bessel (band-limited) weights.
///
/// Nodes z_k = j_k Zmax / j_{N+1}; weights
/// w_k = 2 z_k^{a-1} / (sigma^2 J_{nu+1}(j_k)^2), sigma = j_{N+1}/Zmax,
/// the quadrature exact for Hankel-band-limited integrands, with a boundary
/// moment patch over the last few nodes.
fn build_collocation(a: f64, zmax: f64, nz: usize) -> Result<WeightedRadialGrid> {
    let nu = 0.5 * (a - 1.0);
    let jz = bessel_zeros(nu, nz + 1)?;
    let jbig = jz[nz];
    let sigma = jbig / zmax;
    let mut nodes = Vec::with_capacity(nz);
    let mut weights = Vec::with_capacity(nz);
    for k in 0..nz {
        let z = jz[k] / sigma;
        let jnext = bessel_j(nu + 1.0, jz[k])?;
        nodes.push(z);
        weights.push(2.0 * z.powf(a - 1.0) / (sigma * sigma * jnext * jnext));
    }
    moment_patch_boundary(a, zmax, &nodes, &mut weights)?;
    Ok(WeightedRadialGrid {
        a,
        zmax,
        nodes,
        weights,
        scheme: RadialScheme::BesselCollocation,
        jzeros: Some(jz),
    })
}

/// Jacobi polynomial P_n^{(0,beta)} and derivative at x via the three-term
/// recurrence; returns (P_n, P_n').
fn jacobi_pd(n: usize, beta: f64, x: f64) -> (f64, f64) {
    let alpha = 0.0f64;
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut pm1 = 1.0;
    let mut p = 0.5 * (alpha - beta) + 0.5 * (alpha + beta + 2.0) * x;
    for k in 2..=n {
        let kf = k as f64;
        let ab = alpha + beta;
        let c1 = 2.0 * kf * (kf + ab) * (2.0 * kf + ab - 2.0);
        let c2 = (2.0 * kf + ab - 1.0) * (ab) * (alpha - beta);
        let c3 = (2.0 * kf + ab - 1.0) * (2.0 * kf + ab) * (2.0 * kf + ab - 2.0);
        let c4 = 2.0 * (kf + alpha - 1.0) * (kf + beta - 1.0) * (2.0 * kf + ab);
        let next = ((c2 + c3 * x) * p - c4 * pm1) / c1;
        pm1 = p;
        p = next;
    }
    // (2n+ab)(1-x^2) P_n' = n[(a-b) - (2n+ab)x] P_n + 2(n+a)(n+b) P_{n-1}
    let nf = n as f64;
    let ab = alpha + beta;
    let dp = (nf * ((alpha - beta) - (2.0 * nf + ab) * x) * p
        + 2.0 * (nf + alpha) * (nf + beta) * pm1)
        / ((2.0 * nf + ab) * (1.0 - x * x));
    (p, dp)
}

/// Gauss-Jacobi rule for weight (1+x)^beta on [-1,1], beta > -1, alpha = 0.
/// Nodes by sign-scan bracketing plus Newton; weights C/((1-x^2) P_n'^2)
/// with C pinned by the zeroth moment.
fn gauss_jacobi_rule(n: usize, beta: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let eval = |x: f64| jacobi_pd(n, beta, x).0;
    // bracket the n roots on a Chebyshev-angle scan
    let m = 8 * n;
    let mut xs = Vec::with_capacity(m + 1);
    for i in 0..=m {
        let theta = std::f64::consts::PI * (i as f64 + 0.5) / (m as f64 + 1.0);
        xs.push(-theta.cos());
    }
    let mut roots = Vec::with_capacity(n);
    let mut fprev = eval(xs[0]);
    for w in xs.windows(2) {
        let fnext = eval(w[1]);
        if fprev == 0.0 {
            roots.push(w[0]);
        } else if fprev.signum() != fnext.signum() {
            let (mut lo, mut hi) = (w[0], w[1]);
            let mut flo = fprev;
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                let fm = eval(mid);
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if fm.signum() == flo.signum() {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            let mut x = 0.5 * (lo + hi);
            for _ in 0..3 {
                let (p, dp) = jacobi_pd(n, beta, x);
                if dp != 0.0 {
                    x -= p / dp;
                }
            }
            roots.push(x);
        }
        fprev = fnext;
    }
    if roots.len() != n {
        return Err(CoreError::numerical(format!(
            "gauss-jacobi: found {} of {} roots",
            roots.len(),
            n
        )));
    }
    let raw: Vec<f64> = roots
        .iter()
        .map(|&x| {
            let (_, dp) = jacobi_pd(n, beta, x);
            1.0 / ((1.0 - x * x) * dp * dp)
        })
        .collect();
    // zeroth moment: int (1+x)^beta dx = 2^{beta+1}/(beta+1)
    let mu0 = 2.0f64.powf(beta + 1.0) / (beta + 1.0);
    let scale = mu0 / raw.iter().sum::<f64>();
    Ok((roots, raw.iter().map(|&w| w * scale).collect()))
}

fn build_gauss_jacobi(a: f64, zmax: f64, nz: usize) -> Result<WeightedRadialGrid> {
    let (xs, ws) = gauss_jacobi_rule(nz, a)?;
    // z = Zmax (1+x)/2 maps the rule onto [0, Zmax] with weight z^a:
    // int_0^Z f z^a dz = (Z/2)^{a+1} sum w_i f(z_i)
    let scale = (0.5 * zmax).powf(a + 1.0);
    let nodes: Vec<f64> = xs.iter().map(|&x| 0.5 * zmax * (1.0 + x)).collect();
    let mut weights: Vec<f64> = ws.iter().map(|&w| w * scale).collect();
    moment_patch_global(a, zmax, &nodes, &mut weights)?;
    Ok(WeightedRadialGrid {
        a,
        zmax,
        nodes,
        weights,
        scheme: RadialScheme::GaussJacobi,
        jzeros: None,
    })
}

fn build_trapezoid(a: f64, zmax: f64, nz: usize) -> Result<WeightedRadialGrid> {
    let h = zmax / nz as f64;
    let nodes: Vec<f64> = (1..=nz).map(|k| k as f64 * h).collect();
    // interior weight h z^a, half weight at the right end, and the first
    // cell's left half assigned to the first node
    let mut weights: Vec<f64> = nodes.iter().map(|&z| h * z.powf(a)).collect();
    weights[nz - 1] *= 0.5;
    weights[0] *= 1.5;
    moment_patch_global(a, zmax, &nodes, &mut weights)?;
    Ok(WeightedRadialGrid {
        a,
        zmax,
        nodes,
        weights,
        scheme: RadialScheme::Trapezoid,
        jzeros: None,
    })
}

/// Build a transverse quadrature grid for int_0^Zmax . z^a dz.
pub fn build_radial_grid(
    a: f64,
    zmax: f64,
    nz: usize,
    scheme: RadialScheme,
) -> Result<WeightedRadialGrid> {
    check_params(a, zmax, nz)?;
    match scheme {
        RadialScheme::BesselCollocation => build_collocation(a, zmax, nz),
        RadialScheme::GaussJacobi => build_gauss_jacobi(a, zmax, nz),
        RadialScheme::Trapezoid => build_trapezoid(a, zmax, nz),
    }
}

/// Collocation grid at the self-dual truncation radius Zmax = sqrt(j_{N+1}),
/// the unique extent at which the discrete Hankel transform of order
/// (a-1)/2 maps the grid onto itself.
pub fn self_dual_collocation(a: f64, nz: usize) -> Result<WeightedRadialGrid> {
    if nz < 8 {
        return Err(CoreError::domain(format!("radial grid: Nz = {nz} < 8")));
    }
    let nu = 0.5 * (a - 1.0);
    let jz = bessel_zeros(nu, nz + 1)?;
    let zmax = jz[nz].sqrt();
    build_collocation(a, zmax, nz)
}

/// Value of G_nu(0) = 2^{-nu}/Gamma(nu+1), the z -> 0 limit of the scaled
/// Bessel kernel, exposed for boundary evaluations.
pub fn scaled_bessel_at_zero(a: f64) -> Result<f64> {
    let nu = 0.5 * (a - 1.0);
    Ok((2.0f64).powf(-nu) / gamma_fn(nu + 1.0)?)
}

/// Check for the self-dual property used by the transform.
pub fn is_self_dual(grid: &WeightedRadialGrid) -> bool {
    match &grid.jzeros {
        Some(jz) => {
            let jbig = jz[jz.len() - 1];
            (grid.zmax - jbig.sqrt()).abs() < 1e-8 * grid.zmax
        }
        None => false,
    }
}

/// Evaluate the scaled Bessel kernel G_nu(z*zeta) for a grid's order.
pub fn scaled_kernel(a: f64, u: f64) -> Result<f64> {
    bessel_j_scaled(0.5 * (a - 1.0), u)
}

/// Uniform Cartesian grid on [-Xmax, Xmax)^d with Nx points per axis.
#[derive(Debug, Clone, PartialEq)]
pub struct CartesianGrid {
    d: usize,
    xmax: f64,
    nx: usize,
}

impl CartesianGrid {
    pub fn new(d: usize, xmax: f64, nx: usize) -> Result<Self> {
        if d == 0 {
            return Err(CoreError::domain("cartesian grid: d must be >= 1"));
        }
        if !(xmax > 0.0) {
            return Err(CoreError::domain(format!("cartesian grid: Xmax = {xmax}")));
        }
        if nx < 2 || !nx.is_power_of_two() {
            return Err(CoreError::domain(format!(
                "cartesian grid: Nx = {nx} must be a power of two >= 2"
            )));
        }
        Ok(CartesianGrid { d, xmax, nx })
    }

    pub fn d(&self) -> usize {
        self.d
    }
    pub fn xmax(&self) -> f64 {
        self.xmax
    }
    pub fn nx(&self) -> usize {
        self.nx
    }
    /// Spacing along each axis.
    pub fn dx(&self) -> f64 {
        2.0 * self.xmax / self.nx as f64
    }
    /// Volume element dx^d.
    pub fn cell_volume(&self) -> f64 {
        self.dx().powi(self.d as i32)
    }
    /// Total number of points.
    pub fn total(&self) -> usize {
        self.nx.pow(self.d as u32)
    }
    /// Node coordinate along one axis.
    pub fn axis_node(&self, i: usize) -> f64 {
        -self.xmax + i as f64 * self.dx()
    }
    /// Frequency (in the e^{-2 pi i x xi} convention) for FFT bin m.
    pub fn axis_freq(&self, m: usize) -> f64 {
        let signed = if m < self.nx / 2 {
            m as f64
        } else {
            m as f64 - self.nx as f64
        };
        signed / (2.0 * self.xmax)
    }
    /// Frequency spacing 1/(2 Xmax).
    pub fn dfreq(&self) -> f64 {
        1.0 / (2.0 * self.xmax)
    }
    /// Decompose a flat index into per-axis indices (row-major, axis 0 slowest).
    pub fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0usize; self.d];
        for ax in (0..self.d).rev() {
            idx[ax] = flat % self.nx;
            flat /= self.nx;
        }
        idx
    }
    /// Coordinates of a flat index.
    pub fn point(&self, flat: usize) -> Vec<f64> {
        self.unflatten(flat)
            .into_iter()
            .map(|i| self.axis_node(i))
            .collect()
    }
    /// |xi|^2 for a flat frequency index.
    pub fn freq_norm_sqr(&self, flat: usize) -> f64 {
        self.unflatten(flat)
            .into_iter()
            .map(|m| {
                let f = self.axis_freq(m);
                f * f
            })
            .sum()
    }
}

/// Uniform time grid t_j = j T / Nt, j = 0..=Nt.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    t_max: f64,
    nt: usize,
}

impl TimeGrid {
    pub fn new(t_max: f64, nt: usize) -> Result<Self> {
        if !(t_max > 0.0) {
            return Err(CoreError::domain(format!("time grid: T = {t_max} <= 0")));
        }
        if nt == 0 {
            return Err(CoreError::domain("time grid: Nt must be >= 1"));
        }
        Ok(TimeGrid { t_max, nt })
    }
    pub fn t_max(&self) -> f64 {
        self.t_max
    }
    pub fn nt(&self) -> usize {
        self.nt
    }
    /// Number of nodes, Nt + 1.
    pub fn len(&self) -> usize {
        self.nt + 1
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    pub fn dt(&self) -> f64 {
        self.t_max / self.nt as f64
    }
    pub fn node(&self, j: usize) -> f64 {
        j as f64 * self.dt()
    }
    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.nt).map(|j| self.node(j)).collect()
    }
    /// Trapezoid weights over [0, T].
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let h = self.dt();
        (0..=self.nt)
            .map(|j| if j == 0 || j == self.nt { 0.5 * h } else { h })
            .collect()
    }
}
