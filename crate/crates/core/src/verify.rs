//! Estimate-verification harness: dispersive-rate fits, Strichartz-ratio
//! ensembles, scaling-invariance scans, the kernel self-correlation
//! identity, trace-continuity profiles and the restriction-theorem checks.
//!
//! Constants in the continuous estimates are unknown, so every check is a
//! bounded-ratio or fitted-rate statement over seeded deterministic
//! ensembles.

use crate::duhamel::{op_thetastar, solve_linear};
use crate::error::{CoreError, Result};
use crate::field::{BoundaryTrace, HalfSpaceField, SpaceTimeField};
use crate::grid::{build_radial_grid, CartesianGrid, RadialScheme, TimeGrid, WeightedRadialGrid};
use crate::kernels::{boundary_amplitude, kernel_sa};
use crate::linalg::linear_fit;
use crate::norms::{
    self, lq_t_lr_a, mixed_norm, weight_k, MixedNormSpec, Regime, TimeLayer, ZWeight,
};
use crate::propagators::{propagate_z_kernel, Propagator};
use crate::specfun::osc_incomplete;
use crate::transforms::{FourierDirection, FourierX};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// Deterministic ensemble of Gaussian-type data; the seed is part of the
/// configuration so every table is reproducible.
#[derive(Debug, Clone, Copy)]
pub struct EnsembleSpec {
    pub seed: u64,
    pub count: usize,
}

impl EnsembleSpec {
    pub fn new(seed: u64, count: usize) -> Self {
        EnsembleSpec { seed, count }
    }
}

/// Random smooth datum: Gaussian in x and z with random widths, centers,
/// phases and a mild even polynomial factor in z.
pub struct MemberParams {
    pub amp: f64,
    pub phase: f64,
    pub x_center: f64,
    pub x_width: f64,
    pub x_momentum: f64,
    pub z_width: f64,
    pub z_poly: f64,
    pub t_center: f64,
    pub t_width: f64,
}

pub fn member_params(rng: &mut ChaCha8Rng) -> MemberParams {
    MemberParams {
        amp: rng.gen_range(0.5..1.5),
        phase: rng.gen_range(0.0..2.0 * PI),
        x_center: rng.gen_range(-2.0..2.0),
        x_width: rng.gen_range(0.5..1.5),
        x_momentum: rng.gen_range(-1.0..1.0),
        z_width: rng.gen_range(0.4..1.2),
        z_poly: rng.gen_range(-0.4..0.4),
        t_center: rng.gen_range(0.2..0.8),
        t_width: rng.gen_range(0.15..0.4),
    }
}

impl MemberParams {
    pub fn eval_xz(&self, x: &[f64], z: f64) -> C64 {
        let xg: f64 = x
            .iter()
            .map(|&xi| -(xi - self.x_center) * (xi - self.x_center) / self.x_width)
            .sum::<f64>()
            .exp();
        let zg = (-self.z_width * z * z).exp() * (1.0 + self.z_poly * z * z);
        C64::from_polar(self.amp * xg * zg, self.phase + self.x_momentum * x[0])
    }
    pub fn eval_t(&self, t: f64) -> f64 {
        (-(t - self.t_center) * (t - self.t_center) / (self.t_width * self.t_width)).exp()
    }
}

/// Result of a dispersive-rate fit.
#[derive(Debug, Clone)]
pub struct DispersiveFit {
    pub a: f64,
    /// Fitted log-log slope (a >= 0 regime), with the theoretical rate.
    pub slope: Option<f64>,
    pub theoretical: f64,
    /// (t, sup-norm or ratio) samples.
    pub samples: Vec<(f64, f64)>,
    /// Envelope ratios for the anomalous regime.
    pub ratios: Vec<(f64, f64)>,
}

/// Fit the transverse dispersive decay rate through the kernel path.
///
/// a >= 0: log-log slope of sup_z |S_a(t) phi| against t for a narrow
/// Gaussian phi, expected -(a+1)/2.
/// -1 < a < 0: the weighted envelope ratio
/// ||S_a(t) phi k||_inf / ((t^{-(a+1)/2} + t^{-1/2}) ||phi / k||_{L^1_a}),
/// which must stay bounded with no trend.
pub fn dispersive_fit(a: f64, ts: &[f64]) -> Result<DispersiveFit> {
    let quad = build_radial_grid(a, 14.0, 480, RadialScheme::GaussJacobi)?;
    // a >= 0: a narrow boundary Gaussian enters the asymptotic regime early.
    // a < 0: a bump at z = 3 exercises both dispersive mechanisms (the
    // z < 1 boundary rate and the z > 1 free rate), which keeps the
    // two-term envelope ratio bounded without a monotone trend.
    let phi: Vec<C64> = quad
        .nodes()
        .iter()
        .map(|&z| {
            let v = if a >= 0.0 {
                (-4.0 * z * z).exp()
            } else {
                (-(z - 3.0) * (z - 3.0)).exp()
            };
            C64::new(v, 0.0)
        })
        .collect();
    if a >= 0.0 {
        let mut samples = Vec::new();
        for &t in ts {
            // evaluation targets cover the spreading support
            let zmax = 3.0 * t + 6.0;
            let targets: Vec<f64> = (0..400).map(|i| i as f64 * zmax / 399.0).collect();
            let u = propagate_z_kernel(a, t, &quad, &phi, &targets)?;
            let sup = u.iter().map(|v| v.norm()).fold(0.0, f64::max);
            samples.push((t, sup));
        }
        let xs: Vec<f64> = samples.iter().map(|s| s.0.ln()).collect();
        let ys: Vec<f64> = samples.iter().map(|s| s.1.ln()).collect();
        let (slope, _) = linear_fit(&xs, &ys);
        Ok(DispersiveFit {
            a,
            slope: Some(slope),
            theoretical: -0.5 * (a + 1.0),
            samples,
            ratios: Vec::new(),
        })
    } else {
        // || phi k^{-1} ||_{L^1_a}
        let weighted_l1: f64 = quad
            .nodes()
            .iter()
            .zip(quad.weights())
            .zip(&phi)
            .map(|((&z, &w), v)| w * v.norm() / weight_k(a, z).unwrap_or(1.0))
            .sum();
        let mut ratios = Vec::new();
        let mut samples = Vec::new();
        for &t in ts {
            let zmax = 3.0 * t + 8.0;
            let targets: Vec<f64> = (1..400).map(|i| i as f64 * zmax / 399.0).collect();
            let u = propagate_z_kernel(a, t, &quad, &phi, &targets)?;
            let sup = u
                .iter()
                .zip(&targets)
                .map(|(v, &z)| v.norm() * weight_k(a, z).unwrap_or(1.0))
                .fold(0.0, f64::max);
            let envelope = t.powf(-0.5 * (a + 1.0)) + t.powf(-0.5);
            samples.push((t, sup));
            ratios.push((t, sup / (envelope * weighted_l1)));
        }
        Ok(DispersiveFit {
            a,
            slope: None,
            theoretical: -0.5 * (a + 1.0),
            samples,
            ratios,
        })
    }
}

/// Which Strichartz estimate a ratio row refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimateKind {
    /// L^inf_t L^2_a left-hand side.
    MassSide,
    /// L^inf_z L^q_t L^r_x (weighted sum norm in the anomalous regime).
    BulkSide,
}

#[derive(Debug, Clone)]
pub struct RatioRow {
    pub member: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone)]
pub struct RatioTable {
    pub kind: EstimateKind,
    pub rows: Vec<RatioRow>,
    pub max_ratio: f64,
}

/// Strichartz ratio ensemble for the full solution U = T*(u0) + D(F) +
/// Theta*(Phi): LHS/RHS of the regime-appropriate estimate per member.
///
/// a >= 0 (exponents q, r): RHS carries ||u0||, ||F||, ||Phi|| in the dual
/// norms of Theorem "following Strichartz estimates hold"; -1 < a < 0 uses
/// the weighted sum/intersection norms with the companion exponent q_inf.
pub fn strichartz_ratio(
    prop: &Propagator,
    tgrid: &TimeGrid,
    q: f64,
    r: f64,
    q_inf: Option<f64>,
    kind: EstimateKind,
    ens: EnsembleSpec,
) -> Result<RatioTable> {
    let a = prop.a();
    if a < 0.0 && q_inf.is_none() {
        return Err(CoreError::domain(
            "strichartz_ratio: anomalous regime needs q_inf",
        ));
    }
    let qp = norms::dual_exponent(q);
    let rp = norms::dual_exponent(r);
    let qip = q_inf.map(norms::dual_exponent);
    let mut rng = ChaCha8Rng::seed_from_u64(ens.seed);
    let mut rows = Vec::with_capacity(ens.count);
    for member in 0..ens.count {
        let pu = member_params(&mut rng);
        let pf = member_params(&mut rng);
        let pphi = member_params(&mut rng);
        let u0 = HalfSpaceField::from_fn(a, prop.xgrid().clone(), prop.zgrid().clone(), |x, z| {
            pu.eval_xz(x, z)
        });
        let f = SpaceTimeField::from_fn(
            a,
            prop.xgrid().clone(),
            prop.zgrid().clone(),
            tgrid.clone(),
            |x, z, t| pf.eval_xz(x, z) * pf.eval_t(t),
        );
        let phi = BoundaryTrace::from_fn(prop.xgrid().clone(), tgrid.clone(), |x, t| {
            pphi.eval_xz(x, 0.0) * pphi.eval_t(t)
        });
        let u = solve_linear(prop, tgrid, Some(&u0), Some(&f), Some(&phi))?;

        let phi_dual = phi.lq_t_lr_x(qip.unwrap_or(qp), rp);
        let (lhs, rhs) = match kind {
            EstimateKind::MassSide => {
                let lhs = norms::linf_t_l2a(&u);
                let rhs = u0.norm_l2a() + norms::l1_t_l2a(&f) + phi_dual;
                (lhs, rhs)
            }
            EstimateKind::BulkSide => {
                if a >= 0.0 {
                    let lhs = mixed_norm(&u, &MixedNormSpec::plain(f64::INFINITY, q, r))?;
                    let fdual = mixed_norm(&f, &MixedNormSpec::plain(1.0, qp, rp))?;
                    (lhs, u0.norm_l2a() + fdual + phi_dual)
                } else {
                    let qi = q_inf.unwrap();
                    let lhs = mixed_norm(
                        &u,
                        &MixedNormSpec {
                            m: f64::INFINITY,
                            time: TimeLayer::Sum(q, qi),
                            r,
                            zweight: ZWeight::K,
                        },
                    )?;
                    let fdual = mixed_norm(
                        &f,
                        &MixedNormSpec {
                            m: 1.0,
                            time: TimeLayer::Intersection(qp, qip.unwrap()),
                            r: rp,
                            zweight: ZWeight::KInverse,
                        },
                    )?;
                    (lhs, u0.norm_l2a() + fdual + phi_dual)
                }
            }
        };
        rows.push(RatioRow {
            member,
            lhs,
            rhs,
            ratio: lhs / rhs,
        });
    }
    let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(RatioTable {
        kind,
        rows,
        max_ratio,
    })
}

#[derive(Debug, Clone)]
pub struct ScalingRow {
    pub lambda: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone)]
pub struct ScalingScan {
    pub rows: Vec<ScalingRow>,
    /// max/min - 1 of the ratio across lambda.
    pub spread: f64,
    /// Fitted d(ln ratio)/d(ln lambda).
    pub drift_slope: f64,
}

/// Scaling-invariance scan of the homogeneous estimate
/// ||T*(u0)||_{L^m_{a,z} L^q_t L^r_x} <= C ||u0||_{L^2_a}, a >= 0:
/// the LHS/RHS ratio for u0(lambda .) is lambda-independent exactly when
/// the triple is admissible. Windows and extents are lambda-adapted because
/// the continuum statement lives on t in R.
pub fn scaling_invariance(
    a: f64,
    d: usize,
    q: f64,
    r: f64,
    m: f64,
    lambdas: &[f64],
    nz: usize,
    nx: usize,
    nt: usize,
    base_t: f64,
) -> Result<ScalingScan> {
    if a < 0.0 {
        return Err(CoreError::domain(
            "scaling_invariance: the propagator obeys the scaling only for a >= 0",
        ));
    }
    let mut rows = Vec::new();
    for &lam in lambdas {
        // data u0(lam x, lam z) on lambda-adapted boxes
        let hankel = crate::transforms::HankelTransform::new(a, nz)?;
        let xgrid = CartesianGrid::new(d, 16.0 / lam.min(1.0), nx)?;
        let prop = Propagator::new(a, xgrid, hankel)?;
        let tgrid = TimeGrid::new(base_t / (lam * lam), nt)?;
        let u0 = HalfSpaceField::from_fn(a, prop.xgrid().clone(), prop.zgrid().clone(), |x, z| {
            let xs = lam * x[0];
            let zs = lam * z;
            C64::new((-xs * xs - 0.7 * zs * zs).exp(), 0.0)
        });
        let u = crate::duhamel::op_tstar(&prop, &u0, &tgrid)?;
        let lhs = mixed_norm(&u, &MixedNormSpec::plain(m, q, r))?;
        let rhs = u0.norm_l2a();
        rows.push(ScalingRow {
            lambda: lam,
            lhs,
            rhs,
            ratio: lhs / rhs,
        });
    }
    let rmax = rows.iter().map(|r| r.ratio).fold(f64::MIN, f64::max);
    let rmin = rows.iter().map(|r| r.ratio).fold(f64::MAX, f64::min);
    let xs: Vec<f64> = rows.iter().map(|r| r.lambda.ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.ratio.ln()).collect();
    let (drift_slope, _) = linear_fit(&xs, &ys);
    Ok(ScalingScan {
        rows,
        spread: rmax / rmin - 1.0,
        drift_slope,
    })
}

#[derive(Debug, Clone)]
pub struct SelfCorrelationRow {
    pub a: f64,
    pub gap: f64,
    pub numeric: C64,
    pub closed: C64,
    pub residual: f64,
}

/// Kernel self-correlation identity:
/// int_0^inf S_a(z,0,t-tau) conj(S_a(z,0,t-sigma)) z^a dz
///   = 2^{-a}/Gamma((a+1)/2) e^{i (a+1) pi sgn(tau-sigma)/4} |tau-sigma|^{-(a+1)/2}.
/// The constant follows from the substitution y = z^2 (tau-sigma)/(4AB)
/// applied to the closed boundary kernels. The numeric side uses panel
/// quadrature in z with an oscillatory tail, fully independent of the
/// closed form.
pub fn kernel_selfcorrelation_check(a: f64, gaps: &[f64]) -> Result<Vec<SelfCorrelationRow>> {
    if !(-1.0 < a && a < 1.0) {
        return Err(CoreError::domain(format!(
            "kernel_selfcorrelation_check: a = {a} outside (-1, 1)"
        )));
    }
    let mu = 0.5 * (a + 1.0);
    let mut out = Vec::new();
    for &gap in gaps {
        if gap <= 0.0 {
            return Err(CoreError::domain(
                "kernel_selfcorrelation_check: tau = sigma is divergent",
            ));
        }
        // t - tau = A, t - sigma = B = A + gap, so tau - sigma = gap > 0
        let aa = 0.7;
        let bb = aa + gap;
        // direct z-quadrature of kernel * conj(kernel) * z^a on [0, Z],
        // graded oscillation-resolving panels, plus the substituted tail
        let c = gap / (4.0 * aa * bb);
        let zcut = (25.0 / c).sqrt();
        let mut numeric = C64::new(0.0, 0.0);
        // dyadic panels through the z^a endpoint singularity, then
        // oscillation-graded panels out to the cut
        let mut z_lo = 0.0f64;
        let mut z_next_dyadic = 1e-9 * zcut;
        while z_lo < zcut {
            let z_hi = if z_lo < 1.0 {
                let h = z_next_dyadic.min(zcut);
                z_next_dyadic *= 2.0;
                h
            } else {
                let freq = (2.0 * c * z_lo).max(0.5);
                (z_lo + PI / (2.0 * freq)).min(zcut)
            };
            // 12-point Gauss-Legendre on [z_lo, z_hi]
            let cqs = 0.5 * (z_lo + z_hi);
            let hqs = 0.5 * (z_hi - z_lo);
            for i in 0..6 {
                for s in [-1.0f64, 1.0] {
                    let z = cqs + s * hqs * GL12_X[i];
                    let k1 = kernel_sa(a, z, 0.0, aa)?;
                    let k2 = kernel_sa(a, z, 0.0, bb)?;
                    numeric += GL12_W[i] * hqs * k1 * k2.conj() * z.powf(a);
                }
            }
            z_lo = z_hi;
        }
        // tail: int_Z^inf |S_a(z,0,A)||S_a(z,0,B)| e^{i c z^2} z^a dz
        //     = C_a^2 (AB)^{-mu} (1/2) c^{-mu} int_{cZ^2}^inf y^{mu-1} e^{iy} dy
        let c_a = boundary_amplitude(a)?;
        let tail = osc_incomplete(mu, c * zcut * zcut)?
            * 0.5
            * c.powf(-mu)
            * c_a
            * c_a
            * (aa * bb).powf(-mu);
        numeric += tail;
        let closed = C64::from_polar(
            2.0f64.powf(-a) / crate::specfun::gamma_fn(mu)? * gap.powf(-mu),
            0.25 * (a + 1.0) * PI,
        );
        out.push(SelfCorrelationRow {
            a,
            gap,
            numeric,
            closed,
            residual: (numeric - closed).norm() / closed.norm(),
        });
    }
    Ok(out)
}

const GL12_X: [f64; 6] = [
    0.125_233_408_511_468_9,
    0.367_831_498_998_180_2,
    0.587_317_954_286_617_4,
    0.769_902_674_194_304_9,
    0.904_117_256_370_474_9,
    0.981_560_634_246_719_3,
];
const GL12_W: [f64; 6] = [
    0.249_147_045_813_402_8,
    0.233_492_536_538_354_8,
    0.203_167_426_723_065_9,
    0.160_078_328_543_346_2,
    0.106_939_325_995_318_4,
    0.047_175_336_386_511_83,
];

#[derive(Debug, Clone)]
pub struct TraceProfile {
    pub member: usize,
    /// (z, ||V(.,z,.) - V(.,0,.)||_{L^q_t L^r_x}) over the smallest nodes.
    pub profile: Vec<(f64, f64)>,
    pub trace_norm: f64,
    pub decreasing: bool,
}

/// Trace-continuity profiles of Theta*(Phi) over an ensemble of boundary
/// data; the difference norms must decrease toward z = 0 and end below
/// a tenth of the trace norm.
pub fn trace_continuity_profile(
    prop: &Propagator,
    tgrid: &TimeGrid,
    q: f64,
    r: f64,
    zgrid: &WeightedRadialGrid,
    ens: EnsembleSpec,
) -> Result<Vec<TraceProfile>> {
    let mut rng = ChaCha8Rng::seed_from_u64(ens.seed);
    let mut out = Vec::new();
    for member in 0..ens.count {
        let pp = member_params(&mut rng);
        let phi = BoundaryTrace::from_fn(prop.xgrid().clone(), tgrid.clone(), |x, t| {
            pp.eval_xz(x, 0.0) * pp.eval_t(t)
        });
        let v = op_thetastar(prop, &phi, zgrid)?;
        let res = crate::duhamel::boundary_trace(&v, q, r, 5)?;
        let trace_norm = res.trace.lq_t_lr_x(q, r);
        let decreasing = res
            .continuity
            .windows(2)
            .all(|w| w[0].1 <= w[1].1 * (1.0 + 1e-12));
        out.push(TraceProfile {
            member,
            profile: res.continuity,
            trace_norm,
            decreasing,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct RestrictionRow {
    pub member: usize,
    /// ||T_a(F)||_{L^2_a} through the physical grid.
    pub physical: f64,
    /// The same quantity through the Fourier-Hankel paraboloid restriction.
    pub spectral: f64,
    pub plancherel_residual: f64,
    /// ||T_a F||_{L^2_a} / ||F||_{L^{q'}_t L^{r'}_a}.
    pub ratio: f64,
}

/// Restriction-theorem check at the diagonal exponents
/// q' = r' = 2(d+a+3)/(d+a+5): bounded ratio and the Plancherel identity
/// between the physical adjoint and the paraboloid restriction of the
/// Fourier-Hankel transform.
pub fn restriction_check(
    prop: &Propagator,
    tgrid: &TimeGrid,
    ens: EnsembleSpec,
) -> Result<Vec<RestrictionRow>> {
    let a = prop.a();
    if a < 0.0 {
        return Err(CoreError::domain("restriction_check: requires a >= 0"));
    }
    let d = prop.d() as f64;
    let qp = 2.0 * (d + a + 3.0) / (d + a + 5.0);
    let xplan = FourierX::new(prop.xgrid().clone());
    let mut rng = ChaCha8Rng::seed_from_u64(ens.seed);
    let mut out = Vec::new();
    for member in 0..ens.count {
        let pf = member_params(&mut rng);
        let f = SpaceTimeField::from_fn(
            a,
            prop.xgrid().clone(),
            prop.zgrid().clone(),
            tgrid.clone(),
            |x, z, t| pf.eval_xz(x, z) * pf.eval_t(t),
        );
        let tf = prop.adjoint_t(&f)?;
        let physical = tf.norm_l2a();
        // paraboloid restriction: for each (xi, zeta),
        // integrate e^{i t (4 pi^2 |xi|^2 + zeta^2)} H[hat F](xi, zeta, t) dt
        let nx = prop.xgrid().total();
        let nz = prop.zgrid().len();
        let tw = tgrid.trapezoid_weights();
        let mut restricted = ndarray::Array2::<C64>::zeros((nx, nz));
        for jt in 0..tgrid.len() {
            let t = tgrid.node(jt);
            // hat F in x, then Hankel in z
            let mut slice = f.values.slice(ndarray::s![.., .., jt]).to_owned();
            let mut cols: Vec<Vec<C64>> = (0..nz).map(|iz| slice.column(iz).to_vec()).collect();
            for col in cols.iter_mut() {
                xplan.transform_flat(col, FourierDirection::Forward);
            }
            for (iz, col) in cols.iter().enumerate() {
                for ix in 0..nx {
                    slice[(ix, iz)] = col[ix];
                }
            }
            for ix in 0..nx {
                let row: Vec<C64> = (0..nz).map(|iz| slice[(ix, iz)]).collect();
                let h = prop.hankel().apply(&row)?;
                let xi2 = prop.xgrid().freq_norm_sqr(ix);
                for (iz, &zeta) in prop.zgrid().nodes().iter().enumerate() {
                    let phase = t * (4.0 * PI * PI * xi2 + zeta * zeta);
                    restricted[(ix, iz)] += h[iz] * C64::from_polar(tw[jt], phase);
                }
            }
        }
        // frequency-side L^2_a norm: dxi^d in x, grid weights in zeta
        let dvol = prop.xgrid().dfreq().powi(prop.d() as i32);
        let mut acc = 0.0;
        for (iz, &w) in prop.zgrid().weights().iter().enumerate() {
            acc += w
                * restricted
                    .column(iz)
                    .iter()
                    .map(|v| v.norm_sqr())
                    .sum::<f64>();
        }
        let spectral = (acc * dvol).sqrt();
        let rhs = lq_t_lr_a(&f, qp, qp);
        out.push(RestrictionRow {
            member,
            physical,
            spectral,
            plancherel_residual: (physical - spectral).abs() / physical,
            ratio: physical / rhs,
        });
    }
    Ok(out)
}

/// Admissibility helper re-exported for the harness and CLI: q for the
/// triple (q, r, inf) in the given regime.
pub fn solve_q_for(a: f64, d: usize, r: f64) -> Result<(f64, Option<f64>)> {
    let q = norms::solve_q(a, d, r, Regime::of(a))?;
    let q_inf = if a < 0.0 {
        Some(norms::solve_q(a, d, r, Regime::NonnegA)?)
    } else {
        None
    };
    Ok((q, q_inf))
}
