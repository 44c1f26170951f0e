//! Picard fixed-point solver for the nonlinear boundary problem
//! U = T*_a(u0) + D_a(F) + i mu Theta*_a(|U|^{p-1} U at the trace),
//! with contraction monitoring, smallness diagnostics and the
//! mass-derivative identity check.

use crate::duhamel::{op_d, op_thetastar, op_tstar};
use crate::error::{CoreError, Result};
use crate::field::{BoundaryTrace, HalfSpaceField, SpaceTimeField};
use crate::grid::TimeGrid;
use crate::norms::{self, MixedNormSpec, Regime, TimeLayer, ZWeight};
use crate::propagators::Propagator;
use ndarray::Array2;
use num_complex::Complex64 as C64;

/// One nonlinear boundary problem instance.
#[derive(Debug, Clone)]
pub struct NonlinearProblem {
    pub mu: C64,
    pub p: f64,
    pub u0: HalfSpaceField,
    pub forcing: Option<SpaceTimeField>,
    pub tgrid: TimeGrid,
    /// Tangential exponents of the working space, r = p + 1 and q solving
    /// the regime relation for (q, r, inf).
    pub q: f64,
    pub r: f64,
    /// Companion exponent from the first relation, anomalous regime only.
    pub q_inf: Option<f64>,
}

impl NonlinearProblem {
    /// Assemble a problem with exponents derived from p: r = p + 1, q from
    /// the regime relation, q_inf from the first relation when a < 0.
    pub fn from_power(
        a: f64,
        d: usize,
        mu: C64,
        p: f64,
        u0: HalfSpaceField,
        forcing: Option<SpaceTimeField>,
        tgrid: TimeGrid,
    ) -> Result<Self> {
        let pc = norms::critical_p(a, d)?;
        if !(1.0 < p && p <= pc + 1e-12) {
            return Err(CoreError::domain(format!(
                "nonlinear problem: p = {p} outside (1, p_c = {pc}]"
            )));
        }
        let r = p + 1.0;
        let q = norms::solve_q(a, d, r, Regime::of(a))?;
        let q_inf = if a < 0.0 {
            Some(norms::solve_q(a, d, r, Regime::NonnegA)?)
        } else {
            None
        };
        Ok(NonlinearProblem {
            mu,
            p,
            u0,
            forcing,
            tgrid,
            q,
            r,
            q_inf,
        })
    }
}

/// Per-solve record: iterate count, X-norm differences, contraction
/// factors, mass profile, boundary L^p_x profile and the fixed-point
/// residual of the returned iterate.
#[derive(Debug, Clone)]
pub struct SolveDiagnostics {
    pub iterations: usize,
    pub converged: bool,
    pub x_diffs: Vec<f64>,
    pub contraction: Vec<f64>,
    pub mass: Vec<f64>,
    pub boundary_lp: Vec<f64>,
    pub residual: f64,
}

/// The X-norm of the working space:
/// ||U||_{L^inf_T L^2_a} + ||U k||_{L^inf_z L^q_T L^r_x}, with the weight k
/// present only in the anomalous regime and the z = 0 layer included in the
/// sup.
pub fn x_norm(u: &SpaceTimeField, q: f64, r: f64) -> Result<f64> {
    let zweight = if u.a < 0.0 { ZWeight::K } else { ZWeight::One };
    let spec = MixedNormSpec {
        m: f64::INFINITY,
        time: TimeLayer::Single(q),
        r,
        zweight,
    };
    Ok(norms::linf_t_l2a(u) + norms::mixed_norm(u, &spec)?)
}

fn nonlinear_trace(u: &SpaceTimeField, p: f64, mu: C64) -> Result<BoundaryTrace> {
    let b = u
        .boundary
        .as_ref()
        .ok_or_else(|| CoreError::domain("picard: iterate carries no trace layer"))?;
    let mut phi = BoundaryTrace::zeros(u.xgrid.clone(), u.tgrid.clone());
    for ((ix, jt), v) in b.indexed_iter() {
        // the Neumann condition of the problem is
        // lim z^a dU/dz = -mu |U|^{p-1} U, and the mild solution satisfies
        // lim z^a dU/dz = Phi for the datum handed to Theta*
        phi.values[(ix, jt)] = -mu * v * v.norm().powf(p - 1.0);
    }
    Ok(phi)
}

fn field_diff_xnorm(u: &SpaceTimeField, v: &SpaceTimeField, q: f64, r: f64) -> Result<f64> {
    let mut d = u.clone();
    d.values -= &v.values;
    if let (Some(db), Some(vb)) = (&mut d.boundary, &v.boundary) {
        *db -= vb;
    }
    x_norm(&d, q, r)
}

/// Result of a Picard solve.
pub struct PicardSolve {
    pub field: SpaceTimeField,
    pub diagnostics: SolveDiagnostics,
}

/// Iterate Lambda(U) = T*(u0) + D(F) + i mu Theta*(|U|^{p-1} U(.,0,.)) from
/// the linear part until the X-norm update falls below `tol`.
///
/// Divergence (X-norm beyond 1e6 times the linear part) is a numerical
/// failure; exhausting `max_iter` returns the last iterate with
/// `converged = false` in the diagnostics.
pub fn picard_solve(
    prop: &Propagator,
    prob: &NonlinearProblem,
    tol: f64,
    max_iter: usize,
) -> Result<PicardSolve> {
    picard_solve_from(prop, prob, tol, max_iter, None)
}

/// As [`picard_solve`] but with an explicit initial iterate (used by the
/// uniqueness probe).
pub fn picard_solve_from(
    prop: &Propagator,
    prob: &NonlinearProblem,
    tol: f64,
    max_iter: usize,
    init: Option<&SpaceTimeField>,
) -> Result<PicardSolve> {
    let a = prop.a();
    if !(-1.0 < a && a < 1.0) {
        return Err(CoreError::domain(format!(
            "picard: a = {a} outside (-1, 1)"
        )));
    }
    // linear part, computed once
    let mut linear = op_tstar(prop, &prob.u0, &prob.tgrid)?;
    if let Some(f) = &prob.forcing {
        linear.add_assign(&op_d(prop, f)?);
    }
    let linear_norm = x_norm(&linear, prob.q, prob.r)?;
    let ceiling = 1e6 * linear_norm.max(1e-12);

    let mut u = match init {
        Some(u0) => u0.clone(),
        None => linear.clone(),
    };
    let mut x_diffs = Vec::new();
    let mut contraction = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    for n in 0..max_iter {
        iterations = n + 1;
        let phi = nonlinear_trace(&u, prob.p, prob.mu)?;
        let mut next = linear.clone();
        next.add_assign(&op_thetastar(prop, &phi, prop.zgrid())?);
        let diff = field_diff_xnorm(&next, &u, prob.q, prob.r)?;
        if let Some(&prev) = x_diffs.last() {
            if prev > 0.0 {
                contraction.push(diff / prev);
            }
        }
        x_diffs.push(diff);
        u = next;
        let norm_now = x_norm(&u, prob.q, prob.r)?;
        if !norm_now.is_finite() || norm_now > ceiling {
            return Err(CoreError::numerical(format!(
                "picard: iterate diverged (X-norm {norm_now})"
            )));
        }
        if diff <= tol {
            converged = true;
            break;
        }
    }
    let boundary_lp = boundary_lp_profile(&u, prob.p);
    let diagnostics = SolveDiagnostics {
        iterations,
        converged,
        x_diffs: x_diffs.clone(),
        contraction,
        mass: u.mass_profile(),
        boundary_lp,
        residual: *x_diffs.last().unwrap_or(&0.0),
    };
    Ok(PicardSolve {
        field: u,
        diagnostics,
    })
}

/// int |U(x, 0, t)|^p dx per time node.
pub fn boundary_lp_profile(u: &SpaceTimeField, p: f64) -> Vec<f64> {
    let vol = u.xgrid.cell_volume();
    match &u.boundary {
        None => vec![0.0; u.tgrid.len()],
        Some(b) => (0..u.tgrid.len())
            .map(|jt| {
                b.column(jt)
                    .iter()
                    .map(|v| v.norm().powf(p))
                    .sum::<f64>()
                    * vol
            })
            .collect(),
    }
}

/// Every norm entering the smallness hypothesis of the well-posedness
/// theorems; no pass/fail claim is made about the unknown constant.
#[derive(Debug, Clone)]
pub struct SmallnessReport {
    pub u0_l2a: f64,
    pub f_l1t_l2a: f64,
    /// ||F||_{L^1_{a,z} L^{q'}_t L^{r'}_x} (a >= 0) or
    /// ||F k^{-1}||_{L^1_{a,z} L^{q'}_T L^{r'}_x} (a < 0).
    pub f_dual_mixed: f64,
    /// gamma = 1/q - 1/q_inf, anomalous regime only.
    pub gamma: Option<f64>,
    /// max(1, T^gamma) weight of the anomalous smallness combination.
    pub window_factor: Option<f64>,
}

pub fn smallness_report(a: f64, prob: &NonlinearProblem) -> Result<SmallnessReport> {
    let qp = norms::dual_exponent(prob.q);
    let rp = norms::dual_exponent(prob.r);
    let (f_l1t_l2a, f_dual_mixed) = match &prob.forcing {
        None => (0.0, 0.0),
        Some(f) => {
            let zweight = if a < 0.0 { ZWeight::KInverse } else { ZWeight::One };
            let spec = MixedNormSpec {
                m: 1.0,
                time: TimeLayer::Single(qp),
                r: rp,
                zweight,
            };
            (norms::l1_t_l2a(f), norms::mixed_norm(f, &spec)?)
        }
    };
    let (gamma, window_factor) = match prob.q_inf {
        Some(qi) => {
            let g = 1.0 / prob.q - 1.0 / qi;
            (Some(g), Some(1.0f64.max(prob.tgrid.t_max().powf(g))))
        }
        None => (None, None),
    };
    Ok(SmallnessReport {
        u0_l2a: prob.u0.norm_l2a(),
        f_l1t_l2a,
        f_dual_mixed,
        gamma,
        window_factor,
    })
}

/// Mass-identity profiles: centered-difference d/dt of the discrete mass
/// against -2 Im(mu) int |U(x,0,t)|^p dx, per interior time node.
#[derive(Debug, Clone)]
pub struct MassIdentity {
    pub t: Vec<f64>,
    pub dmass_dt: Vec<f64>,
    pub boundary_term: Vec<f64>,
    pub residual: Vec<f64>,
}

pub fn mass_derivative_residual(u: &SpaceTimeField, mu: C64, p: f64) -> MassIdentity {
    let mass = u.mass_profile();
    // the pairing of the trace against the boundary flux carries the power
    // p + 1: conj(U) |U|^{p-1} U = |U|^{p+1}
    let blp = boundary_lp_profile(u, p + 1.0);
    let h = u.tgrid.dt();
    let mut t = Vec::new();
    let mut dm = Vec::new();
    let mut bt = Vec::new();
    let mut res = Vec::new();
    for j in 1..u.tgrid.len() - 1 {
        let d = (mass[j + 1] - mass[j - 1]) / (2.0 * h);
        let rhs = -2.0 * mu.im * blp[j];
        t.push(u.tgrid.node(j));
        dm.push(d);
        bt.push(rhs);
        res.push(d - rhs);
    }
    MassIdentity {
        t,
        dmass_dt: dm,
        boundary_term: bt,
        residual: res,
    }
}

/// Subcritical window selection: delta = 1/q' - p/q > 0 supplies the T^delta
/// contraction gain; the returned T0 is the largest dyadic fraction of the
/// problem window at which the first Picard contraction factor is <= 1/2.
pub fn subcritical_window(
    prop: &Propagator,
    prob: &NonlinearProblem,
    d: usize,
) -> Result<(f64, f64)> {
    let pc = norms::critical_p(prop.a(), d)?;
    if prob.p >= pc - 1e-12 {
        return Err(CoreError::domain(format!(
            "subcritical_window: p = {} is not subcritical (p_c = {pc})",
            prob.p
        )));
    }
    let delta = 1.0 - 1.0 / prob.q - prob.p / prob.q;
    if delta <= 0.0 {
        return Err(CoreError::numerical(format!(
            "subcritical_window: delta = {delta} not positive"
        )));
    }
    if prob.mu.norm() == 0.0 {
        return Ok((prob.tgrid.t_max(), delta));
    }
    let mut t0 = prob.tgrid.t_max();
    for _ in 0..20 {
        let nt = prob.tgrid.nt();
        let tg = TimeGrid::new(t0, nt)?;
        let windowed = NonlinearProblem {
            tgrid: tg.clone(),
            forcing: restrict_forcing(&prob.forcing, &tg),
            ..prob.clone()
        };
        let solve = picard_solve(prop, &windowed, 1e-10, 4)?;
        let factor = solve
            .diagnostics
            .contraction
            .first()
            .copied()
            .unwrap_or(0.0);
        if factor <= 0.5 {
            return Ok((t0, delta));
        }
        t0 *= 0.5;
    }
    Err(CoreError::NonConvergence(
        "subcritical_window: no window reached contraction 1/2".into(),
    ))
}

fn restrict_forcing(f: &Option<SpaceTimeField>, tg: &TimeGrid) -> Option<SpaceTimeField> {
    // the solver data used here are time-independent or synthetic; restrict
    // by resampling the first slice across the shorter window
    f.as_ref().map(|f| {
        let mut out = SpaceTimeField::zeros(f.a, f.xgrid.clone(), f.zgrid.clone(), tg.clone());
        let mut boundary = Array2::zeros((f.xgrid.total(), tg.len()));
        for jt in 0..tg.len() {
            // nearest slice of the original window
            let frac = tg.node(jt) / f.tgrid.t_max();
            let src = ((frac * f.tgrid.nt() as f64).round() as usize).min(f.tgrid.nt());
            out.values
                .slice_mut(ndarray::s![.., .., jt])
                .assign(&f.values.slice(ndarray::s![.., .., src]));
            if let Some(b) = &f.boundary {
                boundary.column_mut(jt).assign(&b.column(src));
            }
        }
        out.boundary = f.boundary.as_ref().map(|_| boundary);
        out
    })
}
