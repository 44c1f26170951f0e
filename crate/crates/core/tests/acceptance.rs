//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! with the measured quantity next to its pinned tolerance. Criterion 14
//! (bit-identical CLI outputs) lives in the CLI crate's acceptance test.
//!
//! Run with `cargo test --release -p bsns-core --test acceptance -- --nocapture`.

use bsns_core::duhamel::{boundary_trace, op_theta, op_thetastar, op_tstar, solve_linear};
use bsns_core::field::{BoundaryTrace, HalfSpaceField, SpaceTimeField};
use bsns_core::grid::{build_radial_grid, CartesianGrid, RadialScheme, TimeGrid};
use bsns_core::kernels::kernel_sa;
use bsns_core::nonlinear::{
    mass_derivative_residual, picard_solve, picard_solve_from, NonlinearProblem,
};
use bsns_core::norms;
use bsns_core::propagators::{propagate_z_kernel, Propagator};
use bsns_core::transforms::HankelTransform;
use bsns_core::verify::{
    dispersive_fit, kernel_selfcorrelation_check, restriction_check, scaling_invariance,
    strichartz_ratio, trace_continuity_profile, EnsembleSpec, EstimateKind,
};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(id: u32, name: &str, pass: bool, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("criterion {id:>2} [{tag}] {name}: {detail}");
    assert!(pass, "criterion {id} {name}: {detail}");
}

fn propagator(a: f64, nz: usize, nx: usize, xmax: f64) -> Propagator {
    let hankel = HankelTransform::new(a, nz).unwrap();
    let xgrid = CartesianGrid::new(1, xmax, nx).unwrap();
    Propagator::new(a, xgrid, hankel).unwrap()
}

#[test]
fn criterion_01_mass_conservation() {
    let mut worst = 0.0f64;
    for &a in &[-0.5, 0.0, 0.5, 1.0] {
        let p = propagator(a, 160, 32, 10.0);
        let u0 = HalfSpaceField::from_fn(a, p.xgrid().clone(), p.zgrid().clone(), |x, z| {
            C64::new((-x[0] * x[0] - z * z / 40.0).exp(), 0.0)
        });
        let n0 = u0.norm_l2a();
        for &t in &[0.1, 1.0, 10.0] {
            let ut = p.apply(t, &u0).unwrap();
            worst = worst.max((ut.norm_l2a() / n0 - 1.0).abs());
        }
    }
    report(
        1,
        "mass conservation",
        worst <= 1e-6,
        &format!("max |ratio - 1| = {worst:.3e} (tol 1e-6)"),
    );
}

#[test]
fn criterion_02_spectral_vs_kernel() {
    let mut worst = 0.0f64;
    for &a in &[-0.5, 0.0, 1.0] {
        let p = propagator(a, 128, 16, 10.0);
        let quad = build_radial_grid(a, 12.0, 384, RadialScheme::GaussJacobi).unwrap();
        let phi_quad: Vec<C64> = quad
            .nodes()
            .iter()
            .map(|&z| C64::new((-0.25 * z * z).exp(), 0.0))
            .collect();
        let phi_spec: Vec<C64> = p
            .zgrid()
            .nodes()
            .iter()
            .map(|&z| C64::new((-0.25 * z * z).exp(), 0.0))
            .collect();
        for &t in &[0.5, 1.0, 2.0] {
            let spectral = p.propagate_z(t, &phi_spec).unwrap();
            let kernel = propagate_z_kernel(a, t, &quad, &phi_quad, p.zgrid().nodes()).unwrap();
            let diff: Vec<C64> = spectral.iter().zip(&kernel).map(|(s, k)| s - k).collect();
            worst = worst.max(p.zgrid().norm_l2a(&diff) / p.zgrid().norm_l2a(&phi_spec));
        }
    }
    report(
        2,
        "spectral vs kernel propagator",
        worst <= 1e-4,
        &format!("max relative L2_a difference = {worst:.3e} (tol 1e-4)"),
    );
}

#[test]
fn criterion_03_a_zero_cosine_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let z: f64 = rng.gen_range(0.01..5.0);
        let zeta: f64 = rng.gen_range(0.01..5.0);
        let t: f64 = if rng.gen_bool(0.5) {
            rng.gen_range(0.05..4.0)
        } else {
            -rng.gen_range(0.05..4.0f64)
        };
        let k = kernel_sa(0.0, z, zeta, t).unwrap();
        let cosine = (z * zeta / (2.0 * t.abs())).cos();
        let expect = C64::from_polar(1.0 / (std::f64::consts::PI * t.abs()).sqrt(), {
            -t.signum() * std::f64::consts::PI / 4.0 + (z * z + zeta * zeta) / (4.0 * t)
        }) * cosine;
        worst = worst.max((k - expect).norm());
    }
    report(
        3,
        "a = 0 cosine closed form",
        worst <= 1e-12,
        &format!("max pointwise deviation = {worst:.3e} (tol 1e-12)"),
    );
}

#[test]
fn criterion_04_dispersive_rates() {
    let mut detail = String::new();
    let mut pass = true;
    for &a in &[0.0, 0.5] {
        let fit = dispersive_fit(a, &[1.0, 2.0, 4.0, 8.0, 16.0]).unwrap();
        let slope = fit.slope.unwrap();
        let ok = (slope - fit.theoretical).abs() <= 0.05 * fit.theoretical.abs();
        pass &= ok;
        detail.push_str(&format!("a={a}: slope {slope:.4} vs {:.2}; ", fit.theoretical));
    }
    let ts = [0.1, 0.2, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0];
    let fit = dispersive_fit(-0.5, &ts).unwrap();
    let ratios: Vec<f64> = fit.ratios.iter().map(|r| r.1).collect();
    let rmax = ratios.iter().copied().fold(0.0f64, f64::max);
    let rmin = ratios.iter().copied().fold(f64::MAX, f64::min);
    let bounded = rmax / rmin <= 10.0;
    let inc = ratios.windows(2).all(|w| w[1] >= w[0]);
    let dec = ratios.windows(2).all(|w| w[1] <= w[0]);
    let no_trend = !inc && !dec;
    pass &= bounded && no_trend;
    detail.push_str(&format!(
        "a=-0.5: envelope ratio in [{rmin:.3}, {rmax:.3}], monotone = {}",
        inc || dec
    ));
    report(4, "dispersive rates", pass, &detail);
}

#[test]
fn criterion_05_kernel_selfcorrelation() {
    let mut worst = 0.0f64;
    for &a in &[-0.5, 0.0, 0.5] {
        for row in kernel_selfcorrelation_check(a, &[0.25, 1.0, 4.0]).unwrap() {
            worst = worst.max(row.residual);
        }
    }
    report(
        5,
        "kernel self-correlation identity",
        worst <= 1e-3,
        &format!("max residual = {worst:.3e} (tol 1e-3)"),
    );
}

#[test]
fn criterion_06_hankel_transform() {
    let tr = HankelTransform::new(-0.5, 96).unwrap();
    let g = tr.grid();
    let phi: Vec<C64> = g
        .nodes()
        .iter()
        .map(|&z| C64::new((-0.5 * z * z).exp(), 0.0))
        .collect();
    let h = tr.apply(&phi).unwrap();
    let fixed_point = h
        .iter()
        .zip(g.nodes())
        .map(|(v, &z)| (v - C64::new((-0.5 * z * z).exp(), 0.0)).norm())
        .fold(0.0, f64::max);
    let hh = tr.apply(&h).unwrap();
    let diff: Vec<C64> = hh.iter().zip(&phi).map(|(u, v)| u - v).collect();
    let roundtrip = g.norm_l2a(&diff) / g.norm_l2a(&phi);
    let plancherel = (g.norm_l2a(&h) - g.norm_l2a(&phi)).abs() / g.norm_l2a(&phi);
    let pass = fixed_point <= 1e-6 && roundtrip <= 1e-6 && plancherel <= 1e-6;
    report(
        6,
        "hankel fixed point / self-inverse / plancherel",
        pass,
        &format!(
            "gaussian {fixed_point:.2e}, round trip {roundtrip:.2e}, plancherel {plancherel:.2e} (tol 1e-6)"
        ),
    );
}

#[test]
fn criterion_07_duality_pairings() {
    let a = -0.4;
    let p = propagator(a, 40, 16, 10.0);
    let tg = TimeGrid::new(1.0, 80).unwrap();
    let zq = build_radial_grid(a, 12.0, 256, RadialScheme::GaussJacobi).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2026);
    let mut worst_theta = 0.0f64;
    let mut worst_tstar = 0.0f64;
    for _ in 0..8 {
        let (cx, cz, ct): (f64, f64, f64) = (
            rng.gen_range(0.5..1.2),
            rng.gen_range(0.4..1.0),
            rng.gen_range(0.3..0.9),
        );
        let amp: f64 = rng.gen_range(0.5..1.5);
        let vfun = move |x: &[f64], z: f64, t: f64| {
            C64::new(
                amp * (-cx * x[0] * x[0] - cz * z * z).exp() * (2.0 - t),
                0.3 * (-x[0] * x[0] - cz * z * z).exp() * (ct + t),
            )
        };
        let phi = BoundaryTrace::from_fn(p.xgrid().clone(), tg.clone(), |x, t| {
            C64::new(
                amp * (-cx * x[0] * x[0]).exp() * (1.0 + ct * t),
                0.2 * t * (-0.5 * x[0] * x[0]).exp(),
            )
        });
        // boundary pairing
        let ts_field = op_thetastar(&p, &phi, &zq).unwrap();
        let vq = SpaceTimeField::from_fn(a, p.xgrid().clone(), zq.clone(), tg.clone(), vfun);
        let lhs = ts_field.inner(&vq);
        let v = SpaceTimeField::from_fn(a, p.xgrid().clone(), p.zgrid().clone(), tg.clone(), vfun);
        let tv = op_theta(&p, &v).unwrap();
        let tw = tg.trapezoid_weights();
        let vol = p.xgrid().cell_volume();
        let mut rhs = C64::new(0.0, 0.0);
        for jt in 0..tg.len() {
            let mut acc = C64::new(0.0, 0.0);
            for ix in 0..p.xgrid().total() {
                acc += phi.values[(ix, jt)] * tv.values[(ix, jt)].conj();
            }
            rhs += acc * vol * tw[jt];
        }
        worst_theta = worst_theta.max((lhs - rhs).norm() / lhs.norm());
        // bulk pairing <T* u0, F> = <u0, T F>
        let u0 = HalfSpaceField::from_fn(a, p.xgrid().clone(), p.zgrid().clone(), |x, z| {
            C64::new(amp * (-cx * x[0] * x[0] - cz * z * z).exp(), 0.1)
        });
        let f = v.clone();
        let fwd = op_tstar(&p, &u0, &tg).unwrap();
        let lhs2 = fwd.inner(&f);
        let tf = p.adjoint_t(&f).unwrap();
        let rhs2 = u0.inner(&tf);
        worst_tstar = worst_tstar.max((lhs2 - rhs2).norm() / lhs2.norm());
    }
    let pass = worst_theta <= 1e-4 && worst_tstar <= 1e-4;
    report(
        7,
        "adjoint duality pairings",
        pass,
        &format!("theta gap {worst_theta:.3e}, tstar gap {worst_tstar:.3e} (tol 1e-4)"),
    );
}

#[test]
fn criterion_08_strichartz_stability() {
    let mut detail = String::new();
    let mut pass = true;
    // a = 0, d = 1, (q, r) = (3, 3)
    {
        let p = propagator(0.0, 48, 32, 10.0);
        let tg = TimeGrid::new(1.0, 16).unwrap();
        for kind in [EstimateKind::MassSide, EstimateKind::BulkSide] {
            let t16 =
                strichartz_ratio(&p, &tg, 3.0, 3.0, None, kind, EnsembleSpec::new(7, 16)).unwrap();
            let t32 =
                strichartz_ratio(&p, &tg, 3.0, 3.0, None, kind, EnsembleSpec::new(7, 32)).unwrap();
            let growth = (t32.max_ratio - t16.max_ratio) / t16.max_ratio;
            pass &= growth <= 0.2;
            detail.push_str(&format!("a=0 {kind:?}: growth {growth:.3}; "));
        }
    }
    // a = -0.5, d = 1, (q, r) = (3, 3), q_inf = 4.8 from the first relation
    {
        let p = propagator(-0.5, 48, 32, 10.0);
        let tg = TimeGrid::new(1.0, 16).unwrap();
        let q_inf = norms::solve_q(-0.5, 1, 3.0, norms::Regime::NonnegA).unwrap();
        let t16 = strichartz_ratio(
            &p,
            &tg,
            3.0,
            3.0,
            Some(q_inf),
            EstimateKind::BulkSide,
            EnsembleSpec::new(7, 16),
        )
        .unwrap();
        let t32 = strichartz_ratio(
            &p,
            &tg,
            3.0,
            3.0,
            Some(q_inf),
            EstimateKind::BulkSide,
            EnsembleSpec::new(7, 32),
        )
        .unwrap();
        let growth = (t32.max_ratio - t16.max_ratio) / t16.max_ratio;
        pass &= growth <= 0.2;
        detail.push_str(&format!("a=-0.5 weighted: growth {growth:.3}"));
    }
    report(8, "strichartz ratio stability", pass, &detail);
}

#[test]
fn criterion_09_scaling_invariance() {
    let lams = [0.5, 1.0, 2.0];
    let scan =
        scaling_invariance(0.0, 1, 3.0, 3.0, f64::INFINITY, &lams, 96, 256, 24, 2.0).unwrap();
    let qpert = 1.0 / (1.0 / 3.0 + 0.1);
    let pert =
        scaling_invariance(0.0, 1, qpert, 3.0, f64::INFINITY, &lams, 96, 256, 24, 2.0).unwrap();
    let residual = norms::admissibility_residual(0.0, 1, qpert, 3.0, f64::INFINITY);
    let monotone = pert.rows.windows(2).all(|w| w[1].ratio < w[0].ratio)
        || pert.rows.windows(2).all(|w| w[1].ratio > w[0].ratio);
    let drift_ok = (pert.drift_slope + residual).abs() <= 0.3 * residual.abs();
    let pass = scan.spread <= 0.05 && monotone && drift_ok;
    report(
        9,
        "scaling invariance",
        pass,
        &format!(
            "admissible spread {:.4} (tol 0.05); perturbed drift {:.3} vs residual {:.3}, monotone {monotone}",
            scan.spread, pert.drift_slope, -residual
        ),
    );
}

#[test]
fn criterion_10_trace_continuity() {
    let p = propagator(0.0, 32, 16, 10.0);
    let tg = TimeGrid::new(1.0, 32).unwrap();
    let zq = build_radial_grid(0.0, 8.0, 48, RadialScheme::GaussJacobi).unwrap();
    let profiles =
        trace_continuity_profile(&p, &tg, 3.0, 3.0, &zq, EnsembleSpec::new(3, 4)).unwrap();
    let mut pass = true;
    let mut worst_frac = 0.0f64;
    for pr in &profiles {
        pass &= pr.decreasing;
        worst_frac = worst_frac.max(pr.profile[0].1 / pr.trace_norm);
    }
    pass &= worst_frac <= 0.1;
    report(
        10,
        "trace continuity",
        pass,
        &format!(
            "profiles decreasing: {}, smallest-node fraction {worst_frac:.3e} (tol 0.1)",
            profiles.iter().all(|p| p.decreasing)
        ),
    );
}

#[test]
fn criterion_11_nonlinear_mass_identity() {
    let a = 0.0;
    let prop = propagator(a, 64, 16, 10.0);
    let tg = TimeGrid::new(1.0, 24).unwrap();
    let u0 = HalfSpaceField::from_fn(a, prop.xgrid().clone(), prop.zgrid().clone(), |x, z| {
        C64::new(0.2 * (-x[0] * x[0] - 0.5 * z * z).exp(), 0.0)
    });
    // Im(mu) = 0: conserved mass
    let prob = NonlinearProblem::from_power(a, 1, C64::new(1.0, 0.0), 2.0, u0.clone(), None, tg.clone())
        .unwrap();
    let out = picard_solve(&prop, &prob, 1e-9, 30).unwrap();
    let m = &out.diagnostics.mass;
    let drift = m
        .iter()
        .map(|&mm| ((mm - m[0]) / m[0]).abs())
        .fold(0.0, f64::max);
    // Im(mu) = 0.5: strictly decreasing mass matching the flux
    let prob2 =
        NonlinearProblem::from_power(a, 1, C64::new(0.0, 0.5), 2.0, u0, None, tg).unwrap();
    let out2 = picard_solve(&prop, &prob2, 1e-9, 30).unwrap();
    let m2 = &out2.diagnostics.mass;
    let decreasing = m2.windows(2).all(|w| w[1] < w[0]);
    let ident = mass_derivative_residual(&out2.field, prob2.mu, prob2.p);
    let mut worst_rel = 0.0f64;
    for j in 2..ident.t.len() {
        worst_rel = worst_rel.max((ident.residual[j] / ident.boundary_term[j]).abs());
    }
    let pass = drift <= 1e-3 && decreasing && worst_rel <= 0.05;
    report(
        11,
        "nonlinear mass identity",
        pass,
        &format!(
            "Im mu=0 drift {drift:.2e} (tol 1e-3); Im mu=0.5 decreasing {decreasing}, identity residual {worst_rel:.3} (tol 0.05)"
        ),
    );
}

#[test]
fn criterion_12_picard_contraction() {
    let a = 0.0;
    let prop = propagator(a, 48, 16, 10.0);
    let tg = TimeGrid::new(1.0, 24).unwrap();
    // amplitude 0.25 is the recorded regression value below the bisected
    // smallness threshold for (a, d, p, mu) = (0, 1, 2, 1)
    let u0 = HalfSpaceField::from_fn(a, prop.xgrid().clone(), prop.zgrid().clone(), |x, z| {
        C64::new(0.25 * (-x[0] * x[0] - 0.5 * z * z).exp(), 0.0)
    });
    let prob =
        NonlinearProblem::from_power(a, 1, C64::new(1.0, 0.0), 2.0, u0, None, tg.clone()).unwrap();
    let tol = 1e-8;
    let out = picard_solve(&prop, &prob, tol, 40).unwrap();
    let geometric = out.diagnostics.contraction.iter().all(|&c| c <= 0.6);
    let mut zero = SpaceTimeField::zeros(a, prop.xgrid().clone(), prop.zgrid().clone(), tg);
    zero.boundary = Some(ndarray::Array2::zeros((
        prop.xgrid().total(),
        prob.tgrid.len(),
    )));
    let alt = picard_solve_from(&prop, &prob, tol, 40, Some(&zero)).unwrap();
    let mut gap_field = out.field.clone();
    gap_field.values -= &alt.field.values;
    if let (Some(b), Some(ab)) = (&mut gap_field.boundary, &alt.field.boundary) {
        *b -= ab;
    }
    let gap = bsns_core::nonlinear::x_norm(&gap_field, prob.q, prob.r).unwrap();
    let pass = out.diagnostics.converged && geometric && gap <= 5.0 * tol;
    report(
        12,
        "picard contraction and uniqueness",
        pass,
        &format!(
            "contraction max {:.3} (tol 0.6), uniqueness gap {gap:.2e} (tol {:.0e})",
            out.diagnostics
                .contraction
                .iter()
                .copied()
                .fold(0.0, f64::max),
            5.0 * tol
        ),
    );
}

#[test]
fn criterion_13_restriction() {
    let mut pass = true;
    let mut detail = String::new();
    for &a in &[0.0, 1.0] {
        let p = propagator(a, 48, 32, 10.0);
        let tg = TimeGrid::new(1.0, 16).unwrap();
        let rows = restriction_check(&p, &tg, EnsembleSpec::new(5, 8)).unwrap();
        let worst = rows
            .iter()
            .map(|r| r.plancherel_residual)
            .fold(0.0, f64::max);
        let rmax = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
        pass &= worst <= 1e-4 && rmax.is_finite();
        let qp = 2.0 * (1.0 + a + 3.0) / (1.0 + a + 5.0);
        detail.push_str(&format!(
            "a={a}: q'={qp:.4}, plancherel {worst:.2e}, max ratio {rmax:.3}; "
        ));
    }
    report(13, "restriction theorem", pass, &detail);
}

#[test]
fn criterion_extra_boundary_trace_of_thetastar() {
    // supporting check used by criterion 10's machinery: the trace field of
    // a Theta* solve matches its z = 0 layer by construction and the
    // continuity profile decreases
    let p = propagator(-0.3, 32, 16, 10.0);
    let tg = TimeGrid::new(1.0, 32).unwrap();
    let phi = BoundaryTrace::from_fn(p.xgrid().clone(), tg.clone(), |x, t| {
        C64::new((-x[0] * x[0]).exp() * (1.0 + t), 0.0)
    });
    let zq = build_radial_grid(-0.3, 8.0, 48, RadialScheme::GaussJacobi).unwrap();
    let v = op_thetastar(&p, &phi, &zq).unwrap();
    let res = boundary_trace(&v, 3.0, 3.0, 5).unwrap();
    let decreasing = res.continuity.windows(2).all(|w| w[0].1 <= w[1].1);
    assert!(decreasing, "{:?}", res.continuity);
    // linear solve with only u0 equals op_tstar (delegation sanity)
    let u0 = HalfSpaceField::from_fn(p.a(), p.xgrid().clone(), p.zgrid().clone(), |x, z| {
        C64::new((-x[0] * x[0] - z * z).exp(), 0.0)
    });
    let s = solve_linear(&p, &tg, Some(&u0), None, None).unwrap();
    let direct = op_tstar(&p, &u0, &tg).unwrap();
    let mut worst = 0.0f64;
    for (u, v) in s.values.iter().zip(direct.values.iter()) {
        worst = worst.max((u - v).norm());
    }
    assert!(worst < 1e-13);
}
