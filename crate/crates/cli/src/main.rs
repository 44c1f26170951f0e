//! `bsns`: solver and verification harness for the Schrodinger equation on
//! the upper half-space with Bessel transverse operator and weighted
//! Neumann boundary data.

mod config;
mod output;
mod snapshot;

use bsns_core::duhamel::solve_linear;
use bsns_core::field::{BoundaryTrace, HalfSpaceField, SpaceTimeField};
use bsns_core::fixture::kink_datum;
use bsns_core::grid::{build_radial_grid, CartesianGrid, RadialScheme, TimeGrid};
use bsns_core::kernels::{kernel_full_boundary, kernel_sa, kernel_sa_boundary};
use bsns_core::nonlinear::{
    mass_derivative_residual, picard_solve, smallness_report, NonlinearProblem,
};
use bsns_core::norms::{self, Regime};
use bsns_core::propagators::Propagator;
use bsns_core::transforms::HankelTransform;
use bsns_core::verify::{
    dispersive_fit, kernel_selfcorrelation_check, restriction_check, trace_continuity_profile,
    EnsembleSpec, EstimateKind,
};
use bsns_core::CoreError;
use clap::{Parser, Subcommand};
use config::{Config, DatumConfig};
use num_complex::Complex64 as C64;
use output::{fmt_f64, RunWriter};

/// Display-level snap for exponents assembled from float arithmetic
/// (3.0000000000000004 prints as 3).
fn fmt_exponent(v: f64) -> String {
    if v.is_infinite() {
        return "inf".into();
    }
    let snapped = (v * 1e12).round() / 1e12;
    format!("{snapped}")
}
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "bsns", about = "Half-space Bessel-Schrodinger solver and verification harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the linear problem U = T*(u0) + D(F) + Theta*(Phi).
    SolveLinear {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Picard-iterate the nonlinear boundary problem.
    SolveNonlinear {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit transverse dispersive decay rates.
    VerifyDispersive {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Strichartz LHS/RHS ratio tables over a seeded ensemble.
    VerifyStrichartz {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Ensemble size.
        #[arg(long, default_value_t = 16)]
        count: usize,
    },
    /// Restriction-theorem ratio table and Plancherel residuals.
    VerifyRestriction {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 8)]
        count: usize,
    },
    /// Mass conservation / dissipation identity on a nonlinear solve.
    VerifyMass {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Trace-continuity profiles of the boundary operator.
    VerifyTrace {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 4)]
        count: usize,
    },
    /// Kernel self-correlation identity residuals.
    VerifyKernel {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Exponent arithmetic: q for (q, r, inf) plus admissibility status.
    Admissible {
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        r: f64,
        /// Optional q to test directly instead of solving for it.
        #[arg(long)]
        q: Option<f64>,
        /// Optional m (defaults to infinity).
        #[arg(long)]
        m: Option<f64>,
    },
    /// Evaluate the closed-form kernels at a point.
    KernelEval {
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[arg(long)]
        z: f64,
        #[arg(long, default_value_t = 0.0)]
        zeta: f64,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        /// |x - y| tangential separation for the full boundary kernel.
        #[arg(long, default_value_t = 0.0)]
        dx: f64,
    },
}

enum RunError {
    Config(String),
    Numerical(String),
    NonConvergence(String),
}

impl From<CoreError> for RunError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Domain(m) | CoreError::GridMismatch(m) => RunError::Config(m),
            CoreError::Numerical(m) => RunError::Numerical(m),
            CoreError::NonConvergence(m) => RunError::NonConvergence(m),
        }
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Config(format!("i/o: {e}"))
    }
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("BSNS_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(RunError::Config(m)) => {
            eprintln!("error (config): {m}");
            ExitCode::from(1)
        }
        Err(RunError::Numerical(m)) => {
            eprintln!("error (numerical): {m}");
            ExitCode::from(2)
        }
        Err(RunError::NonConvergence(m)) => {
            eprintln!("error (non-convergence): {m}");
            ExitCode::from(3)
        }
    }
}

struct Workspace {
    cfg: Config,
    cfg_bytes: Vec<u8>,
    prop: Propagator,
    tgrid: TimeGrid,
}

fn load_workspace(path: &PathBuf) -> Result<Workspace, RunError> {
    let cfg_bytes =
        std::fs::read(path).map_err(|e| RunError::Config(format!("config {path:?}: {e}")))?;
    let cfg: Config =
        serde_json::from_slice(&cfg_bytes).map_err(|e| RunError::Config(format!("config: {e}")))?;
    if cfg.grid.scheme != "bessel_collocation" {
        return Err(RunError::Config(format!(
            "solver commands need grid.scheme = \"bessel_collocation\" (got {:?}); \
             the transform grid self-selects Zmax = sqrt(j_(Nz+1))",
            cfg.grid.scheme
        )));
    }
    let hankel = HankelTransform::new(cfg.a, cfg.grid.nz)?;
    let actual_zmax = hankel.grid().zmax();
    if actual_zmax < cfg.grid.zmax {
        return Err(RunError::Config(format!(
            "self-dual collocation extent {actual_zmax:.3} is below the requested Zmax {}; \
             raise Nz (extent grows like sqrt(pi Nz))",
            cfg.grid.zmax
        )));
    }
    let xgrid = CartesianGrid::new(cfg.d, cfg.grid.xmax, cfg.grid.nx)?;
    let prop = Propagator::new(cfg.a, xgrid, hankel)?;
    let tgrid = TimeGrid::new(cfg.time.t, cfg.time.nt)?;
    Ok(Workspace {
        cfg,
        cfg_bytes,
        prop,
        tgrid,
    })
}

fn build_u0(ws: &Workspace) -> Result<Option<HalfSpaceField>, RunError> {
    let p = &ws.prop;
    Ok(match &ws.cfg.data.u0 {
        DatumConfig::Zero => None,
        DatumConfig::Gaussian {
            amp,
            xwidth,
            zwidth,
            xcenter,
            ..
        } => {
            let (amp, xw, zw, xc) = (*amp, *xwidth, *zwidth, *xcenter);
            Some(HalfSpaceField::from_fn(
                p.a(),
                p.xgrid().clone(),
                p.zgrid().clone(),
                |x, z| {
                    let gx: f64 = x.iter().map(|&xi| -(xi - xc) * (xi - xc) / xw).sum();
                    C64::new(amp * (gx - z * z / zw).exp(), 0.0)
                },
            ))
        }
        DatumConfig::Fixture => Some(kink_datum(p.a(), p.xgrid().clone(), p.zgrid().clone())),
        DatumConfig::File { path } => {
            let values = snapshot::read_slice0(
                std::path::Path::new(path),
                p.d(),
                p.xgrid().nx(),
                p.zgrid().len(),
            )?;
            let mut f = HalfSpaceField::zeros(p.a(), p.xgrid().clone(), p.zgrid().clone());
            f.values = values;
            Some(f)
        }
    })
}

fn build_forcing(ws: &Workspace) -> Result<Option<SpaceTimeField>, RunError> {
    let p = &ws.prop;
    Ok(match &ws.cfg.data.forcing {
        DatumConfig::Zero => None,
        DatumConfig::Gaussian {
            amp,
            xwidth,
            zwidth,
            xcenter,
            twidth,
            tcenter,
        } => {
            let (amp, xw, zw, xc, tw, tc) = (*amp, *xwidth, *zwidth, *xcenter, *twidth, *tcenter);
            Some(SpaceTimeField::from_fn(
                p.a(),
                p.xgrid().clone(),
                p.zgrid().clone(),
                ws.tgrid.clone(),
                |x, z, t| {
                    let gx: f64 = x.iter().map(|&xi| -(xi - xc) * (xi - xc) / xw).sum();
                    let gt = -(t - tc) * (t - tc) / (tw * tw);
                    C64::new(amp * (gx - z * z / zw + gt).exp(), 0.0)
                },
            ))
        }
        DatumConfig::Fixture => {
            return Err(RunError::Config(
                "fixture datum is defined for u0, not for the forcing".into(),
            ))
        }
        DatumConfig::File { .. } => {
            return Err(RunError::Config(
                "file-backed forcing is not supported; supply u0 snapshots instead".into(),
            ))
        }
    })
}

fn build_phi(ws: &Workspace) -> Result<Option<BoundaryTrace>, RunError> {
    let p = &ws.prop;
    Ok(match &ws.cfg.data.phi {
        DatumConfig::Zero => None,
        DatumConfig::Gaussian {
            amp,
            xwidth,
            xcenter,
            twidth,
            tcenter,
            ..
        } => {
            let (amp, xw, xc, tw, tc) = (*amp, *xwidth, *xcenter, *twidth, *tcenter);
            Some(BoundaryTrace::from_fn(
                p.xgrid().clone(),
                ws.tgrid.clone(),
                |x, t| {
                    let gx: f64 = x.iter().map(|&xi| -(xi - xc) * (xi - xc) / xw).sum();
                    let gt = -(t - tc) * (t - tc) / (tw * tw);
                    C64::new(amp * (gx + gt).exp(), 0.0)
                },
            ))
        }
        _ => {
            return Err(RunError::Config(
                "Neumann datum must be zero or gaussian".into(),
            ))
        }
    })
}

fn exponents(ws: &Workspace) -> Result<(f64, f64, Option<f64>), RunError> {
    let cfg = &ws.cfg;
    let r = cfg.exponents.r.unwrap_or(cfg.p + 1.0);
    let q = match cfg.exponents.q {
        Some(q) => q,
        None => norms::solve_q(cfg.a, cfg.d, r, Regime::of(cfg.a))?,
    };
    let q_inf = match cfg.exponents.q_inf {
        Some(qi) => Some(qi),
        None if cfg.a < 0.0 => Some(norms::solve_q(cfg.a, cfg.d, r, Regime::NonnegA)?),
        None => None,
    };
    Ok((q, r, q_inf))
}

fn write_field_outputs(
    w: &mut RunWriter,
    ws: &Workspace,
    field: &SpaceTimeField,
) -> Result<(), RunError> {
    snapshot::write_snapshot(&w.path("u.bsns"), field)?;
    w.register("u.bsns")?;
    #[derive(serde::Serialize)]
    struct Sidecar<'a> {
        a: f64,
        d: usize,
        #[serde(rename = "Nx")]
        nx: usize,
        #[serde(rename = "Xmax")]
        xmax: f64,
        #[serde(rename = "Nz")]
        nz: usize,
        #[serde(rename = "Zmax")]
        zmax: f64,
        scheme: &'a str,
        #[serde(rename = "T")]
        t: f64,
        #[serde(rename = "Nt")]
        nt: usize,
        z_nodes: Vec<f64>,
        config_sha256: &'a str,
    }
    let sidecar = Sidecar {
        a: field.a,
        d: field.xgrid.d(),
        nx: field.xgrid.nx(),
        xmax: field.xgrid.xmax(),
        nz: field.zgrid.len(),
        zmax: field.zgrid.zmax(),
        scheme: "bessel_collocation",
        t: field.tgrid.t_max(),
        nt: field.tgrid.nt(),
        z_nodes: field.zgrid.nodes().to_vec(),
        config_sha256: w.config_sha256(),
    };
    let sidecar_owned = serde_json::to_value(&sidecar).expect("serializable");
    w.json("u.meta.json", &sidecar_owned)?;
    let mass = field.mass_profile();
    w.csv(
        "mass.csv",
        &["t", "mass"],
        (0..field.tgrid.len())
            .map(|j| vec![fmt_f64(field.tgrid.node(j)), fmt_f64(mass[j])]),
    )?;
    let _ = ws;
    Ok(())
}

fn run(cmd: Command) -> Result<(), RunError> {
    match cmd {
        Command::Admissible { a, d, r, q, m } => {
            let m = m.unwrap_or(f64::INFINITY);
            match q {
                Some(q) => {
                    let rep = norms::is_admissible(a, d, q, r, m);
                    println!(
                        "q={} r={} m={} regime={:?}: residual={:.3e}, status {}{}",
                        fmt_exponent(q),
                        fmt_exponent(r),
                        fmt_exponent(m),
                        rep.regime,
                        rep.residual,
                        if rep.admissible { "admissible" } else { "not admissible" },
                        if rep.excluded_endpoint { " (excluded endpoint)" } else { "" },
                    );
                }
                None => {
                    let q = norms::solve_q(a, d, r, Regime::of(a))?;
                    let rep = norms::is_admissible(a, d, q, r, m);
                    print!(
                        "q={} r={} m={}: status {}",
                        fmt_exponent(q),
                        fmt_exponent(r),
                        fmt_exponent(m),
                        if rep.admissible { "admissible" } else { "not admissible" }
                    );
                    if a < 0.0 {
                        let qi = norms::solve_q(a, d, r, Regime::NonnegA)?;
                        print!(", q_inf={} from the first relation", fmt_exponent(qi));
                    }
                    println!();
                }
            }
            Ok(())
        }
        Command::KernelEval { a, d, z, zeta, t, dx } => {
            let sa = kernel_sa(a, z, zeta, t)?;
            let sab = kernel_sa_boundary(a, z, t)?;
            let x = vec![dx; 1.max(d) - 0];
            let y = vec![0.0; x.len()];
            let full = kernel_full_boundary(a, d, &x[..d], z, &y[..d], t)?;
            println!("S_a(z, zeta, t)   = {} + {}i", fmt_f64(sa.re), fmt_f64(sa.im));
            println!("S_a(z, 0, t)      = {} + {}i", fmt_f64(sab.re), fmt_f64(sab.im));
            println!("S_a(X, Y0, t)     = {} + {}i", fmt_f64(full.re), fmt_f64(full.im));
            Ok(())
        }
        Command::SolveLinear { config, out } => {
            let ws = load_workspace(&config)?;
            let u0 = build_u0(&ws)?;
            let forcing = build_forcing(&ws)?;
            let phi = build_phi(&ws)?;
            let field = solve_linear(
                &ws.prop,
                &ws.tgrid,
                u0.as_ref(),
                forcing.as_ref(),
                phi.as_ref(),
            )?;
            let mut w = RunWriter::new(&out, "solve-linear", &ws.cfg_bytes)?;
            write_field_outputs(&mut w, &ws, &field)?;
            w.finish()?;
            println!("solve-linear: wrote {}", out.display());
            Ok(())
        }
        Command::SolveNonlinear { config, out } => {
            let ws = load_workspace(&config)?;
            let (field, diag, prob) = run_nonlinear(&ws)?;
            let mut w = RunWriter::new(&out, "solve-nonlinear", &ws.cfg_bytes)?;
            write_field_outputs(&mut w, &ws, &field)?;
            write_diagnostics(&mut w, &ws, &diag, &prob)?;
            w.finish()?;
            println!(
                "solve-nonlinear: {} in {} iterations (residual {:.3e})",
                if diag.converged { "converged" } else { "NOT converged" },
                diag.iterations,
                diag.residual
            );
            if !diag.converged {
                return Err(RunError::NonConvergence(format!(
                    "picard residual {:.3e} after {} iterations",
                    diag.residual, diag.iterations
                )));
            }
            Ok(())
        }
        Command::VerifyMass { config, out } => {
            let ws = load_workspace(&config)?;
            let (field, diag, prob) = run_nonlinear(&ws)?;
            let mut w = RunWriter::new(&out, "verify-mass", &ws.cfg_bytes)?;
            let mass = field.mass_profile();
            let drift = mass
                .iter()
                .map(|&m| ((m - mass[0]) / mass[0]).abs())
                .fold(0.0, f64::max);
            w.csv(
                "mass.csv",
                &["t", "mass", "relative_drift"],
                (0..field.tgrid.len()).map(|j| {
                    vec![
                        fmt_f64(field.tgrid.node(j)),
                        fmt_f64(mass[j]),
                        fmt_f64((mass[j] - mass[0]) / mass[0]),
                    ]
                }),
            )?;
            let ident = mass_derivative_residual(&field, prob.mu, prob.p);
            w.csv(
                "mass_identity.csv",
                &["t", "dmass_dt", "boundary_term", "residual"],
                (0..ident.t.len()).map(|j| {
                    vec![
                        fmt_f64(ident.t[j]),
                        fmt_f64(ident.dmass_dt[j]),
                        fmt_f64(ident.boundary_term[j]),
                        fmt_f64(ident.residual[j]),
                    ]
                }),
            )?;
            w.finish()?;
            println!(
                "verify-mass: Im(mu) = {}, max relative mass drift {:.3e} over [0, {}]",
                fmt_f64(prob.mu.im),
                drift,
                fmt_f64(field.tgrid.t_max())
            );
            let _ = diag;
            Ok(())
        }
        Command::VerifyDispersive { config, out } => {
            let ws = load_workspace(&config)?;
            let a = ws.cfg.a;
            let ts: Vec<f64> = if a >= 0.0 {
                vec![1.0, 2.0, 4.0, 8.0, 16.0]
            } else {
                vec![0.1, 0.2, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0]
            };
            let fit = dispersive_fit(a, &ts)?;
            let mut w = RunWriter::new(&out, "verify-dispersive", &ws.cfg_bytes)?;
            w.csv(
                "dispersive.csv",
                &["t", "sup_value", "envelope_ratio"],
                fit.samples.iter().enumerate().map(|(i, &(t, v))| {
                    vec![
                        fmt_f64(t),
                        fmt_f64(v),
                        fmt_f64(fit.ratios.get(i).map(|r| r.1).unwrap_or(f64::NAN)),
                    ]
                }),
            )?;
            w.csv(
                "dispersive_summary.csv",
                &["a", "fitted_slope", "theoretical_rate"],
                [vec![
                    fmt_f64(a),
                    fmt_f64(fit.slope.unwrap_or(f64::NAN)),
                    fmt_f64(fit.theoretical),
                ]],
            )?;
            w.finish()?;
            match fit.slope {
                Some(s) => println!(
                    "verify-dispersive: fitted slope {s:.4} vs theoretical {:.4}",
                    fit.theoretical
                ),
                None => println!(
                    "verify-dispersive: envelope ratios in [{:.4}, {:.4}]",
                    fit.ratios.iter().map(|r| r.1).fold(f64::MAX, f64::min),
                    fit.ratios.iter().map(|r| r.1).fold(0.0, f64::max)
                ),
            }
            Ok(())
        }
        Command::VerifyStrichartz { config, out, count } => {
            let ws = load_workspace(&config)?;
            let (q, r, q_inf) = exponents(&ws)?;
            let ens = EnsembleSpec::new(ws.cfg.seed, count);
            let mut w = RunWriter::new(&out, "verify-strichartz", &ws.cfg_bytes)?;
            for (kind, name) in [
                (EstimateKind::MassSide, "strichartz_mass.csv"),
                (EstimateKind::BulkSide, "strichartz_bulk.csv"),
            ] {
                let table = bsns_core::verify::strichartz_ratio(
                    &ws.prop, &ws.tgrid, q, r, q_inf, kind, ens,
                )?;
                w.csv(
                    name,
                    &["member", "lhs", "rhs", "ratio"],
                    table.rows.iter().map(|row| {
                        vec![
                            row.member.to_string(),
                            fmt_f64(row.lhs),
                            fmt_f64(row.rhs),
                            fmt_f64(row.ratio),
                        ]
                    }),
                )?;
                println!(
                    "verify-strichartz {:?}: max ratio {:.4} over {} members",
                    kind, table.max_ratio, count
                );
            }
            w.finish()?;
            Ok(())
        }
        Command::VerifyRestriction { config, out, count } => {
            let ws = load_workspace(&config)?;
            if ws.cfg.a < 0.0 {
                return Err(RunError::Config(
                    "verify-restriction needs a >= 0".into(),
                ));
            }
            let rows = restriction_check(&ws.prop, &ws.tgrid, EnsembleSpec::new(ws.cfg.seed, count))?;
            let mut w = RunWriter::new(&out, "verify-restriction", &ws.cfg_bytes)?;
            w.csv(
                "restriction.csv",
                &["member", "physical_l2a", "spectral_l2a", "plancherel_residual", "ratio"],
                rows.iter().map(|row| {
                    vec![
                        row.member.to_string(),
                        fmt_f64(row.physical),
                        fmt_f64(row.spectral),
                        fmt_f64(row.plancherel_residual),
                        fmt_f64(row.ratio),
                    ]
                }),
            )?;
            w.finish()?;
            let worst = rows.iter().map(|r| r.plancherel_residual).fold(0.0, f64::max);
            println!("verify-restriction: max Plancherel residual {worst:.3e}");
            Ok(())
        }
        Command::VerifyTrace { config, out, count } => {
            let ws = load_workspace(&config)?;
            if !(-1.0 < ws.cfg.a && ws.cfg.a < 1.0) {
                return Err(RunError::Config("verify-trace needs -1 < a < 1".into()));
            }
            let (q, r, _) = exponents(&ws)?;
            let zq = build_radial_grid(ws.cfg.a, 8.0, 48, RadialScheme::GaussJacobi)?;
            let profiles = trace_continuity_profile(
                &ws.prop,
                &ws.tgrid,
                q,
                r,
                &zq,
                EnsembleSpec::new(ws.cfg.seed, count),
            )?;
            let mut w = RunWriter::new(&out, "verify-trace", &ws.cfg_bytes)?;
            let mut rows = Vec::new();
            for p in &profiles {
                for &(z, dn) in &p.profile {
                    rows.push(vec![
                        p.member.to_string(),
                        fmt_f64(z),
                        fmt_f64(dn),
                        fmt_f64(p.trace_norm),
                    ]);
                }
            }
            w.csv(
                "trace_continuity.csv",
                &["member", "z", "difference_norm", "trace_norm"],
                rows,
            )?;
            w.finish()?;
            println!(
                "verify-trace: {} profiles, all decreasing: {}",
                profiles.len(),
                profiles.iter().all(|p| p.decreasing)
            );
            Ok(())
        }
        Command::VerifyKernel { config, out } => {
            let ws = load_workspace(&config)?;
            if !(-1.0 < ws.cfg.a && ws.cfg.a < 1.0) {
                return Err(RunError::Config("verify-kernel needs -1 < a < 1".into()));
            }
            let rows = kernel_selfcorrelation_check(ws.cfg.a, &[0.25, 1.0, 4.0])?;
            let mut w = RunWriter::new(&out, "verify-kernel", &ws.cfg_bytes)?;
            w.csv(
                "kernel_selfcorrelation.csv",
                &["a", "gap", "numeric_re", "numeric_im", "closed_re", "closed_im", "residual"],
                rows.iter().map(|row| {
                    vec![
                        fmt_f64(row.a),
                        fmt_f64(row.gap),
                        fmt_f64(row.numeric.re),
                        fmt_f64(row.numeric.im),
                        fmt_f64(row.closed.re),
                        fmt_f64(row.closed.im),
                        fmt_f64(row.residual),
                    ]
                }),
            )?;
            w.finish()?;
            let worst = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
            println!("verify-kernel: max self-correlation residual {worst:.3e}");
            Ok(())
        }
    }
}

fn run_nonlinear(
    ws: &Workspace,
) -> Result<
    (
        SpaceTimeField,
        bsns_core::nonlinear::SolveDiagnostics,
        NonlinearProblem,
    ),
    RunError,
> {
    let u0 = build_u0(ws)?.unwrap_or_else(|| {
        let mut f = HalfSpaceField::zeros(
            ws.prop.a(),
            ws.prop.xgrid().clone(),
            ws.prop.zgrid().clone(),
        );
        f.boundary = Some(ndarray_zeros(ws.prop.xgrid().total()));
        f
    });
    let forcing = build_forcing(ws)?;
    let mu = C64::new(ws.cfg.mu.re, ws.cfg.mu.im);
    let prob = NonlinearProblem::from_power(
        ws.cfg.a,
        ws.cfg.d,
        mu,
        ws.cfg.p,
        u0,
        forcing,
        ws.tgrid.clone(),
    )?;
    let solve = picard_solve(&ws.prop, &prob, ws.cfg.solver.tol, ws.cfg.solver.max_iter)?;
    Ok((solve.field, solve.diagnostics, prob))
}

fn ndarray_zeros(n: usize) -> ndarray::Array1<C64> {
    ndarray::Array1::zeros(n)
}

fn write_diagnostics(
    w: &mut RunWriter,
    ws: &Workspace,
    diag: &bsns_core::nonlinear::SolveDiagnostics,
    prob: &NonlinearProblem,
) -> Result<(), RunError> {
    w.csv(
        "iterations.csv",
        &["iteration", "x_norm_diff", "contraction_factor"],
        diag.x_diffs.iter().enumerate().map(|(i, &d)| {
            vec![
                (i + 1).to_string(),
                fmt_f64(d),
                fmt_f64(if i == 0 {
                    f64::NAN
                } else {
                    diag.contraction[i - 1]
                }),
            ]
        }),
    )?;
    w.csv(
        "boundary_lp.csv",
        &["t", "boundary_lp"],
        diag.boundary_lp
            .iter()
            .enumerate()
            .map(|(j, &v)| vec![fmt_f64(ws.tgrid.node(j)), fmt_f64(v)]),
    )?;
    let report = smallness_report(ws.cfg.a, prob)?;
    #[derive(serde::Serialize)]
    struct Smallness {
        u0_l2a: f64,
        f_l1t_l2a: f64,
        f_dual_mixed: f64,
        gamma: Option<f64>,
        window_factor: Option<f64>,
        converged: bool,
        iterations: usize,
        residual: f64,
    }
    w.json(
        "smallness.json",
        &Smallness {
            u0_l2a: report.u0_l2a,
            f_l1t_l2a: report.f_l1t_l2a,
            f_dual_mixed: report.f_dual_mixed,
            gamma: report.gamma,
            window_factor: report.window_factor,
            converged: diag.converged,
            iterations: diag.iterations,
            residual: diag.residual,
        },
    )?;
    Ok(())
}
