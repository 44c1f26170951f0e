//! Closed-form propagator kernels: the transverse kernel S_a(z, zeta, t),
//! its boundary limit S_a(z, 0, t), the free tangential kernel S(x, y, t),
//! and the full half-space kernel, the product of the two.
//!
//! All sign-dependent phases are assembled explicitly as (modulus, phase)
//! pairs; no generic complex powers, so the branch is never ambiguous.

use crate::error::{CoreError, Result};
use crate::specfun::{bessel_j_scaled, gamma_fn};
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

fn check_t(t: f64) -> Result<()> {
    if t == 0.0 || !t.is_finite() {
        return Err(CoreError::domain("kernel: t = 0 is singular"));
    }
    Ok(())
}

fn check_a(a: f64) -> Result<()> {
    if !(a > -1.0) || !a.is_finite() {
        return Err(CoreError::domain(format!("kernel: a = {a} <= -1")));
    }
    Ok(())
}

/// Transverse kernel
/// S_a(z, zeta, t) = e^{-i sgn(t)(a+1)pi/4} (2|t|)^{-(a+1)/2}
///                   G_nu(z zeta / (2|t|)) e^{i(z^2+zeta^2)/(4t)},
/// with nu = (a-1)/2 and G_nu(u) = u^{-nu} J_nu(u), so the zeta -> 0 limit
/// is finite.
pub fn kernel_sa(a: f64, z: f64, zeta: f64, t: f64) -> Result<C64> {
    check_a(a)?;
    check_t(t)?;
    if z < 0.0 || zeta < 0.0 {
        return Err(CoreError::domain("kernel_sa: z, zeta must be >= 0"));
    }
    let nu = 0.5 * (a - 1.0);
    let at = t.abs();
    let g = bessel_j_scaled(nu, z * zeta / (2.0 * at))?;
    let modulus = (2.0 * at).powf(-0.5 * (a + 1.0)) * g;
    let phase = -t.signum() * 0.25 * (a + 1.0) * PI + (z * z + zeta * zeta) / (4.0 * t);
    Ok(C64::from_polar(modulus.abs(), phase + if modulus < 0.0 { PI } else { 0.0 }))
}

/// Boundary limit
/// S_a(z, 0, t) = 2^{-a}/Gamma((a+1)/2) e^{-i sgn(t)(a+1)pi/4}
///                |t|^{-(a+1)/2} e^{i z^2/(4t)}.
pub fn kernel_sa_boundary(a: f64, z: f64, t: f64) -> Result<C64> {
    check_a(a)?;
    check_t(t)?;
    if z < 0.0 {
        return Err(CoreError::domain("kernel_sa_boundary: z must be >= 0"));
    }
    let modulus = boundary_amplitude(a)? * t.abs().powf(-0.5 * (a + 1.0));
    let phase = -t.signum() * 0.25 * (a + 1.0) * PI + z * z / (4.0 * t);
    Ok(C64::from_polar(modulus, phase))
}

/// |S_a(z, 0, t)| / |t|^{-(a+1)/2} = 2^{-a} / Gamma((a+1)/2).
pub fn boundary_amplitude(a: f64) -> Result<f64> {
    check_a(a)?;
    Ok((2.0f64).powf(-a) / gamma_fn(0.5 * (a + 1.0))?)
}

/// Free Schroedinger kernel S(x, y, t) = (4 pi i t)^{-d/2} e^{i|x-y|^2/(4t)}
/// on the principal branch: modulus (4 pi |t|)^{-d/2}, phase
/// -sgn(t) d pi/4 plus the quadratic phase.
pub fn kernel_free(d: usize, x: &[f64], y: &[f64], t: f64) -> Result<C64> {
    check_t(t)?;
    if x.len() != d || y.len() != d {
        return Err(CoreError::mismatch(format!(
            "kernel_free: points of dim {}/{} against d = {d}",
            x.len(),
            y.len()
        )));
    }
    let r2: f64 = x.iter().zip(y).map(|(u, v)| (u - v) * (u - v)).sum();
    let modulus = (4.0 * PI * t.abs()).powf(-0.5 * d as f64);
    let phase = -t.signum() * 0.25 * d as f64 * PI + r2 / (4.0 * t);
    Ok(C64::from_polar(modulus, phase))
}

/// Full kernel S_a(X, Y, t) = S_a(z, zeta, t) S(x, y, t).
pub fn kernel_full(
    a: f64,
    d: usize,
    x: &[f64],
    z: f64,
    y: &[f64],
    zeta: f64,
    t: f64,
) -> Result<C64> {
    Ok(kernel_sa(a, z, zeta, t)? * kernel_free(d, x, y, t)?)
}

/// Boundary restriction of the full kernel,
/// S_a(X, Y_0, t) = e^{-i sgn(t)(d+a+1)pi/4} / (2^{d+a} pi^{d/2} Gamma((a+1)/2))
///                  |t|^{-(d+a+1)/2} e^{i(z^2+|x-y|^2)/(4t)},
/// a single dispersive regime |t|^{-(d+a+1)/2} for every a > -1.
pub fn kernel_full_boundary(
    a: f64,
    d: usize,
    x: &[f64],
    z: f64,
    y: &[f64],
    t: f64,
) -> Result<C64> {
    check_a(a)?;
    check_t(t)?;
    if x.len() != d || y.len() != d {
        return Err(CoreError::mismatch("kernel_full_boundary: dimension mismatch"));
    }
    let r2: f64 = x.iter().zip(y).map(|(u, v)| (u - v) * (u - v)).sum();
    let modulus = (2.0f64).powf(-(d as f64 + a))
        * PI.powf(-0.5 * d as f64)
        / gamma_fn(0.5 * (a + 1.0))?
        * t.abs().powf(-0.5 * (d as f64 + a + 1.0));
    let phase = -t.signum() * 0.25 * (d as f64 + a + 1.0) * PI + (z * z + r2) / (4.0 * t);
    Ok(C64::from_polar(modulus, phase))
}
