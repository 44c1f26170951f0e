//! Named test data. The main one is the datum
//! u0(X) = f(X) + z^{1-a}/(1-a) h(z), with f Schwartz and even in z and h a
//! smooth cutoff equal to 1 on [0, 1] and 0 beyond 2. Its mild evolution
//! has weighted Neumann derivative 1 at t = 0 and 0 for t != 0, the sharp
//! example separating mild from classical solutions.

use crate::field::HalfSpaceField;
use crate::grid::{CartesianGrid, WeightedRadialGrid};
use num_complex::Complex64 as C64;

fn mollifier_piece(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else {
        (-1.0 / u).exp()
    }
}

/// Smooth cutoff: 1 on [0, 1], 0 on [2, inf), C-infinity in between.
pub fn smooth_cutoff(z: f64) -> f64 {
    let up = mollifier_piece(2.0 - z);
    let down = mollifier_piece(z - 1.0);
    if up + down == 0.0 {
        0.0
    } else {
        up / (up + down)
    }
}

/// Transverse profile of the kink datum: f(z) + z^{1-a}/(1-a) h(z) with
/// f(z) = e^{-z^2} (even, Schwartz).
pub fn kink_profile(a: f64, z: f64) -> f64 {
    (-z * z).exp() + z.powf(1.0 - a) / (1.0 - a) * smooth_cutoff(z)
}

/// The full datum g(x) (f(z) + z^{1-a}/(1-a) h(z)) with a Gaussian tangential
/// factor g.
pub fn kink_datum(a: f64, xgrid: CartesianGrid, zgrid: WeightedRadialGrid) -> HalfSpaceField {
    HalfSpaceField::from_fn(a, xgrid, zgrid, |x, z| {
        let g: f64 = x.iter().map(|&xi| -xi * xi).sum::<f64>().exp();
        C64::new(g * kink_profile(a, z), 0.0)
    })
}
