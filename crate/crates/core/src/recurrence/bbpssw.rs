//! Closed-form analysis of the generalized BBPSSW protocol on isotropic states
//! under depolarizing gate noise.

use crate::algebra::Dimension;
use crate::error::{Error, Result};

use super::PurificationRegime;

/// Output fidelity of one noisy BBPSSW round on an isotropic input.
///
/// With `a1 = F Q^2 + (1 - Q^2)/d^2` and `a2 = (1 - F) Q^2/(d^2 - 1) + (1 - Q^2)/d^2`:
///
/// ```text
/// F' = (a1^2 + (d-1) a2^2) / (a1^2 + 2 (d-1) a1 a2 + (d^3 - 2d + 1) a2^2)
/// ```
pub fn bbpssw_map(f: f64, d: Dimension, gate: f64) -> f64 {
    let n = d.as_f64();
    let q2 = gate * gate;
    let floor = (1.0 - q2) / (n * n);
    let a1 = f * q2 + floor;
    let a2 = (1.0 - f) * q2 / (n * n - 1.0) + floor;
    let num = a1 * a1 + a2 * a2 * (n - 1.0);
    let den = a1 * a1 + 2.0 * a1 * a2 * (n - 1.0) + a2 * a2 * (n * n * n - 2.0 * n + 1.0);
    num / den
}

/// `8 Q^2 (d+1) - 4 (d+1)^2 + Q^4 (d-1) (d+2)^2`; fixed points exist iff positive.
pub fn discriminant(d: Dimension, gate: f64) -> f64 {
    let n = d.as_f64();
    let q2 = gate * gate;
    8.0 * q2 * (n + 1.0) - 4.0 * (n + 1.0).powi(2) + q2 * q2 * (n - 1.0) * (n + 2.0).powi(2)
}

/// Minimum required (`F-`) and maximum reachable (`F+`) fidelity.
///
/// Below threshold the two roots are complex; the regime then reports
/// `purifiable = false` with both bounds at the (clamped) real part.
pub fn bbpssw_fixed_points(d: Dimension, gate: f64) -> Result<PurificationRegime> {
    if !(gate > 0.0 && gate <= 1.0) {
        return Err(Error::OutOfRange {
            name: "Q",
            value: gate,
            range: "(0, 1]",
        });
    }
    let n = d.as_f64();
    let q2 = gate * gate;
    let center = q2 * n * (n + 1.0) / (2.0 * n * n * q2);
    let lo = 1.0 / (n * n);
    let disc = discriminant(d, gate);
    if disc <= 0.0 {
        let c = center.clamp(lo, 1.0);
        return Ok(PurificationRegime {
            f_min: c,
            f_max: c,
            purifiable: false,
        });
    }
    let half_width = (n - 1.0).sqrt() * disc.sqrt() / (2.0 * n * n * q2);
    Ok(PurificationRegime {
        f_min: (center - half_width).clamp(lo, 1.0),
        f_max: (center + half_width).clamp(lo, 1.0),
        purifiable: true,
    })
}

/// Smallest gate retention `Q` for which the protocol still purifies.
pub fn bbpssw_threshold(d: Dimension) -> f64 {
    let n = d.as_f64();
    let inner = (n * n * (n + 1.0).powi(2) * (n + 3.0)).sqrt();
    let ratio = (-2.0 - 2.0 * n + inner) / (-4.0 + 3.0 * n * n + n * n * n);
    std::f64::consts::SQRT_2 * ratio.sqrt()
}

/// Large-`d` behaviour of [`bbpssw_threshold`]: `sqrt(2) d^(-1/4)`.
pub fn bbpssw_threshold_asymptote(d: Dimension) -> f64 {
    std::f64::consts::SQRT_2 * d.as_f64().powf(-0.25)
}
