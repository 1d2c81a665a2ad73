//! Numerical purification regimes and noise thresholds for any protocol, found
//! by iterating the noisy coefficient maps.

use crate::algebra::Dimension;
use crate::error::{Error, Result};
use crate::states::{make_preset, CoeffMatrix, PresetKind, StatePreset};

use super::{protocol_step, Protocol, PurificationRegime};

/// Iteration cap when settling a pure input onto the upper fixed point.
pub const MAX_SETTLE_ITERATIONS: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeOptions {
    /// Iterations used to decide where a starting fidelity ends up.
    pub iterations: usize,
    /// Minimum net gain for a start to count as purifying.
    pub stall_tolerance: f64,
    /// Bisection steps on the initial fidelity.
    pub fidelity_bisections: usize,
    /// Bisection steps on `Q` in [`numeric_threshold`].
    pub gate_bisections: usize,
    /// Regimes narrower than this count as closed when locating thresholds.
    pub min_width: f64,
}

impl Default for RegimeOptions {
    fn default() -> Self {
        Self {
            iterations: 200,
            stall_tolerance: 1e-12,
            fidelity_bisections: 60,
            gate_bisections: 32,
            min_width: 1e-6,
        }
    }
}

struct Scanner {
    protocol: Protocol,
    d: Dimension,
    gate: f64,
    kind: PresetKind,
    opts: RegimeOptions,
}

impl Scanner {
    fn step(&self, state: &CoeffMatrix) -> Result<CoeffMatrix> {
        Ok(protocol_step(self.protocol, state, self.gate)?.1)
    }

    /// Largest of the last two fidelities after `iterations` noisy rounds; the
    /// adaptive protocols can settle into a two-step cycle.
    fn settle(&self, f0: f64) -> Result<f64> {
        let mut state = make_preset(&StatePreset::new(self.kind, f0), self.d)?;
        let mut prev = state.fidelity();
        for _ in 0..self.opts.iterations {
            prev = state.fidelity();
            state = self.step(&state)?;
        }
        Ok(prev.max(state.fidelity()))
    }

    /// Where a pure input ends up, iterated to convergence. Near threshold the
    /// fixed point is nearly degenerate and convergence is slow.
    fn upper_fixed_point(&self) -> Result<f64> {
        let mut state = make_preset(&StatePreset::new(self.kind, 1.0), self.d)?;
        let mut hist = [1.0, 1.0];
        for i in 0..MAX_SETTLE_ITERATIONS {
            state = self.step(&state)?;
            let f = state.fidelity();
            let converged = i >= 2 && (f - hist[0]).abs() < 1e-15;
            hist = [hist[1], f];
            if converged {
                break;
            }
        }
        Ok(hist[0].max(hist[1]))
    }

    /// A start purifies if it ends above where it began and above `1/d`.
    /// Separable starts can drift upwards but never past `1/d`.
    fn purifies(&self, f0: f64) -> Result<bool> {
        let f = self.settle(f0)?;
        Ok(f > f0 + self.opts.stall_tolerance && f > 1.0 / self.d.as_f64() + self.opts.stall_tolerance)
    }

    fn regime(&self) -> Result<PurificationRegime> {
        let n = self.d.as_f64();
        let floor = 1.0 / (n * n);
        let f_max = self.upper_fixed_point()?;
        let closed = PurificationRegime {
            f_min: f_max,
            f_max,
            purifiable: false,
        };
        let mut start = None;
        for gap in [1e-9, 1e-7, 1e-5, 1e-3] {
            let f = f_max - gap;
            if f <= floor {
                break;
            }
            if self.purifies(f)? {
                start = Some(f);
                break;
            }
        }
        let Some(mut hi) = start else {
            return Ok(closed);
        };
        let mut lo = floor;
        if self.purifies(lo)? {
            return Ok(PurificationRegime {
                f_min: lo,
                f_max,
                purifiable: true,
            });
        }
        for _ in 0..self.opts.fidelity_bisections {
            let mid = 0.5 * (lo + hi);
            if self.purifies(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(PurificationRegime {
            f_min: hi,
            f_max,
            purifiable: f_max > hi,
        })
    }
}

/// Locates the minimum required and maximum reachable fidelity of `protocol`
/// for inputs of the given preset family under gate noise `gate`.
///
/// `F_max` is where a pure input settles; `F_min` is found by bisection on
/// the initial fidelity between `1/d^2` and `F_max`.
pub fn regime_scan(
    protocol: Protocol,
    d: Dimension,
    gate: f64,
    kind: PresetKind,
    opts: RegimeOptions,
) -> Result<PurificationRegime> {
    if !(gate > 0.0 && gate <= 1.0) {
        return Err(Error::OutOfRange {
            name: "Q",
            value: gate,
            range: "(0, 1]",
        });
    }
    Scanner {
        protocol,
        d,
        gate,
        kind,
        opts,
    }
    .regime()
}

/// Smallest gate retention `Q` at which the regime is still open.
pub fn numeric_threshold(
    protocol: Protocol,
    d: Dimension,
    kind: PresetKind,
    opts: RegimeOptions,
) -> Result<f64> {
    let open = |q: f64| -> Result<bool> {
        let r = regime_scan(protocol, d, q, kind, opts)?;
        Ok(r.purifiable && r.f_max - r.f_min > opts.min_width)
    };
    let (mut lo, mut hi) = (0.05, 1.0);
    if !open(hi)? {
        return Ok(1.0);
    }
    if open(lo)? {
        return Ok(lo);
    }
    for _ in 0..opts.gate_bisections {
        let mid = 0.5 * (lo + hi);
        if open(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recurrence::{bbpssw_fixed_points, bbpssw_threshold};
    use approx::assert_abs_diff_eq;

    fn dim(d: usize) -> Dimension {
        Dimension::new(d).unwrap()
    }

    #[test]
    fn bbpssw_scan_matches_closed_form() {
        let r = regime_scan(Protocol::Bbpssw, dim(3), 0.95, PresetKind::Isotropic, RegimeOptions::default()).unwrap();
        let exact = bbpssw_fixed_points(dim(3), 0.95).unwrap();
        assert!(r.purifiable && exact.purifiable);
        assert_abs_diff_eq!(r.f_min, exact.f_min, epsilon = 1e-6);
        assert_abs_diff_eq!(r.f_max, exact.f_max, epsilon = 1e-6);
    }

    #[test]
    fn noiseless_p1p2_regime_on_isotropic_states() {
        for d in [2, 3, 5] {
            let r = regime_scan(Protocol::P1P2, dim(d), 1.0, PresetKind::Isotropic, RegimeOptions::default()).unwrap();
            assert!(r.purifiable);
            assert_abs_diff_eq!(r.f_max, 1.0, epsilon = 1e-9);
            assert_abs_diff_eq!(r.f_min, 1.0 / d as f64, epsilon = 1e-6);
        }
    }

    #[test]
    fn closed_regime_below_threshold() {
        let r = regime_scan(Protocol::Bbpssw, dim(2), 0.9, PresetKind::Isotropic, RegimeOptions::default()).unwrap();
        assert!(!r.purifiable);
        assert!(regime_scan(Protocol::P1P2, dim(2), 0.0, PresetKind::Isotropic, RegimeOptions::default()).is_err());
    }

    #[test]
    fn numeric_bbpssw_threshold_matches_formula() {
        let opts = RegimeOptions {
            gate_bisections: 20,
            ..RegimeOptions::default()
        };
        let q = numeric_threshold(Protocol::Bbpssw, dim(3), PresetKind::Isotropic, opts).unwrap();
        assert_abs_diff_eq!(q, bbpssw_threshold(dim(3)), epsilon = 1e-4);
    }

    #[test]
    fn p1p2_regime_is_wider_than_bbpssw() {
        for d in [2, 4] {
            let a = regime_scan(Protocol::P1P2, dim(d), 0.97, PresetKind::Isotropic, RegimeOptions::default()).unwrap();
            let b = bbpssw_fixed_points(dim(d), 0.97).unwrap();
            assert!(a.f_min <= b.f_min + 1e-9);
            assert!(a.f_max >= b.f_max - 1e-9);
        }
    }

    #[test]
    fn dejmps_shares_upper_fixed_point_and_threshold_with_p1p2() {
        let opts = RegimeOptions::default();
        for d in [2, 3, 4] {
            for &q in &[1.0, 0.97, 0.95] {
                let a = regime_scan(Protocol::P1P2, dim(d), q, PresetKind::Isotropic, opts).unwrap();
                let b = regime_scan(Protocol::Dejmps, dim(d), q, PresetKind::Isotropic, opts).unwrap();
                assert_abs_diff_eq!(a.f_max, b.f_max, epsilon = 1e-12);
                assert!(b.f_min >= 1.0 / d as f64 - 1e-12);
            }
        }
        let a = numeric_threshold(Protocol::P1P2, dim(2), PresetKind::Isotropic, opts).unwrap();
        let b = numeric_threshold(Protocol::Dejmps, dim(2), PresetKind::Isotropic, opts).unwrap();
        assert_abs_diff_eq!(a, b, epsilon = 1e-6);
    }

    #[test]
    fn separable_starts_do_not_count_as_purifying() {
        for protocol in [Protocol::P1P2, Protocol::Dejmps] {
            let r = regime_scan(protocol, dim(3), 1.0, PresetKind::Isotropic, RegimeOptions::default()).unwrap();
            assert!(r.f_min >= 1.0 / 3.0 - 1e-12, "{protocol:?}");
        }
    }
}
