//! Recurrence purification: P1, P2, the P1-or-P2 protocol, the 3 -> 1
//! variant, and the generalized BBPSSW and DEJMPS iterations.
//!
//! Every map acts on Bell-diagonal coefficients. A bilateral GXOR from the
//! control onto a target sends `(k1, j1), (k2, j2)` to `(k1+k2, j1), (-k2, j1-j2)`;
//! measuring the target in the Z basis reveals `j1 - j2`, and the control is
//! kept when that difference is zero. P1 is therefore a cyclic convolution of
//! phase indices within each amplitude column. P2 is P1 conjugated by the
//! bilateral QFT, i.e. by a transpose of the coefficient matrix.

mod bbpssw;
mod regime;

use serde::{Deserialize, Serialize};

pub use bbpssw::{
    bbpssw_fixed_points, bbpssw_map, bbpssw_threshold, bbpssw_threshold_asymptote,
    discriminant as bbpssw_discriminant,
};
pub use regime::{numeric_threshold, regime_scan, RegimeOptions};

use crate::error::{check_unit, Error, Result};
use crate::states::{depolarize_channel, twirl_isotropic, CoeffMatrix};

/// Per-qudit depolarizing retention probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    /// Gate noise `Q`, applied to every qudit a two-qudit gate touches.
    pub gate: f64,
    /// Transmission noise `p`.
    pub transmission: f64,
    /// Resource-state and measurement noise `q`.
    pub resource: f64,
}

impl NoiseParams {
    pub fn new(gate: f64, transmission: f64, resource: f64) -> Result<Self> {
        Ok(Self {
            gate: check_unit("Q", gate)?,
            transmission: check_unit("p", transmission)?,
            resource: check_unit("q", resource)?,
        })
    }

    pub fn noiseless() -> Self {
        Self {
            gate: 1.0,
            transmission: 1.0,
            resource: 1.0,
        }
    }

    pub fn with_gate(gate: f64) -> Result<Self> {
        Self::new(gate, 1.0, 1.0)
    }
}

impl Default for NoiseParams {
    fn default() -> Self {
        Self::noiseless()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Subroutine {
    P1,
    P2,
}

/// What a single recorded iteration did.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ProtocolStep {
    P1,
    P2,
    Bbpssw,
    Dejmps,
    ThreeCopyP1,
    ThreeCopyP2,
}

impl ProtocolStep {
    pub fn name(self) -> &'static str {
        match self {
            ProtocolStep::P1 => "P1",
            ProtocolStep::P2 => "P2",
            ProtocolStep::Bbpssw => "BBPSSW",
            ProtocolStep::Dejmps => "DEJMPS",
            ProtocolStep::ThreeCopyP1 => "THREE_COPY_P1",
            ProtocolStep::ThreeCopyP2 => "THREE_COPY_P2",
        }
    }

    /// Input copies consumed per output copy.
    pub fn copies(self) -> usize {
        match self {
            ProtocolStep::ThreeCopyP1 | ProtocolStep::ThreeCopyP2 => 3,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    /// Adaptive choice between P1 and P2 at every iteration.
    P1P2,
    /// P1 followed by a phase/amplitude exchange, every iteration.
    Dejmps,
    /// Twirl to isotropic form, then P1.
    Bbpssw,
    /// The 3 -> 1 analogue of P1-or-P2.
    ThreeCopy,
}

impl Protocol {
    pub const ALL: [Protocol; 4] = [
        Protocol::P1P2,
        Protocol::Dejmps,
        Protocol::Bbpssw,
        Protocol::ThreeCopy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Protocol::P1P2 => "p1p2",
            Protocol::Dejmps => "dejmps",
            Protocol::Bbpssw => "bbpssw",
            Protocol::ThreeCopy => "three_copy",
        }
    }
}

impl std::str::FromStr for Protocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.to_ascii_lowercase().replace('-', "_");
        Protocol::ALL
            .into_iter()
            .find(|p| p.name() == norm)
            .ok_or_else(|| Error::Parse(format!("unknown protocol `{s}`")))
    }
}

/// Cyclic self-convolution of phase indices within each amplitude column,
/// `copies` factors deep. Returns unnormalized output and its total weight.
fn column_convolution(s: &CoeffMatrix, copies: usize) -> (Vec<f64>, f64) {
    let n = s.dim().get();
    let mut out = vec![0.0; n * n];
    let mut col = vec![0.0; n];
    let mut acc = vec![0.0; n];
    let mut next = vec![0.0; n];
    for j in 0..n {
        for (k, c) in col.iter_mut().enumerate() {
            *c = s.get(k, j);
        }
        acc.copy_from_slice(&col);
        for _ in 1..copies {
            next.iter_mut().for_each(|x| *x = 0.0);
            for (k1, &a) in acc.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (k2, &b) in col.iter().enumerate() {
                    next[(k1 + k2) % n] += a * b;
                }
            }
            std::mem::swap(&mut acc, &mut next);
        }
        for k in 0..n {
            out[k * n + j] = acc[k];
        }
    }
    let total = out.iter().sum();
    (out, total)
}

fn post_select(s: &CoeffMatrix, copies: usize) -> Result<(CoeffMatrix, f64)> {
    let (mut out, norm) = column_convolution(s, copies);
    if !(norm > 0.0) {
        return Err(Error::ZeroSuccessProbability);
    }
    out.iter_mut().for_each(|a| *a /= norm);
    Ok((CoeffMatrix::finish(s.dim(), out)?, norm.min(1.0)))
}

/// P1: bilateral GXOR between two copies, keep on equal Z outcomes.
///
/// `alpha'[k][j] = sum_{k1+k2=k} alpha[k1][j] alpha[k2][j] / N`, with the
/// normalization `N` equal to the success probability.
pub fn p1_map(s: &CoeffMatrix) -> Result<(CoeffMatrix, f64)> {
    post_select(s, 2)
}

/// P2: P1 conjugated by the bilateral QFT.
pub fn p2_map(s: &CoeffMatrix) -> Result<(CoeffMatrix, f64)> {
    let (out, prob) = p1_map(&s.transpose())?;
    Ok((out.transpose(), prob))
}

/// 3 -> 1 step: GXOR from the control onto two targets, keep only if both
/// targets report amplitude difference zero.
pub fn three_copy_map(s: &CoeffMatrix) -> Result<(CoeffMatrix, f64)> {
    post_select(s, 3)
}

/// 3 -> 1 step acting on phase errors.
pub fn three_copy_p2_map(s: &CoeffMatrix) -> Result<(CoeffMatrix, f64)> {
    let (out, prob) = three_copy_map(&s.transpose())?;
    Ok((out.transpose(), prob))
}

/// P1 when the pure-phase-error weight does not exceed the pure-amplitude
/// weight (`sum_k alpha[k][0] <= sum_j alpha[0][j]`), otherwise P2. Ties go to P1.
pub fn choose_subroutine(s: &CoeffMatrix) -> Subroutine {
    if s.amplitude_zero_weight() <= s.phase_zero_weight() {
        Subroutine::P1
    } else {
        Subroutine::P2
    }
}

/// Gate noise on one input pair. Each side's qudit is depolarized with
/// retention `Q`; on a Bell-diagonal pair that is one channel with `Q^2`.
pub fn noisy_step(s: &CoeffMatrix, gate: f64) -> Result<CoeffMatrix> {
    let q = check_unit("Q", gate)?;
    depolarize_channel(s, q * q)
}

/// Generalized DEJMPS iteration: noisy gates, P1, then exchange of phase and
/// amplitude coefficients.
pub fn dejmps_map(s: &CoeffMatrix, gate: f64) -> Result<(CoeffMatrix, f64)> {
    let noisy = noisy_step(s, gate)?;
    let (out, prob) = p1_map(&noisy)?;
    Ok((out.transpose(), prob))
}

/// Generalized BBPSSW iteration on full coefficient data: twirl, noisy gates,
/// P1, twirl. The output fidelity equals [`bbpssw_map`].
pub fn bbpssw_step(s: &CoeffMatrix, gate: f64) -> Result<(CoeffMatrix, f64)> {
    let noisy = noisy_step(&twirl_isotropic(s), gate)?;
    let (out, prob) = p1_map(&noisy)?;
    Ok((twirl_isotropic(&out), prob))
}

/// One iteration of `protocol` including gate noise.
pub fn protocol_step(
    protocol: Protocol,
    s: &CoeffMatrix,
    gate: f64,
) -> Result<(ProtocolStep, CoeffMatrix, f64)> {
    match protocol {
        Protocol::Bbpssw => {
            let (out, p) = bbpssw_step(s, gate)?;
            Ok((ProtocolStep::Bbpssw, out, p))
        }
        Protocol::Dejmps => {
            let (out, p) = dejmps_map(s, gate)?;
            Ok((ProtocolStep::Dejmps, out, p))
        }
        Protocol::P1P2 => {
            let noisy = noisy_step(s, gate)?;
            match choose_subroutine(&noisy) {
                Subroutine::P1 => p1_map(&noisy).map(|(o, p)| (ProtocolStep::P1, o, p)),
                Subroutine::P2 => p2_map(&noisy).map(|(o, p)| (ProtocolStep::P2, o, p)),
            }
        }
        Protocol::ThreeCopy => {
            let noisy = noisy_step(s, gate)?;
            match choose_subroutine(&noisy) {
                Subroutine::P1 => {
                    three_copy_map(&noisy).map(|(o, p)| (ProtocolStep::ThreeCopyP1, o, p))
                }
                Subroutine::P2 => {
                    three_copy_p2_map(&noisy).map(|(o, p)| (ProtocolStep::ThreeCopyP2, o, p))
                }
            }
        }
    }
}

/// Fidelity gains below this count towards a stall.
pub const STALL_TOLERANCE: f64 = 1e-12;
/// Consecutive non-improving iterations that end a run.
pub const STALL_PATIENCE: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryStep {
    pub iteration: usize,
    pub step: ProtocolStep,
    pub state: CoeffMatrix,
    pub success_prob: f64,
    pub cumulative_yield: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunOutcome {
    /// Target fidelity reached.
    Reached,
    /// Fidelity stopped improving before the target.
    Stalled,
    /// Iteration budget exhausted.
    MaxIterations,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub protocol: Protocol,
    pub initial: CoeffMatrix,
    pub target_fidelity: f64,
    pub steps: Vec<TrajectoryStep>,
    pub outcome: RunOutcome,
}

impl Trajectory {
    pub fn final_state(&self) -> &CoeffMatrix {
        self.steps.last().map_or(&self.initial, |s| &s.state)
    }

    pub fn final_fidelity(&self) -> f64 {
        self.final_state().fidelity()
    }

    pub fn cumulative_yield(&self) -> f64 {
        self.steps.last().map_or(1.0, |s| s.cumulative_yield)
    }

    pub fn reached(&self) -> bool {
        self.outcome == RunOutcome::Reached
    }

    /// Yield if the target was reached, 0 otherwise.
    pub fn yield_or_zero(&self) -> f64 {
        if self.reached() {
            self.cumulative_yield()
        } else {
            0.0
        }
    }

    pub fn fidelities(&self) -> Vec<f64> {
        std::iter::once(self.initial.fidelity())
            .chain(self.steps.iter().map(|s| s.state.fidelity()))
            .collect()
    }
}

/// Iterates `protocol` until the fidelity reaches `target`, stalls, or the
/// budget runs out.
pub fn run_protocol(
    protocol: Protocol,
    s: &CoeffMatrix,
    noise: NoiseParams,
    target: f64,
    max_iters: usize,
) -> Result<Trajectory> {
    if !(target > 0.0 && target <= 1.0) {
        return Err(Error::OutOfRange {
            name: "target fidelity",
            value: target,
            range: "(0, 1]",
        });
    }
    if max_iters == 0 {
        return Err(Error::OutOfRange {
            name: "max_iters",
            value: 0.0,
            range: ">= 1",
        });
    }
    let mut steps = Vec::new();
    let mut state = s.clone();
    let mut cumulative = 1.0;
    let mut stalls = 0;
    let mut outcome = RunOutcome::MaxIterations;
    if state.fidelity() >= target {
        outcome = RunOutcome::Reached;
    } else {
        for iteration in 1..=max_iters {
            let before = state.fidelity();
            let (step, next, prob) = protocol_step(protocol, &state, noise.gate)?;
            cumulative *= prob / step.copies() as f64;
            state = next;
            steps.push(TrajectoryStep {
                iteration,
                step,
                state: state.clone(),
                success_prob: prob,
                cumulative_yield: cumulative,
            });
            if state.fidelity() >= target {
                outcome = RunOutcome::Reached;
                break;
            }
            if state.fidelity() - before < STALL_TOLERANCE {
                stalls += 1;
                if stalls >= STALL_PATIENCE {
                    outcome = RunOutcome::Stalled;
                    break;
                }
            } else {
                stalls = 0;
            }
        }
    }
    Ok(Trajectory {
        protocol,
        initial: s.clone(),
        target_fidelity: target,
        steps,
        outcome,
    })
}

/// P1-or-P2 until `F >= 1 - epsilon`.
pub fn p1p2_run(
    s: &CoeffMatrix,
    noise: NoiseParams,
    epsilon: f64,
    max_iters: usize,
) -> Result<Trajectory> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::OutOfRange {
            name: "epsilon",
            value: epsilon,
            range: "(0, 1)",
        });
    }
    run_protocol(Protocol::P1P2, s, noise, 1.0 - epsilon, max_iters)
}

/// Iteration budget used by [`yield_run`].
pub const YIELD_MAX_ITERS: usize = 500;

/// Expected output pairs per input pair to reach `target`: the product of
/// `success_prob / copies` over iterations, or 0 if unreachable.
pub fn yield_run(
    protocol: Protocol,
    s: &CoeffMatrix,
    noise: NoiseParams,
    target: f64,
) -> Result<f64> {
    Ok(run_protocol(protocol, s, noise, target, YIELD_MAX_ITERS)?.yield_or_zero())
}

/// Purification regime: minimum required and maximum reachable fidelity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PurificationRegime {
    pub f_min: f64,
    pub f_max: f64,
    pub purifiable: bool,
}
