//! Hashing and breeding: asymptotic yields, finite-size bounds, noise
//! thresholds for measurement-based implementations, and a Monte Carlo check
//! of the random-subset parity lemma.
//!
//! All finite-size quantities assume isotropic inputs of fidelity `F`. The
//! parity-measurement budget is `r = n (S + 2 delta)`, after which
//!
//! ```text
//! p2 = d^(-n delta)
//! p1 <= 2 exp{ -(n / a) [ (g + delta) ln(1 + delta / g) - delta ] }
//! F_out >= 1 - p1 - p2,    yield = 1 - S - 2 delta
//! ```
//!
//! where `a` bounds the deviation of `-log_d alpha` and `g = Var / a`
//! (Bennett's inequality).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::Dimension;
use crate::error::{check_unit, Error, Result};
use crate::numeric::bisect;
use crate::states::CoeffMatrix;

fn xlogx(x: f64, ln_d: f64) -> f64 {
    if x > 0.0 {
        x * x.ln() / ln_d
    } else {
        0.0
    }
}

/// Base-`d` von Neumann entropy of one copy, `-sum alpha log_d alpha`.
pub fn entropy_based(s: &CoeffMatrix) -> f64 {
    let ln_d = s.dim().as_f64().ln();
    -s.as_slice().iter().map(|&a| xlogx(a, ln_d)).sum::<f64>()
}

/// Entropy of the isotropic state with fidelity `f`, without building it.
pub fn isotropic_entropy(d: Dimension, f: f64) -> f64 {
    let n2 = d.as_f64() * d.as_f64();
    let ln_d = d.as_f64().ln();
    let tail = (1.0 - f) / (n2 - 1.0);
    -(xlogx(f, ln_d) + (n2 - 1.0) * xlogx(tail, ln_d))
}

/// `max(0, 1 - S)`.
pub fn asymptotic_yield(s: &CoeffMatrix) -> f64 {
    (1.0 - entropy_based(s)).max(0.0)
}

pub const FMIN_TOLERANCE: f64 = 1e-9;

/// Smallest isotropic fidelity with positive asymptotic hashing yield.
pub fn min_fidelity(d: Dimension) -> Result<f64> {
    d.require_prime()?;
    let n2 = d.as_f64() * d.as_f64();
    // 1 - S is increasing in F on (1/d^2, 1]: -1 at the left end, 1 at the right
    Ok(bisect(
        |f| 1.0 - isotropic_entropy(d, f),
        1.0 / n2,
        1.0,
        FMIN_TOLERANCE * 1e-3,
    ))
}

/// How the finite-size slack `delta` depends on `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "policy", content = "value")]
pub enum DeltaPolicy {
    Fixed(f64),
    /// `delta = n^exponent`; the intermediate choice is `-1/4`.
    NPow(f64),
    /// Measure all pairs but one: `delta = ((n - 1)/n - S) / 2`.
    NToOne,
}

impl DeltaPolicy {
    pub fn delta(self, n: u64, entropy: f64) -> Result<f64> {
        let nf = n as f64;
        match self {
            DeltaPolicy::Fixed(delta) if delta > 0.0 => Ok(delta),
            DeltaPolicy::Fixed(delta) => Err(Error::OutOfRange {
                name: "delta",
                value: delta,
                range: "(0, inf)",
            }),
            DeltaPolicy::NPow(e) if e < 0.0 => Ok(nf.powf(e)),
            DeltaPolicy::NPow(e) => Err(Error::OutOfRange {
                name: "delta exponent",
                value: e,
                range: "(-inf, 0)",
            }),
            DeltaPolicy::NToOne => Ok(0.5 * ((nf - 1.0) / nf - entropy)),
        }
    }
}

impl std::str::FromStr for DeltaPolicy {
    type Err = Error;

    /// `fixed:0.1`, `npow:-0.25`, or `n_to_1`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad delta policy `{s}` (fixed:<x> | npow:<e> | n_to_1)"));
        let lower = s.to_ascii_lowercase().replace('-', "_");
        if matches!(lower.as_str(), "n_to_1" | "nto1" | "n_to_one") {
            return Ok(DeltaPolicy::NToOne);
        }
        let (kind, value) = s.split_once(':').ok_or_else(bad)?;
        let value: f64 = value.trim().parse().map_err(|_| bad())?;
        match kind.trim().to_ascii_lowercase().as_str() {
            "fixed" => Ok(DeltaPolicy::Fixed(value)),
            "npow" => Ok(DeltaPolicy::NPow(value)),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HashingReport {
    pub d: usize,
    pub n: u64,
    pub fidelity: f64,
    pub delta: f64,
    pub entropy: f64,
    /// Parity measurements, `ceil(n (S + 2 delta))`.
    pub r: u64,
    /// `1 - S - 2 delta` clamped to `[0, 1]`.
    #[serde(rename = "yield")]
    pub yield_: f64,
    pub yield_raw: f64,
    pub p1_bound: f64,
    pub p2: f64,
    /// `1 - p1 - p2` clamped to `[0, 1]`.
    pub f_out_bound: f64,
    pub f_out_raw: f64,
    /// False when `delta <= 0` (only possible for `n -> 1`).
    pub feasible: bool,
}

/// Bennett-inequality bound on the probability that the error string falls
/// outside the likely set.
pub fn p1_bound(d: Dimension, n: u64, f: f64, delta: f64) -> f64 {
    if f >= 1.0 {
        return 0.0;
    }
    let n2 = d.as_f64() * d.as_f64();
    let ln_d = d.as_f64().ln();
    let s = isotropic_entropy(d, f);
    let tail = (1.0 - f) / (n2 - 1.0);
    let log_tail = tail.ln() / ln_d;
    let a = log_tail.abs() + s;
    let log_f = if f > 0.0 { f.ln() / ln_d } else { 0.0 };
    let second_moment = f * log_f * log_f + (1.0 - f) * log_tail * log_tail;
    let g = (second_moment - s * s) / a;
    if !(g > 0.0) {
        return 0.0;
    }
    let exponent = (-(n as f64) / a) * ((g + delta) * (delta / g).ln_1p() - delta);
    2.0 * exponent.exp()
}

/// Finite-size yield and global output fidelity bound for `n` isotropic pairs.
pub fn finite_size_report(
    d: Dimension,
    n: u64,
    f: f64,
    policy: DeltaPolicy,
) -> Result<HashingReport> {
    d.require_prime()?;
    if n < 2 {
        return Err(Error::OutOfRange {
            name: "n",
            value: n as f64,
            range: ">= 2",
        });
    }
    let n2 = d.as_f64() * d.as_f64();
    if !(f > 1.0 / n2 && f <= 1.0) {
        return Err(Error::OutOfRange {
            name: "F",
            value: f,
            range: "(1/d^2, 1]",
        });
    }
    let s = isotropic_entropy(d, f);
    let delta = policy.delta(n, s)?;
    let nf = n as f64;
    let feasible = delta > 0.0;
    // n -> 1 has r = n - 1 exactly; trim float noise before rounding up
    let r = ((nf * (s + 2.0 * delta)) - 1e-9).ceil().max(0.0) as u64;
    let yield_raw = 1.0 - s - 2.0 * delta;
    let p2 = d.as_f64().powf(-nf * delta);
    let p1 = if feasible { p1_bound(d, n, f, delta) } else { 1.0 };
    let f_out_raw = 1.0 - p1 - p2;
    Ok(HashingReport {
        d: d.get(),
        n,
        fidelity: f,
        delta,
        entropy: s,
        r,
        yield_: if feasible { yield_raw.clamp(0.0, 1.0) } else { 0.0 },
        yield_raw,
        p1_bound: p1,
        p2,
        f_out_bound: f_out_raw.clamp(0.0, 1.0),
        f_out_raw,
        feasible,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoisyThresholds {
    pub f_min: f64,
    /// Transmission retention matching `F_min` via `F = p^2 + (1 - p^2)/d^2`.
    pub p_min: f64,
    /// Per-particle resource retention threshold, `sqrt(p_min)`.
    pub q_min: f64,
}

/// Retention `p` whose two-sided depolarization of `|psi_00>` yields fidelity `f`.
pub fn retention_for_fidelity(d: Dimension, f: f64) -> f64 {
    let n2 = d.as_f64() * d.as_f64();
    ((f - 1.0 / n2) / (1.0 - 1.0 / n2)).sqrt()
}

/// Fidelity after depolarizing both halves of `|psi_00>` with retention `p`.
pub fn fidelity_for_retention(d: Dimension, p: f64) -> f64 {
    let n2 = d.as_f64() * d.as_f64();
    p * p + (1.0 - p * p) / n2
}

pub fn noisy_thresholds(d: Dimension) -> Result<NoisyThresholds> {
    let f_min = min_fidelity(d)?;
    let n2 = d.as_f64() * d.as_f64();
    if f_min <= 1.0 / n2 {
        return Err(Error::OutOfRange {
            name: "F_min",
            value: f_min,
            range: "(1/d^2, 1]",
        });
    }
    let p_min = retention_for_fidelity(d, f_min);
    Ok(NoisyThresholds {
        f_min,
        p_min,
        q_min: p_min.sqrt(),
    })
}

/// Input fidelity seen by an ideal protocol when resource noise `q` is moved
/// onto inputs with transmission retention `p`: effective retention `p q^2`.
pub fn effective_fidelity(d: Dimension, transmission: f64, resource: f64) -> Result<f64> {
    let p = check_unit("p", transmission)?;
    let q = check_unit("q", resource)?;
    Ok(fidelity_for_retention(d, p * q * q))
}

/// Asymptotic hashing yield of a measurement-based implementation with
/// transmission retention `p` and resource retention `q`.
pub fn noisy_asymptotic_yield(d: Dimension, transmission: f64, resource: f64) -> Result<f64> {
    d.require_prime()?;
    let f = effective_fidelity(d, transmission, resource)?;
    Ok((1.0 - isotropic_entropy(d, f)).max(0.0))
}

/// Both working conditions of measurement-based hashing: `p q^2 > p_min` and
/// `q^2 > p`.
pub fn noisy_hashing_works(d: Dimension, transmission: f64, resource: f64) -> Result<bool> {
    let p = check_unit("p", transmission)?;
    let q = check_unit("q", resource)?;
    let t = noisy_thresholds(d)?;
    Ok(p * q * q > t.p_min && q * q > p)
}

/// Threshold for any measurement-based protocol on isotropic inputs:
/// `((d-1)/(d^2-1))^(1/4) = (d+1)^(-1/4)`.
pub fn universal_threshold(d: Dimension) -> f64 {
    let n = d.as_f64();
    ((n - 1.0) / (n * n - 1.0)).powf(0.25)
}

/// Trials per independently seeded RNG stream in [`lemma1_montecarlo`].
pub const MC_CHUNK: u64 = 4096;
pub const MC_MIN_TRIALS: u64 = 10_000;

/// Empirical probability that two distinct random strings in `Z_d^(2n)` agree
/// on the parity `s . x mod d` of a uniformly random subset `s`.
///
/// Trials are split into fixed chunks, each with its own ChaCha stream derived
/// from `seed`, so the result does not depend on the thread count.
pub fn lemma1_montecarlo(d: Dimension, n: usize, trials: u64, seed: u64) -> Result<f64> {
    d.require_prime()?;
    if trials < MC_MIN_TRIALS {
        return Err(Error::OutOfRange {
            name: "trials",
            value: trials as f64,
            range: ">= 10000",
        });
    }
    if n == 0 {
        return Err(Error::OutOfRange {
            name: "n",
            value: 0.0,
            range: ">= 1",
        });
    }
    let q = d.get() as u64;
    let len = 2 * n;
    let chunks = trials.div_ceil(MC_CHUNK);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk);
            let count = MC_CHUNK.min(trials - chunk * MC_CHUNK);
            let mut x = vec![0u64; len];
            let mut y = vec![0u64; len];
            let mut hits = 0;
            for _ in 0..count {
                x.iter_mut().for_each(|v| *v = rng.gen_range(0..q));
                loop {
                    y.iter_mut().for_each(|v| *v = rng.gen_range(0..q));
                    if x != y {
                        break;
                    }
                }
                let (mut px, mut py) = (0, 0);
                for i in 0..len {
                    let s = rng.gen_range(0..q);
                    px = (px + s * x[i]) % q;
                    py = (py + s * y[i]) % q;
                }
                hits += u64::from(px == py);
            }
            hits
        })
        .sum();
    Ok(hits as f64 / trials as f64)
}

/// Binomial standard deviation of an empirical frequency.
pub fn binomial_sigma(p: f64, trials: u64) -> f64 {
    (p * (1.0 - p) / trials as f64).sqrt()
}
