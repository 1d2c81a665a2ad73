//! Bell-diagonal two-qudit states in coefficient form.
//!
//! A state `rho = sum_{k,j} alpha_{k,j} |psi_{k,j}><psi_{k,j}|` is stored as the
//! `d x d` matrix `alpha`, row = phase index `k`, column = amplitude index `j`.
//! Off-diagonal Bell-basis elements are never represented.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::Dimension;
use crate::error::{check_unit, Error, Result};

/// Entries more negative than this are rejected.
pub const NEGATIVE_SLACK: f64 = 1e-12;
/// Normalization drift accepted without touching the data.
pub const NORM_EXACT: f64 = 1e-12;
/// Normalization drift repaired by rescaling; anything beyond is an error.
pub const NORM_REPAIR: f64 = 1e-9;

/// Bell-diagonal coefficients `alpha[k][j]`, non-negative and summing to one.
#[derive(Clone, PartialEq)]
pub struct CoeffMatrix {
    d: Dimension,
    alpha: Vec<f64>,
}

impl CoeffMatrix {
    /// Validates and, for drift up to [`NORM_REPAIR`], renormalizes.
    pub fn new(d: Dimension, alpha: Vec<f64>) -> Result<Self> {
        let n = d.get();
        if alpha.len() != n * n {
            return Err(Error::NotNormalized(format!(
                "expected {} coefficients for d = {n}, got {}",
                n * n,
                alpha.len()
            )));
        }
        Self::finish(d, alpha)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let d = Dimension::new(n)?;
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::NotNormalized(format!("alpha must be a {n} x {n} matrix")));
        }
        Self::new(d, rows.concat())
    }

    pub(crate) fn finish(d: Dimension, mut alpha: Vec<f64>) -> Result<Self> {
        for a in alpha.iter_mut() {
            if !a.is_finite() || *a < -NEGATIVE_SLACK {
                return Err(Error::NotNormalized(format!("entry {a} is negative or not finite")));
            }
            if *a < 0.0 {
                *a = 0.0;
            }
        }
        let sum: f64 = alpha.iter().sum();
        let drift = (sum - 1.0).abs();
        if drift > NORM_REPAIR {
            return Err(Error::NotNormalized(format!("coefficients sum to {sum}")));
        }
        if drift > NORM_EXACT {
            alpha.iter_mut().for_each(|a| *a /= sum);
        }
        Ok(Self { d, alpha })
    }

    /// `|psi_00><psi_00|`.
    pub fn pure(d: Dimension) -> Self {
        let mut alpha = vec![0.0; d.get() * d.get()];
        alpha[0] = 1.0;
        Self { d, alpha }
    }

    /// The maximally mixed state, all coefficients `1/d^2`.
    pub fn uniform(d: Dimension) -> Self {
        let n2 = d.get() * d.get();
        Self {
            d,
            alpha: vec![1.0 / n2 as f64; n2],
        }
    }

    /// Isotropic state with fidelity `f`.
    pub fn isotropic(d: Dimension, f: f64) -> Result<Self> {
        make_preset(&StatePreset::isotropic(f), d)
    }

    #[inline]
    pub fn dim(&self) -> Dimension {
        self.d
    }

    #[inline]
    pub fn get(&self, phase: usize, amplitude: usize) -> f64 {
        self.alpha[phase * self.d.get() + amplitude]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.alpha
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.alpha.chunks(self.d.get()).map(<[f64]>::to_vec).collect()
    }

    #[inline]
    pub fn fidelity(&self) -> f64 {
        self.alpha[0]
    }

    /// `sum_j alpha[0][j]`: weight of pure amplitude (X-type) errors plus `F`.
    pub fn phase_zero_weight(&self) -> f64 {
        self.alpha[..self.d.get()].iter().sum()
    }

    /// `sum_k alpha[k][0]`: weight of pure phase (Z-type) errors plus `F`.
    pub fn amplitude_zero_weight(&self) -> f64 {
        self.alpha.iter().step_by(self.d.get()).sum()
    }

    /// Exchanges the roles of phase and amplitude indices.
    pub fn transpose(&self) -> Self {
        let n = self.d.get();
        let mut alpha = vec![0.0; n * n];
        for k in 0..n {
            for j in 0..n {
                alpha[j * n + k] = self.alpha[k * n + j];
            }
        }
        Self { d: self.d, alpha }
    }

    /// Largest entrywise difference; `None` when the dimensions differ.
    pub fn max_abs_diff(&self, other: &Self) -> Option<f64> {
        (self.d == other.d).then(|| {
            self.alpha
                .iter()
                .zip(&other.alpha)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        })
    }

    pub fn is_isotropic(&self, tol: f64) -> bool {
        let tail = (1.0 - self.fidelity()) / (self.alpha.len() - 1) as f64;
        self.alpha[1..].iter().all(|a| (a - tail).abs() <= tol)
    }
}

impl fmt::Debug for CoeffMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoeffMatrix")
            .field("d", &self.d.get())
            .field("alpha", &self.rows())
            .finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PresetKind {
    Isotropic,
    XOnly,
    ZOnly,
    XzMixture,
}

impl PresetKind {
    pub const ALL: [PresetKind; 4] = [
        PresetKind::Isotropic,
        PresetKind::XOnly,
        PresetKind::ZOnly,
        PresetKind::XzMixture,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PresetKind::Isotropic => "isotropic",
            PresetKind::XOnly => "x_only",
            PresetKind::ZOnly => "z_only",
            PresetKind::XzMixture => "xz_mixture",
        }
    }
}

impl std::str::FromStr for PresetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PresetKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown preset `{s}`")))
    }
}

/// Default share of X-type errors in the mixed X/Z preset.
pub const DEFAULT_X_WEIGHT: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatePreset {
    pub kind: PresetKind,
    pub fidelity: f64,
    pub x_weight: f64,
}

impl StatePreset {
    pub fn new(kind: PresetKind, fidelity: f64) -> Self {
        Self {
            kind,
            fidelity,
            x_weight: DEFAULT_X_WEIGHT,
        }
    }

    pub fn isotropic(fidelity: f64) -> Self {
        Self::new(PresetKind::Isotropic, fidelity)
    }

    pub fn with_x_weight(mut self, x_weight: f64) -> Self {
        self.x_weight = x_weight;
        self
    }
}

/// Builds the coefficient matrix of a preset family.
///
/// `X^k` errors shift the amplitude index, so `x_only` populates row 0 and
/// `z_only` populates column 0.
pub fn make_preset(p: &StatePreset, d: Dimension) -> Result<CoeffMatrix> {
    let f = check_unit("F", p.fidelity)?;
    let w = check_unit("x_weight", p.x_weight)?;
    let n = d.get();
    let mut alpha = vec![0.0; n * n];
    alpha[0] = f;
    let per_error = (1.0 - f) / (n - 1) as f64;
    match p.kind {
        PresetKind::Isotropic => {
            let tail = (1.0 - f) / (n * n - 1) as f64;
            alpha[1..].iter_mut().for_each(|a| *a = tail);
        }
        PresetKind::XOnly => (1..n).for_each(|j| alpha[j] = per_error),
        PresetKind::ZOnly => (1..n).for_each(|k| alpha[k * n] = per_error),
        PresetKind::XzMixture => {
            for i in 1..n {
                alpha[i] = w * per_error;
                alpha[i * n] = (1.0 - w) * per_error;
            }
        }
    }
    CoeffMatrix::finish(d, alpha)
}

/// Depolarizing channel with the given retention on one qudit of the pair:
/// `retention * alpha + (1 - retention) / d^2`.
pub fn depolarize_channel(s: &CoeffMatrix, retention: f64) -> Result<CoeffMatrix> {
    let q = check_unit("retention", retention)?;
    let n2 = s.alpha.len() as f64;
    let floor = (1.0 - q) / n2;
    let alpha = s.alpha.iter().map(|a| q * a + floor).collect();
    CoeffMatrix::finish(s.d, alpha)
}

/// `U (x) U*` twirl: isotropic state with the same fidelity.
pub fn twirl_isotropic(s: &CoeffMatrix) -> CoeffMatrix {
    let f = s.fidelity();
    let n2 = s.alpha.len();
    let tail = (1.0 - f) / (n2 - 1) as f64;
    let mut alpha = vec![tail; n2];
    alpha[0] = f;
    CoeffMatrix { d: s.d, alpha }
}

pub fn fidelity(s: &CoeffMatrix) -> f64 {
    s.fidelity()
}

/// Isotropic weight `alpha(F) = (d^2 F - 1) / (d^2 - 1)` of the projector onto
/// `|psi_00>` when written as a mixture with the identity.
pub fn isotropic_weight(d: Dimension, f: f64) -> f64 {
    let n2 = d.as_f64() * d.as_f64();
    (n2 * f - 1.0) / (n2 - 1.0)
}

/// Inverse of [`isotropic_weight`]: `F = alpha + (1 - alpha) / d^2`.
pub fn fidelity_from_weight(d: Dimension, weight: f64) -> f64 {
    let n2 = d.as_f64() * d.as_f64();
    weight + (1.0 - weight) / n2
}

/// On-disk state description.
///
/// ```json
/// {"d": 3, "alpha": [[0.7, 0.1, 0.1], [0.05, 0, 0], [0.05, 0, 0]]}
/// {"d": 3, "preset": "x_only", "F": 0.7}
/// {"d": 7, "preset": "xz_mixture", "F": 0.6, "x_weight": 0.25}
/// ```
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateFile {
    Explicit {
        d: usize,
        alpha: Vec<Vec<f64>>,
    },
    Preset {
        d: usize,
        preset: PresetKind,
        #[serde(rename = "F")]
        fidelity: f64,
        #[serde(default)]
        x_weight: Option<f64>,
    },
}

impl StateFile {
    pub fn to_state(&self) -> Result<CoeffMatrix> {
        match self {
            StateFile::Explicit { d, alpha } => {
                let s = CoeffMatrix::from_rows(alpha)?;
                if s.dim().get() != *d {
                    return Err(Error::DimensionMismatch {
                        expected: *d,
                        found: s.dim().get(),
                    });
                }
                Ok(s)
            }
            StateFile::Preset {
                d,
                preset,
                fidelity,
                x_weight,
            } => {
                let p = StatePreset::new(*preset, *fidelity)
                    .with_x_weight(x_weight.unwrap_or(DEFAULT_X_WEIGHT));
                make_preset(&p, Dimension::new(*d)?)
            }
        }
    }
}

impl From<&CoeffMatrix> for StateFile {
    fn from(s: &CoeffMatrix) -> Self {
        StateFile::Explicit {
            d: s.dim().get(),
            alpha: s.rows(),
        }
    }
}

pub fn parse_state_json(text: &str) -> Result<CoeffMatrix> {
    let file: StateFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    file.to_state()
}
