//! GHZ-diagonal states of `N` qudits and the multipartite hashing yield.
//!
//! Coefficients are stored flat in mixed radix with the phase index slowest:
//! `(m, l1, ..., l_{N-1})` sits at `((m d + l1) d + l2) ...`, see
//! [`GhzIndex::flat`].

use serde::{Deserialize, Serialize};

use crate::algebra::{Dimension, GhzIndex};
use crate::error::{Error, Result};
use crate::states::{NEGATIVE_SLACK, NORM_EXACT, NORM_REPAIR};

/// Largest `d^N` accepted, to keep explicit coefficient vectors sane.
pub const MAX_GHZ_ENTRIES: usize = 1 << 24;

#[derive(Debug, Clone, PartialEq)]
pub struct GhzCoeffs {
    d: Dimension,
    parties: usize,
    alpha: Vec<f64>,
}

fn entries(d: Dimension, parties: usize) -> Result<usize> {
    if parties < 2 {
        return Err(Error::OutOfRange {
            name: "N",
            value: parties as f64,
            range: ">= 2",
        });
    }
    u32::try_from(parties)
        .ok()
        .and_then(|p| d.get().checked_pow(p))
        .filter(|&n| n <= MAX_GHZ_ENTRIES)
        .ok_or_else(|| Error::SizeLimit(format!("d^N too large for d = {d}, N = {parties}", d = d.get())))
}

impl GhzCoeffs {
    pub fn new(d: Dimension, parties: usize, mut alpha: Vec<f64>) -> Result<Self> {
        let len = entries(d, parties)?;
        if alpha.len() != len {
            return Err(Error::NotNormalized(format!(
                "expected d^N = {len} coefficients, got {}",
                alpha.len()
            )));
        }
        for a in alpha.iter_mut() {
            if !a.is_finite() || *a < -NEGATIVE_SLACK {
                return Err(Error::NotNormalized(format!("entry {a} is negative or not finite")));
            }
            *a = a.max(0.0);
        }
        let sum: f64 = alpha.iter().sum();
        if (sum - 1.0).abs() > NORM_REPAIR {
            return Err(Error::NotNormalized(format!("coefficients sum to {sum}")));
        }
        if (sum - 1.0).abs() > NORM_EXACT {
            alpha.iter_mut().for_each(|a| *a /= sum);
        }
        Ok(Self { d, parties, alpha })
    }

    pub fn pure(d: Dimension, parties: usize) -> Result<Self> {
        ghz_isotropic(d, parties, 1.0)
    }

    pub fn dim(&self) -> Dimension {
        self.d
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.alpha
    }

    pub fn get(&self, idx: &GhzIndex) -> f64 {
        self.alpha[idx.flat(self.d)]
    }

    pub fn fidelity(&self) -> f64 {
        self.alpha[0]
    }
}

/// `F` on the all-zero label, `(1 - F)/(d^N - 1)` elsewhere.
pub fn ghz_isotropic(d: Dimension, parties: usize, f: f64) -> Result<GhzCoeffs> {
    let len = entries(d, parties)?;
    let floor = 1.0 / len as f64;
    if !(f >= floor - 1e-15 && f <= 1.0) {
        return Err(Error::OutOfRange {
            name: "F",
            value: f,
            range: "[1/d^N, 1]",
        });
    }
    let mut alpha = vec![(1.0 - f) / (len - 1) as f64; len];
    alpha[0] = f;
    Ok(GhzCoeffs { d, parties, alpha })
}

fn shannon(p: &[f64], ln_d: f64) -> f64 {
    -p.iter().filter(|&&x| x > 0.0).map(|&x| x * x.ln()).sum::<f64>() / ln_d
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexEntropies {
    /// Base-`d` entropy of the phase index marginal.
    pub h0: f64,
    /// Largest base-`d` entropy among the amplitude index marginals.
    pub hmax_amp: f64,
    pub phase_marginal: Vec<f64>,
    pub amplitude_marginals: Vec<Vec<f64>>,
    /// Mutual information between all indices, `sum H(marginals) - H(joint)`;
    /// zero iff the indices are independent.
    pub correlation: f64,
}

impl IndexEntropies {
    /// Whether the single-copy marginals carry correlations, in which case the
    /// yield formula is only justified asymptotically.
    pub fn correlated(&self) -> bool {
        self.correlation > 1e-12
    }
}

pub fn index_entropies(s: &GhzCoeffs) -> IndexEntropies {
    let n = s.d.get();
    let ln_d = s.d.as_f64().ln();
    let mut phase = vec![0.0; n];
    let mut amps = vec![vec![0.0; n]; s.parties - 1];
    for (flat, &a) in s.alpha.iter().enumerate() {
        let idx = GhzIndex::from_flat(flat, s.parties, s.d);
        phase[idx.phase] += a;
        for (m, &l) in amps.iter_mut().zip(&idx.amplitudes) {
            m[l] += a;
        }
    }
    let h0 = shannon(&phase, ln_d);
    let amp_h: Vec<f64> = amps.iter().map(|m| shannon(m, ln_d)).collect();
    let hmax_amp = amp_h.iter().copied().fold(0.0, f64::max);
    let joint = shannon(&s.alpha, ln_d);
    let correlation = (h0 + amp_h.iter().sum::<f64>() - joint).max(0.0);
    IndexEntropies {
        h0,
        hmax_amp,
        phase_marginal: phase,
        amplitude_marginals: amps,
        correlation,
    }
}

/// `max(0, 1 - H0 - Hmax_amp)`.
pub fn multipartite_yield(s: &GhzCoeffs) -> Result<f64> {
    s.d.require_prime()?;
    let e = index_entropies(s);
    Ok((1.0 - e.h0 - e.hmax_amp).max(0.0))
}

/// Closed form for isotropic GHZ inputs:
/// `1 + 2 (p_a log_d p_a + (d-1) p_b log_d p_b)`, clamped at zero.
pub fn isotropic_yield_formula(d: Dimension, parties: usize, f: f64) -> Result<f64> {
    d.require_prime()?;
    let len = entries(d, parties)?;
    if !(f >= 1.0 / len as f64 - 1e-15 && f <= 1.0) {
        return Err(Error::OutOfRange {
            name: "F",
            value: f,
            range: "[1/d^N, 1]",
        });
    }
    let n = d.as_f64();
    let total = len as f64 - 1.0;
    let block = (len / d.get()) as f64;
    let pa = f + (1.0 - f) * (block - 1.0) / total;
    let pb = (1.0 - f) * block / total;
    let ln_d = n.ln();
    let xlog = |x: f64| if x > 0.0 { x * x.ln() / ln_d } else { 0.0 };
    Ok((1.0 + 2.0 * (xlog(pa) + (n - 1.0) * xlog(pb))).max(0.0))
}

/// On-disk GHZ state description.
///
/// ```json
/// {"d": 2, "N": 3, "preset": "ghz_isotropic", "F": 0.9}
/// {"d": 2, "N": 2, "alpha": [0.7, 0.1, 0.1, 0.1]}
/// ```
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GhzFile {
    Explicit {
        d: usize,
        #[serde(rename = "N")]
        parties: usize,
        alpha: Vec<f64>,
    },
    Preset {
        d: usize,
        #[serde(rename = "N")]
        parties: usize,
        preset: GhzPreset,
        #[serde(rename = "F")]
        fidelity: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GhzPreset {
    GhzIsotropic,
}

impl GhzFile {
    pub fn to_state(&self) -> Result<GhzCoeffs> {
        match self {
            GhzFile::Explicit { d, parties, alpha } => GhzCoeffs::new(Dimension::new(*d)?, *parties, alpha.clone()),
            GhzFile::Preset {
                d,
                parties,
                fidelity,
                ..
            } => ghz_isotropic(Dimension::new(*d)?, *parties, *fidelity),
        }
    }
}

pub fn parse_ghz_json(text: &str) -> Result<GhzCoeffs> {
    let file: GhzFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    file.to_state()
}
