//! Modular index arithmetic for generalized Bell and GHZ basis states.
//!
//! A two-qudit Bell state is labelled `(phase, amplitude)`:
//!
//! ```text
//! |psi_{m,n}> = d^{-1/2} sum_r w^{m r} |r>_A |r - n>_B,    w = exp(2 pi i / d)
//! ```
//!
//! All maps here act on labels only. Global phases picked up by the
//! corresponding unitaries are dropped, which is exact for everything built on
//! top of this module since only diagonal (projector) data is propagated.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Local dimension `d >= 2` of a qudit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct Dimension(usize);

impl Dimension {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
        Ok(Self(d))
    }

    /// Dimension restricted to primes, as required by the hashing protocols.
    pub fn prime(d: usize) -> Result<Self> {
        let dim = Self::new(d)?;
        dim.require_prime()?;
        Ok(dim)
    }

    #[inline]
    pub fn get(self) -> usize {
        self.0
    }

    #[inline]
    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }

    pub fn is_prime(self) -> bool {
        is_prime(self.0)
    }

    pub fn require_prime(self) -> Result<()> {
        if self.is_prime() {
            Ok(())
        } else {
            Err(Error::NotPrime(self.0))
        }
    }

    #[inline]
    pub fn add(self, a: usize, b: usize) -> usize {
        (a + b) % self.0
    }

    #[inline]
    pub fn sub(self, a: usize, b: usize) -> usize {
        (a + self.0 - b % self.0) % self.0
    }

    #[inline]
    pub fn neg(self, a: usize) -> usize {
        self.sub(0, a)
    }

    fn check(self, value: usize) -> Result<usize> {
        if value < self.0 {
            Ok(value)
        } else {
            Err(Error::IndexOutOfRange { value, d: self.0 })
        }
    }
}

impl TryFrom<usize> for Dimension {
    type Error = Error;

    fn try_from(d: usize) -> Result<Self> {
        Self::new(d)
    }
}

impl From<Dimension> for usize {
    fn from(d: Dimension) -> usize {
        d.0
    }
}

impl std::fmt::Display for Dimension {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// Deterministic trial division.
pub fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut f = 3;
    while f * f <= n {
        if n.is_multiple_of(f) {
            return false;
        }
        f += 2;
    }
    true
}

/// Primes in the inclusive range `[lo, hi]`.
pub fn primes_in(lo: usize, hi: usize) -> Vec<usize> {
    (lo.max(2)..=hi).filter(|&n| is_prime(n)).collect()
}

/// Label `(phase, amplitude)` of a generalized Bell state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BellIndex {
    pub phase: usize,
    pub amplitude: usize,
}

impl BellIndex {
    pub const ZERO: Self = Self {
        phase: 0,
        amplitude: 0,
    };

    pub fn new(phase: usize, amplitude: usize, d: Dimension) -> Result<Self> {
        Ok(Self {
            phase: d.check(phase)?,
            amplitude: d.check(amplitude)?,
        })
    }

    fn validate(self, d: Dimension) -> Result<Self> {
        if self.phase >= d.get() || self.amplitude >= d.get() {
            return Err(Error::DimensionMismatch {
                expected: d.get(),
                found: self.phase.max(self.amplitude) + 1,
            });
        }
        Ok(self)
    }

    /// Iterates all `d^2` labels, phase-major.
    pub fn all(d: Dimension) -> impl Iterator<Item = BellIndex> {
        let n = d.get();
        (0..n).flat_map(move |phase| (0..n).map(move |amplitude| BellIndex { phase, amplitude }))
    }
}

/// Label `(phase, amplitudes[0..N-1])` of an N-party generalized GHZ state
///
/// ```text
/// |psi_{m,l_1..l_{N-1}}> = d^{-1/2} sum_r w^{m r} |r> |r - l_1> ... |r - l_{N-1}>
/// ```
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GhzIndex {
    pub phase: usize,
    pub amplitudes: Vec<usize>,
}

impl GhzIndex {
    pub fn new(phase: usize, amplitudes: Vec<usize>, d: Dimension) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::Parse("a GHZ label needs at least one amplitude index (N >= 2)".into()));
        }
        d.check(phase)?;
        for &a in &amplitudes {
            d.check(a)?;
        }
        Ok(Self { phase, amplitudes })
    }

    pub fn parties(&self) -> usize {
        self.amplitudes.len() + 1
    }

    /// Position in the mixed-radix, phase-slowest layout used by `GhzCoeffs`.
    pub fn flat(&self, d: Dimension) -> usize {
        let n = d.get();
        self.amplitudes.iter().fold(self.phase, |acc, &a| acc * n + a)
    }

    pub fn from_flat(mut flat: usize, parties: usize, d: Dimension) -> Self {
        let n = d.get();
        let mut amplitudes = vec![0; parties - 1];
        for slot in amplitudes.iter_mut().rev() {
            *slot = flat % n;
            flat /= n;
        }
        Self {
            phase: flat % n,
            amplitudes,
        }
    }
}

/// Bilateral GXOR from `control` onto `target`:
/// `(k1, j1), (k2, j2) -> (k1 + k2, j1), (-k2, j1 - j2)`.
pub fn bgxor_index_map(
    control: BellIndex,
    target: BellIndex,
    d: Dimension,
) -> Result<(BellIndex, BellIndex)> {
    let c = control.validate(d)?;
    let t = target.validate(d)?;
    Ok((
        BellIndex {
            phase: d.add(c.phase, t.phase),
            amplitude: c.amplitude,
        },
        BellIndex {
            phase: d.neg(t.phase),
            amplitude: d.sub(c.amplitude, t.amplitude),
        },
    ))
}

/// Coefficient-level bilateral QFT: exchanges phase and amplitude labels.
///
/// This is the convention the recurrence maps use. The physical operation
/// `QFT (x) QFT*` realizes [`bqft_unitary_index_map`] instead, which differs
/// from the swap by negating the new amplitude label. The two agree for
/// `d = 2`, and every recurrence map here is equivariant under that
/// relabelling, so fidelities and success probabilities are identical.
pub fn bqft_index_map(idx: BellIndex) -> BellIndex {
    BellIndex {
        phase: idx.amplitude,
        amplitude: idx.phase,
    }
}

/// Label produced by `QFT_A (x) QFT_B^*` on `|psi_{m,n}>`: `(n, -m)`.
pub fn bqft_unitary_index_map(idx: BellIndex, d: Dimension) -> BellIndex {
    BellIndex {
        phase: idx.amplitude,
        amplitude: d.neg(idx.phase),
    }
}

/// Label of `(X^b Z^a (x) I) |psi_idx>` with `X|x> = |x + 1>`, `Z|x> = w^x |x>`:
/// `(phase + a, amplitude + b)`.
pub fn pauli_on_bell(a: usize, b: usize, idx: BellIndex, d: Dimension) -> BellIndex {
    BellIndex {
        phase: d.add(idx.phase, a),
        amplitude: d.add(idx.amplitude, b),
    }
}

/// Modified multilateral GXOR on GHZ labels:
/// `(m, l..), (k, i..) -> (m + k, l..), (-k, l + i ..)`.
///
/// The amplitude sums on the target come from relabelling the target's
/// amplitudes `i -> -i` before the plain multilateral GXOR.
pub fn mgxor_index_map(
    control: &GhzIndex,
    target: &GhzIndex,
    d: Dimension,
) -> Result<(GhzIndex, GhzIndex)> {
    if control.amplitudes.len() != target.amplitudes.len() {
        return Err(Error::Parse(format!(
            "party count mismatch: {} vs {}",
            control.parties(),
            target.parties()
        )));
    }
    let n = d.get();
    if control.phase >= n
        || target.phase >= n
        || control.amplitudes.iter().chain(&target.amplitudes).any(|&a| a >= n)
    {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: n + 1,
        });
    }
    let new_control = GhzIndex {
        phase: d.add(control.phase, target.phase),
        amplitudes: control.amplitudes.clone(),
    };
    let new_target = GhzIndex {
        phase: d.neg(target.phase),
        amplitudes: control
            .amplitudes
            .iter()
            .zip(&target.amplitudes)
            .map(|(&l, &i)| d.add(l, i))
            .collect(),
    };
    Ok((new_control, new_target))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn dim(d: usize) -> Dimension {
        Dimension::new(d).unwrap()
    }

    fn bi(p: usize, a: usize) -> BellIndex {
        BellIndex {
            phase: p,
            amplitude: a,
        }
    }

    #[test]
    fn dimension_rejects_small() {
        assert_eq!(Dimension::new(1), Err(Error::InvalidDimension(1)));
        assert_eq!(Dimension::new(0), Err(Error::InvalidDimension(0)));
        assert!(Dimension::new(2).is_ok());
    }

    #[test]
    fn primality() {
        let small: Vec<usize> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert!(is_prime(9973));
        assert!(!is_prime(9975));
        assert!(Dimension::prime(4).is_err());
        assert_eq!(primes_in(2, 13), vec![2, 3, 5, 7, 11, 13]);
    }

    #[test]
    fn bgxor_examples() {
        assert_eq!(
            bgxor_index_map(bi(1, 2), bi(2, 1), dim(3)).unwrap(),
            (bi(0, 2), bi(1, 1))
        );
        for d in 2..6 {
            assert_eq!(
                bgxor_index_map(bi(0, 0), bi(0, 0), dim(d)).unwrap(),
                (bi(0, 0), bi(0, 0))
            );
        }
        assert_eq!(
            bgxor_index_map(bi(1, 1), bi(1, 0), dim(2)).unwrap(),
            (bi(0, 1), bi(1, 1))
        );
    }

    #[test]
    fn bgxor_rejects_foreign_indices() {
        assert!(matches!(
            bgxor_index_map(bi(3, 0), bi(0, 0), dim(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn bgxor_is_bijection() {
        for d in 2..=7 {
            let d = dim(d);
            let mut seen = HashSet::new();
            for c in BellIndex::all(d) {
                for t in BellIndex::all(d) {
                    assert!(seen.insert(bgxor_index_map(c, t, d).unwrap()));
                }
            }
            assert_eq!(seen.len(), d.get().pow(4));
        }
    }

    #[test]
    fn bqft_examples() {
        assert_eq!(bqft_index_map(bi(3, 1)), bi(1, 3));
        assert_eq!(bqft_index_map(bi(0, 0)), bi(0, 0));
        for d in 2..=7 {
            for idx in BellIndex::all(dim(d)) {
                assert_eq!(bqft_index_map(bqft_index_map(idx)), idx);
            }
        }
    }

    #[test]
    fn bqft_unitary_matches_swap_for_qubits() {
        for idx in BellIndex::all(dim(2)) {
            assert_eq!(bqft_unitary_index_map(idx, dim(2)), bqft_index_map(idx));
        }
        assert_eq!(bqft_unitary_index_map(bi(1, 2), dim(3)), bi(2, 2));
    }

    #[test]
    fn pauli_examples() {
        assert_eq!(pauli_on_bell(1, 0, bi(0, 0), dim(4)), bi(1, 0));
        assert_eq!(pauli_on_bell(0, 0, bi(2, 3), dim(4)), bi(2, 3));
        let hits: HashSet<_> = (0..2)
            .flat_map(|a| (0..2).map(move |b| (a, b)))
            .map(|(a, b)| pauli_on_bell(a, b, bi(0, 0), dim(2)))
            .collect();
        assert_eq!(hits.len(), 4);
    }

    #[test]
    fn pauli_orbit_is_everything() {
        for d in 2..=7 {
            let d = dim(d);
            for idx in BellIndex::all(d) {
                let orbit: HashSet<_> = BellIndex::all(d)
                    .map(|ab| pauli_on_bell(ab.phase, ab.amplitude, idx, d))
                    .collect();
                assert_eq!(orbit.len(), d.get() * d.get());
            }
        }
    }

    #[test]
    fn mgxor_example() {
        let d = dim(2);
        let c = GhzIndex::new(1, vec![0, 1], d).unwrap();
        let t = GhzIndex::new(1, vec![1, 0], d).unwrap();
        let (c2, t2) = mgxor_index_map(&c, &t, d).unwrap();
        assert_eq!(c2, GhzIndex::new(0, vec![0, 1], d).unwrap());
        assert_eq!(t2, GhzIndex::new(1, vec![1, 1], d).unwrap());
    }

    #[test]
    fn ghz_flat_layout_is_phase_slowest() {
        let d = dim(3);
        let idx = GhzIndex::new(2, vec![0, 1], d).unwrap();
        assert_eq!(idx.flat(d), 2 * 9 + 1);
        assert_eq!(GhzIndex::from_flat(19, 3, d), idx);
    }

    proptest! {
        #[test]
        fn modular_ops_stay_in_range(d in 2usize..50, a in 0usize..1000, b in 0usize..1000) {
            let dim = dim(d);
            let (a, b) = (a % d, b % d);
            prop_assert!(dim.add(a, b) < d);
            prop_assert!(dim.sub(a, b) < d);
            prop_assert_eq!(dim.add(dim.sub(a, b), b), a);
            prop_assert_eq!(dim.add(a, dim.neg(a)), 0);
        }

        #[test]
        fn ghz_flat_roundtrip(d in 2usize..6, parties in 2usize..5, seed in 0usize..10_000) {
            let dim = dim(d);
            let flat = seed % d.pow(parties as u32);
            let idx = GhzIndex::from_flat(flat, parties, dim);
            prop_assert_eq!(idx.flat(dim), flat);
        }
    }
}
