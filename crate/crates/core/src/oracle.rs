//! Brute-force density-matrix simulation for small `d`, used as ground truth
//! for the coefficient-space maps.
//!
//! Qudits are ordered `A1, B1, A2, B2, ...` with `A1` the most significant
//! digit of a basis index. Pair 1 is the one kept by recurrence steps; the
//! remaining pairs are measured.
//!
//! Gate conventions: `X|x> = |x + 1>`, `Z|x> = w^x |x>`,
//! `QFT|x> = d^{-1/2} sum_y w^{x y} |y>`, and `GXOR|a>|b> = |a>|a - b>`. With
//! the Bell basis fixed in [`crate::algebra`] these realize the bilateral GXOR
//! label map exactly, including the sign of the target phase.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{
    bgxor_index_map, bqft_unitary_index_map, mgxor_index_map, pauli_on_bell, BellIndex, Dimension, GhzIndex,
};
use crate::error::{Error, Result};
use crate::recurrence::{p1_map, p2_map, three_copy_map, three_copy_p2_map};
use crate::states::{depolarize_channel, CoeffMatrix};

type C = Complex64;
type Mat = DMatrix<C>;

/// Largest `d` simulated with two pairs (`d^4` basis states).
pub const MAX_TWO_PAIR_DIM: usize = 5;
/// Largest `d` simulated with three pairs (`d^6` basis states).
pub const MAX_THREE_PAIR_DIM: usize = 3;
pub const TRACE_TOL: f64 = 1e-10;
pub const HERMITIAN_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-9;
pub const EQUIVALENCE_TOL: f64 = 1e-10;

fn omega(d: usize, k: usize) -> C {
    C::from_polar(1.0, 2.0 * std::f64::consts::PI * (k % d) as f64 / d as f64)
}

fn check_size(d: Dimension, pairs: usize) -> Result<()> {
    let limit = match pairs {
        1 | 2 => MAX_TWO_PAIR_DIM,
        3 => MAX_THREE_PAIR_DIM,
        _ => {
            return Err(Error::SizeLimit(format!("the oracle handles 1 to 3 pairs, not {pairs}")));
        }
    };
    if d.get() > limit {
        return Err(Error::SizeLimit(format!(
            "d = {} exceeds the {pairs}-pair oracle limit d <= {limit}",
            d.get()
        )));
    }
    Ok(())
}

/// Single-qudit and two-qudit gate matrices.
pub mod gates {
    use super::*;

    pub fn identity(d: Dimension) -> Mat {
        Mat::identity(d.get(), d.get())
    }

    /// `X^b`.
    pub fn shift(d: Dimension, b: usize) -> Mat {
        let n = d.get();
        Mat::from_fn(n, n, |row, col| if row == (col + b) % n { C::new(1.0, 0.0) } else { C::new(0.0, 0.0) })
    }

    /// `Z^a`.
    pub fn clock(d: Dimension, a: usize) -> Mat {
        let n = d.get();
        Mat::from_fn(n, n, |row, col| if row == col { omega(n, a * row) } else { C::new(0.0, 0.0) })
    }

    pub fn qft(d: Dimension) -> Mat {
        let n = d.get();
        let norm = 1.0 / (n as f64).sqrt();
        Mat::from_fn(n, n, |y, x| omega(n, x * y) * norm)
    }

    /// `|a>|b> -> |a>|a - b>`, first factor control.
    pub fn gxor(d: Dimension) -> Mat {
        let n = d.get();
        let mut m = Mat::zeros(n * n, n * n);
        for a in 0..n {
            for b in 0..n {
                m[(a * n + d.sub(a, b), a * n + b)] = C::new(1.0, 0.0);
            }
        }
        m
    }

    /// `|x> -> |-x>`.
    pub fn negate(d: Dimension) -> Mat {
        let n = d.get();
        Mat::from_fn(n, n, |row, col| if row == d.neg(col) { C::new(1.0, 0.0) } else { C::new(0.0, 0.0) })
    }
}

/// `U M` where `U` acts on the listed qudits (in that order) of an
/// `n`-qudit register and `M` has `d^n` rows.
fn apply_left(m: &Mat, d: Dimension, n: usize, targets: &[usize], u: &Mat) -> Mat {
    let base = d.get();
    let k = targets.len();
    let sub = base.pow(k as u32);
    debug_assert_eq!(u.nrows(), sub);
    let strides: Vec<usize> = targets.iter().map(|&q| base.pow((n - 1 - q) as u32)).collect();
    let offsets: Vec<usize> = (0..sub)
        .map(|t| {
            let mut rest = t;
            let mut off = 0;
            for s in strides.iter().rev() {
                off += (rest % base) * s;
                rest /= base;
            }
            off
        })
        .collect();
    let total = m.nrows();
    let mut out = Mat::zeros(total, m.ncols());
    let mut buf = vec![C::new(0.0, 0.0); sub];
    for start in 0..total {
        // visit each group once, from its member with all target digits zero
        if strides.iter().any(|&s| (start / s) % base != 0) {
            continue;
        }
        for col in 0..m.ncols() {
            for (t, &off) in offsets.iter().enumerate() {
                buf[t] = m[(start + off, col)];
            }
            for (row, &off) in offsets.iter().enumerate() {
                let mut acc = C::new(0.0, 0.0);
                for (t, &b) in buf.iter().enumerate() {
                    acc += u[(row, t)] * b;
                }
                out[(start + off, col)] = acc;
            }
        }
    }
    out
}

fn kron(a: &Mat, b: &Mat) -> Mat {
    a.kronecker(b)
}

/// `|psi_{m,n}>` on two qudits, index `a d + b`.
pub fn bell_vector(d: Dimension, idx: BellIndex) -> Mat {
    let n = d.get();
    let norm = 1.0 / (n as f64).sqrt();
    let mut v = Mat::zeros(n * n, 1);
    for r in 0..n {
        v[(r * n + d.sub(r, idx.amplitude), 0)] = omega(n, idx.phase * r) * norm;
    }
    v
}

/// `|psi_{m, l1, ..}> = d^{-1/2} sum_r w^{m r} |r>|r - l1>|r - l2>...`.
pub fn ghz_vector(d: Dimension, idx: &GhzIndex) -> Mat {
    let n = d.get();
    let parties = idx.parties();
    let norm = 1.0 / (n as f64).sqrt();
    let mut v = Mat::zeros(n.pow(parties as u32), 1);
    for r in 0..n {
        let flat = idx.amplitudes.iter().fold(r, |acc, &l| acc * n + d.sub(r, l));
        v[(flat, 0)] = omega(n, idx.phase * r) * norm;
    }
    v
}

fn bell_basis(d: Dimension) -> Mat {
    let n = d.get();
    let mut v = Mat::zeros(n * n, n * n);
    for idx in BellIndex::all(d) {
        v.set_column(idx.phase * n + idx.amplitude, &bell_vector(d, idx).column(0));
    }
    v
}

/// Bell-diagonal density matrix of one pair.
pub fn bell_diagonal_matrix(s: &CoeffMatrix) -> Mat {
    let d = s.dim();
    let v = bell_basis(d);
    let diag = Mat::from_diagonal(&DVector::from_iterator(
        s.as_slice().len(),
        s.as_slice().iter().map(|&a| C::new(a, 0.0)),
    ));
    &v * diag * v.adjoint()
}

/// `<psi_mn| rho |psi_mn>` for every label, plus the largest off-diagonal
/// magnitude in the Bell basis.
pub fn bell_coefficients(rho: &Mat, d: Dimension) -> (Vec<f64>, f64) {
    let v = bell_basis(d);
    let b = v.adjoint() * rho * &v;
    let n2 = d.get() * d.get();
    let diag = (0..n2).map(|i| b[(i, i)].re).collect();
    let mut off = 0.0f64;
    for i in 0..n2 {
        for j in 0..n2 {
            if i != j {
                off = off.max(b[(i, j)].norm());
            }
        }
    }
    (diag, off)
}

/// Density matrix of `2 * pairs` qudits.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    d: Dimension,
    qudits: usize,
    rho: Mat,
}

impl DenseState {
    pub fn new(d: Dimension, qudits: usize, rho: Mat) -> Result<Self> {
        let dim = d.get().pow(qudits as u32);
        if rho.nrows() != dim || rho.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: rho.nrows(),
            });
        }
        Ok(Self { d, qudits, rho })
    }

    pub fn dim(&self) -> Dimension {
        self.d
    }

    pub fn qudits(&self) -> usize {
        self.qudits
    }

    pub fn pairs(&self) -> usize {
        self.qudits / 2
    }

    pub fn rho(&self) -> &Mat {
        &self.rho
    }

    pub fn trace(&self) -> C {
        self.rho.trace()
    }

    pub fn hermiticity_error(&self) -> f64 {
        (&self.rho - self.rho.adjoint()).iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let h = (&self.rho + self.rho.adjoint()) * C::new(0.5, 0.0);
        h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Trace one, Hermitian, positive semidefinite within the module tolerances.
    pub fn validate(&self) -> Result<()> {
        let tr = self.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::NotNormalized(format!("trace {tr}")));
        }
        let h = self.hermiticity_error();
        if h > HERMITIAN_TOL {
            return Err(Error::NotNormalized(format!("not Hermitian ({h:e})")));
        }
        let ev = self.min_eigenvalue();
        if ev < -PSD_TOL {
            return Err(Error::NotNormalized(format!("negative eigenvalue {ev:e}")));
        }
        Ok(())
    }

    /// `U rho U^dagger` with `U` acting on `targets`.
    pub fn apply(&mut self, targets: &[usize], u: &Mat) {
        let left = apply_left(&self.rho, self.d, self.qudits, targets, u);
        self.rho = apply_left(&left.adjoint(), self.d, self.qudits, targets, u).adjoint();
    }

    /// Single-qudit depolarizing channel as an explicit Kraus sum:
    /// `q rho + (1 - q)/d^2 sum_{a,b} W_ab rho W_ab^dagger`, `W_ab = X^a Z^b`.
    pub fn depolarize(&mut self, qudit: usize, retention: f64) {
        let d = self.d;
        let mut mixed = Mat::zeros(self.rho.nrows(), self.rho.ncols());
        for a in 0..d.get() {
            for b in 0..d.get() {
                let w = gates::shift(d, a) * gates::clock(d, b);
                let mut copy = self.clone();
                copy.apply(&[qudit], &w);
                mixed += copy.rho;
            }
        }
        let n2 = (d.get() * d.get()) as f64;
        self.rho = &self.rho * C::new(retention, 0.0) + mixed * C::new((1.0 - retention) / n2, 0.0);
    }
}

/// Tensor product of `pairs` copies of a Bell-diagonal state.
pub fn build_bell_pairs(coeffs: &CoeffMatrix, pairs: usize) -> Result<DenseState> {
    let d = coeffs.dim();
    if !(2..=3).contains(&pairs) {
        return Err(Error::SizeLimit(format!("the oracle handles 2 or 3 pairs, not {pairs}")));
    }
    check_size(d, pairs)?;
    let one = bell_diagonal_matrix(coeffs);
    let mut rho = one.clone();
    for _ in 1..pairs {
        rho = kron(&rho, &one);
    }
    DenseState::new(d, 2 * pairs, rho)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleVariant {
    P1,
    P2,
    ThreeCopy,
    ThreeCopyP2,
}

impl OracleVariant {
    pub const ALL: [OracleVariant; 4] = [Self::P1, Self::P2, Self::ThreeCopy, Self::ThreeCopyP2];

    pub fn pairs(self) -> usize {
        match self {
            Self::P1 | Self::P2 => 2,
            Self::ThreeCopy | Self::ThreeCopyP2 => 3,
        }
    }

    fn fourier(self) -> bool {
        matches!(self, Self::P2 | Self::ThreeCopyP2)
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::P1 => "p1",
            Self::P2 => "p2",
            Self::ThreeCopy => "three_copy",
            Self::ThreeCopyP2 => "three_copy_p2",
        }
    }

    /// The coefficient-space map this circuit should reproduce.
    pub fn coefficient_map(self, s: &CoeffMatrix) -> Result<(CoeffMatrix, f64)> {
        match self {
            Self::P1 => p1_map(s),
            Self::P2 => p2_map(s),
            Self::ThreeCopy => three_copy_map(s),
            Self::ThreeCopyP2 => three_copy_p2_map(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleStep {
    /// Kept pair after post-selection on all targets reporting difference 0.
    pub state: CoeffMatrix,
    pub success_prob: f64,
    /// Probability of every outcome-difference class; for three pairs the
    /// class of `(c2, c3)` is `c2 d + c3`.
    pub class_probs: Vec<f64>,
    /// Largest Bell-basis off-diagonal of the kept pair.
    pub max_off_diagonal: f64,
}

fn bilateral_fourier(state: &mut DenseState, pair: usize, inverse: bool) {
    let f = gates::qft(state.d);
    let (fa, fb) = if inverse {
        (f.adjoint(), f.transpose())
    } else {
        (f.clone(), f.conjugate())
    };
    state.apply(&[2 * pair], &fa);
    state.apply(&[2 * pair + 1], &fb);
}

/// Runs one recurrence circuit on a dense state: optional bilateral QFT on
/// every pair, bilateral GXOR from pair 1 onto each other pair, Z measurement
/// of the target pairs, post-selection on `zeta - xi = 0`, and for the Fourier
/// variants the inverse bilateral QFT on the kept pair.
pub fn simulate_recurrence_step(s: &DenseState, variant: OracleVariant) -> Result<OracleStep> {
    let pairs = variant.pairs();
    if s.pairs() != pairs || !s.qudits.is_multiple_of(2) {
        return Err(Error::DimensionMismatch {
            expected: pairs,
            found: s.pairs(),
        });
    }
    check_size(s.d, pairs)?;
    let d = s.d;
    let n = d.get();
    let mut state = s.clone();
    if variant.fourier() {
        for p in 0..pairs {
            bilateral_fourier(&mut state, p, false);
        }
    }
    let g = gates::gxor(d);
    for t in 1..pairs {
        state.apply(&[0, 2 * t], &g);
        state.apply(&[1, 2 * t + 1], &g);
    }

    let measured = 2 * (pairs - 1);
    let block = n.pow(measured as u32);
    let classes = n.pow((pairs - 1) as u32);
    let mut kept = vec![Mat::zeros(n * n, n * n); classes];
    for z in 0..block {
        let mut digits = vec![0; measured];
        let mut rest = z;
        for slot in digits.iter_mut().rev() {
            *slot = rest % n;
            rest /= n;
        }
        let class = digits.chunks(2).fold(0, |acc, ab| acc * n + d.sub(ab[0], ab[1]));
        for i in 0..n * n {
            for j in 0..n * n {
                kept[class][(i, j)] += state.rho[(i * block + z, j * block + z)];
            }
        }
    }
    let class_probs: Vec<f64> = kept.iter().map(|m| m.trace().re).collect();
    let success_prob = class_probs[0];
    if !(success_prob > 0.0) {
        return Err(Error::ZeroSuccessProbability);
    }
    let mut out = DenseState::new(d, 2, &kept[0] * C::new(1.0 / success_prob, 0.0))?;
    if variant.fourier() {
        bilateral_fourier(&mut out, 0, true);
    }
    let (coeffs, max_off_diagonal) = bell_coefficients(&out.rho, d);
    Ok(OracleStep {
        state: CoeffMatrix::new(d, coeffs)?,
        success_prob,
        class_probs,
        max_off_diagonal,
    })
}

/// Builds the input pairs from coefficients and simulates one step.
pub fn simulate_from_coefficients(s: &CoeffMatrix, variant: OracleVariant) -> Result<OracleStep> {
    simulate_recurrence_step(&build_bell_pairs(s, variant.pairs())?, variant)
}

/// Random Bell-diagonal coefficients with uniform raw weights.
pub fn random_bell_diagonal(d: Dimension, rng: &mut impl Rng) -> CoeffMatrix {
    let raw: Vec<f64> = (0..d.get() * d.get()).map(|_| rng.gen::<f64>() + 1e-3).collect();
    let sum: f64 = raw.iter().sum();
    CoeffMatrix::new(d, raw.into_iter().map(|x| x / sum).collect()).expect("normalized by construction")
}

/// Random full-rank two-qudit density matrix `G G^dagger / tr`.
pub fn random_density_matrix(d: Dimension, rng: &mut impl Rng) -> Mat {
    let n2 = d.get() * d.get();
    let g = Mat::from_fn(n2, n2, |_, _| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let rho = &g * g.adjoint();
    let tr = rho.trace();
    rho / tr
}

/// Averages `g rho g^dagger` over the `d^2` bilateral operators
/// `g_ab = X^a Z^b (x) (X^a Z^b)^*`, which act on `|psi_mn>` as phases.
pub fn bilateral_pauli_twirl(rho: &Mat, d: Dimension) -> Mat {
    let state = DenseState {
        d,
        qudits: 2,
        rho: rho.clone(),
    };
    let mut acc = Mat::zeros(rho.nrows(), rho.ncols());
    for a in 0..d.get() {
        for b in 0..d.get() {
            let w = gates::shift(d, a) * gates::clock(d, b);
            let mut copy = state.clone();
            copy.apply(&[0], &w);
            copy.apply(&[1], &w.conjugate());
            acc += copy.rho;
        }
    }
    acc / C::new((d.get() * d.get()) as f64, 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwirlCheck {
    /// Largest Bell-basis off-diagonal magnitude after averaging.
    pub max_off_diagonal: f64,
    /// Largest change of a Bell-basis diagonal entry.
    pub max_diagonal_change: f64,
}

/// Twirls random non-diagonal states and reports how diagonal the result is
/// in the Bell basis, and whether the diagonal was left alone.
pub fn verify_depolarization_identity(d: Dimension, trials: usize, seed: u64) -> Result<TwirlCheck> {
    check_size(d, 1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = TwirlCheck {
        max_off_diagonal: 0.0,
        max_diagonal_change: 0.0,
    };
    for _ in 0..trials {
        let rho = random_density_matrix(d, &mut rng);
        let (before, _) = bell_coefficients(&rho, d);
        let (after, off) = bell_coefficients(&bilateral_pauli_twirl(&rho, d), d);
        let change = before.iter().zip(&after).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        report.max_off_diagonal = report.max_off_diagonal.max(off);
        report.max_diagonal_change = report.max_diagonal_change.max(change);
    }
    Ok(report)
}

/// Largest deviation between the Kraus-sum depolarizing channel on either
/// qudit and [`depolarize_channel`] on random Bell-diagonal pairs.
pub fn verify_depolarizing_channel(d: Dimension, trials: usize, seed: u64) -> Result<f64> {
    check_size(d, 1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let s = random_bell_diagonal(d, &mut rng);
        let q: f64 = rng.gen();
        let expected = depolarize_channel(&s, q)?;
        for qudit in 0..2 {
            let mut dense = DenseState::new(d, 2, bell_diagonal_matrix(&s))?;
            dense.depolarize(qudit, q);
            let (got, off) = bell_coefficients(&dense.rho, d);
            worst = worst.max(off);
            for (x, y) in got.iter().zip(expected.as_slice()) {
                worst = worst.max((x - y).abs());
            }
        }
    }
    Ok(worst)
}

fn overlap_defect(expected: &Mat, got: &Mat) -> f64 {
    (1.0 - (expected.adjoint() * got)[(0, 0)].norm_sqr()).abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexMapCheck {
    pub bgxor: f64,
    pub bqft_unitary: f64,
    pub pauli: f64,
}

impl IndexMapCheck {
    pub fn max(&self) -> f64 {
        self.bgxor.max(self.bqft_unitary).max(self.pauli)
    }
}

/// Applies the physical gates to every Bell basis state (pair of states for
/// the GXOR) and reports `max |1 - |<expected|U|in>|^2|`.
pub fn verify_index_maps(d: Dimension) -> Result<IndexMapCheck> {
    check_size(d, 2)?;
    let mut report = IndexMapCheck {
        bgxor: 0.0,
        bqft_unitary: 0.0,
        pauli: 0.0,
    };
    let g = gates::gxor(d);
    let f = gates::qft(d);
    for c in BellIndex::all(d) {
        let vc = bell_vector(d, c);
        for t in BellIndex::all(d) {
            let input = kron(&vc, &bell_vector(d, t));
            let out = apply_left(&input, d, 4, &[0, 2], &g);
            let out = apply_left(&out, d, 4, &[1, 3], &g);
            let (c2, t2) = bgxor_index_map(c, t, d)?;
            let expected = kron(&bell_vector(d, c2), &bell_vector(d, t2));
            report.bgxor = report.bgxor.max(overlap_defect(&expected, &out));
        }
        let out = apply_left(&vc, d, 2, &[0], &f);
        let out = apply_left(&out, d, 2, &[1], &f.conjugate());
        let expected = bell_vector(d, bqft_unitary_index_map(c, d));
        report.bqft_unitary = report.bqft_unitary.max(overlap_defect(&expected, &out));
        for a in 0..d.get() {
            for b in 0..d.get() {
                let w = gates::shift(d, b) * gates::clock(d, a);
                let out = apply_left(&vc, d, 2, &[0], &w);
                let expected = bell_vector(d, pauli_on_bell(a, b, c, d));
                report.pauli = report.pauli.max(overlap_defect(&expected, &out));
            }
        }
    }
    Ok(report)
}

const GHZ_PARTIES: usize = 3;

fn check_ghz_size(d: Dimension) -> Result<()> {
    if d.get() > MAX_THREE_PAIR_DIM {
        return Err(Error::SizeLimit(format!(
            "mGXOR check needs d^6 amplitudes; d = {} exceeds d <= {MAX_THREE_PAIR_DIM}",
            d.get()
        )));
    }
    Ok(())
}

fn all_ghz(d: Dimension) -> Vec<GhzIndex> {
    let n = d.get();
    (0..n.pow(GHZ_PARTIES as u32))
        .map(|flat| GhzIndex::from_flat(flat, GHZ_PARTIES, d))
        .collect()
}

/// Trilateral GXOR: each party's control qudit (0..3) acts on its target
/// qudit (3..6).
fn trilateral_gxor(v: &Mat, d: Dimension) -> Mat {
    let g = gates::gxor(d);
    (0..GHZ_PARTIES).fold(v.clone(), |acc, p| apply_left(&acc, d, 2 * GHZ_PARTIES, &[p, GHZ_PARTIES + p], &g))
}

/// `|psi_{k,i,j}> -> |psi_{k,-i,-j}>` on the target register.
fn amplitude_relabel(d: Dimension) -> Mat {
    let size = d.get().pow(GHZ_PARTIES as u32);
    let mut u = Mat::zeros(size, size);
    for idx in all_ghz(d) {
        let flipped = GhzIndex {
            phase: idx.phase,
            amplitudes: idx.amplitudes.iter().map(|&a| d.neg(a)).collect(),
        };
        u += ghz_vector(d, &flipped) * ghz_vector(d, &idx).adjoint();
    }
    u
}

fn check_ghz_map(
    d: Dimension,
    prepare: impl Fn(&Mat) -> Mat,
    expected: impl Fn(&GhzIndex, &GhzIndex) -> Result<(GhzIndex, GhzIndex)>,
) -> Result<f64> {
    check_ghz_size(d)?;
    let labels = all_ghz(d);
    let mut worst = 0.0f64;
    for c in &labels {
        let vc = ghz_vector(d, c);
        for t in &labels {
            let input = kron(&vc, &ghz_vector(d, t));
            let out = trilateral_gxor(&prepare(&input), d);
            let (c2, t2) = expected(c, t)?;
            let want = kron(&ghz_vector(d, &c2), &ghz_vector(d, &t2));
            worst = worst.max(overlap_defect(&want, &out));
        }
    }
    Ok(worst)
}

/// Largest projector defect of the modified multilateral GXOR (target
/// amplitudes relabelled `i -> -i`, then the trilateral GXOR) against
/// [`mgxor_index_map`], over all `d^6` pairs of three-party GHZ labels.
pub fn mgxor_defect(d: Dimension) -> Result<f64> {
    check_ghz_size(d)?;
    let relabel = amplitude_relabel(d);
    check_ghz_map(
        d,
        |v| apply_left(v, d, 2 * GHZ_PARTIES, &[3, 4, 5], &relabel),
        |c, t| mgxor_index_map(c, t, d),
    )
}

pub fn verify_mgxor_index_map(d: Dimension) -> Result<bool> {
    Ok(mgxor_defect(d)? < EQUIVALENCE_TOL)
}

/// Same check for the purely local variant, every target qudit negated
/// before the trilateral GXOR: `(m - k, l, p), (k, l + i, p + j)`.
pub fn mgxor_local_defect(d: Dimension) -> Result<f64> {
    let neg = gates::negate(d);
    check_ghz_map(
        d,
        |v| (3..6).fold(v.clone(), |acc, q| apply_left(&acc, d, 2 * GHZ_PARTIES, &[q], &neg)),
        |c, t| {
            let control = GhzIndex {
                phase: d.sub(c.phase, t.phase),
                amplitudes: c.amplitudes.clone(),
            };
            let target = GhzIndex {
                phase: t.phase,
                amplitudes: c.amplitudes.iter().zip(&t.amplitudes).map(|(&l, &i)| d.add(l, i)).collect(),
            };
            Ok((control, target))
        },
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleCheck {
    pub check: String,
    pub d: usize,
    pub max_deviation: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub seed: u64,
    pub states_per_dimension: usize,
    pub checks: Vec<OracleCheck>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn max_deviation(&self) -> f64 {
        self.checks.iter().map(|c| c.max_deviation).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquivalenceCheck {
    pub state: f64,
    pub probability: f64,
    /// `|1 - sum of class probabilities|`.
    pub class_sum: f64,
}

/// Compares `variant`'s circuit against its coefficient map on `states`
/// random Bell-diagonal inputs.
pub fn map_equivalence(d: Dimension, variant: OracleVariant, states: usize, seed: u64) -> Result<EquivalenceCheck> {
    check_size(d, variant.pairs())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = EquivalenceCheck {
        state: 0.0,
        probability: 0.0,
        class_sum: 0.0,
    };
    for _ in 0..states {
        let s = random_bell_diagonal(d, &mut rng);
        let step = simulate_from_coefficients(&s, variant)?;
        let (expected, prob) = variant.coefficient_map(&s)?;
        out.state = out
            .state
            .max(step.state.max_abs_diff(&expected).unwrap_or(f64::INFINITY))
            .max(step.max_off_diagonal);
        out.probability = out.probability.max((step.success_prob - prob).abs());
        out.class_sum = out.class_sum.max((1.0 - step.class_probs.iter().sum::<f64>()).abs());
    }
    Ok(out)
}

/// The full oracle suite for each listed dimension. Three-pair checks and the
/// mGXOR check run only where the size limits allow.
pub fn run_suite(dims: &[Dimension], states: usize, seed: u64) -> Result<OracleReport> {
    for &d in dims {
        check_size(d, 2)?;
    }
    let mut checks = Vec::new();
    let mut push = |check: &str, d: Dimension, dev: f64| {
        checks.push(OracleCheck {
            check: check.to_string(),
            d: d.get(),
            max_deviation: dev,
            passed: dev < EQUIVALENCE_TOL,
        })
    };
    for &d in dims {
        let dseed = seed ^ (d.get() as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        for variant in OracleVariant::ALL {
            if check_size(d, variant.pairs()).is_err() {
                continue;
            }
            let e = map_equivalence(d, variant, states, dseed)?;
            push(&format!("{}_state", variant.name()), d, e.state);
            push(&format!("{}_probability", variant.name()), d, e.probability);
            push(&format!("{}_class_sum", variant.name()), d, e.class_sum);
        }
        push("depolarizing_kraus", d, verify_depolarizing_channel(d, states.min(20), dseed)?);
        let t = verify_depolarization_identity(d, states.min(20), dseed)?;
        push("twirl_off_diagonal", d, t.max_off_diagonal);
        push("twirl_diagonal", d, t.max_diagonal_change);
        let m = verify_index_maps(d)?;
        push("bgxor_map", d, m.bgxor);
        push("bqft_unitary_map", d, m.bqft_unitary);
        push("pauli_map", d, m.pauli);
        if check_ghz_size(d).is_ok() {
            push("mgxor_map", d, mgxor_defect(d)?);
            push("mgxor_local_map", d, mgxor_local_defect(d)?);
        }
    }
    Ok(OracleReport {
        seed,
        states_per_dimension: states,
        checks,
    })
}
