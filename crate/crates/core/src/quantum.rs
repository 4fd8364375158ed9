//! CHSH and GHZ correlation arithmetic.
//!
//! Two-qubit states use the lexicographic basis `|00⟩, |01⟩, |10⟩, |11⟩`
//! with qubit 1 as the most significant position. Observables are stored as
//! local operators; [`expectation`] builds `A ⊗ B` on demand.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

const EXACT: f64 = 1e-12;
const IMAG_RESIDUE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuantumError {
    #[error("state norm is {0}, expected 1")]
    NotNormalized(f64),
    #[error("state length {0} is not a power of two")]
    BadLength(usize),
    #[error("operator is not square or not Hermitian")]
    NotHermitian,
    #[error("dimension mismatch: state {state}, operator {operator}")]
    Dimension { state: usize, operator: usize },
    #[error("expectation value has imaginary part {0}")]
    ImaginaryResidue(f64),
    #[error("need at least 1000 trials, got {0}")]
    TooFewTrials(usize),
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: CVector,
}

impl StateVector {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self, QuantumError> {
        let n = amplitudes.len();
        if n == 0 || !n.is_power_of_two() {
            return Err(QuantumError::BadLength(n));
        }
        let v = CVector::from_vec(amplitudes);
        let norm_sq: f64 = v.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > EXACT {
            return Err(QuantumError::NotNormalized(norm_sq.sqrt()));
        }
        Ok(Self { amplitudes: v })
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }
}

/// `(|01⟩ − |10⟩)/√2`
pub fn bell_singlet() -> StateVector {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    StateVector::new(vec![c(0.0), c(h), c(-h), c(0.0)]).expect("singlet is normalized")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    matrix: CMatrix,
}

impl Observable {
    pub fn new(matrix: CMatrix) -> Result<Self, QuantumError> {
        if !matrix.is_square() {
            return Err(QuantumError::NotHermitian);
        }
        let diff = &matrix - matrix.adjoint();
        if diff.iter().any(|z| z.norm() > EXACT) {
            return Err(QuantumError::NotHermitian);
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: CMatrix::identity(dim, dim),
        }
    }

    /// Lift a one-qubit operator onto qubit `position` (1-based) of an
    /// `n_qubits` register.
    pub fn embed(&self, position: usize, n_qubits: usize) -> Observable {
        assert!((1..=n_qubits).contains(&position));
        let id = CMatrix::identity(2, 2);
        let mut m = CMatrix::identity(1, 1);
        for q in 1..=n_qubits {
            m = m.kronecker(if q == position { &self.matrix } else { &id });
        }
        Observable { matrix: m }
    }

    /// Largest entry of `|M² − I|`.
    pub fn involution_defect(&self) -> f64 {
        let n = self.dim();
        (&self.matrix * &self.matrix - CMatrix::identity(n, n))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    fn scaled_sum(a: f64, x: &Observable, b: f64, y: &Observable) -> Observable {
        Observable {
            matrix: x.matrix.map(|z| z * a) + y.matrix.map(|z| z * b),
        }
    }
}

/// Bit flip, σ₁.
pub fn pauli_x() -> Observable {
    Observable {
        matrix: CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]),
    }
}

/// Phase flip, σ₃.
pub fn pauli_z() -> Observable {
    Observable {
        matrix: CMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)]),
    }
}

/// Alice measures `q` or `r` on qubit 1, Bob `s` or `t` on qubit 2.
#[derive(Debug, Clone, PartialEq)]
pub struct ChshObservables {
    pub q: Observable,
    pub r: Observable,
    pub s: Observable,
    pub t: Observable,
}

/// `Q = Z`, `R = X`, `S = (−Z − X)/√2`, `T = (Z − X)/√2`.
pub fn chsh_observables() -> ChshObservables {
    let (x, z) = (pauli_x(), pauli_z());
    let h = std::f64::consts::FRAC_1_SQRT_2;
    ChshObservables {
        s: Observable::scaled_sum(-h, &z, -h, &x),
        t: Observable::scaled_sum(h, &z, -h, &x),
        q: z,
        r: x,
    }
}

/// `⟨ψ| A ⊗ B |ψ⟩` with `A` on the leading qubits and `B` on the rest.
pub fn expectation(state: &StateVector, a: &Observable, b: &Observable) -> Result<f64, QuantumError> {
    let op = a.matrix.kronecker(&b.matrix);
    if op.nrows() != state.dim() {
        return Err(QuantumError::Dimension {
            state: state.dim(),
            operator: op.nrows(),
        });
    }
    let psi = &state.amplitudes;
    let value = psi.dotc(&(&op * psi));
    if value.im.abs() > IMAG_RESIDUE {
        return Err(QuantumError::ImaginaryResidue(value.im));
    }
    Ok(value.re)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshResult {
    pub e_qs: f64,
    pub e_rs: f64,
    pub e_rt: f64,
    pub e_qt: f64,
    /// `E(QS) + E(RS) + E(RT) − E(QT)`
    pub s_value: f64,
}

pub fn chsh_combination(state: &StateVector, obs: &ChshObservables) -> Result<ChshResult, QuantumError> {
    let e_qs = expectation(state, &obs.q, &obs.s)?;
    let e_rs = expectation(state, &obs.r, &obs.s)?;
    let e_rt = expectation(state, &obs.r, &obs.t)?;
    let e_qt = expectation(state, &obs.q, &obs.t)?;
    Ok(ChshResult {
        e_qs,
        e_rs,
        e_rt,
        e_qt,
        s_value: e_qs + e_rs + e_rt - e_qt,
    })
}

/// The singlet measured with the standard CHSH observables.
pub fn chsh_quantum() -> ChshResult {
    chsh_combination(&bell_singlet(), &chsh_observables()).expect("fixed two-qubit construction")
}

/// Deterministic outcome assignment `(Q, R, S, T)`, each ±1.
pub type Assignment = [i8; 4];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassicalChsh {
    pub max: i32,
    pub argmax: Vec<Assignment>,
}

/// Evaluate `Σ signs[k]·term_k` with terms `QS, RS, RT, QT`.
pub fn chsh_terms(a: Assignment, signs: [i32; 4]) -> i32 {
    let [q, r, s, t] = a.map(i32::from);
    signs[0] * q * s + signs[1] * r * s + signs[2] * r * t + signs[3] * q * t
}

pub fn all_assignments() -> impl Iterator<Item = Assignment> {
    (0..16u8).map(|bits| {
        let v = |k: u8| if bits >> k & 1 == 1 { -1 } else { 1 };
        [v(3), v(2), v(1), v(0)]
    })
}

/// Exhaustive maximum of a signed CHSH combination over all 16 assignments.
pub fn classical_max(signs: [i32; 4]) -> ClassicalChsh {
    let max = all_assignments()
        .map(|a| chsh_terms(a, signs))
        .max()
        .expect("16 assignments");
    let argmax = all_assignments()
        .filter(|&a| chsh_terms(a, signs) == max)
        .collect();
    ClassicalChsh { max, argmax }
}

/// `QS + RS + RT − QT` maximised over deterministic local assignments.
pub fn chsh_classical_max() -> ClassicalChsh {
    classical_max([1, 1, 1, -1])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Party {
    Alice,
    Bob,
}

/// A local hidden-variable model: each side's ±1 outcome depends only on the
/// shared variable `lambda ∈ [0, 1)` and its own setting (0 or 1; Alice's
/// `Q`/`R`, Bob's `S`/`T`).
pub trait LocalStrategy: Sync {
    fn outcome(&self, party: Party, setting: usize, lambda: f64) -> i8;
}

/// Everyone always answers `+1`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ConstantStrategy;

impl LocalStrategy for ConstantStrategy {
    fn outcome(&self, _: Party, _: usize, _: f64) -> i8 {
        1
    }
}

/// `lambda` picks one of the 16 deterministic assignments uniformly.
#[derive(Debug, Clone, Copy, Default)]
pub struct RandomTableStrategy;

impl LocalStrategy for RandomTableStrategy {
    fn outcome(&self, party: Party, setting: usize, lambda: f64) -> i8 {
        let table = ((lambda * 16.0) as usize).min(15);
        let bit = match party {
            Party::Alice => 3 - setting,
            Party::Bob => 1 - setting,
        };
        if table >> bit & 1 == 1 {
            -1
        } else {
            1
        }
    }
}

/// Classical spin model: a hidden direction `θ = 2πλ`, each side answers
/// `sign(cos(θ − axis))`. Alice's axes are the Bloch angles of `Z` and `X`,
/// Bob's are those of `S` and `T` rotated by π (singlet anticorrelation).
/// Correlations come out as `1 − 2Δ/π`, which saturates the classical bound.
#[derive(Debug, Clone, Copy, Default)]
pub struct HiddenAxisStrategy;

impl HiddenAxisStrategy {
    fn axis(party: Party, setting: usize) -> f64 {
        use std::f64::consts::PI;
        match (party, setting) {
            (Party::Alice, 0) => 0.0,
            (Party::Alice, _) => PI / 2.0,
            (Party::Bob, 0) => PI / 4.0,
            (Party::Bob, _) => 3.0 * PI / 4.0,
        }
    }
}

impl LocalStrategy for HiddenAxisStrategy {
    fn outcome(&self, party: Party, setting: usize, lambda: f64) -> i8 {
        let theta = 2.0 * std::f64::consts::PI * lambda;
        if (theta - Self::axis(party, setting)).cos() >= 0.0 {
            1
        } else {
            -1
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LhvEstimate {
    pub n_trials: usize,
    /// Empirical `E(QS), E(RS), E(RT), E(QT)`.
    pub means: [f64; 4],
    pub counts: [usize; 4],
    pub estimate: f64,
    pub standard_error: f64,
}

/// Monte Carlo CHSH run: per trial a shared `lambda`, independent uniform
/// setting choices on each side, and the strategy's outcomes.
pub fn lhv_simulate(
    strategy: &dyn LocalStrategy,
    n_trials: usize,
    seed: u64,
) -> Result<LhvEstimate, QuantumError> {
    if n_trials < 1000 {
        return Err(QuantumError::TooFewTrials(n_trials));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = [0i64; 4];
    let mut counts = [0usize; 4];
    for _ in 0..n_trials {
        let lambda: f64 = rng.random();
        let a_set = rng.random_range(0..2usize);
        let b_set = rng.random_range(0..2usize);
        let product = i64::from(strategy.outcome(Party::Alice, a_set, lambda))
            * i64::from(strategy.outcome(Party::Bob, b_set, lambda));
        // term order QS, RS, RT, QT
        let term = match (a_set, b_set) {
            (0, 0) => 0,
            (1, 0) => 1,
            (1, 1) => 2,
            _ => 3,
        };
        sum[term] += product;
        counts[term] += 1;
    }
    let mut means = [0.0; 4];
    let mut var = 0.0;
    for k in 0..4 {
        if counts[k] > 0 {
            let n = counts[k] as f64;
            means[k] = sum[k] as f64 / n;
            // products are ±1, so the sample variance is 1 − mean²
            var += (1.0 - means[k] * means[k]).max(0.0) / n;
        }
    }
    Ok(LhvEstimate {
        n_trials,
        means,
        counts,
        estimate: means[0] + means[1] + means[2] - means[3],
        standard_error: var.sqrt(),
    })
}

/// Phase settings `φ₁, φ₂, φ₃` (radians).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GhzConfig {
    pub phi: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GhzResult {
    /// Probability for each sign triple (`+1` unprimed detector, `−1` primed).
    pub outcomes: Vec<([i8; 3], f64)>,
    pub expectation: f64,
}

impl GhzResult {
    pub fn probability(&self, signs: [i8; 3]) -> f64 {
        self.outcomes
            .iter()
            .find(|(s, _)| *s == signs)
            .map(|(_, p)| *p)
            .unwrap_or(0.0)
    }
}

pub fn sign_triples() -> impl Iterator<Item = [i8; 3]> {
    (0..8u8).map(|bits| {
        let v = |k: u8| if bits >> k & 1 == 1 { -1 } else { 1 };
        [v(2), v(1), v(0)]
    })
}

/// `P(s₁, s₂, s₃) = [1 + s₁s₂s₃·sin(φ₁ + φ₂ + φ₃)]/8`; the expectation of
/// the product is summed from the table.
pub fn ghz_correlations(config: &GhzConfig) -> GhzResult {
    let sin_sum = config.phi.iter().sum::<f64>().sin();
    let outcomes: Vec<([i8; 3], f64)> = sign_triples()
        .map(|s| {
            let parity = f64::from(s[0] * s[1] * s[2]);
            (s, (1.0 + parity * sin_sum) / 8.0)
        })
        .collect();
    let expectation = outcomes
        .iter()
        .map(|(s, p)| f64::from(s[0] * s[1] * s[2]) * p)
        .sum();
    GhzResult {
        outcomes,
        expectation,
    }
}

/// A perfect-correlation constraint: which particles use the `π/2` setting,
/// and the required product of the three pre-assigned values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GhzConstraint {
    pub shifted: [bool; 3],
    pub product: i8,
}

/// `(π/2,0,0)`, `(0,π/2,0)`, `(0,0,π/2)` → `+1`; `(π/2,π/2,π/2)` → `−1`.
pub const GHZ_CONSTRAINTS: [GhzConstraint; 4] = [
    GhzConstraint { shifted: [true, false, false], product: 1 },
    GhzConstraint { shifted: [false, true, false], product: 1 },
    GhzConstraint { shifted: [false, false, true], product: 1 },
    GhzConstraint { shifted: [true, true, true], product: -1 },
];

/// Pre-existing values `v[i][0] = v_i(0)`, `v[i][1] = v_i(π/2)`.
pub type HiddenValues = [[i8; 2]; 3];

impl GhzConstraint {
    pub fn holds(&self, v: &HiddenValues) -> bool {
        let p: i8 = (0..3).map(|i| v[i][usize::from(self.shifted[i])]).product();
        p == self.product
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GhzContradiction {
    pub total: usize,
    /// Assignments satisfying each constraint individually.
    pub per_constraint: [usize; 4],
    /// `subset_counts[mask]`: assignments satisfying every constraint whose
    /// bit is set in `mask`.
    pub subset_counts: [usize; 16],
    pub satisfying_first_three: usize,
    pub satisfying_all_four: usize,
}

fn hidden_values(bits: u8) -> HiddenValues {
    let v = |k: u8| if bits >> k & 1 == 1 { -1 } else { 1 };
    [[v(0), v(1)], [v(2), v(3)], [v(4), v(5)]]
}

/// Enumerate all 64 value assignments against the four constraints.
pub fn ghz_contradiction() -> GhzContradiction {
    let mut per_constraint = [0; 4];
    let mut subset_counts = [0; 16];
    for bits in 0..64u8 {
        let v = hidden_values(bits);
        let mut holds = 0usize;
        for (k, c) in GHZ_CONSTRAINTS.iter().enumerate() {
            if c.holds(&v) {
                per_constraint[k] += 1;
                holds |= 1 << k;
            }
        }
        for (mask, count) in subset_counts.iter_mut().enumerate() {
            if mask & holds == mask {
                *count += 1;
            }
        }
    }
    GhzContradiction {
        total: 64,
        per_constraint,
        satisfying_first_three: subset_counts[0b0111],
        satisfying_all_four: subset_counts[0b1111],
        subset_counts,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

    #[test]
    fn singlet_amplitudes() {
        let s = bell_singlet();
        assert!((s.norm() - 1.0).abs() < 1e-15);
        let a = s.amplitudes();
        assert_eq!(a[0], c(0.0));
        assert_eq!(a[1], c(FRAC_1_SQRT_2));
        assert_eq!(a[2], c(-FRAC_1_SQRT_2));
        assert_eq!(a[3], c(0.0));
    }

    #[test]
    fn pauli_matrices() {
        let z = pauli_z();
        assert_eq!(z.matrix()[(0, 0)], c(1.0));
        assert_eq!(z.matrix()[(1, 1)], c(-1.0));
        assert_eq!(z.matrix()[(0, 1)], c(0.0));
        let x = pauli_x();
        assert_eq!(x.matrix()[(0, 1)], c(1.0));
        assert_eq!(x.matrix()[(1, 0)], c(1.0));
        assert_eq!(x.matrix()[(0, 0)], c(0.0));
    }

    #[test]
    fn chsh_observables_are_involutions() {
        let o = chsh_observables();
        for (obs, pos) in [(&o.q, 1), (&o.r, 1), (&o.s, 2), (&o.t, 2)] {
            assert!(obs.involution_defect() < 1e-12);
            let big = obs.embed(pos, 2);
            assert_eq!(big.dim(), 4);
            assert!(big.involution_defect() < 1e-12);
            assert!(Observable::new(big.matrix().clone()).is_ok());
        }
    }

    #[test]
    fn singlet_expectations() {
        let psi = bell_singlet();
        let o = chsh_observables();
        assert!((expectation(&psi, &o.q, &o.s).unwrap() - FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((expectation(&psi, &o.q, &o.t).unwrap() + FRAC_1_SQRT_2).abs() < 1e-12);
        let id = Observable::identity(2);
        assert!((expectation(&psi, &id, &id).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn expectation_dimension_mismatch() {
        let psi = bell_singlet();
        let id4 = Observable::identity(4);
        assert!(matches!(
            expectation(&psi, &id4, &id4),
            Err(QuantumError::Dimension { .. })
        ));
    }

    #[test]
    fn rejects_invalid_inputs() {
        assert!(matches!(
            StateVector::new(vec![c(1.0), c(1.0)]),
            Err(QuantumError::NotNormalized(_))
        ));
        assert!(matches!(
            StateVector::new(vec![c(1.0), c(0.0), c(0.0)]),
            Err(QuantumError::BadLength(3))
        ));
        let m = CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)]);
        assert!(Observable::new(m).is_err());
    }

    #[test]
    fn quantum_value_is_two_root_two() {
        let r = chsh_quantum();
        assert!((r.s_value - 2.0 * SQRT_2).abs() < 1e-12);
        for e in [r.e_qs, r.e_rs, r.e_rt, r.e_qt] {
            assert!((e.abs() - FRAC_1_SQRT_2).abs() < 1e-12);
        }
    }

    #[test]
    fn swapped_bob_settings_stay_within_tsirelson() {
        let o = chsh_observables();
        let swapped = ChshObservables {
            s: o.t.clone(),
            t: o.s.clone(),
            ..o
        };
        let r = chsh_combination(&bell_singlet(), &swapped).unwrap();
        assert!(r.s_value.abs() <= 2.0 * SQRT_2 + 1e-9);
    }

    #[test]
    fn classical_bound() {
        let c = chsh_classical_max();
        assert_eq!(c.max, 2);
        assert!(all_assignments().all(|a| chsh_terms(a, [1, 1, 1, -1]).abs() == 2));
        assert_eq!(c.argmax.len(), 8);
        assert_eq!(classical_max([1, 1, 1, 1]).max, 4);
        assert_eq!(all_assignments().count(), 16);
    }

    #[test]
    fn constant_strategy_gives_exactly_two() {
        let e = lhv_simulate(&ConstantStrategy, 10_000, 1).unwrap();
        assert_eq!(e.estimate, 2.0);
        assert_eq!(e.standard_error, 0.0);
        assert_eq!(e.counts.iter().sum::<usize>(), 10_000);
    }

    #[test]
    fn lhv_requires_enough_trials() {
        assert_eq!(
            lhv_simulate(&ConstantStrategy, 999, 1).unwrap_err(),
            QuantumError::TooFewTrials(999)
        );
    }

    #[test]
    fn lhv_seed_reproducible() {
        let a = lhv_simulate(&HiddenAxisStrategy, 20_000, 7).unwrap();
        let b = lhv_simulate(&HiddenAxisStrategy, 20_000, 7).unwrap();
        assert_eq!(a.estimate.to_bits(), b.estimate.to_bits());
        assert_eq!(a, b);
    }

    #[test]
    fn ghz_perfect_correlations() {
        let plus = ghz_correlations(&GhzConfig { phi: [PI / 2.0, 0.0, 0.0] });
        assert!((plus.expectation - 1.0).abs() < 1e-12);
        let minus = ghz_correlations(&GhzConfig { phi: [PI / 2.0; 3] });
        assert!((minus.expectation + 1.0).abs() < 1e-12);
    }

    #[test]
    fn ghz_table_at_quarter_turn() {
        let r = ghz_correlations(&GhzConfig { phi: [PI / 6.0; 3] });
        for s in sign_triples() {
            let expected = if s[0] * s[1] * s[2] == 1 { 0.25 } else { 0.0 };
            assert!((r.probability(s) - expected).abs() < 1e-12, "{s:?}");
        }
        let flat = ghz_correlations(&GhzConfig { phi: [0.0; 3] });
        assert!(flat.outcomes.iter().all(|(_, p)| *p == 0.125));
    }

    #[test]
    fn ghz_enumeration() {
        let r = ghz_contradiction();
        assert_eq!(r.total, 64);
        assert_eq!(r.satisfying_all_four, 0);
        assert_eq!(r.per_constraint, [32; 4]);
        assert_eq!(r.subset_counts[0], 64);
    }
}
