//! Tsallis entropy `S_q = k·(1 − Σ p_iᵠ)/(q − 1)` and its pseudo-additive
//! composition rule for independent systems.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Below this distance from `q = 1` the Shannon form is used.
pub const SHANNON_BAND: f64 = 1e-9;
const NORM_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EntropyError {
    #[error("distribution is empty")]
    Empty,
    #[error("probability p[{index}] = {value} is negative or not finite")]
    BadProbability { index: usize, value: f64 },
    #[error("probabilities sum to {0}, expected 1")]
    NotNormalized(f64),
    #[error("entropic index q = {0} is not finite")]
    BadIndex(f64),
}

/// Neumaier-compensated sum.
fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    probabilities: Vec<f64>,
}

impl Distribution {
    pub fn new(probabilities: Vec<f64>) -> Result<Self, EntropyError> {
        if probabilities.is_empty() {
            return Err(EntropyError::Empty);
        }
        if let Some((index, &value)) = probabilities
            .iter()
            .enumerate()
            .find(|(_, p)| !(p.is_finite() && **p >= 0.0))
        {
            return Err(EntropyError::BadProbability { index, value });
        }
        let total = compensated_sum(probabilities.iter().copied());
        if (total - 1.0).abs() > NORM_TOL {
            return Err(EntropyError::NotNormalized(total));
        }
        Ok(Self { probabilities })
    }

    pub fn uniform(cells: usize) -> Result<Self, EntropyError> {
        if cells == 0 {
            return Err(EntropyError::Empty);
        }
        Self::new(vec![1.0 / cells as f64; cells])
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn cells(&self) -> usize {
        self.probabilities.len()
    }

    /// Joint distribution of two independent systems, `p_i·r_j` with `i`
    /// major.
    pub fn product(&self, other: &Distribution) -> Distribution {
        let probabilities = self
            .probabilities
            .iter()
            .flat_map(|&p| other.probabilities.iter().map(move |&r| p * r))
            .collect();
        Distribution { probabilities }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TsallisResult {
    pub q: f64,
    pub k: f64,
    pub value: f64,
    /// `q ≤ 0`: accepted, but outside the regime these routines are tested in.
    pub outside_tested_regime: bool,
}

/// `S_q` of `dist` in units of `k`.
///
/// Empty cells contribute nothing. For `q ≠ 1` the sum `Σ pᵠ − 1` is
/// accumulated as `Σ p·expm1((q−1)·ln p) + (Σ p − 1)`, which equals the
/// textbook form but keeps full precision as `q → 1`. Within
/// [`SHANNON_BAND`] of 1 the Shannon entropy `−k Σ p ln p` is returned.
pub fn tsallis_entropy(dist: &Distribution, q: f64, k: f64) -> Result<TsallisResult, EntropyError> {
    if !q.is_finite() {
        return Err(EntropyError::BadIndex(q));
    }
    let occupied = || dist.probabilities.iter().copied().filter(|&p| p > 0.0);
    let value = if (q - 1.0).abs() < SHANNON_BAND {
        -k * compensated_sum(occupied().map(|p| p * p.ln()))
    } else {
        let qm1 = q - 1.0;
        let deficit = compensated_sum(std::iter::once(-1.0).chain(dist.probabilities.iter().copied()));
        let power_sum_minus_one =
            compensated_sum(occupied().map(|p| p * (qm1 * p.ln()).exp_m1())) + deficit;
        -k * power_sum_minus_one / qm1
    };
    Ok(TsallisResult {
        q,
        k,
        // normalise -0.0
        value: value + 0.0,
        outside_tested_regime: q <= 0.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Additivity {
    /// `S_q(A×B)/k`
    pub lhs: f64,
    /// `S_q(A)/k + S_q(B)/k + (1 − q)·S_q(A)/k·S_q(B)/k`
    pub rhs: f64,
    pub residual: f64,
    /// `S_q(A)/k`
    pub s_a: f64,
    /// `S_q(B)/k`
    pub s_b: f64,
}

impl Additivity {
    /// `(1 − q)·S_q(A)·S_q(B)/k²`
    pub fn cross_term(&self) -> f64 {
        self.rhs - self.s_a - self.s_b
    }
}

/// Compare the entropy of the independent joint system with the
/// pseudo-additive composition of its parts.
pub fn additivity_check(
    a: &Distribution,
    b: &Distribution,
    q: f64,
    k: f64,
) -> Result<Additivity, EntropyError> {
    let s_a = tsallis_entropy(a, q, k)?.value / k;
    let s_b = tsallis_entropy(b, q, k)?.value / k;
    let lhs = tsallis_entropy(&a.product(b), q, k)?.value / k;
    let rhs = s_a + s_b + (1.0 - q) * s_a * s_b;
    Ok(Additivity {
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
        s_a,
        s_b,
    })
}
