//! CHSH and GHZ statistics, local hidden-variable bounds, and Tsallis
//! entropy properties over random inputs.

use std::f64::consts::{PI, SQRT_2};

use chaoskit::entropy::{additivity_check, tsallis_entropy, Distribution};
use chaoskit::quantum::{
    all_assignments, chsh_terms, classical_max, ghz_correlations, lhv_simulate, ConstantStrategy, GhzConfig,
    HiddenAxisStrategy, LocalStrategy, RandomTableStrategy,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_distribution(rng: &mut ChaCha8Rng, cells: usize) -> Distribution {
    let raw: Vec<f64> = (0..cells).map(|_| rng.random::<f64>()).collect();
    let total: f64 = raw.iter().sum();
    let mut p: Vec<f64> = raw.iter().map(|x| x / total).collect();
    let rest: f64 = p[1..].iter().sum();
    p[0] = 1.0 - rest;
    Distribution::new(p).unwrap()
}

#[test]
fn every_assignment_gives_plus_or_minus_two() {
    for a in all_assignments() {
        let v = chsh_terms(a, [1, 1, 1, -1]);
        assert!(v == 2 || v == -2, "{a:?}: {v}");
    }
    assert_eq!(classical_max([1, 1, 1, 1]).max, 4);
}

#[test]
fn local_strategies_respect_the_classical_bound() {
    let strategies: [&dyn LocalStrategy; 3] = [&ConstantStrategy, &RandomTableStrategy, &HiddenAxisStrategy];
    for (i, s) in strategies.into_iter().enumerate() {
        let est = lhv_simulate(s, 1_000_000, 10 + i as u64).unwrap();
        assert!(est.estimate <= 2.0 + 5.0 * est.standard_error, "{est:?}");
        assert!(est.estimate < 2.0 * SQRT_2 - 0.5);
        assert_eq!(est.counts.iter().sum::<usize>(), est.n_trials);
    }
    let constant = lhv_simulate(&ConstantStrategy, 10_000, 1).unwrap();
    assert_eq!(constant.means, [1.0, 1.0, 1.0, 1.0]);
    assert_eq!(constant.estimate, 2.0);
}

#[test]
fn lhv_runs_repeat_bitwise() {
    let a = lhv_simulate(&HiddenAxisStrategy, 50_000, 77).unwrap();
    let b = lhv_simulate(&HiddenAxisStrategy, 50_000, 77).unwrap();
    assert_eq!(a.estimate.to_bits(), b.estimate.to_bits());
    assert_eq!(a, b);
}

#[test]
fn ghz_tables_are_probability_distributions() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10_000 {
        let phi = [0; 3].map(|_| rng.random_range(0.0..2.0 * PI));
        let r = ghz_correlations(&GhzConfig { phi });
        assert!(r.outcomes.iter().all(|(_, p)| *p >= 0.0));
        let total: f64 = r.outcomes.iter().map(|(_, p)| p).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
}

#[test]
fn ghz_perfect_correlation_tables() {
    let r = ghz_correlations(&GhzConfig { phi: [PI / 6.0; 3] });
    for (s, p) in &r.outcomes {
        let want = if s[0] * s[1] * s[2] > 0 { 0.25 } else { 0.0 };
        assert!((p - want).abs() < 1e-12, "{s:?}: {p}");
    }
    let flat = ghz_correlations(&GhzConfig { phi: [0.0; 3] });
    assert!(flat.outcomes.iter().all(|(_, p)| *p == 0.125));
}

#[test]
fn uniform_distribution_maximizes_entropy() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for cells in [2, 3, 5, 8] {
        let uniform = Distribution::uniform(cells).unwrap();
        for q in [0.3, 0.8, 1.0, 1.5, 2.0, 3.5] {
            let top = tsallis_entropy(&uniform, q, 1.0).unwrap().value;
            for _ in 0..100 {
                let d = random_distribution(&mut rng, cells);
                let s = tsallis_entropy(&d, q, 1.0).unwrap().value;
                assert!(s <= top + 1e-12, "W = {cells}, q = {q}: {s} > {top}");
            }
        }
    }
}

#[test]
fn entropy_is_continuous_at_q_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..200 {
        let cells = rng.random_range(2..10);
        let d = random_distribution(&mut rng, cells);
        let s1 = tsallis_entropy(&d, 1.0, 1.0).unwrap().value;
        for q in [1.0 - 1e-6, 1.0 + 1e-6] {
            assert!((tsallis_entropy(&d, q, 1.0).unwrap().value - s1).abs() < 1e-4);
        }
    }
}

/// The composite exceeds the sum of the parts for q < 1 and falls short
/// for q > 1, as the sign of `(1 − q)·S_A·S_B` dictates.
#[test]
fn cross_term_sign_follows_one_minus_q() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..200 {
        let (na, nb) = (rng.random_range(2..6), rng.random_range(2..6));
        let a = random_distribution(&mut rng, na);
        let b = random_distribution(&mut rng, nb);
        let q: f64 = rng.random_range(0.2..3.0);
        if (q - 1.0).abs() < 1e-3 {
            continue;
        }
        let r = additivity_check(&a, &b, q, 1.0).unwrap();
        let excess = r.lhs - r.s_a - r.s_b;
        let predicted = (1.0 - q) * r.s_a * r.s_b;
        assert_eq!(excess.signum(), predicted.signum(), "q = {q}: {excess} vs {predicted}");
        assert_eq!(excess > 0.0, q < 1.0);
    }
}

#[test]
fn worked_entropy_values() {
    let certain = Distribution::new(vec![1.0]).unwrap();
    for q in [0.5, 1.0, 3.0] {
        assert_eq!(tsallis_entropy(&certain, q, 1.0).unwrap().value, 0.0);
    }
    let u2 = Distribution::uniform(2).unwrap();
    assert!((tsallis_entropy(&u2, 1.0, 1.0).unwrap().value - 0.693147).abs() < 1e-6);
    let a = Distribution::new(vec![0.3, 0.7]).unwrap();
    let b = Distribution::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
    let shannon = additivity_check(&a, &b, 1.0, 1.0).unwrap();
    assert!(shannon.cross_term().abs() < 1e-15);
    assert!(shannon.residual < 1e-12);
}
