//! Escape-time ("prisoner/escapee") experiment: an ensemble of seeds packed
//! into a tiny initial interval is iterated until each seed first lands in an
//! escape interval. Survivor counts per iteration follow an exponential law
//! once the ensemble has spread over the attractor.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::maps::{MapError, MapSpec};

pub const DEFAULT_SKIP_TRANSIENT: usize = 20;
pub const DEFAULT_MIN_SURVIVORS: usize = 100;
pub const DEFAULT_MAX_ITERATIONS: usize = 100_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecayError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("seed {seed}: {source}")]
    Map {
        seed: usize,
        #[source]
        source: MapError,
    },
    #[error("no seed reached the escape interval within {max_iterations} iterations")]
    NoEscapes { max_iterations: usize },
    #[error("fitted decay constant {lambda} is not positive")]
    NoDecay { lambda: f64 },
    #[error("only {usable} usable points after windowing (need at least 3)")]
    InsufficientData { usable: usize },
    #[error("event times must be strictly increasing (index {index})")]
    NonMonotone { index: usize },
    #[error("need at least {needed} event times, got {got}")]
    TooFewEvents { needed: usize, got: usize },
}

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    #[inline]
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Seeding {
    /// Seed `k` at `lo + k·(hi − lo)/(n − 1)`; a single seed sits at `lo`.
    EvenlySpaced,
    /// Uniform draws from ChaCha8 seeded with the given value.
    UniformRandom(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayConfig {
    pub spec: MapSpec,
    pub initial: Interval,
    pub escape: Interval,
    pub n_points: usize,
    pub seeding: Seeding,
    pub max_iterations: usize,
}

impl DecayConfig {
    /// Logistic map at `A = 4`, 10 000 evenly spaced seeds in
    /// `[0.2, 0.2 + 1e-11]`, escape interval `[0.53, 0.54]`.
    pub fn reference() -> Self {
        Self {
            spec: MapSpec::logistic(4.0).expect("A = 4 is valid"),
            initial: Interval::new(0.2, 0.2 + 1e-11),
            escape: Interval::new(0.53, 0.54),
            n_points: 10_000,
            seeding: Seeding::EvenlySpaced,
            max_iterations: DEFAULT_MAX_ITERATIONS,
        }
    }

    pub fn validate(&self) -> Result<(), DecayError> {
        let bad = |msg: String| Err(DecayError::InvalidConfig(msg));
        if self.n_points == 0 {
            return bad("n_points must be at least 1".into());
        }
        if !(self.initial.width() > 0.0) {
            return bad(format!(
                "initial interval [{}, {}] must have positive width",
                self.initial.lo, self.initial.hi
            ));
        }
        if !(self.escape.lo <= self.escape.hi) {
            return bad(format!(
                "escape interval [{}, {}] is empty",
                self.escape.lo, self.escape.hi
            ));
        }
        for (name, iv) in [("initial", self.initial), ("escape", self.escape)] {
            if !iv.lo.is_finite() || !iv.hi.is_finite() {
                return bad(format!("{name} interval has non-finite bounds"));
            }
            if let Some((lo, hi)) = self.spec.invariant_interval() {
                if iv.lo < lo || iv.hi > hi {
                    return bad(format!(
                        "{name} interval [{}, {}] leaves the invariant domain [{lo}, {hi}]",
                        iv.lo, iv.hi
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn seeds(&self) -> Vec<f64> {
        let Interval { lo, hi } = self.initial;
        let n = self.n_points;
        match self.seeding {
            Seeding::EvenlySpaced if n == 1 => vec![lo],
            Seeding::EvenlySpaced => (0..n)
                .map(|k| lo + k as f64 * (hi - lo) / (n - 1) as f64)
                .collect(),
            Seeding::UniformRandom(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..n).map(|_| lo + (hi - lo) * rng.random::<f64>()).collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalCurve {
    pub n_points: usize,
    /// `survivors[t]`: seeds not yet escaped after `t` iterations.
    pub survivors: Vec<usize>,
    /// First iteration at which each seed was inside the escape interval;
    /// `None` if it never got there within `max_iterations`.
    pub escape_times: Vec<Option<usize>>,
}

impl SurvivalCurve {
    fn from_escape_times(n_points: usize, escape_times: Vec<Option<usize>>, horizon: usize) -> Self {
        let mut escapes_at = vec![0usize; horizon + 1];
        for t in escape_times.iter().flatten() {
            escapes_at[*t] += 1;
        }
        let last = if escape_times.iter().any(Option::is_none) {
            horizon
        } else {
            escape_times.iter().flatten().copied().max().unwrap_or(0)
        };
        let mut survivors = Vec::with_capacity(last + 1);
        let mut alive = n_points;
        for &e in &escapes_at[..=last] {
            alive -= e;
            survivors.push(alive);
        }
        Self {
            n_points,
            survivors,
            escape_times,
        }
    }

    /// Distinct escape iterations in increasing order, as event times.
    pub fn event_times(&self) -> Vec<f64> {
        let mut t: Vec<usize> = self.escape_times.iter().flatten().copied().collect();
        t.sort_unstable();
        t.dedup();
        t.into_iter().map(|x| x as f64).collect()
    }

    pub fn never_escaped(&self) -> usize {
        self.escape_times.iter().filter(|t| t.is_none()).count()
    }
}

fn escape_time(spec: &MapSpec, escape: &Interval, x0: f64, max_iterations: usize) -> Result<Option<usize>, MapError> {
    let mut x = x0;
    if escape.contains(x) {
        return Ok(Some(0));
    }
    for t in 1..=max_iterations {
        x = spec.apply(x);
        if !spec.in_domain(x) {
            return Err(MapError::Divergence {
                kind: spec.kind(),
                iteration: t,
                value: x,
            });
        }
        if escape.contains(x) {
            return Ok(Some(t));
        }
    }
    Ok(None)
}

/// Iterate every seed until it first lands in the escape interval.
///
/// A seed born inside the escape interval escapes at iteration 0.
pub fn run_escape(config: &DecayConfig) -> Result<SurvivalCurve, DecayError> {
    config.validate()?;
    let seeds = config.seeds();
    let escape_times = seeds
        .par_iter()
        .enumerate()
        .map(|(seed, &x0)| {
            escape_time(&config.spec, &config.escape, x0, config.max_iterations)
                .map_err(|source| DecayError::Map { seed, source })
        })
        .collect::<Result<Vec<_>, _>>()?;
    if escape_times.iter().all(Option::is_none) {
        return Err(DecayError::NoEscapes {
            max_iterations: config.max_iterations,
        });
    }
    Ok(SurvivalCurve::from_escape_times(
        config.n_points,
        escape_times,
        config.max_iterations,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    /// Decay constant per iteration.
    pub lambda: f64,
    /// `ln 2 / lambda`, in iterations.
    pub half_life: f64,
    pub n0: f64,
    pub r_squared: f64,
    pub fit_window: (usize, usize),
}

/// Least-squares line through `(t, ln survivors[t])` over the points with
/// `t ≥ skip_transient` and `survivors[t] ≥ min_survivors`.
pub fn fit_exponential(
    curve: &SurvivalCurve,
    skip_transient: usize,
    min_survivors: usize,
) -> Result<DecayFit, DecayError> {
    let pts: Vec<(f64, f64)> = curve
        .survivors
        .iter()
        .enumerate()
        .filter(|&(t, &n)| t >= skip_transient && n >= min_survivors.max(1))
        .map(|(t, &n)| (t as f64, (n as f64).ln()))
        .collect();
    if pts.len() < 3 {
        return Err(DecayError::InsufficientData { usable: pts.len() });
    }
    let n = pts.len() as f64;
    let mean_t = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut stt, mut sty, mut syy) = (0.0, 0.0, 0.0);
    for &(t, y) in &pts {
        let (dt, dy) = (t - mean_t, y - mean_y);
        stt += dt * dt;
        sty += dt * dy;
        syy += dy * dy;
    }
    let slope = sty / stt;
    let lambda = -slope;
    if !(lambda > 0.0) {
        return Err(DecayError::NoDecay { lambda });
    }
    let intercept = mean_y - slope * mean_t;
    let ss_res: f64 = pts
        .iter()
        .map(|&(t, y)| {
            let r = y - (intercept + slope * t);
            r * r
        })
        .sum();
    let r_squared = if syy > 0.0 {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Ok(DecayFit {
        lambda,
        half_life: std::f64::consts::LN_2 / lambda,
        n0: intercept.exp(),
        r_squared,
        fit_window: (pts[0].0 as usize, pts[pts.len() - 1].0 as usize),
    })
}

/// Pairs `(Δt_m, Δt_{m+n_lag})` of successive inter-event intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DelaySeries {
    pub n_lag: usize,
    pub pairs: Vec<(f64, f64)>,
}

pub fn delay_series(event_times: &[f64], n_lag: usize) -> Result<DelaySeries, DecayError> {
    if event_times.len() < n_lag + 2 {
        return Err(DecayError::TooFewEvents {
            needed: n_lag + 2,
            got: event_times.len(),
        });
    }
    if let Some(index) = event_times
        .windows(2)
        .position(|w| !(w[1] > w[0]))
    {
        return Err(DecayError::NonMonotone { index: index + 1 });
    }
    let intervals: Vec<f64> = event_times.windows(2).map(|w| w[1] - w[0]).collect();
    let pairs = intervals
        .iter()
        .zip(&intervals[n_lag..])
        .map(|(&a, &b)| (a, b))
        .collect();
    Ok(DelaySeries { n_lag, pairs })
}
