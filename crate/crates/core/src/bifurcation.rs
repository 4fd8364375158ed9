//! Bifurcation diagrams, attractor period detection, location of the
//! period-doubling points `A_n` and the resulting Feigenbaum ratios.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::maps::{iterate_orbit, MapError, MapKind, MapSpec};

/// Cycle-matching tolerance used by default for period detection.
pub const PERIOD_TOL: f64 = 1e-9;
/// Default transient before period detection.
pub const PERIOD_TRANSIENT: usize = 10_000;
/// Deepest period-doubling level searched (period 2^8 = 256).
pub const MAX_LEVELS: usize = 8;
/// Parameter tolerance to which each `A_n` is bisected.
pub const POINT_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BifurcationError {
    #[error("at parameter {param}: {source}")]
    Map {
        param: f64,
        #[source]
        source: MapError,
    },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("{0} map has no period-doubling search configured")]
    UnsupportedMap(MapKind),
    #[error("could not bracket the period-{period} birth at level {level} (reached {reached} levels): {reason}")]
    Bracket {
        level: usize,
        period: usize,
        reached: usize,
        reason: String,
    },
}

/// Points `(param, x)` of a bifurcation diagram, ordered by parameter index
/// then iterate index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationDiagram {
    pub spec_kind: MapKind,
    pub param_range: (f64, f64),
    pub n_param: usize,
    pub n_transient: usize,
    pub n_keep: usize,
    pub x0: f64,
    pub points: Vec<(f64, f64)>,
}

impl BifurcationDiagram {
    pub fn param_at(&self, index: usize) -> f64 {
        param_grid(self.param_range.0, self.param_range.1, self.n_param, index)
    }

    /// The kept iterates of column `index`.
    pub fn column(&self, index: usize) -> &[(f64, f64)] {
        &self.points[index * self.n_keep..(index + 1) * self.n_keep]
    }
}

fn param_grid(lo: f64, hi: f64, n: usize, i: usize) -> f64 {
    if i + 1 == n {
        hi
    } else {
        lo + (hi - lo) * i as f64 / (n - 1) as f64
    }
}

pub fn bifurcation_diagram(
    kind: MapKind,
    param_lo: f64,
    param_hi: f64,
    n_param: usize,
    x0: f64,
    n_transient: usize,
    n_keep: usize,
) -> Result<BifurcationDiagram, BifurcationError> {
    if !(param_lo < param_hi) {
        return Err(BifurcationError::InvalidInput(format!(
            "param_lo ({param_lo}) must be below param_hi ({param_hi})"
        )));
    }
    if n_param < 2 {
        return Err(BifurcationError::InvalidInput("n_param must be at least 2".into()));
    }
    let columns = (0..n_param)
        .into_par_iter()
        .map(|i| {
            let param = param_grid(param_lo, param_hi, n_param, i);
            let spec = MapSpec::new(kind, param)
                .map_err(|source| BifurcationError::Map { param, source })?;
            let orbit = iterate_orbit(&spec, x0, n_transient, n_keep)
                .map_err(|source| BifurcationError::Map { param, source })?;
            Ok(orbit.values.into_iter().map(|x| (param, x)).collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>, BifurcationError>>()?;
    Ok(BifurcationDiagram {
        spec_kind: kind,
        param_range: (param_lo, param_hi),
        n_param,
        n_transient,
        n_keep,
        x0,
        points: columns.into_iter().flatten().collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Period {
    Cycle(usize),
    Chaotic,
}

impl Period {
    pub fn cycle(self) -> Option<usize> {
        match self {
            Period::Cycle(p) => Some(p),
            Period::Chaotic => None,
        }
    }
}

fn settle(spec: &MapSpec, n_transient: usize) -> Result<f64, BifurcationError> {
    let x0 = spec.critical_point();
    let orbit = iterate_orbit(spec, x0, n_transient.saturating_sub(1), 1).map_err(|source| {
        BifurcationError::Map {
            param: spec.param(),
            source,
        }
    })?;
    Ok(orbit.values[0])
}

/// Smallest `p ≤ max_period` such that, after `n_transient` iterates from the
/// critical point, `|x_{i+p} − x_i| < tol` over a window of `4·max_period`
/// consecutive iterates.
///
/// Seeding from the critical point means the orbit falls onto the attracting
/// cycle whenever one exists.
pub fn detect_period(
    spec: &MapSpec,
    max_period: usize,
    tol: f64,
    n_transient: usize,
) -> Result<Period, BifurcationError> {
    if max_period == 0 {
        return Err(BifurcationError::InvalidInput("max_period must be at least 1".into()));
    }
    if !(tol > 0.0) {
        return Err(BifurcationError::InvalidInput("tol must be positive".into()));
    }
    let window = 4 * max_period;
    let orbit = iterate_orbit(spec, spec.critical_point(), n_transient, window + max_period)
        .map_err(|source| BifurcationError::Map {
            param: spec.param(),
            source,
        })?;
    let xs = &orbit.values;
    let period = (1..=max_period)
        .find(|&p| (0..window).all(|i| (xs[i + p] - xs[i]).abs() < tol))
        .map_or(Period::Chaotic, Period::Cycle);
    Ok(period)
}

/// Value and derivative of the `p`-fold composition at `x`.
fn compose(spec: &MapSpec, x: f64, p: usize) -> (f64, f64) {
    let mut y = x;
    let mut d = 1.0;
    for _ in 0..p {
        d *= spec.derivative(y);
        y = spec.apply(y);
    }
    (y, d)
}

/// Newton-refine a point of a `p`-cycle starting from `x`. Returns the cycle
/// point and its multiplier `(f^p)'`.
fn refine_cycle(spec: &MapSpec, x: f64, p: usize) -> Option<(f64, f64)> {
    let mut y = x;
    let mut converged = 0;
    for _ in 0..100 {
        let (fy, dfy) = compose(spec, y, p);
        let slope = dfy - 1.0;
        if slope == 0.0 || !slope.is_finite() {
            return None;
        }
        let step = (fy - y) / slope;
        y -= step;
        if !spec.in_domain(y) {
            return None;
        }
        if step.abs() <= 1e-13 * y.abs().max(1.0) {
            converged += 1;
            // a couple of polishing steps past the first small update
            if converged == 3 {
                let (_, multiplier) = compose(spec, y, p);
                return Some((y, multiplier));
            }
        }
    }
    None
}

/// Period of the attracting cycle, judged by linear stability rather than by
/// waiting for the orbit to settle.
///
/// After `n_transient` iterates from the critical point, each candidate
/// period `p ≤ max_period` is Newton-refined from the current iterate; the
/// first `p` whose cycle has multiplier `|(f^p)'| < 1` is returned. Close to
/// a period-doubling point the orbit converges only algebraically, so plain
/// cycle matching shifts the apparent transition; the multiplier test does
/// not.
pub fn stable_cycle_period(
    spec: &MapSpec,
    max_period: usize,
    n_transient: usize,
) -> Result<Period, BifurcationError> {
    if max_period == 0 {
        return Err(BifurcationError::InvalidInput("max_period must be at least 1".into()));
    }
    let x = settle(spec, n_transient)?;
    for p in 1..=max_period {
        if let Some((_, multiplier)) = refine_cycle(spec, x, p) {
            if multiplier.abs() < 1.0 {
                return Ok(Period::Cycle(p));
            }
        }
    }
    Ok(Period::Chaotic)
}

/// Parameters `A_1 < A_2 < …` at which period `2^n` is born.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationPoints {
    pub kind: MapKind,
    pub values: Vec<f64>,
}

impl BifurcationPoints {
    pub fn gaps(&self) -> Vec<f64> {
        self.values.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

/// Search setup for a map kind: bracket for `A_1` and a guess for `A_2 − A_1`.
struct Ladder {
    first: (f64, f64),
    first_gap: f64,
}

fn ladder(kind: MapKind) -> Result<Ladder, BifurcationError> {
    match kind {
        MapKind::Logistic => Ok(Ladder {
            first: (2.5, 3.3),
            first_gap: 0.45,
        }),
        MapKind::Sine => Ok(Ladder {
            first: (1.5, 2.4),
            first_gap: 0.36,
        }),
        MapKind::Quadratic => Err(BifurcationError::UnsupportedMap(kind)),
    }
}

const DELTA_GUESS: f64 = 4.67;

/// True while the attractor's period is at most `2^(level-1)`.
fn below_birth(kind: MapKind, param: f64, level: usize) -> Result<bool, BifurcationError> {
    let spec = MapSpec::new(kind, param).map_err(|source| BifurcationError::Map { param, source })?;
    let max_period = 1usize << (level - 1);
    let transient = PERIOD_TRANSIENT * (level + 1);
    Ok(matches!(
        stable_cycle_period(&spec, max_period, transient)?,
        Period::Cycle(p) if p <= max_period
    ))
}

pub fn find_bifurcation_points(
    kind: MapKind,
    n_levels: usize,
) -> Result<BifurcationPoints, BifurcationError> {
    if !(3..=MAX_LEVELS).contains(&n_levels) {
        return Err(BifurcationError::InvalidInput(format!(
            "n_levels must lie in 3..={MAX_LEVELS}, got {n_levels}"
        )));
    }
    let ladder = ladder(kind)?;
    let mut values: Vec<f64> = Vec::with_capacity(n_levels);
    for level in 1..=n_levels {
        let bracket_err = |reason: String| BifurcationError::Bracket {
            level,
            period: 1 << level,
            reached: level - 1,
            reason,
        };
        let (mut lo, mut hi) = match values.len() {
            0 => ladder.first,
            n => {
                let prev = values[n - 1];
                let gap = if n == 1 {
                    ladder.first_gap
                } else {
                    (prev - values[n - 2]) / DELTA_GUESS
                };
                (prev + 0.2 * gap, prev + 1.5 * gap)
            }
        };
        let base = values.last().copied().unwrap_or(lo);

        let mut tries = 0;
        while !below_birth(kind, lo, level)? {
            tries += 1;
            if tries > 30 || lo <= base {
                return Err(bracket_err(format!("no period-{} attractor found above {base}", 1 << (level - 1))));
            }
            lo = base + 0.5 * (lo - base);
        }
        tries = 0;
        while below_birth(kind, hi, level)? {
            tries += 1;
            if tries > 10 {
                return Err(bracket_err(format!("period still at most {} at {hi}", 1 << (level - 1))));
            }
            hi = lo + 2.0 * (hi - lo);
        }
        while hi - lo > 0.1 * POINT_TOL {
            let mid = 0.5 * (lo + hi);
            if below_birth(kind, mid, level)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        values.push(0.5 * (lo + hi));
    }
    Ok(BifurcationPoints { kind, values })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeigenbaumEstimate {
    pub points: BifurcationPoints,
    /// `(A_{k+1} − A_k) / (A_{k+2} − A_{k+1})`
    pub ratios: Vec<f64>,
    pub last: f64,
}

/// Successive gap ratios from the first `n_levels` period-doubling points.
pub fn feigenbaum_ratios(points: &[f64]) -> Vec<f64> {
    points
        .windows(3)
        .map(|w| (w[1] - w[0]) / (w[2] - w[1]))
        .collect()
}

pub fn estimate_feigenbaum(
    kind: MapKind,
    n_levels: usize,
) -> Result<FeigenbaumEstimate, BifurcationError> {
    if n_levels < 4 {
        return Err(BifurcationError::InvalidInput(format!(
            "n_levels must be at least 4, got {n_levels}"
        )));
    }
    let points = find_bifurcation_points(kind, n_levels)?;
    let ratios = feigenbaum_ratios(&points.values);
    let last = *ratios.last().expect("n_levels >= 4 gives at least two ratios");
    Ok(FeigenbaumEstimate {
        points,
        ratios,
        last,
    })
}
