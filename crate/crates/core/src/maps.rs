//! One-dimensional iterated maps: the quadratic map `x² + c`, the logistic
//! map `A·x·(1 − x)` and the sine map `A·sin(x)`.
//!
//! All arithmetic is plain `f64`. [`MapSpec::apply`] is the single evaluation
//! path used by every iteration routine in the crate, so orbits produced
//! anywhere are bitwise reproducible from `(spec, x0)`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MapError {
    #[error("map parameter must be finite, got {0}")]
    NonFiniteParameter(f64),
    #[error("logistic parameter A = {0} outside [0, 4]; the map does not keep [0, 1] invariant for A > 4")]
    LogisticParameter(f64),
    #[error("input x = {0} is not finite")]
    NonFiniteInput(f64),
    #[error("input x = {x} outside the invariant domain of the {kind} map")]
    OutOfDomain { kind: MapKind, x: f64 },
    #[error("orbit left the invariant domain of the {kind} map at iteration {iteration} (x = {value})")]
    Divergence {
        kind: MapKind,
        iteration: usize,
        value: f64,
    },
    #[error("n_keep must be at least 1")]
    EmptyOrbit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MapKind {
    /// `x → x² + c`
    Quadratic,
    /// `x → A·x·(1 − x)` on `[0, 1]`
    Logistic,
    /// `x → A·sin(x)`
    Sine,
}

impl fmt::Display for MapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MapKind::Quadratic => "quadratic",
            MapKind::Logistic => "logistic",
            MapKind::Sine => "sine",
        })
    }
}

/// A map kind together with its control parameter (`c` for the quadratic
/// map, `A` for the logistic and sine maps).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapSpec {
    kind: MapKind,
    param: f64,
}

impl MapSpec {
    pub fn new(kind: MapKind, param: f64) -> Result<Self, MapError> {
        if !param.is_finite() {
            return Err(MapError::NonFiniteParameter(param));
        }
        if kind == MapKind::Logistic && !(0.0..=4.0).contains(&param) {
            return Err(MapError::LogisticParameter(param));
        }
        Ok(Self { kind, param })
    }

    pub fn logistic(a: f64) -> Result<Self, MapError> {
        Self::new(MapKind::Logistic, a)
    }

    pub fn sine(a: f64) -> Result<Self, MapError> {
        Self::new(MapKind::Sine, a)
    }

    pub fn quadratic(c: f64) -> Result<Self, MapError> {
        Self::new(MapKind::Quadratic, c)
    }

    pub fn kind(&self) -> MapKind {
        self.kind
    }

    pub fn param(&self) -> f64 {
        self.param
    }

    /// Same kind, different parameter.
    pub fn with_param(&self, param: f64) -> Result<Self, MapError> {
        Self::new(self.kind, param)
    }

    /// Unchecked evaluation. Every iteration routine goes through here.
    #[inline]
    pub fn apply(&self, x: f64) -> f64 {
        match self.kind {
            MapKind::Quadratic => x * x + self.param,
            MapKind::Logistic => self.param * x * (1.0 - x),
            MapKind::Sine => self.param * x.sin(),
        }
    }

    /// `f'(x)`.
    #[inline]
    pub fn derivative(&self, x: f64) -> f64 {
        match self.kind {
            MapKind::Quadratic => 2.0 * x,
            MapKind::Logistic => self.param * (1.0 - 2.0 * x),
            MapKind::Sine => self.param * x.cos(),
        }
    }

    /// The map's single turning point.
    pub fn critical_point(&self) -> f64 {
        match self.kind {
            MapKind::Quadratic => 0.0,
            MapKind::Logistic => 0.5,
            MapKind::Sine => std::f64::consts::FRAC_PI_2,
        }
    }

    /// Whether `x` lies in the region the map keeps bounded.
    ///
    /// Logistic: `[0, 1]`. Quadratic: `|x| ≤ max(2, |c|)`, outside of which
    /// every orbit runs off to infinity. Sine: all finite reals.
    pub fn in_domain(&self, x: f64) -> bool {
        if !x.is_finite() {
            return false;
        }
        match self.kind {
            MapKind::Logistic => (0.0..=1.0).contains(&x),
            MapKind::Quadratic => x.abs() <= self.param.abs().max(2.0),
            MapKind::Sine => true,
        }
    }

    /// Closed interval the map keeps invariant, where one exists.
    pub fn invariant_interval(&self) -> Option<(f64, f64)> {
        match self.kind {
            MapKind::Logistic => Some((0.0, 1.0)),
            MapKind::Sine => {
                let a = self.param.abs();
                Some((-a, a))
            }
            MapKind::Quadratic => {
                let disc = 1.0 - 4.0 * self.param;
                if disc < 0.0 {
                    None
                } else {
                    let beta = 0.5 * (1.0 + disc.sqrt());
                    Some((-beta, beta))
                }
            }
        }
    }
}

/// Checked single evaluation.
pub fn eval_map(spec: &MapSpec, x: f64) -> Result<f64, MapError> {
    if !x.is_finite() {
        return Err(MapError::NonFiniteInput(x));
    }
    if spec.kind == MapKind::Logistic && !(0.0..=1.0).contains(&x) {
        return Err(MapError::OutOfDomain { kind: spec.kind, x });
    }
    Ok(spec.apply(x))
}

/// Post-transient iterates of a map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Orbit {
    pub x0: f64,
    pub transient_len: usize,
    pub values: Vec<f64>,
}

impl Orbit {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Lazily iterates a map from `x0`, yielding `x1, x2, …` and stopping with a
/// [`MapError::Divergence`] at the first iterate outside the map's domain.
pub struct OrbitIter {
    spec: MapSpec,
    x: f64,
    n: usize,
    failed: bool,
}

impl OrbitIter {
    pub fn new(spec: MapSpec, x0: f64) -> Self {
        Self {
            spec,
            x: x0,
            n: 0,
            failed: false,
        }
    }
}

impl Iterator for OrbitIter {
    type Item = Result<f64, MapError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        self.n += 1;
        self.x = self.spec.apply(self.x);
        if self.spec.in_domain(self.x) {
            Some(Ok(self.x))
        } else {
            self.failed = true;
            Some(Err(MapError::Divergence {
                kind: self.spec.kind,
                iteration: self.n,
                value: self.x,
            }))
        }
    }
}

/// Discard `n_transient` iterates, then record the next `n_keep`.
pub fn iterate_orbit(
    spec: &MapSpec,
    x0: f64,
    n_transient: usize,
    n_keep: usize,
) -> Result<Orbit, MapError> {
    if n_keep == 0 {
        return Err(MapError::EmptyOrbit);
    }
    if !spec.in_domain(x0) {
        return Err(MapError::OutOfDomain {
            kind: spec.kind,
            x: x0,
        });
    }
    let values = OrbitIter::new(*spec, x0)
        .skip(n_transient)
        .take(n_keep)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Orbit {
        x0,
        transient_len: n_transient,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn trivial_evaluations() {
        let l4 = MapSpec::logistic(4.0).unwrap();
        assert_eq!(eval_map(&l4, 0.5).unwrap(), 1.0);
        assert_eq!(eval_map(&l4, 1.0).unwrap(), 0.0);
        let q0 = MapSpec::quadratic(0.0).unwrap();
        assert_eq!(eval_map(&q0, 0.5).unwrap(), 0.25);
        let s = MapSpec::sine(2.2).unwrap();
        assert_eq!(eval_map(&s, FRAC_PI_2).unwrap(), 2.2);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(
            MapSpec::logistic(4.5),
            Err(MapError::LogisticParameter(_))
        ));
        assert!(MapSpec::logistic(-0.1).is_err());
        assert!(MapSpec::sine(f64::NAN).is_err());
        let l = MapSpec::logistic(3.0).unwrap();
        assert!(matches!(
            eval_map(&l, f64::INFINITY),
            Err(MapError::NonFiniteInput(_))
        ));
        assert!(matches!(
            eval_map(&l, 1.5),
            Err(MapError::OutOfDomain { .. })
        ));
        assert!(matches!(
            iterate_orbit(&l, 0.2, 0, 0),
            Err(MapError::EmptyOrbit)
        ));
    }

    #[test]
    fn fixed_point_attracts_at_a_two() {
        let spec = MapSpec::logistic(2.0).unwrap();
        let orbit = iterate_orbit(&spec, 0.3, 1000, 50).unwrap();
        assert!(orbit.values.iter().all(|x| (x - 0.5).abs() < 1e-9));
    }

    #[test]
    fn period_two_roots_at_3_2() {
        // Independent oracle: scan f(f(x)) - x for sign changes and bisect,
        // then discard the fixed points 0 and 1 - 1/A.
        let a = 3.2;
        let g = |x: f64| {
            let y = a * x * (1.0 - x);
            a * y * (1.0 - y) - x
        };
        let mut roots = Vec::new();
        let n = 100_000;
        for i in 0..n {
            let (mut lo, mut hi) = (i as f64 / n as f64, (i + 1) as f64 / n as f64);
            if g(lo) == 0.0 {
                roots.push(lo);
                continue;
            }
            if g(lo) * g(hi) < 0.0 {
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if g(lo) * g(mid) <= 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                roots.push(0.5 * (lo + hi));
            }
        }
        let fixed = 1.0 - 1.0 / a;
        let cycle: Vec<f64> = roots
            .into_iter()
            .filter(|r| r.abs() > 1e-6 && (r - fixed).abs() > 1e-6)
            .collect();
        assert_eq!(cycle.len(), 2);
        assert!((cycle[0] - 0.5130).abs() < 1e-4 && (cycle[1] - 0.7995).abs() < 1e-4);

        let spec = MapSpec::logistic(a).unwrap();
        let orbit = iterate_orbit(&spec, 0.3, 5000, 40).unwrap();
        for x in &orbit.values {
            let d = cycle.iter().map(|c| (x - c).abs()).fold(f64::MAX, f64::min);
            assert!(d < 1e-6, "{x} not on the 2-cycle");
        }
        // alternation
        for w in orbit.values.windows(2) {
            assert!((w[0] - w[1]).abs() > 0.1);
        }
    }

    #[test]
    fn zero_is_fixed() {
        for a in [0.5, 2.0, 3.7, 4.0] {
            let spec = MapSpec::logistic(a).unwrap();
            let orbit = iterate_orbit(&spec, 0.0, 10, 10).unwrap();
            assert!(orbit.values.iter().all(|&x| x == 0.0));
        }
    }

    #[test]
    fn orbit_consecutive_values_satisfy_map() {
        let spec = MapSpec::logistic(3.9).unwrap();
        let orbit = iterate_orbit(&spec, 0.123, 17, 500).unwrap();
        for w in orbit.values.windows(2) {
            assert_eq!(w[1].to_bits(), spec.apply(w[0]).to_bits());
        }
    }

    #[test]
    fn quadratic_divergence_reports_iteration() {
        let spec = MapSpec::quadratic(1.0).unwrap();
        let err = iterate_orbit(&spec, 0.0, 0, 100).unwrap_err();
        // 0 -> 1 -> 2 -> 5
        assert_eq!(
            err,
            MapError::Divergence {
                kind: MapKind::Quadratic,
                iteration: 3,
                value: 5.0
            }
        );
    }

    #[test]
    fn vanishing_population_below_one() {
        for a in [0.1, 0.5, 0.9, 0.99] {
            let spec = MapSpec::logistic(a).unwrap();
            for x0 in [0.01, 0.3, 0.5, 0.99] {
                let orbit = iterate_orbit(&spec, x0, 1999, 1).unwrap();
                assert!(orbit.values[0].abs() < 1e-6);
            }
        }
    }
}
