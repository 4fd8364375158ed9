//! Planar magnetic pendulum over three magnets and its basins of attraction.
//!
//! The bob is a point in the plane obeying
//!
//! ```text
//! a = −b·v − k·x + m·Σᵢ (pᵢ − x) / (|pᵢ − x|² + d²)^{3/2}
//! ```
//!
//! with the magnets `pᵢ` at 90°, 210° and 330° on the unit circle. The
//! equations are integrated with fixed-step RK4 so every trajectory (and
//! therefore every basin image) is bitwise reproducible.

use std::ops::{Add, Mul, Neg, Sub};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Consecutive captured steps required before a trajectory is assigned.
pub const CAPTURE_HOLD: usize = 100;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PendulumError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("state became non-finite at step {step}")]
    NonFinite { step: usize },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Counter-clockwise rotation about the origin.
    pub fn rotate(self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Vec2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    #[inline]
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    #[inline]
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    #[inline]
    fn mul(self, v: Vec2) -> Vec2 {
        Vec2::new(self * v.x, self * v.y)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    #[inline]
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Magnets at 90°, 210°, 330° on the unit circle. The lower pair shares its
/// `y` and mirrors its `x` exactly, so the force at the origin cancels
/// exactly in floating point.
pub fn triangle_magnets() -> [Vec2; 3] {
    let s = 3f64.sqrt() / 2.0;
    [Vec2::new(0.0, 1.0), Vec2::new(-s, -0.5), Vec2::new(s, -0.5)]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PendulumParams {
    pub magnets: [Vec2; 3],
    pub damping: f64,
    pub restoring: f64,
    pub strength: f64,
    pub height: f64,
    pub step: f64,
    pub max_steps: usize,
    pub capture_radius: f64,
    pub capture_speed: f64,
}

impl Default for PendulumParams {
    fn default() -> Self {
        Self {
            magnets: triangle_magnets(),
            damping: 0.2,
            restoring: 0.5,
            strength: 1.0,
            height: 0.25,
            step: 0.01,
            max_steps: 100_000,
            capture_radius: 0.1,
            capture_speed: 0.05,
        }
    }
}

impl PendulumParams {
    pub fn validate(&self) -> Result<(), PendulumError> {
        let bad = |m: &str| Err(PendulumError::InvalidParams(m.to_string()));
        if !self.magnets.iter().all(|p| p.is_finite()) {
            return bad("magnet positions must be finite");
        }
        for i in 0..3 {
            for j in i + 1..3 {
                if self.magnets[i] == self.magnets[j] {
                    return bad("magnet positions must be distinct");
                }
            }
        }
        let nonneg = [self.damping, self.restoring, self.capture_radius, self.capture_speed];
        if !nonneg.iter().all(|v| v.is_finite() && *v >= 0.0) {
            return bad("damping, restoring, capture radius and capture speed must be finite and >= 0");
        }
        let pos = [self.strength, self.height, self.step];
        if !pos.iter().all(|v| v.is_finite() && *v > 0.0) {
            return bad("strength, height and step must be finite and > 0");
        }
        if self.max_steps == 0 {
            return bad("max_steps must be at least 1");
        }
        Ok(())
    }

    /// `a(x, v)`
    #[inline]
    pub fn acceleration(&self, pos: Vec2, vel: Vec2) -> Vec2 {
        let d2 = self.height * self.height;
        let mut pull = Vec2::ZERO;
        for &p in &self.magnets {
            let r = p - pos;
            let s = r.norm_sq() + d2;
            pull = pull + (1.0 / (s * s.sqrt())) * r;
        }
        (-self.damping) * vel - self.restoring * pos + self.strength * pull
    }

    /// Kinetic + spring + magnetic potential energy.
    pub fn energy(&self, state: &State) -> f64 {
        let d2 = self.height * self.height;
        let magnetic: f64 = self
            .magnets
            .iter()
            .map(|&p| -self.strength / ((p - state.pos).norm_sq() + d2).sqrt())
            .sum();
        0.5 * state.vel.norm_sq() + 0.5 * self.restoring * state.pos.norm_sq() + magnetic
    }

    /// One RK4 step of size `self.step`.
    #[inline]
    pub fn rk4_step(&self, s: State) -> State {
        let h = self.step;
        let k1v = self.acceleration(s.pos, s.vel);
        let k1x = s.vel;
        let p2 = s.pos + (0.5 * h) * k1x;
        let v2 = s.vel + (0.5 * h) * k1v;
        let k2v = self.acceleration(p2, v2);
        let k2x = v2;
        let p3 = s.pos + (0.5 * h) * k2x;
        let v3 = s.vel + (0.5 * h) * k2v;
        let k3v = self.acceleration(p3, v3);
        let k3x = v3;
        let p4 = s.pos + h * k3x;
        let v4 = s.vel + h * k3v;
        let k4v = self.acceleration(p4, v4);
        let k4x = v4;
        let w = h / 6.0;
        State {
            pos: s.pos + w * (k1x + 2.0 * k2x + 2.0 * k3x + k4x),
            vel: s.vel + w * (k1v + 2.0 * k2v + 2.0 * k3v + k4v),
        }
    }

    /// Magnet (0-based) whose capture disc contains a slow-moving bob.
    fn captured_by(&self, s: &State) -> Option<usize> {
        if s.vel.norm() >= self.capture_speed {
            return None;
        }
        self.magnets
            .iter()
            .position(|&p| (p - s.pos).norm() < self.capture_radius)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub pos: Vec2,
    pub vel: Vec2,
}

/// Final resting place of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Attractor {
    /// 1-based magnet index.
    Magnet(u8),
    Unresolved,
}

impl Attractor {
    pub fn index(self) -> Option<u8> {
        match self {
            Attractor::Magnet(i) => Some(i),
            Attractor::Unresolved => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryOutcome {
    pub attractor: Attractor,
    pub steps: usize,
}

/// Integrate from `(x0, v0)` until the bob has stayed within
/// `capture_radius` of one magnet, slower than `capture_speed`, for
/// [`CAPTURE_HOLD`] consecutive steps.
pub fn integrate_trajectory(
    params: &PendulumParams,
    x0: Vec2,
    v0: Vec2,
) -> Result<TrajectoryOutcome, PendulumError> {
    let mut state = State { pos: x0, vel: v0 };
    let mut held: Option<(usize, usize)> = None;
    for step in 1..=params.max_steps {
        state = params.rk4_step(state);
        if !(state.pos.is_finite() && state.vel.is_finite()) {
            return Err(PendulumError::NonFinite { step });
        }
        held = match (params.captured_by(&state), held) {
            (Some(m), Some((prev, n))) if m == prev => Some((m, n + 1)),
            (Some(m), _) => Some((m, 1)),
            (None, _) => None,
        };
        if let Some((m, n)) = held {
            if n >= CAPTURE_HOLD {
                return Ok(TrajectoryOutcome {
                    attractor: Attractor::Magnet(m as u8 + 1),
                    steps: step,
                });
            }
        }
    }
    Ok(TrajectoryOutcome {
        attractor: Attractor::Unresolved,
        steps: params.max_steps,
    })
}

/// Axis-aligned rectangle `[x_lo, x_hi] × [y_lo, y_hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub x_lo: f64,
    pub x_hi: f64,
    pub y_lo: f64,
    pub y_hi: f64,
}

impl Window {
    pub const fn new(x_lo: f64, x_hi: f64, y_lo: f64, y_hi: f64) -> Self {
        Self { x_lo, x_hi, y_lo, y_hi }
    }

    pub const fn square(half: f64) -> Self {
        Self::new(-half, half, -half, half)
    }
}

/// Attractor per grid cell, stored row-major with row 0 at the top
/// (`y_hi`) of the window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasinImage {
    pub width: usize,
    pub height: usize,
    pub window: Window,
    pub cells: Vec<Attractor>,
    /// Cells whose integration failed and were recorded as unresolved.
    pub failed_cells: usize,
}

impl BasinImage {
    pub fn get(&self, col: usize, row: usize) -> Attractor {
        self.cells[row * self.width + col]
    }

    pub fn cell_center(&self, col: usize, row: usize) -> Vec2 {
        cell_center(&self.window, self.width, self.height, col, row)
    }

    /// Cell containing `p`, if it lies inside the window.
    pub fn cell_at(&self, p: Vec2) -> Option<(usize, usize)> {
        let w = &self.window;
        let fx = (p.x - w.x_lo) / (w.x_hi - w.x_lo);
        let fy = (w.y_hi - p.y) / (w.y_hi - w.y_lo);
        if !(0.0..1.0).contains(&fx) || !(0.0..1.0).contains(&fy) {
            return None;
        }
        Some((
            (fx * self.width as f64) as usize,
            (fy * self.height as f64) as usize,
        ))
    }

    pub fn count(&self, a: Attractor) -> usize {
        self.cells.iter().filter(|&&c| c == a).count()
    }

    /// Attractors found in the `(2·radius+1)²` block around a cell, clipped
    /// at the image edge, as a bitmask over `[Unresolved, 1, 2, 3]`.
    fn neighborhood(&self, col: usize, row: usize, radius: usize) -> u8 {
        let mut mask = 0u8;
        for r in row.saturating_sub(radius)..=(row + radius).min(self.height - 1) {
            for c in col.saturating_sub(radius)..=(col + radius).min(self.width - 1) {
                mask |= 1 << self.get(c, r).index().unwrap_or(0);
            }
        }
        mask
    }

    /// True when the cell and all of its 8 neighbors (inside the image) share
    /// one attractor.
    pub fn is_interior(&self, col: usize, row: usize) -> bool {
        self.neighborhood(col, row, 1).count_ones() == 1
    }

    /// Among magnet-basin cells whose 8-neighborhood holds at least two
    /// magnets, the fraction with all three magnets in the surrounding
    /// `5×5` block: a grid-scale proxy for the Wada property.
    /// `None` if the image has no such boundary cells.
    pub fn wada_fraction(&self) -> Option<f64> {
        const MAGNETS: u8 = 0b1110;
        let (mut boundary, mut triple) = (0usize, 0usize);
        for row in 0..self.height {
            for col in 0..self.width {
                if self.get(col, row) == Attractor::Unresolved {
                    continue;
                }
                if (self.neighborhood(col, row, 1) & MAGNETS).count_ones() < 2 {
                    continue;
                }
                boundary += 1;
                if self.neighborhood(col, row, 2) & MAGNETS == MAGNETS {
                    triple += 1;
                }
            }
        }
        (boundary > 0).then(|| triple as f64 / boundary as f64)
    }
}

fn cell_center(w: &Window, width: usize, height: usize, col: usize, row: usize) -> Vec2 {
    Vec2::new(
        w.x_lo + (col as f64 + 0.5) * (w.x_hi - w.x_lo) / width as f64,
        w.y_hi - (row as f64 + 0.5) * (w.y_hi - w.y_lo) / height as f64,
    )
}

/// One trajectory from rest at each cell center. Runs on the current rayon
/// pool; the result does not depend on how many workers it has.
pub fn compute_basins(
    params: &PendulumParams,
    width: usize,
    height: usize,
    window: Window,
) -> Result<BasinImage, PendulumError> {
    params.validate()?;
    if width < 2 || height < 2 {
        return Err(PendulumError::InvalidGrid(format!(
            "grid must be at least 2x2, got {width}x{height}"
        )));
    }
    let finite = [window.x_lo, window.x_hi, window.y_lo, window.y_hi]
        .iter()
        .all(|v| v.is_finite());
    if !finite || !(window.x_lo < window.x_hi) || !(window.y_lo < window.y_hi) {
        return Err(PendulumError::InvalidGrid(format!("degenerate window {window:?}")));
    }
    let results: Vec<Result<Attractor, PendulumError>> = (0..width * height)
        .into_par_iter()
        .map(|i| {
            let p = cell_center(&window, width, height, i % width, i / width);
            integrate_trajectory(params, p, Vec2::ZERO).map(|o| o.attractor)
        })
        .collect();
    let mut failed_cells = 0;
    let cells = results
        .into_iter()
        .map(|r| {
            r.unwrap_or_else(|_| {
                failed_cells += 1;
                Attractor::Unresolved
            })
        })
        .collect();
    if failed_cells > 0 {
        log::warn!("{failed_cells} basin cells failed to integrate; recorded as unresolved");
    }
    Ok(BasinImage {
        width,
        height,
        window,
        cells,
        failed_cells,
    })
}

/// [`compute_basins`] on a dedicated pool of `threads` workers.
pub fn compute_basins_with_threads(
    params: &PendulumParams,
    width: usize,
    height: usize,
    window: Window,
    threads: usize,
) -> Result<BasinImage, PendulumError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| PendulumError::ThreadPool(e.to_string()))?;
    pool.install(|| compute_basins(params, width, height, window))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn origin_force_cancels_exactly() {
        let p = PendulumParams::default();
        assert_eq!(p.acceleration(Vec2::ZERO, Vec2::ZERO), Vec2::ZERO);
    }

    #[test]
    fn released_over_a_magnet_stays_there() {
        let p = PendulumParams::default();
        for (i, &m) in p.magnets.iter().enumerate() {
            let out = integrate_trajectory(&p, m, Vec2::ZERO).unwrap();
            assert_eq!(out.attractor, Attractor::Magnet(i as u8 + 1));
        }
    }

    #[test]
    fn center_is_unresolved() {
        let p = PendulumParams {
            max_steps: 5_000,
            ..PendulumParams::default()
        };
        let out = integrate_trajectory(&p, Vec2::ZERO, Vec2::ZERO).unwrap();
        assert_eq!(out.attractor, Attractor::Unresolved);
        assert_eq!(out.steps, 5_000);
    }

    #[test]
    fn rotated_release_permutes_attractor() {
        let p = PendulumParams::default();
        for x0 in [Vec2::new(0.3, 0.6), Vec2::new(-0.9, 0.1), Vec2::new(0.2, -0.8)] {
            let a = integrate_trajectory(&p, x0, Vec2::ZERO).unwrap().attractor;
            let b = integrate_trajectory(&p, x0.rotate(2.0 * PI / 3.0), Vec2::ZERO)
                .unwrap()
                .attractor;
            let (Attractor::Magnet(i), Attractor::Magnet(j)) = (a, b) else {
                panic!("unresolved from {x0:?}");
            };
            assert_eq!(j, i % 3 + 1, "from {x0:?}");
        }
    }

    #[test]
    fn rejects_bad_params() {
        let mut p = PendulumParams::default();
        p.step = 0.0;
        assert!(p.validate().is_err());
        let mut p = PendulumParams::default();
        p.damping = -1.0;
        assert!(p.validate().is_err());
        let mut p = PendulumParams::default();
        p.magnets[1] = p.magnets[0];
        assert!(p.validate().is_err());
        let p = PendulumParams::default();
        assert!(compute_basins(&p, 1, 5, Window::square(2.0)).is_err());
        assert!(compute_basins(&p, 5, 5, Window::new(1.0, 1.0, 0.0, 1.0)).is_err());
    }

    #[test]
    fn non_finite_state_is_an_error() {
        let p = PendulumParams::default();
        let err = integrate_trajectory(&p, Vec2::new(f64::NAN, 0.0), Vec2::ZERO).unwrap_err();
        assert_eq!(err, PendulumError::NonFinite { step: 1 });
    }

    #[test]
    fn cell_geometry_round_trips() {
        let img = BasinImage {
            width: 10,
            height: 4,
            window: Window::new(-1.0, 1.0, 0.0, 2.0),
            cells: vec![Attractor::Unresolved; 40],
            failed_cells: 0,
        };
        for row in 0..4 {
            for col in 0..10 {
                assert_eq!(img.cell_at(img.cell_center(col, row)), Some((col, row)));
            }
        }
        assert_eq!(img.cell_at(Vec2::new(5.0, 0.0)), None);
        // row 0 is the top of the window
        assert!(img.cell_center(0, 0).y > img.cell_center(0, 3).y);
    }

    #[test]
    fn small_grid_contains_all_magnets() {
        let p = PendulumParams::default();
        let img = compute_basins(&p, 40, 40, Window::square(2.0)).unwrap();
        for (i, &m) in p.magnets.iter().enumerate() {
            let (c, r) = img.cell_at(m).unwrap();
            assert_eq!(img.get(c, r), Attractor::Magnet(i as u8 + 1));
        }
    }

    #[test]
    fn interior_and_wada_on_hand_built_images() {
        use Attractor::{Magnet, Unresolved};
        let image = |width, height, cells: Vec<Attractor>| BasinImage {
            width,
            height,
            window: Window::square(1.0),
            cells,
            failed_cells: 0,
        };
        // two vertical stripes: a boundary with only two basins
        let stripes = image(4, 3, [Magnet(1), Magnet(1), Magnet(2), Magnet(2)].repeat(3));
        assert!(stripes.is_interior(0, 1));
        assert!(!stripes.is_interior(1, 1));
        assert_eq!(stripes.wada_fraction(), Some(0.0));
        // a third basin in the corner makes every two-basin cell a triple point
        let mut cells = [Magnet(1), Magnet(1), Magnet(2), Magnet(2)].repeat(3);
        cells[11] = Magnet(3);
        assert_eq!(image(4, 3, cells).wada_fraction(), Some(1.0));
        assert_eq!(image(2, 2, vec![Magnet(1); 4]).wada_fraction(), None);
        assert_eq!(image(2, 2, vec![Unresolved, Magnet(1), Magnet(1), Magnet(1)]).wada_fraction(), None);
    }
}
