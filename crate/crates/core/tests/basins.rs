//! Magnetic-pendulum trajectories and basin images.

use std::f64::consts::PI;

use chaoskit::output::basin_ppm;
use chaoskit::pendulum::{
    compute_basins, compute_basins_with_threads, integrate_trajectory, Attractor, PendulumParams, State,
    Vec2, Window, CAPTURE_HOLD,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn permuted(a: Attractor) -> Attractor {
    match a {
        Attractor::Magnet(m) => Attractor::Magnet(m % 3 + 1),
        other => other,
    }
}

#[test]
fn release_over_each_magnet_stays() {
    let p = PendulumParams::default();
    for (i, &m) in p.magnets.iter().enumerate() {
        let out = integrate_trajectory(&p, m, Vec2::ZERO).unwrap();
        assert_eq!(out.attractor, Attractor::Magnet(i as u8 + 1));
        assert!(out.steps >= CAPTURE_HOLD);
    }
}

#[test]
fn release_at_center_never_resolves() {
    let p = PendulumParams {
        max_steps: 20_000,
        ..PendulumParams::default()
    };
    let out = integrate_trajectory(&p, Vec2::ZERO, Vec2::ZERO).unwrap();
    assert_eq!(out.attractor, Attractor::Unresolved);
    assert_eq!(out.steps, p.max_steps);
}

/// Releasing at a point rotated by 120° lands on the rotated magnet.
#[test]
fn rotated_releases_permute_attractors() {
    let p = PendulumParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut agree, mut total) = (0, 0);
    for _ in 0..60 {
        let x0 = Vec2::new(rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5));
        let a = integrate_trajectory(&p, x0, Vec2::ZERO).unwrap().attractor;
        let b = integrate_trajectory(&p, x0.rotate(2.0 * PI / 3.0), Vec2::ZERO).unwrap().attractor;
        total += 1;
        if b == permuted(a) {
            agree += 1;
        }
    }
    // trajectories from generic points separate only near basin boundaries
    assert!(agree as f64 >= 0.9 * total as f64, "{agree}/{total}");
}

/// Once captured, 1000 further steps keep the bob at the same magnet.
#[test]
fn capture_is_stable() {
    let p = PendulumParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut checked = 0;
    while checked < 100 {
        let x0 = Vec2::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let out = integrate_trajectory(&p, x0, Vec2::ZERO).unwrap();
        let Attractor::Magnet(m) = out.attractor else {
            continue;
        };
        let mut s = State { pos: x0, vel: Vec2::ZERO };
        for _ in 0..out.steps {
            s = p.rk4_step(s);
        }
        let magnet = p.magnets[usize::from(m - 1)];
        for _ in 0..1000 {
            s = p.rk4_step(s);
            assert!((s.pos - magnet).norm() < p.capture_radius, "left magnet {m} from {x0:?}");
        }
        checked += 1;
    }
}

#[test]
fn energy_never_increases() {
    let p = PendulumParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..20 {
        let mut s = State {
            pos: Vec2::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)),
            vel: Vec2::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
        };
        let e0 = p.energy(&s);
        let mut last = e0;
        for step in 1..=10_000 {
            s = p.rk4_step(s);
            if step % 100 == 0 {
                let e = p.energy(&s);
                assert!(e <= last + 1e-6 * e0.abs(), "step {step}: {last} -> {e}");
                last = e;
            }
        }
    }
}

#[test]
fn undamped_motion_conserves_energy() {
    let p = PendulumParams {
        damping: 0.0,
        step: 0.001,
        ..PendulumParams::default()
    };
    let mut s = State {
        pos: Vec2::new(1.3, 0.4),
        vel: Vec2::ZERO,
    };
    let e0 = p.energy(&s);
    for _ in 0..20_000 {
        s = p.rk4_step(s);
    }
    assert!((p.energy(&s) - e0).abs() < 1e-6 * e0.abs(), "{e0} -> {}", p.energy(&s));
}

#[test]
fn pixmap_is_independent_of_worker_count() {
    let p = PendulumParams::default();
    let w = Window::new(-0.5, 0.5, 0.5, 1.5);
    let one = basin_ppm(&compute_basins_with_threads(&p, 50, 40, w, 1).unwrap());
    for threads in [2, 5] {
        assert_eq!(one, basin_ppm(&compute_basins_with_threads(&p, 50, 40, w, threads).unwrap()));
    }
}

#[test]
fn rejects_degenerate_grids() {
    let p = PendulumParams::default();
    assert!(compute_basins(&p, 1, 10, Window::square(2.0)).is_err());
    assert!(compute_basins(&p, 10, 10, Window::new(1.0, -1.0, 0.0, 1.0)).is_err());
    assert!(compute_basins(&p, 10, 10, Window::new(0.0, 1.0, 0.0, f64::NAN)).is_err());
}

/// Fractal boundary proxy over the zoom window at full resolution: boundary
/// cells between two basins usually have the third basin nearby, and all
/// three colors appear.
#[test]
fn zoomed_boundaries_touch_all_three_basins() {
    let img = compute_basins(&PendulumParams::default(), 600, 600, Window::new(-0.5, 0.5, 0.5, 1.5)).unwrap();
    for m in 1..=3 {
        assert!(img.count(Attractor::Magnet(m)) > 0);
    }
    let fraction = img.wada_fraction().unwrap();
    assert!(fraction >= 0.30, "{fraction}");
}
