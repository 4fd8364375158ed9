//! Basins of attraction of a damped pendulum over three magnets, rendered
//! as a P3 pixmap. Pass a smaller size for a quick look.
//!
//! `cargo run --release --example magnetic_basins [size] [out.ppm]`

use chaoskit::output::basin_ppm;
use chaoskit::pendulum::{compute_basins, Attractor, PendulumParams, Window};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let size: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(200);
    let out = args.next().unwrap_or_else(|| "basins.ppm".into());

    let params = PendulumParams::default();
    for (name, window) in [
        ("full", Window::square(2.0)),
        ("zoom", Window::new(-0.5, 0.5, 0.5, 1.5)),
    ] {
        let image = compute_basins(&params, size, size, window)?;
        let path = format!("{name}_{out}");
        std::fs::write(&path, basin_ppm(&image))?;
        let counts: Vec<usize> = [1, 2, 3]
            .map(|m| image.count(Attractor::Magnet(m)))
            .into_iter()
            .chain([image.count(Attractor::Unresolved)])
            .collect();
        println!("{name}: {path}  red/green/blue/unresolved = {counts:?}");
    }
    Ok(())
}
