//! The sine map x -> A sin x is odd, so orbits from ±x0 mirror each other
//! exactly; the bifurcation diagram over negative and positive A is the
//! union of two reflected copies.
//!
//! `cargo run --example sine_mirror`

use chaoskit::bifurcation::{bifurcation_diagram, stable_cycle_period, Period, PERIOD_TRANSIENT};
use chaoskit::maps::{iterate_orbit, MapKind, MapSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = MapSpec::sine(2.7)?;
    let plus = iterate_orbit(&spec, 1.0, 0, 10_000)?;
    let minus = iterate_orbit(&spec, -1.0, 0, 10_000)?;
    let worst = plus
        .values
        .iter()
        .zip(&minus.values)
        .map(|(p, m)| (p + m).abs())
        .fold(0.0, f64::max);
    println!("max |x_n(1) + x_n(-1)| over 10^4 iterates at A = 2.7: {worst:e}");

    let diagram = bifurcation_diagram(MapKind::Sine, -3.0, 3.0, 13, 1.0, 1000, 4)?;
    for i in 0..diagram.n_param {
        let xs: Vec<String> = diagram.column(i).iter().map(|(_, x)| format!("{x:+.4}")).collect();
        println!("A = {:+.1}: {}", diagram.param_at(i), xs.join(" "));
    }

    for a in [2.0, 2.5, 2.7, 2.75, 3.0] {
        let p = stable_cycle_period(&MapSpec::sine(a)?, 32, PERIOD_TRANSIENT)?;
        let label = match p {
            Period::Cycle(p) => format!("period {p}"),
            Period::Chaotic => "chaotic".into(),
        };
        println!("A = {a}: {label}");
    }
    Ok(())
}
