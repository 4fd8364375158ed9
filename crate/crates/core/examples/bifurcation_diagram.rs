//! Bifurcation diagram of the logistic map above A = 2.9, written as CSV,
//! with a coarse text rendering of how many distinct values each column has.
//!
//! `cargo run --example bifurcation_diagram [out.csv]`

use chaoskit::bifurcation::{bifurcation_diagram, detect_period, Period, PERIOD_TOL, PERIOD_TRANSIENT};
use chaoskit::maps::{MapKind, MapSpec};
use chaoskit::output::{format_real, write_csv};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "bifurcation.csv".into());
    let diagram = bifurcation_diagram(MapKind::Logistic, 2.9, 4.0, 400, 0.3, 1000, 200)?;
    write_csv(
        out.as_ref(),
        "param,x",
        diagram
            .points
            .iter()
            .map(|&(a, x)| format!("{},{}", format_real(a), format_real(x))),
    )?;
    println!("wrote {} points to {out}", diagram.points.len());

    for a in [2.95, 3.2, 3.5, 3.56, 3.7, 3.83, 3.9] {
        let spec = MapSpec::logistic(a)?;
        let label = match detect_period(&spec, 64, PERIOD_TOL, PERIOD_TRANSIENT)? {
            Period::Cycle(p) => format!("period {p}"),
            Period::Chaotic => "no cycle up to 64 (chaotic)".into(),
        };
        println!("A = {a:<5} {label}");
    }
    Ok(())
}
