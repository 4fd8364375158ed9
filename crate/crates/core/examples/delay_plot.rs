//! Time-delay plot of escape events: pairs of successive inter-event
//! intervals (dt_m, dt_{m+n}). Structure in the scatter is the fingerprint of
//! a deterministic process; a Poisson process would fill it evenly.
//!
//! `cargo run --example delay_plot [lag] [out.csv]`

use chaoskit::decay::{delay_series, run_escape, DecayConfig, Seeding};
use chaoskit::output::{format_real, write_csv};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let lag: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1);
    let out = args.next().unwrap_or_else(|| format!("delay_lag{lag}.csv"));

    let config = DecayConfig {
        seeding: Seeding::UniformRandom(7),
        ..DecayConfig::reference()
    };
    let curve = run_escape(&config)?;
    let series = delay_series(&curve.event_times(), lag)?;
    write_csv(
        out.as_ref(),
        &format!("dt_m,dt_m_plus_{lag}"),
        series
            .pairs
            .iter()
            .map(|&(a, b)| format!("{},{}", format_real(a), format_real(b))),
    )?;
    println!("{} pairs written to {out}", series.pairs.len());

    // a small character scatter of the first 40x40 intervals
    let mut grid = [[b' '; 40]; 20];
    for &(a, b) in &series.pairs {
        let (col, row) = (a as usize, b as usize / 2);
        if col < 40 && row < 20 {
            grid[19 - row][col] = b'*';
        }
    }
    for row in grid {
        println!("|{}", String::from_utf8_lossy(&row));
    }
    println!("+{}", "-".repeat(40));
    Ok(())
}
