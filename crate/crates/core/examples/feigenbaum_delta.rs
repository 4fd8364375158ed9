//! Period-doubling points of the logistic and sine maps and the gap ratios
//! converging to Feigenbaum's δ.
//!
//! `cargo run --release --example feigenbaum_delta [levels]`

use chaoskit::bifurcation::estimate_feigenbaum;
use chaoskit::maps::MapKind;

const DELTA: f64 = 4.669_201_609_102_99;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let levels: usize = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(7);
    for kind in [MapKind::Logistic, MapKind::Sine] {
        let est = estimate_feigenbaum(kind, levels)?;
        println!("{kind} map");
        for (n, a) in est.points.values.iter().enumerate() {
            println!("  A_{} = {a:.12}  (period {} born)", n + 1, 1u64 << (n + 1));
        }
        for (n, r) in est.ratios.iter().enumerate() {
            println!("  ratio {} = {r:.6}", n + 1);
        }
        println!(
            "  final estimate {:.6}, off by {:.3}% from δ = {DELTA}",
            est.last,
            100.0 * (est.last - DELTA).abs() / DELTA
        );
    }
    Ok(())
}
