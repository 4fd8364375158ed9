//! Escape-time "decay": 10 000 seeds packed into a 1e-11-wide interval are
//! iterated under the logistic map at A = 4 until each first lands in
//! [0.53, 0.54]. The survivor count falls off exponentially.
//!
//! `cargo run --example escape_decay`

use chaoskit::decay::{fit_exponential, run_escape, DecayConfig, Interval, DEFAULT_MIN_SURVIVORS, DEFAULT_SKIP_TRANSIENT};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = DecayConfig::reference();
    let curve = run_escape(&config)?;
    let fit = fit_exponential(&curve, DEFAULT_SKIP_TRANSIENT, DEFAULT_MIN_SURVIVORS)?;
    println!(
        "half-life {:.2} iterations (lambda {:.5}, r^2 {:.5}, fit over {:?})",
        fit.half_life, fit.lambda, fit.r_squared, fit.fit_window
    );
    for t in (0..curve.survivors.len()).step_by(100) {
        let n = curve.survivors[t];
        let model = fit.n0 * (-fit.lambda * t as f64).exp();
        println!("  t = {t:4}  survivors {n:5}  fit {model:8.1}  {}", "#".repeat(n / 200));
    }

    // Moving the escape window changes the decay rate.
    let shifted = DecayConfig {
        escape: Interval::new(0.60, 0.61),
        ..config
    };
    let other = fit_exponential(&run_escape(&shifted)?, DEFAULT_SKIP_TRANSIENT, DEFAULT_MIN_SURVIVORS)?;
    println!("escape window [0.60, 0.61]: half-life {:.2}", other.half_life);
    Ok(())
}
