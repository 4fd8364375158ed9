//! Tsallis entropy across the entropic index and its pseudo-additive
//! composition for independent systems.
//!
//! `cargo run --example tsallis`

use chaoskit::entropy::{additivity_check, tsallis_entropy, Distribution};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let a = Distribution::new(vec![0.5, 0.25, 0.125, 0.125])?;
    let b = Distribution::uniform(3)?;
    println!("{:>6} {:>12} {:>12} {:>12} {:>10}", "q", "S_q(A)", "S_q(A x B)", "cross term", "residual");
    for q in [0.25, 0.5, 0.9, 0.999, 1.0, 1.001, 1.5, 2.0, 3.0] {
        let s = tsallis_entropy(&a, q, 1.0)?;
        let add = additivity_check(&a, &b, q, 1.0)?;
        println!(
            "{q:>6} {:>12.8} {:>12.8} {:>12.8} {:>10.1e}",
            s.value,
            add.lhs,
            add.cross_term(),
            add.residual
        );
    }
    let u2 = Distribution::uniform(2)?;
    let two = additivity_check(&u2, &u2, 2.0, 1.0)?;
    println!("two fair coins at q = 2: S = {}, joint S = {}", two.s_a, two.lhs);
    Ok(())
}
