//! CHSH: the classical bound by exhaustion, the quantum value for the
//! singlet, and a Monte Carlo of local hidden-variable strategies.
//!
//! `cargo run --example chsh`

use chaoskit::quantum::{
    chsh_classical_max, chsh_quantum, lhv_simulate, ConstantStrategy, HiddenAxisStrategy, LocalStrategy,
    RandomTableStrategy,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let classical = chsh_classical_max();
    println!(
        "classical max over 16 deterministic assignments: {} (attained by {})",
        classical.max,
        classical.argmax.len()
    );
    let q = chsh_quantum();
    println!(
        "singlet: E(QS) {:+.6}  E(RS) {:+.6}  E(RT) {:+.6}  E(QT) {:+.6}  ->  S = {:.12}",
        q.e_qs, q.e_rs, q.e_rt, q.e_qt, q.s_value
    );
    let strategies: [(&str, &dyn LocalStrategy); 3] = [
        ("constant", &ConstantStrategy),
        ("random table", &RandomTableStrategy),
        ("hidden axis", &HiddenAxisStrategy),
    ];
    for (name, strategy) in strategies {
        let est = lhv_simulate(strategy, 200_000, 42)?;
        println!(
            "LHV {name:12}: S = {:.4} ± {:.4}",
            est.estimate, est.standard_error
        );
    }
    Ok(())
}
