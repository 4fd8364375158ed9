//! Numerical toolkit for chaotic maps and quantum-correlation arithmetic:
//!
//! - [`maps`]: logistic, sine and quadratic maps and their orbits
//! - [`bifurcation`]: bifurcation diagrams, period detection, Feigenbaum ratios
//! - [`decay`]: escape-time decay experiment, exponential fit, delay plots
//! - [`pendulum`]: three-magnet pendulum basins of attraction
//! - [`quantum`]: CHSH classical/quantum values, local hidden-variable
//!   simulation, GHZ correlations and hidden-value enumeration
//! - [`entropy`]: Tsallis entropy and pseudo-additivity
//! - [`cli`] / [`output`]: the `chaoskit` command line and its file formats

pub mod bifurcation;
pub mod cli;
pub mod decay;
pub mod entropy;
pub mod maps;
pub mod output;
pub mod pendulum;
pub mod quantum;
