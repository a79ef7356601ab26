//! Quantum Carnot engine driven by an energy bath.
//!
//! A particle in a one-dimensional box (or a harmonic trap) is kept at a
//! fixed mean energy while its width changes slowly. The state compatible
//! with that constraint and with thermodynamics is the one of maximum von
//! Neumann entropy, `p_n = α^{c(n)}/Z(α)`. This crate solves for that
//! state, derives its entropy and bath temperature, and assembles full
//! reversible four-stroke cycles with heat, work, efficiency and Clausius
//! diagnostics.
//!
//! - [`spectrum`]: level coefficients and per-level energies and forces.
//! - [`series`]: the partition sums `Z(α)` and `M(α)` with bounded truncation.
//! - [`maxent`]: the constraint solve, equilibrium distribution, entropy, temperature.
//! - [`cycle`]: equations of state, strokes and the cycle report.
//! - [`oracle`]: brute-force and finite-difference cross-checks.
//! - [`verify`]: the self-verification suite behind `qcarnot verify`.
//! - [`cli`]: the `qcarnot` command line.

pub mod cli;
pub mod cycle;
pub mod error;
pub mod maxent;
pub mod oracle;
pub mod series;
pub mod spectrum;
pub mod verify;

pub use cycle::{run_cycle, CycleReport, CycleSpec, Stroke, StrokeSample};
pub use error::{Error, Result};
pub use maxent::{bath_temperature, entropy_slope, equilibrium_state, solve_alpha, MaxEntState};
pub use series::{moment_sum, partition_sum, theta_asymptotic, SeriesResult};
pub use spectrum::SpectrumModel;
