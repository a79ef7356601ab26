//! Equilibrium state of a particle in a box held at fixed mean energy.
//!
//! `cargo run --example solve_state -- 3.0`

use qcarnot::{entropy_slope, equilibrium_state, SpectrumModel};

fn main() -> qcarnot::Result<()> {
    let lambda: f64 = std::env::args().nth(1).map_or(2.0, |a| a.parse().expect("lambda must be a number"));
    let model = SpectrumModel::SquareWell;
    let state = equilibrium_state(model, lambda, 1e-12)?;
    let slope = entropy_slope(model, lambda, 1e-12)?;

    println!("lambda_eff      = {lambda}");
    println!("alpha           = {}", state.alpha);
    println!("entropy S       = {}", state.entropy);
    println!("temperature T/E = {}", state.temperature);
    println!("dS/dlambda      = {}", slope.value);
    println!("levels stored   = {}", state.levels());
    println!("constraint res. = {:e}", state.constraint_residual());

    println!("\n  n   p_n");
    for (i, p) in state.probabilities.iter().take(8).enumerate() {
        println!("{:>3}   {p:.6e}", state.level_index(i));
    }
    Ok(())
}
