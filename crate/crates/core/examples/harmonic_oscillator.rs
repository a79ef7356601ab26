//! The same machinery on a harmonic spectrum, where the base has a
//! closed form.

use qcarnot::maxent::{equilibrium_state, harmonic_alpha_closed_form, DEFAULT_TOL};
use qcarnot::SpectrumModel;

fn main() -> qcarnot::Result<()> {
    let ho = SpectrumModel::Harmonic;
    println!("{:>8} {:>20} {:>20} {:>10} {:>10}", "E V^2", "alpha (solver)", "alpha (closed)", "S", "PV/E");
    for mean in [0.6, 1.0, 2.5, 10.0, 100.0] {
        let (v, e): (f64, f64) = (2.0, mean / 4.0);
        let state = equilibrium_state(ho, v * e.sqrt(), DEFAULT_TOL)?;
        let closed = harmonic_alpha_closed_form(mean)?;
        let mut p = 0.0;
        for (i, pn) in state.probabilities.iter().enumerate() {
            p += pn * ho.level_force(state.level_index(i), v)?;
        }
        println!("{mean:>8} {:>20.15} {closed:>20.15} {:>10.6} {:>10.6}", state.alpha, state.entropy, p * v / e);
    }
    Ok(())
}
