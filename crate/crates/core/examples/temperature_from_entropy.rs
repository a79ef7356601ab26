//! The reported temperature agrees with a centered difference of entropy
//! against exchanged heat, and `dS/dλ` with differentiated entropy.

use qcarnot::maxent::{entropy_slope, equilibrium_state, DEFAULT_TOL};
use qcarnot::oracle::{finite_difference_slope, finite_difference_temperature};
use qcarnot::SpectrumModel;

fn main() -> qcarnot::Result<()> {
    let sw = SpectrumModel::SquareWell;
    println!("{:>6} {:>20} {:>20} {:>10} {:>10}", "lambda", "1/T", "dS/dQ (h=1e-3)", "rel.diff", "order");
    for lambda in [1.5, 2.0, 5.0, 10.0, 20.0] {
        let inv_t = 1.0 / equilibrium_state(sw, lambda, DEFAULT_TOL)?.temperature;
        let err = |h: f64| -> qcarnot::Result<f64> {
            Ok((finite_difference_temperature(sw, lambda, h)? - inv_t).abs() / inv_t)
        };
        let fd = finite_difference_temperature(sw, lambda, 1e-3)?;
        println!(
            "{lambda:>6} {inv_t:>20.14} {fd:>20.14} {:>10.2e} {:>10.3}",
            err(1e-3)?,
            err(2e-2)? / err(1e-2)?
        );
    }

    println!("\n{:>6} {:>20} {:>20}", "lambda", "-2 lambda ln a", "dS/dlambda (FD)");
    for lambda in [2.0, 5.0, 10.0] {
        let exact = entropy_slope(sw, lambda, DEFAULT_TOL)?.value;
        let fd = finite_difference_slope(sw, lambda, 1e-4)?;
        println!("{lambda:>6} {exact:>20.14} {fd:>20.14}");
    }
    Ok(())
}
