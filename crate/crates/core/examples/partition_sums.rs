//! Partition and moment sums with certified tail bounds, and the
//! small-gap asymptotic of the square-well sum.

use qcarnot::{moment_sum, partition_sum, theta_asymptotic, SpectrumModel};

fn main() -> qcarnot::Result<()> {
    let sw = SpectrumModel::SquareWell;
    println!("{:>10} {:>22} {:>8} {:>10} {:>22}", "alpha", "Z", "terms", "tail", "<n^2>");
    for alpha in [0.1, 0.5, 0.9, 0.99, 0.999] {
        let z = partition_sum(sw, alpha, 1e-13)?;
        let m = moment_sum(sw, alpha, 1e-13)?;
        println!(
            "{alpha:>10} {:>22.15e} {:>8} {:>10.2e} {:>22.15e}",
            z.value,
            z.terms_used,
            z.tail_bound,
            m.value / z.value
        );
    }

    println!("\n{:>8} {:>22} {:>22} {:>10}", "eps", "direct", "asymptotic", "rel.diff");
    for eps in [1e-2, 1e-3, 1e-4, 1e-5] {
        let direct = partition_sum(sw, 1.0 - eps, 1e-14)?.value;
        let asym = theta_asymptotic(eps)?;
        println!("{eps:>8.0e} {direct:>22.12} {asym:>22.12} {:>10.2e}", (asym - direct).abs() / direct);
    }
    Ok(())
}
