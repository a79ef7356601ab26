//! Entropy against effective width, written as CSV to stdout.
//!
//! `cargo run --example phase_diagram_sweep > s_lambda.csv`

use qcarnot::cli::sweep;
use qcarnot::maxent::DEFAULT_TOL;
use qcarnot::SpectrumModel;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let rows = sweep(SpectrumModel::SquareWell, 1.0, 10.0, 91, DEFAULT_TOL)?;
    let mut w = csv::Writer::from_writer(std::io::stdout().lock());
    for row in &rows {
        w.serialize(row)?;
    }
    w.flush()?;

    let rising = rows.windows(2).all(|p| p[1].entropy > p[0].entropy);
    eprintln!("{} rows, entropy strictly increasing: {rising}", rows.len());
    Ok(())
}
