//! A reversible cycle between two energy baths, with its stroke table.
//!
//! `cargo run --example carnot_cycle -- 1 2 4 1`

use qcarnot::{run_cycle, CycleSpec, SpectrumModel};

fn main() -> qcarnot::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).map(|a| a.parse().expect("numeric arguments")).collect();
    let spec = match args[..] {
        [v1, v2, v3, e_h] => CycleSpec::new(v1, v2, v3, e_h),
        [v1, v2, v3] => CycleSpec::new(v1, v2, v3, 1.0),
        _ => CycleSpec::new(1.0, 2.0, 4.0, 1.0),
    };
    let (report, samples) = run_cycle(SpectrumModel::SquareWell, &spec, 6)?;

    println!("V4   = {}", report.v4);
    println!("E_C  = {}", report.e_c);
    println!("Q_H  = {}", report.q_h);
    println!("Q_C  = {}", report.q_c);
    println!("W    = {}", report.w_net);
    println!("eta  = {}  (Carnot bound 1 - E_C/E_H = {})", report.eta, 1.0 - report.e_c / spec.e_h);
    println!("Q_H/E_H + Q_C/E_C = {:e}", report.clausius_residual);

    println!("\n{:<18} {:>8} {:>12} {:>10} {:>10} {:>10}", "stroke", "V", "P", "E", "S", "T");
    for s in &samples {
        println!("{:<18} {:>8.4} {:>12.6} {:>10.6} {:>10.6} {:>10.6}", s.stroke.label(), s.v, s.p, s.e, s.s, s.t);
    }
    Ok(())
}
