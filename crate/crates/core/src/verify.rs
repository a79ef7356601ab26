//! Self-verification suite that drives the oracles against a solver.
//!
//! The solver is abstracted behind [`StateSolver`] so that deliberately
//! broken implementations can be shown to fail the suite.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use crate::cycle::{cycle_report, run_cycle, CycleSpec, CLAUSIUS_TOL};
use crate::error::{Error, Result};
use crate::maxent::{equilibrium_state, harmonic_alpha_closed_form, solve_alpha, solve_truncated, MaxEntState, DEFAULT_TOL};
use crate::oracle::{
    brute_force_maxent, closed_work_quadrature, finite_difference_slope_with, finite_difference_temperature_with,
    TruncatedProblem,
};
use crate::series::{partition_sum, theta_asymptotic};
use crate::spectrum::SpectrumModel;

const SW: SpectrumModel = SpectrumModel::SquareWell;

/// Something that produces equilibrium states.
pub trait StateSolver: Sync {
    fn solve(&self, model: SpectrumModel, lambda_eff: f64, tol: f64) -> Result<MaxEntState>;
}

/// The library's own solver.
#[derive(Debug, Clone, Copy, Default)]
pub struct Equilibrium;

impl StateSolver for Equilibrium {
    fn solve(&self, model: SpectrumModel, lambda_eff: f64, tol: f64) -> Result<MaxEntState> {
        equilibrium_state(model, lambda_eff, tol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Quick,
    Full,
}

impl FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quick" => Ok(Level::Quick),
            "full" => Ok(Level::Full),
            other => Err(Error::Domain(format!("unknown verification level `{other}`"))),
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::Quick => "quick",
            Level::Full => "full",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Measured discrepancy (or ratio, for convergence-order checks).
    pub value: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub level: Level,
    pub passed: bool,
    pub elapsed_seconds: f64,
    pub failed: Vec<String>,
    pub checks: Vec<Check>,
}

struct Suite {
    checks: Vec<Check>,
}

impl Suite {
    /// Records `measure() ≤ tolerance`.
    fn within(&mut self, name: impl Into<String>, tolerance: f64, measure: impl FnOnce() -> Result<f64>) {
        let name = name.into();
        let check = match measure() {
            Ok(value) => Check { passed: value <= tolerance, name, value, tolerance, error: None },
            Err(e) => Check { passed: false, name, value: f64::NAN, tolerance, error: Some(e.to_string()) },
        };
        self.checks.push(check);
    }

    /// Records `lo ≤ measure() ≤ hi`; `tolerance` reports the half-width.
    fn between(&mut self, name: impl Into<String>, lo: f64, hi: f64, measure: impl FnOnce() -> Result<f64>) {
        let name = name.into();
        let half = 0.5 * (hi - lo);
        let check = match measure() {
            Ok(value) => Check { passed: value >= lo && value <= hi, name, value, tolerance: half, error: None },
            Err(e) => Check { passed: false, name, value: f64::NAN, tolerance: half, error: Some(e.to_string()) },
        };
        self.checks.push(check);
    }
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Largest componentwise gap between direct search and the truncated solver.
pub fn oracle_gap(levels: usize, target: f64) -> Result<f64> {
    let problem = TruncatedProblem::from_model(SW, levels, target)?;
    let brute = brute_force_maxent(&problem, 1e-10)?;
    let solved = solve_truncated(problem.coefficients(), target, 1e-13)?;
    Ok(brute.iter().zip(&solved).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

/// `|1/T − ΔS/ΔQ|·T` with centered step `h`.
pub fn temperature_discrepancy(solver: &dyn StateSolver, model: SpectrumModel, lambda: f64, h: f64) -> Result<f64> {
    let state = solver.solve(model, lambda, DEFAULT_TOL)?;
    let inverse_t = 1.0 / state.temperature;
    let fd = finite_difference_temperature_with(|l| solver.solve(model, l, DEFAULT_TOL), model, lambda, h)?;
    Ok(relative(fd, inverse_t))
}

/// Relative gap between `−2λ·ln α` and the centered difference of `S`.
pub fn slope_discrepancy(solver: &dyn StateSolver, model: SpectrumModel, lambda: f64, h: f64) -> Result<f64> {
    let state = solver.solve(model, lambda, DEFAULT_TOL)?;
    let slope = -2.0 * lambda * state.ln_alpha;
    let fd = finite_difference_slope_with(|l| solver.solve(model, l, DEFAULT_TOL), model, lambda, h)?;
    Ok(relative(fd, slope))
}

pub fn run_verification(level: Level, solver: &dyn StateSolver) -> VerificationReport {
    let start = Instant::now();
    let mut suite = Suite { checks: Vec::new() };
    let full = level == Level::Full;

    let oracle_cases: &[(usize, &[f64])] = if full {
        &[(3, &[1.0, 2.0, 4.0, 6.5, 9.0]), (4, &[2.0, 5.0, 12.0]), (5, &[3.0, 10.0, 20.0]), (6, &[4.0, 15.0, 30.0])]
    } else {
        &[(3, &[2.0, 4.0, 6.5]), (4, &[5.0])]
    };
    for &(levels, targets) in oracle_cases {
        for &t in targets {
            suite.within(format!("oracle_agreement/N={levels}/target={t}"), 1e-6, || oracle_gap(levels, t));
        }
    }

    let lambdas: &[f64] = if full { &[2.0, 5.0, 10.0] } else { &[2.0] };
    for &l in lambdas {
        suite.within(format!("fd_temperature/lambda={l}"), 1e-4, || temperature_discrepancy(solver, SW, l, 1e-4));
        suite.within(format!("entropy_slope/lambda={l}"), 1e-6, || slope_discrepancy(solver, SW, l, 1e-4));
    }
    if full {
        suite.between("fd_temperature_order/lambda=2", 3.0, 5.0, || {
            let coarse = temperature_discrepancy(solver, SW, 2.0, 1e-2)?;
            let fine = temperature_discrepancy(solver, SW, 2.0, 5e-3)?;
            Ok(coarse / fine)
        });
        suite.within("asymptotic_slope/lambda=50", 0.01, || {
            let s = solver.solve(SW, 50.0, DEFAULT_TOL)?;
            Ok((-2.0 * 50.0 * s.ln_alpha * 50.0 - 1.0).abs())
        });
    }

    let residual_grid: &[f64] = if full { &[1.1, 1.5, 2.0, 5.0, 10.0, 20.0, 50.0] } else { &[1.5, 2.0, 5.0] };
    for &l in residual_grid {
        suite.within(format!("constraint_residual/lambda={l}"), 1e-10, || {
            solver.solve(SW, l, DEFAULT_TOL).map(|s| s.constraint_residual())
        });
        suite.within(format!("entropy_equivalence/lambda={l}"), 1e-10, || {
            solver.solve(SW, l, DEFAULT_TOL).map(|s| (s.entropy - s.von_neumann_entropy()).abs())
        });
    }

    let specs: &[(f64, f64, f64, f64)] = if full {
        &[(1.0, 2.0, 4.0, 1.0), (1.0, 1.3, 7.0, 2.5), (0.5, 3.0, 3.5, 4.0), (2.0, 2.1, 40.0, 0.3)]
    } else {
        &[(1.0, 2.0, 4.0, 1.0), (1.0, 1.3, 7.0, 2.5)]
    };
    for &(v1, v2, v3, e_h) in specs {
        let spec = CycleSpec::new(v1, v2, v3, e_h);
        suite.within(format!("clausius/{v1},{v2},{v3},{e_h}"), CLAUSIUS_TOL, || {
            spec.validate(SW)?;
            cycle_report(&spec).map(|r| r.clausius_residual.abs())
        });
    }
    suite.within("cycle_closure/1,2,4,1", 1e-10, || {
        let (report, samples) = run_cycle(SW, &CycleSpec::new(1.0, 2.0, 4.0, 1.0), if full { 64 } else { 16 })?;
        let adiabatic_spread = samples
            .chunk_by(|a, b| a.stroke == b.stroke)
            .filter(|run| run[0].stroke.is_adiabatic())
            .map(|run| run.iter().map(|s| (s.s - run[0].s).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        Ok(report.entropy_closure.max(adiabatic_spread))
    });

    let epsilons: &[(f64, f64)] = if full { &[(1e-4, 1e-4), (1e-6, 1e-5)] } else { &[(1e-4, 1e-4)] };
    for &(eps, tol) in epsilons {
        suite.within(format!("theta_asymptotic/eps={eps}"), tol, || {
            let direct = partition_sum(SW, 1.0 - eps, 1e-13)?.value;
            Ok(relative(theta_asymptotic(eps)?, direct))
        });
    }

    if full {
        suite.within("harmonic_closed_form/EV2=1.5", 1e-10, || {
            let numeric = solve_alpha(SpectrumModel::Harmonic, 1.5f64.sqrt(), DEFAULT_TOL)?;
            Ok((numeric - harmonic_alpha_closed_form(1.5)?).abs())
        });
        suite.within("work_quadrature/1,2,4,1", 1e-8, || {
            let spec = CycleSpec::new(1.0, 2.0, 4.0, 1.0);
            let report = cycle_report(&spec)?;
            Ok(relative(closed_work_quadrature(&spec, 1e-13)?, report.q_h + report.q_c))
        });
    }

    let failed: Vec<String> = suite.checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect();
    VerificationReport {
        level,
        passed: failed.is_empty(),
        elapsed_seconds: start.elapsed().as_secs_f64(),
        failed,
        checks: suite.checks,
    }
}
