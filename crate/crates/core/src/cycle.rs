//! The four-stroke quantum Carnot cycle.
//!
//! 1. `IsoHot`: isoenergetic expansion `V1 → V2` at bath energy `E_H`.
//! 2. `AdiabaticExpand`: `V2 → V3` with the occupations frozen; the energy
//!    falls as `V⁻²` down to `E_C = (V2²/V3²)·E_H`.
//! 3. `IsoCold`: isoenergetic compression `V3 → V4` at `E_C`.
//! 4. `AdiabaticCompress`: `V4 → V1`, back to `E_H`.
//!
//! The cycle closes when `V2/V1 = V3/V4`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{ensure_positive, Error, Result};
use crate::maxent::{entropy_of, equilibrium_state, MaxEntState, DEFAULT_TOL};
use crate::spectrum::{SpectrumModel, GROUND_SLACK};

/// Pressure on an isoenergetic stroke, `P = 2E/V`.
pub fn pressure_isoenergetic(energy: f64, width: f64) -> Result<f64> {
    ensure_positive("energy", energy)?;
    ensure_positive("width", width)?;
    Ok(2.0 * energy / width)
}

/// Pressure on an adiabatic stroke that started at `(width_start, energy_start)`,
/// `P = 2·V_start²·E_start/V³`.
pub fn pressure_adiabatic(energy_start: f64, width_start: f64, width: f64) -> Result<f64> {
    ensure_positive("energy", energy_start)?;
    ensure_positive("start width", width_start)?;
    ensure_positive("width", width)?;
    let ratio = width_start / width;
    Ok(2.0 * energy_start * ratio * ratio / width)
}

/// Energy absorbed from the bath on an isoenergetic stroke, `2E·ln(V_to/V_from)`.
pub fn heat_isoenergetic(energy: f64, width_from: f64, width_to: f64) -> Result<f64> {
    ensure_positive("energy", energy)?;
    ensure_positive("width", width_from)?;
    ensure_positive("width", width_to)?;
    Ok(2.0 * energy * (width_to / width_from).ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CycleSpec {
    pub v1: f64,
    pub v2: f64,
    pub v3: f64,
    /// Hot bath energy.
    pub e_h: f64,
    /// Replaces the closing width `V1·V3/V2`; the resulting cycle is not
    /// reversible and exists only to exercise the Clausius diagnostic.
    pub v4_override: Option<f64>,
}

impl CycleSpec {
    pub fn new(v1: f64, v2: f64, v3: f64, e_h: f64) -> Self {
        CycleSpec { v1, v2, v3, e_h, v4_override: None }
    }

    /// The closing width `V4`.
    pub fn v4(&self) -> f64 {
        self.v4_override.unwrap_or(self.v1 * self.v3 / self.v2)
    }

    /// Cold bath energy `E_C = (V2²/V3²)·E_H`.
    pub fn e_c(&self) -> f64 {
        (self.v2 * self.v2) / (self.v3 * self.v3) * self.e_h
    }

    pub fn validate(&self, model: SpectrumModel) -> Result<()> {
        for (name, v) in [("V1", self.v1), ("V2", self.v2), ("V3", self.v3), ("E_H", self.e_h)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidCycle(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if !(self.v1 < self.v2 && self.v2 < self.v3) {
            return Err(Error::InvalidCycle(format!(
                "widths must satisfy V1 < V2 < V3, got {}, {}, {}",
                self.v1, self.v2, self.v3
            )));
        }
        let ground = model.ground_coefficient();
        let lambda_sq = self.e_h * self.v1 * self.v1;
        if lambda_sq < ground * (1.0 - GROUND_SLACK) {
            return Err(Error::InvalidCycle(format!(
                "E_H = {} is below the ground level energy {} at V1 = {}",
                self.e_h,
                ground / (self.v1 * self.v1),
                self.v1
            )));
        }
        let v4 = self.v4();
        if !(self.v1 < v4 && v4 < self.v3) {
            return Err(Error::InvalidCycle(format!("V4 = {v4} must lie strictly between V1 and V3")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Stroke {
    IsoHot,
    AdiabaticExpand,
    IsoCold,
    AdiabaticCompress,
}

impl Stroke {
    pub const ALL: [Stroke; 4] = [Stroke::IsoHot, Stroke::AdiabaticExpand, Stroke::IsoCold, Stroke::AdiabaticCompress];

    pub fn label(self) -> &'static str {
        match self {
            Stroke::IsoHot => "IsoHot",
            Stroke::AdiabaticExpand => "AdiabaticExpand",
            Stroke::IsoCold => "IsoCold",
            Stroke::AdiabaticCompress => "AdiabaticCompress",
        }
    }

    pub fn is_adiabatic(self) -> bool {
        matches!(self, Stroke::AdiabaticExpand | Stroke::AdiabaticCompress)
    }
}

impl std::fmt::Display for Stroke {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// One point on a stroke.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StrokeSample {
    pub stroke: Stroke,
    /// Width.
    pub v: f64,
    /// Force on the walls.
    pub p: f64,
    /// Energy expectation.
    pub e: f64,
    /// von Neumann entropy.
    pub s: f64,
    /// Temperature; on adiabatic strokes it scales with the energy.
    pub t: f64,
}

/// Sign of the Clausius sum `Q_H/E_H + Q_C/E_C`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ClausiusDiagnostic {
    /// Zero within `1e−12`.
    Reversible,
    /// Negative: energy lost around the cycle.
    Irreversible,
    /// Positive, which no physical cycle allows.
    Violation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CycleReport {
    pub v4: f64,
    pub e_c: f64,
    pub q_h: f64,
    pub q_c: f64,
    pub w_net: f64,
    pub eta: f64,
    pub clausius_residual: f64,
    pub entropy_closure: f64,
}

pub const CLAUSIUS_TOL: f64 = 1e-12;

impl CycleReport {
    pub fn clausius_diagnostic(&self) -> ClausiusDiagnostic {
        if self.clausius_residual.abs() <= CLAUSIUS_TOL {
            ClausiusDiagnostic::Reversible
        } else if self.clausius_residual < 0.0 {
            ClausiusDiagnostic::Irreversible
        } else {
            ClausiusDiagnostic::Violation
        }
    }
}

/// `count` widths from `from` to `to` with equal ratios; endpoints exact.
pub fn geometric_grid(from: f64, to: f64, count: usize) -> Vec<f64> {
    let ratio = to / from;
    let last = count.saturating_sub(1).max(1) as f64;
    (0..count)
        .map(|i| match i {
            0 => from,
            i if i + 1 == count => to,
            i => from * ratio.powf(i as f64 / last),
        })
        .collect()
}

/// Heat, work and efficiency of the cycle without sampling the strokes.
pub fn cycle_report(spec: &CycleSpec) -> Result<CycleReport> {
    let v4 = spec.v4();
    let e_c = spec.e_c();
    let q_h = heat_isoenergetic(spec.e_h, spec.v1, spec.v2)?;
    let q_c = heat_isoenergetic(e_c, spec.v3, v4)?;
    Ok(CycleReport {
        v4,
        e_c,
        q_h,
        q_c,
        w_net: q_h + q_c,
        eta: 1.0 - e_c / spec.e_h,
        clausius_residual: q_h / spec.e_h + q_c / e_c,
        entropy_closure: 0.0,
    })
}

fn stroke_error(stroke: Stroke, width: f64) -> impl FnOnce(Error) -> Error {
    move |e| Error::Stroke { stroke: stroke.label(), width, source: Box::new(e) }
}

fn isoenergetic_stroke(
    model: SpectrumModel,
    stroke: Stroke,
    energy: f64,
    widths: &[f64],
) -> Result<(Vec<StrokeSample>, MaxEntState, MaxEntState)> {
    let states: Vec<MaxEntState> = widths
        .par_iter()
        .map(|&v| equilibrium_state(model, v * energy.sqrt(), DEFAULT_TOL).map_err(stroke_error(stroke, v)))
        .collect::<Result<_>>()?;
    let samples = widths
        .iter()
        .zip(&states)
        .map(|(&v, st)| {
            Ok(StrokeSample {
                stroke,
                v,
                p: pressure_isoenergetic(energy, v)?,
                e: energy,
                s: st.entropy,
                t: energy * st.temperature,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let first = states.first().cloned().expect("at least two samples");
    let last = states.last().cloned().expect("at least two samples");
    Ok((samples, first, last))
}

fn adiabatic_stroke(
    stroke: Stroke,
    junction: &MaxEntState,
    energy_start: f64,
    width_start: f64,
    widths: &[f64],
) -> Result<Vec<StrokeSample>> {
    // Occupations are frozen: every sample carries the junction distribution.
    let entropy = entropy_of(&junction.probabilities);
    let mean_c = junction.mean_coefficient();
    widths
        .par_iter()
        .map(|&v| {
            let ratio = width_start / v;
            let e = energy_start * ratio * ratio;
            let expected = v * v * e;
            if (mean_c - expected).abs() > 1e-9 * expected.max(1.0) {
                return Err(stroke_error(stroke, v)(Error::Domain(format!(
                    "frozen occupations give <c(n)> = {mean_c}, expected V^2 E = {expected}"
                ))));
            }
            Ok(StrokeSample {
                stroke,
                v,
                p: pressure_adiabatic(energy_start, width_start, v).map_err(stroke_error(stroke, v))?,
                e,
                s: entropy,
                t: e * junction.temperature,
            })
        })
        .collect()
}

/// Samples all four strokes and reports heat, work and closure diagnostics.
///
/// Samples are ordered by stroke, then by position along the stroke; the
/// last sample of each stroke shares its width with the first of the next.
pub fn run_cycle(model: SpectrumModel, spec: &CycleSpec, samples_per_stroke: usize) -> Result<(CycleReport, Vec<StrokeSample>)> {
    spec.validate(model)?;
    if samples_per_stroke < 2 {
        return Err(Error::Domain(format!("need at least 2 samples per stroke, got {samples_per_stroke}")));
    }
    let mut report = cycle_report(spec)?;
    let (v1, v2, v3, v4) = (spec.v1, spec.v2, spec.v3, report.v4);
    let (e_h, e_c) = (spec.e_h, report.e_c);
    let n = samples_per_stroke;

    let (hot, _, hot_end) = isoenergetic_stroke(model, Stroke::IsoHot, e_h, &geometric_grid(v1, v2, n))?;
    let expand = adiabatic_stroke(Stroke::AdiabaticExpand, &hot_end, e_h, v2, &geometric_grid(v2, v3, n))?;
    let (cold, _, cold_end) = isoenergetic_stroke(model, Stroke::IsoCold, e_c, &geometric_grid(v3, v4, n))?;
    let compress = adiabatic_stroke(Stroke::AdiabaticCompress, &cold_end, e_c, v4, &geometric_grid(v4, v1, n))?;

    let mut samples = Vec::with_capacity(4 * n);
    samples.extend(hot);
    samples.extend(expand);
    samples.extend(cold);
    samples.extend(compress);
    report.entropy_closure = (samples[samples.len() - 1].s - samples[0].s).abs();
    Ok((report, samples))
}
