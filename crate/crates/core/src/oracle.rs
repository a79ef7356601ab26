//! Independent checks for the equilibrium solver and the cycle builder.
//!
//! Nothing here uses the exponential-family form of the solution:
//! [`brute_force_maxent`] searches the feasible set directly, the
//! finite-difference routines only difference entropies, and
//! [`closed_work_quadrature`] integrates the pressure numerically.

use crate::cycle::{pressure_adiabatic, pressure_isoenergetic, CycleSpec};
use crate::error::{Error, Result};
use crate::maxent::{entropy_of, equilibrium_state, MaxEntState, DEFAULT_TOL};
use crate::spectrum::SpectrumModel;

/// Largest truncation the direct search accepts.
pub const MAX_ORACLE_LEVELS: usize = 6;

const FEASIBILITY_EPS: f64 = 1e-13;

/// Entropy maximisation over a finite set of levels with a fixed mean.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedProblem {
    coefficients: Vec<f64>,
    target: f64,
}

impl TruncatedProblem {
    pub fn new(coefficients: Vec<f64>, target: f64) -> Result<Self> {
        if coefficients.len() < 3 {
            return Err(Error::Domain(format!("need at least 3 levels, got {}", coefficients.len())));
        }
        if coefficients.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Domain("coefficients must be strictly increasing".into()));
        }
        let (first, last) = (coefficients[0], coefficients[coefficients.len() - 1]);
        if !(target >= first && target <= last) {
            return Err(Error::Infeasible { lambda_sq: target, ground: first });
        }
        Ok(TruncatedProblem { coefficients, target })
    }

    /// The lowest `levels` coefficients of `model`.
    pub fn from_model(model: SpectrumModel, levels: usize, target: f64) -> Result<Self> {
        Self::new(model.coefficients(levels), target)
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn target(&self) -> f64 {
        self.target
    }

    pub fn levels(&self) -> usize {
        self.coefficients.len()
    }
}

/// Search state for the nested refinement. Levels 0 and 1 are eliminated
/// through the two constraints; the rest are free coordinates.
struct Search<'a> {
    c: &'a [f64],
    target: f64,
    grid_tol: f64,
}

impl Search<'_> {
    /// Remaining probability mass and mean after fixing `fixed` free coordinates.
    fn remainder(&self, fixed: &[f64]) -> (f64, f64) {
        let mass: f64 = fixed.iter().sum();
        let moment: f64 = fixed.iter().enumerate().map(|(i, &x)| self.c[i + 2] * x).sum();
        (1.0 - mass, self.target - moment)
    }

    /// Range of the next free coordinate over the feasible polytope.
    ///
    /// A linear function on `{p ≥ 0, Σp = A, Σc·p = B}` takes its extremes at
    /// vertices, and each vertex has at most two nonzero entries.
    fn range(&self, fixed: &[f64]) -> Option<(f64, f64)> {
        let (a, b) = self.remainder(fixed);
        let next = fixed.len() + 2;
        let rest: Vec<usize> = [0, 1].into_iter().chain(next..self.c.len()).collect();
        let a = if a.abs() < FEASIBILITY_EPS { 0.0 } else { a };
        if a < 0.0 {
            return None;
        }
        let mut range: Option<(f64, f64)> = None;
        let mut include = |x: f64| {
            range = Some(match range {
                None => (x, x),
                Some((lo, hi)) => (lo.min(x), hi.max(x)),
            });
        };
        for (i, &u) in rest.iter().enumerate() {
            if (self.c[u] * a - b).abs() <= FEASIBILITY_EPS * self.c[u].max(1.0) {
                include(if u == next { a } else { 0.0 });
            }
            for &w in &rest[i + 1..] {
                let pw = (b - self.c[u] * a) / (self.c[w] - self.c[u]);
                let pu = a - pw;
                if pu >= -FEASIBILITY_EPS && pw >= -FEASIBILITY_EPS {
                    include(if u == next {
                        pu.max(0.0)
                    } else if w == next {
                        pw.max(0.0)
                    } else {
                        0.0
                    });
                }
            }
        }
        range
    }

    /// Best entropy and distribution with the first `fixed.len()` free
    /// coordinates held.
    fn best(&self, fixed: &mut Vec<f64>) -> Option<(f64, Vec<f64>)> {
        if fixed.len() + 2 == self.c.len() {
            let (a, b) = self.remainder(fixed);
            let p1 = (b - self.c[0] * a) / (self.c[1] - self.c[0]);
            let p0 = a - p1;
            if p0 < -FEASIBILITY_EPS || p1 < -FEASIBILITY_EPS {
                return None;
            }
            let mut p = vec![p0.max(0.0), p1.max(0.0)];
            p.extend_from_slice(fixed);
            return Some((entropy_of(&p), p));
        }
        let (mut lo, mut hi) = self.range(fixed)?;
        let eval = |x: f64, fixed: &mut Vec<f64>| {
            fixed.push(x);
            let r = self.best(fixed);
            fixed.pop();
            r
        };
        if hi - lo <= self.grid_tol {
            return eval(0.5 * (lo + hi), fixed);
        }
        // Golden-section search; the partial maximum of a concave function
        // is concave, so each level is unimodal.
        let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
        let mut x1 = hi - inv_phi * (hi - lo);
        let mut x2 = lo + inv_phi * (hi - lo);
        let score = |r: &Option<(f64, Vec<f64>)>| r.as_ref().map_or(f64::NEG_INFINITY, |(s, _)| *s);
        let mut r1 = eval(x1, fixed);
        let mut r2 = eval(x2, fixed);
        while hi - lo > self.grid_tol {
            if score(&r1) >= score(&r2) {
                hi = x2;
                x2 = x1;
                r2 = r1;
                x1 = hi - inv_phi * (hi - lo);
                r1 = eval(x1, fixed);
            } else {
                lo = x1;
                x1 = x2;
                r1 = r2;
                x2 = lo + inv_phi * (hi - lo);
                r2 = eval(x2, fixed);
            }
        }
        let mid = eval(0.5 * (lo + hi), fixed);
        [r1, r2, mid].into_iter().flatten().max_by(|a, b| a.0.total_cmp(&b.0))
    }
}

/// Maximises `−Σ p ln p` over the feasible set by direct search.
///
/// The first two levels are eliminated through the normalisation and mean
/// constraints and the remaining `N − 2` coordinates are refined by nested
/// golden-section search down to `grid_tol`. For `N = 3` this is a scan of
/// the feasible line segment.
pub fn brute_force_maxent(problem: &TruncatedProblem, grid_tol: f64) -> Result<Vec<f64>> {
    if problem.levels() > MAX_ORACLE_LEVELS {
        return Err(Error::Domain(format!(
            "direct search is limited to {MAX_ORACLE_LEVELS} levels, got {}",
            problem.levels()
        )));
    }
    if !(grid_tol > 0.0) {
        return Err(Error::Domain(format!("grid tolerance must be positive, got {grid_tol}")));
    }
    let search = Search { c: &problem.coefficients, target: problem.target, grid_tol };
    search
        .best(&mut Vec::with_capacity(problem.levels()))
        .map(|(_, p)| p)
        .ok_or(Error::Infeasible { lambda_sq: problem.target, ground: problem.coefficients[0] })
}

/// Predicts every component from two of them:
/// `p_n = p_l·(p_k/p_l)^{(c_n − c_l)/(c_k − c_l)}`.
///
/// `k` and `l` index into `p` and `coefficients`.
pub fn stationary_family(p: &[f64], coefficients: &[f64], k: usize, l: usize) -> Vec<f64> {
    let (pk, pl) = (p[k], p[l]);
    let span = coefficients[k] - coefficients[l];
    coefficients
        .iter()
        .map(|&c| pl * (pk / pl).powf((c - coefficients[l]) / span))
        .collect()
}

fn check_step(model: SpectrumModel, lambda: f64, h: f64) -> Result<()> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Domain(format!("step must be positive, got {h}")));
    }
    let boundary = model.ground_coefficient().sqrt();
    if !(lambda - h > boundary) {
        return Err(Error::Domain(format!(
            "lambda - h = {} must stay above the ground boundary {boundary}",
            lambda - h
        )));
    }
    Ok(())
}

/// Centered `ΔS/ΔQ` with `ΔQ = 2·ln((λ+h)/(λ−h))` at unit bath energy,
/// where `S` comes from `solve` as `−Σ p ln p`.
pub fn finite_difference_temperature_with<F>(solve: F, model: SpectrumModel, lambda: f64, h: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<MaxEntState>,
{
    check_step(model, lambda, h)?;
    let s_plus = solve(lambda + h)?.von_neumann_entropy();
    let s_minus = solve(lambda - h)?.von_neumann_entropy();
    let dq = 2.0 * ((lambda + h) / (lambda - h)).ln();
    Ok((s_plus - s_minus) / dq)
}

/// Centered finite-difference estimate of `1/T = dS/dQ`.
pub fn finite_difference_temperature(model: SpectrumModel, lambda: f64, h: f64) -> Result<f64> {
    finite_difference_temperature_with(|l| equilibrium_state(model, l, DEFAULT_TOL), model, lambda, h)
}

/// Centered `[S(λ+h) − S(λ−h)]/(2h)`, with `S` from `solve` as `−Σ p ln p`.
pub fn finite_difference_slope_with<F>(solve: F, model: SpectrumModel, lambda: f64, h: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<MaxEntState>,
{
    check_step(model, lambda, h)?;
    let s_plus = solve(lambda + h)?.von_neumann_entropy();
    let s_minus = solve(lambda - h)?.von_neumann_entropy();
    Ok((s_plus - s_minus) / (2.0 * h))
}

/// Centered finite-difference estimate of `dS/dλ`.
pub fn finite_difference_slope(model: SpectrumModel, lambda: f64, h: f64) -> Result<f64> {
    finite_difference_slope_with(|l| equilibrium_state(model, l, DEFAULT_TOL), model, lambda, h)
}

/// Adaptive Simpson quadrature with Richardson correction.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn recurse<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    recurse(f, a, b, fa, fm, fb, whole, tol, 48)
}

/// `∮ P dV` around the four strokes by quadrature of the pressure.
pub fn closed_work_quadrature(spec: &CycleSpec, tol: f64) -> Result<f64> {
    let (v1, v2, v3, v4) = (spec.v1, spec.v2, spec.v3, spec.v4());
    let (e_h, e_c) = (spec.e_h, spec.e_c());
    // Pressures are validated once at the stroke endpoints; inside the
    // interval every argument is positive.
    pressure_isoenergetic(e_h, v1)?;
    pressure_isoenergetic(e_c, v3)?;
    pressure_adiabatic(e_h, v2, v3)?;
    pressure_adiabatic(e_c, v4, v1)?;
    let hot = |v: f64| pressure_isoenergetic(e_h, v).unwrap_or(f64::NAN);
    let cold = |v: f64| pressure_isoenergetic(e_c, v).unwrap_or(f64::NAN);
    let expand = |v: f64| pressure_adiabatic(e_h, v2, v).unwrap_or(f64::NAN);
    let compress = |v: f64| pressure_adiabatic(e_c, v4, v).unwrap_or(f64::NAN);
    Ok(adaptive_simpson(&hot, v1, v2, tol)
        + adaptive_simpson(&expand, v2, v3, tol)
        + adaptive_simpson(&cold, v3, v4, tol)
        + adaptive_simpson(&compress, v4, v1, tol))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQ3: [f64; 3] = [1.0, 4.0, 9.0];

    #[test]
    fn boundary_targets_give_pure_states() {
        let p = brute_force_maxent(&TruncatedProblem::new(SQ3.to_vec(), 1.0).unwrap(), 1e-10).unwrap();
        assert!(p[0] > 1.0 - 1e-12 && p[1].abs() < 1e-12 && p[2].abs() < 1e-12);
        let p = brute_force_maxent(&TruncatedProblem::new(SQ3.to_vec(), 9.0).unwrap(), 1e-10).unwrap();
        assert!(p[2] > 1.0 - 1e-12 && p[0].abs() < 1e-12 && p[1].abs() < 1e-12);
    }

    #[test]
    fn line_scan_satisfies_stationarity() {
        let p = brute_force_maxent(&TruncatedProblem::new(SQ3.to_vec(), 4.0).unwrap(), 1e-10).unwrap();
        let predicted = stationary_family(&p, &SQ3, 1, 0);
        for (a, b) in p.iter().zip(&predicted) {
            assert!((a - b).abs() < 1e-6, "{p:?} vs {predicted:?}");
        }
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((p.iter().zip(&SQ3).map(|(p, c)| p * c).sum::<f64>() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn four_levels_beat_random_feasible_points() {
        let problem = TruncatedProblem::from_model(SpectrumModel::SquareWell, 4, 5.0).unwrap();
        let best = brute_force_maxent(&problem, 1e-10).unwrap();
        let s_best = entropy_of(&best);
        let c = problem.coefficients();
        for t in [-1e-3, 1e-3] {
            // (c2-c1, c0-c2, c1-c0, 0) lies in the null space of both constraints.
            let d = [c[2] - c[1], c[0] - c[2], c[1] - c[0], 0.0];
            let q: Vec<f64> = best.iter().zip(d).map(|(p, d)| p + t * d).collect();
            if q.iter().all(|&x| x >= 0.0) {
                assert!(entropy_of(&q) < s_best);
            }
        }
    }

    #[test]
    fn problem_validation() {
        assert!(TruncatedProblem::new(vec![1.0, 4.0], 2.0).is_err());
        assert!(TruncatedProblem::new(vec![1.0, 4.0, 9.0], 0.5).is_err());
        assert!(TruncatedProblem::new(vec![1.0, 4.0, 9.0], 10.0).is_err());
        assert!(TruncatedProblem::new(vec![1.0, 9.0, 4.0], 3.0).is_err());
        let big = TruncatedProblem::from_model(SpectrumModel::SquareWell, 7, 5.0).unwrap();
        assert!(brute_force_maxent(&big, 1e-8).is_err());
    }

    #[test]
    fn step_must_stay_above_boundary() {
        assert!(finite_difference_temperature(SpectrumModel::SquareWell, 1.0, 1e-4).is_err());
        assert!(finite_difference_temperature(SpectrumModel::SquareWell, 2.0, 0.0).is_err());
        assert!(finite_difference_slope(SpectrumModel::Harmonic, 0.7, 1e-4).is_err());
    }

    #[test]
    fn simpson_integrates_reciprocal() {
        let f = |x: f64| 1.0 / x;
        let v = adaptive_simpson(&f, 1.0, 10.0, 1e-13);
        assert!((v - 10f64.ln()).abs() < 1e-11);
        let back = adaptive_simpson(&f, 10.0, 1.0, 1e-13);
        assert!((back + 10f64.ln()).abs() < 1e-11);
    }
}
