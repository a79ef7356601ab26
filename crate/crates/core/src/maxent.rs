//! Maximum von Neumann entropy states under an energy-bath constraint.
//!
//! With the spectrum written as `E_n = c(n)/V²`, holding the mean energy
//! at `E` while the width is `V` fixes `Σ c(n)·p_n = λ²` with the single
//! effective width `λ = V·√E`. The entropy maximiser is the exponential
//! family `p_n = α^{c(n)}/Z(α)`, and `α` is the root of the mean
//! constraint `M(α)/Z(α) = λ²`. The mean is strictly increasing in `α`,
//! so a bracketed bisection always converges.
//!
//! Everything numerical is carried in `β = −ln α`; `α` itself is only
//! reported.

use serde::Serialize;

use crate::error::{ensure_positive, Error, Result};
use crate::series::{moments, CompensatedSum, MAX_TERMS};
use crate::spectrum::{SpectrumModel, GROUND_SLACK};

/// Default absolute tolerance on `|⟨c(n)⟩ − λ²|`.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Cap on bisection steps after the bracket has been found.
pub const MAX_BISECTIONS: usize = 200;

/// Probabilities below this are not stored.
pub const PROBABILITY_FLOOR: f64 = 1e-300;

/// Cap on the number of stored levels.
pub const MAX_STORED_LEVELS: usize = 4 * MAX_TERMS;

const MAX_BRACKET_STEPS: usize = 2200;

/// Equilibrium state of the system at effective width `lambda_eff`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaxEntState {
    pub model: SpectrumModel,
    pub lambda_eff: f64,
    /// Base of the distribution; `0` for the pure ground state.
    pub alpha: f64,
    /// `ln α`, kept separately because `α` loses precision near one.
    pub ln_alpha: f64,
    /// `p_n` for `n = n_min, n_min + 1, …`, truncated at [`PROBABILITY_FLOOR`].
    pub probabilities: Vec<f64>,
    /// `Z(α)`.
    pub partition: f64,
    /// `ln Z(α)`.
    pub log_partition: f64,
    /// Entropy in nats, `ln Z − λ²·ln α`.
    pub entropy: f64,
    /// Bath temperature `−1/(λ²·ln α)`, in units of the bath energy.
    pub temperature: f64,
}

impl MaxEntState {
    /// Number of stored levels.
    pub fn levels(&self) -> usize {
        self.probabilities.len()
    }

    /// Whether this is the `α = 0` pure ground state.
    pub fn is_ground(&self) -> bool {
        self.alpha == 0.0
    }

    /// Level index of the `i`-th stored probability.
    pub fn level_index(&self, i: usize) -> usize {
        self.model.n_min() + i
    }

    /// `p_n` by level index; zero outside the stored range.
    pub fn probability(&self, n: usize) -> f64 {
        n.checked_sub(self.model.n_min())
            .and_then(|i| self.probabilities.get(i).copied())
            .unwrap_or(0.0)
    }

    pub fn normalization_residual(&self) -> f64 {
        let mut s = CompensatedSum::default();
        self.probabilities.iter().for_each(|&p| s.add(p));
        (s.value() - 1.0).abs()
    }

    /// `|Σ c(n)·p_n − λ²|`.
    pub fn constraint_residual(&self) -> f64 {
        (self.mean_coefficient() - self.lambda_eff * self.lambda_eff).abs()
    }

    /// `Σ c(n)·p_n` over the stored levels.
    pub fn mean_coefficient(&self) -> f64 {
        let mut s = CompensatedSum::default();
        for (i, &p) in self.probabilities.iter().enumerate() {
            s.add(self.model.coefficient(self.level_index(i)) * p);
        }
        s.value()
    }

    /// `−Σ p_n ln p_n` computed from the stored distribution.
    pub fn von_neumann_entropy(&self) -> f64 {
        entropy_of(&self.probabilities)
    }

    /// Entropy from a single level `l`: `(c(l) − λ²)·ln α − ln p_l`.
    ///
    /// Identical for every stored `l`. Returns `None` for the ground state
    /// or for a level that is not stored.
    pub fn entropy_via_level(&self, l: usize) -> Option<f64> {
        let p = self.probability(l);
        if self.is_ground() || p == 0.0 {
            return None;
        }
        let lambda_sq = self.lambda_eff * self.lambda_eff;
        Some((self.model.coefficient(l) - lambda_sq) * self.ln_alpha - p.ln())
    }
}

/// `−Σ p ln p`, with `0·ln 0 = 0`.
pub fn entropy_of(p: &[f64]) -> f64 {
    let mut s = CompensatedSum::default();
    for &x in p {
        if x > 0.0 {
            s.add(-x * x.ln());
        }
    }
    s.value()
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("tolerance must be positive, got {tol}")))
    }
}

/// Bisection on a function that is decreasing in its argument.
///
/// `lo` must satisfy `f(lo) ≥ 0` and `hi` must satisfy `f(hi) ≤ 0`. Runs
/// until the bracket stops shrinking or `MAX_BISECTIONS` steps, and returns
/// the visited point with the smallest `|f|` along with that value.
fn bisect_decreasing<F>(mut f: F, mut lo: f64, mut hi: f64, f_lo: f64, f_hi: f64) -> Result<(f64, f64, usize)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut best, mut best_f) = if f_lo.abs() <= f_hi.abs() { (lo, f_lo) } else { (hi, f_hi) };
    let mut iterations = 0;
    while iterations < MAX_BISECTIONS && best_f != 0.0 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        iterations += 1;
        let fm = f(mid)?;
        if fm.abs() < best_f.abs() {
            best = mid;
            best_f = fm;
        }
        if fm > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((best, best_f, iterations))
}

/// Solves `⟨c(n)⟩ = lambda_eff²` for `β = −ln α`; `∞` on the ground level.
pub fn solve_beta(model: SpectrumModel, lambda_eff: f64, tol: f64) -> Result<f64> {
    ensure_positive("lambda_eff", lambda_eff)?;
    check_tol(tol)?;
    let target = lambda_eff * lambda_eff;
    if model.classify_constraint(target)? {
        return Ok(f64::INFINITY);
    }
    let f = |beta: f64| moments(model, beta).map(|m| m.mean - target);

    let (mut lo, mut hi) = (1.0, 1.0);
    let mut f_hi = f(hi)?;
    let mut f_lo = f_hi;
    let mut steps = 0;
    if f_hi > 0.0 {
        // Mean too large: move toward α → 0.
        while f_hi > 0.0 {
            lo = hi;
            f_lo = f_hi;
            hi *= 2.0;
            f_hi = f(hi)?;
            steps += 1;
            if steps > MAX_BRACKET_STEPS {
                break;
            }
        }
    } else {
        // Mean too small: grow α geometrically toward one.
        while f_lo < 0.0 {
            hi = lo;
            f_hi = f_lo;
            lo *= 0.5;
            f_lo = f(lo)?;
            steps += 1;
            if steps > MAX_BRACKET_STEPS {
                break;
            }
        }
    }
    let (beta, residual, iterations) = bisect_decreasing(f, lo, hi, f_lo, f_hi)?;
    if residual.abs() > tol || !residual.is_finite() {
        return Err(Error::NoConvergence { iterations, alpha: (-beta).exp(), residual: residual.abs(), tol });
    }
    Ok(beta)
}

/// Base `α` of the maximum-entropy state at `lambda_eff`.
///
/// Returns exactly `0` when `lambda_eff² = c(n_min)`.
pub fn solve_alpha(model: SpectrumModel, lambda_eff: f64, tol: f64) -> Result<f64> {
    solve_beta(model, lambda_eff, tol).map(|beta| (-beta).exp())
}

/// Closed-form harmonic solution `α = (m − ½)/(m + ½)` for mean `m = E·V²`.
pub fn harmonic_alpha_closed_form(mean: f64) -> Result<f64> {
    if !(mean >= 0.5 && mean.is_finite()) {
        return Err(Error::Infeasible { lambda_sq: mean, ground: 0.5 });
    }
    Ok((mean - 0.5) / (mean + 0.5))
}

/// Full maximum-entropy state at `lambda_eff`.
pub fn equilibrium_state(model: SpectrumModel, lambda_eff: f64, tol: f64) -> Result<MaxEntState> {
    let beta = solve_beta(model, lambda_eff, tol)?;
    state_from_beta(model, lambda_eff, beta)
}

pub(crate) fn state_from_beta(model: SpectrumModel, lambda_eff: f64, beta: f64) -> Result<MaxEntState> {
    if beta.is_infinite() {
        return Ok(MaxEntState {
            model,
            lambda_eff,
            alpha: 0.0,
            ln_alpha: f64::NEG_INFINITY,
            probabilities: vec![1.0],
            partition: 0.0,
            log_partition: f64::NEG_INFINITY,
            entropy: 0.0,
            temperature: 0.0,
        });
    }
    let c0 = model.ground_coefficient();
    let mut weights = Vec::new();
    let mut z = CompensatedSum::default();
    for n in model.n_min().. {
        let w = (-beta * (model.coefficient(n) - c0)).exp();
        if w < PROBABILITY_FLOOR {
            break;
        }
        if weights.len() == MAX_STORED_LEVELS {
            return Err(Error::Precision {
                cap: MAX_STORED_LEVELS,
                partial: crate::series::SeriesResult { value: z.value(), terms_used: weights.len(), tail_bound: f64::INFINITY },
            });
        }
        z.add(w);
        weights.push(w);
    }
    let z_shifted = z.value();
    let mut probabilities: Vec<f64> = weights.into_iter().map(|w| w / z_shifted).collect();
    while probabilities.len() > 1 && probabilities.last().is_some_and(|&p| p < PROBABILITY_FLOOR) {
        probabilities.pop();
    }
    let lambda_sq = lambda_eff * lambda_eff;
    let log_partition = -beta * c0 + z_shifted.ln();
    let entropy = z_shifted.ln() + beta * (lambda_sq - c0);
    let mut state = MaxEntState {
        model,
        lambda_eff,
        alpha: (-beta).exp(),
        ln_alpha: -beta,
        probabilities,
        partition: log_partition.exp(),
        log_partition,
        entropy,
        temperature: 0.0,
    };
    state.temperature = bath_temperature(&state);
    Ok(state)
}

/// `T = −1/(λ²·ln α)`, with the `α → 0` limit `T = 0`.
///
/// The value is in units of the bath energy: the temperature of a system
/// held at energy `E` is `E·T`.
pub fn bath_temperature(state: &MaxEntState) -> f64 {
    if state.is_ground() {
        return 0.0;
    }
    -1.0 / (state.lambda_eff * state.lambda_eff * state.ln_alpha)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropySlope {
    /// `dS/dλ = −2λ·ln α`; `f64::MAX` on the ground level.
    pub value: f64,
    /// Set when the state is the pure ground state, where the slope diverges.
    pub boundary: bool,
}

/// `dS/dλ` along an isoenergetic stroke.
pub fn entropy_slope(model: SpectrumModel, lambda_eff: f64, tol: f64) -> Result<EntropySlope> {
    let beta = solve_beta(model, lambda_eff, tol)?;
    Ok(slope_from_beta(lambda_eff, beta))
}

pub(crate) fn slope_from_beta(lambda_eff: f64, beta: f64) -> EntropySlope {
    if beta.is_infinite() {
        EntropySlope { value: f64::MAX, boundary: true }
    } else {
        EntropySlope { value: 2.0 * lambda_eff * beta, boundary: false }
    }
}

/// Maximum-entropy distribution over a finite, strictly increasing set of
/// coefficients with `Σ c_i·p_i = target`.
///
/// Any target between the smallest and largest coefficient is reachable;
/// targets above the uniform mean need `α > 1`, so the search runs over all
/// real `β`.
pub fn solve_truncated(coefficients: &[f64], target: f64, tol: f64) -> Result<Vec<f64>> {
    check_tol(tol)?;
    if coefficients.len() < 2 || coefficients.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain("need at least two strictly increasing coefficients".into()));
    }
    let first = coefficients[0];
    let last = coefficients[coefficients.len() - 1];
    let mut unit = vec![0.0; coefficients.len()];
    if !(target >= first * (1.0 - GROUND_SLACK) && target <= last * (1.0 + GROUND_SLACK)) {
        return Err(Error::Infeasible { lambda_sq: target, ground: first });
    }
    if target <= first {
        unit[0] = 1.0;
        return Ok(unit);
    }
    if target >= last {
        *unit.last_mut().unwrap() = 1.0;
        return Ok(unit);
    }

    let weights = |beta: f64| -> Vec<f64> {
        let shift = if beta >= 0.0 { first } else { last };
        coefficients.iter().map(|&c| (-beta * (c - shift)).exp()).collect()
    };
    let f = |beta: f64| -> Result<f64> {
        let w = weights(beta);
        let (mut z, mut m) = (CompensatedSum::default(), CompensatedSum::default());
        for (&wi, &c) in w.iter().zip(coefficients) {
            z.add(wi);
            m.add(c * wi);
        }
        Ok(m.value() / z.value() - target)
    };

    let (mut lo, mut hi) = (-1.0, 1.0);
    let mut f_lo = f(lo)?;
    let mut f_hi = f(hi)?;
    let mut steps = 0;
    while f_lo < 0.0 && steps < MAX_BRACKET_STEPS {
        lo *= 2.0;
        f_lo = f(lo)?;
        steps += 1;
    }
    while f_hi > 0.0 && steps < 2 * MAX_BRACKET_STEPS {
        hi *= 2.0;
        f_hi = f(hi)?;
        steps += 1;
    }
    let (beta, residual, iterations) = bisect_decreasing(f, lo, hi, f_lo, f_hi)?;
    if residual.abs() > tol {
        return Err(Error::NoConvergence { iterations, alpha: (-beta).exp(), residual: residual.abs(), tol });
    }
    let w = weights(beta);
    let mut z = CompensatedSum::default();
    w.iter().for_each(|&x| z.add(x));
    let z = z.value();
    Ok(w.into_iter().map(|x| x / z).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    const SW: SpectrumModel = SpectrumModel::SquareWell;
    const HO: SpectrumModel = SpectrumModel::Harmonic;

    /// Mean of `n²` under `α^{n²}` by plain summation, for the oracle root.
    fn mean_sq(alpha: f64) -> f64 {
        let (mut z, mut m) = (0.0, 0.0);
        for n in 1..10_000u64 {
            let c = (n * n) as f64;
            let t = alpha.powf(c);
            z += t;
            m += c * t;
        }
        m / z
    }

    #[test]
    fn ground_boundary_is_pure_state() {
        let s = equilibrium_state(SW, 1.0, DEFAULT_TOL).unwrap();
        assert_eq!(s.alpha, 0.0);
        assert_eq!(s.probabilities, vec![1.0]);
        assert_eq!(s.entropy, 0.0);
        assert_eq!(s.temperature, 0.0);
        assert_eq!(solve_alpha(SW, 1.0, DEFAULT_TOL).unwrap(), 0.0);
        let h = equilibrium_state(HO, 0.5f64.sqrt(), DEFAULT_TOL).unwrap();
        assert!(h.is_ground());
        assert_eq!(h.probability(0), 1.0);
    }

    #[test]
    fn infeasible_below_ground() {
        assert!(matches!(solve_alpha(SW, 0.5, DEFAULT_TOL), Err(Error::Infeasible { .. })));
        assert!(matches!(equilibrium_state(HO, 0.7, DEFAULT_TOL), Err(Error::Infeasible { .. })));
        assert!(matches!(solve_alpha(SW, -2.0, DEFAULT_TOL), Err(Error::Domain(_))));
        assert!(matches!(solve_alpha(SW, 2.0, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn lambda_two_root_matches_plain_bisection() {
        // Oracle: bisection in α directly on the brute-force mean.
        let (mut lo, mut hi) = (0.0f64, 0.999f64);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if mean_sq(mid) < 4.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let oracle = 0.5 * (lo + hi);
        let alpha = solve_alpha(SW, 2.0, DEFAULT_TOL).unwrap();
        assert!((alpha - oracle).abs() < 1e-12, "{alpha} vs {oracle}");
        assert!((mean_sq(alpha) - 4.0).abs() < 1e-10);
        assert!((alpha - 0.850_715_547_035_592_9).abs() < 1e-13, "{alpha:.17}");
    }

    #[test]
    fn harmonic_closed_form_agrees_with_root() {
        let alpha = solve_alpha(HO, 1.5f64.sqrt(), DEFAULT_TOL).unwrap();
        assert!((alpha - 0.5).abs() < 1e-10);
        assert_eq!(harmonic_alpha_closed_form(1.5).unwrap(), 0.5);
        assert!(harmonic_alpha_closed_form(0.2).is_err());
    }

    #[test]
    fn state_invariants_on_grid() {
        for lambda in [1.1, 1.5, 2.0, 5.0, 10.0, 20.0, 50.0] {
            let s = equilibrium_state(SW, lambda, DEFAULT_TOL).unwrap();
            assert!(s.normalization_residual() < 1e-12, "λ={lambda}");
            assert!(s.constraint_residual() < 1e-10, "λ={lambda}: {}", s.constraint_residual());
            assert!(s.probabilities.windows(2).all(|w| w[1] < w[0]));
            let restated = s.log_partition - lambda * lambda * s.ln_alpha;
            assert!((s.entropy - restated).abs() < 1e-12);
            assert!((s.entropy - s.von_neumann_entropy()).abs() < 1e-10);
            for l in 1..=3 {
                assert!((s.entropy_via_level(l).unwrap() - s.entropy).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn entropy_and_temperature_increase_with_width() {
        let grid = [1.05, 1.1, 1.5, 2.0, 3.0, 5.0, 10.0, 20.0, 50.0];
        let states: Vec<_> = grid.iter().map(|&l| equilibrium_state(SW, l, DEFAULT_TOL).unwrap()).collect();
        for w in states.windows(2) {
            assert!(w[1].entropy > w[0].entropy);
            assert!(w[1].temperature > w[0].temperature);
        }
    }

    #[test]
    fn high_temperature_limit() {
        let s = equilibrium_state(SW, 200.0, DEFAULT_TOL).unwrap();
        assert!((s.temperature - 2.0).abs() < 0.01, "T = {}", s.temperature);
        let t = bath_temperature(&MaxEntState { lambda_eff: 1.0, ln_alpha: -1.0, alpha: (-1.0f64).exp(), ..s });
        assert!((t - 1.0).abs() < 1e-15);
    }

    #[test]
    fn slope_boundary_flag() {
        let s = entropy_slope(SW, 1.0, DEFAULT_TOL).unwrap();
        assert!(s.boundary);
        assert_eq!(s.value, f64::MAX);
        let s = entropy_slope(SW, 1.0 + 1e-6, DEFAULT_TOL).unwrap();
        assert!(!s.boundary && s.value > 5.0);
        let s = entropy_slope(SW, 50.0, DEFAULT_TOL).unwrap();
        assert!((s.value * 50.0 - 1.0).abs() < 0.01);
    }

    #[test]
    fn truncated_solver_edges() {
        let c = [1.0, 4.0, 9.0];
        assert_eq!(solve_truncated(&c, 1.0, 1e-12).unwrap(), vec![1.0, 0.0, 0.0]);
        assert_eq!(solve_truncated(&c, 9.0, 1e-12).unwrap(), vec![0.0, 0.0, 1.0]);
        let uniform = solve_truncated(&c, 14.0 / 3.0, 1e-12).unwrap();
        assert!(uniform.iter().all(|&p| (p - 1.0 / 3.0).abs() < 1e-10));
        let high = solve_truncated(&c, 8.0, 1e-12).unwrap();
        assert!(high[2] > high[1] && high[1] > high[0]);
        assert!(matches!(solve_truncated(&c, 10.0, 1e-12), Err(Error::Infeasible { .. })));
        assert!(solve_truncated(&[1.0, 1.0, 2.0], 1.5, 1e-12).is_err());
    }
}
