//! Partition-style sums `Z(α) = Σ α^{c(n)}` and `M(α) = Σ c(n)·α^{c(n)}`.
//!
//! For the square well `Z` is a partial theta series and is summed
//! directly in increasing `n`. The gaps `c(n+1) − c(n)` grow, so the
//! geometric bound `term·r/(1 − r)` with `r = α^{c(n+1)−c(n)}` is a
//! rigorous bound on everything not yet summed. The harmonic sums are
//! geometric and use their closed forms.
//!
//! The solver works with `β = −ln α` rather than `α` itself: near `α = 1`
//! the spacing of representable `α` values is far too coarse to pin the
//! mean energy to `1e−10`, while `β` keeps full relative precision.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectrum::SpectrumModel;

pub const DEFAULT_REL_TOL: f64 = 1e-12;

/// Hard cap on summed terms; beyond this α belongs to the asymptotic regime.
pub const MAX_TERMS: usize = 1_000_000;

/// Relative tail tolerance used internally by the equilibrium solver.
const FULL_PRECISION: f64 = 1e-17;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesResult {
    pub value: f64,
    /// Number of summed terms; zero when a closed form was used.
    pub terms_used: usize,
    /// Upper bound on the neglected remainder.
    pub tail_bound: f64,
}

/// Neumaier compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    #[inline]
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub(crate) fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Raw output of one summation pass.
#[derive(Debug, Clone, Copy)]
struct Pass {
    z: f64,
    m: f64,
    z_tail: f64,
    m_tail: f64,
    terms: usize,
}

/// Sums `Σ w_n` and `Σ c(n)·w_n` with `w_n = exp(−β·(c(n) − shift))`.
///
/// Stops once both tail bounds fall below `rel_tol` times the partial sums.
fn sum_square_well(beta: f64, shift: f64, rel_tol: f64) -> std::result::Result<Pass, Pass> {
    let model = SpectrumModel::SquareWell;
    let mut z = CompensatedSum::default();
    let mut m = CompensatedSum::default();
    let mut n = model.n_min();
    let mut pass = Pass { z: 0.0, m: 0.0, z_tail: f64::INFINITY, m_tail: f64::INFINITY, terms: 0 };
    while pass.terms < MAX_TERMS {
        let c = model.coefficient(n);
        let term = (-beta * (c - shift)).exp();
        z.add(term);
        m.add(c * term);
        pass.terms += 1;

        let gap = model.coefficient(n + 1) - c;
        let ratio = (-beta * gap).exp();
        let one_minus = -(-beta * gap).exp_m1();
        pass.z_tail = term * ratio / one_minus;
        // c(m+1)/c(m)·α^{gap} is non-increasing in m, so once below one it
        // bounds every later ratio of the moment terms.
        let m_ratio = model.coefficient(n + 1) / c * ratio;
        pass.m_tail = if term == 0.0 {
            0.0
        } else if m_ratio < 1.0 {
            c * term * m_ratio / (1.0 - m_ratio)
        } else {
            f64::INFINITY
        };
        pass.z = z.value();
        pass.m = m.value();
        if pass.z_tail <= rel_tol * pass.z && pass.m_tail <= rel_tol * pass.m {
            return Ok(pass);
        }
        n += 1;
    }
    Err(pass)
}

fn check_alpha(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    Ok(-alpha.ln())
}

fn check_rel_tol(rel_tol: f64) -> Result<()> {
    if !(rel_tol > 0.0 && rel_tol.is_finite()) {
        return Err(Error::Domain(format!("rel_tol must be positive, got {rel_tol}")));
    }
    Ok(())
}

fn harmonic_partition(beta: f64) -> f64 {
    (-0.5 * beta).exp() / -(-beta).exp_m1()
}

fn harmonic_mean(beta: f64) -> f64 {
    0.5 + 1.0 / beta.exp_m1()
}

/// `Z(α) = Σ_{n ≥ n_min} α^{c(n)}` to relative accuracy `rel_tol`.
pub fn partition_sum(model: SpectrumModel, alpha: f64, rel_tol: f64) -> Result<SeriesResult> {
    let beta = check_alpha(alpha)?;
    check_rel_tol(rel_tol)?;
    match model {
        SpectrumModel::Harmonic => Ok(SeriesResult { value: harmonic_partition(beta), terms_used: 0, tail_bound: 0.0 }),
        SpectrumModel::SquareWell => sum_square_well(beta, 0.0, rel_tol)
            .map(|p| SeriesResult { value: p.z, terms_used: p.terms, tail_bound: p.z_tail })
            .map_err(|p| Error::Precision {
                cap: MAX_TERMS,
                partial: SeriesResult { value: p.z, terms_used: p.terms, tail_bound: p.z_tail },
            }),
    }
}

/// `M(α) = Σ_{n ≥ n_min} c(n)·α^{c(n)}` to relative accuracy `rel_tol`.
pub fn moment_sum(model: SpectrumModel, alpha: f64, rel_tol: f64) -> Result<SeriesResult> {
    let beta = check_alpha(alpha)?;
    check_rel_tol(rel_tol)?;
    match model {
        SpectrumModel::Harmonic => Ok(SeriesResult {
            value: harmonic_partition(beta) * harmonic_mean(beta),
            terms_used: 0,
            tail_bound: 0.0,
        }),
        SpectrumModel::SquareWell => sum_square_well(beta, 0.0, rel_tol)
            .map(|p| SeriesResult { value: p.m, terms_used: p.terms, tail_bound: p.m_tail })
            .map_err(|p| Error::Precision {
                cap: MAX_TERMS,
                partial: SeriesResult { value: p.m, terms_used: p.terms, tail_bound: p.m_tail },
            }),
    }
}

/// One-term asymptotic of `Σ_{n≥1} (1−ε)^{n²}` as `ε → 0⁺`: `√π/(2√ε) − 1/2`.
pub fn theta_asymptotic(eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!("epsilon must lie in (0, 1), got {eps}")));
    }
    Ok(std::f64::consts::PI.sqrt() / (2.0 * eps.sqrt()) - 0.5)
}

/// Log-partition function and mean coefficient at `β = −ln α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Moments {
    /// `ln Z(α)`.
    pub log_z: f64,
    /// `M(α)/Z(α)`, the mean of `c(n)` under `p_n ∝ α^{c(n)}`.
    pub mean: f64,
}

/// Evaluates [`Moments`] to full double precision.
pub(crate) fn moments(model: SpectrumModel, beta: f64) -> Result<Moments> {
    match model {
        SpectrumModel::Harmonic => Ok(Moments {
            log_z: -0.5 * beta - (-(-beta).exp_m1()).ln(),
            mean: harmonic_mean(beta),
        }),
        SpectrumModel::SquareWell => {
            let shift = model.ground_coefficient();
            let pass = sum_square_well(beta, shift, FULL_PRECISION).map_err(|p| Error::Precision {
                cap: MAX_TERMS,
                partial: SeriesResult { value: p.z, terms_used: p.terms, tail_bound: p.z_tail },
            })?;
            Ok(Moments { log_z: -beta * shift + pass.z.ln(), mean: pass.m / pass.z })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SW: SpectrumModel = SpectrumModel::SquareWell;
    const HO: SpectrumModel = SpectrumModel::Harmonic;

    /// Plain summation of every term down to underflow.
    fn brute_partition(alpha: f64) -> f64 {
        let ln_a = alpha.ln();
        let mut total = 0.0;
        let mut n = 1.0f64;
        loop {
            let t = (n * n * ln_a).exp();
            if t == 0.0 {
                break;
            }
            total += t;
            n += 1.0;
        }
        total
    }

    #[test]
    fn small_alpha_is_dominated_by_ground_term() {
        for alpha in [1e-3, 1e-8, 1e-30] {
            let z = partition_sum(SW, alpha, DEFAULT_REL_TOL).unwrap();
            assert!((z.value / alpha - 1.0).abs() < (4.0 * alpha.powi(3)).max(1e-13));
            let m = moment_sum(SW, alpha, DEFAULT_REL_TOL).unwrap();
            assert!((m.value / z.value - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn harmonic_closed_forms() {
        let z = partition_sum(HO, 0.5, DEFAULT_REL_TOL).unwrap();
        assert!((z.value - 0.5f64.sqrt() / 0.5).abs() < 1e-15);
        assert_eq!(z.terms_used, 0);
        let m = moment_sum(HO, 0.5, DEFAULT_REL_TOL).unwrap();
        assert!((m.value / z.value - 1.5).abs() < 1e-15);
    }

    #[test]
    fn harmonic_closed_form_matches_direct_sum() {
        for alpha in [0.1f64, 0.5, 0.9, 0.99] {
            let mut z = 0.0;
            let mut m = 0.0;
            for n in 0..20_000 {
                let c = HO.coefficient(n);
                let t = alpha.powf(c);
                z += t;
                m += c * t;
            }
            let zc = partition_sum(HO, alpha, DEFAULT_REL_TOL).unwrap().value;
            let mc = moment_sum(HO, alpha, DEFAULT_REL_TOL).unwrap().value;
            assert!((zc - z).abs() / z < 1e-12, "alpha {alpha}");
            assert!((mc - m).abs() / m < 1e-12, "alpha {alpha}");
        }
    }

    #[test]
    fn matches_brute_force_with_bounded_tail() {
        for alpha in [0.2, 0.7, 0.95, 0.999] {
            let exact = brute_partition(alpha);
            let r = partition_sum(SW, alpha, DEFAULT_REL_TOL).unwrap();
            assert!(r.tail_bound >= 0.0 && r.tail_bound <= DEFAULT_REL_TOL * r.value);
            assert!((r.value - exact).abs() <= r.tail_bound + 1e-14 * exact, "alpha {alpha}");
        }
    }

    #[test]
    fn asymptotic_formula_values() {
        assert!((theta_asymptotic(1e-4).unwrap() - 88.122_692_545_275_8).abs() < 1e-9);
        assert!((theta_asymptotic(0.25).unwrap() - (std::f64::consts::PI.sqrt() - 0.5)).abs() < 1e-15);
        assert!(theta_asymptotic(0.0).is_err());
        assert!(theta_asymptotic(1.0).is_err());
    }

    #[test]
    fn near_one_agrees_with_asymptotic() {
        let eps = 1e-4f64;
        let direct = brute_partition(1.0 - eps);
        let r = partition_sum(SW, 1.0 - eps, 1e-14).unwrap();
        assert!((r.value - direct).abs() / direct < 1e-12);
        let asym = theta_asymptotic(eps).unwrap();
        assert!((r.value - asym).abs() / r.value < 1e-4);

        let mean = moment_sum(SW, 1.0 - eps, 1e-14).unwrap().value / r.value;
        assert!((mean / (0.5 / eps) - 1.0).abs() < 0.01);
    }

    #[test]
    fn rejects_out_of_domain_alpha() {
        for alpha in [0.0, 1.0, -0.5, 1.5, f64::NAN] {
            assert!(matches!(partition_sum(SW, alpha, 1e-12), Err(Error::Domain(_))));
            assert!(matches!(moment_sum(HO, alpha, 1e-12), Err(Error::Domain(_))));
        }
        assert!(partition_sum(SW, 0.5, 0.0).is_err());
    }

    #[test]
    fn term_cap_reports_partial_result() {
        // Needs n ~ sqrt(40/1e-14) ≈ 6e7 terms.
        let alpha = (-1e-14f64).exp();
        match partition_sum(SW, alpha, 1e-12) {
            Err(Error::Precision { cap, partial }) => {
                assert_eq!(cap, MAX_TERMS);
                assert_eq!(partial.terms_used, MAX_TERMS);
                assert!(partial.value > 9.9e5);
            }
            other => panic!("expected precision error, got {other:?}"),
        }
    }

    #[test]
    fn full_precision_moments_agree_with_public_sums() {
        for alpha in [0.3f64, 0.9, 0.999] {
            let m = moments(SW, -alpha.ln()).unwrap();
            let z = partition_sum(SW, alpha, 1e-15).unwrap().value;
            let mm = moment_sum(SW, alpha, 1e-15).unwrap().value;
            assert!((m.log_z - z.ln()).abs() < 1e-13);
            assert!((m.mean - mm / z).abs() / m.mean < 1e-13);
        }
    }

    #[test]
    fn compensated_sum_recovers_cancellation() {
        let mut s = CompensatedSum::default();
        for x in [1.0, 1e100, 1.0, -1e100] {
            s.add(x);
        }
        assert_eq!(s.value(), 2.0);
    }
}
