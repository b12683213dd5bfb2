//! Symmetry-reduced two-amplitude dynamics.
//!
//! Permutation symmetry over the marked and unmarked blocks collapses the
//! N-dimensional Schrödinger equation to two complex amplitudes: `a` shared
//! by every solution state and `b` shared by every non-solution state. With
//! the schedule rate `ds/dt = eps * g^2(eta*; s)` substituted, the equations
//! are integrated directly in `s`:
//!
//! ```text
//! i eps g^2(eta*; s) a' = -(1-s) [eta a + (1-eta) b]
//! i eps g^2(eta*; s) b' = -(1-s) [eta a + (1-eta) b] + s b
//! a(0) = b(0) = 1
//! ```
//!
//! The coefficient `1/(eps g^2)` stays bounded at both ends of the path
//! (`g(eta*, 0) = g(eta*, 1) = 1`), so no endpoint singularity handling is
//! needed; if that assumption were ever violated the stepper's underflow
//! report would flag the failing `s`. N and M enter only through the ratio
//! `eta = M/N`, so equal ratios produce bit-identical runs.
//!
//! Normalization `eta |a|^2 + (1-eta) |b|^2 = 1` is monitored and never
//! re-imposed; drift beyond tolerance is a hard failure.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grover::{gap_sq_value, Ratio, ScheduleParams};
use crate::ode::{self, OdeOptions};

/// The two distinct amplitudes at adiabatic parameter `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedState {
    /// Amplitude on each solution state.
    pub a: Complex64,
    /// Amplitude on each non-solution state.
    pub b: Complex64,
    /// Adiabatic parameter in `[0, 1]`.
    pub s: f64,
}

impl ReducedState {
    /// Conserved norm `eta |a|^2 + (1-eta) |b|^2` (1 for exact evolution).
    pub fn norm(&self, eta: Ratio) -> f64 {
        let e = eta.value();
        e * self.a.norm_sqr() + (1.0 - e) * self.b.norm_sqr()
    }
}

/// A fully specified reduced-dynamics run: the true ratio `eta`, the schedule
/// parameters (whose `eta*` may differ from `eta`), and integrator
/// tolerances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedRunSpec {
    pub eta: Ratio,
    pub params: ScheduleParams,
    pub abs_tol: f64,
    pub rel_tol: f64,
}

/// Default integrator tolerance for reduced runs.
pub const DEFAULT_TOL: f64 = 1e-10;

impl ReducedRunSpec {
    /// Tolerances must lie in `(0, 1e-2]`.
    pub fn new(eta: Ratio, params: ScheduleParams, abs_tol: f64, rel_tol: f64) -> Result<Self> {
        for (name, value) in [("abs_tol", abs_tol), ("rel_tol", rel_tol)] {
            if !value.is_finite() || value <= 0.0 || value > 1e-2 {
                return Err(Error::OutOfRange {
                    name,
                    value,
                    min: f64::MIN_POSITIVE,
                    max: 1e-2,
                });
            }
        }
        Ok(ReducedRunSpec {
            eta,
            params,
            abs_tol,
            rel_tol,
        })
    }

    pub fn with_default_tols(eta: Ratio, params: ScheduleParams) -> Result<Self> {
        Self::new(eta, params, DEFAULT_TOL, DEFAULT_TOL)
    }

    /// Permitted end-of-run normalization drift.
    pub fn drift_limit(&self) -> f64 {
        10.0 * self.abs_tol.max(self.rel_tol)
    }

    fn ode_options(&self) -> OdeOptions {
        OdeOptions {
            abs_tol: self.abs_tol,
            rel_tol: self.rel_tol,
            var_name: "s",
            ..OdeOptions::default()
        }
    }
}

fn reduced_rhs(spec: &ReducedRunSpec) -> impl Fn(f64, &[Complex64], &mut [Complex64]) + '_ {
    let eta = spec.eta.value();
    let eta_star = spec.params.eta_star().value();
    let eps = spec.params.eps();
    move |s: f64, y: &[Complex64], dy: &mut [Complex64]| {
        let (a, b) = (y[0], y[1]);
        let u = a * eta + b * (1.0 - eta);
        let denom = eps * gap_sq_value(eta_star, s);
        let i = Complex64::i();
        dy[0] = i * (1.0 - s) * u / denom;
        dy[1] = i * ((1.0 - s) * u - s * b) / denom;
    }
}

fn check_norm(state: &ReducedState, spec: &ReducedRunSpec) -> Result<()> {
    let drift = (state.norm(spec.eta) - 1.0).abs();
    let limit = spec.drift_limit();
    if drift > limit {
        return Err(Error::NormDrift {
            var: "s",
            at: state.s,
            drift,
            limit,
        });
    }
    Ok(())
}

/// Integrates the reduced equations to `s = 1` and returns the final state.
///
/// Deterministic given the spec; fails on step underflow (reported with the
/// failing `s`) or normalization drift beyond `10 * max(abs_tol, rel_tol)`.
pub fn integrate_reduced(spec: &ReducedRunSpec) -> Result<ReducedState> {
    let y0 = [Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
    let y = ode::integrate(reduced_rhs(spec), (0.0, 1.0), &y0, &spec.ode_options())?;
    let state = ReducedState {
        a: y[0],
        b: y[1],
        s: 1.0,
    };
    check_norm(&state, spec)?;
    Ok(state)
}

/// Integrates the reduced equations, reporting the state at every requested
/// `s` sample (strictly increasing within `[0, 1]`) and at `s = 1`.
///
/// Norm drift is checked at every reported point.
pub fn integrate_reduced_path(spec: &ReducedRunSpec, s_samples: &[f64]) -> Result<Vec<ReducedState>> {
    let y0 = [Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
    let mut states = Vec::with_capacity(s_samples.len() + 2);
    let interior: Vec<f64> = s_samples
        .iter()
        .copied()
        .filter(|&s| s > 0.0 && s < 1.0)
        .collect();
    if s_samples.first() == Some(&0.0) {
        states.push(ReducedState {
            a: y0[0],
            b: y0[1],
            s: 0.0,
        });
    }
    let out = ode::integrate_sampled(
        reduced_rhs(spec),
        (0.0, 1.0),
        &y0,
        &interior,
        &spec.ode_options(),
    )?;
    for (s, y) in out {
        let state = ReducedState {
            a: y[0],
            b: y[1],
            s,
        };
        check_norm(&state, spec)?;
        states.push(state);
    }
    Ok(states)
}

/// Solution probability from the final state: the normalized quotient
/// `eta |a|^2 / (eta |a|^2 + (1-eta) |b|^2)`, robust to benign norm drift.
pub fn p_sol(state: &ReducedState, eta: Ratio) -> f64 {
    let e = eta.value();
    let na = e * state.a.norm_sqr();
    let nb = (1.0 - e) * state.b.norm_sqr();
    if na + nb == 0.0 {
        return 0.0;
    }
    na / (na + nb)
}

/// Small-`eps` asymptote `1 - eps^2 eta (1 - eta)`.
pub fn p_sol_small_eps(eta: Ratio, eps: f64) -> f64 {
    let e = eta.value();
    1.0 - eps * eps * e * (1.0 - e)
}

/// Large-N Landau–Zener form `1 - exp(-pi M / (4 eps M*))`.
///
/// Zero at `M = 0`, increasing in `M`, decreasing in `M*` and `eps`.
pub fn p_sol_landau_zener(m: u64, m_star: u64, eps: f64) -> Result<f64> {
    if m_star == 0 {
        return Err(Error::InvalidCounts { m, n: m_star });
    }
    if !eps.is_finite() || eps <= 0.0 {
        return Err(Error::OutOfRange {
            name: "eps",
            value: eps,
            min: f64::MIN_POSITIVE,
            max: f64::INFINITY,
        });
    }
    let x = std::f64::consts::PI * m as f64 / (4.0 * eps * m_star as f64);
    Ok(-(-x).exp_m1())
}

/// Ratio form of [`p_sol_landau_zener`]: `1 - exp(-pi eta / (4 eps eta*))`.
pub fn p_sol_landau_zener_ratio(eta: Ratio, eta_star: Ratio, eps: f64) -> Result<f64> {
    if eta_star.value() <= 0.0 {
        return Err(Error::Degenerate {
            what: "Landau-Zener probability undefined at eta* = 0",
        });
    }
    if !eps.is_finite() || eps <= 0.0 {
        return Err(Error::OutOfRange {
            name: "eps",
            value: eps,
            min: f64::MIN_POSITIVE,
            max: f64::INFINITY,
        });
    }
    let x = std::f64::consts::PI * eta.value() / (4.0 * eps * eta_star.value());
    Ok(-(-x).exp_m1())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn spec(eta: f64, eta_star: f64, eps: f64) -> ReducedRunSpec {
        ReducedRunSpec::with_default_tols(
            Ratio::new(eta).unwrap(),
            ScheduleParams::new(Ratio::new(eta_star).unwrap(), eps).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn tolerances_validated() {
        let eta = Ratio::new(0.5).unwrap();
        let params = ScheduleParams::new(eta, 0.1).unwrap();
        assert!(ReducedRunSpec::new(eta, params, 0.0, 1e-10).is_err());
        assert!(ReducedRunSpec::new(eta, params, 1e-10, 0.1).is_err());
        assert!(ReducedRunSpec::new(eta, params, 1e-2, 1e-2).is_ok());
    }

    #[test]
    fn all_marked_is_pure_phase() {
        // eta = 1: the coupling to b vanishes and |a| stays 1.
        let st = integrate_reduced(&spec(1.0, 1.0, 0.3)).unwrap();
        assert_relative_eq!(st.a.norm_sqr(), 1.0, epsilon = 1e-9);
        assert_relative_eq!(p_sol(&st, Ratio::new(1.0).unwrap()), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn p_sol_trivial_cases() {
        let uniform = ReducedState {
            a: Complex64::new(0.6, 0.1),
            b: Complex64::new(0.6, 0.1),
            s: 1.0,
        };
        for &e in &[0.0, 0.2, 0.7, 1.0] {
            let eta = Ratio::new(e).unwrap();
            assert_relative_eq!(p_sol(&uniform, eta), e, epsilon = 1e-15);
        }
        let b_zero = ReducedState {
            a: Complex64::new(0.3, -0.4),
            b: Complex64::new(0.0, 0.0),
            s: 1.0,
        };
        assert_eq!(p_sol(&b_zero, Ratio::new(0.5).unwrap()), 1.0);
        let any_b = ReducedState {
            a: Complex64::new(1.0, 0.0),
            b: Complex64::new(0.3, 0.9),
            s: 1.0,
        };
        assert_eq!(p_sol(&any_b, Ratio::new(1.0).unwrap()), 1.0);
    }

    #[test]
    fn small_eps_formula() {
        assert_eq!(p_sol_small_eps(Ratio::new(0.0).unwrap(), 0.3), 1.0);
        assert_eq!(p_sol_small_eps(Ratio::new(1.0).unwrap(), 0.3), 1.0);
        assert_eq!(p_sol_small_eps(Ratio::new(0.7).unwrap(), 0.0), 1.0);
        assert_relative_eq!(
            p_sol_small_eps(Ratio::new(0.5).unwrap(), 0.1),
            0.9975,
            max_relative = 1e-15
        );
    }

    #[test]
    fn landau_zener_formula() {
        assert_eq!(p_sol_landau_zener(0, 7, 0.1).unwrap(), 0.0);
        let p1 = p_sol_landau_zener(5, 5, 0.1).unwrap();
        assert_relative_eq!(
            p1,
            1.0 - (-std::f64::consts::PI / 0.4).exp(),
            max_relative = 1e-14
        );
        let p2 = p_sol_landau_zener(10, 5, 0.1).unwrap();
        assert_relative_eq!(
            p2,
            1.0 - (-std::f64::consts::PI / 0.2).exp(),
            max_relative = 1e-14
        );
        assert!(p2 > p1);
        assert!(p_sol_landau_zener(1, 0, 0.1).is_err());
        assert!(p_sol_landau_zener(1, 1, 0.0).is_err());

        // Monotone: increasing in M, decreasing in M* and eps.
        assert!(
            p_sol_landau_zener(6, 40, 0.1).unwrap() > p_sol_landau_zener(5, 40, 0.1).unwrap()
        );
        assert!(
            p_sol_landau_zener(5, 50, 0.1).unwrap() < p_sol_landau_zener(5, 40, 0.1).unwrap()
        );
        assert!(
            p_sol_landau_zener(5, 40, 0.2).unwrap() < p_sol_landau_zener(5, 40, 0.1).unwrap()
        );
    }

    #[test]
    fn ratio_and_count_forms_agree() {
        let p_counts = p_sol_landau_zener(64, 640, 0.1).unwrap();
        let p_ratio = p_sol_landau_zener_ratio(
            Ratio::from_counts(64, 1 << 20).unwrap(),
            Ratio::from_counts(640, 1 << 20).unwrap(),
            0.1,
        )
        .unwrap();
        assert_relative_eq!(p_counts, p_ratio, max_relative = 1e-12);
    }

    #[test]
    fn norm_conserved_along_path() {
        let sp = spec(0.0625, 0.0625, 0.1);
        let samples: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
        let states = integrate_reduced_path(&sp, &samples).unwrap();
        assert_eq!(states.len(), 21);
        for st in &states {
            assert!((st.norm(sp.eta) - 1.0).abs() <= sp.drift_limit());
        }
    }

    #[test]
    fn matched_small_ratio_near_landau_zener() {
        // eta = eta* = 1e-3, eps = 0.1:  within 1% of 1 - e^{-pi/0.4}.
        let st = integrate_reduced(&spec(1e-3, 1e-3, 0.1)).unwrap();
        let p = p_sol(&st, Ratio::new(1e-3).unwrap());
        let lz = p_sol_landau_zener(1, 1, 0.1).unwrap();
        assert!((p - lz).abs() / lz < 0.01, "p = {p}, lz = {lz}");
    }
}
