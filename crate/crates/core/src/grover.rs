//! Closed-form scalar quantities of the Grover adiabatic problem.
//!
//! Everything here is an explicit function of the solution ratio `eta` and
//! the interpolation parameter `s`: the spectral gap between the two lowest
//! levels, the driving matrix element, the local-evolution rate bounds built
//! from them, and the ratio <-> angle conversion that connects counting to
//! phase estimation.
//!
//! All functions are pure and total on their stated domains; out-of-domain
//! inputs are rejected rather than clamped so that harness bugs surface
//! early.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A dimensionless solution ratio in `[0, 1]`, either the true `M/N` or the
/// assumed `M*/N` used to shape a schedule.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Ratio(f64);

impl Ratio {
    /// Validates `0 <= value <= 1`.
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() || !(0.0..=1.0).contains(&value) {
            return Err(Error::OutOfRange {
                name: "ratio",
                value,
                min: 0.0,
                max: 1.0,
            });
        }
        Ok(Ratio(value))
    }

    /// Builds `M/N` from counts; the quotient is exact to working precision.
    pub fn from_counts(m: u64, n: u64) -> Result<Self> {
        if n == 0 || m > n {
            return Err(Error::InvalidCounts { m, n });
        }
        Ok(Ratio(m as f64 / n as f64))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// The pair defining a local-adiabatic path: the assumed ratio `eta*` and the
/// error parameter `eps` that scales the evolution rate.
///
/// `eta* = 0` is rejected at construction: it would make the path degenerate
/// (infinite runtime), and every realizable instance has `eta* >= 1/N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScheduleParams {
    eta_star: Ratio,
    eps: f64,
}

impl ScheduleParams {
    pub fn new(eta_star: Ratio, eps: f64) -> Result<Self> {
        if eta_star.value() <= 0.0 {
            return Err(Error::Degenerate {
                what: "eta* = 0 gives a degenerate (infinite-runtime) schedule",
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
        Ok(ScheduleParams { eta_star, eps })
    }

    pub fn eta_star(&self) -> Ratio {
        self.eta_star
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }
}

fn check_s(s: f64) -> Result<()> {
    if !s.is_finite() || !(0.0..=1.0).contains(&s) {
        return Err(Error::OutOfRange {
            name: "s",
            value: s,
            min: 0.0,
            max: 1.0,
        });
    }
    Ok(())
}

/// Squared gap, in the cancellation-free form `eta + 4(1-eta)(s - 1/2)^2`.
///
/// Algebraically identical to `1 - 4(1-eta)s(1-s)` but exact at `s = 1/2`
/// (returns `eta` with no rounding) and manifestly symmetric about it.
pub(crate) fn gap_sq_value(eta: f64, s: f64) -> f64 {
    let d = s - 0.5;
    eta + 4.0 * (1.0 - eta) * d * d
}

pub(crate) fn gap_value(eta: f64, s: f64) -> f64 {
    gap_sq_value(eta, s).sqrt()
}

/// First excitation gap `g(eta; s) = sqrt(1 - 4(1-eta)s(1-s))`.
///
/// Lies in `[sqrt(eta), 1]`, with the minimum at `s = 1/2`.
pub fn gap(eta: Ratio, s: f64) -> Result<f64> {
    check_s(s)?;
    Ok(gap_value(eta.value(), s))
}

/// Driving matrix element between the two lowest levels,
/// `V01(eta; s) = sqrt(eta(1-eta)) / g(eta; s)`, bounded above by 1.
pub fn matrix_element_v01(eta: Ratio, s: f64) -> Result<f64> {
    check_s(s)?;
    let e = eta.value();
    let g = gap_value(e, s);
    if g == 0.0 {
        // Only reachable at eta = 0, s = 1/2.
        return Err(Error::Degenerate {
            what: "matrix element undefined where the gap vanishes (eta = 0, s = 1/2)",
        });
    }
    Ok((e * (1.0 - e)).sqrt() / g)
}

/// Relaxed local-evolution rate `eps * g^2(eta*; s)`, the rate the schedule
/// saturates.
pub fn lae_rate(params: &ScheduleParams, s: f64) -> Result<f64> {
    check_s(s)?;
    Ok(params.eps() * gap_sq_value(params.eta_star().value(), s))
}

/// Strict local-evolution rate `eps * g^3(eta*; s) / sqrt(eta*(1-eta*))`.
///
/// Exposed for comparison only; schedules are built from [`lae_rate`].
/// Exceeds the relaxed rate wherever `V01 < 1`, and is undefined at
/// `eta* in {0, 1}`.
pub fn strict_lae_rate(params: &ScheduleParams, s: f64) -> Result<f64> {
    check_s(s)?;
    let e = params.eta_star().value();
    if e >= 1.0 {
        return Err(Error::Degenerate {
            what: "strict rate undefined at eta* = 1 (vanishing matrix element)",
        });
    }
    let g = gap_value(e, s);
    Ok(params.eps() * g * g * g / (e * (1.0 - e)).sqrt())
}

/// Angle `theta = 2 asin(sqrt(eta))` in `[0, pi]` with `eta = sin^2(theta/2)`.
pub fn angle_from_ratio(eta: Ratio) -> f64 {
    2.0 * eta.value().sqrt().asin()
}

/// Inverse of [`angle_from_ratio`]: `eta = sin^2(theta/2)` for `theta` in
/// `[0, pi]`.
pub fn ratio_from_angle(theta: f64) -> Result<Ratio> {
    if !theta.is_finite() || !(0.0..=std::f64::consts::PI).contains(&theta) {
        return Err(Error::OutOfRange {
            name: "theta",
            value: theta,
            min: 0.0,
            max: std::f64::consts::PI,
        });
    }
    let half = (theta / 2.0).sin();
    Ratio::new(half * half)
}
