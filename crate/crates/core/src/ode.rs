//! Adaptive Dormand–Prince 5(4) stepping for complex state vectors.
//!
//! Small, allocation-reusing embedded Runge–Kutta pair with the standard
//! error-per-step controller. Works directly on `Complex64` slices so the
//! two-amplitude system and the rank-one-driven full state share one
//! integrator.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Integrator tolerances and limits.
#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_steps: u64,
    /// Name of the independent variable, used in error reports.
    pub var_name: &'static str,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_steps: 50_000_000,
            var_name: "t",
        }
    }
}

// Dormand–Prince coefficients.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
// Fifth-order solution weights (also the last stage row: FSAL).
const B: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
// Difference between the 5th- and embedded 4th-order weights.
const E: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];

struct Dopri5<F> {
    rhs: F,
    dim: usize,
    k: [Vec<Complex64>; 7],
    y_stage: Vec<Complex64>,
    y_next: Vec<Complex64>,
}

impl<F> Dopri5<F>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
{
    fn new(rhs: F, dim: usize) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); dim];
        Dopri5 {
            rhs,
            dim,
            k: [
                z.clone(),
                z.clone(),
                z.clone(),
                z.clone(),
                z.clone(),
                z.clone(),
                z.clone(),
            ],
            y_stage: z.clone(),
            y_next: z,
        }
    }

    fn stage(&mut self, t: f64, h: f64, y: &[Complex64], idx: usize, coeffs: &[f64]) {
        for i in 0..self.dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, &a) in coeffs.iter().enumerate() {
                if a != 0.0 {
                    acc += self.k[j][i] * a;
                }
            }
            self.y_stage[i] = y[i] + acc * h;
        }
        let (_, rest) = self.k.split_at_mut(idx);
        (self.rhs)(t + C[idx] * h, &self.y_stage, &mut rest[0]);
    }

    /// One attempted step from `(t, y)` with size `h`; `k[0]` must hold
    /// `f(t, y)`. Returns the scaled error norm; on success `y_next` holds
    /// the fifth-order solution and `k[6]` the FSAL derivative.
    fn try_step(&mut self, t: f64, h: f64, y: &[Complex64], opts: &OdeOptions) -> f64 {
        self.stage(t, h, y, 1, &A2);
        self.stage(t, h, y, 2, &A3);
        self.stage(t, h, y, 3, &A4);
        self.stage(t, h, y, 4, &A5);
        self.stage(t, h, y, 5, &A6);
        for i in 0..self.dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, &b) in B.iter().enumerate() {
                if b != 0.0 {
                    acc += self.k[j][i] * b;
                }
            }
            self.y_next[i] = y[i] + acc * h;
        }
        {
            let (_, last) = self.k.split_at_mut(6);
            (self.rhs)(t + h, &self.y_next, &mut last[0]);
        }
        let mut err_sq = 0.0;
        for i in 0..self.dim {
            let mut e = Complex64::new(0.0, 0.0);
            for (j, &w) in E.iter().enumerate() {
                if w != 0.0 {
                    e += self.k[j][i] * w;
                }
            }
            let scale =
                opts.abs_tol + opts.rel_tol * self.y_next[i].norm().max(y[i].norm());
            let r = e.norm() * h.abs() / scale;
            err_sq += r * r;
        }
        (err_sq / self.dim as f64).sqrt()
    }
}

fn initial_step(
    f0: &[Complex64],
    y0: &[Complex64],
    span: f64,
    opts: &OdeOptions,
) -> f64 {
    let mut d0: f64 = 0.0;
    let mut d1: f64 = 0.0;
    for i in 0..y0.len() {
        let scale = opts.abs_tol + opts.rel_tol * y0[i].norm();
        d0 += (y0[i].norm() / scale).powi(2);
        d1 += (f0[i].norm() / scale).powi(2);
    }
    let (d0, d1) = (d0.sqrt(), d1.sqrt());
    let h = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6 * span
    } else {
        0.01 * (d0 / d1)
    };
    h.min(span / 10.0).max(span * 1e-12)
}

/// Integrates from `span.0` to `span.1` (forward), returning the state at
/// every value in `samples` (which must be strictly increasing inside the
/// span) and at the final point.
///
/// The step sequence lands exactly on every sample, so the reported states
/// need no interpolation.
pub fn integrate_sampled<F>(
    rhs: F,
    span: (f64, f64),
    y0: &[Complex64],
    samples: &[f64],
    opts: &OdeOptions,
) -> Result<Vec<(f64, Vec<Complex64>)>>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
{
    let (t0, t1) = span;
    assert!(t1 > t0, "integration span must be forward");
    for w in samples.windows(2) {
        assert!(w[0] < w[1], "samples must be strictly increasing");
    }
    if let (Some(first), Some(last)) = (samples.first(), samples.last()) {
        assert!(*first > t0 && *last <= t1, "samples must lie inside the span");
    }

    let dim = y0.len();
    let mut solver = Dopri5::new(rhs, dim);
    let mut y = y0.to_vec();
    let mut t = t0;
    (solver.rhs)(t, &y, &mut solver.k[0]);
    let mut h = initial_step(&solver.k[0], &y, t1 - t0, opts);

    let mut out = Vec::with_capacity(samples.len() + 1);
    let mut targets: Vec<f64> = samples.to_vec();
    if targets.last() != Some(&t1) {
        targets.push(t1);
    }

    let mut steps: u64 = 0;
    let mut just_rejected = false;
    for &target in &targets {
        while t < target {
            steps += 1;
            if steps > opts.max_steps {
                return Err(Error::TooManySteps {
                    var: opts.var_name,
                    at: t,
                    max_steps: opts.max_steps,
                });
            }
            let h_min = 16.0 * f64::EPSILON * t.abs().max(1.0);
            if h < h_min {
                return Err(Error::StepUnderflow {
                    var: opts.var_name,
                    at: t,
                    step: h,
                });
            }
            let clipped = h.min(target - t);
            let err = solver.try_step(t, clipped, &y, opts);
            if err <= 1.0 {
                t += clipped;
                std::mem::swap(&mut y, &mut solver.y_next);
                solver.k.swap(0, 6); // FSAL
                let mut fac = 0.9 * err.max(1e-10).powf(-0.2);
                if just_rejected {
                    fac = fac.min(1.0);
                }
                h = clipped * fac.clamp(0.2, 5.0);
                just_rejected = false;
            } else {
                h = clipped * (0.9 * err.powf(-0.2)).clamp(0.2, 1.0).min(0.9);
                just_rejected = true;
            }
        }
        out.push((target, y.clone()));
    }
    Ok(out)
}

/// Integrates over the span and returns only the final state.
pub fn integrate<F>(
    rhs: F,
    span: (f64, f64),
    y0: &[Complex64],
    opts: &OdeOptions,
) -> Result<Vec<Complex64>>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
{
    let out = integrate_sampled(rhs, span, y0, &[], opts)?;
    Ok(out.into_iter().next_back().expect("final state present").1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn phase_rotation_exact_modulus() {
        // y' = -i w y  =>  y(t) = e^{-iwt} y(0)
        let w = 3.0;
        let y0 = vec![Complex64::new(1.0, 0.0)];
        let opts = OdeOptions::default();
        let y = integrate(
            |_t, y, dy| dy[0] = -Complex64::i() * w * y[0],
            (0.0, 5.0),
            &y0,
            &opts,
        )
        .unwrap();
        let expected = (-Complex64::i() * w * 5.0).exp();
        assert_relative_eq!(y[0].re, expected.re, epsilon = 1e-9);
        assert_relative_eq!(y[0].im, expected.im, epsilon = 1e-9);
        assert_relative_eq!(y[0].norm(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn exponential_growth() {
        let y0 = vec![Complex64::new(1.0, 0.0)];
        let opts = OdeOptions::default();
        let y = integrate(|_t, y, dy| dy[0] = y[0], (0.0, 2.0), &y0, &opts).unwrap();
        assert_relative_eq!(y[0].re, 2.0f64.exp(), max_relative = 1e-9);
    }

    #[test]
    fn sampled_points_returned_in_order() {
        let y0 = vec![Complex64::new(1.0, 0.0)];
        let opts = OdeOptions::default();
        let out = integrate_sampled(
            |_t, y, dy| dy[0] = y[0],
            (0.0, 1.0),
            &y0,
            &[0.25, 0.5, 0.75],
            &opts,
        )
        .unwrap();
        assert_eq!(out.len(), 4);
        for (t, y) in out {
            assert_relative_eq!(y[0].re, t.exp(), max_relative = 1e-9);
        }
    }

    #[test]
    fn coupled_oscillator_energy_conserved() {
        // y'' = -y as a 2-component system; |y|^2 + |y'|^2 conserved.
        let y0 = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let opts = OdeOptions::default();
        let y = integrate(
            |_t, y, dy| {
                dy[0] = y[1];
                dy[1] = -y[0];
            },
            (0.0, 20.0),
            &y0,
            &opts,
        )
        .unwrap();
        let e = y[0].norm_sqr() + y[1].norm_sqr();
        assert_relative_eq!(e, 1.0, epsilon = 1e-9);
        assert_relative_eq!(y[0].re, 20.0f64.cos(), epsilon = 1e-8);
    }
}
