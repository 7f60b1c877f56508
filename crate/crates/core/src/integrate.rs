// Copyright 2026 The unruh-preth Authors
// SPDX-License-Identifier: Apache-2.0

//! Adaptive Dormand–Prince 5(4) integration of autonomous systems
//! `y' = F(y)` on complex vectors.

use faer::c64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
    /// Step budget per output interval.
    pub max_steps: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            rtol: 1e-9,
            atol: 1e-12,
            max_steps: 1_000_000,
        }
    }
}

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order weights (first-same-as-last with row 6 of `A`).
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates from `times[0]` and records the state at every entry of
/// `times`. `rhs(y, dy)` must overwrite `dy`.
pub fn dopri5<F>(mut rhs: F, y0: &[c64], times: &[f64], tol: Tolerance) -> Result<Vec<Vec<c64>>>
where
    F: FnMut(&[c64], &mut [c64]),
{
    let n = y0.len();
    let mut out = Vec::with_capacity(times.len());
    let Some(&t0) = times.first() else {
        return Ok(out);
    };
    if times.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(Error::Integrator {
            t: t0,
            reason: "output times must be sorted ascending".into(),
        });
    }
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k: Vec<Vec<c64>> = vec![vec![c64::new(0.0, 0.0); n]; 7];
    let mut tmp = vec![c64::new(0.0, 0.0); n];
    rhs(&y, &mut k[0]);
    let mut h = initial_step(&y, &k[0], times.last().copied().unwrap_or(t0) - t0, tol);
    out.push(y.clone());

    for &target in &times[1..] {
        let mut steps = 0usize;
        while t < target {
            steps += 1;
            if steps > tol.max_steps {
                return Err(Error::Integrator {
                    t,
                    reason: format!("exceeded {} steps", tol.max_steps),
                });
            }
            let last = t + h >= target;
            let h_step = if last { target - t } else { h };
            for s in 1..7 {
                for i in 0..n {
                    let mut acc = y[i];
                    for (j, kj) in k.iter().enumerate().take(s) {
                        if A[s][j] != 0.0 {
                            acc += kj[i] * (h_step * A[s][j]);
                        }
                    }
                    tmp[i] = acc;
                }
                rhs(&tmp, &mut k[s]);
            }
            // tmp now holds the fifth-order solution (row 6 of A equals B5)
            let mut err = 0.0f64;
            for i in 0..n {
                let mut e = c64::new(0.0, 0.0);
                for s in 0..7 {
                    let w = B5[s] - B4[s];
                    if w != 0.0 {
                        e += k[s][i] * (h_step * w);
                    }
                }
                let scale = tol.atol + tol.rtol * y[i].norm().max(tmp[i].norm());
                err = err.max(e.norm() / scale);
            }
            if !err.is_finite() {
                return Err(Error::Integrator {
                    t,
                    reason: "non-finite error estimate".into(),
                });
            }
            if err <= 1.0 {
                t = if last { target } else { t + h_step };
                std::mem::swap(&mut y, &mut tmp);
                k.swap(0, 6);
            }
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            if !(last && err <= 1.0) {
                h = h_step * factor;
            }
            if h < 1e-14 * t.abs().max(1.0) {
                return Err(Error::Integrator {
                    t,
                    reason: format!("step size underflow (h = {h:.3e})"),
                });
            }
        }
        out.push(y.clone());
    }
    Ok(out)
}

fn initial_step(y: &[c64], dy: &[c64], span: f64, tol: Tolerance) -> f64 {
    let mut d0 = 0.0f64;
    let mut d1 = 0.0f64;
    for (a, b) in y.iter().zip(dy) {
        let scale = tol.atol + tol.rtol * a.norm();
        d0 = d0.max(a.norm() / scale);
        d1 = d1.max(b.norm() / scale);
    }
    let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    if span > 0.0 {
        h.min(span)
    } else {
        h
    }
}
