// Copyright 2026 The unruh-preth Authors
// SPDX-License-Identifier: Apache-2.0

//! Reduced three-observable model for two atoms.
//!
//! For initial states diagonal in the dipolar basis the two-atom dynamics
//! closes on `(M_z, M_zz, M_c)`:
//!
//! ```text
//! dM_z/dt  = -A¹¹ M_z + 2B¹² M_c + B¹¹
//! dM_zz/dt = (B¹¹/2) M_z - 2A¹¹ M_zz + A¹² M_c
//! dM_c/dt  = -(B¹²/2) M_z + 2A¹² M_zz - A¹¹ M_c
//! ```
//!
//! The coefficients are taken from the generator itself:
//! `A¹¹ = γ₊ + γ₋`, `B¹¹ = γ₊ - γ₋`, `A¹² = f A¹¹`, `B¹² = f B¹¹`.

use faer::linalg::solvers::DenseSolveCore;
use faer::{c64, Mat, Scale};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::integrate::{dopri5, Tolerance};
use crate::linalg::{frobenius_c, kron};
use crate::measures::ObservableSet;
use crate::operators::{pauli, Pauli};
use crate::rates::RateSet;
use crate::state::{DensityMatrix, StateTolerance};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochState {
    pub mz: f64,
    pub mzz: f64,
    pub mc: f64,
    #[serde(default)]
    pub tau: f64,
}

impl BlochState {
    pub fn new(mz: f64, mzz: f64, mc: f64) -> Self {
        Self { mz, mzz, mc, tau: 0.0 }
    }

    pub fn from_observables(obs: &ObservableSet) -> Self {
        Self::new(obs.mz, obs.mzz, obs.mc)
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.mz, self.mzz, self.mc]
    }

    /// `M_c + M_zz`, conserved when `f_ab = 1`.
    pub fn correlation_sum(&self) -> f64 {
        self.mc + self.mzz
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.as_array()
            .iter()
            .zip(other.as_array())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochCoefficients {
    pub a11: f64,
    pub b11: f64,
    pub a12: f64,
    pub b12: f64,
}

impl BlochCoefficients {
    pub fn from_rates(rates: &RateSet) -> Self {
        let a11 = rates.gamma_plus + rates.gamma_minus;
        let b11 = rates.gamma_plus - rates.gamma_minus;
        Self {
            a11,
            b11,
            a12: rates.f_ab * a11,
            b12: rates.f_ab * b11,
        }
    }

    /// `(K, b)` with `dM/dt = K M + b`.
    pub fn system(&self) -> ([[f64; 3]; 3], [f64; 3]) {
        let Self { a11, b11, a12, b12 } = *self;
        (
            [
                [-a11, 0.0, 2.0 * b12],
                [b11 / 2.0, -2.0 * a11, a12],
                [-b12 / 2.0, 2.0 * a12, -a11],
            ],
            [b11, 0.0, 0.0],
        )
    }
}

/// Time derivatives of `(M_z, M_zz, M_c)`.
pub fn bloch_rhs(state: &BlochState, rates: &RateSet) -> [f64; 3] {
    let (k, b) = BlochCoefficients::from_rates(rates).system();
    let m = state.as_array();
    let mut out = b;
    for (i, o) in out.iter_mut().enumerate() {
        for j in 0..3 {
            *o += k[i][j] * m[j];
        }
    }
    out
}

/// Two-atom state `I/4 + (M_z/2)(I_z¹+I_z²) + 4M_zz I_z¹I_z² + 2M_c(I_x¹I_x² + I_y¹I_y²)`
/// with `I_i = σ_i/2`.
pub fn reconstruct_density(mz: f64, mzz: f64, mc: f64) -> Result<DensityMatrix> {
    let id = Mat::<c64>::identity(2, 2);
    let half = |p| pauli(p) * Scale(c64::new(0.5, 0.0));
    let pair = |p| kron(half(p).as_ref(), half(p).as_ref());
    let iz_sum = kron(half(Pauli::Z).as_ref(), id.as_ref()) + kron(id.as_ref(), half(Pauli::Z).as_ref());
    let m = Mat::<c64>::identity(4, 4) * Scale(c64::new(0.25, 0.0))
        + iz_sum * Scale(c64::new(mz / 2.0, 0.0))
        + pair(Pauli::Z) * Scale(c64::new(4.0 * mzz, 0.0))
        + (pair(Pauli::X) + pair(Pauli::Y)) * Scale(c64::new(2.0 * mc, 0.0));
    DensityMatrix::new(m, StateTolerance::EVOLVED)
}

/// A fixed point together with its density matrix.
#[derive(Debug, Clone)]
pub struct SteadyPoint {
    pub state: BlochState,
    pub density: DensityMatrix,
}

/// Thermal fixed point `(M0, M0²/4, 0)`; requires `f_ab < 1`.
pub fn gibbs_steady(rates: &RateSet) -> Result<SteadyPoint> {
    if rates.f_ab.abs() >= 1.0 {
        return Err(invalid("f_ab", "the fixed point is not unique at |f_ab| = 1"));
    }
    let m0 = rates.m0;
    let state = BlochState::new(m0, m0 * m0 / 4.0, 0.0);
    Ok(SteadyPoint {
        density: reconstruct_density(state.mz, state.mzz, state.mc)?,
        state,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GgeParameters {
    /// Initial `M_c`.
    pub m2: f64,
    /// Initial `M_zz`.
    pub m3: f64,
    pub m0: f64,
}

impl GgeParameters {
    pub fn new(initial: &BlochState, m0: f64) -> Self {
        Self {
            m2: initial.mc,
            m3: initial.mzz,
            m0,
        }
    }

    pub fn sum(&self) -> f64 {
        self.m2 + self.m3
    }

    /// Lagrange multiplier of `σ¹·σ²`; `±∞` on the boundary of the range.
    pub fn l1(&self) -> f64 {
        let s = self.sum();
        let num = 1.0 - 4.0 * s;
        let den = 3.0 + 4.0 * s;
        if num <= 0.0 {
            return f64::NEG_INFINITY;
        }
        if den <= 0.0 {
            return f64::INFINITY;
        }
        let x = self.m0.atanh();
        (num / den * (1.0 + 2.0 * x.cosh())).ln()
    }
}

#[derive(Debug, Clone)]
pub struct GgeSteady {
    pub state: BlochState,
    pub density: DensityMatrix,
    pub l1: f64,
}

/// Slack allowed on the `M2 + M3` range.
const GGE_RANGE_SLACK: f64 = 1e-12;

/// Generalized Gibbs fixed point reached at `f_ab = 1`.
pub fn gge_steady(params: &GgeParameters) -> Result<GgeSteady> {
    let s = params.sum();
    if !(-0.75 - GGE_RANGE_SLACK..=0.25 + GGE_RANGE_SLACK).contains(&s) {
        return Err(invalid("M2 + M3", format!("{s} outside [-3/4, 1/4]")));
    }
    if !(-1.0..=1.0).contains(&params.m0) {
        return Err(invalid("M0", format!("{} outside [-1, 1]", params.m0)));
    }
    let m0 = params.m0;
    let denom = 3.0 + m0 * m0;
    let mz = m0 * (3.0 + 4.0 * s) / denom;
    let mc = -(m0 * m0 - 4.0 * s) / (2.0 * denom);
    let state = BlochState::new(mz, s - mc, mc);
    Ok(GgeSteady {
        density: reconstruct_density(state.mz, state.mzz, state.mc)?,
        state,
        l1: params.l1(),
    })
}

/// Augmented 4×4 generator acting on `(M_z, M_zz, M_c, 1)`.
fn augmented(rates: &RateSet) -> Mat<f64> {
    let (k, b) = BlochCoefficients::from_rates(rates).system();
    Mat::from_fn(4, 4, |i, j| match (i, j) {
        (3, _) => 0.0,
        (i, 3) => b[i],
        (i, j) => k[i][j],
    })
}

/// Largest eigenbasis condition number accepted before falling back to
/// adaptive stepping.
const MAX_CONDITION: f64 = 1e8;

/// Exact trajectory of the reduced model.
pub fn evolve_bloch(rates: &RateSet, initial: &BlochState, times: &[f64]) -> Result<Vec<BlochState>> {
    if times.windows(2).any(|w| w[1] < w[0]) || times.iter().any(|t| !t.is_finite()) {
        return Err(invalid("times", "times must be finite and sorted ascending"));
    }
    let g = augmented(rates);
    let gc = Mat::from_fn(4, 4, |i, j| c64::new(g[(i, j)], 0.0));
    let y0 = [initial.mz, initial.mzz, initial.mc, 1.0];
    let spectral = gc.eigen().ok().and_then(|evd| {
        let v = evd.U().to_owned();
        let inv = v.partial_piv_lu().inverse();
        let kappa = frobenius_c(v.as_ref()) * frobenius_c(inv.as_ref());
        (kappa <= MAX_CONDITION).then(|| {
            let vals: Vec<c64> = evd.S().column_vector().iter().copied().collect();
            (vals, v, inv)
        })
    });
    let to_state = |y: [f64; 3], t: f64| BlochState {
        mz: y[0],
        mzz: y[1],
        mc: y[2],
        tau: t,
    };
    match spectral {
        Some((vals, v, inv)) => {
            let coef: Vec<c64> = (0..4)
                .map(|a| (0..4).map(|b| inv[(a, b)] * y0[b]).sum())
                .collect();
            Ok(times
                .iter()
                .map(|&t| {
                    let dt = t - initial.tau;
                    let w: Vec<c64> = vals.iter().zip(&coef).map(|(l, c)| (l * dt).exp() * c).collect();
                    let y: [f64; 3] = std::array::from_fn(|i| (0..4).map(|a| v[(i, a)] * w[a]).sum::<c64>().re);
                    to_state(y, t)
                })
                .collect())
        }
        None => {
            let tol = Tolerance {
                rtol: 1e-12,
                atol: 1e-14,
                ..Tolerance::default()
            };
            let start: Vec<c64> = y0.iter().map(|&x| c64::new(x, 0.0)).collect();
            let mut grid = vec![initial.tau];
            grid.extend(times.iter().copied());
            if times.first().is_some_and(|&t| t < initial.tau) {
                return Err(invalid("times", "times precede the initial state"));
            }
            let rhs = |y: &[c64], dy: &mut [c64]| {
                for (i, slot) in dy.iter_mut().enumerate() {
                    *slot = (0..4).map(|j| y[j] * g[(i, j)]).sum();
                }
            };
            let mut traj = dopri5(rhs, &start, &grid, tol)?;
            traj.remove(0);
            Ok(traj
                .into_iter()
                .zip(times)
                .map(|(y, &t)| to_state([y[0].re, y[1].re, y[2].re], t))
                .collect())
        }
    }
}

/// Time at which `M_z` leaves the prethermal plateau.
///
/// The plateau is the `f_ab = 1` fixed point for the same initial state. The
/// trajectory must first enter the band `|M_z - plateau| ≤ δ` with
/// `δ = band_fraction · |plateau - M0|`; the departure time is when it next
/// leaves it. Returns `None` if the band is never entered or never left.
pub fn prethermal_departure_time(rates: &RateSet, initial: &BlochState, band_fraction: f64) -> Result<Option<f64>> {
    let plateau = gge_steady(&GgeParameters::new(initial, rates.m0))?.state.mz;
    let delta = band_fraction * (plateau - rates.m0).abs();
    if delta == 0.0 {
        return Ok(None);
    }
    let total = rates.gamma_plus + rates.gamma_minus;
    let slow = total * (1.0 - rates.f_ab).max(1e-12);
    let (t_lo, t_hi) = (1e-4 / total, 100.0 / slow);
    let n = 4000;
    let grid: Vec<f64> = (0..=n)
        .map(|i| t_lo * (t_hi / t_lo).powf(i as f64 / n as f64))
        .collect();
    let traj = evolve_bloch(rates, initial, &grid)?;
    let outside = |s: &BlochState| (s.mz - plateau).abs() > delta;
    let Some(enter) = traj.iter().position(|s| !outside(s)) else {
        return Ok(None);
    };
    let Some(leave) = traj[enter..].iter().position(outside).map(|k| k + enter) else {
        return Ok(None);
    };
    let (mut a, mut b) = (grid[leave - 1], grid[leave]);
    for _ in 0..60 {
        let mid = 0.5 * (a + b);
        let s = evolve_bloch(rates, initial, &[mid])?[0];
        if outside(&s) {
            b = mid;
        } else {
            a = mid;
        }
    }
    Ok(Some(0.5 * (a + b)))
}

/// Max-norm residual of `bloch_rhs` at a point.
pub fn rhs_residual(state: &BlochState, rates: &RateSet) -> f64 {
    bloch_rhs(state, rates).iter().map(|x| x.abs()).fold(0.0, f64::max)
}

/// Errors if `rho` has transverse magnetization, `xy`-type correlations or
/// `M_xx ≠ M_yy`, none of which the reduced model tracks.
pub fn check_sector(rho: &DensityMatrix) -> Result<()> {
    let obs = crate::measures::observables(rho)?;
    let full = obs.full.expect("observables always fill the full set");
    let stray = full.m[0].abs().max(full.m[1].abs()).max(full.mij.iter().fold(0.0, |a: f64, x| a.max(x.abs())));
    let aniso = (full.mii[0] - full.mii[1]).abs();
    if stray > 1e-12 || aniso > 1e-12 {
        return Err(Error::Invariant(format!(
            "state leaves the reduced-model sector (transverse {stray:.3e}, xx-yy {aniso:.3e})"
        )));
    }
    Ok(())
}
