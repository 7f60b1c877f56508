// Copyright 2026 The unruh-preth Authors
// SPDX-License-Identifier: Apache-2.0

//! Permutation-symmetric dynamics at `f_ab = 1`.
//!
//! With a fully collective bath, diagonal states of a collective-spin block
//! `J` evolve under a birth–death rate equation over `m = -J..J`:
//!
//! * lowering `m → m-1` at rate `γ₋ (J+m)(J-m+1)`,
//! * raising `m → m+1` at rate `γ₊ (J-m)(J+m+1)`.
//!
//! Collective spins use `J = Σ σ/2`, so the principal block of `N` atoms has
//! `J = N/2`. Blocks are indexed by `j2 = 2J` and levels by `i = J + m`.
//! Populations are propagated with a Padé matrix exponential of the rate
//! matrix.

use faer::{c64, Mat, Side};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::liouvillian::{build_lindbladian, Superoperator};
use crate::linalg::expm;
use crate::measures::shannon_entropy;
use crate::operators::intensity_operator;
use crate::rates::RateSet;
use crate::state::DensityMatrix;

/// Lowering rate out of level `i` of block `j2`, per unit `γ₋`.
fn down_weight(j2: usize, i: usize) -> f64 {
    (i * (j2 + 1 - i)) as f64
}

/// Raising rate out of level `i` of block `j2`, per unit `γ₊`.
fn up_weight(j2: usize, i: usize) -> f64 {
    ((j2 - i) * (i + 1)) as f64
}

/// `<J,m| J₊J₋ |J,m> = (J+m)(J-m+1)` for every level.
pub fn intensity_weights(j2: usize) -> Vec<f64> {
    (0..=j2).map(|i| down_weight(j2, i)).collect()
}

/// Column generator of the block rate equation. Column sums vanish.
pub fn block_rate_matrix(j2: usize, gamma_plus: f64, gamma_minus: f64) -> Mat<f64> {
    birth_death(
        j2 + 1,
        |i| gamma_plus * up_weight(j2, i),
        |i| gamma_minus * down_weight(j2, i),
    )
}

/// Rate matrix for the number `k` of excited atoms among `N` independent
/// atoms: `k → k+1` at `γ₊ (N-k)`, `k → k-1` at `γ₋ k`.
pub fn independent_rate_matrix(n_atoms: usize, gamma_plus: f64, gamma_minus: f64) -> Mat<f64> {
    birth_death(
        n_atoms + 1,
        |k| gamma_plus * (n_atoms - k) as f64,
        |k| gamma_minus * k as f64,
    )
}

fn birth_death(n: usize, up: impl Fn(usize) -> f64, down: impl Fn(usize) -> f64) -> Mat<f64> {
    let mut r = Mat::<f64>::zeros(n, n);
    for i in 0..n {
        if i + 1 < n {
            r[(i + 1, i)] = up(i);
        }
        if i > 0 {
            r[(i - 1, i)] = down(i);
        }
        r[(i, i)] = -(if i + 1 < n { up(i) } else { 0.0 } + if i > 0 { down(i) } else { 0.0 });
    }
    r
}

/// Eigenvalues of a birth–death generator, descending (the first is zero).
///
/// The chain is reversible, so it is similar to a symmetric tridiagonal
/// matrix whose off-diagonals are `√(r_{i,i+1} r_{i+1,i})`. A chain with a
/// one-way link is triangular up to that link and its spectrum splits.
pub fn birth_death_eigenvalues(r: &Mat<f64>) -> Result<Vec<f64>> {
    let n = r.nrows();
    let mut vals = Vec::with_capacity(n);
    let mut start = 0;
    for cut in 1..=n {
        let broken = cut == n || r[(cut - 1, cut)] == 0.0 || r[(cut, cut - 1)] == 0.0;
        if !broken {
            continue;
        }
        let len = cut - start;
        if len == 1 {
            vals.push(r[(start, start)]);
        } else {
            let s = Mat::from_fn(len, len, |i, j| {
                let (a, b) = (start + i, start + j);
                if a == b {
                    c64::new(r[(a, a)], 0.0)
                } else if a.abs_diff(b) == 1 {
                    c64::new((r[(a, b)] * r[(b, a)]).sqrt(), 0.0)
                } else {
                    c64::new(0.0, 0.0)
                }
            });
            let e = s
                .self_adjoint_eigenvalues(Side::Lower)
                .map_err(|e| crate::linalg::eig_error(s.as_ref(), e))?;
            vals.extend(e);
        }
        start = cut;
    }
    vals.sort_by(|a, b| b.total_cmp(a));
    Ok(vals)
}

/// Smallest nonzero decay rate of a birth–death generator.
pub fn relaxation_rate(r: &Mat<f64>) -> Result<f64> {
    let vals = birth_death_eigenvalues(r)?;
    let scale = vals.iter().map(|v| v.abs()).fold(0.0, f64::max);
    vals.iter()
        .map(|v| v.abs())
        .filter(|v| *v > 1e-10 * scale)
        .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.min(v))))
        .ok_or_else(|| Error::Invariant("rate matrix has no decaying mode".into()))
}

/// Diagonal state of one collective block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DickeBlock {
    /// `2J`.
    pub j2: usize,
    /// Populations over `m = -J..J`.
    pub populations: Vec<f64>,
    pub gamma_plus: f64,
    pub gamma_minus: f64,
}

impl DickeBlock {
    pub fn new(j2: usize, populations: Vec<f64>, gamma_plus: f64, gamma_minus: f64) -> Result<Self> {
        if j2 == 0 {
            return Err(invalid("J", "J must be at least 1/2"));
        }
        if populations.len() != j2 + 1 {
            return Err(Error::DimensionMismatch {
                expected: j2 + 1,
                actual: populations.len(),
            });
        }
        if populations.iter().any(|p| !(p.is_finite() && *p >= -1e-12)) {
            return Err(invalid("populations", "populations must be non-negative"));
        }
        if (populations.iter().sum::<f64>() - 1.0).abs() > 1e-10 {
            return Err(invalid("populations", "populations must sum to one"));
        }
        if !(gamma_plus >= 0.0 && gamma_minus >= 0.0) {
            return Err(invalid("rates", "rates must be non-negative"));
        }
        Ok(Self {
            j2,
            populations,
            gamma_plus,
            gamma_minus,
        })
    }

    /// Principal block of `n_atoms` atoms starting in `|↑...↑>` (`m = J`).
    pub fn fully_excited(n_atoms: usize, gamma_plus: f64, gamma_minus: f64) -> Result<Self> {
        Self::level(n_atoms, n_atoms, gamma_plus, gamma_minus)
    }

    /// Principal block starting in the Dicke state with `i = J + m`.
    pub fn level(n_atoms: usize, i: usize, gamma_plus: f64, gamma_minus: f64) -> Result<Self> {
        if i > n_atoms {
            return Err(invalid("m", format!("level {i} outside 0..={n_atoms}")));
        }
        let mut p = vec![0.0; n_atoms + 1];
        p[i] = 1.0;
        Self::new(n_atoms, p, gamma_plus, gamma_minus)
    }

    pub fn from_rates(n_atoms: usize, rates: &RateSet) -> Result<Self> {
        Self::fully_excited(n_atoms, rates.gamma_plus, rates.gamma_minus)
    }

    pub fn rate_matrix(&self) -> Mat<f64> {
        block_rate_matrix(self.j2, self.gamma_plus, self.gamma_minus)
    }

    pub fn intensity(&self) -> f64 {
        intensity_of(self.j2, &self.populations)
    }
}

fn intensity_of(j2: usize, p: &[f64]) -> f64 {
    intensity_weights(j2).iter().zip(p).map(|(w, x)| w * x).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockTrajectory {
    pub times: Vec<f64>,
    pub populations: Vec<Vec<f64>>,
    pub intensity: Vec<f64>,
}

/// Populations and `<J₊J₋>` at each of `times` (sorted, non-negative).
pub fn evolve_block(block: &DickeBlock, times: &[f64]) -> Result<BlockTrajectory> {
    if times.iter().any(|t| !t.is_finite() || *t < 0.0) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(invalid("times", "times must be finite, non-negative and sorted"));
    }
    let r = block.rate_matrix();
    let n = block.j2 + 1;
    let mut p = block.populations.clone();
    let mut t_prev = 0.0;
    let mut cached: Option<(f64, Mat<f64>)> = None;
    let mut out = BlockTrajectory {
        times: times.to_vec(),
        populations: Vec::with_capacity(times.len()),
        intensity: Vec::with_capacity(times.len()),
    };
    for &t in times {
        let dt = t - t_prev;
        if dt > 0.0 {
            let reuse = cached.as_ref().is_some_and(|(h, _)| (h - dt).abs() <= 1e-14 * dt);
            if !reuse {
                let rdt = Mat::from_fn(n, n, |i, j| r[(i, j)] * dt);
                cached = Some((dt, expm(rdt.as_ref())));
            }
            let e = &cached.as_ref().expect("propagator cached above").1;
            p = (0..n).map(|i| (0..n).map(|j| e[(i, j)] * p[j]).sum()).collect();
            for x in &mut p {
                if *x < 0.0 {
                    *x = 0.0;
                }
            }
            let total: f64 = p.iter().sum();
            if (total - 1.0).abs() > 1e-10 {
                return Err(Error::Invariant(format!(
                    "block population drifted to {total} at t = {t}"
                )));
            }
        }
        t_prev = t;
        out.intensity.push(intensity_of(block.j2, &p));
        out.populations.push(p.clone());
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BurstMetrics {
    pub i_max: f64,
    pub t_peak: f64,
    /// `1/Δ`, with `Δ` the smallest nonzero decay rate of the rate matrix.
    pub t_r: f64,
    /// Time after the peak at which `|I - I_∞|` has fallen by `e`.
    pub e_folding_time: Option<f64>,
    /// False when `I(t)` has no interior maximum; `i_max` is then the
    /// largest sampled value.
    pub burst: bool,
}

/// Peak intensity, peak time and decay time of a block trajectory.
pub fn burst_metrics(block: &DickeBlock) -> Result<BurstMetrics> {
    let delta = relaxation_rate(&block.rate_matrix())?;
    let t_r = 1.0 / delta;
    let (lo, hi, n) = (1e-4 * t_r, 40.0 * t_r, 400);
    let mut times = vec![0.0];
    times.extend((0..=n).map(|k| lo * (hi / lo).powf(k as f64 / n as f64)));
    let traj = evolve_block(block, &times)?;
    let i = &traj.intensity;
    let (k, &peak) = i
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("trajectory is non-empty");
    let i_inf = *i.last().expect("trajectory is non-empty");
    let interior = k > 0 && k + 1 < i.len() && peak > i[0] && peak > i_inf * (1.0 + 1e-9);
    if !interior {
        return Ok(BurstMetrics {
            i_max: peak,
            t_peak: times[k],
            t_r,
            e_folding_time: None,
            burst: false,
        });
    }
    // golden-section search on the bracketing interval
    let at = |t: f64| -> Result<f64> { Ok(evolve_block(block, &[t])?.intensity[0]) };
    let (mut a, mut b) = (times[k - 1], times[k + 1]);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (at(c)?, at(d)?);
    while (b - a) > 1e-4 * times[k] {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = at(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = at(d)?;
        }
    }
    let t_peak = 0.5 * (a + b);
    let i_max = at(t_peak)?.max(peak);
    let target = (i_max - i_inf).abs() / std::f64::consts::E;
    let e_folding_time = times[k..]
        .iter()
        .zip(&i[k..])
        .find(|(_, v)| (*v - i_inf).abs() <= target)
        .map(|(t, _)| t - t_peak);
    Ok(BurstMetrics {
        i_max,
        t_peak,
        t_r,
        e_folding_time,
        burst: true,
    })
}

/// Decay time `1/Δ` of `N` independent atoms.
pub fn independent_decay_time(n_atoms: usize, gamma_plus: f64, gamma_minus: f64) -> Result<f64> {
    Ok(1.0 / relaxation_rate(&independent_rate_matrix(n_atoms, gamma_plus, gamma_minus))?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockSteadyState {
    pub populations: Vec<f64>,
    /// `Σ_m e^{θ m}` with `θ = ln(γ₊/γ₋)`, so `p_m = e^{θ m}/Z_J`.
    pub z_j: f64,
    pub theta: f64,
    pub detailed_balance_residual: f64,
    /// Set for the degenerate cases `γ₊ = γ₋` and a vanishing rate.
    pub limit: bool,
}

/// `sinh((N+1)x/2) / sinh(x/2)`, the partition sum over `m = -N/2..N/2`
/// with weight `e^{x m}`.
pub fn partition_function(n_atoms: usize, x: f64) -> f64 {
    if x == 0.0 {
        return (n_atoms + 1) as f64;
    }
    ((n_atoms + 1) as f64 * x / 2.0).sinh() / (x / 2.0).sinh()
}

/// Fixed point of the block rate equation.
pub fn block_steady_state(j2: usize, gamma_plus: f64, gamma_minus: f64) -> Result<BlockSteadyState> {
    if j2 == 0 {
        return Err(invalid("J", "J must be at least 1/2"));
    }
    if !(gamma_plus >= 0.0 && gamma_minus >= 0.0) || gamma_plus + gamma_minus == 0.0 {
        return Err(invalid("rates", "need non-negative rates, not both zero"));
    }
    let n = j2 + 1;
    let (populations, z_j, theta, limit) = if gamma_minus == 0.0 || gamma_plus == 0.0 {
        let mut p = vec![0.0; n];
        p[if gamma_minus == 0.0 { j2 } else { 0 }] = 1.0;
        let theta = if gamma_minus == 0.0 { f64::INFINITY } else { f64::NEG_INFINITY };
        (p, f64::INFINITY, theta, true)
    } else {
        let theta = (gamma_plus / gamma_minus).ln();
        // weights relative to the most populated end
        let top = if theta >= 0.0 { j2 as f64 } else { 0.0 };
        let w: Vec<f64> = (0..n).map(|i| (theta * (i as f64 - top)).exp()).collect();
        let s: f64 = w.iter().sum();
        let p = w.iter().map(|x| x / s).collect();
        (p, partition_function(j2, theta), theta, gamma_plus == gamma_minus)
    };
    let detailed_balance_residual = (0..j2)
        .map(|i| {
            (populations[i] * gamma_plus * up_weight(j2, i) - populations[i + 1] * gamma_minus * down_weight(j2, i + 1))
                .abs()
        })
        .fold(0.0, f64::max);
    Ok(BlockSteadyState {
        populations,
        z_j,
        theta,
        detailed_balance_residual,
        limit,
    })
}

/// `<J₊J₋>` in the steady state of block `j2`.
pub fn steady_intensity(j2: usize, gamma_plus: f64, gamma_minus: f64) -> Result<f64> {
    Ok(intensity_of(j2, &block_steady_state(j2, gamma_plus, gamma_minus)?.populations))
}

/// `<J₊J₋>` of `N` independent atoms in their Gibbs state.
pub fn independent_gibbs_intensity(n_atoms: usize, rates: &RateSet) -> f64 {
    n_atoms as f64 * rates.gamma_plus / (rates.gamma_plus + rates.gamma_minus)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntropyRegime {
    /// Independent atoms, `S = N S₁`.
    F0,
    /// Steady state of the principal block.
    F1Principal,
}

/// Steady-state entropy as a function of atom number.
pub fn entropy_vs_n(rates: &RateSet, n_values: &[usize], regime: EntropyRegime) -> Result<Vec<(usize, f64)>> {
    let total = rates.gamma_plus + rates.gamma_minus;
    let single = shannon_entropy(&[rates.gamma_plus / total, rates.gamma_minus / total]);
    n_values
        .iter()
        .map(|&n| {
            if !(1..=100).contains(&n) {
                return Err(invalid("N", format!("{n} outside 1..=100")));
            }
            let s = match regime {
                EntropyRegime::F0 => n as f64 * single,
                EntropyRegime::F1Principal => {
                    shannon_entropy(&block_steady_state(n, rates.gamma_plus, rates.gamma_minus)?.populations)
                }
            };
            Ok((n, s))
        })
        .collect()
}

/// Stretch of the trajectory where `|dI/d ln t| < threshold · I`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Plateau {
    pub start: f64,
    pub end: f64,
    /// Mean intensity over the plateau samples.
    pub value: f64,
}

/// Normalized log-derivative threshold for plateau detection.
pub const PLATEAU_THRESHOLD: f64 = 0.02;

/// Longest run (in `ln t`) where `|dI/d ln t| < threshold · I`.
///
/// Runs that touch either end of the grid are the pre-dynamics and the final
/// stationary tail, and are not reported. A mono-exponential trajectory
/// therefore has no plateau.
pub fn detect_plateau(times: &[f64], intensity: &[f64], threshold: f64) -> Option<Plateau> {
    let n = times.len();
    if n < 3 || intensity.len() != n {
        return None;
    }
    let flat: Vec<bool> = (1..n - 1)
        .map(|k| {
            let (t0, t1) = (times[k - 1], times[k + 1]);
            if t0 <= 0.0 || t1 <= t0 {
                return false;
            }
            let slope = (intensity[k + 1] - intensity[k - 1]) / (t1 / t0).ln();
            slope.abs() < threshold * intensity[k].abs()
        })
        .collect();
    let mut best: Option<(usize, usize)> = None;
    let mut k = 0;
    while k < flat.len() {
        if !flat[k] {
            k += 1;
            continue;
        }
        let s = k;
        while k < flat.len() && flat[k] {
            k += 1;
        }
        let e = k - 1;
        if s == 0 || k == flat.len() {
            continue;
        }
        let (a, b) = (s + 1, e + 1);
        let len = (times[b] / times[a]).ln();
        if best.is_none_or(|(x, y)| len > (times[y] / times[x]).ln()) {
            best = Some((a, b));
        }
    }
    let (a, b) = best?;
    if times[b] <= times[a] {
        return None;
    }
    let value = intensity[a..=b].iter().sum::<f64>() / (b - a + 1) as f64;
    Some(Plateau {
        start: times[a],
        end: times[b],
        value,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CascadeResult {
    pub times: Vec<f64>,
    pub intensity: Vec<f64>,
    pub peak_time: f64,
    pub peak_intensity: f64,
    /// Time for `I` to cover `1 - 1/e` of its rise from `I(0)` to the peak.
    /// `None` when the peak is the first sample.
    pub burst_efolding_time: Option<f64>,
    pub plateau: Option<Plateau>,
    /// Steady intensity of the principal block at `f_ab = 1`.
    pub gge_intensity: f64,
    /// Independent-atom Gibbs intensity.
    pub gibbs_intensity: f64,
}

/// `<J₊J₋>(t)` from `|↑...↑>` with the dense generator.
pub fn cascade_trajectory(rates: &RateSet, n_atoms: usize, times: &[f64]) -> Result<CascadeResult> {
    let sop: Superoperator = build_lindbladian(rates, n_atoms)?;
    let rho0 = DensityMatrix::all_up(n_atoms)?;
    let states = sop.propagator().evolve(&rho0, times)?;
    let op = intensity_operator(n_atoms);
    let intensity = states
        .iter()
        .map(|s| s.expectation(op.as_ref()).map(|z| z.re))
        .collect::<Result<Vec<f64>>>()?;
    let (k, &peak_intensity) = intensity
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| invalid("times", "empty time grid"))?;
    let i0 = intensity[0];
    let rise_target = i0 + (peak_intensity - i0) * (1.0 - (-1.0f64).exp());
    let burst_efolding_time = (k > 0).then(|| {
        times
            .iter()
            .zip(&intensity)
            .find(|(_, v)| **v >= rise_target)
            .map_or(times[k], |(t, _)| *t)
    });
    Ok(CascadeResult {
        plateau: detect_plateau(times, &intensity, PLATEAU_THRESHOLD),
        peak_time: times[k],
        peak_intensity,
        burst_efolding_time,
        gge_intensity: steady_intensity(n_atoms, rates.gamma_plus, rates.gamma_minus)?,
        gibbs_intensity: independent_gibbs_intensity(n_atoms, rates),
        times: times.to_vec(),
        intensity,
    })
}
