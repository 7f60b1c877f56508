// Copyright 2026 The unruh-preth Authors
// SPDX-License-Identifier: Apache-2.0

//! The vectorized `N`-atom Lindblad generator.
//!
//! States are column-stacked, `vec(ρ)[i + d·j] = ρ_ij`, so that
//! `vec(AρB) = (Bᵀ ⊗ A) vec(ρ)`. The generator is
//!
//! ```text
//! L(ρ) = Σ_ab c_ab γ₊ (σ₊ᵃ ρ σ₋ᵇ - ½{σ₋ᵇ σ₊ᵃ, ρ})
//!      + Σ_ab c_ab γ₋ (σ₋ᵃ ρ σ₊ᵇ - ½{σ₊ᵇ σ₋ᵃ, ρ})
//! ```
//!
//! with `c_aa = 1` and `c_ab = f_ab` for `a ≠ b`. No Hamiltonian part is
//! included.
//!
//! The generator conserves the coherence order `q = n↑(i) - n↑(j)` of a
//! matrix element `ρ_ij`, so it is block diagonal over `q`. Spectra, null
//! spaces and propagation are computed block by block; the result is the same
//! as for the full matrix.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use faer::linalg::solvers::DenseSolveCore;
use faer::{c64, Mat, MatRef, Scale};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{invalid, Error, Result};
use crate::integrate::{dopri5, Tolerance};
use crate::linalg::{eig_error, frobenius_c};
use crate::operators::{compose, lowering_map, raising_map, up_count};
use crate::rates::RateSet;
use crate::state::{DensityMatrix, StateTolerance};

/// Largest atom number accepted by the dense generator.
pub const MAX_DENSE_ATOMS: usize = 6;

/// Default zero tolerance, relative to the spectral radius.
pub const DEFAULT_ZERO_TOL: f64 = 1e-10;

/// Eigenbases with a larger condition number fall back to adaptive stepping.
pub const MAX_EIGENBASIS_CONDITION: f64 = 1e10;

/// A dense generator on column-stacked `N`-atom states.
#[derive(Debug, Clone)]
pub struct Superoperator {
    n_atoms: usize,
    hilbert_dim: usize,
    matrix: Mat<c64>,
    rates: RateSet,
    sectors: Vec<Sector>,
}

/// Indices of one coherence-order block.
#[derive(Debug, Clone)]
pub struct Sector {
    pub order: i32,
    pub indices: Vec<usize>,
}

fn scatter(
    m: &mut Mat<c64>,
    d: usize,
    coef: f64,
    left: &[Option<usize>],
    right: &[Option<usize>],
    anti: &[Option<usize>],
) {
    // A ρ B with A = left, B_{l j} = 1 iff l = right[j]
    for (k, r) in left.iter().enumerate() {
        let Some(r) = *r else { continue };
        for (j, l) in right.iter().enumerate() {
            let Some(l) = *l else { continue };
            m[(r + d * j, k + d * l)] += coef;
        }
    }
    // -½ X ρ
    for (k, r) in anti.iter().enumerate() {
        let Some(r) = *r else { continue };
        for l in 0..d {
            m[(r + d * l, k + d * l)] -= 0.5 * coef;
        }
    }
    // -½ ρ X
    for (j, l) in anti.iter().enumerate() {
        let Some(l) = *l else { continue };
        for k in 0..d {
            m[(k + d * j, k + d * l)] -= 0.5 * coef;
        }
    }
}

/// Builds the generator for `n_atoms` atoms with the given rates.
pub fn build_lindbladian(rates: &RateSet, n_atoms: usize) -> Result<Superoperator> {
    if !(1..=MAX_DENSE_ATOMS).contains(&n_atoms) {
        return Err(invalid(
            "n_atoms",
            format!("{n_atoms} outside the dense range 1..={MAX_DENSE_ATOMS}"),
        ));
    }
    rates.check_invariants(1e-12)?;
    let d = 1usize << n_atoms;
    let big = d * d;
    let mut m = Mat::<c64>::zeros(big, big);
    let raise: Vec<_> = (0..n_atoms).map(|a| raising_map(a, n_atoms)).collect();
    let lower: Vec<_> = (0..n_atoms).map(|a| lowering_map(a, n_atoms)).collect();
    for a in 0..n_atoms {
        for b in 0..n_atoms {
            let c = if a == b { 1.0 } else { rates.f_ab };
            if c == 0.0 {
                continue;
            }
            if rates.gamma_plus != 0.0 {
                let anti = compose(&lower[b], &raise[a]);
                scatter(&mut m, d, c * rates.gamma_plus, &raise[a], &lower[b], &anti);
            }
            if rates.gamma_minus != 0.0 {
                let anti = compose(&raise[b], &lower[a]);
                scatter(&mut m, d, c * rates.gamma_minus, &lower[a], &raise[b], &anti);
            }
        }
    }
    let mut by_order: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
    for j in 0..d {
        for i in 0..d {
            let q = up_count(i, n_atoms) as i32 - up_count(j, n_atoms) as i32;
            by_order.entry(q).or_default().push(i + d * j);
        }
    }
    let sectors = by_order
        .into_iter()
        .map(|(order, indices)| Sector { order, indices })
        .collect();
    Ok(Superoperator {
        n_atoms,
        hilbert_dim: d,
        matrix: m,
        rates: *rates,
        sectors,
    })
}

/// Eigenvalue summary of a generator.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    /// Sorted by descending real part, then descending imaginary part.
    pub eigenvalues: Vec<c64>,
    pub zero_count: usize,
    /// `|Re λ|` of the nonzero eigenvalue with the largest real part.
    pub adr: f64,
    /// Ratio between the slowest decay rate outside the slow cluster and the
    /// fastest inside it. The slow cluster holds the nonzero modes whose rate
    /// is at most ten times the ADR. `None` if every mode is in the cluster.
    pub gap_to_slow_cluster: Option<f64>,
    /// Threshold actually used to classify zero modes.
    pub zero_threshold: f64,
}

impl SpectrumReport {
    /// Decay rates `|Re λ|` of the nonzero modes, ascending.
    pub fn decay_rates(&self) -> Vec<f64> {
        let mut r: Vec<f64> = self
            .eigenvalues
            .iter()
            .filter(|z| z.norm() >= self.zero_threshold)
            .map(|z| z.re.abs())
            .collect();
        r.sort_by(f64::total_cmp);
        r
    }

    pub fn max_imaginary(&self) -> f64 {
        self.eigenvalues.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }
}

impl Serialize for SpectrumReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = self.eigenvalues.iter().map(|z| [z.re, z.im]).collect();
        let mut s = serializer.serialize_struct("SpectrumReport", 4)?;
        s.serialize_field("eigenvalues", &pairs)?;
        s.serialize_field("zero_count", &self.zero_count)?;
        s.serialize_field("adr", &self.adr)?;
        s.serialize_field("gap_to_slow_cluster", &self.gap_to_slow_cluster)?;
        s.end()
    }
}

impl Superoperator {
    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn hilbert_dim(&self) -> usize {
        self.hilbert_dim
    }

    pub fn rates(&self) -> &RateSet {
        &self.rates
    }

    pub fn matrix(&self) -> MatRef<'_, c64> {
        self.matrix.as_ref()
    }

    pub fn sectors(&self) -> &[Sector] {
        &self.sectors
    }

    fn sector_matrix(&self, s: &Sector) -> Mat<c64> {
        let idx = &s.indices;
        Mat::from_fn(idx.len(), idx.len(), |i, j| self.matrix[(idx[i], idx[j])])
    }

    /// Largest entry coupling two different coherence orders. Zero by
    /// construction.
    pub fn off_sector_leakage(&self) -> f64 {
        let dim = self.matrix.nrows();
        let mut order = vec![0usize; dim];
        for (k, s) in self.sectors.iter().enumerate() {
            for &i in &s.indices {
                order[i] = k;
            }
        }
        let mut worst = 0.0f64;
        for j in 0..dim {
            for i in 0..dim {
                if order[i] != order[j] {
                    worst = worst.max(self.matrix[(i, j)].norm());
                }
            }
        }
        worst
    }

    /// Largest entry of `vec(I)† L`; zero for a trace-preserving generator.
    pub fn trace_defect(&self) -> f64 {
        let d = self.hilbert_dim;
        (0..self.matrix.ncols())
            .map(|k| (0..d).map(|i| self.matrix[(i + d * i, k)]).sum::<c64>().norm())
            .fold(0.0, f64::max)
    }

    /// `L(ρ)` as a matrix.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<Mat<c64>> {
        self.check_state(rho)?;
        let v = rho.vectorize();
        let d = self.hilbert_dim;
        let mut out = Mat::<c64>::zeros(d, d);
        for (k, x) in v.iter().enumerate() {
            if *x == c64::new(0.0, 0.0) {
                continue;
            }
            for r in 0..d * d {
                let l = self.matrix[(r, k)];
                if l != c64::new(0.0, 0.0) {
                    out[(r % d, r / d)] += l * x;
                }
            }
        }
        Ok(out)
    }

    fn check_state(&self, rho: &DensityMatrix) -> Result<()> {
        if rho.dim() != self.hilbert_dim {
            return Err(Error::DimensionMismatch {
                expected: self.hilbert_dim,
                actual: rho.dim(),
            });
        }
        Ok(())
    }

    /// Full eigenvalue spectrum.
    pub fn spectrum(&self, zero_tol: f64) -> Result<SpectrumReport> {
        let mut eigenvalues = Vec::with_capacity(self.matrix.nrows());
        for s in &self.sectors {
            let m = self.sector_matrix(s);
            eigenvalues.extend(m.eigenvalues().map_err(|e| eig_error(m.as_ref(), e))?);
        }
        eigenvalues.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
        let radius = eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let threshold = zero_tol * radius;
        let zero_count = eigenvalues.iter().filter(|z| z.norm() < threshold).count();
        if zero_count == 0 {
            return Err(Error::Invariant(format!(
                "no zero eigenvalue below {threshold:.3e}; generator is not trace preserving"
            )));
        }
        if let Some(z) = eigenvalues.iter().find(|z| z.re > threshold.max(1e-10)) {
            return Err(Error::Invariant(format!("eigenvalue {z} has positive real part")));
        }
        let mut report = SpectrumReport {
            eigenvalues,
            zero_count,
            adr: 0.0,
            gap_to_slow_cluster: None,
            zero_threshold: threshold,
        };
        let rates = report.decay_rates();
        report.adr = *rates
            .first()
            .ok_or_else(|| Error::Invariant("generator has no decaying mode".into()))?;
        let cluster_edge = 10.0 * report.adr;
        let inside = rates.iter().filter(|&&r| r <= cluster_edge).fold(0.0, |a: f64, &r| a.max(r));
        report.gap_to_slow_cluster = rates.iter().find(|&&r| r > cluster_edge).map(|r| r / inside);
        if self.n_atoms == 2 && report.max_imaginary() > 1e-9 {
            return Err(Error::Invariant(format!(
                "two-atom spectrum has imaginary part {:.3e}",
                report.max_imaginary()
            )));
        }
        Ok(report)
    }

    /// Orthonormal right and left null-space bases, embedded in the full
    /// vectorized space.
    fn null_space(&self, zero_tol: f64) -> Result<(Mat<c64>, Mat<c64>)> {
        let mut right: Vec<Vec<c64>> = Vec::new();
        let mut left: Vec<Vec<c64>> = Vec::new();
        let big = self.matrix.nrows();
        let mut decomps = Vec::with_capacity(self.sectors.len());
        let mut sigma_max = 0.0f64;
        for s in &self.sectors {
            let m = self.sector_matrix(s);
            let svd = m.svd().map_err(|e| eig_error(m.as_ref(), e))?;
            let sv: Vec<f64> = svd.S().column_vector().iter().map(|z| z.re).collect();
            sigma_max = sv.iter().copied().fold(sigma_max, f64::max);
            decomps.push((sv, svd.U().to_owned(), svd.V().to_owned()));
        }
        let threshold = zero_tol * sigma_max;
        for (s, (sv, u, v)) in self.sectors.iter().zip(&decomps) {
            for (k, &x) in sv.iter().enumerate() {
                if x < threshold {
                    let mut r = vec![c64::new(0.0, 0.0); big];
                    let mut l = vec![c64::new(0.0, 0.0); big];
                    for (p, &i) in s.indices.iter().enumerate() {
                        r[i] = v[(p, k)];
                        l[i] = u[(p, k)];
                    }
                    right.push(r);
                    left.push(l);
                }
            }
        }
        let n = right.len();
        Ok((
            Mat::from_fn(big, n, |i, k| right[k][i]),
            Mat::from_fn(big, n, |i, k| left[k][i]),
        ))
    }

    /// Steady states spanning the fixed-point set.
    ///
    /// With a unique fixed point the single null vector is reshaped,
    /// Hermitized and normalized to unit trace. With several, the asymptotic
    /// projector is applied to a spanning set of density matrices and a
    /// linearly independent subset of the images is returned; every element
    /// is then a physical state.
    pub fn steady_states(&self, zero_tol: f64) -> Result<Vec<DensityMatrix>> {
        let spectrum = self.spectrum(zero_tol)?;
        let (right, left) = self.null_space(zero_tol)?;
        let k = right.ncols();
        if k != spectrum.zero_count {
            return Err(Error::NullSpace {
                expected: spectrum.zero_count,
                found: k,
            });
        }
        let d = self.hilbert_dim;
        if k == 1 {
            let v: Vec<c64> = (0..d * d).map(|i| right[(i, 0)]).collect();
            let raw = DensityMatrix::from_vector_unchecked(&v)?.hermitized();
            let tr = raw.trace().re;
            if tr.abs() < 1e-12 {
                return Err(Error::Invariant("steady null vector is traceless".into()));
            }
            let scaled = raw.into_matrix() * Scale(c64::new(1.0 / tr, 0.0));
            return Ok(vec![DensityMatrix::new(scaled, StateTolerance::EVOLVED)?]);
        }
        let projector = AsymptoticProjector::new(right, left)?;
        let mut chosen: Vec<Vec<c64>> = Vec::new();
        let mut basis: Vec<Vec<c64>> = Vec::new();
        for amps in spanning_pure_states(d) {
            let image = projector.apply_pure(&amps, d);
            let mut residual = image.clone();
            for b in &basis {
                let overlap: c64 = b.iter().zip(&residual).map(|(x, y)| x.conj() * y).sum();
                for (r, x) in residual.iter_mut().zip(b) {
                    *r -= overlap * x;
                }
            }
            let norm = residual.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm > 1e-8 {
                basis.push(residual.iter().map(|z| z / norm).collect());
                chosen.push(image);
                if chosen.len() == k {
                    break;
                }
            }
        }
        if chosen.len() != k {
            return Err(Error::NullSpace {
                expected: k,
                found: chosen.len(),
            });
        }
        chosen
            .iter()
            .map(|v| {
                let m = DensityMatrix::from_vector_unchecked(v)?.hermitized();
                DensityMatrix::new(m.into_matrix(), StateTolerance::EVOLVED)
            })
            .collect()
    }

    /// Asymptotic state `lim_{t→∞} e^{Lt} ρ`.
    pub fn asymptotic_state(&self, rho: &DensityMatrix, zero_tol: f64) -> Result<DensityMatrix> {
        self.check_state(rho)?;
        let (right, left) = self.null_space(zero_tol)?;
        let projector = AsymptoticProjector::new(right, left)?;
        let v = projector.apply(&rho.vectorize());
        let m = DensityMatrix::from_vector_unchecked(&v)?.hermitized();
        DensityMatrix::new(m.into_matrix(), StateTolerance::EVOLVED)
    }

    pub fn propagator(&self) -> Propagator<'_> {
        Propagator::new(self, EvolveMethod::Auto)
    }
}

/// Pure states whose projectors span all Hermitian matrices, diagonal ones
/// first.
fn spanning_pure_states(d: usize) -> impl Iterator<Item = Vec<(usize, c64)>> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let diag = (0..d).map(|i| vec![(i, c64::new(1.0, 0.0))]);
    let pairs = (0..d).flat_map(move |i| {
        (i + 1..d).flat_map(move |j| {
            [
                vec![(i, c64::new(s, 0.0)), (j, c64::new(s, 0.0))],
                vec![(i, c64::new(s, 0.0)), (j, c64::new(0.0, s))],
            ]
        })
    });
    diag.chain(pairs)
}

/// Oblique projector `R (W^† R)^{-1} W^†` onto the null space along the range.
struct AsymptoticProjector {
    right: Mat<c64>,
    left: Mat<c64>,
    gram_inv: Mat<c64>,
}

impl AsymptoticProjector {
    fn new(right: Mat<c64>, left: Mat<c64>) -> Result<Self> {
        let gram = left.adjoint() * &right;
        let lu = gram.partial_piv_lu();
        let gram_inv = lu.inverse();
        let residual = frobenius_c((&gram * &gram_inv - Mat::<c64>::identity(gram.nrows(), gram.nrows())).as_ref());
        if !residual.is_finite() || residual > 1e-6 {
            return Err(Error::Invariant(format!(
                "zero eigenvalue is not semisimple (projector residual {residual:.3e})"
            )));
        }
        Ok(Self { right, left, gram_inv })
    }

    fn project_coords(&self, coords: Vec<c64>) -> Vec<c64> {
        let k = self.right.ncols();
        let mixed: Vec<c64> = (0..k)
            .map(|a| (0..k).map(|b| self.gram_inv[(a, b)] * coords[b]).sum())
            .collect();
        (0..self.right.nrows())
            .map(|i| (0..k).map(|a| self.right[(i, a)] * mixed[a]).sum())
            .collect()
    }

    fn apply(&self, v: &[c64]) -> Vec<c64> {
        let k = self.left.ncols();
        let coords = (0..k)
            .map(|a| v.iter().enumerate().map(|(i, x)| self.left[(i, a)].conj() * x).sum())
            .collect();
        self.project_coords(coords)
    }

    /// Image of `|ψ><ψ|` for a sparse amplitude list.
    fn apply_pure(&self, amps: &[(usize, c64)], d: usize) -> Vec<c64> {
        let k = self.left.ncols();
        let mut coords = vec![c64::new(0.0, 0.0); k];
        for &(i, ai) in amps {
            for &(j, aj) in amps {
                let x = ai * aj.conj();
                for (a, c) in coords.iter_mut().enumerate() {
                    *c += self.left[(i + d * j, a)].conj() * x;
                }
            }
        }
        self.project_coords(coords)
    }
}

/// Time-evolution strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EvolveMethod {
    /// Spectral propagation unless the eigenbasis is ill conditioned.
    #[default]
    Auto,
    Spectral,
    Adaptive,
}

enum SectorPropagator {
    Spectral {
        values: Vec<c64>,
        vectors: Mat<c64>,
        inverse: Mat<c64>,
    },
    Adaptive {
        matrix: Mat<c64>,
    },
}

/// Reusable propagator; sector decompositions are computed on first use.
pub struct Propagator<'a> {
    sop: &'a Superoperator,
    method: EvolveMethod,
    tolerance: Tolerance,
    cache: Vec<OnceLock<SectorPropagator>>,
}

/// Condition number `‖V‖_F ‖V⁻¹‖_F` of an eigenbasis.
fn condition(v: MatRef<'_, c64>, inv: MatRef<'_, c64>) -> f64 {
    frobenius_c(v) * frobenius_c(inv)
}

impl<'a> Propagator<'a> {
    pub fn new(sop: &'a Superoperator, method: EvolveMethod) -> Self {
        Self {
            sop,
            method,
            tolerance: Tolerance::default(),
            cache: sop.sectors.iter().map(|_| OnceLock::new()).collect(),
        }
    }

    pub fn with_tolerance(mut self, tolerance: Tolerance) -> Self {
        self.tolerance = tolerance;
        self
    }

    fn sector(&self, k: usize) -> &SectorPropagator {
        self.cache[k].get_or_init(|| {
            let matrix = self.sop.sector_matrix(&self.sop.sectors[k]);
            if self.method == EvolveMethod::Adaptive {
                return SectorPropagator::Adaptive { matrix };
            }
            let Ok(evd) = matrix.eigen() else {
                return SectorPropagator::Adaptive { matrix };
            };
            let vectors = evd.U().to_owned();
            let inverse = vectors.partial_piv_lu().inverse();
            let kappa = condition(vectors.as_ref(), inverse.as_ref());
            if self.method == EvolveMethod::Auto && !(kappa <= MAX_EIGENBASIS_CONDITION) {
                return SectorPropagator::Adaptive { matrix };
            }
            SectorPropagator::Spectral {
                values: evd.S().column_vector().iter().copied().collect(),
                vectors,
                inverse,
            }
        })
    }

    /// Whether sector `k` propagates spectrally. Forces its decomposition.
    pub fn is_spectral(&self, k: usize) -> bool {
        matches!(self.sector(k), SectorPropagator::Spectral { .. })
    }

    /// `ρ(t)` for every entry of `times`, starting from `ρ(0) = rho0`.
    pub fn evolve(&self, rho0: &DensityMatrix, times: &[f64]) -> Result<Vec<DensityMatrix>> {
        self.sop.check_state(rho0)?;
        if times.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(invalid("times", "times must be finite and non-negative"));
        }
        if times.windows(2).any(|w| w[1] < w[0]) {
            return Err(invalid("times", "times must be sorted ascending"));
        }
        let x = rho0.vectorize();
        let big = x.len();
        let mut out = vec![vec![c64::new(0.0, 0.0); big]; times.len()];
        for (k, s) in self.sop.sectors.iter().enumerate() {
            let xs: Vec<c64> = s.indices.iter().map(|&i| x[i]).collect();
            if xs.iter().all(|z| *z == c64::new(0.0, 0.0)) {
                continue;
            }
            let traj = self.evolve_sector(k, &xs, times)?;
            for (slot, ys) in out.iter_mut().zip(traj) {
                for (&i, y) in s.indices.iter().zip(ys) {
                    slot[i] = y;
                }
            }
        }
        out.iter()
            .zip(times)
            .map(|(v, &t)| {
                let rho = DensityMatrix::from_vector_unchecked(v)?;
                let d = rho.defects()?;
                if !d.within(StateTolerance::EVOLVED) {
                    return Err(Error::Invariant(format!(
                        "state at t = {t} violates invariants: hermiticity {:.3e}, trace {:.3e}, min eigenvalue {:.3e}",
                        d.hermiticity, d.trace, d.min_eigenvalue
                    )));
                }
                Ok(rho)
            })
            .collect()
    }

    fn evolve_sector(&self, k: usize, xs: &[c64], times: &[f64]) -> Result<Vec<Vec<c64>>> {
        match self.sector(k) {
            SectorPropagator::Spectral {
                values,
                vectors,
                inverse,
            } => {
                let n = xs.len();
                let coef: Vec<c64> = (0..n)
                    .map(|a| (0..n).map(|b| inverse[(a, b)] * xs[b]).sum())
                    .collect();
                Ok(times
                    .iter()
                    .map(|&t| {
                        let w: Vec<c64> = values.iter().zip(&coef).map(|(l, c)| (l * t).exp() * c).collect();
                        (0..n).map(|i| (0..n).map(|a| vectors[(i, a)] * w[a]).sum()).collect()
                    })
                    .collect())
            }
            SectorPropagator::Adaptive { matrix } => {
                let n = xs.len();
                let rhs = |y: &[c64], dy: &mut [c64]| {
                    for (i, slot) in dy.iter_mut().enumerate() {
                        *slot = (0..n).map(|j| matrix[(i, j)] * y[j]).sum();
                    }
                };
                let mut grid = Vec::with_capacity(times.len() + 1);
                grid.push(0.0);
                grid.extend_from_slice(times);
                let mut traj = dopri5(rhs, xs, &grid, self.tolerance)?;
                traj.remove(0);
                Ok(traj)
            }
        }
    }
}

/// `ρ(t)` at every entry of `times`.
pub fn evolve_dense(sop: &Superoperator, rho0: &DensityMatrix, times: &[f64]) -> Result<Vec<DensityMatrix>> {
    sop.propagator().evolve(rho0, times)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::kron;
    use crate::operators::{embed, sigma_minus, sigma_plus};
    use crate::rates::rates_from_gammas;

    /// Reference construction from dense Kronecker products.
    fn kron_lindbladian(rates: &RateSet, n: usize) -> Mat<c64> {
        let d = 1 << n;
        let id = Mat::<c64>::identity(d, d);
        let mut l = Mat::<c64>::zeros(d * d, d * d);
        let transpose = |m: &Mat<c64>| Mat::from_fn(d, d, |i, j| m[(j, i)]);
        for a in 0..n {
            for b in 0..n {
                let c = if a == b { 1.0 } else { rates.f_ab };
                for (g, x, y) in [
                    (rates.gamma_plus, sigma_plus(), sigma_minus()),
                    (rates.gamma_minus, sigma_minus(), sigma_plus()),
                ] {
                    let xa = embed(x.as_ref(), a, n);
                    let yb = embed(y.as_ref(), b, n);
                    let anti = &yb * &xa;
                    let w = c64::new(g * c, 0.0);
                    l += kron(transpose(&yb).as_ref(), xa.as_ref()) * Scale(w);
                    l -= kron(id.as_ref(), anti.as_ref()) * Scale(w * 0.5);
                    l -= kron(transpose(&anti).as_ref(), id.as_ref()) * Scale(w * 0.5);
                }
            }
        }
        l
    }

    #[test]
    fn scatter_matches_kronecker_construction() {
        for (n, f) in [(1, 1.0), (2, 0.7), (3, 0.3)] {
            let rates = rates_from_gammas(0.8, 0.2, f).unwrap();
            let sop = build_lindbladian(&rates, n).unwrap();
            let reference = kron_lindbladian(&rates, n);
            assert!(frobenius_c((sop.matrix() - &reference).as_ref()) < 1e-14);
            assert_eq!(sop.off_sector_leakage(), 0.0);
            assert!(sop.trace_defect() < 1e-14);
        }
    }

    #[test]
    fn single_atom_spectrum() {
        let rates = rates_from_gammas(0.8, 0.2, 1.0).unwrap();
        let s = build_lindbladian(&rates, 1).unwrap().spectrum(DEFAULT_ZERO_TOL).unwrap();
        let re: Vec<f64> = s.eigenvalues.iter().map(|z| z.re).collect();
        let expected = [0.0, -0.5, -0.5, -1.0];
        for (a, b) in re.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12, "{re:?}");
        }
        assert_eq!(s.zero_count, 1);
        assert!((s.adr - 0.5).abs() < 1e-12);
    }

    #[test]
    fn single_atom_steady_state() {
        let rates = rates_from_gammas(0.8, 0.2, 1.0).unwrap();
        let sop = build_lindbladian(&rates, 1).unwrap();
        let ss = sop.steady_states(DEFAULT_ZERO_TOL).unwrap();
        assert_eq!(ss.len(), 1);
        assert!((ss[0].matrix()[(0, 0)].re - 0.8).abs() < 1e-12);
        assert!((ss[0].matrix()[(1, 1)].re - 0.2).abs() < 1e-12);
    }

    #[test]
    fn rejects_out_of_range_atom_numbers() {
        let rates = rates_from_gammas(0.8, 0.2, 1.0).unwrap();
        assert!(build_lindbladian(&rates, 0).is_err());
        assert!(build_lindbladian(&rates, MAX_DENSE_ATOMS + 1).is_err());
    }

    #[test]
    fn spectral_and_adaptive_agree() {
        let rates = rates_from_gammas(0.8, 0.2, 0.6).unwrap();
        let sop = build_lindbladian(&rates, 2).unwrap();
        let rho0 = crate::state::DipolarState::Triplet0.density_matrix();
        let times = [0.0, 0.3, 2.0, 7.5];
        let a = Propagator::new(&sop, EvolveMethod::Spectral).evolve(&rho0, &times).unwrap();
        let b = Propagator::new(&sop, EvolveMethod::Adaptive).evolve(&rho0, &times).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!(x.frobenius_distance(y) < 1e-8);
        }
        assert!(a[0].frobenius_distance(&rho0) < 1e-12);
    }
}
