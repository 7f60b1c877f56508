// Copyright 2026 The unruh-preth Authors
// SPDX-License-Identifier: Apache-2.0

//! Density matrices of `N` two-level atoms.

use std::fmt;
use std::str::FromStr;

use faer::{c64, Mat, MatRef};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};
use crate::linalg::{adjoint, frobenius_c, hermitian_eigenvalues, hermiticity_defect, kron, trace};

/// Tolerances used when checking that a matrix is a physical state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateTolerance {
    pub hermiticity: f64,
    pub trace: f64,
    pub min_eigenvalue: f64,
}

impl StateTolerance {
    /// Construction-time tolerances.
    pub const STRICT: Self = Self {
        hermiticity: 1e-12,
        trace: 1e-12,
        min_eigenvalue: 1e-10,
    };
    /// Tolerances applied to integrated trajectories.
    pub const EVOLVED: Self = Self {
        hermiticity: 1e-8,
        trace: 1e-8,
        min_eigenvalue: 1e-8,
    };
}

/// Measured violations of the density-matrix invariants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateDefects {
    pub hermiticity: f64,
    pub trace: f64,
    pub min_eigenvalue: f64,
}

impl StateDefects {
    pub fn within(&self, tol: StateTolerance) -> bool {
        self.hermiticity <= tol.hermiticity
            && self.trace <= tol.trace
            && self.min_eigenvalue >= -tol.min_eigenvalue
    }
}

/// A Hermitian, unit-trace, positive semidefinite operator on `(C^2)^{⊗N}`.
#[derive(Clone, PartialEq)]
pub struct DensityMatrix {
    n_atoms: usize,
    data: Mat<c64>,
}

impl fmt::Debug for DensityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DensityMatrix")
            .field("n_atoms", &self.n_atoms)
            .field("data", &self.data)
            .finish()
    }
}

fn atoms_for_dim(dim: usize) -> Result<usize> {
    if dim < 2 || !dim.is_power_of_two() {
        return Err(invalid("dim", format!("{dim} is not a power of two ≥ 2")));
    }
    Ok(dim.trailing_zeros() as usize)
}

impl DensityMatrix {
    /// Wraps `m` after checking the state invariants with `tol`.
    pub fn new(m: Mat<c64>, tol: StateTolerance) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                actual: m.ncols(),
            });
        }
        let rho = Self {
            n_atoms: atoms_for_dim(m.nrows())?,
            data: m,
        };
        let d = rho.defects()?;
        if !d.within(tol) {
            return Err(Error::Invariant(format!(
                "not a density matrix: hermiticity defect {:.3e}, trace defect {:.3e}, min eigenvalue {:.3e}",
                d.hermiticity, d.trace, d.min_eigenvalue
            )));
        }
        Ok(rho)
    }

    /// Wraps `m` without checks. Dimension must be `2^N`.
    pub fn from_matrix_unchecked(m: Mat<c64>) -> Result<Self> {
        Ok(Self {
            n_atoms: atoms_for_dim(m.nrows())?,
            data: m,
        })
    }

    /// `|ψ><ψ|` for a normalized-on-the-fly amplitude vector.
    pub fn pure(amplitudes: &[c64]) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(invalid("amplitudes", "zero or non-finite norm"));
        }
        let n = amplitudes.len();
        let m = Mat::from_fn(n, n, |i, j| amplitudes[i] * amplitudes[j].conj() / (norm * norm));
        Self::new(m, StateTolerance::STRICT)
    }

    /// Computational basis projector `|k><k|`.
    pub fn basis(n_atoms: usize, index: usize) -> Result<Self> {
        let d = 1usize << n_atoms;
        if index >= d {
            return Err(invalid("index", format!("{index} outside dimension {d}")));
        }
        let mut amps = vec![c64::new(0.0, 0.0); d];
        amps[index] = c64::new(1.0, 0.0);
        Self::pure(&amps)
    }

    /// `|↑...↑>`.
    pub fn all_up(n_atoms: usize) -> Result<Self> {
        Self::basis(n_atoms, 0)
    }

    /// `|↓...↓>`.
    pub fn all_down(n_atoms: usize) -> Result<Self> {
        Self::basis(n_atoms, (1usize << n_atoms) - 1)
    }

    pub fn maximally_mixed(n_atoms: usize) -> Self {
        let d = 1usize << n_atoms;
        Self {
            n_atoms,
            data: Mat::from_fn(d, d, |i, j| {
                if i == j {
                    c64::new(1.0 / d as f64, 0.0)
                } else {
                    c64::new(0.0, 0.0)
                }
            }),
        }
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn matrix(&self) -> MatRef<'_, c64> {
        self.data.as_ref()
    }

    pub fn into_matrix(self) -> Mat<c64> {
        self.data
    }

    pub fn trace(&self) -> c64 {
        trace(self.data.as_ref())
    }

    /// `Tr(op ρ)`.
    pub fn expectation(&self, op: MatRef<'_, c64>) -> Result<c64> {
        if op.nrows() != self.dim() || op.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: op.nrows(),
            });
        }
        let d = self.dim();
        let mut acc = c64::new(0.0, 0.0);
        for i in 0..d {
            for k in 0..d {
                acc += op[(i, k)] * self.data[(k, i)];
            }
        }
        Ok(acc)
    }

    /// `ρ ⊗ σ`.
    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            n_atoms: self.n_atoms + other.n_atoms,
            data: kron(self.data.as_ref(), other.data.as_ref()),
        }
    }

    /// `U ρ U^†`.
    pub fn conjugate_by(&self, u: MatRef<'_, c64>) -> Result<Self> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: u.nrows(),
            });
        }
        Ok(Self {
            n_atoms: self.n_atoms,
            data: u * &self.data * adjoint(u),
        })
    }

    /// `(ρ + ρ^†)/2`.
    pub fn hermitized(&self) -> Self {
        let adj = adjoint(self.data.as_ref());
        Self {
            n_atoms: self.n_atoms,
            data: Mat::from_fn(self.dim(), self.dim(), |i, j| (self.data[(i, j)] + adj[(i, j)]) * 0.5),
        }
    }

    pub fn frobenius_distance(&self, other: &Self) -> f64 {
        frobenius_c((&self.data - &other.data).as_ref())
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        hermitian_eigenvalues(self.hermitized().data.as_ref())
    }

    pub fn defects(&self) -> Result<StateDefects> {
        let min = self.eigenvalues()?.first().copied().unwrap_or(0.0);
        let tr = self.trace();
        Ok(StateDefects {
            hermiticity: hermiticity_defect(self.data.as_ref()),
            trace: (tr - c64::new(1.0, 0.0)).norm(),
            min_eigenvalue: min,
        })
    }

    /// Column-stacked vector `vec(ρ)`, index `i + d·j` for entry `(i, j)`.
    pub fn vectorize(&self) -> Vec<c64> {
        let d = self.dim();
        let mut v = Vec::with_capacity(d * d);
        for j in 0..d {
            for i in 0..d {
                v.push(self.data[(i, j)]);
            }
        }
        v
    }

    /// Inverse of [`DensityMatrix::vectorize`]; no invariant checks.
    pub fn from_vector_unchecked(v: &[c64]) -> Result<Self> {
        let d = (v.len() as f64).sqrt().round() as usize;
        if d * d != v.len() {
            return Err(invalid("vector", format!("length {} is not a square", v.len())));
        }
        Self::from_matrix_unchecked(Mat::from_fn(d, d, |i, j| v[i + d * j]))
    }
}

#[derive(Serialize, Deserialize)]
struct DensityMatrixJson {
    dim: usize,
    entries: Vec<[f64; 2]>,
}

impl Serialize for DensityMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let d = self.dim();
        let mut entries = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                let z = self.data[(i, j)];
                entries.push([z.re, z.im]);
            }
        }
        DensityMatrixJson { dim: d, entries }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = DensityMatrixJson::deserialize(deserializer)?;
        if raw.entries.len() != raw.dim * raw.dim {
            return Err(D::Error::custom(format!(
                "expected {} entries for dim {}, found {}",
                raw.dim * raw.dim,
                raw.dim,
                raw.entries.len()
            )));
        }
        let m = Mat::from_fn(raw.dim, raw.dim, |i, j| {
            let [re, im] = raw.entries[i * raw.dim + j];
            c64::new(re, im)
        });
        DensityMatrix::new(m, StateTolerance::STRICT).map_err(D::Error::custom)
    }
}

/// Two-atom states diagonal in the dipolar (triplet/singlet) basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DipolarState {
    UpUp,
    DownDown,
    #[serde(rename = "triplet0")]
    Triplet0,
    Singlet,
}

impl DipolarState {
    pub const ALL: [Self; 4] = [Self::UpUp, Self::DownDown, Self::Triplet0, Self::Singlet];

    pub fn label(self) -> &'static str {
        match self {
            Self::UpUp => "up_up",
            Self::DownDown => "down_down",
            Self::Triplet0 => "triplet0",
            Self::Singlet => "singlet",
        }
    }

    pub fn density_matrix(self) -> DensityMatrix {
        let (z, o) = (c64::new(0.0, 0.0), c64::new(1.0, 0.0));
        let amps = match self {
            Self::UpUp => [o, z, z, z],
            Self::DownDown => [z, z, z, o],
            Self::Triplet0 => [z, o, o, z],
            Self::Singlet => [z, o, -o, z],
        };
        DensityMatrix::pure(&amps).expect("dipolar amplitudes are normalizable")
    }
}

impl fmt::Display for DipolarState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for DipolarState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|d| d.label() == s)
            .ok_or_else(|| Error::UnknownLabel(s.to_owned()))
    }
}

/// Named two-atom state.
pub fn dipolar_basis_state(label: &str) -> Result<DensityMatrix> {
    Ok(label.parse::<DipolarState>()?.density_matrix())
}
