// Copyright 2026 The unruh-preth Authors
// SPDX-License-Identifier: Apache-2.0

//! State functionals: two-atom observables, purity, entropy and concurrence.

use faer::{c64, Mat};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, hermitian_eigenvalues, kron};
use crate::operators::{pauli, Pauli};
use crate::state::DensityMatrix;

/// Eigenvalues below this are treated as zero.
pub const EIGEN_CLIP: f64 = 1e-12;

/// All fifteen two-atom observables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FullObservables {
    /// `M_x, M_y, M_z`.
    pub m: [f64; 3],
    /// `M_xx, M_yy, M_zz`.
    pub mii: [f64; 3],
    /// `M_xy, M_xz, M_yz`.
    pub mij: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservableSet {
    pub mz: f64,
    pub mzz: f64,
    pub mc: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub full: Option<FullObservables>,
}

impl ObservableSet {
    pub fn new(mz: f64, mzz: f64, mc: f64) -> Self {
        Self {
            mz,
            mzz,
            mc,
            full: None,
        }
    }

    /// `M_xx + M_yy + M_zz`; requires the full set.
    pub fn spin_correlation_sum(&self) -> Option<f64> {
        self.full.map(|f| f.mii.iter().sum())
    }
}

fn two_site(a: Pauli, b: Pauli) -> Mat<c64> {
    kron(pauli(a).as_ref(), pauli(b).as_ref())
}

fn check_two_atoms(rho: &DensityMatrix) -> Result<()> {
    if rho.n_atoms() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            actual: rho.dim(),
        });
    }
    Ok(())
}

/// Observables of a two-atom state.
pub fn observables(rho: &DensityMatrix) -> Result<ObservableSet> {
    check_two_atoms(rho)?;
    let id = Mat::<c64>::identity(2, 2);
    let axes = [Pauli::X, Pauli::Y, Pauli::Z];
    let ex = |op: Mat<c64>| rho.expectation(op.as_ref()).map(|z| z.re);
    let mut full = FullObservables {
        m: [0.0; 3],
        mii: [0.0; 3],
        mij: [0.0; 3],
    };
    for (k, &p) in axes.iter().enumerate() {
        let s = pauli(p);
        let local = kron(s.as_ref(), id.as_ref()) + kron(id.as_ref(), s.as_ref());
        full.m[k] = 0.5 * ex(local)?;
        full.mii[k] = 0.25 * ex(two_site(p, p))?;
    }
    for (k, (a, b)) in [(0, 1), (0, 2), (1, 2)].into_iter().enumerate() {
        let sym = two_site(axes[a], axes[b]) + two_site(axes[b], axes[a]);
        full.mij[k] = 0.25 * ex(sym)?;
    }
    Ok(ObservableSet {
        mz: full.m[2],
        mzz: full.mii[2],
        mc: full.mii[0] + full.mii[1],
        full: Some(full),
    })
}

/// `Tr(ρ²)`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    let m = rho.matrix();
    let d = rho.dim();
    let mut acc = 0.0;
    for i in 0..d {
        for k in 0..d {
            acc += (m[(i, k)] * m[(k, i)]).re;
        }
    }
    acc
}

/// Shannon entropy in nats of a probability vector, with `0 ln 0 = 0`.
pub fn shannon_entropy(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.ln()).sum()
}

/// `-Tr(ρ ln ρ)` in nats. Eigenvalues below [`EIGEN_CLIP`] count as zero.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let mut p = rho.eigenvalues()?;
    p.retain(|&x| x > EIGEN_CLIP);
    Ok(shannon_entropy(&p))
}

/// Wootters concurrence.
pub fn concurrence_wootters(rho: &DensityMatrix) -> Result<f64> {
    check_two_atoms(rho)?;
    let (vals, vecs) = hermitian_eigen(rho.hermitized().matrix())?;
    // √ρ from the clipped spectrum
    let d = 4;
    let sqrt_rho = Mat::from_fn(d, d, |i, j| {
        (0..d)
            .map(|k| vecs[(i, k)] * vecs[(j, k)].conj() * vals[k].max(0.0).sqrt())
            .sum::<c64>()
    });
    let yy = two_site(Pauli::Y, Pauli::Y);
    let conj = Mat::from_fn(d, d, |i, j| rho.matrix()[(i, j)].conj());
    let tilde = &yy * conj * &yy;
    let r = &sqrt_rho * tilde * &sqrt_rho;
    let herm = Mat::from_fn(d, d, |i, j| (r[(i, j)] + r[(j, i)].conj()) * 0.5);
    let mut lambdas: Vec<f64> = hermitian_eigenvalues(herm.as_ref())?
        .into_iter()
        .map(|x| if x < EIGEN_CLIP { 0.0 } else { x.sqrt() })
        .collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
}

/// Concurrence computed from `(M_z, M_zz, M_c)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ObservableConcurrence {
    pub value: f64,
    /// Set when the radicand was negative, i.e. the observables do not come
    /// from the sector the formula assumes.
    pub radicand_negative: bool,
}

pub fn concurrence_observable(obs: &ObservableSet) -> ObservableConcurrence {
    let radicand = (1.0 + 4.0 * obs.mzz).powi(2) - 4.0 * obs.mz * obs.mz;
    let negative = radicand < 0.0;
    let root = if negative { 0.0 } else { radicand.sqrt() };
    ObservableConcurrence {
        value: (2.0 * obs.mc.abs() - 0.5 * root).max(0.0),
        radicand_negative: negative,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::DipolarState;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() < tol, "{a} vs {b}");
    }

    #[test]
    fn dipolar_observables() {
        let cases = [
            (DipolarState::UpUp, (1.0, 0.25, 0.0)),
            (DipolarState::DownDown, (-1.0, 0.25, 0.0)),
            (DipolarState::Triplet0, (0.0, -0.25, 0.5)),
            (DipolarState::Singlet, (0.0, -0.25, -0.5)),
        ];
        for (s, (mz, mzz, mc)) in cases {
            let o = observables(&s.density_matrix()).unwrap();
            close(o.mz, mz, 1e-15);
            close(o.mzz, mzz, 1e-15);
            close(o.mc, mc, 1e-15);
        }
        let up_down = DensityMatrix::basis(2, 1).unwrap();
        let o = observables(&up_down).unwrap();
        assert_eq!((o.mz, o.mzz, o.mc), (0.0, -0.25, 0.0));
    }

    #[test]
    fn purity_and_entropy_examples() {
        let mixed = DensityMatrix::maximally_mixed(2);
        close(purity(&mixed), 0.25, 1e-15);
        close(von_neumann_entropy(&DensityMatrix::maximally_mixed(1)).unwrap(), 2f64.ln(), 1e-14);
        close(von_neumann_entropy(&DipolarState::Singlet.density_matrix()).unwrap(), 0.0, 1e-12);
        close(purity(&DipolarState::UpUp.density_matrix()), 1.0, 1e-15);
        let m0 = 0.6;
        let single = DensityMatrix::new(
            Mat::from_fn(2, 2, |i, j| {
                let p = if i == 0 { (1.0 + m0) / 2.0 } else { (1.0 - m0) / 2.0 };
                c64::new(if i == j { p } else { 0.0 }, 0.0)
            }),
            crate::state::StateTolerance::STRICT,
        )
        .unwrap();
        close(von_neumann_entropy(&single).unwrap(), -0.8 * 0.8f64.ln() - 0.2 * 0.2f64.ln(), 1e-14);
        close(purity(&single.tensor(&single)), 0.4624, 1e-14);
    }

    #[test]
    fn concurrence_examples() {
        close(concurrence_wootters(&DipolarState::Singlet.density_matrix()).unwrap(), 1.0, 1e-10);
        close(concurrence_wootters(&DipolarState::Triplet0.density_matrix()).unwrap(), 1.0, 1e-10);
        close(concurrence_wootters(&DensityMatrix::basis(2, 1).unwrap()).unwrap(), 0.0, 1e-12);
        let singlet = DipolarState::Singlet.density_matrix();
        let werner = Mat::from_fn(4, 4, |i, j| {
            let id = if i == j { 0.025 } else { 0.0 };
            singlet.matrix()[(i, j)] * 0.9 + c64::new(id, 0.0)
        });
        let werner = DensityMatrix::new(werner, crate::state::StateTolerance::STRICT).unwrap();
        close(concurrence_wootters(&werner).unwrap(), 0.85, 1e-10);
    }

    #[test]
    fn observable_concurrence_examples() {
        let c = concurrence_observable(&ObservableSet::new(0.0, -0.25, -0.5));
        close(c.value, 1.0, 1e-15);
        let c = concurrence_observable(&ObservableSet::new(1.0, 0.25, 0.0));
        close(c.value, 0.0, 1e-15);
        assert!(!c.radicand_negative);
        let c = concurrence_observable(&ObservableSet::new(0.6, 0.09, 0.0));
        // 2·0 − ½√0.41 < 0 is clipped; the radicand itself is positive
        assert_eq!(c.value, 0.0);
        assert!(!c.radicand_negative);
        let c = concurrence_observable(&ObservableSet::new(1.0, -0.25, 0.0));
        assert!(c.radicand_negative);
    }

    #[test]
    fn rejects_wrong_dimension() {
        let rho = DensityMatrix::all_up(3).unwrap();
        assert!(observables(&rho).is_err());
        assert!(concurrence_wootters(&rho).is_err());
    }
}
