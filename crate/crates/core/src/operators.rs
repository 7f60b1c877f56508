// Copyright 2026 The unruh-preth Authors
// SPDX-License-Identifier: Apache-2.0

//! Spin operators in the product Zeeman basis.
//!
//! Basis states are `|s_1 s_2 ... s_N>` in lexicographic order with `↑`
//! before `↓`. Atom 1 is the most significant bit of the basis index and a set
//! bit means `↓`, so index 0 is `|↑...↑>` and `σ_z = diag(1, -1)`.

use faer::{c64, Mat, MatRef};

use crate::linalg::kron;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    X,
    Y,
    Z,
}

pub fn pauli(p: Pauli) -> Mat<c64> {
    let (o, i, z) = (c64::new(1.0, 0.0), c64::new(0.0, 1.0), c64::new(0.0, 0.0));
    let entries = match p {
        Pauli::X => [[z, o], [o, z]],
        Pauli::Y => [[z, -i], [i, z]],
        Pauli::Z => [[o, z], [z, -o]],
    };
    Mat::from_fn(2, 2, |r, c| entries[r][c])
}

/// `σ_+ = |↑><↓|`.
pub fn sigma_plus() -> Mat<c64> {
    Mat::from_fn(2, 2, |r, c| {
        if (r, c) == (0, 1) {
            c64::new(1.0, 0.0)
        } else {
            c64::new(0.0, 0.0)
        }
    })
}

/// `σ_- = |↓><↑|`.
pub fn sigma_minus() -> Mat<c64> {
    Mat::from_fn(2, 2, |r, c| {
        if (r, c) == (1, 0) {
            c64::new(1.0, 0.0)
        } else {
            c64::new(0.0, 0.0)
        }
    })
}

/// Bit of atom `site` (0-based) inside a basis index.
#[inline]
pub fn site_bit(site: usize, n_atoms: usize) -> usize {
    1 << (n_atoms - 1 - site)
}

/// Number of `↑` spins in a basis index.
#[inline]
pub fn up_count(index: usize, n_atoms: usize) -> u32 {
    n_atoms as u32 - index.count_ones()
}

/// `I ⊗ ... ⊗ op ⊗ ... ⊗ I` with `op` on atom `site`.
pub fn embed(op: MatRef<'_, c64>, site: usize, n_atoms: usize) -> Mat<c64> {
    assert!(site < n_atoms);
    let id = Mat::<c64>::identity(2, 2);
    let mut out = Mat::<c64>::identity(1, 1);
    for a in 0..n_atoms {
        out = if a == site {
            kron(out.as_ref(), op)
        } else {
            kron(out.as_ref(), id.as_ref())
        };
    }
    out
}

fn collective(op: Mat<c64>, n_atoms: usize) -> Mat<c64> {
    let d = 1 << n_atoms;
    let mut out = Mat::<c64>::zeros(d, d);
    for site in 0..n_atoms {
        out += embed(op.as_ref(), site, n_atoms);
    }
    out
}

/// `J_+ = Σ_a σ_+^a`.
pub fn collective_raising(n_atoms: usize) -> Mat<c64> {
    collective(sigma_plus(), n_atoms)
}

/// `J_- = Σ_a σ_-^a`.
pub fn collective_lowering(n_atoms: usize) -> Mat<c64> {
    collective(sigma_minus(), n_atoms)
}

/// `J_z = Σ_a σ_z^a / 2`.
pub fn collective_z(n_atoms: usize) -> Mat<c64> {
    let d = 1 << n_atoms;
    Mat::from_fn(d, d, |i, j| {
        if i == j {
            c64::new(up_count(i, n_atoms) as f64 - n_atoms as f64 / 2.0, 0.0)
        } else {
            c64::new(0.0, 0.0)
        }
    })
}

/// Radiative intensity operator `J_+ J_-`.
pub fn intensity_operator(n_atoms: usize) -> Mat<c64> {
    collective_raising(n_atoms) * collective_lowering(n_atoms)
}

/// Permutation unitary exchanging atoms `a` and `b`.
pub fn swap_unitary(n_atoms: usize, a: usize, b: usize) -> Mat<c64> {
    let d = 1 << n_atoms;
    let (ba, bb) = (site_bit(a, n_atoms), site_bit(b, n_atoms));
    let image = |k: usize| {
        let (sa, sb) = (k & ba != 0, k & bb != 0);
        if sa == sb {
            k
        } else {
            k ^ ba ^ bb
        }
    };
    Mat::from_fn(d, d, |i, j| {
        if i == image(j) {
            c64::new(1.0, 0.0)
        } else {
            c64::new(0.0, 0.0)
        }
    })
}

/// Sparse form of a single-site ladder operator: entry `k` holds the basis
/// index that `|k>` is sent to, or `None` if `|k>` is annihilated.
pub(crate) fn raising_map(site: usize, n_atoms: usize) -> Vec<Option<usize>> {
    let bit = site_bit(site, n_atoms);
    (0..1usize << n_atoms)
        .map(|k| (k & bit != 0).then_some(k & !bit))
        .collect()
}

pub(crate) fn lowering_map(site: usize, n_atoms: usize) -> Vec<Option<usize>> {
    let bit = site_bit(site, n_atoms);
    (0..1usize << n_atoms)
        .map(|k| (k & bit == 0).then_some(k | bit))
        .collect()
}

/// Composition `outer ∘ inner` of two ladder maps.
pub(crate) fn compose(outer: &[Option<usize>], inner: &[Option<usize>]) -> Vec<Option<usize>> {
    inner.iter().map(|k| k.and_then(|k| outer[k])).collect()
}
