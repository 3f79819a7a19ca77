//! Weak breach: recover the snapshot e[beta] = Tr(B_beta rho(x)) from leaked
//! gradients. Each gradient component is linear in the snapshot,
//! C_k = chi^(k) . e, so stacking gradient queries gives a linear system.
//! A ratio variant handles gradients known only up to a common unknown factor
//! (e.g. an outer loss derivative): the ratios C_k / C_pivot cut the scale out
//! and leave a nullspace problem.

use crate::dla::DlaBasis;
use crate::pauli::{HermitianPauliSum, PauliString};
use nalgebra::{DMatrix, DVector};
use thiserror::Error;

/// Relative singular-value cutoff for rank decisions.
pub const RANK_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RecoveryError {
    #[error("{rows} gradient rows cannot determine a {dim}-dimensional snapshot")]
    Underdetermined { rows: usize, dim: usize },
    #[error("gradient system has rank {rank} < {dim}; snapshot is not identifiable")]
    RankDeficient { rank: usize, dim: usize },
    #[error("ratio system nullspace has dimension {dim}, expected 1")]
    NullspaceDim { dim: usize },
    #[error("gradient vector has {grads} entries but the system has {rows} rows")]
    ShapeMismatch { grads: usize, rows: usize },
    #[error("all gradient components vanish; no ratio pivot exists")]
    ZeroGradient,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryResult {
    /// Recovered snapshot coefficients in the DLA basis.
    pub snapshot: DVector<f64>,
    /// sigma_max / sigma_min of the solved system.
    pub condition_estimate: f64,
    /// True when only the direction of the snapshot is determined.
    pub up_to_scale: bool,
}

/// Solve chi * e = grads by least squares. `chi` stacks the per-parameter
/// rows of one or more gradient queries (same circuit, different theta).
pub fn recover_snapshot(
    chi: &DMatrix<f64>,
    grads: &DVector<f64>,
) -> Result<RecoveryResult, RecoveryError> {
    let (rows, dim) = chi.shape();
    if grads.len() != rows {
        return Err(RecoveryError::ShapeMismatch { grads: grads.len(), rows });
    }
    if rows < dim {
        return Err(RecoveryError::Underdetermined { rows, dim });
    }
    let svd = chi.clone().svd(true, true);
    let sigma_max = svd.singular_values.max();
    let rank = svd
        .singular_values
        .iter()
        .filter(|&&s| s > RANK_TOL * sigma_max)
        .count();
    if rank < dim {
        return Err(RecoveryError::RankDeficient { rank, dim });
    }
    let sigma_min = svd.singular_values.min();
    let snapshot = svd.solve(grads, 0.0).expect("u and v_t requested");
    Ok(RecoveryResult {
        snapshot,
        condition_estimate: sigma_max / sigma_min,
        up_to_scale: false,
    })
}

/// Solve from gradient ratios when the common scale of `grads` is unknown.
/// Takes the pivot with the largest |C_k|, forms rows
/// `chi^(k) - (C_k / C_pivot) chi^(pivot)`, and extracts the kernel. The
/// direction of the snapshot is always flagged `up_to_scale`; when the
/// identity lies in the algebra span, its coordinate is additionally pinned
/// exactly by Tr(rho) = 1 and only the traceless part keeps the unknown scale.
pub fn recover_snapshot_ratio(
    chi: &DMatrix<f64>,
    grads: &DVector<f64>,
    basis: &DlaBasis,
) -> Result<RecoveryResult, RecoveryError> {
    let (rows, dim) = chi.shape();
    if grads.len() != rows {
        return Err(RecoveryError::ShapeMismatch { grads: grads.len(), rows });
    }
    // need at least dim ratio rows so the thin SVD's V spans the kernel
    if rows < dim + 1 {
        return Err(RecoveryError::Underdetermined { rows, dim });
    }
    let pivot = (0..rows)
        .max_by(|&a, &b| grads[a].abs().total_cmp(&grads[b].abs()))
        .ok_or(RecoveryError::ZeroGradient)?;
    if grads[pivot].abs() < 1e-12 {
        return Err(RecoveryError::ZeroGradient);
    }
    let pivot_row = chi.row(pivot);
    let mut system = DMatrix::<f64>::zeros(rows - 1, dim);
    let mut out = 0;
    for k in 0..rows {
        if k == pivot {
            continue;
        }
        let ratio = grads[k] / grads[pivot];
        for col in 0..dim {
            system[(out, col)] = chi[(k, col)] - ratio * pivot_row[col];
        }
        out += 1;
    }
    let svd = system.svd(true, true);
    let sigma_max = svd.singular_values.max();
    let rank = svd
        .singular_values
        .iter()
        .filter(|&&s| s > RANK_TOL * sigma_max.max(1e-300))
        .count();
    let nullity = dim - rank;
    let condition_estimate = if rank > 0 {
        sigma_max / svd.singular_values[rank - 1]
    } else {
        1.0
    };
    let v_t = svd.v_t.as_ref().expect("v_t requested");
    let kernel_vec =
        |i: usize| DVector::from_iterator(dim, v_t.row(dim - 1 - i).iter().copied());

    // When the algebra contains the identity, its coefficient direction iota
    // always lies in the kernel too: conjugation fixes the identity and
    // brackets never produce it, so every gradient row is orthogonal to iota.
    // The kernel is then span{e, iota} and only the traceless part of e is
    // determined (up to scale); the identity coordinate itself is pinned
    // exactly by Tr(rho) = 1.
    let identity = HermitianPauliSum::single(PauliString::identity(basis.n_qubits()), 1.0);
    let (iota, residual) = basis.project(&identity);
    let has_identity = residual < 1e-10 && iota.norm() > 1e-10;

    if has_identity {
        if nullity != 2 {
            return Err(RecoveryError::NullspaceDim { dim: nullity });
        }
        let (v1, v2) = (kernel_vec(0), kernel_vec(1));
        // the kernel direction orthogonal to iota is the traceless part of e
        let mut t = (&v1 * iota.dot(&v2)) - (&v2 * iota.dot(&v1));
        t /= t.norm();
        // iota is unit norm, so the identity component of the true snapshot
        // along iota has coefficient Tr(rho) = 1
        let snapshot = &iota + t;
        return Ok(RecoveryResult { snapshot, condition_estimate, up_to_scale: true });
    }

    if nullity != 1 {
        return Err(RecoveryError::NullspaceDim { dim: nullity });
    }
    let mut e = kernel_vec(0);
    e /= e.norm();
    Ok(RecoveryResult { snapshot: e, condition_estimate, up_to_scale: true })
}
