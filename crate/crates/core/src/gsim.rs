//! Lie-algebraic forward pass: outputs and gradients as linear algebra over
//! DLA-basis coefficients, at cost polynomial in dim(g) instead of 2^n.
//!
//! Convention: a gate with generator H at angle theta acts as U = e^{-i theta H},
//! and conjugation moves basis coefficients by `exp(-theta * M_H)` where M_H is
//! the bracket matrix of H. For a circuit whose gates apply to the state in
//! list order, the Heisenberg transport of an observable is
//! `A = E_1 E_2 ... E_D` with `E_k = exp(-theta_k M_k)`.
//!
//! This module deliberately stays off the dense-statevector path: it depends
//! only on the Pauli algebra and the DLA basis, never on 2^n-sized objects.

use crate::circuits::{AnsatzCircuit, Binding, Generator};
use crate::dla::{ad_matrix, DlaBasis, DlaError, StructureConstants};
use crate::pauli::HermitianPauliSum;
use nalgebra::{DMatrix, DVector};
use thiserror::Error;

/// Tolerance on the projection residual when requiring algebra membership.
pub const MEMBERSHIP_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GsimError {
    #[error("observable is not in the dynamical Lie algebra (residual {residual:.3e})")]
    ObservableNotInAlgebra { residual: f64 },
    #[error("got {got} parameter values, ansatz expects {expected}")]
    ParamDimMismatch { got: usize, expected: usize },
    #[error("ansatz gate {gate} has a non-trainable binding")]
    NonTrainableGate { gate: usize },
    #[error(transparent)]
    Dla(#[from] DlaError),
}

/// Per-gate bracket matrices M_k for an ansatz, fixed once per circuit.
#[derive(Debug, Clone)]
pub struct GateAdjoints {
    mats: Vec<DMatrix<f64>>,
    params: Vec<usize>,
    n_params: usize,
}

impl GateAdjoints {
    pub fn compute(
        ansatz: &AnsatzCircuit,
        basis: &DlaBasis,
        sc: &StructureConstants,
    ) -> Result<Self, GsimError> {
        let mut mats = Vec::with_capacity(ansatz.gates().len());
        let mut params = Vec::with_capacity(ansatz.gates().len());
        for (i, gate) in ansatz.gates().iter().enumerate() {
            let sum = match &gate.generator {
                Generator::PauliSum(s) => s,
                Generator::Dense(_) => return Err(GsimError::NonTrainableGate { gate: i }),
            };
            mats.push(ad_matrix(sum, basis, sc)?);
            match gate.binding {
                Binding::Trainable(k) => params.push(k),
                _ => return Err(GsimError::NonTrainableGate { gate: i }),
            }
        }
        Ok(Self { mats, params, n_params: ansatz.n_params() })
    }

    pub fn n_gates(&self) -> usize {
        self.mats.len()
    }
}

/// Transport factors of one parameter assignment: E_k = exp(-theta_k M_k)
/// with running prefix products P_k = E_1...E_k and suffix S_k = E_k...E_D.
#[derive(Debug, Clone)]
pub struct AdjointFactors {
    prefixes: Vec<DMatrix<f64>>,
    suffixes: Vec<DMatrix<f64>>,
    dim: usize,
}

impl AdjointFactors {
    pub fn compute(gates: &GateAdjoints, theta: &[f64]) -> Result<Self, GsimError> {
        if theta.len() != gates.n_params {
            return Err(GsimError::ParamDimMismatch {
                got: theta.len(),
                expected: gates.n_params,
            });
        }
        let dim = gates.mats.first().map_or(0, |m| m.nrows());
        let factors: Vec<DMatrix<f64>> = gates
            .mats
            .iter()
            .zip(&gates.params)
            .map(|(m, &k)| (m * (-theta[k])).exp())
            .collect();
        let eye = DMatrix::identity(dim, dim);
        let mut prefixes = vec![eye.clone()];
        for f in &factors {
            let last = prefixes.last().unwrap();
            prefixes.push(last * f);
        }
        let mut suffixes = vec![eye];
        for f in factors.iter().rev() {
            let last = suffixes.last().unwrap();
            suffixes.push(f * last);
        }
        suffixes.reverse();
        Ok(Self { prefixes, suffixes, dim })
    }

    /// Full transport A = E_1...E_D; coeffs(U^dag O U) = A * coeffs(O).
    pub fn adjoint(&self) -> &DMatrix<f64> {
        self.prefixes.last().unwrap()
    }

    /// dA/d(angle of gate i) = P_{i-1} (-M_i) E_i ... E_D.
    pub fn gate_derivative(&self, gates: &GateAdjoints, i: usize) -> DMatrix<f64> {
        &self.prefixes[i] * (&gates.mats[i] * -1.0) * &self.suffixes[i]
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// Project an observable onto the DLA basis, failing if it is not a member.
pub fn observable_coeffs(
    observable: &HermitianPauliSum,
    basis: &DlaBasis,
) -> Result<DVector<f64>, GsimError> {
    let (coeffs, residual) = basis.project(observable);
    if residual > MEMBERSHIP_TOL {
        return Err(GsimError::ObservableNotInAlgebra { residual });
    }
    Ok(coeffs)
}

/// f(x; theta) = e_snap . (A w) where w are observable coefficients.
pub fn model_output(
    factors: &AdjointFactors,
    e_snap: &DVector<f64>,
    w: &DVector<f64>,
) -> f64 {
    e_snap.dot(&(factors.adjoint() * w))
}

/// Rows chi^(k): gradient C_k = chi^(k) . e_snap, one row per parameter,
/// summing over all gates bound to that parameter.
pub fn chi_matrix(
    gates: &GateAdjoints,
    factors: &AdjointFactors,
    w: &DVector<f64>,
) -> DMatrix<f64> {
    let mut chi = DMatrix::zeros(gates.n_params, factors.dim);
    for i in 0..gates.n_gates() {
        let v = factors.gate_derivative(gates, i) * w;
        let k = gates.params[i];
        for (col, val) in v.iter().enumerate() {
            chi[(k, col)] += val;
        }
    }
    chi
}

/// Gradient of the model output with respect to theta via the transport
/// derivative; equals chi_matrix(..) * e_snap.
pub fn gsim_gradients(
    gates: &GateAdjoints,
    factors: &AdjointFactors,
    e_snap: &DVector<f64>,
    w: &DVector<f64>,
) -> DVector<f64> {
    chi_matrix(gates, factors, w) * e_snap
}
