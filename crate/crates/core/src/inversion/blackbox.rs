//! Black-box input search: minimize the squared mismatch between a target
//! snapshot (or gradient vector) and the one produced by candidate inputs,
//! using only forward evaluations.

use crate::circuits::{AnsatzCircuit, Binding, EncodingCircuit, Generator};
use crate::dla::DlaBasis;
use crate::oracle::{encode, snapshot_of, vqc_gradients};
use crate::pauli::HermitianPauliSum;
use nalgebra::DVector;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BlackboxError {
    #[error("grid would need {projected} evaluations, over the budget of {budget}")]
    BudgetExceeded { projected: u128, budget: u128 },
    #[error("bounds count {got} does not match input dimension {expected}")]
    BoundsMismatch { got: usize, expected: usize },
    #[error("empty search box on input {input}")]
    EmptyBox { input: usize },
    #[error("simulation failed: {0}")]
    Oracle(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub x: Vec<f64>,
    pub cost: f64,
    pub oracle_calls: usize,
}

/// Per-input Lipschitz bound on the encoded state: the sum over gates of
/// |scale| times the coefficient one-norm of the generator (an upper bound on
/// its spectral norm).
pub fn input_lipschitz(enc: &EncodingCircuit) -> Vec<f64> {
    let mut l = vec![0.0; enc.input_dim()];
    for gate in enc.gates() {
        if let Binding::Input { j, scale } = gate.binding {
            let norm = match &gate.generator {
                Generator::PauliSum(sum) => sum.terms().map(|(_, c)| c.abs()).sum::<f64>(),
                Generator::Dense(d) => d.matrix.norm(),
            };
            l[j] += scale.abs() * norm;
        }
    }
    l
}

fn snapshot_cost(
    enc: &EncodingCircuit,
    basis: &DlaBasis,
    target: &DVector<f64>,
    x: &[f64],
) -> Result<f64, BlackboxError> {
    let state = encode(enc, x).map_err(|e| BlackboxError::Oracle(e.to_string()))?;
    Ok((snapshot_of(&state, basis) - target).norm_squared())
}

/// Exhaustive grid search over a box. Cell counts per input follow the
/// Lipschitz bound: ceil(width * L_j / eps) cells, evaluated at centers. The
/// projected evaluation count is checked against `budget` before any oracle
/// call is made.
pub fn grid_search_invert(
    target: &DVector<f64>,
    enc: &EncodingCircuit,
    basis: &DlaBasis,
    bounds: &[(f64, f64)],
    eps: f64,
    budget: u128,
) -> Result<SearchResult, BlackboxError> {
    let d = enc.input_dim();
    if bounds.len() != d {
        return Err(BlackboxError::BoundsMismatch { got: bounds.len(), expected: d });
    }
    let lips = input_lipschitz(enc);
    let mut cells = Vec::with_capacity(d);
    let mut projected: u128 = 1;
    for (j, &(lo, hi)) in bounds.iter().enumerate() {
        if hi <= lo {
            return Err(BlackboxError::EmptyBox { input: j });
        }
        let c = (((hi - lo) * lips[j] / eps).ceil() as u128).max(1);
        cells.push(c);
        projected = projected.saturating_mul(c);
    }
    if projected > budget {
        return Err(BlackboxError::BudgetExceeded { projected, budget });
    }

    let mut x = vec![0.0; d];
    let mut idx = vec![0u128; d];
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut calls = 0usize;
    loop {
        for j in 0..d {
            let (lo, hi) = bounds[j];
            let width = (hi - lo) / cells[j] as f64;
            x[j] = lo + (idx[j] as f64 + 0.5) * width;
        }
        let f = snapshot_cost(enc, basis, target, &x)?;
        calls += 1;
        // strict < keeps the lexicographically first grid point on ties
        if best.as_ref().map_or(true, |(bf, _)| f < *bf) {
            best = Some((f, x.clone()));
        }
        // odometer increment, last input fastest
        let mut j = d;
        loop {
            if j == 0 {
                let (cost, x) = best.unwrap();
                return Ok(SearchResult { x, cost, oracle_calls: calls });
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] < cells[j] {
                break;
            }
            idx[j] = 0;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DescentParams {
    pub step: f64,
    pub iters: usize,
    pub restarts: usize,
    pub noise_radius: f64,
    pub fd_step: f64,
    pub stall_tol: f64,
}

impl Default for DescentParams {
    fn default() -> Self {
        DescentParams {
            step: 0.1,
            iters: 400,
            restarts: 4,
            noise_radius: 0.3,
            fd_step: 1e-5,
            stall_tol: 1e-7,
        }
    }
}

/// Gradient descent on a forward-only loss, with finite-difference gradients
/// and random kicks when the gradient stalls at a non-zero loss. Best effort:
/// returns the best iterate seen, never an error from non-convergence.
fn perturbed_descent(
    loss: &mut dyn FnMut(&[f64]) -> Result<f64, BlackboxError>,
    bounds: &[(f64, f64)],
    init: Option<&[f64]>,
    params: &DescentParams,
    seed: u64,
) -> Result<SearchResult, BlackboxError> {
    let d = bounds.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut calls = 0usize;
    let mut best: Option<(f64, Vec<f64>)> = None;
    for restart in 0..params.restarts.max(1) {
        let mut x: Vec<f64> = match (restart, init) {
            (0, Some(x0)) => x0.to_vec(),
            _ => bounds.iter().map(|&(lo, hi)| rng.gen_range(lo..hi)).collect(),
        };
        let mut f = loss(&x)?;
        calls += 1;
        let mut step = params.step;
        for _ in 0..params.iters {
            let mut grad = vec![0.0; d];
            for j in 0..d {
                let h = params.fd_step;
                let mut xp = x.clone();
                xp[j] += h;
                let mut xm = x.clone();
                xm[j] -= h;
                grad[j] = (loss(&xp)? - loss(&xm)?) / (2.0 * h);
                calls += 2;
            }
            let gnorm: f64 = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
            if gnorm < params.stall_tol {
                if f < params.stall_tol {
                    break;
                }
                for (j, xj) in x.iter_mut().enumerate() {
                    *xj += rng.gen_range(-params.noise_radius..params.noise_radius);
                    *xj = xj.clamp(bounds[j].0, bounds[j].1);
                }
                f = loss(&x)?;
                calls += 1;
            } else {
                // line search along the negative gradient: grow the step
                // while it keeps working, halve it when it overshoots
                step *= 2.0;
                loop {
                    let trial: Vec<f64> = x
                        .iter()
                        .enumerate()
                        .map(|(j, xj)| (xj - step * grad[j]).clamp(bounds[j].0, bounds[j].1))
                        .collect();
                    let ft = loss(&trial)?;
                    calls += 1;
                    if ft < f {
                        x = trial;
                        f = ft;
                        break;
                    }
                    step *= 0.5;
                    if step < 1e-12 {
                        break;
                    }
                }
            }
            if best.as_ref().map_or(true, |(bf, _)| f < *bf) {
                best = Some((f, x.clone()));
            }
        }
        if best.as_ref().map_or(true, |(bf, _)| f < *bf) {
            best = Some((f, x.clone()));
        }
    }
    let (cost, x) = best.unwrap();
    Ok(SearchResult { x, cost, oracle_calls: calls })
}

/// Perturbed gradient descent on the snapshot mismatch.
pub fn perturbed_gd_invert(
    target: &DVector<f64>,
    enc: &EncodingCircuit,
    basis: &DlaBasis,
    bounds: &[(f64, f64)],
    init: Option<&[f64]>,
    params: &DescentParams,
    seed: u64,
) -> Result<SearchResult, BlackboxError> {
    if bounds.len() != enc.input_dim() {
        return Err(BlackboxError::BoundsMismatch {
            got: bounds.len(),
            expected: enc.input_dim(),
        });
    }
    let mut loss = |x: &[f64]| snapshot_cost(enc, basis, target, x);
    perturbed_descent(&mut loss, bounds, init, params, seed)
}

/// Direct end-to-end recovery: find inputs whose full VQC gradient vector
/// matches the leaked one, skipping the snapshot stage entirely.
pub fn direct_input_recovery(
    leaked_gradients: &DVector<f64>,
    enc: &EncodingCircuit,
    ansatz: &AnsatzCircuit,
    observable: &HermitianPauliSum,
    theta: &[f64],
    bounds: &[(f64, f64)],
    init: Option<&[f64]>,
    params: &DescentParams,
    seed: u64,
) -> Result<SearchResult, BlackboxError> {
    if bounds.len() != enc.input_dim() {
        return Err(BlackboxError::BoundsMismatch {
            got: bounds.len(),
            expected: enc.input_dim(),
        });
    }
    let mut loss = |x: &[f64]| -> Result<f64, BlackboxError> {
        let g = vqc_gradients(enc, ansatz, observable, x, theta)
            .map_err(|e| BlackboxError::Oracle(e.to_string()))?;
        Ok((g - leaked_gradients).norm_squared())
    };
    perturbed_descent(&mut loss, bounds, init, params, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::pauli_product_map;
    use crate::dla::compute_dla_basis;
    use crate::pauli::{Axis, PauliString};
    use approx::assert_abs_diff_eq;

    fn su2_basis(n: usize) -> DlaBasis {
        let mut gens = Vec::new();
        for q in 0..n {
            gens.push(HermitianPauliSum::single(PauliString::single(n, q, Axis::X), 1.0));
            gens.push(HermitianPauliSum::single(PauliString::single(n, q, Axis::Y), 1.0));
        }
        compute_dla_basis(&gens, 256, 64).unwrap()
    }

    #[test]
    fn grid_search_one_dim() {
        let enc = pauli_product_map(1, Axis::X);
        let basis = su2_basis(1);
        let x_true = [1.234];
        let target = snapshot_of(&encode(&enc, &x_true).unwrap(), &basis);
        let eps = 1e-3;
        let bounds = [(0.0, std::f64::consts::PI)];
        let res = grid_search_invert(&target, &enc, &basis, &bounds, eps, 1 << 20).unwrap();
        // L = 0.5 for a half-angle Pauli rotation
        let expected_cells = ((std::f64::consts::PI * 0.5) / eps).ceil() as usize;
        assert_eq!(res.oracle_calls, expected_cells);
        let cell = std::f64::consts::PI / expected_cells as f64;
        assert!((res.x[0] - x_true[0]).abs() <= cell);
    }

    #[test]
    fn grid_refuses_large_budget() {
        let enc = pauli_product_map(8, Axis::X);
        let basis = su2_basis(8);
        let target = DVector::zeros(basis.dim());
        let bounds = vec![(0.0, std::f64::consts::PI); 8];
        let err = grid_search_invert(&target, &enc, &basis, &bounds, 1e-2, 100_000_000)
            .unwrap_err();
        match err {
            BlackboxError::BudgetExceeded { projected, .. } => {
                assert!(projected > 100_000_000);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn descent_recovers_near_start() {
        let enc = pauli_product_map(2, Axis::X);
        let basis = su2_basis(2);
        let x_true = [0.9, 2.0];
        let target = snapshot_of(&encode(&enc, &x_true).unwrap(), &basis);
        let bounds = [(0.0, std::f64::consts::PI); 2];
        let init = [0.5, 2.4];
        let params = DescentParams { iters: 600, restarts: 1, ..Default::default() };
        let res =
            perturbed_gd_invert(&target, &enc, &basis, &bounds, Some(&init), &params, 7)
                .unwrap();
        assert!(res.cost < 1e-8, "cost {}", res.cost);
        assert_abs_diff_eq!(res.x[0], x_true[0], epsilon = 1e-3);
        assert_abs_diff_eq!(res.x[1], x_true[1], epsilon = 1e-3);
    }

    #[test]
    fn direct_recovery_matches_gradients() {
        let n = 2;
        let enc = pauli_product_map(n, Axis::X);
        let ansatz = AnsatzCircuit::from_generators(
            n,
            vec![
                HermitianPauliSum::single(PauliString::single(n, 0, Axis::Y), 0.5),
                HermitianPauliSum::single(PauliString::single(n, 1, Axis::Y), 0.5),
            ],
        )
        .unwrap();
        let obs = HermitianPauliSum::single(PauliString::single(n, 0, Axis::Z), 1.0)
            .add(&HermitianPauliSum::single(PauliString::single(n, 1, Axis::Z), 1.0));
        let theta = [0.3, -0.4];
        let x_true = [1.1, 0.6];
        let leaked = vqc_gradients(&enc, &ansatz, &obs, &x_true, &theta).unwrap();
        let bounds = [(0.0, std::f64::consts::PI); 2];
        let init = [0.8, 0.9];
        let params = DescentParams { iters: 600, restarts: 1, ..Default::default() };
        let res = direct_input_recovery(
            &leaked, &enc, &ansatz, &obs, &theta, &bounds, Some(&init), &params, 11,
        )
        .unwrap();
        assert!(res.cost < 1e-8, "cost {}", res.cost);
        assert_abs_diff_eq!(res.x[0], x_true[0], epsilon = 1e-3);
    }

    #[test]
    fn bounds_mismatch() {
        let enc = pauli_product_map(2, Axis::X);
        let basis = su2_basis(2);
        let target = DVector::zeros(basis.dim());
        assert!(matches!(
            grid_search_invert(&target, &enc, &basis, &[(0.0, 1.0)], 1e-2, 1000),
            Err(BlackboxError::BoundsMismatch { .. })
        ));
    }
}
