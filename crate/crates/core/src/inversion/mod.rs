//! Strong breach: invert a recovered snapshot back to the classical input.
//!
//! Three routes, in increasing generality/cost:
//! - analytic arccos inversion for single-qubit Pauli-rotation encodings,
//!   via the intersection of the DLA with span{Z_q, W_q};
//! - trig interpolation + Chebyshev polynomial systems + Groebner elimination
//!   for separable encodings with small blocks;
//! - black-box search against the snapshot MSE (grid / perturbed descent),
//!   plus the classical linear-model baseline.

pub mod blackbox;
pub mod groebner;
pub mod poly;
pub mod trig;

use crate::circuits::{Binding, EncodingCircuit, Generator, PartitionBlock};
use crate::dla::DlaBasis;
use crate::pauli::{Axis, HermitianPauliSum, PauliString};
use nalgebra::{DMatrix, DVector};
use poly::{MonomialOrder, Poly};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;
use trig::{fit_trig, TrigPolynomial};

/// Singular values this close to 1 signal a subspace intersection.
pub const INTERSECTION_TOL: f64 = 1e-8;
/// arccos arguments may exceed [-1,1] by at most this before the snapshot is
/// declared inconsistent; smaller excesses are clamped.
pub const CLAMP_TOL: f64 = 1e-8;
/// Probe expectations below this count as identically zero.
pub const PROBE_TOL: f64 = 1e-9;
/// Residual bound for accepting a polynomial-system solution.
pub const SOLUTION_TOL: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InversionError {
    /// Algorithm FAILURE: the DLA has no overlap with the measurement span
    /// needed for this input.
    #[error("no DLA element overlaps span{{Z,W}} on any rotation encoding input {input}")]
    NoAlgebraOverlap { input: usize },
    #[error("input {input} is not encoded by any single-qubit Pauli rotation")]
    NoEncodingRotation { input: usize },
    #[error("arccos argument exceeds [-1,1] by {excess:.3e}; snapshot inconsistent")]
    InconsistentSnapshot { excess: f64 },
    /// Algorithm FAILURE: fewer block-local basis elements than unknowns.
    #[error("only {found} block-local snapshot entries for {needed} unknowns")]
    CardinalityFailure { found: usize, needed: usize },
    #[error("block has {dims} inputs; the polynomial solver caps at 2")]
    BlockTooLarge { dims: usize },
    #[error("input scale {scale} is not an integer frequency")]
    NonIntegerScale { scale: f64 },
    #[error("no real solution satisfies the polynomial system within tolerance")]
    NoRealSolution,
    #[error("all gradient components vanish")]
    ZeroGradient,
    #[error("gradient vector length {got} does not match 1 + 2 * {frequencies} features")]
    FeatureLengthMismatch { got: usize, frequencies: usize },
    #[error(transparent)]
    Groebner(#[from] groebner::GroebnerError),
    #[error(transparent)]
    Trig(#[from] trig::TrigError),
}

/// One recovered input component.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveredComponent {
    pub x: f64,
    /// True when the arccos argument needed clamping into [-1, 1].
    pub clamped: bool,
}

/// Solution of a block inversion, with every surviving candidate ranked by
/// residual (best first).
#[derive(Debug, Clone, PartialEq)]
pub struct BlockInversion {
    pub x_block: Vec<f64>,
    pub candidates: Vec<Vec<f64>>,
    pub ambiguity: usize,
    pub oracle_calls: usize,
}

fn clamp_unit(v: f64) -> Result<(f64, bool), InversionError> {
    if v.abs() <= 1.0 {
        Ok((v, false))
    } else if v.abs() <= 1.0 + CLAMP_TOL {
        Ok((v.clamp(-1.0, 1.0), true))
    } else {
        Err(InversionError::InconsistentSnapshot { excess: v.abs() - 1.0 })
    }
}

/// The rotations of `enc` binding input `j`: (qubit, axis, scale).
fn rotations_for_input(enc: &EncodingCircuit, j: usize) -> Vec<(usize, Axis, f64)> {
    let mut out = Vec::new();
    for gate in enc.gates() {
        let (jj, scale) = match gate.binding {
            Binding::Input { j: jj, scale } => (jj, scale),
            _ => continue,
        };
        if jj != j {
            continue;
        }
        if let Generator::PauliSum(sum) = &gate.generator {
            if sum.num_terms() == 1 {
                let (p, c) = sum.terms().next().unwrap();
                if p.weight() == 1 && (c - 0.5).abs() < 1e-12 {
                    let q = (0..p.n_qubits()).find(|&q| p.axis_on(q).is_some()).unwrap();
                    out.push((q, p.axis_on(q).unwrap(), scale));
                }
            }
        }
    }
    out
}

/// Analytic inversion for single-qubit Pauli-rotation encodings.
///
/// For each rotation carrying x_j (qubit q, axis X or Y), the reduced state
/// satisfies <Z_q> = cos(s x_j) and <W_q> = sigma sin(s x_j) with W = Y,
/// sigma = -1 for X rotations and W = X, sigma = +1 for Y rotations. The DLA
/// is intersected with span{Z_q, W_q} by SVD: a unit singular value yields an
/// algebra element whose snapshot contraction is K cos(s x_j - delta); two
/// unit values give both quadratures and a unique angle mod 2 pi.
pub fn invert_pauli_product(
    e: &DVector<f64>,
    basis: &DlaBasis,
    enc: &EncodingCircuit,
    j: usize,
) -> Result<RecoveredComponent, InversionError> {
    let rotations = rotations_for_input(enc, j);
    if rotations.is_empty() {
        return Err(InversionError::NoEncodingRotation { input: j });
    }
    let n = basis.n_qubits();
    for (q, axis, scale) in rotations {
        let (w_axis, sigma) = match axis {
            Axis::X => (Axis::Y, -1.0),
            Axis::Y => (Axis::X, 1.0),
            // a Z rotation leaves |0> invariant: no information
            Axis::Z => continue,
        };
        let z = HermitianPauliSum::single(PauliString::single(n, q, Axis::Z), 1.0);
        let w = HermitianPauliSum::single(PauliString::single(n, q, w_axis), 1.0);
        let (gz, rz) = basis.project(&z);
        let (gw, rw) = basis.project(&w);
        // rows of A^T C: components of Z_q and W_q over the DLA basis (the
        // Pauli strings themselves are the shared orthonormal frame)
        let mut m = DMatrix::<f64>::zeros(2, basis.dim());
        m.row_mut(0).copy_from(&gz.transpose());
        m.row_mut(1).copy_from(&gw.transpose());
        let svd = m.clone().svd(true, true);
        let unit: Vec<usize> = svd
            .singular_values
            .iter()
            .enumerate()
            .filter(|(_, &s)| (s - 1.0).abs() < INTERSECTION_TOL)
            .map(|(i, _)| i)
            .collect();
        let _ = (rz, rw);
        match unit.len() {
            0 => continue,
            2 => {
                // both quadratures available: unique angle mod 2 pi
                let c = gz.dot(e);
                let s = gw.dot(e);
                let phi = (sigma * s).atan2(c);
                return Ok(RecoveredComponent { x: phi / scale, clamped: false });
            }
            _ => {
                let u = svd.u.as_ref().expect("u requested");
                let col = unit[0];
                let (alpha, beta) = (u[(0, col)], u[(1, col)]);
                let gamma = &gz * alpha + &gw * beta;
                let val = gamma.dot(e);
                let k = alpha.hypot(beta);
                let delta = (sigma * beta).atan2(alpha);
                let (arg, clamped) = clamp_unit(val / k)?;
                let phi = arg.acos() + delta;
                return Ok(RecoveredComponent { x: phi / scale, clamped });
            }
        }
    }
    Err(InversionError::NoAlgebraOverlap { input: j })
}

/// Split a basis element into the part supported inside the qubit mask
/// (identity elsewhere) and the remainder.
fn split_by_block(
    b: &HermitianPauliSum,
    mask: u64,
) -> (HermitianPauliSum, HermitianPauliSum) {
    let n = b.n_qubits();
    let mut inside = HermitianPauliSum::zero(n);
    let mut outside = HermitianPauliSum::zero(n);
    for (p, c) in b.terms() {
        if (p.x_mask() | p.z_mask()) & !mask == 0 {
            inside = inside.add(&HermitianPauliSum::single(*p, c));
        } else {
            outside = outside.add(&HermitianPauliSum::single(*p, c));
        }
    }
    (inside, outside)
}

/// Separable-encoding block inversion: identify the snapshot entries that are
/// functions of the block inputs only, interpolate them as trig polynomials,
/// convert to a Chebyshev system in (u_j, v_j) and solve it by Groebner
/// elimination. `expectation` evaluates Tr(A rho(x')) at probe inputs; a
/// dense simulator stands in for the device.
pub fn invert_general_pauli(
    e: &DVector<f64>,
    basis: &DlaBasis,
    enc: &EncodingCircuit,
    block: &PartitionBlock,
    expectation: &dyn Fn(&HermitianPauliSum, &[f64]) -> f64,
) -> Result<BlockInversion, InversionError> {
    let dims = block.inputs.len();
    if dims == 0 || dims > 2 {
        return Err(InversionError::BlockTooLarge { dims });
    }
    let mask: u64 = block.qubits.iter().fold(0, |m, &q| m | (1 << q));
    let mut oracle_calls = 0usize;

    // probe inputs: block-local membership must hold identically, so test at
    // randomized points (fixed seed keeps runs reproducible)
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let probes: Vec<Vec<f64>> = (0..3)
        .map(|_| {
            (0..enc.input_dim())
                .map(|_| rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI))
                .collect()
        })
        .collect();

    let mut members: Vec<(usize, HermitianPauliSum)> = Vec::new();
    for (k, b) in basis.elements().iter().enumerate() {
        let (inside, outside) = split_by_block(b, mask);
        let mut outside_zero = true;
        let mut inside_seen = false;
        for probe in &probes {
            if !outside.is_zero() {
                oracle_calls += 1;
                if expectation(&outside, probe).abs() > PROBE_TOL {
                    outside_zero = false;
                    break;
                }
            }
            if !inside.is_zero() {
                oracle_calls += 1;
                if expectation(&inside, probe).abs() > PROBE_TOL {
                    inside_seen = true;
                }
            }
        }
        if outside_zero && inside_seen {
            members.push((k, inside));
        }
    }
    if members.len() < dims {
        return Err(InversionError::CardinalityFailure { found: members.len(), needed: dims });
    }

    // max total frequency per block input
    let mut r_max = 0i64;
    for &j in &block.inputs {
        let mut rj = 0i64;
        for (_, _, scale) in rotations_for_input(enc, j) {
            let rounded = scale.abs().round();
            if (scale.abs() - rounded).abs() > 1e-9 {
                return Err(InversionError::NonIntegerScale { scale });
            }
            rj += rounded as i64;
        }
        r_max = r_max.max(rj.max(1));
    }

    // interpolate each member on the canonical grid
    let grid = TrigPolynomial::sample_grid(dims, r_max);
    let mut system: Vec<Poly> = Vec::new();
    let n_vars = 2 * dims;
    for (k, inside) in &members {
        let samples: Vec<(Vec<f64>, f64)> = grid
            .iter()
            .map(|point| {
                let mut x = vec![0.0; enc.input_dim()];
                for (slot, &j) in block.inputs.iter().enumerate() {
                    x[j] = point[slot];
                }
                oracle_calls += 1;
                (point.clone(), expectation(inside, &x))
            })
            .collect();
        let tp = fit_trig(&samples, dims, r_max)?;
        let eq = tp
            .to_chebyshev_poly()
            .sub(&Poly::constant(n_vars, e[*k]))
            .pruned();
        if !eq.is_zero() {
            system.push(eq);
        }
    }
    // unit-circle constraints per input
    for d in 0..dims {
        let u = Poly::var(n_vars, 2 * d);
        let v = Poly::var(n_vars, 2 * d + 1);
        system.push(u.mul(&u).add(&v.mul(&v)).sub(&Poly::constant(n_vars, 1.0)));
    }

    // worst-case reduced-basis degree bound, doubly exponential in the
    // variable count
    let delta = (r_max as f64).powi(dims as i32);
    let q_exp = 1u32 << (n_vars.saturating_sub(2) as u32);
    let budget_f = 2.0 * (delta * delta / 2.0 + delta).powi(q_exp as i32);
    let budget = budget_f.min(u32::MAX as f64) as u32;

    let gb = groebner::buchberger(&system, MonomialOrder::Lex, budget)?;
    let raw = groebner::solve_lex_basis(&gb, 1e-7)?;

    // keep on-circle real candidates consistent with every equation
    let mut scored: Vec<(f64, Vec<f64>)> = Vec::new();
    for point in raw {
        if point.iter().any(|&c| c.abs() > 1.0 + CLAMP_TOL) {
            continue;
        }
        let residual: f64 = system.iter().map(|p| p.eval(&point).powi(2)).sum::<f64>().sqrt();
        if residual < SOLUTION_TOL {
            let x: Vec<f64> = (0..dims)
                .map(|d| point[2 * d + 1].atan2(point[2 * d]))
                .collect();
            scored.push((residual, x));
        }
    }
    if scored.is_empty() {
        return Err(InversionError::NoRealSolution);
    }
    scored.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.partial_cmp(&b.1).unwrap()));
    // merge duplicates (same angle to solver tolerance)
    let mut candidates: Vec<Vec<f64>> = Vec::new();
    for (_, x) in &scored {
        if !candidates
            .iter()
            .any(|c| c.iter().zip(x).all(|(a, b)| (a - b).abs() < 1e-6))
        {
            candidates.push(x.clone());
        }
    }
    Ok(BlockInversion {
        x_block: candidates[0].clone(),
        ambiguity: candidates.len(),
        candidates,
        oracle_calls,
    })
}

/// Unit-norm trigonometric feature map (1, cos w1 x, sin w1 x, ...)/sqrt(1+d).
pub fn trig_feature_map(x: f64, omegas: &[f64]) -> Vec<f64> {
    let norm = (1.0 + omegas.len() as f64).sqrt();
    let mut phi = Vec::with_capacity(1 + 2 * omegas.len());
    phi.push(1.0 / norm);
    for &w in omegas {
        phi.push((w * x).cos() / norm);
        phi.push((w * x).sin() / norm);
    }
    phi
}

/// Closed-form input recovery for the classical linear model on the trig
/// feature map. The leaked gradient is proportional to phi(x); unit norm plus
/// the known-positive constant feature fix it completely, and the lowest
/// usable frequency inverts to x.
pub fn classical_trig_recover(
    grads: &[f64],
    omegas: &[f64],
) -> Result<(Vec<f64>, RecoveredComponent), InversionError> {
    if grads.len() != 1 + 2 * omegas.len() {
        return Err(InversionError::FeatureLengthMismatch {
            got: grads.len(),
            frequencies: omegas.len(),
        });
    }
    let norm: f64 = grads.iter().map(|c| c * c).sum::<f64>().sqrt();
    if norm < 1e-14 {
        return Err(InversionError::ZeroGradient);
    }
    let mut phi: Vec<f64> = grads.iter().map(|c| c / norm).collect();
    if phi[0] < 0.0 {
        for p in phi.iter_mut() {
            *p = -*p;
        }
    }
    let scale = (1.0 + omegas.len() as f64).sqrt();
    // lowest usable frequency: smallest omega whose cos feature is in range
    let mut order: Vec<usize> = (0..omegas.len()).collect();
    order.sort_by(|&a, &b| omegas[a].total_cmp(&omegas[b]));
    for k in order {
        let c = phi[1 + 2 * k] * scale;
        match clamp_unit(c) {
            Ok((arg, clamped)) => {
                let x = arg.acos() / omegas[k];
                return Ok((phi, RecoveredComponent { x, clamped }));
            }
            Err(_) => continue,
        }
    }
    Err(InversionError::InconsistentSnapshot {
        excess: phi[1] * scale - 1.0,
    })
}

/// Periodicity-aware distance: the gap to the nearest lattice translate of x.
pub fn periodic_error(x_tilde: f64, x: f64, period: Option<f64>) -> f64 {
    match period {
        None => (x_tilde - x).abs(),
        Some(p) => {
            let d = (x_tilde - x).rem_euclid(p);
            d.min(p - d)
        }
    }
}
