//! Dense statevector simulator. This is the ground-truth side of every
//! experiment: it produces states, snapshots, model outputs, and gradients by
//! direct 2^n linear algebra, and the Lie-algebraic fast path is validated
//! against it.

use crate::circuits::{AnsatzCircuit, Binding, EncodingCircuit, Gate, Generator};
use crate::dla::DlaBasis;
use crate::pauli::{HermitianPauliSum, PauliString, DENSE_CAP};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

/// Finite-difference step used when parameter-shift does not apply.
pub const FD_STEP: f64 = 1e-5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("state on {0} qubits exceeds the dense cap of {DENSE_CAP} qubits")]
    DenseCapExceeded(usize),
    #[error("got {got} input values, circuit expects {expected}")]
    InputDimMismatch { got: usize, expected: usize },
    #[error("got {got} parameter values, ansatz expects {expected}")]
    ParamDimMismatch { got: usize, expected: usize },
    #[error("circuit acts on {got} qubits, state has {expected}")]
    QubitCountMismatch { got: usize, expected: usize },
    #[error(transparent)]
    Pauli(#[from] crate::pauli::PauliError),
}

/// Pure n-qubit state, amplitudes indexed with qubit 0 as the most
/// significant bit.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    n_qubits: usize,
    amps: DVector<Complex64>,
}

impl QuantumState {
    pub fn zero_state(n_qubits: usize) -> Result<Self, OracleError> {
        if n_qubits > DENSE_CAP {
            return Err(OracleError::DenseCapExceeded(n_qubits));
        }
        let dim = 1usize << n_qubits;
        let mut amps = DVector::zeros(dim);
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    /// Overlap magnitude squared |<self|other>|^2.
    pub fn fidelity(&self, other: &QuantumState) -> f64 {
        self.amps.dotc(&other.amps).norm_sqr()
    }

    /// |psi> -> P|psi> for a single Pauli string.
    fn apply_pauli(&mut self, p: &PauliString) {
        let (ix, iz) = p.index_masks();
        let y_count = (p.x_mask() & p.z_mask()).count_ones();
        let base = Complex64::i().powu(y_count);
        let dim = self.amps.len() as u64;
        let mut out = DVector::zeros(dim as usize);
        for col in 0..dim {
            let sign = if (col & iz).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            out[(col ^ ix) as usize] = base * sign * self.amps[col as usize];
        }
        self.amps = out;
    }

    /// |psi> -> exp(-i angle c P)|psi> = cos(c angle)|psi> - i sin(c angle) P|psi>.
    fn apply_pauli_rotation(&mut self, p: &PauliString, coeff: f64, angle: f64) {
        let phi = coeff * angle;
        let mut rotated = self.clone();
        rotated.apply_pauli(p);
        let c = Complex64::new(phi.cos(), 0.0);
        let s = Complex64::new(0.0, -phi.sin());
        self.amps = &self.amps * c + rotated.amps * s;
    }

    /// Apply a 2^k x 2^k unitary to the listed qubits (first listed qubit is
    /// the most significant bit of the block index).
    fn apply_block_unitary(&mut self, qubits: &[usize], u: &DMatrix<Complex64>) {
        let k = qubits.len();
        let block = 1usize << k;
        debug_assert_eq!(u.nrows(), block);
        // basis-index bit position of each listed qubit
        let bits: Vec<usize> = qubits.iter().map(|&q| self.n_qubits - 1 - q).collect();
        let full_mask: u64 = bits.iter().fold(0, |m, &b| m | (1 << b));
        let dim = self.amps.len() as u64;
        let mut scratch = vec![Complex64::default(); block];
        let mut base = 0u64;
        while base < dim {
            if base & full_mask != 0 {
                base += 1;
                continue;
            }
            // gather the block amplitudes for this assignment of spectator qubits
            let index_of = |local: usize| -> usize {
                let mut idx = base;
                for (i, &b) in bits.iter().enumerate() {
                    if (local >> (k - 1 - i)) & 1 == 1 {
                        idx |= 1 << b;
                    }
                }
                idx as usize
            };
            for (local, slot) in scratch.iter_mut().enumerate() {
                *slot = self.amps[index_of(local)];
            }
            for row in 0..block {
                let mut acc = Complex64::default();
                for (col, &v) in scratch.iter().enumerate() {
                    acc += u[(row, col)] * v;
                }
                self.amps[index_of(row)] = acc;
            }
            base += 1;
        }
    }

    /// Apply one gate at the given angle.
    pub fn apply_gate(&mut self, gate: &Gate, angle: f64) -> Result<(), OracleError> {
        match &gate.generator {
            Generator::PauliSum(sum) => {
                if sum.n_qubits() != self.n_qubits {
                    return Err(OracleError::QubitCountMismatch {
                        got: sum.n_qubits(),
                        expected: self.n_qubits,
                    });
                }
                if sum.num_terms() == 1 {
                    let (p, c) = sum.terms().next().unwrap();
                    self.apply_pauli_rotation(&p, c, angle);
                } else {
                    let h = sum.to_dense()?;
                    let u = (h * Complex64::new(0.0, -angle)).exp();
                    self.amps = u * &self.amps;
                }
            }
            Generator::Dense(d) => {
                let u = (&d.matrix * Complex64::new(0.0, -angle)).exp();
                self.apply_block_unitary(&d.qubits, &u);
            }
        }
        Ok(())
    }

    /// <psi|P|psi>.
    pub fn expectation_string(&self, p: &PauliString) -> f64 {
        let mut rotated = self.clone();
        rotated.apply_pauli(p);
        self.amps.dotc(&rotated.amps).re
    }

    /// <psi|A|psi> for a Hermitian Pauli sum.
    pub fn expectation(&self, a: &HermitianPauliSum) -> f64 {
        a.terms().map(|(p, c)| c * self.expectation_string(&p)).sum()
    }
}

/// Run the encoding circuit on |0...0>.
pub fn encode(circuit: &EncodingCircuit, x: &[f64]) -> Result<QuantumState, OracleError> {
    if x.len() != circuit.input_dim() {
        return Err(OracleError::InputDimMismatch {
            got: x.len(),
            expected: circuit.input_dim(),
        });
    }
    let mut state = QuantumState::zero_state(circuit.n_qubits())?;
    for gate in circuit.gates() {
        state.apply_gate(gate, gate.angle(x, &[]))?;
    }
    Ok(state)
}

/// Apply the ansatz at parameters theta.
pub fn apply_ansatz(
    state: &mut QuantumState,
    ansatz: &AnsatzCircuit,
    theta: &[f64],
) -> Result<(), OracleError> {
    if theta.len() != ansatz.n_params() {
        return Err(OracleError::ParamDimMismatch {
            got: theta.len(),
            expected: ansatz.n_params(),
        });
    }
    for gate in ansatz.gates() {
        state.apply_gate(gate, gate.angle(&[], theta))?;
    }
    Ok(())
}

/// Snapshot of a state in a DLA basis: e[beta] = <psi|B_beta|psi>.
pub fn snapshot_of(state: &QuantumState, basis: &DlaBasis) -> DVector<f64> {
    DVector::from_iterator(
        basis.dim(),
        basis.elements().iter().map(|b| state.expectation(b)),
    )
}

/// Model output f(x; theta) = <0|V(x)^dag U(theta)^dag O U(theta) V(x)|0>.
pub fn vqc_output(
    encoding: &EncodingCircuit,
    ansatz: &AnsatzCircuit,
    observable: &HermitianPauliSum,
    x: &[f64],
    theta: &[f64],
) -> Result<f64, OracleError> {
    let mut state = encode(encoding, x)?;
    apply_ansatz(&mut state, ansatz, theta)?;
    Ok(state.expectation(observable))
}

/// Output with one gate's angle shifted by delta on top of its binding.
fn output_with_gate_shift(
    encoding: &EncodingCircuit,
    ansatz: &AnsatzCircuit,
    observable: &HermitianPauliSum,
    x: &[f64],
    theta: &[f64],
    gate_idx: usize,
    delta: f64,
) -> Result<f64, OracleError> {
    let mut state = encode(encoding, x)?;
    for (i, gate) in ansatz.gates().iter().enumerate() {
        let mut angle = gate.angle(&[], theta);
        if i == gate_idx {
            angle += delta;
        }
        state.apply_gate(gate, angle)?;
    }
    Ok(state.expectation(observable))
}

/// Gradient of the model output with respect to theta. Gates whose generator
/// is a single Pauli string c*P use the exact two-point parameter-shift rule;
/// anything else falls back to central finite differences with step `FD_STEP`.
pub fn vqc_gradients(
    encoding: &EncodingCircuit,
    ansatz: &AnsatzCircuit,
    observable: &HermitianPauliSum,
    x: &[f64],
    theta: &[f64],
) -> Result<DVector<f64>, OracleError> {
    if theta.len() != ansatz.n_params() {
        return Err(OracleError::ParamDimMismatch {
            got: theta.len(),
            expected: ansatz.n_params(),
        });
    }
    let mut grad = DVector::zeros(theta.len());
    for (i, gate) in ansatz.gates().iter().enumerate() {
        let k = match gate.binding {
            Binding::Trainable(k) => k,
            _ => continue,
        };
        let single = match &gate.generator {
            Generator::PauliSum(sum) if sum.num_terms() == 1 => {
                Some(sum.terms().next().unwrap().1)
            }
            _ => None,
        };
        grad[k] += match single {
            Some(c) => {
                let shift = std::f64::consts::FRAC_PI_4 / c;
                let plus = output_with_gate_shift(encoding, ansatz, observable, x, theta, i, shift)?;
                let minus =
                    output_with_gate_shift(encoding, ansatz, observable, x, theta, i, -shift)?;
                c * (plus - minus)
            }
            None => {
                let plus =
                    output_with_gate_shift(encoding, ansatz, observable, x, theta, i, FD_STEP)?;
                let minus =
                    output_with_gate_shift(encoding, ansatz, observable, x, theta, i, -FD_STEP)?;
                (plus - minus) / (2.0 * FD_STEP)
            }
        };
    }
    Ok(grad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::{
        fourier_tower_map, pauli_product_map, random_hermitian_encoder, DenseHermitian,
    };
    use crate::dla::compute_dla_basis;
    use crate::pauli::Axis;
    use approx::assert_abs_diff_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn sum(n: usize, s: &str, c: f64) -> HermitianPauliSum {
        HermitianPauliSum::single(s.parse().unwrap(), c).scaled(1.0).add_scaled(
            &HermitianPauliSum::zero(n),
            0.0,
        )
    }

    #[test]
    fn product_map_marginals() {
        let n = 3;
        let enc = pauli_product_map(n, Axis::X);
        let x = [0.3, 1.1, 2.4];
        let state = encode(&enc, &x).unwrap();
        assert_abs_diff_eq!(state.norm(), 1.0, epsilon = 1e-12);
        for q in 0..n {
            let z = HermitianPauliSum::single(PauliString::single(n, q, Axis::Z), 1.0);
            let y = HermitianPauliSum::single(PauliString::single(n, q, Axis::Y), 1.0);
            assert_abs_diff_eq!(state.expectation(&z), x[q].cos(), epsilon = 1e-12);
            assert_abs_diff_eq!(state.expectation(&y), -x[q].sin(), epsilon = 1e-12);
        }
    }

    #[test]
    fn tower_map_harmonics() {
        // qubit (0, l) of the base-5 tower sees angle 5^l x
        let enc = fourier_tower_map(1, 2, 5.0);
        let x = [0.7];
        let state = encode(&enc, &x).unwrap();
        let z1 = HermitianPauliSum::single(PauliString::single(2, 1, Axis::Z), 1.0);
        assert_abs_diff_eq!(state.expectation(&z1), (5.0 * x[0]).cos(), epsilon = 1e-12);
    }

    #[test]
    fn separable_encoding_factorizes() {
        // state of the 2-input tower = kron of single-input towers
        let enc = fourier_tower_map(2, 2, 5.0);
        let x = [0.4, -1.3];
        let full = encode(&enc, &x).unwrap();
        let single = fourier_tower_map(1, 2, 5.0);
        let a = encode(&single, &x[..1]).unwrap();
        let b = encode(&single, &x[1..]).unwrap();
        let product = a.amplitudes().kronecker(b.amplitudes());
        let overlap = product.dotc(full.amplitudes()).norm_sqr();
        assert_abs_diff_eq!(overlap, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn block_unitary_matches_full_embedding() {
        // dense gate on qubits {2, 0} of 3 qubits vs dense multiply of the
        // embedded unitary built by index bookkeeping
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = crate::circuits::gue_hermitian(2, &mut rng);
        let u = (&h * Complex64::new(0.0, -0.37)).exp();
        let n = 3;
        let qubits = vec![2usize, 0usize];

        let mut state = QuantumState::zero_state(n).unwrap();
        // random initial state
        for a in state.amps.iter_mut() {
            *a = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        }
        let norm = state.amps.norm();
        state.amps /= Complex64::new(norm, 0.0);
        let before = state.clone();
        state.apply_block_unitary(&qubits, &u);

        // embed: local bit 1 (msb) <-> qubit 2, local bit 0 <-> qubit 0
        let dim = 1usize << n;
        let mut full = DMatrix::<Complex64>::zeros(dim, dim);
        let bit_of = |idx: usize, q: usize| (idx >> (n - 1 - q)) & 1;
        for row in 0..dim {
            for col in 0..dim {
                if bit_of(row, 1) != bit_of(col, 1) {
                    continue;
                }
                let lr = (bit_of(row, 2) << 1) | bit_of(row, 0);
                let lc = (bit_of(col, 2) << 1) | bit_of(col, 0);
                full[(row, col)] = u[(lr, lc)];
            }
        }
        let expected = full * before.amplitudes();
        assert_abs_diff_eq!((expected - state.amplitudes()).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn pauli_rotation_matches_dense_exponential() {
        let n = 2;
        let p: PauliString = "XY".parse().unwrap();
        let angle = 0.83;
        let coeff = 0.5;
        let mut state = encode(&pauli_product_map(n, Axis::Y), &[0.2, 1.4]).unwrap();
        let mut dense_state = state.clone();
        state.apply_pauli_rotation(&p, coeff, angle);
        let h = p.to_dense().unwrap() * Complex64::new(coeff, 0.0);
        let u = (h * Complex64::new(0.0, -angle)).exp();
        dense_state.amps = u * &dense_state.amps;
        assert_abs_diff_eq!(
            (state.amplitudes() - dense_state.amplitudes()).norm(),
            0.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn multi_term_generator_uses_full_exponential() {
        let n = 2;
        let heis = sum(n, "XX", 1.0).add(&sum(n, "YY", 1.0)).add(&sum(n, "ZZ", 1.0));
        let gate = Gate {
            generator: Generator::PauliSum(heis.clone()),
            binding: Binding::Fixed(0.61),
        };
        let mut state = encode(&pauli_product_map(n, Axis::X), &[0.5, -0.9]).unwrap();
        let mut expected = state.clone();
        state.apply_gate(&gate, 0.61).unwrap();
        let u = (heis.to_dense().unwrap() * Complex64::new(0.0, -0.61)).exp();
        expected.amps = u * &expected.amps;
        assert_abs_diff_eq!(
            (state.amplitudes() - expected.amplitudes()).norm(),
            0.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(state.norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn snapshot_entries_are_expectations() {
        let n = 2;
        let gens = vec![sum(n, "XI", 1.0), sum(n, "YI", 1.0)];
        let basis = compute_dla_basis(&gens, 64, 64).unwrap();
        let state = encode(&pauli_product_map(n, Axis::X), &[1.2, 0.4]).unwrap();
        let snap = snapshot_of(&state, &basis);
        assert_eq!(snap.len(), basis.dim());
        for (i, b) in basis.elements().iter().enumerate() {
            assert_abs_diff_eq!(snap[i], state.expectation(b), epsilon = 1e-14);
        }
    }

    #[test]
    fn parameter_shift_matches_finite_differences() {
        let n = 2;
        let enc = pauli_product_map(n, Axis::X);
        let gens = vec![sum(n, "ZZ", 1.0), sum(n, "XI", 1.0), sum(n, "IX", 1.0)];
        let ansatz = AnsatzCircuit::from_generators(n, gens).unwrap();
        let obs = sum(n, "ZI", 1.0);
        let x = [0.9, -0.3];
        let theta = [0.31, -1.2, 0.77];
        let grad = vqc_gradients(&enc, &ansatz, &obs, &x, &theta).unwrap();
        for k in 0..theta.len() {
            let mut tp = theta;
            let mut tm = theta;
            tp[k] += FD_STEP;
            tm[k] -= FD_STEP;
            let fd = (vqc_output(&enc, &ansatz, &obs, &x, &tp).unwrap()
                - vqc_output(&enc, &ansatz, &obs, &x, &tm).unwrap())
                / (2.0 * FD_STEP);
            assert_abs_diff_eq!(grad[k], fd, epsilon = 1e-8);
        }
    }

    #[test]
    fn shared_parameter_gradient_sums_gate_contributions() {
        // two gates bound to the same parameter
        let n = 1;
        let gates = vec![
            Gate::rotation(PauliString::single(n, 0, Axis::X), Binding::Trainable(0)),
            Gate::rotation(PauliString::single(n, 0, Axis::Y), Binding::Trainable(0)),
        ];
        let ansatz = AnsatzCircuit::new(n, 1, gates).unwrap();
        let enc = pauli_product_map(n, Axis::X);
        let obs = HermitianPauliSum::single(PauliString::single(n, 0, Axis::Z), 1.0);
        let x = [0.4];
        let theta = [0.9];
        let grad = vqc_gradients(&enc, &ansatz, &obs, &x, &theta).unwrap();
        let fd = (vqc_output(&enc, &ansatz, &obs, &x, &[theta[0] + FD_STEP]).unwrap()
            - vqc_output(&enc, &ansatz, &obs, &x, &[theta[0] - FD_STEP]).unwrap())
            / (2.0 * FD_STEP);
        assert_abs_diff_eq!(grad[0], fd, epsilon = 1e-8);
    }

    #[test]
    fn dense_encoder_runs_and_normalizes() {
        let enc = random_hermitian_encoder(2, 2, 11).unwrap();
        let state = encode(&enc, &[0.8, -0.2]).unwrap();
        assert_abs_diff_eq!(state.norm(), 1.0, epsilon = 1e-10);
        // changing the input changes the state
        let other = encode(&enc, &[0.81, -0.2]).unwrap();
        assert!(state.fidelity(&other) < 1.0 - 1e-6);
    }

    #[test]
    fn dimension_checks() {
        let enc = pauli_product_map(2, Axis::X);
        assert!(matches!(
            encode(&enc, &[0.1]),
            Err(OracleError::InputDimMismatch { .. })
        ));
        let ansatz = AnsatzCircuit::from_generators(2, vec![sum(2, "XI", 1.0)]).unwrap();
        let mut state = encode(&enc, &[0.1, 0.2]).unwrap();
        assert!(matches!(
            apply_ansatz(&mut state, &ansatz, &[0.1, 0.2]),
            Err(OracleError::ParamDimMismatch { .. })
        ));
        assert!(QuantumState::zero_state(13).is_err());
    }

    use rand_distr::StandardNormal;
    #[test]
    fn dense_hermitian_subset_gate() {
        // a dense single-qubit X/2 on qubit 1 of 2 equals the Pauli rotation
        let x_half = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(0.0, 0.0),
                Complex64::new(0.5, 0.0),
                Complex64::new(0.5, 0.0),
                Complex64::new(0.0, 0.0),
            ],
        );
        let dense_gate = Gate {
            generator: Generator::Dense(DenseHermitian::new(vec![1], x_half).unwrap()),
            binding: Binding::Fixed(0.9),
        };
        let pauli_gate = Gate::rotation(PauliString::single(2, 1, Axis::X), Binding::Fixed(0.9));
        let init = encode(&pauli_product_map(2, Axis::Y), &[0.3, 0.7]).unwrap();
        let mut a = init.clone();
        let mut b = init;
        a.apply_gate(&dense_gate, 0.9).unwrap();
        b.apply_gate(&pauli_gate, 0.9).unwrap();
        assert_abs_diff_eq!((a.amplitudes() - b.amplitudes()).norm(), 0.0, epsilon = 1e-12);
    }
}
