//! Circuit intermediate representation for encoding maps V(x) and ansatz
//! circuits U(theta), plus builders for the named encodings.
//!
//! Every gate is `exp(-i * angle * generator)` where the angle comes from a
//! trainable parameter, a scaled input component, or a fixed value. Rotations
//! use the convention `R_P(phi) = exp(-i phi P / 2)`, i.e. generator P/2, so a
//! product-map qubit satisfies `Tr(Z rho(x)) = cos(x)`.

use crate::pauli::{Axis, HermitianPauliSum, PauliString};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error("binding index {index} out of range ({what} dimension {dim})")]
    IndexOutOfRange { what: &'static str, index: usize, dim: usize },
    #[error("encoding circuits cannot contain trainable bindings")]
    TrainableInEncoding,
    #[error("ansatz circuits allow only trainable bindings with Pauli-sum generators")]
    NonTrainableInAnsatz,
    #[error("dense generators are allowed only in encoding circuits")]
    DenseInAnsatz,
    #[error("dense generator on {qubits} qubits needs a {expected}x{expected} matrix, got {rows}x{cols}")]
    DenseShape { qubits: usize, expected: usize, rows: usize, cols: usize },
    #[error("dense generator is not Hermitian (deviation {deviation:.3e})")]
    DenseNotHermitian { deviation: f64 },
    #[error("partition blocks must be disjoint")]
    PartitionOverlap,
    #[error("gate on qubit {qubit} binds input {input} outside its partition block")]
    PartitionSeparability { qubit: usize, input: usize },
    #[error("generator qubit count {got} does not match circuit qubit count {expected}")]
    QubitCountMismatch { got: usize, expected: usize },
    #[error("dense generator exceeds the dense cap of {0} qubits")]
    DenseCap(usize),
}

/// Explicit Hermitian matrix generator on a declared qubit subset.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseHermitian {
    pub qubits: Vec<usize>,
    pub matrix: DMatrix<Complex64>,
}

impl DenseHermitian {
    pub fn new(qubits: Vec<usize>, matrix: DMatrix<Complex64>) -> Result<Self, CircuitError> {
        let expected = 1usize << qubits.len();
        if matrix.nrows() != expected || matrix.ncols() != expected {
            return Err(CircuitError::DenseShape {
                qubits: qubits.len(),
                expected,
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        let deviation = (&matrix - matrix.adjoint()).norm();
        if deviation > 1e-10 {
            return Err(CircuitError::DenseNotHermitian { deviation });
        }
        Ok(Self { qubits, matrix })
    }
}

#[derive(Serialize, Deserialize)]
struct DenseRepr {
    qubits: Vec<usize>,
    matrix: Vec<Vec<[f64; 2]>>,
}

impl Serialize for DenseHermitian {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows = (0..self.matrix.nrows())
            .map(|r| {
                (0..self.matrix.ncols())
                    .map(|c| [self.matrix[(r, c)].re, self.matrix[(r, c)].im])
                    .collect()
            })
            .collect();
        DenseRepr { qubits: self.qubits.clone(), matrix: rows }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for DenseHermitian {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = DenseRepr::deserialize(d)?;
        let n = repr.matrix.len();
        if repr.matrix.iter().any(|row| row.len() != n) {
            return Err(serde::de::Error::custom("dense generator matrix is not square"));
        }
        let matrix = DMatrix::from_fn(n, n, |r, c| {
            Complex64::new(repr.matrix[r][c][0], repr.matrix[r][c][1])
        });
        DenseHermitian::new(repr.qubits, matrix).map_err(serde::de::Error::custom)
    }
}

/// Gate generator: sparse Pauli sum or an explicit dense Hermitian block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Generator {
    PauliSum(HermitianPauliSum),
    Dense(DenseHermitian),
}

/// How a gate angle is produced.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Binding {
    Trainable(usize),
    Input { j: usize, scale: f64 },
    Fixed(f64),
}

/// One gate: unitary `exp(-i * angle * generator)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub generator: Generator,
    pub binding: Binding,
}

impl Gate {
    pub fn rotation(p: PauliString, binding: Binding) -> Self {
        Gate {
            generator: Generator::PauliSum(HermitianPauliSum::single(p, 0.5)),
            binding,
        }
    }

    pub fn angle(&self, x: &[f64], theta: &[f64]) -> f64 {
        match self.binding {
            Binding::Trainable(k) => theta[k],
            Binding::Input { j, scale } => scale * x[j],
            Binding::Fixed(v) => v,
        }
    }

    /// Qubits the gate acts on (bit mask).
    pub fn qubit_mask(&self) -> u64 {
        match &self.generator {
            Generator::PauliSum(sum) => sum
                .terms()
                .map(|(p, _)| p.x_mask() | p.z_mask())
                .fold(0, |a, b| a | b),
            Generator::Dense(d) => d.qubits.iter().fold(0, |m, q| m | (1 << q)),
        }
    }
}

/// One block of a separable-encoding partition: a qubit subset together with
/// the input components it is allowed to depend on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionBlock {
    pub qubits: Vec<usize>,
    pub inputs: Vec<usize>,
}

/// Data-encoding circuit V(x): input and fixed bindings only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "EncodingRepr", into = "EncodingRepr")]
pub struct EncodingCircuit {
    n_qubits: usize,
    input_dim: usize,
    gates: Vec<Gate>,
    partition: Option<Vec<PartitionBlock>>,
}

#[derive(Serialize, Deserialize, Clone)]
struct EncodingRepr {
    n_qubits: usize,
    input_dim: usize,
    gates: Vec<Gate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    partition: Option<Vec<PartitionBlock>>,
}

impl TryFrom<EncodingRepr> for EncodingCircuit {
    type Error = CircuitError;
    fn try_from(r: EncodingRepr) -> Result<Self, CircuitError> {
        EncodingCircuit::new(r.n_qubits, r.input_dim, r.gates, r.partition)
    }
}

impl From<EncodingCircuit> for EncodingRepr {
    fn from(c: EncodingCircuit) -> Self {
        EncodingRepr {
            n_qubits: c.n_qubits,
            input_dim: c.input_dim,
            gates: c.gates,
            partition: c.partition,
        }
    }
}

impl EncodingCircuit {
    pub fn new(
        n_qubits: usize,
        input_dim: usize,
        gates: Vec<Gate>,
        partition: Option<Vec<PartitionBlock>>,
    ) -> Result<Self, CircuitError> {
        for gate in &gates {
            match gate.binding {
                Binding::Trainable(_) => return Err(CircuitError::TrainableInEncoding),
                Binding::Input { j, .. } if j >= input_dim => {
                    return Err(CircuitError::IndexOutOfRange {
                        what: "input",
                        index: j,
                        dim: input_dim,
                    })
                }
                _ => {}
            }
            if let Generator::PauliSum(sum) = &gate.generator {
                if sum.n_qubits() != n_qubits {
                    return Err(CircuitError::QubitCountMismatch {
                        got: sum.n_qubits(),
                        expected: n_qubits,
                    });
                }
            }
            if let Generator::Dense(d) = &gate.generator {
                if let Some(&q) = d.qubits.iter().find(|&&q| q >= n_qubits) {
                    return Err(CircuitError::IndexOutOfRange {
                        what: "qubit",
                        index: q,
                        dim: n_qubits,
                    });
                }
            }
        }
        if let Some(blocks) = &partition {
            let mut seen = 0u64;
            for block in blocks {
                let mask: u64 = block.qubits.iter().fold(0, |m, q| m | (1 << q));
                if seen & mask != 0 {
                    return Err(CircuitError::PartitionOverlap);
                }
                seen |= mask;
            }
            for gate in &gates {
                if let Binding::Input { j, .. } = gate.binding {
                    let gate_mask = gate.qubit_mask();
                    for block in blocks {
                        let mask: u64 = block.qubits.iter().fold(0, |m, q| m | (1 << q));
                        if gate_mask & mask != 0 && !block.inputs.contains(&j) {
                            return Err(CircuitError::PartitionSeparability {
                                qubit: mask.trailing_zeros() as usize,
                                input: j,
                            });
                        }
                    }
                }
            }
        }
        Ok(Self { n_qubits, input_dim, gates, partition })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn partition(&self) -> Option<&[PartitionBlock]> {
        self.partition.as_deref()
    }

    /// Fundamental period of input `j`: 2*pi / gcd of the integer scales of the
    /// rotations binding it, or None if some scale is non-integer (no lattice).
    pub fn input_period(&self, j: usize) -> Option<f64> {
        let mut g: u64 = 0;
        let mut found = false;
        for gate in &self.gates {
            if let Binding::Input { j: jj, scale } = gate.binding {
                if jj != j {
                    continue;
                }
                found = true;
                let rounded = scale.abs().round();
                if rounded < 0.5 || (scale.abs() - rounded).abs() > 1e-9 {
                    return None;
                }
                g = gcd(g, rounded as u64);
            }
        }
        if found {
            Some(2.0 * std::f64::consts::PI / g as f64)
        } else {
            None
        }
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Trainable ansatz U(theta): ordered Pauli-sum generators with trainable
/// bindings only; the generator list defines the DLA generators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AnsatzRepr", into = "AnsatzRepr")]
pub struct AnsatzCircuit {
    n_qubits: usize,
    n_params: usize,
    gates: Vec<Gate>,
}

#[derive(Serialize, Deserialize, Clone)]
struct AnsatzRepr {
    n_qubits: usize,
    n_params: usize,
    gates: Vec<Gate>,
}

impl TryFrom<AnsatzRepr> for AnsatzCircuit {
    type Error = CircuitError;
    fn try_from(r: AnsatzRepr) -> Result<Self, CircuitError> {
        AnsatzCircuit::new(r.n_qubits, r.n_params, r.gates)
    }
}

impl From<AnsatzCircuit> for AnsatzRepr {
    fn from(c: AnsatzCircuit) -> Self {
        AnsatzRepr { n_qubits: c.n_qubits, n_params: c.n_params, gates: c.gates }
    }
}

impl AnsatzCircuit {
    pub fn new(n_qubits: usize, n_params: usize, gates: Vec<Gate>) -> Result<Self, CircuitError> {
        for gate in &gates {
            match gate.binding {
                Binding::Trainable(k) if k >= n_params => {
                    return Err(CircuitError::IndexOutOfRange {
                        what: "parameter",
                        index: k,
                        dim: n_params,
                    })
                }
                Binding::Trainable(_) => {}
                _ => return Err(CircuitError::NonTrainableInAnsatz),
            }
            match &gate.generator {
                Generator::PauliSum(sum) if sum.n_qubits() == n_qubits => {}
                Generator::PauliSum(sum) => {
                    return Err(CircuitError::QubitCountMismatch {
                        got: sum.n_qubits(),
                        expected: n_qubits,
                    })
                }
                Generator::Dense(_) => return Err(CircuitError::DenseInAnsatz),
            }
        }
        Ok(Self { n_qubits, n_params, gates })
    }

    /// One gate per generator in order, parameter k for gate k.
    pub fn from_generators(
        n_qubits: usize,
        generators: Vec<HermitianPauliSum>,
    ) -> Result<Self, CircuitError> {
        let n_params = generators.len();
        let gates = generators
            .into_iter()
            .enumerate()
            .map(|(k, g)| Gate {
                generator: Generator::PauliSum(g),
                binding: Binding::Trainable(k),
            })
            .collect();
        Self::new(n_qubits, n_params, gates)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// The distinct DLA generators {H_k} of the ansatz, in first-use order.
    pub fn generators(&self) -> Vec<HermitianPauliSum> {
        let mut out: Vec<HermitianPauliSum> = Vec::new();
        for gate in &self.gates {
            if let Generator::PauliSum(sum) = &gate.generator {
                if !out.contains(sum) {
                    out.push(sum.clone());
                }
            }
        }
        out
    }
}

/// One single-qubit rotation per qubit: `(x) R_P(x_j)` with singleton
/// partition blocks; d = n.
pub fn pauli_product_map(n: usize, axis: Axis) -> EncodingCircuit {
    let gates = (0..n)
        .map(|q| {
            Gate::rotation(
                PauliString::single(n, q, axis),
                Binding::Input { j: q, scale: 1.0 },
            )
        })
        .collect();
    let partition = (0..n)
        .map(|q| PartitionBlock { qubits: vec![q], inputs: vec![q] })
        .collect();
    EncodingCircuit::new(n, n, gates, Some(partition)).expect("product map is always valid")
}

/// Parallel data-reuploading tower: qubit (j, l) carries `R_X(base^l * x_j)`,
/// partitioned into per-input blocks of m qubits; n = d * m.
pub fn fourier_tower_map(d: usize, m: usize, base: f64) -> EncodingCircuit {
    let n = d * m;
    let mut gates = Vec::with_capacity(n);
    let mut partition = Vec::with_capacity(d);
    for j in 0..d {
        let mut qubits = Vec::with_capacity(m);
        for l in 0..m {
            let q = j * m + l;
            qubits.push(q);
            gates.push(Gate::rotation(
                PauliString::single(n, q, Axis::X),
                Binding::Input { j, scale: base.powi(l as i32) },
            ));
        }
        partition.push(PartitionBlock { qubits, inputs: vec![j] });
    }
    EncodingCircuit::new(n, d, gates, Some(partition)).expect("tower map is always valid")
}

/// Sample an n-qubit GUE Hermitian matrix (diagonal N(0,1), off-diagonal
/// complex with N(0,1/2) parts).
pub fn gue_hermitian(n_qubits: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
    let dim = 1usize << n_qubits;
    let mut h = DMatrix::<Complex64>::zeros(dim, dim);
    for r in 0..dim {
        let d: f64 = rng.sample(StandardNormal);
        h[(r, r)] = Complex64::new(d, 0.0);
        for c in (r + 1)..dim {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let v = Complex64::new(re, im) / 2f64.sqrt();
            h[(r, c)] = v;
            h[(c, r)] = v.conj();
        }
    }
    h
}

/// Encoder `e^{-i H_k x_k} ... e^{-i H_1 x_1}` with freshly sampled GUE
/// generators on the full register; deterministic given the seed.
pub fn random_hermitian_encoder(
    n: usize,
    n_inputs: usize,
    seed: u64,
) -> Result<EncodingCircuit, CircuitError> {
    if n > crate::pauli::DENSE_CAP {
        return Err(CircuitError::DenseCap(crate::pauli::DENSE_CAP));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gates = (0..n_inputs)
        .map(|j| {
            let h = gue_hermitian(n, &mut rng);
            Ok(Gate {
                generator: Generator::Dense(DenseHermitian::new((0..n).collect(), h)?),
                binding: Binding::Input { j, scale: 1.0 },
            })
        })
        .collect::<Result<Vec<_>, CircuitError>>()?;
    EncodingCircuit::new(n, n_inputs, gates, None)
}
