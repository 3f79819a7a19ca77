//! Gradient-inversion privacy attacks on variational quantum circuits.
//!
//! The crate is organized around the two stages of an attack:
//!
//! 1. **Snapshot recovery** (weak breach): from the model gradients, solve a
//!    linear system in the adjoint representation of the ansatz to recover the
//!    expectation values of the encoded state over a dynamical-Lie-algebra
//!    (DLA) basis — [`pauli`], [`dla`], [`gsim`], [`recovery`].
//! 2. **Snapshot inversion** (strong breach): invert those expectation values
//!    back to the classical input, analytically for local Pauli encodings, via
//!    trigonometric interpolation plus polynomial system solving for separable
//!    encodings, or by black-box search for generic ones — [`inversion`].
//!
//! [`circuits`] is the circuit IR shared by everything, [`oracle`] is the dense
//! ground-truth simulator standing in for a quantum device, and [`harness`]
//! runs end-to-end experiments and backs the CLI.

pub mod circuits;
pub mod dla;
pub mod gsim;
pub mod harness;
pub mod inversion;
pub mod oracle;
pub mod pauli;
pub mod recovery;

pub use circuits::{AnsatzCircuit, Binding, EncodingCircuit, Gate, Generator, PartitionBlock};
pub use dla::{compute_dla_basis, DlaBasis, StructureConstants};
pub use harness::{run_attack_pipeline, AttackReport, ExperimentConfig};
pub use inversion::{invert_general_pauli, invert_pauli_product, periodic_error};
pub use oracle::{encode, snapshot_of, vqc_gradients, vqc_output, QuantumState};
pub use pauli::{Axis, HermitianPauliSum, PauliString};
pub use recovery::{recover_snapshot, recover_snapshot_ratio, RecoveryResult};
