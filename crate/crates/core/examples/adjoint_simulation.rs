//! Lie-algebraic fast path vs dense statevector simulation: the model output
//! and gradients agree while the fast path never touches a 2^n object.

use vqc_privacy::circuits::pauli_product_map;
use vqc_privacy::dla::StructureConstants;
use vqc_privacy::gsim::{
    chi_matrix, gsim_gradients, model_output, observable_coeffs, AdjointFactors, GateAdjoints,
};
use vqc_privacy::oracle::{encode, snapshot_of, vqc_gradients, vqc_output};
use vqc_privacy::{compute_dla_basis, AnsatzCircuit, Axis, HermitianPauliSum, PauliString};

fn main() {
    let n = 4;
    let enc = pauli_product_map(n, Axis::X);

    let mut gens = Vec::new();
    let mut obs = HermitianPauliSum::zero(n);
    for q in 0..n {
        gens.push(HermitianPauliSum::single(PauliString::single(n, q, Axis::X), 0.5));
        gens.push(HermitianPauliSum::single(PauliString::single(n, q, Axis::Y), 0.5));
        obs = obs.add(&HermitianPauliSum::single(PauliString::single(n, q, Axis::Z), 1.0));
    }
    let ansatz = AnsatzCircuit::from_generators(n, gens.clone()).unwrap();
    let basis = compute_dla_basis(&gens, 64, n).unwrap();
    println!("n = {n}, dim g = {} (vs 2^n = {})", basis.dim(), 1 << n);

    let x: Vec<f64> = (0..n).map(|q| 0.3 + 0.4 * q as f64).collect();
    let theta: Vec<f64> = (0..ansatz.n_params()).map(|k| 0.1 * (k as f64 + 1.0)).collect();

    // fast path: snapshot + adjoint transport
    let sc = StructureConstants::compute(&basis);
    let gates = GateAdjoints::compute(&ansatz, &basis, &sc).unwrap();
    let w = observable_coeffs(&obs, &basis).unwrap();
    let factors = AdjointFactors::compute(&gates, &theta).unwrap();
    let e_snap = snapshot_of(&encode(&enc, &x).unwrap(), &basis);
    let f_fast = model_output(&factors, &e_snap, &w);
    let g_fast = gsim_gradients(&gates, &factors, &e_snap, &w);

    // ground truth: dense statevector with parameter-shift gradients
    let f_dense = vqc_output(&enc, &ansatz, &obs, &x, &theta).unwrap();
    let g_dense = vqc_gradients(&enc, &ansatz, &obs, &x, &theta).unwrap();

    println!("output: fast {f_fast:.12}  dense {f_dense:.12}  diff {:.2e}", (f_fast - f_dense).abs());
    let gd = (&g_fast - &g_dense).amax();
    println!("gradients: max diff {gd:.2e} over {} parameters", g_fast.len());

    let chi = chi_matrix(&gates, &factors, &w);
    println!("chi matrix: {} x {} (parameters x dim g)", chi.nrows(), chi.ncols());
}
