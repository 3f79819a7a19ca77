//! Weak breach: recover the encoded-state snapshot from leaked training
//! gradients by solving the chi-system, then compare with ground truth.

use nalgebra::{DMatrix, DVector};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use vqc_privacy::circuits::pauli_product_map;
use vqc_privacy::dla::StructureConstants;
use vqc_privacy::gsim::{chi_matrix, observable_coeffs, AdjointFactors, GateAdjoints};
use vqc_privacy::oracle::{encode, snapshot_of, vqc_gradients};
use vqc_privacy::{
    compute_dla_basis, recover_snapshot, recover_snapshot_ratio, AnsatzCircuit, Axis,
    HermitianPauliSum, PauliString,
};

fn main() {
    let n = 3;
    let enc = pauli_product_map(n, Axis::X);
    let mut gens = Vec::new();
    let mut obs = HermitianPauliSum::zero(n);
    for q in 0..n {
        gens.push(HermitianPauliSum::single(PauliString::single(n, q, Axis::X), 0.5));
        gens.push(HermitianPauliSum::single(PauliString::single(n, q, Axis::Y), 0.5));
        obs = obs.add(&HermitianPauliSum::single(PauliString::single(n, q, Axis::Z), 1.0));
    }
    let basis = compute_dla_basis(&gens, 64, n).unwrap();
    let ansatz = AnsatzCircuit::from_generators(n, gens).unwrap();
    let sc = StructureConstants::compute(&basis);
    let gates = GateAdjoints::compute(&ansatz, &basis, &sc).unwrap();
    let w = observable_coeffs(&obs, &basis).unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.5..1.5)).collect();
    let truth = snapshot_of(&encode(&enc, &x).unwrap(), &basis);

    // stack gradient queries at several theta until the system has full rank
    let mut chi = DMatrix::<f64>::zeros(0, basis.dim());
    let mut grads = DVector::<f64>::zeros(0);
    for _ in 0..3 {
        let theta: Vec<f64> =
            (0..ansatz.n_params()).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let factors = AdjointFactors::compute(&gates, &theta).unwrap();
        let block = chi_matrix(&gates, &factors, &w);
        let g = vqc_gradients(&enc, &ansatz, &obs, &x, &theta).unwrap();
        chi = DMatrix::from_fn(chi.nrows() + block.nrows(), basis.dim(), |r, c| {
            if r < chi.nrows() { chi[(r, c)] } else { block[(r - chi.nrows(), c)] }
        });
        grads = DVector::from_fn(grads.len() + g.len(), |r, _| {
            if r < grads.len() { grads[r] } else { g[r - grads.len()] }
        });
    }

    let res = recover_snapshot(&chi, &grads).unwrap();
    println!(
        "direct recovery:  max error {:.2e}, condition {:.1e}",
        (&res.snapshot - &truth).amax(),
        res.condition_estimate,
    );

    // MSE-style leakage only exposes gradient ratios; direction still recoverable
    let ratio = recover_snapshot_ratio(&chi, &grads, &basis).unwrap();
    let cos = ratio.snapshot.dot(&truth) / (ratio.snapshot.norm() * truth.norm());
    println!("ratio recovery:   direction cosine {cos:.12} (up_to_scale = {})", ratio.up_to_scale);
}
