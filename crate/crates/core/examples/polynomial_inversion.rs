//! Strong breach for reuploaded encodings: trig interpolation of the block
//! snapshot entries, Chebyshev polynomial system, Groebner elimination.

use vqc_privacy::circuits::fourier_tower_map;
use vqc_privacy::oracle::{encode, snapshot_of};
use vqc_privacy::{
    compute_dla_basis, invert_general_pauli, periodic_error, Axis, HermitianPauliSum,
    PauliString,
};

fn main() {
    // one input, reuploaded on two qubits at frequencies 1 and 3
    let enc = fourier_tower_map(1, 2, 3.0);
    let n = 2;
    let x = [1.37];

    let mut gens = Vec::new();
    for q in 0..n {
        gens.push(HermitianPauliSum::single(PauliString::single(n, q, Axis::X), 1.0));
        gens.push(HermitianPauliSum::single(PauliString::single(n, q, Axis::Y), 1.0));
    }
    let basis = compute_dla_basis(&gens, 64, n).unwrap();
    let snap = snapshot_of(&encode(&enc, &x).unwrap(), &basis);

    // the dense simulator plays the expectation oracle a device would provide
    let oracle = |obs: &HermitianPauliSum, probe: &[f64]| {
        encode(&enc, probe).unwrap().expectation(obs)
    };

    let block = enc.partition().unwrap()[0].clone();
    let res = invert_general_pauli(&snap, &basis, &enc, &block, &oracle).unwrap();
    let err = periodic_error(res.x_block[0], x[0], enc.input_period(0));
    println!("true x = {:.6}", x[0]);
    println!("recovered = {:.6}  (periodic error {err:.2e})", res.x_block[0]);
    println!("candidates surviving the residual filter: {}", res.ambiguity);
    for (i, c) in res.candidates.iter().enumerate() {
        println!("  #{i}: {:?}", c);
    }
    println!("expectation-oracle calls: {}", res.oracle_calls);
}
