//! Strong breach for single-qubit Pauli-rotation encodings: close the loop
//! from snapshot back to the input, and show the failure mode that protects
//! entangling-DLA circuits.

use vqc_privacy::circuits::pauli_product_map;
use vqc_privacy::oracle::{encode, snapshot_of};
use vqc_privacy::{
    compute_dla_basis, invert_pauli_product, periodic_error, Axis, HermitianPauliSum,
    PauliString,
};

fn main() {
    let n = 3;
    let enc = pauli_product_map(n, Axis::X);
    let x = [0.62, 2.48, -1.1];

    // su(2) per qubit: both quadratures Z_q, Y_q live in the algebra
    let mut gens = Vec::new();
    for q in 0..n {
        gens.push(HermitianPauliSum::single(PauliString::single(n, q, Axis::X), 1.0));
        gens.push(HermitianPauliSum::single(PauliString::single(n, q, Axis::Y), 1.0));
    }
    let basis = compute_dla_basis(&gens, 64, n).unwrap();
    let snap = snapshot_of(&encode(&enc, &x).unwrap(), &basis);
    for j in 0..n {
        let rec = invert_pauli_product(&snap, &basis, &enc, j).unwrap();
        let err = periodic_error(rec.x, x[j], enc.input_period(j));
        println!("input {j}: true {:+.4}  recovered {:+.4}  periodic error {err:.2e}", x[j], rec.x);
    }

    // TFIM DLA contains no single-qubit Z or Y: the intersection with
    // span{Z_q, W_q} is empty and the attack must refuse
    let mut tfim = Vec::new();
    for q in 0..n - 1 {
        let mut s = vec!['I'; n];
        s[q] = 'Z';
        s[q + 1] = 'Z';
        let p: PauliString = s.iter().collect::<String>().parse().unwrap();
        tfim.push(HermitianPauliSum::single(p, 1.0));
    }
    for q in 0..n {
        tfim.push(HermitianPauliSum::single(PauliString::single(n, q, Axis::X), 1.0));
    }
    let tfim_basis = compute_dla_basis(&tfim, 64, n).unwrap();
    let tfim_snap = snapshot_of(&encode(&enc, &x).unwrap(), &tfim_basis);
    match invert_pauli_product(&tfim_snap, &tfim_basis, &enc, 0) {
        Ok(rec) => println!("TFIM DLA: unexpectedly recovered {}", rec.x),
        Err(e) => println!("TFIM DLA (dim {}): {e}", tfim_basis.dim()),
    }
}
