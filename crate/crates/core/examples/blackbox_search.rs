//! Black-box inversion: exhaustive grid search with its exponential cost
//! surfaced, and perturbed gradient descent as the any-circuit fallback.

use nalgebra::DVector;
use vqc_privacy::circuits::pauli_product_map;
use vqc_privacy::inversion::blackbox::{
    grid_search_invert, perturbed_gd_invert, BlackboxError, DescentParams,
};
use vqc_privacy::oracle::{encode, snapshot_of};
use vqc_privacy::{compute_dla_basis, Axis, HermitianPauliSum, PauliString};

fn su2_basis(n: usize) -> vqc_privacy::DlaBasis {
    let mut gens = Vec::new();
    for q in 0..n {
        gens.push(HermitianPauliSum::single(PauliString::single(n, q, Axis::X), 1.0));
        gens.push(HermitianPauliSum::single(PauliString::single(n, q, Axis::Y), 1.0));
    }
    compute_dla_basis(&gens, 64, n).unwrap()
}

fn main() {
    let pi = std::f64::consts::PI;

    // d = 1: the grid is tiny and recovery is within one cell
    let enc = pauli_product_map(1, Axis::X);
    let basis = su2_basis(1);
    let x_true = [1.234];
    let target = snapshot_of(&encode(&enc, &x_true).unwrap(), &basis);
    let res = grid_search_invert(&target, &enc, &basis, &[(0.0, pi)], 1e-3, 1 << 24).unwrap();
    println!(
        "grid d=1: recovered {:.4} (true {:.4}) in {} oracle calls",
        res.x[0], x_true[0], res.oracle_calls
    );

    // d = 8: the projected call count crosses 1e8 and the search refuses
    let enc8 = pauli_product_map(8, Axis::X);
    let basis8 = su2_basis(8);
    let zeros = DVector::zeros(basis8.dim());
    match grid_search_invert(&zeros, &enc8, &basis8, &[(0.0, pi); 8], 1e-2, 100_000_000) {
        Err(BlackboxError::BudgetExceeded { projected, budget }) => {
            println!("grid d=8: refused, projected {projected} calls > budget {budget}");
        }
        other => println!("grid d=8: unexpected {other:?}"),
    }

    // perturbed GD from a start within pi of the truth
    let enc2 = pauli_product_map(2, Axis::X);
    let basis2 = su2_basis(2);
    let x2 = [0.9, 2.0];
    let target2 = snapshot_of(&encode(&enc2, &x2).unwrap(), &basis2);
    let params = DescentParams::default();
    let res2 = perturbed_gd_invert(
        &target2,
        &enc2,
        &basis2,
        &[(0.0, pi); 2],
        Some(&[0.4, 2.5]),
        &params,
        7,
    )
    .unwrap();
    println!(
        "pgd d=2: recovered ({:.4}, {:.4}), cost {:.2e}, {} oracle calls",
        res2.x[0], res2.x[1], res2.cost, res2.oracle_calls
    );
}
