//! Dynamical Lie algebras of two standard ansatz families: the polynomially
//! sized TFIM closure and a per-qubit su(2) direct sum.

use vqc_privacy::{compute_dla_basis, HermitianPauliSum, PauliString};

fn string(n: usize, place: &[(usize, char)]) -> HermitianPauliSum {
    let mut s = vec!['I'; n];
    for &(q, c) in place {
        s[q] = c;
    }
    let p: PauliString = s.iter().collect::<String>().parse().unwrap();
    HermitianPauliSum::single(p, 1.0)
}

fn main() {
    for n in 2..=6 {
        // transverse-field Ising generators: ZZ on edges, X on sites
        let mut gens = Vec::new();
        for q in 0..n - 1 {
            gens.push(string(n, &[(q, 'Z'), (q + 1, 'Z')]));
        }
        for q in 0..n {
            gens.push(string(n, &[(q, 'X')]));
        }
        let basis = compute_dla_basis(&gens, 256, n).unwrap();
        // TFIM closure grows quadratically: dim = 2n^2 - n
        println!("TFIM  n={n}: dim = {:3}  (2n^2-n = {})", basis.dim(), 2 * n * n - n);
    }

    for n in 2..=6 {
        let mut gens = Vec::new();
        for q in 0..n {
            gens.push(string(n, &[(q, 'X')]));
            gens.push(string(n, &[(q, 'Y')]));
        }
        let basis = compute_dla_basis(&gens, 256, n).unwrap();
        println!("su(2)^n n={n}: dim = {:3}  (3n = {})", basis.dim(), 3 * n);
    }
}
