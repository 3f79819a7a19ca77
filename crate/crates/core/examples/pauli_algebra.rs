//! Pauli-string arithmetic: brackets, inner products, dense cross-check.

use vqc_privacy::{HermitianPauliSum, PauliString};

fn show(label: &str, s: &HermitianPauliSum) {
    let terms: Vec<String> =
        s.terms().map(|(p, c)| format!("{c:+.3} {p}")).collect();
    println!("  {label} = {}", if terms.is_empty() { "0".into() } else { terms.join(" ") });
}

fn main() {
    let xx: PauliString = "XX".parse().unwrap();
    let zz: PauliString = "ZZ".parse().unwrap();

    let a = HermitianPauliSum::single(xx, 1.0);
    let b = HermitianPauliSum::single(zz, 1.0);
    show("-i[XX, ZZ]", &a.bracket(&b));

    let sum = a.add_scaled(&b, 0.5);
    show("XX + 0.5 ZZ", &sum);
    println!("  <XX, XX+0.5ZZ> = {}", a.inner(&sum));
    println!("  <ZZ, XX+0.5ZZ> = {}", b.inner(&sum));

    // single-qubit brackets close into su(2)
    let x = HermitianPauliSum::single("X".parse().unwrap(), 1.0);
    let y = HermitianPauliSum::single("Y".parse().unwrap(), 1.0);
    show("-i[X, Y]", &x.bracket(&y));
}
