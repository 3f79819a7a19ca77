//! Expectation-landscape frequency study: stationary-point spacing stays at
//! pi for a single rotation, and shrinks with qubit count for a full-register
//! GUE encoder — the hardness knob for black-box inversion.

use vqc_privacy::harness::{landscape_sweep, mean_r_by_n, LandscapeFamily};

fn main() {
    let seeds: Vec<u64> = (0..10).collect();

    let single =
        landscape_sweep(LandscapeFamily::SingleRotation, &[2, 3, 4, 5], &seeds, 4096).unwrap();
    println!("single rotation (expected r = pi = {:.4}):", std::f64::consts::PI);
    for (n, r) in mean_r_by_n(&single) {
        println!("  n = {n}: mean r = {r:.4}");
    }

    let gue = landscape_sweep(LandscapeFamily::GueEncoder, &[2, 3, 4, 5], &seeds, 4096).unwrap();
    println!("GUE encoder e^(-iHx):");
    let means = mean_r_by_n(&gue);
    for w in means.windows(2) {
        let (na, ra) = w[0];
        let (nb, rb) = w[1];
        println!("  n = {na}: mean r = {ra:.4}   ratio r({nb})/r({na}) = {:.3}", rb / ra);
    }
    let (nl, rl) = *means.last().unwrap();
    println!("  n = {nl}: mean r = {rl:.4}");
}
