//! Closed-form input recovery for the classical linear model on a unit-norm
//! trigonometric feature map: the high-frequency hardness of the quantum
//! black-box attack does not apply when gradients expose phi(x) directly.

use vqc_privacy::inversion::{classical_trig_recover, trig_feature_map};

fn main() {
    let omegas = [1.0, 3.0, 9.0, 27.0];
    let x_true = 0.8273;

    // leaked gradient of (y - a . phi(x))^2 is proportional to phi(x)
    let phi = trig_feature_map(x_true, &omegas);
    let leaked: Vec<f64> = phi.iter().map(|p| p * -2.419).collect();

    let (phi_rec, rec) = classical_trig_recover(&leaked, &omegas).unwrap();
    let phi_err = phi_rec
        .iter()
        .zip(&phi)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    println!("feature-map residual: {phi_err:.2e}");
    println!("x recovered: {:.6} (true {:.6}, error {:.2e})", rec.x, x_true, (rec.x - x_true).abs());
}
