//! End-to-end attack batch: leaked gradients -> snapshot -> input, with the
//! dimension-budget wall shown for an expressive ansatz.

use vqc_privacy::harness::{
    emit_attack_report, run_attack_pipeline, ExperimentConfig, Method, ReportFormat, Scenario,
};

fn main() {
    let cfg = ExperimentConfig {
        scenario: Scenario::PauliProduct,
        method: Method::PauliProduct,
        qubits: vec![2, 3, 4],
        seeds: vec![1, 2, 3],
        dim_budget: 64,
        shots: 3,
        success_tol: 1e-6,
    };
    let report = run_attack_pipeline(&cfg).unwrap();
    println!("{}", emit_attack_report(&report, ReportFormat::Csv).unwrap());
    println!(
        "success rate {:.0}%, median error {:.1e}",
        100.0 * report.aggregate.success_rate,
        report.aggregate.median_error.unwrap(),
    );

    // expressive 2-local generators: the Lie closure blows past the budget
    // and the attack stops at the wall instead of simulating 2^n objects
    let wall = ExperimentConfig {
        scenario: Scenario::ExpressivePauli { generator_count: 8 },
        qubits: vec![5],
        dim_budget: 24,
        ..cfg
    };
    let report = run_attack_pipeline(&wall).unwrap();
    for rec in &report.records {
        println!("n={} seed={}: {}", rec.n, rec.seed, rec.reason.as_deref().unwrap_or("ok"));
    }
}
