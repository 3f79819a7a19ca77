//! Thin CLI over the library: JSON configs in, JSON/CSV reports out.
//!
//! Exit codes: 0 when the batch completed (individual attack failures are
//! recorded, not fatal), 2 on configuration errors, 1 on runtime faults.

use clap::{Parser, Subcommand, ValueEnum};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use vqc_privacy::circuits::{AnsatzCircuit, EncodingCircuit};
use vqc_privacy::dla::{compute_dla_basis, DlaBasis, StructureConstants};
use vqc_privacy::gsim;
use vqc_privacy::harness::{
    emit_attack_report, emit_landscape_csv, landscape_sweep, run_attack_pipeline,
    ExperimentConfig, LandscapeFamily, ReportFormat,
};
use vqc_privacy::inversion::{
    blackbox::{direct_input_recovery, grid_search_invert, perturbed_gd_invert, DescentParams},
    classical_trig_recover, invert_general_pauli, invert_pauli_product,
};
use vqc_privacy::oracle::{encode, vqc_gradients};
use vqc_privacy::pauli::HermitianPauliSum;
use vqc_privacy::recovery::{recover_snapshot, recover_snapshot_ratio};

#[derive(Parser)]
#[command(name = "vqc-privacy", about = "Gradient-inversion attacks on variational quantum circuits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the Lie closure of a generator set.
    Dla {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the model and its gradients in the adjoint representation.
    Gsim {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recover the encoded-state snapshot from leaked gradients.
    Recover {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Invert a snapshot (or gradient vector) back to the classical input.
    Invert {
        #[arg(long, value_enum)]
        method: InvertMethod,
        /// JSON array: snapshot entries, or the gradient vector for the
        /// direct and classical-trig methods.
        #[arg(long)]
        snapshot: PathBuf,
        /// Encoding circuit JSON (unused by classical-trig).
        #[arg(long)]
        circuit: Option<PathBuf>,
        /// DLA basis JSON as emitted by `dla`.
        #[arg(long)]
        basis: Option<PathBuf>,
        /// Method-specific parameters.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep expectation landscapes and report stationary-point spacings.
    Landscape {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an end-to-end attack batch.
    Attack {
        #[arg(long)]
        config: PathBuf,
        /// Replaces the config's seed list with this single seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum InvertMethod {
    PauliProduct,
    GeneralPauli,
    Grid,
    Pgd,
    Direct,
    ClassicalTrig,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// Errors from reading or interpreting configuration: exit code 2.
struct ConfigError(String);
/// Errors from the run itself: exit code 1.
struct RunError(String);

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))
}

fn write_output(out: Option<&Path>, body: &str) -> Result<(), RunError> {
    match out {
        Some(path) => std::fs::write(path, body).map_err(|e| RunError(e.to_string())),
        None => {
            println!("{body}");
            Ok(())
        }
    }
}

#[derive(Deserialize)]
struct DlaConfig {
    generators: Vec<HermitianPauliSum>,
    #[serde(default = "default_dim_budget")]
    dim_budget: usize,
    #[serde(default = "default_support_budget")]
    support_budget: usize,
}
fn default_dim_budget() -> usize {
    64
}
fn default_support_budget() -> usize {
    64
}

#[derive(Deserialize)]
struct ModelConfig {
    encoding: EncodingCircuit,
    ansatz: AnsatzCircuit,
    observable: HermitianPauliSum,
    #[serde(default = "default_dim_budget")]
    dim_budget: usize,
}

impl ModelConfig {
    fn basis(&self) -> Result<DlaBasis, RunError> {
        let gens = self.ansatz.generators();
        compute_dla_basis(&gens, self.dim_budget, self.ansatz.n_qubits())
            .map_err(|e| RunError(e.to_string()))
    }
}

#[derive(Deserialize)]
struct GsimConfig {
    #[serde(flatten)]
    model: ModelConfig,
    x: Vec<f64>,
    theta: Vec<f64>,
}

#[derive(Deserialize)]
struct RecoverConfig {
    #[serde(flatten)]
    model: ModelConfig,
    x: Vec<f64>,
    thetas: Vec<Vec<f64>>,
    #[serde(default)]
    ratio: bool,
}

#[derive(Deserialize, Default)]
struct InvertParams {
    eps: Option<f64>,
    budget: Option<u128>,
    bounds: Option<Vec<(f64, f64)>>,
    omegas: Option<Vec<f64>>,
    descent: Option<DescentOverrides>,
    // direct method: the trained model whose gradients leaked
    ansatz: Option<AnsatzCircuit>,
    observable: Option<HermitianPauliSum>,
    theta: Option<Vec<f64>>,
}

#[derive(Deserialize)]
struct DescentOverrides {
    step: Option<f64>,
    iters: Option<usize>,
    restarts: Option<usize>,
    noise_radius: Option<f64>,
}

#[derive(Serialize)]
struct InvertReport {
    method: String,
    status: String,
    x: Option<Vec<f64>>,
    per_index: Vec<serde_json::Value>,
    ambiguity: Option<usize>,
    oracle_calls: usize,
}

fn run() -> Result<(), ExitCode> {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Dla { config, out } => cmd_dla(&config, out.as_deref()),
        Command::Gsim { config, out } => cmd_gsim(&config, out.as_deref()),
        Command::Recover { config, out } => cmd_recover(&config, out.as_deref()),
        Command::Invert { method, snapshot, circuit, basis, config, seed, out } => cmd_invert(
            method,
            &snapshot,
            circuit.as_deref(),
            basis.as_deref(),
            config.as_deref(),
            seed,
            out.as_deref(),
        ),
        Command::Landscape { config, format, out } => {
            cmd_landscape(&config, format, out.as_deref())
        }
        Command::Attack { config, seed, format, out } => {
            cmd_attack(&config, seed, format, out.as_deref())
        }
    };
    result.map_err(|code| {
        ExitCode::from(code)
    })
}

type CmdResult = Result<(), u8>;

fn config_err(e: ConfigError) -> u8 {
    eprintln!("config error: {}", e.0);
    2
}
fn run_err(e: RunError) -> u8 {
    eprintln!("error: {}", e.0);
    1
}

fn cmd_dla(config: &Path, out: Option<&Path>) -> CmdResult {
    let cfg: DlaConfig = read_json(config).map_err(config_err)?;
    let basis = compute_dla_basis(&cfg.generators, cfg.dim_budget, cfg.support_budget)
        .map_err(|e| run_err(RunError(e.to_string())))?;
    let body = serde_json::to_string_pretty(&json!({
        "dim": basis.dim(),
        "basis": basis,
    }))
    .map_err(|e| run_err(RunError(e.to_string())))?;
    write_output(out, &body).map_err(run_err)
}

fn cmd_gsim(config: &Path, out: Option<&Path>) -> CmdResult {
    let cfg: GsimConfig = read_json(config).map_err(config_err)?;
    let basis = cfg.model.basis().map_err(run_err)?;
    let run = || -> Result<String, RunError> {
        let err = |e: &dyn std::fmt::Display| RunError(e.to_string());
        let sc = StructureConstants::compute(&basis);
        let gates =
            gsim::GateAdjoints::compute(&cfg.model.ansatz, &basis, &sc).map_err(|e| err(&e))?;
        let w = gsim::observable_coeffs(&cfg.model.observable, &basis).map_err(|e| err(&e))?;
        let factors = gsim::AdjointFactors::compute(&gates, &cfg.theta).map_err(|e| err(&e))?;
        let state = encode(&cfg.model.encoding, &cfg.x).map_err(|e| err(&e))?;
        let e_snap = vqc_privacy::oracle::snapshot_of(&state, &basis);
        let output = gsim::model_output(&factors, &e_snap, &w);
        let gradients = gsim::gsim_gradients(&gates, &factors, &e_snap, &w);
        serde_json::to_string_pretty(&json!({
            "dla_dim": basis.dim(),
            "output": output,
            "gradients": gradients.as_slice(),
        }))
        .map_err(|e| err(&e))
    };
    write_output(out, &run().map_err(run_err)?).map_err(run_err)
}

fn cmd_recover(config: &Path, out: Option<&Path>) -> CmdResult {
    let cfg: RecoverConfig = read_json(config).map_err(config_err)?;
    if cfg.thetas.is_empty() {
        return Err(config_err(ConfigError("thetas list is empty".into())));
    }
    let basis = cfg.model.basis().map_err(run_err)?;
    let run = || -> Result<String, RunError> {
        let err = |e: &dyn std::fmt::Display| RunError(e.to_string());
        let sc = StructureConstants::compute(&basis);
        let gates =
            gsim::GateAdjoints::compute(&cfg.model.ansatz, &basis, &sc).map_err(|e| err(&e))?;
        let w = gsim::observable_coeffs(&cfg.model.observable, &basis).map_err(|e| err(&e))?;
        let mut chi = DMatrix::<f64>::zeros(0, basis.dim());
        let mut grads = DVector::<f64>::zeros(0);
        for theta in &cfg.thetas {
            let factors = gsim::AdjointFactors::compute(&gates, theta).map_err(|e| err(&e))?;
            let block = gsim::chi_matrix(&gates, &factors, &w);
            let g = vqc_gradients(
                &cfg.model.encoding,
                &cfg.model.ansatz,
                &cfg.model.observable,
                &cfg.x,
                theta,
            )
            .map_err(|e| err(&e))?;
            chi = stack_rows(&chi, &block);
            grads = stack_vec(&grads, &g);
        }
        let res = if cfg.ratio {
            recover_snapshot_ratio(&chi, &grads, &basis).map_err(|e| err(&e))?
        } else {
            recover_snapshot(&chi, &grads).map_err(|e| err(&e))?
        };
        serde_json::to_string_pretty(&json!({
            "dla_dim": basis.dim(),
            "snapshot": res.snapshot.as_slice(),
            "condition_estimate": res.condition_estimate,
            "up_to_scale": res.up_to_scale,
        }))
        .map_err(|e| err(&e))
    };
    write_output(out, &run().map_err(run_err)?).map_err(run_err)
}

fn stack_rows(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(a.nrows() + b.nrows(), b.ncols(), |r, c| {
        if r < a.nrows() {
            a[(r, c)]
        } else {
            b[(r - a.nrows(), c)]
        }
    })
}

fn stack_vec(a: &DVector<f64>, b: &DVector<f64>) -> DVector<f64> {
    DVector::from_fn(a.len() + b.len(), |r, _| {
        if r < a.len() {
            a[r]
        } else {
            b[r - a.len()]
        }
    })
}

fn cmd_invert(
    method: InvertMethod,
    snapshot: &Path,
    circuit: Option<&Path>,
    basis_path: Option<&Path>,
    config: Option<&Path>,
    seed: u64,
    out: Option<&Path>,
) -> CmdResult {
    let values: Vec<f64> = read_json(snapshot).map_err(config_err)?;
    let params: InvertParams = match config {
        Some(p) => read_json(p).map_err(config_err)?,
        None => InvertParams::default(),
    };
    let enc: Option<EncodingCircuit> = match circuit {
        Some(p) => Some(read_json(p).map_err(config_err)?),
        None => None,
    };
    let basis: Option<DlaBasis> = match basis_path {
        Some(p) => {
            #[derive(Deserialize)]
            struct BasisFile {
                basis: DlaBasis,
            }
            let f: BasisFile = read_json(p).map_err(config_err)?;
            Some(f.basis)
        }
        None => None,
    };
    let need = |x: Option<&str>| ConfigError(format!("missing required input: {}", x.unwrap()));
    let report = match method {
        InvertMethod::ClassicalTrig => {
            let omegas = params.omegas.ok_or_else(|| need(Some("omegas"))).map_err(config_err)?;
            match classical_trig_recover(&values, &omegas) {
                Ok((_, rec)) => InvertReport {
                    method: "classical-trig".into(),
                    status: "recovered".into(),
                    x: Some(vec![rec.x]),
                    per_index: vec![json!({"index": 0, "status": "recovered", "clamped": rec.clamped})],
                    ambiguity: None,
                    oracle_calls: 0,
                },
                Err(e) => failure_report("classical-trig", &e.to_string()),
            }
        }
        InvertMethod::PauliProduct => {
            let enc = enc.ok_or_else(|| need(Some("--circuit"))).map_err(config_err)?;
            let basis = basis.ok_or_else(|| need(Some("--basis"))).map_err(config_err)?;
            let e = DVector::from_column_slice(&values);
            let mut x = Vec::new();
            let mut per_index = Vec::new();
            let mut any = false;
            for j in 0..enc.input_dim() {
                match invert_pauli_product(&e, &basis, &enc, j) {
                    Ok(rec) => {
                        any = true;
                        x.push(rec.x);
                        per_index.push(
                            json!({"index": j, "status": "recovered", "x": rec.x, "clamped": rec.clamped}),
                        );
                    }
                    Err(err) => {
                        x.push(f64::NAN);
                        per_index
                            .push(json!({"index": j, "status": "failure", "reason": err.to_string()}));
                    }
                }
            }
            InvertReport {
                method: "pauli-product".into(),
                status: if any { "recovered" } else { "failure" }.into(),
                x: if any { Some(x) } else { None },
                per_index,
                ambiguity: None,
                oracle_calls: 0,
            }
        }
        InvertMethod::GeneralPauli => {
            let enc = enc.ok_or_else(|| need(Some("--circuit"))).map_err(config_err)?;
            let basis = basis.ok_or_else(|| need(Some("--basis"))).map_err(config_err)?;
            let e = DVector::from_column_slice(&values);
            let blocks = enc
                .partition()
                .ok_or_else(|| config_err(ConfigError("encoding has no partition".into())))?
                .to_vec();
            let oracle = |obs: &HermitianPauliSum, x: &[f64]| {
                encode(&enc, x).map(|s| s.expectation(obs)).unwrap_or(f64::NAN)
            };
            let mut x = vec![f64::NAN; enc.input_dim()];
            let mut per_index = Vec::new();
            let mut calls = 0;
            let mut ambiguity = 1;
            let mut any = false;
            for block in &blocks {
                match invert_general_pauli(&e, &basis, &enc, block, &oracle) {
                    Ok(res) => {
                        any = true;
                        calls += res.oracle_calls;
                        ambiguity = ambiguity.max(res.ambiguity);
                        for (slot, &j) in block.inputs.iter().enumerate() {
                            x[j] = res.x_block[slot];
                            per_index.push(
                                json!({"index": j, "status": "recovered", "x": res.x_block[slot]}),
                            );
                        }
                    }
                    Err(err) => {
                        for &j in &block.inputs {
                            per_index.push(
                                json!({"index": j, "status": "failure", "reason": err.to_string()}),
                            );
                        }
                    }
                }
            }
            InvertReport {
                method: "general-pauli".into(),
                status: if any { "recovered" } else { "failure" }.into(),
                x: if any { Some(x) } else { None },
                per_index,
                ambiguity: Some(ambiguity),
                oracle_calls: calls,
            }
        }
        InvertMethod::Grid | InvertMethod::Pgd => {
            let enc = enc.ok_or_else(|| need(Some("--circuit"))).map_err(config_err)?;
            let basis = basis.ok_or_else(|| need(Some("--basis"))).map_err(config_err)?;
            let e = DVector::from_column_slice(&values);
            let bounds = params.bounds.clone().unwrap_or_else(|| {
                vec![(-std::f64::consts::PI, std::f64::consts::PI); enc.input_dim()]
            });
            let res = if method == InvertMethod::Grid {
                grid_search_invert(
                    &e,
                    &enc,
                    &basis,
                    &bounds,
                    params.eps.unwrap_or(1e-3),
                    params.budget.unwrap_or(10_000_000),
                )
            } else {
                let dp = descent_params(&params);
                perturbed_gd_invert(&e, &enc, &basis, &bounds, None, &dp, seed)
            };
            match res {
                Ok(r) => InvertReport {
                    method: if method == InvertMethod::Grid { "grid" } else { "pgd" }.into(),
                    status: "recovered".into(),
                    x: Some(r.x.clone()),
                    per_index: vec![json!({"cost": r.cost})],
                    ambiguity: None,
                    oracle_calls: r.oracle_calls,
                },
                Err(e) => failure_report(
                    if method == InvertMethod::Grid { "grid" } else { "pgd" },
                    &e.to_string(),
                ),
            }
        }
        InvertMethod::Direct => {
            let enc = enc.ok_or_else(|| need(Some("--circuit"))).map_err(config_err)?;
            let ansatz = params.ansatz.clone().ok_or_else(|| need(Some("ansatz"))).map_err(config_err)?;
            let observable =
                params.observable.clone().ok_or_else(|| need(Some("observable"))).map_err(config_err)?;
            let theta = params.theta.clone().ok_or_else(|| need(Some("theta"))).map_err(config_err)?;
            let leaked = DVector::from_column_slice(&values);
            let bounds = params.bounds.clone().unwrap_or_else(|| {
                vec![(-std::f64::consts::PI, std::f64::consts::PI); enc.input_dim()]
            });
            let dp = descent_params(&params);
            match direct_input_recovery(
                &leaked, &enc, &ansatz, &observable, &theta, &bounds, None, &dp, seed,
            ) {
                Ok(r) => InvertReport {
                    method: "direct".into(),
                    status: "recovered".into(),
                    x: Some(r.x.clone()),
                    per_index: vec![json!({"mismatch": r.cost})],
                    ambiguity: None,
                    oracle_calls: r.oracle_calls,
                },
                Err(e) => failure_report("direct", &e.to_string()),
            }
        }
    };
    let body = serde_json::to_string_pretty(&report).map_err(|e| run_err(RunError(e.to_string())))?;
    write_output(out, &body).map_err(run_err)
}

fn descent_params(params: &InvertParams) -> DescentParams {
    let mut dp = DescentParams::default();
    if let Some(d) = &params.descent {
        if let Some(v) = d.step {
            dp.step = v;
        }
        if let Some(v) = d.iters {
            dp.iters = v;
        }
        if let Some(v) = d.restarts {
            dp.restarts = v;
        }
        if let Some(v) = d.noise_radius {
            dp.noise_radius = v;
        }
    }
    dp
}

fn failure_report(method: &str, reason: &str) -> InvertReport {
    InvertReport {
        method: method.into(),
        status: "failure".into(),
        x: None,
        per_index: vec![json!({"reason": reason})],
        ambiguity: None,
        oracle_calls: 0,
    }
}

#[derive(Deserialize)]
struct LandscapeConfig {
    family: LandscapeFamily,
    qubits: Vec<usize>,
    seeds: Vec<u64>,
    #[serde(default = "default_samples")]
    samples: usize,
}
fn default_samples() -> usize {
    4096
}

fn cmd_landscape(config: &Path, format: Format, out: Option<&Path>) -> CmdResult {
    let cfg: LandscapeConfig = read_json(config).map_err(config_err)?;
    let records = landscape_sweep(cfg.family, &cfg.qubits, &cfg.seeds, cfg.samples)
        .map_err(|e| run_err(RunError(e.to_string())))?;
    match format {
        Format::Json => {
            let body = serde_json::to_string_pretty(&records)
                .map_err(|e| run_err(RunError(e.to_string())))?;
            write_output(out, &body).map_err(run_err)
        }
        Format::Csv => {
            let csv = emit_landscape_csv(&records);
            match out {
                Some(dir) => {
                    std::fs::create_dir_all(dir).map_err(|e| run_err(RunError(e.to_string())))?;
                    std::fs::write(dir.join("landscape_points.csv"), csv.points)
                        .map_err(|e| run_err(RunError(e.to_string())))?;
                    std::fs::write(dir.join("landscape_summary.csv"), csv.summary)
                        .map_err(|e| run_err(RunError(e.to_string())))?;
                    Ok(())
                }
                None => {
                    println!("{}\n{}", csv.points, csv.summary);
                    Ok(())
                }
            }
        }
    }
}

fn cmd_attack(config: &Path, seed: Option<u64>, format: Format, out: Option<&Path>) -> CmdResult {
    let mut cfg: ExperimentConfig = read_json(config).map_err(config_err)?;
    if let Some(s) = seed {
        cfg.seeds = vec![s];
    }
    let report = run_attack_pipeline(&cfg).map_err(|e| config_err(ConfigError(e.to_string())))?;
    let fmt = match format {
        Format::Json => ReportFormat::Json,
        Format::Csv => ReportFormat::Csv,
    };
    let body = emit_attack_report(&report, fmt).map_err(|e| run_err(RunError(e.to_string())))?;
    write_output(out, &body).map_err(run_err)
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => code,
    }
}
