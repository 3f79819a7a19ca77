//! Experiment runner: end-to-end attack batches, expectation-landscape
//! sweeps, and report emission (JSON / long-format CSV).

use crate::circuits::{
    fourier_tower_map, gue_hermitian, pauli_product_map, AnsatzCircuit,
    EncodingCircuit, PartitionBlock,
};
use crate::dla::{compute_dla_basis, DlaBasis, StructureConstants};
use crate::gsim::{chi_matrix, observable_coeffs, AdjointFactors, GateAdjoints};
use crate::inversion::{
    blackbox::{direct_input_recovery, grid_search_invert, perturbed_gd_invert, DescentParams},
    invert_general_pauli, invert_pauli_product, periodic_error,
};
use crate::oracle::{encode, vqc_gradients};
use crate::pauli::{Axis, HermitianPauliSum, PauliString};
use crate::recovery::recover_snapshot;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("serialization: {0}")]
    Serde(#[from] serde_json::Error),
    #[error("landscape grid needs at least 16 samples, got {0}")]
    TooFewSamples(usize),
    #[error("simulation failed: {0}")]
    Simulation(String),
}

/// Circuit family an attack batch runs against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scenario {
    /// One R_axis(x_q) per qubit, su(2)-block ansatz.
    PauliProduct,
    /// Parallel reuploading tower: input j on `reuploads` qubits at scales
    /// base^l; n = inputs * reuploads.
    FourierTower { inputs: usize, reuploads: usize, base: f64 },
    /// Random 2-local Pauli generators whose Lie closure blows past the
    /// dimension budget: the attack must stop at the budget wall.
    ExpressivePauli { generator_count: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Method {
    PauliProduct,
    GeneralPauli,
    Grid { eps: f64, budget: u128 },
    Pgd,
    Direct,
}

fn default_dim_budget() -> usize {
    64
}
fn default_shots() -> usize {
    3
}
fn default_success_tol() -> f64 {
    1e-6
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub method: Method,
    /// Qubit counts to run (ignored by FourierTower, which fixes n).
    pub qubits: Vec<usize>,
    pub seeds: Vec<u64>,
    #[serde(default = "default_dim_budget")]
    pub dim_budget: usize,
    /// Independent theta draws stacked in the snapshot-recovery system.
    #[serde(default = "default_shots")]
    pub shots: usize,
    #[serde(default = "default_success_tol")]
    pub success_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub config_hash: String,
    pub n: usize,
    pub seed: u64,
    pub dla_dim: Option<usize>,
    pub depth: usize,
    pub method: Method,
    pub success: bool,
    pub error_metric: Option<f64>,
    pub oracle_calls: usize,
    pub wall_ms: f64,
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub instances: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub mean_error: Option<f64>,
    pub median_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackReport {
    pub config_hash: String,
    pub records: Vec<InstanceRecord>,
    pub aggregate: Aggregate,
}

impl AttackReport {
    /// Report body with wall times zeroed, for replay comparisons.
    pub fn canonical(&self) -> AttackReport {
        let mut r = self.clone();
        for rec in &mut r.records {
            rec.wall_ms = 0.0;
        }
        r
    }
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

pub fn config_hash(config: &ExperimentConfig) -> Result<String, HarnessError> {
    let json = serde_json::to_string(config)?;
    Ok(format!("{:016x}", fnv1a64(json.as_bytes())))
}

/// su(2)-block ansatz: layers of per-qubit X and Y rotations, each gate its
/// own trainable parameter, deep enough that the gradient system can reach
/// full rank after stacking.
fn su2_block_ansatz(n: usize, min_gates: usize) -> AnsatzCircuit {
    let mut gens = Vec::new();
    while gens.len() < min_gates {
        for q in 0..n {
            gens.push(HermitianPauliSum::single(PauliString::single(n, q, Axis::X), 0.5));
            gens.push(HermitianPauliSum::single(PauliString::single(n, q, Axis::Y), 0.5));
        }
    }
    AnsatzCircuit::from_generators(n, gens).expect("single-string generators are valid")
}

fn su2_dla(n: usize, budget: usize) -> Result<DlaBasis, String> {
    let mut gens = Vec::new();
    for q in 0..n {
        gens.push(HermitianPauliSum::single(PauliString::single(n, q, Axis::X), 1.0));
        gens.push(HermitianPauliSum::single(PauliString::single(n, q, Axis::Y), 1.0));
    }
    compute_dla_basis(&gens, budget, n).map_err(|e| e.to_string())
}

fn sum_z(n: usize) -> HermitianPauliSum {
    let mut o = HermitianPauliSum::zero(n);
    for q in 0..n {
        o = o.add(&HermitianPauliSum::single(PauliString::single(n, q, Axis::Z), 1.0));
    }
    o
}

fn random_two_local(n: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<HermitianPauliSum> {
    let axes = [Axis::X, Axis::Y, Axis::Z];
    (0..count)
        .map(|_| {
            let a = rng.gen_range(0..n);
            let mut b = rng.gen_range(0..n);
            while b == a {
                b = rng.gen_range(0..n);
            }
            let pa = PauliString::single(n, a, *axes.choose(rng).unwrap());
            let pb = PauliString::single(n, b, *axes.choose(rng).unwrap());
            let mut x_mask = pa.x_mask() | pb.x_mask();
            let mut z_mask = pa.z_mask() | pb.z_mask();
            // avoid the identity if the two collapse
            if x_mask == 0 && z_mask == 0 {
                x_mask = pa.x_mask().max(1);
                z_mask = pa.z_mask();
            }
            HermitianPauliSum::single(PauliString::new(n, x_mask, z_mask).unwrap(), 1.0)
        })
        .collect()
}

struct Instance {
    enc: EncodingCircuit,
    n: usize,
}

fn build_instances(config: &ExperimentConfig) -> Result<Vec<Instance>, HarnessError> {
    match &config.scenario {
        Scenario::PauliProduct | Scenario::ExpressivePauli { .. } => {
            if config.qubits.is_empty() {
                return Err(HarnessError::Config("qubits list is empty".into()));
            }
            Ok(config
                .qubits
                .iter()
                .map(|&n| Instance { enc: pauli_product_map(n, Axis::X), n })
                .collect())
        }
        Scenario::FourierTower { inputs, reuploads, base } => {
            if *inputs == 0 || *reuploads == 0 {
                return Err(HarnessError::Config("tower needs inputs, reuploads >= 1".into()));
            }
            let enc = fourier_tower_map(*inputs, *reuploads, *base);
            Ok(vec![Instance { n: inputs * reuploads, enc }])
        }
    }
}

/// One full weak-breach + strong-breach run on one instance. Every failure
/// is caught and encoded as a reason string so the batch continues.
fn run_instance(
    config: &ExperimentConfig,
    hash: &str,
    inst: &Instance,
    seed: u64,
) -> InstanceRecord {
    let start = Instant::now();
    let n = inst.n;
    let mut record = InstanceRecord {
        config_hash: hash.to_string(),
        n,
        seed,
        dla_dim: None,
        depth: 0,
        method: config.method,
        success: false,
        error_metric: None,
        oracle_calls: 0,
        wall_ms: 0.0,
        reason: None,
    };
    let finish = |mut r: InstanceRecord| {
        r.wall_ms = start.elapsed().as_secs_f64() * 1e3;
        r
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e3779b97f4a7c15) ^ n as u64);
    let d = inst.enc.input_dim();
    let x_true: Vec<f64> = (0..d)
        .map(|_| rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI))
        .collect();

    // DLA of the ansatz generators (budget wall surfaces here)
    let basis = match &config.scenario {
        Scenario::ExpressivePauli { generator_count } => {
            let gens = random_two_local(n, *generator_count, &mut rng);
            match compute_dla_basis(&gens, config.dim_budget, n) {
                Ok(b) => b,
                Err(e) => {
                    record.reason = Some(e.to_string());
                    return finish(record);
                }
            }
        }
        _ => match su2_dla(n, config.dim_budget) {
            Ok(b) => b,
            Err(e) => {
                record.reason = Some(e);
                return finish(record);
            }
        },
    };
    record.dla_dim = Some(basis.dim());

    let ansatz = su2_block_ansatz(n, basis.dim() + 1);
    record.depth = ansatz.gates().len();
    let observable = sum_z(n);

    // weak breach: recover the snapshot from leaked gradients
    let recovered = (|| -> Result<(DVector<f64>, usize), String> {
        let sc = StructureConstants::compute(&basis);
        let gates = GateAdjoints::compute(&ansatz, &basis, &sc).map_err(|e| e.to_string())?;
        let w = observable_coeffs(&observable, &basis).map_err(|e| e.to_string())?;
        let mut chi_rows = DMatrix::<f64>::zeros(0, basis.dim());
        let mut grad_rows = DVector::<f64>::zeros(0);
        let mut calls = 0;
        for _ in 0..config.shots.max(1) {
            let theta: Vec<f64> = (0..ansatz.n_params())
                .map(|_| rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI))
                .collect();
            let factors = AdjointFactors::compute(&gates, &theta).map_err(|e| e.to_string())?;
            let chi = chi_matrix(&gates, &factors, &w);
            let grads = vqc_gradients(&inst.enc, &ansatz, &observable, &x_true, &theta)
                .map_err(|e| e.to_string())?;
            calls += 2 * ansatz.gates().len();
            chi_rows = DMatrix::from_fn(chi_rows.nrows() + chi.nrows(), basis.dim(), |r, c| {
                if r < chi_rows.nrows() {
                    chi_rows[(r, c)]
                } else {
                    chi[(r - chi_rows.nrows(), c)]
                }
            });
            grad_rows = DVector::from_fn(grad_rows.len() + grads.len(), |r, _| {
                if r < grad_rows.len() {
                    grad_rows[r]
                } else {
                    grads[r - grad_rows.len()]
                }
            });
        }
        let res = recover_snapshot(&chi_rows, &grad_rows).map_err(|e| e.to_string())?;
        Ok((res.snapshot, calls))
    })();
    let (e_snap, grad_calls) = match recovered {
        Ok(v) => v,
        Err(reason) => {
            record.reason = Some(reason);
            return finish(record);
        }
    };
    record.oracle_calls += grad_calls;

    // strong breach: invert the snapshot back to the input
    let bounds: Vec<(f64, f64)> =
        vec![(-std::f64::consts::PI, std::f64::consts::PI); d];
    let inverted: Result<(Vec<f64>, usize), String> = match config.method {
        Method::PauliProduct => (0..d)
            .map(|j| invert_pauli_product(&e_snap, &basis, &inst.enc, j).map(|r| r.x))
            .collect::<Result<Vec<_>, _>>()
            .map(|x| (x, 0))
            .map_err(|e| e.to_string()),
        Method::GeneralPauli => (|| {
            let blocks: Vec<PartitionBlock> = inst
                .enc
                .partition()
                .ok_or_else(|| "encoding has no partition".to_string())?
                .to_vec();
            let oracle = |obs: &HermitianPauliSum, x: &[f64]| {
                encode(&inst.enc, x).map(|s| s.expectation(obs)).unwrap_or(f64::NAN)
            };
            let mut x = vec![f64::NAN; d];
            let mut calls = 0;
            for block in &blocks {
                let res = invert_general_pauli(&e_snap, &basis, &inst.enc, block, &oracle)
                    .map_err(|e| e.to_string())?;
                calls += res.oracle_calls;
                for (slot, &j) in block.inputs.iter().enumerate() {
                    x[j] = res.x_block[slot];
                }
            }
            Ok((x, calls))
        })(),
        Method::Grid { eps, budget } => {
            grid_search_invert(&e_snap, &inst.enc, &basis, &bounds, eps, budget)
                .map(|r| (r.x, r.oracle_calls))
                .map_err(|e| e.to_string())
        }
        Method::Pgd => {
            let params = DescentParams::default();
            perturbed_gd_invert(&e_snap, &inst.enc, &basis, &bounds, None, &params, seed)
                .map(|r| (r.x, r.oracle_calls))
                .map_err(|e| e.to_string())
        }
        Method::Direct => (|| {
            let theta: Vec<f64> = (0..ansatz.n_params())
                .map(|_| rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI))
                .collect();
            let leaked = vqc_gradients(&inst.enc, &ansatz, &observable, &x_true, &theta)
                .map_err(|e| e.to_string())?;
            let params = DescentParams::default();
            direct_input_recovery(
                &leaked, &inst.enc, &ansatz, &observable, &theta, &bounds, None, &params, seed,
            )
            .map(|r| (r.x, r.oracle_calls))
            .map_err(|e| e.to_string())
        })(),
    };
    match inverted {
        Ok((x_rec, calls)) => {
            record.oracle_calls += calls;
            let err = (0..d)
                .map(|j| periodic_error(x_rec[j], x_true[j], inst.enc.input_period(j)))
                .fold(0.0f64, f64::max);
            record.error_metric = Some(err);
            record.success = err < config.success_tol;
        }
        Err(reason) => {
            record.reason = Some(reason);
        }
    }
    finish(record)
}

pub fn run_attack_pipeline(config: &ExperimentConfig) -> Result<AttackReport, HarnessError> {
    if config.seeds.is_empty() {
        return Err(HarnessError::Config("seeds list is empty".into()));
    }
    let hash = config_hash(config)?;
    let instances = build_instances(config)?;
    let mut records = Vec::new();
    for inst in &instances {
        for &seed in &config.seeds {
            records.push(run_instance(config, &hash, inst, seed));
        }
    }
    let successes = records.iter().filter(|r| r.success).count();
    let mut errs: Vec<f64> = records.iter().filter_map(|r| r.error_metric).collect();
    errs.sort_by(f64::total_cmp);
    let aggregate = Aggregate {
        instances: records.len(),
        successes,
        success_rate: successes as f64 / records.len() as f64,
        mean_error: if errs.is_empty() {
            None
        } else {
            Some(errs.iter().sum::<f64>() / errs.len() as f64)
        },
        median_error: if errs.is_empty() { None } else { Some(errs[errs.len() / 2]) },
    };
    Ok(AttackReport { config_hash: hash, records, aggregate })
}

// ---------------------------------------------------------------------------
// Landscape sweeps

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandscapeRecord {
    pub n: usize,
    pub seed: u64,
    pub x: Vec<f64>,
    pub values: Vec<f64>,
    pub stationary: Vec<f64>,
    /// Minimum spacing between consecutive stationary points.
    pub r: Option<f64>,
    /// True when the curve is constant to machine precision.
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LandscapeFamily {
    /// One R_X(x) between two fixed random dressing unitaries; the curve is
    /// a single harmonic, stationary points pi apart.
    SingleRotation,
    /// Full-register GUE generator e^{-iHx}: frequencies are eigenvalue
    /// gaps, whose spread grows with the Hilbert dimension.
    GueEncoder,
}

/// Stationary points of f on [lo, hi): central-difference sign changes on
/// the sample grid, refined by bisection of the numerical derivative.
pub fn stationary_points(
    f: &dyn Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    samples: usize,
) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>, bool), HarnessError> {
    if samples < 16 {
        return Err(HarnessError::TooFewSamples(samples));
    }
    let h = (hi - lo) / samples as f64;
    let xs: Vec<f64> = (0..samples).map(|i| lo + i as f64 * h).collect();
    let vs: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let spread = vs.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b))
        - vs.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    if spread < 1e-12 {
        return Ok((xs, vs, Vec::new(), true));
    }
    let fd = 1e-6;
    let deriv = |x: f64| (f(x + fd) - f(x - fd)) / (2.0 * fd);
    // detect sign changes from the sampled values; only refine with the
    // finite-difference derivative inside flagged cells
    let slope: Vec<f64> = (0..samples)
        .map(|i| vs[(i + 1) % samples] - vs[if i == 0 { samples - 1 } else { i - 1 }])
        .collect();
    let mut roots = Vec::new();
    for i in 1..samples - 2 {
        if slope[i].signum() == slope[i + 1].signum() {
            continue;
        }
        let (mut a, mut b) = (xs[i], xs[i + 1]);
        let (mut da, db) = (deriv(a), deriv(b));
        if da == 0.0 {
            roots.push(a);
            continue;
        }
        if da.signum() == db.signum() {
            continue;
        }
        while b - a > 1e-8 {
            let m = 0.5 * (a + b);
            let dm = deriv(m);
            if dm == 0.0 {
                a = m;
                break;
            }
            if dm.signum() == da.signum() {
                a = m;
                da = dm;
            } else {
                b = m;
            }
        }
        roots.push(0.5 * (a + b));
    }
    Ok((xs, vs, roots, false))
}

fn min_gap(points: &[f64]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    points
        .windows(2)
        .map(|w| w[1] - w[0])
        .min_by(f64::total_cmp)
}

fn dressed_rotation_curve(n: usize, seed: u64) -> impl Fn(f64) -> f64 {
    // |psi(x)> = V2 R_X(x) V1 |0>, O = Z_0: precompute |psi1> = V1|0> and
    // O' = V2^dag O V2 once, leaving only the cheap rotation per sample
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h1 = gue_hermitian(n, &mut rng);
    let h2 = gue_hermitian(n, &mut rng);
    let v1 = (h1 * Complex64::new(0.0, -1.0)).exp();
    let v2 = (h2 * Complex64::new(0.0, -1.0)).exp();
    let obs = HermitianPauliSum::single(PauliString::single(n, 0, Axis::Z), 1.0)
        .to_dense()
        .expect("within dense cap");
    let o_dressed = v2.adjoint() * obs * &v2;
    let psi1 = v1.column(0).into_owned();
    let mut rx_half = HermitianPauliSum::single(PauliString::single(n, 0, Axis::X), 0.5)
        .to_dense()
        .expect("within dense cap");
    rx_half *= Complex64::new(0.0, -1.0);
    move |x: f64| {
        let u = DMatrix::identity(psi1.len(), psi1.len()) * Complex64::new((x / 2.0).cos(), 0.0)
            + &rx_half * Complex64::new(2.0 * (x / 2.0).sin(), 0.0);
        let psi = &u * &psi1;
        (psi.adjoint() * &o_dressed * psi)[(0, 0)].re
    }
}

fn gue_encoder_curve(n: usize, seed: u64) -> impl Fn(f64) -> f64 {
    // f(x) = <0| e^{iHx} O e^{-iHx} |0>: in the eigenbasis of H this is a
    // quadratic form with phases e^{-i lambda x}, O(dim^2) per sample
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = gue_hermitian(n, &mut rng);
    let eig = nalgebra::SymmetricEigen::new(h);
    let obs = HermitianPauliSum::single(PauliString::single(n, 0, Axis::Z), 1.0)
        .to_dense()
        .expect("within dense cap");
    let o_eig = eig.eigenvectors.adjoint() * obs * &eig.eigenvectors;
    let a = eig.eigenvectors.adjoint().column(0).into_owned();
    let lambdas = eig.eigenvalues;
    move |x: f64| {
        let dim = a.len();
        let mut phased = DVector::<Complex64>::zeros(dim);
        for i in 0..dim {
            let phase = Complex64::new(0.0, -lambdas[i] * x).exp();
            phased[i] = phase * a[i];
        }
        (phased.adjoint() * &o_eig * phased)[(0, 0)].re
    }
}

pub fn landscape_sweep(
    family: LandscapeFamily,
    qubits: &[usize],
    seeds: &[u64],
    samples: usize,
) -> Result<Vec<LandscapeRecord>, HarnessError> {
    let (lo, hi) = (0.0, std::f64::consts::TAU);
    let mut out = Vec::new();
    for &n in qubits {
        if n > crate::pauli::DENSE_CAP {
            return Err(HarnessError::Config(format!(
                "n = {n} exceeds the dense simulation cap"
            )));
        }
        for &seed in seeds {
            let f: Box<dyn Fn(f64) -> f64> = match family {
                LandscapeFamily::SingleRotation => Box::new(dressed_rotation_curve(n, seed)),
                LandscapeFamily::GueEncoder => Box::new(gue_encoder_curve(n, seed)),
            };
            let (x, values, stationary, degenerate) = stationary_points(&*f, lo, hi, samples)?;
            let r = min_gap(&stationary);
            out.push(LandscapeRecord { n, seed, x, values, stationary, r, degenerate });
        }
    }
    Ok(out)
}

/// Mean stationary spacing per qubit count, in ascending n.
pub fn mean_r_by_n(records: &[LandscapeRecord]) -> Vec<(usize, f64)> {
    let mut ns: Vec<usize> = records.iter().map(|r| r.n).collect();
    ns.sort_unstable();
    ns.dedup();
    ns.into_iter()
        .filter_map(|n| {
            let rs: Vec<f64> =
                records.iter().filter(|r| r.n == n).filter_map(|r| r.r).collect();
            if rs.is_empty() {
                None
            } else {
                Some((n, rs.iter().sum::<f64>() / rs.len() as f64))
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Report emission

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    Json,
    Csv,
}

pub fn emit_attack_report(report: &AttackReport, format: ReportFormat) -> Result<String, HarnessError> {
    match format {
        ReportFormat::Json => Ok(serde_json::to_string_pretty(report)?),
        ReportFormat::Csv => {
            let mut s = String::from(
                "config_hash,n,seed,dla_dim,depth,success,error_metric,oracle_calls,wall_ms,reason\n",
            );
            for r in &report.records {
                s.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{:.3},{}\n",
                    r.config_hash,
                    r.n,
                    r.seed,
                    r.dla_dim.map_or(String::new(), |d| d.to_string()),
                    r.depth,
                    r.success,
                    r.error_metric.map_or(String::new(), |e| format!("{e:e}")),
                    r.oracle_calls,
                    r.wall_ms,
                    r.reason.as_deref().unwrap_or("").replace(',', ";"),
                ));
            }
            Ok(s)
        }
    }
}

/// Long-format landscape CSV: one row per sample, plus a per-n summary.
pub struct LandscapeCsv {
    pub points: String,
    pub summary: String,
}

pub fn emit_landscape_csv(records: &[LandscapeRecord]) -> LandscapeCsv {
    let mut points = String::from("n,seed,x,value\n");
    for rec in records {
        for (x, v) in rec.x.iter().zip(&rec.values) {
            points.push_str(&format!("{},{},{x},{v}\n", rec.n, rec.seed));
        }
    }
    let mut summary = String::from("n,mean_r\n");
    for (n, r) in mean_r_by_n(records) {
        summary.push_str(&format!("{n},{r}\n"));
    }
    LandscapeCsv { points, summary }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn product_config() -> ExperimentConfig {
        ExperimentConfig {
            scenario: Scenario::PauliProduct,
            method: Method::PauliProduct,
            qubits: vec![4],
            seeds: vec![1, 2, 3],
            dim_budget: 64,
            shots: 3,
            success_tol: 1e-6,
        }
    }

    #[test]
    fn product_pipeline_succeeds() {
        let report = run_attack_pipeline(&product_config()).unwrap();
        assert_eq!(report.aggregate.instances, 3);
        assert_abs_diff_eq!(report.aggregate.success_rate, 1.0);
        for r in &report.records {
            assert!(r.error_metric.unwrap() < 1e-6);
        }
    }

    #[test]
    fn expressive_hits_budget_wall() {
        let mut cfg = product_config();
        cfg.scenario = Scenario::ExpressivePauli { generator_count: 8 };
        cfg.qubits = vec![5];
        cfg.dim_budget = 24;
        let report = run_attack_pipeline(&cfg).unwrap();
        assert_abs_diff_eq!(report.aggregate.success_rate, 0.0);
        for r in &report.records {
            assert!(r.reason.is_some(), "budget wall must leave a reason");
        }
    }

    #[test]
    fn replay_is_deterministic() {
        let cfg = product_config();
        let a = run_attack_pipeline(&cfg).unwrap().canonical();
        let b = run_attack_pipeline(&cfg).unwrap().canonical();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn config_roundtrips_and_defaults() {
        let cfg = product_config();
        let json = serde_json::to_string(&cfg).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(cfg, back);
        let minimal: ExperimentConfig = serde_json::from_str(
            r#"{"scenario":{"kind":"pauli_product"},"method":{"kind":"pauli_product"},"qubits":[2],"seeds":[0]}"#,
        )
        .unwrap();
        assert_eq!(minimal.dim_budget, 64);
        assert_eq!(minimal.shots, 3);
    }

    #[test]
    fn single_rotation_spacing_is_pi() {
        let records =
            landscape_sweep(LandscapeFamily::SingleRotation, &[2, 3], &[5], 4096).unwrap();
        for rec in &records {
            let r = rec.r.expect("two stationary points in a period");
            assert!(
                (r - std::f64::consts::PI).abs() < 0.02 * std::f64::consts::PI,
                "r = {r}"
            );
        }
    }

    #[test]
    fn gue_spacing_shrinks_with_n() {
        let seeds: Vec<u64> = (0..4).collect();
        let records =
            landscape_sweep(LandscapeFamily::GueEncoder, &[2, 3, 4], &seeds, 4096).unwrap();
        let means = mean_r_by_n(&records);
        assert_eq!(means.len(), 3);
        for w in means.windows(2) {
            assert!(w[1].1 < w[0].1, "mean r must shrink: {means:?}");
        }
    }

    #[test]
    fn constant_observable_is_degenerate() {
        let (_, _, stationary, degenerate) =
            stationary_points(&|_| 0.25, 0.0, std::f64::consts::TAU, 64).unwrap();
        assert!(degenerate);
        assert!(stationary.is_empty());
    }

    #[test]
    fn csv_emission_schema() {
        let records =
            landscape_sweep(LandscapeFamily::SingleRotation, &[2], &[1], 64).unwrap();
        let csv = emit_landscape_csv(&records);
        assert!(csv.points.starts_with("n,seed,x,value\n"));
        assert!(csv.summary.starts_with("n,mean_r\n"));
        let report = run_attack_pipeline(&product_config()).unwrap();
        let body = emit_attack_report(&report, ReportFormat::Csv).unwrap();
        assert!(body.lines().count() == 1 + report.records.len());
        let json = emit_attack_report(&report, ReportFormat::Json).unwrap();
        let back: AttackReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back.aggregate, report.aggregate);
    }
}
