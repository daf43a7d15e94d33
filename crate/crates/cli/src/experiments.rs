//! Validation and execution of each experiment kind.

use std::fmt;

use anyhow::{Context, Result};
use bornlab_core::fourier::{correlation_spectrum, register_size, walsh_coefficients};
use bornlab_core::rng::seeded;
use bornlab_core::surrogates::iqp::{iqp_surrogate_correlator, IqpSpec};
use bornlab_core::surrogates::rmps::correlator_ops;
use bornlab_core::surrogates::{
    pauli_propagate, rmps_correlator_variance, rmps_marginal_variance, rmps_mc_estimate, rmps_mc_truncated_prob,
    rmps_renyi2_max, rmps_truncated_prob_variance, RmpsParams, SiteOp,
};
use bornlab_core::training::{GradientMethod, InitKind, Optimizer, SurrogateKind, TrainConfig};
use bornlab_core::variance::{
    haar_truncation_error, haar_truncation_mc, matchcircuit_mixing_depth, matchgate_correlator_report,
    matchgate_truncated_report, scrambling_bound_check,
};
use bornlab_core::{
    algebra_intersection, build_ansatz, build_hamiltonian, deploy_evaluate, discrepancy_report, ground_state,
    lie_closure, load_binary_csv, named_dla, rfc_sample, train, AnsatzKind, AnsatzSpec, Circuit, DlaKind, IqpLayout,
    KernelSpec, LossSpec, Model, PauliString, RfcPolicy, TruncationSpec,
};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::*;
use crate::output::{num, OutputDir, Table};
use crate::svg::Series;

/// Largest register accepted for data models (dense ground states).
const MAX_DATA_QUBITS: usize = 14;
/// Largest register for training and kernel losses.
const MAX_TRAIN_QUBITS: usize = 12;
/// Largest register for Lie closures (the basis can reach `4^n`).
const MAX_DLA_QUBITS: usize = 7;
/// Largest register for variance Monte Carlo on dense states.
const MAX_MC_QUBITS: usize = 12;

/// Problem with the configuration itself (exit code 1).
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

type Checked<T> = std::result::Result<T, ConfigError>;

fn bad<T>(msg: impl Into<String>) -> Checked<T> {
    Err(ConfigError(msg.into()))
}

fn need<'a, T>(section: &'a Option<T>, key: &str, kind: ExperimentKind) -> Checked<&'a T> {
    section
        .as_ref()
        .ok_or_else(|| ConfigError(format!("missing [{key}] section, required by experiment {kind:?}")))
}

/// Sections each experiment reads; anything else is rejected.
fn allowed_sections(kind: ExperimentKind) -> &'static [&'static str] {
    match kind {
        ExperimentKind::TrainDeploy => &["data", "ansatz", "loss", "train", "truncation", "surrogate"],
        ExperimentKind::Discrepancy => &["data", "ansatz", "loss", "train", "surrogate", "discrepancy"],
        ExperimentKind::VarianceGrid => &["variance"],
        ExperimentKind::RmpsGrid => &["rmps"],
        ExperimentKind::DlaCheck => &["dla"],
        ExperimentKind::Spectrum => &["data"],
        ExperimentKind::PpsBench => &["ansatz", "pps"],
    }
}

fn present_sections(cfg: &ExperimentConfig) -> Vec<&'static str> {
    let mut v = Vec::new();
    let flags = [
        ("data", cfg.data.is_some()),
        ("ansatz", cfg.ansatz.is_some()),
        ("loss", cfg.loss.is_some()),
        ("train", cfg.train.is_some()),
        ("truncation", cfg.truncation.is_some()),
        ("surrogate", cfg.surrogate.is_some()),
        ("variance", cfg.variance.is_some()),
        ("rmps", cfg.rmps.is_some()),
        ("dla", cfg.dla.is_some()),
        ("pps", cfg.pps.is_some()),
        ("discrepancy", cfg.discrepancy.is_some()),
    ];
    for (name, on) in flags {
        if on {
            v.push(name);
        }
    }
    v
}

/// Register size implied by the data section, when known without I/O.
fn data_qubits(d: &DataConfig) -> Option<usize> {
    match d {
        DataConfig::Tfim { n, .. } | DataConfig::HeisenbergAlt { n, .. } | DataConfig::Haldane1d { n, .. } => Some(*n),
        DataConfig::Haldane2d { nx, ny, .. } => Some(nx * ny),
        DataConfig::Csv { columns, .. } => columns.as_ref().map(Vec::len),
    }
}

/// False for zero, negatives and NaN.
fn positive(v: f64) -> bool {
    v > 0.0
}

fn check_data(d: &DataConfig) -> Checked<()> {
    if let Some(n) = data_qubits(d) {
        if n == 0 || n > MAX_DATA_QUBITS {
            return bad(format!("data: register of {n} qubits outside 1..={MAX_DATA_QUBITS}"));
        }
    }
    let finite = |vals: &[f64]| vals.iter().all(|v| v.is_finite());
    let ok = match d {
        DataConfig::Tfim { j, h, .. } => finite(&[*j, *h]),
        DataConfig::HeisenbergAlt { j_even, j_odd, .. } => finite(&[*j_even, *j_odd]),
        DataConfig::Haldane1d { j, h1, h2, .. } | DataConfig::Haldane2d { j, h1, h2, .. } => finite(&[*j, *h1, *h2]),
        DataConfig::Csv { .. } => true,
    };
    if !ok {
        return bad("data: couplings must be finite");
    }
    if let DataConfig::Haldane2d { nx, ny, .. } = d {
        if *nx == 0 || *ny < 2 {
            return bad("data: haldane_2d needs nx >= 1 and ny >= 2");
        }
    }
    Ok(())
}

fn check_ansatz(a: &AnsatzConfig, n: Option<usize>) -> Checked<()> {
    match a {
        AnsatzConfig::StronglyEntangling { layers } if *layers == 0 => bad("ansatz.layers must be at least 1"),
        AnsatzConfig::Matchcircuit { gates } | AnsatzConfig::DlaSampled { gates, .. } if *gates == 0 => {
            bad("ansatz.gates must be at least 1")
        }
        AnsatzConfig::Matchcircuit { .. } if n == Some(1) => bad("ansatz: matchcircuit needs at least 2 qubits"),
        AnsatzConfig::DlaSampled {
            algebra: AlgebraName::Haldane,
            ..
        } if n.is_some_and(|n| n < 3) => bad("ansatz: haldane algebra needs at least 3 qubits"),
        _ => Ok(()),
    }
}

fn check_loss(l: &LossConfig, n: Option<usize>) -> Checked<()> {
    match l {
        LossConfig::Mmd { kernel } => {
            if n.is_some_and(|n| n > MAX_TRAIN_QUBITS) {
                return bad(format!("loss: MMD kernels are capped at {MAX_TRAIN_QUBITS} qubits"));
            }
            match kernel {
                KernelConfig::Gaussian { sigma } if !positive(*sigma) => bad("loss.kernel.sigma must be positive"),
                KernelConfig::Anova { window, gamma } => {
                    if *window == 0 || n.is_some_and(|n| *window > n) {
                        bad("loss.kernel.window must lie in 1..=n")
                    } else if !positive(*gamma) {
                        bad("loss.kernel.gamma must be positive")
                    } else {
                        Ok(())
                    }
                }
                _ => Ok(()),
            }
        }
        LossConfig::Kl { epsilon: Some(e) } if !positive(*e) => bad("loss.epsilon must be positive"),
        _ => Ok(()),
    }
}

fn check_train(t: &TrainSection) -> Checked<()> {
    if !positive(t.learning_rate) {
        return bad("train.learning_rate must be positive");
    }
    if !(0.0..1.0).contains(&t.beta1) || !(0.0..1.0).contains(&t.beta2) {
        return bad("train.beta1 and train.beta2 must lie in [0, 1)");
    }
    if !positive(t.eps) || !positive(t.fd_step) {
        return bad("train.eps and train.fd_step must be positive");
    }
    if t.batch == Some(0) {
        return bad("train.batch must be at least 1");
    }
    if t.seeds.as_ref().is_some_and(Vec::is_empty) {
        return bad("train.seeds must not be empty");
    }
    Ok(())
}

fn check_surrogate(s: Option<&SurrogateConfig>, ansatz: &AnsatzConfig) -> Checked<()> {
    if matches!(s, Some(SurrogateConfig::IqpPps { .. })) && !matches!(ansatz, AnsatzConfig::Iqp { .. }) {
        return bad("surrogate: iqp_pps needs an iqp ansatz");
    }
    Ok(())
}

fn check_truncation(t: &TruncationConfig, n: Option<usize>) -> Checked<()> {
    match t {
        TruncationConfig::KOrder { orders } => {
            if orders.is_empty() {
                return bad("truncation.orders must not be empty");
            }
            if let (Some(n), Some(k)) = (n, orders.iter().find(|&&k| n.is_some_and(|n| k > n))) {
                return bad(format!("truncation.orders contains {k} > n = {n}"));
            }
        }
        TruncationConfig::Full => {}
        TruncationConfig::Rfc { sizes, max_order, prob } => {
            if sizes.is_empty() || sizes.contains(&0) {
                return bad("truncation.sizes must be non-empty and positive");
            }
            if max_order.is_some() == prob.is_some() {
                return bad("truncation: give exactly one of max_order or prob");
            }
        }
    }
    Ok(())
}

fn orders_in(orders: &Option<Vec<usize>>, lo: usize, hi: usize, key: &str) -> Checked<()> {
    if let Some(o) = orders {
        if let Some(k) = o.iter().find(|&&k| k < lo || k > hi) {
            return bad(format!("{key}.orders contains {k}, outside {lo}..={hi}"));
        }
    }
    Ok(())
}

/// Structural and range checks that need no computation.
pub fn validate(cfg: &ExperimentConfig) -> Checked<()> {
    let kind = cfg.experiment;
    let allowed = allowed_sections(kind);
    if let Some(extra) = present_sections(cfg).into_iter().find(|s| !allowed.contains(s)) {
        return bad(format!("section [{extra}] is not used by experiment {kind:?}"));
    }
    match kind {
        ExperimentKind::TrainDeploy | ExperimentKind::Discrepancy => {
            let data = need(&cfg.data, "data", kind)?;
            check_data(data)?;
            let n = data_qubits(data);
            if n.is_some_and(|n| n > MAX_TRAIN_QUBITS) {
                return bad(format!("data: training is capped at {MAX_TRAIN_QUBITS} qubits"));
            }
            let ansatz = need(&cfg.ansatz, "ansatz", kind)?;
            check_ansatz(ansatz, n)?;
            let loss = need(&cfg.loss, "loss", kind)?;
            check_loss(loss, n)?;
            check_train(need(&cfg.train, "train", kind)?)?;
            check_surrogate(cfg.surrogate.as_ref(), ansatz)?;
            if kind == ExperimentKind::TrainDeploy {
                let t = need(&cfg.truncation, "truncation", kind)?;
                check_truncation(t, n)?;
                let full_only = match t {
                    TruncationConfig::Full => true,
                    TruncationConfig::KOrder { orders } => n.is_some_and(|n| orders.iter().all(|&k| k >= n)),
                    TruncationConfig::Rfc { .. } => false,
                };
                if matches!(loss, LossConfig::Kl { .. }) && !full_only {
                    return bad("loss: kl needs a nonnegative model, so truncation must be full");
                }
            } else {
                let d = need(&cfg.discrepancy, "discrepancy", kind)?;
                if n.is_some_and(|n| d.classical_order > n) {
                    return bad("discrepancy.classical_order exceeds n");
                }
                if matches!(loss, LossConfig::Kl { .. }) {
                    return bad("loss: kl cannot train the truncated classical model");
                }
            }
        }
        ExperimentKind::Spectrum => check_data(need(&cfg.data, "data", kind)?)?,
        ExperimentKind::VarianceGrid => {
            let v = need(&cfg.variance, "variance", kind)?;
            if v.ns.is_empty() {
                return bad("variance.ns must not be empty");
            }
            if v.draws < 100 {
                return bad("variance.draws must be at least 100");
            }
            for &n in &v.ns {
                let matchgate = matches!(
                    v.family,
                    VarianceFamily::MatchgateCorrelator | VarianceFamily::MatchgateTruncated
                );
                if n == 0 || n > MAX_MC_QUBITS || (matchgate && n < 2) {
                    return bad(format!("variance.ns contains {n}, outside the supported range"));
                }
                match v.family {
                    VarianceFamily::MatchgateCorrelator => orders_in(&v.orders, 1, n - 1, "variance")?,
                    VarianceFamily::Scrambling => orders_in(&v.orders, 1, n, "variance")?,
                    _ => orders_in(&v.orders, 0, n, "variance")?,
                }
            }
            if v.gates == Some(0) || v.layers == 0 {
                return bad("variance.gates and variance.layers must be positive");
            }
        }
        ExperimentKind::RmpsGrid => {
            let r = need(&cfg.rmps, "rmps", kind)?;
            if r.ns.is_empty() || r.chis.is_empty() {
                return bad("rmps.ns and rmps.chis must not be empty");
            }
            if r.chis.contains(&0) || r.ns.contains(&0) {
                return bad("rmps.ns and rmps.chis must be positive");
            }
            for &n in &r.ns {
                match r.quantity {
                    RmpsQuantity::Correlator | RmpsQuantity::Marginal => orders_in(&r.orders, 1, n, "rmps")?,
                    _ => orders_in(&r.orders, 0, n, "rmps")?,
                }
                if n > 60 {
                    return bad("rmps.ns must be at most 60");
                }
            }
            if r.draws > 0 && (r.ns.iter().any(|&n| n > 10) || r.chis.iter().any(|&c| c > 8)) {
                return bad("rmps: Monte Carlo needs n <= 10 and chi <= 8");
            }
        }
        ExperimentKind::DlaCheck => {
            let d = need(&cfg.dla, "dla", kind)?;
            let min = if d.algebra == AlgebraName::Haldane { 3 } else { 2 };
            if d.ns.is_empty() || d.ns.iter().any(|&n| n < min || n > MAX_DLA_QUBITS) {
                return bad(format!(
                    "dla.ns must be non-empty with entries in {min}..={MAX_DLA_QUBITS}"
                ));
            }
        }
        ExperimentKind::PpsBench => {
            let p = need(&cfg.pps, "pps", kind)?;
            let ansatz = need(&cfg.ansatz, "ansatz", kind)?;
            if p.n == 0 || p.n > MAX_MC_QUBITS {
                return bad(format!("pps.n must lie in 1..={MAX_MC_QUBITS}"));
            }
            check_ansatz(ansatz, Some(p.n))?;
            if p.budgets.is_empty() || p.instances == 0 {
                return bad("pps.budgets must be non-empty and pps.instances positive");
            }
            orders_in(&p.orders, 1, p.n, "pps")?;
        }
    }
    Ok(())
}

fn loss_spec(l: &LossConfig) -> LossSpec {
    match l {
        LossConfig::Mmd { kernel } => LossSpec::Mmd(match kernel {
            KernelConfig::Gaussian { sigma } => KernelSpec::Gaussian { sigma: *sigma },
            KernelConfig::Anova { window, gamma } => KernelSpec::AnovaSubstring {
                window: *window,
                gamma: *gamma,
            },
            KernelConfig::Parity { omega } => KernelSpec::Parity { omega: omega.clone() },
        }),
        LossConfig::Emd => LossSpec::Emd,
        LossConfig::Sqe => LossSpec::Sqe,
        LossConfig::Kl { epsilon } => LossSpec::Kl {
            epsilon: epsilon.unwrap_or(bornlab_core::losses::KL_EPSILON),
        },
    }
}

fn dla_kind(a: AlgebraName) -> DlaKind {
    match a {
        AlgebraName::Matchgate => DlaKind::Matchgate,
        AlgebraName::Heisenberg => DlaKind::Heisenberg,
        AlgebraName::Haldane => DlaKind::Haldane,
    }
}

fn ansatz(n: usize, a: &AnsatzConfig, seed: u64) -> Result<Circuit> {
    let kind = match a {
        AnsatzConfig::StronglyEntangling { layers } => AnsatzKind::StronglyEntangling { layers: *layers },
        AnsatzConfig::Iqp { pairs, triples } => AnsatzKind::Iqp(IqpLayout {
            pairs: *pairs,
            triples: *triples,
        }),
        AnsatzConfig::Matchcircuit { gates } => AnsatzKind::Matchcircuit { gates: *gates },
        AnsatzConfig::DlaSampled { algebra, gates } => AnsatzKind::DlaSampled {
            algebra: dla_kind(*algebra),
            gates: *gates,
        },
    };
    Ok(build_ansatz(&AnsatzSpec { n, kind, seed })?)
}

fn surrogate(s: Option<&SurrogateConfig>) -> SurrogateKind {
    match s {
        None | Some(SurrogateConfig::Statevector) => SurrogateKind::Statevector,
        Some(SurrogateConfig::IqpPps { h_max }) => SurrogateKind::IqpPps { h_max: *h_max },
        Some(SurrogateConfig::PauliProp { w_max }) => SurrogateKind::PauliProp { w_max: *w_max },
    }
}

fn train_config(t: &TrainSection, truncation: TruncationSpec, surrogate: SurrogateKind, seed: u64) -> TrainConfig {
    TrainConfig {
        iterations: t.iterations,
        learning_rate: t.learning_rate,
        optimizer: match t.optimizer {
            OptimizerName::Adam => Optimizer::Adam {
                beta1: t.beta1,
                beta2: t.beta2,
                eps: t.eps,
            },
            OptimizerName::Sgd => Optimizer::Sgd,
        },
        gradient: match t.gradient {
            GradientName::ParameterShift => GradientMethod::ParameterShift,
            GradientName::FiniteDifference => GradientMethod::FiniteDifference { step: t.fd_step },
        },
        truncation,
        surrogate,
        batch: t.batch,
        seed,
        init: match t.init {
            InitName::RandomUniform => InitKind::RandomUniform,
            InitName::DataDriven => InitKind::DataDriven,
        },
    }
}

/// Target distribution described by the data section.
pub fn load_target(d: &DataConfig) -> Result<Vec<f64>> {
    let model = match *d {
        DataConfig::Tfim { n, j, h } => Model::Tfim { n, j, h },
        DataConfig::HeisenbergAlt { n, j_even, j_odd } => Model::HeisenbergAlt { n, j_even, j_odd },
        DataConfig::Haldane1d { n, j, h1, h2 } => Model::Haldane1d { n, j, h1, h2 },
        DataConfig::Haldane2d { nx, ny, j, h1, h2 } => Model::Haldane2d { nx, ny, j, h1, h2 },
        DataConfig::Csv { ref path, ref columns } => {
            let ds =
                load_binary_csv(path, columns.as_deref()).with_context(|| format!("loading {}", path.display()))?;
            if ds.n() > MAX_TRAIN_QUBITS {
                return Err(ConfigError(format!("data: csv has {} columns, cap is {MAX_TRAIN_QUBITS}", ds.n())).into());
            }
            return Ok(ds.distribution());
        }
    };
    let h = build_hamiltonian(model)?;
    Ok(ground_state(&h)?.state.born_distribution())
}

fn truncation_grid(t: &TruncationConfig, n: usize, seed: u64) -> Result<Vec<(usize, TruncationSpec)>> {
    Ok(match t {
        TruncationConfig::KOrder { orders } => orders.iter().map(|&k| (k, TruncationSpec::KOrder(k))).collect(),
        TruncationConfig::Full => vec![(n, TruncationSpec::Full)],
        TruncationConfig::Rfc { sizes, max_order, prob } => {
            let policy = match (max_order, prob) {
                (Some(k), _) => RfcPolicy::UniformUpTo(*k),
                (_, Some(p)) => RfcPolicy::Bernoulli(*p),
                _ => unreachable!("validated"),
            };
            sizes
                .iter()
                .map(|&d| Ok((d, rfc_sample(n, policy, d, seed)?)))
                .collect::<Result<_>>()?
        }
    })
}

fn seeds(cfg: &ExperimentConfig, t: &TrainSection) -> Vec<u64> {
    t.seeds.clone().unwrap_or_else(|| vec![cfg.seed])
}

/// Runs a validated experiment and writes its artifacts.
pub fn run(cfg: &ExperimentConfig, out: &mut OutputDir, svg: bool) -> Result<()> {
    match cfg.experiment {
        ExperimentKind::TrainDeploy => train_deploy(cfg, out, svg),
        ExperimentKind::Discrepancy => discrepancy(cfg, out),
        ExperimentKind::VarianceGrid => variance_grid(cfg, out, svg),
        ExperimentKind::RmpsGrid => rmps_grid(cfg, out, svg),
        ExperimentKind::DlaCheck => dla_check(cfg, out),
        ExperimentKind::Spectrum => spectrum(cfg, out, svg),
        ExperimentKind::PpsBench => pps_bench(cfg, out, svg),
    }
}

struct RunOutcome {
    label: usize,
    seed: u64,
    history: Vec<f64>,
    kl_init: f64,
    kl_final: f64,
}

fn train_deploy(cfg: &ExperimentConfig, out: &mut OutputDir, svg: bool) -> Result<()> {
    let target = load_target(cfg.data.as_ref().expect("validated"))?;
    let n = register_size(target.len())?;
    let circuit = ansatz(n, cfg.ansatz.as_ref().expect("validated"), cfg.seed)?;
    let loss = loss_spec(cfg.loss.as_ref().expect("validated"));
    let t = cfg.train.as_ref().expect("validated");
    let grid = truncation_grid(cfg.truncation.as_ref().expect("validated"), n, cfg.seed)?;
    let kind = surrogate(cfg.surrogate.as_ref());
    let jobs: Vec<(usize, TruncationSpec, u64)> = grid
        .iter()
        .flat_map(|(label, spec)| seeds(cfg, t).into_iter().map(move |s| (*label, spec.clone(), s)))
        .collect();
    let outcomes: Vec<RunOutcome> = jobs
        .par_iter()
        .map(|(label, spec, seed)| {
            let tc = train_config(t, spec.clone(), kind, *seed);
            let r = train(&circuit, &target, &loss, &tc)?;
            Ok(RunOutcome {
                label: *label,
                seed: *seed,
                kl_init: deploy_evaluate(&circuit, &r.theta_init, &target)?,
                kl_final: deploy_evaluate(&circuit, &r.theta_star, &target)?,
                history: r.loss_history,
            })
        })
        .collect::<Result<_>>()?;

    let mut kl = Table::new("deployed_kl", &["k_or_D", "seed", "kl"]);
    let mut kl0 = Table::new("deployed_kl_init", &["k_or_D", "seed", "kl"]);
    let mut summary = Table::new("final_loss", &["k_or_D", "seed", "initial_loss", "final_loss"]);
    let mut series: Vec<Series> = Vec::new();
    for o in &outcomes {
        let mut h = Table::new(
            format!("loss_history_k{}_seed{}", o.label, o.seed),
            &["iteration", "loss"],
        );
        for (i, v) in o.history.iter().enumerate() {
            h.push(vec![i.to_string(), num(*v)]);
        }
        out.write_table(&h)?;
        kl.push(vec![o.label.to_string(), o.seed.to_string(), num(o.kl_final)]);
        kl0.push(vec![o.label.to_string(), o.seed.to_string(), num(o.kl_init)]);
        summary.push(vec![
            o.label.to_string(),
            o.seed.to_string(),
            num(o.history[0]),
            num(*o.history.last().expect("history holds the initial loss")),
        ]);
        series.push(Series {
            label: format!("k/D={} seed={}", o.label, o.seed),
            points: o.history.iter().enumerate().map(|(i, v)| (i as f64, *v)).collect(),
        });
    }
    out.write_table(&kl)?;
    out.write_table(&kl0)?;
    out.write_table(&summary)?;
    if svg {
        out.write_svg("loss_history.svg", "training loss", &series, true)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct DiscrepancyRow {
    seed: u64,
    risk_classical: f64,
    risk_quantum: f64,
    risk_gap: f64,
    norm_to_quantum_optimum: f64,
    norm_quantum_shift: f64,
    constant: f64,
    bound: f64,
    bound_satisfied: bool,
    c_max: f64,
    alignment_deviation: f64,
}

fn discrepancy(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<()> {
    let target = load_target(cfg.data.as_ref().expect("validated"))?;
    let n = register_size(target.len())?;
    let circuit = ansatz(n, cfg.ansatz.as_ref().expect("validated"), cfg.seed)?;
    let loss = loss_spec(cfg.loss.as_ref().expect("validated"));
    let t = cfg.train.as_ref().expect("validated");
    let k = cfg.discrepancy.as_ref().expect("validated").classical_order;
    let kind = surrogate(cfg.surrogate.as_ref());
    let rows: Vec<DiscrepancyRow> = seeds(cfg, t)
        .par_iter()
        .map(|&seed| {
            let classical = train(
                &circuit,
                &target,
                &loss,
                &train_config(t, TruncationSpec::KOrder(k), kind, seed),
            )?;
            let quantum = train(
                &circuit,
                &target,
                &loss,
                &train_config(t, TruncationSpec::Full, SurrogateKind::Statevector, seed),
            )?;
            let r = discrepancy_report(
                &circuit,
                &target,
                &classical.final_correlators,
                &classical.theta_star,
                &quantum.theta_star,
            )?;
            Ok(DiscrepancyRow {
                seed,
                risk_classical: r.risk_classical,
                risk_quantum: r.risk_quantum,
                risk_gap: r.risk_gap,
                norm_to_quantum_optimum: r.norm_to_quantum_optimum,
                norm_quantum_shift: r.norm_quantum_shift,
                constant: r.constant,
                bound: r.bound,
                bound_satisfied: r.holds,
                c_max: r.c_max,
                alignment_deviation: r.alignment_deviation,
            })
        })
        .collect::<Result<_>>()?;
    let mut table = Table::new(
        "discrepancy",
        &[
            "seed",
            "risk_classical",
            "risk_quantum",
            "risk_gap",
            "norm_to_quantum_optimum",
            "norm_quantum_shift",
            "constant",
            "bound",
            "bound_satisfied",
            "c_max",
            "alignment_deviation",
        ],
    );
    for r in &rows {
        table.push(vec![
            r.seed.to_string(),
            num(r.risk_classical),
            num(r.risk_quantum),
            num(r.risk_gap),
            num(r.norm_to_quantum_optimum),
            num(r.norm_quantum_shift),
            num(r.constant),
            num(r.bound),
            r.bound_satisfied.to_string(),
            num(r.c_max),
            num(r.alignment_deviation),
        ]);
    }
    out.write_table(&table)?;
    out.write_json("discrepancy.json", &rows)
}

fn variance_header() -> Table {
    Table::new(
        "variance",
        &["n", "order", "chi_or_blank", "closed_form", "mc_mean", "mc_stderr"],
    )
}

fn row_seed(seed: u64, n: usize, k: usize) -> u64 {
    seed.wrapping_add(1000 * n as u64 + k as u64)
}

fn leftmost(n: usize, k: usize) -> u64 {
    ((1u64 << k) - 1) << (n - k)
}

fn variance_grid(cfg: &ExperimentConfig, out: &mut OutputDir, svg: bool) -> Result<()> {
    let v = cfg.variance.as_ref().expect("validated");
    let mut jobs = Vec::new();
    for &n in &v.ns {
        let default: Vec<usize> = match v.family {
            VarianceFamily::MatchgateCorrelator => (1..n).collect(),
            VarianceFamily::Scrambling => (1..=n).collect(),
            _ => (0..=n).collect(),
        };
        for k in v.orders.clone().unwrap_or(default) {
            jobs.push((n, k));
        }
    }
    // Each row parallelizes its own draws, so rows run in sequence.
    let mut table = variance_header();
    let mut closed_pts = Vec::new();
    let mut mc_pts = Vec::new();
    for (i, &(n, k)) in jobs.iter().enumerate() {
        let seed = row_seed(cfg.seed, n, k);
        let gates = v.gates.unwrap_or_else(|| matchcircuit_mixing_depth(n));
        let (closed, mean, stderr) = match v.family {
            VarianceFamily::MatchgateCorrelator => {
                let r = matchgate_correlator_report(n, leftmost(n, k), gates, v.draws, seed)?;
                (r.closed_form, r.monte_carlo.variance, r.monte_carlo.stderr)
            }
            VarianceFamily::MatchgateTruncated => {
                let r = matchgate_truncated_report(n, k, gates, v.draws, seed)?;
                (r.closed_form, r.monte_carlo.variance, r.monte_carlo.stderr)
            }
            VarianceFamily::Haar => {
                let mc = haar_truncation_mc(n, k, v.draws, seed)?;
                (haar_truncation_error(n, k)?.0, mc.mean, mc.stderr)
            }
            VarianceFamily::Scrambling => {
                let c = scrambling_bound_check(n, leftmost(n, k), v.layers, v.draws, seed, 0.0)?;
                (c.bound, c.empirical.variance, c.empirical.stderr)
            }
        };
        table.push(vec![
            n.to_string(),
            k.to_string(),
            String::new(),
            num(closed),
            num(mean),
            num(stderr),
        ]);
        closed_pts.push((i as f64, closed));
        mc_pts.push((i as f64, mean));
    }
    out.write_table(&table)?;
    if svg {
        let series = [
            Series {
                label: "closed form".into(),
                points: closed_pts,
            },
            Series {
                label: "monte carlo".into(),
                points: mc_pts,
            },
        ];
        out.write_svg("variance.svg", "variance by grid row", &series, true)?;
    }
    Ok(())
}

fn rmps_grid(cfg: &ExperimentConfig, out: &mut OutputDir, svg: bool) -> Result<()> {
    let r = cfg.rmps.as_ref().expect("validated");
    let mut jobs = Vec::new();
    for &n in &r.ns {
        for &chi in &r.chis {
            let default: Vec<usize> = match r.quantity {
                RmpsQuantity::Correlator | RmpsQuantity::Marginal => (1..=n).collect(),
                _ => (0..=n).collect(),
            };
            for k in r.orders.clone().unwrap_or(default) {
                jobs.push((n, chi, k));
            }
        }
    }
    let mut table = variance_header();
    let mut series: Vec<Series> = Vec::new();
    for &(n, chi, k) in &jobs {
        let p = RmpsParams::qubits(n, chi)?;
        let padded = |op: SiteOp| {
            let mut ops = vec![op; k];
            ops.resize(n, SiteOp::Identity);
            ops
        };
        let (closed, ops) = match r.quantity {
            RmpsQuantity::Correlator => (
                rmps_correlator_variance(&p, leftmost(n, k))?,
                Some(correlator_ops(n, leftmost(n, k))),
            ),
            RmpsQuantity::Marginal => (rmps_marginal_variance(&p, k)?, Some(padded(SiteOp::Projector))),
            RmpsQuantity::Renyi => (rmps_renyi2_max(&p, k)?, Some(padded(SiteOp::Flip))),
            RmpsQuantity::Truncated => (rmps_truncated_prob_variance(&p, k)?, None),
        };
        let (mean, stderr) = if r.draws == 0 {
            (String::new(), String::new())
        } else {
            let seed = row_seed(cfg.seed, n, k).wrapping_add(chi << 32);
            let mc = match ops {
                Some(ops) => rmps_mc_estimate(&p, &ops, r.draws, seed)?,
                None => rmps_mc_truncated_prob(&p, k, r.draws, seed)?,
            };
            (num(mc.mean), num(mc.stderr))
        };
        table.push(vec![
            n.to_string(),
            k.to_string(),
            chi.to_string(),
            num(closed),
            mean,
            stderr,
        ]);
        let label = format!("n={n} chi={chi}");
        match series.last_mut() {
            Some(s) if s.label == label => s.points.push((k as f64, closed)),
            _ => series.push(Series {
                label,
                points: vec![(k as f64, closed)],
            }),
        }
    }
    out.write_table(&table)?;
    if svg {
        out.write_svg("rmps.svg", "tensor-network variance calculus", &series, true)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct DlaRow {
    algebra: String,
    n: usize,
    closure_dim: usize,
    named_dim: usize,
    intersection_dim: usize,
    equal: bool,
}

fn dla_check(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<()> {
    let d = cfg.dla.as_ref().expect("validated");
    let kind = dla_kind(d.algebra);
    let rows: Vec<DlaRow> =
        d.ns.par_iter()
            .map(|&n| {
                let gens = bornlab_core::algebra::generators_for(kind, n);
                let closure = lie_closure(&gens, bornlab_core::algebra::default_max_dim(n))?;
                let named = named_dla(kind, n)?;
                let inter = algebra_intersection(&closure, &named)?;
                Ok(DlaRow {
                    algebra: format!("{kind:?}").to_lowercase(),
                    n,
                    closure_dim: closure.dim(),
                    named_dim: named.dim(),
                    intersection_dim: inter.dim(),
                    equal: inter.dim() == closure.dim() && inter.dim() == named.dim(),
                })
            })
            .collect::<Result<_>>()?;
    let mut table = Table::new(
        "dla",
        &["algebra", "n", "closure_dim", "named_dim", "intersection_dim", "equal"],
    );
    for r in &rows {
        table.push(vec![
            r.algebra.clone(),
            r.n.to_string(),
            r.closure_dim.to_string(),
            r.named_dim.to_string(),
            r.intersection_dim.to_string(),
            r.equal.to_string(),
        ]);
    }
    out.write_table(&table)
}

fn spectrum(cfg: &ExperimentConfig, out: &mut OutputDir, svg: bool) -> Result<()> {
    let target = load_target(cfg.data.as_ref().expect("validated"))?;
    let spec = correlation_spectrum(&target)?;
    let mut table = Table::new("correlations", &["order", "subset_mask", "value"]);
    let mut series = Vec::new();
    for (k, entries) in spec.iter().enumerate() {
        for (s, v) in entries {
            table.push(vec![k.to_string(), s.to_string(), num(*v)]);
        }
        let mut sorted: Vec<f64> = entries.iter().map(|e| e.1).collect();
        sorted.sort_by(|a, b| b.total_cmp(a));
        series.push(Series {
            label: format!("order {k}"),
            points: sorted.into_iter().enumerate().map(|(i, v)| (i as f64, v)).collect(),
        });
    }
    out.write_table(&table)?;
    if svg {
        out.write_svg("correlations.svg", "|correlator| by order (sorted)", &series, true)?;
    }
    Ok(())
}

fn pps_bench(cfg: &ExperimentConfig, out: &mut OutputDir, svg: bool) -> Result<()> {
    let p = cfg.pps.as_ref().expect("validated");
    let n = p.n;
    let a = cfg.ansatz.as_ref().expect("validated");
    let circuit = ansatz(n, a, cfg.seed)?;
    let iqp = match a {
        AnsatzConfig::Iqp { .. } => Some(IqpSpec::from_circuit(&circuit)?),
        _ => None,
    };
    let orders: Vec<usize> = p.orders.clone().unwrap_or_else(|| (1..=n).collect());
    let subsets: Vec<u64> = (1..1u64 << n)
        .filter(|s| orders.contains(&(s.count_ones() as usize)))
        .collect();
    let thetas: Vec<Vec<f64>> = (0..p.instances)
        .map(|i| {
            let mut rng = seeded(cfg.seed, 0x9b5 + i as u64);
            (0..circuit.param_count())
                .map(|_| rng.random::<f64>() * std::f64::consts::TAU)
                .collect()
        })
        .collect();
    let exact: Vec<Vec<f64>> = thetas
        .iter()
        .map(|t| {
            Ok(walsh_coefficients(
                &bornlab_core::simulate(&circuit, t)?.born_distribution(),
            )?)
        })
        .collect::<Result<_>>()?;
    let jobs: Vec<(usize, usize)> = p
        .budgets
        .iter()
        .flat_map(|&b| (0..p.instances).map(move |i| (b, i)))
        .collect();
    // Squared error summed per order for each (budget, instance).
    let errs: Vec<Vec<f64>> = jobs
        .par_iter()
        .map(|&(b, i)| {
            let mut per_order = vec![0.0; n + 1];
            for &s in &subsets {
                let v = match &iqp {
                    Some(spec) => iqp_surrogate_correlator(spec, &thetas[i], s, b)?,
                    None => pauli_propagate(&circuit, &PauliString::z_string(n, s), &thetas[i], b)?,
                };
                per_order[s.count_ones() as usize] += (v - exact[i][s as usize]).powi(2);
            }
            Ok(per_order)
        })
        .collect::<Result<_>>()?;
    let mut table = Table::new("mse", &["order", "h_or_chi", "value"]);
    let mut series: Vec<Series> = Vec::new();
    for &k in &orders {
        let count = subsets.iter().filter(|s| s.count_ones() as usize == k).count() as f64;
        let mut pts = Vec::new();
        for &b in &p.budgets {
            let total: f64 = jobs
                .iter()
                .zip(&errs)
                .filter(|((jb, _), _)| *jb == b)
                .map(|(_, e)| e[k])
                .sum();
            let mse = total / (count * p.instances as f64);
            table.push(vec![k.to_string(), b.to_string(), num(mse)]);
            pts.push((b as f64, mse));
        }
        series.push(Series {
            label: format!("order {k}"),
            points: pts,
        });
    }
    out.write_table(&table)?;
    if svg {
        out.write_svg("mse.svg", "surrogate MSE by budget", &series, true)?;
    }
    Ok(())
}
