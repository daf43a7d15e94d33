//! Experiment configuration files.
//!
//! One TOML file describes one experiment. Unknown keys are rejected so a
//! misspelt option never silently falls back to a default.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    TrainDeploy,
    VarianceGrid,
    RmpsGrid,
    DlaCheck,
    Spectrum,
    PpsBench,
    Discrepancy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub data: Option<DataConfig>,
    pub ansatz: Option<AnsatzConfig>,
    pub loss: Option<LossConfig>,
    pub train: Option<TrainSection>,
    pub truncation: Option<TruncationConfig>,
    pub surrogate: Option<SurrogateConfig>,
    pub variance: Option<VarianceConfig>,
    pub rmps: Option<RmpsConfig>,
    pub dla: Option<DlaConfig>,
    pub pps: Option<PpsConfig>,
    pub discrepancy: Option<DiscrepancyConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum DataConfig {
    Tfim {
        n: usize,
        j: f64,
        h: f64,
    },
    HeisenbergAlt {
        n: usize,
        j_even: f64,
        j_odd: f64,
    },
    #[serde(rename = "haldane_1d")]
    Haldane1d {
        n: usize,
        j: f64,
        h1: f64,
        h2: f64,
    },
    #[serde(rename = "haldane_2d")]
    Haldane2d {
        nx: usize,
        ny: usize,
        j: f64,
        h1: f64,
        h2: f64,
    },
    Csv {
        path: PathBuf,
        columns: Option<Vec<usize>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AnsatzConfig {
    StronglyEntangling {
        layers: usize,
    },
    Iqp {
        #[serde(default)]
        pairs: usize,
        #[serde(default)]
        triples: usize,
    },
    Matchcircuit {
        gates: usize,
    },
    DlaSampled {
        algebra: AlgebraName,
        gates: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgebraName {
    Matchgate,
    Heisenberg,
    Haldane,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LossConfig {
    Mmd { kernel: KernelConfig },
    Emd,
    Sqe,
    Kl { epsilon: Option<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelConfig {
    Gaussian { sigma: f64 },
    Anova { window: usize, gamma: f64 },
    Parity { omega: Vec<u64> },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerName {
    #[default]
    Adam,
    Sgd,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GradientName {
    #[default]
    ParameterShift,
    FiniteDifference,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitName {
    #[default]
    RandomUniform,
    DataDriven,
}

fn default_iterations() -> usize {
    100
}
fn default_lr() -> f64 {
    0.05
}
fn default_beta1() -> f64 {
    0.9
}
fn default_beta2() -> f64 {
    0.999
}
fn default_eps() -> f64 {
    1e-8
}
fn default_fd_step() -> f64 {
    1e-5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainSection {
    #[serde(default = "default_iterations")]
    pub iterations: usize,
    #[serde(default = "default_lr")]
    pub learning_rate: f64,
    #[serde(default)]
    pub optimizer: OptimizerName,
    #[serde(default = "default_beta1")]
    pub beta1: f64,
    #[serde(default = "default_beta2")]
    pub beta2: f64,
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default)]
    pub gradient: GradientName,
    #[serde(default = "default_fd_step")]
    pub fd_step: f64,
    pub batch: Option<usize>,
    #[serde(default)]
    pub init: InitName,
    /// Training seeds; defaults to the top-level seed.
    pub seeds: Option<Vec<u64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TruncationConfig {
    /// One run per order in `orders`.
    KOrder {
        orders: Vec<usize>,
    },
    Full,
    /// One run per family size in `sizes`. Exactly one of `max_order`
    /// (uniform over orders `1..=max_order`) or `prob` (Bernoulli per qubit)
    /// selects the sampling law.
    Rfc {
        sizes: Vec<usize>,
        max_order: Option<usize>,
        prob: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SurrogateConfig {
    Statevector,
    IqpPps { h_max: usize },
    PauliProp { w_max: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarianceFamily {
    /// `Var⟨Z_𝒊⟩` over matchcircuits.
    MatchgateCorrelator,
    /// `Var Pr^{(k)}(0)` over matchcircuits.
    MatchgateTruncated,
    /// `E[(Pr - Pr^{(k)})²]` over Haar states.
    Haar,
    /// `Var⟨Z_𝒊⟩` over locally scrambled states against `(2/3)^{|𝒊|}`.
    Scrambling,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VarianceConfig {
    pub family: VarianceFamily,
    pub ns: Vec<usize>,
    /// Orders to evaluate; defaults to every valid order.
    pub orders: Option<Vec<usize>>,
    pub draws: usize,
    /// Matchcircuit gate count; defaults to the mixing depth `100 n`.
    pub gates: Option<usize>,
    /// Scrambling layers.
    #[serde(default = "default_layers")]
    pub layers: usize,
}

fn default_layers() -> usize {
    2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RmpsQuantity {
    /// Correlator on the leftmost `order` sites.
    Correlator,
    Marginal,
    Renyi,
    Truncated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RmpsConfig {
    pub quantity: RmpsQuantity,
    pub ns: Vec<usize>,
    pub chis: Vec<u64>,
    pub orders: Option<Vec<usize>>,
    /// Monte-Carlo draws (qubit chains only); 0 leaves the MC columns blank.
    #[serde(default)]
    pub draws: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DlaConfig {
    pub algebra: AlgebraName,
    pub ns: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PpsConfig {
    /// Register size of the benchmarked ansatz.
    pub n: usize,
    /// Hamming budgets for IQP ansätze, weight budgets otherwise.
    pub budgets: Vec<usize>,
    pub orders: Option<Vec<usize>>,
    /// Random parameter draws averaged per budget.
    #[serde(default = "default_instances")]
    pub instances: usize,
}

fn default_instances() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscrepancyConfig {
    /// Order of the truncated surrogate training.
    pub classical_order: usize,
}
