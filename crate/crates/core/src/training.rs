//! Gradient training of Born machines on truncated correlator expansions.
//!
//! The model distribution is `reconstruct(c(θ), truncation)` where `c(θ)`
//! comes from a statevector or a classical surrogate. Since the
//! reconstruction is linear in `c`, the loss gradient factors as
//! `∂L/∂θ_j = Σ_𝒊 w_𝒊 ∂c_𝒊/∂θ_j` with `w = 2^{-n} WHT(∂L/∂p)`, and each
//! `∂c_𝒊/∂θ_j` follows from the two-point parameter-shift rule.

use std::f64::consts::{FRAC_PI_2, TAU};

use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{check_dim, positive, Error, Result};
use crate::fourier::{
    check_distribution, fwht, order, walsh_coefficients, CorrelatorVector, SubsetIndex, TruncationSpec,
};
use crate::losses::{LossSpec, PreparedLoss, KL_EPSILON};
use crate::pauli::PauliString;
use crate::rng::seeded;
use crate::statevector::{simulate, Circuit};
use crate::surrogates::iqp::{iqp_surrogate_correlator, IqpSpec};
use crate::surrogates::propagation::pauli_propagate;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Optimizer {
    Adam { beta1: f64, beta2: f64, eps: f64 },
    Sgd,
}

impl Optimizer {
    pub fn adam() -> Self {
        Optimizer::Adam {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GradientMethod {
    /// Exact two-point shift by `±π/2`; needs every parameter on one gate.
    ParameterShift,
    /// Central differences of the loss.
    FiniteDifference { step: f64 },
}

/// Where model correlators come from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SurrogateKind {
    Statevector,
    IqpPps { h_max: usize },
    PauliProp { w_max: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitKind {
    /// `θ_j` i.i.d. uniform on `[0, 2π)`.
    RandomUniform,
    /// See [`init_from_data`].
    DataDriven,
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub iterations: usize,
    pub learning_rate: f64,
    pub optimizer: Optimizer,
    pub gradient: GradientMethod,
    pub truncation: TruncationSpec,
    pub surrogate: SurrogateKind,
    /// Bitstrings per gradient step; `None` uses all of them.
    pub batch: Option<usize>,
    pub seed: u64,
    pub init: InitKind,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            iterations: 100,
            learning_rate: 0.05,
            optimizer: Optimizer::adam(),
            gradient: GradientMethod::ParameterShift,
            truncation: TruncationSpec::Full,
            surrogate: SurrogateKind::Statevector,
            batch: None,
            seed: 0,
            init: InitKind::RandomUniform,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainResult {
    pub theta_init: Vec<f64>,
    pub theta_star: Vec<f64>,
    /// Loss before every update plus the final value (`iterations + 1` entries).
    pub loss_history: Vec<f64>,
    /// Model correlators at `theta_star` on the truncation support.
    pub final_correlators: CorrelatorVector,
    pub config: TrainConfig,
}

/// A circuit paired with a correlator source restricted to a truncation.
pub struct CorrelatorModel<'a> {
    circuit: &'a Circuit,
    surrogate: SurrogateKind,
    iqp: Option<IqpSpec>,
    subsets: Vec<SubsetIndex>,
}

impl<'a> CorrelatorModel<'a> {
    pub fn new(circuit: &'a Circuit, surrogate: SurrogateKind, truncation: &TruncationSpec) -> Result<Self> {
        let n = circuit.n();
        let iqp = match surrogate {
            SurrogateKind::IqpPps { .. } => Some(IqpSpec::from_circuit(circuit)?),
            _ => None,
        };
        let subsets = truncation.subsets(n);
        if let Some(&bad) = subsets.iter().find(|&&s| s >> n != 0) {
            return Err(Error::Domain(format!("truncation subset {bad:#b} outside register")));
        }
        Ok(CorrelatorModel {
            circuit,
            surrogate,
            iqp,
            subsets,
        })
    }

    pub fn n(&self) -> usize {
        self.circuit.n()
    }

    pub fn subsets(&self) -> &[SubsetIndex] {
        &self.subsets
    }

    /// Correlators aligned with [`Self::subsets`].
    pub fn correlators(&self, theta: &[f64]) -> Result<Vec<f64>> {
        let n = self.n();
        match self.surrogate {
            SurrogateKind::Statevector => {
                let c = walsh_coefficients(&simulate(self.circuit, theta)?.born_distribution())?;
                Ok(self.subsets.iter().map(|&s| c[s as usize]).collect())
            }
            SurrogateKind::IqpPps { h_max } => {
                let spec = self.iqp.as_ref().expect("checked at construction");
                self.subsets
                    .iter()
                    .map(|&s| {
                        if s == 0 {
                            Ok(1.0)
                        } else {
                            iqp_surrogate_correlator(spec, theta, s, h_max)
                        }
                    })
                    .collect()
            }
            SurrogateKind::PauliProp { w_max } => self
                .subsets
                .iter()
                .map(|&s| {
                    if s == 0 {
                        Ok(1.0)
                    } else {
                        pauli_propagate(self.circuit, &PauliString::z_string(n, s), theta, w_max)
                    }
                })
                .collect(),
        }
    }

    /// Dense pseudo-distribution from correlators aligned with the subsets.
    pub fn distribution(&self, correlators: &[f64]) -> Vec<f64> {
        let n = self.n();
        let mut v = vec![0.0; 1 << n];
        for (&s, &c) in self.subsets.iter().zip(correlators) {
            v[s as usize] = c;
        }
        fwht(&mut v);
        let scale = 1.0 / (1u64 << n) as f64;
        v.iter_mut().for_each(|x| *x *= scale);
        v
    }

    pub fn correlator_vector(&self, correlators: &[f64]) -> CorrelatorVector {
        let mut c = CorrelatorVector::new(self.n());
        for (&s, &v) in self.subsets.iter().zip(correlators) {
            c.insert(s, v);
        }
        c
    }
}

/// `θ_j = Pr_data[every bit of supp(G_j) is 1]` for each parameter's generator support.
pub fn init_from_data(ansatz: &Circuit, data: &[f64]) -> Result<Vec<f64>> {
    let n = check_distribution(data)?;
    check_dim(ansatz.n(), n)?;
    Ok(ansatz
        .param_supports()
        .into_iter()
        .map(|sup| {
            data.iter()
                .enumerate()
                .filter(|(x, _)| (*x as u64) & sup == sup)
                .map(|(_, p)| p)
                .sum()
        })
        .collect())
}

/// `KL(target ‖ Born(θ))` of the untruncated circuit, model side floored at `1e-12`.
pub fn deploy_evaluate(circuit: &Circuit, theta: &[f64], target: &[f64]) -> Result<f64> {
    let p = simulate(circuit, theta)?.born_distribution();
    check_dim(p.len(), target.len())?;
    PreparedLoss::new(&LossSpec::Kl { epsilon: KL_EPSILON }, circuit.n())?.value(&p, target)
}

/// `(1/C(n,k)) Σ_{|𝒊|=k} (exact(𝒊) - approx(𝒊))²`.
pub fn mse_k(exact: &CorrelatorVector, approx: &CorrelatorVector, k: usize) -> Result<f64> {
    let n = exact.n();
    check_dim(n, approx.n())?;
    if k > n {
        return Err(Error::Domain(format!("order {k} exceeds n = {n}")));
    }
    let mut total = 0.0;
    let mut count = 0usize;
    for s in (0..1u64 << n).filter(|&s| order(s) == k) {
        let a = exact.get(s).ok_or(Error::MissingCorrelator(s))?;
        let b = approx.get(s).ok_or(Error::MissingCorrelator(s))?;
        total += (a - b).powi(2);
        count += 1;
    }
    Ok(total / count as f64)
}

fn initial_theta(circuit: &Circuit, target: &[f64], config: &TrainConfig) -> Result<Vec<f64>> {
    let p = circuit.param_count();
    match &config.init {
        InitKind::RandomUniform => {
            let mut rng = seeded(config.seed, 0x1417);
            Ok((0..p).map(|_| rng.random::<f64>() * TAU).collect())
        }
        InitKind::DataDriven => init_from_data(circuit, target),
        InitKind::Explicit(t) => {
            if t.len() != p {
                return Err(Error::ParamCount {
                    expected: p,
                    found: t.len(),
                });
            }
            Ok(t.clone())
        }
    }
}

fn batch_mask(len: usize, batch: Option<usize>, seed: u64, iteration: usize) -> Option<Vec<bool>> {
    let b = batch?;
    if b >= len {
        return None;
    }
    let mut rng = seeded(seed, 0xba7c_0000_0000 + iteration as u64);
    let mut mask = vec![false; len];
    for i in sample(&mut rng, len, b) {
        mask[i] = true;
    }
    Some(mask)
}

/// Loss value and gradient in `θ` for one step.
struct Objective<'a> {
    model: CorrelatorModel<'a>,
    loss: PreparedLoss,
    target: &'a [f64],
    gradient: GradientMethod,
}

impl Objective<'_> {
    fn loss_at(&self, theta: &[f64]) -> Result<(f64, Vec<f64>)> {
        let c = self.model.correlators(theta)?;
        let p = self.model.distribution(&c);
        Ok((self.loss.value(&p, self.target)?, p))
    }

    fn masked(&self, p: &[f64], mask: Option<&[bool]>) -> Vec<f64> {
        match mask {
            None => p.to_vec(),
            Some(m) => p
                .iter()
                .zip(self.target)
                .zip(m)
                .map(|((a, t), keep)| if *keep { *a } else { *t })
                .collect(),
        }
    }

    fn grad(&self, theta: &[f64], p: &[f64], mask: Option<&[bool]>) -> Result<Vec<f64>> {
        match self.gradient {
            GradientMethod::ParameterShift => {
                let mut g = self.loss.gradient(p, self.target)?;
                if let Some(m) = mask {
                    g.iter_mut().zip(m).for_each(|(v, keep)| {
                        if !keep {
                            *v = 0.0
                        }
                    });
                }
                fwht(&mut g);
                let scale = 1.0 / g.len() as f64;
                let w: Vec<f64> = self.model.subsets.iter().map(|&s| g[s as usize] * scale).collect();
                let lin = |t: &[f64]| -> Result<f64> {
                    Ok(self.model.correlators(t)?.iter().zip(&w).map(|(c, w)| c * w).sum())
                };
                (0..theta.len())
                    .into_par_iter()
                    .map(|j| {
                        let mut t = theta.to_vec();
                        t[j] = theta[j] + FRAC_PI_2;
                        let plus = lin(&t)?;
                        t[j] = theta[j] - FRAC_PI_2;
                        let minus = lin(&t)?;
                        Ok((plus - minus) / 2.0)
                    })
                    .collect()
            }
            GradientMethod::FiniteDifference { step } => {
                let eval = |t: &[f64]| -> Result<f64> {
                    let c = self.model.correlators(t)?;
                    let p = self.masked(&self.model.distribution(&c), mask);
                    self.loss.value(&p, self.target)
                };
                (0..theta.len())
                    .into_par_iter()
                    .map(|j| {
                        let mut t = theta.to_vec();
                        t[j] = theta[j] + step;
                        let plus = eval(&t)?;
                        t[j] = theta[j] - step;
                        let minus = eval(&t)?;
                        Ok((plus - minus) / (2.0 * step))
                    })
                    .collect()
            }
        }
    }
}

/// Gradient of the training loss at `theta` (exposed for gradient checks).
pub fn loss_gradient(
    ansatz: &Circuit,
    target: &[f64],
    loss: &LossSpec,
    config: &TrainConfig,
    theta: &[f64],
) -> Result<(f64, Vec<f64>)> {
    let obj = objective(ansatz, target, loss, config)?;
    let (value, p) = obj.loss_at(theta)?;
    Ok((value, obj.grad(theta, &p, None)?))
}

fn objective<'a>(
    ansatz: &'a Circuit,
    target: &'a [f64],
    loss: &LossSpec,
    config: &TrainConfig,
) -> Result<Objective<'a>> {
    let n = check_distribution(target)?;
    check_dim(ansatz.n(), n)?;
    if !positive(config.learning_rate) {
        return Err(Error::Domain(format!(
            "learning rate must be positive, got {}",
            config.learning_rate
        )));
    }
    if matches!(loss, LossSpec::Kl { .. }) && !config.truncation.is_full(n) {
        return Err(Error::Domain(
            "KL needs a nonnegative model; use it only with full truncation".into(),
        ));
    }
    if config.gradient == GradientMethod::ParameterShift {
        if let Some(j) = ansatz.param_multiplicity().iter().position(|&m| m > 1) {
            return Err(Error::Domain(format!(
                "parameter {j} is shared between gates; use finite differences"
            )));
        }
    }
    Ok(Objective {
        model: CorrelatorModel::new(ansatz, config.surrogate, &config.truncation)?,
        loss: PreparedLoss::new(loss, n)?,
        target,
        gradient: config.gradient,
    })
}

/// Trains `ansatz` towards `target` under `loss` and returns the trajectory.
pub fn train(ansatz: &Circuit, target: &[f64], loss: &LossSpec, config: &TrainConfig) -> Result<TrainResult> {
    let obj = objective(ansatz, target, loss, config)?;
    let theta_init = initial_theta(ansatz, target, config)?;
    let mut theta = theta_init.clone();
    let np = theta.len();
    let (mut m, mut v) = (vec![0.0; np], vec![0.0; np]);
    let mut history = Vec::with_capacity(config.iterations + 1);
    for it in 0..config.iterations {
        let (value, p) = obj.loss_at(&theta)?;
        history.push(value);
        let mask = batch_mask(target.len(), config.batch, config.seed, it);
        let g = obj.grad(&theta, &p, mask.as_deref())?;
        match config.optimizer {
            Optimizer::Sgd => {
                for (t, gj) in theta.iter_mut().zip(&g) {
                    *t -= config.learning_rate * gj;
                }
            }
            Optimizer::Adam { beta1, beta2, eps } => {
                let step = (it + 1) as i32;
                let (c1, c2) = (1.0 - beta1.powi(step), 1.0 - beta2.powi(step));
                for j in 0..np {
                    m[j] = beta1 * m[j] + (1.0 - beta1) * g[j];
                    v[j] = beta2 * v[j] + (1.0 - beta2) * g[j] * g[j];
                    theta[j] -= config.learning_rate * (m[j] / c1) / ((v[j] / c2).sqrt() + eps);
                }
            }
        }
    }
    let c = obj.model.correlators(&theta)?;
    history.push(obj.loss.value(&obj.model.distribution(&c), target)?);
    Ok(TrainResult {
        theta_init,
        theta_star: theta,
        loss_history: history,
        final_correlators: obj.model.correlator_vector(&c),
        config: config.clone(),
    })
}
