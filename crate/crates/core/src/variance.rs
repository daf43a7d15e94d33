//! Closed-form variances of correlators and truncated probabilities, with
//! Monte-Carlo estimators to check them against.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::algebra::{generators_for, DlaKind};
use crate::ansatz::sampled_circuit;
use crate::error::{Error, Result};
use crate::fourier::{fwht, order, SubsetIndex};
use crate::rng::{haar_single_qubit, haar_state, seeded};
use crate::statevector::{simulate, StateVector};
use crate::stats::McEstimate;

/// Depth used by the training experiments' matchcircuits.
pub const MATCHCIRCUIT_GATES: usize = 40;

/// Random-matchcircuit depth at which second moments sit at their
/// group-averaged values. At `n = 4`, 40 gates still leave the boundary
/// correlator variance near twice its limit; `100 n` gates reach it within
/// sampling error.
pub fn matchcircuit_mixing_depth(n: usize) -> usize {
    100 * n
}

/// Unbiased sample variance of a scalar quantity with a jackknife error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McVariance {
    pub mean: f64,
    pub variance: f64,
    pub stderr: f64,
    pub draws: usize,
}

/// Closed form next to its Monte-Carlo estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceReport {
    pub closed_form: f64,
    pub monte_carlo: McVariance,
    /// `|closed_form - mc| / stderr`.
    pub relative_gap: f64,
}

impl VarianceReport {
    pub fn new(closed_form: f64, monte_carlo: McVariance) -> Self {
        let relative_gap = (closed_form - monte_carlo.variance).abs() / monte_carlo.stderr;
        VarianceReport {
            closed_form,
            monte_carlo,
            relative_gap,
        }
    }

    pub fn within(&self, sigmas: f64) -> bool {
        self.relative_gap <= sigmas || (self.closed_form == self.monte_carlo.variance)
    }
}

fn binom(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `C(n,k) / C(2n,2k)` for `1 ≤ k ≤ n-1`. At `k = n` parity conservation
/// pins the correlator to 1, so the boundary orders are rejected.
pub fn matchgate_correlator_variance(n: usize, k: usize) -> Result<f64> {
    if k == 0 || k >= n {
        return Err(Error::Domain(format!(
            "matchgate correlator order {k} outside 1..={}",
            n.saturating_sub(1)
        )));
    }
    Ok(binom(n, k) / binom(2 * n, 2 * k))
}

/// Variance of `Pr^{(k)}(0)` over matchcircuits. Each order `p` contributes
/// `C(n,p)² / C(2n,2p)`, counted twice when the complementary order `n-p`
/// is also kept (the two correlators coincide under parity conservation).
pub fn matchgate_truncated_variance(n: usize, k: usize) -> Result<f64> {
    if k > n {
        return Err(Error::Domain(format!("order {k} exceeds n = {n}")));
    }
    let mut total = 0.0;
    for p in 1..n {
        if p > k {
            continue;
        }
        let v = binom(n, p).powi(2) / binom(2 * n, 2 * p);
        total += if n - p <= k { 2.0 * v } else { v };
    }
    Ok(total / 4f64.powi(n as i32))
}

/// `N_k = Σ_{p≤k} C(n,p)`.
pub fn kept_correlators(n: usize, k: usize) -> f64 {
    (0..=k.min(n)).map(|p| binom(n, p)).sum()
}

/// `(E[D_k²], deterministic bound)` with `E[D_k²] = (2^n - N_k)/2^{3n}` and
/// bound `(1 - N_k/2^n)²`, where `D_k = Pr(x) - Pr^{(k)}(x)`.
pub fn haar_truncation_error(n: usize, k: usize) -> Result<(f64, f64)> {
    if k > n {
        return Err(Error::Domain(format!("order {k} exceeds n = {n}")));
    }
    let d = 2f64.powi(n as i32);
    let nk = kept_correlators(n, k);
    Ok(((d - nk) / d.powi(3), (1.0 - nk / d).powi(2)))
}

/// Exact Haar value of `E[D_k²]`: each discarded correlator has second
/// moment `1/(2^n + 1)` rather than `2^{-n}`.
pub fn haar_truncation_error_exact(n: usize, k: usize) -> Result<f64> {
    if k > n {
        return Err(Error::Domain(format!("order {k} exceeds n = {n}")));
    }
    let d = 2f64.powi(n as i32);
    Ok((d - kept_correlators(n, k)) / (d * d * (d + 1.0)))
}

/// Sample variance of `samples` with the leave-one-out jackknife error.
pub fn jackknife_variance(samples: &[f64]) -> Result<McVariance> {
    let m = samples.len();
    if m < 3 {
        return Err(Error::Domain(format!("jackknife needs at least 3 draws, got {m}")));
    }
    let mean = samples.iter().sum::<f64>() / m as f64;
    let centered: Vec<f64> = samples.iter().map(|s| s - mean).collect();
    let s1: f64 = centered.iter().sum();
    let s2: f64 = centered.iter().map(|c| c * c).sum();
    let variance = (s2 - s1 * s1 / m as f64) / (m - 1) as f64;
    let mf = (m - 1) as f64;
    let loo: Vec<f64> = centered
        .iter()
        .map(|c| {
            let a = s1 - c;
            let b = s2 - c * c;
            (b - a * a / mf) / (mf - 1.0)
        })
        .collect();
    let loo_mean = loo.iter().sum::<f64>() / m as f64;
    let jk = loo.iter().map(|v| (v - loo_mean).powi(2)).sum::<f64>() * mf / m as f64;
    Ok(McVariance {
        mean,
        variance,
        stderr: jk.sqrt(),
        draws: m,
    })
}

/// Evaluates `quantity` on `draws` independent generators (draw `t` uses
/// stream `t` of `seed`) and returns the jackknifed sample variance.
pub fn mc_variance<F>(draws: usize, seed: u64, quantity: F) -> Result<McVariance>
where
    F: Fn(&mut ChaCha8Rng) -> Result<f64> + Sync,
{
    if draws < 2 {
        return Err(Error::Domain("mc_variance needs at least 2 draws".into()));
    }
    let samples: Vec<f64> = (0..draws)
        .into_par_iter()
        .map(|t| quantity(&mut seeded(seed, t as u64)))
        .collect::<Result<_>>()?;
    jackknife_variance(&samples)
}

/// Independent means of `quantity` (not variances), same seeding scheme.
pub fn mc_mean<F>(draws: usize, seed: u64, quantity: F) -> Result<McEstimate>
where
    F: Fn(&mut ChaCha8Rng) -> Result<f64> + Sync,
{
    let samples: Vec<f64> = (0..draws)
        .into_par_iter()
        .map(|t| quantity(&mut seeded(seed, t as u64)))
        .collect::<Result<_>>()?;
    Ok(McEstimate::from_samples(&samples))
}

/// Random matchcircuit of `gates` rotations with angles uniform on `[0, 2π)`,
/// applied to `|0…0⟩`.
pub fn random_matchcircuit_state(n: usize, gates: usize, rng: &mut ChaCha8Rng) -> Result<StateVector> {
    let structure_seed: u64 = rng.random();
    let c = sampled_circuit(n, &generators_for(DlaKind::Matchgate, n), gates, structure_seed);
    let theta: Vec<f64> = (0..c.param_count())
        .map(|_| rng.random::<f64>() * std::f64::consts::TAU)
        .collect();
    simulate(&c, &theta)
}

/// All correlators `⟨Z_𝒊⟩` of a state, indexed by subset mask.
pub fn all_correlators(state: &StateVector) -> Vec<f64> {
    let mut c = state.born_distribution();
    fwht(&mut c);
    c
}

/// `Pr^{(k)}(x)` from a full correlator table.
pub fn truncated_prob_from_correlators(n: usize, correlators: &[f64], x: u64, k: usize) -> f64 {
    let total: f64 = correlators
        .iter()
        .enumerate()
        .filter(|(s, _)| order(*s as u64) <= k)
        .map(|(s, c)| {
            if (x & s as u64).count_ones().is_multiple_of(2) {
                *c
            } else {
                -*c
            }
        })
        .sum();
    total / 2f64.powi(n as i32)
}

/// Monte-Carlo check of [`matchgate_correlator_variance`] on `subset`.
pub fn matchgate_correlator_report(
    n: usize,
    subset: SubsetIndex,
    gates: usize,
    draws: usize,
    seed: u64,
) -> Result<VarianceReport> {
    let cf = matchgate_correlator_variance(n, order(subset))?;
    let mc = mc_variance(draws, seed, |rng| {
        Ok(random_matchcircuit_state(n, gates, rng)?.z_correlator(subset))
    })?;
    Ok(VarianceReport::new(cf, mc))
}

/// Monte-Carlo check of [`matchgate_truncated_variance`] at `x = 0`.
pub fn matchgate_truncated_report(n: usize, k: usize, gates: usize, draws: usize, seed: u64) -> Result<VarianceReport> {
    let cf = matchgate_truncated_variance(n, k)?;
    let mc = mc_variance(draws, seed, |rng| {
        let state = random_matchcircuit_state(n, gates, rng)?;
        Ok(truncated_prob_from_correlators(n, &all_correlators(&state), 0, k))
    })?;
    Ok(VarianceReport::new(cf, mc))
}

/// Monte-Carlo `E[D_k(0)²]` over Haar-random states.
pub fn haar_truncation_mc(n: usize, k: usize, draws: usize, seed: u64) -> Result<McEstimate> {
    mc_mean(draws, seed, |rng| {
        let state = StateVector::from_amplitudes(haar_state(n, rng))?;
        let c = all_correlators(&state);
        let d = truncated_prob_from_correlators(n, &c, 0, n) - truncated_prob_from_correlators(n, &c, 0, k);
        Ok(d * d)
    })
}

/// Locally scrambled state: `layers` rounds of Haar single-qubit gates
/// followed by a CNOT chain, then a final Haar layer.
pub fn scrambled_state(n: usize, layers: usize, rng: &mut ChaCha8Rng) -> Result<StateVector> {
    let mut s = StateVector::zero(n)?;
    for _ in 0..layers {
        for q in 0..n {
            s.apply_single_qubit(q, &haar_single_qubit(rng));
        }
        for q in 0..n.saturating_sub(1) {
            s.apply_cnot(q, q + 1);
        }
    }
    for q in 0..n {
        s.apply_single_qubit(q, &haar_single_qubit(rng));
    }
    Ok(s)
}

/// Result of [`scrambling_bound_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScramblingCheck {
    pub empirical: McVariance,
    pub bound: f64,
    pub satisfied: bool,
}

/// Empirical `Var⟨Z_𝒊⟩` over scrambled states against `(2/3)^{|𝒊|}`,
/// passing when `empirical ≤ bound · (1 + eps)`.
pub fn scrambling_bound_check(
    n: usize,
    subset: SubsetIndex,
    layers: usize,
    draws: usize,
    seed: u64,
    eps: f64,
) -> Result<ScramblingCheck> {
    if draws < 100 {
        return Err(Error::Domain(format!(
            "scrambling check needs at least 100 draws, got {draws}"
        )));
    }
    let bound = (2.0f64 / 3.0).powi(order(subset) as i32);
    let empirical = mc_variance(draws, seed, |rng| {
        Ok(scrambled_state(n, layers, rng)?.z_correlator(subset))
    })?;
    Ok(ScramblingCheck {
        empirical,
        bound,
        satisfied: empirical.variance <= bound * (1.0 + eps),
    })
}
