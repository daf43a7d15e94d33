//! Risk gap between a classically trained surrogate and the quantum model it deploys to.

use crate::error::{check_dim, Result};
use crate::fourier::{check_distribution, walsh_coefficients, CorrelatorVector};
use crate::statevector::{simulate, Circuit};

/// `R[Pr] = Σ_x t(x) (t(x) - Pr(x))²`.
pub fn risk(target: &[f64], model: &[f64]) -> Result<f64> {
    check_dim(target.len(), model.len())?;
    Ok(target.iter().zip(model).map(|(t, p)| t * (t - p).powi(2)).sum())
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscrepancyReport {
    pub risk_classical: f64,
    pub risk_quantum: f64,
    /// `|R_Cl - R_Q|`.
    pub risk_gap: f64,
    /// `‖c_Cl - c_Q(θ*_Q)‖₂`, with `c_Cl` zero outside its truncation.
    pub norm_to_quantum_optimum: f64,
    /// `‖c_Q(θ*_Q) - c_Q(θ*_Cl)‖₂`.
    pub norm_quantum_shift: f64,
    pub constant: f64,
    /// `C (‖c_Cl - c_Q*‖ + ‖c_Q* - c_Q(θ*_Cl)‖)`.
    pub bound: f64,
    pub holds: bool,
    /// `max |c_Cl| / Σ |c_Cl|`.
    pub c_max: f64,
    /// `1 - cos(|c_Cl|, |c_Q*|)`.
    pub alignment_deviation: f64,
}

/// Compares a surrogate fit `c_cl` (trained parameters `theta_cl`) with the
/// quantum optimum `theta_q` on the same circuit.
///
/// Both risks are deviations of `t` weighted by `t ≤ 1`, so
/// `|R_Cl - R_Q| ≤ ‖a + b‖₂ ‖Pr_Cl - Pr_Q‖₂` with `a, b` the two residuals,
/// and Parseval gives `‖Pr_Cl - Pr_Q‖₂ = 2^{-n/2} ‖c_Cl - c_Q(θ*_Cl)‖₂`.
/// The constant is therefore `C = 2^{-n/2} ‖a + b‖₂`.
pub fn discrepancy_report(
    circuit: &Circuit,
    target: &[f64],
    c_cl: &CorrelatorVector,
    theta_cl: &[f64],
    theta_q: &[f64],
) -> Result<DiscrepancyReport> {
    let n = check_distribution(target)?;
    check_dim(n, circuit.n())?;
    check_dim(n, c_cl.n())?;
    let dense_cl = c_cl.to_dense();
    let pr_cl = {
        let mut v = walsh_coefficients(&dense_cl)?;
        let s = 1.0 / (1u64 << n) as f64;
        v.iter_mut().for_each(|x| *x *= s);
        v
    };
    let pr_q = simulate(circuit, theta_cl)?.born_distribution();
    let cq_star = walsh_coefficients(&simulate(circuit, theta_q)?.born_distribution())?;
    let cq_cl = walsh_coefficients(&pr_q)?;

    let risk_classical = risk(target, &pr_cl)?;
    let risk_quantum = risk(target, &pr_q)?;
    let norm = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let norm_to_quantum_optimum = norm(&dense_cl, &cq_star);
    let norm_quantum_shift = norm(&cq_star, &cq_cl);
    let residual_sum: f64 = pr_cl
        .iter()
        .zip(&pr_q)
        .zip(target)
        .map(|((a, b), t)| (a + b - 2.0 * t).powi(2))
        .sum::<f64>()
        .sqrt();
    let constant = residual_sum * (-(n as f64) / 2.0).exp2();
    let bound = constant * (norm_to_quantum_optimum + norm_quantum_shift);
    let risk_gap = (risk_classical - risk_quantum).abs();

    let abs_cl: Vec<f64> = dense_cl.iter().map(|v| v.abs()).collect();
    let abs_q: Vec<f64> = cq_star.iter().map(|v| v.abs()).collect();
    let total: f64 = abs_cl.iter().sum();
    let c_max = abs_cl.iter().copied().fold(0.0, f64::max) / total;
    let dot: f64 = abs_cl.iter().zip(&abs_q).map(|(a, b)| a * b).sum();
    let l2 = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let alignment_deviation = 1.0 - dot / (l2(&abs_cl) * l2(&abs_q));

    Ok(DiscrepancyReport {
        risk_classical,
        risk_quantum,
        risk_gap,
        norm_to_quantum_optimum,
        norm_quantum_shift,
        constant,
        bound,
        holds: risk_gap <= bound * (1.0 + 1e-12) + 1e-15,
        c_max,
        alignment_deviation,
    })
}
