//! Distances between (pseudo-)distributions and the kernels behind MMD.

use std::collections::BTreeMap;

use crate::error::{check_dim, positive, Error, Result};
use crate::fourier::{fwht, parity_kernel, register_size, SubsetIndex};

/// Largest register for which dense `2^n × 2^n` kernels are built.
pub const MAX_KERNEL_QUBITS: usize = 12;

/// Model-side floor applied before taking logarithms.
pub const KL_EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum KernelSpec {
    /// `exp(-d_H(x, y) / (2σ²))`.
    Gaussian { sigma: f64 },
    /// `Σ_w exp(-γ d_H(x_w, y_w))` over every contiguous window `w` of length `m`.
    AnovaSubstring { window: usize, gamma: f64 },
    /// `2^{-n} Σ_{𝒊∈Ω} (-1)^{𝒊·(x⊕y)}`.
    Parity { omega: Vec<SubsetIndex> },
}

impl KernelSpec {
    pub fn validate(&self, n: usize) -> Result<()> {
        match self {
            KernelSpec::Gaussian { sigma } if !positive(*sigma) => Err(Error::Domain(format!(
                "gaussian bandwidth must be positive, got {sigma}"
            ))),
            KernelSpec::AnovaSubstring { window, gamma } => {
                if *window == 0 || *window > n {
                    Err(Error::Domain(format!("anova window {window} outside 1..={n}")))
                } else if !positive(*gamma) {
                    Err(Error::Domain(format!("anova decay must be positive, got {gamma}")))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    /// `K(x, y)`; every variant depends only on `x ⊕ y`.
    pub fn eval(&self, n: usize, x: u64, y: u64) -> f64 {
        let d = x ^ y;
        match self {
            KernelSpec::Gaussian { sigma } => (-(d.count_ones() as f64) / (2.0 * sigma * sigma)).exp(),
            KernelSpec::AnovaSubstring { window, gamma } => {
                let m = *window;
                let wmask = (1u64 << m) - 1;
                (0..=n - m)
                    .map(|start| {
                        // Window over qubits start..start+m, i.e. bits n-start-m..n-start.
                        let bits = (d >> (n - start - m)) & wmask;
                        (-gamma * bits.count_ones() as f64).exp()
                    })
                    .sum()
            }
            KernelSpec::Parity { omega } => parity_kernel(n, x, y, omega),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LossSpec {
    Mmd(KernelSpec),
    Emd,
    Sqe,
    /// `KL(q ‖ p)` with the model side floored at `epsilon`.
    Kl {
        epsilon: f64,
    },
}

impl LossSpec {
    pub fn kl() -> Self {
        LossSpec::Kl { epsilon: KL_EPSILON }
    }

    pub fn name(&self) -> &'static str {
        match self {
            LossSpec::Mmd(_) => "mmd",
            LossSpec::Emd => "emd",
            LossSpec::Sqe => "sqe",
            LossSpec::Kl { .. } => "kl",
        }
    }
}

/// Dense kernel matrix over all bitstrings.
pub fn kernel_matrix(spec: &KernelSpec, n: usize) -> Result<Vec<Vec<f64>>> {
    if n > MAX_KERNEL_QUBITS {
        return Err(Error::Domain(format!(
            "dense kernels need n <= {MAX_KERNEL_QUBITS}, got {n}"
        )));
    }
    spec.validate(n)?;
    let d = 1u64 << n;
    Ok((0..d).map(|x| (0..d).map(|y| spec.eval(n, x, y)).collect()).collect())
}

/// Shift-invariant kernel in Walsh form: `K(x, y) = Σ_S μ_S (-1)^{S·(x⊕y)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSpectrum {
    n: usize,
    /// `K(0, z)` for every `z`.
    row: Vec<f64>,
    /// `μ_S` for every `S`.
    weights: Vec<f64>,
}

impl KernelSpectrum {
    /// Spectrum of a kernel given by its dense matrix; rejects kernels that
    /// do not depend on `x ⊕ y` alone (tolerance `1e-10`).
    pub fn from_matrix(k: &[Vec<f64>]) -> Result<Self> {
        let n = register_size(k.len())?;
        let row = k[0].clone();
        for (x, r) in k.iter().enumerate() {
            check_dim(k.len(), r.len())?;
            for (y, v) in r.iter().enumerate() {
                if (v - row[x ^ y]).abs() > 1e-10 {
                    return Err(Error::Domain(format!("kernel is not shift-invariant at ({x}, {y})")));
                }
            }
        }
        Ok(Self::from_row(n, row))
    }

    pub fn from_spec(spec: &KernelSpec, n: usize) -> Result<Self> {
        spec.validate(n)?;
        let row = (0..1u64 << n).map(|z| spec.eval(n, 0, z)).collect();
        Ok(Self::from_row(n, row))
    }

    fn from_row(n: usize, row: Vec<f64>) -> Self {
        let mut weights = row.clone();
        fwht(&mut weights);
        let scale = 1.0 / (1u64 << n) as f64;
        weights.iter_mut().for_each(|w| *w *= scale);
        KernelSpectrum { n, row, weights }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, s: SubsetIndex) -> f64 {
        self.weights[s as usize]
    }

    pub fn as_map(&self) -> BTreeMap<SubsetIndex, f64> {
        self.weights.iter().enumerate().map(|(s, &w)| (s as u64, w)).collect()
    }

    /// `K(x, y)`.
    pub fn eval(&self, x: u64, y: u64) -> f64 {
        self.row[(x ^ y) as usize]
    }

    /// `vᵀ K v` in `O(n 2^n)`: `Σ_S μ_S v̂_S²` with `v̂` the unnormalised Walsh transform.
    pub fn quadratic_form(&self, v: &[f64]) -> f64 {
        let mut vh = v.to_vec();
        fwht(&mut vh);
        vh.iter().zip(&self.weights).map(|(a, w)| w * a * a).sum()
    }

    /// `K v` in `O(n 2^n)`.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let mut vh = v.to_vec();
        fwht(&mut vh);
        vh.iter_mut().zip(&self.weights).for_each(|(a, w)| *a *= w);
        fwht(&mut vh);
        vh
    }
}

/// Walsh weights `μ_S` of a shift-invariant kernel matrix.
pub fn kernel_walsh_spectrum(k: &[Vec<f64>]) -> Result<BTreeMap<SubsetIndex, f64>> {
    Ok(KernelSpectrum::from_matrix(k)?.as_map())
}

/// Loss with everything needed for repeated evaluation precomputed.
#[derive(Debug, Clone)]
pub struct PreparedLoss {
    n: usize,
    spec: LossSpec,
    kernel: Option<KernelSpectrum>,
}

impl PreparedLoss {
    pub fn new(spec: &LossSpec, n: usize) -> Result<Self> {
        let kernel = match spec {
            LossSpec::Mmd(k) => Some(KernelSpectrum::from_spec(k, n)?),
            LossSpec::Kl { epsilon } if !positive(*epsilon) => {
                return Err(Error::Domain(format!("KL smoothing must be positive, got {epsilon}")))
            }
            _ => None,
        };
        Ok(PreparedLoss {
            n,
            spec: spec.clone(),
            kernel,
        })
    }

    pub fn spec(&self) -> &LossSpec {
        &self.spec
    }

    fn check(&self, p: &[f64], q: &[f64]) -> Result<()> {
        check_dim(1 << self.n, p.len())?;
        check_dim(1 << self.n, q.len())
    }

    /// Distance between model `p` (possibly a pseudo-distribution) and target `q`.
    pub fn value(&self, p: &[f64], q: &[f64]) -> Result<f64> {
        self.check(p, q)?;
        match &self.spec {
            LossSpec::Mmd(_) => {
                let d: Vec<f64> = p.iter().zip(q).map(|(a, b)| a - b).collect();
                Ok(self.kernel.as_ref().expect("prepared").quadratic_form(&d))
            }
            LossSpec::Sqe => Ok(p.iter().zip(q).map(|(a, b)| (a - b).powi(2)).sum()),
            LossSpec::Emd => {
                let (mut cp, mut cq, mut total) = (0.0, 0.0, 0.0);
                for (a, b) in p.iter().zip(q) {
                    cp += a;
                    cq += b;
                    total += (cp - cq).abs();
                }
                Ok(total)
            }
            LossSpec::Kl { epsilon } => {
                if let Some(v) = p.iter().find(|v| **v < -1e-12) {
                    return Err(Error::Domain(format!(
                        "KL needs a nonnegative model distribution, found {v}"
                    )));
                }
                Ok(q.iter()
                    .zip(p)
                    .filter(|(t, _)| **t > 0.0)
                    .map(|(t, m)| t * (t / m.max(*epsilon)).ln())
                    .sum())
            }
        }
    }

    /// `∂ loss / ∂ p`.
    pub fn gradient(&self, p: &[f64], q: &[f64]) -> Result<Vec<f64>> {
        self.check(p, q)?;
        match &self.spec {
            LossSpec::Mmd(_) => {
                let d: Vec<f64> = p.iter().zip(q).map(|(a, b)| a - b).collect();
                Ok(self
                    .kernel
                    .as_ref()
                    .expect("prepared")
                    .apply(&d)
                    .into_iter()
                    .map(|v| 2.0 * v)
                    .collect())
            }
            LossSpec::Sqe => Ok(p.iter().zip(q).map(|(a, b)| 2.0 * (a - b)).collect()),
            LossSpec::Emd => {
                let (mut cp, mut cq) = (0.0, 0.0);
                let signs: Vec<f64> = p
                    .iter()
                    .zip(q)
                    .map(|(a, b)| {
                        cp += a;
                        cq += b;
                        let d: f64 = cp - cq;
                        if d > 0.0 {
                            1.0
                        } else if d < 0.0 {
                            -1.0
                        } else {
                            0.0
                        }
                    })
                    .collect();
                // p_y enters every CDF at or after y.
                let mut g = vec![0.0; signs.len()];
                let mut acc = 0.0;
                for i in (0..signs.len()).rev() {
                    acc += signs[i];
                    g[i] = acc;
                }
                Ok(g)
            }
            LossSpec::Kl { epsilon } => Ok(q
                .iter()
                .zip(p)
                .map(|(t, m)| if *t > 0.0 && *m > *epsilon { -t / m } else { 0.0 })
                .collect()),
        }
    }
}

/// One-shot distance; see [`PreparedLoss`] for repeated use.
pub fn distance(p: &[f64], q: &[f64], loss: &LossSpec) -> Result<f64> {
    let n = register_size(p.len())?;
    PreparedLoss::new(loss, n)?.value(p, q)
}

/// MMD through the three-expectation form
/// `Σ p p K - 2 Σ p q K + Σ q q K` with the dense kernel.
pub fn mmd_expectation_form(p: &[f64], q: &[f64], kernel: &KernelSpec) -> Result<f64> {
    let n = register_size(p.len())?;
    check_dim(p.len(), q.len())?;
    let k = kernel_matrix(kernel, n)?;
    let mut e = [0.0; 3];
    for (x, row) in k.iter().enumerate() {
        for (y, kxy) in row.iter().enumerate() {
            e[0] += p[x] * p[y] * kxy;
            e[1] += p[x] * q[y] * kxy;
            e[2] += q[x] * q[y] * kxy;
        }
    }
    Ok(e[0] - 2.0 * e[1] + e[2])
}

/// True when subset `s` lies inside one contiguous window of length `m`.
pub fn within_window(n: usize, s: SubsetIndex, m: usize) -> bool {
    if s == 0 {
        return true;
    }
    let hi = n - 1 - (63 - s.leading_zeros() as usize);
    let lo = n - 1 - s.trailing_zeros() as usize;
    lo - hi < m
}
