//! Second moments of random matrix product states via 2×2 transfer matrices.
//!
//! Each site of an RMPS embeds an i.i.d. Haar unitary on `ℓχ` dimensions.
//! Averaging two copies of a site leaves a map on the two-copy bond space
//! spanned by `{𝟙, 𝔽}` (identity and swap), so any product observable reduces
//! to `(1 1) · T_1 ⋯ T_n · (1 1)ᵀ`. Rows index the left bond label, columns
//! the right one, and site 0 sits at the left end.
//!
//! [`rmps_mc_estimate`] samples the same two-copy contraction directly from
//! Haar-drawn staircase states so the closed forms can be checked.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fourier::{order, SubsetIndex};
use crate::pauli::qubit_bit;
use crate::rng::{haar_unitary, seeded};
use crate::stats::McEstimate;

/// Sites `n`, local dimension `ℓ` and bond dimension `χ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RmpsParams {
    pub n: usize,
    pub l: usize,
    pub chi: u64,
}

impl RmpsParams {
    pub fn new(n: usize, l: usize, chi: u64) -> Result<Self> {
        if n == 0 || l < 2 || chi == 0 {
            return Err(Error::Domain(format!(
                "RMPS needs n >= 1, l >= 2, chi >= 1 (got n={n}, l={l}, chi={chi})"
            )));
        }
        Ok(RmpsParams { n, l, chi })
    }

    /// Qubit chain (`ℓ = 2`).
    pub fn qubits(n: usize, chi: u64) -> Result<Self> {
        Self::new(n, 2, chi)
    }

    fn lf(&self) -> f64 {
        self.l as f64
    }

    fn cf(&self) -> f64 {
        self.chi as f64
    }

    fn denom(&self) -> f64 {
        let (l, c) = (self.lf(), self.cf());
        l * l * c * c - 1.0
    }

    pub fn eta_l(&self) -> f64 {
        let (l, c) = (self.lf(), self.cf());
        l * (c * c - 1.0) / self.denom()
    }

    pub fn eta_chi(&self) -> f64 {
        let (l, c) = (self.lf(), self.cf());
        c * (l * l - 1.0) / self.denom()
    }

    pub fn zeta(&self) -> f64 {
        let (l, c) = (self.lf(), self.cf());
        (l * c * c - 1.0) / (l * self.denom())
    }

    pub fn mu(&self) -> f64 {
        let (l, c) = (self.lf(), self.cf());
        c * (l - 1.0) / (l * self.denom())
    }
}

/// Single-site operator inserted into both copies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SiteOp {
    Identity,
    /// Pauli `Z`, normalised to unit Hilbert-Schmidt norm.
    Z,
    /// `|0⟩⟨0|`.
    Projector,
    /// Swap of the two physical copies.
    Flip,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionMatrix {
    pub kind: SiteOp,
    pub m: [[f64; 2]; 2],
}

impl TransitionMatrix {
    pub fn new(params: &RmpsParams, kind: SiteOp) -> Self {
        let (l, c) = (params.lf(), params.cf());
        let (el, ec) = (params.eta_l(), params.eta_chi());
        let m = match kind {
            SiteOp::Identity => [[1.0, ec], [0.0, el]],
            SiteOp::Flip => [[el, 0.0], [ec, 1.0]],
            SiteOp::Z => {
                let s = 1.0 / (l * params.denom());
                [[-s, -c * s], [l * c * s, l * c * c * s]]
            }
            SiteOp::Projector => {
                let (z, mu) = (params.zeta(), params.mu());
                [[z, mu], [mu, z]]
            }
        };
        TransitionMatrix { kind, m }
    }
}

type Row = [f64; 2];

fn row_mul(v: Row, t: &[[f64; 2]; 2]) -> Row {
    [v[0] * t[0][0] + v[1] * t[1][0], v[0] * t[0][1] + v[1] * t[1][1]]
}

/// `(1 1) · Π_s T(ops[s]) · (1 1)ᵀ`.
pub fn rmps_transfer_product(params: &RmpsParams, ops: &[SiteOp]) -> Result<f64> {
    crate::error::check_dim(params.n, ops.len())?;
    let mut v: Row = [1.0, 1.0];
    for &op in ops {
        v = row_mul(v, &TransitionMatrix::new(params, op).m);
    }
    Ok(v[0] + v[1])
}

/// Per-site operators for `Z_𝒊`.
pub fn correlator_ops(n: usize, subset: SubsetIndex) -> Vec<SiteOp> {
    (0..n)
        .map(|q| {
            if subset & qubit_bit(n, q) != 0 {
                SiteOp::Z
            } else {
                SiteOp::Identity
            }
        })
        .collect()
}

/// Variance of `⟨Z_𝒊⟩` over the RMPS ensemble; zero for the empty subset.
pub fn rmps_correlator_variance(params: &RmpsParams, subset: SubsetIndex) -> Result<f64> {
    if subset == 0 {
        return Ok(0.0);
    }
    rmps_transfer_product(params, &correlator_ops(params.n, subset))
}

fn prefix_ops(n: usize, k: usize, head: SiteOp) -> Vec<SiteOp> {
    (0..n).map(|s| if s < k { head } else { SiteOp::Identity }).collect()
}

/// Largest marginal variance over size-`m` marginals: projectors on the
/// first `m` sites, `(1 1) T_O^m T_𝟙^{n-m} (1 1)ᵀ`.
pub fn rmps_marginal_variance(params: &RmpsParams, m: usize) -> Result<f64> {
    if m == 0 || m > params.n {
        return Err(Error::Domain(format!("marginal size {m} outside 1..={}", params.n)));
    }
    rmps_transfer_product(params, &prefix_ops(params.n, m, SiteOp::Projector))
}

/// `2^{-n} Σ_{|𝒊|≤k} (1 1) T_𝒊 (1 1)ᵀ`, summed by a dynamic program over the
/// number of `Z` sites so the cost is `O(n k)`.
pub fn rmps_truncated_prob_variance(params: &RmpsParams, k: usize) -> Result<f64> {
    let n = params.n;
    if k > n {
        return Err(Error::Domain(format!("order {k} exceeds n = {n}")));
    }
    let ti = TransitionMatrix::new(params, SiteOp::Identity).m;
    let tz = TransitionMatrix::new(params, SiteOp::Z).m;
    // by_count[p] accumulates row vectors of every prefix with p Z sites.
    let mut by_count: Vec<Row> = vec![[0.0; 2]; k + 1];
    by_count[0] = [1.0, 1.0];
    for _ in 0..n {
        let mut next = vec![[0.0; 2]; k + 1];
        for p in 0..=k {
            let a = row_mul(by_count[p], &ti);
            next[p][0] += a[0];
            next[p][1] += a[1];
            if p < k {
                let b = row_mul(by_count[p], &tz);
                next[p + 1][0] += b[0];
                next[p + 1][1] += b[1];
            }
        }
        by_count = next;
    }
    let total: f64 = by_count.iter().map(|v| v[0] + v[1]).sum();
    Ok(total / 2f64.powi(n as i32))
}

/// `(1 1) T_𝔽^k T_𝟙^{n-k} (1 1)ᵀ`, the two-copy swap expectation on the
/// first `k` sites (an expected purity in the large-`χ` limit).
pub fn rmps_renyi2_max(params: &RmpsParams, k: usize) -> Result<f64> {
    if k > params.n {
        return Err(Error::Domain(format!("subsystem size {k} exceeds n = {}", params.n)));
    }
    rmps_transfer_product(params, &prefix_ops(params.n, k, SiteOp::Flip))
}

/// Haar staircase RMPS: amplitudes indexed by `x · χ + c`, with `x` the
/// physical string (site 0 most significant) and `c` the open right bond.
pub fn rmps_sample_state<R: rand::Rng + ?Sized>(params: &RmpsParams, rng: &mut R) -> Result<Vec<Complex64>> {
    if params.l != 2 {
        return Err(Error::Domain("sampled RMPS states are qubit chains (l = 2)".into()));
    }
    let chi = params.chi as usize;
    let mut v = vec![Complex64::new(0.0, 0.0); chi];
    v[0] = Complex64::new(1.0, 0.0);
    for _ in 0..params.n {
        let u = haar_unitary(2 * chi, rng);
        let prefixes = v.len() / chi;
        let mut next = vec![Complex64::new(0.0, 0.0); 2 * v.len()];
        for pre in 0..prefixes {
            let inp = &v[pre * chi..(pre + 1) * chi];
            for p in 0..2 {
                for c2 in 0..chi {
                    // Physical input fixed to |0⟩, so only columns 0..χ contribute.
                    let amp: Complex64 = (0..chi).map(|c| u[(p * chi + c2, c)] * inp[c]).sum();
                    next[((pre << 1) | p) * chi + c2] = amp;
                }
            }
        }
        v = next;
    }
    Ok(v)
}

/// One-draw value of the two-copy contraction that the transfer matrices
/// average: `Tr_A[(Tr_bond M)²] + Tr M²`, where `M` is the state reduced onto
/// the flip sites `A` and the bond after weighting the remaining sites by
/// their diagonal operators.
pub fn two_copy_value(params: &RmpsParams, psi: &[Complex64], ops: &[SiteOp]) -> Result<f64> {
    let n = params.n;
    crate::error::check_dim(n, ops.len())?;
    let chi = params.chi as usize;
    crate::error::check_dim(chi << n, psi.len())?;
    let flips: Vec<usize> = (0..n).filter(|&s| ops[s] == SiteOp::Flip).collect();
    let a_dim = 1usize << flips.len();
    let d = a_dim * chi;
    let mut m = DMatrix::<Complex64>::zeros(d, d);
    let rest: Vec<usize> = (0..n).filter(|&s| ops[s] != SiteOp::Flip).collect();
    let mut col = vec![Complex64::new(0.0, 0.0); d];
    for r in 0..1u64 << rest.len() {
        let mut base = 0u64;
        let mut weight = 1.0;
        for (i, &s) in rest.iter().enumerate() {
            let bit = (r >> (rest.len() - 1 - i)) & 1;
            base |= bit << (n - 1 - s);
            weight *= match ops[s] {
                SiteOp::Identity => 1.0,
                SiteOp::Z => (if bit == 0 { 1.0 } else { -1.0 }) * std::f64::consts::FRAC_1_SQRT_2,
                SiteOp::Projector => 1.0 - bit as f64,
                SiteOp::Flip => unreachable!(),
            };
        }
        if weight == 0.0 {
            continue;
        }
        for a in 0..a_dim as u64 {
            let mut x = base;
            for (i, &s) in flips.iter().enumerate() {
                x |= ((a >> (flips.len() - 1 - i)) & 1) << (n - 1 - s);
            }
            for c in 0..chi {
                col[a as usize * chi + c] = psi[x as usize * chi + c];
            }
        }
        for i in 0..d {
            for j in 0..d {
                m[(i, j)] += col[i] * col[j].conj() * weight;
            }
        }
    }
    let tr_m2: f64 = m.iter().map(|z| z.norm_sqr()).sum();
    let mut tr_n2 = 0.0;
    for a in 0..a_dim {
        for b in 0..a_dim {
            let nab: Complex64 = (0..chi).map(|c| m[(a * chi + c, b * chi + c)]).sum();
            tr_n2 += nab.norm_sqr();
        }
    }
    Ok(tr_n2 + tr_m2)
}

/// Monte-Carlo estimate of [`rmps_transfer_product`] for `ops` from `draws`
/// Haar-sampled states. Draw `t` uses stream `t` of `seed`.
pub fn rmps_mc_estimate(params: &RmpsParams, ops: &[SiteOp], draws: usize, seed: u64) -> Result<McEstimate> {
    let samples: Vec<f64> = (0..draws)
        .into_par_iter()
        .map(|t| {
            let mut rng = seeded(seed, t as u64);
            let psi = rmps_sample_state(params, &mut rng)?;
            two_copy_value(params, &psi, ops)
        })
        .collect::<Result<_>>()?;
    Ok(McEstimate::from_samples(&samples))
}

/// Monte-Carlo estimate of [`rmps_truncated_prob_variance`]: every draw sums
/// the two-copy value over all `{𝟙, Z}` strings of order `≤ k`.
pub fn rmps_mc_truncated_prob(params: &RmpsParams, k: usize, draws: usize, seed: u64) -> Result<McEstimate> {
    let n = params.n;
    let strings: Vec<Vec<SiteOp>> = (0..1u64 << n)
        .filter(|&s| order(s) <= k)
        .map(|s| correlator_ops(n, s))
        .collect();
    let scale = 2f64.powi(-(n as i32));
    let samples: Vec<f64> = (0..draws)
        .into_par_iter()
        .map(|t| {
            let mut rng = seeded(seed, t as u64);
            let psi = rmps_sample_state(params, &mut rng)?;
            let mut total = 0.0;
            for ops in &strings {
                total += two_copy_value(params, &psi, ops)?;
            }
            Ok(total * scale)
        })
        .collect::<Result<_>>()?;
    Ok(McEstimate::from_samples(&samples))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_site_haar_value() {
        let p = RmpsParams::qubits(1, 1).unwrap();
        assert!((rmps_correlator_variance(&p, 1).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(rmps_correlator_variance(&p, 0).unwrap(), 0.0);
    }

    #[test]
    fn sampled_state_is_normalised() {
        let p = RmpsParams::qubits(3, 2).unwrap();
        let psi = rmps_sample_state(&p, &mut seeded(4, 0)).unwrap();
        let norm: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dp_matches_enumeration() {
        let p = RmpsParams::qubits(5, 3).unwrap();
        for k in 0..=5 {
            let brute: f64 = (0..32u64)
                .filter(|&s| order(s) <= k)
                .map(|s| rmps_transfer_product(&p, &correlator_ops(5, s)).unwrap())
                .sum::<f64>()
                / 32.0;
            assert!((rmps_truncated_prob_variance(&p, k).unwrap() - brute).abs() < 1e-15);
        }
    }
}
