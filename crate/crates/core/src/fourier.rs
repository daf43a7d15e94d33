//! Walsh-Fourier view of Born distributions.
//!
//! A distribution `p` over `{0,1}^n` is determined by its correlators
//! `⟨Z_𝒊⟩ = Σ_x (-1)^{x·𝒊} p(x)`, and `p(x) = 2^{-n} Σ_𝒊 (-1)^{x·𝒊} ⟨Z_𝒊⟩`.
//! Subsets `𝒊` are bitmasks aligned with basis indices (qubit 0 is the most
//! significant bit). Keeping only some subsets gives pseudo-distributions that
//! still sum to one whenever `∅` is kept, but may go negative.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::index::sample;
use rand::Rng;

use crate::error::{Error, Result};
use crate::pauli::full_mask;
use crate::rng::seeded;

/// Subset `𝒊 ⊆ [n]` as a bitmask; its order is the popcount.
pub type SubsetIndex = u64;

/// Order `|𝒊|` of a subset.
#[inline]
pub fn order(s: SubsetIndex) -> usize {
    s.count_ones() as usize
}

#[inline]
fn parity_sign(a: u64, b: u64) -> f64 {
    if (a & b).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// In-place unnormalized Walsh-Hadamard transform, `out[i] = Σ_x (-1)^{i·x} v[x]`.
pub fn fwht(v: &mut [f64]) {
    let len = v.len();
    assert!(len.is_power_of_two(), "length must be a power of two");
    let mut h = 1;
    while h < len {
        for block in (0..len).step_by(2 * h) {
            for j in block..block + h {
                let (a, b) = (v[j], v[j + h]);
                v[j] = a + b;
                v[j + h] = a - b;
            }
        }
        h *= 2;
    }
}

/// Correlator values keyed by subset; `∅ ↦ 1` always present.
///
/// Surrogate outputs are stored as-is, so truncated expansions may leave
/// `[-1, 1]`; exact decompositions never do.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatorVector {
    n: usize,
    entries: BTreeMap<SubsetIndex, f64>,
}

impl CorrelatorVector {
    /// Empty vector holding only `∅ ↦ 1`.
    pub fn new(n: usize) -> Self {
        let mut entries = BTreeMap::new();
        entries.insert(0, 1.0);
        CorrelatorVector { n, entries }
    }

    /// Dense vector over all `2^n` subsets; entry 0 must be 1.
    pub fn from_dense(n: usize, values: &[f64]) -> Result<Self> {
        crate::error::check_dim(1 << n, values.len())?;
        if (values[0] - 1.0).abs() > 1e-10 {
            return Err(Error::Domain(format!("empty-set correlator is {}, not 1", values[0])));
        }
        let mut c = CorrelatorVector::new(n);
        for (s, &v) in values.iter().enumerate().skip(1) {
            c.entries.insert(s as u64, v);
        }
        Ok(c)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Sets a non-empty subset's value.
    pub fn insert(&mut self, subset: SubsetIndex, value: f64) {
        assert!(subset & !full_mask(self.n) == 0, "subset outside register");
        if subset != 0 {
            self.entries.insert(subset, value);
        }
    }

    pub fn get(&self, subset: SubsetIndex) -> Option<f64> {
        self.entries.get(&subset).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn iter(&self) -> impl Iterator<Item = (SubsetIndex, f64)> + '_ {
        self.entries.iter().map(|(&k, &v)| (k, v))
    }

    /// Dense `2^n` vector with zeros for absent subsets.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut v = vec![0.0; 1 << self.n];
        for (s, val) in self.iter() {
            v[s as usize] = val;
        }
        v
    }
}

/// Which correlators a reconstruction keeps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TruncationSpec {
    /// All subsets of order `≤ k`.
    KOrder(usize),
    /// An explicit subset family containing `∅`.
    Rfc(BTreeSet<SubsetIndex>),
    Full,
}

impl TruncationSpec {
    /// Validated random-correlator truncation.
    pub fn rfc(omega: BTreeSet<SubsetIndex>) -> Result<Self> {
        if !omega.contains(&0) {
            return Err(Error::Domain("RFC subset family must contain the empty set".into()));
        }
        Ok(TruncationSpec::Rfc(omega))
    }

    pub fn contains(&self, subset: SubsetIndex) -> bool {
        match self {
            TruncationSpec::KOrder(k) => order(subset) <= *k,
            TruncationSpec::Rfc(omega) => omega.contains(&subset),
            TruncationSpec::Full => true,
        }
    }

    /// Kept subsets on `n` qubits, ascending.
    pub fn subsets(&self, n: usize) -> Vec<SubsetIndex> {
        match self {
            TruncationSpec::Rfc(omega) => omega.iter().copied().filter(|s| s & !full_mask(n) == 0).collect(),
            _ => (0..1u64 << n).filter(|&s| self.contains(s)).collect(),
        }
    }

    pub fn is_full(&self, n: usize) -> bool {
        match self {
            TruncationSpec::Full => true,
            TruncationSpec::KOrder(k) => *k >= n,
            TruncationSpec::Rfc(omega) => omega.len() == 1 << n,
        }
    }
}

/// Real vector over bitstrings summing to one; entries may be negative.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoDistribution {
    n: usize,
    values: Vec<f64>,
}

impl PseudoDistribution {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Number of qubits for a `2^n` vector.
pub fn register_size(len: usize) -> Result<usize> {
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::Domain(format!("length {len} is not a power of two")));
    }
    Ok(len.trailing_zeros() as usize)
}

/// Checks that `p` is a probability vector.
pub fn check_distribution(p: &[f64]) -> Result<usize> {
    let n = register_size(p.len())?;
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > 1e-10 {
        return Err(Error::Unnormalized(sum));
    }
    if let Some(&neg) = p.iter().find(|&&v| v < -1e-12) {
        return Err(Error::Domain(format!("negative probability {neg}")));
    }
    Ok(n)
}

/// All `2^n` correlators of a probability vector via one Walsh-Hadamard transform.
pub fn decompose(p: &[f64]) -> Result<CorrelatorVector> {
    let n = check_distribution(p)?;
    let mut v = p.to_vec();
    fwht(&mut v);
    v[0] = 1.0;
    CorrelatorVector::from_dense(n, &v)
}

/// Dense correlators without the normalization check (for pseudo-distributions).
pub fn walsh_coefficients(p: &[f64]) -> Result<Vec<f64>> {
    register_size(p.len())?;
    let mut v = p.to_vec();
    fwht(&mut v);
    Ok(v)
}

/// `Pr(x) = 2^{-n} Σ_{𝒊 ∈ trunc} (-1)^{x·𝒊} c(𝒊)`.
pub fn reconstruct(c: &CorrelatorVector, trunc: &TruncationSpec) -> Result<PseudoDistribution> {
    let n = c.n;
    let mut v = vec![0.0; 1 << n];
    for s in trunc.subsets(n) {
        v[s as usize] = c.get(s).ok_or(Error::MissingCorrelator(s))?;
    }
    fwht(&mut v);
    let scale = 1.0 / (1u64 << n) as f64;
    v.iter_mut().for_each(|x| *x *= scale);
    Ok(PseudoDistribution { n, values: v })
}

/// Truncated reconstruction straight from a probability vector.
pub fn truncate_distribution(p: &[f64], trunc: &TruncationSpec) -> Result<PseudoDistribution> {
    let n = register_size(p.len())?;
    let mut v = p.to_vec();
    fwht(&mut v);
    for (s, x) in v.iter_mut().enumerate() {
        if !trunc.contains(s as u64) {
            *x = 0.0;
        }
    }
    fwht(&mut v);
    let scale = 1.0 / (1u64 << n) as f64;
    v.iter_mut().for_each(|x| *x *= scale);
    Ok(PseudoDistribution { n, values: v })
}

/// Sample statistic used by [`empirical_correlators`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatorMode {
    /// Mean of `(-1)^{Σ_{i∈𝒊} x_i}`.
    ZParity,
    /// Mean of `Π_{i∈𝒊} x_i`, the probability that every bit of `𝒊` is 1.
    SProduct,
}

/// Monte Carlo correlator estimates and their variances.
///
/// `gamma` is the assumed pairwise correlation between samples; the variance
/// is `(1/m) s (1 - s) [1 + (m - 1) γ]` for `SProduct` and the analogous
/// `(1/m)(1 - z²)[1 + (m - 1) γ]` for `ZParity`.
pub fn empirical_correlators(
    samples: &[u64],
    subsets: &[SubsetIndex],
    mode: EstimatorMode,
    gamma: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if samples.is_empty() {
        return Err(Error::Domain("empty sample set".into()));
    }
    let m = samples.len() as f64;
    let inflation = 1.0 + (m - 1.0) * gamma;
    let mut est = Vec::with_capacity(subsets.len());
    let mut var = Vec::with_capacity(subsets.len());
    for &s in subsets {
        match mode {
            EstimatorMode::SProduct => {
                let hits = samples.iter().filter(|&&x| x & s == s).count() as f64;
                let e = hits / m;
                est.push(e);
                var.push(e * (1.0 - e) * inflation / m);
            }
            EstimatorMode::ZParity => {
                let e = samples.iter().map(|&x| parity_sign(x, s)).sum::<f64>() / m;
                est.push(e);
                var.push((1.0 - e * e) * inflation / m);
            }
        }
    }
    Ok((est, var))
}

/// Absolute correlators grouped by order `0..=n`, each as `(subset, |⟨Z_𝒊⟩|)` in mask order.
pub fn correlation_spectrum(p: &[f64]) -> Result<Vec<Vec<(SubsetIndex, f64)>>> {
    let c = decompose(p)?;
    let mut out = vec![Vec::new(); c.n + 1];
    for (s, v) in c.to_dense().into_iter().enumerate() {
        out[order(s as u64)].push((s as u64, v.abs()));
    }
    Ok(out)
}

/// Law for drawing the random correlator family `Ω`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RfcPolicy {
    /// Uniform over non-empty subsets of order `≤ k_max`.
    UniformUpTo(usize),
    /// Each qubit enters a candidate subset independently with probability `prob`.
    Bernoulli(f64),
}

/// Draws `Ω` with `∅ ∈ Ω` and `|Ω| = d`.
pub fn rfc_sample(n: usize, policy: RfcPolicy, d: usize, seed: u64) -> Result<TruncationSpec> {
    if d == 0 {
        return Err(Error::Domain("RFC size must be at least 1".into()));
    }
    let mut omega = BTreeSet::from([0u64]);
    let mut rng = seeded(seed, 0xf0c);
    match policy {
        RfcPolicy::UniformUpTo(k_max) => {
            let pool: Vec<u64> = (1..1u64 << n).filter(|&s| order(s) <= k_max).collect();
            if d - 1 > pool.len() {
                return Err(Error::Domain(format!(
                    "requested {d} subsets but only {} exist up to order {k_max}",
                    pool.len() + 1
                )));
            }
            let mut picked = sample(&mut rng, pool.len(), d - 1).into_vec();
            picked.sort_unstable();
            omega.extend(picked.into_iter().map(|i| pool[i]));
        }
        RfcPolicy::Bernoulli(prob) => {
            if d > 1 << n {
                return Err(Error::Domain(format!(
                    "requested {d} subsets of a {}-set family",
                    1u64 << n
                )));
            }
            if d > 1 && !(prob > 0.0 && prob < 1.0) {
                return Err(Error::Domain(format!(
                    "Bernoulli probability {prob} must lie in (0, 1)"
                )));
            }
            while omega.len() < d {
                let s = (0..n).fold(0u64, |m, q| if rng.random::<f64>() < prob { m | (1 << q) } else { m });
                omega.insert(s);
            }
        }
    }
    TruncationSpec::rfc(omega)
}

/// Parity kernel `2^{-n} Σ_{𝒊∈Ω} (-1)^{𝒊·(x ⊕ x′)}`.
pub fn parity_kernel(n: usize, x: u64, y: u64, omega: &[SubsetIndex]) -> f64 {
    let d = x ^ y;
    omega.iter().map(|&s| parity_sign(s, d)).sum::<f64>() / (1u64 << n) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ghz3() -> Vec<f64> {
        let mut p = vec![0.0; 8];
        p[0] = 0.5;
        p[7] = 0.5;
        p
    }

    #[test]
    fn uniform_and_delta() {
        let c = decompose(&[0.25; 4]).unwrap();
        assert_eq!(c.to_dense(), vec![1.0, 0.0, 0.0, 0.0]);
        let c = decompose(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(c.to_dense(), vec![1.0; 4]);
    }

    #[test]
    fn ghz_truncations() {
        let c = decompose(&ghz3()).unwrap();
        for s in 1..8u64 {
            let want = if order(s) == 2 { 1.0 } else { 0.0 };
            assert_eq!(c.get(s).unwrap(), want);
        }
        let p1 = reconstruct(&c, &TruncationSpec::KOrder(1)).unwrap();
        assert!(p1.values().iter().all(|&v| v == 0.125));
        let p2 = reconstruct(&c, &TruncationSpec::KOrder(2)).unwrap();
        assert_eq!(p2.values(), ghz3().as_slice());
        let p0 = reconstruct(&c, &TruncationSpec::KOrder(0)).unwrap();
        assert!(p0.values().iter().all(|&v| v == 0.125));
    }

    #[test]
    fn negative_pseudo_probability() {
        let c = decompose(&[0.0, 0.0, 0.0, 1.0]).unwrap();
        let p = reconstruct(&c, &TruncationSpec::KOrder(1)).unwrap();
        assert_abs_diff_eq!(p.values()[0], -0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(p.sum(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn missing_entry_is_an_error() {
        let c = CorrelatorVector::new(2);
        assert!(matches!(
            reconstruct(&c, &TruncationSpec::KOrder(1)),
            Err(Error::MissingCorrelator(_))
        ));
    }

    #[test]
    fn unnormalized_rejected() {
        assert!(matches!(decompose(&[0.5, 0.2]), Err(Error::Unnormalized(_))));
    }

    #[test]
    fn s_product_estimates() {
        let ones = vec![0b111u64; 10];
        let (e, v) = empirical_correlators(&ones, &[0b101], EstimatorMode::SProduct, 0.0).unwrap();
        assert_eq!((e[0], v[0]), (1.0, 0.0));
        let all: Vec<u64> = (0..4).collect();
        let (e, _) = empirical_correlators(&all, &[0b11], EstimatorMode::SProduct, 0.0).unwrap();
        assert_eq!(e[0], 0.25);
        assert!(empirical_correlators(&[], &[1], EstimatorMode::ZParity, 0.0).is_err());
    }

    #[test]
    fn rfc_edges() {
        assert_eq!(
            rfc_sample(4, RfcPolicy::UniformUpTo(4), 1, 0).unwrap(),
            TruncationSpec::Rfc(BTreeSet::from([0]))
        );
        let full = rfc_sample(3, RfcPolicy::UniformUpTo(3), 8, 5).unwrap();
        assert_eq!(full.subsets(3), (0..8).collect::<Vec<_>>());
        assert!(rfc_sample(3, RfcPolicy::UniformUpTo(1), 5, 0).is_err());
        let b = rfc_sample(5, RfcPolicy::Bernoulli(0.3), 10, 2).unwrap();
        assert_eq!(b.subsets(5).len(), 10);
        assert_eq!(b, rfc_sample(5, RfcPolicy::Bernoulli(0.3), 10, 2).unwrap());
    }

    #[test]
    fn parity_kernel_limits() {
        let n = 3;
        let all: Vec<u64> = (0..8).collect();
        for x in 0..8 {
            for y in 0..8 {
                let want = if x == y { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(parity_kernel(n, x, y, &all), want, epsilon = 1e-15);
                assert_eq!(parity_kernel(n, x, y, &[0]), 0.125);
            }
        }
        assert_eq!(parity_kernel(n, 5, 5, &[0, 1, 6]), 3.0 / 8.0);
    }
}
