//! Closed-form Pauli propagation for IQP circuits.
//!
//! For `U = H^{⊗n} U_c H^{⊗n}` with commuting diagonal gates
//! `U_c = Π_j exp(-i θ_j/2 G_j)`, the correlator `⟨Z_𝒊⟩` equals
//! `⟨+|U_c† X_𝒊 U_c|+⟩`. Only gates in `S(𝒊)` (odd overlap with `𝒊`) act
//! non-trivially, and each contributes a `cos θ_j` or `i sin θ_j G_j` branch.
//! A branch survives iff the product of its flipped generators is the
//! identity, i.e. every qubit is flipped an even number of times.

use crate::ansatz::iqp_circuit;
use crate::error::{Error, Result};
use crate::fourier::{order, CorrelatorVector, SubsetIndex, TruncationSpec};
use crate::pauli::{full_mask, PauliString};
use crate::statevector::{Circuit, Gate};

/// Default ceiling on enumerated flip vectors.
pub const DEFAULT_EXPANSION_CAP: u128 = 1 << 26;

/// Commuting diagonal generators; gate `j` uses parameter `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct IqpSpec {
    n: usize,
    generators: Vec<PauliString>,
}

impl IqpSpec {
    pub fn new(n: usize, generators: Vec<PauliString>) -> Result<Self> {
        for g in &generators {
            crate::error::check_dim(n, g.n())?;
            if !g.is_diagonal() || !g.phase().is_real() {
                return Err(Error::Domain(format!(
                    "IQP generator {g} must be a real diagonal string"
                )));
            }
        }
        Ok(IqpSpec { n, generators })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[PauliString] {
        &self.generators
    }

    pub fn g(&self) -> usize {
        self.generators.len()
    }

    /// Recovers the spec from a circuit of the form `H^{⊗n} · rotations · H^{⊗n}`
    /// whose diagonal rotations use parameters `0, 1, …` in order.
    pub fn from_circuit(c: &Circuit) -> Result<Self> {
        let n = c.n();
        let gates = c.gates();
        let not_iqp = || Error::Domain("circuit is not in IQP form".into());
        if gates.len() < 2 * n {
            return Err(not_iqp());
        }
        let (head, rest) = gates.split_at(n);
        let (mid, tail) = rest.split_at(rest.len() - n);
        for (q, g) in head.iter().chain(tail).enumerate() {
            if *g != Gate::Hadamard(q % n) {
                return Err(not_iqp());
            }
        }
        let mut generators = Vec::with_capacity(mid.len());
        for (j, g) in mid.iter().enumerate() {
            match g {
                Gate::Rotation { generator, param } if *param == j => generators.push(*generator),
                _ => return Err(not_iqp()),
            }
        }
        if c.param_count() != generators.len() {
            return Err(not_iqp());
        }
        IqpSpec::new(n, generators)
    }

    /// The statevector circuit this spec describes.
    pub fn circuit(&self) -> Circuit {
        iqp_circuit(self.n, &self.generators).expect("validated generators")
    }
}

/// One surviving branch of the expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagationTerm {
    /// Bit `b` set when the `b`-th gate of `S(𝒊)` takes its sine branch.
    pub flips: u64,
    pub coefficient: f64,
    /// Pauli operator left after conjugation, with phase.
    pub residual: PauliString,
}

/// Value plus enumeration counters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IqpEvaluation {
    pub value: f64,
    /// `M = |S(𝒊)|`.
    pub m: usize,
    /// Flip vectors visited; equals `Σ_{w≤h} C(M, w)`.
    pub enumerated: u128,
    /// Flip vectors with identity residual.
    pub kept: u128,
}

/// Gate indices whose generator anticommutes with `X_𝒊`.
pub fn iqp_anticommuting_set(spec: &IqpSpec, subset: SubsetIndex) -> Vec<usize> {
    spec.generators
        .iter()
        .enumerate()
        .filter(|(_, g)| (g.z_mask() & subset).count_ones() % 2 == 1)
        .map(|(j, _)| j)
        .collect()
}

/// `Σ_{w≤h} C(m, w)`, saturating.
pub fn bounded_subset_count(m: usize, h: usize) -> u128 {
    let mut total: u128 = 0;
    let mut binom: u128 = 1;
    for w in 0..=h.min(m) {
        total = total.saturating_add(binom);
        binom = binom.saturating_mul((m - w) as u128) / (w as u128 + 1);
    }
    total
}

struct Walker<'a> {
    zs: Vec<u64>,
    signs: Vec<f64>,
    cos: Vec<f64>,
    sin: Vec<f64>,
    h: usize,
    enumerated: u128,
    kept: u128,
    value: f64,
    on_keep: Option<&'a mut dyn FnMut(u64, f64)>,
}

impl Walker<'_> {
    fn walk(&mut self, pos: usize, used: usize, zacc: u64, mag: f64, flips: u64) {
        if pos == self.zs.len() {
            self.enumerated += 1;
            if zacc == 0 {
                // |r| is even whenever the flipped generators cancel.
                let ipow = if (used / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
                let c = ipow * mag;
                self.kept += 1;
                self.value += c;
                if let Some(f) = self.on_keep.as_mut() {
                    f(flips, c);
                }
            }
            return;
        }
        self.walk(pos + 1, used, zacc, mag * self.cos[pos], flips);
        if used < self.h {
            let m = mag * self.sin[pos] * self.signs[pos];
            self.walk(pos + 1, used + 1, zacc ^ self.zs[pos], m, flips | 1 << pos);
        }
    }
}

fn prepare<'a>(spec: &IqpSpec, theta: &[f64], subset: SubsetIndex, h_max: usize, cap: u128) -> Result<Walker<'a>> {
    if theta.len() != spec.g() {
        return Err(Error::ParamCount {
            expected: spec.g(),
            found: theta.len(),
        });
    }
    if subset & !full_mask(spec.n) != 0 {
        return Err(Error::Domain(format!("subset {subset:#b} outside register")));
    }
    let s = iqp_anticommuting_set(spec, subset);
    if s.len() > 63 {
        return Err(Error::ExpansionCap { terms: u128::MAX, cap });
    }
    let h = h_max.min(s.len());
    let terms = bounded_subset_count(s.len(), h);
    if terms > cap {
        return Err(Error::ExpansionCap { terms, cap });
    }
    Ok(Walker {
        zs: s.iter().map(|&j| spec.generators[j].z_mask()).collect(),
        signs: s
            .iter()
            .map(|&j| spec.generators[j].phase().sign().unwrap_or(1.0))
            .collect(),
        cos: s.iter().map(|&j| theta[j].cos()).collect(),
        sin: s.iter().map(|&j| theta[j].sin()).collect(),
        h,
        enumerated: 0,
        kept: 0,
        value: 0.0,
        on_keep: None,
    })
}

/// Surrogate `⟨Z_𝒊⟩` keeping flip vectors of Hamming weight `≤ h_max`
/// (`h_max` is clamped to `M`).
pub fn iqp_surrogate_detailed(
    spec: &IqpSpec,
    theta: &[f64],
    subset: SubsetIndex,
    h_max: usize,
    cap: u128,
) -> Result<IqpEvaluation> {
    let mut w = prepare(spec, theta, subset, h_max, cap)?;
    w.walk(0, 0, 0, 1.0, 0);
    Ok(IqpEvaluation {
        value: w.value,
        m: w.zs.len(),
        enumerated: w.enumerated,
        kept: w.kept,
    })
}

/// Surrogate `⟨Z_𝒊⟩` with the default expansion cap.
pub fn iqp_surrogate_correlator(spec: &IqpSpec, theta: &[f64], subset: SubsetIndex, h_max: usize) -> Result<f64> {
    Ok(iqp_surrogate_detailed(spec, theta, subset, h_max, DEFAULT_EXPANSION_CAP)?.value)
}

/// Surviving branches with their residual operators rebuilt by explicit
/// Pauli multiplication (for inspection and symbolic checks).
pub fn iqp_expansion_terms(
    spec: &IqpSpec,
    theta: &[f64],
    subset: SubsetIndex,
    h_max: usize,
) -> Result<Vec<PropagationTerm>> {
    let s = iqp_anticommuting_set(spec, subset);
    let mut kept: Vec<(u64, f64)> = Vec::new();
    let mut record = |flips: u64, c: f64| kept.push((flips, c));
    let mut w = prepare(spec, theta, subset, h_max, DEFAULT_EXPANSION_CAP)?;
    w.on_keep = Some(&mut record);
    w.walk(0, 0, 0, 1.0, 0);
    drop(w);
    let x = PauliString::x_string(spec.n, subset);
    Ok(kept
        .into_iter()
        .map(|(flips, coefficient)| {
            let mut residual = x;
            for (b, &j) in s.iter().enumerate() {
                if flips >> b & 1 == 1 {
                    residual = spec.generators[j].mul_unchecked(&residual);
                }
            }
            PropagationTerm {
                flips,
                coefficient,
                residual,
            }
        })
        .collect())
}

/// Surrogate correlators on every subset kept by `trunc`.
pub fn iqp_surrogate_correlators(
    spec: &IqpSpec,
    theta: &[f64],
    trunc: &TruncationSpec,
    h_max: usize,
) -> Result<CorrelatorVector> {
    let mut c = CorrelatorVector::new(spec.n);
    for s in trunc.subsets(spec.n).into_iter().filter(|&s| s != 0) {
        c.insert(s, iqp_surrogate_correlator(spec, theta, s, h_max)?);
    }
    Ok(c)
}

/// `2^{-n} Σ_{|𝒊|≤k} (-1)^{x·𝒊} ⟨Z_𝒊⟩_surrogate`.
pub fn iqp_truncated_prob(spec: &IqpSpec, theta: &[f64], x: u64, k: usize, h_max: usize) -> Result<f64> {
    let n = spec.n;
    let mut total = 0.0;
    for s in 0..1u64 << n {
        if order(s) > k {
            continue;
        }
        let v = if s == 0 {
            1.0
        } else {
            iqp_surrogate_correlator(spec, theta, s, h_max)?
        };
        let sign = if (x & s).count_ones().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        total += sign * v;
    }
    Ok(total / (1u64 << n) as f64)
}
