//! Circuit families used as Born-machine models.

use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::Rng;

use crate::algebra::{generators_for, named_dla, DlaKind};
use crate::error::{Error, Result};
use crate::pauli::{qubits_mask, Pauli, PauliString};
use crate::rng::seeded;
use crate::statevector::Circuit;

/// Which multi-qubit `Z` generators an IQP circuit carries.
///
/// Every single-qubit `Z_i` is always present; `pairs` and `triples` distinct
/// higher-order terms are drawn without replacement from the seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IqpLayout {
    pub pairs: usize,
    pub triples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum AnsatzKind {
    Iqp(IqpLayout),
    /// `gates` rotations drawn uniformly from `{X_i X_{i+1}} ∪ {Z_i}`.
    Matchcircuit {
        gates: usize,
    },
    /// `gates` rotations drawn uniformly from a named algebra basis.
    DlaSampled {
        algebra: DlaKind,
        gates: usize,
    },
    /// Per layer `RZ RY RZ` on every qubit, then a CNOT ring of layer-dependent range.
    StronglyEntangling {
        layers: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnsatzSpec {
    pub n: usize,
    pub kind: AnsatzKind,
    pub seed: u64,
}

/// Diagonal generators of a seeded IQP layout.
pub fn iqp_generators(n: usize, layout: IqpLayout, seed: u64) -> Result<Vec<PauliString>> {
    let mut gens: Vec<PauliString> = (0..n).map(|q| PauliString::single(n, q, Pauli::Z)).collect();
    let mut rng = seeded(seed, 0x1a9);
    for (arity, count) in [(2usize, layout.pairs), (3usize, layout.triples)] {
        if count == 0 {
            continue;
        }
        let all = subsets_of_size(n, arity);
        if count > all.len() {
            return Err(Error::Domain(format!(
                "requested {count} weight-{arity} generators but only {} exist for n = {n}",
                all.len()
            )));
        }
        let mut picked: Vec<usize> = sample(&mut rng, all.len(), count).into_vec();
        picked.sort_unstable();
        gens.extend(picked.into_iter().map(|i| PauliString::z_string(n, all[i])));
    }
    Ok(gens)
}

fn subsets_of_size(n: usize, k: usize) -> Vec<u64> {
    let mut out: Vec<u64> = (0u64..1 << n).filter(|m| m.count_ones() as usize == k).collect();
    out.sort_unstable();
    out
}

/// IQP circuit `H^{⊗n} · Π_j exp(-i θ_j/2 G_j) · H^{⊗n}` for diagonal generators.
pub fn iqp_circuit(n: usize, generators: &[PauliString]) -> Result<Circuit> {
    let mut c = Circuit::new(n);
    for q in 0..n {
        c.hadamard(q);
    }
    for g in generators {
        if !g.is_diagonal() {
            return Err(Error::Domain(format!("IQP generator {g} is not diagonal")));
        }
        crate::error::check_dim(n, g.n())?;
        c.rotation(*g);
    }
    for q in 0..n {
        c.hadamard(q);
    }
    Ok(c)
}

/// Builds the circuit described by `spec`.
pub fn build_ansatz(spec: &AnsatzSpec) -> Result<Circuit> {
    let n = spec.n;
    if n == 0 {
        return Err(Error::Domain("ansatz needs at least one qubit".into()));
    }
    match &spec.kind {
        AnsatzKind::Iqp(layout) => iqp_circuit(n, &iqp_generators(n, *layout, spec.seed)?),
        AnsatzKind::Matchcircuit { gates } => {
            if n < 2 {
                return Err(Error::Domain("matchcircuit needs n >= 2".into()));
            }
            Ok(sampled_circuit(
                n,
                &generators_for(DlaKind::Matchgate, n),
                *gates,
                spec.seed,
            ))
        }
        AnsatzKind::DlaSampled { algebra, gates } => {
            let basis: Vec<PauliString> = named_dla(*algebra, n)?.basis().collect();
            Ok(sampled_circuit(n, &basis, *gates, spec.seed))
        }
        AnsatzKind::StronglyEntangling { layers } => {
            if *layers == 0 {
                return Err(Error::Domain("strongly entangling ansatz needs layers >= 1".into()));
            }
            Ok(strongly_entangling(n, *layers))
        }
    }
}

/// `g` rotations with generators drawn uniformly (with replacement) from `pool`.
pub fn sampled_circuit(n: usize, pool: &[PauliString], g: usize, seed: u64) -> Circuit {
    let mut rng = seeded(seed, 0x5a3);
    let mut c = Circuit::new(n);
    for _ in 0..g {
        let idx = rng.random_range(0..pool.len());
        c.rotation(pool[idx]);
    }
    c
}

/// Layered `RZ·RY·RZ` rotations with CNOT rings of range `(l mod (n-1)) + 1`.
pub fn strongly_entangling(n: usize, layers: usize) -> Circuit {
    let mut c = Circuit::new(n);
    for l in 0..layers {
        for q in 0..n {
            c.rotation(PauliString::single(n, q, Pauli::Z));
            c.rotation(PauliString::single(n, q, Pauli::Y));
            c.rotation(PauliString::single(n, q, Pauli::Z));
        }
        if n > 1 {
            let r = l % (n - 1) + 1;
            for q in 0..n {
                c.cnot(q, (q + r) % n);
            }
        }
    }
    c
}

/// Distinct qubit-pair couplings realised by a circuit's CNOTs.
pub fn cnot_pairs(c: &Circuit) -> BTreeSet<u64> {
    c.gates()
        .iter()
        .filter_map(|g| match g {
            crate::statevector::Gate::Cnot { control, target } => Some(qubits_mask(c.n(), &[*control, *target])),
            _ => None,
        })
        .collect()
}
