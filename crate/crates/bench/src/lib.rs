//! Shared fixtures for the benchmark suite.

use bornlab_core::rng::seeded;
use bornlab_core::{build_ansatz, AnsatzKind, AnsatzSpec, Circuit, IqpLayout};
use rand::Rng;

/// Strongly-entangling circuit with uniform angles in `[0, 2π)`.
pub fn layered_circuit(n: usize, layers: usize, seed: u64) -> (Circuit, Vec<f64>) {
    let c = build_ansatz(&AnsatzSpec {
        n,
        kind: AnsatzKind::StronglyEntangling { layers },
        seed,
    })
    .expect("valid ansatz");
    let theta = angles(c.param_count(), seed);
    (c, theta)
}

/// IQP circuit with `pairs` two-qubit generators on top of the single-qubit ones.
pub fn iqp_circuit(n: usize, pairs: usize, seed: u64) -> (Circuit, Vec<f64>) {
    let c = build_ansatz(&AnsatzSpec {
        n,
        kind: AnsatzKind::Iqp(IqpLayout { pairs, triples: 0 }),
        seed,
    })
    .expect("valid ansatz");
    let theta = angles(c.param_count(), seed);
    (c, theta)
}

fn angles(count: usize, seed: u64) -> Vec<f64> {
    let mut r = seeded(seed, 0xbe7c);
    (0..count).map(|_| r.random::<f64>() * std::f64::consts::TAU).collect()
}
