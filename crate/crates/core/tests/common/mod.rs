#![allow(dead_code)]

use bornlab_core::pauli::full_mask;
use bornlab_core::rng::seeded;
use bornlab_core::{Circuit, PauliString, Phase};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    seeded(seed, 0x7e57)
}

/// Random non-identity Pauli string on `n` qubits with phase +1.
pub fn random_pauli(n: usize, rng: &mut ChaCha8Rng) -> PauliString {
    loop {
        let x = rng.random::<u64>() & full_mask(n);
        let z = rng.random::<u64>() & full_mask(n);
        if x | z != 0 {
            // The stored letter for x=z=1 is Y, so phase +1 is Hermitian.
            return PauliString::from_masks(n, x, z, Phase::ONE).unwrap();
        }
    }
}

/// Circuit mixing Pauli rotations, Hadamards and CNOTs; returns it with angles.
pub fn random_circuit(n: usize, gates: usize, rng: &mut ChaCha8Rng) -> (Circuit, Vec<f64>) {
    let mut c = Circuit::new(n);
    for _ in 0..gates {
        match rng.random_range(0..4) {
            0 if n > 1 => {
                let a = rng.random_range(0..n);
                let b = (a + rng.random_range(1..n)) % n;
                c.cnot(a, b);
            }
            1 => {
                c.hadamard(rng.random_range(0..n));
            }
            _ => {
                c.rotation(random_pauli(n, rng));
            }
        }
    }
    let theta = (0..c.param_count()).map(|_| rng.random_range(-3.2..3.2)).collect();
    (c, theta)
}

/// Dense probability vector with strictly positive entries.
pub fn random_distribution(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut p: Vec<f64> = (0..1usize << n).map(|_| rng.random::<f64>() + 1e-3).collect();
    let s: f64 = p.iter().sum();
    p.iter_mut().for_each(|v| *v /= s);
    p
}
