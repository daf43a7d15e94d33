//! Weight-truncated Heisenberg-picture Pauli propagation for arbitrary
//! circuits of Pauli rotations, Hadamards and CNOTs.

use std::collections::BTreeMap;

use crate::error::{check_dim, Error, Result};
use crate::pauli::{qubit_bit, Pauli, PauliString, Phase};
use crate::statevector::{Circuit, Gate};

/// Default ceiling on the number of live Pauli terms.
pub const DEFAULT_TERM_CAP: usize = 1 << 22;

/// Result plus bookkeeping from one propagation run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationReport {
    pub value: f64,
    /// Largest number of live terms after any gate.
    pub peak_terms: usize,
    /// Terms discarded by the weight cut.
    pub dropped: usize,
}

type Terms = BTreeMap<(u64, u64), f64>;

fn conjugate_clifford(p: &PauliString, qubits: &[usize], image: impl Fn(usize, Pauli) -> PauliString) -> PauliString {
    let n = p.n();
    let mut cleared = (p.x_mask(), p.z_mask());
    let mut img = PauliString::identity(n);
    let mut extra = 0i64;
    for &q in qubits {
        let b = qubit_bit(n, q);
        let (x, z) = (p.x_mask() & b != 0, p.z_mask() & b != 0);
        cleared.0 &= !b;
        cleared.1 &= !b;
        // σ(x, z) = i^{xz} X^x Z^z, so the image is i^{xz} img(X)^x img(Z)^z.
        if x && z {
            extra += 1;
        }
        if x {
            img = img.mul_unchecked(&image(q, Pauli::X));
        }
        if z {
            img = img.mul_unchecked(&image(q, Pauli::Z));
        }
    }
    let rest = PauliString::from_masks(n, cleared.0, cleared.1, p.phase()).expect("masks within register");
    let out = rest.mul_unchecked(&img);
    out.with_phase(out.phase() * Phase::from_power(extra))
}

/// `H P H` for a Hadamard on qubit `q`.
pub fn conjugate_hadamard(p: &PauliString, q: usize) -> PauliString {
    let n = p.n();
    conjugate_clifford(p, &[q], |q, a| match a {
        Pauli::X => PauliString::single(n, q, Pauli::Z),
        _ => PauliString::single(n, q, Pauli::X),
    })
}

/// `CNOT P CNOT` for the given control and target.
pub fn conjugate_cnot(p: &PauliString, control: usize, target: usize) -> PauliString {
    let n = p.n();
    conjugate_clifford(p, &[control, target], |q, a| match (q == control, a) {
        (true, Pauli::X) => PauliString::from_sparse(n, &[(control, Pauli::X), (target, Pauli::X)]),
        (true, _) => PauliString::single(n, control, Pauli::Z),
        (false, Pauli::X) => PauliString::single(n, target, Pauli::X),
        (false, _) => PauliString::from_sparse(n, &[(control, Pauli::Z), (target, Pauli::Z)]),
    })
}

fn insert(terms: &mut Terms, p: &PauliString, coeff: f64) {
    let sign = p.phase().sign().expect("Hermitian string");
    let e = terms.entry((p.x_mask(), p.z_mask())).or_insert(0.0);
    *e += sign * coeff;
}

/// `⟨0|U† O U|0⟩` with every intermediate string of weight above `w_max`
/// discarded. Exact when `w_max ≥ n`.
pub fn pauli_propagate(circuit: &Circuit, observable: &PauliString, theta: &[f64], w_max: usize) -> Result<f64> {
    Ok(pauli_propagate_detailed(circuit, observable, theta, w_max, DEFAULT_TERM_CAP)?.value)
}

pub fn pauli_propagate_detailed(
    circuit: &Circuit,
    observable: &PauliString,
    theta: &[f64],
    w_max: usize,
    term_cap: usize,
) -> Result<PropagationReport> {
    let n = circuit.n();
    check_dim(n, observable.n())?;
    if theta.len() != circuit.param_count() {
        return Err(Error::ParamCount {
            expected: circuit.param_count(),
            found: theta.len(),
        });
    }
    if !observable.phase().is_real() {
        return Err(Error::Domain(format!("observable {observable} is not Hermitian")));
    }
    let mut terms = Terms::new();
    let mut peak = 1;
    let mut dropped = 0;
    if observable.weight() <= w_max {
        insert(&mut terms, observable, 1.0);
    } else {
        dropped += 1;
    }
    for gate in circuit.gates().iter().rev() {
        let mut next = Terms::new();
        for (&(x, z), &c) in &terms {
            let p = PauliString::from_masks(n, x, z, Phase::ONE).expect("masks within register");
            match gate {
                Gate::Hadamard(q) => insert(&mut next, &conjugate_hadamard(&p, *q), c),
                Gate::Cnot { control, target } => insert(&mut next, &conjugate_cnot(&p, *control, *target), c),
                Gate::Rotation { generator, param } => {
                    if generator.commutes_with(&p) {
                        insert(&mut next, &p, c);
                        continue;
                    }
                    let t = theta[*param];
                    insert(&mut next, &p, c * t.cos());
                    // i sin θ · G P, where G P carries a phase of ±i.
                    let gp = generator.mul_unchecked(&p);
                    let prod = gp.with_phase(gp.phase() * Phase::I);
                    if prod.weight() > w_max {
                        dropped += 1;
                    } else {
                        insert(&mut next, &prod, c * t.sin());
                    }
                }
            }
        }
        next.retain(|_, v| *v != 0.0);
        peak = peak.max(next.len());
        if next.len() > term_cap {
            return Err(Error::ExpansionCap {
                terms: next.len() as u128,
                cap: term_cap as u128,
            });
        }
        terms = next;
    }
    let value = terms.iter().filter(|((x, _), _)| *x == 0).map(|(_, c)| c).sum();
    Ok(PropagationReport {
        value,
        peak_terms: peak,
        dropped,
    })
}
