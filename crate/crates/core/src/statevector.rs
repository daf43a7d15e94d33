//! Dense statevector simulation of Pauli-rotation circuits.
//!
//! Rotations follow `R_P(θ) = exp(-i θ/2 P)`. Basis index bit `n - 1 - q`
//! holds qubit `q`, so qubit 0 is the most significant bit.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::pauli::{qubit_bit, PauliString, Phase};
use crate::rng::seeded;

/// Largest register the dense simulator accepts.
pub const MAX_DENSE_QUBITS: usize = 24;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

#[inline]
fn times_phase(c: Complex64, ph: Phase) -> Complex64 {
    match ph.power() {
        0 => c,
        1 => Complex64::new(-c.im, c.re),
        2 => -c,
        _ => Complex64::new(c.im, -c.re),
    }
}

impl StateVector {
    /// `|0…0⟩` on `n` qubits.
    pub fn zero(n: usize) -> Result<Self> {
        if n > MAX_DENSE_QUBITS {
            return Err(Error::Domain(format!(
                "dense simulation is capped at {MAX_DENSE_QUBITS} qubits, got {n}"
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n, amps })
    }

    /// Wraps amplitudes, rejecting wrong lengths and states off the unit sphere.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if !len.is_power_of_two() {
            return Err(Error::Domain(format!("amplitude count {len} is not a power of two")));
        }
        let n = len.trailing_zeros() as usize;
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::Unnormalized(norm));
        }
        Ok(StateVector { n, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Applies `exp(-i θ/2 P)`.
    pub fn apply_rotation(&mut self, p: &PauliString, theta: f64) {
        debug_assert_eq!(p.n(), self.n);
        let (s, c) = (0.5 * theta).sin_cos();
        let mis = Complex64::new(0.0, -s);
        let x = p.x_mask();
        if x == 0 {
            for (b, a) in self.amps.iter_mut().enumerate() {
                let (ph, _) = p.apply_to_basis(b as u64);
                *a = *a * c + times_phase(*a, ph) * mis;
            }
            return;
        }
        let top = 1u64 << (63 - x.leading_zeros());
        for b in 0..self.amps.len() as u64 {
            if b & top != 0 {
                continue;
            }
            let b2 = b ^ x;
            let (ph1, _) = p.apply_to_basis(b);
            let (ph2, _) = p.apply_to_basis(b2);
            let a1 = self.amps[b as usize];
            let a2 = self.amps[b2 as usize];
            self.amps[b as usize] = a1 * c + times_phase(a2, ph2) * mis;
            self.amps[b2 as usize] = a2 * c + times_phase(a1, ph1) * mis;
        }
    }

    /// Applies an arbitrary single-qubit unitary `[[u00, u01], [u10, u11]]`.
    pub fn apply_single_qubit(&mut self, q: usize, u: &[[Complex64; 2]; 2]) {
        let bit = qubit_bit(self.n, q) as usize;
        for b in 0..self.amps.len() {
            if b & bit != 0 {
                continue;
            }
            let a0 = self.amps[b];
            let a1 = self.amps[b | bit];
            self.amps[b] = u[0][0] * a0 + u[0][1] * a1;
            self.amps[b | bit] = u[1][0] * a0 + u[1][1] * a1;
        }
    }

    pub fn apply_hadamard(&mut self, q: usize) {
        let bit = qubit_bit(self.n, q) as usize;
        let r = std::f64::consts::FRAC_1_SQRT_2;
        for b in 0..self.amps.len() {
            if b & bit != 0 {
                continue;
            }
            let a0 = self.amps[b];
            let a1 = self.amps[b | bit];
            self.amps[b] = (a0 + a1) * r;
            self.amps[b | bit] = (a0 - a1) * r;
        }
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) {
        let cb = qubit_bit(self.n, control) as usize;
        let tb = qubit_bit(self.n, target) as usize;
        for b in 0..self.amps.len() {
            if b & cb != 0 && b & tb == 0 {
                self.amps.swap(b, b | tb);
            }
        }
    }

    pub fn apply_gate(&mut self, gate: &Gate, theta: &[f64]) {
        match gate {
            Gate::Rotation { generator, param } => self.apply_rotation(generator, theta[*param]),
            Gate::Hadamard(q) => self.apply_hadamard(*q),
            Gate::Cnot { control, target } => self.apply_cnot(*control, *target),
        }
    }

    /// `p(x) = |⟨x|ψ⟩|²`.
    pub fn born_distribution(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `⟨Z_𝒊⟩ = Σ_x (-1)^{x·𝒊} p(x)` for the subset mask `subset`.
    pub fn z_correlator(&self, subset: u64) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .map(|(x, a)| {
                let sign = if (x as u64 & subset).count_ones().is_multiple_of(2) {
                    1.0
                } else {
                    -1.0
                };
                sign * a.norm_sqr()
            })
            .sum()
    }

    /// `⟨ψ|P|ψ⟩` for a Hermitian Pauli string.
    pub fn expectation(&self, p: &PauliString) -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (b, a) in self.amps.iter().enumerate() {
            let (ph, t) = p.apply_to_basis(b as u64);
            acc += self.amps[t as usize].conj() * times_phase(*a, ph);
        }
        acc.re
    }

    /// `m` i.i.d. basis-state draws from the Born distribution.
    pub fn sample(&self, m: usize, seed: u64) -> Vec<u64> {
        sample_distribution(&self.born_distribution(), m, seed)
    }
}

/// Draws `m` indices from `p` by inverse-CDF lookup.
pub fn sample_distribution(p: &[f64], m: usize, seed: u64) -> Vec<u64> {
    let mut cdf = Vec::with_capacity(p.len());
    let mut acc = 0.0;
    for &v in p {
        acc += v.max(0.0);
        cdf.push(acc);
    }
    let total = acc;
    let mut rng = seeded(seed, 0);
    (0..m)
        .map(|_| {
            let u: f64 = rng.random::<f64>() * total;
            let idx = cdf.partition_point(|&c| c <= u);
            idx.min(p.len() - 1) as u64
        })
        .collect()
}

/// One circuit element.
#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    /// `exp(-i θ_param/2 · generator)`.
    Rotation {
        generator: PauliString,
        param: usize,
    },
    Hadamard(usize),
    Cnot {
        control: usize,
        target: usize,
    },
}

/// An ordered gate list on `n` qubits with `param_count` parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n: usize,
    gates: Vec<Gate>,
    param_count: usize,
}

impl Circuit {
    pub fn new(n: usize) -> Self {
        Circuit {
            n,
            gates: Vec::new(),
            param_count: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn param_count(&self) -> usize {
        self.param_count
    }

    /// Appends a rotation on a fresh parameter and returns its index.
    pub fn rotation(&mut self, generator: PauliString) -> usize {
        let idx = self.param_count;
        self.push(Gate::Rotation { generator, param: idx })
            .expect("fresh parameter index is valid");
        idx
    }

    /// Appends a validated gate; parameter indices may be reused.
    pub fn push(&mut self, gate: Gate) -> Result<()> {
        match &gate {
            Gate::Rotation { generator, param } => {
                crate::error::check_dim(self.n, generator.n())?;
                self.param_count = self.param_count.max(param + 1);
            }
            Gate::Hadamard(q) => self.check_qubit(*q)?,
            Gate::Cnot { control, target } => {
                self.check_qubit(*control)?;
                self.check_qubit(*target)?;
                if control == target {
                    return Err(Error::Domain("CNOT control equals target".into()));
                }
            }
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn hadamard(&mut self, q: usize) -> &mut Self {
        self.push(Gate::Hadamard(q)).expect("qubit in range");
        self
    }

    pub fn cnot(&mut self, control: usize, target: usize) -> &mut Self {
        self.push(Gate::Cnot { control, target }).expect("valid CNOT");
        self
    }

    /// Reserves parameters that no gate uses yet.
    pub fn set_param_count(&mut self, count: usize) {
        self.param_count = self.param_count.max(count);
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q < self.n {
            Ok(())
        } else {
            Err(Error::Domain(format!("qubit {q} out of range for n = {}", self.n)))
        }
    }

    /// How many rotation gates reference each parameter.
    pub fn param_multiplicity(&self) -> Vec<usize> {
        let mut count = vec![0; self.param_count];
        for g in &self.gates {
            if let Gate::Rotation { param, .. } = g {
                count[*param] += 1;
            }
        }
        count
    }

    /// Generator support mask of each parameter (union over sharing gates).
    pub fn param_supports(&self) -> Vec<u64> {
        let mut sup = vec![0u64; self.param_count];
        for g in &self.gates {
            if let Gate::Rotation { generator, param } = g {
                sup[*param] |= generator.support();
            }
        }
        sup
    }
}

/// Runs `circuit` on `|0…0⟩`.
pub fn simulate(circuit: &Circuit, theta: &[f64]) -> Result<StateVector> {
    if theta.len() != circuit.param_count {
        return Err(Error::ParamCount {
            expected: circuit.param_count,
            found: theta.len(),
        });
    }
    let mut psi = StateVector::zero(circuit.n)?;
    for g in &circuit.gates {
        psi.apply_gate(g, theta);
    }
    Ok(psi)
}

/// `p(x) = |amp(x)|²` of a normalized state.
pub fn born_distribution(state: &StateVector) -> Vec<f64> {
    state.born_distribution()
}

/// Correlator over a list of zero-based qubits.
pub fn z_correlator(state: &StateVector, qubits: &[usize]) -> f64 {
    state.z_correlator(crate::pauli::qubits_mask(state.n(), qubits))
}
