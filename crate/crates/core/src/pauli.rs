//! Pauli strings in symplectic form.
//!
//! A string on `n` qubits is stored as two bitmasks plus a power of `i`.
//! Qubit `q` (zero-based) lives at bit `n - 1 - q`, so qubit 0 is the most
//! significant bit and masks line up with computational-basis indices.
//! Per qubit the pair `(x, z)` encodes `I`, `X`, `Z` or `Y = iXZ`, which keeps
//! every string with phase `±1` Hermitian.

use std::fmt;

use crate::error::{check_dim, Error, Result};

/// Largest register a [`PauliString`] can address.
pub const MAX_QUBITS: usize = 63;

/// Mask bit for zero-based qubit `q` in an `n`-qubit register.
#[inline]
pub fn qubit_bit(n: usize, q: usize) -> u64 {
    debug_assert!(q < n);
    1u64 << (n - 1 - q)
}

/// All-ones mask over `n` qubits.
#[inline]
pub fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Zero-based qubits set in `mask`, in increasing qubit order.
pub fn mask_qubits(n: usize, mask: u64) -> Vec<usize> {
    (0..n).filter(|&q| mask & qubit_bit(n, q) != 0).collect()
}

/// Mask with the given zero-based qubits set.
pub fn qubits_mask(n: usize, qubits: &[usize]) -> u64 {
    qubits.iter().fold(0, |m, &q| m | qubit_bit(n, q))
}

/// Global phase `i^k`, `k` in `0..4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_power(k: i64) -> Phase {
        Phase(k.rem_euclid(4) as u8)
    }

    pub fn power(self) -> u8 {
        self.0
    }

    pub fn is_real(self) -> bool {
        self.0.is_multiple_of(2)
    }

    /// `±1` for real phases.
    pub fn sign(self) -> Option<f64> {
        match self.0 {
            0 => Some(1.0),
            2 => Some(-1.0),
            _ => None,
        }
    }

    pub fn to_complex(self) -> num_complex::Complex64 {
        use num_complex::Complex64 as C;
        match self.0 {
            0 => C::new(1.0, 0.0),
            1 => C::new(0.0, 1.0),
            2 => C::new(-1.0, 0.0),
            _ => C::new(0.0, -1.0),
        }
    }
}

impl std::ops::Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

/// Single-qubit Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Pauli {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// An `n`-qubit Pauli word `i^k · σ_0 ⊗ … ⊗ σ_{n-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    n: usize,
    x: u64,
    z: u64,
    phase: Phase,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        assert!(n <= MAX_QUBITS, "at most {MAX_QUBITS} qubits");
        PauliString {
            n,
            x: 0,
            z: 0,
            phase: Phase::ONE,
        }
    }

    /// Builds a string from masks; bits at positions `>= n` are rejected.
    pub fn from_masks(n: usize, x: u64, z: u64, phase: Phase) -> Result<Self> {
        if n > MAX_QUBITS {
            return Err(Error::Domain(format!("{n} qubits exceeds {MAX_QUBITS}")));
        }
        if (x | z) & !full_mask(n) != 0 {
            return Err(Error::Domain(format!("mask bits set beyond qubit count {n}")));
        }
        Ok(PauliString { n, x, z, phase })
    }

    /// `P` acting on qubit `q` only.
    pub fn single(n: usize, q: usize, p: Pauli) -> Self {
        assert!(q < n, "qubit {q} out of range for n = {n}");
        let (xb, zb) = p.bits();
        let bit = qubit_bit(n, q);
        PauliString {
            n,
            x: if xb { bit } else { 0 },
            z: if zb { bit } else { 0 },
            phase: Phase::ONE,
        }
    }

    /// Product of `Z` over the qubits in `mask`.
    pub fn z_string(n: usize, mask: u64) -> Self {
        assert!(mask & !full_mask(n) == 0);
        PauliString {
            n,
            x: 0,
            z: mask,
            phase: Phase::ONE,
        }
    }

    /// Product of `X` over the qubits in `mask`.
    pub fn x_string(n: usize, mask: u64) -> Self {
        assert!(mask & !full_mask(n) == 0);
        PauliString {
            n,
            x: mask,
            z: 0,
            phase: Phase::ONE,
        }
    }

    /// Places letters on the listed qubits, identity elsewhere.
    pub fn from_sparse(n: usize, ops: &[(usize, Pauli)]) -> Self {
        let mut s = PauliString::identity(n);
        for &(q, p) in ops {
            let (xb, zb) = p.bits();
            let bit = qubit_bit(n, q);
            s.x = (s.x & !bit) | if xb { bit } else { 0 };
            s.z = (s.z & !bit) | if zb { bit } else { 0 };
        }
        s
    }

    /// Parses labels such as `XZIY`, `-XX` or `+iZ`.
    pub fn from_label(label: &str) -> Result<Self> {
        let (phase, body) = if let Some(rest) = label.strip_prefix("-i") {
            (Phase::MINUS_I, rest)
        } else if let Some(rest) = label.strip_prefix("+i") {
            (Phase::I, rest)
        } else if let Some(rest) = label.strip_prefix('i') {
            (Phase::I, rest)
        } else if let Some(rest) = label.strip_prefix('-') {
            (Phase::MINUS_ONE, rest)
        } else if let Some(rest) = label.strip_prefix('+') {
            (Phase::ONE, rest)
        } else {
            (Phase::ONE, label)
        };
        let n = body.chars().count();
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::Domain(format!("bad Pauli label {label:?}")));
        }
        let mut ops = Vec::with_capacity(n);
        for (q, c) in body.chars().enumerate() {
            let p = match c {
                'I' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                _ => return Err(Error::Domain(format!("bad Pauli letter {c:?}"))),
            };
            ops.push((q, p));
        }
        let mut s = PauliString::from_sparse(n, &ops);
        s.phase = phase;
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    /// Same letters with phase `+1`.
    pub fn canonical(&self) -> Self {
        self.with_phase(Phase::ONE)
    }

    /// Mask of qubits carrying a non-identity letter.
    pub fn support(&self) -> u64 {
        self.x | self.z
    }

    pub fn weight(&self) -> usize {
        self.support().count_ones() as usize
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// True when the string is a product of `I` and `Z` only.
    pub fn is_diagonal(&self) -> bool {
        self.x == 0
    }

    pub fn letter(&self, q: usize) -> Pauli {
        let bit = qubit_bit(self.n, q);
        Pauli::from_bits(self.x & bit != 0, self.z & bit != 0)
    }

    /// Letters without the phase, e.g. `XZIY`.
    pub fn label(&self) -> String {
        (0..self.n).map(|q| self.letter(q).to_char()).collect()
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        symplectic(self, other) == 0
    }

    /// Exact product `self · other`.
    pub fn mul(&self, other: &PauliString) -> Result<PauliString> {
        check_dim(self.n, other.n)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &PauliString) -> PauliString {
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        let e = (self.x & self.z).count_ones() as i64
            + (other.x & other.z).count_ones() as i64
            + 2 * (self.z & other.x).count_ones() as i64
            - (x & z).count_ones() as i64;
        PauliString {
            n: self.n,
            x,
            z,
            phase: self.phase * other.phase * Phase::from_power(e),
        }
    }

    /// Phase and target index of `P|b⟩ = phase · |b ⊕ x⟩`.
    #[inline]
    pub fn apply_to_basis(&self, b: u64) -> (Phase, u64) {
        let e = self.phase.power() as u32 + (self.x & self.z).count_ones() + 2 * (b & self.z).count_ones();
        (Phase((e % 4) as u8), b ^ self.x)
    }
}

/// Symplectic form: 0 when the strings commute, 1 when they anticommute.
pub fn symplectic(a: &PauliString, b: &PauliString) -> u32 {
    ((a.x & b.z).count_ones() + (a.z & b.x).count_ones()) % 2
}

/// Exact product `a · b` with phase tracking.
pub fn pauli_product(a: &PauliString, b: &PauliString) -> Result<PauliString> {
    a.mul(b)
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.phase.power() {
            0 => "",
            1 => "i",
            2 => "-",
            _ => "-i",
        };
        write!(f, "{prefix}{}", self.label())
    }
}
